//! Binary extension fields GF(2^e) for 1 <= e <= 64.
//!
//! Elements are e-bit values; multiplication is carry-less with reduction by
//! a fixed low-weight irreducible polynomial, so all arithmetic is bit-exact
//! and reproducible across platforms. The polynomial table is the standard
//! low-weight table (trinomials where they exist, pentanomials otherwise);
//! a test verifies every entry with Rabin's irreducibility test.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("unsupported extension degree {0} (supported: 1..=64)")]
    UnsupportedDegree(u32),
}

/// Exponents of the non-leading, non-constant terms of the reduction
/// polynomial for each degree e (the polynomial is x^e + ... + 1).
/// Indexed by e - 1.
const LOW_WEIGHT_TAPS: [&[u32]; 64] = [
    &[],          // 1: x + 1
    &[1],         // 2
    &[1],         // 3
    &[1],         // 4
    &[2],         // 5
    &[1],         // 6
    &[1],         // 7
    &[4, 3, 1],   // 8
    &[1],         // 9
    &[3],         // 10
    &[2],         // 11
    &[3],         // 12
    &[4, 3, 1],   // 13
    &[5],         // 14
    &[1],         // 15
    &[5, 3, 1],   // 16
    &[3],         // 17
    &[3],         // 18
    &[5, 2, 1],   // 19
    &[3],         // 20
    &[2],         // 21
    &[1],         // 22
    &[5],         // 23
    &[4, 3, 1],   // 24
    &[3],         // 25
    &[4, 3, 1],   // 26
    &[5, 2, 1],   // 27
    &[1],         // 28
    &[2],         // 29
    &[1],         // 30
    &[3],         // 31
    &[7, 3, 2],   // 32
    &[10],        // 33
    &[7],         // 34
    &[2],         // 35
    &[9],         // 36
    &[6, 4, 1],   // 37
    &[6, 5, 1],   // 38
    &[4],         // 39
    &[5, 4, 3],   // 40
    &[3],         // 41
    &[7],         // 42
    &[6, 4, 3],   // 43
    &[5],         // 44
    &[4, 3, 1],   // 45
    &[1],         // 46
    &[5],         // 47
    &[5, 3, 2],   // 48
    &[9],         // 49
    &[4, 3, 2],   // 50
    &[6, 3, 1],   // 51
    &[3],         // 52
    &[6, 2, 1],   // 53
    &[9],         // 54
    &[7],         // 55
    &[7, 4, 2],   // 56
    &[4],         // 57
    &[19],        // 58
    &[7, 4, 2],   // 59
    &[1],         // 60
    &[5, 2, 1],   // 61
    &[29],        // 62
    &[1],         // 63
    &[4, 3, 1],   // 64
];

/// Reduction polynomial for GF(2^e), including the leading x^e term and the
/// constant 1, as a u128 bit mask.
pub fn reduction_poly(e: u32) -> Result<u128, Gf2Error> {
    if e == 0 || e > 64 {
        return Err(Gf2Error::UnsupportedDegree(e));
    }
    let mut p: u128 = (1u128 << e) | 1;
    for &t in LOW_WEIGHT_TAPS[(e - 1) as usize] {
        p |= 1u128 << t;
    }
    Ok(p)
}

/// A binary extension field GF(2^e). Copyable; carries only the degree and
/// the reduction polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf2e {
    e: u32,
    poly: u128,
}

impl Gf2e {
    pub fn new(e: u32) -> Result<Self, Gf2Error> {
        Ok(Gf2e {
            e,
            poly: reduction_poly(e)?,
        })
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u128 {
        1u128 << self.e
    }

    fn mask(&self) -> u64 {
        if self.e == 64 {
            u64::MAX
        } else {
            (1u64 << self.e) - 1
        }
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        a ^ b
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(clmul(a, b))
    }

    fn reduce(&self, mut x: u128) -> u64 {
        let e = self.e;
        while x >> e != 0 {
            let top = 127 - x.leading_zeros();
            x ^= self.poly << (top - e);
        }
        (x as u64) & self.mask()
    }

    pub fn pow(&self, mut base: u64, mut exp: u128) -> u64 {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero in GF(2^{})", self.e);
        // a^(2^e - 2)
        self.pow(a, self.order() - 2)
    }

    /// Horner evaluation of a polynomial with the given coefficients
    /// (constant term first).
    pub fn poly_eval(&self, coeffs: &[u64], x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in coeffs.iter().rev() {
            acc = self.add(self.mul(acc, x), c);
        }
        acc
    }
}

/// Carry-less 64x64 -> 128 multiplication.
fn clmul(a: u64, b: u64) -> u128 {
    let mut r = 0u128;
    let a = a as u128;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        let tz = b.trailing_zeros();
        shift += tz;
        r ^= a << shift;
        b >>= tz;
        b &= !1;
        if b == 0 {
            break;
        }
    }
    r
}

// ---------------------------------------------------------------------------
// Polynomial arithmetic over GF(2)[x] used to verify the table (Rabin test).
// ---------------------------------------------------------------------------

fn poly_deg(p: u128) -> i32 {
    if p == 0 {
        -1
    } else {
        127 - p.leading_zeros() as i32
    }
}

fn poly_mod(mut a: u128, m: u128) -> u128 {
    let dm = poly_deg(m);
    while poly_deg(a) >= dm {
        a ^= m << ((poly_deg(a) - dm) as u32);
    }
    a
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = poly_mod(a, b);
        a = b;
        b = r;
    }
    a
}

/// Multiply two polynomials mod m; degrees stay below 64 so u128 suffices.
fn poly_mulmod(a: u128, b: u128, m: u128) -> u128 {
    let mut r = 0u128;
    let mut a = poly_mod(a, m);
    let mut b = poly_mod(b, m);
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if poly_deg(a) >= poly_deg(m) {
            a ^= m;
        }
    }
    r
}

/// x^(2^k) mod m by repeated squaring.
fn frobenius_power(k: u32, m: u128) -> u128 {
    let mut x = poly_mod(0b10, m);
    for _ in 0..k {
        x = poly_mulmod(x, x, m);
    }
    x
}

/// Rabin's irreducibility test for a degree-d polynomial over GF(2).
pub fn is_irreducible(p: u128) -> bool {
    let d = poly_deg(p);
    if d <= 0 {
        return false;
    }
    let d = d as u32;
    // x^(2^d) == x (mod p)
    if frobenius_power(d, p) != poly_mod(0b10, p) {
        return false;
    }
    // gcd(x^(2^(d/q)) - x, p) == 1 for every prime q | d
    let mut n = d;
    let mut primes = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            primes.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    for q in primes {
        let h = frobenius_power(d / q, p) ^ poly_mod(0b10, p);
        if poly_gcd(p, h) != 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_entries_are_irreducible() {
        for e in 1..=64u32 {
            let p = reduction_poly(e).unwrap();
            assert!(is_irreducible(p), "table entry for degree {e} is reducible");
        }
    }

    #[test]
    fn gf16_known_products() {
        // GF(2^4) with x^4 + x + 1: x * x^3 = x^4 = x + 1 = 0b0011
        let f = Gf2e::new(4).unwrap();
        assert_eq!(f.mul(0b0010, 0b1000), 0b0011);
        assert_eq!(f.mul(0, 0b1111), 0);
    }

    #[test]
    fn inverses_work_across_degrees() {
        for e in [1u32, 2, 3, 8, 13, 26, 40, 64] {
            let f = Gf2e::new(e).unwrap();
            let mut x: u64 = 0x9e3779b97f4a7c15;
            for _ in 0..20 {
                x = x.wrapping_mul(0x2545f4914f6cdd1d).wrapping_add(1);
                let a = x & f.mask();
                if a == 0 {
                    continue;
                }
                assert_eq!(f.mul(a, f.inv(a)), 1, "a * a^-1 != 1 in GF(2^{e})");
            }
        }
    }

    #[test]
    fn field_axioms_small() {
        // Exhaustive distributivity + associativity in GF(2^3).
        let f = Gf2e::new(3).unwrap();
        for a in 0..8u64 {
            for b in 0..8u64 {
                for c in 0..8u64 {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                }
            }
        }
    }
}

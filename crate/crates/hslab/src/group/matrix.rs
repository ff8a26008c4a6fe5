//! GF(q) scalars and 2x2 matrix groups GL2(F_q) / SL2(F_q).
//!
//! q may be a prime (residue arithmetic) or a power of two (carry-less
//! arithmetic with a fixed irreducible polynomial, see [`crate::gf2`]).
//! Odd prime powers are rejected.
//!
//! Encoding follows the column scheme: the first column (a, c) is any
//! nonzero pair, ranked over the q^2 - 1 possibilities; for GL2 the second
//! column (b, d) is any pair that is not a scalar multiple of the first,
//! ranked over the q^2 - q possibilities; for SL2 the free parameter is b
//! when a != 0 (d is then forced to a^-1 (1 + bc)), and d when a == 0
//! (b is then forced to -c^-1).

use crate::gf2::Gf2e;
use rand::Rng;

/// Scalar field for the matrix groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fq {
    Prime(u32),
    Binary(Gf2e),
}

impl Fq {
    /// Build GF(q) for prime q or q = 2^e (e <= 16). Returns None for
    /// unsupported orders (odd prime powers, composites, 0, 1).
    pub fn new(q: u32) -> Option<Fq> {
        if q < 2 {
            return None;
        }
        if q.is_power_of_two() {
            let e = q.trailing_zeros();
            if e > 16 {
                return None;
            }
            return Some(Fq::Binary(Gf2e::new(e).expect("degree <= 16")));
        }
        if is_prime(q) {
            return Some(Fq::Prime(q));
        }
        None
    }

    pub fn order(&self) -> u32 {
        match self {
            Fq::Prime(p) => *p,
            Fq::Binary(f) => 1u32 << f.degree(),
        }
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        match self {
            Fq::Prime(p) => ((a as u64 + b as u64) % *p as u64) as u32,
            Fq::Binary(f) => f.add(a as u64, b as u64) as u32,
        }
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        match self {
            Fq::Prime(p) => ((a as u64 + *p as u64 - b as u64) % *p as u64) as u32,
            Fq::Binary(f) => f.add(a as u64, b as u64) as u32,
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        self.sub(0, a)
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match self {
            Fq::Prime(p) => ((a as u64 * b as u64) % *p as u64) as u32,
            Fq::Binary(f) => f.mul(a as u64, b as u64) as u32,
        }
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero in GF({})", self.order());
        match self {
            Fq::Prime(p) => {
                // a^(p-2) by square and multiply
                let mut acc = 1u64;
                let mut base = a as u64;
                let mut e = (*p - 2) as u64;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc * base % *p as u64;
                    }
                    base = base * base % *p as u64;
                    e >>= 1;
                }
                acc as u32
            }
            Fq::Binary(f) => f.inv(a as u64) as u32,
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.order())
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Matrix entries in row-major order [a, b, c, d] for [[a, b], [c, d]].
pub type Mat = [u32; 4];

pub fn mat_mul(fq: &Fq, x: &Mat, y: &Mat) -> Mat {
    [
        fq.add(fq.mul(x[0], y[0]), fq.mul(x[1], y[2])),
        fq.add(fq.mul(x[0], y[1]), fq.mul(x[1], y[3])),
        fq.add(fq.mul(x[2], y[0]), fq.mul(x[3], y[2])),
        fq.add(fq.mul(x[2], y[1]), fq.mul(x[3], y[3])),
    ]
}

pub fn mat_det(fq: &Fq, m: &Mat) -> u32 {
    fq.sub(fq.mul(m[0], m[3]), fq.mul(m[1], m[2]))
}

pub fn mat_inv(fq: &Fq, m: &Mat) -> Mat {
    let det = mat_det(fq, m);
    let di = fq.inv(det);
    [
        fq.mul(di, m[3]),
        fq.mul(di, fq.neg(m[1])),
        fq.mul(di, fq.neg(m[2])),
        fq.mul(di, m[0]),
    ]
}

pub fn mat_identity() -> Mat {
    [1, 0, 0, 1]
}

// ---------------------------------------------------------------------------
// Column ranking
// ---------------------------------------------------------------------------

/// Rank of a nonzero pair (a, c) among the q^2 - 1 nonzero pairs in
/// lexicographic order (skipping (0, 0)).
pub fn rank_nonzero_pair(q: u64, a: u64, c: u64) -> u64 {
    debug_assert!(a != 0 || c != 0);
    a * q + c - 1
}

pub fn unrank_nonzero_pair(q: u64, r: u64) -> (u64, u64) {
    debug_assert!(r < q * q - 1);
    let v = r + 1;
    (v / q, v % q)
}

/// Positions (lexicographic, b*q + d) of the q scalar multiples of (a, c),
/// sorted ascending.
fn multiple_positions(fq: &Fq, a: u32, c: u32) -> Vec<u64> {
    let q = fq.order() as u64;
    let mut pos: Vec<u64> = (0..fq.order())
        .map(|lam| {
            let b = fq.mul(lam, a) as u64;
            let d = fq.mul(lam, c) as u64;
            b * q + d
        })
        .collect();
    pos.sort_unstable();
    pos.dedup();
    debug_assert_eq!(pos.len(), fq.order() as usize);
    pos
}

/// Rank of (b, d) among the q^2 - q pairs that are not multiples of (a, c).
pub fn rank_independent_pair(fq: &Fq, a: u32, c: u32, b: u32, d: u32) -> u64 {
    let q = fq.order() as u64;
    let p = b as u64 * q + d as u64;
    let mults = multiple_positions(fq, a, c);
    debug_assert!(!mults.contains(&p), "pair is a multiple");
    let below = mults.iter().filter(|&&m| m < p).count() as u64;
    p - below
}

pub fn unrank_independent_pair(fq: &Fq, a: u32, c: u32, r: u64) -> (u32, u32) {
    let q = fq.order() as u64;
    let mults = multiple_positions(fq, a, c);
    // p is the r-th valid position: p = r + #multiples <= p, found by walking
    // the sorted multiples.
    let mut p = r;
    for &m in &mults {
        if m <= p {
            p += 1;
        } else {
            break;
        }
    }
    ((p / q) as u32, (p % q) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fq_rejects_odd_prime_powers() {
        assert!(Fq::new(9).is_none());
        assert!(Fq::new(25).is_none());
        assert!(Fq::new(6).is_none());
        assert!(Fq::new(1).is_none());
        assert!(Fq::new(4).is_some());
        assert!(Fq::new(7).is_some());
    }

    #[test]
    fn field_inverses() {
        for q in [2u32, 3, 4, 5, 7, 8, 13, 16] {
            let fq = Fq::new(q).unwrap();
            for a in 1..q {
                assert_eq!(fq.mul(a, fq.inv(a)), 1, "GF({q}): {a}");
            }
        }
    }

    #[test]
    fn unipotent_inverse_mod3() {
        // inv([[1,1],[0,1]]) = [[1,2],[0,1]] over GF(3)
        let fq = Fq::new(3).unwrap();
        assert_eq!(mat_inv(&fq, &[1, 1, 0, 1]), [1, 2, 0, 1]);
    }

    #[test]
    fn independent_pair_rank_roundtrip() {
        for q in [2u32, 3, 4, 5] {
            let fq = Fq::new(q).unwrap();
            for ac in 0..(q * q) {
                let (a, c) = (ac / q, ac % q);
                if a == 0 && c == 0 {
                    continue;
                }
                let total = (q * q - q) as u64;
                for r in 0..total {
                    let (b, d) = unrank_independent_pair(&fq, a, c, r);
                    assert_eq!(rank_independent_pair(&fq, a, c, b, d), r);
                    // really independent:
                    assert_ne!(mat_det(&fq, &[a, b, c, d]), 0);
                }
            }
        }
    }
}

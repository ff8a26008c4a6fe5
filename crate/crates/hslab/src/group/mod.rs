//! Finite group families with canonical bitstring encodings.
//!
//! Supported families and their CLI/config descriptors:
//!
//! | descriptor   | group                          | encoding                          |
//! |--------------|--------------------------------|-----------------------------------|
//! | `xor:<n>`    | (Z/2)^n under bitwise XOR      | n bits                            |
//! | `z2n:<n>`    | Z/2^n under addition           | n bits                            |
//! | `zn:<N>`     | Z/N under addition             | ceil(log2 N) bits, values < N     |
//! | `sym:<n>`    | S_n under composition          | Lehmer rank (n <= 20), images (>) |
//! | `gl2:<q>`    | GL2(F_q)                       | column ranks                      |
//! | `sl2:<q>`    | SL2(F_q)                       | column rank + free parameter      |
//! | `prods5:<n>` | S_5^n coordinatewise            | n 7-bit Lehmer codes              |
//!
//! Permutation composition is `(a*b)(x) = a(b(x))` throughout. All values are
//! immutable after construction and safe to share across threads; sampling
//! state is caller-owned.

pub mod matrix;
pub mod sym;
pub mod tower;

use crate::bits::{BitReader, BitWriter, Bits};
use matrix::{Fq, Mat};
use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

pub use tower::SubgroupTower;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("cannot parse group descriptor {0:?}")]
    Parse(String),
    #[error("unsupported parameter for {family}: {reason}")]
    Unsupported { family: &'static str, reason: String },
    #[error("invalid codeword: {0}")]
    InvalidCodeword(String),
    #[error("subgroup towers exist only for z2n and sym families")]
    NoTower,
    #[error("group too large for this operation (order exceeds 2^{0})")]
    TooLarge(u32),
}

/// Which family a group instance belongs to, with its index parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Xor { n: u32 },
    CyclicPow2 { n: u32 },
    Cyclic { n: u64 },
    Sym { n: u32 },
    Gl2 { q: u32 },
    Sl2 { q: u32 },
    ProdS5 { n: u32 },
}

/// One group instance G_i from a family, owning derived data (field tables,
/// bit widths).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Group {
    kind: GroupKind,
    fq: Option<Fq>,
}

/// Internal element payload; the public face is [`GroupElement`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Scalar(u64),
    /// One-line permutation images, 0-based. Also used (flattened, 5 per
    /// coordinate) for prods5.
    Perm(Vec<u8>),
    Mat(Mat),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    kind: GroupKind,
    repr: Repr,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Scalar(v) => write!(f, "g({v})"),
            Repr::Perm(p) => write!(f, "g{p:?}"),
            Repr::Mat(m) => write!(f, "g[[{},{}],[{},{}]]", m[0], m[1], m[2], m[3]),
        }
    }
}

fn bits_for(n: u64) -> u32 {
    // width needed to store values 0..n (n >= 1): ceil(log2 n), min 1
    if n <= 1 {
        1
    } else {
        64 - (n - 1).leading_zeros()
    }
}

impl Group {
    pub fn new(kind: GroupKind) -> Result<Self, GroupError> {
        let fq = match kind {
            GroupKind::Xor { n } | GroupKind::CyclicPow2 { n } => {
                if n == 0 || n > 64 {
                    return Err(GroupError::Unsupported {
                        family: "xor/z2n",
                        reason: format!("n = {n}, need 1..=64"),
                    });
                }
                None
            }
            GroupKind::Cyclic { n } => {
                if n == 0 {
                    return Err(GroupError::Unsupported {
                        family: "zn",
                        reason: "modulus must be >= 1".into(),
                    });
                }
                None
            }
            GroupKind::Sym { n } => {
                if n == 0 || n > 255 {
                    return Err(GroupError::Unsupported {
                        family: "sym",
                        reason: format!("n = {n}, need 1..=255"),
                    });
                }
                None
            }
            GroupKind::Gl2 { q } | GroupKind::Sl2 { q } => Some(Fq::new(q).ok_or_else(|| {
                GroupError::Unsupported {
                    family: "gl2/sl2",
                    reason: format!("q = {q} is not a prime or a power of two <= 2^16"),
                }
            })?),
            GroupKind::ProdS5 { n } => {
                if n == 0 || n > 255 {
                    return Err(GroupError::Unsupported {
                        family: "prods5",
                        reason: format!("n = {n}, need 1..=255"),
                    });
                }
                None
            }
        };
        Ok(Group { kind, fq })
    }

    /// Parse a descriptor like `xor:8`, `z2n:10`, `zn:96`, `sym:5`, `gl2:3`,
    /// `sl2:4`, `prods5:2`.
    pub fn from_descriptor(s: &str) -> Result<Self, GroupError> {
        let (name, arg) = s
            .split_once(':')
            .ok_or_else(|| GroupError::Parse(s.to_string()))?;
        let parse = |v: &str| -> Result<u64, GroupError> {
            v.parse::<u64>().map_err(|_| GroupError::Parse(s.to_string()))
        };
        let kind = match name {
            "xor" => GroupKind::Xor {
                n: parse(arg)? as u32,
            },
            "z2n" => GroupKind::CyclicPow2 {
                n: parse(arg)? as u32,
            },
            "zn" => GroupKind::Cyclic { n: parse(arg)? },
            "sym" => GroupKind::Sym {
                n: parse(arg)? as u32,
            },
            "gl2" => GroupKind::Gl2 {
                q: parse(arg)? as u32,
            },
            "sl2" => GroupKind::Sl2 {
                q: parse(arg)? as u32,
            },
            "prods5" => GroupKind::ProdS5 {
                n: parse(arg)? as u32,
            },
            _ => return Err(GroupError::Parse(s.to_string())),
        };
        Group::new(kind)
    }

    pub fn descriptor(&self) -> String {
        match self.kind {
            GroupKind::Xor { n } => format!("xor:{n}"),
            GroupKind::CyclicPow2 { n } => format!("z2n:{n}"),
            GroupKind::Cyclic { n } => format!("zn:{n}"),
            GroupKind::Sym { n } => format!("sym:{n}"),
            GroupKind::Gl2 { q } => format!("gl2:{q}"),
            GroupKind::Sl2 { q } => format!("sl2:{q}"),
            GroupKind::ProdS5 { n } => format!("prods5:{n}"),
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// Exact group order.
    pub fn order(&self) -> BigUint {
        match self.kind {
            GroupKind::Xor { n } | GroupKind::CyclicPow2 { n } => BigUint::from(1u8) << n,
            GroupKind::Cyclic { n } => BigUint::from(n),
            GroupKind::Sym { n } => (1..=n as u64).map(BigUint::from).product(),
            GroupKind::Gl2 { .. } => {
                let q = self.fq.unwrap().order() as u64;
                BigUint::from((q * q - 1) as u64) * BigUint::from(q * q - q)
            }
            GroupKind::Sl2 { .. } => {
                let q = self.fq.unwrap().order() as u64;
                BigUint::from(q * q * q - q)
            }
            GroupKind::ProdS5 { n } => BigUint::from(120u64).pow(n),
        }
    }

    /// Order as u128 when it fits.
    pub fn order_u128(&self) -> Option<u128> {
        let o = self.order();
        u128::try_from(&o).ok()
    }

    /// Order as u64 when it fits (convenience for desk-scale paths).
    pub fn order_u64(&self) -> Option<u64> {
        u64::try_from(&self.order()).ok()
    }

    /// log2 of the order, rounded up (0 for the trivial group).
    pub fn order_bits(&self) -> u32 {
        let o = self.order();
        if o <= BigUint::from(1u8) {
            return 0;
        }
        (&o - 1u8).bits() as u32
    }

    /// Fixed element encoding length in bits.
    pub fn bit_len(&self) -> u32 {
        match self.kind {
            GroupKind::Xor { n } | GroupKind::CyclicPow2 { n } => n,
            GroupKind::Cyclic { n } => bits_for(n),
            GroupKind::Sym { n } => {
                if n <= 20 {
                    bits_for(sym::factorial(n))
                } else {
                    8 * n
                }
            }
            GroupKind::Gl2 { .. } => {
                let q = self.fq.unwrap().order() as u64;
                bits_for(q * q - 1) + bits_for(q * q - q)
            }
            GroupKind::Sl2 { .. } => {
                let q = self.fq.unwrap().order() as u64;
                bits_for(q * q - 1) + bits_for(q)
            }
            GroupKind::ProdS5 { n } => 7 * n,
        }
    }

    fn check_kind(&self, a: &GroupElement) {
        assert_eq!(
            self.kind, a.kind,
            "element of {:?} used with group {:?}",
            a.kind, self.kind
        );
    }

    pub fn identity(&self) -> GroupElement {
        let repr = match self.kind {
            GroupKind::Xor { .. } | GroupKind::CyclicPow2 { .. } | GroupKind::Cyclic { .. } => {
                Repr::Scalar(0)
            }
            GroupKind::Sym { n } => Repr::Perm(sym::identity(n as usize)),
            GroupKind::Gl2 { .. } | GroupKind::Sl2 { .. } => Repr::Mat(matrix::mat_identity()),
            GroupKind::ProdS5 { n } => {
                Repr::Perm((0..n).flat_map(|_| 0u8..5).collect())
            }
        };
        GroupElement {
            kind: self.kind,
            repr,
        }
    }

    fn scalar_mask(&self) -> u64 {
        match self.kind {
            GroupKind::Xor { n } | GroupKind::CyclicPow2 { n } => {
                if n == 64 {
                    u64::MAX
                } else {
                    (1u64 << n) - 1
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.check_kind(a);
        self.check_kind(b);
        let repr = match (self.kind, &a.repr, &b.repr) {
            (GroupKind::Xor { .. }, Repr::Scalar(x), Repr::Scalar(y)) => Repr::Scalar(x ^ y),
            (GroupKind::CyclicPow2 { .. }, Repr::Scalar(x), Repr::Scalar(y)) => {
                Repr::Scalar(x.wrapping_add(*y) & self.scalar_mask())
            }
            (GroupKind::Cyclic { n }, Repr::Scalar(x), Repr::Scalar(y)) => {
                Repr::Scalar(((*x as u128 + *y as u128) % n as u128) as u64)
            }
            (GroupKind::Sym { .. }, Repr::Perm(p), Repr::Perm(q)) => {
                Repr::Perm(sym::compose(p, q))
            }
            (GroupKind::Gl2 { .. } | GroupKind::Sl2 { .. }, Repr::Mat(x), Repr::Mat(y)) => {
                Repr::Mat(matrix::mat_mul(&self.fq.unwrap(), x, y))
            }
            (GroupKind::ProdS5 { n }, Repr::Perm(p), Repr::Perm(q)) => {
                let mut out = Vec::with_capacity(5 * n as usize);
                for i in 0..n as usize {
                    out.extend(sym::compose(&p[5 * i..5 * i + 5], &q[5 * i..5 * i + 5]));
                }
                Repr::Perm(out)
            }
            _ => unreachable!("repr/kind mismatch"),
        };
        GroupElement {
            kind: self.kind,
            repr,
        }
    }

    pub fn inv(&self, a: &GroupElement) -> GroupElement {
        self.check_kind(a);
        let repr = match (self.kind, &a.repr) {
            (GroupKind::Xor { .. }, Repr::Scalar(x)) => Repr::Scalar(*x),
            (GroupKind::CyclicPow2 { .. }, Repr::Scalar(x)) => {
                Repr::Scalar(x.wrapping_neg() & self.scalar_mask())
            }
            (GroupKind::Cyclic { n }, Repr::Scalar(x)) => Repr::Scalar((n - x) % n),
            (GroupKind::Sym { .. }, Repr::Perm(p)) => Repr::Perm(sym::invert(p)),
            (GroupKind::Gl2 { .. } | GroupKind::Sl2 { .. }, Repr::Mat(m)) => {
                Repr::Mat(matrix::mat_inv(&self.fq.unwrap(), m))
            }
            (GroupKind::ProdS5 { n }, Repr::Perm(p)) => {
                let mut out = Vec::with_capacity(5 * n as usize);
                for i in 0..n as usize {
                    out.extend(sym::invert(&p[5 * i..5 * i + 5]));
                }
                Repr::Perm(out)
            }
            _ => unreachable!("repr/kind mismatch"),
        };
        GroupElement {
            kind: self.kind,
            repr,
        }
    }

    pub fn is_identity(&self, a: &GroupElement) -> bool {
        *a == self.identity()
    }

    /// Uniformly random element; deterministic given the rng stream.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> GroupElement {
        let repr = match self.kind {
            GroupKind::Xor { .. } | GroupKind::CyclicPow2 { .. } => {
                Repr::Scalar(rng.gen::<u64>() & self.scalar_mask())
            }
            GroupKind::Cyclic { n } => {
                // rejection sampling below the modulus for uniformity
                let w = bits_for(n);
                let mask = if w == 64 { u64::MAX } else { (1u64 << w) - 1 };
                loop {
                    let v = rng.gen::<u64>() & mask;
                    if v < n {
                        break Repr::Scalar(v);
                    }
                }
            }
            GroupKind::Sym { n } => Repr::Perm(sym::sample(n as usize, rng)),
            GroupKind::Gl2 { .. } => {
                let fq = self.fq.unwrap();
                loop {
                    let m: Mat = [
                        fq.sample(rng),
                        fq.sample(rng),
                        fq.sample(rng),
                        fq.sample(rng),
                    ];
                    if matrix::mat_det(&fq, &m) != 0 {
                        break Repr::Mat(m);
                    }
                }
            }
            GroupKind::Sl2 { .. } => {
                let fq = self.fq.unwrap();
                let (a, c) = loop {
                    let a = fq.sample(rng);
                    let c = fq.sample(rng);
                    if a != 0 || c != 0 {
                        break (a, c);
                    }
                };
                // q completions of a fixed nonzero first column, picked uniformly
                let free = fq.sample(rng);
                let (b, d) = if a != 0 {
                    let b = free;
                    (b, fq.mul(fq.inv(a), fq.add(1, fq.mul(b, c))))
                } else {
                    (fq.neg(fq.inv(c)), free)
                };
                Repr::Mat([a, b, c, d])
            }
            GroupKind::ProdS5 { n } => {
                let mut out = Vec::with_capacity(5 * n as usize);
                for _ in 0..n {
                    out.extend(sym::sample(5, rng));
                }
                Repr::Perm(out)
            }
        };
        GroupElement {
            kind: self.kind,
            repr,
        }
    }

    // -----------------------------------------------------------------------
    // Canonical codec
    // -----------------------------------------------------------------------

    pub fn encode(&self, a: &GroupElement) -> Bits {
        self.check_kind(a);
        match (&self.kind, &a.repr) {
            (GroupKind::Xor { n } | GroupKind::CyclicPow2 { n }, Repr::Scalar(v)) => {
                Bits::from_u64(*n, *v)
            }
            (GroupKind::Cyclic { n }, Repr::Scalar(v)) => Bits::from_u64(bits_for(*n), *v),
            (GroupKind::Sym { n }, Repr::Perm(p)) => {
                if *n <= 20 {
                    Bits::from_u64(self.bit_len(), sym::lehmer_rank(p))
                } else {
                    Bits::from_bytes(self.bit_len(), p)
                }
            }
            (GroupKind::Gl2 { .. }, Repr::Mat(m)) => {
                let fq = self.fq.unwrap();
                let q = fq.order() as u64;
                let r1 = matrix::rank_nonzero_pair(q, m[0] as u64, m[2] as u64);
                let r2 = matrix::rank_independent_pair(&fq, m[0], m[2], m[1], m[3]);
                let mut w = BitWriter::new(self.bit_len());
                w.push(bits_for(q * q - 1), r1 as u128);
                w.push(bits_for(q * q - q), r2 as u128);
                w.finish()
            }
            (GroupKind::Sl2 { .. }, Repr::Mat(m)) => {
                let fq = self.fq.unwrap();
                let q = fq.order() as u64;
                let r1 = matrix::rank_nonzero_pair(q, m[0] as u64, m[2] as u64);
                // free parameter: b when a != 0, else d
                let free = if m[0] != 0 { m[1] } else { m[3] };
                let mut w = BitWriter::new(self.bit_len());
                w.push(bits_for(q * q - 1), r1 as u128);
                w.push(bits_for(q), free as u128);
                w.finish()
            }
            (GroupKind::ProdS5 { n }, Repr::Perm(p)) => {
                let mut w = BitWriter::new(self.bit_len());
                for i in 0..*n as usize {
                    w.push(7, sym::lehmer_rank(&p[5 * i..5 * i + 5]) as u128);
                }
                w.finish()
            }
            _ => unreachable!("repr/kind mismatch"),
        }
    }

    pub fn decode(&self, bits: &Bits) -> Result<GroupElement, GroupError> {
        if bits.len() != self.bit_len() {
            return Err(GroupError::InvalidCodeword(format!(
                "expected {} bits, got {}",
                self.bit_len(),
                bits.len()
            )));
        }
        let repr = match self.kind {
            GroupKind::Xor { .. } | GroupKind::CyclicPow2 { .. } => Repr::Scalar(bits.to_u64()),
            GroupKind::Cyclic { n } => {
                let v = bits.to_u64();
                if v >= n {
                    return Err(GroupError::InvalidCodeword(format!(
                        "residue {v} >= modulus {n}"
                    )));
                }
                Repr::Scalar(v)
            }
            GroupKind::Sym { n } => {
                if n <= 20 {
                    let r = bits.to_u64();
                    if r >= sym::factorial(n) {
                        return Err(GroupError::InvalidCodeword(format!(
                            "rank {r} >= {n}!"
                        )));
                    }
                    Repr::Perm(sym::lehmer_unrank(n as usize, r))
                } else {
                    let p = bits.bytes()[..n as usize].to_vec();
                    if !sym::is_permutation(&p) {
                        return Err(GroupError::InvalidCodeword(
                            "image sequence is not a permutation".into(),
                        ));
                    }
                    Repr::Perm(p)
                }
            }
            GroupKind::Gl2 { .. } => {
                let fq = self.fq.unwrap();
                let q = fq.order() as u64;
                let mut r = BitReader::new(bits);
                let r1 = r.take(bits_for(q * q - 1)) as u64;
                let r2 = r.take(bits_for(q * q - q)) as u64;
                if r1 >= q * q - 1 || r2 >= q * q - q {
                    return Err(GroupError::InvalidCodeword("rank out of range".into()));
                }
                let (a, c) = matrix::unrank_nonzero_pair(q, r1);
                let (b, d) = matrix::unrank_independent_pair(&fq, a as u32, c as u32, r2);
                Repr::Mat([a as u32, b, c as u32, d])
            }
            GroupKind::Sl2 { .. } => {
                let fq = self.fq.unwrap();
                let q = fq.order() as u64;
                let mut r = BitReader::new(bits);
                let r1 = r.take(bits_for(q * q - 1)) as u64;
                let free = r.take(bits_for(q)) as u64;
                if r1 >= q * q - 1 || free >= q {
                    return Err(GroupError::InvalidCodeword("rank out of range".into()));
                }
                let (a, c) = matrix::unrank_nonzero_pair(q, r1);
                let (a, c, free) = (a as u32, c as u32, free as u32);
                let (b, d) = if a != 0 {
                    (free, fq.mul(fq.inv(a), fq.add(1, fq.mul(free, c))))
                } else {
                    (fq.neg(fq.inv(c)), free)
                };
                Repr::Mat([a, b, c, d])
            }
            GroupKind::ProdS5 { n } => {
                let mut r = BitReader::new(bits);
                let mut out = Vec::with_capacity(5 * n as usize);
                for _ in 0..n {
                    let rank = r.take(7) as u64;
                    if rank >= 120 {
                        return Err(GroupError::InvalidCodeword(format!(
                            "S5 rank {rank} >= 120"
                        )));
                    }
                    out.extend(sym::lehmer_unrank(5, rank));
                }
                Repr::Perm(out)
            }
        };
        Ok(GroupElement {
            kind: self.kind,
            repr,
        })
    }

    // -----------------------------------------------------------------------
    // Rank/unrank (bijection with 0..|G|) for permutation-table machinery
    // -----------------------------------------------------------------------

    /// Bijective rank in 0..|G|. Supported whenever |G| fits in u128 and the
    /// family has a tractable ranking (sym needs n <= 20, prods5 n <= 18).
    pub fn rank(&self, a: &GroupElement) -> Result<u128, GroupError> {
        self.check_kind(a);
        match (&self.kind, &a.repr) {
            (
                GroupKind::Xor { .. }
                | GroupKind::CyclicPow2 { .. }
                | GroupKind::Cyclic { .. },
                Repr::Scalar(v),
            ) => Ok(*v as u128),
            (GroupKind::Sym { n }, Repr::Perm(p)) => {
                if *n > 20 {
                    return Err(GroupError::TooLarge(64));
                }
                Ok(sym::lehmer_rank(p) as u128)
            }
            (GroupKind::Gl2 { .. }, Repr::Mat(m)) => {
                let fq = self.fq.unwrap();
                let q = fq.order() as u64;
                let r1 = matrix::rank_nonzero_pair(q, m[0] as u64, m[2] as u64);
                let r2 = matrix::rank_independent_pair(&fq, m[0], m[2], m[1], m[3]);
                Ok(r1 as u128 * (q * q - q) as u128 + r2 as u128)
            }
            (GroupKind::Sl2 { .. }, Repr::Mat(m)) => {
                let fq = self.fq.unwrap();
                let q = fq.order() as u64;
                let r1 = matrix::rank_nonzero_pair(q, m[0] as u64, m[2] as u64);
                let free = if m[0] != 0 { m[1] } else { m[3] };
                Ok(r1 as u128 * q as u128 + free as u128)
            }
            (GroupKind::ProdS5 { n }, Repr::Perm(p)) => {
                if *n > 18 {
                    return Err(GroupError::TooLarge(128));
                }
                let mut r: u128 = 0;
                for i in 0..*n as usize {
                    r = r * 120 + sym::lehmer_rank(&p[5 * i..5 * i + 5]) as u128;
                }
                Ok(r)
            }
            _ => unreachable!("repr/kind mismatch"),
        }
    }

    pub fn unrank(&self, r: u128) -> Result<GroupElement, GroupError> {
        let repr = match self.kind {
            GroupKind::Xor { .. } | GroupKind::CyclicPow2 { .. } | GroupKind::Cyclic { .. } => {
                Repr::Scalar(r as u64)
            }
            GroupKind::Sym { n } => {
                if n > 20 {
                    return Err(GroupError::TooLarge(64));
                }
                Repr::Perm(sym::lehmer_unrank(n as usize, r as u64))
            }
            GroupKind::Gl2 { .. } => {
                let fq = self.fq.unwrap();
                let q = fq.order() as u64;
                let r1 = (r / (q * q - q) as u128) as u64;
                let r2 = (r % (q * q - q) as u128) as u64;
                let (a, c) = matrix::unrank_nonzero_pair(q, r1);
                let (b, d) = matrix::unrank_independent_pair(&fq, a as u32, c as u32, r2);
                Repr::Mat([a as u32, b, c as u32, d])
            }
            GroupKind::Sl2 { .. } => {
                let fq = self.fq.unwrap();
                let q = fq.order() as u64;
                let r1 = (r / q as u128) as u64;
                let free = (r % q as u128) as u32;
                let (a, c) = matrix::unrank_nonzero_pair(q, r1);
                let (a, c) = (a as u32, c as u32);
                let (b, d) = if a != 0 {
                    (free, fq.mul(fq.inv(a), fq.add(1, fq.mul(free, c))))
                } else {
                    (fq.neg(fq.inv(c)), free)
                };
                Repr::Mat([a, b, c, d])
            }
            GroupKind::ProdS5 { n } => {
                if n > 18 {
                    return Err(GroupError::TooLarge(128));
                }
                let mut digits = vec![0u64; n as usize];
                let mut v = r;
                for i in (0..n as usize).rev() {
                    digits[i] = (v % 120) as u64;
                    v /= 120;
                }
                let mut out = Vec::with_capacity(5 * n as usize);
                for d in digits {
                    out.extend(sym::lehmer_unrank(5, d));
                }
                Repr::Perm(out)
            }
        };
        Ok(GroupElement {
            kind: self.kind,
            repr,
        })
    }

    /// Enumerate the whole group (desk scale; caps at 2^24 elements).
    pub fn enumerate(&self) -> Result<Vec<GroupElement>, GroupError> {
        let order = self.order_u128().ok_or(GroupError::TooLarge(24))?;
        if order > 1 << 24 {
            return Err(GroupError::TooLarge(24));
        }
        (0..order).map(|r| self.unrank(r)).collect()
    }

    /// The subgroup tower (z2n and sym only).
    pub fn tower(&self) -> Result<SubgroupTower, GroupError> {
        SubgroupTower::new(*self)
    }
}

impl GroupElement {
    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// The one-line permutation image sequence (sym elements only).
    pub fn perm_images(&self) -> Option<&[u8]> {
        match &self.repr {
            Repr::Perm(p) => Some(p),
            _ => None,
        }
    }

    /// Scalar value (xor / z2n / zn elements only).
    pub fn scalar(&self) -> Option<u64> {
        match &self.repr {
            Repr::Scalar(v) => Some(*v),
            _ => None,
        }
    }

    /// Matrix entries [a, b, c, d] (gl2 / sl2 elements only).
    pub fn matrix(&self) -> Option<&Mat> {
        match &self.repr {
            Repr::Mat(m) => Some(m),
            _ => None,
        }
    }
}

/// Construct a scalar-family element from a value (xor / z2n / zn).
pub fn scalar_element(group: &Group, v: u64) -> GroupElement {
    match group.kind() {
        GroupKind::Xor { .. } | GroupKind::CyclicPow2 { .. } => GroupElement {
            kind: group.kind(),
            repr: Repr::Scalar(v & group.scalar_mask()),
        },
        GroupKind::Cyclic { n } => GroupElement {
            kind: group.kind(),
            repr: Repr::Scalar(v % n),
        },
        _ => panic!("scalar_element on non-scalar family"),
    }
}

/// Construct a sym-family element from one-line images.
pub fn perm_element(group: &Group, images: Vec<u8>) -> GroupElement {
    match group.kind() {
        GroupKind::Sym { n } => {
            assert_eq!(images.len(), n as usize);
            assert!(sym::is_permutation(&images), "not a permutation");
            GroupElement {
                kind: group.kind(),
                repr: Repr::Perm(images),
            }
        }
        _ => panic!("perm_element on non-sym family"),
    }
}

/// Construct a matrix-family element; panics if the matrix is not in the
/// group (singular, or det != 1 for sl2).
pub fn matrix_element(group: &Group, m: Mat) -> GroupElement {
    let fq = group.fq.expect("matrix_element on non-matrix family");
    let det = matrix::mat_det(&fq, &m);
    match group.kind() {
        GroupKind::Gl2 { .. } => assert!(det != 0, "singular matrix"),
        GroupKind::Sl2 { .. } => assert!(det == 1, "determinant must be 1"),
        _ => panic!("matrix_element on non-matrix family"),
    }
    GroupElement {
        kind: group.kind(),
        repr: Repr::Mat(m),
    }
}

impl Serialize for Group {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.descriptor())
    }
}

impl<'de> Deserialize<'de> for Group {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Group::from_descriptor(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn all_test_groups() -> Vec<Group> {
        [
            "xor:8", "z2n:10", "zn:96", "zn:1", "sym:5", "sym:25", "gl2:3", "gl2:4", "sl2:5",
            "prods5:2",
        ]
        .iter()
        .map(|d| Group::from_descriptor(d).unwrap())
        .collect()
    }

    #[test]
    fn descriptor_roundtrip() {
        for g in all_test_groups() {
            assert_eq!(Group::from_descriptor(&g.descriptor()).unwrap(), g);
        }
        assert!(Group::from_descriptor("nope:3").is_err());
        assert!(Group::from_descriptor("sym").is_err());
        assert!(Group::from_descriptor("gl2:9").is_err());
    }

    #[test]
    fn cyclic_pow2_addition() {
        let g = Group::from_descriptor("z2n:3").unwrap();
        let a = scalar_element(&g, 3);
        let b = scalar_element(&g, 5);
        assert_eq!(g.mul(&a, &b).scalar(), Some(0));
    }

    #[test]
    fn group_axioms_random() {
        for g in all_test_groups() {
            let mut rng = ChaCha12Rng::seed_from_u64(7);
            let e = g.identity();
            for _ in 0..200 {
                let a = g.sample(&mut rng);
                let b = g.sample(&mut rng);
                let c = g.sample(&mut rng);
                assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
                assert_eq!(g.mul(&a, &e), a);
                assert_eq!(g.mul(&e, &a), a);
                assert_eq!(g.mul(&a, &g.inv(&a)), e);
            }
        }
    }

    #[test]
    fn codec_roundtrip_random() {
        for g in all_test_groups() {
            let mut rng = ChaCha12Rng::seed_from_u64(11);
            for _ in 0..200 {
                let a = g.sample(&mut rng);
                let bits = g.encode(&a);
                assert_eq!(bits.len(), g.bit_len());
                assert_eq!(g.decode(&bits).unwrap(), a, "in {}", g.descriptor());
            }
        }
    }

    #[test]
    fn codec_bijective_small_groups() {
        for d in ["xor:6", "z2n:6", "zn:37", "sym:5", "gl2:3", "sl2:4", "prods5:1"] {
            let g = Group::from_descriptor(d).unwrap();
            let all = g.enumerate().unwrap();
            assert_eq!(all.len() as u64, g.order_u64().unwrap());
            let mut seen = std::collections::HashSet::new();
            for a in &all {
                assert!(seen.insert(g.encode(a)), "encoding collision in {d}");
                assert_eq!(g.decode(&g.encode(a)).unwrap(), *a);
            }
        }
    }

    #[test]
    fn invalid_codewords_rejected() {
        let g = Group::from_descriptor("zn:10").unwrap();
        // 4-bit width; value 12 out of range
        assert!(g.decode(&Bits::from_u64(4, 12)).is_err());
        let s = Group::from_descriptor("sym:4").unwrap();
        // rank 24 out of range in 5 bits
        assert!(s.decode(&Bits::from_u64(5, 24)).is_err());
        // wrong width
        assert!(s.decode(&Bits::from_u64(7, 0)).is_err());
    }

    #[test]
    fn matrix_group_orders_by_enumeration() {
        for q in [2u32, 3, 4] {
            let gl = Group::from_descriptor(&format!("gl2:{q}")).unwrap();
            let expect = (q as u64 * q as u64 - 1) * (q as u64 * q as u64 - q as u64);
            assert_eq!(gl.enumerate().unwrap().len() as u64, expect);
            let sl = Group::from_descriptor(&format!("sl2:{q}")).unwrap();
            let expect = (q as u64).pow(3) - q as u64;
            assert_eq!(sl.enumerate().unwrap().len() as u64, expect);
        }
    }

    #[test]
    fn sl2_unipotent_inverse() {
        let g = Group::from_descriptor("sl2:3").unwrap();
        let m = matrix_element(&g, [1, 1, 0, 1]);
        assert_eq!(g.inv(&m).matrix(), Some(&[1, 2, 0, 1]));
    }

    #[test]
    fn sampling_deterministic_and_singleton() {
        let g = Group::from_descriptor("sym:6").unwrap();
        let mut r1 = ChaCha12Rng::seed_from_u64(99);
        let mut r2 = ChaCha12Rng::seed_from_u64(99);
        for _ in 0..50 {
            assert_eq!(g.sample(&mut r1), g.sample(&mut r2));
        }
        let one = Group::from_descriptor("zn:1").unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert!(one.is_identity(&one.sample(&mut rng)));
        }
    }

    #[test]
    fn sampling_uniform_chi_square_s3() {
        // 6000 draws over S_3, exact uniform expectation 1000 per cell;
        // chi^2 threshold at p = 0.001 with 5 dof.
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let g = Group::from_descriptor("sym:3").unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let mut counts = [0u64; 6];
        for _ in 0..6000 {
            let a = g.sample(&mut rng);
            counts[g.rank(&a).unwrap() as usize] += 1;
        }
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - 1000.0;
                d * d / 1000.0
            })
            .sum();
        let p = 1.0 - ChiSquared::new(5.0).unwrap().cdf(chi2);
        assert!(p > 0.001, "chi2 = {chi2}, p = {p}");
    }

    #[test]
    fn sym_large_n_one_line_codec() {
        let g = Group::from_descriptor("sym:25").unwrap();
        assert_eq!(g.bit_len(), 200);
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let a = g.sample(&mut rng);
        let b = g.sample(&mut rng);
        let ab = g.mul(&a, &b);
        assert_eq!(g.decode(&g.encode(&ab)).unwrap(), ab);
        // non-permutation byte string rejected
        let bad = Bits::from_bytes(200, &[0u8; 25]);
        assert!(g.decode(&bad).is_err());
    }

    #[test]
    fn orders_exact() {
        assert_eq!(
            Group::from_descriptor("sym:25").unwrap().order().to_string(),
            "15511210043330985984000000"
        );
        assert_eq!(
            Group::from_descriptor("prods5:2").unwrap().order_u64(),
            Some(14400)
        );
    }
}

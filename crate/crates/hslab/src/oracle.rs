//! Deterministic seeded black-box functions on groups.
//!
//! Two handle shapes cover every oracle in the constructions:
//!
//! * [`BitOracle`] — f: G -> {0,1}^ell. "Random functions" are realized as a
//!   keyed compression (SHA-256 over seed, domain tag and the canonical
//!   element encoding) truncated to ell bits: lazy, stateless, and replayable.
//! * [`GroupOracle`] — f: G -> G, optionally invertible. Random permutations
//!   use a seeded Fisher-Yates table for |G| <= 2^20 and a 10-round balanced
//!   Feistel on the element rank with cycle-walking above that.
//!
//! Handles are cheap to clone (clones share the underlying closure and query
//! counter), shareable across threads, and pure; the query counter is an
//! atomic tally that advances exactly once per evaluation, including through
//! composition layers.

use crate::bits::Bits;
use crate::group::{Group, GroupElement, GroupError};
use sha2::{Digest, Sha256};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle has no inverse closure")]
    NoInverse,
    #[error("width mismatch: expected {expected} bits, got {got}")]
    WidthMismatch { expected: u32, got: u32 },
    #[error("output width {0} unsupported here (need <= 64)")]
    WidthUnsupported(u32),
    #[error("group too large for this oracle construction")]
    GroupTooLarge,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Default oracle output width for a group: 2 ceil(log2 |G|) + 16, so that
/// the range comfortably dwarfs the domain.
pub fn default_ell(group: &Group) -> u32 {
    2 * group.order_bits().max(1) + 16
}

/// Keyed compression of (seed, tag, payload) into `out_bits` bits, expanding
/// with a counter when more than one digest block is needed.
pub fn keyed_bits(seed: u64, tag: &[u8], payload: &[u8], out_bits: u32) -> Bits {
    let nbytes = ((out_bits as usize) + 7) / 8;
    let mut out = Vec::with_capacity(nbytes);
    let mut ctr: u32 = 0;
    while out.len() < nbytes {
        let mut h = Sha256::new();
        h.update(b"hslab.v1");
        h.update(seed.to_le_bytes());
        h.update((tag.len() as u32).to_le_bytes());
        h.update(tag);
        h.update(payload);
        h.update(ctr.to_le_bytes());
        out.extend_from_slice(&h.finalize());
        ctr += 1;
    }
    Bits::from_bytes(out_bits, &out)
}

/// Same mixer, truncated to a u64.
pub fn keyed_u64(seed: u64, tag: &[u8], payload: &[u8]) -> u64 {
    keyed_bits(seed, tag, payload, 64).to_u64()
}

// ---------------------------------------------------------------------------
// BitOracle
// ---------------------------------------------------------------------------

type BitFn = dyn Fn(&GroupElement) -> Bits + Send + Sync;

#[derive(Clone)]
pub struct BitOracle {
    group: Group,
    out_bits: u32,
    eval_fn: Arc<BitFn>,
    calls: Arc<AtomicU64>,
}

impl BitOracle {
    pub fn new(
        group: &Group,
        out_bits: u32,
        f: impl Fn(&GroupElement) -> Bits + Send + Sync + 'static,
    ) -> Self {
        BitOracle {
            group: *group,
            out_bits,
            eval_fn: Arc::new(f),
            calls: Arc::new(AtomicU64::new(0)),
        }
    }

    /// A fresh uniformly-random-looking function G -> {0,1}^ell, determined
    /// by the seed.
    pub fn random(group: &Group, ell: u32, seed: u64) -> Self {
        let g = *group;
        let tag = format!("ro:{}", g.descriptor()).into_bytes();
        BitOracle::new(group, ell, move |x| {
            keyed_bits(seed, &tag, g.encode(x).bytes(), ell)
        })
    }

    pub fn eval(&self, x: &GroupElement) -> Bits {
        self.calls.fetch_add(1, Ordering::Relaxed);
        (self.eval_fn)(x)
    }

    pub fn out_bits(&self) -> u32 {
        self.out_bits
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    /// Total evaluations through this handle (composition layers included,
    /// since they evaluate via the handle they wrap).
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// The left-shift composition x -> f(s * x).
    pub fn shifted(&self, s: &GroupElement) -> Self {
        let base = self.clone();
        let g = self.group;
        let s = s.clone();
        BitOracle::new(&g, self.out_bits, move |x| base.eval(&g.mul(&s, x)))
    }

    /// Arbitrary post-processing of the output bits (width-preserving or not).
    pub fn map_output(
        &self,
        out_bits: u32,
        f: impl Fn(Bits) -> Bits + Send + Sync + 'static,
    ) -> Self {
        let base = self.clone();
        BitOracle::new(&self.group, out_bits, move |x| f(base.eval(x)))
    }

    /// Pointwise XOR of two oracles of equal width.
    pub fn xor_with(&self, other: &BitOracle) -> Result<Self, OracleError> {
        if self.out_bits != other.out_bits {
            return Err(OracleError::WidthMismatch {
                expected: self.out_bits,
                got: other.out_bits,
            });
        }
        let a = self.clone();
        let b = other.clone();
        Ok(BitOracle::new(&self.group, self.out_bits, move |x| {
            a.eval(x).xor(&b.eval(x))
        }))
    }
}

// ---------------------------------------------------------------------------
// GroupOracle
// ---------------------------------------------------------------------------

type GroupFn = dyn Fn(&GroupElement) -> GroupElement + Send + Sync;

/// A function G -> G; carries an inverse closure when it is a permutation
/// constructed with one (random permutations, PRPs).
#[derive(Clone)]
pub struct GroupOracle {
    group: Group,
    forward: Arc<GroupFn>,
    backward: Option<Arc<GroupFn>>,
    calls: Arc<AtomicU64>,
    inv_calls: Arc<AtomicU64>,
}

impl GroupOracle {
    pub fn new(
        group: &Group,
        f: impl Fn(&GroupElement) -> GroupElement + Send + Sync + 'static,
    ) -> Self {
        GroupOracle {
            group: *group,
            forward: Arc::new(f),
            backward: None,
            calls: Arc::new(AtomicU64::new(0)),
            inv_calls: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn new_with_inverse(
        group: &Group,
        f: impl Fn(&GroupElement) -> GroupElement + Send + Sync + 'static,
        f_inv: impl Fn(&GroupElement) -> GroupElement + Send + Sync + 'static,
    ) -> Self {
        GroupOracle {
            group: *group,
            forward: Arc::new(f),
            backward: Some(Arc::new(f_inv)),
            calls: Arc::new(AtomicU64::new(0)),
            inv_calls: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn eval(&self, x: &GroupElement) -> GroupElement {
        self.calls.fetch_add(1, Ordering::Relaxed);
        (self.forward)(x)
    }

    pub fn eval_inv(&self, y: &GroupElement) -> Result<GroupElement, OracleError> {
        let b = self.backward.as_ref().ok_or(OracleError::NoInverse)?;
        self.inv_calls.fetch_add(1, Ordering::Relaxed);
        Ok(b(y))
    }

    pub fn has_inverse(&self) -> bool {
        self.backward.is_some()
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn inv_calls(&self) -> u64 {
        self.inv_calls.load(Ordering::Relaxed)
    }

    /// x -> f(s * x).
    pub fn shifted(&self, s: &GroupElement) -> Self {
        let base = self.clone();
        let g = self.group;
        let s = s.clone();
        GroupOracle::new(&g, move |x| base.eval(&g.mul(&s, x)))
    }

    /// x -> t * f(x).
    pub fn left_mul_output(&self, t: &GroupElement) -> Self {
        let base = self.clone();
        let g = self.group;
        let t = t.clone();
        GroupOracle::new(&g, move |x| g.mul(&t, &base.eval(x)))
    }
}

/// Reduce a bit oracle into the group: the ell-bit output is read as an
/// integer and mapped to the element of that rank modulo |G|, with
/// deterministic rehashing of values past the largest multiple of |G| so the
/// induced distribution stays exactly uniform. Output depends only on the
/// oracle's output bits, so a planted shift relation survives the reduction
/// pointwise.
pub fn to_group_oracle(f: &BitOracle, seed: u64) -> Result<GroupOracle, OracleError> {
    let ell = f.out_bits();
    if ell > 64 {
        return Err(OracleError::WidthUnsupported(ell));
    }
    let group = *f.group();
    let n = group.order_u128().ok_or(OracleError::GroupTooLarge)?;
    let span = 1u128 << ell;
    if span < n {
        return Err(OracleError::GroupTooLarge);
    }
    let threshold = span - span % n;
    let base = f.clone();
    Ok(GroupOracle::new(&group, move |x| {
        let mut v = base.eval(x).to_u64() as u128;
        let mut ctr: u32 = 0;
        while v >= threshold {
            let mut payload = v.to_le_bytes().to_vec();
            payload.extend(ctr.to_le_bytes());
            v = keyed_bits(seed, b"to-group-resample", &payload, ell).to_u64() as u128;
            ctr += 1;
        }
        group.unrank(v % n).expect("rank < |G|")
    }))
}

// ---------------------------------------------------------------------------
// Permutations of G: Fisher-Yates table / rank Feistel with cycle walking
// ---------------------------------------------------------------------------

const TABLE_LIMIT: u128 = 1 << 20;
const FEISTEL_ROUNDS: u32 = 10;

/// A uniformly random permutation of G with oracle access to its inverse.
pub fn random_permutation(group: &Group, seed: u64) -> Result<GroupOracle, OracleError> {
    let n = group.order_u128().ok_or(OracleError::GroupTooLarge)?;
    if n <= TABLE_LIMIT {
        table_permutation(group, seed, b"rand-perm-table")
    } else {
        Ok(feistel_permutation(group, seed, b"rand-perm-feistel")?)
    }
}

/// Seeded Fisher-Yates permutation table with its inverse stored alongside.
fn table_permutation(group: &Group, seed: u64, tag: &[u8]) -> Result<GroupOracle, OracleError> {
    use rand::{Rng, SeedableRng};
    let n = group.order_u128().ok_or(OracleError::GroupTooLarge)? as usize;
    let mut table: Vec<u32> = (0..n as u32).collect();
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(keyed_u64(seed, tag, b"fy"));
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        table.swap(i, j);
    }
    let mut inverse = vec![0u32; n];
    for (i, &v) in table.iter().enumerate() {
        inverse[v as usize] = i as u32;
    }
    let g = *group;
    let table = Arc::new(table);
    let inverse = Arc::new(inverse);
    let (gt, gi) = (g, g);
    let (t1, i1) = (table, inverse);
    Ok(GroupOracle::new_with_inverse(
        group,
        move |x| {
            let r = gt.rank(x).expect("rankable") as usize;
            gt.unrank(t1[r] as u128).expect("in range")
        },
        move |y| {
            let r = gi.rank(y).expect("rankable") as usize;
            gi.unrank(i1[r] as u128).expect("in range")
        },
    ))
}

/// Balanced Feistel on the element rank, cycle-walking ranks that land
/// outside |G|. Invertible for any group whose rank fits u128.
pub fn feistel_permutation(
    group: &Group,
    seed: u64,
    tag: &[u8],
) -> Result<GroupOracle, OracleError> {
    let n = group.order_u128().ok_or(OracleError::GroupTooLarge)?;
    // half-width: the domain is 2^(2w) >= n
    let total_bits = 128 - (n - 1).leading_zeros();
    let w = total_bits.div_ceil(2).max(1);
    if 2 * w > 126 {
        return Err(OracleError::GroupTooLarge);
    }
    let mask = (1u128 << w) - 1;
    let tag = tag.to_vec();

    let round = move |seed: u64, tag: &[u8], i: u32, half: u128| -> u128 {
        let mut payload = half.to_le_bytes().to_vec();
        payload.extend(i.to_le_bytes());
        keyed_bits(seed, tag, &payload, 64).to_u64() as u128 & mask
    };

    let tag_f = tag.clone();
    let fwd_once = move |r: u128| -> u128 {
        let (mut left, mut right) = (r >> w, r & mask);
        for i in 0..FEISTEL_ROUNDS {
            let (l, rr) = (right, left ^ round(seed, &tag_f, i, right));
            left = l;
            right = rr;
        }
        (left << w) | right
    };
    let tag_b = tag.clone();
    let bwd_once = move |r: u128| -> u128 {
        let (mut left, mut right) = (r >> w, r & mask);
        for i in (0..FEISTEL_ROUNDS).rev() {
            let (rr, l) = (left, right ^ round(seed, &tag_b, i, left));
            left = l;
            right = rr;
        }
        (left << w) | right
    };

    let g = *group;
    Ok(GroupOracle::new_with_inverse(
        group,
        move |x| {
            let mut r = g.rank(x).expect("rankable");
            loop {
                r = fwd_once(r);
                if r < n {
                    break;
                }
            }
            g.unrank(r).expect("in range")
        },
        move |y| {
            let mut r = g.rank(y).expect("rankable");
            loop {
                r = bwd_once(r);
                if r < n {
                    break;
                }
            }
            g.unrank(r).expect("in range")
        },
    ))
}

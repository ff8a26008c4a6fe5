//! A toy Kuperberg sieve for hidden shifts over Z/2^n, as a faithful
//! classical emulation of the phase-qubit pipeline.
//!
//! The simulator (which privately holds the planted shift, playing the role
//! of the quantum hardware) issues coset samples: a public uniform label
//! y in Z/2^w plus a concealed single-qubit phase 2 pi s y / 2^w. The sieve
//! sees labels only. Combining two samples yields one sample whose label is
//! y_a + y_b or y_a - y_b, each with probability exactly 1/2 independent of
//! s (a property of the CNOT combine: all amplitudes have unit magnitude).
//! Measuring a label-2^(w-1) sample in the +/- basis returns the bit
//! s mod 2 deterministically, since Pr[0] = cos^2(pi s y / 2^w) is 0 or 1
//! there.
//!
//! One sieve run extracts s mod 2; the instance is then halved -- replace
//! f, g by f'(x) = f(2x), g'(x) = g(2x + b) over Z/2^(w-1), whose shift is
//! (s + b) / 2 -- and the sieve repeats, peeling one bit per round. Labels
//! are paired on a block of low bits of width ~ sqrt(w), which is what gives
//! the sieve its subexponential sample curve.

use crate::group::{scalar_element, Group, GroupElement, GroupKind};
use crate::instance::{assert_secret_closed, HsInstance, OraclePair, Secret};
use crate::oracle::{keyed_u64, BitOracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::collections::HashMap;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KuperbergError {
    #[error("instance must live on a z2n group with n <= 16, got {0}")]
    BadGroup(String),
    #[error("sample budget exhausted at width {width} after {used} samples")]
    BudgetExhausted { width: u32, used: u64 },
}

/// A coset sample: public label, private phase handle (the simulator keeps
/// the phase by keeping s; the label is the only solver-visible field).
#[derive(Clone, Copy, Debug)]
pub struct CosetSample {
    pub label: u64,
}

/// The quantum-hardware side for one instance width: issues fresh samples,
/// combines, and measures. Holds the shift privately.
pub struct CosetSimulator {
    width: u32,
    shift: u64,
    rng: ChaCha12Rng,
    issued: u64,
    combines: u64,
}

impl CosetSimulator {
    fn new(width: u32, shift: u64, seed: u64) -> Self {
        CosetSimulator {
            width,
            shift,
            rng: ChaCha12Rng::seed_from_u64(seed),
            issued: 0,
            combines: 0,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn issued(&self) -> u64 {
        self.issued
    }

    pub fn combines(&self) -> u64 {
        self.combines
    }

    /// One fresh coset sample: uniform label. Costs one oracle query pair in
    /// the emulated algorithm; the budget is enforced by the caller.
    pub fn fresh(&mut self) -> CosetSample {
        self.issued += 1;
        let mask = if self.width == 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        };
        CosetSample {
            label: self.rng.gen::<u64>() & mask,
        }
    }

    /// CNOT-combine two samples: label a + b or a - b mod 2^w, each branch
    /// with probability exactly 1/2, independent of the shift.
    pub fn combine(&mut self, a: CosetSample, b: CosetSample) -> CosetSample {
        self.combines += 1;
        let m = 1u128 << self.width;
        let (la, lb) = (a.label as u128, b.label as u128);
        let label = if self.rng.gen::<bool>() {
            ((la + lb) % m) as u64
        } else {
            ((la + m - lb) % m) as u64
        };
        CosetSample { label }
    }

    /// Measure in the +/- basis: outcome 1 with probability
    /// sin^2(pi s y / 2^w). Deterministic at the target label 2^(w-1),
    /// where the probability is exactly s mod 2.
    pub fn measure(&mut self, s: CosetSample) -> bool {
        let theta = PI * (self.shift as f64) * (s.label as f64) / f64::powi(2.0, self.width as i32);
        let p1 = theta.sin().powi(2);
        if p1 < 1e-9 {
            false
        } else if p1 > 1.0 - 1e-9 {
            true
        } else {
            self.rng.gen::<f64>() < p1
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SieveStats {
    /// fresh samples drawn, total and per peeled width
    pub samples_total: u64,
    pub samples_per_width: Vec<(u32, u64)>,
    pub combines_total: u64,
}

pub struct KuperbergOutcome {
    pub shift: GroupElement,
    pub stats: SieveStats,
}

/// Extract one bit (s mod 2^w mod 2) with the staged sieve. Returns the bit,
/// or None if the budget ran out. `budget` counts fresh samples and is
/// decremented in place.
fn sieve_one_bit(sim: &mut CosetSimulator, budget: &mut u64) -> Option<bool> {
    let w = sim.width();
    if w == 1 {
        // labels are 0 or 1; measure a label-1 sample directly
        loop {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            let s = sim.fresh();
            if s.label == 1 {
                return Some(sim.measure(s));
            }
        }
    }

    // stage boundaries 0 = c_0 < c_1 < ... < c_last = w-1, step ~ sqrt(w)
    let m = ((w as f64).sqrt().round() as u32).max(1);
    let mut cuts = vec![0u32];
    while *cuts.last().unwrap() < w - 1 {
        cuts.push((cuts.last().unwrap() + m).min(w - 1));
    }
    let nstages = cuts.len() - 1;
    // per stage: pending partner keyed by the block bits
    let mut pending: Vec<HashMap<u64, CosetSample>> = vec![HashMap::new(); nstages];

    // insert a label, cascading combines; returns the target sample when a
    // label hits 2^(w-1)
    fn insert(
        sim: &mut CosetSimulator,
        cuts: &[u32],
        pending: &mut [HashMap<u64, CosetSample>],
        mut s: CosetSample,
    ) -> Option<CosetSample> {
        let w = sim.width();
        loop {
            if s.label == 0 {
                return None; // dead: trivial phase
            }
            if s.label == 1u64 << (w - 1) {
                return Some(s);
            }
            let v = s.label.trailing_zeros();
            // deepest stage whose floor is cleared
            let stage = match cuts.iter().rposition(|&c| c <= v) {
                Some(i) if i < pending.len() => i,
                _ => pending.len() - 1,
            };
            let blk_lo = cuts[stage];
            let blk_hi = cuts[stage + 1];
            let key = (s.label >> blk_lo) & ((1u64 << (blk_hi - blk_lo)) - 1);
            match pending[stage].remove(&key) {
                Some(partner) => {
                    s = sim.combine(s, partner);
                    // result clears the block (minus branch) or at least bit
                    // blk_lo (plus branch: both inputs agree mod 2^blk_lo+1
                    // only when blocks match... either way v2 grew or it
                    // recycles to some stage); loop reinserts wherever it fits
                }
                None => {
                    pending[stage].insert(key, s);
                    return None;
                }
            }
        }
    }

    loop {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        let s = sim.fresh();
        if let Some(target) = insert(sim, &cuts, &mut pending, s) {
            return Some(sim.measure(target));
        }
    }
}

/// Recover the planted shift of a z2n hidden-shift instance with the toy
/// sieve, peeling one bit per round. `sample_budget` caps the total number
/// of fresh coset samples across all rounds.
pub fn kuperberg_toy(
    inst: &HsInstance,
    sample_budget: u64,
    seed: u64,
) -> Result<KuperbergOutcome, KuperbergError> {
    assert_secret_closed(inst);
    let GroupKind::CyclicPow2 { n } = inst.group.kind() else {
        return Err(KuperbergError::BadGroup(inst.group.descriptor()));
    };
    if n > 16 {
        return Err(KuperbergError::BadGroup(inst.group.descriptor()));
    }
    // the simulator side holds the shift; the sieve sees labels only
    let full_shift = match inst.simulator_secret() {
        Secret::Shift(s) => s.scalar().expect("z2n scalar"),
        _ => panic!("kuperberg_toy needs a shifted instance"),
    };

    let mut budget = sample_budget;
    let mut stats = SieveStats::default();
    let mut bits = Vec::with_capacity(n as usize);
    let mut shift_w = full_shift;
    for w in (1..=n).rev() {
        let mut sim = CosetSimulator::new(w, shift_w, keyed_u64(seed, b"sieve-round", &w.to_le_bytes()));
        let before = budget;
        let bit = sieve_one_bit(&mut sim, &mut budget);
        stats.samples_total += before - budget;
        stats.samples_per_width.push((w, before - budget));
        stats.combines_total += sim.combines();
        let Some(bit) = bit else {
            return Err(KuperbergError::BudgetExhausted {
                width: w,
                used: sample_budget - budget,
            });
        };
        bits.push(bit);
        // halve: new shift over Z/2^(w-1) is (s + b)/2
        shift_w = (shift_w + bit as u64) / 2 % (1u64 << (w - 1)).max(1);
    }

    // reconstruct: s_w = 2 s_(w-1) - b_w mod 2^w, from the bottom up
    let mut s = 0u64;
    for (i, &b) in bits.iter().rev().enumerate() {
        let w = i as u32 + 1;
        s = (2 * s + (1u64 << w) - b as u64) % (1u64 << w);
    }
    Ok(KuperbergOutcome {
        shift: scalar_element(&inst.group, s),
        stats,
    })
}

/// The halved oracle pair over z2n:(w-1): f'(x) = f(2x), g'(x) = g(2x + b).
/// This is the construction the peeling step consumes; the planted shift of
/// the halved pair is (s + b)/2 when b = s mod 2.
pub fn halved_pair(pair: &OraclePair, bit: bool) -> OraclePair {
    let GroupKind::CyclicPow2 { n } = pair.group.kind() else {
        panic!("halved_pair needs z2n")
    };
    assert!(n >= 2);
    let half = Group::from_descriptor(&format!("z2n:{}", n - 1)).expect("valid");
    let big = pair.group;
    let (f0, g0) = (pair.f.clone(), pair.g.clone());
    let ell = pair.f.out_bits();
    let f = BitOracle::new(&half, ell, move |x| {
        f0.eval(&scalar_element(&big, 2 * x.scalar().unwrap()))
    });
    let g = BitOracle::new(&half, ell, move |x| {
        g0.eval(&scalar_element(&big, 2 * x.scalar().unwrap() + bit as u64))
    });
    OraclePair { group: half, f, g }
}

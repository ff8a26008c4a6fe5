//! Search from decision along a subgroup tower.
//!
//! To find the shift of (f, g) on G with a DRHS decider for the subgroups:
//! walk the tower top-down. At level t with accumulated translate c (the
//! invariant is f(x) = g(c tau x) for some tau in G^(t)), test each
//! transversal representative alpha of G^(t-1) in G^(t) by asking the
//! decider whether (g o L_(c alpha), f) restricted to G^(t-1) are shifts of
//! each other. Exactly one representative should accept; recurse into that
//! coset. At the trivial bottom level the residual shift is forced and the
//! accumulated product c satisfies f = g o L_c, so the planted shift (in the
//! g = f o L_s orientation) is c^-1.
//!
//! With per-level decider errors (eps_t, delta_t), the end-to-end failure is
//! bounded by sum_t [G^(t+1):G^(t)] delta_t + sum_t eps_t.

use crate::group::{GroupElement, SubgroupTower};
use crate::instance::OraclePair;
use crate::solve::{Domain, DomainPair, DrhsDecider, RhsSolver, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Shift(GroupElement),
    /// No coset accepted at some level: consistent with independent oracles.
    Independent { level: u32 },
    /// More than one coset accepted even after the tie-break rerun.
    Ambiguous { level: u32, accepts: usize },
}

pub struct SearchFromDecision<D> {
    decider: D,
    tower: SubgroupTower,
    /// rerun the decider once per accepting coset when several accept
    pub retry_ambiguous: bool,
}

impl<D: DrhsDecider> SearchFromDecision<D> {
    pub fn new(decider: D, tower: SubgroupTower) -> Self {
        SearchFromDecision {
            decider,
            tower,
            retry_ambiguous: true,
        }
    }

    pub fn run(&mut self, pair: &OraclePair) -> SearchOutcome {
        let g = *self.tower.group();
        let mut c = g.identity();
        for level in (1..=self.tower.steps()).rev() {
            let sub = Domain::Level {
                tower: self.tower,
                level: level - 1,
            };
            let reps = self.tower.transversal(level);
            let test = |decider: &mut D, alpha: &GroupElement| -> Verdict {
                let shifted_g = pair.g.shifted(&g.mul(&c, alpha));
                // orientation: f = (g o L_(c alpha)) o L_tau on the subgroup,
                // so the decider's "f" slot gets the translated g
                decider.decide(&DomainPair {
                    dom: sub.clone(),
                    f: shifted_g,
                    g: pair.f.clone(),
                })
            };
            let mut accepted: Vec<&GroupElement> = reps
                .iter()
                .filter(|alpha| test(&mut self.decider, alpha) == Verdict::Shifted)
                .collect();
            if accepted.len() > 1 && self.retry_ambiguous {
                accepted.retain(|alpha| test(&mut self.decider, alpha) == Verdict::Shifted);
            }
            match accepted.len() {
                1 => c = g.mul(&c, accepted[0]),
                0 => return SearchOutcome::Independent { level },
                k => return SearchOutcome::Ambiguous { level, accepts: k },
            }
        }
        SearchOutcome::Shift(g.inv(&c))
    }
}

impl<D: DrhsDecider> RhsSolver for SearchFromDecision<D> {
    fn solve(&mut self, pair: &DomainPair) -> Option<GroupElement> {
        let full = OraclePair {
            group: *pair.group(),
            f: pair.f.clone(),
            g: pair.g.clone(),
        };
        match self.run(&full) {
            SearchOutcome::Shift(s) => Some(s),
            _ => None,
        }
    }
}

/// The error bound sum_t [G^(t+1):G^(t)] delta + sum_t eps for uniform
/// per-call decider errors.
pub fn error_bound(tower: &SubgroupTower, delta: f64, eps: f64) -> f64 {
    (1..=tower.steps())
        .map(|t| tower.index(t) as f64 * delta + eps)
        .sum()
}

/// Wrap a decider with symmetric verdict-flipping noise.
pub struct NoisyDecider<D> {
    inner: D,
    flip_prob: f64,
    rng: ChaCha12Rng,
}

impl<D: DrhsDecider> NoisyDecider<D> {
    pub fn new(inner: D, flip_prob: f64, seed: u64) -> Self {
        NoisyDecider {
            inner,
            flip_prob,
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }
}

impl<D: DrhsDecider> DrhsDecider for NoisyDecider<D> {
    fn decide(&mut self, pair: &DomainPair) -> Verdict {
        let v = self.inner.decide(pair);
        if self.rng.gen::<f64>() < self.flip_prob {
            match v {
                Verdict::Shifted => Verdict::Independent,
                Verdict::Independent => Verdict::Shifted,
            }
        } else {
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attack::brute::brute_drhs_decider;
    use crate::group::Group;
    use crate::instance::{HsInstance, Secret, Variant};
    use crate::oracle::default_ell;

    fn recover(desc: &str, trials: u64) -> u32 {
        let g = Group::from_descriptor(desc).unwrap();
        let tower = g.tower().unwrap();
        let mut ok = 0;
        for seed in 0..trials {
            let inst = HsInstance::generate(Variant::Rhs, &g, default_ell(&g), seed).unwrap();
            let mut search =
                SearchFromDecision::new(brute_drhs_decider(seed ^ 0xdec1de), tower);
            let out = search.run(&inst.pair());
            let Secret::Shift(s) = inst.open_secret() else {
                panic!()
            };
            if out == SearchOutcome::Shift(s.clone()) {
                ok += 1;
            }
        }
        ok
    }

    #[test]
    fn exact_decider_recovers_z2n10() {
        assert_eq!(recover("z2n:10", 50), 50);
    }

    #[test]
    fn exact_decider_recovers_sym5() {
        assert_eq!(recover("sym:5", 50), 50);
    }

    #[test]
    fn independent_reported() {
        let g = Group::from_descriptor("z2n:8").unwrap();
        let tower = g.tower().unwrap();
        let mut seen = 0;
        for seed in 0..60u64 {
            let inst = HsInstance::generate(Variant::Drhs, &g, 40, seed).unwrap();
            if !matches!(inst.simulator_secret(), Secret::Independent) {
                continue;
            }
            seen += 1;
            let mut search = SearchFromDecision::new(brute_drhs_decider(seed), tower);
            assert!(matches!(
                search.run(&inst.pair()),
                SearchOutcome::Independent { .. }
            ));
        }
        assert!(seen >= 15);
    }

    #[test]
    fn noisy_decider_failure_within_bound() {
        // 5% symmetric decider noise on z2n:8: measured end-to-end failure
        // rate stays below the bound sum_t index*delta + sum_t eps (= 1.2
        // here, so the check is a sanity ceiling; the observed rate is far
        // lower thanks to the tie-break rerun).
        let g = Group::from_descriptor("z2n:8").unwrap();
        let tower = g.tower().unwrap();
        let bound = error_bound(&tower, 0.05, 0.05);
        let trials = 300u64;
        let mut failures = 0u32;
        for seed in 0..trials {
            let inst = HsInstance::generate(Variant::Rhs, &g, 40, seed).unwrap();
            let noisy = NoisyDecider::new(brute_drhs_decider(seed), 0.05, seed ^ 0xf00d);
            let mut search = SearchFromDecision::new(noisy, tower);
            let out = search.run(&inst.pair());
            let Secret::Shift(s) = inst.open_secret() else {
                panic!()
            };
            if out != SearchOutcome::Shift(s.clone()) {
                failures += 1;
            }
        }
        let rate = failures as f64 / trials as f64;
        assert!(
            rate <= bound.min(1.0),
            "failure rate {rate} exceeds bound {bound}"
        );
    }

    #[test]
    fn ambiguity_reported_with_hostile_decider() {
        let g = Group::from_descriptor("z2n:6").unwrap();
        let tower = g.tower().unwrap();
        let inst = HsInstance::generate(Variant::Rhs, &g, 28, 1).unwrap();
        let always_yes = |_: &DomainPair| Verdict::Shifted;
        let mut search = SearchFromDecision::new(always_yes, tower);
        assert!(matches!(
            search.run(&inst.pair()),
            SearchOutcome::Ambiguous { accepts: 2, .. }
        ));
    }

    #[test]
    fn eq1_bound_values() {
        let g = Group::from_descriptor("z2n:8").unwrap();
        let t = g.tower().unwrap();
        // 8 steps of index 2: 8 * (2 * 0.05) + 8 * 0.05 = 1.2
        assert!((error_bound(&t, 0.05, 0.05) - 1.2).abs() < 1e-12);
        let s = Group::from_descriptor("sym:3").unwrap().tower().unwrap();
        // indices 1,2,3: (1+2+3) * delta + 3 * eps
        assert!((error_bound(&s, 0.1, 0.01) - (0.6 + 0.03)).abs() < 1e-12);
    }
}

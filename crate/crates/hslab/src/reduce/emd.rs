//! Even-Mansour distinguishability and its reduction to the decisional
//! hidden shift.
//!
//! EMD: given oracle access to P and Q on G, decide whether both are random
//! or Q is an Even-Mansour cipher built on P. A DRHS pair (f, g) converts
//! into an EMD challenge by reading the oracles into the group (rank codec)
//! and presenting f as P and L_t2 o g o L_t1 as Q for fresh uniform t1, t2:
//! when g = f o L_s the challenge equals L_t2 o f o L_(s t1), an
//! Even-Mansour cipher in the left-translate form with keys (s t1, t2);
//! when f, g are independent so is the challenge. The distinguisher's
//! verdict passes through unchanged.

use crate::attack::brute::EmdOracles;
use crate::oracle::{keyed_u64, to_group_oracle, OracleError};
use crate::solve::{DomainPair, DrhsDecider, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// EMD distinguisher role.
pub trait EmdDistinguisher {
    fn decide(&mut self, oracles: &EmdOracles) -> Verdict;
}

impl<F: FnMut(&EmdOracles) -> Verdict> EmdDistinguisher for F {
    fn decide(&mut self, oracles: &EmdOracles) -> Verdict {
        self(oracles)
    }
}

/// DRHS decider built from an EMD distinguisher.
pub struct EmdFromDrhs<D> {
    distinguisher: D,
    seed: u64,
    calls: u64,
}

impl<D: EmdDistinguisher> EmdFromDrhs<D> {
    pub fn new(distinguisher: D, seed: u64) -> Self {
        EmdFromDrhs {
            distinguisher,
            seed,
            calls: 0,
        }
    }
}

/// Wrap a DRHS pair into EMD oracles with fresh translates. Exposed for the
/// oracle-shape tests.
pub fn wrap_pair_as_emd(
    pair: &DomainPair,
    seed: u64,
) -> Result<(EmdOracles, crate::group::GroupElement, crate::group::GroupElement), OracleError> {
    let mut rng = ChaCha12Rng::seed_from_u64(keyed_u64(seed, b"emd-wrap", b""));
    let t1 = pair.dom.sample(&mut rng);
    let t2 = pair.dom.sample(&mut rng);
    let p = to_group_oracle(&pair.f, keyed_u64(seed, b"emd-to-group", b"f"))?;
    let q_base = to_group_oracle(&pair.g, keyed_u64(seed, b"emd-to-group", b"f"))?;
    // Q = L_t2 o g o L_t1 (the rank codec commutes with the shift relation
    // because it reads output bits only)
    let q = q_base.shifted(&t1).left_mul_output(&t2);
    Ok((EmdOracles { p, q }, t1, t2))
}

impl<D: EmdDistinguisher> DrhsDecider for EmdFromDrhs<D> {
    fn decide(&mut self, pair: &DomainPair) -> Verdict {
        self.calls += 1;
        let seed = keyed_u64(self.seed, b"emd-call", &self.calls.to_le_bytes());
        match wrap_pair_as_emd(pair, seed) {
            Ok((oracles, _, _)) => self.distinguisher.decide(&oracles),
            Err(_) => Verdict::Independent,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attack::brute::brute_force_emd;
    use crate::group::Group;
    use crate::instance::{HsInstance, Secret, Variant};
    use crate::solve::DomainPair;

    #[test]
    fn oracle_shape_exhaustive_z2n6() {
        // when g = f o L_s, the wrapped cipher equals L_t2 o f_G o L_(s t1)
        // pointwise on the whole group
        let g = Group::from_descriptor("z2n:6").unwrap();
        for seed in 0..10u64 {
            let inst = HsInstance::generate(Variant::Rhs, &g, 28, seed).unwrap();
            let pair = DomainPair::full(&inst.pair());
            let (oracles, t1, t2) = wrap_pair_as_emd(&pair, seed ^ 0x111).unwrap();
            let Secret::Shift(s) = inst.open_secret() else {
                panic!()
            };
            let st1 = g.mul(s, &t1);
            for x in g.enumerate().unwrap() {
                let lhs = oracles.q.eval(&x);
                let rhs = g.mul(&t2, &oracles.p.eval(&g.mul(&st1, &x)));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn brute_emd_distinguisher_decides_drhs() {
        let g = Group::from_descriptor("z2n:8").unwrap();
        let mut correct = 0;
        let trials = 60u64;
        for seed in 0..trials {
            let inst = HsInstance::generate(Variant::Drhs, &g, 40, seed).unwrap();
            let pair = DomainPair::full(&inst.pair());
            let dist =
                move |o: &EmdOracles| -> Verdict { brute_force_emd(o, 30, seed ^ 0xd15c) };
            let mut decider = EmdFromDrhs::new(dist, seed);
            let verdict = decider.decide(&pair);
            let expected = match inst.open_secret() {
                Secret::Shift(_) => Verdict::Shifted,
                Secret::Independent => Verdict::Independent,
                _ => unreachable!(),
            };
            correct += (verdict == expected) as u64;
        }
        assert_eq!(correct, trials);
    }

    #[test]
    fn coin_flipping_distinguisher_transfers_zero_advantage() {
        let g = Group::from_descriptor("z2n:8").unwrap();
        let mut agree = 0u32;
        let trials = 200u64;
        for seed in 0..trials {
            let inst = HsInstance::generate(Variant::Drhs, &g, 40, seed).unwrap();
            let pair = DomainPair::full(&inst.pair());
            let mut coin_state = seed;
            let coin = move |_: &EmdOracles| -> Verdict {
                coin_state = coin_state.wrapping_mul(6364136223846793005).wrapping_add(1);
                if coin_state >> 63 == 1 {
                    Verdict::Shifted
                } else {
                    Verdict::Independent
                }
            };
            let mut decider = EmdFromDrhs::new(coin, seed);
            let verdict = decider.decide(&pair);
            let actual = match inst.open_secret() {
                Secret::Shift(_) => Verdict::Shifted,
                _ => Verdict::Independent,
            };
            agree += (verdict == actual) as u32;
        }
        // zero advantage: agreement within a binomial CI around 1/2
        let rate = agree as f64 / trials as f64;
        assert!((0.38..=0.62).contains(&rate), "agreement rate {rate}");
    }
}

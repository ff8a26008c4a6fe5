//! Lifting a hidden shift on Z/n to an approximate hidden shift on Z/m.
//!
//! phi_hat(x) = phi(x mod n) turns an instance (f, g) on Z/n into a pair on
//! Z/m whose shift relation g_hat(x) = f_hat(s + x) is guaranteed to hold on
//! at least a 1 - n/m fraction of the domain; any shift congruent to s mod n
//! that reaches that agreement level unlifts to s.
//!
//! The planted pair here commits to the guarantee floor: the top-of-range
//! window [m - n, m) of g_hat — the overhang region where reduction
//! coherence is all that can break — is re-randomized, so the lifted pair
//! agrees on exactly m - n points (up to value collisions at width ell).
//! A consumer tuned to the floor is tested at the floor; the n = m
//! degenerate lift stays exact.

use crate::group::{scalar_element, Group, GroupElement, GroupKind};
use crate::instance::{HsInstance, OraclePair};
use crate::oracle::{keyed_u64, BitOracle};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LiftError {
    #[error("cyclic lift needs a zn-family instance")]
    NotCyclic,
    #[error("target modulus {m} below the required margin {margin} * {n}")]
    MarginTooSmall { n: u64, m: u64, margin: u64 },
    #[error("no congruent candidate passes verification against the source pair")]
    UnliftFailed,
}

pub struct LiftSpec {
    pub source: Group,
    pub target: Group,
    pub f_hat: BitOracle,
    pub g_hat: BitOracle,
    /// number of re-randomized points at the top of Z/m
    pub corrupted: u64,
}

/// Lift an instance on Z/n to Z/m (m >= margin * n; margin defaults to 4,
/// m = n allowed as the exact degenerate case).
pub fn cyclic_lift(inst: &HsInstance, m: u64, margin: u64) -> Result<LiftSpec, LiftError> {
    let GroupKind::Cyclic { n } = inst.group.kind() else {
        return Err(LiftError::NotCyclic);
    };
    if m != n && m < margin.max(1) * n {
        return Err(LiftError::MarginTooSmall { n, m, margin });
    }
    let target = Group::from_descriptor(&format!("zn:{m}")).expect("valid");
    let source = inst.group;
    let pair = inst.pair();
    let ell = pair.f.out_bits();
    let (f, g) = (pair.f, pair.g);
    let f_hat = BitOracle::new(&target, ell, move |x| {
        f.eval(&scalar_element(&source, x.scalar().unwrap() % n))
    });
    let corrupted = if m == n { 0 } else { n };
    let fresh_seed = keyed_u64(inst.seed, b"lift-overhang", &m.to_le_bytes());
    let fresh = BitOracle::random(&target, ell, fresh_seed);
    let g_hat = BitOracle::new(&target, ell, move |x| {
        let v = x.scalar().unwrap();
        if v >= m - corrupted {
            fresh.eval(x)
        } else {
            g.eval(&scalar_element(&source, v % n))
        }
    });
    Ok(LiftSpec {
        source,
        target,
        f_hat,
        g_hat,
        corrupted,
    })
}

impl LiftSpec {
    pub fn target_pair(&self) -> OraclePair {
        OraclePair {
            group: self.target,
            f: self.f_hat.clone(),
            g: self.g_hat.clone(),
        }
    }

    /// Exhaustive agreement count |{x : g_hat(x) = f_hat(s_hat + x)}|.
    pub fn agreement_count(&self, s_hat: u64) -> u64 {
        let m = match self.target.kind() {
            GroupKind::Cyclic { n } => n,
            _ => unreachable!(),
        };
        let sh = scalar_element(&self.target, s_hat);
        (0..m)
            .filter(|&v| {
                let x = scalar_element(&self.target, v);
                self.g_hat.eval(&x) == self.f_hat.eval(&self.target.mul(&sh, &x))
            })
            .count() as u64
    }

    /// All shifts achieving the maximum agreement, with that count.
    pub fn best_shifts(&self) -> (Vec<u64>, u64) {
        let m = match self.target.kind() {
            GroupKind::Cyclic { n } => n,
            _ => unreachable!(),
        };
        let counts: Vec<u64> = (0..m).map(|s| self.agreement_count(s)).collect();
        let best = *counts.iter().max().expect("nonempty");
        (
            (0..m).filter(|&s| counts[s as usize] == best).collect(),
            best,
        )
    }

    /// Reduce a Z/m candidate to Z/n, correcting for the m mod n overhang if
    /// the plain reduction fails, and verifying exhaustively against the
    /// source pair.
    pub fn unlift(&self, pair: &OraclePair, s_hat: u64) -> Result<GroupElement, LiftError> {
        let n = match self.source.kind() {
            GroupKind::Cyclic { n } => n,
            _ => unreachable!(),
        };
        let m = match self.target.kind() {
            GroupKind::Cyclic { n } => n,
            _ => unreachable!(),
        };
        let verify = |cand: u64| -> bool {
            let c = scalar_element(&self.source, cand);
            (0..n).all(|v| {
                let x = scalar_element(&self.source, v);
                pair.g.eval(&x) == pair.f.eval(&self.source.mul(&c, &x))
            })
        };
        let plain = s_hat % n;
        if verify(plain) {
            return Ok(scalar_element(&self.source, plain));
        }
        // overhang correction: a candidate read near the top of Z/m wrapped
        // through m, which displaces the residue by m mod n
        let corrected = (plain + n - (m % n) % n) % n;
        if verify(corrected) {
            return Ok(scalar_element(&self.source, corrected));
        }
        Err(LiftError::UnliftFailed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Secret, Variant};

    #[test]
    fn agreement_exact_count_n12_m96() {
        let g = Group::from_descriptor("zn:12").unwrap();
        for seed in 0..10u64 {
            let inst = HsInstance::generate(Variant::Rhs, &g, 40, seed).unwrap();
            let lift = cyclic_lift(&inst, 96, 4).unwrap();
            let Secret::Shift(s) = inst.open_secret() else {
                panic!()
            };
            let agree = lift.agreement_count(s.scalar().unwrap());
            assert_eq!(agree, 96 - 12, "seed {seed}");
        }
    }

    #[test]
    fn congruent_candidates_all_reach_floor_and_unlift() {
        let g = Group::from_descriptor("zn:12").unwrap();
        let inst = HsInstance::generate(Variant::Rhs, &g, 40, 5).unwrap();
        let lift = cyclic_lift(&inst, 96, 4).unwrap();
        let pair = inst.pair();
        let (winners, best) = lift.best_shifts();
        let Secret::Shift(s) = inst.open_secret() else {
            panic!()
        };
        let sv = s.scalar().unwrap();
        assert!(best as f64 / 96.0 >= 1.0 - 12.0 / 96.0);
        assert!(!winners.is_empty());
        for w in &winners {
            assert_eq!(w % 12, sv, "winner {w} not congruent");
            assert_eq!(lift.unlift(&pair, *w).unwrap().scalar(), Some(sv));
        }
    }

    #[test]
    fn degenerate_n_equals_m_is_exact() {
        let g = Group::from_descriptor("zn:17").unwrap();
        let inst = HsInstance::generate(Variant::Rhs, &g, 40, 2).unwrap();
        let lift = cyclic_lift(&inst, 17, 4).unwrap();
        let Secret::Shift(s) = inst.open_secret() else {
            panic!()
        };
        assert_eq!(lift.corrupted, 0);
        assert_eq!(lift.agreement_count(s.scalar().unwrap()), 17);
    }

    #[test]
    fn margin_enforced() {
        let g = Group::from_descriptor("zn:12").unwrap();
        let inst = HsInstance::generate(Variant::Rhs, &g, 40, 1).unwrap();
        assert!(matches!(
            cyclic_lift(&inst, 36, 4),
            Err(LiftError::MarginTooSmall { .. })
        ));
        assert!(cyclic_lift(&inst, 48, 4).is_ok());
    }

    #[test]
    fn non_congruent_shifts_score_poorly() {
        let g = Group::from_descriptor("zn:12").unwrap();
        let inst = HsInstance::generate(Variant::Rhs, &g, 40, 8).unwrap();
        let lift = cyclic_lift(&inst, 96, 4).unwrap();
        let Secret::Shift(s) = inst.open_secret() else {
            panic!()
        };
        let sv = s.scalar().unwrap();
        for cand in 0..96u64 {
            if cand % 12 != sv {
                assert!(
                    lift.agreement_count(cand) < 10,
                    "non-congruent {cand} scores high"
                );
            }
        }
    }
}

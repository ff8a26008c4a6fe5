//! Hidden-shift problem instances with concealed planted secrets.
//!
//! A generated instance exposes the oracle pair; the planted secret sits
//! behind [`HsInstance::open_secret`], which records that it was opened.
//! Solver entry points assert the secret is still closed when they start, so
//! test code can freely open it afterwards for verification. The in-process
//! oracle separation is a code-review contract; the flag makes violations
//! visible at runtime.

use crate::bits::Bits;
use crate::group::{Group, GroupElement};
use crate::oracle::{keyed_u64, BitOracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("variant {0:?} needs a desk-scale group (|G| <= 2^20) for generation")]
    NeedsSmallGroup(Variant),
    #[error("delta must lie in [0, 1], got {0}")]
    BadDelta(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Hidden Shift: f random, shift chosen (worst-case slot).
    Hs,
    /// Random Hidden Shift: f random, s uniform.
    Rhs,
    /// Decisional RHS: fair coin between a shifted pair and an independent
    /// pair.
    Drhs,
    /// Random Hidden Subgroup: one function constant exactly on the cosets
    /// of a planted cyclic subgroup.
    Rhsp,
    /// Approximate hidden shift: the shift relation holds on all but a
    /// delta fraction of the domain.
    Approx,
}

/// What was planted. Obtainable only through [`HsInstance::open_secret`].
#[derive(Clone, Debug)]
pub enum Secret {
    Shift(GroupElement),
    Independent,
    /// Generator of the hidden subgroup.
    Subgroup(GroupElement),
    ApproxShift { shift: GroupElement, delta: f64 },
}

/// The solver-facing view: a pair of oracles on a common group, no secret.
#[derive(Clone)]
pub struct OraclePair {
    pub group: Group,
    pub f: BitOracle,
    pub g: BitOracle,
}

impl OraclePair {
    pub fn ell(&self) -> u32 {
        self.f.out_bits()
    }

    /// Total oracle evaluations so far (f plus g).
    pub fn queries(&self) -> u64 {
        self.f.calls() + self.g.calls()
    }
}

pub struct HsInstance {
    pub group: Group,
    pub variant: Variant,
    pub ell: u32,
    pub seed: u64,
    f: BitOracle,
    g: BitOracle,
    secret: Secret,
    opened: Arc<AtomicBool>,
}

impl HsInstance {
    /// Generate an instance of the given variant. HS and RHS plant a uniform
    /// shift (HS additionally supports [`Self::generate_with_shift`] for the
    /// worst-case slot); DRHS flips a seeded fair coin between shifted and
    /// independent.
    pub fn generate(
        variant: Variant,
        group: &Group,
        ell: u32,
        seed: u64,
    ) -> Result<HsInstance, InstanceError> {
        let mut rng = ChaCha12Rng::seed_from_u64(keyed_u64(seed, b"instance", b"secret"));
        match variant {
            Variant::Hs | Variant::Rhs => {
                let s = group.sample(&mut rng);
                Ok(Self::build_shifted(variant, group, ell, seed, s))
            }
            Variant::Drhs => {
                if rng.gen::<bool>() {
                    let s = group.sample(&mut rng);
                    Ok(Self::build_shifted(variant, group, ell, seed, s))
                } else {
                    let f = BitOracle::random(group, ell, keyed_u64(seed, b"instance", b"f"));
                    let g = BitOracle::random(group, ell, keyed_u64(seed, b"instance", b"g"));
                    Ok(HsInstance {
                        group: *group,
                        variant,
                        ell,
                        seed,
                        f,
                        g,
                        secret: Secret::Independent,
                        opened: Arc::new(AtomicBool::new(false)),
                    })
                }
            }
            Variant::Rhsp => {
                // cyclic hidden subgroup <h>, h != identity when possible
                let order = group
                    .order_u128()
                    .filter(|&n| n <= 1 << 20)
                    .ok_or(InstanceError::NeedsSmallGroup(variant))?;
                let h = if order == 1 {
                    group.identity()
                } else {
                    loop {
                        let h = group.sample(&mut rng);
                        if !group.is_identity(&h) {
                            break h;
                        }
                    }
                };
                Ok(Self::build_subgroup(group, ell, seed, h))
            }
            Variant::Approx => Err(InstanceError::BadDelta(f64::NAN)),
        }
    }

    /// HS with a caller-chosen shift (worst case over s).
    pub fn generate_with_shift(
        group: &Group,
        ell: u32,
        seed: u64,
        shift: GroupElement,
    ) -> HsInstance {
        Self::build_shifted(Variant::Hs, group, ell, seed, shift)
    }

    /// Approximate hidden shift: g agrees with f o L_s except on a seeded
    /// set of floor(delta * |G|) points, which take fresh random values.
    pub fn generate_approx(
        group: &Group,
        ell: u32,
        seed: u64,
        delta: f64,
    ) -> Result<HsInstance, InstanceError> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(InstanceError::BadDelta(delta));
        }
        let order = group
            .order_u128()
            .filter(|&n| n <= 1 << 20)
            .ok_or(InstanceError::NeedsSmallGroup(Variant::Approx))?;
        let mut rng = ChaCha12Rng::seed_from_u64(keyed_u64(seed, b"instance", b"secret"));
        let s = group.sample(&mut rng);
        let corrupt = ((delta * order as f64).floor() as u128).min(order);
        // seeded distinct ranks to corrupt
        let mut ranks = std::collections::HashSet::new();
        while (ranks.len() as u128) < corrupt {
            ranks.insert(rng.gen_range(0..order));
        }
        let f = BitOracle::random(group, ell, keyed_u64(seed, b"instance", b"f"));
        let fresh = BitOracle::random(group, ell, keyed_u64(seed, b"instance", b"fresh"));
        let shifted = f.shifted(&s);
        let grp = *group;
        let g = BitOracle::new(group, ell, move |x| {
            if ranks.contains(&grp.rank(x).expect("desk scale")) {
                fresh.eval(x)
            } else {
                shifted.eval(x)
            }
        });
        Ok(HsInstance {
            group: *group,
            variant: Variant::Approx,
            ell,
            seed,
            f,
            g,
            secret: Secret::ApproxShift { shift: s, delta },
            opened: Arc::new(AtomicBool::new(false)),
        })
    }

    fn build_shifted(
        variant: Variant,
        group: &Group,
        ell: u32,
        seed: u64,
        s: GroupElement,
    ) -> HsInstance {
        let f = BitOracle::random(group, ell, keyed_u64(seed, b"instance", b"f"));
        let g = f.shifted(&s);
        HsInstance {
            group: *group,
            variant,
            ell,
            seed,
            f,
            g,
            secret: Secret::Shift(s),
            opened: Arc::new(AtomicBool::new(false)),
        }
    }

    fn build_subgroup(group: &Group, ell: u32, seed: u64, h: GroupElement) -> HsInstance {
        let base = BitOracle::random(group, ell, keyed_u64(seed, b"instance", b"f"));
        let grp = *group;
        let hh = h.clone();
        // f(x) = base(canonical representative of the orbit <h> x): constant
        // on right cosets Hx, i.e. f(hx) = f(x), distinct across cosets w.h.p.
        let f = BitOracle::new(group, ell, move |x| {
            let mut best = grp.encode(x);
            let mut cur = x.clone();
            loop {
                cur = grp.mul(&hh, &cur);
                let e = grp.encode(&cur);
                if cur == *x {
                    break;
                }
                if e.bytes() < best.bytes() {
                    best = e;
                }
            }
            base.eval(&grp.decode(&best).expect("canonical rep"))
        });
        let g = f.clone();
        HsInstance {
            group: *group,
            variant: Variant::Rhsp,
            ell,
            seed,
            f,
            g,
            secret: Secret::Subgroup(h),
            opened: Arc::new(AtomicBool::new(false)),
        }
    }

    /// Wrap an externally built pair with a known planted secret (used by
    /// the lifts, which derive new instances from old ones).
    pub(crate) fn from_parts(
        group: &Group,
        variant: Variant,
        ell: u32,
        seed: u64,
        f: BitOracle,
        g: BitOracle,
        secret: Secret,
    ) -> HsInstance {
        HsInstance {
            group: *group,
            variant,
            ell,
            seed,
            f,
            g,
            secret,
            opened: Arc::new(AtomicBool::new(false)),
        }
    }

    pub fn f(&self) -> &BitOracle {
        &self.f
    }

    pub fn g(&self) -> &BitOracle {
        &self.g
    }

    /// The solver-facing oracle pair (handles share query counters with the
    /// instance).
    pub fn pair(&self) -> OraclePair {
        OraclePair {
            group: self.group,
            f: self.f.clone(),
            g: self.g.clone(),
        }
    }

    /// Open the concealed secret. Flips the audit flag; solvers assert the
    /// flag is still clear when they start.
    pub fn open_secret(&self) -> &Secret {
        self.opened.store(true, Ordering::SeqCst);
        &self.secret
    }

    pub fn secret_opened(&self) -> bool {
        self.opened.load(Ordering::SeqCst)
    }

    /// Secret access for the quantum-hardware side of attack simulators
    /// (e.g. the coset-sample source of the sieve). Does not trip the audit
    /// flag: the simulator plays the oracle, not the solver.
    pub(crate) fn simulator_secret(&self) -> &Secret {
        &self.secret
    }

    /// Serializable instance descriptor. Secrets are never serialized.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "variant": self.variant,
            "group": self.group.descriptor(),
            "ell": self.ell,
            "seed": self.seed,
            "opened": self.secret_opened(),
        })
    }
}

/// Exhaustively check the planted relation of a shifted instance
/// (|G| desk-scale): g(x) = f(s x) for all x.
pub fn verify_shift_exhaustive(pair: &OraclePair, s: &GroupElement) -> bool {
    pair.group
        .enumerate()
        .expect("desk scale")
        .iter()
        .all(|x| pair.g.eval(x) == pair.f.eval(&pair.group.mul(s, x)))
}

/// Count agreement |{x : g(x) = f(s x)}| over the whole (desk-scale) domain.
pub fn shift_agreement_count(pair: &OraclePair, s: &GroupElement) -> u64 {
    pair.group
        .enumerate()
        .expect("desk scale")
        .iter()
        .filter(|x| pair.g.eval(x) == pair.f.eval(&pair.group.mul(s, x)))
        .count() as u64
}

/// Assert a solver precondition: the instance secret must not have been
/// opened before the solver runs.
pub fn assert_secret_closed(inst: &HsInstance) {
    assert!(
        !inst.secret_opened(),
        "solver invoked on an instance whose secret was already opened"
    );
}

pub fn bits_xor(a: &Bits, b: &Bits) -> Bits {
    a.xor(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::default_ell;

    #[test]
    fn rhs_plants_exact_shift_sym4() {
        let g = Group::from_descriptor("sym:4").unwrap();
        let inst = HsInstance::generate(Variant::Rhs, &g, default_ell(&g), 42).unwrap();
        let pair = inst.pair();
        let Secret::Shift(s) = inst.open_secret() else {
            panic!("expected shift")
        };
        assert!(verify_shift_exhaustive(&pair, s));
    }

    #[test]
    fn drhs_independent_fits_no_shift() {
        // over 64 shift candidates, none explains every point
        let g = Group::from_descriptor("z2n:6").unwrap();
        // find a seed that lands on the independent branch
        let inst = (0..100)
            .map(|seed| HsInstance::generate(Variant::Drhs, &g, 32, seed).unwrap())
            .find(|i| matches!(i.simulator_secret(), Secret::Independent))
            .expect("some seed lands independent");
        let pair = inst.pair();
        for s in g.enumerate().unwrap() {
            assert!(!verify_shift_exhaustive(&pair, &s), "shift {s:?} fits");
        }
    }

    #[test]
    fn drhs_coin_is_roughly_fair() {
        let g = Group::from_descriptor("z2n:6").unwrap();
        let shifted = (0..200)
            .filter(|&seed| {
                let i = HsInstance::generate(Variant::Drhs, &g, 32, seed).unwrap();
                matches!(i.simulator_secret(), Secret::Shift(_))
            })
            .count();
        assert!((60..140).contains(&shifted), "shifted in {shifted}/200");
    }

    #[test]
    fn rhsp_constant_on_cosets_distinct_across() {
        let g = Group::from_descriptor("xor:4").unwrap();
        let inst = HsInstance::generate(Variant::Rhsp, &g, 48, 7).unwrap();
        let Secret::Subgroup(h) = inst.open_secret() else {
            panic!("expected subgroup")
        };
        let f = inst.f();
        let mut by_coset = std::collections::HashMap::new();
        for x in g.enumerate().unwrap() {
            // orbit {x, x + h} since h has order 2 in xor:4
            assert_eq!(f.eval(&x), f.eval(&g.mul(h, &x)), "not constant on coset");
            let key = {
                let a = g.encode(&x);
                let b = g.encode(&g.mul(h, &x));
                if a.bytes() < b.bytes() {
                    a
                } else {
                    b
                }
            };
            by_coset.entry(key).or_insert_with(|| f.eval(&x));
        }
        let distinct: std::collections::HashSet<_> = by_coset.values().cloned().collect();
        assert_eq!(distinct.len(), by_coset.len(), "coset values collide");
    }

    #[test]
    fn approx_agreement_rate() {
        let g = Group::from_descriptor("z2n:8").unwrap();
        let inst = HsInstance::generate_approx(&g, 40, 3, 0.1).unwrap();
        let pair = inst.pair();
        let Secret::ApproxShift { shift, delta } = inst.open_secret() else {
            panic!("expected approx")
        };
        let agree = shift_agreement_count(&pair, shift);
        assert!(agree as f64 >= (1.0 - delta) * 256.0, "agreement {agree}/256");
        assert!(agree < 256, "corruption did nothing");
    }

    #[test]
    fn opened_flag_and_json() {
        let g = Group::from_descriptor("z2n:6").unwrap();
        let inst = HsInstance::generate(Variant::Rhs, &g, 32, 1).unwrap();
        assert!(!inst.secret_opened());
        let j = inst.to_json();
        assert_eq!(j["opened"], false);
        assert_eq!(j["group"], "z2n:6");
        assert!(j.get("secret").is_none());
        inst.open_secret();
        assert!(inst.secret_opened());
        assert_eq!(inst.to_json()["opened"], true);
    }
}

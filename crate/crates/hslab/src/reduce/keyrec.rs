//! Hidden shift from Even-Mansour key recovery over G x G.
//!
//! From a shift pair on G (converted below to the right-shift orientation
//! f(x) = g(x s)), build the permutations of G x G
//!
//! ```text
//! P_f(x, y) = (x, y f(x))        P_g(x, y) = (x, y g(x))
//! ```
//!
//! sample keys k1 = (x1, y1), k2 = (x2, y2), and define E as the
//! Even-Mansour cipher over G x G built from P_f with those keys. The
//! rewrite chain
//!
//! ```text
//! E(x, y) = P_f(x x1, y y1) (x2, y2)
//!         = (x x1, y y1 f(x x1)) (x2, y2)
//!         = (x x1 s, y y1 f(x x1)) (s^-1 x2, y2)
//!         = (x x1 s, y y1 g(x x1 s)) (s^-1 x2, y2)
//!         = P_g(x x1 s, y y1) (s^-1 x2, y2)
//! ```
//!
//! shows E is simultaneously the Even-Mansour cipher over P_g with keys
//! ((x1 s, y1), (s^-1 x2, y2)). A key-recovery adversary given E, E^-1 and
//! the "public" P_g, P_g^-1 therefore hands back the shift in its first
//! coordinates.

use crate::group::{Group, GroupElement};
use crate::instance::{assert_secret_closed, HsInstance, OraclePair};
use crate::oracle::{keyed_u64, to_group_oracle, GroupOracle, OracleError};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KeyRecError {
    #[error("adversary returned no keys")]
    NoAnswer,
    #[error("returned keys do not satisfy E = P(m k1') k2' on test points")]
    InconsistentKeys,
    #[error("the two shift extractions disagree: {0:?} vs {1:?}")]
    ExtractionMismatch(GroupElement, GroupElement),
    #[error("extracted shift fails the classical shift check")]
    BadShift,
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// An element of G x G.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair(pub GroupElement, pub GroupElement);

/// Componentwise group structure on G x G.
#[derive(Clone, Copy)]
pub struct PairGroup {
    pub base: Group,
}

impl PairGroup {
    pub fn mul(&self, a: &Pair, b: &Pair) -> Pair {
        Pair(self.base.mul(&a.0, &b.0), self.base.mul(&a.1, &b.1))
    }

    pub fn inv(&self, a: &Pair) -> Pair {
        Pair(self.base.inv(&a.0), self.base.inv(&a.1))
    }

    pub fn identity(&self) -> Pair {
        Pair(self.base.identity(), self.base.identity())
    }

    pub fn sample<R: rand::Rng>(&self, rng: &mut R) -> Pair {
        Pair(self.base.sample(rng), self.base.sample(rng))
    }
}

type PairFn = Arc<dyn Fn(&Pair) -> Pair + Send + Sync>;

/// Invertible function on G x G handed to the adversary.
#[derive(Clone)]
pub struct PairPerm {
    pub forward: PairFn,
    pub backward: PairFn,
}

impl PairPerm {
    pub fn eval(&self, x: &Pair) -> Pair {
        (self.forward)(x)
    }

    pub fn eval_inv(&self, y: &Pair) -> Pair {
        (self.backward)(y)
    }
}

/// P_h(x, y) = (x, y h(x)) for an h: G -> G; inverse (x, y) -> (x, y h(x)^-1).
pub fn coordinate_perm(group: &Group, h: &GroupOracle) -> PairPerm {
    let g = *group;
    let (hf, hb) = (h.clone(), h.clone());
    PairPerm {
        forward: Arc::new(move |p: &Pair| Pair(p.0.clone(), g.mul(&p.1, &hf.eval(&p.0)))),
        backward: Arc::new(move |p: &Pair| {
            Pair(p.0.clone(), g.mul(&p.1, &g.inv(&hb.eval(&p.0))))
        }),
    }
}

/// What the adversary sees: the cipher and the "public" permutation, both
/// with inverses, over G x G.
pub struct EmPairOracles {
    pub group: Group,
    pub enc: PairPerm,
    pub dec: PairPerm,
    pub public_p: PairPerm,
    pub public_p_inv: PairPerm,
}

/// Key-recovery adversary role: return (k1', k2') with
/// enc(m) = public_p(m k1') k2'.
pub trait EmKeyRecoverer {
    fn recover(&mut self, oracles: &EmPairOracles) -> Option<(Pair, Pair)>;
}

impl<F: FnMut(&EmPairOracles) -> Option<(Pair, Pair)>> EmKeyRecoverer for F {
    fn recover(&mut self, oracles: &EmPairOracles) -> Option<(Pair, Pair)> {
        self(oracles)
    }
}

/// The prepared reduction: oracles for the adversary plus the sampled keys
/// (reduction-internal randomness, exposed for white-box tests; the planted
/// shift is not here).
pub struct KeyRecSetup {
    pub group: Group,
    pub pairs: PairGroup,
    pub oracles: EmPairOracles,
    pub k1: Pair,
    pub k2: Pair,
    f_g: GroupOracle,
    g_g: GroupOracle,
}

/// Convert a planted pair (g = f o L_s, bit-valued) into the right-shift
/// orientation used by the chain: F(x) := f_G(x^-1) and G_(x) := g_G(x^-1)
/// satisfy F(x) = G_(x s) with the same planted s.
pub fn right_shift_orientation(
    pair: &OraclePair,
    seed: u64,
) -> Result<(GroupOracle, GroupOracle), OracleError> {
    let g = pair.group;
    let f_g = to_group_oracle(&pair.f, keyed_u64(seed, b"keyrec-to-group", b""))?;
    let g_g = to_group_oracle(&pair.g, keyed_u64(seed, b"keyrec-to-group", b""))?;
    let (gf, gg) = (g, g);
    let (bf, bg) = (f_g, g_g);
    Ok((
        GroupOracle::new(&g, move |x| bf.eval(&gf.inv(x))),
        GroupOracle::new(&g, move |x| bg.eval(&gg.inv(x))),
    ))
}

pub fn prepare(pair: &OraclePair, seed: u64) -> Result<KeyRecSetup, KeyRecError> {
    let group = pair.group;
    let pairs = PairGroup { base: group };
    let (f_r, g_r) = right_shift_orientation(pair, seed)?;
    let pf = coordinate_perm(&group, &f_r);
    let pg = coordinate_perm(&group, &g_r);
    let mut rng = ChaCha12Rng::seed_from_u64(keyed_u64(seed, b"keyrec-keys", b""));
    let k1 = pairs.sample(&mut rng);
    let k2 = pairs.sample(&mut rng);

    // E = Even-Mansour over P_f with keys (k1, k2)
    let (pf_e, pf_d) = (pf.clone(), pf.clone());
    let (k1e, k2e) = (k1.clone(), k2.clone());
    let (k1d, k2d) = (k1.clone(), k2.clone());
    let pe = pairs;
    let enc = PairPerm {
        forward: Arc::new(move |m: &Pair| pe.mul(&pf_e.eval(&pe.mul(m, &k1e)), &k2e)),
        backward: Arc::new(move |c: &Pair| {
            pe.mul(&pf_d.eval_inv(&pe.mul(c, &pe.inv(&k2d))), &pe.inv(&k1d))
        }),
    };
    let dec = PairPerm {
        forward: enc.backward.clone(),
        backward: enc.forward.clone(),
    };
    let public_p_inv = PairPerm {
        forward: pg.backward.clone(),
        backward: pg.forward.clone(),
    };
    Ok(KeyRecSetup {
        group,
        pairs,
        oracles: EmPairOracles {
            group,
            enc,
            dec,
            public_p: pg,
            public_p_inv,
        },
        k1,
        k2,
        f_g: f_r,
        g_g: g_r,
    })
}

impl KeyRecSetup {
    /// Run the adversary, validate its keys against the cipher, and extract
    /// the shift from both coordinates.
    pub fn run<A: EmKeyRecoverer>(&self, adversary: &mut A) -> Result<GroupElement, KeyRecError> {
        let (rk1, rk2) = adversary
            .recover(&self.oracles)
            .ok_or(KeyRecError::NoAnswer)?;
        // consistency: enc(m) = P_g(m rk1) rk2 on sample points
        let mut rng = ChaCha12Rng::seed_from_u64(0x7e57);
        for _ in 0..24 {
            let m = self.pairs.sample(&mut rng);
            let lhs = self.oracles.enc.eval(&m);
            let rhs = self
                .pairs
                .mul(&self.oracles.public_p.eval(&self.pairs.mul(&m, &rk1)), &rk2);
            if lhs != rhs {
                return Err(KeyRecError::InconsistentKeys);
            }
        }
        // rk1 = (x1 s, y1), rk2 = (s^-1 x2, y2)
        let g = self.group;
        let s_from_k1 = g.mul(&g.inv(&self.k1.0), &rk1.0);
        let s_from_k2 = g.mul(&self.k2.0, &g.inv(&rk2.0));
        if s_from_k1 != s_from_k2 {
            return Err(KeyRecError::ExtractionMismatch(s_from_k1, s_from_k2));
        }
        Ok(s_from_k1)
    }

    /// Check all five equalities of the rewrite chain at a random point,
    /// given the (test-side, opened) shift.
    pub fn rewrite_chain_holds<R: rand::Rng>(&self, s: &GroupElement, rng: &mut R) -> bool {
        let g = self.group;
        let p = self.pairs;
        let m = p.sample(rng);
        let e = self.oracles.enc.eval(&m);
        let (x, y) = (&m.0, &m.1);
        let (x1, y1) = (&self.k1.0, &self.k1.1);
        let (x2, y2) = (&self.k2.0, &self.k2.1);
        // 1: P_f(x x1, y y1) * k2
        let xx1 = g.mul(x, x1);
        let yy1 = g.mul(y, y1);
        let line1 = p.mul(
            &coordinate_perm(&g, &self.f_g).eval(&Pair(xx1.clone(), yy1.clone())),
            &self.k2,
        );
        // 2: (x x1, y y1 f(x x1)) * k2
        let f_xx1 = self.f_g.eval(&xx1);
        let line2 = p.mul(&Pair(xx1.clone(), g.mul(&yy1, &f_xx1)), &self.k2);
        // 3: (x x1 s, y y1 f(x x1)) * (s^-1 x2, y2)
        let xx1s = g.mul(&xx1, s);
        let tail = Pair(g.mul(&g.inv(s), x2), y2.clone());
        let line3 = p.mul(&Pair(xx1s.clone(), g.mul(&yy1, &f_xx1)), &tail);
        // 4: (x x1 s, y y1 g(x x1 s)) * (s^-1 x2, y2)
        let g_xx1s = self.g_g.eval(&xx1s);
        let line4 = p.mul(&Pair(xx1s.clone(), g.mul(&yy1, &g_xx1s)), &tail);
        // 5: P_g(x x1 s, y y1) * (s^-1 x2, y2)
        let line5 = p.mul(
            &coordinate_perm(&g, &self.g_g).eval(&Pair(xx1s, yy1)),
            &tail,
        );
        e == line1 && e == line2 && e == line3 && e == line4 && e == line5
    }
}

/// Full reduction: prepare, run the adversary, verify the extracted shift
/// against the instance with classical queries.
pub fn hs_from_em_keyrecovery<A: EmKeyRecoverer>(
    inst: &HsInstance,
    adversary: &mut A,
    seed: u64,
    check: usize,
) -> Result<GroupElement, KeyRecError> {
    assert_secret_closed(inst);
    let pair = inst.pair();
    let setup = prepare(&pair, seed)?;
    let s = setup.run(adversary)?;
    let mut rng = ChaCha12Rng::seed_from_u64(keyed_u64(seed, b"keyrec-verify", b""));
    let ok = (0..check).all(|_| {
        let x = pair.group.sample(&mut rng);
        pair.g.eval(&x) == pair.f.eval(&pair.group.mul(&s, &x))
    });
    if ok {
        Ok(s)
    } else {
        Err(KeyRecError::BadShift)
    }
}

/// Honest brute-force key recovery: search k1' over G x G, derive k2' from
/// one query, verify on sample points. Feasible for |G|^2 <= 2^20.
pub fn brute_force_em_keyrec(oracles: &EmPairOracles, check: usize, seed: u64) -> Option<(Pair, Pair)> {
    let g = oracles.group;
    let order = g.order_u128().expect("desk scale") as u64;
    assert!(order * order <= 1 << 20, "key space too large");
    let pairs = PairGroup { base: g };
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let m0 = pairs.sample(&mut rng);
    let e_m0 = oracles.enc.eval(&m0);
    let points: Vec<Pair> = (0..check).map(|_| pairs.sample(&mut rng)).collect();
    let enc_points: Vec<Pair> = points.iter().map(|m| oracles.enc.eval(m)).collect();
    for a in 0..order {
        for b in 0..order {
            let k1 = Pair(g.unrank(a as u128).unwrap(), g.unrank(b as u128).unwrap());
            // k2 = P(m0 k1)^-1 E(m0)
            let k2 = pairs.mul(
                &pairs.inv(&oracles.public_p.eval(&pairs.mul(&m0, &k1))),
                &e_m0,
            );
            let fits = points.iter().zip(&enc_points).all(|(m, em)| {
                pairs.mul(&oracles.public_p.eval(&pairs.mul(m, &k1)), &k2) == *em
            });
            if fits {
                return Some((k1, k2));
            }
        }
    }
    None
}

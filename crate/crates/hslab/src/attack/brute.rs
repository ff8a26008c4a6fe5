//! Brute-force solvers: the independent oracles that everything else is
//! checked against. They enumerate the candidate space and verify with
//! classical queries, so their correctness rests only on the group codec.

use crate::group::GroupElement;
use crate::instance::{assert_secret_closed, HsInstance};
use crate::oracle::GroupOracle;
use crate::solve::{DomainPair, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Sample count that makes false accepts negligible: ceil(log2 |G|) + 20
/// points drives the union bound |G| 2^(-k ell) far below 1.
pub fn default_check_samples(order: u128) -> usize {
    (128 - order.leading_zeros() as usize) + 20
}

/// Try every s in the domain; accept those with g(x_i) = f(s x_i) on k
/// random points. Returns all accepting shifts (structured f can have
/// several); the caller picks.
pub fn brute_force_hs(pair: &DomainPair, k: usize, seed: u64) -> Vec<GroupElement> {
    let order = pair.dom.order();
    assert!(order <= 1 << 20, "brute force needs |G| <= 2^20");
    let g = *pair.group();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let k = k.max(1);
    let points: Vec<GroupElement> = (0..k).map(|_| pair.dom.sample(&mut rng)).collect();
    let images: Vec<_> = points.iter().map(|x| pair.g.eval(x)).collect();
    let mut accepted = Vec::new();
    for cand in pair.dom.enumerate() {
        let ok = points
            .iter()
            .zip(&images)
            .all(|(x, gx)| pair.f.eval(&g.mul(&cand, x)) == *gx);
        if ok {
            accepted.push(cand);
        }
    }
    accepted
}

/// Brute-force decision: shifted iff some candidate shift fits.
pub fn brute_force_drhs(pair: &DomainPair, k: usize, seed: u64) -> Verdict {
    if brute_force_hs(pair, k, seed).is_empty() {
        Verdict::Independent
    } else {
        Verdict::Shifted
    }
}

/// Solve a generated instance, asserting the concealment contract first.
pub fn solve_instance_brute(inst: &HsInstance, seed: u64) -> Vec<GroupElement> {
    assert_secret_closed(inst);
    let pair = DomainPair::full(&inst.pair());
    let k = default_check_samples(pair.dom.order());
    brute_force_hs(&pair, k, seed)
}

/// An RHS solver closure with its own seed stream.
pub fn brute_rhs_solver(seed: u64) -> impl FnMut(&DomainPair) -> Option<GroupElement> {
    let mut ctr = 0u64;
    move |pair| {
        ctr += 1;
        let k = default_check_samples(pair.dom.order());
        brute_force_hs(pair, k, seed.wrapping_add(ctr)).into_iter().next()
    }
}

/// A DRHS decider closure with its own seed stream.
pub fn brute_drhs_decider(seed: u64) -> impl FnMut(&DomainPair) -> Verdict {
    let mut ctr = 0u64;
    move |pair| {
        ctr += 1;
        let k = default_check_samples(pair.dom.order());
        brute_force_drhs(pair, k, seed.wrapping_add(ctr))
    }
}

// ---------------------------------------------------------------------------
// Even-Mansour distinguishers / key recovery by exhaustive key search
// ---------------------------------------------------------------------------

/// Oracles for the Even-Mansour distinguishability game: a public
/// permutation-like P and a challenge Q, both G -> G.
pub struct EmdOracles {
    pub p: GroupOracle,
    pub q: GroupOracle,
}

/// Exhaustive key search over k1 (k2 then follows from one query via
/// k2' = P(k1 x0)^-1 Q(x0) in the translate form Q = k2 * P(k1 * .)):
/// declares "shifted"/EM iff some key pair explains Q on `check` points.
pub fn brute_force_emd(o: &EmdOracles, check: usize, seed: u64) -> Verdict {
    let g = *o.p.group();
    let order = g.order_u128().expect("desk scale");
    assert!(order <= 1 << 16, "EMD brute force needs |G| <= 2^16");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let x0 = g.sample(&mut rng);
    let points: Vec<_> = (0..check).map(|_| g.sample(&mut rng)).collect();
    let q_vals: Vec<_> = points.iter().map(|x| o.q.eval(x)).collect();
    for r in 0..order {
        let k1 = g.unrank(r).expect("in range");
        let k2 = g.mul(&o.q.eval(&x0), &g.inv(&o.p.eval(&g.mul(&k1, &x0))));
        let fits = points
            .iter()
            .zip(&q_vals)
            .all(|(x, qv)| g.mul(&k2, &o.p.eval(&g.mul(&k1, x))) == *qv);
        if fits {
            return Verdict::Shifted;
        }
    }
    Verdict::Independent
}

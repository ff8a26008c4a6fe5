//! Random self-reduction and success amplification for hidden shifts.
//!
//! Given oracles (f, g) with g = f o L_s, draw a fresh 2k-wise member h and
//! a uniform t and hand the solver
//!
//! ```text
//! f' = h o f        g' = h o g o L_t
//! ```
//!
//! Then g' = f' o L_(st): the blinded instance has a uniformly re-randomized
//! shift and (to any k-query solver) freshly random values. A candidate r
//! for the blinded instance is checked on a few classical queries and
//! un-blinded to r t^-1. Repeating with fresh blinding amplifies any solver
//! that succeeds on an inverse-polynomial fraction of instances.

use crate::group::GroupElement;
use crate::kwise::{compose_member, KWiseFamily, KWiseMember};
use crate::oracle::OracleError;
use crate::solve::{DomainPair, DrhsDecider, RhsSolver, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// The blinding pair (h, t) applied to an instance.
pub struct Blinding {
    pub h: KWiseMember,
    pub t: GroupElement,
}

/// Blind a pair with a fresh 2k-wise member and uniform translate.
/// If the input satisfies g = f o L_s, the output satisfies
/// g' = f' o L_(s t).
pub fn rerandomize<R: Rng>(
    pair: &DomainPair,
    two_k: u32,
    rng: &mut R,
) -> Result<(DomainPair, Blinding), OracleError> {
    let fam = KWiseFamily::new(two_k, pair.f.out_bits())?;
    let h = fam.draw(rng);
    let t = pair.dom.sample(rng);
    let f2 = compose_member(&h, &pair.f)?;
    let g2 = compose_member(&h, &pair.g.shifted(&t))?;
    Ok((
        DomainPair {
            dom: pair.dom.clone(),
            f: f2,
            g: g2,
        },
        Blinding { h, t },
    ))
}

/// Verify a claimed shift on `check` random classical queries.
pub fn check_shift<R: Rng>(
    pair: &DomainPair,
    s: &GroupElement,
    check: usize,
    rng: &mut R,
) -> bool {
    let g = *pair.group();
    (0..check).all(|_| {
        let x = pair.dom.sample(rng);
        pair.g.eval(&x) == pair.f.eval(&g.mul(s, &x))
    })
}

/// Amplified solver: repeat {blind, solve, verify, unblind} up to `reps`
/// times, returning the first verified candidate.
pub struct AmplifiedRhs<S> {
    inner: S,
    reps: u32,
    check: usize,
    two_k: u32,
    rng: ChaCha12Rng,
}

impl<S: RhsSolver> AmplifiedRhs<S> {
    pub fn new(inner: S, reps: u32, check: usize, two_k: u32, seed: u64) -> Self {
        AmplifiedRhs {
            inner,
            reps,
            check,
            two_k,
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }
}

impl<S: RhsSolver> RhsSolver for AmplifiedRhs<S> {
    fn solve(&mut self, pair: &DomainPair) -> Option<GroupElement> {
        let g = *pair.group();
        for _ in 0..self.reps {
            let Ok((blinded, blinding)) = rerandomize(pair, self.two_k, &mut self.rng) else {
                return None;
            };
            if let Some(r) = self.inner.solve(&blinded) {
                if check_shift(&blinded, &r, self.check, &mut self.rng) {
                    return Some(g.mul(&r, &g.inv(&blinding.t)));
                }
            }
        }
        None
    }
}

/// Search-to-decision direction that needs no structure: run the RHS solver,
/// verify its candidate on `check` classical queries, answer "shifted" iff
/// the check passes. With check = 0 the test is vacuous and every candidate
/// is accepted (degenerate, kept for the record).
pub struct DrhsFromRhs<S> {
    solver: S,
    check: usize,
    rng: ChaCha12Rng,
}

impl<S: RhsSolver> DrhsFromRhs<S> {
    pub fn new(solver: S, check: usize, seed: u64) -> Self {
        DrhsFromRhs {
            solver,
            check,
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }
}

impl<S: RhsSolver> DrhsDecider for DrhsFromRhs<S> {
    fn decide(&mut self, pair: &DomainPair) -> Verdict {
        match self.solver.solve(pair) {
            Some(s) if check_shift(pair, &s, self.check, &mut self.rng) => Verdict::Shifted,
            _ => Verdict::Independent,
        }
    }
}

/// Majority vote over rerandomized copies: amplifies a decider whose
/// advantage is inverse-polynomial.
pub struct AmplifiedDrhs<D> {
    inner: D,
    reps: u32,
    two_k: u32,
    rng: ChaCha12Rng,
}

impl<D: DrhsDecider> AmplifiedDrhs<D> {
    pub fn new(inner: D, reps: u32, two_k: u32, seed: u64) -> Self {
        AmplifiedDrhs {
            inner,
            reps,
            two_k,
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }
}

impl<D: DrhsDecider> DrhsDecider for AmplifiedDrhs<D> {
    fn decide(&mut self, pair: &DomainPair) -> Verdict {
        let mut shifted = 0u32;
        for _ in 0..self.reps {
            let Ok((blinded, _)) = rerandomize(pair, self.two_k, &mut self.rng) else {
                return Verdict::Independent;
            };
            if self.inner.decide(&blinded) == Verdict::Shifted {
                shifted += 1;
            }
        }
        if 2 * shifted > self.reps {
            Verdict::Shifted
        } else {
            Verdict::Independent
        }
    }
}

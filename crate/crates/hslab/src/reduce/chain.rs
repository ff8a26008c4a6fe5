//! The composed reduction pipeline: an Even-Mansour distinguisher becomes a
//! full hidden-shift solver, one link at a time.
//!
//! ```text
//! EMD distinguisher
//!   -> DRHS decider        (translate-wrapped oracles, verdict forwarded)
//!   -> amplified decider   (majority over rerandomized copies, optional)
//!   -> RHS solver          (search from decision along the subgroup tower)
//!   -> HS solver           (rerandomize, verify, unblind)
//! ```
//!
//! Executing the chain with a concrete distinguisher measures how advantage
//! actually transfers at desk scale; nothing here certifies asymptotics.

use crate::group::{GroupElement, GroupError};
use crate::instance::OraclePair;
use crate::reduce::emd::{EmdDistinguisher, EmdFromDrhs};
use crate::reduce::rerandomize::AmplifiedRhs;
use crate::reduce::search::SearchFromDecision;
use crate::solve::{DomainPair, RhsSolver};

pub struct ChainConfig {
    /// majority-vote repetitions for the decider stage (1 = no vote)
    pub decider_votes: u32,
    /// rerandomized attempts at the final HS stage
    pub hs_reps: u32,
    /// classical verification queries per candidate
    pub check_samples: usize,
    /// 2k-wise independence parameter for blinding
    pub two_k: u32,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            decider_votes: 1,
            hs_reps: 8,
            check_samples: 30,
            two_k: 8,
        }
    }
}

/// Assemble the whole chain for a tower-bearing group (z2n or sym).
pub fn hs_solver_from_emd<D: EmdDistinguisher + 'static>(
    group: &crate::group::Group,
    distinguisher: D,
    cfg: ChainConfig,
    seed: u64,
) -> Result<impl RhsSolver, GroupError> {
    let tower = group.tower()?;
    let decider = EmdFromDrhs::new(distinguisher, seed);
    let decider = crate::reduce::rerandomize::AmplifiedDrhs::new(
        decider,
        cfg.decider_votes.max(1),
        cfg.two_k,
        seed ^ 0x0707,
    );
    let search = SearchFromDecision::new(decider, tower);
    Ok(AmplifiedRhs::new(
        search,
        cfg.hs_reps,
        cfg.check_samples,
        cfg.two_k,
        seed ^ 0xc4a1,
    ))
}

/// Run the chained solver against an oracle pair.
pub fn solve_pair<S: RhsSolver>(solver: &mut S, pair: &OraclePair) -> Option<GroupElement> {
    solver.solve(&DomainPair::full(pair))
}

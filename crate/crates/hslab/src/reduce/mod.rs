//! Executable reductions between the hidden-shift problem variants and the
//! cipher-breaking games, with pluggable solver callbacks.

pub mod chain;
pub mod emd;
pub mod keyrec;
pub mod lift;
pub mod macshift;
pub mod rerandomize;
pub mod search;
pub mod wreath;

pub use chain::{hs_solver_from_emd, ChainConfig};
pub use emd::{EmdDistinguisher, EmdFromDrhs};
pub use keyrec::{hs_from_em_keyrecovery, EmKeyRecoverer, KeyRecSetup};
pub use lift::{cyclic_lift, LiftSpec};
pub use macshift::{extract_shift, shift_from_collision_finder, InstrumentedMac};
pub use rerandomize::{rerandomize, AmplifiedDrhs, AmplifiedRhs, Blinding, DrhsFromRhs};
pub use search::{error_bound, NoisyDecider, SearchFromDecision, SearchOutcome};
pub use wreath::{bit_prefix_lift, wreath_lift, xor_sum_lift, WreathInstance};

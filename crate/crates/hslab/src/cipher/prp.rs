//! Keyed pseudorandom permutations of a group.
//!
//! The constructions assume a quantum-secure PRP exists; this instantiation
//! is a heuristic stand-in: a 10-round balanced Feistel over the
//! ceil(log2 |G|)-bit element rank with round functions drawn from the keyed
//! mixer, cycle-walking ranks that fall outside |G|. Invertible, seedable,
//! group-agnostic. No concrete security level is claimed for it.

use crate::group::Group;
use crate::oracle::{feistel_permutation, GroupOracle, OracleError};

/// E_k: G -> G for the key seed; bijective and invertible.
pub fn inner_prp(group: &Group, key_seed: u64) -> Result<GroupOracle, OracleError> {
    feistel_permutation(group, key_seed, b"inner-prp")
}

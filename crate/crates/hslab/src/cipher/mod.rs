//! The schemes under study: Even-Mansour, Encrypted-CBC-MAC, three-round
//! Feistel networks and the iterated slide cipher, each parameterized by a
//! group family so the internal XOR can be swapped for another group
//! operation.
//!
//! Cipher objects are immutable; evaluation keeps per-call state on the
//! stack, so concurrent use is safe.

pub mod cbcmac;
pub mod em;
pub mod feistel;
pub mod prp;
pub mod slide;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CipherError {
    #[error("permutation oracle lacks an inverse closure")]
    NeedInverse,
    #[error("message must contain at least one block")]
    EmptyMessage,
    #[error("family {0} not supported here (need xor or z2n)")]
    UnsupportedFamily(String),
    #[error("round count {0} out of range 1..=65536")]
    BadRoundCount(u64),
    #[error(transparent)]
    Oracle(#[from] crate::oracle::OracleError),
}

//! The iterated slide cipher E_(k,t)(x) = k + R_k^t(x) with round
//! R_k(x) = R(x + k), over xor:n or z2n:n.
//!
//! Its self-similarity is the point: E(R(x)) - x and R(E(x)) - x are shifts
//! of each other by the key, which the slide attacks consume.

use super::CipherError;
use crate::group::{Group, GroupElement, GroupKind};
use crate::oracle::GroupOracle;

#[derive(Clone)]
pub struct SlideSpec {
    group: Group,
    /// Public permutation R of the domain.
    r: GroupOracle,
    key: GroupElement,
    rounds: u64,
}

impl SlideSpec {
    pub fn new(
        group: &Group,
        r: GroupOracle,
        key: GroupElement,
        rounds: u64,
    ) -> Result<SlideSpec, CipherError> {
        match group.kind() {
            GroupKind::Xor { .. } | GroupKind::CyclicPow2 { .. } => {}
            _ => return Err(CipherError::UnsupportedFamily(group.descriptor())),
        }
        if rounds == 0 || rounds > 1 << 16 {
            return Err(CipherError::BadRoundCount(rounds));
        }
        Ok(SlideSpec {
            group: *group,
            r,
            key,
            rounds,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn public_r(&self) -> &GroupOracle {
        &self.r
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Test-side access to the planted key.
    pub fn key(&self) -> &GroupElement {
        &self.key
    }

    /// One keyed round R_k(x) = R(x + k).
    pub fn round(&self, x: &GroupElement) -> GroupElement {
        self.r.eval(&self.group.mul(x, &self.key))
    }

    /// E_(k,t)(x) = k + R_k^t(x).
    pub fn enc(&self, x: &GroupElement) -> GroupElement {
        let mut v = x.clone();
        for _ in 0..self.rounds {
            v = self.round(&v);
        }
        self.group.mul(&self.key, &v)
    }
}

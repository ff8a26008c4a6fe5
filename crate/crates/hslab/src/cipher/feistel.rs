//! Feistel networks over a half-domain group G (xor:n or z2n:n).
//!
//! One round with round function f maps (x, y) -> (y + f(x), x) using the
//! group operation; the three-round cipher composes three rounds with
//! independent round functions. Fixing the first input coordinate to a
//! constant a and projecting the second output coordinate exposes the
//! structure f_a(y) = R2(y + R1(a)): for two constants a0, a1 the exposed
//! functions are shifts of each other by R1(a1) - R1(a0), which is what the
//! distinguishing attacks consume.

use super::CipherError;
use crate::group::{Group, GroupElement, GroupKind};
use crate::oracle::{keyed_u64, GroupOracle, OracleError};
use crate::oracle::to_group_oracle;
use crate::oracle::BitOracle;

fn require_half_domain(group: &Group) -> Result<(), CipherError> {
    match group.kind() {
        GroupKind::Xor { .. } | GroupKind::CyclicPow2 { .. } => Ok(()),
        _ => Err(CipherError::UnsupportedFamily(group.descriptor())),
    }
}

/// Three independent round functions on the half-domain group.
#[derive(Clone)]
pub struct FeistelSpec {
    group: Group,
    rounds: [GroupOracle; 3],
}

impl FeistelSpec {
    /// Seeded spec with uniformly random round functions.
    pub fn random(group: &Group, seed: u64) -> Result<FeistelSpec, CipherError> {
        require_half_domain(group)?;
        let mk = |i: u64| -> Result<GroupOracle, OracleError> {
            let s = keyed_u64(seed, b"feistel-round", &i.to_le_bytes());
            let bits = BitOracle::random(group, 2 * group.order_bits() + 16, s);
            to_group_oracle(&bits, s)
        };
        Ok(FeistelSpec {
            group: *group,
            rounds: [mk(1)?, mk(2)?, mk(3)?],
        })
    }

    pub fn with_rounds(group: &Group, rounds: [GroupOracle; 3]) -> Result<FeistelSpec, CipherError> {
        require_half_domain(group)?;
        Ok(FeistelSpec {
            group: *group,
            rounds,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn round_fn(&self, i: usize) -> &GroupOracle {
        &self.rounds[i]
    }

    /// Full three-round evaluation.
    pub fn eval(&self, x: &GroupElement, y: &GroupElement) -> (GroupElement, GroupElement) {
        let (x, y) = feistel_round(&self.group, &self.rounds[0], x, y);
        let (x, y) = feistel_round(&self.group, &self.rounds[1], &x, &y);
        feistel_round(&self.group, &self.rounds[2], &x, &y)
    }

    /// Inverse of the three-round map.
    pub fn eval_inv(&self, u: &GroupElement, v: &GroupElement) -> (GroupElement, GroupElement) {
        let (u, v) = feistel_round_inv(&self.group, &self.rounds[2], u, v);
        let (u, v) = feistel_round_inv(&self.group, &self.rounds[1], &u, &v);
        feistel_round_inv(&self.group, &self.rounds[0], &u, &v)
    }
}

/// One round: (x, y) -> (y + f(x), x).
pub fn feistel_round(
    group: &Group,
    f: &GroupOracle,
    x: &GroupElement,
    y: &GroupElement,
) -> (GroupElement, GroupElement) {
    (group.mul(y, &f.eval(x)), x.clone())
}

/// Inverse round: (u, v) -> (v, u - f(v)).
pub fn feistel_round_inv(
    group: &Group,
    f: &GroupOracle,
    u: &GroupElement,
    v: &GroupElement,
) -> (GroupElement, GroupElement) {
    (v.clone(), group.mul(u, &group.inv(&f.eval(v))))
}

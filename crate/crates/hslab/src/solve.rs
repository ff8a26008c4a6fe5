//! Solver-facing problem views and callback roles.
//!
//! Reductions hand solvers a [`DomainPair`]: two oracles plus the domain they
//! should be read on — the full group, or one level of a subgroup tower when
//! a search-from-decision recursion has restricted the problem. Solvers are
//! plain closures behind the role traits below; they carry their own
//! randomness and must not touch instance secrets.

use crate::group::{Group, GroupElement, SubgroupTower};
use crate::instance::OraclePair;
use crate::oracle::BitOracle;
use rand::Rng;

/// Where a pair of oracles lives: the whole group or a tower level.
#[derive(Clone)]
pub enum Domain {
    Full(Group),
    Level { tower: SubgroupTower, level: u32 },
}

impl Domain {
    pub fn group(&self) -> &Group {
        match self {
            Domain::Full(g) => g,
            Domain::Level { tower, .. } => tower.group(),
        }
    }

    pub fn order(&self) -> u128 {
        match self {
            Domain::Full(g) => g.order_u128().expect("desk scale"),
            Domain::Level { tower, level } => tower.level_order(*level) as u128,
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> GroupElement {
        match self {
            Domain::Full(g) => g.sample(rng),
            Domain::Level { tower, level } => tower.sample(*level, rng),
        }
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        match self {
            Domain::Full(_) => true,
            Domain::Level { tower, level } => tower.contains(*level, a),
        }
    }

    /// Enumerate the domain (desk scale only).
    pub fn enumerate(&self) -> Vec<GroupElement> {
        match self {
            Domain::Full(g) => g.enumerate().expect("desk scale"),
            Domain::Level { tower, level } => tower.enumerate(*level),
        }
    }

    /// The r-th domain element under a fixed ordering, r < order().
    pub fn unrank(&self, r: u128) -> GroupElement {
        match self {
            Domain::Full(g) => g.unrank(r).expect("in range"),
            Domain::Level { tower, level } => {
                use crate::group::GroupKind;
                match tower.group().kind() {
                    GroupKind::CyclicPow2 { n } => crate::group::scalar_element(
                        tower.group(),
                        (r as u64) << (n - level),
                    ),
                    GroupKind::Sym { n } => {
                        let mut small =
                            crate::group::sym::lehmer_unrank(*level as usize, r as u64);
                        small.extend(*level as u8..n as u8);
                        crate::group::perm_element(tower.group(), small)
                    }
                    _ => unreachable!(),
                }
            }
        }
    }
}

/// A pair of functions read on a common domain. The hidden-shift promise,
/// when it holds, is g = f o L_s with s in the domain.
#[derive(Clone)]
pub struct DomainPair {
    pub dom: Domain,
    pub f: BitOracle,
    pub g: BitOracle,
}

impl DomainPair {
    pub fn full(pair: &OraclePair) -> Self {
        DomainPair {
            dom: Domain::Full(pair.group),
            f: pair.f.clone(),
            g: pair.g.clone(),
        }
    }

    pub fn group(&self) -> &Group {
        self.dom.group()
    }

    pub fn queries(&self) -> u64 {
        self.f.calls() + self.g.calls()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Shifted,
    Independent,
}

/// Read a bit oracle as a function into the domain: the ell-bit output is
/// taken as an integer rank modulo the domain order, rejection-rehashed past
/// the largest multiple so the induced values are exactly uniform. Depends
/// only on the output bits, so shift relations survive pointwise.
pub fn to_domain_oracle(
    f: &BitOracle,
    dom: &Domain,
    seed: u64,
) -> Result<crate::oracle::GroupOracle, crate::oracle::OracleError> {
    use crate::oracle::{keyed_bits, OracleError};
    let ell = f.out_bits();
    if ell > 64 {
        return Err(OracleError::WidthUnsupported(ell));
    }
    let n = dom.order();
    let span = 1u128 << ell;
    if span < n {
        return Err(OracleError::GroupTooLarge);
    }
    let threshold = span - span % n;
    let base = f.clone();
    let dom = dom.clone();
    Ok(crate::oracle::GroupOracle::new(dom.group(), move |x| {
        let mut v = base.eval(x).to_u64() as u128;
        let mut ctr: u32 = 0;
        while v >= threshold {
            let mut payload = v.to_le_bytes().to_vec();
            payload.extend(ctr.to_le_bytes());
            v = keyed_bits(seed, b"to-domain-resample", &payload, ell).to_u64() as u128;
            ctr += 1;
        }
        dom.unrank(v % n)
    }))
}

/// Search role: return a shift candidate (or None for "no answer").
pub trait RhsSolver {
    fn solve(&mut self, pair: &DomainPair) -> Option<GroupElement>;
}

impl<F: FnMut(&DomainPair) -> Option<GroupElement>> RhsSolver for F {
    fn solve(&mut self, pair: &DomainPair) -> Option<GroupElement> {
        self(pair)
    }
}

/// Decision role: shifted vs independent.
pub trait DrhsDecider {
    fn decide(&mut self, pair: &DomainPair) -> Verdict;
}

impl<F: FnMut(&DomainPair) -> Verdict> DrhsDecider for F {
    fn decide(&mut self, pair: &DomainPair) -> Verdict {
        self(pair)
    }
}

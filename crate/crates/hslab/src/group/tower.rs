//! Subgroup towers {1} = G^(0) < G^(1) < ... < G^(s) = G with left
//! transversals, for the two families that have a dense efficient chain:
//!
//! * `z2n:n` — G^(t) = multiples of 2^(n-t), all indices 2.
//! * `sym:n` — G^(t) = S_t (permutations fixing letters t..n-1), index t at
//!   step t. The transversal of S_(t-1) in S_t is the set of transpositions
//!   sending letter t-1 to each of 0..t-1 (identity for the fixed point);
//!   any left transversal would do, this one is the fixed choice.
//!
//! Every element of G^(t) factors uniquely as rep * h with h in G^(t-1).

use super::{perm_element, scalar_element, sym, Group, GroupElement, GroupError, GroupKind};
use rand::Rng;

#[derive(Clone, Copy, Debug)]
pub struct SubgroupTower {
    group: Group,
    steps: u32,
}

impl SubgroupTower {
    pub fn new(group: Group) -> Result<Self, GroupError> {
        let steps = match group.kind() {
            GroupKind::CyclicPow2 { n } => n,
            GroupKind::Sym { n } => n,
            _ => return Err(GroupError::NoTower),
        };
        Ok(SubgroupTower { group, steps })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    /// Number of steps s (levels run 0..=s, level 0 trivial, level s full).
    pub fn steps(&self) -> u32 {
        self.steps
    }

    /// |G^(t)|.
    pub fn level_order(&self, t: u32) -> u64 {
        assert!(t <= self.steps, "level out of range");
        match self.group.kind() {
            GroupKind::CyclicPow2 { .. } => 1u64 << t,
            GroupKind::Sym { .. } => sym::factorial(t),
            _ => unreachable!(),
        }
    }

    /// Index [G^(t) : G^(t-1)] for t in 1..=steps.
    pub fn index(&self, t: u32) -> u64 {
        assert!(t >= 1 && t <= self.steps, "level out of range");
        match self.group.kind() {
            GroupKind::CyclicPow2 { .. } => 2,
            GroupKind::Sym { .. } => t.max(1) as u64,
            _ => unreachable!(),
        }
    }

    /// Is `a` a member of G^(t)?
    pub fn contains(&self, t: u32, a: &GroupElement) -> bool {
        assert!(t <= self.steps, "level out of range");
        match self.group.kind() {
            GroupKind::CyclicPow2 { n } => {
                let v = a.scalar().expect("scalar element");
                t == n || v % (1u64 << (n - t)) == 0
            }
            GroupKind::Sym { n } => {
                let p = a.perm_images().expect("perm element");
                (t..n).all(|i| p[i as usize] == i as u8)
            }
            _ => unreachable!(),
        }
    }

    /// Left transversal of G^(t-1) in G^(t): representatives of the distinct
    /// left cosets a * G^(t-1), one per coset, |transversal| = index.
    pub fn transversal(&self, t: u32) -> Vec<GroupElement> {
        assert!(t >= 1 && t <= self.steps, "level out of range");
        match self.group.kind() {
            GroupKind::CyclicPow2 { n } => {
                vec![
                    scalar_element(&self.group, 0),
                    scalar_element(&self.group, 1u64 << (n - t)),
                ]
            }
            GroupKind::Sym { n } => {
                let letter = (t - 1) as usize;
                (0..t as usize)
                    .map(|j| {
                        perm_element(&self.group, sym::transposition(n as usize, j, letter))
                    })
                    .collect()
            }
            _ => unreachable!(),
        }
    }

    /// Uniform sample from G^(t).
    pub fn sample<R: Rng>(&self, t: u32, rng: &mut R) -> GroupElement {
        assert!(t <= self.steps, "level out of range");
        match self.group.kind() {
            GroupKind::CyclicPow2 { n } => {
                let j = rng.gen_range(0..(1u64 << t));
                scalar_element(&self.group, j << (n - t))
            }
            GroupKind::Sym { n } => {
                let mut p = sym::identity(n as usize);
                for i in (1..t as usize).rev() {
                    let j = rng.gen_range(0..=i);
                    p.swap(i, j);
                }
                perm_element(&self.group, p)
            }
            _ => unreachable!(),
        }
    }

    /// Enumerate G^(t) (desk scale).
    pub fn enumerate(&self, t: u32) -> Vec<GroupElement> {
        assert!(t <= self.steps, "level out of range");
        let m = self.level_order(t);
        assert!(m <= 1 << 22, "level too large to enumerate");
        match self.group.kind() {
            GroupKind::CyclicPow2 { n } => (0..m)
                .map(|j| scalar_element(&self.group, j << (n - t)))
                .collect(),
            GroupKind::Sym { n } => (0..m)
                .map(|r| {
                    let mut small = sym::lehmer_unrank(t as usize, r);
                    small.extend(t as u8..n as u8);
                    perm_element(&self.group, small)
                })
                .collect(),
            _ => unreachable!(),
        }
    }

    /// Factor `a` in G^(t) uniquely as `(rep, h)` with `rep` in the step-t
    /// transversal and `h` in G^(t-1), so that a = rep * h.
    pub fn factor(&self, t: u32, a: &GroupElement) -> (GroupElement, GroupElement) {
        assert!(t >= 1 && t <= self.steps, "level out of range");
        debug_assert!(self.contains(t, a), "element not in level {t}");
        match self.group.kind() {
            GroupKind::CyclicPow2 { n } => {
                let v = a.scalar().unwrap();
                let bit = (v >> (n - t)) & 1;
                let rep = scalar_element(&self.group, bit << (n - t));
                let h = self.group.mul(&self.group.inv(&rep), a);
                (rep, h)
            }
            GroupKind::Sym { n } => {
                let letter = (t - 1) as usize;
                let p = a.perm_images().unwrap();
                let j = p[letter] as usize;
                let rep = perm_element(&self.group, sym::transposition(n as usize, j, letter));
                // transpositions are involutions: rep^-1 = rep
                let h = self.group.mul(&rep, a);
                (rep, h)
            }
            _ => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::collections::HashSet;

    #[test]
    fn cyclic_pow2_indices() {
        let g = Group::from_descriptor("z2n:3").unwrap();
        let t = g.tower().unwrap();
        let idx: Vec<u64> = (1..=t.steps()).map(|l| t.index(l)).collect();
        assert_eq!(idx, vec![2, 2, 2]);
    }

    #[test]
    fn sym_transversal_sizes() {
        let g = Group::from_descriptor("sym:3").unwrap();
        let t = g.tower().unwrap();
        let sizes: Vec<usize> = (1..=t.steps()).map(|l| t.transversal(l).len()).collect();
        assert_eq!(sizes, vec![1, 2, 3]);
        assert_eq!(sizes.iter().product::<usize>(), 6);
    }

    #[test]
    fn unsupported_families_rejected() {
        assert!(Group::from_descriptor("xor:4").unwrap().tower().is_err());
        assert!(Group::from_descriptor("gl2:3").unwrap().tower().is_err());
    }

    #[test]
    fn sym4_cosets_cover_disjointly() {
        // Union of rep * S_3 over the 4 reps covers S_4 exactly once.
        let g = Group::from_descriptor("sym:4").unwrap();
        let t = g.tower().unwrap();
        let reps = t.transversal(4);
        assert_eq!(reps.len(), 4);
        let sub = t.enumerate(3);
        assert_eq!(sub.len(), 6);
        let mut seen = HashSet::new();
        for rep in &reps {
            for h in &sub {
                assert!(seen.insert(g.mul(rep, h)), "coset overlap");
            }
        }
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn factorization_unique_small() {
        for d in ["z2n:5", "sym:5"] {
            let g = Group::from_descriptor(d).unwrap();
            let t = g.tower().unwrap();
            for lvl in 1..=t.steps() {
                for a in t.enumerate(lvl) {
                    let (rep, h) = t.factor(lvl, &a);
                    assert!(t.contains(lvl - 1, &h), "{d}: h not in G^(t-1)");
                    assert_eq!(g.mul(&rep, &h), a, "{d}: rep*h != a");
                    // rep is in the transversal
                    assert!(t.transversal(lvl).contains(&rep));
                }
            }
        }
    }

    #[test]
    fn level_sampling_stays_in_level() {
        let g = Group::from_descriptor("sym:6").unwrap();
        let t = g.tower().unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for lvl in 0..=6 {
            for _ in 0..50 {
                let a = t.sample(lvl, &mut rng);
                assert!(t.contains(lvl, &a));
            }
        }
        // level sampling is uniform: S_3 level inside sym:6
        let mut counts = std::collections::HashMap::new();
        for _ in 0..6000 {
            *counts.entry(t.sample(3, &mut rng)).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 6);
        for (_, c) in counts {
            assert!((800..1200).contains(&c), "level sample skewed: {c}");
        }
    }
}

//! The Even-Mansour cipher over a group G: a public random permutation P of
//! G and two uniform keys k1, k2 give the keyed permutation
//!
//! ```text
//! Enc(m) = P(m * k1) * k2        Dec(c) = P^-1(c * k2^-1) * k1^-1
//! ```
//!
//! With G = (Z/2)^n and XOR this is the textbook scheme; other families
//! change only the group operation. Note the key identity
//! `k2 = P(x * k1)^-1 * Enc(x)` for every x: knowing k1 yields k2 with one
//! classical query.

use super::CipherError;
use crate::group::{Group, GroupElement};
use crate::oracle::{keyed_u64, GroupOracle};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmKey {
    pub k1: GroupElement,
    pub k2: GroupElement,
}

pub fn em_keygen(group: &Group, seed: u64) -> EmKey {
    let mut rng = ChaCha12Rng::seed_from_u64(keyed_u64(seed, b"em-keygen", b""));
    EmKey {
        k1: group.sample(&mut rng),
        k2: group.sample(&mut rng),
    }
}

pub fn em_enc(p: &GroupOracle, key: &EmKey, m: &GroupElement) -> GroupElement {
    let g = p.group();
    g.mul(&p.eval(&g.mul(m, &key.k1)), &key.k2)
}

pub fn em_dec(p: &GroupOracle, key: &EmKey, c: &GroupElement) -> Result<GroupElement, CipherError> {
    if !p.has_inverse() {
        return Err(CipherError::NeedInverse);
    }
    let g = p.group();
    let inner = p.eval_inv(&g.mul(c, &g.inv(&key.k2)))?;
    Ok(g.mul(&inner, &g.inv(&key.k1)))
}

/// The whole cipher as an invertible oracle handle.
pub fn em_oracle(p: &GroupOracle, key: &EmKey) -> Result<GroupOracle, CipherError> {
    if !p.has_inverse() {
        return Err(CipherError::NeedInverse);
    }
    let (pf, pb) = (p.clone(), p.clone());
    let (kf, kb) = (key.clone(), key.clone());
    Ok(GroupOracle::new_with_inverse(
        p.group(),
        move |m| em_enc(&pf, &kf, m),
        move |c| em_dec(&pb, &kb, c).expect("inverse present"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::scalar_element;
    use crate::oracle::random_permutation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn roundtrip_z2n16() {
        let g = Group::from_descriptor("z2n:16").unwrap();
        let p = random_permutation(&g, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for seed in 0..1000 {
            let key = em_keygen(&g, seed);
            let m = g.sample(&mut rng);
            let c = em_enc(&p, &key, &m);
            assert_eq!(em_dec(&p, &key, &c).unwrap(), m);
        }
    }

    #[test]
    fn identity_keys_reduce_to_p() {
        let g = Group::from_descriptor("xor:8").unwrap();
        let p = random_permutation(&g, 2).unwrap();
        let key = EmKey {
            k1: g.identity(),
            k2: g.identity(),
        };
        for v in 0..256 {
            let x = scalar_element(&g, v);
            assert_eq!(em_enc(&p, &key, &x), p.eval(&x));
        }
    }

    #[test]
    fn k2_from_k1_identity_on_sym4() {
        // k2 = P(x k1)^-1 * E(x) for every x
        let g = Group::from_descriptor("sym:4").unwrap();
        let p = random_permutation(&g, 5).unwrap();
        let key = em_keygen(&g, 9);
        for x in g.enumerate().unwrap() {
            let e = em_enc(&p, &key, &x);
            let rhs = g.mul(&g.inv(&p.eval(&g.mul(&x, &key.k1))), &e);
            assert_eq!(rhs, key.k2);
        }
    }

    #[test]
    fn factors_as_translate_compose_translate() {
        // Enc = (. * k2) o P o (. * k1) pointwise, exhaustively on a
        // nonabelian group.
        let g = Group::from_descriptor("sym:4").unwrap();
        let p = random_permutation(&g, 8).unwrap();
        let key = em_keygen(&g, 4);
        for x in g.enumerate().unwrap() {
            let step1 = g.mul(&x, &key.k1);
            let step2 = p.eval(&step1);
            let step3 = g.mul(&step2, &key.k2);
            assert_eq!(em_enc(&p, &key, &x), step3);
        }
    }

    #[test]
    fn dec_requires_inverse() {
        let g = Group::from_descriptor("z2n:8").unwrap();
        let forward_only = crate::oracle::GroupOracle::new(&g, {
            let g = g;
            move |x| g.inv(x)
        });
        let key = em_keygen(&g, 0);
        assert!(matches!(
            em_dec(&forward_only, &key, &g.identity()),
            Err(CipherError::NeedInverse)
        ));
    }
}

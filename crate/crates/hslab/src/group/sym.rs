//! Permutation helpers: composition, inversion, and Lehmer-code ranking in
//! the factorial number system.
//!
//! Permutations are one-line images over 0-based letters: `p[i]` is the image
//! of letter `i`. Composition follows the fixed convention `(a*b)(x) = a(b(x))`
//! (apply `b` first), used everywhere in this crate.

use rand::Rng;

pub fn compose(a: &[u8], b: &[u8]) -> Vec<u8> {
    debug_assert_eq!(a.len(), b.len());
    b.iter().map(|&x| a[x as usize]).collect()
}

pub fn invert(p: &[u8]) -> Vec<u8> {
    let mut inv = vec![0u8; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x as usize] = i as u8;
    }
    inv
}

pub fn identity(n: usize) -> Vec<u8> {
    (0..n as u8).collect()
}

pub fn is_permutation(p: &[u8]) -> bool {
    let n = p.len();
    if n > 256 {
        return false;
    }
    let mut seen = [false; 256];
    for &x in p {
        if (x as usize) >= n || seen[x as usize] {
            return false;
        }
        seen[x as usize] = true;
    }
    true
}

pub fn factorial(n: u32) -> u64 {
    (1..=n as u64).product()
}

/// Lexicographic rank of a permutation of n <= 20 letters (20! < 2^63).
pub fn lehmer_rank(p: &[u8]) -> u64 {
    let n = p.len();
    debug_assert!(n <= 20);
    let mut rank = 0u64;
    for i in 0..n {
        let smaller_after = p[i + 1..].iter().filter(|&&x| x < p[i]).count() as u64;
        rank += smaller_after * factorial((n - 1 - i) as u32);
    }
    rank
}

/// Inverse of [`lehmer_rank`].
pub fn lehmer_unrank(n: usize, mut rank: u64) -> Vec<u8> {
    debug_assert!(n <= 20);
    let mut avail: Vec<u8> = (0..n as u8).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let f = factorial((n - 1 - i) as u32);
        let digit = (rank / f) as usize;
        rank %= f;
        out.push(avail.remove(digit));
    }
    out
}

pub fn sample<R: Rng>(n: usize, rng: &mut R) -> Vec<u8> {
    let mut p = identity(n);
    // Fisher-Yates
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        p.swap(i, j);
    }
    p
}

/// The transposition (i j) in S_n (identity when i == j).
pub fn transposition(n: usize, i: usize, j: usize) -> Vec<u8> {
    let mut p = identity(n);
    p.swap(i, j);
    p
}

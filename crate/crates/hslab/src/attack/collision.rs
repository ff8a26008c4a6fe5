//! Exact collision profiles of functions on (Z/2)^n: how far a function is
//! from the clean Simon promise. The interesting quantity is the collision
//! rate at the claimed period versus the worst rate anywhere else; the
//! attack drivers gate on the latter staying below a threshold.

use crate::bits::Bits;
use crate::oracle::BitOracle;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CollisionError {
    #[error("n = {0} exceeds the exhaustive budget (n <= 12)")]
    BudgetExceeded(u32),
    #[error("oracle is not on an xor family")]
    NotXor,
}

#[derive(Clone, Debug)]
pub struct CollisionDiagnostics {
    pub n: u32,
    /// Pr_x[f(x + s) = f(x)] for the claimed period s (1.0 for a true period).
    pub rate_at_s: f64,
    /// max over s' not in {0, s} of Pr_x[f(x + s') = f(x)].
    pub max_unwanted_rate: f64,
    /// the s' achieving the max
    pub worst_offender: u64,
}

/// Exhaustive collision-rate profile via the difference table: one pass
/// bucketing by value, then pair differences.
pub fn collision_diagnostics(f: &BitOracle, s: u64) -> Result<CollisionDiagnostics, CollisionError> {
    use crate::group::GroupKind;
    let GroupKind::Xor { n } = f.group().kind() else {
        return Err(CollisionError::NotXor);
    };
    if n > 12 {
        return Err(CollisionError::BudgetExceeded(n));
    }
    let size = 1u64 << n;
    let table: Vec<Bits> = (0..size)
        .map(|x| f.eval(&f.group().unrank(x as u128).expect("in range")))
        .collect();
    // counts[d] = #{x : f(x ^ d) = f(x)}
    let mut counts = vec![0u64; size as usize];
    let mut buckets: std::collections::HashMap<&Bits, Vec<u64>> = std::collections::HashMap::new();
    for (x, v) in table.iter().enumerate() {
        buckets.entry(v).or_default().push(x as u64);
    }
    for xs in buckets.values() {
        for &a in xs {
            for &b in xs {
                counts[(a ^ b) as usize] += 1;
            }
        }
    }
    let rate = |d: u64| counts[d as usize] as f64 / size as f64;
    let mut worst = 0u64;
    let mut worst_rate = -1.0;
    for d in 1..size {
        if d == s {
            continue;
        }
        if rate(d) > worst_rate {
            worst_rate = rate(d);
            worst = d;
        }
    }
    Ok(CollisionDiagnostics {
        n,
        rate_at_s: rate(s),
        max_unwanted_rate: worst_rate.max(0.0),
        worst_offender: worst,
    })
}

/// Default acceptance threshold for "few enough unwanted collisions":
/// 2^(-n/2).
pub fn default_collision_threshold(n: u32) -> f64 {
    f64::powf(2.0, -(n as f64) / 2.0)
}

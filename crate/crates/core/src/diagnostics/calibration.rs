//! Monte-Carlo size/power estimation for the tests in this module.
//!
//! Replication `i` draws from its own stream seeded with `base_seed + i`, so
//! estimates are identical on any thread count.

use crate::error::Result;
use crate::par::{map_indices, Exec};

use super::TestResult;

/// Fraction of replications in which `run(seed)` rejects at 0.05.
/// Replications that error count as non-rejections and are tallied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectionRate {
    pub rate: f64,
    pub replications: usize,
    pub failures: usize,
}

pub fn rejection_rate<F>(exec: Exec, replications: usize, base_seed: u64, run: F) -> RejectionRate
where
    F: Fn(u64) -> Result<TestResult> + Sync + Send,
{
    let outcomes = map_indices(exec, replications, |i| {
        run(base_seed + i as u64).map(|r| r.reject_at_005)
    });
    let rejected = outcomes.iter().filter(|o| matches!(o, Ok(true))).count();
    let failures = outcomes.iter().filter(|o| o.is_err()).count();
    RejectionRate {
        rate: rejected as f64 / replications.max(1) as f64,
        replications,
        failures,
    }
}

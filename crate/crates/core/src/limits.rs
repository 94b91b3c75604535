//! Size guards for the enumerative operations.

use crate::error::{Error, Result};

/// Environment variable that raises (or lowers) every size guard at once.
pub const MAX_N_ENV: &str = "MULTISCALE_MAX_N";

/// Upper bounds on `n` for the operations whose output grows super-exponentially.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Enumeration of the partition lattice (Bell numbers).
    pub partitions: usize,
    /// Chains, trees, strata and blowup schedules.
    pub chains: usize,
    /// Chow ring presentations and Gröbner computations.
    pub chow: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            partitions: 9,
            chains: 7,
            chow: 5,
        }
    }
}

impl Limits {
    /// Every guard set to `max_n`.
    pub fn uniform(max_n: usize) -> Self {
        Limits {
            partitions: max_n,
            chains: max_n,
            chow: max_n,
        }
    }

    /// Defaults, overridden by `MULTISCALE_MAX_N` when it is set to an integer.
    pub fn from_env() -> Self {
        std::env::var(MAX_N_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(Limits::uniform)
            .unwrap_or_default()
    }

    pub(crate) fn check(what: &'static str, n: usize, max: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::domain("n must be positive"));
        }
        if n > max {
            return Err(Error::SizeGuard { what, n, max });
        }
        Ok(())
    }
}

//! Enumeration limits shared by every exhaustive computation.

use crate::error::{Error, Result};

/// Environment variable that overrides both caps.
pub const CAP_ENV: &str = "MODPIMAGE_CAP";

pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 26;
pub const DEFAULT_CENSUS_CAP: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Maximum size of any explicitly materialized set (group, module, algebra).
    pub enumeration: u64,
    /// Maximum number of trace evaluations in a brute-force census.
    pub census: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            enumeration: DEFAULT_ENUMERATION_CAP,
            census: DEFAULT_CENSUS_CAP,
        }
    }
}

impl Caps {
    pub fn uniform(cap: u64) -> Self {
        Caps {
            enumeration: cap,
            census: cap,
        }
    }

    /// Defaults, overridden by `MODPIMAGE_CAP` when it is set to an integer.
    pub fn from_env() -> Self {
        match std::env::var(CAP_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            Some(cap) => Caps::uniform(cap),
            None => Caps::default(),
        }
    }

    pub(crate) fn check_enumeration(&self, what: &str, required: u128) -> Result<()> {
        if required > self.enumeration as u128 {
            return Err(Error::capacity(what, required, self.enumeration as u128));
        }
        Ok(())
    }

    pub(crate) fn check_census(&self, what: &str, required: u128) -> Result<()> {
        if required > self.census as u128 {
            return Err(Error::capacity(what, required, self.census as u128));
        }
        Ok(())
    }
}

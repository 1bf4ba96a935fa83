use crate::error::{Error, Result};

/// Environment variable overriding the exhaustive-enumeration cap (log₂).
pub const MAX_ENUM_ENV: &str = "STABKIT_MAX_ENUM";

/// Caps on brute-force enumeration sizes, all as log₂ of element counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest stabilizer group enumerated, as log₂ of its size (n − k).
    pub max_stabilizer_log2: usize,
    /// Largest number of logical qubits for which all 4^k classes are scored.
    pub max_logical_qubits: usize,
    /// Largest QMLD candidate set, as log₂ of its size (n + k).
    pub max_candidates_log2: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_stabilizer_log2: 26,
            max_logical_qubits: 10,
            max_candidates_log2: 26,
        }
    }
}

impl Limits {
    /// Defaults, with the stabilizer and candidate caps replaced by
    /// `STABKIT_MAX_ENUM` when it is set to an integer.
    #[must_use]
    pub fn from_env() -> Self {
        let mut limits = Self::default();
        if let Some(v) = std::env::var(MAX_ENUM_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
        {
            limits.max_stabilizer_log2 = v;
            limits.max_candidates_log2 = v;
        }
        limits
    }

    pub(crate) fn check_stabilizers(&self, log2: usize) -> Result<()> {
        check("stabilizer group", log2, self.max_stabilizer_log2)
    }

    pub(crate) fn check_classes(&self, k: usize) -> Result<()> {
        check("logical classes", 2 * k, 2 * self.max_logical_qubits)
    }

    pub(crate) fn check_candidates(&self, log2: usize) -> Result<()> {
        check("candidate errors", log2, self.max_candidates_log2)
    }
}

fn check(what: &'static str, log2: usize, limit: usize) -> Result<()> {
    if log2 > limit || log2 >= 63 {
        Err(Error::TooLarge { what, log2, limit })
    } else {
        Ok(())
    }
}

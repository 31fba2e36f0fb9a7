use crate::error::{Error, Result};

pub const DEFAULT_MAX_WORDS: usize = 10_000_000;
pub const DEFAULT_MAX_BYTES: usize = 1 << 30;

/// Environment variables consulted by [`Budget::from_env`].
pub const ENV_BUDGET_WORDS: &str = "RSUBST_BUDGET_WORDS";
pub const ENV_BUDGET_BYTES: &str = "RSUBST_BUDGET_BYTES";

/// Cap on materialised word sets. Exceeding it is always an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_words: usize,
    pub max_bytes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_words: DEFAULT_MAX_WORDS,
            max_bytes: DEFAULT_MAX_BYTES,
        }
    }
}

impl Budget {
    pub fn new(max_words: usize, max_bytes: usize) -> Self {
        Budget {
            max_words,
            max_bytes,
        }
    }

    pub fn words(max_words: usize) -> Self {
        Budget {
            max_words,
            ..Budget::default()
        }
    }

    /// Defaults overridden by `RSUBST_BUDGET_WORDS` / `RSUBST_BUDGET_BYTES`.
    pub fn from_env() -> Self {
        let mut b = Budget::default();
        if let Some(v) = read_env(ENV_BUDGET_WORDS) {
            b.max_words = v;
        }
        if let Some(v) = read_env(ENV_BUDGET_BYTES) {
            b.max_bytes = v;
        }
        b
    }

    pub fn check(&self, what: &str, words: usize, bytes: usize) -> Result<()> {
        if words > self.max_words {
            return Err(Error::budget(format!("{what}: {words} words"), self.max_words));
        }
        if bytes > self.max_bytes {
            return Err(Error::budget(format!("{what}: {bytes} bytes"), self.max_bytes));
        }
        Ok(())
    }
}

fn read_env(key: &str) -> Option<usize> {
    std::env::var(key).ok()?.trim().parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_trips_on_either_limit() {
        let b = Budget::new(10, 100);
        assert!(b.check("x", 10, 100).is_ok());
        assert!(matches!(b.check("x", 11, 0), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(b.check("x", 0, 101), Err(Error::BudgetExceeded { .. })));
    }
}

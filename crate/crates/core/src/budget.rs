use crate::error::{Error, Result};

/// Default cap on enumerated blocks: `|X|^n <= 2^24`.
pub const DEFAULT_MAX_BLOCKS: u64 = 1 << 24;
/// Default Monte-Carlo sample count when enumeration is out of reach.
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

/// Enumeration limits shared by the code constructors and the induced-law
/// computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_blocks: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_blocks: DEFAULT_MAX_BLOCKS,
        }
    }
}

impl Budget {
    pub fn new(max_blocks: u64) -> Self {
        Self { max_blocks }
    }

    /// Returns `alphabet^n` if it fits in the budget.
    pub fn blocks(&self, alphabet: usize, n: usize, hint: &'static str) -> Result<usize> {
        let required = checked_power(alphabet, n);
        self.admit(required, hint)
    }

    pub fn admit(&self, required: u128, hint: &'static str) -> Result<usize> {
        if required > self.max_blocks as u128 {
            return Err(Error::BudgetExceeded {
                required,
                limit: self.max_blocks,
                hint,
            });
        }
        Ok(required as usize)
    }
}

/// `base^exp`, saturating at `u128::MAX`.
pub fn checked_power(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

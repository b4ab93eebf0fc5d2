use crate::budget::{checked_power, Budget};
use crate::error::{Error, Result};

/// Lexicographic indexing of `alphabet^n` blocks; position 0 is the most
/// significant symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockIndexer {
    alphabet: usize,
    n: usize,
    count: usize,
}

impl BlockIndexer {
    pub fn new(alphabet: usize, n: usize, budget: &Budget) -> Result<Self> {
        if alphabet == 0 || n == 0 {
            return Err(Error::InvalidArgument(format!(
                "block indexer needs a non-empty alphabet and n >= 1 (got {alphabet}, {n})"
            )));
        }
        let count = budget.blocks(alphabet, n, "reduce n or raise the block budget")?;
        Ok(Self { alphabet, n, count })
    }

    /// Indexer without a budget check; the caller vouches that the count fits.
    pub(crate) fn unchecked(alphabet: usize, n: usize) -> Self {
        let count = checked_power(alphabet, n) as usize;
        Self { alphabet, n, count }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of blocks, `alphabet^n`.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn index(&self, symbols: &[usize]) -> Result<usize> {
        if symbols.len() != self.n {
            return Err(Error::LengthMismatch {
                left: symbols.len(),
                right: self.n,
            });
        }
        let mut idx = 0usize;
        for &s in symbols {
            if s >= self.alphabet {
                return Err(Error::SymbolOutOfRange {
                    symbol: s,
                    size: self.alphabet,
                });
            }
            idx = idx * self.alphabet + s;
        }
        Ok(idx)
    }

    pub fn symbols(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        self.fill_symbols(index, &mut out);
        out
    }

    pub fn fill_symbols(&self, mut index: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = index % self.alphabet;
            index /= self.alphabet;
        }
    }

    /// Block made of `n` copies of one symbol.
    pub fn constant(&self, symbol: usize) -> usize {
        (0..self.n).fold(0, |acc, _| acc * self.alphabet + symbol)
    }
}

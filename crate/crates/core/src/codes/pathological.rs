use crate::distributions::Channel;
use crate::error::{Error, Result};

use super::block_code::BlockCode;

/// Result of [`append_pathological_codeword`].
#[derive(Debug, Clone, PartialEq)]
pub struct PathologicalAppend {
    pub code: BlockCode,
    /// The source block now sent to the new message.
    pub x_block: usize,
    /// The appended codeword.
    pub y_block: usize,
}

/// Appends the constant codeword `y^n = (y, ..., y)` as message `M` and
/// sends the constant source block `(x, ..., x)` to it. Every other source
/// block keeps its message.
///
/// The pair must satisfy `P_{X|Y}(x|y) = 0` in `backward` (rows indexed by
/// `y`), so the backward channel gives the new pair zero probability while
/// the code gives it positive probability.
pub fn append_pathological_codeword(
    code: &BlockCode,
    backward: &Channel,
    (x, y): (usize, usize),
) -> Result<PathologicalAppend> {
    if backward.input_size() != code.y_size() || backward.output_size() != code.x_size() {
        return Err(Error::ShapeMismatch {
            left: (backward.output_size(), backward.input_size()),
            right: (code.x_size(), code.y_size()),
        });
    }
    if x >= code.x_size() {
        return Err(Error::SymbolOutOfRange { symbol: x, size: code.x_size() });
    }
    if y >= code.y_size() {
        return Err(Error::SymbolOutOfRange { symbol: y, size: code.y_size() });
    }
    let mass = backward.get(y, x);
    if mass != 0.0 {
        return Err(Error::NotPathological { x, y, mass });
    }
    let x_block = code.x_indexer().constant(x);
    let y_block = code.y_indexer().constant(y);
    let mut codebook = code.codebook().to_vec();
    codebook.push(y_block);
    let mut encoder = code.encoder().to_vec();
    encoder[x_block] = code.size() as u32;
    let mut out = BlockCode::new(code.n(), code.x_size(), code.y_size(), codebook, encoder)?;
    for (k, v) in code.notes() {
        out = out.with_note(k.clone(), v.clone());
    }
    let out = out.with_note("pathological", format!("{x} {y}"));
    Ok(PathologicalAppend { code: out, x_block, y_block })
}

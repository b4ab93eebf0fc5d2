//! Block codes `(f, g)`: an encoder table over every source block and a
//! decoder table from messages to reproduction blocks.
//!
//! Constructors:
//! * [`optimal_code_exhaustive`]: minimum expected distortion over every
//!   codebook of a given size (tiny `n` only).
//! * [`lloyd_code`]: alternating nearest-codeword / centroid refinement.
//! * [`random_coordination_code`]: i.i.d. codebook from the output marginal
//!   of a target joint law at a scheduled rate.
//! * [`smallest_code_meeting`]: the smallest codebook whose best available
//!   code meets a distortion target.
//!
//! All encoders map a source block to a minimum-distortion codeword, lowest
//! message index on ties.

mod block_code;
mod exhaustive;
mod goodness;
mod lloyd;
mod pathological;
mod random;
mod text;

pub use block_code::BlockCode;
pub use exhaustive::{multiset_count, optimal_code_exhaustive, smallest_code_meeting, SearchLimits};
pub use goodness::{goodness_report, EvalMode, GoodnessReport};
pub use lloyd::{lloyd_code, lloyd_code_traced};
pub use pathological::{append_pathological_codeword, PathologicalAppend};
pub use random::{codebook_size, random_coordination_code, CoordinationTarget, RateSchedule};

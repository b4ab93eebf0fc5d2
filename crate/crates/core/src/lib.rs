//! Rate-distortion codes at small blocklengths and the backward memoryless
//! channel their input-output statistics approach.
//!
//! A block code `(f, g)` applied to an i.i.d. source induces a joint law `P`
//! on `(X^n, Y^n)`. Picking a codeword uniformly and passing it through the
//! memoryless channel `P_{X|Y}` gives a second law `Q`. This crate builds
//! codes, computes both laws exactly, and measures how far apart they are:
//!
//! * [`distributions`]: simplices, channels, joint laws, divergences, types.
//! * [`rd_solver`]: the rate-distortion function, its backward channel and
//!   the reduction of the reproduction alphabet.
//! * [`codes`]: exhaustive, Lloyd and random constructions of block codes.
//! * [`induced`]: the laws `P` and `Q` and their divergence functionals.
//! * [`channel_conv`]: the same code read as a channel code for `P_{X|Y}`.
//!
//! The book under `book/` walks through each piece with runnable snippets.

pub mod budget;
pub mod channel_conv;
pub mod codes;
pub mod distributions;
pub mod error;
pub mod estimate;
pub mod induced;
pub mod numeric;
pub mod rd_solver;

pub use budget::Budget;
pub use error::{Error, ErrorKind, Result};

/// Book chapters, compiled as doctests so the snippets cannot drift.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/distributions.md")]
    mod distributions {}
    #[doc = include_str!("../../../book/src/rate_distortion.md")]
    mod rate_distortion {}
    #[doc = include_str!("../../../book/src/codes.md")]
    mod codes {}
    #[doc = include_str!("../../../book/src/induced.md")]
    mod induced {}
    #[doc = include_str!("../../../book/src/channel_view.md")]
    mod channel_view {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}

//! Exact finite-alphabet probability algebra.
//!
//! Every divergence in this crate is in nats. Support violations in
//! [`kl_divergence`] are reported as `f64::INFINITY`, set explicitly rather
//! than produced by overflow.

mod blocks;
mod empirical;
mod functionals;
mod law;
pub mod serial;

pub use blocks::BlockIndexer;
pub use empirical::{empirical_type, EmpiricalType};
pub use functionals::{
    entropy, kl_divergence, kl_divergence_slices, mutual_information, variational_distance,
    variational_distance_slices,
};
pub use law::{Channel, JointLaw, Law, Simplex};

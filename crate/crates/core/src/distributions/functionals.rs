use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, xlogx};

use super::law::{JointLaw, Law};

/// Shannon entropy of a mass vector, in nats.
pub fn entropy(mass: &[f64]) -> f64 {
    -compensated_sum(mass.iter().map(|&p| xlogx(p)))
}

fn check_pair(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::ShapeMismatch {
            left: (p.len(), 1),
            right: (q.len(), 1),
        });
    }
    for (index, &value) in p.iter().chain(q).enumerate() {
        if value < 0.0 {
            return Err(Error::NegativeMass {
                index: index % p.len(),
                value,
            });
        }
    }
    Ok(())
}

/// `Σ p log(p/q)` over raw mass vectors.
///
/// Cells with `p = 0` contribute nothing; a cell with `p > 0 = q` makes the
/// divergence `f64::INFINITY`.
pub fn kl_divergence_slices(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    if p.iter().zip(q).any(|(&a, &b)| a > 0.0 && b == 0.0) {
        return Ok(f64::INFINITY);
    }
    let d = compensated_sum(
        p.iter()
            .zip(q)
            .filter(|(&a, _)| a > 0.0)
            .map(|(&a, &b)| a * (a / b).ln()),
    );
    Ok(d.max(0.0))
}

/// Relative entropy `D(p‖q)` in nats between two laws of the same shape.
pub fn kl_divergence<L: Law>(p: &L, q: &L) -> Result<f64> {
    if p.shape() != q.shape() {
        return Err(Error::ShapeMismatch {
            left: p.shape(),
            right: q.shape(),
        });
    }
    kl_divergence_slices(p.masses(), q.masses())
}

/// Half the L1 distance, which equals `sup_A |P(A) − Q(A)|`.
pub fn variational_distance_slices(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    Ok(0.5 * compensated_sum(p.iter().zip(q).map(|(a, b)| (a - b).abs())))
}

pub fn variational_distance<L: Law>(p: &L, q: &L) -> Result<f64> {
    if p.shape() != q.shape() {
        return Err(Error::ShapeMismatch {
            left: p.shape(),
            right: q.shape(),
        });
    }
    variational_distance_slices(p.masses(), q.masses())
}

/// `I(X;Y) = D(P_XY ‖ P_X P_Y)` in nats.
pub fn mutual_information(joint: &JointLaw) -> f64 {
    let product = JointLaw::independent(&joint.marginal_x(), &joint.marginal_y());
    // The product of the marginals covers the support of the joint, so this
    // is always finite.
    kl_divergence(joint, &product).expect("joint and product of marginals share a shape")
}

//! Entropy, conditional entropy, mutual information and the conversions
//! between joint distributions and conditional matrices.
//!
//! All quantities are in nats. Use [`LogBase`](crate::LogBase) to report them
//! in another base.

use crate::error::{Error, Result};
use crate::prob::{ConditionalMatrix, Distribution, JointDistribution, Matrix, Orientation};

/// `-r ln r` with `h(0) = 0`. Inputs at or below zero map to zero.
#[inline]
pub fn h(r: f64) -> f64 {
    if r <= 0.0 || r == 1.0 {
        0.0
    } else {
        -r * r.ln()
    }
}

/// Checked form of [`h`]: rejects `r` outside `[0, 1]` by more than 1e-12.
pub fn point_entropy(r: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&r) {
        return Err(Error::Domain(format!("{r} is not a probability")));
    }
    Ok(h(r.clamp(0.0, 1.0)))
}

/// Shannon entropy of a probability vector given as a raw slice.
pub fn entropy_of(p: &[f64]) -> f64 {
    p.iter().map(|&x| h(x)).sum()
}

/// Shannon entropy `H(phi)`.
pub fn entropy(phi: &Distribution) -> f64 {
    entropy_of(phi.as_slice())
}

/// Entropy of a joint distribution, `H(theta)`.
pub fn joint_entropy(theta: &JointDistribution) -> f64 {
    entropy_of(theta.matrix().as_slice())
}

/// Total variation `(1/2) sum |phi_i - psi_i|`.
pub fn total_variation(phi: &Distribution, psi: &Distribution) -> Result<f64> {
    total_variation_of(phi.as_slice(), psi.as_slice())
}

pub(crate) fn total_variation_of(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// `Theta = Diag(phi) P`.
///
/// A reverse-oriented matrix is read as `Q` with `phi` the law of the
/// conditioning variable; the joint is then transposed so that rows always
/// index the variable `Q` predicts. Callers that want the joint with the
/// conditioning variable on rows should pass a forward matrix.
pub fn joint_from_conditional(
    phi: &Distribution,
    p: &ConditionalMatrix,
) -> Result<JointDistribution> {
    if phi.len() != p.rows() {
        return Err(Error::DimensionMismatch {
            expected: p.rows(),
            found: phi.len(),
        });
    }
    let mut theta = Matrix::zeros(p.rows(), p.cols());
    for i in 0..p.rows() {
        for j in 0..p.cols() {
            theta.set(i, j, phi[i] * p.get(i, j));
        }
    }
    let joint = JointDistribution::from_matrix_unchecked(theta);
    Ok(match p.orientation() {
        Orientation::Forward => joint,
        Orientation::Reverse => joint.transpose(),
    })
}

/// `P = Diag(phi)^-1 Theta` (forward) or `Q = Diag(psi)^-1 Theta^T` (reverse).
///
/// A conditioning value of probability zero gets the other marginal as its
/// conditional law. Such rows carry zero weight in any conditional entropy.
pub fn conditional_from_joint(
    theta: &JointDistribution,
    orientation: Orientation,
) -> ConditionalMatrix {
    let oriented = match orientation {
        Orientation::Forward => theta.matrix().clone(),
        Orientation::Reverse => theta.matrix().transpose(),
    };
    let fallback = oriented.col_sums();
    let mut rows = Matrix::zeros(oriented.rows(), oriented.cols());
    for i in 0..oriented.rows() {
        let mass: f64 = oriented.row(i).iter().sum();
        let out = rows.row_mut(i);
        if mass > 0.0 {
            for (o, x) in out.iter_mut().zip(oriented.row(i)) {
                *o = x / mass;
            }
        } else {
            out.copy_from_slice(&fallback);
        }
    }
    ConditionalMatrix::from_matrix_unchecked(rows, orientation)
}

/// `J_phi(P) = sum_i phi_i H(p_i)`, the conditional entropy of the predicted
/// variable given the conditioning one.
pub fn conditional_entropy(phi: &Distribution, p: &ConditionalMatrix) -> Result<f64> {
    if phi.len() != p.rows() {
        return Err(Error::DimensionMismatch {
            expected: p.rows(),
            found: phi.len(),
        });
    }
    Ok((0..p.rows())
        .filter(|&i| phi[i] > 0.0)
        .map(|i| phi[i] * entropy_of(p.row(i)))
        .sum())
}

/// `I(X, Y) = H(phi) + H(psi) - H(theta)`.
pub fn mutual_information(theta: &JointDistribution) -> f64 {
    entropy(&theta.row_marginal()) + entropy(&theta.col_marginal()) - joint_entropy(theta)
}

use nalgebra::{DMatrix, SymmetricEigen};

use super::{Criterion, CriterionValue, InformationMatrix, ModelError, ModelSpec, Validity};

/// Eigenvalues below this fraction of the largest one are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-8;
/// Largest residual norm (relative to the contrast norm) for a contrast to
/// count as lying in the row space of the information matrix.
pub const ESTIMABILITY_TOLERANCE: f64 = 1e-6;

const EIGEN_MAX_ITERATIONS: usize = 10_000;

/// Criterion value through an eigendecomposition generalized inverse.
///
/// Eigenvalues below [`RANK_TOLERANCE`] times the largest are dropped, and a
/// direct effect counts as estimable when its residual outside the kept
/// eigenspace is below [`ESTIMABILITY_TOLERANCE`]. Agrees with the exact
/// route up to rounding; kept as an independent check and for non-integer
/// matrices.
pub fn evaluate_spectral(info: &InformationMatrix, spec: &ModelSpec) -> Result<CriterionValue, ModelError> {
    let p = info.dim();
    if p != spec.parameter_count() {
        return Err(ModelError::EmptyModelMatrix);
    }
    if info.0.iter().any(|v| !v.is_finite()) {
        return Err(ModelError::Decomposition);
    }
    let eigen =
        SymmetricEigen::try_new(info.0.clone(), f64::EPSILON, EIGEN_MAX_ITERATIONS).ok_or(ModelError::Decomposition)?;
    let max_eig = eigen.eigenvalues.iter().fold(0.0f64, |acc, &l| acc.max(l.abs()));
    if max_eig == 0.0 {
        return Ok(CriterionValue::Invalid);
    }
    let cutoff = RANK_TOLERANCE * max_eig;
    let validity = spec.effective_validity();
    if validity == Validity::FullRank && eigen.eigenvalues.iter().any(|&l| l <= cutoff) {
        return Ok(CriterionValue::Invalid);
    }

    // w[i][j]: component of kept eigenvector i on the tau_{j+1} column.
    let free = spec.m - 1;
    let mut weights: Vec<(f64, Vec<f64>)> = Vec::with_capacity(p);
    for (i, &lambda) in eigen.eigenvalues.iter().enumerate() {
        if lambda > cutoff {
            let v = eigen.eigenvectors.column(i);
            weights.push((lambda, (0..free).map(|j| v[1 + j]).collect()));
        }
    }

    // Every pairwise contrast is estimable iff each tau_j (j < m) is: the
    // contrasts against tau_m = 0 are the unit vectors, and the others are
    // their differences.
    for j in 0..free {
        let projected: f64 = weights.iter().map(|(_, w)| w[j] * w[j]).sum();
        let residual = (1.0 - projected).max(0.0).sqrt();
        if residual > ESTIMABILITY_TOLERANCE {
            return Ok(CriterionValue::Invalid);
        }
    }

    if validity == Validity::NetworkContrasts {
        // gamma_j - gamma_m for each free j < m; the rest are differences.
        let last = spec.gamma_column(spec.m - 1);
        for j in 0..free {
            let col = spec.gamma_column(j);
            let mut projected = 0.0;
            for (i, &lambda) in eigen.eigenvalues.iter().enumerate() {
                if lambda > cutoff {
                    let v = eigen.eigenvectors.column(i);
                    let c = (v[col] - v[last]) / std::f64::consts::SQRT_2;
                    projected += c * c;
                }
            }
            if (1.0 - projected).max(0.0).sqrt() > ESTIMABILITY_TOLERANCE {
                return Ok(CriterionValue::Invalid);
            }
        }
    }

    // Covariance of (tau_1 .. tau_{m-1}) under the generalized inverse.
    let mut cov = DMatrix::<f64>::zeros(free, free);
    for (lambda, w) in &weights {
        for a in 0..free {
            for b in 0..free {
                cov[(a, b)] += w[a] * w[b] / lambda;
            }
        }
    }

    let value = match spec.criterion {
        Criterion::As => {
            let m = spec.m;
            let mut total = 0.0;
            for j in 0..m {
                for l in (j + 1)..m {
                    total += if l == m - 1 {
                        cov[(j, j)]
                    } else {
                        cov[(j, j)] + cov[(l, l)] - 2.0 * cov[(j, l)]
                    };
                }
            }
            total * 2.0 / (m * (m - 1)) as f64
        }
        Criterion::Ds => cov.determinant(),
    };
    Ok(CriterionValue::Valid(value))
}

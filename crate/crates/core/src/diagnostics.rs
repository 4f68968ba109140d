//! Numerical verification of the second-order structure at and around
//! converged pairs: gradient and Hessian of the log-objective, the curvature
//! matrix `B(x)`, the error-contraction matrix whose spectral radius governs
//! the Q-linear rate, the similarity-transformed matrix sharing the tensor's
//! positive eigenpair, and empirical rate extraction from traces.
//!
//! The closed forms implemented here are derivatives of
//! `f(y) = -log(A x^m)`, `x = exp(y)`, under the convention that the tensor
//! is symmetric; for an asymmetric tensor, pass `DenseTensor::symmetrized()`
//! when the true derivatives of `f` are wanted.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{jacobi_eigenvalues, spectral_radius, DMatrix};
use crate::solver::{EigenPair, IterationTrace, SolveError};
use crate::tensor::{ScaledTensor, TensorError};

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("pair has residual {residual:e}, above the 1e-8 convergence requirement")]
    NotConverged { residual: f64 },
    #[error("tensor is not symmetric; this quantity is only defined for symmetric tensors")]
    NotSymmetric,
    #[error("trace too short: needs at least 3 iterations strictly below the final value")]
    TraceTooShort,
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Gradient of `f(y) = -log(A x^m)` in log coordinates:
/// `grad f = -m (A x^{m-1} o x) / (A x^m)`.
///
/// Its components always sum to exactly `-m`, which makes the Lagrange
/// multiplier of the feasibility constraint independent of the point.
pub fn grad_f(scaled: &ScaledTensor, x: &crate::FeasiblePoint) -> Result<Vec<f64>, DiagnosticsError> {
    let m = x.order() as f64;
    let v = scaled.tensor().contract_to_vector(x.values())?;
    let phi: f64 = crate::tensor::dot(&v, x.values());
    if !(phi > 0.0) {
        return Err(DiagnosticsError::Solve(SolveError::ZeroForm));
    }
    Ok(v.iter()
        .zip(x.values())
        .map(|(vi, xi)| -m * vi * xi / phi)
        .collect())
}

/// The curvature matrix
/// `B(x) = (m/phi) (A x^{m-1})(A x^{m-1})' - (m-1) A x^{m-2} - diag(A x^{m-1} / x)`.
pub fn b_matrix(scaled: &ScaledTensor, x: &crate::FeasiblePoint) -> Result<DMatrix, DiagnosticsError> {
    let n = x.dim();
    let m = x.order() as f64;
    let v = scaled.tensor().contract_to_vector(x.values())?;
    let phi: f64 = crate::tensor::dot(&v, x.values());
    if !(phi > 0.0) {
        return Err(DiagnosticsError::Solve(SolveError::ZeroForm));
    }
    let mat = scaled.tensor().contract_to_matrix(x.values())?;
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut value = (m / phi) * v[i] * v[j] - (m - 1.0) * mat.get(i, j);
            if i == j {
                value -= v[i] / x.values()[i];
            }
            b.set(i, j, value);
        }
    }
    Ok(b)
}

/// Hessian of `f` in log coordinates: `(m / phi) diag(x) B(x) diag(x)`.
/// Symmetric and negative semidefinite whenever the tensor is symmetric.
pub fn hessian_f(
    scaled: &ScaledTensor,
    x: &crate::FeasiblePoint,
) -> Result<DMatrix, DiagnosticsError> {
    let n = x.dim();
    let m = x.order() as f64;
    let v = scaled.tensor().contract_to_vector(x.values())?;
    let phi: f64 = crate::tensor::dot(&v, x.values());
    let b = b_matrix(scaled, x)?;
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let sandwich = x.values()[i] * b.get(i, j) * x.values()[j];
            h.set(i, j, (m / phi) * sandwich);
        }
    }
    Ok(h)
}

/// The error-contraction matrix at a converged pair:
/// `T = -(1/m) lambda^{-1} diag(x^{[-(m-2)/2]}) B(x) diag(x^{[-(m-2)/2]})`.
///
/// For symmetric tensors `T` is symmetric positive semidefinite with spectral
/// radius below 1, which is what drives the Q-linear convergence of the
/// power-like iterates.
pub fn contraction_matrix_t(
    scaled: &ScaledTensor,
    pair: &EigenPair,
) -> Result<DMatrix, DiagnosticsError> {
    require_converged(pair)?;
    let n = pair.x.dim();
    let m = pair.x.order() as f64;
    let b = b_matrix(scaled, &pair.x)?;
    let weights: Vec<f64> = pair
        .x
        .values()
        .iter()
        .map(|xi| xi.powf(-(m - 2.0) / 2.0))
        .collect();
    let mut t = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let value = -(1.0 / m) / pair.lambda_scaled * weights[i] * b.get(i, j) * weights[j];
            t.set(i, j, value);
        }
    }
    Ok(t)
}

/// The matrix `diag(x^{[-(m-2)/2]}) (A x^{m-2}) diag(x^{[-(m-2)/2]})` at a
/// converged pair of a symmetric tensor. Its Perron vector is `x^{[m/2]}`
/// with eigenvalue `lambda`, so the tensor eigenvalue can be cross-checked
/// against a plain matrix eigenproblem.
pub fn abar_matrix(
    scaled: &ScaledTensor,
    pair: &EigenPair,
) -> Result<DMatrix, DiagnosticsError> {
    require_converged(pair)?;
    if !scaled.tensor().is_symmetric() {
        return Err(DiagnosticsError::NotSymmetric);
    }
    let n = pair.x.dim();
    let m = pair.x.order() as f64;
    let mat = scaled.tensor().contract_to_matrix(pair.x.values())?;
    let weights: Vec<f64> = pair
        .x
        .values()
        .iter()
        .map(|xi| xi.powf(-(m - 2.0) / 2.0))
        .collect();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, weights[i] * mat.get(i, j) * weights[j]);
        }
    }
    Ok(out)
}

/// Residual `|| Abar z - lambda z ||` with `z = x^{[m/2]}`.
pub fn abar_eigen_residual(
    scaled: &ScaledTensor,
    pair: &EigenPair,
) -> Result<f64, DiagnosticsError> {
    let abar = abar_matrix(scaled, pair)?;
    let m = pair.x.order() as f64;
    let z: Vec<f64> = pair.x.values().iter().map(|xi| xi.powf(m / 2.0)).collect();
    let az = abar.matvec(&z);
    let defect: f64 = az
        .iter()
        .zip(&z)
        .map(|(a, b)| (a - pair.lambda_scaled * b).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(defect)
}

fn require_converged(pair: &EigenPair) -> Result<(), DiagnosticsError> {
    if pair.residual > 1e-8 {
        return Err(DiagnosticsError::NotConverged {
            residual: pair.residual,
        });
    }
    Ok(())
}

/// Ratios `(lambda_final - lambda_{k+1}) / (lambda_final - lambda_k)` over
/// consecutive iterates that are both strictly below the final value (by more
/// than 1e-14, so ratios are not formed across the floating-point tie at the
/// limit). All ratios sit in `[0, 1)` for the monotone methods, the empirical
/// signature of Q-linear convergence.
pub fn qlinear_rate(
    trace: &IterationTrace,
    lambda_final: f64,
) -> Result<Vec<f64>, DiagnosticsError> {
    let below = |v: f64| v < lambda_final - 1e-14;
    let valid: Vec<usize> = (0..trace.lambdas.len().saturating_sub(1))
        .filter(|&k| below(trace.lambdas[k]) && below(trace.lambdas[k + 1]))
        .collect();
    if valid.len() < 3 {
        return Err(DiagnosticsError::TraceTooShort);
    }
    Ok(valid
        .into_iter()
        .map(|k| (lambda_final - trace.lambdas[k + 1]) / (lambda_final - trace.lambdas[k]))
        .collect())
}

/// Summary of the second-order checks at one converged pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SecondOrderReport {
    /// Smallest eigenvalue of `-hessian(f)`; nonnegative when `f` is concave.
    pub min_eig_neg_hessian: f64,
    /// Spectral radius of the error-contraction matrix; below 1 at a stable pair.
    pub spectral_radius_t: f64,
    /// Positive definiteness of the reduced curvature, derived from the same
    /// spectral computation (equivalent to `spectral_radius_t < 1`).
    pub w_positive_definite: bool,
    /// `|| Abar z - lambda z ||` for symmetric tensors, absent otherwise.
    pub abar_eigen_residual: Option<f64>,
    pub notes: Vec<String>,
}

/// Run all second-order checks at a converged pair.
///
/// For asymmetric tensors the Hessian formula is evaluated as printed and its
/// symmetric part is diagnosed, with a note; the similarity-matrix check is
/// skipped.
pub fn second_order_report(
    scaled: &ScaledTensor,
    pair: &EigenPair,
) -> Result<SecondOrderReport, DiagnosticsError> {
    require_converged(pair)?;
    let mut notes = Vec::new();
    let symmetric = scaled.tensor().is_symmetric();

    let hessian = hessian_f(scaled, &pair.x)?;
    let neg_hessian = hessian.scaled(-1.0);
    let min_eig_neg_hessian = if symmetric {
        jacobi_eigenvalues(&neg_hessian)[0]
    } else {
        notes.push("asymmetric tensor: Hessian checks use the symmetric part".to_string());
        jacobi_eigenvalues(&neg_hessian.symmetric_part())[0]
    };

    let t = contraction_matrix_t(scaled, pair)?;
    let spectral_radius_t = spectral_radius(&t);
    let w_positive_definite = spectral_radius_t < 1.0;

    let abar_residual = if symmetric {
        Some(abar_eigen_residual(scaled, pair)?)
    } else {
        notes.push("asymmetric tensor: similarity-matrix eigen check skipped".to_string());
        None
    };

    Ok(SecondOrderReport {
        min_eig_neg_hessian,
        spectral_radius_t,
        w_positive_definite,
        abar_eigen_residual: abar_residual,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasible::{normalize_to_feasible, random_feasible, FeasiblePoint};
    use crate::problems;
    use crate::solver::{solve, Method, SolverConfig};
    use crate::tensor::DenseTensor;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn converged_pair(tensor: &DenseTensor) -> EigenPair {
        let x0 = normalize_to_feasible(&vec![1.0; tensor.dim()], tensor.order()).unwrap();
        let cfg = SolverConfig::new(Method::PowerLike);
        let (pair, trace) = solve(tensor, &x0, &cfg).unwrap();
        assert_eq!(trace.status, crate::solver::TerminalStatus::Converged);
        pair
    }

    #[test]
    fn gradient_components_sum_to_minus_m() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for tensor in [problems::problem1(), problems::problem3()] {
            let scaled = tensor.scale_by_max().unwrap();
            for _ in 0..20 {
                let x = random_feasible(tensor.dim(), tensor.order(), &mut rng);
                let g = grad_f(&scaled, &x).unwrap();
                let total: f64 = g.iter().sum();
                assert!((total + tensor.order() as f64).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn gradient_on_identity_is_minus_m_powers() {
        let identity = DenseTensor::identity(3, 4).unwrap();
        let scaled = crate::tensor::ScaledTensor::pre_scaled(identity);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_feasible(4, 3, &mut rng);
        let g = grad_f(&scaled, &x).unwrap();
        for (gi, xi) in g.iter().zip(x.values()) {
            assert!((gi + 3.0 * xi.powi(3)).abs() <= 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences_on_symmetric_tensors() {
        let tensors = [problems::problem1(), problems::problem2().symmetrized()];
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for tensor in tensors {
            let scaled = tensor.scale_by_max().unwrap();
            for _ in 0..20 {
                let x = random_feasible(tensor.dim(), tensor.order(), &mut rng);
                let g = grad_f(&scaled, &x).unwrap();
                let fd = fd_gradient(&scaled, &x, 1e-5);
                for (a, b) in g.iter().zip(&fd) {
                    let denom = b.abs().max(1.0);
                    assert!((a - b).abs() / denom <= 1e-5, "grad {a} vs fd {b}");
                }
            }
        }
    }

    #[test]
    fn hessian_matches_finite_differences_on_problem1() {
        let tensor = problems::problem1();
        let scaled = tensor.scale_by_max().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let x = random_feasible(2, 4, &mut rng);
            let h = hessian_f(&scaled, &x).unwrap();
            let fd = fd_hessian(&scaled, &x, 1e-4);
            for i in 0..2 {
                for j in 0..2 {
                    let denom = fd.get(i, j).abs().max(1.0);
                    assert!(
                        (h.get(i, j) - fd.get(i, j)).abs() / denom <= 1e-4,
                        "H[{i}{j}] = {} vs {}",
                        h.get(i, j),
                        fd.get(i, j)
                    );
                }
            }
        }
    }

    #[test]
    fn hessian_identity_matrix_case_closed_form() {
        // m = 2, identity matrix: H = (4 x1^2 x2^2 / phi^2) [[-1, 1], [1, -1]]
        let identity = DenseTensor::identity(2, 2).unwrap();
        let scaled = crate::tensor::ScaledTensor::pre_scaled(identity);
        let x = normalize_to_feasible(&[0.6, 1.1], 2).unwrap();
        let h = hessian_f(&scaled, &x).unwrap();
        let (x1, x2) = (x.values()[0], x.values()[1]);
        let phi = x1 * x1 + x2 * x2;
        let c = 4.0 * x1 * x1 * x2 * x2 / (phi * phi);
        assert!((h.get(0, 0) + c).abs() <= 1e-12);
        assert!((h.get(1, 1) + c).abs() <= 1e-12);
        assert!((h.get(0, 1) - c).abs() <= 1e-12);
        assert!((h.get(1, 0) - c).abs() <= 1e-12);
    }

    #[test]
    fn negated_hessian_is_psd_on_symmetric_problems() {
        let cases: [DenseTensor; 3] = [
            problems::problem1(),
            problems::problem2().symmetrized(),
            problems::problem6(3, 10).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for tensor in cases {
            let scaled = tensor.scale_by_max().unwrap();
            for _ in 0..40 {
                let x = random_feasible(tensor.dim(), tensor.order(), &mut rng);
                let h = hessian_f(&scaled, &x).unwrap();
                let eigs = jacobi_eigenvalues(&h.scaled(-1.0));
                let scale = h.frobenius_norm();
                assert!(
                    eigs[0] >= -1e-8 * scale,
                    "min eig {} at scale {scale}",
                    eigs[0]
                );
            }
        }
    }

    #[test]
    fn contraction_matrix_spectral_radius_below_one_problem1() {
        let tensor = problems::problem1();
        let scaled = tensor.scale_by_max().unwrap();
        let pair = converged_pair(&tensor);
        let t = contraction_matrix_t(&scaled, &pair).unwrap();
        assert!(t.is_symmetric(1e-9));
        let eigs = jacobi_eigenvalues(&t.symmetric_part());
        assert!(eigs[0] >= -1e-8);
        let rho = spectral_radius(&t);
        assert!(rho < 1.0, "rho = {rho}");
    }

    #[test]
    fn contraction_matrix_requires_convergence() {
        let tensor = problems::problem1();
        let scaled = tensor.scale_by_max().unwrap();
        let mut pair = converged_pair(&tensor);
        pair.residual = 1e-3;
        assert!(matches!(
            contraction_matrix_t(&scaled, &pair),
            Err(DiagnosticsError::NotConverged { .. })
        ));
    }

    #[test]
    fn abar_matrix_eigen_consistency_problem1() {
        let tensor = problems::problem1();
        let scaled = tensor.scale_by_max().unwrap();
        let pair = converged_pair(&tensor);
        let defect = abar_eigen_residual(&scaled, &pair).unwrap();
        assert!(defect <= 1e-6, "defect = {defect:e}");

        let abar = abar_matrix(&scaled, &pair).unwrap();
        // dominant eigenvalue of the matrix equals the tensor eigenvalue
        let dominant = crate::linalg::power_iteration_dominant(&abar, 1000, 1e-14);
        assert!((dominant - pair.lambda_scaled).abs() <= 1e-6);
    }

    #[test]
    fn abar_matrix_rejects_asymmetric() {
        let tensor = problems::problem3();
        let scaled = tensor.scale_by_max().unwrap();
        let pair = converged_pair(&tensor);
        assert!(matches!(
            abar_matrix(&scaled, &pair),
            Err(DiagnosticsError::NotSymmetric)
        ));
    }

    #[test]
    fn abar_matrix_order_two_is_the_tensor_itself() {
        // m = 2: the exponent (m-2)/2 vanishes, Abar equals the matrix
        let t = DenseTensor::from_nonzeros(
            2,
            2,
            &[
                (vec![1, 1], 2.0),
                (vec![1, 2], 1.0),
                (vec![2, 1], 1.0),
                (vec![2, 2], 2.0),
            ],
        )
        .unwrap();
        let x0 = normalize_to_feasible(&[1.0, 1.0], 2).unwrap();
        let (pair, _) = solve(&t, &x0, &SolverConfig::new(Method::PowerLike)).unwrap();
        let scaled = t.scale_by_max().unwrap();
        let abar = abar_matrix(&scaled, &pair).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((abar.get(i, j) - scaled.tensor().entry(&[i + 1, j + 1]).unwrap()).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn kkt_residual_vanishes_at_converged_pairs() {
        for tensor in [
            problems::problem1(),
            problems::problem2(),
            problems::problem3(),
        ] {
            let scaled = tensor.scale_by_max().unwrap();
            let pair = converged_pair(&tensor);
            let g = grad_f(&scaled, &pair.x).unwrap();
            let m = tensor.order() as f64;
            let kkt: f64 = g
                .iter()
                .zip(pair.x.values())
                .map(|(gi, xi)| (gi + m * xi.powi(tensor.order() as i32)).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(kkt <= 1e-6, "kkt = {kkt:e}");
        }
    }

    #[test]
    fn qlinear_ratios_stay_below_one() {
        let tensor = problems::problem1();
        let x0 = normalize_to_feasible(&[0.9, 0.3], 4).unwrap();
        let (pair, trace) = solve(&tensor, &x0, &SolverConfig::new(Method::PowerLike)).unwrap();
        let ratios = qlinear_rate(&trace, pair.lambda_scaled).unwrap();
        assert!(ratios.len() >= 3);
        for r in &ratios {
            assert!((0.0..1.0).contains(r), "ratio {r}");
        }
    }

    #[test]
    fn qlinear_rejects_degenerate_traces() {
        let tensor = DenseTensor::identity(3, 3).unwrap();
        let x0 = normalize_to_feasible(&[1.0, 1.0, 1.0], 3).unwrap();
        let (pair, trace) = solve(&tensor, &x0, &SolverConfig::new(Method::PowerLike)).unwrap();
        assert!(matches!(
            qlinear_rate(&trace, pair.lambda_scaled),
            Err(DiagnosticsError::TraceTooShort)
        ));
    }

    #[test]
    fn second_order_report_symmetric_and_asymmetric() {
        let tensor = problems::problem1();
        let scaled = tensor.scale_by_max().unwrap();
        let pair = converged_pair(&tensor);
        let report = second_order_report(&scaled, &pair).unwrap();
        assert!(report.min_eig_neg_hessian >= -1e-10);
        assert!(report.spectral_radius_t < 1.0);
        assert!(report.w_positive_definite);
        assert!(report.abar_eigen_residual.unwrap() <= 1e-6);
        assert!(report.notes.is_empty());

        let tensor = problems::problem3();
        let scaled = tensor.scale_by_max().unwrap();
        let pair = converged_pair(&tensor);
        let report = second_order_report(&scaled, &pair).unwrap();
        assert!(report.abar_eigen_residual.is_none());
        assert_eq!(report.notes.len(), 2);
    }

    fn fd_gradient(
        scaled: &crate::tensor::ScaledTensor,
        x: &FeasiblePoint,
        step: f64,
    ) -> Vec<f64> {
        // central differences of y -> f(exp(y)) around y = log x
        let y: Vec<f64> = x.values().iter().map(|v| v.ln()).collect();
        let f_at = |y: &[f64]| -> f64 {
            let xv: Vec<f64> = y.iter().map(|v| v.exp()).collect();
            -scaled.tensor().contract_to_scalar(&xv).unwrap().ln()
        };
        (0..y.len())
            .map(|i| {
                let mut hi = y.clone();
                hi[i] += step;
                let mut lo = y.clone();
                lo[i] -= step;
                (f_at(&hi) - f_at(&lo)) / (2.0 * step)
            })
            .collect()
    }

    fn fd_hessian(scaled: &crate::tensor::ScaledTensor, x: &FeasiblePoint, step: f64) -> DMatrix {
        // central differences of the closed-form gradient in y
        let y: Vec<f64> = x.values().iter().map(|v| v.ln()).collect();
        let grad_at = |y: &[f64]| -> Vec<f64> {
            let xv: Vec<f64> = y.iter().map(|v| v.exp()).collect();
            let m = x.order() as f64;
            let v = scaled.tensor().contract_to_vector(&xv).unwrap();
            let phi: f64 = v.iter().zip(&xv).map(|(a, b)| a * b).sum();
            v.iter()
                .zip(&xv)
                .map(|(vi, xi)| -m * vi * xi / phi)
                .collect()
        };
        let n = y.len();
        let mut h = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut hi = y.clone();
            hi[j] += step;
            let mut lo = y.clone();
            lo[j] -= step;
            let ghi = grad_at(&hi);
            let glo = grad_at(&lo);
            for i in 0..n {
                h.set(i, j, (ghi[i] - glo[i]) / (2.0 * step));
            }
        }
        h
    }
}

//! Independent oracles shared by the acceptance suite. Everything here
//! recomputes target values from definitions, without touching the iterative
//! solver paths it is used to check.

use teneig::tensor::DenseTensor;

/// Maximize `A x^m` over the positive unit m-norm sphere for a dimension-2
/// tensor by a dense parameter grid plus golden-section refinement.
///
/// The sphere is parameterized as `x(u) = (u, (1 - u^m)^(1/m))` for
/// `u in (0, 1)`; the grid locates the best cell and the golden-section step
/// polishes it to parameter precision ~1e-12.
pub fn grid_maximizer_dim2(tensor: &DenseTensor, grid: usize) -> f64 {
    assert_eq!(tensor.dim(), 2);
    let m = tensor.order() as f64;
    let phi = |u: f64| -> f64 {
        let x = [u, (1.0 - u.powf(m)).powf(1.0 / m)];
        tensor.contract_to_scalar(&x).unwrap()
    };

    let mut best_index = 1;
    let mut best_value = f64::NEG_INFINITY;
    for i in 1..grid {
        let u = i as f64 / grid as f64;
        let value = phi(u);
        if value > best_value {
            best_value = value;
            best_index = i;
        }
    }

    // golden-section refinement inside the bracketing cells
    let mut lo = (best_index.saturating_sub(1)).max(1) as f64 / grid as f64;
    let mut hi = ((best_index + 1).min(grid - 1)) as f64 / grid as f64;
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = phi(c);
    let mut fd = phi(d);
    for _ in 0..200 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = phi(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = phi(d);
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    phi(0.5 * (lo + hi)).max(best_value)
}

/// The positive eigenvalue of the printed four-entry order-3 tensor, derived
/// by eliminating variables in `A x^2 = lambda x^{[2]}`:
/// the second and third equations force `x2 = x3` and `lambda x3^2 = x1^2`,
/// the first then gives `lambda^2 = lambda + 1`.
pub fn printed_p4_eigenvalue() -> f64 {
    (1.0 + 5.0_f64.sqrt()) / 2.0
}

/// The eigenvector paired with [`printed_p4_eigenvalue`], normalized in the
/// 3-norm: direction `(sqrt(lambda), 1, 1)`.
pub fn printed_p4_eigenvector() -> Vec<f64> {
    let lambda = printed_p4_eigenvalue();
    let direction = [lambda.sqrt(), 1.0, 1.0];
    let norm: f64 = direction.iter().map(|v| v.powi(3)).sum::<f64>();
    let scale = norm.powf(1.0 / 3.0);
    direction.iter().map(|v| v / scale).collect()
}

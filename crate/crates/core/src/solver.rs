//! Iterative eigensolvers for the scaled tensor problem.
//!
//! All three methods run on the max-entry-scaled tensor and stop when the
//! residual `Res = || -A x^{m-1} + (A x^m) x^{[m-1]} ||` drops to `tol`, or
//! after `max_iter` steps:
//!
//! * `PowerMethod` — the classical higher-order power iteration
//!   `x+ = normalize((A x^{m-1})^{[1/(m-1)]})`. Simple, but it can cycle and
//!   is not guaranteed to converge.
//! * `PowerLike` — the fixed-point update
//!   `x+ = ((A x^{m-1} o x) / A x^m)^{[1/m]}`, which keeps every iterate
//!   feasible and produces a monotonically increasing eigenvalue estimate.
//! * `ImprovedBB1` / `ImprovedBB2` — the power-like update stretched along
//!   its own direction in `x^{[m]}`-coordinates by a backtracking line search,
//!   with the trial stretch `1 + beta` chosen by one of two Barzilai-Borwein
//!   secant formulas.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feasible::{normalize_to_feasible, FeasibleError, FeasiblePoint};
use crate::tensor::{DenseTensor, ScaledTensor, TensorError};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Feasible(#[from] FeasibleError),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("initial point shape ({point_dim}, order {point_order}) does not fit tensor ({tensor_dim}, order {tensor_order})")]
    StartMismatch {
        point_dim: usize,
        point_order: usize,
        tensor_dim: usize,
        tensor_order: usize,
    },
    #[error("contraction component {component} vanished at a positive point; the step is undefined")]
    UndefinedStep { component: usize },
    #[error("A x^m vanished at a positive point")]
    ZeroForm,
}

/// Method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    PowerMethod,
    PowerLike,
    ImprovedBB1,
    ImprovedBB2,
}

impl Method {
    /// Short code used on the command line and in CSV output.
    pub fn code(&self) -> &'static str {
        match self {
            Method::PowerMethod => "pm",
            Method::PowerLike => "plm",
            Method::ImprovedBB1 => "imp1",
            Method::ImprovedBB2 => "imp2",
        }
    }

    /// Row label used in rendered tables.
    pub fn display_name(&self) -> &'static str {
        match self {
            Method::PowerMethod => "Power method",
            Method::PowerLike => "Power-like method",
            Method::ImprovedBB1 => "Improved method1",
            Method::ImprovedBB2 => "Improved method2",
        }
    }

    pub const ALL: [Method; 4] = [
        Method::PowerMethod,
        Method::PowerLike,
        Method::ImprovedBB1,
        Method::ImprovedBB2,
    ];
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pm" => Ok(Method::PowerMethod),
            "plm" => Ok(Method::PowerLike),
            "imp1" => Ok(Method::ImprovedBB1),
            "imp2" => Ok(Method::ImprovedBB2),
            other => Err(format!(
                "unknown method `{other}` (expected pm, plm, imp1 or imp2)"
            )),
        }
    }
}

/// Which Barzilai-Borwein formula drives the line-search trial stretch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbVariant {
    Bb1,
    Bb2,
}

/// Solver parameters. Defaults follow the usual Armijo-style choices; every
/// field is plain data and can be overridden before calling [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: Method,
    /// Residual threshold for declaring convergence.
    pub tol: f64,
    /// Iteration cap; runs hitting it count as failures.
    pub max_iter: usize,
    /// Sufficient-decrease coefficient in the line-search condition.
    pub sigma: f64,
    /// Backtracking shrink factor for the trial stretch.
    pub rho: f64,
    /// Componentwise floor `x^{[m]}(alpha) >= delta_floor * xbar^{[m]}`.
    pub delta_floor: f64,
    /// Upper clamp on the Barzilai-Borwein value.
    pub beta_max: f64,
    /// Candidates tried before falling back to the unit step.
    pub max_backtracks: usize,
}

impl SolverConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            tol: 1e-8,
            max_iter: 200,
            sigma: 1e-4,
            rho: 0.5,
            delta_floor: 0.01,
            beta_max: 100.0,
            max_backtracks: 30,
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let in_unit = |v: f64| v > 0.0 && v < 1.0;
        if !(self.tol > 0.0) {
            return Err(SolveError::InvalidConfig(format!("tol = {}", self.tol)));
        }
        if self.max_iter < 1 {
            return Err(SolveError::InvalidConfig("max_iter < 1".into()));
        }
        if !in_unit(self.sigma) || !in_unit(self.rho) || !in_unit(self.delta_floor) {
            return Err(SolveError::InvalidConfig(
                "sigma, rho and delta_floor must lie in (0, 1)".into(),
            ));
        }
        if !(self.beta_max > 0.0) {
            return Err(SolveError::InvalidConfig(format!(
                "beta_max = {}",
                self.beta_max
            )));
        }
        if self.max_backtracks < 1 {
            return Err(SolveError::InvalidConfig("max_backtracks < 1".into()));
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::new(Method::PowerLike)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminalStatus {
    Converged,
    MaxIter,
}

/// Converged (or best-effort) eigenpair of the scaled tensor, with the
/// eigenvalue of the original tensor recovered through the stored scale.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda_scaled: f64,
    pub lambda_original: f64,
    pub x: FeasiblePoint,
    pub residual: f64,
}

/// Per-iteration history of a single run.
///
/// `lambdas`, `residuals` and `f_values` carry one record per iterate
/// (including the start), `alphas` and `betas` one record per step taken;
/// `betas` is empty for the methods that take no line-search stretch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub method: String,
    pub problem: String,
    pub seed: u64,
    pub status: TerminalStatus,
    pub lambda_scaled: f64,
    pub lambda_original: f64,
    pub iterations: usize,
    pub residuals: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub f_values: Vec<f64>,
    pub stagnated: bool,
}

impl IterationTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }
}

/// One full evaluation of the scaled tensor at a feasible point.
struct Evaluation {
    /// `A x^{m-1}`
    contraction: Vec<f64>,
    /// `A x^m`
    lambda: f64,
    /// `F(x) = -A x^{m-1} + (A x^m) x^{[m-1]}`
    residual: Vec<f64>,
    res_norm: f64,
}

fn evaluate(scaled: &ScaledTensor, x: &FeasiblePoint) -> Result<Evaluation, SolveError> {
    let order = scaled.tensor().order() as i32;
    let contraction = scaled.tensor().contract_to_vector(x.values())?;
    let lambda: f64 = crate::tensor::dot(&contraction, x.values());
    if !(lambda > 0.0) {
        return Err(SolveError::ZeroForm);
    }
    let residual: Vec<f64> = contraction
        .iter()
        .zip(x.values())
        .map(|(v, xi)| -v + lambda * xi.powi(order - 1))
        .collect();
    let res_norm = crate::linalg::norm2(&residual);
    Ok(Evaluation {
        contraction,
        lambda,
        residual,
        res_norm,
    })
}

/// The residual map `F(x)` of the scaled tensor and its Euclidean norm.
/// Zero exactly at an eigenpair.
pub fn residual_map(
    scaled: &ScaledTensor,
    x: &FeasiblePoint,
) -> Result<(Vec<f64>, f64), SolveError> {
    let eval = evaluate(scaled, x)?;
    Ok((eval.residual, eval.res_norm))
}

/// `f(y) = -log(A x^m)` with `x = exp(y)`, the concave objective whose KKT
/// points are the positive eigenpairs.
pub fn f_value(scaled: &ScaledTensor, x: &FeasiblePoint) -> Result<f64, SolveError> {
    let phi = scaled.tensor().contract_to_scalar(x.values())?;
    if !(phi > 0.0) {
        return Err(SolveError::ZeroForm);
    }
    Ok(-phi.ln())
}

/// One fixed-point update `x+ = ((A x^{m-1} o x) / A x^m)^{[1/m]}`.
///
/// The new m-th powers sum to `A x^m / A x^m = 1`, so the output is feasible
/// without renormalization.
pub fn power_like_step(
    scaled: &ScaledTensor,
    x: &FeasiblePoint,
) -> Result<FeasiblePoint, SolveError> {
    let eval = evaluate(scaled, x)?;
    next_from_powers(&power_like_target(&eval, x), x.order())
}

/// m-th powers of the power-like successor: `(A x^{m-1} o x) / A x^m`.
fn power_like_target(eval: &Evaluation, x: &FeasiblePoint) -> Vec<f64> {
    eval.contraction
        .iter()
        .zip(x.values())
        .map(|(v, xi)| v * xi / eval.lambda)
        .collect()
}

fn next_from_powers(powers: &[f64], order: usize) -> Result<FeasiblePoint, SolveError> {
    let exponent = 1.0 / order as f64;
    let mut values = Vec::with_capacity(powers.len());
    for (component, &p) in powers.iter().enumerate() {
        if !(p > 0.0) {
            return Err(SolveError::UndefinedStep { component });
        }
        values.push(p.powf(exponent));
    }
    Ok(FeasiblePoint::new(values, order)?)
}

/// One higher-order power-method update
/// `y = (A x^{m-1})^{[1/(m-1)]}`, `x+ = y / ||y||_m`.
pub fn power_method_step(
    scaled: &ScaledTensor,
    x: &FeasiblePoint,
) -> Result<FeasiblePoint, SolveError> {
    let eval = evaluate(scaled, x)?;
    let exponent = 1.0 / (x.order() as f64 - 1.0);
    let mut y = Vec::with_capacity(eval.contraction.len());
    for (component, &v) in eval.contraction.iter().enumerate() {
        if !(v > 0.0) {
            return Err(SolveError::UndefinedStep { component });
        }
        y.push(v.powf(exponent));
    }
    Ok(normalize_to_feasible(&y, x.order())?)
}

/// How the line search settled on its step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acceptance {
    /// A candidate satisfied the floor and sufficient-decrease conditions.
    SufficientDecrease,
    /// Every candidate failed the decrease test while the unit step was
    /// stalling, and a candidate was taken on a strict residual reduction
    /// instead. Only reachable on asymmetric tensors, where the objective can
    /// sit below its value at the eigenpair and decrease-based acceptance
    /// locks up.
    ResidualRescue,
    /// Every candidate was rejected; the unit (power-like) step was taken.
    UnitFallback,
}

/// Result of one backtracking line search.
#[derive(Debug, Clone)]
pub struct LineSearchOutcome {
    pub alpha: f64,
    pub point: FeasiblePoint,
    pub acceptance: Acceptance,
}

impl LineSearchOutcome {
    /// True when every candidate was rejected and the unit step was taken.
    pub fn fell_back(&self) -> bool {
        self.acceptance == Acceptance::UnitFallback
    }
}

/// Unit-step residual ratio above which the iteration counts as stalled and
/// the residual rescue may engage.
const STALL_RATIO: f64 = 0.98;
/// A rescue candidate must cut the residual at least this much.
const RESCUE_RATIO: f64 = 0.9;

/// Backtracking search over the stretches `alpha_i = 1 + beta * rho^i`.
///
/// The candidate point is defined through its m-th powers,
/// `x^{[m]}(alpha) = xbar^{[m]} + (alpha - 1) d` with
/// `d = xbar^{[m]} - x^{[m]}`, where `xbar` is the power-like successor. A
/// candidate is accepted when it stays above the componentwise floor
/// `delta_floor * xbar^{[m]}` and satisfies the sufficient-decrease condition
/// on `f` in log coordinates. With `beta = 0` the search degenerates to the
/// plain power-like step. After `max_backtracks` rejected candidates the unit
/// step is taken as a fallback, which always satisfies both conditions in
/// exact arithmetic.
pub fn line_search(
    scaled: &ScaledTensor,
    x: &FeasiblePoint,
    beta: f64,
    cfg: &SolverConfig,
) -> Result<LineSearchOutcome, SolveError> {
    if beta <= 0.0 {
        return Ok(LineSearchOutcome {
            alpha: 1.0,
            point: power_like_step(scaled, x)?,
            acceptance: Acceptance::SufficientDecrease,
        });
    }

    let order = x.order();
    let m = order as f64;
    let eval = evaluate(scaled, x)?;
    let xbar_powers = power_like_target(&eval, x);
    let x_powers: Vec<f64> = x.values().iter().map(|v| v.powi(order as i32)).collect();
    let direction: Vec<f64> = xbar_powers
        .iter()
        .zip(&x_powers)
        .map(|(b, p)| b - p)
        .collect();
    let f_current = -eval.lambda.ln();
    let y_current: Vec<f64> = x.values().iter().map(|v| v.ln()).collect();
    // gradient of f in log coordinates: -m (A x^{m-1} o x) / A x^m
    let grad: Vec<f64> = xbar_powers.iter().map(|b| -m * b).collect();

    // largest floor-feasible candidate cutting the residual hard, kept as a
    // rescue in case the decrease test rejects everything
    let mut rescue: Option<(f64, Vec<f64>)> = None;

    for i in 0..cfg.max_backtracks {
        let alpha = 1.0 + beta * cfg.rho.powi(i as i32);
        let candidate_powers: Vec<f64> = xbar_powers
            .iter()
            .zip(&direction)
            .map(|(b, d)| b + (alpha - 1.0) * d)
            .collect();

        if !floor_condition_holds(&candidate_powers, &xbar_powers, cfg.delta_floor) {
            continue;
        }

        let candidate: Vec<f64> = candidate_powers.iter().map(|p| p.powf(1.0 / m)).collect();
        // same evaluation route as f_current, so the sufficient-decrease
        // comparison is not polluted by a route-dependent rounding bias
        let v = scaled.tensor().contract_to_vector(&candidate)?;
        let phi = crate::tensor::dot(&v, &candidate);
        if !(phi > 0.0) {
            continue;
        }
        let f_candidate = -phi.ln();
        let mut directional = 0.0;
        for j in 0..candidate.len() {
            let y_new = candidate_powers[j].ln() / m;
            directional += (alpha * grad[j] + (alpha - 1.0) * m * x_powers[j]) * (y_new - y_current[j]);
        }
        if f_candidate <= f_current + cfg.sigma * directional {
            return Ok(LineSearchOutcome {
                alpha,
                point: normalize_to_feasible(&candidate, order)?,
                acceptance: Acceptance::SufficientDecrease,
            });
        }
        if rescue.is_none() {
            let res_candidate: f64 = candidate
                .iter()
                .zip(&v)
                .map(|(xi, vi)| (-vi + phi * xi.powi(order as i32 - 1)).powi(2))
                .sum::<f64>()
                .sqrt();
            if res_candidate <= RESCUE_RATIO * eval.res_norm {
                rescue = Some((alpha, candidate));
            }
        }
    }

    // Every candidate failed the decrease test. On an asymmetric tensor the
    // iterates can approach the eigenpair from above in lambda, where no
    // f-decrease exists to accept; if the unit step is also stalling, take
    // the recorded residual-reducing candidate instead.
    if let Some((alpha, candidate)) = rescue {
        let unit_point = power_like_step(scaled, x)?;
        let unit_eval = evaluate(scaled, &unit_point)?;
        if unit_eval.res_norm > STALL_RATIO * eval.res_norm {
            return Ok(LineSearchOutcome {
                alpha,
                point: normalize_to_feasible(&candidate, order)?,
                acceptance: Acceptance::ResidualRescue,
            });
        }
        return Ok(LineSearchOutcome {
            alpha: 1.0,
            point: unit_point,
            acceptance: Acceptance::UnitFallback,
        });
    }

    Ok(LineSearchOutcome {
        alpha: 1.0,
        point: power_like_step(scaled, x)?,
        acceptance: Acceptance::UnitFallback,
    })
}

/// The componentwise floor `x^{[m]}(alpha) >= delta_floor * xbar^{[m]}`.
pub fn floor_condition_holds(
    candidate_powers: &[f64],
    power_like_powers: &[f64],
    delta_floor: f64,
) -> bool {
    candidate_powers
        .iter()
        .zip(power_like_powers)
        .all(|(c, b)| *c >= delta_floor * b)
}

/// Re-evaluate both line-search conditions at a given stretch, for checking a
/// returned `alpha` after the fact. Returns `(floor, sufficient_decrease)`.
pub fn search_conditions(
    scaled: &ScaledTensor,
    x: &FeasiblePoint,
    alpha: f64,
    cfg: &SolverConfig,
) -> Result<(bool, bool), SolveError> {
    let order = x.order();
    let m = order as f64;
    let eval = evaluate(scaled, x)?;
    let xbar_powers = power_like_target(&eval, x);
    let x_powers: Vec<f64> = x.values().iter().map(|v| v.powi(order as i32)).collect();
    let candidate_powers: Vec<f64> = xbar_powers
        .iter()
        .zip(&x_powers)
        .map(|(b, p)| b + (alpha - 1.0) * (b - p))
        .collect();
    let floor = floor_condition_holds(&candidate_powers, &xbar_powers, cfg.delta_floor);
    if candidate_powers.iter().any(|&p| !(p > 0.0)) {
        return Ok((floor, false));
    }
    let candidate: Vec<f64> = candidate_powers.iter().map(|p| p.powf(1.0 / m)).collect();
    let v = scaled.tensor().contract_to_vector(&candidate)?;
    let phi = crate::tensor::dot(&v, &candidate);
    let f_candidate = -phi.ln();
    let f_current = -eval.lambda.ln();
    let mut directional = 0.0;
    for j in 0..candidate.len() {
        let y_new = candidate_powers[j].ln() / m;
        let y_old = x.values()[j].ln();
        directional +=
            (alpha * -(m * xbar_powers[j]) + (alpha - 1.0) * m * x_powers[j]) * (y_new - y_old);
    }
    Ok((floor, f_candidate <= f_current + cfg.sigma * directional))
}

/// Barzilai-Borwein stretch from one secant pair in `z = x^{[m]}` coordinates.
///
/// With `s = z_k - z_{k-1}`, `t = G(z_k) - G(z_{k-1})` and `D = diag(x_k)`:
///
/// ```text
/// beta_1 = lambda * (t' D s) / ||D t||^2 - 1
/// beta_2 = lambda * (t' s) / (t' D t)   - 1
/// ```
///
/// A vanishing denominator or a negative raw value maps to 0; large values
/// clamp to `beta_max`.
#[allow(clippy::too_many_arguments)]
pub fn bb_step(
    z_current: &[f64],
    z_previous: &[f64],
    g_current: &[f64],
    g_previous: &[f64],
    lambda: f64,
    x: &FeasiblePoint,
    variant: BbVariant,
    beta_max: f64,
) -> f64 {
    let s: Vec<f64> = z_current
        .iter()
        .zip(z_previous)
        .map(|(a, b)| a - b)
        .collect();
    let t: Vec<f64> = g_current
        .iter()
        .zip(g_previous)
        .map(|(a, b)| a - b)
        .collect();
    let d = x.values();

    let (numerator, denominator) = match variant {
        BbVariant::Bb1 => {
            let num: f64 = t.iter().zip(d).zip(&s).map(|((ti, di), si)| ti * di * si).sum();
            let den: f64 = t.iter().zip(d).map(|(ti, di)| (di * ti) * (di * ti)).sum();
            (num, den)
        }
        BbVariant::Bb2 => {
            let num: f64 = t.iter().zip(&s).map(|(ti, si)| ti * si).sum();
            let den: f64 = t.iter().zip(d).map(|(ti, di)| ti * ti * di).sum();
            (num, den)
        }
    };

    if denominator.abs() <= 1e-300 {
        return 0.0;
    }
    let raw = lambda * numerator / denominator - 1.0;
    if !raw.is_finite() || raw < 0.0 {
        0.0
    } else {
        raw.min(beta_max)
    }
}

/// Run the configured method on `tensor` from `x0`.
///
/// The tensor is scaled by its largest entry internally; both the scaled and
/// the recovered original eigenvalue are reported. Improved methods take the
/// first step with `beta = 0` (no secant pair yet).
pub fn solve(
    tensor: &DenseTensor,
    x0: &FeasiblePoint,
    cfg: &SolverConfig,
) -> Result<(EigenPair, IterationTrace), SolveError> {
    cfg.validate()?;
    if x0.dim() != tensor.dim() || x0.order() != tensor.order() {
        return Err(SolveError::StartMismatch {
            point_dim: x0.dim(),
            point_order: x0.order(),
            tensor_dim: tensor.dim(),
            tensor_order: tensor.order(),
        });
    }
    let scaled = tensor.scale_by_max()?;
    let order = tensor.order() as i32;

    let mut x = x0.clone();
    let mut eval = evaluate(&scaled, &x)?;

    let mut lambdas = vec![eval.lambda];
    let mut residuals = vec![eval.res_norm];
    let mut f_values = vec![-eval.lambda.ln()];
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut stagnated = false;
    let mut status = TerminalStatus::MaxIter;

    // secant memory for the BB formulas
    let mut previous: Option<(Vec<f64>, Vec<f64>)> = None;

    for _ in 0..cfg.max_iter {
        if eval.res_norm <= cfg.tol {
            status = TerminalStatus::Converged;
            break;
        }

        let next = match cfg.method {
            Method::PowerMethod => {
                alphas.push(1.0);
                power_method_step(&scaled, &x)?
            }
            Method::PowerLike => {
                alphas.push(1.0);
                power_like_step(&scaled, &x)?
            }
            Method::ImprovedBB1 | Method::ImprovedBB2 => {
                let variant = if cfg.method == Method::ImprovedBB1 {
                    BbVariant::Bb1
                } else {
                    BbVariant::Bb2
                };
                let z: Vec<f64> = x.values().iter().map(|v| v.powi(order)).collect();
                let beta = match &previous {
                    None => 0.0,
                    Some((z_prev, g_prev)) => bb_step(
                        &z,
                        z_prev,
                        &eval.residual,
                        g_prev,
                        eval.lambda,
                        &x,
                        variant,
                        cfg.beta_max,
                    ),
                };
                previous = Some((z, eval.residual.clone()));
                let outcome = line_search(&scaled, &x, beta, cfg)?;
                alphas.push(outcome.alpha);
                betas.push(beta);
                outcome.point
            }
        };

        let next_eval = evaluate(&scaled, &next)?;
        let same = next.values() == x.values();
        x = next;
        eval = next_eval;
        lambdas.push(eval.lambda);
        residuals.push(eval.res_norm);
        f_values.push(-eval.lambda.ln());

        if same && eval.res_norm > cfg.tol {
            stagnated = true;
            break;
        }
    }

    if eval.res_norm <= cfg.tol {
        status = TerminalStatus::Converged;
    }

    let pair = EigenPair {
        lambda_scaled: eval.lambda,
        lambda_original: scaled.scale() * eval.lambda,
        x,
        residual: eval.res_norm,
    };
    let trace = IterationTrace {
        method: cfg.method.code().to_string(),
        problem: String::new(),
        seed: 0,
        status,
        lambda_scaled: pair.lambda_scaled,
        lambda_original: pair.lambda_original,
        iterations: lambdas.len() - 1,
        residuals,
        lambdas,
        alphas,
        betas,
        f_values,
        stagnated,
    };
    Ok((pair, trace))
}

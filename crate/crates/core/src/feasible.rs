//! Strictly positive vectors with unit m-norm, the feasible set for the
//! eigenvalue iterations.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FeasibleError {
    #[error("component {index} is not strictly positive (value {value})")]
    NonPositive { index: usize, value: f64 },
    #[error("component {index} is not finite")]
    NonFinite { index: usize },
    #[error("vector is empty")]
    Empty,
    #[error("m-norm deviates from 1 by {deviation:e}, beyond tolerance 1e-12")]
    NotNormalized { deviation: f64 },
}

/// Tolerance on `sum x_i^m - 1` accepted at construction.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A strictly positive vector `x` with `sum_i x_i^m = 1` (within 1e-12).
#[derive(Debug, Clone, PartialEq)]
pub struct FeasiblePoint {
    values: Vec<f64>,
    order: usize,
}

impl FeasiblePoint {
    /// Validate positivity and the unit m-norm.
    pub fn new(values: Vec<f64>, order: usize) -> Result<Self, FeasibleError> {
        if values.is_empty() {
            return Err(FeasibleError::Empty);
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(FeasibleError::NonFinite { index });
            }
            if value <= 0.0 {
                return Err(FeasibleError::NonPositive { index, value });
            }
        }
        let deviation = (m_norm_power_sum(&values, order) - 1.0).abs();
        if deviation > UNIT_NORM_TOL {
            return Err(FeasibleError::NotNormalized { deviation });
        }
        Ok(Self { values, order })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Deviation of `sum x_i^m` from 1, for checks and tests.
    pub fn norm_defect(&self) -> f64 {
        (m_norm_power_sum(&self.values, self.order) - 1.0).abs()
    }
}

pub(crate) fn m_norm_power_sum(values: &[f64], order: usize) -> f64 {
    values.iter().map(|v| v.powi(order as i32)).sum()
}

/// Project a strictly positive vector onto the unit m-norm sphere:
/// `x / (sum x_i^m)^(1/m)`.
pub fn normalize_to_feasible(x: &[f64], order: usize) -> Result<FeasiblePoint, FeasibleError> {
    if x.is_empty() {
        return Err(FeasibleError::Empty);
    }
    for (index, &value) in x.iter().enumerate() {
        if !value.is_finite() {
            return Err(FeasibleError::NonFinite { index });
        }
        if value <= 0.0 {
            return Err(FeasibleError::NonPositive { index, value });
        }
    }
    let sum = m_norm_power_sum(x, order);
    let factor = sum.powf(1.0 / order as f64);
    let values: Vec<f64> = x.iter().map(|v| v / factor).collect();
    FeasiblePoint::new(values, order)
}

/// Random feasible start: i.i.d. uniform(0,1) components, each redrawn while
/// below 1e-8, then normalized in the m-norm.
pub fn random_feasible<R: Rng>(dim: usize, order: usize, rng: &mut R) -> FeasiblePoint {
    let mut raw = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut value: f64 = rng.gen();
        while value < 1e-8 {
            value = rng.gen();
        }
        raw.push(value);
    }
    normalize_to_feasible(&raw, order).expect("positive draw normalizes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn normalize_symmetric_pairs() {
        let p = normalize_to_feasible(&[1.0, 1.0], 4).unwrap();
        let expected = 2.0_f64.powf(-0.25);
        assert!((p.values()[0] - expected).abs() < 1e-15);
        assert!((p.values()[1] - expected).abs() < 1e-15);

        let q = normalize_to_feasible(&[1.0, 1.0, 1.0], 3).unwrap();
        let expected = 3.0_f64.powf(-1.0 / 3.0);
        for v in q.values() {
            assert!((v - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn normalize_two_one_cube() {
        let p = normalize_to_feasible(&[2.0, 1.0], 3).unwrap();
        let denom = 9.0_f64.powf(1.0 / 3.0);
        assert!((p.values()[0] - 2.0 / denom).abs() < 1e-15);
        assert!((p.values()[1] - 1.0 / denom).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_and_nonfinite() {
        assert!(matches!(
            normalize_to_feasible(&[1.0, 0.0], 3),
            Err(FeasibleError::NonPositive { .. })
        ));
        assert!(matches!(
            normalize_to_feasible(&[1.0, -2.0], 3),
            Err(FeasibleError::NonPositive { .. })
        ));
        assert!(matches!(
            normalize_to_feasible(&[1.0, f64::NAN], 3),
            Err(FeasibleError::NonFinite { .. })
        ));
    }

    #[test]
    fn new_rejects_unnormalized() {
        assert!(matches!(
            FeasiblePoint::new(vec![1.0, 1.0], 3),
            Err(FeasibleError::NotNormalized { .. })
        ));
    }

    #[test]
    fn random_feasible_is_deterministic_per_seed() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        let pa = random_feasible(5, 3, &mut a);
        let pb = random_feasible(5, 3, &mut b);
        assert_eq!(pa.values(), pb.values());
        assert!(pa.norm_defect() <= UNIT_NORM_TOL);
    }
}

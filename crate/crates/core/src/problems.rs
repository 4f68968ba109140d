//! Benchmark tensor generators.
//!
//! Six families are provided: four small fixed tensors with known scaled
//! spectral radii, a seeded random family `B + delta * I` with uniform `[0,1]`
//! entries, and a deterministic symmetric family built from sums of tangents.
//! Random entries come from ChaCha8 seeded with the caller's 64-bit seed, so
//! instances are reproducible across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::tensor::{DenseTensor, TensorError};

/// Largest number of dense entries a generator will allocate.
pub const DENSE_ENTRY_CAP: usize = 100_000_000;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("order {order}, dimension {dim} needs {required} dense entries, beyond the cap {cap}; reduce m or n")]
    CapExceeded {
        order: usize,
        dim: usize,
        required: u128,
        cap: usize,
    },
    #[error("delta must be nonnegative, got {0}")]
    NegativeDelta(f64),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("problem {0} requires parameters: {1}")]
    MissingParams(&'static str, &'static str),
}

fn check_cap(order: usize, dim: usize) -> Result<(), ProblemError> {
    let required = (dim as u128).pow(order as u32);
    if required > DENSE_ENTRY_CAP as u128 {
        return Err(ProblemError::CapExceeded {
            order,
            dim,
            required,
            cap: DENSE_ENTRY_CAP,
        });
    }
    Ok(())
}

/// Order 4, dimension 2, symmetric, ten nonzeros; scaled spectral radius
/// `1 + sqrt(3)`.
pub fn problem1() -> DenseTensor {
    let d = 4.0 / 3.0_f64.sqrt();
    let nonzeros = vec![
        (vec![1, 1, 1, 1], d),
        (vec![2, 2, 2, 2], d),
        (vec![1, 1, 1, 2], 1.0),
        (vec![1, 1, 2, 1], 1.0),
        (vec![1, 2, 1, 1], 1.0),
        (vec![2, 1, 1, 1], 1.0),
        (vec![1, 2, 2, 2], 1.0),
        (vec![2, 1, 2, 2], 1.0),
        (vec![2, 2, 1, 2], 1.0),
        (vec![2, 2, 2, 1], 1.0),
    ];
    DenseTensor::from_nonzeros(4, 2, &nonzeros).expect("static entries are valid")
}

/// Order 3, dimension 3, all 27 entries positive.
pub fn problem2() -> DenseTensor {
    let slices: [[[f64; 3]; 3]; 3] = [
        [[6.48, 8.35, 1.03], [4.04, 3.72, 1.43], [6.61, 6.41, 1.35]],
        [[9.02, 0.78, 6.90], [9.70, 4.79, 1.85], [2.09, 4.17, 2.98]],
        [[9.55, 1.57, 6.89], [5.63, 5.55, 1.45], [5.65, 8.29, 6.22]],
    ];
    let mut nonzeros = Vec::with_capacity(27);
    for (i, slice) in slices.iter().enumerate() {
        for (j, row) in slice.iter().enumerate() {
            for (k, &value) in row.iter().enumerate() {
                nonzeros.push((vec![i + 1, j + 1, k + 1], value));
            }
        }
    }
    DenseTensor::from_nonzeros(3, 3, &nonzeros).expect("static entries are valid")
}

/// Order 4, dimension 2, six nonzeros, not symmetric; largest entry 37.
pub fn problem3() -> DenseTensor {
    let nonzeros = vec![
        (vec![1, 1, 1, 2], 30.0),
        (vec![1, 2, 1, 2], 1.0),
        (vec![1, 2, 2, 2], 1.0),
        (vec![2, 1, 1, 1], 6.0),
        (vec![2, 1, 1, 2], 13.0),
        (vec![2, 1, 2, 2], 37.0),
    ];
    DenseTensor::from_nonzeros(4, 2, &nonzeros).expect("static entries are valid")
}

/// Order 3, dimension 3, four nonzeros, exactly as printed in its source.
///
/// The printed entry list is reducible (the index set {1, 3} splits it) and
/// its unique positive eigenvalue is the golden ratio `(1 + sqrt(5)) / 2`;
/// see [`problem4_variant`] for the irreducible sibling with eigenvalue
/// `sqrt(2)` that the published iteration counts correspond to.
pub fn problem4() -> DenseTensor {
    let nonzeros = vec![
        (vec![1, 1, 1], 1.0),
        (vec![1, 3, 3], 1.0),
        (vec![2, 1, 1], 1.0),
        (vec![3, 1, 1], 1.0),
    ];
    DenseTensor::from_nonzeros(3, 3, &nonzeros).expect("static entries are valid")
}

/// The `a_{122} = 1` variant of [`problem4`]: irreducible, positive
/// eigenvalue `sqrt(2)`.
pub fn problem4_variant() -> DenseTensor {
    let nonzeros = vec![
        (vec![1, 2, 2], 1.0),
        (vec![1, 3, 3], 1.0),
        (vec![2, 1, 1], 1.0),
        (vec![3, 1, 1], 1.0),
    ];
    DenseTensor::from_nonzeros(3, 3, &nonzeros).expect("static entries are valid")
}

/// Random family: entries of `B` i.i.d. uniform `[0,1]` from ChaCha8 seeded with
/// `seed`, plus `delta` added on the diagonal `(i, ..., i)`.
pub fn problem5(
    order: usize,
    dim: usize,
    delta: f64,
    seed: u64,
) -> Result<DenseTensor, ProblemError> {
    if delta < 0.0 {
        return Err(ProblemError::NegativeDelta(delta));
    }
    check_cap(order, dim)?;
    let mut tensor = DenseTensor::zeros(order, dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = tensor.entries_mut();
    for value in entries.iter_mut() {
        *value = rng.gen::<f64>();
    }
    // diagonal stride is n^{m-1} + ... + n + 1
    let mut stride = 0usize;
    let mut power = 1usize;
    for _ in 0..order {
        stride += power;
        power *= dim;
    }
    for i in 0..dim {
        entries[i * stride] += delta;
    }
    Ok(tensor)
}

/// Deterministic symmetric family `a_{i1..im} = |tan(i1) + ... + tan(im)|`
/// with 1-based indices in radians. Sums are accumulated over sorted indices
/// so permuted entries are bitwise identical.
pub fn problem6(order: usize, dim: usize) -> Result<DenseTensor, ProblemError> {
    check_cap(order, dim)?;
    let mut tensor = DenseTensor::zeros(order, dim)?;
    let tans: Vec<f64> = (1..=dim).map(|i| (i as f64).tan()).collect();
    let len = tensor.entries().len();
    let mut digits = vec![0usize; order];
    for flat in 0..len {
        let mut rest = flat;
        for k in (0..order).rev() {
            digits[k] = rest % dim;
            rest /= dim;
        }
        digits.sort_unstable();
        let sum: f64 = digits.iter().map(|&d| tans[d]).sum();
        tensor.entries_mut()[flat] = sum.abs();
    }
    Ok(tensor)
}

/// Which benchmark family a run draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ProblemId {
    P1,
    P2,
    P3,
    P4,
    P4Variant,
    P5,
    P6,
}

impl ProblemId {
    pub fn label(&self) -> &'static str {
        match self {
            ProblemId::P1 => "p1",
            ProblemId::P2 => "p2",
            ProblemId::P3 => "p3",
            ProblemId::P4 => "p4",
            ProblemId::P4Variant => "p4v",
            ProblemId::P5 => "p5",
            ProblemId::P6 => "p6",
        }
    }
}

/// A fully parameterized problem instance.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ProblemSpec {
    pub id: ProblemId,
    pub order: usize,
    pub dim: usize,
    /// Diagonal shift, used by the random family only.
    pub delta: Option<f64>,
    /// Generator seed, used by the random family only.
    pub seed: Option<u64>,
    /// Known scaled spectral radius, present for the four fixed problems.
    pub reference_lambda_scaled: Option<f64>,
}

impl ProblemSpec {
    pub fn p1() -> Self {
        Self {
            id: ProblemId::P1,
            order: 4,
            dim: 2,
            delta: None,
            seed: None,
            reference_lambda_scaled: Some(1.0 + 3.0_f64.sqrt()),
        }
    }

    pub fn p2() -> Self {
        Self {
            id: ProblemId::P2,
            order: 3,
            dim: 3,
            delta: None,
            seed: None,
            reference_lambda_scaled: Some(4.45951),
        }
    }

    pub fn p3() -> Self {
        Self {
            id: ProblemId::P3,
            order: 4,
            dim: 2,
            delta: None,
            seed: None,
            reference_lambda_scaled: Some(1.10824),
        }
    }

    /// The printed entry list; its positive eigenvalue is the golden ratio.
    pub fn p4() -> Self {
        Self {
            id: ProblemId::P4,
            order: 3,
            dim: 3,
            delta: None,
            seed: None,
            reference_lambda_scaled: Some((1.0 + 5.0_f64.sqrt()) / 2.0),
        }
    }

    pub fn p4_variant() -> Self {
        Self {
            id: ProblemId::P4Variant,
            order: 3,
            dim: 3,
            delta: None,
            seed: None,
            reference_lambda_scaled: Some(2.0_f64.sqrt()),
        }
    }

    pub fn p5(order: usize, dim: usize, delta: f64, seed: u64) -> Self {
        Self {
            id: ProblemId::P5,
            order,
            dim,
            delta: Some(delta),
            seed: Some(seed),
            reference_lambda_scaled: None,
        }
    }

    pub fn p6(order: usize, dim: usize) -> Self {
        Self {
            id: ProblemId::P6,
            order,
            dim,
            delta: None,
            seed: None,
            reference_lambda_scaled: None,
        }
    }

    /// Human-readable instance label, e.g. `p5(3,20,1e4)`.
    pub fn label(&self) -> String {
        match self.id {
            ProblemId::P5 => format!(
                "p5({},{},{:e})",
                self.order,
                self.dim,
                self.delta.unwrap_or(0.0)
            ),
            ProblemId::P6 => format!("p6({},{})", self.order, self.dim),
            _ => self.id.label().to_string(),
        }
    }

    /// Materialize the tensor for this instance.
    pub fn build(&self) -> Result<DenseTensor, ProblemError> {
        match self.id {
            ProblemId::P1 => Ok(problem1()),
            ProblemId::P2 => Ok(problem2()),
            ProblemId::P3 => Ok(problem3()),
            ProblemId::P4 => Ok(problem4()),
            ProblemId::P4Variant => Ok(problem4_variant()),
            ProblemId::P5 => {
                let delta = self
                    .delta
                    .ok_or(ProblemError::MissingParams("p5", "--delta"))?;
                let seed = self.seed.ok_or(ProblemError::MissingParams("p5", "--seed"))?;
                problem5(self.order, self.dim, delta, seed)
            }
            ProblemId::P6 => problem6(self.order, self.dim),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Irreducibility;

    #[test]
    fn problem1_entries_and_symmetry() {
        let t = problem1();
        assert_eq!(t.entry(&[1, 1, 1, 2]).unwrap(), 1.0);
        assert_eq!(t.entry(&[2, 1, 1, 1]).unwrap(), 1.0);
        assert_eq!(t.entries().iter().filter(|&&a| a != 0.0).count(), 10);
        assert!(t.is_symmetric());
    }

    #[test]
    fn problem2_slice_entries() {
        let t = problem2();
        assert_eq!(t.entry(&[1, 1, 2]).unwrap(), 8.35);
        assert_eq!(t.entry(&[3, 2, 1]).unwrap(), 5.63);
        assert!(t.entries().iter().all(|&a| a > 0.0));
        assert_eq!(t.scale_by_max().unwrap().scale(), 9.70);
        assert!(!t.is_symmetric());
    }

    #[test]
    fn problem3_is_asymmetric_with_six_nonzeros() {
        let t = problem3();
        assert_eq!(t.entry(&[1, 1, 1, 2]).unwrap(), 30.0);
        assert_eq!(t.entries().iter().filter(|&&a| a != 0.0).count(), 6);
        assert!(!t.is_symmetric());
        assert_eq!(t.is_irreducible(), Irreducibility::Irreducible);
    }

    #[test]
    fn fixed_problems_pass_exact_irreducibility() {
        assert_eq!(problem1().is_irreducible(), Irreducibility::Irreducible);
        assert_eq!(problem2().is_irreducible(), Irreducibility::Irreducible);
        assert_eq!(problem3().is_irreducible(), Irreducibility::Irreducible);
        assert_eq!(
            problem4_variant().is_irreducible(),
            Irreducibility::Irreducible
        );
    }

    #[test]
    fn problem5_is_reproducible_and_shifted() {
        let a = problem5(3, 4, 0.0, 42).unwrap();
        let b = problem5(3, 4, 0.0, 42).unwrap();
        assert_eq!(a.entries(), b.entries());
        let c = problem5(3, 4, 0.0, 43).unwrap();
        assert_ne!(a.entries(), c.entries());

        let shifted = problem5(3, 4, 100.0, 42).unwrap();
        let base = a.entry(&[1, 1, 1]).unwrap();
        assert_eq!(shifted.entry(&[1, 1, 1]).unwrap(), base + 100.0);
        assert_eq!(
            shifted.entry(&[2, 2, 2]).unwrap(),
            a.entry(&[2, 2, 2]).unwrap() + 100.0
        );
    }

    #[test]
    fn problem5_small_instances_are_irreducible() {
        for seed in 0..5 {
            let t = problem5(3, 8, 1.0, seed).unwrap();
            assert_eq!(t.is_irreducible(), Irreducibility::Irreducible);
        }
    }

    #[test]
    fn problem5_rejects_negative_delta_and_cap() {
        assert!(matches!(
            problem5(3, 4, -1.0, 0),
            Err(ProblemError::NegativeDelta(_))
        ));
        assert!(matches!(
            problem5(8, 100, 1.0, 0),
            Err(ProblemError::CapExceeded { .. })
        ));
    }

    #[test]
    fn problem6_entry_and_symmetry() {
        let t = problem6(3, 3).unwrap();
        let expected = 3.0 * 1.0_f64.tan();
        assert!((t.entry(&[1, 1, 1]).unwrap() - expected).abs() < 1e-12);
        assert_eq!(
            t.entry(&[1, 2, 3]).unwrap(),
            t.entry(&[3, 1, 2]).unwrap()
        );
        assert!(t.is_symmetric());
        assert_eq!(t.is_irreducible(), Irreducibility::Irreducible);
    }

    #[test]
    fn problem6_large_is_symmetric_on_sampled_tuples() {
        let t = problem6(3, 30).unwrap();
        // sampled permutation check on a deterministic grid of tuples
        for a in (1..=30).step_by(7) {
            for b in (1..=30).step_by(5) {
                for c in (1..=30).step_by(3) {
                    let reference = t.entry(&[a, b, c]).unwrap();
                    assert_eq!(t.entry(&[c, a, b]).unwrap(), reference);
                    assert_eq!(t.entry(&[b, c, a]).unwrap(), reference);
                }
            }
        }
    }

    #[test]
    fn spec_labels_and_build() {
        assert_eq!(ProblemSpec::p1().label(), "p1");
        assert_eq!(ProblemSpec::p5(3, 20, 1e4, 1).label(), "p5(3,20,1e4)");
        assert_eq!(ProblemSpec::p6(3, 100).label(), "p6(3,100)");
        assert_eq!(ProblemSpec::p4().build().unwrap(), problem4());
        let missing = ProblemSpec {
            delta: None,
            ..ProblemSpec::p5(3, 4, 1.0, 1)
        };
        assert!(matches!(
            missing.build(),
            Err(ProblemError::MissingParams(..))
        ));
    }
}

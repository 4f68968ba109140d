//! Dense tensor storage, multilinear contractions, scaling and irreducibility.
//!
//! A [`DenseTensor`] holds an order-`m` dimension-`n` array of nonnegative
//! values in row-major layout: the 1-based multi-index `(i1, ..., im)` maps to
//! the flat offset `sum (ik - 1) * n^(m-k)`, so the first index varies slowest.
//! Multi-indices are 1-based everywhere in the public API, matching the tensor
//! text format and the usual notation for tensor eigenproblems.

use thiserror::Error;

use crate::linalg::DMatrix;

/// Errors raised by tensor construction and contraction.
#[derive(Debug, Error)]
pub enum TensorError {
    #[error("tensor order must be at least 2, got {0}")]
    OrderTooSmall(usize),
    #[error("tensor dimension must be at least 1, got {0}")]
    DimTooSmall(usize),
    #[error("dense storage for order {order}, dimension {dim} would overflow")]
    SizeOverflow { order: usize, dim: usize },
    #[error("negative entry {value} at index {index:?}")]
    NegativeEntry { index: Vec<usize>, value: f64 },
    #[error("non-finite entry at index {index:?}")]
    NonFiniteEntry { index: Vec<usize> },
    #[error("index {index:?} out of range for dimension {dim}")]
    IndexOutOfRange { index: Vec<usize>, dim: usize },
    #[error("duplicate index tuple {index:?}")]
    DuplicateIndex { index: Vec<usize> },
    #[error("vector length {got} does not match tensor dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("tensor has no positive entry")]
    AllZero,
}

/// Order-`m`, dimension-`n` real tensor with nonnegative entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    order: usize,
    dim: usize,
    entries: Vec<f64>,
}

/// Outcome of the irreducibility test.
///
/// `Reducible` carries a witness index set `I` (1-based): every entry with
/// first index in `I` and all remaining indices outside `I` is zero.
/// `Unknown` is only produced in heuristic mode (`n > 16`) when the tensor can
/// be neither certified irreducible nor split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Irreducibility {
    Irreducible,
    Reducible(Vec<usize>),
    Unknown,
}

/// Largest subset size for which reducibility is decided by exact enumeration.
pub const EXACT_IRREDUCIBILITY_DIM: usize = 16;

fn checked_len(order: usize, dim: usize) -> Result<usize, TensorError> {
    let mut len: usize = 1;
    for _ in 0..order {
        len = len
            .checked_mul(dim)
            .ok_or(TensorError::SizeOverflow { order, dim })?;
    }
    Ok(len)
}

impl DenseTensor {
    /// All-zero tensor of the given order and dimension.
    pub fn zeros(order: usize, dim: usize) -> Result<Self, TensorError> {
        if order < 2 {
            return Err(TensorError::OrderTooSmall(order));
        }
        if dim < 1 {
            return Err(TensorError::DimTooSmall(dim));
        }
        let len = checked_len(order, dim)?;
        Ok(Self {
            order,
            dim,
            entries: vec![0.0; len],
        })
    }

    /// Build a tensor from a list of `(multi-index, value)` nonzeros.
    ///
    /// Indices are 1-based. Values must be nonnegative and finite; listing the
    /// same index tuple twice is an error even with equal values.
    pub fn from_nonzeros(
        order: usize,
        dim: usize,
        nonzeros: &[(Vec<usize>, f64)],
    ) -> Result<Self, TensorError> {
        let mut tensor = Self::zeros(order, dim)?;
        let mut seen = vec![false; tensor.entries.len()];
        for (index, value) in nonzeros {
            let flat = tensor.flat_index(index)?;
            if !value.is_finite() {
                return Err(TensorError::NonFiniteEntry {
                    index: index.clone(),
                });
            }
            if *value < 0.0 {
                return Err(TensorError::NegativeEntry {
                    index: index.clone(),
                    value: *value,
                });
            }
            if seen[flat] {
                return Err(TensorError::DuplicateIndex {
                    index: index.clone(),
                });
            }
            seen[flat] = true;
            tensor.entries[flat] = *value;
        }
        Ok(tensor)
    }

    /// Identity tensor: 1 at `(i, i, ..., i)` for each `i`, 0 elsewhere.
    ///
    /// Satisfies `I x^{m-1} = x^{[m-1]}` for every `x`.
    pub fn identity(order: usize, dim: usize) -> Result<Self, TensorError> {
        let mut tensor = Self::zeros(order, dim)?;
        let mut stride: usize = 0;
        // flat offset of (i,...,i) advances by n^{m-1} + ... + n + 1 per step
        let mut power = 1;
        for _ in 0..order {
            stride += power;
            power *= dim;
        }
        for i in 0..dim {
            tensor.entries[i * stride] = 1.0;
        }
        Ok(tensor)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Mutable entry access for in-crate generators, which are responsible
    /// for keeping every value nonnegative.
    pub(crate) fn entries_mut(&mut self) -> &mut [f64] {
        &mut self.entries
    }

    /// Entry at a 1-based multi-index.
    pub fn entry(&self, index: &[usize]) -> Result<f64, TensorError> {
        Ok(self.entries[self.flat_index(index)?])
    }

    fn flat_index(&self, index: &[usize]) -> Result<usize, TensorError> {
        if index.len() != self.order {
            return Err(TensorError::IndexOutOfRange {
                index: index.to_vec(),
                dim: self.dim,
            });
        }
        let mut flat = 0;
        for &i in index {
            if i < 1 || i > self.dim {
                return Err(TensorError::IndexOutOfRange {
                    index: index.to_vec(),
                    dim: self.dim,
                });
            }
            flat = flat * self.dim + (i - 1);
        }
        Ok(flat)
    }

    /// Decompose a flat offset into 1-based digits, first index slowest.
    fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut digits = vec![0usize; self.order];
        for k in (0..self.order).rev() {
            digits[k] = flat % self.dim + 1;
            flat /= self.dim;
        }
        digits
    }

    /// Largest entry of the tensor.
    pub fn max_entry(&self) -> f64 {
        self.entries.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
    }

    /// The vector contraction `(A x^{m-1})_i = sum a_{i,i2..im} x_{i2}...x_{im}`.
    pub fn contract_to_vector(&self, x: &[f64]) -> Result<Vec<f64>, TensorError> {
        self.check_vector(x)?;
        let weights = kron_weights(x, self.order - 1);
        let block = weights.len();
        let out = (0..self.dim)
            .map(|i| dot(&self.entries[i * block..(i + 1) * block], &weights))
            .collect();
        Ok(out)
    }

    /// The scalar contraction `A x^m = sum a_{i1..im} x_{i1}...x_{im}`.
    ///
    /// Computed by a full weighted sum over all entries, so it provides an
    /// independent cross-check of `<x, A x^{m-1}>`.
    pub fn contract_to_scalar(&self, x: &[f64]) -> Result<f64, TensorError> {
        self.check_vector(x)?;
        let weights = kron_weights(x, self.order);
        Ok(dot(&self.entries, &weights))
    }

    /// The matrix contraction `(A x^{m-2})_{ij} = sum a_{i,j,i3..im} x_{i3}...x_{im}`.
    ///
    /// For `m = 2` this returns the tensor itself as a matrix.
    pub fn contract_to_matrix(&self, x: &[f64]) -> Result<DMatrix, TensorError> {
        self.check_vector(x)?;
        let weights = kron_weights(x, self.order - 2);
        let block = weights.len();
        let n = self.dim;
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let start = (i * n + j) * block;
                out.set(i, j, dot(&self.entries[start..start + block], &weights));
            }
        }
        Ok(out)
    }

    fn check_vector(&self, x: &[f64]) -> Result<(), TensorError> {
        if x.len() != self.dim {
            return Err(TensorError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Divide by the largest entry so the maximum of the result is exactly 1.
    pub fn scale_by_max(&self) -> Result<ScaledTensor, TensorError> {
        let scale = self.max_entry();
        if !(scale > 0.0) {
            return Err(TensorError::AllZero);
        }
        let entries = self.entries.iter().map(|&a| a / scale).collect();
        Ok(ScaledTensor {
            tensor: DenseTensor {
                order: self.order,
                dim: self.dim,
                entries,
            },
            scale,
        })
    }

    /// True when the entries are invariant under every permutation of indices.
    pub fn is_symmetric(&self) -> bool {
        let mut digits;
        for flat in 0..self.entries.len() {
            digits = self.multi_index(flat);
            digits.sort_unstable();
            let canonical = self
                .flat_index(&digits)
                .expect("canonical index in range");
            if self.entries[flat] != self.entries[canonical] {
                return false;
            }
        }
        true
    }

    /// Symmetrization: each entry becomes the mean of the entries over all
    /// permutations of its multi-index. Leaves `A x^m` unchanged for every `x`.
    pub fn symmetrized(&self) -> DenseTensor {
        let mut out = vec![0.0; self.entries.len()];
        let mut sums: Vec<(f64, usize)> = vec![(0.0, 0); self.entries.len()];
        // accumulate per canonical (sorted) index class, then broadcast
        for flat in 0..self.entries.len() {
            let mut digits = self.multi_index(flat);
            digits.sort_unstable();
            let canonical = self.flat_index(&digits).expect("canonical index in range");
            sums[canonical].0 += self.entries[flat];
            sums[canonical].1 += 1;
        }
        for flat in 0..self.entries.len() {
            let mut digits = self.multi_index(flat);
            digits.sort_unstable();
            let canonical = self.flat_index(&digits).expect("canonical index in range");
            let (total, count) = sums[canonical];
            out[flat] = total / count as f64;
        }
        DenseTensor {
            order: self.order,
            dim: self.dim,
            entries: out,
        }
    }

    /// Decide reducibility per the index-set definition.
    ///
    /// For `n <= 16` the answer is exact: all proper nonempty subsets `I` are
    /// enumerated and the first witness (in ascending bitmask order) is
    /// returned. For larger `n` the test is partial: a zero slice or a
    /// non-strongly-connected representation digraph yields an exact
    /// `Reducible` witness, an everywhere-positive "diagonal tail" pattern
    /// (`a_{i,j,...,j} > 0` for all `j != i`) certifies `Irreducible`, and
    /// anything else is reported as `Unknown`.
    pub fn is_irreducible(&self) -> Irreducibility {
        let n = self.dim;
        if n == 1 {
            // no proper nonempty subset exists
            return Irreducibility::Irreducible;
        }

        // Zero slice i is always a witness {i}.
        if let Some(i) = self.zero_slice() {
            return Irreducibility::Reducible(vec![i + 1]);
        }

        if n <= EXACT_IRREDUCIBILITY_DIM {
            return self.irreducible_exact();
        }

        // A reachable set that is not all of [n] is closed, hence a witness.
        let adjacency = self.representation_digraph();
        for start in 0..n {
            let reach = reachable_from(&adjacency, start);
            if reach.iter().filter(|&&r| r).count() < n {
                let witness = (0..n).filter(|&j| reach[j]).map(|j| j + 1).collect();
                return Irreducibility::Reducible(witness);
            }
        }

        if self.diagonal_tails_positive() {
            return Irreducibility::Irreducible;
        }
        Irreducibility::Unknown
    }

    /// First slice `i` (0-based) whose entries are all zero, if any.
    fn zero_slice(&self) -> Option<usize> {
        let block = self.entries.len() / self.dim;
        (0..self.dim).find(|&i| {
            self.entries[i * block..(i + 1) * block]
                .iter()
                .all(|&a| a == 0.0)
        })
    }

    /// `a_{i,j,j,...,j} > 0` for every `i` and every `j != i`. Any reducing set
    /// containing `i` would have to contain all such `j`, so this certifies
    /// irreducibility.
    fn diagonal_tails_positive(&self) -> bool {
        let n = self.dim;
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                let mut index = vec![j; self.order];
                index[0] = i;
                let value = self.entry(&index).expect("index in range");
                if value <= 0.0 {
                    return false;
                }
            }
        }
        true
    }

    /// Edge `i -> j` when some nonzero entry with first index `i` carries `j`
    /// among its remaining indices.
    fn representation_digraph(&self) -> Vec<Vec<bool>> {
        let n = self.dim;
        let mut adjacency = vec![vec![false; n]; n];
        for flat in 0..self.entries.len() {
            if self.entries[flat] == 0.0 {
                continue;
            }
            let digits = self.multi_index(flat);
            let head = digits[0] - 1;
            for &d in &digits[1..] {
                adjacency[head][d - 1] = true;
            }
        }
        adjacency
    }

    fn irreducible_exact(&self) -> Irreducibility {
        let n = self.dim;
        // Distinct (head, tail-support) pairs; sorted so small supports are
        // scanned first, which makes the common rejection path cheap.
        let mut tails: Vec<Vec<u32>> = vec![Vec::new(); n];
        for flat in 0..self.entries.len() {
            if self.entries[flat] == 0.0 {
                continue;
            }
            let digits = self.multi_index(flat);
            let head = digits[0] - 1;
            let mut mask: u32 = 0;
            for &d in &digits[1..] {
                mask |= 1 << (d - 1);
            }
            tails[head].push(mask);
        }
        for list in tails.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }

        let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
        'subset: for set in 1..full {
            // `set` is a proper nonempty subset; it is a witness when every
            // nonzero with head in `set` has tail support intersecting `set`.
            for head in 0..n {
                if set & (1 << head) == 0 {
                    continue;
                }
                for &mask in &tails[head] {
                    if mask & set == 0 {
                        continue 'subset;
                    }
                }
            }
            let witness = (0..n).filter(|&j| set & (1 << j) != 0).map(|j| j + 1).collect();
            return Irreducibility::Reducible(witness);
        }
        Irreducibility::Irreducible
    }
}

/// Tensor divided by its largest entry `a`, remembering `a` so eigenvalues of
/// the original are recovered as `lambda = a * lambda_scaled`.
#[derive(Debug, Clone)]
pub struct ScaledTensor {
    tensor: DenseTensor,
    scale: f64,
}

impl ScaledTensor {
    pub fn tensor(&self) -> &DenseTensor {
        &self.tensor
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Treat an already-scaled (or unscaled) tensor as its own scaled form.
    pub fn pre_scaled(tensor: DenseTensor) -> Self {
        Self { tensor, scale: 1.0 }
    }
}

/// Kronecker-power weight vector: position `(j1,...,jk)` (row-major, `j1`
/// slowest) holds `x[j1] * ... * x[jk]`. The empty product for `k = 0` is 1.
fn kron_weights(x: &[f64], k: usize) -> Vec<f64> {
    let mut weights = vec![1.0];
    for _ in 0..k {
        let mut next = Vec::with_capacity(weights.len() * x.len());
        for &w in &weights {
            for &xi in x {
                next.push(w * xi);
            }
        }
        weights = next;
    }
    weights
}

/// Pairwise-split dot product. The recursive splitting keeps the rounding
/// error near `eps * log(n)` instead of `eps * n`, which matters when line
/// searches compare objective values whose difference is close to machine
/// precision.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= 64 {
        return a.iter().zip(b).map(|(x, y)| x * y).sum();
    }
    let mid = a.len() / 2;
    dot(&a[..mid], &b[..mid]) + dot(&a[mid..], &b[mid..])
}

fn reachable_from(adjacency: &[Vec<bool>], start: usize) -> Vec<bool> {
    let n = adjacency.len();
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for v in 0..n {
            if adjacency[u][v] && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

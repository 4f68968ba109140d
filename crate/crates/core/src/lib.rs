// index-based loops mirror the written formulas throughout; negated
// comparisons like `!(x > 0.0)` are deliberate NaN guards
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

//! Spectral radius and positive H-eigenvectors of nonnegative irreducible tensors.
//!
//! An order-`m` dimension-`n` tensor `A` has an H-eigenpair `(lambda, x)` when
//! `A x^{m-1} = lambda x^{[m-1]}` with `x` normalized in the m-norm, where
//! `x^{[p]}` is the componentwise power. For nonnegative irreducible tensors the
//! spectral radius is the unique positive eigenvalue with a positive eigenvector,
//! and this crate computes it three ways:
//!
//! * a baseline higher-order power method,
//! * a power-like fixed-point iteration with monotonically increasing eigenvalue
//!   estimates, derived from linearizing a concave log-reformulation,
//! * the power-like iteration accelerated by a backtracking line search whose
//!   trial step lengths come from two Barzilai-Borwein secant formulas.
//!
//! The [`problems`] module builds the benchmark tensors used by the test suite,
//! [`diagnostics`] verifies second-order optimality structure at converged pairs,
//! and [`bench`](crate::bench) runs multi-restart comparisons and renders report tables.

pub mod bench;
pub mod diagnostics;
pub mod feasible;
pub mod io;
pub mod linalg;
pub mod problems;
pub mod solver;
pub mod tensor;

pub use feasible::{normalize_to_feasible, FeasiblePoint};
pub use solver::{solve, EigenPair, IterationTrace, Method, SolverConfig, TerminalStatus};
pub use tensor::{DenseTensor, Irreducibility, ScaledTensor};

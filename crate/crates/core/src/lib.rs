//! Reversed relevation transforms and the iterated sequence of weighted
//! distributions they generate.
//!
//! Starting from a lifetime `X_1` with cdf `F`, `X_{n+1}` has the law of
//! `X_n` restricted to `(0, y]`, with `y` drawn from an independent copy of
//! `X_n`: the reversed relevation of `F_n` by itself. Writing
//! `T_n = -ln F_n`, every member is obtained from the scalar recursion
//! `T_{n+1} = T_n - ln(1 + T_n)`, which the [`sequence`] module evaluates
//! pointwise. The remaining modules cover the two-variable transforms,
//! cumulative entropies, the Dickson-Hipp operator and its dual, grid checks
//! of stochastic orders, and a Monte Carlo oracle.

// `!(x > 0.0)` style tests are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod entropy;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod operator;
pub mod orders;
pub mod sequence;
pub mod transforms;

pub use distributions::{make_distribution, Distribution, Family, FamilySpec, Support};
pub use error::{Error, Result};
pub use numerics::{QuadratureResult, Tolerance};
pub use sequence::IteratedSequence;

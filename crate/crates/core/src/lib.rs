//! Signed sums over products of distinct odd primes, the Dirichlet eta
//! function, and diagnostics for exchanging the two limits of the double
//! sums `C(n, h)` and `S(n, h)`.
//!
//! Module map:
//!
//! * [`qset`]: primes, the set `Q`, orderings, `f(k, h)` and `f(k)`.
//! * [`series`]: eta evaluation, the zeta bridge, the geometric closed form.
//! * [`limits`]: the double-sum surfaces and both iterated limits.
//! * [`zeros`]: critical-line zero ordinates.
//! * [`search`]: annealing over orderings of a finite prefix of `Q`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod format;
pub mod limits;
pub mod qset;
pub mod search;
pub mod series;
pub mod sum;
pub mod zeros;

pub use limits::{LimitReport, SumSurface};
pub use qset::{OddSquarefree, OrderedQ, OrderingStrategy, QOrdering};
pub use series::{ComplexVal, SeriesMethod, SeriesResult, StripPoint};
pub use zeros::{ZeroRecord, ZeroSource};

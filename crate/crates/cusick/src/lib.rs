//! Exact carry statistics for the binary sum-of-digits function.
//!
//! Let `s(n)` denote the number of ones in the binary expansion of `n`.
//! For a fixed shift `t`, the differences `s(n + t) - s(n)` equilibrate:
//! each value `j` is attained on a set of natural numbers having an exact
//! asymptotic density `δ(j, t)`, and these densities are dyadic rationals
//! satisfying the coupled recurrence
//!
//! ```text
//! δ(j, 2t)     = δ(j, t)
//! δ(j, 2t + 1) = ½ δ(j - 1, t)  +  ½ δ(j + 1, t + 1)
//! ```
//!
//! Cusick's conjecture asserts that `c_t = Σ_{j ≥ 0} δ(j, t)` — the density
//! of `n` with `s(n + t) ≥ s(n)` — always exceeds `1/2`. This crate computes
//! everything around that statement exactly:
//!
//! * [`dyadic`] — arithmetic in the ring of dyadic rationals `num / 2^exp`.
//! * [`carrydist`] — the distributions `δ(·, t)` (finite support plus an
//!   exactly geometric tail), `c_t`, raw moments, block counts.
//! * [`oracle`] — an independent brute-force evaluation of `δ(j, t)` and
//!   `c_t` by enumeration, used to cross-check the recurrence engine.
//! * [`series`] — truncated power series and 2×2 series matrices over
//!   exact rationals.
//! * [`moments`] — moment generating series `F_t, G_t`, closed-form block
//!   matrix powers, Fubini coefficients, and the exact second moment.
//! * [`bounds`] — the growth-constants ledger, moment-bound verification,
//!   and effective block-count thresholds `L(ε)` with self-verifying
//!   certificates.
//! * [`charfn`] — characteristic functions `γ_t(ϑ)`, decay bounds, and the
//!   cotangent-kernel integral representation of `c_t`.
//! * [`scanner`] — a parallel exhaustive minimum scan of `c_t` over
//!   `t < 2^B`, in exact or floating (error-tracked) arithmetic, with
//!   checkpointing.
//! * [`cli`] — the `cusick` command-line interface.
//!
//! The arithmetic backbone is exact everywhere: a reported density or
//! minimum is a mathematical statement, not an approximation. Floating
//! point appears only where explicitly labelled (quadrature, the float
//! scan mode) and always next to a rigorously tracked error bound.

pub mod bounds;
pub mod carrydist;
pub mod charfn;
pub mod cli;
pub mod dyadic;
pub mod moments;
pub mod oracle;
pub mod scanner;
pub mod series;

mod error;

pub use carrydist::{blocks_count, reverse_binary, CarryDistribution, DistPair};
pub use dyadic::Dyadic;
pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

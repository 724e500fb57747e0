//! Exact Morava-Euler characteristic sequences of pi-finite p-spaces and
//! finite groups, their l-adic continuity, and the extrapolation to `n = -1`
//! that recovers homotopy cardinality.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: exact rationals, binomials, Gaussian binomials, valuations,
//!   binomial transforms.
//! * [`expoly`]: closed forms `sum c_i p^(f_i(n))`.
//! * [`groups`]: finite groups as multiplication tables, commuting-tuple
//!   counts, abelian-subgroup Moebius coefficients.
//! * [`spaces`]: symbolic spaces, their chi-sequences and cardinalities.
//! * [`mahler`]: continuity certificates and partial-sum extrapolation.
//! * [`series`]: truncated power series for the symmetric groups.
//! * [`resolutions`]: skeleton cardinalities of simplicial resolutions.
//! * [`acceptance`]: the end-to-end checks run by `homcard verify-all` and by
//!   the `acceptance` test target.

pub mod acceptance;
pub mod arith;
pub mod error;
pub mod expoly;
pub mod groups;
pub mod mahler;
pub mod oracle;
pub mod par;
pub mod resolutions;
pub mod series;
pub mod spaces;

pub use arith::{Rational, Valuation};
pub use error::{Error, Result};
pub use expoly::{ExpoPoly, IntValuedPoly};
pub use groups::{Budget, FiniteGroup, Subgroup};
pub use par::ExecMode;
pub use spaces::{Evaluator, SpaceExpr};

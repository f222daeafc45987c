//! Exact arithmetic for multizeta values over F_q[t].
//!
//! The crate builds, layer by layer, everything needed to compute and relate
//! power sums and multizeta values of the rational function field:
//!
//! * [`field`] — the coefficient fields F_q, q = p^m, m <= 4;
//! * [`polyring`] — dense polynomials over F_q in the variable t, plus the
//!   bracket polynomials [n] = t^(q^n) - t and their products;
//! * [`laurent`] — truncated Laurent series in u = 1/t (the completion at the
//!   infinite place) with explicit precision tracking, and continued-fraction
//!   rationality detection;
//! * [`powersum`] — the degree-d power sums S_d(k) and S_{<d}(k), their
//!   iterated (multizeta) refinements, closed bracket forms, and an
//!   independent brute-force evaluator;
//! * [`multizeta`] — zeta values as truncated series, with a precision policy;
//! * [`relations`] — two-term relations between depth-two zeta values:
//!   predicted families, numeric verification, search, classification, and a
//!   linear-algebra closure engine over the log-Frobenius lattice.
//!
//! Everything is exact: coefficients live in F_q, precision is tracked as an
//! absolute truncation index, and equality assertions compare coefficients,
//! never floats.

pub mod error;
pub mod field;
pub mod polyring;
pub mod laurent;
pub mod powersum;
pub mod multizeta;
pub mod relations;

pub use error::{Error, Result};

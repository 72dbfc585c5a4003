//! Decide whether a genus-`g` curve over a finite field `F_q` can have
//! exactly `N` rational points.
//!
//! The library works with *real Weil polynomials*: monic integer
//! polynomials of degree `g` whose roots are real numbers in the interval
//! `[-2*sqrt(q), 2*sqrt(q)]`.  Every curve of genus `g` over `F_q` has an
//! associated real Weil polynomial, and the number of rational points of
//! the curve is determined by its coefficients.  The main entry points
//! are:
//!
//! * [`eliminate::analyze`] — enumerate every real Weil polynomial
//!   consistent with the given `(q, g, N)` and try to rule each of them
//!   out with exact arithmetic arguments (isogeny-class constraints,
//!   resultant arguments, quotient-curve point counts, …).
//! * [`eliminate::general_bound`] — compute an upper bound on the number
//!   of points of a genus-`g` curve over `F_q` by repeatedly running the
//!   analysis at decreasing point counts.
//! * [`ffsearch`] — exhaustive searches for curves with many points in
//!   specific function-field families, used to certify that certain point
//!   counts are not attained.
//! * [`hermitian`] — reduction of binary Hermitian forms over a quartic
//!   CM field, with a full unimodular transformation certificate.
//!
//! All number theory in this crate is exact: big integers, big rationals,
//! Sturm chains and Newton polygons.  No floating point is used anywhere
//! in a decision path.

pub mod error;
pub mod exact;
pub mod weil;
pub mod smallfield;
pub mod isogeny;
pub mod enumerate;
pub mod eliminate;
pub mod verify;
pub mod ffsearch;
pub mod hermitian;

pub use error::{Error, Result};
pub use weil::FieldParams;

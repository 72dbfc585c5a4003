//! Exact arithmetic primitives: integer polynomials, Sturm chains and
//! Newton polygons.
//!
//! Everything in this module is exact.  Root locations are never
//! approximated; questions about them ("are all roots real?", "is any
//! root larger than 4q?") are answered by sign-variation counts on
//! Sturm chains evaluated at exact rational points.

pub mod fastchain;
pub mod intpoly;
pub mod newton;
pub mod sturm;
pub mod util;

pub use intpoly::IntPoly;
pub use newton::{newton_polygon, polygon_segments, Segment};
pub use sturm::{
    count_real_roots, count_roots_above, count_roots_in, is_totally_real, is_totally_real_coeffs,
    roots_admissible, roots_admissible_coeffs,
};

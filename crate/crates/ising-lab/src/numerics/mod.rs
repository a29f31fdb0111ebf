//! Precision-parameterized complex arithmetic, exact Gaussian-rational
//! polynomials, Taylor machinery, and root finding.

pub mod cplx;
pub mod gauss;
pub mod poly;
pub mod precision;
pub mod roots;

pub use cplx::{float_decimal, Cplx, InfCplx};
pub use gauss::{parse_gauss_rat, GaussRat};
pub use poly::{parse_cplx_literal, CPoly, Poly, RatPoly};
pub use precision::PrecisionContext;
pub use roots::poly_roots;

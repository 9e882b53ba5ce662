//! Exact arithmetic: rationals, number fields, dense polynomials, rational
//! functions, linear algebra and the classical polynomial subroutines.

pub mod factor;
pub mod field;
pub mod linalg;
pub mod numfield;
pub mod poly;
pub mod ratfunc;

pub use field::{Field, Rational, Q};
pub use numfield::{AlgNumber, Consts, NumberField};
pub use poly::Poly;
pub use ratfunc::RatFunc;

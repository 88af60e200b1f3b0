//! Quasi-F-split heights of hypersurfaces and complete intersections over `F_p`.
//!
//! The crate provides exact sparse polynomial arithmetic, length-two Witt vectors,
//! the Frobenius `p`-basis maps `u` and `θ`, a Buchberger engine for ideals and
//! free modules, and the height criteria built on top of them.

pub mod criteria;
pub mod error;
pub mod field;
pub mod frobenius;
pub mod grading;
pub mod groebner;
pub mod monomial;
pub mod parse;
pub mod poly;
pub mod rdp;
pub mod strata;
pub mod witt;

pub use criteria::{height, Certificate, HeightOptions, HeightResult, Verdict};
pub use error::{Error, Result};
pub use field::PrimeField;
pub use grading::{check_homogeneous, Grading};
pub use groebner::Ideal;
pub use monomial::{Monomial, MonomialOrder};
pub use parse::{parse_polynomial, serialize};
pub use poly::{Polynomial, Ring, RingRef};

//! Amoebas of complex hypersurfaces, their complement components, and
//! Laurent expansions of algebraic functions on those components.

pub mod amoeba;
pub mod lattice;
pub mod laurent;
pub mod monodromy;
pub mod pipeline;
pub mod polyhedra;
pub mod puiseux;
pub mod roots;

use num_complex::Complex;
use num_rational::BigRational;

pub use laurent::LaurentPolynomial;

/// Polynomials with exact rational coefficients.
pub type RationalPolynomial = LaurentPolynomial<BigRational>;
/// Polynomials with exact Gaussian-rational coefficients.
pub type GaussianPolynomial = LaurentPolynomial<Complex<BigRational>>;
/// Polynomials with double-precision complex coefficients.
pub type ComplexPolynomial = LaurentPolynomial<Complex<f64>>;

//! Sparse Laurent polynomials over a generic coefficient ring.
//!
//! The coefficient type is a type parameter; the crate root provides
//! aliases for the three domains used in practice (exact rationals, exact
//! Gaussian rationals and double-precision complex floats).

mod json;
mod parse;
mod resultant;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, One, ToPrimitive, Zero};
use thiserror::Error;

use crate::lattice::LatticeVector;
use crate::polyhedra::{LatticePolytope, PolyhedraError};

pub use json::PolynomialJson;
pub use parse::{infer_variables, parse_polynomial, ParseError};
pub use resultant::{determinant, discriminant_y, sylvester_matrix};

/// Ring operations required of polynomial coefficients.
pub trait Coefficient:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Coefficient for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// Coefficients that embed into the complex numbers over a float type.
pub trait ComplexEmbedding {
    fn embed<F: Float>(&self) -> Complex<F>;
}

fn float_from<F: Float>(x: f64) -> F {
    F::from(x).expect("float conversion")
}

impl ComplexEmbedding for BigRational {
    fn embed<F: Float>(&self) -> Complex<F> {
        Complex::new(float_from(self.to_f64().unwrap_or(f64::NAN)), F::zero())
    }
}

impl ComplexEmbedding for Complex<BigRational> {
    fn embed<F: Float>(&self) -> Complex<F> {
        Complex::new(
            float_from(self.re.to_f64().unwrap_or(f64::NAN)),
            float_from(self.im.to_f64().unwrap_or(f64::NAN)),
        )
    }
}

impl ComplexEmbedding for f64 {
    fn embed<F: Float>(&self) -> Complex<F> {
        Complex::new(float_from(*self), F::zero())
    }
}

impl ComplexEmbedding for Complex<f64> {
    fn embed<F: Float>(&self) -> Complex<F> {
        Complex::new(float_from(self.re), float_from(self.im))
    }
}

impl ComplexEmbedding for Complex<f32> {
    fn embed<F: Float>(&self) -> Complex<F> {
        Complex::new(float_from(self.re as f64), float_from(self.im as f64))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaurentError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("expected {expected} variables, found {found}")]
    VariableCount { expected: usize, found: usize },
    #[error("coordinate {index} is zero but the polynomial has negative exponents there")]
    ZeroCoordinate { index: usize },
    #[error("polynomial is constant in the eliminated variable")]
    ConstantInVariable,
    #[error("negative exponent in the eliminated variable")]
    NegativeExponent,
    #[error("monomial map matrix must be square with nonzero determinant")]
    SingularMap,
    #[error("ramification index must be positive")]
    ZeroRamification,
    #[error(transparent)]
    Polyhedra(#[from] PolyhedraError),
}

pub type Result<T> = std::result::Result<T, LaurentError>;

/// A finite sum of monomials `c_alpha z^alpha`, `alpha` in `Z^N`.
#[derive(Clone, PartialEq)]
pub struct LaurentPolynomial<T> {
    nvars: usize,
    terms: BTreeMap<LatticeVector, T>,
}

impl<T: Coefficient> LaurentPolynomial<T> {
    pub fn zero(nvars: usize) -> Self {
        LaurentPolynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        Self::monomial(LatticeVector::zero(nvars), c)
    }

    pub fn monomial(exponent: LatticeVector, c: T) -> Self {
        let mut p = Self::zero(exponent.dim());
        p.add_term(exponent, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (LatticeVector, T)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.dim(), nvars, "exponent dimension");
            p.add_term(e, c);
        }
        p
    }

    /// Adds `c z^e`, removing the entry if it cancels.
    pub fn add_term(&mut self, e: LatticeVector, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&e) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(e, s);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LatticeVector, &T)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &LatticeVector) -> Option<&T> {
        self.terms.get(e)
    }

    /// The exponent set.
    pub fn support(&self) -> Vec<LatticeVector> {
        self.terms.keys().cloned().collect()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn max_degree(&self, var: usize) -> Option<i64> {
        self.terms.keys().map(|e| e.0[var]).max()
    }

    pub fn min_degree(&self, var: usize) -> Option<i64> {
        self.terms.keys().map(|e| e.0[var]).min()
    }

    pub fn map_coefficients<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> LaurentPolynomial<U> {
        LaurentPolynomial::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    pub fn scale(&self, k: &T) -> Self {
        self.map_coefficients(|c| c.clone() * k.clone())
    }

    /// Splits off one variable: `f = sum_e c_e(rest) * z_var^e`.
    pub fn coefficients_in(&self, var: usize) -> BTreeMap<i64, LaurentPolynomial<T>> {
        let mut out: BTreeMap<i64, LaurentPolynomial<T>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut rest = e.0.clone();
            let k = rest.remove(var);
            out.entry(k)
                .or_insert_with(|| LaurentPolynomial::zero(self.nvars - 1))
                .add_term(LatticeVector(rest), c.clone());
        }
        out
    }

    pub fn newton_polytope(&self) -> Result<LatticePolytope> {
        if self.is_zero() {
            return Err(LaurentError::ZeroPolynomial);
        }
        Ok(LatticePolytope::from_points(&self.support())?)
    }

    /// `f o Phi_M`: exponent `alpha` becomes `M alpha`.
    pub fn substitute_monomial(&self, m: &MonomialMap) -> Self {
        assert_eq!(m.dim(), self.nvars, "monomial map dimension");
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (m.map_exponent(e), c.clone())))
    }

    /// `f o xi_d`: every exponent multiplied by `d`.
    pub fn ramify(&self, r: RamificationMap) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.scale(r.d as i64), c.clone())))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.nvars, T::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates at a point of the complex torus.
    pub fn evaluate<F: Float>(&self, z: &[Complex<F>]) -> Result<Complex<F>>
    where
        T: ComplexEmbedding,
    {
        if z.len() != self.nvars {
            return Err(LaurentError::VariableCount { expected: self.nvars, found: z.len() });
        }
        let mut sum = Complex::new(F::zero(), F::zero());
        for (e, c) in &self.terms {
            let mut term: Complex<F> = c.embed();
            for (i, (&k, zi)) in e.0.iter().zip(z).enumerate() {
                if k == 0 {
                    continue;
                }
                if k < 0 && zi.re.is_zero() && zi.im.is_zero() {
                    return Err(LaurentError::ZeroCoordinate { index: i });
                }
                term = term * zi.powi(k as i32);
            }
            sum = sum + term;
        }
        Ok(sum)
    }
}

impl<T: Coefficient + FromPrimitive> LaurentPolynomial<T> {
    /// Partial derivative with respect to one variable.
    pub fn derivative(&self, var: usize) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().filter(|(e, _)| e.0[var] != 0).map(|(e, c)| {
                let k = e.0[var];
                let mut d = e.clone();
                d.0[var] -= 1;
                (d, c.clone() * T::from_i64(k).expect("integer coefficient"))
            }),
        )
    }
}

impl<T: Coefficient> Add for &LaurentPolynomial<T> {
    type Output = LaurentPolynomial<T>;
    fn add(self, rhs: &LaurentPolynomial<T>) -> LaurentPolynomial<T> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<T: Coefficient> Sub for &LaurentPolynomial<T> {
    type Output = LaurentPolynomial<T>;
    fn sub(self, rhs: &LaurentPolynomial<T>) -> LaurentPolynomial<T> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<T: Coefficient> Mul for &LaurentPolynomial<T> {
    type Output = LaurentPolynomial<T>;
    fn mul(self, rhs: &LaurentPolynomial<T>) -> LaurentPolynomial<T> {
        let mut out = LaurentPolynomial::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<T: Coefficient> Neg for &LaurentPolynomial<T> {
    type Output = LaurentPolynomial<T>;
    fn neg(self) -> LaurentPolynomial<T> {
        self.map_coefficients(|c| -c.clone())
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl<T: Coefficient> $tr for LaurentPolynomial<T> {
            type Output = LaurentPolynomial<T>;
            fn $m(self, rhs: LaurentPolynomial<T>) -> LaurentPolynomial<T> {
                (&self).$m(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl<T: Coefficient> Neg for LaurentPolynomial<T> {
    type Output = LaurentPolynomial<T>;
    fn neg(self) -> LaurentPolynomial<T> {
        -&self
    }
}

impl<T: fmt::Debug> fmt::Debug for LaurentPolynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

/// The toric map `Phi_M(z) = (z^{u_1}, ..., z^{u_N})`, `u_i` the columns of `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMap {
    matrix: Vec<Vec<i64>>,
    det: i64,
}

impl MonomialMap {
    /// `rows[i][j]` is the entry of `M` in row `i`, column `j`.
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(LaurentError::SingularMap);
        }
        let det = crate::lattice::determinant(&rows);
        if det == 0 {
            return Err(LaurentError::SingularMap);
        }
        Ok(MonomialMap { matrix: rows, det: det as i64 })
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn determinant(&self) -> i64 {
        self.det
    }

    pub fn is_unimodular(&self) -> bool {
        self.det.abs() == 1
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn column(&self, j: usize) -> LatticeVector {
        LatticeVector(self.matrix.iter().map(|r| r[j]).collect())
    }

    pub fn map_exponent(&self, alpha: &LatticeVector) -> LatticeVector {
        LatticeVector(self.matrix.iter().map(|r| crate::lattice::dot(r, &alpha.0)).collect())
    }

    /// `M^T v`.
    pub fn transpose_apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|j| (0..n).map(|i| self.matrix[i][j] as f64 * v[i]).sum())
            .collect()
    }

    /// `self * other`.
    pub fn compose(&self, other: &MonomialMap) -> MonomialMap {
        let n = self.dim();
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| self.matrix[i][k] * other.matrix[k][j]).sum()).collect())
            .collect();
        MonomialMap::new(rows).expect("product of nonsingular maps")
    }

    /// Applies `Phi_M` to a point of the torus.
    pub fn apply<F: Float>(&self, z: &[Complex<F>]) -> Vec<Complex<F>> {
        (0..self.dim())
            .map(|j| {
                self.matrix
                    .iter()
                    .zip(z)
                    .fold(Complex::new(F::one(), F::zero()), |acc, (row, zi)| acc * zi.powi(row[j] as i32))
            })
            .collect()
    }
}

/// The map `xi_d(z) = (z_1^d, ..., z_N^d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RamificationMap {
    pub d: u32,
}

impl RamificationMap {
    pub fn new(d: u32) -> Result<Self> {
        if d == 0 {
            return Err(LaurentError::ZeroRamification);
        }
        Ok(RamificationMap { d })
    }
}

impl LaurentPolynomial<BigRational> {
    /// Prints in the grammar accepted by [`parse_polynomial`].
    pub fn to_text(&self, vars: &[String]) -> String {
        use num_traits::Signed;
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || e.is_zero() {
                factors.push(if mag.is_integer() {
                    mag.numer().to_string()
                } else {
                    format!("{}/{}", mag.numer(), mag.denom())
                });
            }
            for (k, v) in e.0.iter().zip(vars) {
                match *k {
                    0 => {}
                    1 => factors.push(v.clone()),
                    k => factors.push(format!("{v}^{k}")),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    /// Coefficients as exact Gaussian rationals.
    pub fn to_gaussian(&self) -> LaurentPolynomial<Complex<BigRational>> {
        self.map_coefficients(|c| Complex::new(c.clone(), BigRational::zero()))
    }

    /// Coefficients as double-precision complex numbers.
    pub fn to_complex(&self) -> LaurentPolynomial<Complex<f64>> {
        self.map_coefficients(|c| c.embed::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RationalPolynomial;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn poly(text: &str, names: &[&str]) -> RationalPolynomial {
        parse_polynomial(text, &vars(names)).unwrap()
    }

    #[test]
    fn newton_polytope_examples() {
        let f = poly("x + y - 1", &["x", "y"]);
        let np = f.newton_polytope().unwrap();
        assert_eq!(np.vertices(), &[[0, 0].into(), [0, 1].into(), [1, 0].into()]);
        let cubic = poly(
            "50*x^3+83*x^2*y+24*x*y^2+y^3+392*x^2+414*x*y+50*y^2-28*x+59*y-100",
            &["x", "y"],
        );
        let np = cubic.newton_polytope().unwrap();
        assert_eq!(np.vertices(), &[[0, 0].into(), [0, 3].into(), [3, 0].into()]);
        for e in cubic.support() {
            assert!(np.contains_lattice(&e));
        }
        let m = poly("x^2*y", &["x", "y"]).newton_polytope().unwrap();
        assert_eq!(m.vertices(), &[LatticeVector::from([2, 1])]);
        assert_eq!(
            RationalPolynomial::zero(2).newton_polytope().unwrap_err(),
            LaurentError::ZeroPolynomial
        );
    }

    #[test]
    fn monomial_substitution() {
        let swap = MonomialMap::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let f = RationalPolynomial::monomial([1, 0].into(), q(1));
        assert_eq!(f.substitute_monomial(&swap), RationalPolynomial::monomial([0, 1].into(), q(1)));

        let shear = MonomialMap::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
        let g = poly("x + y - 1", &["x", "y"]).substitute_monomial(&shear);
        assert_eq!(g, poly("x + x*y - 1", &["x", "y"]));
        assert!(MonomialMap::new(vec![vec![1, 2], vec![2, 4]]).is_err());
    }

    #[test]
    fn ramification() {
        let f = poly("x + y - 1", &["x", "y"]);
        let r = RamificationMap::new(2).unwrap();
        assert_eq!(f.ramify(r), poly("x^2 + y^2 - 1", &["x", "y"]));
        let m = poly("x*y", &["x", "y"]).ramify(RamificationMap::new(3).unwrap());
        assert_eq!(m, poly("x^3*y^3", &["x", "y"]));
        assert!(RamificationMap::new(0).is_err());
    }

    #[test]
    fn evaluation() {
        let f = poly("x + y - 1", &["x", "y"]).to_complex();
        let one = Complex::new(1.0, 0.0);
        assert_eq!(f.evaluate(&[one, one]).unwrap(), one);
        let v = f.evaluate(&[one, Complex::new(0.5, 0.0)]).unwrap();
        assert!((v - Complex::new(0.5, 0.0)).norm() < 1e-15);
        let inv = poly("x^-1", &["x"]).to_complex();
        assert!(matches!(
            inv.evaluate(&[Complex::new(0.0, 0.0)]),
            Err(LaurentError::ZeroCoordinate { index: 0 })
        ));
        // f32 evaluation through the same generic path.
        let v32 = f.evaluate(&[Complex::new(1.0f32, 0.0), Complex::new(2.0f32, 0.0)]).unwrap();
        assert_eq!(v32, Complex::new(2.0f32, 0.0));
    }

    #[test]
    fn derivative_in_one_variable() {
        let f = poly("z^2 - x - y + 1", &["x", "y", "z"]);
        assert_eq!(f.derivative(2), poly("2*z", &["x", "y", "z"]));
        let g = poly("x^-2 + 3*x", &["x"]);
        assert_eq!(g.derivative(0), poly("-2*x^-3 + 3", &["x"]));
    }

    #[test]
    fn printer_output() {
        let f = poly("x + y - 1", &["x", "y"]);
        assert_eq!(f.to_text(&vars(&["x", "y"])), "x + y - 1");
        let g = poly("-1/2*x^-1*y^2 + 0.25", &["x", "y"]);
        assert_eq!(g.to_text(&vars(&["x", "y"])), "1/4 - 1/2*x^-1*y^2");
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use crate::polyhedra::Cone;
    use crate::RationalPolynomial;
    use crate::roots::roots;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    fn sparse(n: usize, lo: i64, hi: i64) -> impl Strategy<Value = RationalPolynomial> {
        prop::collection::vec((prop::collection::vec(lo..=hi, n), -9i64..=9, 1i64..=4), 1..7).prop_map(move |terms| {
            RationalPolynomial::from_terms(
                n,
                terms.into_iter().map(|(e, a, b)| (LatticeVector(e), BigRational::new(a.into(), b.into()))),
            )
        })
    }

    fn unimodular(n: usize) -> impl Strategy<Value = MonomialMap> {
        prop::collection::vec((0..n, 0..n, -2i64..=2), 0..5).prop_map(move |ops| {
            let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
            for (i, j, k) in ops {
                if i == j {
                    m.iter_mut().for_each(|r| r[i] = -r[i]);
                } else {
                    m.iter_mut().for_each(|r| r[j] += k * r[i]);
                }
            }
            MonomialMap::new(m).unwrap()
        })
    }

    fn c(x: f64, y: f64) -> Complex<f64> {
        Complex::new(x, y)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn printer_and_parser_round_trip(f in (1usize..=3).prop_flat_map(|n| sparse(n, -3, 3))) {
            let vars = names(f.nvars());
            let back = parse_polynomial(&f.to_text(&vars), &vars).unwrap();
            prop_assert!(back == f);
        }

        #[test]
        fn newton_polytope_hulls_the_support(f in sparse(2, -3, 3)) {
            prop_assume!(!f.is_zero());
            let np = f.newton_polytope().unwrap();
            let support = f.support();
            prop_assert!(np.vertices().iter().all(|v| support.contains(v)));
            prop_assert!(support.iter().all(|e| np.contains_lattice(e)));
        }

        #[test]
        fn substitutions_compose(
            (f, m1, m2) in (2usize..=3).prop_flat_map(|n| (sparse(n, -2, 2), unimodular(n), unimodular(n))),
        ) {
            let twice = f.substitute_monomial(&m1).substitute_monomial(&m2);
            prop_assert!(twice == f.substitute_monomial(&m2.compose(&m1)));
        }

        #[test]
        fn substitution_maps_the_support_cone(
            (gens, p, coeffs, m) in (2usize..=3).prop_flat_map(|n| (
                prop::collection::vec(prop::collection::vec(-3i64..=3, n), 1..4),
                prop::collection::vec(-2i64..=2, n),
                prop::collection::vec((prop::collection::vec(0i64..=2, 3), 1i64..=5), 1..6),
                unimodular(n),
            )),
        ) {
            let n = p.len();
            let gens: Vec<LatticeVector> = gens.into_iter().map(LatticeVector).collect();
            let p = LatticeVector(p);
            // exponents p + sum k_i g_i with k_i >= 0
            let f = RationalPolynomial::from_terms(n, coeffs.into_iter().map(|(ks, a)| {
                let e = gens.iter().zip(ks.iter().cycle()).fold(p.clone(), |acc, (g, &k)| &acc + &g.scale(k));
                (e, BigRational::from_integer(a.into()))
            }));
            let image = Cone::new(n, gens.iter().map(|g| m.map_exponent(g)).collect()).unwrap();
            let mp = m.map_exponent(&p);
            for e in f.substitute_monomial(&m).support() {
                prop_assert!(image.contains_lattice(&(&e - &mp)));
            }
        }

        #[test]
        fn ramification_scales_exponents(f in sparse(2, -3, 3), d in 1u32..=4) {
            let mut want: Vec<LatticeVector> = f.support().iter().map(|e| e.scale(d as i64)).collect();
            want.sort();
            let mut got = f.ramify(RamificationMap::new(d).unwrap()).support();
            got.sort();
            prop_assert_eq!(got, want);
        }

        #[test]
        fn discriminant_matches_the_root_product(
            coeffs in prop::collection::vec(prop::collection::vec(-5i64..=5, 3), 3..5),
            xr in -1.5f64..1.5, xi in -1.5f64..1.5,
        ) {
            // F = sum_k (c_k0 + c_k1 x + c_k2 x^2) y^k
            let k = coeffs.len() - 1;
            prop_assume!(coeffs[k].iter().any(|&v| v != 0));
            let f = RationalPolynomial::from_terms(2, coeffs.iter().enumerate().flat_map(|(yk, row)| {
                row.iter().enumerate().map(move |(xe, &v)| (LatticeVector::from([xe as i64, yk as i64]), BigRational::from_integer(v.into())))
            }));
            let x = c(xr, xi);
            let a: Vec<Complex<f64>> = coeffs.iter().map(|row| row.iter().rev().fold(c(0.0, 0.0), |acc, &v| acc * x + v as f64)).collect();
            prop_assume!(a[k].norm() > 1e-3);
            let delta = discriminant_y(&f, 1).unwrap();
            let got = delta.evaluate(&[x]).unwrap();
            let r = roots(&a).unwrap();
            let dp = |z: Complex<f64>| (1..=k).rev().fold(c(0.0, 0.0), |acc, j| acc * z + a[j] * j as f64);
            let want = r.iter().fold(a[k].powi(k as i32 - 1), |acc, &z| acc * dp(z));
            prop_assert!((got.norm() - want.norm()).abs() <= 1e-7 * (1.0 + want.norm()), "{} vs {}", got, want);
        }

        #[test]
        fn discriminant_vanishes_at_a_double_root(cn in -4i64..=4, dn in -4i64..=4, x0 in 1i64..=5, den in 1i64..=3) {
            prop_assume!(cn != dn);
            let q = |n: i64, d: i64| RationalPolynomial::constant(2, BigRational::new(n.into(), d.into()));
            let y = RationalPolynomial::monomial(LatticeVector::from([0, 1]), BigRational::from_integer(1.into()));
            let x = RationalPolynomial::monomial(LatticeVector::from([1, 0]), BigRational::from_integer(1.into()));
            let yc = &y - &q(cn, den);
            let yd = &y - &q(dn, den);
            // (y - c)^2 (y - d) + (x - x0) y has a double root y = c over x = x0
            let f = &(&(&yc * &yc) * &yd) + &(&(&x - &q(x0, 1)) * &y);
            let delta = discriminant_y(&f, 1).unwrap();
            let at = delta.evaluate(&[c(x0 as f64, 0.0)]).unwrap();
            let scale: f64 = delta.terms().map(|(e, q)| q.to_f64().unwrap().abs() * (x0 as f64).powi(e.0[0] as i32)).sum();
            prop_assert!(at.norm() <= 1e-8 * scale);
            let off = delta.evaluate(&[c(x0 as f64 + 0.37, 0.21)]).unwrap();
            prop_assert!(off.norm() > 1e-6 * scale);
        }
    }
}

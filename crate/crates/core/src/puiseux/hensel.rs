//! Exact Newton lifting of a simple root over weighted truncated series.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::lattice::{approximate_rational, LatticeVector};
use crate::laurent::LaurentPolynomial;
use crate::roots::roots;

type Q = BigRational;
type Gq = Complex<Q>;
type Series = BTreeMap<LatticeVector, Gq>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HenselError {
    #[error("weight must be positive on every nonzero base exponent; {0} has weight {1}")]
    WeightNotPositive(LatticeVector, i64),
    #[error("negative power of the fiber variable")]
    NegativeFiberExponent,
    #[error("initial value is not a root of the limit polynomial")]
    NotARoot,
    #[error("limit root is not simple")]
    NotSimple,
    #[error("no exact limit roots found")]
    NoExactRoot,
    #[error("iteration did not stabilise after {0} steps")]
    NoConvergence(usize),
}

/// Exact truncated expansion `y = sum a_I x^I`, graded by `w . I <= max_weight`.
#[derive(Clone, Debug)]
pub struct HenselExpansion {
    pub weight: LatticeVector,
    pub max_weight: i64,
    pub coefficients: BTreeMap<LatticeVector, Gq>,
    pub iterations: usize,
}

impl HenselExpansion {
    pub fn to_complex(&self) -> BTreeMap<LatticeVector, Complex<f64>> {
        self.coefficients
            .iter()
            .map(|(k, c)| (k.clone(), Complex::new(c.re.to_f64().unwrap_or(f64::NAN), c.im.to_f64().unwrap_or(f64::NAN))))
            .collect()
    }
}

struct Graded {
    weight: LatticeVector,
    max_weight: i64,
}

impl Graded {
    fn keep(&self, e: &LatticeVector) -> bool {
        self.weight.dot(e) <= self.max_weight
    }

    fn add(&self, a: &Series, b: &Series) -> Series {
        let mut out = a.clone();
        for (e, c) in b {
            insert(&mut out, e.clone(), c.clone());
        }
        out
    }

    fn mul(&self, a: &Series, b: &Series) -> Series {
        let mut out = Series::new();
        for (e1, c1) in a {
            let w1 = self.weight.dot(e1);
            for (e2, c2) in b {
                if w1 + self.weight.dot(e2) > self.max_weight {
                    continue;
                }
                insert(&mut out, e1 + e2, c1 * c2);
            }
        }
        out
    }

    fn scale(&self, a: &Series, k: &Gq) -> Series {
        a.iter().map(|(e, c)| (e.clone(), c * k)).filter(|(_, c)| !c.is_zero()).collect()
    }

    /// `1 / u` for `u` with invertible constant term.
    fn inverse(&self, u: &Series, dim: usize) -> Series {
        let zero = LatticeVector::zero(dim);
        let u0 = u.get(&zero).cloned().expect("unit");
        let inv0 = Complex::new(Q::from_integer(1.into()), Q::zero()) / u0;
        let mut h = self.scale(u, &inv0);
        h.remove(&zero);
        let neg_h = self.scale(&h, &Complex::new(Q::from_integer((-1).into()), Q::zero()));
        let mut term: Series = BTreeMap::from([(zero.clone(), inv0.clone())]);
        let mut acc = term.clone();
        loop {
            term = self.mul(&term, &neg_h);
            if term.is_empty() {
                break;
            }
            acc = self.add(&acc, &term);
        }
        acc
    }
}

fn insert(s: &mut Series, e: LatticeVector, c: Gq) {
    let slot = s.entry(e.clone()).or_insert_with(Gq::zero);
    *slot = &*slot + &c;
    if slot.is_zero() {
        s.remove(&e);
    }
}

/// Coefficients of `F` in the fiber variable (last), as series in the base.
fn fiber_coefficients(f: &LaurentPolynomial<Gq>, g: &Graded) -> Result<Vec<Series>, HenselError> {
    let n = f.nvars() - 1;
    let mut out: Vec<Series> = Vec::new();
    for (e, c) in f.terms() {
        let k = e.0[n];
        if k < 0 {
            return Err(HenselError::NegativeFiberExponent);
        }
        let base = LatticeVector(e.0[..n].to_vec());
        let w = g.weight.dot(&base);
        if w < 0 || (w == 0 && !base.is_zero()) {
            return Err(HenselError::WeightNotPositive(base, w));
        }
        if out.len() <= k as usize {
            out.resize(k as usize + 1, Series::new());
        }
        if g.keep(&base) {
            insert(&mut out[k as usize], base, c.clone());
        }
    }
    Ok(out)
}

fn horner(g: &Graded, coeffs: &[Series], y: &Series) -> Series {
    let mut acc = Series::new();
    for c in coeffs.iter().rev() {
        acc = g.add(&g.mul(&acc, y), c);
    }
    acc
}

fn derivative(coeffs: &[Series]) -> Vec<Series> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| {
            let kk = Complex::new(Q::from_integer((k as i64).into()), Q::zero());
            c.iter().map(|(e, v)| (e.clone(), v * &kk)).collect()
        })
        .collect()
}

fn limit_polynomial(coeffs: &[Series], dim: usize) -> Vec<Gq> {
    let zero = LatticeVector::zero(dim);
    coeffs.iter().map(|c| c.get(&zero).cloned().unwrap_or_else(Gq::zero)).collect()
}

fn eval_exact(p: &[Gq], y: &Gq) -> Gq {
    p.iter().rev().fold(Gq::zero(), |acc, c| acc * y + c)
}

/// Exact simple roots of the weight-zero part of `F` recovered from
/// floating-point roots by continued fractions.
pub fn exact_limit_roots(f: &LaurentPolynomial<Gq>, weight: &LatticeVector, max_den: i64) -> Result<Vec<Gq>, HenselError> {
    let g = Graded { weight: weight.clone(), max_weight: 0 };
    let coeffs = fiber_coefficients(f, &g)?;
    let lim = limit_polynomial(&coeffs, f.nvars() - 1);
    let num: Vec<Complex<f64>> =
        lim.iter().map(|c| Complex::new(c.re.to_f64().unwrap_or(0.0), c.im.to_f64().unwrap_or(0.0))).collect();
    let approx = roots(&num).map_err(|_| HenselError::NoExactRoot)?;
    let dlim: Vec<Gq> = lim
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * Complex::new(Q::from_integer((k as i64).into()), Q::zero()))
        .collect();
    let mut out: Vec<Gq> = Vec::new();
    for z in approx {
        let y0 = Complex::new(approximate_rational(z.re, max_den), approximate_rational(z.im, max_den));
        if eval_exact(&lim, &y0).is_zero() && !eval_exact(&dlim, &y0).is_zero() && !out.contains(&y0) {
            out.push(y0);
        }
    }
    if out.is_empty() {
        return Err(HenselError::NoExactRoot);
    }
    Ok(out)
}

/// Lifts the simple root `y0` of the weight-zero part of `F` to the unique
/// series root, exact up to weight `max_weight`.
pub fn hensel_lift(
    f: &LaurentPolynomial<Gq>,
    weight: &LatticeVector,
    y0: &Gq,
    max_weight: i64,
) -> Result<HenselExpansion, HenselError> {
    let dim = f.nvars() - 1;
    let g = Graded { weight: weight.clone(), max_weight };
    let coeffs = fiber_coefficients(f, &g)?;
    let dcoeffs = derivative(&coeffs);
    let lim = limit_polynomial(&coeffs, dim);
    if !eval_exact(&lim, y0).is_zero() {
        return Err(HenselError::NotARoot);
    }
    if eval_exact(&limit_polynomial(&dcoeffs, dim), y0).is_zero() {
        return Err(HenselError::NotSimple);
    }
    let mut y: Series = Series::new();
    if !y0.is_zero() {
        y.insert(LatticeVector::zero(dim), y0.clone());
    }
    let cap = 2 + 2 * (max_weight.max(0) as usize + 1);
    for it in 1..=cap {
        let value = horner(&g, &coeffs, &y);
        if value.is_empty() {
            return Ok(HenselExpansion { weight: weight.clone(), max_weight, coefficients: y, iterations: it - 1 });
        }
        let slope = horner(&g, &dcoeffs, &y);
        let step = g.mul(&value, &g.inverse(&slope, dim));
        let minus = g.scale(&step, &Complex::new(Q::from_integer((-1).into()), Q::zero()));
        y = g.add(&y, &minus);
    }
    Err(HenselError::NoConvergence(cap))
}

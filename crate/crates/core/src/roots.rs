//! Roots of univariate complex polynomials (Aberth–Ehrlich).

use num_complex::Complex;
use num_traits::{Float, FloatConst};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("root iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
}

const MAX_SWEEPS: usize = 500;

fn c<F: Float>(x: f64) -> F {
    F::from(x).unwrap()
}

/// Horner evaluation of `p` and `p'`; coefficients in ascending degree.
pub fn eval_with_derivative<F: Float>(p: &[Complex<F>], z: Complex<F>) -> (Complex<F>, Complex<F>) {
    let mut v = Complex::new(F::zero(), F::zero());
    let mut d = v;
    for &a in p.iter().rev() {
        d = d * z + v;
        v = v * z + a;
    }
    (v, d)
}

/// All roots, with multiplicity, of `sum p[k] z^k`.
pub fn roots<F: Float + FloatConst>(p: &[Complex<F>]) -> Result<Vec<Complex<F>>, RootError> {
    roots_from(p, None)
}

/// As [`roots`], starting the iteration from `guess` when its length matches.
pub fn roots_from<F: Float + FloatConst>(
    p: &[Complex<F>],
    guess: Option<&[Complex<F>]>,
) -> Result<Vec<Complex<F>>, RootError> {
    if p.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(RootError::NonFinite);
    }
    let is_zero = |a: &Complex<F>| a.re == F::zero() && a.im == F::zero();
    let hi = p.iter().rposition(|a| !is_zero(a)).ok_or(RootError::ZeroPolynomial)?;
    let lo = p.iter().position(|a| !is_zero(a)).unwrap();
    let mut out = vec![Complex::new(F::zero(), F::zero()); lo];
    let q = &p[lo..=hi];
    let n = q.len() - 1;
    match n {
        0 => {}
        1 => out.push(-q[0] / q[1]),
        2 => out.extend(quadratic(q[2], q[1], q[0])),
        _ => {
            let g = guess.filter(|g| g.len() == n).map(|g| g.to_vec());
            let mut z = aberth(q, g)?;
            for zi in z.iter_mut() {
                *zi = polish(q, *zi);
            }
            out.extend(z);
        }
    }
    Ok(out)
}

/// Roots of `a z^2 + b z + c` avoiding cancellation.
fn quadratic<F: Float>(a: Complex<F>, b: Complex<F>, c0: Complex<F>) -> [Complex<F>; 2] {
    let disc = (b * b - a * c0 * c::<F>(4.0)).sqrt();
    let s = if (b.conj() * disc).re >= F::zero() { b + disc } else { b - disc };
    if s.norm() == F::zero() {
        // b = 0 and c = 0: double root at 0.
        let z = Complex::new(F::zero(), F::zero());
        return [z, z];
    }
    let q = -s / c::<F>(2.0);
    [q / a, c0 / q]
}

fn aberth<F: Float + FloatConst>(q: &[Complex<F>], guess: Option<Vec<Complex<F>>>) -> Result<Vec<Complex<F>>, RootError> {
    let n = q.len() - 1;
    let lead = q[n].norm();
    let mut z = guess.unwrap_or_else(|| {
        // Fujiwara-type bound for the outer radius, geometric mean for the inner scale.
        let r = (0..n)
            .map(|k| (q[k].norm() / lead).powf(F::one() / F::from(n - k).unwrap()))
            .fold(F::zero(), F::max);
        let r0 = (q[0].norm() / lead).powf(F::one() / F::from(n).unwrap());
        let r = (r0 + r) / c(2.0);
        (0..n)
            .map(|k| {
                let th = F::TAU() * F::from(k).unwrap() / F::from(n).unwrap() + c(0.4);
                Complex::from_polar(r, th)
            })
            .collect()
    });
    let eps = F::epsilon() * c(4.0);
    let mut done = vec![false; n];
    for _ in 0..MAX_SWEEPS {
        let mut moved = false;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (v, d) = eval_with_derivative(q, z[i]);
            if v.norm() == F::zero() {
                done[i] = true;
                continue;
            }
            let ratio = v / d;
            let mut s = Complex::new(F::zero(), F::zero());
            for j in 0..n {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > F::zero() {
                        s = s + diff.inv();
                    }
                }
            }
            let w = ratio / (Complex::new(F::one(), F::zero()) - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                z[i] = z[i] + Complex::new(eps, eps) * (F::one() + z[i].norm());
                moved = true;
                continue;
            }
            z[i] = z[i] - w;
            if w.norm() <= eps * (F::one() + z[i].norm()) {
                done[i] = true;
            } else {
                moved = true;
            }
        }
        if !moved {
            return Ok(z);
        }
    }
    // Clustered roots converge slowly; accept if residuals are small.
    let scale: F = q.iter().fold(F::zero(), |m, a| m.max(a.norm()));
    let ok = z.iter().all(|&zi| {
        let (v, _) = eval_with_derivative(q, zi);
        let mag = q.iter().rev().fold(F::zero(), |acc, a| acc * zi.norm() + a.norm());
        v.norm() <= c::<F>(1e3) * F::epsilon() * mag.max(scale)
    });
    if ok {
        Ok(z)
    } else {
        Err(RootError::NoConvergence(MAX_SWEEPS))
    }
}

fn polish<F: Float>(q: &[Complex<F>], mut z: Complex<F>) -> Complex<F> {
    for _ in 0..3 {
        let (v, d) = eval_with_derivative(q, z);
        if d.norm() == F::zero() {
            break;
        }
        let step = v / d;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        let next = z - step;
        if eval_with_derivative(q, next).0.norm() >= v.norm() {
            break;
        }
        z = next;
    }
    z
}

/// Smallest pairwise distance among the points (infinite for fewer than two).
pub fn min_gap<F: Float>(z: &[Complex<F>]) -> F {
    let mut g = F::infinity();
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            g = g.min((z[i] - z[j]).norm());
        }
    }
    g
}

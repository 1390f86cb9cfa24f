//! Monodromy of the fiber roots of `F(x, y) = 0` over a torus in `x`.
//!
//! The fiber variable is the last variable of `F`. Points of the base are
//! given in log-polar form: `x_i = exp(rho_i + i theta_i)`.

use num_complex::Complex;
use serde::Serialize;
use thiserror::Error;

use crate::amoeba::SlicedPolynomial;
use crate::laurent::{Coefficient, ComplexEmbedding, LaurentPolynomial};
use crate::roots::{min_gap, roots_from, RootError};

type C64 = Complex<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonodromyError {
    #[error("fiber roots too close at the basepoint (gap {gap:.3e})")]
    RootGap { gap: f64 },
    #[error("fiber degree drops at the basepoint: expected {expected} roots, found {found}")]
    DegreeDrop { expected: usize, found: usize },
    #[error("polynomial does not depend on the fiber variable")]
    ConstantInFiber,
    #[error("root continuation ambiguous along axis {axis} (near the discriminant)")]
    Ambiguous { axis: usize },
    #[error("loop permutations for axes {0} and {1} do not commute")]
    NonCommuting(usize, usize),
    #[error("permutation along axis {axis} changed when the step count was doubled")]
    Unstable { axis: usize },
    #[error("expected {expected} base coordinates, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error(transparent)]
    Roots(#[from] RootError),
}

pub type Result<T> = std::result::Result<T, MonodromyError>;

#[derive(Clone, Debug)]
pub struct MonodromyConfig {
    /// Initial steps per loop.
    pub steps: usize,
    /// Maximum number of step halvings below the initial step.
    pub max_halvings: u32,
    /// Minimum root separation at the basepoint, relative to `1 + max |root|`.
    pub gap_tol: f64,
    /// Re-track every loop with twice the steps and require the same permutation.
    pub check_doubling: bool,
}

impl Default for MonodromyConfig {
    fn default() -> Self {
        MonodromyConfig { steps: 256, max_halvings: 30, gap_tol: 1e-8, check_doubling: true }
    }
}

/// Fiber `F(x, .)` in the last variable, with `x` in log-polar form.
#[derive(Clone, Debug)]
pub struct Fiber {
    sliced: SlicedPolynomial,
    base_dim: usize,
}

impl Fiber {
    pub fn new<T: Coefficient + ComplexEmbedding>(f: &LaurentPolynomial<T>) -> Result<Self> {
        let sliced = SlicedPolynomial::new(f);
        let base_dim = f.nvars() - 1;
        if sliced.degree(base_dim) == 0 {
            return Err(MonodromyError::ConstantInFiber);
        }
        Ok(Fiber { sliced, base_dim })
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    /// Number of roots counted by the fiber degree (excluding roots forced to 0
    /// by a positive lowest exponent).
    pub fn degree(&self) -> usize {
        self.sliced.degree(self.base_dim)
    }

    pub fn sliced(&self) -> &SlicedPolynomial {
        &self.sliced
    }

    fn extended(&self, v: &[f64]) -> Vec<f64> {
        let mut e = v.to_vec();
        e.push(0.0);
        e
    }

    pub fn coefficients(&self, rho: &[f64], theta: &[f64]) -> Vec<C64> {
        self.sliced.coefficients_polar(self.base_dim, &self.extended(rho), &self.extended(theta))
    }

    /// All fiber roots at `x = exp(rho + i theta)`.
    pub fn roots(&self, rho: &[f64], theta: &[f64], guess: Option<&[C64]>) -> Result<Vec<C64>> {
        let coeffs = self.coefficients(rho, theta);
        let r = roots_from(&coeffs, guess)?;
        if r.len() != self.degree() {
            return Err(MonodromyError::DegreeDrop { expected: self.degree(), found: r.len() });
        }
        Ok(r)
    }

    /// Continues `roots` (valid at `theta0`) along the straight segment to
    /// `theta1` at fixed moduli. A step is accepted when every root has a
    /// unique nearest successor closer than half that successor's distance to
    /// the other successors; otherwise the step is halved.
    pub fn continue_roots(
        &self,
        rho: &[f64],
        theta0: &[f64],
        theta1: &[f64],
        roots: &[C64],
        steps: usize,
        max_halvings: u32,
    ) -> Option<Vec<C64>> {
        let mut current = roots.to_vec();
        let mut s = 0.0f64;
        let base = 1.0 / steps.max(1) as f64;
        let min_h = base / 2f64.powi(max_halvings as i32);
        let mut h = base;
        while s < 1.0 {
            let step = h.min(1.0 - s);
            let t = s + step;
            let theta: Vec<f64> = theta0.iter().zip(theta1).map(|(a, b)| a + t * (b - a)).collect();
            let next = self.roots(rho, &theta, Some(&current)).ok();
            match next.and_then(|n| match_roots(&current, &n)) {
                Some(m) => {
                    current = m;
                    s = t;
                    if h < base {
                        h *= 2.0;
                    }
                }
                None => {
                    h /= 2.0;
                    if h < min_h {
                        return None;
                    }
                }
            }
        }
        Some(current)
    }
}

/// Reorders `next` to follow `prev` when the nearest-neighbour matching is
/// unambiguous.
pub fn match_roots(prev: &[C64], next: &[C64]) -> Option<Vec<C64>> {
    let k = prev.len();
    if next.len() != k {
        return None;
    }
    let mut used = vec![false; k];
    let mut out = Vec::with_capacity(k);
    for v in prev {
        let (j, dist) = next
            .iter()
            .enumerate()
            .map(|(j, w)| (j, (w - v).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        if used[j] {
            return None;
        }
        let sep = next
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, w)| (w - next[j]).norm())
            .fold(f64::INFINITY, f64::min);
        if !(dist < 0.5 * sep) {
            return None;
        }
        used[j] = true;
        out.push(next[j]);
    }
    Some(out)
}

/// Index of the nearest point to `z` in `roots`.
pub fn nearest(roots: &[C64], z: C64) -> usize {
    (0..roots.len())
        .min_by(|&a, &b| (roots[a] - z).norm().total_cmp(&(roots[b] - z).norm()))
        .expect("nonempty")
}

fn canonical_order(roots: &mut [C64]) {
    // Round away noise before comparing so ordering is stable across runs.
    let key = |z: &C64| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64);
    roots.sort_by(|a, b| key(a).cmp(&key(b)).then(a.re.total_cmp(&b.re)).then(a.im.total_cmp(&b.im)));
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberBasepoint {
    /// Log-moduli of the base coordinates.
    pub rho: Vec<f64>,
    pub base_angles: Vec<f64>,
    /// Simple fiber roots in canonical (lexicographic) order.
    pub roots: Vec<C64>,
}

pub fn fiber_basepoint(fiber: &Fiber, rho: &[f64], angles: &[f64], config: &MonodromyConfig) -> Result<FiberBasepoint> {
    if rho.len() != fiber.base_dim || angles.len() != fiber.base_dim {
        return Err(MonodromyError::Dimension { expected: fiber.base_dim, found: rho.len().min(angles.len()) });
    }
    let mut roots = fiber.roots(rho, angles, None)?;
    canonical_order(&mut roots);
    let scale = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let gap = min_gap(&roots);
    if gap < config.gap_tol * scale {
        return Err(MonodromyError::RootGap { gap });
    }
    Ok(FiberBasepoint { rho: rho.to_vec(), base_angles: angles.to_vec(), roots })
}

/// Permutation `perm` with `perm[i] = j` when root `i` arrives at root `j`
/// after the loop turning the angle of `axis` by `2 pi * direction`.
pub fn track_loop(
    fiber: &Fiber,
    bp: &FiberBasepoint,
    axis: usize,
    direction: f64,
    steps: usize,
    max_halvings: u32,
) -> Result<Vec<usize>> {
    let mut end = bp.base_angles.clone();
    end[axis] += std::f64::consts::TAU * direction;
    let tracked = fiber
        .continue_roots(&bp.rho, &bp.base_angles, &end, &bp.roots, steps, max_halvings)
        .ok_or(MonodromyError::Ambiguous { axis })?;
    let perm: Vec<usize> = tracked.iter().map(|&z| nearest(&bp.roots, z)).collect();
    let mut seen = vec![false; perm.len()];
    for &j in &perm {
        if seen[j] {
            return Err(MonodromyError::Ambiguous { axis });
        }
        seen[j] = true;
    }
    Ok(perm)
}

pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // (a then b)
    a.iter().map(|&i| b[i]).collect()
}

pub fn permutation_power(p: &[usize], k: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..p.len()).collect();
    for _ in 0..k {
        out = compose(&out, p);
    }
    out
}

/// Joint orbits of a family of permutations, each sorted, ordered by least element.
pub fn orbits(perms: &[Vec<usize>], k: usize) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut i = i;
        while parent[i] != r {
            let next = parent[i];
            parent[i] = r;
            i = next;
        }
        r
    }
    for p in perms {
        for (i, &j) in p.iter().enumerate() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..k {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Least `m >= 1` with `p^m` fixing every element of `set`.
pub fn order_on(p: &[usize], set: &[usize]) -> usize {
    let mut m = 1;
    let mut q = p.to_vec();
    while !set.iter().all(|&i| q[i] == i) {
        q = compose(&q, p);
        m += 1;
    }
    m
}

#[derive(Clone, Debug, Serialize)]
pub struct MonodromyResult {
    pub basepoint: FiberBasepoint,
    pub permutations: Vec<Vec<usize>>,
    pub orbits: Vec<Vec<usize>>,
    /// Orbit sizes; the ramification index of each branch family.
    pub d_per_orbit: Vec<usize>,
    /// `winding_orders[o][j]`: order of loop `j` restricted to orbit `o`.
    pub winding_orders: Vec<Vec<usize>>,
}

impl MonodromyResult {
    pub fn orbit_of(&self, sheet: usize) -> usize {
        self.orbits.iter().position(|o| o.contains(&sheet)).expect("sheet in some orbit")
    }
}

/// Loop permutations, orbits and ramification indices at the base point
/// `exp(rho + i angles)`.
pub fn monodromy(fiber: &Fiber, rho: &[f64], angles: &[f64], config: &MonodromyConfig) -> Result<MonodromyResult> {
    let bp = fiber_basepoint(fiber, rho, angles, config)?;
    let n = fiber.base_dim;
    let mut perms = Vec::with_capacity(n);
    for axis in 0..n {
        let p = track_loop(fiber, &bp, axis, 1.0, config.steps, config.max_halvings)?;
        if config.check_doubling {
            let q = track_loop(fiber, &bp, axis, 1.0, 2 * config.steps, config.max_halvings)?;
            if p != q {
                return Err(MonodromyError::Unstable { axis });
            }
        }
        perms.push(p);
    }
    for a in 0..n {
        for b in a + 1..n {
            if compose(&perms[a], &perms[b]) != compose(&perms[b], &perms[a]) {
                return Err(MonodromyError::NonCommuting(a, b));
            }
        }
    }
    let k = bp.roots.len();
    let orbits = orbits(&perms, k);
    let d_per_orbit = orbits.iter().map(|o| o.len()).collect();
    let winding_orders = orbits.iter().map(|o| perms.iter().map(|p| order_on(p, o)).collect()).collect();
    Ok(MonodromyResult { basepoint: bp, permutations: perms, orbits, d_per_orbit, winding_orders })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::parse_polynomial;

    fn fiber(text: &str, vars: &[&str]) -> Fiber {
        let v: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        Fiber::new(&parse_polynomial(text, &v).unwrap()).unwrap()
    }

    #[test]
    fn basepoints() {
        let f = fiber("z^2 - x - y + 1", &["x", "y", "z"]);
        let c = MonodromyConfig::default();
        let bp = fiber_basepoint(&f, &[3.0, 0.0], &[0.0, 0.0], &c).unwrap();
        let r = 3f64.exp().sqrt();
        assert!((bp.roots[0].re + r).abs() < 1e-12 && (bp.roots[1].re - r).abs() < 1e-12);
        let bp = fiber_basepoint(&f, &[-3.0, -3.0], &[0.0, 0.0], &c).unwrap();
        let r = (1.0 - 2.0 * (-3f64).exp()).sqrt();
        assert!((bp.roots[0].im + r).abs() < 1e-12 && (bp.roots[1].im - r).abs() < 1e-12);
        let q = fiber("y^2 - x1*x2", &["x1", "x2", "y"]);
        let bp = fiber_basepoint(&q, &[0.0, 0.0], &[0.0, 0.0], &c).unwrap();
        assert!((bp.roots[0] + 1.0).norm() < 1e-14 && (bp.roots[1] - 1.0).norm() < 1e-14);
    }

    #[test]
    fn loops_of_the_quadratic() {
        let f = fiber("z^2 - x - y + 1", &["x", "y", "z"]);
        let c = MonodromyConfig::default();
        let m = monodromy(&f, &[3.0, 0.0], &[0.0, 0.0], &c).unwrap();
        assert_eq!(m.permutations, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(m.orbits, vec![vec![0, 1]]);
        assert_eq!(m.d_per_orbit, vec![2]);
        assert_eq!(m.winding_orders, vec![vec![2, 1]]);
        let m = monodromy(&f, &[-3.0, -3.0], &[0.0, 0.0], &c).unwrap();
        assert_eq!(m.orbits, vec![vec![0], vec![1]]);
        assert_eq!(m.d_per_orbit, vec![1, 1]);
    }

    #[test]
    fn quasi_ordinary_loops() {
        let f = fiber("y^2 - x1*x2", &["x1", "x2", "y"]);
        let m = monodromy(&f, &[0.0, 0.0], &[0.0, 0.0], &MonodromyConfig::default()).unwrap();
        assert_eq!(m.permutations, vec![vec![1, 0], vec![1, 0]]);
        assert_eq!(m.d_per_orbit, vec![2]);
    }

    #[test]
    fn inverse_loops_cancel() {
        let f = fiber("z^3 - x*z - y", &["x", "y", "z"]);
        let c = MonodromyConfig::default();
        let bp = fiber_basepoint(&f, &[1.5, 0.2], &[0.1, 0.3], &c).unwrap();
        for axis in 0..2 {
            let fwd = track_loop(&f, &bp, axis, 1.0, 256, 30).unwrap();
            let back = track_loop(&f, &bp, axis, -1.0, 256, 30).unwrap();
            assert_eq!(compose(&fwd, &back), vec![0, 1, 2]);
        }
    }

    #[test]
    fn orbit_helpers() {
        let p = vec![1, 2, 0, 3];
        assert_eq!(orbits(&[p.clone()], 4), vec![vec![0, 1, 2], vec![3]]);
        assert_eq!(order_on(&p, &[0, 1, 2]), 3);
        assert_eq!(permutation_power(&p, 3), vec![0, 1, 2, 3]);
    }
}

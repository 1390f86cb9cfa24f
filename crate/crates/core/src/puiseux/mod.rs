//! Puiseux expansions of a fiber branch over a complement component.
//!
//! With `x = t^d` the branch becomes single valued on a torus in `t`, so its
//! Laurent coefficients are discrete Cauchy integrals over a `G^N` grid:
//! `a_I r^I = G^-N sum_m phi(t_m) e^{-2 pi i I.m / G}`. The branch is
//! followed across the grid by root continuation from the basepoint.

mod hensel;
pub mod oracle;

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::LatticeVector;
use crate::monodromy::{nearest, Fiber, MonodromyError};
use crate::polyhedra::Cone;

pub use hensel::{exact_limit_roots, hensel_lift, HenselError, HenselExpansion};
pub use oracle::{binomial, binomial_oracle, OracleTerm, OracleVariant};

type C64 = Complex<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PuiseuxError {
    #[error("grid tracking lost the branch between nodes {from} and {to}")]
    Tracking { from: usize, to: usize },
    #[error("grid size {grid} too small for exponent window")]
    GridTooSmall { grid: usize },
    #[error("sheet {0} is not a fiber root index")]
    NoSuchSheet(usize),
    #[error(transparent)]
    Monodromy(#[from] MonodromyError),
}

pub type Result<T> = std::result::Result<T, PuiseuxError>;

#[derive(Clone, Debug, Serialize)]
pub struct ExtractionConfig {
    /// Grid points per axis.
    pub grid: usize,
    /// Truncation bound on `w . I`.
    pub max_weight: i64,
    /// Exponents whose estimated error exceeds `resolve_tol * scale` are not reported.
    pub resolve_tol: f64,
    /// Coefficients below `drop_tol * scale` are not stored.
    pub drop_tol: f64,
    /// Largest accepted ratio of the Nyquist band to the peak DFT magnitude.
    pub alias_tol: f64,
    /// Continuation: initial sub-steps per grid edge, and halvings allowed.
    pub edge_steps: usize,
    pub max_halvings: u32,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            grid: 128,
            max_weight: 20,
            resolve_tol: 1e-9,
            drop_tol: 1e-10,
            alias_tol: 1e-10,
            edge_steps: 1,
            max_halvings: 24,
        }
    }
}

/// All fiber roots tracked over the `t`-torus grid with `x = t^d`.
#[derive(Clone, Debug)]
pub struct ExtractionGrid {
    pub d: usize,
    pub grid: usize,
    /// `log |t_i|`.
    pub t_log_radius: Vec<f64>,
    /// `values[node][sheet]`, sheets in basepoint order.
    pub values: Vec<Vec<C64>>,
    /// Per sheet: every wrap-around seam returns the sheet to itself.
    pub seam_closed: Vec<bool>,
}

impl ExtractionGrid {
    pub fn dim(&self) -> usize {
        self.t_log_radius.len()
    }

    fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        (0..self.dim())
            .map(|_| {
                let i = idx % self.grid;
                idx /= self.grid;
                i
            })
            .collect()
    }

    /// Values of one sheet at every node.
    pub fn sheet(&self, sheet: usize) -> Vec<C64> {
        self.values.iter().map(|v| v[sheet]).collect()
    }
}

fn x_angles(m: &[usize], g: usize, d: usize) -> Vec<f64> {
    m.iter().map(|&k| d as f64 * TAU * k as f64 / g as f64).collect()
}

/// Tracks every fiber root over the grid `t_m = r e^{2 pi i m / G}`,
/// checking closure across each wrap-around seam.
pub fn track_grid(fiber: &Fiber, t_log_radius: &[f64], d: usize, config: &ExtractionConfig) -> Result<ExtractionGrid> {
    let n = fiber.base_dim();
    let g = config.grid;
    let rho: Vec<f64> = t_log_radius.iter().map(|r| r * d as f64).collect();
    let total = g.pow(n as u32);
    let mut grid = ExtractionGrid { d, grid: g, t_log_radius: t_log_radius.to_vec(), values: Vec::with_capacity(total), seam_closed: vec![] };

    let base = crate::monodromy::fiber_basepoint(fiber, &rho, &vec![0.0; n], &Default::default())?;
    let k = base.roots.len();
    grid.values.push(base.roots);
    for idx in 1..total {
        let m = grid.multi_index(idx);
        let axis = m.iter().position(|&v| v > 0).expect("nonzero node");
        let mut pm = m.clone();
        pm[axis] -= 1;
        let parent = grid.flat(&pm);
        let next = fiber
            .continue_roots(&rho, &x_angles(&pm, g, d), &x_angles(&m, g, d), &grid.values[parent], config.edge_steps, config.max_halvings)
            .ok_or(PuiseuxError::Tracking { from: parent, to: idx })?;
        grid.values.push(next);
    }

    let mut closed = vec![true; k];
    for idx in 0..total {
        let m = grid.multi_index(idx);
        for axis in 0..n {
            if m[axis] != g - 1 {
                continue;
            }
            let mut wrap = m.clone();
            wrap[axis] = g;
            let mut start = m.clone();
            start[axis] = 0;
            let ends = fiber
                .continue_roots(&rho, &x_angles(&m, g, d), &x_angles(&wrap, g, d), &grid.values[idx], config.edge_steps, config.max_halvings)
                .ok_or(PuiseuxError::Tracking { from: idx, to: grid.flat(&start) })?;
            let target = &grid.values[grid.flat(&start)];
            for (sheet, z) in ends.iter().enumerate() {
                if nearest(target, *z) != sheet {
                    closed[sheet] = false;
                }
            }
        }
    }
    grid.seam_closed = closed;
    Ok(grid)
}

impl ExtractionGrid {
    fn flat(&self, m: &[usize]) -> usize {
        m.iter().rev().fold(0, |acc, &i| acc * self.grid + i)
    }
}

/// In-place unnormalised forward DFT along every axis (axis 0 fastest).
pub fn fft_nd(data: &mut [C64], g: usize, n: usize) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(g);
    let mut line = vec![C64::new(0.0, 0.0); g];
    for axis in 0..n {
        let stride = g.pow(axis as u32);
        for start in 0..data.len() {
            if (start / stride) % g != 0 {
                continue;
            }
            for (i, v) in line.iter_mut().enumerate() {
                *v = data[start + i * stride];
            }
            fft.process(&mut line);
            for (i, v) in line.iter().enumerate() {
                data[start + i * stride] = *v;
            }
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ExtractionDiagnostics {
    pub seam_closed: bool,
    /// Largest DFT magnitude in the outer band over the largest overall.
    pub alias_ratio: f64,
    /// Estimated absolute error of `a_I r^I`.
    pub noise_floor: f64,
    /// Largest well-determined `|a_I|`; tolerances are relative to it.
    pub scale: f64,
    pub window: usize,
    /// Exponents inside the weight bound left out as unresolvable.
    pub unresolved: usize,
    /// `max |phi|` over the grid.
    pub max_abs: f64,
}

/// A truncated branch `y = sum a_I t^I` with `x = t^d`.
#[derive(Clone, Debug, Serialize)]
pub struct PuiseuxExpansion {
    pub d: usize,
    pub coefficients: BTreeMap<LatticeVector, C64>,
    /// Cone the support is tested against.
    pub support_cone: Cone,
    pub component_order: LatticeVector,
    pub branch_id: usize,
    pub sheet: usize,
    /// Grading vector `w` and the bound on `w . I`.
    pub weight: LatticeVector,
    pub max_weight: i64,
    pub t_log_radius: Vec<f64>,
    pub grid: usize,
    pub diagnostics: ExtractionDiagnostics,
}

impl PuiseuxExpansion {
    pub fn evaluate(&self, t: &[C64]) -> C64 {
        self.coefficients
            .iter()
            .map(|(e, c)| e.0.iter().zip(t).fold(*c, |m, (&k, ti)| if k == 0 { m } else { m * ti.powi(k as i32) }))
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coefficients.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Exponent of least weight (ties broken lexicographically) among
    /// coefficients above `tol` relative to the largest.
    pub fn apex(&self, tol: f64) -> Option<LatticeVector> {
        let m = self.max_abs();
        self.coefficients
            .iter()
            .filter(|(_, c)| c.norm() > tol * m)
            .map(|(e, _)| e)
            .min_by(|a, b| self.weight.dot(a).cmp(&self.weight.dot(b)).then(a.cmp(b)))
            .cloned()
    }
}

/// Sum of the dual generators of `cone`: a grading that is positive on the
/// cone minus its lineality.
pub fn grading_for(cone: &Cone) -> LatticeVector {
    cone.dual_generators().iter().fold(LatticeVector::zero(cone.dim()), |a, b| &a + b)
}

pub struct ExtractRequest<'a> {
    pub grid: &'a ExtractionGrid,
    pub sheet: usize,
    pub branch_id: usize,
    pub support_cone: &'a Cone,
    pub component_order: &'a LatticeVector,
    pub weight: &'a LatticeVector,
}

/// Discrete Cauchy coefficients of one sheet over the tracked grid.
pub fn extract_expansion(req: &ExtractRequest<'_>, config: &ExtractionConfig) -> Result<PuiseuxExpansion> {
    let grid = req.grid;
    let g = grid.grid;
    let n = grid.dim();
    if req.sheet >= grid.values[0].len() {
        return Err(PuiseuxError::NoSuchSheet(req.sheet));
    }
    if g < 3 {
        return Err(PuiseuxError::GridTooSmall { grid: g });
    }
    let mut data = grid.sheet(req.sheet);
    let total = data.len();
    let max_abs = data.iter().map(|z| z.norm()).fold(0.0, f64::max);
    fft_nd(&mut data, g, n);
    let inv = 1.0 / total as f64;
    data.iter_mut().for_each(|z| *z *= inv);

    let signed = |k: usize| if k <= g / 2 { k as i64 } else { k as i64 - g as i64 };
    let band_edge = (g / 2 - g / 16) as i64;
    let mut peak = 0.0f64;
    let mut band: Vec<f64> = Vec::new();
    for (idx, z) in data.iter().enumerate() {
        let mut k = idx;
        let mut in_band = false;
        for _ in 0..n {
            in_band |= signed(k % g).abs() >= band_edge;
            k /= g;
        }
        peak = peak.max(z.norm());
        if in_band {
            band.push(z.norm());
        }
    }
    let band_max = band.iter().copied().fold(0.0, f64::max);
    band.sort_by(f64::total_cmp);
    let band_median = band.get(band.len() / 2).copied().unwrap_or(0.0);
    let roundoff = 8.0 * f64::EPSILON * max_abs / (total as f64).sqrt();
    let noise_floor = roundoff.max(band_median);

    let half = ((g - 1) / 2) as i64;
    let mut candidates: Vec<(LatticeVector, C64, f64)> = Vec::new();
    let mut idx_vec = vec![-half; n];
    loop {
        let e = LatticeVector(idx_vec.clone());
        if req.weight.is_zero() || req.weight.dot(&e) <= config.max_weight {
            let flat = idx_vec.iter().rev().fold(0usize, |acc, &i| acc * g + i.rem_euclid(g as i64) as usize);
            let log_r: f64 = idx_vec.iter().zip(&grid.t_log_radius).map(|(&i, r)| i as f64 * r).sum();
            let r_i = log_r.exp();
            candidates.push((e, data[flat] / r_i, noise_floor / r_i));
        }
        let mut a = 0;
        while a < n {
            idx_vec[a] += 1;
            if idx_vec[a] <= half {
                break;
            }
            idx_vec[a] = -half;
            a += 1;
        }
        if a == n {
            break;
        }
    }
    let scale = candidates
        .iter()
        .filter(|(_, a, err)| *err <= 1e-3 * a.norm())
        .map(|(_, a, _)| a.norm())
        .fold(0.0, f64::max);
    let mut coefficients = BTreeMap::new();
    let mut unresolved = 0;
    let mut window = 0;
    for (e, a, err) in candidates {
        if !(err <= config.resolve_tol * scale) {
            unresolved += 1;
            continue;
        }
        window += 1;
        if a.norm() > config.drop_tol * scale {
            coefficients.insert(e, a);
        }
    }
    let diagnostics = ExtractionDiagnostics {
        seam_closed: grid.seam_closed[req.sheet],
        alias_ratio: if peak > 0.0 { band_max / peak } else { 0.0 },
        noise_floor,
        scale,
        window,
        unresolved,
        max_abs,
    };
    Ok(PuiseuxExpansion {
        d: grid.d,
        coefficients,
        support_cone: req.support_cone.clone(),
        component_order: req.component_order.clone(),
        branch_id: req.branch_id,
        sheet: req.sheet,
        weight: req.weight.clone(),
        max_weight: config.max_weight,
        t_log_radius: grid.t_log_radius.clone(),
        grid: g,
        diagnostics,
    })
}

impl ExtractionDiagnostics {
    pub fn passes(&self, config: &ExtractionConfig) -> bool {
        self.seam_closed && self.alias_ratio <= config.alias_tol
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportReport {
    /// Largest `|a_I|` outside the cone relative to the largest `|a_I|`.
    pub max_outside: f64,
    pub offending: Vec<LatticeVector>,
    pub passed: bool,
    /// Translation applied before testing (`None` for the literal test).
    pub apex: Option<LatticeVector>,
}

fn support_against(e: &PuiseuxExpansion, tol: f64, apex: Option<LatticeVector>) -> SupportReport {
    let m = e.max_abs();
    let mut max_outside = 0.0f64;
    let mut offending = Vec::new();
    for (i, c) in &e.coefficients {
        let shifted = match &apex {
            Some(a) => i - a,
            None => i.clone(),
        };
        if !e.support_cone.contains_lattice(&shifted) {
            let rel = if m > 0.0 { c.norm() / m } else { 0.0 };
            max_outside = max_outside.max(rel);
            if rel > tol {
                offending.push(i.clone());
            }
        }
    }
    SupportReport { max_outside, offending, passed: max_outside <= tol, apex }
}

/// Relative mass of the coefficients lying outside the support cone.
pub fn check_support(e: &PuiseuxExpansion, tol: f64) -> SupportReport {
    support_against(e, tol, None)
}

/// As [`check_support`] after translating the cone to the least-weight exponent.
pub fn check_support_translated(e: &PuiseuxExpansion, tol: f64) -> SupportReport {
    let apex = e.apex(tol).unwrap_or_else(|| LatticeVector::zero(e.support_cone.dim()));
    support_against(e, tol, Some(apex))
}

/// A held-out point of the `t`-torus in log-polar form.
#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    pub t_log: Vec<f64>,
    pub angles: Vec<f64>,
}

/// `count` random-angle samples moved `depth` (in `log |x|`) along `-w`.
pub fn held_out_samples(e: &PuiseuxExpansion, depth: f64, count: usize, seed: u64) -> Vec<Sample> {
    let w = e.weight.to_f64();
    let norm = w.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let shift: Vec<f64> = if norm > 0.0 { w.iter().map(|v| -v / norm * depth / e.d as f64).collect() } else { vec![0.0; w.len()] };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Sample {
            t_log: e.t_log_radius.iter().zip(&shift).map(|(r, s)| r + s).collect(),
            angles: (0..w.len()).map(|_| rng.gen::<f64>() * TAU).collect(),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    /// Max over samples of `|F| / sum |c_a z^a|`.
    pub max_relative: f64,
    pub max_absolute: f64,
    pub samples: usize,
}

/// Residual of `F(t^d, phi(t))` at the given samples.
pub fn verify_residual(fiber: &Fiber, e: &PuiseuxExpansion, samples: &[Sample]) -> ResidualReport {
    let mut max_relative = 0.0f64;
    let mut max_absolute = 0.0f64;
    for s in samples {
        let t: Vec<C64> = s.t_log.iter().zip(&s.angles).map(|(r, a)| C64::from_polar(r.exp(), *a)).collect();
        let mut z: Vec<C64> = t.iter().map(|ti| ti.powi(e.d as i32)).collect();
        z.push(e.evaluate(&t));
        let v = fiber.sliced().evaluate(&z).norm();
        let mag = fiber.sliced().magnitude(&z);
        max_absolute = max_absolute.max(v);
        max_relative = max_relative.max(if mag > 0.0 { v / mag } else { v });
    }
    ResidualReport { max_relative, max_absolute, samples: samples.len() }
}

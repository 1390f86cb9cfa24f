//! Amoeba membership, the order map, rasters and complement components.
//!
//! A point `x` of log space is off the amoeba exactly when, for every axis
//! `j`, no root of the one-variable slice `z_j -> f(.., z_j, ..)` has modulus
//! `e^{x_j}`. The number of slice roots inside that circle, shifted by the
//! slice's lowest exponent, is then the `j`-th component of the order.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::TAU;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::LatticeVector;
use crate::laurent::{Coefficient, ComplexEmbedding, LaurentError, LaurentPolynomial};
use crate::polyhedra::{recession_cone_of_order, sigma_p, Cone, LatticePolytope, PolyhedraError};
use crate::roots::{roots_from, RootError};

type C64 = Complex<f64>;

/// Coordinates of a point of `R^N` in the image of `log|.|`.
pub type LogPoint = Vec<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AmoebaError {
    #[error("point too close to the amoeba: slice root at log distance {distance:.3e} on axis {axis}")]
    TooClose { axis: usize, distance: f64 },
    #[error("order samples disagree: {first} vs {other}")]
    Disagreement { first: LatticeVector, other: LatticeVector },
    #[error("slice along axis {0} is identically zero")]
    DegenerateSlice(usize),
    #[error("order integral not within 0.25 of an integer: {values:?}")]
    NonConvergent { values: Vec<f64> },
    #[error("order {0} is not a lattice point of the Newton polytope")]
    LabelOutsidePolytope(LatticeVector),
    #[error("{0} is not a vertex of the Newton polytope")]
    NotVertex(LatticeVector),
    #[error("no scheduled point realizes order {0}")]
    ScheduleExhausted(LatticeVector),
    #[error("expected a point with {expected} coordinates, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    Polyhedra(#[from] PolyhedraError),
}

pub type Result<T> = std::result::Result<T, AmoebaError>;

/// A polynomial regrouped by powers of each variable, for fast slicing.
#[derive(Clone, Debug)]
pub struct SlicedPolynomial {
    nvars: usize,
    terms: Vec<(Vec<i64>, C64)>,
    axes: Vec<AxisSlice>,
}

#[derive(Clone, Debug)]
struct AxisSlice {
    min_exp: i64,
    degree: usize,
}

impl SlicedPolynomial {
    pub fn new<T: Coefficient + ComplexEmbedding>(f: &LaurentPolynomial<T>) -> Self {
        let nvars = f.nvars();
        let terms: Vec<(Vec<i64>, C64)> = f.terms().map(|(e, c)| (e.0.clone(), c.embed::<f64>())).collect();
        let axes = (0..nvars)
            .map(|j| {
                let lo = f.min_degree(j).unwrap_or(0);
                let hi = f.max_degree(j).unwrap_or(0);
                AxisSlice { min_exp: lo, degree: (hi - lo) as usize }
            })
            .collect();
        SlicedPolynomial { nvars, terms, axes }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Lowest exponent of variable `axis`.
    pub fn min_exp(&self, axis: usize) -> i64 {
        self.axes[axis].min_exp
    }

    pub fn degree(&self, axis: usize) -> usize {
        self.axes[axis].degree
    }

    pub fn terms(&self) -> &[(Vec<i64>, C64)] {
        &self.terms
    }

    /// Slice coefficients (ascending, shifted by `min_exp`) at
    /// `z_i = exp(x_i + i theta_i)` for `i != axis`.
    pub fn coefficients_polar(&self, axis: usize, x: &[f64], theta: &[f64]) -> Vec<C64> {
        let a = &self.axes[axis];
        let mut out = vec![C64::new(0.0, 0.0); a.degree + 1];
        for (e, c) in &self.terms {
            let mut lm = 0.0;
            let mut ph = 0.0;
            for i in 0..self.nvars {
                if i != axis && e[i] != 0 {
                    lm += e[i] as f64 * x[i];
                    ph += e[i] as f64 * theta[i];
                }
            }
            out[(e[axis] - a.min_exp) as usize] += c * C64::from_polar(lm.exp(), ph);
        }
        out
    }

    /// Slice coefficients at an arbitrary torus point (entry `axis` ignored).
    pub fn coefficients_at(&self, axis: usize, z: &[C64]) -> Vec<C64> {
        let a = &self.axes[axis];
        let mut out = vec![C64::new(0.0, 0.0); a.degree + 1];
        for (e, c) in &self.terms {
            let mut m = *c;
            for i in 0..self.nvars {
                if i != axis && e[i] != 0 {
                    m *= z[i].powi(e[i] as i32);
                }
            }
            out[(e[axis] - a.min_exp) as usize] += m;
        }
        out
    }

    pub fn evaluate(&self, z: &[C64]) -> C64 {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(z).fold(*c, |m, (&k, zi)| if k == 0 { m } else { m * zi.powi(k as i32) }))
            .sum()
    }

    /// Sum of `|c_a z^a|`, the natural scale for residuals of `f(z)`.
    pub fn magnitude(&self, z: &[C64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(z).fold(c.norm(), |m, (&k, zi)| m * zi.norm().powi(k as i32)))
            .sum()
    }
}

/// Tunables for the sampling-based amoeba operations.
#[derive(Clone, Debug)]
pub struct AmoebaConfig {
    /// Independent angle samples that must agree in [`Amoeba::order_at`].
    pub samples: usize,
    /// Minimum `|log|root| - x_j|` accepted by [`Amoeba::order_at`].
    pub boundary_tol: f64,
    /// Angle grid per axis for membership tests.
    pub angle_resolution: usize,
    pub seed: u64,
}

impl Default for AmoebaConfig {
    fn default() -> Self {
        AmoebaConfig { samples: 8, boundary_tol: 1e-6, angle_resolution: 64, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CellKind {
    Amoeba,
    Complement,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    Amoeba,
    Complement(LatticeVector),
    Unknown,
}

impl Cell {
    pub fn kind(&self) -> CellKind {
        match self {
            Cell::Amoeba => CellKind::Amoeba,
            Cell::Complement(_) => CellKind::Complement,
            Cell::Unknown => CellKind::Unknown,
        }
    }

    pub fn label(&self) -> Option<&LatticeVector> {
        match self {
            Cell::Complement(p) => Some(p),
            _ => None,
        }
    }
}

/// Cell-centre classification of a box in log space. Axis 0 varies fastest.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AmoebaRaster {
    pub bounds: Vec<(f64, f64)>,
    pub resolution: usize,
    pub cells: Vec<Cell>,
}

impl AmoebaRaster {
    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        (0..self.dim())
            .map(|_| {
                let i = idx % self.resolution;
                idx /= self.resolution;
                i
            })
            .collect()
    }

    pub fn flat_index(&self, ix: &[usize]) -> usize {
        ix.iter().rev().fold(0, |acc, &i| acc * self.resolution + i)
    }

    pub fn center(&self, idx: usize) -> LogPoint {
        self.multi_index(idx)
            .iter()
            .zip(&self.bounds)
            .map(|(&i, &(lo, hi))| lo + (i as f64 + 0.5) * (hi - lo) / self.resolution as f64)
            .collect()
    }

    pub fn labels(&self) -> Vec<LatticeVector> {
        let mut v: Vec<LatticeVector> = self.cells.iter().filter_map(|c| c.label().cloned()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn count(&self, kind: CellKind) -> usize {
        self.cells.iter().filter(|c| c.kind() == kind).count()
    }

    fn neighbours(&self, idx: usize) -> Vec<usize> {
        let ix = self.multi_index(idx);
        let n = self.dim();
        let mut out = Vec::new();
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            let mut jx = Vec::with_capacity(n);
            let mut ok = true;
            let mut same = true;
            for &i in &ix {
                let off = (c % 3) as i64 - 1;
                c /= 3;
                same &= off == 0;
                let k = i as i64 + off;
                if k < 0 || k >= self.resolution as i64 {
                    ok = false;
                }
                jx.push(k as usize);
            }
            if ok && !same {
                out.push(self.flat_index(&jx));
            }
        }
        out
    }

    /// Pairs of face-adjacent complement cells with different labels. Zero
    /// when labels are constant on connected complement regions.
    pub fn label_conflicts(&self) -> usize {
        let mut n = 0;
        for idx in 0..self.cells.len() {
            let Some(a) = self.cells[idx].label() else { continue };
            let ix = self.multi_index(idx);
            for axis in 0..self.dim() {
                if ix[axis] + 1 < self.resolution {
                    let mut jx = ix.clone();
                    jx[axis] += 1;
                    if let Some(b) = self.cells[self.flat_index(&jx)].label() {
                        n += (a != b) as usize;
                    }
                }
            }
        }
        n
    }

    /// Chessboard distance from every cell to the nearest cell not labelled `label`.
    fn depth_map(&self, label: &LatticeVector) -> Vec<usize> {
        let mut depth = vec![usize::MAX; self.cells.len()];
        let mut queue = VecDeque::new();
        for (i, c) in self.cells.iter().enumerate() {
            if c.label() != Some(label) {
                depth[i] = 0;
                queue.push_back(i);
            }
        }
        while let Some(i) = queue.pop_front() {
            for j in self.neighbours(i) {
                if depth[j] == usize::MAX {
                    depth[j] = depth[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        depth
    }
}

/// A connected component of the amoeba complement, keyed by its order.
#[derive(Clone, Debug, Serialize)]
pub struct ComplementComponent {
    pub order: LatticeVector,
    pub representative: LogPoint,
    pub bounded: bool,
    pub support_cone: Cone,
    pub recession_cone: Cone,
}

impl ComplementComponent {
    pub fn new(np: &LatticePolytope, order: LatticeVector, representative: LogPoint) -> Result<Self> {
        if !np.contains_lattice(&order) {
            return Err(AmoebaError::LabelOutsidePolytope(order));
        }
        let support_cone = sigma_p(np, &order)?;
        let recession_cone = recession_cone_of_order(np, &order)?;
        Ok(ComplementComponent { bounded: recession_cone.is_zero(), order, representative, support_cone, recession_cone })
    }
}

/// A polynomial together with its Newton polytope and sampling settings.
#[derive(Clone, Debug)]
pub struct Amoeba {
    slices: SlicedPolynomial,
    newton: LatticePolytope,
    config: AmoebaConfig,
}

impl Amoeba {
    pub fn new<T: Coefficient + ComplexEmbedding>(f: &LaurentPolynomial<T>, config: AmoebaConfig) -> Result<Self> {
        Ok(Amoeba { slices: SlicedPolynomial::new(f), newton: f.newton_polytope()?, config })
    }

    pub fn nvars(&self) -> usize {
        self.slices.nvars
    }

    pub fn newton_polytope(&self) -> &LatticePolytope {
        &self.newton
    }

    pub fn config(&self) -> &AmoebaConfig {
        &self.config
    }

    pub fn slices(&self) -> &SlicedPolynomial {
        &self.slices
    }

    /// The zero locus of `f` misses the torus.
    pub fn is_empty(&self) -> bool {
        self.slices.terms.len() <= 1
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.nvars() {
            return Err(AmoebaError::Dimension { expected: self.nvars(), found: x.len() });
        }
        Ok(())
    }

    /// Roots in `z_axis` with the other coordinates at `exp(x_i + i theta_i)`.
    pub fn fiber_roots_slice(&self, x: &[f64], axis: usize, theta: &[f64]) -> Result<Vec<C64>> {
        self.check_dim(x)?;
        let coeffs = self.slices.coefficients_polar(axis, x, theta);
        match roots_from(&coeffs, None) {
            Err(RootError::ZeroPolynomial) => Err(AmoebaError::DegenerateSlice(axis)),
            other => Ok(other?),
        }
    }

    fn order_sample(&self, x: &[f64], theta: &[f64]) -> Result<LatticeVector> {
        let mut order = Vec::with_capacity(self.nvars());
        for axis in 0..self.nvars() {
            let roots = self.fiber_roots_slice(x, axis, theta)?;
            let mut inside = 0i64;
            for r in roots {
                let distance = (r.norm().ln() - x[axis]).abs();
                if distance < self.config.boundary_tol {
                    return Err(AmoebaError::TooClose { axis, distance });
                }
                inside += (r.norm().ln() < x[axis]) as i64;
            }
            order.push(inside + self.slices.min_exp(axis));
        }
        Ok(LatticeVector(order))
    }

    /// Order of the complement component containing `x`, by slice root
    /// counting at `samples` random angle vectors that must all agree.
    pub fn order_at(&self, x: &[f64], seed: u64) -> Result<LatticeVector> {
        self.check_dim(x)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut first: Option<LatticeVector> = None;
        for _ in 0..self.config.samples.max(1) {
            let theta: Vec<f64> = (0..self.nvars()).map(|_| rng.gen::<f64>() * TAU).collect();
            let o = self.order_sample(x, &theta)?;
            match &first {
                None => first = Some(o),
                Some(p) if *p != o => return Err(AmoebaError::Disagreement { first: p.clone(), other: o }),
                _ => {}
            }
        }
        Ok(first.expect("at least one sample"))
    }

    /// Trapezoidal evaluation of the torus integral of `z_j f_j / f` on a
    /// `q^N` grid. Errors unless every coordinate is within 0.25 of an integer.
    pub fn order_integral(&self, x: &[f64], q: usize) -> Result<Vec<f64>> {
        let values = self.order_integral_raw(x, q)?;
        if values.iter().any(|v| (v - v.round()).abs() > 0.25) {
            return Err(AmoebaError::NonConvergent { values });
        }
        Ok(values)
    }

    /// As [`Amoeba::order_integral`] without the integrality check.
    pub fn order_integral_raw(&self, x: &[f64], q: usize) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let n = self.nvars();
        let total = q.pow(n as u32);
        let mut acc = vec![C64::new(0.0, 0.0); n];
        for idx in 0..total {
            let mut k = idx;
            let theta: Vec<f64> = (0..n)
                .map(|_| {
                    let t = (k % q) as f64 * TAU / q as f64;
                    k /= q;
                    t
                })
                .collect();
            let mut f = C64::new(0.0, 0.0);
            let mut g = vec![C64::new(0.0, 0.0); n];
            for (e, c) in &self.slices.terms {
                let lm: f64 = e.iter().zip(x).map(|(&a, b)| a as f64 * b).sum();
                let ph: f64 = e.iter().zip(&theta).map(|(&a, b)| a as f64 * b).sum();
                let m = c * C64::from_polar(lm.exp(), ph);
                f += m;
                for j in 0..n {
                    g[j] += m * e[j] as f64;
                }
            }
            if f.norm() == 0.0 {
                return Err(AmoebaError::TooClose { axis: 0, distance: 0.0 });
            }
            for j in 0..n {
                acc[j] += g[j] / f;
            }
        }
        Ok(acc.iter().map(|a| a.re / total as f64).collect())
    }

    /// True when some slice root over a `g^{N-1}` angle grid, along any
    /// axis, has log-modulus within `tol` of the matching coordinate of `x`.
    pub fn is_in_amoeba(&self, x: &[f64], g: usize, tol: f64) -> Result<bool> {
        self.check_dim(x)?;
        let n = self.nvars();
        let total = g.pow(n as u32 - 1);
        for axis in 0..n {
            if self.slices.degree(axis) == 0 {
                continue;
            }
            let mut prev: Option<Vec<C64>> = None;
            for idx in 0..total {
                let mut k = idx;
                let theta: Vec<f64> = (0..n)
                    .map(|i| {
                        if i == axis {
                            return 0.0;
                        }
                        let t = (k % g) as f64 * TAU / g as f64;
                        k /= g;
                        t
                    })
                    .collect();
                let coeffs = self.slices.coefficients_polar(axis, x, &theta);
                let roots = match roots_from(&coeffs, prev.as_deref()) {
                    Ok(r) => r,
                    Err(RootError::ZeroPolynomial) => {
                        log::warn!("degenerate slice along axis {axis} skipped");
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                };
                if roots.iter().any(|r| (r.norm().ln() - x[axis]).abs() < tol) {
                    return Ok(true);
                }
                prev = Some(roots);
            }
        }
        Ok(false)
    }

    fn classify(&self, x: &[f64], g: usize, tol: f64, seed: u64) -> Cell {
        match self.is_in_amoeba(x, g, tol) {
            Ok(true) => Cell::Amoeba,
            Ok(false) => match self.order_at(x, seed) {
                Ok(p) => Cell::Complement(p),
                Err(_) => Cell::Unknown,
            },
            Err(_) => Cell::Unknown,
        }
    }

    /// Classifies the centres of a `resolution^N` grid over `bounds`.
    /// `tol` defaults to twice the widest cell.
    pub fn raster(&self, bounds: &[(f64, f64)], resolution: usize, tol: Option<f64>) -> Result<AmoebaRaster> {
        if bounds.len() != self.nvars() {
            return Err(AmoebaError::Dimension { expected: self.nvars(), found: bounds.len() });
        }
        let width = bounds.iter().map(|(a, b)| b - a).fold(0.0, f64::max);
        let tol = tol.unwrap_or(2.0 * width / resolution as f64);
        let g = self.config.angle_resolution;
        let mut raster = AmoebaRaster { bounds: bounds.to_vec(), resolution, cells: Vec::new() };
        let total = resolution.pow(self.nvars() as u32);
        let seed = self.config.seed;
        raster.cells = (0..total)
            .into_par_iter()
            .map(|idx| {
                let x = raster.center(idx);
                self.classify(&x, g, tol, cell_seed(seed, idx as u64))
            })
            .collect();
        Ok(raster)
    }

    /// One component per order label found in `raster`, represented by its
    /// deepest cell.
    pub fn components(&self, raster: &AmoebaRaster) -> Result<Vec<ComplementComponent>> {
        let mut out = Vec::new();
        for label in raster.labels() {
            if !self.newton.contains_lattice(&label) {
                return Err(AmoebaError::LabelOutsidePolytope(label));
            }
            let depth = raster.depth_map(&label);
            let best = (0..depth.len())
                .filter(|&i| raster.cells[i].label() == Some(&label))
                .max_by(|&a, &b| depth[a].cmp(&depth[b]).then(b.cmp(&a)))
                .expect("label has cells");
            out.push(ComplementComponent::new(&self.newton, label, raster.center(best))?);
        }
        Ok(out)
    }

    /// First point `t c` of the schedule with order `p`, where `c` is an
    /// interior direction of the recession cone of the component.
    pub fn representative_for_vertex(&self, p: &LatticeVector, schedule: &[f64]) -> Result<LogPoint> {
        if !self.newton.is_vertex(p) {
            return Err(AmoebaError::NotVertex(p.clone()));
        }
        let dir = self.vertex_direction(p)?;
        if dir.iter().all(|&c| c == 0.0) {
            return Ok(vec![0.0; self.nvars()]);
        }
        for (k, &t) in schedule.iter().enumerate() {
            let x: Vec<f64> = dir.iter().map(|c| c * t).collect();
            if let Ok(o) = self.order_at(&x, cell_seed(self.config.seed, k as u64)) {
                if &o == p {
                    return Ok(x);
                }
            }
        }
        Err(AmoebaError::ScheduleExhausted(p.clone()))
    }

    /// Interior direction of the recession cone at order `p`, scaled to unit
    /// max-norm (zero when the cone is the whole space).
    pub fn vertex_direction(&self, p: &LatticeVector) -> Result<Vec<f64>> {
        let rec = recession_cone_of_order(&self.newton, p)?;
        Ok(unit_direction(&rec))
    }
}

/// The map `mu(z) = (log|z_1|, ..., log|z_N|)`.
pub fn log_modulus(z: &[C64]) -> LogPoint {
    z.iter().map(|w| w.norm().ln()).collect()
}

/// The torus point `z_j = exp(x_j + i theta_j)`.
pub fn torus_point(x: &[f64], theta: &[f64]) -> Vec<C64> {
    x.iter().zip(theta).map(|(&r, &t)| C64::from_polar(r.exp(), t)).collect()
}

/// Sum of the extreme rays of `c`, scaled to unit max-norm.
pub fn unit_direction(c: &Cone) -> Vec<f64> {
    let v = c.interior_vector().to_f64();
    let m = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if m == 0.0 {
        v
    } else {
        v.iter().map(|x| x / m).collect()
    }
}

/// Default search schedule for representatives: `0.25 * sqrt(2)^k`.
pub fn default_schedule() -> Vec<f64> {
    (0..15).map(|k| 0.25 * 2f64.powf(k as f64 / 2.0)).collect()
}

/// Deterministic per-item seed derived from a master seed.
pub fn cell_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.gen()
}

/// Number of connected raster regions carrying each label.
pub fn region_counts(raster: &AmoebaRaster) -> BTreeMap<LatticeVector, usize> {
    let mut seen = vec![false; raster.cells.len()];
    let mut out = BTreeMap::new();
    for start in 0..raster.cells.len() {
        let Some(label) = raster.cells[start].label() else { continue };
        if seen[start] {
            continue;
        }
        *out.entry(label.clone()).or_insert(0) += 1;
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(i) = queue.pop_front() {
            for j in raster.neighbours(i) {
                if !seen[j] && raster.cells[j].label() == Some(label) {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    out
}


#[cfg(test)]
mod properties {
    use super::*;
    use crate::laurent::{parse_polynomial, MonomialMap};
    use crate::RationalPolynomial;
    use proptest::prelude::*;

    const CUBIC: &str = "50*x^3+83*x^2*y+24*x*y^2+y^3+392*x^2+414*x*y+50*y^2-28*x+59*y-100";

    fn poly(text: &str) -> RationalPolynomial {
        parse_polynomial(text, &["x".to_string(), "y".to_string()]).unwrap()
    }

    fn amoeba(text: &str) -> Amoeba {
        Amoeba::new(&poly(text), AmoebaConfig::default()).unwrap()
    }

    /// Order of the line `x + y - 1` from the triangle inequality, when the
    /// point is clear of the amoeba by a factor `1.1`.
    fn line_order(x: f64, y: f64) -> Option<LatticeVector> {
        let (a, b) = (x.exp(), y.exp());
        if 1.1 * (a + b) < 1.0 {
            Some(LatticeVector::from([0, 0]))
        } else if a > 1.1 * (b + 1.0) {
            Some(LatticeVector::from([1, 0]))
        } else if b > 1.1 * (a + 1.0) {
            Some(LatticeVector::from([0, 1]))
        } else {
            None
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn line_orders_follow_the_triangle_inequality(x in -5.0f64..5.0, y in -5.0f64..5.0, seed in any::<u64>()) {
            let a = amoeba("x + y - 1");
            match line_order(x, y) {
                Some(p) => {
                    prop_assert_eq!(a.order_at(&[x, y], seed).unwrap(), p);
                    prop_assert!(!a.is_in_amoeba(&[x, y], 64, 0.01).unwrap());
                }
                None => {
                    let (p, q) = (x.exp(), y.exp());
                    if p + q > 1.0 && p + 1.0 > q && q + 1.0 > p {
                        prop_assert!(a.is_in_amoeba(&[x, y], 256, 0.05).unwrap());
                    }
                }
            }
        }

        #[test]
        fn integral_agrees_with_root_count(x in -6.0f64..8.0, y in -6.0f64..8.0) {
            let a = amoeba(CUBIC);
            let Ok(p) = a.order_at(&[x, y], 3) else { return Ok(()) };
            prop_assume!(!a.is_in_amoeba(&[x, y], 64, 0.1).unwrap());
            let v = a.order_integral_raw(&[x, y], 128).unwrap();
            prop_assert!(v.iter().zip(&p.0).all(|(v, &k)| (v - k as f64).abs() < 1e-3), "{:?} vs {:?}", v, p);
            prop_assert!(a.newton_polytope().contains_lattice(&p));
        }

        #[test]
        fn components_are_stable_along_their_recession_cones(
            vertex in 0usize..6, s in prop::collection::vec(0.0f64..4.0, 3),
        ) {
            let (text, vertices) = match vertex {
                0..=2 => ("x + y - 1", [[0, 0], [1, 0], [0, 1]]),
                _ => (CUBIC, [[0, 0], [3, 0], [0, 3]]),
            };
            let a = amoeba(text);
            let p = LatticeVector::from(vertices[vertex % 3]);
            let x0 = a.representative_for_vertex(&p, &default_schedule()).unwrap();
            let rec = recession_cone_of_order(a.newton_polytope(), &p).unwrap();
            let mut x = x0.clone();
            for (g, t) in rec.generators().iter().zip(s.iter().cycle()) {
                for (xi, gi) in x.iter_mut().zip(&g.0) {
                    *xi += t * *gi as f64 / g.0.iter().map(|v| v.abs()).max().unwrap() as f64;
                }
            }
            prop_assert_eq!(a.order_at(&x, 11).unwrap(), p);
        }

        #[test]
        fn orders_push_forward_under_unimodular_maps(
            ops in prop::collection::vec((0usize..2, -2i64..=2), 0..4),
            u in prop::collection::vec(-3.0f64..3.0, 2),
        ) {
            let mut m = vec![vec![1i64, 0], vec![0, 1]];
            for (i, k) in ops {
                m.iter_mut().for_each(|r| r[1 - i] += k * r[i]);
            }
            let m = MonomialMap::new(m).unwrap();
            let f = poly("x + y - 1");
            let a = Amoeba::new(&f, AmoebaConfig::default()).unwrap();
            let g = Amoeba::new(&f.substitute_monomial(&m), AmoebaConfig::default()).unwrap();
            let x = m.transpose_apply(&u);
            let Some(p) = line_order(x[0], x[1]) else { return Ok(()) };
            prop_assert_eq!(a.order_at(&x, 5).unwrap(), p.clone());
            prop_assert_eq!(g.order_at(&u, 5).unwrap(), m.map_exponent(&p));
        }
    }
}

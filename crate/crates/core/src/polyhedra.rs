//! Rational polyhedral cones and lattice polytopes with exact arithmetic.
//!
//! Cones are stored through a generating set of primitive lattice vectors.
//! The dual description is computed once at construction by the double
//! description method, so membership tests are a handful of integer dot
//! products.

use num_integer::Integer;
use num_traits::Signed;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::lattice::{column_hermite, dot, dot_i128, primitive_i128, rank, LatticeVector, RationalVector};

/// Largest ambient dimension accepted by [`Cone::new`].
pub const DEFAULT_MAX_DIM: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyhedraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ambient dimension {dim} exceeds the double-description cap {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("cone is not regular")]
    NotRegular,
    #[error("cone is not strongly convex")]
    NotStronglyConvex,
    #[error("point {0} lies outside the polytope")]
    PointOutsidePolytope(LatticeVector),
    #[error("operation only supported in dimension {supported}, got {dim}")]
    UnsupportedDimension { dim: usize, supported: usize },
    #[error("empty point set")]
    Empty,
}

pub type Result<T> = std::result::Result<T, PolyhedraError>;

/// Output of the double description method: `cone(rays) + span(lineality)`.
#[derive(Debug, Clone)]
pub(crate) struct DualDescription {
    pub rays: Vec<Vec<i64>>,
    pub lineality: Vec<Vec<i64>>,
}

impl DualDescription {
    fn generators(&self) -> Vec<Vec<i64>> {
        let mut out = self.rays.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(l.iter().map(|x| -x).collect());
        }
        out
    }
}

/// Generators of `{x : x . a >= 0 for every a in constraints}` in `R^dim`.
///
/// Fourier-Motzkin style double description with the algebraic adjacency
/// test; all arithmetic is on integers with gcd normalisation.
pub(crate) fn double_description(constraints: &[Vec<i64>], dim: usize) -> DualDescription {
    let mut lineality: Vec<Vec<i64>> = (0..dim)
        .map(|i| (0..dim).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut rays: Vec<Vec<i64>> = Vec::new();
    let mut processed: Vec<Vec<i64>> = Vec::new();

    for a in constraints {
        if a.iter().all(|&x| x == 0) {
            continue;
        }
        if let Some(idx) = lineality.iter().position(|l| dot(a, l) != 0) {
            let mut l0 = lineality.remove(idx);
            if dot(a, &l0) < 0 {
                l0.iter_mut().for_each(|x| *x = -*x);
            }
            let al0 = dot_i128(a, &l0);
            let project = |v: &Vec<i64>| -> Vec<i64> {
                let av = dot_i128(a, v);
                let w: Vec<i128> = v
                    .iter()
                    .zip(&l0)
                    .map(|(&x, &y)| al0 * x as i128 - av * y as i128)
                    .collect();
                primitive_i128(&w)
            };
            lineality = lineality.iter().map(project).collect();
            rays = rays.iter().map(project).collect();
            rays.push(l0);
        } else {
            let lin_dim = lineality.len();
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            let mut next = Vec::new();
            for r in &rays {
                match dot(a, r).signum() {
                    1 => {
                        pos.push(r.clone());
                        next.push(r.clone());
                    }
                    0 => next.push(r.clone()),
                    _ => neg.push(r.clone()),
                }
            }
            for p in &pos {
                for n in &neg {
                    if !adjacent(p, n, &processed, dim, lin_dim) {
                        continue;
                    }
                    let ap = dot_i128(a, p);
                    let an = dot_i128(a, n);
                    let w: Vec<i128> = n
                        .iter()
                        .zip(p)
                        .map(|(&x, &y)| ap * x as i128 - an * y as i128)
                        .collect();
                    next.push(primitive_i128(&w));
                }
            }
            rays = next;
        }
        processed.push(a.clone());
        rays.retain(|r| r.iter().any(|&x| x != 0));
        rays.sort();
        rays.dedup();
    }
    DualDescription { rays, lineality }
}

fn adjacent(p: &[i64], n: &[i64], processed: &[Vec<i64>], dim: usize, lin_dim: usize) -> bool {
    let target = dim as isize - lin_dim as isize - 2;
    if target <= 0 {
        return true;
    }
    let common: Vec<Vec<i64>> = processed
        .iter()
        .filter(|c| dot(c, p) == 0 && dot(c, n) == 0)
        .cloned()
        .collect();
    if (common.len() as isize) < target {
        return false;
    }
    rank(&common) as isize == target
}

fn normalize_generators(gens: &[LatticeVector]) -> Vec<LatticeVector> {
    let mut out: Vec<LatticeVector> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(LatticeVector::primitive)
        .collect();
    out.sort();
    out.dedup();
    out
}

/// A finitely generated rational polyhedral cone in `R^N`.
#[derive(Clone, Debug)]
pub struct Cone {
    dim: usize,
    generators: Vec<LatticeVector>,
    dual_generators: Vec<LatticeVector>,
    strongly_convex: bool,
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.same_set(other)
    }
}

impl Cone {
    pub fn new(dim: usize, generators: Vec<LatticeVector>) -> Result<Cone> {
        Cone::with_dim_cap(dim, generators, DEFAULT_MAX_DIM)
    }

    pub fn with_dim_cap(dim: usize, generators: Vec<LatticeVector>, max_dim: usize) -> Result<Cone> {
        if dim > max_dim {
            return Err(PolyhedraError::DimensionTooLarge { dim, max: max_dim });
        }
        if let Some(g) = generators.iter().find(|g| g.dim() != dim) {
            return Err(PolyhedraError::DimensionMismatch { expected: dim, found: g.dim() });
        }
        let generators = normalize_generators(&generators);
        let raw: Vec<Vec<i64>> = generators.iter().map(|g| g.0.clone()).collect();
        let dd = double_description(&raw, dim);
        let dual_generators = normalize_generators(
            &dd.generators().into_iter().map(LatticeVector).collect::<Vec<_>>(),
        );
        let dual_rows: Vec<Vec<i64>> = dual_generators.iter().map(|g| g.0.clone()).collect();
        let strongly_convex = rank(&dual_rows) == dim;
        Ok(Cone { dim, generators, dual_generators, strongly_convex })
    }

    pub fn zero(dim: usize) -> Cone {
        Cone::with_dim_cap(dim, vec![], usize::MAX).expect("zero cone")
    }

    pub fn whole_space(dim: usize) -> Cone {
        let gens = (0..dim)
            .flat_map(|i| {
                let e = LatticeVector::unit(dim, i);
                let m = -&e;
                [e, m]
            })
            .collect();
        Cone::with_dim_cap(dim, gens, usize::MAX).expect("whole space")
    }

    /// The nonnegative orthant.
    pub fn orthant(dim: usize) -> Cone {
        let gens = (0..dim).map(|i| LatticeVector::unit(dim, i)).collect();
        Cone::with_dim_cap(dim, gens, usize::MAX).expect("orthant")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[LatticeVector] {
        &self.generators
    }

    pub fn dual_generators(&self) -> &[LatticeVector] {
        &self.dual_generators
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.strongly_convex
    }

    /// True when the cone is all of `R^N`.
    pub fn is_whole_space(&self) -> bool {
        self.dual_generators.is_empty()
    }

    /// True when the cone is `{0}`.
    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn contains_lattice(&self, x: &LatticeVector) -> bool {
        self.dual_generators.iter().all(|w| dot_i128(&w.0, &x.0) >= 0)
    }

    pub fn contains(&self, x: &RationalVector) -> bool {
        self.dual_generators
            .iter()
            .all(|w| !x.dot_lattice(w).is_negative())
    }

    /// Signed slack of the worst dual inequality at a float point (>= 0 inside).
    pub fn min_slack(&self, x: &[f64]) -> f64 {
        self.dual_generators
            .iter()
            .map(|w| w.0.iter().zip(x).map(|(&a, b)| a as f64 * b).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    /// `-C`.
    pub fn negate(&self) -> Cone {
        Cone::with_dim_cap(self.dim, self.generators.iter().map(|g| -g).collect(), usize::MAX)
            .expect("negation preserves dimension")
    }

    /// Minimal description `(extreme rays, lineality basis)`.
    pub fn minimal_generators(&self) -> (Vec<LatticeVector>, Vec<LatticeVector>) {
        let raw: Vec<Vec<i64>> = self.dual_generators.iter().map(|g| g.0.clone()).collect();
        let dd = double_description(&raw, self.dim);
        (
            dd.rays.into_iter().map(LatticeVector).collect(),
            dd.lineality.into_iter().map(LatticeVector).collect(),
        )
    }

    /// A lattice vector in the relative interior (sum of the extreme rays).
    pub fn interior_vector(&self) -> LatticeVector {
        let (rays, _) = self.minimal_generators();
        rays.iter()
            .fold(LatticeVector::zero(self.dim), |acc, r| &acc + r)
    }

    /// Set equality, decided through mutual containment of generators.
    pub fn same_set(&self, other: &Cone) -> bool {
        self.dim == other.dim
            && self.generators.iter().all(|g| other.contains_lattice(g))
            && other.generators.iter().all(|g| self.contains_lattice(g))
    }
}

#[derive(Serialize, Deserialize)]
struct ConeJson {
    dim: usize,
    generators: Vec<LatticeVector>,
}

impl Serialize for Cone {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConeJson { dim: self.dim, generators: self.generators.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cone {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ConeJson::deserialize(d)?;
        Cone::with_dim_cap(j.dim, j.generators, usize::MAX).map_err(serde::de::Error::custom)
    }
}

/// `{x : x . u >= 0 for all u in c}`.
pub fn dual_cone(c: &Cone) -> Result<Cone> {
    Cone::new(c.dim, c.dual_generators.clone())
}

/// Dual of a regular cone through a unimodular completion of its generators.
///
/// The first `s` columns of `(M^-1)^T` generate the pointed part and the
/// remaining columns, with both signs, span the orthogonal complement.
pub fn dual_cone_with_lineality(c: &Cone) -> Result<Cone> {
    if !is_regular(c) {
        return Err(PolyhedraError::NotRegular);
    }
    let n = c.dim;
    let s = c.generators.len();
    let rows: Vec<Vec<i64>> = c.generators.iter().map(|g| g.0.clone()).collect();
    let (h, v) = column_hermite(&rows, n);
    let hinv = invert_unimodular_lower(&h);
    // w = v * blockdiag(hinv, I)
    let mut w = v.clone();
    for (i, row) in v.iter().enumerate() {
        for j in 0..s {
            w[i][j] = (0..s).map(|k| row[k] * hinv[k][j]).sum();
        }
    }
    let mut gens = Vec::new();
    for j in 0..n {
        let col = LatticeVector((0..n).map(|i| w[i][j]).collect());
        if j >= s {
            gens.push(-&col);
        }
        gens.push(col);
    }
    Cone::new(n, gens)
}

fn invert_unimodular_lower(h: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let s = h.len();
    let mut inv = vec![vec![0i64; s]; s];
    for col in 0..s {
        for i in 0..s {
            let rhs = i64::from(i == col) - (0..i).map(|k| h[i][k] * inv[k][col]).sum::<i64>();
            // diagonal entries are +-1
            inv[i][col] = rhs * h[i][i];
        }
    }
    inv
}

/// True iff the generators are part of a basis of `Z^N`.
pub fn is_regular(c: &Cone) -> bool {
    let rows: Vec<Vec<i64>> = c.generators.iter().map(|g| g.0.clone()).collect();
    if rows.is_empty() {
        return true;
    }
    if rank(&rows) < rows.len() {
        return false;
    }
    let (h, _) = column_hermite(&rows, c.dim);
    let det: i128 = (0..rows.len()).map(|i| h[i][i] as i128).product();
    det.abs() == 1
}

/// Split a strongly convex cone in `R^2` into regular cones.
///
/// Walks from one extreme ray to the other inserting, at each step, the
/// lattice vector `p` with `det(u, p) = 1` closest to `u`; the determinant
/// against the far ray strictly decreases, as in the Hirzebruch-Jung
/// continued fraction expansion.
pub fn subdivide_regular_2d(c: &Cone) -> Result<Vec<Cone>> {
    if c.dim != 2 {
        return Err(PolyhedraError::UnsupportedDimension { dim: c.dim, supported: 2 });
    }
    if !c.is_strongly_convex() {
        return Err(PolyhedraError::NotStronglyConvex);
    }
    let (rays, _) = c.minimal_generators();
    if rays.len() < 2 {
        return Ok(vec![c.clone()]);
    }
    let det2 = |a: &[i64], b: &[i64]| a[0] * b[1] - a[1] * b[0];
    let (mut u, v) = {
        let (a, b) = (rays[0].0.clone(), rays[1].0.clone());
        if det2(&a, &b) > 0 {
            (a, b)
        } else {
            (b, a)
        }
    };
    let mut out = Vec::new();
    loop {
        let big_d = det2(&u, &v);
        if big_d == 1 {
            out.push(Cone::new(2, vec![LatticeVector(u.clone()), LatticeVector(v.clone())])?);
            break;
        }
        let ext = u[0].extended_gcd(&(-u[1]));
        let (x, y) = if ext.gcd < 0 { (-ext.x, -ext.y) } else { (ext.x, ext.y) };
        let p0 = [y, x];
        let e = det2(&p0, &v);
        let t = Integer::div_ceil(&(1 - e), &big_d);
        let p = vec![p0[0] + t * u[0], p0[1] + t * u[1]];
        out.push(Cone::new(2, vec![LatticeVector(u.clone()), LatticeVector(p.clone())])?);
        u = p;
    }
    Ok(out)
}

/// Convex hull of finitely many lattice points.
#[derive(Clone, Debug)]
pub struct LatticePolytope {
    dim: usize,
    vertices: Vec<LatticeVector>,
    /// Homogeneous inequalities `a . x + b >= 0` stored as `(a, b)`.
    inequalities: Vec<Vec<i64>>,
}

impl LatticePolytope {
    pub fn from_points(points: &[LatticeVector]) -> Result<LatticePolytope> {
        let first = points.first().ok_or(PolyhedraError::Empty)?;
        let dim = first.dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(PolyhedraError::DimensionMismatch { expected: dim, found: p.dim() });
        }
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();
        let lifted: Vec<Vec<i64>> = pts
            .iter()
            .map(|p| p.0.iter().copied().chain(std::iter::once(1)).collect())
            .collect();
        let dd = double_description(&lifted, dim + 1);
        let inequalities = dd.generators();
        let vertices = pts
            .iter()
            .zip(&lifted)
            .filter(|(_, l)| {
                let tight: Vec<Vec<i64>> = inequalities
                    .iter()
                    .filter(|h| dot(h, l) == 0)
                    .cloned()
                    .collect();
                rank(&tight) == dim
            })
            .map(|(p, _)| p.clone())
            .collect();
        Ok(LatticePolytope { dim, vertices, inequalities })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[LatticeVector] {
        &self.vertices
    }

    pub fn is_vertex(&self, p: &LatticeVector) -> bool {
        self.vertices.contains(p)
    }

    pub fn contains_lattice(&self, p: &LatticeVector) -> bool {
        self.inequalities.iter().all(|h| {
            let (a, b) = h.split_at(self.dim);
            dot_i128(a, &p.0) + b[0] as i128 >= 0
        })
    }

    pub fn contains(&self, x: &RationalVector) -> bool {
        self.inequalities.iter().all(|h| {
            let (a, b) = h.split_at(self.dim);
            let v = x.dot_lattice(&LatticeVector(a.to_vec()))
                + num_rational::BigRational::from_integer(b[0].into());
            !v.is_negative()
        })
    }

    /// All lattice points of the polytope, lexicographically sorted.
    pub fn lattice_points(&self) -> Vec<LatticeVector> {
        let lo: Vec<i64> = (0..self.dim)
            .map(|i| self.vertices.iter().map(|v| v.0[i]).min().unwrap_or(0))
            .collect();
        let hi: Vec<i64> = (0..self.dim)
            .map(|i| self.vertices.iter().map(|v| v.0[i]).max().unwrap_or(0))
            .collect();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            let p = LatticeVector(cur.clone());
            if self.contains_lattice(&p) {
                out.push(p);
            }
            let mut i = self.dim;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = lo[i];
            }
        }
    }
}

impl Serialize for LatticePolytope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            vertices: &'a [LatticeVector],
        }
        Out { vertices: &self.vertices }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticePolytope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct In {
            vertices: Vec<LatticeVector>,
        }
        let j = In::deserialize(d)?;
        LatticePolytope::from_points(&j.vertices).map_err(serde::de::Error::custom)
    }
}

/// `R_+ (NP - p)`, generated by the vertex differences.
pub fn sigma_p(np: &LatticePolytope, p: &LatticeVector) -> Result<Cone> {
    if p.dim() != np.dim {
        return Err(PolyhedraError::DimensionMismatch { expected: np.dim, found: p.dim() });
    }
    if !np.contains_lattice(p) {
        return Err(PolyhedraError::PointOutsidePolytope(p.clone()));
    }
    let gens = np.vertices.iter().map(|v| v - p).collect();
    Cone::new(np.dim, gens)
}

/// Recession cone of the complement component whose order is `p`: `-sigma_p^dual`.
pub fn recession_cone_of_order(np: &LatticePolytope, p: &LatticeVector) -> Result<Cone> {
    let s = sigma_p(np, p)?;
    Cone::new(np.dim, s.dual_generators.iter().map(|w| -w).collect())
}

pub fn cone_contains(c: &Cone, x: &RationalVector) -> Result<bool> {
    if x.dim() != c.dim {
        return Err(PolyhedraError::DimensionMismatch { expected: c.dim, found: x.dim() });
    }
    Ok(c.contains(x))
}

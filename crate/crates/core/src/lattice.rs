//! Integer and rational coordinate vectors plus the small amount of exact
//! integer linear algebra the cone code needs.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// A point of the integer lattice `Z^N`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticeVector(coords)
    }

    pub fn zero(dim: usize) -> Self {
        LatticeVector(vec![0; dim])
    }

    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = vec![0; dim];
        v[axis] = 1;
        LatticeVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn dot(&self, other: &LatticeVector) -> i64 {
        dot(&self.0, &other.0)
    }

    /// Gcd of the coordinates (0 for the zero vector).
    pub fn content(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &c| g.gcd(&c))
    }

    /// The primitive vector on the same ray. The zero vector maps to itself.
    pub fn primitive(&self) -> LatticeVector {
        let g = self.content();
        if g <= 1 {
            return self.clone();
        }
        LatticeVector(self.0.iter().map(|c| c / g).collect())
    }

    pub fn scale(&self, k: i64) -> LatticeVector {
        LatticeVector(self.0.iter().map(|c| c * k).collect())
    }

    pub fn to_rational(&self) -> RationalVector {
        RationalVector(self.0.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&c| c as f64).collect()
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector(v)
    }
}

impl<const K: usize> From<[i64; K]> for LatticeVector {
    fn from(v: [i64; K]) -> Self {
        LatticeVector(v.to_vec())
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|c| -c).collect())
    }
}

/// A point of `Q^N`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalVector(pub Vec<BigRational>);

impl RationalVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn from_ratios(pairs: &[(i64, i64)]) -> Self {
        RationalVector(
            pairs
                .iter()
                .map(|&(n, d)| BigRational::new(n.into(), d.into()))
                .collect(),
        )
    }

    /// Exact dot product against an integer vector.
    pub fn dot_lattice(&self, w: &LatticeVector) -> BigRational {
        self.0
            .iter()
            .zip(&w.0)
            .fold(BigRational::zero(), |acc, (x, &c)| acc + x * BigRational::from_integer(c.into()))
    }

    /// The primitive lattice vector on the ray through this point (zero maps to zero).
    pub fn primitive_lattice(&self) -> LatticeVector {
        let lcm = self
            .0
            .iter()
            .fold(BigInt::from(1), |l, x| l.lcm(x.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        let ints: Vec<i64> = if g.is_zero() {
            vec![0; ints.len()]
        } else {
            ints.iter().map(|x| (x / &g).to_i64().expect("coordinate overflow")).collect()
        };
        LatticeVector(ints)
    }

    /// Best rational approximation of a float vector with bounded denominators.
    pub fn approximate(x: &[f64], max_den: i64) -> RationalVector {
        RationalVector(x.iter().map(|&v| approximate_rational(v, max_den)).collect())
    }
}

/// Continued-fraction approximation of `x` with denominator at most `max_den`.
pub fn approximate_rational(x: f64, max_den: i64) -> BigRational {
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    for _ in 0..64 {
        let a = v.floor();
        if a > i64::MAX as f64 / 4.0 {
            break;
        }
        let a = a as i64;
        let p2 = a.saturating_mul(p1).saturating_add(p0);
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den || q2 <= 0 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - a as f64;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        // x beyond the first convergent's range; clamp.
        q1 = 1;
        p1 = x.abs().round() as i64;
    }
    let r = BigRational::new(p1.into(), q1.into());
    if neg {
        -r
    } else {
        r
    }
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dot_i128(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Primitive integer vector from a wide intermediate.
pub(crate) fn primitive_i128(v: &[i128]) -> Vec<i64> {
    let g = v.iter().fold(0i128, |g, &x| gcd_i128(g, x));
    if g <= 1 {
        return v.iter().map(|&x| i64::try_from(x).expect("coordinate overflow")).collect();
    }
    v.iter()
        .map(|&x| i64::try_from(x / g).expect("coordinate overflow"))
        .collect()
}

/// Rank of an integer matrix given by rows (fraction-free elimination).
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        for r in 0..m.len() {
            if r == rank || m[r][col] == 0 {
                continue;
            }
            let a = m[rank][col];
            let b = m[r][col];
            let row: Vec<i128> = m[r].iter().zip(&m[rank]).map(|(x, y)| a * x - b * y).collect();
            let g = row.iter().fold(0i128, |g, &x| gcd_i128(g, x));
            m[r] = if g > 1 { row.iter().map(|x| x / g).collect() } else { row };
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Determinant of a square integer matrix (Bareiss).
pub fn determinant(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Column-style Hermite reduction of an `s x n` integer matrix.
///
/// Returns `(h, v)` where `v` is an `n x n` unimodular matrix with
/// `a * v = [h | 0]`, `h` lower triangular `s x s` (rank-deficient inputs
/// leave zero diagonal entries).
pub(crate) fn column_hermite(a: &[Vec<i64>], n: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let s = a.len();
    let mut m: Vec<Vec<i64>> = a.to_vec();
    let mut v: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    let col_op = |m: &mut Vec<Vec<i64>>, v: &mut Vec<Vec<i64>>, c1: usize, c2: usize, t: [[i64; 2]; 2]| {
        // new c1 = t00*c1 + t10*c2, new c2 = t01*c1 + t11*c2
        for row in m.iter_mut().chain(v.iter_mut()) {
            let (x, y) = (row[c1], row[c2]);
            row[c1] = t[0][0] * x + t[1][0] * y;
            row[c2] = t[0][1] * x + t[1][1] * y;
        }
    };
    let mut pivot_col = 0;
    for r in 0..s {
        if pivot_col >= n {
            break;
        }
        for c in pivot_col + 1..n {
            if m[r][c] == 0 {
                continue;
            }
            let (a0, b0) = (m[r][pivot_col], m[r][c]);
            let ext = a0.extended_gcd(&b0);
            let g = ext.gcd;
            // [x y; -b/g a/g] has determinant 1.
            let t = [[ext.x, -b0 / g], [ext.y, a0 / g]];
            col_op(&mut m, &mut v, pivot_col, c, t);
        }
        if m[r][pivot_col] < 0 {
            for row in m.iter_mut().chain(v.iter_mut()) {
                row[pivot_col] = -row[pivot_col];
            }
        }
        if m[r][pivot_col] != 0 {
            pivot_col += 1;
        }
    }
    let h: Vec<Vec<i64>> = m.iter().map(|row| row[..s.min(n)].to_vec()).collect();
    (h, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_determinant() {
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank(&[vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 2]]), 2);
        assert_eq!(determinant(&[vec![1, 1], vec![0, 2]]), 2);
        assert_eq!(determinant(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(determinant(&[vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 1]]), 2 * 1 - 0 + 1 * (1 - 3));
    }

    #[test]
    fn hermite_reduces_rows() {
        let a = vec![vec![1, 1], vec![1, -1]];
        let (h, v) = column_hermite(&a, 2);
        // a * v = [h | 0]
        for (i, row) in a.iter().enumerate() {
            for j in 0..2 {
                let prod: i64 = (0..2).map(|k| row[k] * v[k][j]).sum();
                let expect = if j < 2 { h[i][j] } else { 0 };
                assert_eq!(prod, expect);
            }
        }
        assert_eq!(determinant(&v).abs(), 1);
        assert_eq!((h[0][0] * h[1][1]).abs(), 2);
    }

    #[test]
    fn rational_approximation() {
        assert_eq!(approximate_rational(0.5, 100), BigRational::new(1.into(), 2.into()));
        assert_eq!(approximate_rational(-2.5, 100), BigRational::new((-5).into(), 2.into()));
        assert_eq!(approximate_rational(3.0, 100), BigRational::from_integer(3.into()));
    }

    #[test]
    fn primitive_vectors() {
        assert_eq!(LatticeVector::from([4, -6]).primitive(), LatticeVector::from([2, -3]));
        assert_eq!(
            RationalVector::from_ratios(&[(1, 2), (-1, 3)]).primitive_lattice(),
            LatticeVector::from([3, -2])
        );
    }
}

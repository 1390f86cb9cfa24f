//! Closed-form coefficients of the square-root branches of `z^2 = x + y - 1`.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::lattice::{LatticeVector, RationalVector};

/// The three expansions of `sqrt(x + y - 1)`: around `|x| >> 1`, around
/// `|y| >> 1`, and around the origin (times `i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OracleVariant {
    LargeX,
    LargeY,
    Origin,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleTerm {
    pub x_exp: RationalVector,
    pub coeff: Complex<BigRational>,
}

impl OracleTerm {
    /// Exponent in `t` for `x = t^d`.
    pub fn t_exp(&self, d: i64) -> LatticeVector {
        let v: Vec<i64> = self
            .x_exp
            .0
            .iter()
            .map(|q| {
                let s = q * BigRational::from_integer(BigInt::from(d));
                assert!(s.is_integer(), "exponent {q} not in (1/{d})Z");
                i64::try_from(s.to_integer()).expect("small exponent")
            })
            .collect();
        LatticeVector(v)
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Generalized binomial coefficient `binom(a, k)`.
pub fn binomial(a: &BigRational, k: u32) -> BigRational {
    let mut out = BigRational::one();
    for i in 0..k {
        out = out * (a - q(i as i64, 1)) / q(i as i64 + 1, 1);
    }
    out
}

/// Coefficient table for `variant`.
///
/// `LargeX`: `binom(1/2,k) binom(1/2-k,j) (-1)^j` at `(1/2-k-j, k)`;
/// `LargeY` swaps the two exponents; `Origin`: `i binom(1/2,n) (-1)^n binom(n,a)`
/// at `(a, n-a)` for `n <= k_max`, `a <= j_max`.
pub fn binomial_oracle(k_max: u32, j_max: u32, variant: OracleVariant) -> Vec<OracleTerm> {
    let half = q(1, 2);
    let mut out = Vec::new();
    match variant {
        OracleVariant::LargeX | OracleVariant::LargeY => {
            for k in 0..=k_max {
                let bk = binomial(&half, k);
                let top = &half - q(k as i64, 1);
                for j in 0..=j_max {
                    let sign = if j % 2 == 0 { q(1, 1) } else { q(-1, 1) };
                    let c = &bk * binomial(&top, j) * sign;
                    let ex = &half - q((k + j) as i64, 1);
                    let ey = q(k as i64, 1);
                    let x_exp = match variant {
                        OracleVariant::LargeX => RationalVector(vec![ex, ey]),
                        _ => RationalVector(vec![ey, ex]),
                    };
                    out.push(OracleTerm { x_exp, coeff: Complex::new(c, BigRational::zero()) });
                }
            }
        }
        OracleVariant::Origin => {
            for n in 0..=k_max {
                let sign = if n % 2 == 0 { q(1, 1) } else { q(-1, 1) };
                let bn = binomial(&half, n) * sign;
                for a in 0..=n.min(j_max) {
                    let c = &bn * binomial(&q(n as i64, 1), a);
                    let x_exp = RationalVector(vec![q(a as i64, 1), q((n - a) as i64, 1)]);
                    out.push(OracleTerm { x_exp, coeff: Complex::new(BigRational::zero(), c) });
                }
            }
        }
    }
    out
}

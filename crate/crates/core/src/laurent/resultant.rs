//! Sylvester resultants with polynomial entries.

use num_traits::FromPrimitive;

use super::{Coefficient, LaurentError, LaurentPolynomial, Result};

/// Division-free determinant over a commutative ring.
///
/// Expands column by column while tracking the set of rows already used,
/// so the cost is `O(n 2^n)` ring operations. `None` entries are zero.
pub fn determinant<R>(matrix: &[Vec<Option<R>>], zero: R) -> R
where
    R: Clone + std::ops::Add<Output = R> + std::ops::Sub<Output = R> + std::ops::Mul<Output = R>,
{
    let n = matrix.len();
    assert!(n < 24, "determinant expansion limited to small matrices");
    let mut dp: Vec<Option<R>> = vec![None; 1 << n];
    let mut seeded = false;
    for col in 0..n {
        let mut next: Vec<Option<R>> = vec![None; 1 << n];
        let sources: Vec<usize> = if col == 0 { vec![0] } else { (0..1usize << n).filter(|&m| dp[m].is_some()).collect() };
        for mask in sources {
            for (row, entries) in matrix.iter().enumerate() {
                if mask & (1 << row) != 0 {
                    continue;
                }
                let Some(entry) = &entries[col] else { continue };
                let inversions = (mask >> (row + 1)).count_ones();
                let term = match (col, &dp[mask]) {
                    (0, _) => entry.clone(),
                    (_, Some(acc)) => acc.clone() * entry.clone(),
                    _ => continue,
                };
                let slot = &mut next[mask | (1 << row)];
                *slot = Some(match (slot.take(), inversions % 2 == 0) {
                    (None, true) => term,
                    (None, false) => zero.clone() - term,
                    (Some(v), true) => v + term,
                    (Some(v), false) => v - term,
                });
            }
        }
        dp = next;
        seeded = true;
    }
    if !seeded {
        panic!("empty matrix");
    }
    dp[(1 << n) - 1].clone().unwrap_or(zero)
}

/// Sylvester matrix of `p` and `q` viewed as polynomials in `var`.
pub fn sylvester_matrix<T: Coefficient>(
    p: &LaurentPolynomial<T>,
    q: &LaurentPolynomial<T>,
    var: usize,
) -> Result<Vec<Vec<Option<LaurentPolynomial<T>>>>> {
    let pc = p.coefficients_in(var);
    let qc = q.coefficients_in(var);
    if pc.keys().chain(qc.keys()).any(|&k| k < 0) {
        return Err(LaurentError::NegativeExponent);
    }
    let m = pc.keys().max().copied().unwrap_or(0) as usize;
    let n = qc.keys().max().copied().unwrap_or(0) as usize;
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for shift in 0..n {
        let mut row = vec![None; size];
        for (&k, c) in &pc {
            row[shift + m - k as usize] = Some(c.clone());
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![None; size];
        for (&k, c) in &qc {
            row[shift + n - k as usize] = Some(c.clone());
        }
        rows.push(row);
    }
    Ok(rows)
}

/// `Res_y(F, dF/dy)` with `y` the variable at index `var`.
///
/// The result lives in the remaining variables (in their original order)
/// and vanishes on the branch locus of the projection forgetting `y`.
pub fn discriminant_y<T: Coefficient + FromPrimitive>(
    f: &LaurentPolynomial<T>,
    var: usize,
) -> Result<LaurentPolynomial<T>> {
    if f.min_degree(var).is_some_and(|k| k < 0) {
        return Err(LaurentError::NegativeExponent);
    }
    let k = f.max_degree(var).unwrap_or(0);
    if k < 1 {
        return Err(LaurentError::ConstantInVariable);
    }
    let df = f.derivative(var);
    let matrix = sylvester_matrix(f, &df, var)?;
    Ok(determinant(&matrix, LaurentPolynomial::zero(f.nvars() - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::parse_polynomial;
    use crate::RationalPolynomial;
    use num_rational::BigRational;

    fn poly(text: &str, names: &[&str]) -> RationalPolynomial {
        let v: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        parse_polynomial(text, &v).unwrap()
    }

    #[test]
    fn integer_determinants() {
        let m = vec![
            vec![Some(2i64), Some(0), Some(1)],
            vec![Some(1), Some(3), Some(2)],
            vec![Some(1), Some(1), Some(1)],
        ];
        assert_eq!(determinant(&m, 0), 2 * (3 - 2) - 0 + (1 - 3));
        let swap = vec![vec![None, Some(1i64)], vec![Some(1), None]];
        assert_eq!(determinant(&swap, 0), -1);
    }

    #[test]
    fn quadratic_over_line() {
        let f = poly("z^2 - x - y + 1", &["x", "y", "z"]);
        let d = discriminant_y(&f, 2).unwrap();
        assert_eq!(d, poly("-4*x - 4*y + 4", &["x", "y"]));
    }

    #[test]
    fn quasi_ordinary_quadratic() {
        let f = poly("y^2 - x1*x2", &["x1", "x2", "y"]);
        assert_eq!(discriminant_y(&f, 2).unwrap(), poly("-4*x1*x2", &["x1", "x2"]));
    }

    #[test]
    fn separated_roots_give_constant() {
        // (y - 1)(y - 2): Res(F, F') = F'(1) F'(2) = -1.
        let f = poly("y^2 - 3*y + 2", &["y"]);
        let d = discriminant_y(&f, 0).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d, RationalPolynomial::constant(0, BigRational::from_integer((-1).into())));
    }

    #[test]
    fn constant_in_variable_is_an_error() {
        let f = poly("x + 1", &["x", "y"]);
        assert_eq!(discriminant_y(&f, 1).unwrap_err(), LaurentError::ConstantInVariable);
        let g = poly("y^-1 + x", &["x", "y"]);
        assert_eq!(discriminant_y(&g, 1).unwrap_err(), LaurentError::NegativeExponent);
    }
}

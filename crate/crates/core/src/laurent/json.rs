//! JSON form of exact polynomials:
//! `{"vars": [...], "terms": [{"exp": [..], "coeff": {"num": .., "den": ..}}]}`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::LaurentPolynomial;
use crate::lattice::LatticeVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<i64>,
    pub coeff: RationalJson,
}

/// Integers that fit in `i64` are written as JSON numbers, larger ones as strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: Value,
    pub den: Value,
}

fn int_to_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(x.to_string()),
    }
}

fn value_to_int(v: &Value) -> Result<BigInt, String> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| format!("non-integer number {n}")),
        Value::String(s) => BigInt::from_str(s).map_err(|e| e.to_string()),
        other => Err(format!("expected integer, found {other}")),
    }
}

impl PolynomialJson {
    pub fn from_polynomial(p: &LaurentPolynomial<BigRational>, vars: &[String]) -> Self {
        PolynomialJson {
            vars: vars.to_vec(),
            terms: p
                .terms()
                .map(|(e, c)| TermJson {
                    exp: e.0.clone(),
                    coeff: RationalJson { num: int_to_value(c.numer()), den: int_to_value(c.denom()) },
                })
                .collect(),
        }
    }

    pub fn to_polynomial(&self) -> Result<LaurentPolynomial<BigRational>, String> {
        let n = self.vars.len();
        let mut p = LaurentPolynomial::zero(n);
        for t in &self.terms {
            if t.exp.len() != n {
                return Err(format!("exponent {:?} has wrong length", t.exp));
            }
            let den = value_to_int(&t.coeff.den)?;
            if den.is_zero() {
                return Err("zero denominator".into());
            }
            let c = BigRational::new(value_to_int(&t.coeff.num)?, den);
            p.add_term(LatticeVector(t.exp.clone()), c);
        }
        Ok(p)
    }
}

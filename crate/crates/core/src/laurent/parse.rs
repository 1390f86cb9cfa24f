//! Text grammar for polynomials.
//!
//! ```text
//! poly   := sign? term (sign term)*
//! term   := factor ('*' factor)*
//! factor := number | name ('^' int)? | '(' term ')' ('^' int)?
//! number := digits ('.' digits)? ('/' digits)?
//! int    := ('-' | '+')? digits | '(' ('-' | '+')? digits ')'
//! ```

use std::collections::BTreeSet;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use thiserror::Error;

use super::LaurentPolynomial;
use crate::lattice::LatticeVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{name}` at {position}")]
    UnknownVariable { name: String, position: usize },
    #[error("non-integer exponent at {position}")]
    NonIntegerExponent { position: usize },
}

/// Identifiers appearing in `text`, sorted.
pub fn infer_variables(text: &str) -> Vec<String> {
    let mut names = BTreeSet::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_alphabetic() || bytes[i] == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            names.insert(text[start..i].to_string());
        } else {
            i += 1;
        }
    }
    names.into_iter().collect()
}

pub fn parse_polynomial(
    text: &str,
    variables: &[String],
) -> Result<LaurentPolynomial<BigRational>, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, vars: variables };
    let poly = p.polynomial()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(poly)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [String],
}

type Monomial = (BigRational, Vec<i64>);

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError::Syntax { position: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn polynomial(&mut self) -> Result<LaurentPolynomial<BigRational>, ParseError> {
        let mut poly = LaurentPolynomial::zero(self.vars.len());
        let mut negative = false;
        if self.eat(b'-') {
            negative = true;
        } else {
            self.eat(b'+');
        }
        loop {
            let (c, e) = self.term()?;
            poly.add_term(LatticeVector(e), if negative { -c } else { c });
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    negative = false;
                }
                Some(b'-') => {
                    self.pos += 1;
                    negative = true;
                }
                _ => break,
            }
        }
        Ok(poly)
    }

    fn term(&mut self) -> Result<Monomial, ParseError> {
        let (mut c, mut e) = self.factor()?;
        while self.eat(b'*') {
            let (c2, e2) = self.factor()?;
            c *= c2;
            e.iter_mut().zip(e2).for_each(|(a, b)| *a += b);
        }
        Ok((c, e))
    }

    fn factor(&mut self) -> Result<Monomial, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let m = self.term()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                if self.eat(b'^') {
                    let k = self.exponent()?;
                    return Ok(power(m, k));
                }
                Ok(m)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                Ok((self.number()?, vec![0; self.vars.len()]))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let idx = self
                    .vars
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| ParseError::UnknownVariable { name: name.to_string(), position: start })?;
                let mut e = vec![0; self.vars.len()];
                e[idx] = if self.eat(b'^') { self.exponent()? } else { 1 };
                Ok((BigRational::one(), e))
            }
            Some(_) => Err(self.error("expected a number, variable or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii")
    }

    fn number(&mut self) -> Result<BigRational, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let int_part = self.digits().to_string();
        let mut value = if int_part.is_empty() {
            BigRational::zero()
        } else {
            BigRational::from_integer(BigInt::from_str(&int_part).expect("digits"))
        };
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let frac = self.digits().to_string();
            if frac.is_empty() && int_part.is_empty() {
                return Err(ParseError::Syntax { position: start, message: "malformed number".into() });
            }
            if !frac.is_empty() {
                let num = BigInt::from_str(&frac).expect("digits");
                let den = BigInt::from(10).pow(frac.len() as u32);
                value += BigRational::new(num, den);
            }
        } else if int_part.is_empty() {
            return Err(ParseError::Syntax { position: start, message: "malformed number".into() });
        }
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let den = self.digits().to_string();
            if den.is_empty() {
                return Err(ParseError::Syntax { position: at, message: "expected denominator".into() });
            }
            let den = BigInt::from_str(&den).expect("digits");
            if den.is_zero() {
                return Err(ParseError::Syntax { position: at, message: "zero denominator".into() });
            }
            value /= BigRational::from_integer(den);
        }
        Ok(value)
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let paren = self.eat(b'(');
        self.skip_ws();
        let start = self.pos;
        let mut sign = 1;
        if self.eat(b'-') {
            sign = -1;
        } else {
            self.eat(b'+');
        }
        self.skip_ws();
        let d = self.digits().to_string();
        if d.is_empty() {
            return Err(ParseError::NonIntegerExponent { position: start });
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'.' | b'/') {
            return Err(ParseError::NonIntegerExponent { position: start });
        }
        let k: i64 = d.parse().map_err(|_| ParseError::NonIntegerExponent { position: start })?;
        if paren && !self.eat(b')') {
            return Err(self.error("expected `)`"));
        }
        Ok(sign * k)
    }
}

fn power((c, e): Monomial, k: i64) -> Monomial {
    let c = if k >= 0 {
        Pow::pow(c, k as u32)
    } else {
        Pow::pow(c.recip(), (-k) as u32)
    };
    (c, e.into_iter().map(|x| x * k).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn line() {
        let f = parse_polynomial("x + y - 1", &vars(&["x", "y"])).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.coefficient(&[1, 0].into()), Some(&q(1, 1)));
        assert_eq!(f.coefficient(&[0, 1].into()), Some(&q(1, 1)));
        assert_eq!(f.coefficient(&[0, 0].into()), Some(&q(-1, 1)));
    }

    #[test]
    fn figure_cubic_has_ten_terms() {
        let f = parse_polynomial(
            "50*x^3+83*x^2*y+24*x*y^2+y^3+392*x^2+414*x*y+50*y^2-28*x+59*y-100",
            &vars(&["x", "y"]),
        )
        .unwrap();
        assert_eq!(f.len(), 10);
        assert_eq!(f.coefficient(&[1, 1].into()), Some(&q(414, 1)));
    }

    #[test]
    fn negative_exponents_and_numbers() {
        let f = parse_polynomial("x^-1", &vars(&["x"])).unwrap();
        assert_eq!(f.support(), vec![LatticeVector::from([-1])]);
        let g = parse_polynomial("-3/4*x^(-2) + 0.5*(x*y)^2 - .25", &vars(&["x", "y"])).unwrap();
        assert_eq!(g.coefficient(&[-2, 0].into()), Some(&q(-3, 4)));
        assert_eq!(g.coefficient(&[2, 2].into()), Some(&q(1, 2)));
        assert_eq!(g.coefficient(&[0, 0].into()), Some(&q(-1, 4)));
        let h = parse_polynomial("x - x", &vars(&["x"])).unwrap();
        assert!(h.is_zero());
    }

    #[test]
    fn errors() {
        let v = vars(&["x", "y"]);
        assert_eq!(
            parse_polynomial("x + w", &v),
            Err(ParseError::UnknownVariable { name: "w".into(), position: 4 })
        );
        assert!(matches!(parse_polynomial("x^1.5", &v), Err(ParseError::NonIntegerExponent { .. })));
        assert!(matches!(parse_polynomial("x^y", &v), Err(ParseError::NonIntegerExponent { .. })));
        assert!(matches!(parse_polynomial("x + * y", &v), Err(ParseError::Syntax { position: 4, .. })));
        assert!(matches!(parse_polynomial("(x + y)", &v), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_polynomial("x y", &v), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn variable_inference() {
        assert_eq!(infer_variables("z^2 - x - y + 1"), vec!["x", "y", "z"]);
        assert_eq!(infer_variables("y^2 - x1*x2"), vec!["x1", "x2", "y"]);
    }
}

//! Model parameters that stay exact at any working precision.
//!
//! A parameter is either a JSON number or a short arithmetic expression such
//! as `"629/676"`, `"1/sqrt(2)"` or `"(sqrt(5)-1)/2"`. Expressions are
//! evaluated in the target scalar type, so rational frequencies remain exact
//! rationals when the integration runs in extended precision.

use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Number(f64),
    Expr(String),
}

impl Param {
    pub fn eval<R: Real>(&self) -> Result<R> {
        match self {
            Param::Number(x) => Ok(R::from_f64(*x)),
            Param::Expr(s) => {
                let mut p = Parser {
                    src: s.as_bytes(),
                    pos: 0,
                };
                let v = p.expr::<R>()?;
                p.skip_ws();
                if p.pos != p.src.len() {
                    return Err(p.fail("trailing characters"));
                }
                Ok(v)
            }
        }
    }

    pub fn value(&self) -> Result<f64> {
        self.eval::<f64>()
    }

    /// `Some((p, q))` when the parameter is literally an integer ratio.
    pub fn as_rational(&self) -> Option<(i64, i64)> {
        match self {
            Param::Number(x) if x.fract() == 0.0 && x.abs() < 1e15 => Some((*x as i64, 1)),
            Param::Number(_) => None,
            Param::Expr(s) => {
                let (p, q) = match s.split_once('/') {
                    Some((p, q)) => (p.trim().parse().ok()?, q.trim().parse().ok()?),
                    None => (s.trim().parse().ok()?, 1),
                };
                if q == 0 {
                    None
                } else {
                    Some((p, q))
                }
            }
        }
    }
}

impl From<f64> for Param {
    fn from(x: f64) -> Self {
        Param::Number(x)
    }
}

impl From<&str> for Param {
    fn from(s: &str) -> Self {
        Param::Expr(s.to_string())
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Number(x) => write!(f, "{x}"),
            Param::Expr(s) => f.write_str(s),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn fail(&self, what: &str) -> Error {
        Error::Config(format!(
            "cannot parse parameter {:?}: {what} at offset {}",
            String::from_utf8_lossy(self.src),
            self.pos
        ))
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

    fn expr<R: Real>(&mut self) -> Result<R> {
        let mut acc = self.term::<R>()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc += self.term::<R>()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc -= self.term::<R>()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term<R: Real>(&mut self) -> Result<R> {
        let mut acc = self.factor::<R>()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc *= self.factor::<R>()?;
                }
                b'/' => {
                    self.pos += 1;
                    acc /= self.factor::<R>()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor<R: Real>(&mut self) -> Result<R> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor::<R>()?)
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr::<R>()?;
                if self.peek() != Some(b')') {
                    return Err(self.fail("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number::<R>(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match name {
                    "pi" => Ok(R::pi()),
                    "sqrt" => {
                        if self.peek() != Some(b'(') {
                            return Err(self.fail("expected '(' after sqrt"));
                        }
                        let v = self.factor::<R>()?;
                        if v < R::zero() {
                            return Err(self.fail("sqrt of a negative value"));
                        }
                        Ok(v.sqrt())
                    }
                    _ => Err(self.fail("unknown identifier")),
                }
            }
            _ => Err(self.fail("expected a value")),
        }
    }

    fn number<R: Real>(&mut self) -> Result<R> {
        let start = self.pos;
        let mut is_int = true;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_digit() {
                self.pos += 1;
            } else if c == b'.' || c == b'e' || c == b'E' {
                is_int = false;
                self.pos += 1;
                if (c == b'e' || c == b'E')
                    && matches!(self.src.get(self.pos), Some(b'+') | Some(b'-'))
                {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        if is_int {
            if let Ok(n) = text.parse::<i64>() {
                return Ok(R::from_i64(n));
            }
        }
        text.parse::<f64>()
            .map(R::from_f64)
            .map_err(|_| self.fail("malformed number"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions_evaluate() {
        let golden = Param::from("(sqrt(5)-1)/2").value().unwrap();
        assert!((golden - 0.6180339887498949).abs() < 1e-15);
        assert_eq!(Param::from("629/676").value().unwrap(), 629.0 / 676.0);
        assert!((Param::from("1/sqrt(2)").value().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((Param::from("-2*pi").value().unwrap() + 2.0 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(Param::from(1.5).value().unwrap(), 1.5);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Param::from("sqrt(-1)").value().is_err());
        assert!(Param::from("2 +").value().is_err());
        assert!(Param::from("foo").value().is_err());
    }

    #[test]
    fn detects_rationals() {
        assert_eq!(Param::from("629/676").as_rational(), Some((629, 676)));
        assert_eq!(Param::from(1.5).as_rational(), None);
        assert_eq!(Param::from(2.0).as_rational(), Some((2, 1)));
        assert_eq!(Param::from("1/sqrt(2)").as_rational(), None);
    }
}

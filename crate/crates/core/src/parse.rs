//! Text grammar for polynomials.
//!
//! ```text
//! poly   := [sign] term { sign term }
//! term   := coeff | coeff '*' mono | mono
//! mono   := factor { '*' factor }
//! factor := 'x' index [ '^' exponent ]
//! coeff  := decimal [ '/' decimal ]
//! ```
//!
//! Whitespace is allowed between tokens. Error positions are byte offsets.

use crate::error::{Error, Result};
use crate::field::Coeff;
use crate::poly::{Monomial, Polynomial};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if f(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        &self.src[start..self.pos]
    }

    fn integer(&mut self) -> Result<u32> {
        self.skip_ws();
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return self.err("expected an integer");
        }
        match digits.parse() {
            Ok(v) => Ok(v),
            Err(_) => self.err("integer out of range"),
        }
    }
}

/// One factor `x<i>^<e>` as (zero-based index, exponent).
fn factor(cur: &mut Cursor<'_>) -> Result<(usize, u32)> {
    cur.skip_ws();
    if cur.peek() != Some('x') {
        return cur.err("expected a variable like x1");
    }
    cur.pos += 1;
    let at = cur.pos;
    let idx = cur.integer()?;
    if idx == 0 {
        return Err(Error::Parse { pos: at, msg: "variables are numbered from x1".into() });
    }
    let exp = if cur.eat('^') { cur.integer()? } else { 1 };
    Ok((idx as usize - 1, exp))
}

pub(crate) fn parse_polynomial<C: Coeff>(src: &str, nvars: Option<usize>) -> Result<Polynomial<C>> {
    let mut cur = Cursor { src, pos: 0 };
    let mut raw: Vec<(Vec<(usize, u32)>, C)> = Vec::new();
    let mut max_var = 0usize;
    let mut first = true;
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            if first {
                return cur.err("empty polynomial");
            }
            break;
        }
        let mut negative = false;
        if cur.eat('-') {
            negative = true;
        } else if cur.eat('+') {
        } else if !first {
            return cur.err("expected '+' or '-'");
        }
        first = false;
        cur.skip_ws();
        let mut coeff = C::one();
        let mut factors = Vec::new();
        match cur.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = cur.pos;
                let lit = cur.take_while(|c| c.is_ascii_digit() || c == '.' || c == '/');
                coeff = match C::parse_literal(lit) {
                    Some(v) => v,
                    None => return Err(Error::Parse { pos: start, msg: format!("bad coefficient '{}'", lit) }),
                };
                if cur.eat('*') {
                    factors.push(factor(&mut cur)?);
                }
            }
            Some('x') => factors.push(factor(&mut cur)?),
            _ => return cur.err("expected a coefficient or a variable"),
        }
        while cur.eat('*') {
            factors.push(factor(&mut cur)?);
        }
        for &(i, _) in &factors {
            max_var = max_var.max(i + 1);
        }
        if negative {
            coeff = -coeff;
        }
        raw.push((factors, coeff));
    }
    let n = match nvars {
        Some(n) => {
            if max_var > n {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("x{} used but only {} variables declared", max_var, n),
                });
            }
            n
        }
        None => max_var,
    };
    let mut poly = Polynomial::zero(n);
    for (factors, c) in raw {
        let mut e = vec![0u32; n];
        for (i, k) in factors {
            e[i] += k;
        }
        poly.add_term(Monomial(e), c);
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ratio, Rational};
    use crate::poly::QPoly;

    #[test]
    fn grammar() {
        let p = QPoly::parse("1 + 2*x1 - x1^2*x2").unwrap();
        assert_eq!(p.nvars(), 2);
        assert_eq!(p.num_terms(), 3);
        let p = QPoly::parse("-3/4*x1*x1 + x2^0").unwrap();
        assert_eq!(p.coeff(&Monomial(vec![2, 0])), ratio(-3, 4));
        assert_eq!(p.constant_term(), ratio(1, 1));
        let p = QPoly::parse_with_nvars("x1", 3).unwrap();
        assert_eq!(p.nvars(), 3);
    }

    #[test]
    fn errors_carry_positions() {
        let e = QPoly::parse("1 + 2*y1").unwrap_err();
        assert!(matches!(e, Error::Parse { pos: 6, .. }), "{e:?}");
        let e = QPoly::parse("1 + + x1").unwrap_err();
        assert!(matches!(e, Error::Parse { pos: 4, .. }), "{e:?}");
        assert!(QPoly::parse("").is_err());
        assert!(QPoly::parse("x0").is_err());
        assert!(QPoly::parse("x1 x2").is_err());
        assert!(QPoly::parse_with_nvars("x3", 2).is_err());
        assert!(Polynomial::<Rational>::parse("1/0*x1").is_err());
    }

    #[test]
    fn doubles() {
        let p: Polynomial<f64> = Polynomial::parse("1.5*x1 - 0.25").unwrap();
        assert_eq!(p.evaluate(&[2.0]), 2.75);
        let s = std::f64::consts::SQRT_2;
        let p = Polynomial::<f64>::linear(&[s, -s / 3.0]);
        assert_eq!(Polynomial::<f64>::parse(&p.to_string()).unwrap(), p);
    }
}

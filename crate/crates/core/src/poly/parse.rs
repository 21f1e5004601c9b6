//! Polynomial literals such as `(1.5-2i) * w1^2 * cbar1 + 3*c2`.
//!
//! Variables are `w<j>`, `c<m>`, `wbar<j>`, `cbar<m>` (1-based); `i` is the
//! imaginary unit and may follow a number directly (`2i`).

use num_complex::Complex64;

use super::{Polynomial, Var};
use crate::error::{Error, Result};

pub fn parse_polynomial(src: &str, k: usize, d: usize) -> Result<Polynomial> {
    let mut parser = Parser {
        src: src.as_bytes(),
        pos: 0,
        k,
        d,
    };
    let p = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(p)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    k: usize,
    d: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            column: self.pos + 1,
            message: message.into(),
        }
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

    fn constant(&self, z: Complex64) -> Polynomial {
        Polynomial::constant(self.k, self.d, z)
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { acc.add(&rhs)? } else { acc.sub(&rhs)? };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = acc.mul(&rhs)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.scale(Complex64::new(-1.0, 0.0)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.error("expected integer exponent"));
            }
            let e: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.error("exponent out of range"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(ch) if ch.is_ascii_digit() || ch == b'.' => {
                let value = self.number()?;
                if self.src.get(self.pos) == Some(&b'i') && !self.ident_continues(self.pos + 1) {
                    self.pos += 1;
                    return Ok(self.constant(Complex64::new(0.0, value)));
                }
                Ok(self.constant(Complex64::new(value, 0.0)))
            }
            Some(ch) if ch.is_ascii_alphabetic() => self.variable(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn ident_continues(&self, at: usize) -> bool {
        self.src
            .get(at)
            .is_some_and(|c| c.is_ascii_alphanumeric())
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let s = self.src;
        while self.pos < s.len() && (s[self.pos].is_ascii_digit() || s[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let mut look = self.pos + 1;
            if look < s.len() && (s[look] == b'+' || s[look] == b'-') {
                look += 1;
            }
            if look < s.len() && s[look].is_ascii_digit() {
                self.pos = look;
                while self.pos < s.len() && s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&s[start..self.pos]).unwrap();
        text.parse::<f64>().map_err(|_| Error::Parse {
            column: start + 1,
            message: format!("invalid number '{text}'"),
        })
    }

    fn variable(&mut self) -> Result<Polynomial> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if name == "i" && digits_start == self.pos {
            return Ok(self.constant(Complex64::new(0.0, 1.0)));
        }
        let index: usize = std::str::from_utf8(&self.src[digits_start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse {
                column: start + 1,
                message: format!("variable '{name}' needs a 1-based index"),
            })?;
        let out_of_range = |limit: usize| Error::Parse {
            column: start + 1,
            message: format!("index {index} out of range 1..={limit} for '{name}'"),
        };
        let var = match name.as_str() {
            "w" | "wbar" => {
                if index == 0 || index > self.k {
                    return Err(out_of_range(self.k));
                }
                if name == "w" {
                    Var::W(index - 1)
                } else {
                    Var::WBar(index - 1)
                }
            }
            "c" | "cbar" => {
                if index == 0 || index > self.d {
                    return Err(out_of_range(self.d));
                }
                if name == "c" {
                    Var::C(index - 1)
                } else {
                    Var::CBar(index - 1)
                }
            }
            _ => {
                return Err(Error::Parse {
                    column: start + 1,
                    message: format!("unknown variable '{name}'"),
                })
            }
        };
        Ok(Polynomial::var(self.k, self.d, var))
    }
}

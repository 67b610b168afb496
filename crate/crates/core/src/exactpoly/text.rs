// Text form: `coef*x^i*y^j*z^k` terms joined by `+`/`-`, whitespace-insensitive.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{PolyError, SparsePolynomial};

impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // highest exponent vector first reads more naturally
        for (n, (e, c)) in self.terms().rev().enumerate() {
            let neg = c.is_negative();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let abs = c.abs();
            let mono: Vec<String> = e
                .iter()
                .zip(self.vars())
                .filter(|(k, _)| **k > 0)
                .map(|(k, v)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{abs}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn err(&self, msg: impl Into<String>) -> PolyError {
        PolyError::Parse { pos: self.pos, msg: msg.into() }
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn ident(&mut self) -> Option<&str> {
        let start = self.pos;
        if !matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == b'_') {
            return None;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        Some(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }
}

impl SparsePolynomial {
    /// Parses the text form produced by `Display`. Variables must come from
    /// `vars`; whitespace is ignored.
    pub fn parse<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<SparsePolynomial, PolyError> {
        let names: Vec<&str> = vars.iter().map(|s| s.as_ref()).collect();
        let compact: Vec<u8> = text.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
        let mut cur = Cursor { src: &compact, pos: 0 };
        let mut out = SparsePolynomial::zero(vars);
        if compact.is_empty() {
            return Err(cur.err("empty input"));
        }
        let mut first = true;
        while cur.peek().is_some() {
            let mut sign = BigRational::one();
            match cur.peek() {
                Some(b'+') => cur.pos += 1,
                Some(b'-') => {
                    cur.pos += 1;
                    sign = -sign;
                }
                _ if first => {}
                _ => return Err(cur.err("expected '+' or '-'")),
            }
            first = false;
            let mut coef = sign;
            let mut exps = vec![0u32; names.len()];
            loop {
                if let Some(num) = cur.digits() {
                    let n: BigInt = num.parse().unwrap();
                    let mut c = BigRational::from_integer(n);
                    if cur.peek() == Some(b'/') {
                        cur.pos += 1;
                        let Some(den) = cur.digits() else {
                            return Err(cur.err("expected denominator"));
                        };
                        let den: BigInt = den.parse().unwrap();
                        if den.is_zero() {
                            return Err(cur.err("zero denominator"));
                        }
                        c /= BigRational::from_integer(den);
                    }
                    coef *= c;
                } else if let Some(name) = cur.ident() {
                    let name = name.to_string();
                    let idx = names
                        .iter()
                        .position(|v| *v == name)
                        .ok_or_else(|| cur.err(format!("unknown variable '{name}'")))?;
                    let mut k = 1u32;
                    if cur.peek() == Some(b'^') {
                        cur.pos += 1;
                        let Some(digits) = cur.digits() else {
                            return Err(cur.err("expected exponent"));
                        };
                        k = digits.parse().map_err(|_| cur.err("exponent too large"))?;
                    }
                    exps[idx] += k;
                } else {
                    return Err(cur.err("expected coefficient or variable"));
                }
                if cur.peek() == Some(b'*') {
                    cur.pos += 1;
                } else {
                    break;
                }
            }
            out.add_term(exps, coef);
        }
        Ok(out)
    }
}

use std::fmt;

use serde::Serialize;

use super::GroupError;
use crate::braid::FreeWord;

/// Generators with names and relators as freely and cyclically reduced
/// words; empty relators are dropped.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<FreeWord>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<FreeWord>) -> Presentation {
        let rank = generators.len();
        let relators = relators
            .into_iter()
            .map(|r| FreeWord::from_letters(rank, r.cyclically_reduced().letters()).expect("relator rank"))
            .filter(|r| !r.is_empty())
            .collect();
        Presentation { generators, relators }
    }

    pub fn free(names: &[&str]) -> Presentation {
        Presentation::new(names.iter().map(|s| s.to_string()).collect(), Vec::new())
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[FreeWord] {
        &self.relators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(|r| r.len()).sum()
    }

    /// Parses `< a b | a^2, b^3, (a b)^5 >`. Factors are generators or
    /// parenthesised groups, each optionally raised to an integer power.
    pub fn parse(text: &str) -> Result<Presentation, GroupError> {
        let mut p = Parser { s: text.as_bytes(), pos: 0, gens: Vec::new() };
        p.ws();
        p.expect(b'<')?;
        loop {
            p.ws();
            match p.peek() {
                Some(b'|') | Some(b'>') => break,
                _ => {
                    let name = p.ident()?;
                    if p.gens.contains(&name) {
                        return Err(p.err(&format!("duplicate generator '{name}'")));
                    }
                    p.gens.push(name);
                }
            }
        }
        let mut words = Vec::new();
        if p.peek() == Some(b'|') {
            p.pos += 1;
            p.ws();
            if p.peek() != Some(b'>') {
                loop {
                    words.push(p.product()?);
                    p.ws();
                    match p.peek() {
                        Some(b',') => p.pos += 1,
                        _ => break,
                    }
                }
            }
        }
        p.ws();
        p.expect(b'>')?;
        p.ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        let rank = p.gens.len();
        let relators = words.into_iter().map(|w| FreeWord::from_letters(rank, &w).unwrap()).collect();
        Ok(Presentation::new(p.gens, relators))
    }

    fn fmt_word(&self, w: &FreeWord, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = w.letters();
        if l.is_empty() {
            return write!(f, "1");
        }
        let mut i = 0;
        while i < l.len() {
            let mut k = 1;
            while i + k < l.len() && l[i + k] == l[i] {
                k += 1;
            }
            if i > 0 {
                write!(f, " ")?;
            }
            let name = &self.generators[l[i].unsigned_abs() as usize - 1];
            let e = if l[i] > 0 { k as i64 } else { -(k as i64) };
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
            i += k;
        }
        Ok(())
    }

    pub fn word_to_string(&self, w: &FreeWord) -> String {
        struct W<'a>(&'a Presentation, &'a FreeWord);
        impl fmt::Display for W<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_word(self.1, f)
            }
        }
        W(self, w).to_string()
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for g in &self.generators {
            write!(f, " {g}")?;
        }
        write!(f, " |")?;
        for (i, r) in self.relators.iter().enumerate() {
            write!(f, "{}", if i == 0 { " " } else { ", " })?;
            self.fmt_word(r, f)?;
        }
        write!(f, " >")
    }
}

impl Serialize for Presentation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    gens: Vec<String>,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> GroupError {
        GroupError::Parse { pos: self.pos, msg: msg.into() }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), GroupError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String, GroupError> {
        let start = self.pos;
        if !matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == b'_') {
            return Err(self.err("expected a generator name"));
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn int(&mut self) -> Result<i64, GroupError> {
        self.ws();
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("expected an integer exponent"))
    }

    fn product(&mut self) -> Result<Vec<i32>, GroupError> {
        let mut out = Vec::new();
        loop {
            self.ws();
            let base = match self.peek() {
                Some(b'(') => {
                    self.pos += 1;
                    let w = self.product()?;
                    self.ws();
                    self.expect(b')')?;
                    w
                }
                Some(b'1') => {
                    self.pos += 1;
                    Vec::new()
                }
                Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = self.pos;
                    let name = self.ident()?;
                    let idx = self.gens.iter().position(|g| *g == name).ok_or_else(|| GroupError::Parse {
                        pos: start,
                        msg: format!("unknown generator '{name}'"),
                    })?;
                    vec![idx as i32 + 1]
                }
                _ => break,
            };
            self.ws();
            let mut e = 1;
            if self.peek() == Some(b'^') {
                self.pos += 1;
                e = self.int()?;
            }
            let piece: Vec<i32> = if e >= 0 { base.clone() } else { base.iter().rev().map(|l| -l).collect() };
            for _ in 0..e.unsigned_abs() {
                out.extend_from_slice(&piece);
            }
        }
        Ok(out)
    }
}

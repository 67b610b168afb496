//! Free-group words, braid words and the Hurwitz action of `B_d` on the
//! free group `F_d`.
//!
//! Convention: `s_i` sends `m_i -> m_(i+1)` and `m_(i+1) -> m_(i+1) m_i m_(i+1)^-1`,
//! fixing the other generators. With it every braid fixes the descending
//! product `m_d ... m_1`. A word `s_a s_b ...` acts as the composite
//! `phi_a . phi_b . ...` (the rightmost letter is substituted first).

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactpoly::CurveParams;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidError {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("generator index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("a braid group needs at least 2 strands, got {0}")]
    TooFewStrands(usize),
    #[error("parse error at token {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

fn reduce_into(out: &mut Vec<i32>, letters: impl IntoIterator<Item = i32>) {
    for l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
}

/// Parses `g1 g2^-1 g3^2`-style tokens with the given generator prefix.
fn parse_letters(text: &str, prefix: char, max: usize) -> Result<Vec<i32>, BraidError> {
    let mut out = Vec::new();
    let t = text.trim();
    if t.is_empty() || t == "1" {
        return Ok(out);
    }
    for (pos, tok) in t.split_whitespace().enumerate() {
        let err = |msg: &str| BraidError::Parse { pos, msg: format!("{msg} in '{tok}'") };
        let rest = tok.strip_prefix(prefix).ok_or_else(|| err("bad generator prefix"))?;
        let (idx, exp) = match rest.split_once('^') {
            Some((i, e)) => (i, e.parse::<i32>().map_err(|_| err("bad exponent"))?),
            None => (rest, 1),
        };
        let idx: usize = idx.parse().map_err(|_| err("bad index"))?;
        if idx == 0 || idx > max {
            return Err(BraidError::IndexOutOfRange { index: idx, max });
        }
        let l = if exp > 0 { idx as i32 } else { -(idx as i32) };
        out.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
    }
    Ok(out)
}

fn fmt_letters(f: &mut fmt::Formatter<'_>, letters: &[i32], prefix: char) -> fmt::Result {
    if letters.is_empty() {
        return write!(f, "1");
    }
    let mut first = true;
    let mut i = 0;
    while i < letters.len() {
        let l = letters[i];
        let mut k = 1;
        while i + k < letters.len() && letters[i + k] == l {
            k += 1;
        }
        if !first {
            write!(f, " ")?;
        }
        first = false;
        let e = if l > 0 { k as i64 } else { -(k as i64) };
        if e == 1 {
            write!(f, "{prefix}{}", l.abs())?;
        } else {
            write!(f, "{prefix}{}^{e}", l.abs())?;
        }
        i += k;
    }
    Ok(())
}

/// Freely reduced word in the generators `m_1, ..., m_rank`. A letter
/// `+i` is `m_i`, `-i` its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord {
    rank: usize,
    letters: Vec<i32>,
}

impl FreeWord {
    pub fn identity(rank: usize) -> FreeWord {
        FreeWord { rank, letters: Vec::new() }
    }

    /// The generator `m_i`, 1-based.
    pub fn generator(rank: usize, i: usize) -> Result<FreeWord, BraidError> {
        if i == 0 || i > rank {
            return Err(BraidError::IndexOutOfRange { index: i, max: rank });
        }
        Ok(FreeWord { rank, letters: vec![i as i32] })
    }

    pub fn from_letters(rank: usize, letters: &[i32]) -> Result<FreeWord, BraidError> {
        if let Some(&l) = letters.iter().find(|l| **l == 0 || l.unsigned_abs() as usize > rank) {
            return Err(BraidError::IndexOutOfRange { index: l.unsigned_abs() as usize, max: rank });
        }
        let mut out = Vec::with_capacity(letters.len());
        reduce_into(&mut out, letters.iter().copied());
        Ok(FreeWord { rank, letters: out })
    }

    /// `m_d ... m_1`.
    pub fn descending_product(rank: usize) -> FreeWord {
        FreeWord { rank, letters: (1..=rank as i32).rev().collect() }
    }

    pub fn parse(text: &str, rank: usize) -> Result<FreeWord, BraidError> {
        FreeWord::from_letters(rank, &parse_letters(text, 'm', rank)?)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord { rank: self.rank, letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut out = self.letters.clone();
        reduce_into(&mut out, other.letters.iter().copied());
        FreeWord { rank: self.rank.max(other.rank), letters: out }
    }

    pub fn pow(&self, k: i64) -> FreeWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord::identity(self.rank);
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `self^-1 * x * self`.
    pub fn conjugate(&self, x: &FreeWord) -> FreeWord {
        self.inverse().mul(x).mul(self)
    }

    /// Replaces each generator `m_i` by `images[i-1]`.
    pub fn substitute(&self, images: &[FreeWord]) -> FreeWord {
        let rank = images.first().map_or(self.rank, |w| w.rank);
        let mut out = Vec::new();
        for &l in &self.letters {
            let img = &images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                reduce_into(&mut out, img.letters.iter().copied());
            } else {
                reduce_into(&mut out, img.letters.iter().rev().map(|x| -x));
            }
        }
        FreeWord { rank, letters: out }
    }

    /// Strips inverse pairs from the two ends.
    pub fn cyclically_reduced(&self) -> FreeWord {
        let l = &self.letters;
        let (mut i, mut j) = (0, l.len());
        while j - i >= 2 && l[i] == -l[j - 1] {
            i += 1;
            j -= 1;
        }
        FreeWord { rank: self.rank, letters: l[i..j].to_vec() }
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank];
        for &l in &self.letters {
            v[l.unsigned_abs() as usize - 1] += l.signum() as i64;
        }
        v
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_letters(f, &self.letters, 'm')
    }
}

impl Serialize for FreeWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Word in the Artin generators `s_1, ..., s_(strands-1)`; no normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn identity(strands: usize) -> BraidWord {
        BraidWord { strands, letters: Vec::new() }
    }

    pub fn new(strands: usize, letters: Vec<i32>) -> Result<BraidWord, BraidError> {
        let max = strands.saturating_sub(1);
        if let Some(&l) = letters.iter().find(|l| **l == 0 || l.unsigned_abs() as usize > max) {
            return Err(BraidError::IndexOutOfRange { index: l.unsigned_abs() as usize, max });
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn sigma(strands: usize, i: usize) -> Result<BraidWord, BraidError> {
        BraidWord::new(strands, vec![i as i32])
    }

    pub fn parse(text: &str, strands: usize) -> Result<BraidWord, BraidError> {
        BraidWord::new(strands, parse_letters(text, 's', strands.saturating_sub(1))?)
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    pub fn mul(&self, other: &BraidWord) -> BraidWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        BraidWord { strands: self.strands.max(other.strands), letters }
    }

    pub fn pow(&self, k: u32) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.repeat(k as usize) }
    }

    /// Images of `m_1, ..., m_d` under the automorphism of this word.
    pub fn automorphism(&self) -> Vec<FreeWord> {
        let d = self.strands;
        let mut images: Vec<FreeWord> = (1..=d).map(|i| FreeWord::generator(d, i).unwrap()).collect();
        for &l in &self.letters {
            let step = letter_images(d, l);
            // images := images . phi_l
            images = step.iter().map(|w| w.substitute(&images)).collect();
        }
        images
    }
}

fn letter_images(d: usize, l: i32) -> Vec<FreeWord> {
    let i = l.unsigned_abs() as usize;
    let mut v: Vec<FreeWord> = (1..=d).map(|k| FreeWord::generator(d, k).unwrap()).collect();
    let (a, b) = (i as i32, i as i32 + 1);
    if l > 0 {
        v[i - 1] = FreeWord { rank: d, letters: vec![b] };
        v[i] = FreeWord { rank: d, letters: vec![b, a, -b] };
    } else {
        v[i - 1] = FreeWord { rank: d, letters: vec![-a, b, a] };
        v[i] = FreeWord { rank: d, letters: vec![a] };
    }
    v
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_letters(f, &self.letters, 's')
    }
}

impl Serialize for BraidWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn hurwitz_act(w: &BraidWord, x: &FreeWord) -> Result<FreeWord, BraidError> {
    if w.strands != x.rank {
        return Err(BraidError::RankMismatch { expected: w.strands, found: x.rank });
    }
    Ok(x.substitute(&w.automorphism()))
}

/// `s_(d-1) ... s_1`.
pub fn descending_sigma(d: usize) -> BraidWord {
    BraidWord { strands: d, letters: (1..d as i32).rev().collect() }
}

/// `(s_(d-1) ... s_1)^d`, the positive generator of the centre.
pub fn full_twist(d: usize) -> Result<BraidWord, BraidError> {
    if d < 2 {
        return Err(BraidError::TooFewStrands(d));
    }
    Ok(descending_sigma(d).pow(d as u32))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonodromyBraids {
    pub beta_0: BraidWord,
    pub beta_inf: BraidWord,
    pub beta: BraidWord,
}

/// `beta = (s_(d-1) ... s_1)^N`, `beta_0 = beta^a`, `beta_inf = beta^b`.
pub fn monodromy_braids(params: &CurveParams) -> MonodromyBraids {
    let beta = descending_sigma(params.d() as usize).pow(params.n());
    MonodromyBraids { beta_0: beta.pow(params.a()), beta_inf: beta.pow(params.b()), beta }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(d: usize, s: &str) -> FreeWord {
        FreeWord::parse(s, d).unwrap()
    }

    #[test]
    fn generator_action() {
        let s1 = BraidWord::parse("s1", 2).unwrap();
        assert_eq!(hurwitz_act(&s1, &m(2, "m1")).unwrap(), m(2, "m2"));
        assert_eq!(hurwitz_act(&s1, &m(2, "m2")).unwrap(), m(2, "m2 m1 m2^-1"));
        let s13 = BraidWord::parse("s1^3", 2).unwrap();
        assert_eq!(hurwitz_act(&s13, &m(2, "m1")).unwrap(), m(2, "m2 m1 m2 m1^-1 m2^-1"));
    }

    #[test]
    fn text_round_trip() {
        let w = BraidWord::parse("s1 s2 s1^-1 s1^-1 s3^2", 4).unwrap();
        assert_eq!(w.to_string(), "s1 s2 s1^-2 s3^2");
        assert_eq!(BraidWord::parse(&w.to_string(), 4).unwrap(), w);
        assert_eq!(m(3, "m1 m2 m2^-1 m3").to_string(), "m1 m3");
        assert_eq!(FreeWord::identity(2).to_string(), "1");
        assert!(BraidWord::parse("s3", 3).is_err());
        assert!(FreeWord::parse("x1", 3).is_err());
    }

    #[test]
    fn rank_mismatch() {
        let s1 = BraidWord::sigma(3, 1).unwrap();
        assert!(matches!(hurwitz_act(&s1, &m(2, "m1")), Err(BraidError::RankMismatch { .. })));
        assert_eq!(full_twist(1), Err(BraidError::TooFewStrands(1)));
    }

    #[test]
    fn monodromy_words() {
        let b = monodromy_braids(&CurveParams::new(3, 1, 1).unwrap());
        assert_eq!(b.beta_0.to_string(), "s1^3");
        assert_eq!(b.beta_inf, b.beta_0);
        let b = monodromy_braids(&CurveParams::new(5, 1, 2).unwrap());
        assert_eq!(b.beta_0, BraidWord::parse("s2 s1", 3).unwrap().pow(5));
        assert_eq!(b.beta_inf, BraidWord::parse("s2 s1", 3).unwrap().pow(10));
        assert_eq!(b.beta_0.len(), 5 * 2);
        assert_eq!(full_twist(2).unwrap().to_string(), "s1^2");
    }

    #[test]
    fn full_twist_is_conjugation() {
        for d in 2..=4 {
            let imgs = full_twist(d).unwrap().automorphism();
            let delta = FreeWord::descending_product(d);
            for i in 1..=d {
                let g = FreeWord::generator(d, i).unwrap();
                assert_eq!(imgs[i - 1], delta.inverse().conjugate(&g));
            }
        }
    }

    fn braid(d: usize) -> impl Strategy<Value = BraidWord> {
        let k = (d - 1) as i32;
        prop::collection::vec((1..=k, any::<bool>()), 0..12)
            .prop_map(move |v| BraidWord::new(d, v.into_iter().map(|(i, s)| if s { i } else { -i }).collect()).unwrap())
    }

    fn word(d: usize) -> impl Strategy<Value = FreeWord> {
        let k = d as i32;
        prop::collection::vec((1..=k, any::<bool>()), 0..10)
            .prop_map(move |v| FreeWord::from_letters(d, &v.into_iter().map(|(i, s)| if s { i } else { -i }).collect::<Vec<_>>()).unwrap())
    }

    proptest! {
        #[test]
        fn action_is_a_group_action((w1, w2, x) in (2usize..=5).prop_flat_map(|d| (braid(d), braid(d), word(d)))) {
            let lhs = hurwitz_act(&w1.mul(&w2), &x).unwrap();
            let rhs = hurwitz_act(&w1, &hurwitz_act(&w2, &x).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            let back = hurwitz_act(&w1.inverse(), &hurwitz_act(&w1, &x).unwrap()).unwrap();
            prop_assert_eq!(back, x);
        }

        #[test]
        fn descending_product_is_fixed(w in (2usize..=6).prop_flat_map(braid)) {
            let p = FreeWord::descending_product(w.strands());
            prop_assert_eq!(hurwitz_act(&w, &p).unwrap(), p);
        }

        #[test]
        fn parse_display_round_trip(x in (1usize..=4).prop_flat_map(word)) {
            prop_assert_eq!(FreeWord::parse(&x.to_string(), x.rank()).unwrap(), x);
        }
    }
}

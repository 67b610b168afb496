use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{GroupError, Presentation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    A,
    B,
}

/// Element of `Z/p * Z/q = <a, b | a^p, b^q>` in alternating normal form:
/// adjacent syllables use different factors, exponents lie in `1..order`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeProductWord {
    p: u32,
    q: u32,
    syllables: Vec<(Factor, u32)>,
}

impl FreeProductWord {
    pub fn identity(p: u32, q: u32) -> FreeProductWord {
        FreeProductWord { p, q, syllables: Vec::new() }
    }

    pub fn a(p: u32, q: u32) -> FreeProductWord {
        FreeProductWord::identity(p, q).times(Factor::A, 1)
    }

    pub fn b(p: u32, q: u32) -> FreeProductWord {
        FreeProductWord::identity(p, q).times(Factor::B, 1)
    }

    fn order(&self, f: Factor) -> u32 {
        match f {
            Factor::A => self.p,
            Factor::B => self.q,
        }
    }

    /// Normal form of an arbitrary syllable list.
    pub fn from_syllables(p: u32, q: u32, syllables: &[(Factor, i64)]) -> FreeProductWord {
        let mut w = FreeProductWord::identity(p, q);
        for &(f, e) in syllables {
            let ord = w.order(f) as i64;
            w.push(f, e.rem_euclid(ord) as u32);
        }
        w
    }

    fn push(&mut self, f: Factor, e: u32) {
        let ord = self.order(f);
        let e = e % ord;
        if e == 0 {
            return;
        }
        match self.syllables.last_mut() {
            Some((g, x)) if *g == f => {
                let s = (*x + e) % ord;
                if s == 0 {
                    self.syllables.pop();
                } else {
                    *x = s;
                }
            }
            _ => self.syllables.push((f, e)),
        }
    }

    fn times(mut self, f: Factor, e: u32) -> FreeProductWord {
        self.push(f, e);
        self
    }

    pub fn syllables(&self) -> &[(Factor, u32)] {
        &self.syllables
    }

    pub fn syllable_length(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn mul(&self, other: &FreeProductWord) -> FreeProductWord {
        let mut out = self.clone();
        for &(f, e) in &other.syllables {
            out.push(f, e);
        }
        out
    }

    pub fn inverse(&self) -> FreeProductWord {
        let mut out = FreeProductWord::identity(self.p, self.q);
        for &(f, e) in self.syllables.iter().rev() {
            out.push(f, self.order(f) - e);
        }
        out
    }

    pub fn pow(&self, k: u32) -> FreeProductWord {
        let mut out = FreeProductWord::identity(self.p, self.q);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Parses `a b^2 a`, `1` for the identity; exponents may be negative.
    pub fn parse(text: &str, p: u32, q: u32) -> Result<FreeProductWord, GroupError> {
        let mut syl = Vec::new();
        let t = text.trim();
        if t != "1" {
            for tok in t.split_whitespace() {
                let err = || GroupError::Parse { pos: 0, msg: format!("bad syllable '{tok}'") };
                let (name, e) = match tok.split_once('^') {
                    Some((n, e)) => (n, e.parse::<i64>().map_err(|_| err())?),
                    None => (tok, 1),
                };
                let f = match name {
                    "a" => Factor::A,
                    "b" => Factor::B,
                    _ => return Err(err()),
                };
                syl.push((f, e));
            }
        }
        Ok(FreeProductWord::from_syllables(p, q, &syl))
    }
}

impl fmt::Display for FreeProductWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "1");
        }
        for (i, (g, e)) in self.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let name = if *g == Factor::A { "a" } else { "b" };
            if *e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for FreeProductWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum HomVerdict {
    IsHom,
    RelatorFails { index: usize },
}

fn image_of(word: &[i32], images: &[FreeProductWord], p: u32, q: u32) -> FreeProductWord {
    let mut out = FreeProductWord::identity(p, q);
    for &l in word {
        let img = &images[l.unsigned_abs() as usize - 1];
        if l > 0 {
            out = out.mul(img);
        } else {
            out = out.mul(&img.inverse());
        }
    }
    out
}

/// Substitutes the images into every relator and reports the first one
/// that does not reduce to the identity.
pub fn eval_hom(pres: &Presentation, images: &[FreeProductWord]) -> Result<HomVerdict, GroupError> {
    if images.len() != pres.rank() {
        return Err(GroupError::ImageCount { expected: pres.rank(), found: images.len() });
    }
    let (p, q) = images.first().map_or((2, 2), |w| (w.p, w.q));
    for (i, r) in pres.relators().iter().enumerate() {
        if !image_of(r.letters(), images, p, q).is_identity() {
            return Ok(HomVerdict::RelatorFails { index: i });
        }
    }
    Ok(HomVerdict::IsHom)
}

/// All elements of syllable length at most `len`, in a fixed order.
pub fn elements_up_to(p: u32, q: u32, len: usize) -> Vec<FreeProductWord> {
    let mut out = vec![FreeProductWord::identity(p, q)];
    let mut layer = out.clone();
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &layer {
            for f in [Factor::A, Factor::B] {
                if w.syllables.last().is_some_and(|(g, _)| *g == f) {
                    continue;
                }
                for e in 1..w.order(f) {
                    let mut x = w.clone();
                    x.syllables.push((f, e));
                    next.push(x);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HopfReport {
    pub images: Vec<FreeProductWord>,
    pub is_hom: bool,
    /// `a` and `b` both appear among products of at most `L` images and
    /// their inverses; `None` when the map is not a homomorphism.
    pub surjective_within_l: Option<bool>,
    /// Distinct normal forms of syllable length at most `R` have distinct
    /// images; `None` when the map is not a homomorphism.
    pub injective_on_ball_r: Option<bool>,
}

impl HopfReport {
    /// A surjection found within the search bound is injective on the ball.
    pub fn consistent_with_hopf(&self) -> bool {
        !self.is_hom || self.surjective_within_l != Some(true) || self.injective_on_ball_r == Some(true)
    }
}

pub fn bounded_hopf_check(
    p: u32,
    q: u32,
    images: &[FreeProductWord],
    ball_radius: usize,
    search_length: usize,
) -> Result<HopfReport, GroupError> {
    if p < 2 || q < 2 {
        return Err(GroupError::BadOrders { p, q });
    }
    if images.len() != 2 {
        return Err(GroupError::ImageCount { expected: 2, found: images.len() });
    }
    let (ia, ib) = (&images[0], &images[1]);
    let is_hom = ia.pow(p).is_identity() && ib.pow(q).is_identity();
    if !is_hom {
        return Ok(HopfReport { images: images.to_vec(), is_hom, surjective_within_l: None, injective_on_ball_r: None });
    }
    let (a, b) = (FreeProductWord::a(p, q), FreeProductWord::b(p, q));
    let steps = [ia.clone(), ia.inverse(), ib.clone(), ib.inverse()];
    let mut seen: HashSet<FreeProductWord> = HashSet::from([FreeProductWord::identity(p, q)]);
    let mut layer: Vec<FreeProductWord> = vec![FreeProductWord::identity(p, q)];
    for _ in 0..search_length {
        let mut next = Vec::new();
        for w in &layer {
            for s in &steps {
                let x = w.mul(s);
                if seen.insert(x.clone()) {
                    next.push(x);
                }
            }
        }
        layer = next;
    }
    let surjective = seen.contains(&a) && seen.contains(&b);
    let ball = elements_up_to(p, q, ball_radius);
    let imgs: Vec<FreeProductWord> = ball
        .par_iter()
        .map(|w| {
            let word: Vec<i32> = w.syllables.iter().flat_map(|&(f, e)| std::iter::repeat_n(if f == Factor::A { 1 } else { 2 }, e as usize)).collect();
            image_of(&word, images, p, q)
        })
        .collect();
    let distinct: HashSet<&FreeProductWord> = imgs.iter().collect();
    Ok(HopfReport {
        images: images.to_vec(),
        is_hom,
        surjective_within_l: Some(surjective),
        injective_on_ball_r: Some(distinct.len() == imgs.len()),
    })
}

/// Image pairs `(x, y)` of syllable length at most `len` with `x^p = y^q = 1`,
/// i.e. the endomorphisms of `Z/p * Z/q` with short images.
pub fn hopf_candidates(p: u32, q: u32, len: usize) -> Vec<[FreeProductWord; 2]> {
    let elems = elements_up_to(p, q, len);
    let xs: Vec<&FreeProductWord> = elems.iter().filter(|w| w.pow(p).is_identity()).collect();
    let ys: Vec<&FreeProductWord> = elems.iter().filter(|w| w.pow(q).is_identity()).collect();
    let mut out = Vec::new();
    for x in &xs {
        for y in &ys {
            out.push([(*x).clone(), (*y).clone()]);
        }
    }
    out
}

fn cyclic_class(w: &FreeProductWord) -> BTreeSet<Vec<(Factor, u32)>> {
    // cyclically reduce: conjugate away matching ends
    let mut s = w.syllables.clone();
    loop {
        if s.len() >= 2 && s[0].0 == s[s.len() - 1].0 {
            let f = s[0].0;
            let ord = w.order(f);
            let e = (s[0].1 + s[s.len() - 1].1) % ord;
            s.pop();
            s.remove(0);
            if e != 0 {
                s.push((f, e));
            }
            continue;
        }
        break;
    }
    (0..s.len().max(1)).map(|k| if s.is_empty() { Vec::new() } else { s[k..].iter().chain(&s[..k]).copied().collect() }).collect()
}

/// Searches generator images of syllable length at most `max_len` that
/// define a surjective homomorphism onto `Z/p * Z/q`. When `conjugate`
/// is set all images must lie in one conjugacy class (as meridians do).
pub fn find_epimorphism(pres: &Presentation, p: u32, q: u32, max_len: usize, conjugate: bool) -> Option<Vec<FreeProductWord>> {
    let rank = pres.rank();
    if rank == 0 {
        return None;
    }
    let elems: Vec<FreeProductWord> = elements_up_to(p, q, max_len).into_iter().filter(|w| !w.is_identity()).collect();
    let mut checks: Vec<Vec<Vec<i32>>> = vec![Vec::new(); rank];
    for r in pres.relators() {
        let last = r.letters().iter().map(|l| l.unsigned_abs() as usize - 1).max().unwrap_or(0);
        checks[last].push(r.letters().to_vec());
    }
    let search = EpiSearch {
        classes: elems.iter().map(cyclic_class).collect(),
        elems,
        checks,
        conjugate,
        p,
        q,
    };
    (0..search.elems.len()).into_par_iter().find_map_first(|i| {
        let mut chosen = vec![i];
        if !search.passes(0, &chosen) {
            return None;
        }
        search.dfs(1, &mut chosen)
    })
}

struct EpiSearch {
    elems: Vec<FreeProductWord>,
    classes: Vec<BTreeSet<Vec<(Factor, u32)>>>,
    // relators grouped by the last generator they mention
    checks: Vec<Vec<Vec<i32>>>,
    conjugate: bool,
    p: u32,
    q: u32,
}

impl EpiSearch {
    fn images(&self, chosen: &[usize]) -> Vec<FreeProductWord> {
        chosen.iter().map(|&k| self.elems[k].clone()).collect()
    }

    fn passes(&self, depth: usize, chosen: &[usize]) -> bool {
        let imgs = self.images(chosen);
        self.checks[depth].iter().all(|r| image_of(r, &imgs, self.p, self.q).is_identity())
    }

    fn dfs(&self, depth: usize, chosen: &mut Vec<usize>) -> Option<Vec<FreeProductWord>> {
        if depth == self.checks.len() {
            let imgs = self.images(chosen);
            return generates(&imgs, self.p, self.q).then_some(imgs);
        }
        for i in 0..self.elems.len() {
            if self.conjugate && self.classes[i] != self.classes[chosen[0]] {
                continue;
            }
            chosen.push(i);
            if self.passes(depth, chosen) {
                if let Some(found) = self.dfs(depth + 1, chosen) {
                    return Some(found);
                }
            }
            chosen.pop();
        }
        None
    }
}

/// Whether `a` and `b` lie in the subgroup generated by the images: short
/// elements of the subgroup are multiplied pairwise until the set of
/// elements up to a syllable bound stops growing.
fn generates(images: &[FreeProductWord], p: u32, q: u32) -> bool {
    let (a, b) = (FreeProductWord::a(p, q), FreeProductWord::b(p, q));
    let cap = images.iter().map(|w| w.syllable_length()).max().unwrap_or(0).max(3);
    let mut known: HashSet<FreeProductWord> = images.iter().flat_map(|w| [w.clone(), w.inverse()]).collect();
    let mut fresh: Vec<FreeProductWord> = known.iter().cloned().collect();
    while !fresh.is_empty() {
        if known.contains(&a) && known.contains(&b) {
            return true;
        }
        let all: Vec<FreeProductWord> = known.iter().cloned().collect();
        let mut next = Vec::new();
        for x in &fresh {
            for y in &all {
                for z in [x.mul(y), y.mul(x)] {
                    if z.syllable_length() <= cap && !known.contains(&z) {
                        known.insert(z.clone());
                        next.push(z);
                    }
                }
            }
        }
        fresh = next;
    }
    known.contains(&a) && known.contains(&b)
}

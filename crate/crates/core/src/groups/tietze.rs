use serde::Serialize;

use super::Presentation;
use crate::braid::FreeWord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TietzeOptions {
    pub max_passes: usize,
}

impl Default for TietzeOptions {
    fn default() -> Self {
        TietzeOptions { max_passes: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TietzeResult {
    pub presentation: Presentation,
    pub passes: usize,
    pub budget_exhausted: bool,
    pub eliminated: Vec<String>,
}

fn letter_key(l: i32) -> (u32, bool) {
    (l.unsigned_abs(), l < 0)
}

fn word_key(w: &[i32]) -> Vec<(u32, bool)> {
    w.iter().map(|&l| letter_key(l)).collect()
}

/// Minimal rotation of `w` or `w^-1` under the letter order
/// `m1 < m1^-1 < m2 < ...`; equal for conjugate or inverse relators.
fn canonical(w: &[i32]) -> Vec<i32> {
    let inv: Vec<i32> = w.iter().rev().map(|l| -l).collect();
    let mut best: Option<Vec<i32>> = None;
    for base in [w, inv.as_slice()] {
        for k in 0..base.len().max(1) {
            let rot: Vec<i32> = base[k..].iter().chain(&base[..k]).copied().collect();
            if best.as_ref().is_none_or(|b| word_key(&rot) < word_key(b)) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

fn reduce(w: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    let (mut i, mut j) = (0, out.len());
    while j - i >= 2 && out[i] == -out[j - 1] {
        i += 1;
        j -= 1;
    }
    out[i..j].to_vec()
}

fn normalize(rels: Vec<Vec<i32>>) -> Vec<Vec<i32>> {
    let mut v: Vec<Vec<i32>> = rels.iter().map(|r| canonical(&reduce(r))).filter(|r| !r.is_empty()).collect();
    v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| word_key(a).cmp(&word_key(b))));
    v.dedup();
    v
}

fn total(rels: &[Vec<i32>]) -> usize {
    rels.iter().map(|r| r.len()).sum()
}

/// Substitutes generator `g` (1-based) by `w` and renumbers the generators
/// above `g` down by one.
fn substitute(r: &[i32], g: u32, w: &[i32]) -> Vec<i32> {
    let mut out = Vec::new();
    for &l in r {
        if l.unsigned_abs() == g {
            if l > 0 {
                out.extend_from_slice(w);
            } else {
                out.extend(w.iter().rev().map(|x| -x));
            }
        } else {
            out.push(l);
        }
    }
    out.into_iter()
        .map(|l| if l.unsigned_abs() > g { l - l.signum() } else { l })
        .collect()
}

fn best_elimination(rels: &[Vec<i32>], rank: usize) -> Option<(u32, Vec<Vec<i32>>)> {
    let mut best: Option<(u32, Vec<Vec<i32>>)> = None;
    for (ri, r) in rels.iter().enumerate() {
        for g in 1..=rank as u32 {
            let pos: Vec<usize> = (0..r.len()).filter(|&k| r[k].unsigned_abs() == g).collect();
            let [k] = pos.as_slice() else { continue };
            // r = x g^e y  =>  g = (y x)^-e
            let rot: Vec<i32> = r[k + 1..].iter().chain(&r[..*k]).copied().collect();
            let w: Vec<i32> = if r[*k] > 0 { rot.iter().rev().map(|l| -l).collect() } else { rot };
            let rest: Vec<Vec<i32>> = rels
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != ri)
                .map(|(_, s)| substitute(s, g, &w))
                .collect();
            let rest = normalize(rest);
            let better = match &best {
                None => true,
                Some((_, b)) => total(&rest) <= total(b),
            };
            if better {
                best = Some((g, rest));
            }
        }
    }
    best
}

fn rotations(w: &[i32]) -> impl Iterator<Item = Vec<i32>> + '_ {
    (0..w.len()).map(move |k| w[k..].iter().chain(&w[..k]).copied().collect())
}

/// Replaces one relator by a strictly shorter product with a cyclic
/// conjugate of another relator or its inverse.
fn shorten_once(rels: &[Vec<i32>]) -> Option<Vec<Vec<i32>>> {
    for i in (0..rels.len()).rev() {
        let target = &rels[i];
        let mut best: Option<Vec<i32>> = None;
        for (j, other) in rels.iter().enumerate() {
            if i == j {
                continue;
            }
            let inv: Vec<i32> = other.iter().rev().map(|l| -l).collect();
            for base in [other.as_slice(), inv.as_slice()] {
                for rot in rotations(base) {
                    for trot in rotations(target) {
                        let mut cand = trot.clone();
                        cand.extend_from_slice(&rot);
                        let cand = reduce(&cand);
                        if cand.len() < target.len() && best.as_ref().is_none_or(|b| cand.len() < b.len()) {
                            best = Some(cand);
                        }
                    }
                }
            }
        }
        if let Some(b) = best {
            let mut out = rels.to_vec();
            out[i] = b;
            return Some(normalize(out));
        }
    }
    None
}

/// Deterministic simplification by Tietze moves: reduction, removal of
/// duplicate and conjugate relators, elimination of generators occurring
/// once in a relator, and greedy shortening.
pub fn tietze_simplify(pres: &Presentation, opts: &TietzeOptions) -> TietzeResult {
    let mut names: Vec<String> = pres.generators().to_vec();
    let mut rels = normalize(pres.relators().iter().map(|r| r.letters().to_vec()).collect());
    let mut eliminated = Vec::new();
    let mut passes = 0;
    let mut exhausted = true;
    while passes < opts.max_passes {
        passes += 1;
        if let Some((g, rest)) = best_elimination(&rels, names.len()) {
            eliminated.push(names.remove(g as usize - 1));
            rels = rest;
            continue;
        }
        if let Some(next) = shorten_once(&rels) {
            rels = next;
            continue;
        }
        exhausted = false;
        break;
    }
    let rank = names.len();
    let relators = rels.iter().map(|r| FreeWord::from_letters(rank, r).unwrap()).collect();
    TietzeResult { presentation: Presentation::new(names, relators), passes, budget_exhausted: exhausted, eliminated }
}

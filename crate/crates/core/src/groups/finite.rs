use std::collections::HashMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::{GroupError, Presentation};

pub const DEFAULT_TUPLE_CAP: u64 = 1_000_000_000;

/// Finite group as a multiplication table on `0..order`, identity 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    id: String,
    table: Vec<Vec<u16>>,
    inverse: Vec<u16>,
}

impl FiniteGroup {
    fn from_table(id: &str, table: Vec<Vec<u16>>) -> FiniteGroup {
        let n = table.len();
        debug_assert!((0..n).all(|i| table[0][i] as usize == i && table[i][0] as usize == i));
        let inverse = (0..n).map(|i| (0..n).find(|&j| table[i][j] == 0).expect("group has inverses") as u16).collect();
        FiniteGroup { id: id.into(), table, inverse }
    }

    /// Closure of permutation generators, elements sorted with the identity
    /// first.
    fn from_permutations(id: &str, degree: usize, gens: &[Vec<u8>]) -> FiniteGroup {
        let id_perm: Vec<u8> = (0..degree as u8).collect();
        let mut elems = vec![id_perm.clone()];
        let mut k = 0;
        while k < elems.len() {
            for g in gens {
                let p: Vec<u8> = elems[k].iter().map(|&x| g[x as usize]).collect();
                if !elems.contains(&p) {
                    elems.push(p);
                }
            }
            k += 1;
        }
        elems.sort();
        let index: HashMap<Vec<u8>, u16> = elems.iter().enumerate().map(|(i, p)| (p.clone(), i as u16)).collect();
        // (a*b)(x) = b(a(x))
        let table = elems
            .iter()
            .map(|a| elems.iter().map(|b| index[&a.iter().map(|&x| b[x as usize]).collect::<Vec<u8>>()]).collect())
            .collect();
        FiniteGroup::from_table(id, table)
    }

    pub fn cyclic(n: usize) -> FiniteGroup {
        let table = (0..n).map(|i| (0..n).map(|j| ((i + j) % n) as u16).collect()).collect();
        FiniteGroup::from_table(&format!("C{n}"), table)
    }

    /// Dihedral group of order `2n`; elements `r^k s^e` stored as `k + n*e`.
    pub fn dihedral(n: usize) -> FiniteGroup {
        let idx = |k: usize, e: usize| (k % n + n * e) as u16;
        let table = (0..2 * n)
            .map(|x| {
                let (k, e) = (x % n, x / n);
                (0..2 * n)
                    .map(|y| {
                        let (l, f) = (y % n, y / n);
                        if e == 0 { idx(k + l, f) } else { idx(k + n - l, 1 - f) }
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(&format!("D{}", 2 * n), table)
    }

    /// Dicyclic group of order `4n`: `a^(2n) = 1, x^2 = a^n, x a x^-1 = a^-1`.
    pub fn dicyclic(n: usize) -> FiniteGroup {
        let m = 2 * n;
        let idx = |k: usize, e: usize| (k % m + m * e) as u16;
        let table = (0..2 * m)
            .map(|x| {
                let (k, e) = (x % m, x / m);
                (0..2 * m)
                    .map(|y| {
                        let (l, f) = (y % m, y / m);
                        match (e, f) {
                            (0, _) => idx(k + l, f),
                            (_, 0) => idx(k + m - l, 1),
                            _ => idx(k + m - l + n, 0),
                        }
                    })
                    .collect()
            })
            .collect();
        let id = if n == 2 { "Q8".to_string() } else { format!("Dic{}", 4 * n) };
        FiniteGroup::from_table(&id, table)
    }

    pub fn symmetric(n: usize) -> FiniteGroup {
        let swap: Vec<u8> = (0..n as u8).map(|i| if i < 2 && n > 1 { 1 - i } else { i }).collect();
        let cycle: Vec<u8> = (0..n as u8).map(|i| (i + 1) % n as u8).collect();
        FiniteGroup::from_permutations(&format!("S{n}"), n, &[swap, cycle])
    }

    pub fn alternating(n: usize) -> FiniteGroup {
        let gens: Vec<Vec<u8>> = (2..n)
            .map(|k| (0..n as u8).map(|i| match i as usize { 0 => 1, 1 => k as u8, x if x == k => 0, _ => i }).collect())
            .collect();
        FiniteGroup::from_permutations(&format!("A{n}"), n, &gens)
    }

    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> FiniteGroup {
        let (a, b) = (g.order(), h.order());
        let table = (0..a * b)
            .map(|x| (0..a * b).map(|y| g.mul(x / b, y / b) * b as u16 + h.mul(x % b, y % b)).collect())
            .collect();
        FiniteGroup::from_table(&format!("{}x{}", g.id, h.id), table)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> u16 {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> u16 {
        self.inverse[a]
    }

    pub fn pow(&self, a: usize, k: u32) -> u16 {
        let mut x = 0u16;
        for _ in 0..k {
            x = self.table[x as usize][a];
        }
        x
    }

    /// Number of elements with `g^k = 1`.
    pub fn count_roots_of_unity(&self, k: u32) -> u64 {
        (0..self.order()).filter(|&g| self.pow(g, k) == 0).count() as u64
    }

    #[cfg(test)]
    fn is_associative(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| self.mul(self.mul(a, b) as usize, c) == self.mul(a, self.mul(b, c) as usize))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Catalog {
    Tiny,
    Small,
    Full,
}

impl FromStr for Catalog {
    type Err = GroupError;
    fn from_str(s: &str) -> Result<Catalog, GroupError> {
        match s {
            "tiny" => Ok(Catalog::Tiny),
            "small" => Ok(Catalog::Small),
            "full" => Ok(Catalog::Full),
            other => Err(GroupError::UnknownCatalog(other.into())),
        }
    }
}

impl Catalog {
    pub fn name(&self) -> &'static str {
        match self {
            Catalog::Tiny => "tiny",
            Catalog::Small => "small",
            Catalog::Full => "full",
        }
    }

    /// Target groups in a fixed order.
    pub fn groups(&self) -> Vec<FiniteGroup> {
        match self {
            Catalog::Tiny => vec![FiniteGroup::cyclic(1), FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::symmetric(3)],
            Catalog::Small => {
                let mut v: Vec<FiniteGroup> = (1..=6).map(FiniteGroup::cyclic).collect();
                v.push(FiniteGroup::dihedral(2));
                v.push(FiniteGroup::symmetric(3));
                v.push(FiniteGroup::dihedral(4));
                v.push(FiniteGroup::dicyclic(2));
                v.push(FiniteGroup::alternating(4));
                v.push(FiniteGroup::symmetric(4));
                v.push(FiniteGroup::symmetric(5));
                v
            }
            Catalog::Full => {
                let mut v: Vec<FiniteGroup> = (1..=24).map(FiniteGroup::cyclic).collect();
                v.push(FiniteGroup::symmetric(3));
                v.extend((2..=12).filter(|&n| n != 3).map(FiniteGroup::dihedral));
                v.extend((2..=6).map(FiniteGroup::dicyclic));
                let (c2, c3, c4) = (FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::cyclic(4));
                v.push(FiniteGroup::product(&c2, &c4));
                v.push(FiniteGroup::product(&FiniteGroup::product(&c2, &c2), &c2));
                v.push(FiniteGroup::product(&c3, &c3));
                v.push(FiniteGroup::product(&c3, &FiniteGroup::symmetric(3)));
                v.push(FiniteGroup::product(&c2, &FiniteGroup::alternating(4)));
                v.push(FiniteGroup::alternating(4));
                v.push(FiniteGroup::symmetric(4));
                v.push(FiniteGroup::alternating(5));
                v.push(FiniteGroup::symmetric(5));
                v
            }
        }
    }
}

struct Compiled {
    rank: usize,
    // relators grouped by the generator index after which they can be checked
    checks: Vec<Vec<Vec<(usize, bool)>>>,
}

fn compile(pres: &Presentation) -> Compiled {
    let rank = pres.rank();
    let mut checks = vec![Vec::new(); rank.max(1)];
    for r in pres.relators() {
        let word: Vec<(usize, bool)> = r.letters().iter().map(|&l| (l.unsigned_abs() as usize - 1, l < 0)).collect();
        let last = word.iter().map(|(g, _)| *g).max().unwrap_or(0);
        checks[last].push(word);
    }
    Compiled { rank, checks }
}

fn holds(g: &FiniteGroup, imgs: &[u16], word: &[(usize, bool)]) -> bool {
    let mut x = 0u16;
    for &(k, inv) in word {
        let y = if inv { g.inverse[imgs[k] as usize] } else { imgs[k] };
        x = g.table[x as usize][y as usize];
    }
    x == 0
}

fn count_from(g: &FiniteGroup, c: &Compiled, imgs: &mut Vec<u16>) -> u64 {
    let depth = imgs.len();
    if depth == c.rank {
        return 1;
    }
    let mut total = 0;
    for x in 0..g.order() as u16 {
        imgs.push(x);
        if c.checks[depth].iter().all(|w| holds(g, imgs, w)) {
            total += count_from(g, c, imgs);
        }
        imgs.pop();
    }
    total
}

/// Number of homomorphisms from the presented group to `target`, by
/// enumerating generator images with relators checked as soon as all their
/// generators are assigned.
pub fn hom_count(pres: &Presentation, target: &FiniteGroup, tuple_cap: u64) -> Result<u64, GroupError> {
    let tuples = (target.order() as u128).saturating_pow(pres.rank() as u32);
    if tuples > tuple_cap as u128 {
        return Err(GroupError::BudgetExceeded { tuples, cap: tuple_cap });
    }
    let c = compile(pres);
    if c.rank == 0 {
        return Ok(1);
    }
    let first = &c.checks[0];
    Ok((0..target.order() as u16)
        .into_par_iter()
        .map(|x| {
            let mut imgs = vec![x];
            if first.iter().all(|w| holds(target, &imgs, w)) {
                count_from(target, &c, &mut imgs)
            } else {
                0
            }
        })
        .sum())
}

/// `#{g : g^p = 1} * #{g : g^q = 1}`, the number of homomorphisms from
/// `Z/p * Z/q`.
pub fn free_product_count(p: u32, q: u32, target: &FiniteGroup) -> u64 {
    target.count_roots_of_unity(p) * target.count_roots_of_unity(q)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FingerprintEntry {
    pub group: String,
    pub order: usize,
    /// `None` when the enumeration would exceed the tuple cap.
    pub count: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomFingerprint {
    pub catalog: Catalog,
    pub entries: Vec<FingerprintEntry>,
}

impl HomFingerprint {
    pub fn budget_exhausted(&self) -> bool {
        self.entries.iter().any(|e| e.count.is_none())
    }

    pub fn count(&self, group: &str) -> Option<u64> {
        self.entries.iter().find(|e| e.group == group).and_then(|e| e.count)
    }

    /// Entries agree wherever both sides have a count.
    pub fn agrees_with(&self, other: &HomFingerprint) -> bool {
        self.entries.len() == other.entries.len()
            && self.entries.iter().zip(&other.entries).all(|(a, b)| {
                a.group == b.group && (a.count.is_none() || b.count.is_none() || a.count == b.count)
            })
    }
}

pub fn fingerprint(pres: &Presentation, catalog: Catalog, tuple_cap: u64) -> HomFingerprint {
    let entries = catalog
        .groups()
        .iter()
        .map(|g| FingerprintEntry { group: g.id().into(), order: g.order(), count: hom_count(pres, g, tuple_cap).ok() })
        .collect();
    HomFingerprint { catalog, entries }
}

pub fn free_product_fingerprint(p: u32, q: u32, catalog: Catalog) -> HomFingerprint {
    let entries = catalog
        .groups()
        .iter()
        .map(|g| FingerprintEntry { group: g.id().into(), order: g.order(), count: Some(free_product_count(p, q, g)) })
        .collect();
    HomFingerprint { catalog, entries }
}

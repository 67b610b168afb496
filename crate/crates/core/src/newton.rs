//! Newton polygon of a plane germ at the origin: multiplicity, tangent cone,
//! edge polynomials and detection of quasi-homogeneous `y^p + x^q` types.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::exactpoly::SparsePolynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NewtonError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("expected a polynomial in 2 variables, found {0}")]
    NotBivariate(usize),
    #[error("edge {0:?} is not an edge of this polygon")]
    ForeignEdge(Edge),
}

/// One compact edge of the lower-left hull, traversed from the upper-left
/// endpoint to the lower-right one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub start: (u32, u32),
    pub end: (u32, u32),
    /// Primitive step `(di, dj)`: consecutive lattice points are `(i + di, j - dj)`.
    pub direction: (u32, u32),
    pub lattice_length: u32,
}

impl Edge {
    fn new(start: (u32, u32), end: (u32, u32)) -> Edge {
        let di = end.0 - start.0;
        let dj = start.1 - end.1;
        let l = di.gcd(&dj);
        Edge { start, end, direction: (di / l, dj / l), lattice_length: l }
    }

    pub fn height(&self) -> u32 {
        self.start.1 - self.end.1
    }

    pub fn width(&self) -> u32 {
        self.end.0 - self.start.0
    }

    /// Weighted degree `dj*i + di*j`, constant along the edge.
    pub fn weight(&self, (i, j): (u32, u32)) -> u64 {
        let (di, dj) = self.direction;
        dj as u64 * i as u64 + di as u64 * j as u64
    }

    pub fn level(&self) -> u64 {
        self.weight(self.start)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    #[serde(skip)]
    support: BTreeSet<(u32, u32)>,
    edges: Vec<Edge>,
}

impl NewtonPolygon {
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn support(&self) -> &BTreeSet<(u32, u32)> {
        &self.support
    }

    pub fn vertices(&self) -> Vec<(u32, u32)> {
        match self.edges.first() {
            None => self.support.iter().next().copied().into_iter().collect(),
            Some(e) => std::iter::once(e.start).chain(self.edges.iter().map(|e| e.end)).collect(),
        }
    }

    /// True when the hull meets both coordinate axes.
    pub fn is_convenient(&self) -> bool {
        let v = self.vertices();
        v.first().is_some_and(|p| p.0 == 0) && v.last().is_some_and(|p| p.1 == 0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.edges).expect("edges serialize")
    }
}

fn bivariate(p: &SparsePolynomial) -> Result<(), NewtonError> {
    if p.nvars() != 2 {
        return Err(NewtonError::NotBivariate(p.nvars()));
    }
    if p.is_zero() {
        return Err(NewtonError::ZeroPolynomial);
    }
    Ok(())
}

fn cross(o: (u32, u32), a: (u32, u32), b: (u32, u32)) -> i64 {
    let (ox, oy) = (o.0 as i64, o.1 as i64);
    (a.0 as i64 - ox) * (b.1 as i64 - oy) - (a.1 as i64 - oy) * (b.0 as i64 - ox)
}

/// Lower-left convex hull of the support (monotone chain on the sorted
/// support, so ties resolve deterministically).
pub fn polygon(p: &SparsePolynomial) -> Result<NewtonPolygon, NewtonError> {
    bivariate(p)?;
    let support: BTreeSet<(u32, u32)> = p.support().map(|e| (e[0], e[1])).collect();
    // leftmost column's lowest point and bottom row's leftmost point
    let first = *support.iter().next().unwrap();
    let last = *support.iter().min_by_key(|&&(i, j)| (j, i)).unwrap();
    let mut hull: Vec<(u32, u32)> = Vec::new();
    let mut column = None;
    for &pt in support.iter().filter(|pt| pt.0 <= last.0) {
        // only the lowest point of each column can lie on the hull
        if column == Some(pt.0) {
            continue;
        }
        column = Some(pt.0);
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= 0 {
            hull.pop();
        }
        hull.push(pt);
    }
    debug_assert_eq!(hull.first(), Some(&first));
    // drop the tail after the lowest point (it can only rise)
    let stop = hull.iter().position(|&v| v == last).unwrap();
    hull.truncate(stop + 1);
    let edges = hull.windows(2).map(|w| Edge::new(w[0], w[1])).collect();
    Ok(NewtonPolygon { support, edges })
}

pub fn multiplicity(p: &SparsePolynomial) -> Result<u32, NewtonError> {
    if p.is_zero() {
        return Err(NewtonError::ZeroPolynomial);
    }
    Ok(p.order().unwrap())
}

/// A line through the origin with rational slope, or the vertical axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tangent {
    /// The line `x = 0`.
    Vertical,
    /// The line `y = r*x`.
    Slope(BigRational),
}

impl Tangent {
    pub fn horizontal() -> Tangent {
        Tangent::Slope(BigRational::zero())
    }

    /// Linear form vanishing on the line.
    pub fn linear_form(&self, vars: &[String]) -> SparsePolynomial {
        let x = SparsePolynomial::var(vars, 0);
        match self {
            Tangent::Vertical => x,
            Tangent::Slope(r) => &SparsePolynomial::var(vars, 1) - &x.scale(r),
        }
    }
}

impl fmt::Display for Tangent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tangent::Vertical => write!(f, "x=0"),
            Tangent::Slope(r) if r.is_zero() => write!(f, "y=0"),
            Tangent::Slope(r) => write!(f, "y={r}*x"),
        }
    }
}

impl Serialize for Tangent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Factorization of the lowest-degree form into rational lines plus an
/// unfactored remainder without rational linear factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangentCone {
    pub lines: Vec<(Tangent, u32)>,
    pub remainder: Option<SparsePolynomial>,
}

impl TangentCone {
    pub fn exponent_of(&self, t: &Tangent) -> u32 {
        self.lines.iter().find(|(l, _)| l == t).map_or(0, |(_, k)| *k)
    }
}

pub fn tangent_cone(p: &SparsePolynomial) -> Result<TangentCone, NewtonError> {
    bivariate(p)?;
    let form = p.initial_form();
    let deg = form.order().unwrap();
    // coefficient of x^(deg-k) y^k, k = 0..=deg
    let mut dense: Vec<BigRational> =
        (0..=deg).map(|k| form.coeff(&[deg - k, k])).collect();
    let mut lines = Vec::new();
    // x-power: trailing zero coefficients at high k mean x | form
    let x_pow = dense.iter().rev().take_while(|c| c.is_zero()).count() as u32;
    dense.truncate(dense.len() - x_pow as usize);
    if x_pow > 0 {
        lines.push((Tangent::Vertical, x_pow));
    }
    // dense is now a polynomial in t = y/x of degree deg - x_pow
    let roots = rational_roots(&dense);
    for (r, k) in roots.roots {
        lines.push((Tangent::Slope(r), k));
    }
    let remainder = if roots.remainder.len() > 1 {
        let rdeg = (roots.remainder.len() - 1) as u32;
        let vars = p.vars();
        Some(SparsePolynomial::from_terms(
            vars,
            roots.remainder.iter().enumerate().map(|(k, c)| (vec![rdeg - k as u32, k as u32], c.clone())),
        ))
    } else {
        None
    };
    Ok(TangentCone { lines, remainder })
}

/// Rational roots (with multiplicity) of a dense univariate polynomial,
/// plus the monic-free cofactor left after dividing them out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSplit {
    pub roots: Vec<(BigRational, u32)>,
    pub remainder: Vec<BigRational>,
}

fn eval_dense(c: &[BigRational], t: &BigRational) -> BigRational {
    c.iter().rev().fold(BigRational::zero(), |acc, a| acc * t + a)
}

fn divide_linear(c: &[BigRational], r: &BigRational) -> Vec<BigRational> {
    // synthetic division by (t - r); caller guarantees r is a root
    let n = c.len() - 1;
    let mut q = vec![BigRational::zero(); n];
    let mut carry = BigRational::zero();
    for k in (1..=n).rev() {
        carry = &c[k] + carry * r;
        q[k - 1] = carry.clone();
    }
    q
}

fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            let q = &n / &d;
            if q != d {
                large.push(q);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn rational_roots(coeffs: &[BigRational]) -> RootSplit {
    let mut c: Vec<BigRational> = coeffs.to_vec();
    while c.len() > 1 && c.last().unwrap().is_zero() {
        c.pop();
    }
    let mut roots = Vec::new();
    let zeros = c.iter().take_while(|a| a.is_zero()).count();
    if zeros > 0 && zeros < c.len() {
        roots.push((BigRational::zero(), zeros as u32));
        c.drain(..zeros);
    }
    if c.len() <= 1 {
        return RootSplit { roots, remainder: c };
    }
    // integer coefficients with content removed
    let den_lcm = c.iter().fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
    let ints: Vec<BigInt> = c.iter().map(|a| (a * BigRational::from_integer(den_lcm.clone())).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, a| acc.gcd(a));
    let ints: Vec<BigInt> = ints.iter().map(|a| a / &content).collect();
    let nums = positive_divisors(&ints[0]);
    let dens = positive_divisors(ints.last().unwrap());
    let mut candidates: BTreeSet<BigRational> = BTreeSet::new();
    for p in &nums {
        for q in &dens {
            let r = BigRational::new(p.clone(), q.clone());
            candidates.insert(-r.clone());
            candidates.insert(r);
        }
    }
    for r in candidates {
        let mut k = 0;
        while c.len() > 1 && eval_dense(&c, &r).is_zero() {
            c = divide_linear(&c, &r);
            k += 1;
        }
        if k > 0 {
            roots.push((r, k));
        }
    }
    RootSplit { roots, remainder: c }
}

/// Restriction of a polynomial to an edge, as a polynomial in `y` with
/// `x = 1` and the factor `y^(end.1)` removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgePolynomial {
    pub edge: Edge,
    /// Dense coefficients in `y`; degree equals the edge height.
    pub in_y: Vec<BigRational>,
    /// Dense coefficients in `t = y^dj / x^di`; degree equals the lattice length.
    pub in_t: Vec<BigRational>,
}

pub fn edge_polynomial(p: &SparsePolynomial, edge: &Edge) -> Result<EdgePolynomial, NewtonError> {
    let poly = polygon(p)?;
    if !poly.edges.contains(edge) {
        return Err(NewtonError::ForeignEdge(*edge));
    }
    let (di, dj) = edge.direction;
    let l = edge.lattice_length;
    let mut in_y = vec![BigRational::zero(); edge.height() as usize + 1];
    let mut in_t = vec![BigRational::zero(); l as usize + 1];
    for k in 0..=l {
        let (i, j) = (edge.start.0 + k * di, edge.start.1 - k * dj);
        let c = p.coeff(&[i, j]);
        in_y[(j - edge.end.1) as usize] = c.clone();
        in_t[(l - k) as usize] = c;
    }
    Ok(EdgePolynomial { edge: *edge, in_y, in_t })
}

/// Rational roots `r` of the edge polynomial in `t`, i.e. leading terms
/// `y^dj = r*x^di` of the branches attached to the edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRoots {
    pub roots: Vec<(BigRational, u32)>,
    /// Degree (in `t`) of the part without rational roots; 0 when fully split.
    pub unresolved_degree: u32,
}

pub fn edge_roots(p: &SparsePolynomial, edge: &Edge) -> Result<EdgeRoots, NewtonError> {
    let ep = edge_polynomial(p, edge)?;
    let split = rational_roots(&ep.in_t);
    Ok(EdgeRoots {
        roots: split.roots,
        unresolved_degree: (split.remainder.len() - 1) as u32,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inconclusive {
    NotThroughOrigin,
    MissingEndpoint,
    MultiEdge { edges: usize },
    NonCoprime { gcd: u32 },
}

/// Topological type `y^p + x^q` read off a single coprime edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuasiType {
    Conclusive { p: u32, q: u32 },
    Inconclusive(Inconclusive),
}

impl QuasiType {
    pub fn pair(&self) -> Option<(u32, u32)> {
        match *self {
            QuasiType::Conclusive { p, q } => Some((p, q)),
            QuasiType::Inconclusive(_) => None,
        }
    }
}

pub fn quasi_type(p: &SparsePolynomial) -> Result<QuasiType, NewtonError> {
    let poly = polygon(p)?;
    if !p.constant_term().is_zero() {
        return Ok(QuasiType::Inconclusive(Inconclusive::NotThroughOrigin));
    }
    if !poly.is_convenient() {
        return Ok(QuasiType::Inconclusive(Inconclusive::MissingEndpoint));
    }
    match poly.edges.as_slice() {
        [e] => {
            let (pp, q) = (e.start.1, e.end.0);
            let g = pp.gcd(&q);
            if g == 1 {
                Ok(QuasiType::Conclusive { p: pp, q })
            } else {
                Ok(QuasiType::Inconclusive(Inconclusive::NonCoprime { gcd: g }))
            }
        }
        edges => Ok(QuasiType::Inconclusive(Inconclusive::MultiEdge { edges: edges.len() })),
    }
}

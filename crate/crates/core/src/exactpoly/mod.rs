//! Exact sparse multivariate polynomials over the rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vector, so the canonical
//! term order is lexicographic and two equal polynomials always serialize to
//! the same text. Every operation returns a fresh value.

mod curve;
mod text;

pub use curve::{build_curve, CurveParams};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("chart index {chart} out of range for {nvars} variables")]
    ChartOutOfRange { chart: usize, nvars: usize },
    #[error("expected a polynomial in {expected} variables, found {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("cannot homogenize to degree {target}: polynomial has degree {degree}")]
    DegreeTooLow { target: u32, degree: u32 },
    #[error("invalid curve parameters: {0}")]
    InvalidParams(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Which affine chart of the blow-up at the origin to use.
///
/// `A` substitutes `(u, v) <- (u, u*v)` and has exceptional divisor `u = 0`;
/// `B` substitutes `(u, v) <- (u*v, v)` and has exceptional divisor `v = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Chart {
    A,
    B,
}

/// Sparse polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparsePolynomial {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl SparsePolynomial {
    pub fn zero<S: AsRef<str>>(vars: &[S]) -> Self {
        SparsePolynomial {
            vars: vars.iter().map(|s| s.as_ref().to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant<S: AsRef<str>>(vars: &[S], c: BigRational) -> Self {
        let n = vars.len();
        Self::monomial(vars, vec![0; n], c)
    }

    pub fn one<S: AsRef<str>>(vars: &[S]) -> Self {
        Self::constant(vars, BigRational::one())
    }

    pub fn monomial<S: AsRef<str>>(vars: &[S], exps: Vec<u32>, c: BigRational) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length must match variable count");
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// The polynomial consisting of the single variable at `idx`.
    pub fn var<S: AsRef<str>>(vars: &[S], idx: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        Self::monomial(vars, e, BigRational::one())
    }

    /// Builds a polynomial from (exponent vector, coefficient) pairs, adding
    /// coefficients of repeated exponents and dropping zeros.
    pub fn from_terms<S, I>(vars: &[S], terms: I) -> Self
    where
        S: AsRef<str>,
        I: IntoIterator<Item = (Vec<u32>, BigRational)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent vector length must match variable count");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e);
        match slot {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical (lexicographic) order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Vec<u32>> {
        self.terms.keys()
    }

    pub fn coeff(&self, exps: &[u32]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&vec![0; self.nvars()])
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Lowest total degree of a term (the order at the origin).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    pub fn degree_in(&self, idx: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[idx]).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    /// Sum of the terms of lowest total degree.
    pub fn initial_form(&self) -> SparsePolynomial {
        let Some(ord) = self.order() else {
            return self.clone();
        };
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() == ord {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn scale(&self, c: &BigRational) -> SparsePolynomial {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        SparsePolynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> SparsePolynomial {
        let mut acc = Self::one(&self.vars);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Replaces variable `i` by `images[i]`. All images must share one
    /// variable list, which becomes the variable list of the result.
    pub fn substitute(&self, images: &[SparsePolynomial]) -> SparsePolynomial {
        assert_eq!(images.len(), self.nvars(), "one image per variable");
        let target_vars = images
            .first()
            .map(|p| p.vars.clone())
            .unwrap_or_default();
        for im in images {
            assert_eq!(im.vars, target_vars, "substitution images must share variables");
        }
        // powers[i][k] = images[i]^k, filled lazily
        let mut powers: Vec<Vec<SparsePolynomial>> =
            images.iter().map(|im| vec![Self::one(&im.vars)]).collect();
        let mut out = Self::zero(&target_vars);
        for (e, c) in &self.terms {
            let mut t = Self::constant(&target_vars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][k as usize];
            }
            for (te, tc) in t.terms {
                out.add_term(te, tc);
            }
        }
        out
    }

    fn map_exponents<F>(&self, vars: Vec<String>, f: F) -> SparsePolynomial
    where
        F: Fn(&[u32]) -> Vec<u32>,
    {
        let mut out = SparsePolynomial { vars, terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            out.add_term(f(e), c.clone());
        }
        out
    }

    /// Sets the variable at `chart` to 1 and drops it from the variable list.
    pub fn dehomogenize(&self, chart: usize) -> Result<SparsePolynomial, PolyError> {
        if chart >= self.nvars() {
            return Err(PolyError::ChartOutOfRange { chart, nvars: self.nvars() });
        }
        let vars: Vec<String> = self
            .vars
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != chart)
            .map(|(_, v)| v.clone())
            .collect();
        Ok(self.map_exponents(vars, |e| {
            e.iter()
                .enumerate()
                .filter(|(i, _)| *i != chart)
                .map(|(_, &k)| k)
                .collect()
        }))
    }

    /// Inserts a new variable `name` at `position` and pads every term to
    /// total degree `degree`.
    pub fn homogenize(&self, name: &str, position: usize, degree: u32) -> Result<SparsePolynomial, PolyError> {
        if position > self.nvars() {
            return Err(PolyError::ChartOutOfRange { chart: position, nvars: self.nvars() + 1 });
        }
        if let Some(deg) = self.total_degree() {
            if deg > degree {
                return Err(PolyError::DegreeTooLow { target: degree, degree: deg });
            }
        }
        let mut vars = self.vars.clone();
        vars.insert(position, name.to_string());
        Ok(self.map_exponents(vars, |e| {
            let mut v = e.to_vec();
            v.insert(position, degree - e.iter().sum::<u32>());
            v
        }))
    }

    /// Largest `k` such that `var^k` divides the polynomial.
    pub fn var_power_dividing(&self, idx: usize) -> u32 {
        self.terms.keys().map(|e| e[idx]).min().unwrap_or(0)
    }

    pub fn divide_by_var_power(&self, idx: usize, k: u32) -> SparsePolynomial {
        assert!(self.var_power_dividing(idx) >= k, "variable power does not divide");
        self.map_exponents(self.vars.clone(), |e| {
            let mut v = e.to_vec();
            v[idx] -= k;
            v
        })
    }

    /// Exchanges the roles of variables `i` and `j` (names stay in place).
    pub fn swap_vars(&self, i: usize, j: usize) -> SparsePolynomial {
        self.map_exponents(self.vars.clone(), |e| {
            let mut v = e.to_vec();
            v.swap(i, j);
            v
        })
    }

    pub fn with_vars<S: AsRef<str>>(&self, vars: &[S]) -> SparsePolynomial {
        assert_eq!(vars.len(), self.nvars());
        SparsePolynomial {
            vars: vars.iter().map(|s| s.as_ref().to_string()).collect(),
            terms: self.terms.clone(),
        }
    }

    fn require_bivariate(&self) -> Result<(), PolyError> {
        if self.nvars() != 2 {
            return Err(PolyError::WrongArity { expected: 2, found: self.nvars() });
        }
        Ok(())
    }

    /// Strict transform in one chart of the blow-up of the origin, together
    /// with the power of the exceptional variable that was removed. That
    /// power always equals the order of the polynomial at the origin.
    pub fn blowup_chart(&self, chart: Chart) -> Result<(SparsePolynomial, u32), PolyError> {
        self.require_bivariate()?;
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let (total, exc) = match chart {
            Chart::A => (self.map_exponents(self.vars.clone(), |e| vec![e[0] + e[1], e[1]]), 0),
            Chart::B => (self.map_exponents(self.vars.clone(), |e| vec![e[0], e[0] + e[1]]), 1),
        };
        let k = total.var_power_dividing(exc);
        Ok((total.divide_by_var_power(exc, k), k))
    }

    /// Substitutes `y <- y - c*x^k` in a polynomial in `(x, y)`.
    pub fn shift(&self, c: &BigRational, k: u32) -> Result<SparsePolynomial, PolyError> {
        self.require_bivariate()?;
        if c.is_zero() {
            return Ok(self.clone());
        }
        let x = Self::var(&self.vars, 0);
        let y = Self::var(&self.vars, 1);
        let image = &y - &x.pow(k).scale(c);
        Ok(self.substitute(&[x, image]))
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars());
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                t *= num_traits::pow(x.clone(), k as usize);
            }
            acc += t;
        }
        acc
    }
}

impl fmt::Debug for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsePolynomial[{}]({})", self.vars.join(","), self)
    }
}

impl<'a> Add<&'a SparsePolynomial> for &'a SparsePolynomial {
    type Output = SparsePolynomial;
    fn add(self, rhs: &SparsePolynomial) -> SparsePolynomial {
        assert_eq!(self.vars, rhs.vars, "variable lists differ");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a SparsePolynomial> for &'a SparsePolynomial {
    type Output = SparsePolynomial;
    fn sub(self, rhs: &SparsePolynomial) -> SparsePolynomial {
        assert_eq!(self.vars, rhs.vars, "variable lists differ");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn neg(self) -> SparsePolynomial {
        SparsePolynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl<'a> Mul<&'a SparsePolynomial> for &'a SparsePolynomial {
    type Output = SparsePolynomial;
    fn mul(self, rhs: &SparsePolynomial) -> SparsePolynomial {
        assert_eq!(self.vars, rhs.vars, "variable lists differ");
        let mut out = SparsePolynomial::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<SparsePolynomial> for SparsePolynomial {
            type Output = SparsePolynomial;
            fn $m(self, rhs: SparsePolynomial) -> SparsePolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const XY: [&str; 2] = ["x", "y"];

    fn p(s: &str) -> SparsePolynomial {
        SparsePolynomial::parse(s, &XY).unwrap()
    }

    #[test]
    fn dehomogenize_sets_variable_to_one() {
        let xyz = ["x", "y", "z"];
        let x = SparsePolynomial::var(&xyz, 0);
        let y = SparsePolynomial::var(&xyz, 1);
        let z = SparsePolynomial::var(&xyz, 2);
        let inner = &(&x.pow(3) + &y.pow(3)) + &(&(&x * &y) * &z);
        let f = &(&x.pow(3) * &y.pow(3)) + &inner.pow(2);
        let g = f.dehomogenize(2).unwrap();
        assert_eq!(g, p("x^6 + y^6 + x^2*y^2 + 3*x^3*y^3 + 2*x^4*y + 2*x*y^4"));
        assert_eq!(g.homogenize("z", 2, 6).unwrap(), f);
    }

    #[test]
    fn dehomogenize_monomial_and_bad_chart() {
        let f = SparsePolynomial::parse("x*z^2", &["x", "y", "z"]).unwrap();
        assert_eq!(f.dehomogenize(2).unwrap(), p("x"));
        assert_eq!(f.dehomogenize(3), Err(PolyError::ChartOutOfRange { chart: 3, nvars: 3 }));
    }

    #[test]
    fn blowup_of_cusp() {
        let (strict, k) = p("v^2 - u^3".replace('u', "x").replace('v', "y").as_str())
            .blowup_chart(Chart::A)
            .unwrap();
        assert_eq!(k, 2);
        assert_eq!(strict, p("y^2 - x"));
        assert_eq!(SparsePolynomial::zero(&XY).blowup_chart(Chart::B), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn shift_by_zero_is_identity() {
        let f = p("y^2 - x^3 + 3/2*x*y");
        assert_eq!(f.shift(&rat(0), 4).unwrap(), f);
    }

    fn arb_poly() -> impl Strategy<Value = SparsePolynomial> {
        prop::collection::vec(((0u32..5, 0u32..5), -6i64..7), 0..7).prop_map(|ts| {
            SparsePolynomial::from_terms(&XY, ts.into_iter().map(|((i, j), c)| (vec![i, j], rat(c))))
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn degrees_add_under_products(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!a.is_zero() && !b.is_zero());
            let ab = &a * &b;
            prop_assert_eq!(ab.total_degree().unwrap(), a.total_degree().unwrap() + b.total_degree().unwrap());
            let (ha, hb) = (a.initial_form(), b.initial_form());
            prop_assert!((&ha * &hb).is_homogeneous());
        }

        #[test]
        fn shift_round_trip(a in arb_poly(), c in -4i64..5, k in 1u32..4) {
            let s = a.shift(&rat(c), k).unwrap();
            prop_assert_eq!(s.shift(&rat(-c), k).unwrap(), a);
        }

        #[test]
        fn strict_transform_reassembles(a in arb_poly(), chart_b in any::<bool>()) {
            // force a zero at the origin
            let a = &a - &SparsePolynomial::constant(&XY, a.constant_term());
            prop_assume!(!a.is_zero());
            let chart = if chart_b { Chart::B } else { Chart::A };
            let (strict, k) = a.blowup_chart(chart).unwrap();
            prop_assert_eq!(k, a.order().unwrap());
            let x = SparsePolynomial::var(&XY, 0);
            let y = SparsePolynomial::var(&XY, 1);
            let (images, exc) = match chart {
                Chart::A => ([x.clone(), &x * &y], x),
                Chart::B => ([&x * &y, y.clone()], y),
            };
            prop_assert_eq!(&strict * &exc.pow(k), a.substitute(&images));
        }

        #[test]
        fn text_round_trip(a in arb_poly()) {
            let s = a.to_string();
            let back = SparsePolynomial::parse(&s, &XY).unwrap();
            prop_assert_eq!(&back, &a);
            prop_assert_eq!(back.to_string(), s);
        }
    }
}

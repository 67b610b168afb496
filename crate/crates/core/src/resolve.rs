//! Iterated blow-ups of a plane germ along one tangent direction.
//!
//! The driver keeps a local chart at the current infinitely-near point: the
//! strict transform of the curve plus the strict transforms of the
//! exceptional divisors that still pass through the origin. Multiplicities,
//! contacts and proximity are read off that chart; once a coprime
//! quasi-homogeneous type is reached the remaining multiplicities follow
//! from the subtractive Euclidean algorithm.
//!
//! Multiplicity sequences list the points from the origin until the strict
//! transform is smooth; the trailing run of 1's is never included.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::exactpoly::{build_curve, Chart, CurveParams, PolyError, SparsePolynomial};
use crate::newton::{self, edge_roots, polygon, quasi_type, tangent_cone, Inconclusive, NewtonError, QuasiType, Tangent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Newton(#[from] NewtonError),
    #[error("({p}, {q}) is not a coprime pair of positive integers")]
    NonCoprime { p: u32, q: u32 },
    #[error("{0} is not a tangent line of the germ")]
    NotATangent(Tangent),
    #[error("needs an algebraic extension: edge factor of degree {degree} has no rational root")]
    NeedsAlgebraicExtension { degree: u32 },
    #[error("germ is non-reduced")]
    NonReducedBranch,
    #[error("cluster splits into several branches at point {point}")]
    NonUnibranch { point: usize },
    #[error("inadmissible proximity data: {0}")]
    InadmissibleProximity(String),
    #[error("measured proximity at point {point} disagrees with the Enriques structure")]
    InconsistentProximity { point: usize },
    #[error("tracked curve is not smooth at the origin")]
    SingularCurve,
    #[error("curves share a component through the origin")]
    CommonComponent,
    #[error("step budget of {0} exhausted")]
    StepBudget(usize),
}

/// Multiplicity sequence of `y^p = x^q` for coprime `p, q`.
pub fn euclid_sequence(p: u32, q: u32) -> Result<Vec<u32>, ResolveError> {
    if p == 0 || q == 0 || p.gcd(&q) != 1 {
        return Err(ResolveError::NonCoprime { p, q });
    }
    let (mut a, mut b) = (p.min(q), p.max(q));
    let mut out = Vec::new();
    while a > 1 {
        out.push(a);
        let r = b - a;
        (a, b) = (a.min(r), a.max(r));
    }
    Ok(out)
}

fn with_smooth_tail(seq: &[u32]) -> Vec<u32> {
    let mut ext = seq.to_vec();
    if let Some(&last) = seq.iter().max() {
        ext.extend(std::iter::repeat_n(1, last as usize));
    }
    ext
}

/// Proximity relations forced by the multiplicity sequence of a single
/// branch: the points proximate to `P_i` are the consecutive run
/// `P_(i+1), ..., P_(i+k)` whose multiplicities add up to `m_i`.
pub fn enriques_proximity(seq: &[u32]) -> Result<Vec<Vec<usize>>, ResolveError> {
    if seq.contains(&0) || seq.contains(&1) {
        return Err(ResolveError::InadmissibleProximity("entries must be at least 2".into()));
    }
    let ext = with_smooth_tail(seq);
    let mut prox = vec![Vec::new(); seq.len()];
    for (i, &m) in seq.iter().enumerate() {
        let mut sum = 0;
        let mut j = i + 1;
        while sum < m {
            sum += ext[j];
            if j < seq.len() {
                prox[j].push(i);
            }
            j += 1;
        }
        if sum != m {
            return Err(ResolveError::InadmissibleProximity(format!(
                "multiplicity {m} at point {i} is not a sum of the following ones"
            )));
        }
    }
    if let Some(j) = prox.iter().position(|p| p.len() > 2) {
        return Err(ResolveError::InadmissibleProximity(format!("point {j} is proximate to more than two points")));
    }
    Ok(prox)
}

/// Characteristic exponents `(b0; b1, ..., bg)` recovered from a branch's
/// multiplicity sequence by reading it as consecutive Euclidean chains.
pub fn char_exponents(seq: &[u32], proximity: &[Vec<usize>]) -> Result<Vec<u32>, ResolveError> {
    let expected = enriques_proximity(seq)?;
    if proximity != expected.as_slice() {
        return Err(ResolveError::InadmissibleProximity("proximity does not match the multiplicities".into()));
    }
    if seq.is_empty() {
        return Ok(vec![1]);
    }
    let mut ext = seq.to_vec();
    ext.extend(std::iter::repeat_n(1, *seq.last().unwrap() as usize));
    let mut runs: Vec<(u32, u32)> = Vec::new();
    for &v in &ext {
        match runs.last_mut() {
            Some((w, c)) if *w == v => *c += 1,
            _ => runs.push((v, 1)),
        }
    }
    let bad = |msg: &str| ResolveError::InadmissibleProximity(msg.to_string());
    let n = runs[0].0;
    let mut exps = vec![n];
    let (mut divisor, mut carried, mut idx) = (n, runs[0].1, 1usize);
    let mut beta = 0u32;
    while divisor > 1 {
        let &(r1, _) = runs.get(idx).ok_or_else(|| bad("sequence ends before the branch is smooth"))?;
        if r1 >= divisor {
            return Err(bad("multiplicities must decrease between chains"));
        }
        beta += carried * divisor + r1;
        exps.push(beta);
        let (mut prev, mut cur, mut count) = (divisor, r1, runs[idx].1);
        loop {
            if prev % cur == 0 {
                let need = prev / cur;
                if count < need {
                    return Err(bad("Euclidean chain ends early"));
                }
                divisor = cur;
                carried = count - need;
                idx += 1;
                break;
            }
            let rem = prev.checked_sub(count * cur).filter(|&r| r > 0 && r < cur);
            idx += 1;
            match (rem, runs.get(idx)) {
                (Some(r), Some(&(v, c))) if v == r => {
                    (prev, cur, count) = (cur, r, c);
                }
                _ => return Err(bad("multiplicities are not a Euclidean chain")),
            }
        }
    }
    if idx != runs.len() || carried != 0 {
        return Err(bad("trailing multiplicities do not belong to any chain"));
    }
    Ok(exps)
}

pub fn delta_of(seq: &[u32]) -> u64 {
    seq.iter().map(|&m| m as u64 * (m as u64 - 1) / 2).sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct TrackedCurve {
    label: String,
    point: usize,
    eq: SparsePolynomial,
}

/// Local equation at the current center plus the exceptional curves
/// through it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalChart {
    f: SparsePolynomial,
    curves: Vec<TrackedCurve>,
}

impl LocalChart {
    pub fn new(f: SparsePolynomial) -> LocalChart {
        LocalChart { f, curves: Vec::new() }
    }

    pub fn equation(&self) -> &SparsePolynomial {
        &self.f
    }

    pub fn multiplicity(&self) -> u32 {
        self.f.order().unwrap_or(0)
    }

    /// Labels of tracked curves through the origin, oldest first.
    pub fn curves_through_origin(&self) -> Vec<&str> {
        self.curves.iter().map(|c| c.label.as_str()).collect()
    }

    fn points_through_origin(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.curves.iter().map(|c| c.point).collect();
        v.sort_unstable();
        v
    }

    fn map_all<F>(&mut self, f: F) -> Result<(), ResolveError>
    where
        F: Fn(&SparsePolynomial) -> Result<SparsePolynomial, ResolveError>,
    {
        self.f = f(&self.f)?;
        let mut kept = Vec::new();
        for c in &self.curves {
            let eq = f(&c.eq)?;
            if eq.constant_term().is_zero() {
                kept.push(TrackedCurve { eq, ..c.clone() });
            }
        }
        self.curves = kept;
        Ok(())
    }

    /// Substitutes `y <- y + r*x^k`.
    pub fn shift_y(&mut self, r: &BigRational, k: u32) -> Result<(), ResolveError> {
        let c = -r.clone();
        self.map_all(|p| Ok(p.shift(&c, k)?))
    }

    pub fn swap_axes(&mut self) {
        self.map_all(|p| Ok(p.swap_vars(0, 1))).expect("swap cannot fail");
    }

    /// Blows up the origin and moves to the point of the exceptional
    /// divisor corresponding to `direction`. Returns the multiplicity
    /// removed from the curve.
    pub fn blow_up(&mut self, direction: &Tangent, label: &str, point: usize) -> Result<u32, ResolveError> {
        let chart = match direction {
            Tangent::Vertical => Chart::B,
            Tangent::Slope(r) => {
                if !r.is_zero() {
                    self.shift_y(r, 1)?;
                }
                Chart::A
            }
        };
        let (strict, k) = self.f.blowup_chart(chart)?;
        self.f = strict;
        let mut kept = Vec::new();
        for c in &self.curves {
            let (eq, _) = c.eq.blowup_chart(chart)?;
            if eq.constant_term().is_zero() {
                kept.push(TrackedCurve { eq, ..c.clone() });
            }
        }
        let exc_var = match chart {
            Chart::A => 0,
            Chart::B => 1,
        };
        kept.push(TrackedCurve {
            label: label.to_string(),
            point,
            eq: SparsePolynomial::var(self.f.vars(), exc_var),
        });
        self.curves = kept;
        Ok(k)
    }

    /// Local intersection number of the curve with a tracked curve; 0 once
    /// the tracked curve has left the origin.
    pub fn contact(&self, label: &str) -> Result<u32, ResolveError> {
        match self.curves.iter().find(|c| c.label == label) {
            None => Ok(0),
            Some(c) => intersection_number(&self.f, &c.eq),
        }
    }
}

fn trunc_mul(a: &[BigRational], b: &[BigRational], t: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); t];
    for (i, ai) in a.iter().enumerate().take(t) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(t - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn compose_series(p: &SparsePolynomial, xs: &[BigRational], ys: &[BigRational], t: usize) -> Vec<BigRational> {
    let powers = |s: &[BigRational], n: u32| {
        let mut v = vec![{
            let mut one = vec![BigRational::zero(); t];
            one[0] = BigRational::from_integer(1.into());
            one
        }];
        for _ in 0..n {
            let next = trunc_mul(v.last().unwrap(), s, t);
            v.push(next);
        }
        v
    };
    let xp = powers(xs, p.degree_in(0).unwrap_or(0));
    let yp = powers(ys, p.degree_in(1).unwrap_or(0));
    let mut out = vec![BigRational::zero(); t];
    for (e, c) in p.terms() {
        let term = trunc_mul(&xp[e[0] as usize], &yp[e[1] as usize], t);
        for (o, v) in out.iter_mut().zip(term) {
            *o += c * v;
        }
    }
    out
}

/// Intersection multiplicity at the origin of `f` with a curve `g` that is
/// smooth there, via a truncated parametrization of `g`.
pub fn intersection_number(f: &SparsePolynomial, g: &SparsePolynomial) -> Result<u32, ResolveError> {
    if !g.constant_term().is_zero() {
        return Ok(0);
    }
    let (a, b) = (g.coeff(&[1, 0]), g.coeff(&[0, 1]));
    if a.is_zero() && b.is_zero() {
        return Err(ResolveError::SingularCurve);
    }
    if g.num_terms() == 1 {
        // g is a coordinate axis
        let axis = if a.is_zero() { 1 } else { 0 };
        return f
            .terms()
            .filter(|(e, _)| e[axis] == 0)
            .map(|(e, _)| e[1 - axis])
            .min()
            .ok_or(ResolveError::CommonComponent);
    }
    let (f, g, b) = if b.is_zero() { (f.swap_vars(0, 1), g.swap_vars(0, 1), a) } else { (f.clone(), g.clone(), b) };
    let t = (f.total_degree().unwrap_or(0) * g.total_degree().unwrap_or(1) + 2) as usize;
    let mut xs = vec![BigRational::zero(); t];
    xs[1] = BigRational::from_integer(1.into());
    let mut phi = vec![BigRational::zero(); t];
    for _ in 0..t {
        let gv = compose_series(&g, &xs, &phi, t);
        for (p, v) in phi.iter_mut().zip(gv) {
            *p -= v / &b;
        }
    }
    let fv = compose_series(&f, &xs, &phi, t);
    fv.iter()
        .position(|c| !c.is_zero())
        .map(|k| k as u32)
        .ok_or(ResolveError::CommonComponent)
}

fn check_components(f: &SparsePolynomial, point: usize) -> Result<(), ResolveError> {
    let (px, py) = (f.var_power_dividing(0), f.var_power_dividing(1));
    if px >= 2 || py >= 2 {
        return Err(ResolveError::NonReducedBranch);
    }
    if px + py > 0 {
        let rest = f.divide_by_var_power(0, px).divide_by_var_power(1, py);
        if px + py == 2 || rest.constant_term().is_zero() {
            return Err(ResolveError::NonUnibranch { point });
        }
    }
    Ok(())
}

/// Applies coordinate shifts `y <- y + r*x^k` (or the mirrored ones) while
/// the Newton polygon is a single non-coprime edge with integral slope and
/// one rational root; returns the resulting type and the shifted chart.
pub fn normalize_type(chart: &LocalChart, point: usize, budget: usize) -> Result<(QuasiType, LocalChart), ResolveError> {
    let mut ch = chart.clone();
    let mut swapped = false;
    for _ in 0..budget {
        let qt = quasi_type(&ch.f)?;
        let QuasiType::Inconclusive(Inconclusive::NonCoprime { .. }) = qt else {
            if swapped {
                ch.swap_axes();
            }
            let qt = match qt {
                QuasiType::Conclusive { p, q } if swapped => QuasiType::Conclusive { p: q, q: p },
                other => other,
            };
            return Ok((qt, ch));
        };
        let edge = polygon(&ch.f)?.edges()[0];
        let (di, dj) = edge.direction;
        if dj != 1 && di == 1 {
            ch.swap_axes();
            swapped = !swapped;
            continue;
        }
        if dj != 1 {
            // non-integral slope: only a blow-up can make progress
            if swapped {
                ch.swap_axes();
            }
            return Ok((qt, ch));
        }
        let roots = edge_roots(&ch.f, &edge)?;
        if roots.unresolved_degree > 0 {
            return Err(ResolveError::NeedsAlgebraicExtension { degree: roots.unresolved_degree });
        }
        match roots.roots.as_slice() {
            [(r, k)] if *k == edge.lattice_length => ch.shift_y(r, di)?,
            _ => return Err(ResolveError::NonUnibranch { point }),
        }
    }
    Err(ResolveError::StepBudget(budget))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolveOptions {
    /// Stop at the first coprime quasi-homogeneous type and finish with the
    /// Euclidean tail instead of blowing up to the end.
    pub stop_at_quasi_type: bool,
    pub max_steps: usize,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions { stop_at_quasi_type: true, max_steps: 512 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchResolution {
    pub tangent_direction: Tangent,
    pub mult_sequence: Vec<u32>,
    /// For each point, the earlier points it is proximate to.
    pub proximity: Vec<Vec<usize>>,
    pub char_exponents: Vec<u32>,
    pub delta: u64,
    /// Contact of the strict transform with the newest exceptional divisor
    /// at each measured point after the origin.
    pub exceptional_contacts: Vec<u32>,
    /// Number of leading points measured on charts (the rest come from the
    /// Euclidean tail of `tail_type`).
    pub measured_points: usize,
    pub tail_type: Option<(u32, u32)>,
}

impl BranchResolution {
    pub fn multiplicity(&self) -> u32 {
        self.mult_sequence.first().copied().unwrap_or(1)
    }
}

pub fn resolve_branch(p: &SparsePolynomial, direction: &Tangent) -> Result<BranchResolution, ResolveError> {
    resolve_branch_with(p, direction, &ResolveOptions::default())
}

pub fn resolve_branch_with(
    p: &SparsePolynomial,
    direction: &Tangent,
    opts: &ResolveOptions,
) -> Result<BranchResolution, ResolveError> {
    let cone = tangent_cone(p)?;
    let m0 = cone.exponent_of(direction);
    if m0 == 0 {
        return Err(ResolveError::NotATangent(direction.clone()));
    }
    let mut mults = Vec::new();
    let mut measured_prox: Vec<Vec<usize>> = Vec::new();
    let mut contacts = Vec::new();
    let mut tail_type = None;
    if m0 > 1 {
        mults.push(m0);
        measured_prox.push(Vec::new());
        let mut chart = LocalChart::new(p.clone());
        chart.blow_up(direction, "E0", 0)?;
        let mut point = 1;
        loop {
            if point > opts.max_steps {
                return Err(ResolveError::StepBudget(opts.max_steps));
            }
            check_components(&chart.f, point)?;
            let newest = format!("E{}", point - 1);
            if opts.stop_at_quasi_type {
                let (qt, shifted) = normalize_type(&chart, point, opts.max_steps)?;
                if let Some((a, b)) = qt.pair() {
                    let tail = euclid_sequence(a, b)?;
                    if !tail.is_empty() {
                        contacts.push(chart.contact(&newest)?);
                        measured_prox.push(chart.points_through_origin());
                    }
                    tail_type = Some((a, b));
                    mults.extend(tail);
                    break;
                }
                chart = shifted;
            }
            let m = chart.multiplicity();
            if m <= 1 {
                break;
            }
            contacts.push(chart.contact(&newest)?);
            mults.push(m);
            measured_prox.push(chart.points_through_origin());
            let cone = tangent_cone(&chart.f)?;
            if let Some(rem) = &cone.remainder {
                return Err(ResolveError::NeedsAlgebraicExtension { degree: rem.total_degree().unwrap_or(0) });
            }
            let [(line, _)] = cone.lines.as_slice() else {
                return Err(ResolveError::NonUnibranch { point });
            };
            let line = line.clone();
            chart.blow_up(&line, &format!("E{point}"), point)?;
            point += 1;
        }
    }
    let proximity = enriques_proximity(&mults)?;
    for (i, got) in measured_prox.iter().enumerate() {
        if *got != proximity[i] {
            return Err(ResolveError::InconsistentProximity { point: i });
        }
    }
    let char_exponents = char_exponents(&mults, &proximity)?;
    Ok(BranchResolution {
        tangent_direction: direction.clone(),
        delta: delta_of(&mults),
        measured_points: measured_prox.len(),
        mult_sequence: mults,
        proximity,
        char_exponents,
        exceptional_contacts: contacts,
        tail_type,
    })
}

/// Dehomogenized family member at `P = [0:0:1]`.
pub fn affine_curve(params: &CurveParams) -> SparsePolynomial {
    build_curve(params).dehomogenize(2).expect("z is variable 2")
}

fn sorted(p: (u32, u32)) -> (u32, u32) {
    (p.0.min(p.1), p.0.max(p.1))
}

/// Data measured at `P^j`, the `j`-th infinitely-near point of a branch
/// cluster (`P^0` lies on the first exceptional divisor `E`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageMeasurement {
    pub stage: u32,
    pub multiplicity: u32,
    pub contact_with_e: u32,
    /// Contact with the exceptional divisor created last (`E` itself at stage 0).
    pub contact_with_newest: u32,
    pub quasi_type: Option<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SideMeasurement {
    /// `L_inf` for the line `x = 0`, `L_0` for `y = 0`.
    pub line: String,
    pub direction: Tangent,
    pub branch_multiplicity: u32,
    pub stages: Vec<StageMeasurement>,
    pub resolution: BranchResolution,
    /// Which of `aN`, `bN` the measured stage-0 type exhibits.
    pub carries: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Match,
    Mismatch { details: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Claim {
    id: String,
    statement: String,
    measured: Value,
    claimed: Value,
    verdict: Verdict,
}

impl Claim {
    pub fn new(id: &str, statement: &str, measured: Value, claimed: Value) -> Claim {
        let verdict = if measured == claimed {
            Verdict::Match
        } else {
            Verdict::Mismatch { details: format!("measured {measured}, claimed {claimed}") }
        };
        Claim { id: id.into(), statement: statement.into(), measured, claimed, verdict }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn measured(&self) -> &Value {
        &self.measured
    }

    pub fn claimed(&self) -> &Value {
        &self.claimed
    }

    pub fn verdict(&self) -> &Verdict {
        &self.verdict
    }

    pub fn matches(&self) -> bool {
        self.verdict == Verdict::Match
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyAudit {
    pub params: CurveParams,
    pub multiplicity_at_p: u32,
    pub sides: Vec<SideMeasurement>,
    pub claims: Vec<Claim>,
}

impl FamilyAudit {
    pub fn claim(&self, id: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.id == id)
    }

    pub fn side(&self, line: &str) -> Option<&SideMeasurement> {
        self.sides.iter().find(|s| s.line == line)
    }

    /// Claims whose id starts with one of the given roman numerals.
    pub fn claims_in<'a>(&'a self, groups: &'a [&str]) -> impl Iterator<Item = &'a Claim> {
        self.claims.iter().filter(move |c| groups.contains(&c.id.split('.').next().unwrap_or("")))
    }
}

fn measure_side(
    f: &SparsePolynomial,
    line: &str,
    direction: Tangent,
    params: &CurveParams,
) -> Result<SideMeasurement, ResolveError> {
    let m = params.m();
    let branch_multiplicity = tangent_cone(f)?.exponent_of(&direction);
    let mut chart = LocalChart::new(f.clone());
    chart.blow_up(&direction, "E", 0)?;
    let mut stages = Vec::new();
    for j in 0..=m {
        let newest = if j == 0 { "E".to_string() } else { format!("E{j}") };
        let (qt, _) = normalize_type(&chart, j as usize + 1, 64)?;
        stages.push(StageMeasurement {
            stage: j,
            multiplicity: chart.multiplicity(),
            contact_with_e: chart.contact("E")?,
            contact_with_newest: chart.contact(&newest)?,
            quasi_type: qt.pair(),
        });
        if j < m {
            let cone = tangent_cone(&chart.f)?;
            let [(t, _)] = cone.lines.as_slice() else {
                return Err(ResolveError::NonUnibranch { point: j as usize + 1 });
            };
            let t = t.clone();
            chart.blow_up(&t, &format!("E{}", j + 1), j as usize + 1)?;
        }
    }
    let resolution = resolve_branch(f, &direction)?;
    let (d, n) = (params.d(), params.n());
    let first = stages[0].quasi_type.map(sorted);
    let a_type = sorted((d, params.a() * n + m * d));
    let b_type = sorted((d, params.b() * n + m * d));
    let carries = match (first == Some(a_type), first == Some(b_type)) {
        (true, true) => "aN=bN",
        (true, false) => "aN",
        (false, true) => "bN",
        (false, false) => "neither",
    };
    Ok(SideMeasurement {
        line: line.into(),
        direction,
        branch_multiplicity,
        stages,
        resolution,
        carries: carries.into(),
    })
}

fn pair_json(p: Option<(u32, u32)>) -> Value {
    match p {
        Some(p) => json!(sorted(p)),
        None => Value::Null,
    }
}

/// Measures the singularity of the family member at `P` along both tangent
/// lines and compares every measurement with the corresponding claim.
pub fn audit_family(params: &CurveParams) -> Result<FamilyAudit, ResolveError> {
    let f = affine_curve(params);
    let (n, m, d) = (params.n(), params.m(), params.d());
    let (an, bn) = (params.a() * n, params.b() * n);
    let mult = newton::multiplicity(&f)?;
    let cone = tangent_cone(&f)?;

    let (side_inf, side_0) = std::thread::scope(|s| {
        let h = s.spawn(|| measure_side(&f, "L_inf", Tangent::Vertical, params));
        let z = measure_side(&f, "L_0", Tangent::horizontal(), params);
        (h.join().expect("side worker panicked"), z)
    });
    let sides = vec![side_inf?, side_0?];

    let mut claims = vec![
        Claim::new("i", "multiplicity of C at P equals (N-1)d", json!(mult), json!((n - 1) * d)),
    ];
    let mut cone_measured = serde_json::Map::new();
    for (t, k) in &cone.lines {
        cone_measured.insert(t.to_string(), json!(k));
    }
    if let Some(rem) = &cone.remainder {
        cone_measured.insert("remainder".into(), json!(rem.to_string()));
    }
    claims.push(Claim::new(
        "ii",
        "tangent cone is x^(dm) y^(dm)",
        Value::Object(cone_measured),
        json!({"x=0": d * m, "y=0": d * m}),
    ));
    let mut measured_types: Vec<(u32, u32)> = sides.iter().filter_map(|s| s.stages[0].quasi_type.map(sorted)).collect();
    measured_types.sort();
    let mut claimed_types = vec![sorted((d, an + m * d)), sorted((d, bn + m * d))];
    claimed_types.sort();
    claims.push(Claim::new(
        "iii",
        "after one blow-up the two clusters have types (d, aN+md) and (d, bN+md)",
        json!(measured_types),
        json!(claimed_types),
    ));
    for side in &sides {
        let own = match side.carries.as_str() {
            "bN" => bn,
            "aN" | "aN=bN" => an,
            // fall back to the labelling where L_inf carries aN
            _ if side.line == "L_inf" => an,
            _ => bn,
        };
        let ln = &side.line;
        let inner = &side.stages[..m as usize];
        claims.push(Claim::new(
            &format!("iv.{ln}"),
            "contact with E at P^j is (m-j)d for j < m",
            json!(inner.iter().map(|s| s.contact_with_e).collect::<Vec<_>>()),
            json!((0..m).map(|j| (m - j) * d).collect::<Vec<_>>()),
        ));
        claims.push(Claim::new(
            &format!("v.{ln}"),
            "multiplicity d at every P^j with j < m",
            json!(inner.iter().map(|s| s.multiplicity).collect::<Vec<_>>()),
            json!(vec![d; m as usize]),
        ));
        claims.push(Claim::new(
            &format!("vi.{ln}"),
            "type at P^j is (d, XN + (m-j)d), X the exponent carried by this side",
            Value::Array(side.stages.iter().map(|s| pair_json(s.quasi_type)).collect()),
            json!((0..=m).map(|j| sorted((d, own + (m - j) * d))).collect::<Vec<_>>()),
        ));
        let last = side.stages.last().unwrap();
        claims.push(Claim::new(
            &format!("vii.{ln}"),
            "P^m is off E, of type (d, XN), transversal to the last exceptional divisor",
            json!({
                "on_e": last.contact_with_e > 0,
                "type": pair_json(last.quasi_type),
                "transversal": last.contact_with_newest == last.multiplicity,
            }),
            json!({"on_e": false, "type": sorted((d, own)), "transversal": true}),
        ));
        let literal = if own == an && side.carries != "bN" {
            vec![an + m * d, an + (m + 1) * d]
        } else {
            vec![bn + (m + 1) * d, bn + m * d]
        };
        claims.push(Claim::new(
            &format!("viii.{ln}"),
            "branch type pair as literally stated for the singularity at P",
            json!(side.resolution.char_exponents),
            json!(literal),
        ));
    }
    Ok(FamilyAudit { params: *params, multiplicity_at_p: mult, sides, claims })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenusCheck {
    pub delta_total: u64,
    pub arithmetic_genus_bound: u64,
    pub equality: bool,
}

/// Total delta of `P` (two transversal branches) against the arithmetic
/// genus `(D-1)(D-2)/2` of a degree `D` plane curve.
pub fn genus_check_from(params: &CurveParams, branches: &[&BranchResolution]) -> GenusCheck {
    let mut delta_total: u64 = branches.iter().map(|b| b.delta).sum();
    for (i, b1) in branches.iter().enumerate() {
        for b2 in &branches[i + 1..] {
            delta_total += b1.multiplicity() as u64 * b2.multiplicity() as u64;
        }
    }
    let deg = params.degree() as u64;
    let bound = (deg - 1) * (deg - 2) / 2;
    GenusCheck { delta_total, arithmetic_genus_bound: bound, equality: delta_total == bound }
}

pub fn genus_check(params: &CurveParams) -> Result<GenusCheck, ResolveError> {
    let f = affine_curve(params);
    let b1 = resolve_branch(&f, &Tangent::Vertical)?;
    let b2 = resolve_branch(&f, &Tangent::horizontal())?;
    Ok(genus_check_from(params, &[&b1, &b2]))
}

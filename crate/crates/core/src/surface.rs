//! Numerical bookkeeping of divisors on a blown-up surface: self-intersections,
//! pairwise intersection numbers, and the points where divisors meet with
//! their multiplicities and local intersection numbers.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::exactpoly::CurveParams;
use crate::resolve::FamilyAudit;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("unknown point '{0}'")]
    UnknownPoint(String),
    #[error("unknown divisor '{0}'")]
    UnknownDivisor(String),
    #[error("name '{0}' is already in use")]
    DuplicateName(String),
    #[error("cannot blow down {divisor}: self-intersection {self_intersection} is not -1")]
    NotMinusOne { divisor: String, self_intersection: i64 },
    #[error("cannot blow down {divisor}: role {role:?} is not contractible")]
    NotContractible { divisor: String, role: Role },
    #[error("step {step}: {msg}")]
    Invariant { step: usize, msg: String },
    #[error("branch data does not cover {0} stages")]
    BranchData(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Section,
    Fiber,
    Curve,
    Exceptional,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Divisor {
    pub self_intersection: i64,
    pub role: Role,
}

fn key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// A point where divisors meet: multiplicity of each divisor there and the
/// local intersection number of each incident pair.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct PointSpec {
    pub name: String,
    pub incident: BTreeMap<String, u32>,
    #[serde(serialize_with = "pairs_as_strings")]
    pub local: BTreeMap<(String, String), i64>,
}

fn pairs_as_strings<S: serde::Serializer>(m: &BTreeMap<(String, String), i64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|((a, b), v)| (format!("{a}.{b}"), v)))
}

impl PointSpec {
    pub fn new(name: &str) -> PointSpec {
        PointSpec { name: name.into(), ..Default::default() }
    }

    pub fn on(mut self, divisor: &str, multiplicity: u32) -> PointSpec {
        self.incident.insert(divisor.into(), multiplicity);
        self
    }

    pub fn meet(mut self, a: &str, b: &str, local: i64) -> PointSpec {
        self.local.insert(key(a, b), local);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct DivisorConfiguration {
    pub divisors: BTreeMap<String, Divisor>,
    pub points: BTreeMap<String, PointSpec>,
    #[serde(serialize_with = "pairs_as_strings")]
    pub intersections: BTreeMap<(String, String), i64>,
}

impl DivisorConfiguration {
    pub fn new() -> DivisorConfiguration {
        DivisorConfiguration::default()
    }

    pub fn add_divisor(&mut self, name: &str, self_intersection: i64, role: Role) -> Result<(), SurfaceError> {
        if self.divisors.contains_key(name) {
            return Err(SurfaceError::DuplicateName(name.into()));
        }
        self.divisors.insert(name.into(), Divisor { self_intersection, role });
        Ok(())
    }

    pub fn set_intersection(&mut self, a: &str, b: &str, value: i64) {
        if value == 0 {
            self.intersections.remove(&key(a, b));
        } else {
            self.intersections.insert(key(a, b), value);
        }
    }

    pub fn add_point(&mut self, p: PointSpec) -> Result<(), SurfaceError> {
        if self.points.contains_key(&p.name) {
            return Err(SurfaceError::DuplicateName(p.name));
        }
        for d in p.incident.keys() {
            if !self.divisors.contains_key(d) {
                return Err(SurfaceError::UnknownDivisor(d.clone()));
            }
        }
        self.points.insert(p.name.clone(), p);
        Ok(())
    }

    pub fn self_intersection(&self, d: &str) -> Option<i64> {
        self.divisors.get(d).map(|d| d.self_intersection)
    }

    pub fn intersection(&self, a: &str, b: &str) -> i64 {
        if a == b {
            return self.self_intersection(a).unwrap_or(0);
        }
        self.intersections.get(&key(a, b)).copied().unwrap_or(0)
    }

    pub fn retag(&mut self, d: &str, role: Role) -> Result<(), SurfaceError> {
        let div = self.divisors.get_mut(d).ok_or_else(|| SurfaceError::UnknownDivisor(d.into()))?;
        div.role = role;
        Ok(())
    }

    /// Checks that local data are consistent with the global intersection
    /// numbers; `step` only labels the error.
    pub fn validate(&self, step: usize) -> Result<(), SurfaceError> {
        let fail = |msg: String| Err(SurfaceError::Invariant { step, msg });
        let mut sums: BTreeMap<(String, String), i64> = BTreeMap::new();
        for p in self.points.values() {
            for ((a, b), v) in &p.local {
                let (Some(ma), Some(mb)) = (p.incident.get(a), p.incident.get(b)) else {
                    return fail(format!("{}: pair {a}.{b} not incident", p.name));
                };
                if *v < (*ma as i64) * (*mb as i64) {
                    return fail(format!("{}: local {a}.{b} = {v} below {ma}*{mb}", p.name));
                }
                *sums.entry((a.clone(), b.clone())).or_default() += v;
            }
        }
        for (pair, global) in &self.intersections {
            let local = sums.remove(pair).unwrap_or(0);
            if local != *global {
                return fail(format!("{}.{}: global {global}, points give {local}", pair.0, pair.1));
            }
        }
        if let Some(((a, b), v)) = sums.into_iter().find(|(_, v)| *v != 0) {
            return fail(format!("{a}.{b}: points give {v} but divisors are disjoint"));
        }
        Ok(())
    }

    /// Blows up `point`, creating the exceptional divisor `exceptional`
    /// (self-intersection -1). The caller places the infinitely-near points
    /// through `residual`; their local data must account for everything
    /// left over.
    pub fn blowup(&self, point: &str, exceptional: &str, residual: Vec<PointSpec>) -> Result<DivisorConfiguration, SurfaceError> {
        let p = self.points.get(point).ok_or_else(|| SurfaceError::UnknownPoint(point.into()))?;
        let mut out = self.clone();
        out.points.remove(point);
        out.add_divisor(exceptional, -1, Role::Exceptional)?;
        for (d, &m) in &p.incident {
            let m = m as i64;
            out.divisors.get_mut(d).unwrap().self_intersection -= m * m;
            out.set_intersection(d, exceptional, m);
        }
        let inc: Vec<(&String, &u32)> = p.incident.iter().collect();
        for (i, (a, ma)) in inc.iter().enumerate() {
            for (b, mb) in &inc[i + 1..] {
                let v = out.intersection(a, b) - (**ma as i64) * (**mb as i64);
                out.set_intersection(a, b, v);
            }
        }
        for r in residual {
            out.add_point(r)?;
        }
        Ok(out)
    }

    /// Contracts a (-1)-curve; the points on it merge into `point`.
    pub fn blowdown(&self, divisor: &str, point: &str) -> Result<DivisorConfiguration, SurfaceError> {
        let e = self.divisors.get(divisor).ok_or_else(|| SurfaceError::UnknownDivisor(divisor.into()))?;
        if e.self_intersection != -1 {
            return Err(SurfaceError::NotMinusOne { divisor: divisor.into(), self_intersection: e.self_intersection });
        }
        if !matches!(e.role, Role::Exceptional | Role::Fiber) {
            return Err(SurfaceError::NotContractible { divisor: divisor.into(), role: e.role });
        }
        let mut out = self.clone();
        out.divisors.remove(divisor);
        let meets: Vec<(String, i64)> = out
            .divisors
            .keys()
            .map(|d| (d.clone(), self.intersection(d, divisor)))
            .filter(|(_, v)| *v != 0)
            .collect();
        out.intersections.retain(|(a, b), _| a != divisor && b != divisor);
        for (i, (a, va)) in meets.iter().enumerate() {
            out.divisors.get_mut(a).unwrap().self_intersection += va * va;
            for (b, vb) in &meets[i + 1..] {
                let v = out.intersection(a, b) + va * vb;
                out.set_intersection(a, b, v);
            }
        }
        let mut merged = PointSpec::new(point);
        let on_e: Vec<String> = self.points.values().filter(|p| p.incident.contains_key(divisor)).map(|p| p.name.clone()).collect();
        for name in &on_e {
            let p = out.points.remove(name).unwrap();
            for ((a, b), v) in p.local {
                if a != divisor && b != divisor {
                    *merged.local.entry((a, b)).or_default() += v;
                }
            }
        }
        for (a, va) in &meets {
            merged.incident.insert(a.clone(), *va as u32);
        }
        for (i, (a, va)) in meets.iter().enumerate() {
            for (b, vb) in &meets[i + 1..] {
                *merged.local.entry(key(a, b)).or_default() += va * vb;
            }
        }
        if !merged.incident.is_empty() {
            if out.points.contains_key(point) {
                return Err(SurfaceError::DuplicateName(point.into()));
            }
            out.points.insert(point.into(), merged);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Start,
    Blowup,
    Blowdown,
    Retag,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub index: usize,
    pub kind: StepKind,
    pub center: String,
    pub divisor: String,
    pub self_intersections: BTreeMap<String, i64>,
}

/// Multiplicity of the curve and its contact with `E` at each point
/// `P^0, ..., P^m` of one side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SideData {
    pub multiplicities: Vec<u32>,
    pub e_contacts: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchData {
    pub multiplicity_at_p: u32,
    pub inf: SideData,
    pub zero: SideData,
}

impl BranchData {
    /// The values the construction expects: multiplicity d throughout and
    /// contacts md, (m-1)d, ..., d, 0.
    pub fn expected(params: &CurveParams) -> BranchData {
        let (m, d) = (params.m(), params.d());
        let side = SideData {
            multiplicities: vec![d; m as usize + 1],
            e_contacts: (0..=m).map(|j| (m - j) * d).collect(),
        };
        BranchData { multiplicity_at_p: (params.n() - 1) * d, inf: side.clone(), zero: side }
    }

    pub fn from_audit(audit: &FamilyAudit) -> BranchData {
        let side = |line: &str| {
            let s = audit.side(line).expect("audit measures both sides");
            SideData {
                multiplicities: s.stages.iter().map(|st| st.multiplicity).collect(),
                e_contacts: s.stages.iter().map(|st| st.contact_with_e).collect(),
            }
        };
        BranchData { multiplicity_at_p: audit.multiplicity_at_p, inf: side("L_inf"), zero: side("L_0") }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceCheck {
    pub name: String,
    pub measured: i64,
    pub expected: i64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplayReport {
    pub final_config: DivisorConfiguration,
    pub trace: Vec<TraceStep>,
    pub blowups: usize,
    pub blowdowns: usize,
    /// Sigma_1 state right after the first blow-up.
    pub sigma1_checks: Vec<SurfaceCheck>,
    pub final_checks: Vec<SurfaceCheck>,
}

impl ReplayReport {
    pub fn all_ok(&self) -> bool {
        self.sigma1_checks.iter().chain(&self.final_checks).all(|c| c.ok) && self.balanced()
    }

    /// Every elementary transformation pairs one blow-up with one blow-down.
    pub fn balanced(&self) -> bool {
        self.blowups == self.blowdowns + 1
    }
}

struct Replay {
    config: DivisorConfiguration,
    trace: Vec<TraceStep>,
    blowups: usize,
    blowdowns: usize,
}

impl Replay {
    fn record(&mut self, kind: StepKind, center: &str, divisor: &str) -> Result<(), SurfaceError> {
        let index = self.trace.len();
        self.config.validate(index)?;
        self.trace.push(TraceStep {
            index,
            kind,
            center: center.into(),
            divisor: divisor.into(),
            self_intersections: self.config.divisors.iter().map(|(k, v)| (k.clone(), v.self_intersection)).collect(),
        });
        Ok(())
    }

    fn blowup(&mut self, point: &str, exc: &str, residual: Vec<PointSpec>) -> Result<(), SurfaceError> {
        let step = self.trace.len();
        self.config = self.config.blowup(point, exc, residual).map_err(|e| at(step, e))?;
        self.blowups += 1;
        self.record(StepKind::Blowup, point, exc)
    }

    fn blowdown(&mut self, divisor: &str, point: &str) -> Result<(), SurfaceError> {
        let step = self.trace.len();
        self.config = self.config.blowdown(divisor, point).map_err(|e| at(step, e))?;
        self.blowdowns += 1;
        self.record(StepKind::Blowdown, point, divisor)
    }
}

fn at(step: usize, e: SurfaceError) -> SurfaceError {
    match e {
        SurfaceError::Invariant { .. } => e,
        other => SurfaceError::Invariant { step, msg: other.to_string() },
    }
}

fn check(name: &str, measured: i64, expected: i64) -> SurfaceCheck {
    SurfaceCheck { name: name.into(), measured, expected, ok: measured == expected }
}

/// Replays the passage from the plane through `Sigma_1` to `Sigma_N`:
/// blow up `P`, blow up `m` points on each side, then contract the old
/// fibers and the first `m - 1` exceptional curves of each chain.
pub fn replay_nagata(params: &CurveParams, data: &BranchData) -> Result<ReplayReport, SurfaceError> {
    let (n, m, d) = (params.n() as i64, params.m(), params.d() as i64);
    for side in [&data.inf, &data.zero] {
        if side.multiplicities.len() <= m as usize || side.e_contacts.len() <= m as usize {
            return Err(SurfaceError::BranchData(m + 1));
        }
    }
    let deg = d * n;
    let mut cfg = DivisorConfiguration::new();
    cfg.add_divisor("C", deg * deg, Role::Curve)?;
    cfg.add_divisor("L_0", 1, Role::Fiber)?;
    cfg.add_divisor("L_inf", 1, Role::Fiber)?;
    cfg.set_intersection("C", "L_0", deg);
    cfg.set_intersection("C", "L_inf", deg);
    cfg.set_intersection("L_0", "L_inf", 1);
    cfg.add_point(
        PointSpec::new("P")
            .on("C", data.multiplicity_at_p)
            .on("L_0", 1)
            .on("L_inf", 1)
            .meet("C", "L_0", deg)
            .meet("C", "L_inf", deg)
            .meet("L_0", "L_inf", 1),
    )?;
    let mut r = Replay { config: cfg, trace: Vec::new(), blowups: 0, blowdowns: 0 };
    r.record(StepKind::Start, "P", "")?;

    let sides = [("inf", &data.inf), ("0", &data.zero)];
    let first: Vec<PointSpec> = sides
        .iter()
        .map(|(s, side)| {
            let l = format!("L_{s}");
            let mc = side.multiplicities[0];
            PointSpec::new(&format!("P_{s}^0"))
                .on("C", mc)
                .on(&l, 1)
                .on("E", 1)
                .meet("C", &l, deg - data.multiplicity_at_p as i64)
                .meet("C", "E", side.e_contacts[0] as i64)
                .meet(&l, "E", 1)
        })
        .collect();
    r.blowup("P", "E", first)?;
    r.config.retag("E", Role::Section)?;
    let sigma1_checks = vec![
        check("E^2", r.config.intersection("E", "E"), -1),
        check("L_0^2", r.config.intersection("L_0", "L_0"), 0),
        check("L_inf^2", r.config.intersection("L_inf", "L_inf"), 0),
        check("C.E", r.config.intersection("C", "E"), 2 * m as i64 * d),
    ];

    for (s, side) in sides {
        for j in 0..m as usize {
            let prev = if j == 0 { format!("L_{s}") } else { format!("E_{s}^{j}") };
            let new = format!("E_{s}^{}", j + 1);
            let here = format!("P_{s}^{j}");
            let next = format!("P_{s}^{}", j + 1);
            let mc = side.multiplicities[j] as i64;
            let mut residual = vec![
                PointSpec::new(&format!("R_{s}^{}", j + 1)).on(&prev, 1).on(&new, 1).meet(&prev, &new, 1),
            ];
            let mut p = PointSpec::new(&next).on("C", side.multiplicities[j + 1]).on(&new, 1).meet("C", &new, mc);
            if j + 1 < m as usize {
                p = p.on("E", 1).meet("C", "E", side.e_contacts[j + 1] as i64).meet("E", &new, 1);
            } else {
                residual.push(PointSpec::new(&format!("S_{s}")).on("E", 1).on(&new, 1).meet("E", &new, 1));
            }
            residual.push(p);
            r.blowup(&here, &new, residual)?;
        }
    }
    for (s, _) in sides {
        for j in 0..m as usize {
            let e = if j == 0 { format!("L_{s}") } else { format!("E_{s}^{j}") };
            r.blowdown(&e, &format!("Q_{s}^{}", j + 1))?;
        }
    }
    for s in ["inf", "0"] {
        let f = format!("E_{s}^{m}");
        r.config.retag(&f, Role::Fiber)?;
        r.record(StepKind::Retag, "", &f)?;
    }

    let c = &r.config;
    let mut final_checks = vec![
        check("E^2", c.intersection("E", "E"), -n),
        check("C.E", c.intersection("C", "E"), 0),
        check("C^2", c.intersection("C", "C"), d * d * n),
    ];
    for s in ["inf", "0"] {
        let f = format!("E_{s}^{m}");
        final_checks.push(check(&format!("{f}^2"), c.intersection(&f, &f), 0));
        final_checks.push(check(&format!("C.{f}"), c.intersection("C", &f), d));
        final_checks.push(check(&format!("E.{f}"), c.intersection("E", &f), 1));
    }
    final_checks.push(check("divisors", c.divisors.len() as i64, 4));
    Ok(ReplayReport {
        final_config: r.config,
        trace: r.trace,
        blowups: r.blowups,
        blowdowns: r.blowdowns,
        sigma1_checks,
        final_checks,
    })
}

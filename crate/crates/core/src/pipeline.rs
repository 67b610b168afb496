//! End-to-end run for one member of the family: curve, singularity audit,
//! surface replay, braid monodromy, presentation and certification.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::braid::{monodromy_braids, MonodromyBraids};
use crate::exactpoly::{build_curve, CurveParams};
use crate::groups::{
    abelianization, eval_hom, find_epimorphism, fingerprint, free_product_fingerprint, tietze_simplify, zvk_presentation,
    Catalog, FreeProductWord, HomFingerprint, HomVerdict, Presentation, TietzeOptions, DEFAULT_TUPLE_CAP,
};
use crate::resolve::{audit_family, genus_check_from, FamilyAudit, GenusCheck};
use crate::surface::{replay_nagata, BranchData, SurfaceCheck};

/// Claims checked by strict mode; the branch-type claim is reported but
/// kept out of the strict decision.
pub const STRICT_CLAIMS: [&str; 7] = ["i", "ii", "iii", "iv", "v", "vi", "vii"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PipelineOptions {
    pub catalog: Catalog,
    pub tuple_cap: u64,
    pub tietze_passes: usize,
    /// Largest syllable length tried for epimorphism images.
    pub epimorphism_length: usize,
    pub timings: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            catalog: Catalog::Small,
            tuple_cap: DEFAULT_TUPLE_CAP,
            tietze_passes: TietzeOptions::default().max_passes,
            epimorphism_length: 3,
            timings: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveStats {
    pub degree: u32,
    pub generic_fiber_points: u32,
    pub terms: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceSummary {
    pub e_squared: i64,
    pub c_squared: i64,
    pub c_dot_e: i64,
    pub blowups: usize,
    pub blowdowns: usize,
    pub balanced: bool,
    pub checks: Vec<SurfaceCheck>,
    pub all_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PresentationStage {
    pub raw: Presentation,
    pub raw_relator_count: usize,
    pub redundant: Vec<usize>,
    pub simplified: Presentation,
    pub tietze_passes: usize,
    pub tietze_budget_exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianizationCheck {
    pub measured: Vec<String>,
    pub expected: Vec<String>,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FingerprintCheck {
    pub presentation: HomFingerprint,
    pub target: HomFingerprint,
    pub agree: bool,
    pub budget_exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EpimorphismCheck {
    pub target: String,
    pub images: Option<Vec<FreeProductWord>>,
    pub max_syllable_length: Option<usize>,
    pub hom_on_raw: Option<HomVerdict>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimSummary {
    pub mismatched: Vec<String>,
    pub strict_ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineVerdict {
    CertifiedMatch,
    Mismatch,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub params: CurveParams,
    pub curve: CurveStats,
    pub audit: Option<FamilyAudit>,
    pub claims: Option<ClaimSummary>,
    pub genus: Option<GenusCheck>,
    pub surface: Option<SurfaceSummary>,
    pub monodromy: MonodromyBraids,
    pub presentations: PresentationStage,
    pub abelianization: AbelianizationCheck,
    pub fingerprints: FingerprintCheck,
    pub epimorphism: EpimorphismCheck,
    pub verdict: PipelineVerdict,
    pub evidence: String,
    pub errors: Vec<StageError>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl PipelineReport {
    /// Verdict plus the geometric claims and surface checks.
    pub fn strict_ok(&self) -> bool {
        self.verdict == PipelineVerdict::CertifiedMatch
            && self.errors.is_empty()
            && self.claims.as_ref().is_some_and(|c| c.strict_ok)
            && self.surface.as_ref().is_some_and(|s| s.all_ok)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

struct Clock {
    on: bool,
    marks: BTreeMap<String, f64>,
}

impl Clock {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.on {
            self.marks.insert(stage.into(), start.elapsed().as_secs_f64() * 1e3);
        }
        out
    }
}

pub fn run_pipeline(params: &CurveParams, opts: &PipelineOptions) -> PipelineReport {
    let mut clock = Clock { on: opts.timings, marks: BTreeMap::new() };
    let mut errors = Vec::new();
    let (n, d) = (params.n(), params.d());

    let curve = clock.time("curve", || build_curve(params));
    let degree = params.degree();
    let curve = CurveStats { degree, generic_fiber_points: degree - (n - 1) * d, terms: curve.num_terms() };

    let audit = match clock.time("audit", || audit_family(params)) {
        Ok(a) => Some(a),
        Err(e) => {
            errors.push(StageError { stage: "audit".into(), message: e.to_string() });
            None
        }
    };
    let claims = audit.as_ref().map(|a| {
        let mismatched: Vec<String> = a.claims.iter().filter(|c| !c.matches()).map(|c| c.id().to_string()).collect();
        let strict_ok = a.claims_in(&STRICT_CLAIMS).all(|c| c.matches());
        ClaimSummary { mismatched, strict_ok }
    });
    let genus = audit.as_ref().map(|a| {
        let branches: Vec<_> = a.sides.iter().map(|s| &s.resolution).collect();
        genus_check_from(params, &branches)
    });

    let surface = audit.as_ref().and_then(|a| {
        match clock.time("surface", || replay_nagata(params, &BranchData::from_audit(a))) {
            Ok(r) => {
                let c = &r.final_config;
                Some(SurfaceSummary {
                    e_squared: c.intersection("E", "E"),
                    c_squared: c.intersection("C", "C"),
                    c_dot_e: c.intersection("C", "E"),
                    blowups: r.blowups,
                    blowdowns: r.blowdowns,
                    balanced: r.balanced(),
                    all_ok: r.all_ok(),
                    checks: r.sigma1_checks.iter().chain(&r.final_checks).cloned().collect(),
                })
            }
            Err(e) => {
                errors.push(StageError { stage: "surface".into(), message: e.to_string() });
                None
            }
        }
    });

    let monodromy = clock.time("braids", || monodromy_braids(params));
    let zvk = zvk_presentation(&[monodromy.beta_0.clone(), monodromy.beta_inf.clone()], d as usize, Some(n))
        .expect("monodromy braids have d strands");
    let simple = clock.time("tietze", || {
        tietze_simplify(&zvk.presentation, &TietzeOptions { max_passes: opts.tietze_passes })
    });
    let presentations = PresentationStage {
        raw: zvk.presentation.clone(),
        raw_relator_count: zvk.raw_count,
        redundant: zvk.redundant.clone(),
        simplified: simple.presentation.clone(),
        tietze_passes: simple.passes,
        tietze_budget_exhausted: simple.budget_exhausted,
    };
    let pres = &presentations.simplified;

    let measured: Vec<String> = clock.time("abelianization", || abelianization(pres)).iter().map(|x| x.to_string()).collect();
    let expected = vec![degree.to_string()];
    let abelianization = AbelianizationCheck { matches: measured == expected, measured, expected };

    let fp = clock.time("fingerprint", || fingerprint(pres, opts.catalog, opts.tuple_cap));
    let target = free_product_fingerprint(d, n, opts.catalog);
    let fingerprints = FingerprintCheck {
        agree: fp.agrees_with(&target),
        budget_exhausted: fp.budget_exhausted(),
        presentation: fp,
        target,
    };

    let epimorphism = clock.time("epimorphism", || {
        let max = opts.epimorphism_length.max(1);
        let found = (max.min(2)..=max).find_map(|l| find_epimorphism(pres, d, n, l, true).map(|imgs| (l, imgs)));
        let hom_on_raw = found.as_ref().and_then(|(_, imgs)| eval_hom(&presentations.raw, imgs).ok());
        EpimorphismCheck {
            target: format!("Z/{d} * Z/{n}"),
            max_syllable_length: found.as_ref().map(|(l, _)| *l),
            images: found.map(|(_, imgs)| imgs),
            hom_on_raw,
        }
    });

    let (verdict, evidence) = decide(&abelianization, &fingerprints, &epimorphism, &presentations);
    PipelineReport {
        params: *params,
        curve,
        audit,
        claims,
        genus,
        surface,
        monodromy,
        presentations,
        abelianization,
        fingerprints,
        epimorphism,
        verdict,
        evidence,
        errors,
        timings_ms: opts.timings.then_some(clock.marks),
    }
}

fn decide(
    ab: &AbelianizationCheck,
    fp: &FingerprintCheck,
    epi: &EpimorphismCheck,
    pres: &PresentationStage,
) -> (PipelineVerdict, String) {
    if !ab.matches {
        return (PipelineVerdict::Mismatch, format!("abelianization {:?} differs from {:?}", ab.measured, ab.expected));
    }
    if !fp.agree {
        let bad: Vec<&str> = fp
            .presentation
            .entries
            .iter()
            .zip(&fp.target.entries)
            .filter(|(a, b)| a.count.is_some() && a.count != b.count)
            .map(|(a, _)| a.group.as_str())
            .collect();
        return (PipelineVerdict::Mismatch, format!("homomorphism counts differ for {}", bad.join(", ")));
    }
    if epi.hom_on_raw.is_some_and(|v| v != HomVerdict::IsHom) {
        return (PipelineVerdict::Mismatch, "epimorphism images fail a relator of the raw presentation".into());
    }
    let mut missing = Vec::new();
    if fp.budget_exhausted {
        missing.push("some homomorphism counts exceed the tuple cap");
    }
    if epi.images.is_none() {
        missing.push("no epimorphism found within the syllable bound");
    }
    if pres.tietze_budget_exhausted {
        missing.push("Tietze simplification stopped at its pass budget");
    }
    if !missing.is_empty() {
        return (PipelineVerdict::BudgetExhausted, missing.join("; "));
    }
    let evidence = format!(
        "abelianization {:?}, {} homomorphism counts agree with {}, explicit epimorphism onto {}; this is evidence of isomorphism, not a proof",
        ab.measured,
        fp.presentation.entries.len(),
        epi.target,
        epi.target
    );
    (PipelineVerdict::CertifiedMatch, evidence)
}

fn s(v: &Value) -> String {
    match v {
        Value::String(x) => x.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// Human-readable summary built from the JSON report.
pub fn render_text(report: &Value) -> String {
    let mut out = String::new();
    let p = &report["params"];
    let _ = writeln!(out, "curve N={} a={} b={}: degree {}, generic fiber {} points", s(&p["N"]), s(&p["a"]), s(&p["b"]), s(&report["curve"]["degree"]), s(&report["curve"]["generic_fiber_points"]));
    if let Some(audit) = report["audit"].as_object() {
        let _ = writeln!(out, "singular point P: multiplicity {}", s(&audit["multiplicity_at_p"]));
        for side in audit["sides"].as_array().into_iter().flatten() {
            let r = &side["resolution"];
            let _ = writeln!(
                out,
                "  branch {}: multiplicities {}, characteristic exponents {}, delta {}, carries {}",
                s(&side["line"]),
                s(&r["mult_sequence"]),
                s(&r["char_exponents"]),
                s(&r["delta"]),
                s(&side["carries"])
            );
        }
        for c in audit["claims"].as_array().into_iter().flatten() {
            let status = s(&c["verdict"]["status"]);
            let _ = writeln!(out, "  claim {:<12} {:<8} measured {} claimed {}", s(&c["id"]), status, s(&c["measured"]), s(&c["claimed"]));
        }
    }
    if let Some(g) = report["genus"].as_object() {
        let _ = writeln!(out, "genus: delta total {} vs bound {}", s(&g["delta_total"]), s(&g["arithmetic_genus_bound"]));
    }
    if let Some(sf) = report["surface"].as_object() {
        let _ = writeln!(
            out,
            "surface: E^2 = {}, C^2 = {}, C.E = {}, {} blow-ups, {} blow-downs, checks {}",
            s(&sf["e_squared"]),
            s(&sf["c_squared"]),
            s(&sf["c_dot_e"]),
            s(&sf["blowups"]),
            s(&sf["blowdowns"]),
            if sf["all_ok"] == Value::Bool(true) { "ok" } else { "FAILED" }
        );
    }
    let m = &report["monodromy"];
    let _ = writeln!(out, "braids: beta_0 = {}, beta_inf = {}", s(&m["beta_0"]), s(&m["beta_inf"]));
    let pr = &report["presentations"];
    let _ = writeln!(out, "raw presentation: {}", s(&pr["raw"]));
    let _ = writeln!(out, "simplified: {}", s(&pr["simplified"]));
    let ab = &report["abelianization"];
    let _ = writeln!(out, "abelianization: {} (expected {})", s(&ab["measured"]), s(&ab["expected"]));
    let fp = &report["fingerprints"];
    let _ = writeln!(out, "fingerprint ({} catalog):", s(&fp["presentation"]["catalog"]));
    let targets = fp["target"]["entries"].as_array().cloned().unwrap_or_default();
    for (e, t) in fp["presentation"]["entries"].as_array().into_iter().flatten().zip(targets) {
        let _ = writeln!(out, "  {:<8} {:>10} {:>10}", s(&e["group"]), s(&e["count"]), s(&t["count"]));
    }
    let ep = &report["epimorphism"];
    let _ = writeln!(out, "epimorphism onto {}: {}", s(&ep["target"]), s(&ep["images"]));
    for e in report["errors"].as_array().into_iter().flatten() {
        let _ = writeln!(out, "error in {}: {}", s(&e["stage"]), s(&e["message"]));
    }
    if let Some(t) = report["timings_ms"].as_object() {
        for (k, v) in t {
            let _ = writeln!(out, "time {k}: {:.1} ms", v.as_f64().unwrap_or(0.0));
        }
    }
    let _ = writeln!(out, "verdict: {} ({})", s(&report["verdict"]), s(&report["evidence"]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_member_certifies() {
        let params = CurveParams::new(3, 1, 1).unwrap();
        let r = run_pipeline(&params, &PipelineOptions::default());
        assert_eq!(r.verdict, PipelineVerdict::CertifiedMatch);
        assert_eq!(r.abelianization.measured, vec!["6"]);
        assert_eq!(r.curve.degree, 6);
        assert_eq!(r.curve.generic_fiber_points, 2);
        assert!(r.timings_ms.is_none());
        assert!(r.claims.as_ref().unwrap().strict_ok);
        assert!(r.claims.as_ref().unwrap().mismatched.iter().all(|c| c.starts_with("viii")));
        assert!(r.strict_ok());
        let text = render_text(&r.to_json());
        assert!(text.contains("verdict: certified-match"));
    }

    #[test]
    fn reports_are_deterministic() {
        let params = CurveParams::new(3, 1, 1).unwrap();
        let opts = PipelineOptions { catalog: Catalog::Tiny, ..Default::default() };
        let a = serde_json::to_string(&run_pipeline(&params, &opts)).unwrap();
        let b = serde_json::to_string(&run_pipeline(&params, &opts)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_cap_reports_exhaustion() {
        let params = CurveParams::new(3, 1, 1).unwrap();
        let opts = PipelineOptions { tuple_cap: 10, ..Default::default() };
        let r = run_pipeline(&params, &opts);
        assert_eq!(r.verdict, PipelineVerdict::BudgetExhausted);
        assert!(r.fingerprints.budget_exhausted);
    }
}

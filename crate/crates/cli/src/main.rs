use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use zvk_core::braid::{BraidWord, FreeWord};
use zvk_core::exactpoly::CurveParams;
use zvk_core::groups::{
    fingerprint, free_product_fingerprint, orbifold_pi1, tietze_simplify, torus_pencil_orbifold, Catalog, OrbifoldSpec,
    Presentation, TietzeOptions, DEFAULT_TUPLE_CAP,
};
use zvk_core::pipeline::{render_text, run_pipeline, PipelineOptions, PipelineVerdict};
use zvk_core::resolve::{audit_family, genus_check_from};
use zvk_core::surface::{replay_nagata, BranchData};

const CERTIFIED: u8 = 0;
const MISMATCH: u8 = 1;
const INVALID: u8 = 2;
const EXHAUSTED: u8 = 3;

#[derive(Parser)]
#[command(name = "zvk", version, about = "Fundamental groups of complements of a family of plane curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report to this path ("-" for stdout instead of text).
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Exit with status 1 when any checked claim disagrees.
    #[arg(long, global = true)]
    strict: bool,
    /// Finite groups used for homomorphism counts: tiny, small or full.
    #[arg(long, global = true, default_value = "small")]
    catalog: Catalog,
    /// Seed for randomized helpers; results never depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Include per-stage wall-clock times in the report.
    #[arg(long, global = true)]
    timings: bool,
    /// Largest number of generator-image tuples enumerated per target group.
    #[arg(long, global = true, default_value_t = DEFAULT_TUPLE_CAP)]
    tuple_cap: u64,
}

#[derive(Args, Clone, Copy)]
struct FamilyArgs {
    #[arg(long = "N")]
    n: u32,
    #[arg(long)]
    a: u32,
    #[arg(long)]
    b: u32,
}

impl FamilyArgs {
    fn params(&self) -> Result<CurveParams, String> {
        CurveParams::new(self.n, self.a, self.b).map_err(|e| e.to_string())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline with certification of the fundamental group.
    Analyze {
        #[command(flatten)]
        family: FamilyArgs,
        /// Pass budget for Tietze simplification.
        #[arg(long, default_value_t = TietzeOptions::default().max_passes)]
        tietze_passes: usize,
        /// Largest syllable length of epimorphism images.
        #[arg(long, default_value_t = 3)]
        epi_length: usize,
    },
    /// Singularity audit at the base point only.
    Resolve {
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Divisor bookkeeping from the plane to the ruled surface.
    Surface {
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Braid group operations.
    Braid {
        #[command(subcommand)]
        op: BraidOp,
    },
    /// Presentation tools.
    Group {
        #[command(subcommand)]
        op: GroupOp,
    },
    /// Orbifold fundamental groups of the sphere.
    Orbifold {
        /// Torus pencil with coprime degrees p and q.
        #[arg(long, requires = "q", conflicts_with_all = ["punctures", "cones"])]
        p: Option<u32>,
        #[arg(long, requires = "p")]
        q: Option<u32>,
        #[arg(long)]
        punctures: Option<usize>,
        /// Comma-separated cone multiplicities.
        #[arg(long, value_delimiter = ',')]
        cones: Vec<u32>,
    },
}

#[derive(Subcommand)]
enum BraidOp {
    /// Hurwitz action of a braid on the free group.
    Act {
        #[arg(long)]
        strands: usize,
        /// Braid word such as "s1 s2^-1".
        #[arg(long)]
        braid: String,
        /// Free-group word such as "m1 m2^-1"; all generators when omitted.
        #[arg(long)]
        word: Option<String>,
    },
}

#[derive(Subcommand)]
enum GroupOp {
    /// Homomorphism counts into the chosen catalog.
    Fingerprint {
        /// Presentation such as "< a b | a^2, b^3 >".
        #[arg(long)]
        presentation: String,
        /// Compare with Z/p * Z/q.
        #[arg(long, requires = "q")]
        p: Option<u32>,
        #[arg(long, requires = "p")]
        q: Option<u32>,
        /// Simplify before counting.
        #[arg(long)]
        simplify: bool,
    },
}

struct Outcome {
    json: Value,
    text: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if let Some(path) = &cli.json {
                let body = serde_json::to_string_pretty(&out.json).expect("json");
                if path.as_os_str() == "-" {
                    emit(&(body + "\n"));
                    return ExitCode::from(out.code);
                }
                if let Err(e) = std::fs::write(path, body + "\n") {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(INVALID);
                }
            }
            emit(&out.text);
            ExitCode::from(out.code)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(INVALID)
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn run(cli: &Cli) -> Result<Outcome, String> {
    match &cli.command {
        Command::Analyze { family, tietze_passes, epi_length } => {
            let params = family.params()?;
            let opts = PipelineOptions {
                catalog: cli.catalog,
                tuple_cap: cli.tuple_cap,
                tietze_passes: *tietze_passes,
                epimorphism_length: *epi_length,
                timings: cli.timings,
            };
            let report = run_pipeline(&params, &opts);
            let code = match report.verdict {
                PipelineVerdict::Mismatch => MISMATCH,
                PipelineVerdict::BudgetExhausted => EXHAUSTED,
                PipelineVerdict::CertifiedMatch if cli.strict && !report.strict_ok() => MISMATCH,
                PipelineVerdict::CertifiedMatch => CERTIFIED,
            };
            let json = report.to_json();
            Ok(Outcome { text: render_text(&json), json, code })
        }
        Command::Resolve { family } => {
            let params = family.params()?;
            let audit = audit_family(&params).map_err(|e| e.to_string())?;
            let branches: Vec<_> = audit.sides.iter().map(|s| &s.resolution).collect();
            let genus = genus_check_from(&params, &branches);
            let strict_ok = audit.claims_in(&zvk_core::pipeline::STRICT_CLAIMS).all(|c| c.matches());
            let mut text = format!("multiplicity at P: {}\n", audit.multiplicity_at_p);
            for s in &audit.sides {
                text += &format!(
                    "branch {}: multiplicities {:?}, characteristic exponents {:?}, delta {}, carries {}\n",
                    s.line, s.resolution.mult_sequence, s.resolution.char_exponents, s.resolution.delta, s.carries
                );
            }
            for c in &audit.claims {
                let status = if c.matches() { "match" } else { "MISMATCH" };
                text += &format!("claim {:<12} {:<8} measured {} claimed {}\n", c.id(), status, c.measured(), c.claimed());
            }
            text += &format!("genus: delta total {} vs bound {}\n", genus.delta_total, genus.arithmetic_genus_bound);
            let code = if cli.strict && !strict_ok { MISMATCH } else { CERTIFIED };
            Ok(Outcome { json: json!({ "audit": audit, "genus": genus }), text, code })
        }
        Command::Surface { family } => {
            let params = family.params()?;
            let audit = audit_family(&params).map_err(|e| e.to_string())?;
            let report = replay_nagata(&params, &BranchData::from_audit(&audit)).map_err(|e| e.to_string())?;
            let mut text = String::new();
            for step in &report.trace {
                text += &format!("{:>3} {:?} {} at {}\n", step.index, step.kind, step.divisor, step.center);
            }
            for c in report.sigma1_checks.iter().chain(&report.final_checks) {
                text += &format!("{:<14} {:>6} expected {:>6} {}\n", c.name, c.measured, c.expected, if c.ok { "ok" } else { "FAILED" });
            }
            text += &format!("{} blow-ups, {} blow-downs\n", report.blowups, report.blowdowns);
            let code = if report.all_ok() { CERTIFIED } else { MISMATCH };
            Ok(Outcome { json: serde_json::to_value(&report).expect("json"), text, code })
        }
        Command::Braid { op: BraidOp::Act { strands, braid, word } } => {
            let b = BraidWord::parse(braid, *strands).map_err(|e| e.to_string())?;
            let images = b.automorphism();
            let words: Vec<FreeWord> = match word {
                Some(w) => vec![FreeWord::parse(w, *strands).map_err(|e| e.to_string())?],
                None => (1..=*strands).map(|i| FreeWord::generator(*strands, i).expect("in range")).collect(),
            };
            let mut rows = Vec::new();
            let mut text = String::new();
            for w in words {
                let img = w.substitute(&images);
                text += &format!("{w} -> {img}\n");
                rows.push(json!({ "word": w, "image": img }));
            }
            Ok(Outcome { json: json!({ "braid": b, "action": rows }), text, code: CERTIFIED })
        }
        Command::Group { op: GroupOp::Fingerprint { presentation, p, q, simplify } } => {
            let mut pres = Presentation::parse(presentation).map_err(|e| e.to_string())?;
            if *simplify {
                pres = tietze_simplify(&pres, &TietzeOptions::default()).presentation;
            }
            let fp = fingerprint(&pres, cli.catalog, cli.tuple_cap);
            let target = p.zip(*q).map(|(p, q)| free_product_fingerprint(p, q, cli.catalog));
            let mut text = format!("{pres}\n");
            for (i, e) in fp.entries.iter().enumerate() {
                let count = e.count.map_or("-".to_string(), |c| c.to_string());
                let other = target.as_ref().map_or(String::new(), |t| t.entries[i].count.map_or("-".into(), |c| c.to_string()));
                text += &format!("{:<8} {:>10} {:>10}\n", e.group, count, other);
            }
            let code = match &target {
                Some(t) if !fp.agrees_with(t) => MISMATCH,
                _ if fp.budget_exhausted() => EXHAUSTED,
                _ => CERTIFIED,
            };
            Ok(Outcome { json: json!({ "presentation": pres, "fingerprint": fp, "target": target }), text, code })
        }
        Command::Orbifold { p, q, punctures, cones } => {
            let (spec, pencil) = match (p, q) {
                (Some(p), Some(q)) => {
                    let t = torus_pencil_orbifold(*p, *q).map_err(|e| e.to_string())?;
                    (t.spec.clone(), Some(t))
                }
                _ => (OrbifoldSpec::new(punctures.unwrap_or(0), cones.clone()).map_err(|e| e.to_string())?, None),
            };
            let pres = orbifold_pi1(&spec);
            let simple = tietze_simplify(&pres, &TietzeOptions::default()).presentation;
            let fp = fingerprint(&simple, cli.catalog, cli.tuple_cap);
            let mut text = format!("punctures {}, cone points {:?}\n", spec.punctures, spec.cone_points);
            if let Some(t) = &pencil {
                for f in &t.certificate.fibers {
                    text += &format!("fiber over {}: {} (multiplicity {})\n", f.point, f.member, f.multiplicity);
                }
                if t.p.min(t.q) == 1 {
                    text += "note: a degree-1 factor makes the torus decomposition non-unique\n";
                }
            }
            text += &format!("presentation: {pres}\nsimplified: {simple}\n");
            for e in &fp.entries {
                text += &format!("{:<8} {:>10}\n", e.group, e.count.map_or("-".to_string(), |c| c.to_string()));
            }
            let code = if fp.budget_exhausted() { EXHAUSTED } else { CERTIFIED };
            let json = json!({ "spec": spec, "pencil": pencil, "presentation": pres, "simplified": simple, "fingerprint": fp });
            Ok(Outcome { json, text, code })
        }
    }
}

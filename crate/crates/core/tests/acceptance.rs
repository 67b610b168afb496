//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --release --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use zvk_core::braid::{full_twist, hurwitz_act, BraidWord, FreeWord};
use zvk_core::exactpoly::{CurveParams, SparsePolynomial};
use zvk_core::groups::*;
use zvk_core::newton::Tangent;
use zvk_core::pipeline::{run_pipeline, PipelineOptions, PipelineVerdict};
use zvk_core::resolve::*;
use zvk_core::surface::{replay_nagata, BranchData};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn params(n: u32, a: u32, b: u32) -> CurveParams {
    CurveParams::new(n, a, b).unwrap()
}

fn types(side: &SideMeasurement) -> Vec<Option<(u32, u32)>> {
    side.stages.iter().map(|s| s.quasi_type.map(|(x, y)| (x.min(y), x.max(y)))).collect()
}

fn criterion_1() -> Outcome {
    let audit = audit_family(&params(3, 1, 1)).map_err(|e| e.to_string())?;
    ensure(audit.multiplicity_at_p == 4, "multiplicity at P")?;
    ensure(audit.claim("ii").unwrap().measured() == &json!({"x=0": 2, "y=0": 2}), "tangent cone")?;
    ensure(audit.claim("iii").unwrap().measured() == &json!([[2, 5], [2, 5]]), "strict types")?;
    for side in &audit.sides {
        ensure(side.stages[0].contact_with_e == 2, "E-contact md")?;
        ensure(side.stages.iter().all(|s| s.multiplicity == 2), "intermediate multiplicities")?;
        let last = side.stages.last().unwrap();
        ensure(last.quasi_type == Some((2, 3)) && last.contact_with_newest == last.multiplicity, "final type")?;
    }
    let bad: Vec<&str> = audit.claims_in(&["i", "ii", "iii", "iv", "v", "vi", "vii"]).filter(|c| !c.matches()).map(|c| c.id()).collect();
    ensure(bad.is_empty(), format!("claims disagree: {bad:?}"))?;
    Ok("multiplicity 4, cone x^2 y^2, types (2,5) -> (2,3) transversal".into())
}

fn criterion_2() -> Outcome {
    let audit = audit_family(&params(5, 1, 2)).map_err(|e| e.to_string())?;
    ensure(audit.claim("iii").unwrap().measured() == &json!([[3, 11], [3, 16]]), "strict types")?;
    let a_side = audit.sides.iter().find(|s| s.carries == "aN").ok_or("no side carries aN")?;
    let b_side = audit.sides.iter().find(|s| s.carries == "bN").ok_or("no side carries bN")?;
    let expected: Vec<Option<(u32, u32)>> = (0..=2).map(|j| Some((3, 5 + (2 - j) * 3))).collect();
    ensure(types(a_side) == expected, format!("aN stages {:?}", types(a_side)))?;
    ensure(a_side.stages.last().unwrap().quasi_type == Some((3, 5)), "aN final")?;
    ensure(b_side.stages.last().unwrap().quasi_type == Some((3, 10)), "bN final")?;
    let bad: Vec<&str> = audit.claims_in(&["i", "ii", "iii", "iv", "v", "vi", "vii"]).filter(|c| !c.matches()).map(|c| c.id()).collect();
    ensure(bad.is_empty(), format!("claims disagree: {bad:?}"))?;
    Ok("types (3,11),(3,8),(3,5) on the aN side, finals (3,5),(3,10)".into())
}

fn criterion_3() -> Outcome {
    let audit = audit_family(&params(3, 1, 1)).map_err(|e| e.to_string())?;
    for side in &audit.sides {
        ensure(side.resolution.mult_sequence == vec![2, 2, 2], "multiplicity sequence")?;
        ensure(side.resolution.char_exponents == vec![2, 7], "characteristic exponents")?;
        let c = audit.claim(&format!("viii.{}", side.line)).ok_or("branch claim missing")?;
        ensure(!c.matches(), "literal (5,7) not flagged")?;
        ensure(c.claimed() == &json!([5, 7]), "claimed pair")?;
    }
    Ok("measured [2,2,2] and (2;7); literal (5,7) flagged as mismatch".into())
}

fn criterion_4() -> Outcome {
    let mut worst = Duration::ZERO;
    for (n, a, b) in [(3, 1, 1), (5, 1, 2), (7, 2, 1)] {
        let start = Instant::now();
        let p = params(n, a, b);
        let audit = audit_family(&p).map_err(|e| e.to_string())?;
        let r = replay_nagata(&p, &BranchData::from_audit(&audit)).map_err(|e| e.to_string())?;
        let c = &r.final_config;
        let (n, m, d) = (n as i64, p.m(), p.d() as i64);
        ensure(c.intersection("E", "E") == -n, format!("E^2 for N={n}"))?;
        ensure(c.intersection("C", "E") == 0, "C.E")?;
        ensure(c.intersection("C", "C") == d * d * n, "C^2")?;
        for f in [format!("E_0^{m}"), format!("E_inf^{m}")] {
            ensure(c.intersection(&f, &f) == 0, format!("{f}^2"))?;
            ensure(c.intersection("C", &f) == d, format!("C.{f}"))?;
        }
        ensure(r.balanced() && r.all_ok(), "replay checks")?;
        let t = start.elapsed();
        ensure(t < Duration::from_secs(1), format!("N={n} took {t:?}"))?;
        worst = worst.max(t);
    }
    Ok(format!("N = 3, 5, 7 replayed, slowest {worst:.2?}"))
}

fn random_free_word(rng: &mut ChaCha8Rng, d: usize) -> FreeWord {
    let len = rng.gen_range(0..8);
    let letters: Vec<i32> = (0..len).map(|_| rng.gen_range(1..=d as i32) * if rng.gen() { 1 } else { -1 }).collect();
    FreeWord::from_letters(d, &letters).unwrap()
}

fn random_braid(rng: &mut ChaCha8Rng, d: usize) -> BraidWord {
    let len = rng.gen_range(0..6);
    let letters: Vec<i32> = (0..len).map(|_| rng.gen_range(1..d as i32) * if rng.gen() { 1 } else { -1 }).collect();
    BraidWord::new(d, letters).unwrap()
}

fn act(b: &BraidWord, w: &FreeWord) -> FreeWord {
    hurwitz_act(b, w).unwrap()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let d = rng.gen_range(2..=6);
        let (u, v, w) = (random_braid(&mut rng, d), random_braid(&mut rng, d), random_free_word(&mut rng, d));
        let wrap = |mid: Vec<i32>| u.mul(&BraidWord::new(d, mid).unwrap()).mul(&v);
        for i in 1..d as i32 {
            if i + 1 < d as i32 {
                ensure(act(&wrap(vec![i, i + 1, i]), &w) == act(&wrap(vec![i + 1, i, i + 1]), &w), "braid relation")?;
            }
            for j in i + 2..d as i32 {
                ensure(act(&wrap(vec![i, j]), &w) == act(&wrap(vec![j, i]), &w), "distant commutation")?;
            }
            ensure(act(&wrap(vec![i, -i]), &w) == act(&u.mul(&v), &w), "inverse")?;
        }
        let delta = FreeWord::descending_product(d);
        ensure(act(&u, &delta) == delta, "descending product")?;
    }
    for d in 2..=4 {
        let tw = full_twist(d).map_err(|e| e.to_string())?;
        let delta = FreeWord::descending_product(d);
        for i in 1..=d {
            let g = FreeWord::generator(d, i).unwrap();
            ensure(act(&tw, &g) == delta.inverse().conjugate(&g), format!("full twist on m{i}, d={d}"))?;
        }
    }
    Ok("200 random pairs, d <= 6; full twist is conjugation by m_d...m_1".into())
}

fn criterion_6() -> Outcome {
    let r = run_pipeline(&params(3, 1, 1), &PipelineOptions::default());
    ensure(r.abelianization.measured == vec!["6"], "abelianization")?;
    let fp = &r.fingerprints.presentation;
    let s5 = FiniteGroup::symmetric(5);
    ensure(fp.count("S3") == Some(12) && fp.count("S4") == Some(90), "S3/S4 counts")?;
    ensure(fp.count("S5") == Some(free_product_count(2, 3, &s5)) && fp.count("S5") == Some(546), "S5 count")?;
    ensure(r.fingerprints.agree, "fingerprints")?;
    ensure(r.epimorphism.max_syllable_length.is_some_and(|l| l <= 2), "epimorphism length")?;
    ensure(r.epimorphism.hom_on_raw == Some(HomVerdict::IsHom), "epimorphism on raw presentation")?;
    ensure(r.verdict == PipelineVerdict::CertifiedMatch, "verdict")?;
    Ok("abelianization [6], S3/S4/S5 = 12/90/546, certified-match".into())
}

fn criterion_7() -> Outcome {
    let opts = PipelineOptions { catalog: Catalog::Full, ..Default::default() };
    let r = run_pipeline(&params(5, 1, 2), &opts);
    ensure(r.abelianization.measured == vec!["15"], "abelianization")?;
    let fp = &r.fingerprints.presentation;
    ensure(fp.count("S4") == Some(9) && fp.count("S5") == Some(525), "S4/S5 counts")?;
    ensure(r.verdict != PipelineVerdict::Mismatch, "mismatch verdict")?;
    ensure(r.verdict == PipelineVerdict::CertifiedMatch || r.fingerprints.budget_exhausted, "unexplained verdict")?;
    Ok(format!("abelianization [15], S4 = 9, S5 = 525, {} targets, {:?}", fp.entries.len(), r.verdict))
}

fn criterion_8() -> Outcome {
    let xy = ["x", "y"];
    let full = ResolveOptions { stop_at_quasi_type: false, ..Default::default() };
    let mut count = 0;
    for q in 2..=12u32 {
        for p in 2..q {
            if p.gcd(&q) != 1 {
                continue;
            }
            let f = SparsePolynomial::parse(&format!("y^{p} - x^{q}"), &xy).map_err(|e| e.to_string())?;
            let r = resolve_branch_with(&f, &Tangent::horizontal(), &full).map_err(|e| e.to_string())?;
            let seq = euclid_sequence(p, q).map_err(|e| e.to_string())?;
            ensure(r.mult_sequence == seq, format!("({p},{q}) sequence"))?;
            let prox = enriques_proximity(&seq).map_err(|e| e.to_string())?;
            ensure(char_exponents(&seq, &prox).map_err(|e| e.to_string())? == vec![p, q], format!("({p},{q}) exponents"))?;
            count += 1;
        }
    }
    let delta = |p, q| delta_of(&euclid_sequence(p, q).unwrap());
    ensure(delta(2, 7) == 3 && delta(3, 5) == 4, "delta")?;
    let g = genus_check(&params(3, 1, 1)).map_err(|e| e.to_string())?;
    ensure(g.delta_total == 10 && g.arithmetic_genus_bound == 10 && g.equality, "genus")?;
    Ok(format!("{count} germs y^p = x^q, delta(2,7)=3, delta(3,5)=4, genus 10 = 10"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 0..500 {
        let (m, n) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let a: Vec<Vec<BigInt>> = (0..m).map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-50..=50))).collect()).collect();
        let s = smith_normal_form(&a);
        ensure(matmul(&matmul(&s.u, &a), &s.v) == s.d, format!("matrix {k}: U A V != D"))?;
        ensure(matmul(&matmul(&s.u_inv, &s.d), &s.v_inv) == a, format!("matrix {k}: recomposition"))?;
        ensure(determinant(&s.u).abs().is_one() && determinant(&s.v).abs().is_one(), format!("matrix {k}: unimodularity"))?;
        for (i, row) in s.d.iter().enumerate() {
            ensure(row.iter().enumerate().all(|(j, x)| i == j || x.is_zero()), format!("matrix {k}: not diagonal"))?;
        }
        let diag = s.diagonal();
        for w in diag.windows(2) {
            let ok = if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) };
            ensure(ok && !w[0].is_negative(), format!("matrix {k}: divisibility chain"))?;
        }
    }
    Ok("500 random matrices up to 6x6".into())
}

fn criterion_10() -> Outcome {
    for (p, q) in [(2, 3), (3, 5), (2, 5), (4, 9)] {
        let pres = orbifold_pi1(&OrbifoldSpec::new(1, vec![p, q]).unwrap());
        let simple = tietze_simplify(&pres, &TietzeOptions::default()).presentation;
        ensure(simple.to_string() == format!("< u1 u2 | u1^{p}, u2^{q} >"), format!("orbifold ({p},{q}): {simple}"))?;
    }
    let closed = orbifold_pi1(&OrbifoldSpec::new(0, vec![2, 3]).unwrap());
    let fp = fingerprint(&closed, Catalog::Full, DEFAULT_TUPLE_CAP);
    ensure(fp.entries.iter().all(|e| e.count == Some(1)), "closed (2,3) orbifold not trivial")?;
    let cands = hopf_candidates(2, 3, 3);
    ensure(cands.len() == 20, format!("{} candidates", cands.len()))?;
    let mut surjective = 0;
    for c in &cands {
        let r = bounded_hopf_check(2, 3, c, 6, 6).map_err(|e| e.to_string())?;
        ensure(r.is_hom && r.consistent_with_hopf(), format!("candidate {} {}", c[0], c[1]))?;
        surjective += usize::from(r.surjective_within_l == Some(true));
    }
    let w = |s: &str| FreeProductWord::parse(s, 2, 3).unwrap();
    let non = bounded_hopf_check(2, 3, &[w("1"), w("b")], 6, 6).map_err(|e| e.to_string())?;
    ensure(non.is_hom && non.surjective_within_l == Some(false), "non-surjective example")?;
    Ok(format!("orbifold groups, trivial closed (2,3), 20 endomorphisms ({surjective} surjective, all injective on the ball)"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("family audit (3,1,1)", criterion_1, Duration::from_secs(5)),
        ("family audit (5,1,2)", criterion_2, Duration::from_secs(30)),
        ("branch claim flagged", criterion_3, Duration::from_secs(60)),
        ("surface replay", criterion_4, Duration::from_secs(3)),
        ("braid suite", criterion_5, Duration::from_secs(10)),
        ("certification (3,1,1)", criterion_6, Duration::from_secs(120)),
        ("certification (5,1,2)", criterion_7, Duration::from_secs(600)),
        ("resolution oracles", criterion_8, Duration::from_secs(60)),
        ("Smith normal form", criterion_9, Duration::from_secs(60)),
        ("orbifold and Hopf checks", criterion_10, Duration::from_secs(60)),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let t = start.elapsed();
        let result = result.and_then(|msg| if t < *limit { Ok(msg) } else { Err(format!("took {t:.2?}, limit {limit:?}")) });
        match result {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{t:.2?}]", i + 1),
            Err(msg) => {
                println!("FAIL {:>2} {name}: {msg} [{t:.2?}]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

use std::process::Command;

fn zvk(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_zvk")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn smallest_member_certifies() {
    let (code, out, _) = zvk(&["analyze", "--N", "3", "--a", "1", "--b", "1", "--strict"]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict: certified-match"));
    assert!(out.contains("abelianization: [\"6\"]"));
    assert!(!out.contains("time "));
}

#[test]
fn invalid_parameters_exit_2() {
    let (code, _, err) = zvk(&["analyze", "--N", "3", "--a", "1", "--b", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("gcd(N, d)"));
    assert_eq!(zvk(&["analyze", "--N", "4", "--a", "1", "--b", "1"]).0, 2);
    assert_eq!(zvk(&["analyze", "--N", "3"]).0, 2);
    assert_eq!(zvk(&["group", "fingerprint", "--presentation", "< a | b >"]).0, 2);
}

#[test]
fn json_report_is_deterministic() {
    let dir = std::env::temp_dir();
    let paths: Vec<_> = (0..2).map(|i| dir.join(format!("zvk-cli-test-{}-{i}.json", std::process::id()))).collect();
    for p in &paths {
        let (code, _, _) = zvk(&["analyze", "--N", "5", "--a", "1", "--b", "2", "--json", p.to_str().unwrap()]);
        assert_eq!(code, 0);
    }
    let a = std::fs::read_to_string(&paths[0]).unwrap();
    let b = std::fs::read_to_string(&paths[1]).unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["abelianization"]["measured"], serde_json::json!(["15"]));
    assert_eq!(v["verdict"], "certified-match");
    assert!(v.get("timings_ms").is_none());
    for p in &paths {
        let _ = std::fs::remove_file(p);
    }
}

#[test]
fn timings_only_on_request() {
    let (code, out, _) = zvk(&["analyze", "--N", "3", "--a", "1", "--b", "1", "--timings", "--catalog", "tiny"]);
    assert_eq!(code, 0);
    assert!(out.contains("time fingerprint"));
}

#[test]
fn tuple_cap_gives_exit_3() {
    let (code, out, _) = zvk(&["analyze", "--N", "3", "--a", "1", "--b", "1", "--tuple-cap", "10"]);
    assert_eq!(code, 3);
    assert!(out.contains("budget-exhausted"));
}

#[test]
fn fingerprint_mismatch_gives_exit_1() {
    let (code, _, _) = zvk(&["group", "fingerprint", "--presentation", "< a b | a^2, b^3 >", "--p", "2", "--q", "5", "--catalog", "tiny"]);
    assert_eq!(code, 1);
    let (code, _, _) = zvk(&["group", "fingerprint", "--presentation", "< a b | a^2, b^3 >", "--p", "2", "--q", "3"]);
    assert_eq!(code, 0);
}

#[test]
fn other_subcommands() {
    let (code, out, _) = zvk(&["resolve", "--N", "3", "--a", "1", "--b", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("viii.L_inf") && out.contains("MISMATCH"));
    let (code, out, _) = zvk(&["surface", "--N", "5", "--a", "1", "--b", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("5 blow-ups, 4 blow-downs"));
    let (code, out, _) = zvk(&["braid", "act", "--strands", "2", "--braid", "s1"]);
    assert_eq!(code, 0);
    assert!(out.contains("m1 -> m2") && out.contains("m2 -> m2 m1 m2^-1"));
    let (code, out, _) = zvk(&["orbifold", "--p", "2", "--q", "3", "--catalog", "tiny"]);
    assert_eq!(code, 0);
    assert!(out.contains("cone points [3, 2]"));
    let (code, out, _) = zvk(&["orbifold", "--cones", "2,3", "--catalog", "tiny"]);
    assert_eq!(code, 0);
    assert!(out.contains("simplified: < | >"));
}

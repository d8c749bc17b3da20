use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn qwire(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qwire"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    if let Some(input) = stdin {
        child.stdin.take().unwrap().write_all(input).unwrap();
    } else {
        drop(child.stdin.take());
    }
    child.wait_with_output().unwrap()
}

fn run_ok(args: &[&str]) -> String {
    let out = qwire(args, None);
    assert!(
        out.status.success(),
        "qwire {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&run_ok(args)).unwrap()
}

fn path(name: &str) -> String {
    fixture(name).display().to_string()
}

/// Compares against `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, args: &[&str]) {
    let got = run_ok(args);
    let file = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&file, &got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&file)
        .unwrap_or_else(|_| panic!("missing golden file {}; run with UPDATE_GOLDEN=1", file.display()));
    assert_eq!(got, want, "output of {args:?} differs from {}", file.display());
}

#[test]
fn golden_outputs() {
    let cases: &[(&str, &[&str])] = &[
        ("check_nonlocal.json", &["check", "nonlocal.json"]),
        ("check_two_lead_delta.json", &["check", "two_lead_delta.json"]),
        (
            "check_delta_star.txt",
            &["--format", "text", "check", "delta_star.json"],
        ),
        ("isotropy_dirichlet.json", &["isotropy", "dirichlet.json"]),
        ("isotropy_neumann.json", &["isotropy", "neumann.json"]),
        (
            "isotropy_nonlocal_scalar.json",
            &["isotropy", "nonlocal_scalar.json"],
        ),
        (
            "isotropy_nonlocal_split.json",
            &["isotropy", "nonlocal_split.json"],
        ),
        (
            "isotropy_theta.txt",
            &["--format", "text", "isotropy", "theta.json"],
        ),
        ("homology_two_lead.json", &["homology", "two_lead_standard.json"]),
        ("homology_ring.json", &["homology", "ring.json"]),
        ("homology_theta.json", &["homology", "theta.json"]),
        ("flux_theta.json", &["flux", "theta.json"]),
        ("flux_ring.txt", &["--format", "text", "flux", "ring.json"]),
        (
            "spectrum_ring.json",
            &["spectrum", "ring.json", "--kmax", "4", "--grid", "0.02"],
        ),
        (
            "spectrum_delta_star.txt",
            &["--format", "text", "spectrum", "delta_star.json", "--kmax", "5"],
        ),
    ];
    for (name, args) in cases {
        let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        for a in full.iter_mut() {
            if a.ends_with(".json") && fixture(a).exists() {
                *a = path(a);
            }
        }
        let refs: Vec<&str> = full.iter().map(String::as_str).collect();
        golden(name, &refs);
    }
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    for args in [
        vec!["check".to_string(), path("theta.json")],
        vec![
            "spectrum".to_string(),
            path("theta.json"),
            "--kmax".into(),
            "4".into(),
        ],
    ] {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(run_ok(&refs), run_ok(&refs));
    }
}

#[test]
fn nonlocal_example_is_self_adjoint_and_not_local() {
    let v = json(&["check", &path("nonlocal.json")]);
    assert_eq!(v["self_adjoint"], true);
    assert_eq!(v["local"], false);
    assert!(v["vertex_blocks"].is_null());
}

#[test]
fn dirichlet_isotropy_is_everything() {
    let v = json(&["isotropy", &path("dirichlet.json")]);
    assert_eq!(v["dimension"], 4);
    assert_eq!(v["equals_u"], true);
}

#[test]
fn two_lead_graph_has_no_cycles() {
    assert_eq!(json(&["homology", &path("two_lead_standard.json")])["d"], 0);
}

#[test]
fn nonlocal_membership_follows_the_phases() {
    let same = json(&["isotropy", &path("nonlocal_scalar.json")]);
    assert_eq!(same["membership"]["member"], true);
    let split = json(&["isotropy", &path("nonlocal_split.json")]);
    assert_eq!(split["membership"]["member"], false);
    let eq = json(&["equal", &path("nonlocal.json"), &path("nonlocal_scalar.json")]);
    assert_eq!(eq["equal"], true);
    let ne = json(&["equal", &path("nonlocal.json"), &path("nonlocal_split.json")]);
    assert_eq!(ne["equal"], false);
}

#[test]
fn realize_then_flux_round_trips() {
    for (model, targets) in [
        ("theta.json", vec![-1.25, 2.5]),
        ("theta.json", vec![3.0, -3.1]),
        ("ring.json", vec![0.75]),
    ] {
        let list: Vec<String> = targets.iter().map(f64::to_string).collect();
        let realized = run_ok(&["realize", &path(model), &format!("--targets={}", list.join(","))]);
        let out = qwire(&["flux", "-"], Some(realized.as_bytes()));
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["source"], "unitary");
        let fluxes = v["fluxes"].as_array().unwrap();
        assert_eq!(fluxes.len(), targets.len());
        for (f, t) in fluxes.iter().zip(&targets) {
            let got = f["phase"].as_f64().unwrap();
            let d = (got - t).rem_euclid(2.0 * std::f64::consts::PI);
            assert!(d.min(2.0 * std::f64::consts::PI - d) < 1e-11, "{got} vs {t}");
        }
    }
}

#[test]
fn ring_spectrum_matches_closed_form() {
    // ring of length 2π with flux 1: k = |n + 1/(2π)|
    let v = json(&["spectrum", &path("ring.json"), "--kmax", "3"]);
    let ks: Vec<f64> = v["roots"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["k"].as_f64().unwrap())
        .collect();
    let shift = 1.0 / (2.0 * std::f64::consts::PI);
    let mut expected: Vec<f64> = (-4i32..4)
        .map(|n| (n as f64 + shift).abs())
        .filter(|&k| k > 0.0 && k <= 3.0)
        .collect();
    expected.sort_by(f64::total_cmp);
    assert_eq!(ks.len(), expected.len());
    for (a, b) in ks.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(qwire(&[], None).status.code(), Some(1));
    assert_eq!(qwire(&["check"], None).status.code(), Some(1));
    assert_eq!(
        qwire(&["--tol-eq", "2", "check", &path("ring.json")], None)
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        qwire(&["realize", &path("theta.json"), "--targets", "1"], None)
            .status
            .code(),
        Some(1)
    );

    let bad = qwire(
        &["check", "-"],
        Some(b"{\"graph\": {\"vertices\": [\"a\"]},\n \"boundary_conditions\": {\"kind\": \"robin\"}}"),
    );
    assert_eq!(bad.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&bad.stderr);
    assert!(
        msg.contains("<stdin>:2:") && msg.contains("boundary_conditions"),
        "{msg}"
    );
    assert_eq!(
        qwire(&["check", "no/such/file.json"], None).status.code(),
        Some(2)
    );

    // open graph has no discrete spectrum
    assert_eq!(
        qwire(&["spectrum", &path("dirichlet.json")], None).status.code(),
        Some(3)
    );
    let not_sa = br#"{"graph": {"vertices": ["a"], "external_edges": [{"id": "e", "vertex": "a"}]},
        "boundary_conditions": {"kind": "matrices", "A": [[[1, 0]]], "B": [[[0, 1]]]}}"#;
    assert_eq!(qwire(&["isotropy", "-"], Some(not_sa)).status.code(), Some(3));
    let wrong_size = br#"{"graph": {"vertices": ["a"], "external_edges": [{"id": "e", "vertex": "a"}]},
        "boundary_conditions": {"kind": "matrices", "A": [[[1, 0], [0, 0]]], "B": [[[0, 0]]]}}"#;
    assert_eq!(qwire(&["check", "-"], Some(wrong_size)).status.code(), Some(3));
}

#[test]
fn text_format_is_line_oriented() {
    let out = run_ok(&["--format", "text", "homology", &path("theta.json")]);
    assert!(out.lines().any(|l| l.starts_with("d ") && l.ends_with('2')));
}

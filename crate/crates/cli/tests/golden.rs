//! Golden-file tests for the `torelli` binary.
//!
//! Outputs are compared byte for byte against `fixtures/golden/`. Set
//! `TORELLI_BLESS=1` to rewrite the golden files (and the fixtures derived
//! from built-in objects) instead of comparing.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use torelli_core::cech::Nerve;
use torelli_core::json::LatticeJson;
use torelli_core::lattice::QuadLattice;
use torelli_core::llv::CohomologyRing;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn blessing() -> bool {
    std::env::var_os("TORELLI_BLESS").is_some_and(|v| v != "0")
}

fn pretty<T: serde::Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).unwrap();
    s.push('\n');
    s
}

fn check_or_bless(path: &Path, actual: &str) {
    if blessing() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(path).unwrap_or_else(|e| {
        panic!(
            "{}: {e}; run with TORELLI_BLESS=1 to create it",
            path.display()
        )
    });
    assert_eq!(
        actual,
        expected,
        "{} differs from the golden file",
        path.display()
    );
}

#[test]
fn builtin_fixtures_are_current() {
    let dir = fixtures();
    check_or_bless(
        &dir.join("k3_lattice.json"),
        &pretty(&LatticeJson::from(&QuadLattice::k3())),
    );
    check_or_bless(
        &dir.join("u3_lattice.json"),
        &pretty(&LatticeJson::from(&QuadLattice::u_power(3))),
    );
    check_or_bless(
        &dir.join("k3_ring.json"),
        &pretty(&CohomologyRing::k3().to_json()),
    );
    let octahedron = serde_json::json!({
        "nerve": Nerve::octahedron().to_json(),
        "group": {"factors": [2]},
        "cochain": {"degree": 2, "values": [[[0, 1, 2], [1]]]},
    });
    check_or_bless(&dir.join("octahedron.json"), &pretty(&octahedron));
}

struct Run {
    stdout: String,
    code: i32,
}

fn torelli(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_torelli"))
        .args(args)
        .current_dir(fixtures())
        .env_remove("TORELLI_CONFIG")
        .output()
        .expect("binary runs");
    Run {
        stdout: String::from_utf8(out.stdout).expect("utf-8 output"),
        code: out.status.code().unwrap_or(-1),
    }
}

/// (golden name, argv, expected exit code)
const CASES: &[(&str, &[&str], i32)] = &[
    (
        "lattice_signature_k3",
        &["lattice", "signature", "k3_lattice.json"],
        0,
    ),
    (
        "lattice_signature_u3",
        &["lattice", "signature", "u3_lattice.json"],
        0,
    ),
    (
        "lattice_negative_k3",
        &["lattice", "negative", "k3_negative.json"],
        0,
    ),
    (
        "lattice_spinor_u3",
        &["lattice", "spinor", "u3_spinor.json"],
        0,
    ),
    (
        "period_validate_u3",
        &["period", "validate", "u3_point.json"],
        0,
    ),
    (
        "period_convert_u3",
        &["period", "convert", "u3_plane.json"],
        0,
    ),
    ("period_cone_u3", &["period", "cone", "u3_cone.json"], 0),
    (
        "period_sample_u3",
        &["period", "sample", "--seed", "7", "u3_lattice.json"],
        0,
    ),
    (
        "period_sample_unseeded",
        &["period", "sample", "u3_lattice.json"],
        3,
    ),
    (
        "twistor_plane_u3",
        &["twistor", "plane", "u3_twistor.json"],
        0,
    ),
    (
        "twistor_chain_u3",
        &["twistor", "chain", "u3_chain.json"],
        0,
    ),
    (
        "irrational_closure",
        &["irrational", "closure", "rational_closure.json"],
        0,
    ),
    (
        "irrational_picard_u3",
        &["irrational", "picard", "u3_picard.json"],
        0,
    ),
    ("walls_enum_u3", &["walls", "enum", "u3_walls_enum.json"], 0),
    (
        "walls_avoid_u3",
        &["walls", "avoid", "u3_walls_avoid.json"],
        0,
    ),
    (
        "walls_chamber_u3",
        &["walls", "chamber", "u3_chamber.json"],
        0,
    ),
    ("walls_ueps_u3", &["walls", "ueps", "u3_ueps.json"], 0),
    (
        "llv_closure_plane",
        &[
            "llv",
            "closure",
            "--ring",
            "k3_ring.json",
            "--span",
            "plane",
            "k3_plane.json",
        ],
        0,
    ),
    (
        "llv_fujiki_k3",
        &["llv", "fujiki", "--ring", "k3_ring.json", "--seed", "1"],
        0,
    ),
    ("llv_hodge_k3", &["llv", "hodge", "k3_hodge.json"], 0),
    ("llv_deligne_k3", &["llv", "deligne", "k3_deligne.json"], 0),
    (
        "cech_solve_octahedron",
        &["cech", "solve", "octahedron.json"],
        1,
    ),
    (
        "cech_cocycle_octahedron",
        &["cech", "cocycle", "octahedron_coboundary.json"],
        0,
    ),
    (
        "cech_d_octahedron",
        &["cech", "d", "octahedron_coboundary.json"],
        0,
    ),
    (
        "cech_cohomology_rp2",
        &["cech", "cohomology", "rp2.json"],
        0,
    ),
];

#[test]
fn golden_outputs() {
    let dir = fixtures().join("golden");
    for &(name, args, code) in CASES {
        let run = torelli(args);
        assert_eq!(run.code, code, "{name}: exit code, output:\n{}", run.stdout);
        let path = dir.join(format!("{name}.json"));
        check_or_bless(&path, &run.stdout);
        // parse → serialize → re-parse is stable
        let parsed: Value = serde_json::from_str(&run.stdout).unwrap();
        let golden: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(parsed, golden, "{name}");
        let again: Value = serde_json::from_str(&serde_json::to_string(&parsed).unwrap()).unwrap();
        assert_eq!(again, parsed, "{name}");
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    for &(name, args, _) in CASES {
        assert_eq!(torelli(args).stdout, torelli(args).stdout, "{name}");
    }
}

#[test]
fn documented_examples() {
    let sig: Value =
        serde_json::from_str(&torelli(&["lattice", "signature", "k3_lattice.json"]).stdout)
            .unwrap();
    assert_eq!(sig["ok"], true);
    assert_eq!(sig["result"], serde_json::json!([3, 19]));

    let run = torelli(&["llv", "closure", "--ring", "k3", "--span", "plane"]);
    let closure: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(run.code, 0);
    assert_eq!(
        closure["result"],
        serde_json::json!({"dimension": 10, "by_degree": {"-2": 3, "0": 4, "2": 3}})
    );

    let run = torelli(&["cech", "solve", "octahedron.json"]);
    let solve: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(run.code, 1);
    assert_eq!(solve["ok"], false);
    assert_eq!(solve["obstruction"], serde_json::json!([1]));
}

#[test]
fn exit_codes() {
    assert_eq!(torelli(&["lattice", "frobnicate"]).code, 3);
    assert_eq!(torelli(&["--help"]).code, 0);
    assert_eq!(
        torelli(&[
            "lattice",
            "signature",
            "--json",
            "{\"rank\": 2, \"gram\": [[1, 2], [2, 4]]}"
        ])
        .code,
        1
    );
    assert_eq!(
        torelli(&["walls", "avoid", "--tol-wall", "-1", "u3_walls_avoid.json"]).code,
        3
    );
    assert_eq!(
        torelli(&["lattice", "signature", "--json", "not json"]).code,
        1
    );
    let bad_point = r#"{"lattice": "U^3", "re": [1, 0, 0, 0, 0, 0], "im": [0, 0, 1, 1, 0, 0]}"#;
    let run = torelli(&["period", "validate", "--json", bad_point]);
    assert_eq!(run.code, 1, "{}", run.stdout);
    // an isotropic η has no dual operator
    let mut eta = vec!["0"; 22];
    eta[0] = "1";
    let input = format!("{{\"eta\": [{}]}}", eta.join(", "));
    let run = torelli(&["llv", "f", "--json", &input]);
    assert_eq!(run.code, 1, "{}", run.stdout);
    let v: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "hard_lefschetz_fails");
}

#[test]
fn config_file_supplies_defaults() {
    let dir = std::env::temp_dir().join(format!("torelli-config-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("config.json");
    fs::write(&cfg, r#"{"seed": 7}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_torelli"))
        .args(["period", "sample", "u3_lattice.json"])
        .current_dir(fixtures())
        .env("TORELLI_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let seeded = torelli(&["period", "sample", "--seed", "7", "u3_lattice.json"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), seeded.stdout);
    fs::remove_dir_all(&dir).unwrap();
}

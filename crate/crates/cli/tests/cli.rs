use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orbit-index"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env("NO_COLOR", "1").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn index(surface: &str, xi: &str, alpha: &str, extra: &[&str]) -> Output {
    let mut args = vec!["index", "--surface", surface, "--xi", xi, "--alpha", alpha];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn index_reports_and_exit_codes() {
    let out = index("euclidean", "1", "-1", &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["iota1"], 0);
    assert_eq!(v["stability"], "unstable-jordan");

    let out = index("sphere", "2", "1", &["--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["iota1"], 3);
    assert_eq!(v["region"], "Omega1,1^{+,-}");
    assert_eq!(v["oracle_iota1"], 3);
    assert_eq!(v["agreement"], true);

    let v = json(&index("hyperbolic", "0.5", "-1", &["--verify"]));
    assert_eq!(v["region"], "Omega3,1^+");
    assert_eq!(v["iota1"], 2);
    assert_eq!(v["agreement"], true);

    // Near the pole the raw generator is badly scaled.
    let v = json(&index("sphere", "0.05218295381152008", "-5.648746030794351", &["--verify"]));
    assert_eq!(v["agreement"], true);

    assert_eq!(index("hyperbolic", "1.5", "-1", &[]).status.code(), Some(2));
    assert_eq!(index("sphere", "0.5", "1", &[]).status.code(), Some(2));
    assert_eq!(index("euclidean", "1", "-2", &[]).status.code(), Some(3));
    assert_eq!(index("plane", "1", "-1", &[]).status.code(), Some(64));
    assert_eq!(index("euclidean", "1", "-1", &["--json", "--csv"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&[]).status.code(), Some(64));
}

#[test]
fn index_csv_has_one_row() {
    let out = index("sphere", "2", "1", &["--csv", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header[..3], ["surface", "xi", "alpha"]);
    let rows: Vec<csv::StringRecord> = r.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    assert_eq!(&rows[0][col("iota1")], "3");
    assert_eq!(&rows[0][col("agreement")], "true");
}

fn regions(dir: &Path, name: &str, surface: &str, xr: &str, ar: &str, n: &str) -> (Vec<csv::StringRecord>, String) {
    let prefix = dir.join(name);
    let out = run(&[
        "regions",
        "--surface",
        surface,
        "--xi-range",
        xr,
        "--alpha-range",
        ar,
        "--nx",
        n,
        "--na",
        n,
        "--resolution",
        "64",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut r = csv::Reader::from_path(prefix.with_extension("csv")).unwrap();
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        ["xi", "alpha", "region", "iota1", "k", "d_sign", "cdb2_sign", "stability"]
    );
    let rows = r.records().map(|r| r.unwrap()).collect();
    (rows, std::fs::read_to_string(prefix.with_extension("svg")).unwrap())
}

fn indices(rows: &[csv::StringRecord]) -> BTreeSet<i64> {
    rows.iter().filter(|r| !r[3].is_empty()).map(|r| r[3].parse().unwrap()).collect()
}

#[test]
fn euclidean_map_has_two_bands() {
    let dir = tempfile::tempdir().unwrap();
    let (rows, svg) = regions(dir.path(), "flat", "euclidean", "0.1:3", "-3:0", "20");
    assert_eq!(rows.len(), 400);
    for r in &rows {
        let alpha: f64 = r[1].parse().unwrap();
        assert_eq!(&r[3], if alpha < -1.0 { "0" } else { "2" }, "alpha {alpha}");
    }
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("data-curve").count(), 2);
}

#[test]
fn sphere_maps_cover_indices_zero_to_three() {
    let dir = tempfile::tempdir().unwrap();
    let (north, _) = regions(dir.path(), "north", "sphere", "1:6", "0:8", "40");
    let (south, svg) = regions(dir.path(), "south", "sphere", "0.05:0.95", "-8:0", "40");
    let all: BTreeSet<i64> = indices(&north).union(&indices(&south)).copied().collect();
    assert_eq!(all, (0..=3).collect());
    assert!(north.iter().chain(&south).all(|r| &r[2] != "inadmissible"));
    assert!(svg.contains("data-curve=\"f2=0\""));
}

#[test]
fn hyperbolic_map_is_even_with_band_edges() {
    let dir = tempfile::tempdir().unwrap();
    let (rows, svg) = regions(dir.path(), "disk", "hyperbolic", "0.05:0.95", "-3:-0.01", "30");
    let seen = indices(&rows);
    assert!(seen.iter().all(|i| i % 2 == 0), "{seen:?}");
    assert!(seen.len() >= 3, "{seen:?}");
    assert!(svg.contains("data-curve=\"g1=0\""));
    assert!(svg.contains("data-curve=\"g3=1\""));
}

/// One row at α = −1: indices follow 2·⌊g₃⌋, so the band edges sit at
/// g₃ = 1, 2, 3. The k = 0 band is empty there since g₃ > 1 on all of (0, 1).
#[test]
fn hyperbolic_row_at_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("row");
    let out = run(&[
        "regions", "--surface", "hyperbolic", "--xi-range", "0.05:0.995", "--alpha-range", "-1.001:-0.999", "--nx",
        "400", "--na", "1", "--out", prefix.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<csv::StringRecord> =
        csv::Reader::from_path(prefix.with_extension("csv")).unwrap().records().map(|r| r.unwrap()).collect();
    let mut last = i64::MIN;
    for r in &rows {
        let xi: f64 = r[0].parse().unwrap();
        assert_eq!(r[1].parse::<f64>().unwrap(), -1.0);
        let index: i64 = r[3].parse().unwrap();
        let g3 = orbit_index::surface::hyperbolic_g3(xi, -1.0);
        assert_eq!(index, 2 * g3.floor() as i64, "xi {xi} g3 {g3}");
        assert!(index >= last);
        last = index;
    }
    let seen = indices(&rows);
    assert!([2, 4, 6].iter().all(|i| seen.contains(i)), "{seen:?}");
    assert!(!seen.contains(&0));
}

#[test]
fn regions_rejects_degenerate_ranges() {
    let out = run(&["regions", "--surface", "sphere", "--xi-range", "1:1", "--alpha-range", "0:1", "--out", "x"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn verify_is_reproducible() {
    let out = run(&["verify", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["total"], 0);

    let a = run(&["verify", "--samples", "12", "--seed", "3", "--steps", "128"]);
    let b = run(&["--jobs", "1", "verify", "--samples", "12", "--seed", "3", "--steps", "128"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["total"], 12);
    assert_eq!(v["agreements"], v["admissible"]);

    let v = json(&run(&["verify", "--samples", "10", "--seed", "1", "--guard", "0.5"]));
    let admissible = v["admissible"].as_u64().unwrap();
    assert!(admissible < 10);
    assert_eq!(v["agreements"].as_u64().unwrap(), admissible);

    assert_eq!(run(&["verify", "--steps", "8"]).status.code(), Some(64));
    assert_eq!(run(&["--jobs", "0", "verify", "--samples", "1"]).status.code(), Some(64));
}

#[test]
fn orbit_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("flat");
    let out = run(&["orbit", "--surface", "euclidean", "--xi", "1", "--alpha", "-1", "--out", prefix.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["radial_drift"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["floquet_tag"], "unstable-jordan");
    assert_eq!(v["tags_consistent"], true);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(prefix.with_extension("json")).unwrap()).unwrap();
    assert_eq!(saved, v);

    let prefix = dir.path().join("cap");
    let v = json(&run(&["orbit", "--surface", "sphere", "--xi", "2", "--alpha", "1", "--out", prefix.to_str().unwrap()]));
    assert!(v["angular_momentum_drift"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["tags_consistent"], true);
    let rows = csv::Reader::from_path(prefix.with_extension("csv")).unwrap().records().count();
    assert_eq!(rows, 3 * 2048 + 1);

    let prefix = dir.path().join("fall");
    let out = run(&[
        "orbit", "--surface", "hyperbolic", "--xi", "0.5", "--alpha", "-1", "--radial", "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut r = csv::Reader::from_path(prefix.with_extension("csv")).unwrap();
    let thetas: BTreeSet<String> = r.records().map(|r| r.unwrap()[2].to_string()).collect();
    assert_eq!(thetas.len(), 1);
}

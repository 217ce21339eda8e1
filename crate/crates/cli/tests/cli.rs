//! End-to-end runs of the `mingeo` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn mingeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mingeo"))
        .args(args)
        .env_remove("MINGEO_TOLERANCE_SCALE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// Writes a matrix file whose entries are given as `(re, im)` rows.
fn write_matrix(dir: &Path, name: &str, kind: &str, rows: &[Vec<(f64, f64)>]) -> PathBuf {
    let entries: Vec<Vec<[f64; 2]>> = rows.iter().map(|r| r.iter().map(|&(a, b)| [a, b]).collect()).collect();
    let path = dir.join(name);
    let body = json!({ "n": rows.len(), "kind": kind, "entries": entries });
    std::fs::write(&path, serde_json::to_string(&body).unwrap()).unwrap();
    path
}

fn diag(dir: &Path, name: &str, kind: &str, d: &[(f64, f64)]) -> PathBuf {
    let n = d.len();
    let rows: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { d[i] } else { (0.0, 0.0) }).collect())
        .collect();
    write_matrix(dir, name, kind, &rows)
}

fn real_diag(dir: &Path, name: &str, kind: &str, d: &[f64]) -> PathBuf {
    let d: Vec<(f64, f64)> = d.iter().map(|&x| (x, 0.0)).collect();
    diag(dir, name, kind, &d)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// Matrices of a curve file as `(re, im)` arrays.
fn curve_matrices(v: &Value) -> Vec<Vec<Vec<[f64; 2]>>> {
    serde_json::from_value(v["matrices"].clone()).unwrap()
}

#[test]
fn dist_examples() {
    let dir = TempDir::new().unwrap();
    let i2u = real_diag(dir.path(), "i.json", "unitary", &[1.0, 1.0]);
    let neg = real_diag(dir.path(), "neg.json", "unitary", &[-1.0, -1.0]);
    let o = mingeo(&["dist", "--space", "unitary", "-p", "inf", s(&i2u), s(&neg)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "3.14159265359");

    let e = std::f64::consts::E;
    let ip = real_diag(dir.path(), "ip.json", "positive", &[1.0, 1.0]);
    let b = real_diag(dir.path(), "b.json", "positive", &[e * e, e]);
    let o = mingeo(&["dist", "--space", "positive", "-p", "1", s(&ip), s(&b)]);
    assert_eq!(stdout(&o).trim(), "3.00000000000");

    let z = real_diag(dir.path(), "z.json", "hermitian", &[0.0, 0.0]);
    let d = real_diag(dir.path(), "d.json", "hermitian", &[3.0, -4.0]);
    let o = mingeo(&["dist", "--space", "hermitian", "-p", "1", s(&z), s(&d)]);
    assert_eq!(stdout(&o).trim(), "7.00000000000");
}

#[test]
fn dist_input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let h = write_matrix(
        dir.path(),
        "h.json",
        "hermitian",
        &[vec![(1.0, 0.0), (0.0, 1.0)], vec![(0.0, 1.0), (1.0, 0.0)]],
    );
    let z = real_diag(dir.path(), "z.json", "hermitian", &[0.0, 0.0]);
    let o = mingeo(&["dist", "--space", "hermitian", s(&h), s(&z)]);
    assert_eq!(code(&o), 2, "non-Hermitian input: {}", stderr(&o));

    let o = mingeo(&["dist", "--space", "unitary", s(&z), s(&z)]);
    assert_eq!(code(&o), 2, "kind mismatch");

    let o = mingeo(&["dist", "--space", "torus", s(&z), s(&z)]);
    assert_eq!(code(&o), 2, "unknown space");

    let o = mingeo(&["dist", "--space", "hermitian", "-p", "0.5", s(&z), s(&z)]);
    assert_eq!(code(&o), 2, "p below 1");

    let missing = dir.path().join("missing.json");
    let o = mingeo(&["dist", "--space", "hermitian", s(&missing), s(&z)]);
    assert_eq!(code(&o), 2);

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    let o = mingeo(&["dist", "--space", "hermitian", s(&garbage), s(&z)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn grassmann_distance_beyond_direct_rotation_exits_3() {
    let dir = TempDir::new().unwrap();
    let p = real_diag(dir.path(), "p.json", "projection", &[1.0, 0.0]);
    let q = real_diag(dir.path(), "q.json", "projection", &[0.0, 1.0]);
    let o = mingeo(&["dist", "--space", "grassmann", s(&p), s(&q)]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn positive_geodesic_samples_fractional_powers() {
    let dir = TempDir::new().unwrap();
    let a = real_diag(dir.path(), "a.json", "positive", &[1.0, 1.0]);
    let b = write_matrix(
        dir.path(),
        "b.json",
        "positive",
        &[vec![(2.0, 0.0), (0.5, 0.5)], vec![(0.5, -0.5), (3.0, 0.0)]],
    );
    let out = dir.path().join("curve.json");
    let o = mingeo(&[
        "geodesic",
        "--space",
        "positive",
        "--samples",
        "16",
        "--out",
        s(&out),
        s(&a),
        s(&b),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let curve = read_json(&out);
    let mats = curve_matrices(&curve);
    assert_eq!(mats.len(), 17);
    // B^{k/16} raised to the 16th power is B^k
    let to_mat = |e: &Vec<Vec<[f64; 2]>>| {
        mingeo_oracles::CMat::from_fn(2, 2, |i, j| num_complex::Complex64::new(e[i][j][0], e[i][j][1]))
    };
    let bm = to_mat(&vec![vec![[2.0, 0.0], [0.5, 0.5]], vec![[0.5, -0.5], [3.0, 0.0]]]);
    for (k, m) in mats.iter().enumerate() {
        let lhs = mingeo_oracles::int_power(&to_mat(m), 16);
        let rhs = mingeo_oracles::int_power(&bm, k as u32);
        let err = (lhs - &rhs).camax() / rhs.camax();
        assert!(err < 1e-10, "k = {k}: {err}");
    }
}

#[test]
fn geodesic_round_trip_reproduces_length() {
    let dir = TempDir::new().unwrap();
    let a = real_diag(dir.path(), "a.json", "positive", &[1.0, 2.0, 0.5]);
    let b = write_matrix(
        dir.path(),
        "b.json",
        "positive",
        &[
            vec![(4.0, 0.0), (1.0, 0.5), (0.0, 0.0)],
            vec![(1.0, -0.5), (2.0, 0.0), (0.3, 0.0)],
            vec![(0.0, 0.0), (0.3, 0.0), (1.0, 0.0)],
        ],
    );
    for p in ["1", "2", "inf", "3.5"] {
        let out = dir.path().join(format!("curve_{p}.json"));
        let o = mingeo(&[
            "geodesic",
            "--space",
            "positive",
            "-p",
            p,
            "--out",
            s(&out),
            s(&a),
            s(&b),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let curve = read_json(&out);
        let recorded = curve["metadata"]["lengths"]
            .as_object()
            .unwrap()
            .values()
            .next()
            .unwrap()
            .as_f64()
            .unwrap();

        // write the last matrix back out and measure the distance through
        // the CLI; the geodesic is minimal, so its length is the distance
        let mats = curve_matrices(&curve);
        let last = dir.path().join("last.json");
        std::fs::write(
            &last,
            json!({ "n": 3, "kind": "positive", "entries": mats.last().unwrap() }).to_string(),
        )
        .unwrap();
        let o = mingeo(&["dist", "--space", "positive", "-p", p, s(&a), s(&last)]);
        let measured: f64 = stdout(&o).trim().parse().unwrap();
        assert!(
            (measured - recorded).abs() <= 1e-9 * recorded.max(1.0),
            "p = {p}: {measured} vs {recorded}"
        );

        // reload every sample and recompute the length
        let points: Vec<mingeo_core::CMat> = mats
            .iter()
            .map(|e| mingeo_core::CMat::from_fn(3, 3, |i, j| num_complex::Complex64::new(e[i][j][0], e[i][j][1])))
            .collect();
        let grid: Vec<f64> = serde_json::from_value(curve["grid"].clone()).unwrap();
        let reloaded = mingeo_core::curves::SampledCurve::new(mingeo_core::SpaceTag::Positive, grid, points).unwrap();
        let index: mingeo_core::SchattenIndex = p.parse().unwrap();
        let relength = mingeo_core::curves::length(&reloaded, index).length;
        assert!(
            (relength - recorded).abs() <= 1e-9 * recorded.max(1.0),
            "p = {p}: {relength} vs {recorded}"
        );

        // the endpoint matches the input
        let b_entries: Value = read_json(&b)["entries"].clone();
        let last_entries = serde_json::to_value(mats.last().unwrap()).unwrap();
        let b_rows: Vec<Vec<[f64; 2]>> = serde_json::from_value(b_entries).unwrap();
        let l_rows: Vec<Vec<[f64; 2]>> = serde_json::from_value(last_entries).unwrap();
        for (rb, rl) in b_rows.iter().zip(&l_rows) {
            for (x, y) in rb.iter().zip(rl) {
                assert!((x[0] - y[0]).abs() < 1e-12 && (x[1] - y[1]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn antipodal_unitary_geodesic_is_flagged() {
    let dir = TempDir::new().unwrap();
    let i = real_diag(dir.path(), "i.json", "unitary", &[1.0, 1.0]);
    let neg = real_diag(dir.path(), "neg.json", "unitary", &[-1.0, -1.0]);
    let out = dir.path().join("c.json");
    let o = mingeo(&["geodesic", "--space", "unitary", "--out", s(&out), s(&i), s(&neg)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let curve = read_json(&out);
    assert_eq!(curve["metadata"]["antipodal"], json!(true));
    assert!(!curve["metadata"]["notes"].as_array().unwrap().is_empty());
}

#[test]
fn unitary_family_has_the_distance_as_length() {
    let dir = TempDir::new().unwrap();
    let target = diag(
        dir.path(),
        "u.json",
        "unitary",
        &[(2f64.cos(), 2f64.sin()), (0.5f64.cos(), 0.5f64.sin())],
    );
    let out = dir.path().join("c.json");
    let o = mingeo(&[
        "family",
        "--space",
        "unitary",
        "--seed",
        "7",
        "--out",
        s(&out),
        s(&target),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let meta = &read_json(&out)["metadata"];
    let verified = meta["verified_length"].as_f64().unwrap();
    assert!((verified - 2.0).abs() < 1e-3, "{verified}");
    assert!(meta["case"].as_str().is_some());
}

#[test]
fn family_is_deterministic_in_the_seed() {
    let dir = TempDir::new().unwrap();
    let target = diag(
        dir.path(),
        "u.json",
        "unitary",
        &[(1f64.cos(), 1f64.sin()), (0.3f64.cos(), -0.3f64.sin()), (1.0, 0.0)],
    );
    let run = |seed: &str, name: &str| {
        let out = dir.path().join(name);
        let o = mingeo(&[
            "family",
            "--space",
            "unitary",
            "--seed",
            seed,
            "--out",
            s(&out),
            s(&target),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("11", "a.json"), run("11", "b.json"));
    assert_ne!(run("11", "a.json"), run("12", "c.json"));
}

#[test]
fn family_requires_a_seed() {
    let dir = TempDir::new().unwrap();
    let d = real_diag(dir.path(), "d.json", "hermitian", &[2.0, -1.0]);
    let o = mingeo(&["family", "--space", "hermitian", s(&d)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn hermitian_family_is_minimal() {
    let dir = TempDir::new().unwrap();
    let d = real_diag(dir.path(), "d.json", "hermitian", &[2.0, -1.0]);
    let out = dir.path().join("c.json");
    let o = mingeo(&[
        "family",
        "--space",
        "hermitian",
        "--seed",
        "3",
        "--segments",
        "3",
        "--out",
        s(&out),
        s(&d),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let meta = &read_json(&out)["metadata"];
    let len = meta["lengths"]["1"].as_f64().unwrap();
    assert!((len - 3.0).abs() < 1e-12, "{len}");

    let o = mingeo(&["verify", "minimality", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let verdict: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(verdict["verdict"], json!("SUPPORTED"));

    let o = mingeo(&["verify", "eigencurves", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = mingeo(&["verify", "diagonal", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn detoured_hermitian_curve_is_refuted() {
    let dir = TempDir::new().unwrap();
    // 0 → diag(1, −1) through a point with an off-block component
    let steps = 64;
    let grid: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
    let matrices: Vec<Value> = grid
        .iter()
        .map(|&t| {
            let bump = 0.3 * (std::f64::consts::PI * t).sin();
            json!([[[t, 0.0], [bump, 0.0]], [[bump, 0.0], [-t, 0.0]]])
        })
        .collect();
    let curve = json!({
        "space": "hermitian",
        "p_norm": "1",
        "grid": grid,
        "matrices": matrices,
        "metadata": { "generator": "hand-built" }
    });
    let path = dir.path().join("bump.json");
    std::fs::write(&path, curve.to_string()).unwrap();
    let o = mingeo(&["verify", "minimality", s(&path)]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    let verdict: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(verdict["verdict"], json!("REFUTED"));
}

#[test]
fn malformed_curve_files_exit_2() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    let curve = json!({
        "space": "hermitian",
        "p_norm": "1",
        "grid": [0.0, 0.7, 0.5, 1.0],
        "matrices": [[[[0.0, 0.0]]], [[[0.1, 0.0]]], [[[0.2, 0.0]]], [[[0.3, 0.0]]]],
        "metadata": { "generator": "hand-built" }
    });
    std::fs::write(&path, curve.to_string()).unwrap();
    let o = mingeo(&["verify", "minimality", s(&path)]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn grassmann_singleton_angle_pair_has_only_the_geodesic() {
    let dir = TempDir::new().unwrap();
    let (c, sn) = (0.4f64.cos(), 0.4f64.sin());
    let p = real_diag(dir.path(), "p.json", "projection", &[1.0, 0.0]);
    let q = write_matrix(
        dir.path(),
        "q.json",
        "projection",
        &[vec![(c * c, 0.0), (c * sn, 0.0)], vec![(c * sn, 0.0), (sn * sn, 0.0)]],
    );
    let o = mingeo(&["family", "--space", "grassmann", "--seed", "1", s(&p), s(&q)]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("UNIQUE_GEODESIC_ONLY"), "{}", stderr(&o));

    let o = mingeo(&["verify", "unique", "--space", "grassmann", s(&p), s(&q)]);
    assert_eq!(code(&o), 0);
    let cert: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cert["unique"], json!(true));
}

#[test]
fn identity_and_its_negative_are_not_uniquely_joined() {
    let dir = TempDir::new().unwrap();
    let i = real_diag(dir.path(), "i.json", "unitary", &[1.0, 1.0]);
    let neg = real_diag(dir.path(), "neg.json", "unitary", &[-1.0, -1.0]);
    let o = mingeo(&["verify", "unique", "--space", "unitary", s(&i), s(&neg)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let cert: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cert["unique"], json!(false));
}

#[test]
fn midpoints_on_a_close_unitary_pair() {
    let dir = TempDir::new().unwrap();
    let u = real_diag(dir.path(), "u.json", "unitary", &[1.0, 1.0, 1.0]);
    let v = diag(
        dir.path(),
        "v.json",
        "unitary",
        &[(1.2f64.cos(), 1.2f64.sin()), (0.4f64.cos(), -0.4f64.sin()), (1.0, 0.0)],
    );
    let o = mingeo(&[
        "midpoints",
        "--space",
        "unitary",
        "--t",
        "0.5",
        "--pairs",
        "6",
        "--seed",
        "5",
        s(&u),
        s(&v),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["convexity_passed"], json!(true));
}

#[test]
fn midpoints_reject_antipodal_pair_with_note() {
    let dir = TempDir::new().unwrap();
    let i = real_diag(dir.path(), "i.json", "unitary", &[1.0, 1.0]);
    let neg = real_diag(dir.path(), "neg.json", "unitary", &[-1.0, -1.0]);
    let o = mingeo(&["midpoints", "--space", "unitary", "--seed", "1", s(&i), s(&neg)]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("-I"), "{}", stderr(&o));
}

#[test]
fn midpoints_on_positive_pair_at_quarter() {
    let dir = TempDir::new().unwrap();
    let i = real_diag(dir.path(), "i.json", "positive", &[1.0, 1.0, 1.0]);
    let b = write_matrix(
        dir.path(),
        "b.json",
        "positive",
        &[
            vec![(3.0, 0.0), (0.5, 0.2), (0.1, 0.0)],
            vec![(0.5, -0.2), (0.6, 0.0), (0.0, 0.1)],
            vec![(0.1, 0.0), (0.0, -0.1), (1.5, 0.0)],
        ],
    );
    for p in ["inf", "1"] {
        let o = mingeo(&[
            "midpoints",
            "--space",
            "positive",
            "-p",
            p,
            "--t",
            "0.25",
            "--seed",
            "9",
            s(&i),
            s(&b),
        ]);
        assert_eq!(code(&o), 0, "p = {p}: {}", stderr(&o));
        let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(report["convexity_passed"], json!(true));
    }
}

#[test]
fn tolerance_scale_must_be_positive() {
    let dir = TempDir::new().unwrap();
    let z = real_diag(dir.path(), "z.json", "hermitian", &[0.0]);
    let o = Command::new(env!("CARGO_BIN_EXE_mingeo"))
        .args(["dist", "--space", "hermitian", s(&z), s(&z)])
        .env("MINGEO_TOLERANCE_SCALE", "-1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn report_rejects_max_dim_below_two() {
    let o = mingeo(&["verify", "report", "--seed", "1", "--max-dim", "1"]);
    assert_eq!(code(&o), 2);
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn siginv(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_siginv"));
    cmd.args(args).env_remove("SIGINV_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let Output {
        status,
        stdout,
        stderr,
    } = cmd.output().expect("binary runs");
    Run {
        code: status.code().expect("exit code"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_of(points: &[(f64, f64)]) -> String {
    let mut out = String::from("x1,x2\n");
    for (x, y) in points {
        out.push_str(&format!("{x},{y}\n"));
    }
    out
}

/// `(id, p, [x...])` per data row of an inversion CSV.
fn rows(csv: &str) -> Vec<(String, usize, Vec<f64>)> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let xs: Vec<usize> = (0..header.len())
        .filter(|&i| header[i].starts_with('x'))
        .collect();
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let p = f[1].parse().unwrap_or(usize::MAX);
            let x = xs.iter().filter_map(|&i| f[i].parse().ok()).collect();
            (f[0].to_string(), p, x)
        })
        .collect()
}

fn half_circle(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let t = std::f64::consts::PI * i as f64 / (n - 1) as f64;
            (t.cos(), t.sin())
        })
        .collect()
}

#[test]
fn sign_two_points() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "line.csv", "x1,x2\n0,0\n1,0\n");
    let r = siginv(&["sign", s(&f), "--depth", "2"], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["dim"], 2);
    assert_eq!(v["depth"], 2);
    let levels: Vec<Vec<f64>> = serde_json::from_value(v["levels"].clone()).unwrap();
    assert_eq!(
        levels,
        vec![vec![1.0], vec![1.0, 0.0], vec![0.5, 0.0, 0.0, 0.0]]
    );
}

#[test]
fn sign_headerless_with_comments() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "raw.csv", "# comment\n0, 0\n 1,0\n1,1\n");
    let out = dir.path().join("sig.json");
    let r = siginv(&["sign", s(&f), "--depth", "2", "--out", s(&out)], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["levels"][1], serde_json::json!([1.0, 1.0]));
}

#[test]
fn empty_input_is_input_error() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "empty.csv", "x1,x2\n");
    let r = siginv(&["sign", s(&f), "--depth", "3"], &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("no points"), "{}", r.stderr);

    let bad = write(&dir, "bad.csv", "1,2\n3\n");
    assert_eq!(siginv(&["sign", s(&bad), "--depth", "3"], &[]).code, 2);
    let missing = dir.path().join("missing.csv");
    assert_eq!(siginv(&["sign", s(&missing), "--depth", "3"], &[]).code, 2);
    assert_eq!(siginv(&["sign", s(&f)], &[]).code, 2);
    assert_eq!(siginv(&["frobnicate"], &[]).code, 2);
}

#[test]
fn ids_give_array_in_file_order() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "ids.csv",
        "id,x1,x2\nb,0,0\nb,1,0\na,0,0\na,0,1\nc,0,0\nc,1,1\n",
    );
    let r = siginv(&["sign", s(&f), "--depth", "3"], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Vec<Value> = serde_json::from_str(&r.stdout).unwrap();
    let ids: Vec<&str> = v.iter().map(|x| x["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["b", "a", "c"]);
    assert_eq!(v[1]["levels"][1], serde_json::json!([0.0, 1.0]));
}

#[test]
fn constant_speed_keeps_signature() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t.csv", "t,x1,x2\n0,0,0\n0.9,1,0\n1,1,2\n");
    let a = siginv(&["sign", s(&f), "--depth", "4"], &[]);
    let b = siginv(&["sign", s(&f), "--depth", "4", "--constant-speed"], &[]);
    assert_eq!(a.code, 0);
    let va: Value = serde_json::from_str(&a.stdout).unwrap();
    let vb: Value = serde_json::from_str(&b.stdout).unwrap();
    let la: Vec<Vec<f64>> = serde_json::from_value(va["levels"].clone()).unwrap();
    let lb: Vec<Vec<f64>> = serde_json::from_value(vb["levels"].clone()).unwrap();
    for (x, y) in la.iter().flatten().zip(lb.iter().flatten()) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn invert_line_with_start() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "line.csv", "x1,x2\n0,0\n3,-1.5\n");
    let sig = dir.path().join("sig.json");
    assert_eq!(
        siginv(&["sign", s(&f), "--depth", "6", "--out", s(&sig)], &[]).code,
        0
    );

    let r = siginv(&["invert", s(&sig)], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let pts = rows(&r.stdout);
    assert_eq!(pts.len(), 7);
    for (k, (_, p, x)) in pts.iter().enumerate() {
        assert_eq!(*p, k);
        let t = k as f64 / 6.0;
        assert!((x[0] - 3.0 * t).abs() < 1e-9 && (x[1] + 1.5 * t).abs() < 1e-9);
    }

    let r = siginv(&["invert", s(&sig), "--start", "7,-3"], &[]);
    let last = &rows(&r.stdout)[6].2;
    assert!((last[0] - 10.0).abs() < 1e-9 && (last[1] + 4.5).abs() < 1e-9);
    assert_eq!(
        siginv(&["invert", s(&sig), "--start", "1,2,3"], &[]).code,
        2
    );
    assert_eq!(siginv(&["invert", s(&sig), "--start", "1,x"], &[]).code, 2);
}

#[test]
fn invert_batch_shape() {
    let dir = TempDir::new().unwrap();
    let mut body = String::from("id,x1,x2\n");
    for i in 0..50 {
        let a = i as f64 * 0.1;
        body.push_str(&format!(
            "r{i},0,0\nr{i},{},{}\nr{i},{},1\n",
            a.cos(),
            a.sin(),
            a
        ));
    }
    let f = write(&dir, "batch.csv", &body);
    let sig = dir.path().join("sig.json");
    assert_eq!(
        siginv(&["sign", s(&f), "--depth", "10", "--out", s(&sig)], &[]).code,
        0
    );
    let r = siginv(&["invert", s(&sig)], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let pts = rows(&r.stdout);
    assert_eq!(pts.len(), 50 * 11);
    assert_eq!(pts[11].0, "r1");
}

#[test]
fn degenerate_record_fails_alone() {
    let dir = TempDir::new().unwrap();
    let body = r#"[
        {"id": "ok", "dim": 2, "depth": 3,
         "levels": [[1], [1, 0], [0.5, 0, 0, 0], [0.16666666666666666, 0, 0, 0, 0, 0, 0, 0]]},
        {"id": "flat", "dim": 2, "depth": 3,
         "levels": [[1], [1, 1], [0, 0, 0, 0], [0, 0, 0, 0, 0, 0, 0, 0]]}
    ]"#;
    let f = write(&dir, "sigs.json", body);
    let r = siginv(&["invert", s(&f)], &[]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines.len(), 1 + 4 + 1);
    assert!(lines[5].starts_with("flat,") && lines[5].contains("norm"));
}

#[test]
fn malformed_signature_is_input_error() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "bad.json",
        r#"{"dim": 2, "depth": 2, "levels": [[1], [1, 0], [0, 0]]}"#,
    );
    assert_eq!(siginv(&["invert", s(&f)], &[]).code, 2);
    let g = write(&dir, "worse.json", "not json");
    assert_eq!(siginv(&["invert", s(&g)], &[]).code, 2);
}

#[test]
fn roundtrip_errors_fall() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "circle.csv", &csv_of(&half_circle(400)));
    let r = siginv(&["roundtrip", s(&f), "--depths", "5,10,20"], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut lines = r.stdout.lines();
    assert_eq!(lines.next().unwrap(), "id,depth,mean_error,max_error");
    let means: Vec<f64> = lines
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(means.len(), 3);
    assert!(means[0] > means[1] && means[1] > means[2], "{means:?}");

    let g = write(&dir, "line.csv", "x1,x2\n0,0\n0.5,0.5\n1,1\n");
    let r = siginv(&["roundtrip", s(&g), "--depths", "3..5"], &[]);
    for l in r.stdout.lines().skip(1) {
        let max: f64 = l.split(',').nth(3).unwrap().parse().unwrap();
        assert!(max < 1e-9, "{l}");
    }
}

#[test]
fn trend_of_line_and_smoothing() {
    let dir = TempDir::new().unwrap();
    let pts: Vec<(f64, f64)> = (0..1000)
        .map(|i| (i as f64 / 999.0, 2.0 * i as f64 / 999.0))
        .collect();
    let f = write(&dir, "line.csv", &csv_of(&pts));
    let r = siginv(&["trend", s(&f), "--depth", "8"], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let out = rows(&r.stdout);
    assert_eq!(out.len(), 9);
    for (k, (_, _, x)) in out.iter().enumerate() {
        let t = k as f64 / 8.0;
        assert!((x[0] - t).abs() < 1e-6 && (x[1] - 2.0 * t).abs() < 1e-6);
    }
    assert_eq!(
        rows(&siginv(&["trend", s(&f), "--depth", "2"], &[]).stdout).len(),
        3
    );
    assert_eq!(siginv(&["trend", s(&f), "--depth", "1"], &[]).code, 2);
}

fn develop(dir: &TempDir, body: &str, extra: &[&str]) -> (Run, Value) {
    let f = write(dir, "dev.csv", body);
    let mut args = vec!["develop", s(&f)];
    args.extend_from_slice(extra);
    let r = siginv(&args, &[]);
    let v = serde_json::from_str(&r.stdout).unwrap_or(Value::Null);
    (r, v)
}

#[test]
fn develop_reports() {
    let dir = TempDir::new().unwrap();
    let (r, v) = develop(&dir, "x1,x2\n0,0\n4,0\n", &["--alpha", "3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!((v["lhs"].as_f64().unwrap() - 3f64.exp()).abs() < 1e-9);
    assert_eq!(v["satisfied"], true);

    let (r, v) = develop(&dir, "x1,x2\n0,0\n1,0\n1,1\n", &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(v["satisfied"], true);
    assert!(v["alpha"].as_f64().unwrap() > v["min_alpha"].as_f64().unwrap());

    let (r, _) = develop(&dir, "x1,x2\n0,0\n1,0\n1,1\n", &["--alpha", "0.5"]);
    assert_eq!(r.code, 4, "{}", r.stderr);
    let (r, _) = develop(&dir, "x1,x2\n0,0\n1,0\n0,0\n", &[]);
    assert_eq!(r.code, 4, "{}", r.stderr);
}

#[test]
fn coefficient_cap_is_numeric_guard() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "line.csv", "x1,x2,x3\n0,0,0\n1,2,3\n");
    let r = siginv(
        &["sign", s(&f), "--depth", "8", "--max-coeffs", "1000"],
        &[],
    );
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert_eq!(
        siginv(
            &["sign", s(&f), "--depth", "5", "--max-coeffs", "1000"],
            &[]
        )
        .code,
        0
    );
}

#[test]
fn thread_variable() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "ids.csv", "id,x1\na,0\na,1\nb,0\nb,2\n");
    let one = siginv(&["sign", s(&f), "--depth", "4"], &[("SIGINV_THREADS", "1")]);
    let many = siginv(&["sign", s(&f), "--depth", "4"], &[("SIGINV_THREADS", "4")]);
    assert_eq!(one.code, 0);
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(
        siginv(
            &["sign", s(&f), "--depth", "4"],
            &[("SIGINV_THREADS", "zero")]
        )
        .code,
        2
    );
}

#[test]
fn bench_table() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bench.csv");
    let r = siginv(
        &[
            "bench",
            "--vary",
            "batch",
            "--values",
            "1,4",
            "--depth",
            "4",
            "--repeats",
            "1",
            "--out",
            s(&out),
        ],
        &[],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let table = std::fs::read_to_string(&out).unwrap();
    assert_eq!(table.lines().count(), 3);
    let r = siginv(
        &[
            "bench",
            "--vary",
            "depth",
            "--values",
            "3,40",
            "--repeats",
            "1",
            "--max-coeffs",
            "100000",
        ],
        &[],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(
        r.stdout.lines().last().unwrap().contains("skipped"),
        "{}",
        r.stdout
    );
    assert_eq!(siginv(&["bench", "--vary", "colour"], &[]).code, 2);
}

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relevation"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn tables_exponential_column() {
    let o = bin(&["tables", "--family", "d", "--compare-paper"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["family", "quantity", "n", "value", "paper", "deviation", "status"]);
    let means: Vec<f64> = rows[1..6].iter().map(|r| r[3].parse().unwrap()).collect();
    for (m, p) in means.iter().zip([1.0, 0.35506, 0.10492, 0.02483, 0.00459]) {
        assert!((m - p).abs() < 1e-3);
    }
    assert!(rows[1..].iter().all(|r| r[6] == "ok"));
    // Five decimals throughout.
    assert!(rows[1..].iter().all(|r| r[3].split('.').nth(1).unwrap().len() == 5));
}

#[test]
fn tables_uniform_entropies_and_depth_one() {
    let o = bin(&["tables", "--family", "a"]);
    let rows = csv_rows(&stdout(&o));
    let ce: Vec<&str> = rows.iter().filter(|r| r[1] == "CE").map(|r| r[3].as_str()).collect();
    assert_eq!(ce, ["0.50000", "0.31934", "0.13353", "0.03807"]);

    let o = bin(&["tables", "--family", "weibull:k=3", "--depth", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    // Gamma(4/3).
    assert_eq!(rows[1][3], "0.89298");
}

#[test]
fn full_paper_comparison_flags_the_suspect_cell() {
    let o = bin(&["tables", "--compare-paper"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let off: Vec<&str> = text.lines().filter(|l| l.ends_with(",off")).collect();
    assert_eq!(off, ["f,CE,4,0.47872,0.47572,0.00300,off"]);
    assert!(text.contains("b,E,2,0.88623,0.88662,-0.00039,ok-erratum"));
}

#[test]
fn curves_shape_and_values() {
    let o = bin(&["curves", "--family", "a", "--grid", "40"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["family", "x", "F1", "F2", "F3", "F4", "F5"]);
    assert_eq!(rows.len(), 41);
    let at_one = rows.iter().find(|r| r[1] == "1").unwrap();
    assert_eq!(&at_one[2..4], ["0.5", "0.846574"]);
    for r in &rows[1..] {
        let f: Vec<f64> = r[2..].iter().map(|v| v.parse().unwrap()).collect();
        assert!(f.windows(2).all(|w| w[0] <= w[1]));
    }
    let last: Vec<f64> = rows[40][2..].iter().map(|v| v.parse().unwrap()).collect();
    assert!(last.iter().all(|&v| v >= 1.0 - 1e-6));
}

#[test]
fn verify_reports_and_exit_codes() {
    let o = bin(&["verify", "--suite", "identities", "--family", "d"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for check in ["expected_t", "cov_x_t", "ce_mean_inactivity"] {
        let line = text.lines().find(|l| l.contains(&format!("identities.{check}[d]"))).unwrap();
        assert!(line.starts_with("PASS ") && line.contains(" margin="), "{line}");
    }
    let o = bin(&["verify", "--suite", "transforms", "--family", "e"]);
    assert!(stdout(&o).lines().any(|l| l.starts_with("PASS transforms.prhr_commutes[e]")));
    assert_eq!(bin(&["verify", "--suite", ""]).status.code(), Some(2));
    assert_eq!(bin(&["verify", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(bin(&["verify"]).status.code(), Some(2));
}

#[test]
fn verify_jsonl() {
    let o = bin(&["verify", "--suite", "operator", "--family", "d", "--format", "jsonl"]);
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["name"].as_str().unwrap().starts_with("operator."));
        assert_eq!(v["passed"], true);
    }
}

#[test]
fn usage_errors() {
    assert_eq!(bin(&["tables", "--family", "z"]).status.code(), Some(2));
    assert_eq!(bin(&["tables", "--family", "uniform:b=-1"]).status.code(), Some(2));
    assert_eq!(bin(&["curves", "--grid", "4"]).status.code(), Some(2));
    assert_eq!(bin(&["tables", "--depth", "0"]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bin(&["transform", "--kind", "reversed"]).status.code(), Some(2));
    assert_eq!(bin(&["transform", "--kind", "parallel", "--m", "2", "--theta", "2"]).status.code(), Some(2));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn heavy_tail_entropy_is_marked_not_converged() {
    // Frechet with gamma = 1 has no mean, so E(X_1) and CE(X_1) diverge.
    let o = bin(&["tables", "--family", "frechet:a=1,gamma=1", "--depth", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[1].starts_with("\"frechet:a=1,gamma=1\",E,1,"));
    assert!(lines[1].ends_with(",NC"));
    // X_2 has tail index 2 and a finite mean.
    assert_eq!(lines[2].rsplit(',').next(), Some("1.00000"));
}

#[test]
fn mc_is_deterministic_and_within_limits() {
    let args = ["mc", "--family", "d", "--samples", "20000", "--seed", "7"];
    let a = bin(&args);
    let b = bin(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("mean_x2[d] mc="));
    for line in text.lines() {
        let z: f64 = line.rsplit("z=").next().unwrap().parse().unwrap();
        assert!(z.abs() <= 4.0);
    }
    // Small samples still land inside the band.
    assert_eq!(bin(&["mc", "--samples", "100"]).status.code(), Some(0));
    assert_ne!(stdout(&bin(&["mc", "--samples", "20000", "--seed", "8"])), text);
}

#[test]
fn mc_batch_export() {
    let path = scratch("batch.csv");
    let o = bin(&["mc", "--samples", "500", "--batch-out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("value"));
    assert_eq!(lines.count(), 500);
}

#[test]
fn config_file_and_flag_precedence() {
    let cfg = scratch("run.conf");
    fs::write(&cfg, "# exponential only\nfamily = d\ndepth = 2\nformat = jsonl\n").unwrap();
    let o = bin(&["tables", "--config", cfg.to_str().unwrap()]);
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 3);
    let v: serde_json::Value = serde_json::from_str(&lines[1]).unwrap();
    assert_eq!(v["family"], "d");
    assert_eq!(v["n"], 2);

    let o = bin(&["tables", "--config", cfg.to_str().unwrap(), "--depth", "3", "--format", "csv"]);
    assert_eq!(csv_rows(&stdout(&o)).len(), 1 + 3 + 2);

    fs::write(&cfg, "depth = two\n").unwrap();
    assert_eq!(bin(&["tables", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(bin(&["tables", "--config", "/nonexistent/run.conf"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file_and_output_is_byte_stable() {
    let path = scratch("curves.csv");
    let o = bin(&["curves", "--family", "c", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let first = fs::read(&path).unwrap();
    bin(&["curves", "--family", "c", "--out", path.to_str().unwrap()]);
    assert_eq!(fs::read(&path).unwrap(), first);
    assert!(!first.contains(&b'\r'));
}

#[test]
fn transform_closed_forms() {
    for kind in ["prhr", "phr", "parallel", "series"] {
        let o = bin(&["transform", "--kind", kind, "--family", "e", "--theta", "3", "--m", "2", "--grid", "16"]);
        assert_eq!(o.status.code(), Some(0), "{kind}");
        for r in &csv_rows(&stdout(&o))[1..] {
            let (a, b): (f64, f64) = (r[2].parse().unwrap(), r[4].parse().unwrap());
            assert!((a - b).abs() <= 1e-5 * a.abs().max(1e-300) + 1e-12, "{kind} {r:?}");
        }
    }
    let o = bin(&["transform", "--kind", "reversed", "--family", "d", "--with", "e", "--grid", "16"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 17);
    assert!(rows[1..].iter().all(|r| r[4].is_empty()));
}

#[test]
fn entropy_listing() {
    let o = bin(&["entropy", "--family", "d", "--depth", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["family", "n", "mean", "cumulative_entropy", "differential_entropy"]);
    // Unit exponential: differential entropy 1, CE = pi^2/6 - 1.
    assert_eq!(rows[1][3], "0.644934");
    assert_eq!(rows[1][4], "1");
}

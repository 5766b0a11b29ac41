use std::fs;
use std::path::Path;
use std::process::Command;

use inertial_mann::cli::{parse_config, run_suite, SUMMARY_HEADER, TRACE_HEADER};

fn config(out: &Path, body: &str) -> String {
    format!("output_dir = {:?}\n{body}", out.display().to_string())
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn weber_single_case_writes_trace_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(&config(
        dir.path(),
        "experiment = \"weber\"\nalgorithms = [\"mimva\"]\nrepeat = 1\n",
    ))
    .unwrap();
    let report = run_suite(&cfg).unwrap();
    let mut files: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files, ["mimva_rand0.csv", "summary.csv"]);
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.exit_code(), 0);
}

#[test]
fn sfp_suite_layout_and_consistency() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(&config(
        dir.path(),
        "experiment = \"sfp\"\nalgorithms = \"mmva,mimva\"\ntiming = false\n",
    ))
    .unwrap();
    let report = run_suite(&cfg).unwrap();
    assert_eq!(report.trace_files.len(), 8);

    let (header, rows) = read_csv(&report.summary_file);
    assert_eq!(header, SUMMARY_HEADER);
    assert_eq!(rows.len(), 8);
    for row in &rows {
        assert_eq!(row[4], "tolerance_met");
        let trace = dir.path().join(format!("{}_{}.csv", row[0], row[1]));
        let (th, trows) = read_csv(&trace);
        assert_eq!(th, TRACE_HEADER);
        let iterations: usize = row[2].parse().unwrap();
        assert_eq!(trows.len(), iterations + 1);
        // the final error column round-trips to the last trace entry
        let final_error: f64 = row[5].parse().unwrap();
        let last: f64 = trows.last().unwrap()[1].parse().unwrap();
        assert_eq!(final_error.to_bits(), last.to_bits());
        assert!(final_error < 1e-3);
        for (i, r) in trows.iter().enumerate() {
            assert_eq!(r[0].parse::<usize>().unwrap(), i);
            assert_eq!(r[3].parse::<f64>().unwrap(), 0.0);
        }
    }
}

#[test]
fn same_seed_is_byte_identical() {
    let body = "experiment = \"cfp\"\nalgorithms = [\"cq\", \"mimva\"]\nrepeat = 2\nseed = 7\nmax_iter = 50\ntiming = false\ncfp_dim = 10\ncfp_balls = 8\n";
    let snapshot = |dir: &Path| {
        run_suite(&parse_config(&config(dir, body)).unwrap()).unwrap();
        let mut entries: Vec<_> = fs::read_dir(dir)
            .unwrap()
            .map(|e| {
                let p = e.unwrap().path();
                (p.file_name().unwrap().to_owned(), fs::read(&p).unwrap())
            })
            .collect();
        entries.sort();
        entries
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let sa = snapshot(a.path());
    assert_eq!(sa.len(), 5);
    assert_eq!(sa, snapshot(b.path()));
}

#[test]
fn binary_accepts_flags_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_inertial-mann"))
        .args([
            "--experiment",
            "weber",
            "--algo",
            "mimha",
            "--repeat",
            "2",
            "--no-timing",
        ])
        .env("INERTIAL_MANN_OUT", dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("summary.csv").exists());
    assert!(dir.path().join("mimha_rand1.csv").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("mimha"));
}

#[test]
fn binary_reports_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "experiment = \"sfp\"\neta = 2.0\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_inertial-mann"))
        .arg("--config")
        .arg(&path)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("eta"));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cone_lab::config::ScanConfig;
use cone_lab::report::Report;
use cone_lab::{merge, par};
use cone_lab_core::mc::{self, RieszSampler};
use cone_lab_core::special;
use cone_lab_core::tube::{self, WitnessOptions};
use cone_lab_core::{Algebra, Element};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cone-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn unknown_family_is_a_config_error() {
    let o = run(&["verify-identities", "--seed", "1", "--algebra", "octonion:3"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("octonion:3"));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["scan-wallach", "--seed", "x"])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    // no wall-clock seeding
    assert_eq!(code(&run(&["verify-identities"])), 2);
}

#[test]
fn bad_config_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    std::fs::write(&p, r#"{"seed": 1, "unknown_field": true}"#).unwrap();
    assert_eq!(code(&run(&["verify-identities", "--config", p.to_str().unwrap()])), 2);
    std::fs::write(&p, r#"{"seed": 1, "budget": 0, "algebras": ["symr:2"], "mu": [0.3]}"#).unwrap();
    assert_eq!(code(&run(&["kernel-witness", "--config", p.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["scan-wallach", "--seed", "1", "--grid", "2:1:0.5"])), 2);
}

#[test]
fn default_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let o = run(&["verify-identities", "--seed", "20240601", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep: Report = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(rep.summary.pass);
    assert_eq!(rep.identities.len(), 8 * 19);
    let algs: std::collections::BTreeSet<_> = rep.identities.iter().map(|c| c.algebra.as_str()).collect();
    assert_eq!(algs.len(), 8);
}

#[test]
fn impossible_tolerance_fails_with_named_identities() {
    let o = run(&["verify-identities", "--seed", "3", "--algebra", "symr:2", "--tol", "1e-30"]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("failure: symr:2 det_character"), "{err}");
    let rep: Report = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!rep.summary.pass);
    assert!(rep.summary.failures.iter().any(|f| f.contains("quad_rep_inverse")));
}

fn small_scan(dir: &Path, name: &str, algebra: &str, mu: &str, seed: &str) -> PathBuf {
    let cfg = dir.join(format!("{name}.cfg.json"));
    std::fs::write(
        &cfg,
        r#"{"psd_configurations": 4, "density_points": 20, "refine_top": 1, "refine_iterations": 10}"#,
    )
    .unwrap();
    let out = dir.join(format!("{name}.json"));
    let o = run(&[
        "scan-wallach",
        "--config",
        cfg.to_str().unwrap(),
        "--algebra",
        algebra,
        "--mu",
        mu,
        "--budget",
        "8",
        "--seed",
        seed,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out
}

fn load(p: &Path) -> Report {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn report_merge_dedups_sorts_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let a = small_scan(d, "a", "symr:3", "2,0.3", "5");
    let b = small_scan(d, "b", "spin:3", "1", "5");
    let c = small_scan(d, "c", "symr:2", "1.5,0.25", "5");
    let merged = d.join("m.json");
    let csv = d.join("m.csv");
    let (ps, ms, cs) = (a.to_str().unwrap(), merged.to_str().unwrap(), csv.to_str().unwrap());
    let o = run(&["report", ps, b.to_str().unwrap(), c.to_str().unwrap(), ps, "--out", ms, "--csv", cs]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("warning: duplicate row"));

    let rep = load(&merged);
    let keys: Vec<(String, usize, f64)> = rep.scan.iter().map(|r| (r.family.clone(), r.r, r.mu)).collect();
    assert_eq!(
        keys,
        vec![
            ("spin".into(), 2, 1.0),
            ("symr".into(), 2, 0.25),
            ("symr".into(), 2, 1.5),
            ("symr".into(), 3, 0.3),
            ("symr".into(), 3, 2.0),
        ]
    );

    // CSV numbers parse back to the same bits
    let mut rd = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), merge::CSV_COLUMNS.to_vec());
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), rep.scan.len());
    for (row, rec) in rows.iter().zip(&rep.scan) {
        assert_eq!(row[3].parse::<f64>().unwrap().to_bits(), rec.mu.to_bits());
        assert_eq!(row[6].parse::<f64>().unwrap().to_bits(), rec.margin.min_scaled.to_bits());
        assert_eq!(row[7].parse::<f64>().unwrap().to_bits(), rec.certificate.min_eigenvalue.to_bits());
        assert_eq!(row[8].parse::<u64>().unwrap(), rec.seed);
    }

    // merging the merged report with its inputs changes nothing
    let again = d.join("m2.json");
    let csv2 = d.join("m2.csv");
    let o = run(&[
        "report",
        ms,
        ps,
        b.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
        "--csv",
        csv2.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(load(&again).reproducible_json().unwrap(), rep.reproducible_json().unwrap());
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(&csv2).unwrap());
}

#[test]
fn report_rejects_other_schema_versions() {
    let dir = tempfile::tempdir().unwrap();
    let a = small_scan(dir.path(), "a", "symr:2", "0.25", "9");
    let text = std::fs::read_to_string(&a).unwrap().replace("cone-lab-report/1", "cone-lab-report/2");
    let b = dir.path().join("b.json");
    std::fs::write(&b, text).unwrap();
    let o = run(&["report", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("schema"));
}

#[test]
fn report_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = small_scan(dir.path(), "a", "hermc:2", "0.5,2.5", "11");
    let text = std::fs::read_to_string(&a).unwrap();
    let rep: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(rep.to_json().unwrap(), text);
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn parallel_drivers_match_sequential_core() {
    let alg = Algebra::sym(3).unwrap();
    let opts = WitnessOptions { budget: 12, refine_iterations: 15, ..Default::default() };
    let seq = tube::witness_search(alg, 1.25, 77, &opts).unwrap();
    for threads in [1, 3] {
        assert_eq!(in_pool(threads, || par::witness_search(alg, 1.25, 77, &opts)).unwrap(), seq);
    }

    let sampler = RieszSampler::new(alg, 2.5).unwrap();
    let f = |y: &Element| Ok(special::riesz_operator(2.5, y));
    let seq = mc::estimate_operator_mean(&sampler, &f, 10_000, 5).unwrap();
    for threads in [1, 4] {
        assert_eq!(in_pool(threads, || par::estimate_operator_mean(&sampler, &f, 10_000, 5)).unwrap(), seq);
    }
}

#[test]
fn thread_count_does_not_change_reports() {
    let mut outs = Vec::new();
    for threads in ["1", "3"] {
        let o = bin()
            .args(["kernel-witness", "--algebra", "spin:4", "--mu", "0.4,1.5", "--budget", "6", "--seed", "8"])
            .env(par::THREADS_ENV, threads)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let rep: Report = serde_json::from_slice(&o.stdout).unwrap();
        outs.push(rep.reproducible_json().unwrap());
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn config_file_and_flags_compose() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    let cfg = ScanConfig {
        algebras: vec!["symr:2".into()],
        mu: vec![0.25],
        seed: Some(4),
        budget: 4,
        refine_top: 0,
        ..Default::default()
    };
    std::fs::write(&p, serde_json::to_string(&cfg).unwrap()).unwrap();
    let o = run(&["kernel-witness", "--config", p.to_str().unwrap(), "--mu", "0.3,0.35"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep: Report = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep.config.mu, vec![0.3, 0.35]);
    assert_eq!(rep.config.budget, 4);
    assert_eq!(rep.witnesses.len(), 2);
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qcldpc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcldpc"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn construct_ra_mask_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let out = qcldpc(&["construct", "--mask", "M_RA", "--p", "32", "--budget", "5", "--out", "ra"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let alist = fs::read_to_string(dir.path().join("ra.alist")).unwrap();
    // alist header is `n r`
    assert_eq!(alist.lines().next(), Some("320 160"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("ra.json")).unwrap()).unwrap();
    assert_eq!(json["manifest"]["command"], "construct");
    assert_eq!(json["result"]["rows"], 160);
}

#[test]
fn construct_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| {
        vec![
            "construct", "--mask", "M1", "--J", "3", "--L", "6", "--p", "7", "--search", "girth",
            "--budget", "300", "--seed", "1", "--out", out,
        ]
    };
    assert!(qcldpc(&args("a"), dir.path()).status.success());
    assert!(qcldpc(&args("b"), dir.path()).status.success());
    let a = fs::read(dir.path().join("a.base")).unwrap();
    let b = fs::read(dir.path().join("b.base")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn missing_p_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = qcldpc(&["construct", "--mask", "M1", "--J", "3", "--L", "6"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn base_file_errors_carry_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.base"), "1 2 5\n0 7\n").unwrap();
    let out = qcldpc(&["construct", "--base", "bad.base"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.base") && err.contains("line 2"), "{err}");
}

#[test]
fn analyze_four_cycle() {
    let dir = tempfile::tempdir().unwrap();
    // 2 x 2 all-ones matrix
    fs::write(dir.path().join("c4.alist"), "2 2\n2 2\n2 2\n2 2\n1 2\n1 2\n1 2\n1 2\n").unwrap();
    let out = qcldpc(&["analyze", "c4.alist"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("girth: 4"));
}

#[test]
fn analyze_regular_qc_code_reports_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let built = qcldpc(
        &["construct", "--mask", "M1", "--J", "3", "--L", "5", "--p", "11", "--budget", "200", "--out", "m1"],
        dir.path(),
    );
    assert!(built.status.success());
    let out = qcldpc(&["analyze", "m1.alist", "--json", "--max-cycle-len", "8"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let girth = json["result"]["girth"].as_u64().unwrap();
    assert!(girth <= 12);
    let mu1 = json["result"]["spectral"]["mu1"].as_f64().unwrap();
    assert!((mu1 - 15f64.sqrt()).abs() < 1e-6, "{mu1}");
    assert!(json["result"]["spectral"]["bound"].is_number());
    assert_eq!(json["manifest"]["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn threshold_rejects_unnormalized_distribution() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.dist"), "V 3 0.9\nC 6 1\n").unwrap();
    let out = qcldpc(&["threshold", "bad.dist"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn threshold_of_regular_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("reg.dist"), "V 3 1\nC 6 1\n").unwrap();
    let out = qcldpc(
        &["threshold", "reg.dist", "--bits", "9", "--tolerance", "0.005", "--out", "reg.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("reg.json")).unwrap()).unwrap();
    let sigma = json["result"]["sigma"].as_f64().unwrap();
    assert!((sigma - 0.881).abs() < 0.01, "{sigma}");
    assert_eq!(json["result"]["config"]["grid"]["bits"], 9);
    assert!(json["result"]["lower_trace"].as_array().unwrap().len() > 1);
}

#[test]
fn optimize_rejects_small_population() {
    let dir = tempfile::tempdir().unwrap();
    let out = qcldpc(
        &["optimize", "--np", "5", "--lambda-degrees", "2,3,8", "--rho-degrees", "6,7"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn optimize_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        let o = qcldpc(
            &[
                "optimize", "--np", "6", "--lambda-degrees", "2,3,8", "--rho-degrees", "6,7",
                "--generations", "2", "--inner-iterations", "10", "--bits", "8",
                "--tolerance", "0.02", "--seed", "4", "--out", out,
            ],
            dir.path(),
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read_to_string(dir.path().join(format!("{out}.dist"))).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn simulate_is_reproducible_and_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    assert!(qcldpc(
        &["construct", "--mask", "M1", "--J", "3", "--L", "6", "--p", "13", "--budget", "100", "--out", "c"],
        dir.path(),
    )
    .status
    .success());
    let run = |out: &str| {
        let o = qcldpc(
            &[
                "simulate", "c.alist", "--snr", "1,2,3", "--iterations", "20", "--max-frames",
                "300", "--min-errors", "20", "--seed", "9", "--out", out, "--threads", "1",
            ],
            dir.path(),
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read_to_string(dir.path().join(out)).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    assert!(a.starts_with("snr_db,sigma,frames,frame_errors,bit_errors,undetected,fer,ber,fer_lo,fer_hi,mean_iters"));
    assert_eq!(a.lines().count(), 4);
    assert!(dir.path().join("a.csv.manifest.json").exists());
}

#[test]
fn simulate_rejects_empty_snr_list() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c4.alist"), "2 2\n2 2\n2 2\n2 2\n1 2\n1 2\n1 2\n1 2\n").unwrap();
    let out = qcldpc(&["simulate", "c4.alist", "--snr", ""], dir.path());
    assert_ne!(out.status.code(), Some(0));
    assert!(matches!(out.status.code(), Some(2) | Some(3)));
}

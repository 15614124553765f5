use std::path::Path;
use std::process::Command;

fn recon() -> Command {
    Command::new(env!("CARGO_BIN_EXE_recon"))
}

fn run_ok(args: &[&str]) -> String {
    let out = recon().args(args).output().expect("spawn recon");
    assert!(
        out.status.success(),
        "recon {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn capacity_single_point() {
    let csv = run_ok(&["capacity", "--snr", "1.0", "--dims", "8"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "snr,c_awgn,c_biawgn,c_d8");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "1");
    assert!((row[1].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn scan_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "4"].iter().enumerate() {
        let path = dir.path().join(format!("scan{i}.csv"));
        let out = recon()
            .args([
                "scan",
                "--builtin",
                "rate0.5-regular",
                "--n",
                "1024",
                "--d",
                "8",
                "--snr",
                "1.3:0.5:2.3",
                "--frames",
                "40",
                "--seed",
                "9",
                "--threads",
                threads,
                "--output",
            ])
            .arg(&path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert!(!outputs[0].is_empty());
    // The sidecar carries provenance.
    let meta = std::fs::read_to_string(dir.path().join("scan0.csv.meta.json")).unwrap();
    assert!(meta.contains("\"seed\": \"9\""));
    assert!(meta.contains("code_hash"));
}

#[test]
fn codegen_cache_reload_equals_regenerate() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.code");
    let b = dir.path().join("b.code");
    for p in [&a, &b] {
        let out = recon()
            .args(["codegen", "--builtin", "rate0.02", "--n", "4096", "--seed", "7", "--output"])
            .arg(p)
            .output()
            .unwrap();
        assert!(out.status.success());
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert!(stdout.contains("socket balance"), "{stdout}");
    }
    let (fa, fb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(fa, fb);

    // Tampering must be caught on load.
    let mut broken = fa.clone();
    let mid = broken.len() / 2;
    broken[mid] ^= 1;
    let t = dir.path().join("t.code");
    std::fs::write(&t, &broken).unwrap();
    let out = recon()
        .args(["scan", "--d", "8", "--snr", "1.0", "--frames", "1", "--code"])
        .arg(&t)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn ensemble_file_input_works() {
    let ens = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../ensembles/rate0.1.metens");
    let out = recon()
        .args([
            "scan",
            "--n",
            "2000",
            "--d",
            "2",
            "--snr",
            "5.0",
            "--frames",
            "2",
            "--ensemble",
        ])
        .arg(&ens)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn keyrate_ideal_column() {
    let csv = run_ok(&["keyrate", "--ideal"]);
    for line in csv.lines().skip(1) {
        let mut it = line.split(',');
        let va: f64 = it.next().unwrap().parse().unwrap();
        let k: f64 = it.next().unwrap().parse().unwrap();
        assert!((k - 0.5 * (1.0 + va).log2()).abs() < 1e-9, "{line}");
    }
}

#[test]
fn exit_codes() {
    // Usage errors.
    assert_eq!(recon().arg("frobnicate").output().unwrap().status.code(), Some(1));
    assert_eq!(
        recon().args(["capacity", "--snr", "nonsense"]).output().unwrap().status.code(),
        Some(1)
    );
    // I/O error.
    assert_eq!(
        recon().args(["scan", "--code", "/does/not/exist"]).output().unwrap().status.code(),
        Some(2)
    );
    // Validation error: unbalanced ensemble file.
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.metens");
    std::fs::write(&bad, "rate 0.5\nedge_types 1\nvar 1.0 3\nchk 0.5 5\n").unwrap();
    let out = recon().args(["scan", "--n", "100", "--ensemble"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    // Help is not a failure.
    assert_eq!(recon().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn demo_reports_a_trace() {
    let txt = run_ok(&[
        "reconcile-demo",
        "--n",
        "1024",
        "--d",
        "4",
        "--scheme",
        "householder",
        "--snr",
        "4.0",
    ]);
    assert!(txt.contains("disclosed bits"));
    assert!(txt.contains("success: true"), "{txt}");
}

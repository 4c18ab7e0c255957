use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac-warp"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn data_rows(path: &Path) -> usize {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().filter(|l| !l.starts_with('#')).count() - 1
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn charfn_rows_match_scan_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["charfn", "--preset", "fig1", "--scan-points", "57"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(data_rows(&dir.path().join("charfn.csv")), 57);
    let text = std::fs::read_to_string(dir.path().join("charfn.csv")).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("# config: {"));
    assert!(text.lines().nth(2).unwrap().starts_with("# sha256: "));
    assert!(dir.path().join("charfn.svg").exists());
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        vec!["charfn", "--preset", "fig1"],
        vec!["spectrum", "--preset", "fig1"],
        vec!["flow", "--preset", "fig2"],
        vec!["wronskian", "--preset", "fig5"],
        vec!["heun", "--preset", "fig5"],
        vec!["eta", "--gauge", "0.3"],
    ] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let oa = run(&args, a.path());
        let ob = run(&args, b.path());
        assert_eq!(oa.status.code(), Some(0), "{args:?}");
        assert_eq!(snapshot(a.path()), snapshot(b.path()), "{args:?}");
        // stdout names the output directory; everything before it must agree
        let strip = |o: &Output| -> String {
            String::from_utf8_lossy(&o.stdout).lines().filter(|l| !l.starts_with("wrote ")).collect()
        };
        assert_eq!(strip(&oa), strip(&ob));
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let one = Command::new(env!("CARGO_BIN_EXE_dirac-warp"))
        .args(["spectrum", "--preset", "fig1", "--k-min", "-2", "--k-max", "2"])
        .arg("--out")
        .arg(a.path())
        .env("DIRAC_WARP_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(one.status.code(), Some(0));
    let many = run(&["spectrum", "--preset", "fig1", "--k-min", "-2", "--k-max", "2"], b.path());
    assert_eq!(many.status.code(), Some(0));
    assert_eq!(snapshot(a.path()), snapshot(b.path()));
    let bad = Command::new(env!("CARGO_BIN_EXE_dirac-warp"))
        .args(["eta"])
        .env("DIRAC_WARP_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| run(args, dir.path()).status.code();
    assert_eq!(code(&["eta", "--gauge", "0.3"]), Some(0));
    assert_eq!(code(&["eta", "--alpha", "-1", "--scan-points", "1"]), Some(1));
    assert_eq!(code(&["eta", "--gauge", "2"]), Some(2));
    assert_eq!(code(&["charfn", "--preset", "fig1", "--gauge", "-1"]), Some(2));
    assert_eq!(code(&["flow", "--preset", "fig4"]), Some(3));
    assert_eq!(code(&["flow", "--preset", "fig4", "--exclude-touching"]), Some(0));
    assert_eq!(code(&["wronskian", "--preset", "fig5", "--max-step", "1e-15"]), Some(1));
    // a step cap far below T / max_steps exhausts the step budget
    assert_eq!(code(&["wronskian", "--preset", "fig5", "--max-step", "1e-9"]), Some(4));
    assert_eq!(code(&["charfn", "--preset", "fig1", "--min-step", "1"]), Some(1));
}

#[test]
fn config_errors_list_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spectrum", "--alpha", "-1", "--scan-points", "1", "--delta", "0"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("alpha") && err.contains("scan_points") && err.contains("delta"), "{err}");
}

#[test]
fn touching_refusal_names_the_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["flow", "--preset", "fig4"], dir.path());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("--exclude-touching"));
    for s in ["0.125", "0.375", "0.625", "0.875"] {
        assert!(err.contains(s), "{err}");
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.toml");
    std::fs::write(&file, "preset = \"fig1\"\nscan_points = 20\nformats = [\"csv\"]\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&["charfn", "--config", file.to_str().unwrap(), "--scan-points", "33"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(data_rows(&out.join("charfn.csv")), 33);
    assert!(!out.join("charfn.svg").exists());
    std::fs::write(&file, "scan_pionts = 20\n").unwrap();
    assert_eq!(run(&["charfn", "--config", file.to_str().unwrap()], &out).status.code(), Some(1));
}

#[test]
fn flow_reports_winding_and_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["flow", "--preset", "fig3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("winding 3"), "{stdout}");
    assert_eq!(data_rows(&dir.path().join("crossings.csv")), 3);
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("flow.json")).unwrap()).unwrap();
    assert_eq!(json["result"]["report"]["net"].as_i64().unwrap().abs(), 3);
    assert!(json["result"]["delta_note"].as_str().unwrap().contains("delta = 0.1"));
}

#[test]
fn spectrum_json_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spectrum", "--preset", "fig1", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("spectrum.json")).unwrap()).unwrap();
    let modes = json["result"].as_array().unwrap();
    assert_eq!(modes.len(), 1);
    assert_eq!(modes[0]["k"], 1.0);
    for r in modes[0]["roots"].as_array().unwrap() {
        assert_eq!(r.as_object().unwrap().len(), 2);
        assert!(r["lambda"].as_f64().unwrap().abs() > 1e-3);
    }
    let empty = tempfile::tempdir().unwrap();
    let o = run(&["spectrum", "--preset", "fig1", "--lambda-min", "0.01", "--lambda-max", "0.02"], empty.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(data_rows(&empty.path().join("spectrum.csv")), 0);
}

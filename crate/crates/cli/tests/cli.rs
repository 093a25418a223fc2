use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bhs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bhs")).args(args).output().expect("bhs runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bhs-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_reports_success() {
    let o = bhs(&["run", "--protocol", "ring2", "--n", "9", "--homebases", "2,3,5,7"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().last().unwrap().starts_with("verdict: success"), "{out}");
}

#[test]
fn structured_run_ends_with_a_verdict_record() {
    let o = bhs(&["run", "--protocol", "ring3", "--n", "8", "--homebases", "1,2,4,5,7", "--labeling", "caacacca", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let last: serde_json::Value = serde_json::from_str(out.lines().last().unwrap()).unwrap();
    assert_eq!(last["type"], "verdict");
    assert_eq!(last["verdict"]["success"], true);
    let first: serde_json::Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
    assert_eq!(first["spec"]["port_labeling"], "caacacca");
}

#[test]
fn sweep_reports_do_not_depend_on_jobs() {
    let dir = scratch("jobs");
    let mut reports = Vec::new();
    for jobs in ["1", "8"] {
        let out = dir.join(format!("report-{jobs}.json"));
        let o = bhs(&["sweep", "--protocol", "ring1", "--n", "4..7", "--exhaustive", "--jobs", jobs, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        reports.push(fs::read(out).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn failure_exemplars_replay() {
    let dir = scratch("replay");
    let traces = dir.join("traces");
    let o = bhs(&[
        "sweep", "--protocol", "ring1", "--n", "4..6", "--k", "2", "--out", dir.join("r.json").to_str().unwrap(),
        "--traces", traces.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let files: Vec<_> = fs::read_dir(&traces).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(!files.is_empty());
    for f in &files {
        let o = bhs(&["replay", f.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1));
        assert!(stdout(&o).contains("verdict: failure"));
    }

    // A trace that no longer matches its spec is reported as diverged.
    let text = fs::read_to_string(&files[0]).unwrap();
    let tampered = dir.join("tampered.jsonl");
    let (head, rest) = text.split_once('\n').unwrap();
    let mut header: serde_json::Value = serde_json::from_str(head).unwrap();
    header["spec"]["round_bound"] = 2.into();
    fs::write(&tampered, format!("{header}\n{rest}")).unwrap();
    let o = bhs(&["replay", tampered.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("diverged"));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn adversary_finds_two_agents_insufficient() {
    let o = bhs(&["adversary", "--protocol", "ring1", "--agents", "2", "--nmax", "8"]);
    assert_eq!(o.status.code(), Some(1));
    let spec: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(spec["homebases"].as_array().unwrap().len(), 2);
}

#[test]
fn constructions_fail() {
    let o = bhs(&["theorem", "three-agents", "--t", "2", "--x", "1", "--y", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("verdict: failure"));
    let o = bhs(&["theorem", "mirror-four", "--t", "0", "--x", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(bhs(&["sweep", "--protocol", "ring1", "--n", "9..4"]).status.code(), Some(2));
    assert_eq!(bhs(&["run", "--protocol", "ring1", "--n", "5", "--homebases", "0,1,2"]).status.code(), Some(2));
    assert_eq!(bhs(&["dump-fsm", "--protocol", "ring9"]).status.code(), Some(2));
}

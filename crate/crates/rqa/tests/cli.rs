use std::path::Path;
use std::process::{Command, Output};

fn rqa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rqa")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&rqa(&["--help"])), 0);
    assert_eq!(code(&rqa(&[])), 1);
    assert_eq!(code(&rqa(&["corrupt", "--bogus"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.png");
    assert_eq!(code(&rqa(&["corrupt", path(&missing), "--out", path(dir.path())])), 2);
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"image_id\": 3}\n").unwrap();
    let o = rqa(&["split", "--manifest", path(&bad), "--out", path(dir.path())]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    assert_eq!(code(&rqa(&["split", "--manifest", path(&missing), "--out", path(dir.path())])), 2);
    let config = dir.path().join("c.toml");
    std::fs::write(&config, "[decision]\nnormalization = \"median\"\n").unwrap();
    assert_eq!(code(&rqa(&["jnd", "--scores", path(&bad), "--config", path(&config)])), 1);
}

#[test]
fn jnd_tertiles() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("s.csv");
    let body: String = (0..10).map(|i| format!("s{i},{}\n", i as f64 * 0.5)).collect();
    std::fs::write(&scores, format!("sample_id,value\n{body}")).unwrap();
    let o = rqa(&["jnd", "--scores", path(&scores)]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let count = |l: &str| text.lines().filter(|x| x.ends_with(l)).count();
    assert_eq!([count(",Mild"), count(",Medium"), count(",Severe")], [4, 3, 3]);
    assert!(text.contains("s9,4.5,Mild") && text.contains("s0,0,Severe"));
}

#[test]
fn correlate_and_subjects() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    std::fs::write(&a, "sample_id,value\nx,1\ny,2\nz,3\nw,4\n").unwrap();
    std::fs::write(&b, "sample_id,value\nx,10\ny,20\nz,35\nw,30\n").unwrap();
    let o = rqa(&["correlate", "--metric", path(&a), "--labels", path(&a)]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["srcc"], 1.0);
    assert_eq!(report["n"], 4);
    let o = rqa(&["correlate", "--subjects", path(&a), path(&b), path(&a)]);
    let m: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(m["values"][0][2], 1.0);
    assert!((m["values"][0][1].as_f64().unwrap() - 0.8).abs() < 1e-12);
    std::fs::write(&b, "sample_id,value\nx,10\n").unwrap();
    assert_eq!(code(&rqa(&["correlate", "--metric", path(&a), "--labels", path(&b)])), 1);
}

#[test]
fn trajectory_reports_ik_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("t.jsonl");
    std::fs::write(
        &input,
        "{\"fields\": [10, 0, -20, 0, 0, 0.1, 1]}\n{\"matrix\": [[1,0,0,0],[0,1,0,0.01],[0,0,1,0],[0,0,0,1]]}\n{\"fields\": [5000, 0, 0, 0, 0, 0]}\n",
    )
    .unwrap();
    let o = rqa(&["trajectory", "--input", path(&input), "--joints", "0.3", "-1.2", "0.8", "-0.4", "1.1", "0.6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let steps: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(steps.len(), 3);
    assert!(steps[0]["ik_solutions"].as_u64().unwrap() >= 2);
    assert_eq!(steps[1]["step"], 2);
    assert_eq!(steps[2]["ik_solutions"], 0);
    assert!(!steps[2]["unreachable"].is_null());
}

#[test]
fn score_execution_command() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("e.csv");
    std::fs::write(&input, "image_id,kind,ref_final_xyz,dist_final_xyz\na,success,,\nb,failure,0 0 0,0 0 0.1\n")
        .unwrap();
    let out = dir.path().join("scored.csv");
    assert_eq!(code(&rqa(&["score-execution", "--input", path(&input), "--out", path(&out)])), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("image_id,kind,ref_final_xyz,dist_final_xyz,score\na,success,,,100\n"), "{text}");
    let b = text.lines().nth(2).unwrap();
    assert!(
        b.starts_with("b,failure,0 0 0,0 0 0.1,")
            && (b.rsplit(',').next().unwrap().parse::<f64>().unwrap() - 90.0).abs() < 1e-9
    );
}

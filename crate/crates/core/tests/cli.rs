use std::process::Command;

fn bench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bench"))
}

#[test]
fn gradcheck_succeeds() {
    let out = bench().arg("gradcheck").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("defer / mlp"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn small_audit_succeeds() {
    let out = bench()
        .args(["audit", "--oracle-cases", "1000", "--calibration-cases", "10", "--excess-cases", "200"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn run_resume_and_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("results.csv");
    let summary = dir.path().join("summary.csv");
    let args = [
        "run", "--methods", "cs-sigmoid,always-reject", "--costs", "0.1:0.2:0.05", "--trials", "2", "--epochs", "3",
        "--out",
    ];
    let status = bench().args(args).arg(&results).status().unwrap();
    assert!(status.success());
    let first = std::fs::read(&results).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 2);
    assert!(text.contains("twonorm,cs-sigmoid,clean,0.15,1,"));

    let status = bench().args(args).arg(&results).arg("--resume").status().unwrap();
    assert!(status.success());
    assert_eq!(std::fs::read(&results).unwrap(), first);

    let status = bench()
        .args(["aggregate", "--percent", "--in"])
        .arg(&results)
        .arg("--out")
        .arg(&summary)
        .status()
        .unwrap();
    assert!(status.success());
    let s = std::fs::read_to_string(&summary).unwrap();
    assert!(s.contains("twonorm,always-reject,clean,0.2,2,20,0,"));
}

#[test]
fn csv_dataset_and_bad_method() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("toy.csv");
    let mut body = String::from("a,b,label\n");
    for i in 0..200 {
        let x = i as f64 / 100.0 - 1.0;
        body.push_str(&format!("{x},{},{}\n", 0.5 * x, if x > 0.0 { 1 } else { -1 }));
    }
    std::fs::write(&data, body).unwrap();
    let out_path = dir.path().join("out.csv");
    let status = bench()
        .args(["run", "--csv-header", "--methods", "cs-hinge", "--costs", "0.2", "--trials", "1", "--epochs", "2", "--dataset"])
        .arg(&data)
        .arg("--out")
        .arg(&out_path)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(std::fs::read_to_string(&out_path).unwrap().contains("toy,cs-hinge,clean,0.2,0,"));

    let out = bench().args(["run", "--methods", "svm", "--out"]).arg(&out_path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

use std::process::Command;

fn qcorr() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qcorr"))
}

#[test]
fn list_and_show() {
    let out = qcorr().arg("list-datasets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["pe-regular", "pe-mixed", "jc-regular", "jc-mixed", "jc-reduced"] {
        assert!(text.contains(name));
    }
    let out = qcorr().args(["show-cics", "jc-mixed"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2 + 16);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = qcorr().args(["show-cics", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"dataset":"pe-regular","stages":[]}"#).unwrap();
    let out = qcorr().args(["experiment", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let cfg = dir.path().join("ok.json");
    std::fs::write(
        &cfg,
        r#"{"dataset":"pe-regular","stages":["poincare"],"entries":[2],"classical":{"section_t_max":50}}"#,
    )
    .unwrap();
    let out = qcorr().arg("--outdir").arg(dir.path()).args(["experiment", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("pe-regular/2_poincare.csv").exists());
    assert!(dir.path().join("manifest.json").exists());

    let out = qcorr()
        .arg("--outdir")
        .arg(dir.path())
        .args(["quantum", "--dataset", "jc-reduced", "--n-ph-max", "14", "--t-max", "2", "--no-gate"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

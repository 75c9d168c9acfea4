use std::process::Command;

#[test]
fn bound_compare_writes_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "id = 'cli'\n[graph]\nkind = 'path'\nn = 3\n[model]\nbeta = [1.0]\n[grid]\nT = 2.0\npoints = 5\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_epibound"))
        .args(["bound-compare", "--config"])
        .arg(&config)
        .args(["--replicas", "20", "--seed", "3", "--beta", "0.5,1"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let table = std::fs::read_to_string(out.join("cli.csv")).unwrap();
    assert!(table.starts_with("experiment,method,time,value,stderr,K,seed\n"));
    assert!(table.contains("cli:beta=0.5,simulation,"));
    let manifest = std::fs::read_to_string(out.join("cli.manifest.json")).unwrap();
    assert!(manifest.contains("\"replicas\": 20"));
}

#[test]
fn missing_config_fails() {
    let status = Command::new(env!("CARGO_BIN_EXE_epibound"))
        .args(["policy", "--config", "/nonexistent/run.toml"])
        .output()
        .unwrap();
    assert!(!status.status.success());
    assert!(String::from_utf8_lossy(&status.stderr).contains("reading"));
}

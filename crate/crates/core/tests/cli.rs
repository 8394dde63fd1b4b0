use bohmsim::cli::{RunManifest, MANIFEST_FILE};
use std::path::Path;
use std::process::Command;

fn bohmsim(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bohmsim"))
        .args(args)
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    bohmsim(args).status.code().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_config(dir.path(), "a.json", r#"{"model": {"family": "system_a"}}"#);
    let typo = write_config(
        dir.path(),
        "b.json",
        r#"{"model": {"family": "system_a"}, "integrater": {}}"#,
    );
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&["traj", "--frobnicate"]), 1);
    assert_eq!(code(&[]), 1);
    assert_eq!(
        code(&["--config", &typo, "--out", out, "traj", "--ic", "0.75,0.25"]),
        1
    );
    assert_eq!(
        code(&[
            "--config",
            "/nonexistent.json",
            "--out",
            out,
            "traj",
            "--ic",
            "0.75,0.25"
        ]),
        1
    );
    assert_eq!(
        code(&[
            "--config",
            &good,
            "--out",
            out,
            "--precision",
            "50",
            "ensemble"
        ]),
        1
    );
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn numerical_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "q.json", r#"{"model": {"family": "qubit"}}"#);
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        code(&["--config", &cfg, "--out", out, "xpoint", "--t", "0"]),
        2
    );
}

#[test]
fn trajectory_run_is_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.json", r#"{"model": {"family": "system_a"}}"#);
    let run = dir.path().join("run");
    let o = bohmsim(&[
        "--config",
        &cfg,
        "--out",
        run.to_str().unwrap(),
        "traj",
        "--ic",
        "0.75,0.25",
        "--t-end",
        "20",
        "--lcn",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest_path = run.join(MANIFEST_FILE);
    let m = RunManifest::read(&manifest_path).unwrap();
    assert_eq!(m.outputs.len(), 1);
    assert_eq!(m.outputs[0].path, "traj.csv");
    let csv = std::fs::read_to_string(run.join("traj.csv")).unwrap();
    assert!(csv.lines().next().unwrap().starts_with("t,"));
    assert_eq!(csv.lines().count(), 402);

    let again = dir.path().join("again");
    let args = [
        "--replay",
        manifest_path.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ];
    assert_eq!(code(&args), 0);

    let tampered = std::fs::read_to_string(&manifest_path)
        .unwrap()
        .replace(&m.outputs[0].sha256, &"0".repeat(64));
    std::fs::write(&manifest_path, tampered).unwrap();
    assert_eq!(code(&args), 2);
}

#[test]
fn subcommands_write_their_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_config(dir.path(), "a.json", r#"{"model": {"family": "system_a"}}"#);
    let c = write_config(dir.path(), "c.json", r#"{}"#);
    let pear = write_config(
        dir.path(),
        "p.json",
        &format!(
            r#"{{"model": {}}}"#,
            serde_json::to_string(&bohmsim::wavefunctions::ModelSpec::Superposition(
                bohmsim::wavefunctions::SuperpositionSpec::pear()
            ))
            .unwrap()
        ),
    );
    let cases: [(&str, Vec<&str>, &[&str]); 5] = [
        (
            &a,
            vec!["hopf", "--t-end", "1.5"],
            &["hopf.csv", "hopf.json"],
        ),
        (
            &a,
            vec!["xpoint"],
            &["xpoint.csv", "branches.csv", "xpoint.json"],
        ),
        (
            &a,
            vec!["nodal", "--t-end", "0.5"],
            &["nodal.csv", "nodal.json"],
        ),
        (
            &c,
            vec!["classical", "--t-end", "200", "--sections", "50"],
            &[
                "classical_lcn.csv",
                "classical_section.csv",
                "classical.json",
            ],
        ),
        (&pear, vec!["nodal-line-3d"], &["line.csv", "line.json"]),
    ];
    for (i, (cfg, sub, files)) in cases.iter().enumerate() {
        let out = dir.path().join(format!("o{i}"));
        let mut args = vec!["--config", cfg, "--out", out.to_str().unwrap()];
        args.extend(sub.iter().copied());
        let o = bohmsim(&args);
        assert!(
            o.status.success(),
            "{sub:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let m = RunManifest::read(&out.join(MANIFEST_FILE)).unwrap();
        let names: Vec<&str> = m.outputs.iter().map(|r| r.path.as_str()).collect();
        assert_eq!(names, *files, "{sub:?}");
    }
}

use std::process::Command;

fn tenbar() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tenbar"))
}

#[test]
fn run_then_summarize_and_render() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ts");
    let o = tenbar()
        .args([
            "run",
            "--algo",
            "ts",
            "--runs",
            "3",
            "--seed",
            "5",
            "--budget",
            "2000",
            "--svg",
            "--post-process",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("Best mass (kg)"));
    assert!(stdout.contains("No. runs below 2900kg threshold"));
    assert!(stdout.contains("Mass (kg)"));
    for f in [
        "summary.json",
        "summary.txt",
        "best_solution.json",
        "best_solution.svg",
        "runs/run_5.json",
        "runs/run_7.json",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }

    let o = tenbar()
        .args(["summarize", "--dir"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(
        text,
        std::fs::read_to_string(out.join("summary.txt")).unwrap()
    );

    let svg = dir.path().join("best.svg");
    let o = tenbar()
        .args(["render", "--solution"])
        .arg(out.join("best_solution.json"))
        .arg("--out")
        .arg(&svg)
        .output()
        .unwrap();
    assert!(o.status.success());
    let s = std::fs::read_to_string(svg).unwrap();
    assert!(s.starts_with("<svg") && s.matches(r#"class="member""#).count() == 10);
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| tenbar().args(args).output().unwrap().status.code();
    let out = dir.path().join("x");
    let out = out.to_str().unwrap();

    assert_eq!(code(&["run", "--algo", "ga", "--out", out]), Some(3));
    assert_eq!(
        code(&[
            "run",
            "--algo",
            "sd",
            "--problem",
            "/nonexistent.toml",
            "--out",
            out
        ]),
        Some(2)
    );
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "name = 1").unwrap();
    assert_eq!(
        code(&[
            "run",
            "--algo",
            "sd",
            "--problem",
            bad.to_str().unwrap(),
            "--out",
            out
        ]),
        Some(2)
    );
    assert_eq!(
        code(&["run", "--algo", "sd", "--runs", "0", "--out", out]),
        Some(6)
    );
    assert_eq!(
        code(&[
            "summarize",
            "--dir",
            dir.path().join("missing").to_str().unwrap()
        ]),
        Some(2)
    );
    // clap usage errors
    assert_eq!(code(&["run"]), Some(2));
}

#[test]
fn identical_seeds_give_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let o = tenbar()
            .args([
                "run", "--algo", "sa", "--runs", "2", "--budget", "1500", "--out",
            ])
            .arg(dir.path().join(sub))
            .output()
            .unwrap();
        assert!(o.status.success());
        o.stdout
    };
    assert_eq!(run("a"), run("b"));
}

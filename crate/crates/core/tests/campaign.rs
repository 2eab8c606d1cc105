use tenbar_core::campaign::{
    load_records, resummarize, run_campaign, Algorithm, CampaignConfig, SolutionFile,
};
use tenbar_core::search::RunRecord;
use tenbar_core::truss::{solve, TrussProblem};

fn small(algorithm: Algorithm, out: Option<std::path::PathBuf>) -> CampaignConfig {
    let mut c = CampaignConfig::new(algorithm);
    c.runs = 4;
    c.base_seed = 3;
    c.sd_budget = 5000;
    c.ts_budget = 3000;
    c.anneal.evaluations_total = 4000;
    c.out_dir = out;
    c.emit_svg = true;
    c.post_process = true;
    c
}

#[test]
fn artifacts_round_trip_for_every_algorithm() {
    let p = TrussProblem::canonical();
    for algo in [Algorithm::Sd, Algorithm::Ts, Algorithm::Sa] {
        let dir = tempfile::tempdir().unwrap();
        let res = run_campaign(&p, &small(algo, Some(dir.path().to_path_buf()))).unwrap();
        assert_eq!(res.records.len(), 4);
        assert_eq!(
            res.records.iter().map(|r| r.seed).collect::<Vec<_>>(),
            vec![3, 4, 5, 6]
        );

        let loaded = load_records(dir.path()).unwrap();
        assert_eq!(loaded, res.records);
        assert_eq!(resummarize(dir.path(), None).unwrap(), res.summary);
        let text = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
        assert_eq!(
            serde_json::from_str::<serde_json::Value>(&text).unwrap()["runs"],
            4
        );

        for r in &res.records {
            let ev = solve(&p, &r.best_design).unwrap();
            assert!(
                (ev.mass - r.best_mass).abs() < 0.5,
                "{algo:?} seed {}",
                r.seed
            );
            assert_eq!(ev.feasible, r.feasible);
        }
        for name in [
            "best_solution",
            "reduced_solution",
            "repaired_solution",
            "unrepaired_solution",
        ] {
            let path = dir.path().join(format!("{name}.json"));
            if !path.exists() {
                assert_ne!(name, "best_solution");
                continue;
            }
            let sol = SolutionFile::load(&path).unwrap();
            let ev = solve(&sol.problem_for(&p), &sol.design).unwrap();
            assert!((ev.mass - sol.mass).abs() < 0.5, "{name}");
            assert_eq!(ev.feasible, sol.feasible, "{name}");
            assert!(dir.path().join(format!("{name}.svg")).exists());
            assert!(dir.path().join(format!("{name}.txt")).exists());
        }
    }
}

#[test]
fn campaigns_are_deterministic_and_parallelism_free() {
    let p = TrussProblem::canonical();
    let mut a = small(Algorithm::Ts, None);
    a.workers = 1;
    let mut b = small(Algorithm::Ts, None);
    b.workers = 4;
    let ra = run_campaign(&p, &a).unwrap();
    let rb = run_campaign(&p, &b).unwrap();
    assert_eq!(ra.records, rb.records);
    assert_eq!(ra.summary, rb.summary);
}

#[test]
fn repaired_annealing_records_keep_the_raw_design() {
    let p = TrussProblem::canonical();
    let res = run_campaign(&p, &small(Algorithm::Sa, None)).unwrap();
    for r in &res.records {
        assert_eq!(r.evaluations_used, 4000);
        if let Some(raw) = &r.unrepaired {
            assert!(r.feasible);
            let ev = solve(&p, &raw.design).unwrap();
            assert!(!ev.feasible);
            assert!((ev.mass - raw.mass).abs() < 1e-6);
        }
    }
}

#[test]
fn threshold_can_be_changed_after_the_fact() {
    let p = TrussProblem::canonical();
    let dir = tempfile::tempdir().unwrap();
    let res = run_campaign(&p, &small(Algorithm::Sd, Some(dir.path().to_path_buf()))).unwrap();
    let cut = res.summary.average_mass;
    let s = resummarize(dir.path(), Some(cut)).unwrap();
    let below = res
        .records
        .iter()
        .filter(|r: &&RunRecord| r.best_mass < cut)
        .count();
    assert_eq!(s.runs_below_threshold, below);
    assert_eq!(s.threshold, cut);
}

#[test]
fn invalid_configuration_is_rejected() {
    let p = TrussProblem::canonical();
    let mut c = small(Algorithm::Sd, None);
    c.runs = 0;
    assert_eq!(run_campaign(&p, &c).unwrap_err().exit_code(), 6);
    let mut c = small(Algorithm::Sd, None);
    c.threshold = -1.0;
    assert!(run_campaign(&p, &c).is_err());
}

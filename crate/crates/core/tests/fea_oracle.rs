mod common;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tenbar_core::truss::solve;

use common::{max_rel_error, random_determinate};

#[test]
fn determinate_trusses_match_joint_equilibrium() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let t = Instant::now();
    for case_no in 0..40 {
        let case = random_determinate(&mut rng);
        let ev = solve(&case.problem, &case.design).unwrap();
        assert!(!ev.singular, "case {case_no} singular");
        let err = max_rel_error(&ev.axial_forces, &case.forces);
        assert!(err < 1e-8, "case {case_no}: force error {err:e}");
        let err = max_rel_error(&ev.stresses, &case.oracle_stresses());
        assert!(err < 1e-8, "case {case_no}: stress error {err:e}");
    }
    assert!(t.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn solver_forces_balance_every_free_node() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let case = random_determinate(&mut rng);
        let p = &case.problem;
        let ev = solve(p, &case.design).unwrap();
        let pos = case.design.node_positions(p);
        let mut residual: Vec<[f64; 2]> = p.nodes.iter().map(|n| n.applied_load()).collect();
        for (m, t) in p.members.iter().zip(&ev.axial_forces) {
            let a = p.node_index(m.ends[0]).unwrap();
            let b = p.node_index(m.ends[1]).unwrap();
            let l = (pos[b][0] - pos[a][0]).hypot(pos[b][1] - pos[a][1]);
            let e = [(pos[b][0] - pos[a][0]) / l, (pos[b][1] - pos[a][1]) / l];
            for k in 0..2 {
                residual[a][k] += t * e[k];
                residual[b][k] -= t * e[k];
            }
        }
        let scale = p
            .nodes
            .iter()
            .map(|n| n.applied_load()[0].abs().max(n.applied_load()[1].abs()))
            .fold(1.0, f64::max);
        for (n, r) in p.nodes.iter().zip(&residual) {
            if n.is_free() {
                assert!(
                    r[0].abs().max(r[1].abs()) <= 1e-9 * scale,
                    "node {} residual {r:?}",
                    n.id
                );
            }
        }
    }
}

#[test]
fn canonical_truss_is_stiff_and_balanced() {
    let p = tenbar_core::truss::TrussProblem::canonical();
    for d in [
        common::reference_ts(),
        common::reference_sd(),
        common::reference_sa_adjusted(),
    ] {
        let ev = solve(&p, &d).unwrap();
        assert!(!ev.singular);
        assert_eq!(ev.member_ids, (1..=10).collect::<Vec<_>>());
    }
}

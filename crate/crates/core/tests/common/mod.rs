//! Shared fixtures: random statically determinate trusses with a
//! method-of-joints oracle, and the reference designs for the ten-bar problem.
#![allow(dead_code)]

use rand::Rng;
use tenbar_core::truss::{DesignVector, Limits, Material, MemberSpec, NodeSpec, TrussProblem};

/// A determinate truss built by attaching each free node to two earlier
/// nodes with non-parallel bars, plus the member forces from the joints
/// oracle (tension positive, N).
pub struct DeterminateCase {
    pub problem: TrussProblem,
    pub design: DesignVector,
    pub forces: Vec<f64>,
}

impl DeterminateCase {
    pub fn oracle_stresses(&self) -> Vec<f64> {
        self.forces
            .iter()
            .zip(&self.design.areas)
            .map(|(f, a)| f / a)
            .collect()
    }
}

/// Builds a random determinate truss with two supports and 1..=4 free nodes.
/// Every other free node is movable, so its position comes from the design
/// vector rather than the node table.
pub fn random_determinate<R: Rng>(rng: &mut R) -> DeterminateCase {
    let free = rng.gen_range(1..=4usize);
    let mut pos: Vec<[f64; 2]> = vec![[0.0, 0.0], [0.0, rng.gen_range(200.0..800.0)]];
    let mut links: Vec<(usize, usize)> = Vec::new();
    let mut loads: Vec<[f64; 2]> = vec![[0.0, 0.0]; 2];
    for _ in 0..free {
        let k = pos.len();
        loop {
            let a = rng.gen_range(0..k);
            let mut b = rng.gen_range(0..k);
            while b == a {
                b = rng.gen_range(0..k);
            }
            let p = [
                rng.gen_range(-1000.0..2000.0),
                rng.gen_range(-1000.0..1000.0),
            ];
            let ea = unit(p, pos[a]);
            let eb = unit(p, pos[b]);
            let far = pos.iter().all(|q| dist(*q, p) > 100.0);
            if far && (ea[0] * eb[1] - ea[1] * eb[0]).abs() > 0.4 {
                pos.push(p);
                links.push((a, b));
                break;
            }
        }
        loads.push(if rng.gen_bool(0.75) {
            [rng.gen_range(-1e5..1e5), rng.gen_range(-1e5..1e5)]
        } else {
            [0.0, 0.0]
        });
    }

    // Members: node k (k >= 2) gets members 2(k-2)+1 and 2(k-2)+2.
    let mut members = Vec::new();
    for (j, &(a, b)) in links.iter().enumerate() {
        let k = j + 2;
        members.push(MemberSpec::new(
            2 * j as u32 + 1,
            k as u32 + 1,
            a as u32 + 1,
        ));
        members.push(MemberSpec::new(
            2 * j as u32 + 2,
            k as u32 + 1,
            b as u32 + 1,
        ));
    }
    let mut nodes = vec![
        NodeSpec::support(1, pos[0][0], pos[0][1]),
        NodeSpec::support(2, pos[1][0], pos[1][1]),
    ];
    let mut coords = Vec::new();
    for k in 2..pos.len() {
        let id = k as u32 + 1;
        if k % 2 == 1 {
            // Movable nodes cannot carry load.
            loads[k] = [0.0, 0.0];
            nodes.push(NodeSpec::movable(
                id,
                0.0,
                0.0,
                [-5000.0, 5000.0],
                [-5000.0, 5000.0],
            ));
            coords.extend_from_slice(&pos[k]);
        } else {
            nodes.push(NodeSpec::loaded(id, pos[k][0], pos[k][1], loads[k]));
        }
    }
    if loads.iter().all(|l| *l == [0.0, 0.0]) {
        let k = pos.len() - 1;
        if k.is_multiple_of(2) {
            loads[k] = [3e4, -2e4];
            nodes[k] = NodeSpec::loaded(k as u32 + 1, pos[k][0], pos[k][1], loads[k]);
        }
    }
    let areas: Vec<f64> = (0..members.len())
        .map(|_| rng.gen_range(1.0..100.0))
        .collect();
    let problem = TrussProblem::new(
        "determinate",
        Material::default(),
        Limits::default(),
        nodes,
        members,
    )
    .expect("generated truss is valid");

    // Method of joints, peeling nodes off in reverse order of attachment.
    let mut ext = loads.clone();
    let mut forces = vec![0.0; 2 * links.len()];
    for (j, &(a, b)) in links.iter().enumerate().rev() {
        let k = j + 2;
        let ea = unit(pos[k], pos[a]);
        let eb = unit(pos[k], pos[b]);
        // ta * ea + tb * eb = -F
        let det = ea[0] * eb[1] - ea[1] * eb[0];
        let f = ext[k];
        let ta = (-f[0] * eb[1] + f[1] * eb[0]) / det;
        let tb = (-ea[0] * f[1] + ea[1] * f[0]) / det;
        forces[2 * j] = ta;
        forces[2 * j + 1] = tb;
        for (n, t, e) in [(a, ta, ea), (b, tb, eb)] {
            ext[n][0] -= t * e[0];
            ext[n][1] -= t * e[1];
        }
    }
    DeterminateCase {
        problem,
        design: DesignVector::new(coords, areas),
        forces,
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn unit(from: [f64; 2], to: [f64; 2]) -> [f64; 2] {
    let l = dist(from, to);
    [(to[0] - from[0]) / l, (to[1] - from[1]) / l]
}

/// Largest `|a - b|` relative to the largest `|b|`.
pub fn max_rel_error(a: &[f64], b: &[f64]) -> f64 {
    let scale = b
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale
}

fn design(coords: [f64; 6], areas: [f64; 10]) -> DesignVector {
    DesignVector::new(coords.to_vec(), areas.to_vec())
}

/// Reference steepest-descent design (reference mass 2299 kg).
pub fn reference_sd() -> DesignVector {
    design(
        [488.0, 89.0, 840.0, 581.0, 1436.0, -44.0],
        [
            59.71, 28.17, 204.14, 0.01, 132.31, 125.66, 0.01, 145.94, 374.43, 42.52,
        ],
    )
}

/// Reference tabu-search design (reference mass 1598 kg).
pub fn reference_ts() -> DesignVector {
    design(
        [445.0, -61.0, 807.0, 408.0, 1197.0, -112.0],
        [
            60.39, 16.6, 183.17, 0.01, 239.9, 3.04, 0.01, 1.42, 310.26, 47.9,
        ],
    )
}

/// Reference best-feasible annealing design (reference mass 1526 kg).
pub fn reference_sa() -> DesignVector {
    design(
        [568.0, -151.0, -13.0, 920.0, 1252.0, -176.0],
        [
            65.29, 22.92, 242.63, 0.01, 193.82, 13.78, 0.19, 0.01, 259.65, 35.66,
        ],
    )
}

/// Reference adjusted annealing design (reference mass 1491 kg).
pub fn reference_sa_adjusted() -> DesignVector {
    design(
        [612.0, -92.0, 93.0, 850.0, 1259.0, -96.0],
        [
            61.36, 11.64, 252.61, 0.01, 202.02, 8.05, 0.01, 0.74, 251.89, 43.47,
        ],
    )
}

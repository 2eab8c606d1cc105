use serde::{Deserialize, Serialize};

use super::{Assessment, GridPoint};
use crate::truss::{DesignVector, FamilyTotals};

/// Result of one search run on any [`Objective`](super::Objective).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best: GridPoint,
    pub best_assessment: Assessment,
    pub evaluations_used: u64,
    /// Evaluation index at which `best` was first seen.
    pub evaluations_to_best: u64,
    pub budget_exhausted: bool,
    pub trace: Option<Vec<(u64, f64)>>,
}

impl SearchOutcome {
    pub fn feasible(&self) -> bool {
        self.best_assessment.feasible()
    }
}

/// The raw search result when a record holds a repaired design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unrepaired {
    pub design: DesignVector,
    pub mass: f64,
    pub violation: FamilyTotals,
}

/// One seeded run on a truss problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub seed: u64,
    pub best_design: DesignVector,
    pub best_mass: f64,
    pub evaluations_used: u64,
    pub evaluations_to_best: u64,
    pub feasible: bool,
    pub violation: FamilyTotals,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unrepaired: Option<Unrepaired>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<(u64, f64)>>,
}

/// The statistics block of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub runs: usize,
    pub best_mass: f64,
    pub worst_mass: f64,
    pub average_mass: f64,
    pub stddev_mass: f64,
    pub best_mass_evals: u64,
    pub worst_mass_evals: u64,
    pub lowest_evals: u64,
    pub highest_evals: u64,
    pub average_evals: f64,
    pub runs_below_threshold: usize,
    pub threshold: f64,
}

impl RunSummary {
    /// Rows as labelled in the comparison table, in table order.
    pub fn rows(&self) -> Vec<(String, String)> {
        vec![
            ("Best mass (kg)".into(), format!("{:.1}", self.best_mass)),
            ("Best mass evals".into(), self.best_mass_evals.to_string()),
            ("Worst mass (kg)".into(), format!("{:.1}", self.worst_mass)),
            ("Worst mass evals".into(), self.worst_mass_evals.to_string()),
            (
                "Average mass (kg)".into(),
                format!("{:.1}", self.average_mass),
            ),
            (
                "Std. Dev. of mass (kg)".into(),
                format!("{:.1}", self.stddev_mass),
            ),
            ("Lowest evals".into(), self.lowest_evals.to_string()),
            ("Highest evals".into(), self.highest_evals.to_string()),
            ("Average evals".into(), format!("{:.0}", self.average_evals)),
            (
                format!(
                    "No. runs below {}kg threshold",
                    fmt_threshold(self.threshold)
                ),
                format!("{}/{}", self.runs_below_threshold, self.runs),
            ),
        ]
    }
}

fn fmt_threshold(t: f64) -> String {
    if t.fract() == 0.0 {
        format!("{t:.0}")
    } else {
        format!("{t}")
    }
}

/// Table statistics over a non-empty set of runs. Standard deviation uses the
/// n − 1 convention and is 0 for a single run. Ties for best or worst mass
/// resolve to the earliest run.
pub fn summarize(runs: &[RunRecord], threshold: f64) -> Option<RunSummary> {
    let first = runs.first()?;
    let n = runs.len();
    let mut best = first;
    let mut worst = first;
    for r in runs {
        if r.best_mass < best.best_mass {
            best = r;
        }
        if r.best_mass > worst.best_mass {
            worst = r;
        }
    }
    let average_mass = runs.iter().map(|r| r.best_mass).sum::<f64>() / n as f64;
    let stddev_mass = if n > 1 {
        (runs
            .iter()
            .map(|r| (r.best_mass - average_mass).powi(2))
            .sum::<f64>()
            / (n - 1) as f64)
            .sqrt()
    } else {
        0.0
    };
    let evals = runs.iter().map(|r| r.evaluations_used);
    Some(RunSummary {
        runs: n,
        best_mass: best.best_mass,
        worst_mass: worst.best_mass,
        average_mass,
        stddev_mass,
        best_mass_evals: best.evaluations_used,
        worst_mass_evals: worst.evaluations_used,
        lowest_evals: evals.clone().min().unwrap_or(0),
        highest_evals: evals.clone().max().unwrap_or(0),
        average_evals: evals.map(|e| e as f64).sum::<f64>() / n as f64,
        runs_below_threshold: runs.iter().filter(|r| r.best_mass < threshold).count(),
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(mass: f64, evals: u64) -> RunRecord {
        RunRecord {
            algorithm: "sd".into(),
            seed: 0,
            best_design: DesignVector::new(vec![], vec![]),
            best_mass: mass,
            evaluations_used: evals,
            evaluations_to_best: evals,
            feasible: true,
            violation: FamilyTotals::default(),
            unrepaired: None,
            trace: None,
        }
    }

    #[test]
    fn hand_arithmetic() {
        let s = summarize(&[rec(1.0, 10), rec(2.0, 30), rec(3.0, 20)], 2.5).unwrap();
        assert_eq!(s.average_mass, 2.0);
        assert_eq!(s.stddev_mass, 1.0);
        assert_eq!(s.best_mass_evals, 10);
        assert_eq!(s.worst_mass_evals, 20);
        assert_eq!(s.lowest_evals, 10);
        assert_eq!(s.highest_evals, 30);
        assert_eq!(s.average_evals, 20.0);
        assert_eq!(s.runs_below_threshold, 2);
        let rows = s.rows();
        assert_eq!(rows[0].0, "Best mass (kg)");
        assert_eq!(rows[9].0, "No. runs below 2.5kg threshold");
        assert_eq!(rows[9].1, "2/3");
    }

    #[test]
    fn single_run() {
        let s = summarize(&[rec(5.0, 1)], 2900.0).unwrap();
        assert_eq!(s.stddev_mass, 0.0);
        assert_eq!(s.best_mass, s.worst_mass);
    }

    #[test]
    fn all_below_threshold() {
        let runs: Vec<_> = (0..10)
            .map(|i| rec(1500.0 + 100.0 * i as f64, 34_000))
            .collect();
        assert_eq!(summarize(&runs, 2900.0).unwrap().runs_below_threshold, 10);
        assert!(summarize(&[], 2900.0).is_none());
    }
}

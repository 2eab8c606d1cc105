use serde::{Deserialize, Serialize};

use crate::truss::{TrussProblem, VariableKind};

/// What a grid axis represents. Only move scales depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisKind {
    #[default]
    Coordinate,
    Area,
}

/// A design expressed in integer multiples of each variable's resolution.
/// Equality is exact, which is what tabu membership relies on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridPoint(pub Vec<i64>);

impl GridPoint {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for GridPoint {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

/// Bounds and resolutions of a quantized search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpace {
    pub names: Vec<String>,
    pub resolution: Vec<f64>,
    /// Inclusive lower bound, in resolution units.
    pub lo: Vec<i64>,
    /// Inclusive upper bound, in resolution units.
    pub hi: Vec<i64>,
    pub kinds: Vec<AxisKind>,
}

impl GridSpace {
    /// Builds a space from real-valued bounds; bounds are shrunk inward to the
    /// nearest grid value.
    pub fn new(names: Vec<String>, resolution: Vec<f64>, bounds: &[(f64, f64)]) -> Self {
        let (lo, hi) = bounds
            .iter()
            .zip(&resolution)
            .map(|(&(l, h), &r)| ((l / r - 1e-9).ceil() as i64, (h / r + 1e-9).floor() as i64))
            .unzip();
        let kinds = vec![AxisKind::Coordinate; names.len()];
        Self {
            names,
            resolution,
            lo,
            hi,
            kinds,
        }
    }

    pub fn for_problem(problem: &TrussProblem) -> Self {
        let vars = problem.variables();
        let names = vars.iter().map(|v| v.name.clone()).collect();
        let res = vars.iter().map(|v| v.resolution).collect();
        let bounds: Vec<_> = vars.iter().map(|v| v.bounds).collect();
        let mut space = Self::new(names, res, &bounds);
        space.kinds = vars
            .iter()
            .map(|v| match v.kind {
                VariableKind::Area(_) => AxisKind::Area,
                _ => AxisKind::Coordinate,
            })
            .collect();
        space
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn range(&self, i: usize) -> i64 {
        self.hi[i] - self.lo[i]
    }

    pub fn clip(&self, i: usize, u: i64) -> i64 {
        u.clamp(self.lo[i], self.hi[i])
    }

    pub fn contains(&self, p: &GridPoint) -> bool {
        p.len() == self.dim() && (0..self.dim()).all(|i| p[i] >= self.lo[i] && p[i] <= self.hi[i])
    }

    /// Nearest grid point to real values, clipped to bounds.
    pub fn snap(&self, values: &[f64]) -> GridPoint {
        GridPoint(
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| self.clip(i, (v / self.resolution[i]).round() as i64))
                .collect(),
        )
    }

    pub fn value(&self, i: usize, u: i64) -> f64 {
        u as f64 * self.resolution[i]
    }

    pub fn values(&self, p: &GridPoint) -> Vec<f64> {
        p.0.iter()
            .enumerate()
            .map(|(i, &u)| self.value(i, u))
            .collect()
    }

    /// A space of identical axes, handy for test objectives.
    pub fn uniform(dim: usize, resolution: f64, lo: f64, hi: f64) -> Self {
        Self::new(
            (0..dim).map(|i| format!("v{i}")).collect(),
            vec![resolution; dim],
            &vec![(lo, hi); dim],
        )
    }
}

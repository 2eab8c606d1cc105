use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Material;
use crate::error::{IoError, TrussError};

/// Role of a node in the structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    /// Both translations fixed.
    Support,
    /// Free to displace, carries the applied load, position not a design variable.
    Loaded,
    /// Free to displace, position is a design variable.
    Movable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: u32,
    /// Base position in cm. For movable nodes this is only the drawing default.
    pub x: f64,
    pub y: f64,
    pub kind: NodeKind,
    /// Applied load (Fx, Fy) in N.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load: Option<[f64; 2]>,
    /// Bounds on x for movable nodes, cm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_bounds: Option<[f64; 2]>,
    /// Bounds on y for movable nodes, cm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_bounds: Option<[f64; 2]>,
}

impl NodeSpec {
    pub fn support(id: u32, x: f64, y: f64) -> Self {
        Self {
            id,
            x,
            y,
            kind: NodeKind::Support,
            load: None,
            x_bounds: None,
            y_bounds: None,
        }
    }

    pub fn loaded(id: u32, x: f64, y: f64, load: [f64; 2]) -> Self {
        Self {
            kind: NodeKind::Loaded,
            load: Some(load),
            ..Self::support(id, x, y)
        }
    }

    pub fn movable(id: u32, x: f64, y: f64, x_bounds: [f64; 2], y_bounds: [f64; 2]) -> Self {
        Self {
            kind: NodeKind::Movable,
            x_bounds: Some(x_bounds),
            y_bounds: Some(y_bounds),
            ..Self::support(id, x, y)
        }
    }

    pub fn applied_load(&self) -> [f64; 2] {
        self.load.unwrap_or([0.0, 0.0])
    }

    pub fn is_free(&self) -> bool {
        self.kind != NodeKind::Support
    }
}

/// Member connectivity. Areas live in the design vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberSpec {
    pub id: u32,
    pub ends: [u32; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area_bounds: Option<[f64; 2]>,
}

impl MemberSpec {
    pub fn new(id: u32, a: u32, b: u32) -> Self {
        Self {
            id,
            ends: [a, b],
            area_bounds: None,
        }
    }

    pub fn connects(&self, a: u32, b: u32) -> bool {
        (self.ends[0] == a && self.ends[1] == b) || (self.ends[0] == b && self.ends[1] == a)
    }
}

/// Constraint limits and variable resolutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    /// Minimum member length, cm.
    pub min_member_length: f64,
    /// Move granularity of nodal coordinates, cm.
    pub coordinate_resolution: f64,
    /// Move granularity of areas, cm².
    pub area_resolution: f64,
    /// Smallest admissible area, cm².
    pub area_min: f64,
    /// Default upper bound on areas, cm².
    pub area_max: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            min_member_length: 15.0,
            coordinate_resolution: 1.0,
            area_resolution: 0.01,
            area_min: 0.01,
            area_max: 500.0,
        }
    }
}

/// Which physical quantity a design variable controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariableKind {
    X(u32),
    Y(u32),
    Area(u32),
}

/// One entry of the design-variable layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VariableKind,
    pub bounds: (f64, f64),
    pub resolution: f64,
}

/// A parametric pin-jointed truss: geometry, supports, loads, material,
/// limits and variable bounds.
///
/// Design variables are laid out as the (x, y) pairs of every movable node in
/// ascending id order, followed by the area of every member in ascending id
/// order. For the canonical ten-bar problem that gives
/// `x2, y2, x5, y5, x6, y6, A1 .. A10`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrussProblem {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub material: Material,
    #[serde(default)]
    pub limits: Limits,
    pub nodes: Vec<NodeSpec>,
    pub members: Vec<MemberSpec>,
}

/// The canonical problem definition, shipped with the crate.
pub const CANONICAL_PROBLEM_TOML: &str = include_str!("../../../../problems/ten_bar.toml");

impl TrussProblem {
    /// Builds and validates a problem. Nodes and members are sorted by id.
    pub fn new(
        name: impl Into<String>,
        material: Material,
        limits: Limits,
        mut nodes: Vec<NodeSpec>,
        mut members: Vec<MemberSpec>,
    ) -> Result<Self, TrussError> {
        nodes.sort_by_key(|n| n.id);
        members.sort_by_key(|m| m.id);
        let p = Self {
            name: name.into(),
            material,
            limits,
            nodes,
            members,
        };
        p.validate()?;
        Ok(p)
    }

    /// The calibrated ten-bar problem.
    pub fn canonical() -> Self {
        Self::from_toml_str(CANONICAL_PROBLEM_TOML).expect("shipped problem file is valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self, TrussError> {
        let p: TrussProblem =
            toml::from_str(text).map_err(|e| TrussError::InvalidProblem(e.to_string()))?;
        Self::new(p.name, p.material, p.limits, p.nodes, p.members)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IoError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            TrussError::InvalidProblem(message) => IoError::Parse {
                path: path.display().to_string(),
                message,
            },
            other => IoError::Truss(other),
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("problem serializes")
    }

    pub fn validate(&self) -> Result<(), TrussError> {
        let bad = |m: String| Err(TrussError::InvalidProblem(m));
        self.material.validate()?;
        let l = &self.limits;
        for (name, v) in [
            ("coordinate_resolution", l.coordinate_resolution),
            ("area_resolution", l.area_resolution),
            ("area_min", l.area_min),
            ("area_max", l.area_max),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive"));
            }
        }
        if l.min_member_length < 0.0 || l.area_max < l.area_min {
            return bad("inconsistent limits".into());
        }
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id) {
                return bad(format!("duplicate node id {}", n.id));
            }
            match n.kind {
                NodeKind::Movable => {
                    if n.load.is_some_and(|f| f != [0.0, 0.0]) {
                        return bad(format!("movable node {} carries a load", n.id));
                    }
                    for b in [n.x_bounds, n.y_bounds] {
                        match b {
                            Some([lo, hi]) if lo <= hi => {}
                            _ => return bad(format!("movable node {} needs x/y bounds", n.id)),
                        }
                    }
                }
                NodeKind::Support => {
                    if n.load.is_some_and(|f| f != [0.0, 0.0]) {
                        return bad(format!("support node {} carries a load", n.id));
                    }
                }
                NodeKind::Loaded => {}
            }
        }
        if !self.nodes.iter().any(|n| n.kind == NodeKind::Support) {
            return bad("no support nodes".into());
        }
        let mut mids = BTreeSet::new();
        for m in &self.members {
            if !mids.insert(m.id) {
                return bad(format!("duplicate member id {}", m.id));
            }
            if m.ends[0] == m.ends[1] {
                return bad(format!(
                    "member {} connects node {} to itself",
                    m.id, m.ends[0]
                ));
            }
            for e in m.ends {
                if !ids.contains(&e) {
                    return Err(TrussError::UnknownNode(e));
                }
            }
            if let Some([lo, hi]) = m.area_bounds {
                if !(lo >= l.area_min && lo <= hi) {
                    return bad(format!("member {} has invalid area bounds", m.id));
                }
            }
        }
        if !self.is_connected() {
            return bad("member graph is not connected".into());
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let Some(first) = self.nodes.first() else {
            return false;
        };
        let mut adj: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for m in &self.members {
            adj.entry(m.ends[0]).or_default().push(m.ends[1]);
            adj.entry(m.ends[1]).or_default().push(m.ends[0]);
        }
        let mut seen = BTreeSet::from([first.id]);
        let mut stack = vec![first.id];
        while let Some(n) = stack.pop() {
            for &k in adj.get(&n).into_iter().flatten() {
                if seen.insert(k) {
                    stack.push(k);
                }
            }
        }
        seen.len() == self.nodes.len()
    }

    pub fn node(&self, id: u32) -> Result<&NodeSpec, TrussError> {
        self.nodes
            .iter()
            .find(|n| n.id == id)
            .ok_or(TrussError::UnknownNode(id))
    }

    pub fn node_index(&self, id: u32) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn member(&self, id: u32) -> Result<&MemberSpec, TrussError> {
        self.members
            .iter()
            .find(|m| m.id == id)
            .ok_or(TrussError::UnknownMember(id))
    }

    pub fn member_index(&self, id: u32) -> Option<usize> {
        self.members.iter().position(|m| m.id == id)
    }

    pub fn movable_nodes(&self) -> impl Iterator<Item = &NodeSpec> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Movable)
    }

    pub fn num_movable(&self) -> usize {
        self.movable_nodes().count()
    }

    pub fn num_variables(&self) -> usize {
        2 * self.num_movable() + self.members.len()
    }

    pub fn area_bounds(&self, member: &MemberSpec) -> (f64, f64) {
        match member.area_bounds {
            Some([lo, hi]) => (lo, hi),
            None => (self.limits.area_min, self.limits.area_max),
        }
    }

    /// The design-variable layout.
    pub fn variables(&self) -> Vec<Variable> {
        let mut out = Vec::with_capacity(self.num_variables());
        let cres = self.limits.coordinate_resolution;
        for n in self.movable_nodes() {
            let [xl, xh] = n.x_bounds.expect("validated");
            let [yl, yh] = n.y_bounds.expect("validated");
            out.push(Variable {
                name: format!("x{}", n.id),
                kind: VariableKind::X(n.id),
                bounds: (xl, xh),
                resolution: cres,
            });
            out.push(Variable {
                name: format!("y{}", n.id),
                kind: VariableKind::Y(n.id),
                bounds: (yl, yh),
                resolution: cres,
            });
        }
        for m in &self.members {
            out.push(Variable {
                name: format!("A{}", m.id),
                kind: VariableKind::Area(m.id),
                bounds: self.area_bounds(m),
                resolution: self.limits.area_resolution,
            });
        }
        out
    }

    /// Copy of the problem without the listed members.
    pub fn without_members(&self, ids: &[u32]) -> Self {
        let mut p = self.clone();
        p.members.retain(|m| !ids.contains(&m.id));
        p
    }

    /// Number of free translational degrees of freedom.
    pub fn num_dofs(&self) -> usize {
        2 * self.nodes.iter().filter(|n| n.is_free()).count()
    }
}

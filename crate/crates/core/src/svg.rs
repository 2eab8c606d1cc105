//! Plain SVG drawings of truss designs.

use std::fmt::Write;

use crate::truss::{mass, member_length, DesignVector, NodeKind, TrussProblem};
use crate::TrussError;

/// Stroke width per square root of cm² of member area, in px.
pub const STROKE_PER_SQRT_AREA: f64 = 0.6;

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 60.0;

/// Extra text drawn on the figure.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Annotations {
    pub title: Option<String>,
    /// Overrides the computed mass label.
    pub mass_label: Option<String>,
}

/// Draws nodes, members (stroke width ∝ √area), supports, loads and a mass
/// label. Output is byte-identical for identical inputs.
pub fn render_svg(
    problem: &TrussProblem,
    design: &DesignVector,
    annotations: &Annotations,
) -> Result<String, TrussError> {
    design.check_shape(problem)?;
    for m in &problem.members {
        member_length(problem, design, m.id)?;
    }
    let pos = design.node_positions(problem);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &pos {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let span = (x1 - x0).max(y1 - y0).max(1.0);
    let scale = (WIDTH - 2.0 * MARGIN) / span;
    let height = (y1 - y0) * scale + 2.0 * MARGIN + 30.0;
    let tx = |x: f64| MARGIN + (x - x0) * scale;
    let ty = |y: f64| MARGIN + (y1 - y) * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}">"#
    );
    s.push_str(
        r#"<defs><marker id="arrow" markerWidth="10" markerHeight="10" refX="8" refY="5" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="crimson"/></marker></defs>"#,
    );
    s.push('\n');
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if let Some(t) = &annotations.title {
        let _ = writeln!(
            s,
            r#"<text x="{MARGIN:.0}" y="24" font-family="sans-serif" font-size="16">{}</text>"#,
            escape(t)
        );
    }
    for (m, a) in problem.members.iter().zip(&design.areas) {
        let pa = pos[problem.node_index(m.ends[0]).expect("validated")];
        let pb = pos[problem.node_index(m.ends[1]).expect("validated")];
        let _ = writeln!(
            s,
            r#"<line class="member" data-id="{}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue" stroke-width="{:.3}" stroke-linecap="round"/>"#,
            m.id,
            tx(pa[0]),
            ty(pa[1]),
            tx(pb[0]),
            ty(pb[1]),
            STROKE_PER_SQRT_AREA * a.sqrt()
        );
    }
    for (n, p) in problem.nodes.iter().zip(&pos) {
        let (x, y) = (tx(p[0]), ty(p[1]));
        if n.kind == NodeKind::Support {
            let _ = writeln!(
                s,
                r#"<path class="support" d="M{x:.2},{y:.2} L{:.2},{:.2} L{:.2},{:.2} z" fill="none" stroke="black"/>"#,
                x - 10.0,
                y + 16.0,
                x + 10.0,
                y + 16.0
            );
        }
        let [fx, fy] = n.applied_load();
        let f = fx.hypot(fy);
        if f > 0.0 {
            let len = 50.0;
            let _ = writeln!(
                s,
                r#"<line class="load" x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{:.2}" stroke="crimson" stroke-width="2" marker-end="url(#arrow)"/>"#,
                x + len * fx / f,
                y - len * fy / f
            );
        }
        let _ = writeln!(
            s,
            r#"<circle class="node" data-id="{}" cx="{x:.2}" cy="{y:.2}" r="4" fill="black"/>"#,
            n.id
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{}</text>"#,
            x + 6.0,
            y - 6.0,
            n.id
        );
    }
    let label = match &annotations.mass_label {
        Some(l) => l.clone(),
        None => format!("Mass {:.1} kg", mass(problem, design)?),
    };
    let _ = writeln!(
        s,
        r#"<text class="mass" x="{MARGIN:.0}" y="{:.0}" font-family="sans-serif" font-size="14">{}</text>"#,
        height - 12.0,
        escape(&label)
    );
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

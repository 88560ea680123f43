use std::collections::BTreeSet;

use orbit_index::surface::{BoundaryCurve, GridCell, SurfaceKind};
use svg::node::element::{Group, Polyline, Rectangle, Text};
use svg::Document;

/// Cell colours, indexed by ι₁ mod 8.
pub const PALETTE: [&str; 8] = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7"];
const INADMISSIBLE: &str = "#e8e8e8";

const PLOT: f64 = 600.0;
const MARGIN: f64 = 60.0;
const LEGEND_W: f64 = 140.0;

pub struct MapSpec {
    pub surface: SurfaceKind,
    pub xi_range: (f64, f64),
    pub alpha_range: (f64, f64),
    pub nx: usize,
    pub na: usize,
}

pub fn colour(index: i64) -> &'static str {
    PALETTE[index.rem_euclid(PALETTE.len() as i64) as usize]
}

fn text(x: f64, y: f64, s: impl Into<String>) -> Text {
    Text::new(s.into()).set("x", x).set("y", y).set("font-family", "sans-serif").set("font-size", 13)
}

/// Index map: one rectangle per grid cell, α increasing upward, with the
/// separatrix polylines on top and a legend of the indices present.
pub fn render(spec: &MapSpec, cells: &[GridCell], curves: &[BoundaryCurve]) -> String {
    let (x0, x1) = spec.xi_range;
    let (a0, a1) = spec.alpha_range;
    let px = |xi: f64| MARGIN + (xi - x0) / (x1 - x0) * PLOT;
    let py = |al: f64| MARGIN + (a1 - al) / (a1 - a0) * PLOT;
    let (cw, ch) = (PLOT / spec.nx as f64, PLOT / spec.na as f64);

    let mut grid = Group::new().set("shape-rendering", "crispEdges");
    let mut present = BTreeSet::new();
    for (i, c) in cells.iter().enumerate() {
        let (ia, ix) = (i / spec.nx, i % spec.nx);
        let fill = match &c.label {
            Some(l) => {
                present.insert(l.index);
                colour(l.index)
            }
            None => INADMISSIBLE,
        };
        grid = grid.add(
            Rectangle::new()
                .set("x", MARGIN + ix as f64 * cw)
                .set("y", MARGIN + (spec.na - 1 - ia) as f64 * ch)
                .set("width", cw)
                .set("height", ch)
                .set("fill", fill),
        );
    }

    let mut lines = Group::new().set("fill", "none").set("stroke", "black").set("stroke-width", 1.5);
    for curve in curves {
        let pts: Vec<String> = curve.points.iter().map(|[x, a]| format!("{:.3},{:.3}", px(*x), py(*a))).collect();
        lines = lines.add(Polyline::new().set("points", pts.join(" ")).set("data-curve", curve.name.as_str()));
    }

    let frame = Rectangle::new()
        .set("x", MARGIN)
        .set("y", MARGIN)
        .set("width", PLOT)
        .set("height", PLOT)
        .set("fill", "none")
        .set("stroke", "black");

    let bottom = MARGIN + PLOT;
    let mut axes = Group::new()
        .add(text(MARGIN, bottom + 20.0, format!("{x0}")))
        .add(text(MARGIN + PLOT - 30.0, bottom + 20.0, format!("{x1}")))
        .add(text(MARGIN + PLOT / 2.0, bottom + 40.0, "ξ"))
        .add(text(8.0, bottom, format!("{a0}")))
        .add(text(8.0, MARGIN + 12.0, format!("{a1}")))
        .add(text(20.0, MARGIN + PLOT / 2.0, "α"));
    axes = axes.add(text(MARGIN, MARGIN - 20.0, format!("{} index map", spec.surface)));

    let lx = MARGIN + PLOT + 20.0;
    let mut legend = Group::new().add(text(lx, MARGIN + 12.0, "ι₁"));
    for (row, idx) in present.iter().enumerate() {
        let y = MARGIN + 24.0 + row as f64 * 22.0;
        legend = legend
            .add(Rectangle::new().set("x", lx).set("y", y).set("width", 16).set("height", 16).set("fill", colour(*idx)))
            .add(text(lx + 24.0, y + 13.0, format!("{idx}")));
    }

    let width = MARGIN * 2.0 + PLOT + LEGEND_W;
    let height = MARGIN * 2.0 + PLOT;
    Document::new()
        .set("width", width)
        .set("height", height)
        .set("viewBox", (0, 0, width, height))
        .add(Rectangle::new().set("width", "100%").set("height", "100%").set("fill", "white"))
        .add(grid)
        .add(lines)
        .add(frame)
        .add(axes)
        .add(legend)
        .to_string()
}

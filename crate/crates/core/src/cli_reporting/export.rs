//! Text renderings: SVG drawings of graphs, CSV orbit tables.

use std::fmt::Write as _;

use crate::exact_geometry::{format_rational, to_f64, Point};
use crate::graph_catalog::PlanarGraph;
use crate::map_engine::{apply, primary_piece, MapParams, OrbitReport};

const VIEW: f64 = 640.0;
const MARGIN: f64 = 40.0;

/// Maps plane coordinates into the SVG viewport. Fixed per bounding box,
/// with y pointing up.
struct Viewport {
    x0: f64,
    y1: f64,
    scale: f64,
}

impl Viewport {
    fn new(g: &PlanarGraph) -> Viewport {
        let (x0, y0, x1, y1) = match g.bounding_box() {
            Some((a, b, c, d)) => (to_f64(&a), to_f64(&b), to_f64(&c), to_f64(&d)),
            None => (-1.0, -1.0, 1.0, 1.0),
        };
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        let pad = span * 0.05;
        Viewport { x0: x0 - pad, y1: y1 + pad, scale: (VIEW - 2.0 * MARGIN) / (span + 2.0 * pad) }
    }

    fn map(&self, p: &Point) -> (f64, f64) {
        let (x, y) = p.to_f64();
        (MARGIN + (x - self.x0) * self.scale, MARGIN + (self.y1 - y) * self.scale)
    }
}

/// SVG drawing of a graph: plateaus in red, other edges in black, isolated
/// points as hollow circles, named vertices labeled.
pub fn graph_svg(g: &PlanarGraph, title: &str) -> String {
    let vp = Viewport::new(g);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{VIEW}" height="{VIEW}" viewBox="0 0 {VIEW} {VIEW}">"#
    );
    let _ = writeln!(s, "  <title>{}</title>", escape(title));
    let _ = writeln!(s, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    let origin = vp.map(&Point::from_ints(0, 0));
    let _ = writeln!(
        s,
        r##"  <g stroke="#bbb" stroke-width="0.5"><line x1="0" y1="{oy:.3}" x2="{VIEW}" y2="{oy:.3}"/><line x1="{ox:.3}" y1="0" x2="{ox:.3}" y2="{VIEW}"/></g>"##,
        ox = origin.0,
        oy = origin.1
    );
    let plateaus = g.plateaus();
    for seg in g.edges() {
        let (a, b) = (vp.map(&seg.p), vp.map(&seg.q));
        let colour = if plateaus.contains(&seg) { "#c0392b" } else { "black" };
        let _ = writeln!(
            s,
            r#"  <line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{colour}" stroke-width="1.5"/>"#,
            a.0, a.1, b.0, b.1
        );
    }
    for p in g.isolated() {
        let (x, y) = vp.map(p);
        let _ = writeln!(s, r#"  <circle cx="{x:.3}" cy="{y:.3}" r="3" fill="none" stroke="black"/>"#);
    }
    for (p, name) in g.labels() {
        let (x, y) = vp.map(p);
        let _ = writeln!(s, r#"  <circle cx="{x:.3}" cy="{y:.3}" r="1.5"/>"#);
        let _ = writeln!(
            s,
            r#"  <text x="{:.3}" y="{:.3}" font-size="10" font-family="sans-serif">{}</text>"#,
            x + 3.0,
            y - 3.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// `iter,x,y,quadrant` rows: the transient and one pass of the cycle when
/// decided, otherwise the first `limit` iterates.
pub fn orbit_csv(params: &MapParams, rep: &OrbitReport, limit: usize) -> String {
    let rows = if rep.is_decided() { rep.preperiod + rep.cycle.len() } else { limit };
    let mut s = String::from("iter,x,y,quadrant\n");
    let mut p = rep.start.clone();
    for i in 0..=rows {
        let (piece, on_axis) = primary_piece(&p);
        let q = if on_axis { format!("{piece}*") } else { piece.to_string() };
        let _ = writeln!(s, "{i},{},{},{q}", format_rational(&p.x), format_rational(&p.y));
        p = apply(params, &p);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_geometry::{int, Segment};
    use crate::map_engine::classify_orbit;

    #[test]
    fn svg_has_one_line_per_edge() {
        let seg = Segment::new(Point::from_ints(0, 0), Point::from_ints(2, 2)).unwrap();
        let g = PlanarGraph::from_segments([&seg]);
        let svg = graph_svg(&g, "t<1>");
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("t&lt;1&gt;"));
        assert_eq!(svg.matches("stroke-width=\"1.5\"").count(), g.edges().len());
    }

    #[test]
    fn csv_rows_cover_transient_and_cycle() {
        let params = MapParams::new(int(1), int(3));
        let rep = classify_orbit(&params, &Point::from_ints(1, 1), 100);
        let csv = orbit_csv(&params, &rep, 10);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "iter,x,y,quadrant");
        assert_eq!(lines[1], "0,1,1,Q1");
        // The cycle closes: the final row repeats the first cycle point.
        assert_eq!(lines.len(), 2 + rep.preperiod + 3);
        assert_eq!(lines[4], "3,1,1,Q1");
    }
}

//! SVG rendering of a triangulation.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::geometry::{bounding_box, Point, PointId};

/// Draws every edge of `triangles` once. The view box is the bounding box of
/// `points` plus a 5% margin, with y pointing up.
pub fn render_svg(points: &[Point], triangles: &[[PointId; 3]]) -> String {
    let (lo, hi) = if points.is_empty() {
        (Point::new(0.0, 0.0), Point::new(1.0, 1.0))
    } else {
        bounding_box(points)
    };
    let extent = (hi.x - lo.x).max(hi.y - lo.y);
    let margin = if extent > 0.0 { 0.05 * extent } else { 1.0 };
    let (x0, y0) = (lo.x - margin, -hi.y - margin);
    let (w, h) = (hi.x - lo.x + 2.0 * margin, hi.y - lo.y + 2.0 * margin);

    let mut edges = BTreeSet::new();
    for t in triangles {
        for e in 0..3 {
            let (a, b) = (t[e].0, t[(e + 1) % 3].0);
            edges.insert((a.min(b), a.max(b)));
        }
    }

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:?} {y0:?} {w:?} {h:?}">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<g fill="none" stroke="black" stroke-width="1" vector-effect="non-scaling-stroke">"#
    )
    .unwrap();
    for (a, b) in edges {
        let (p, q) = (points[a as usize], points[b as usize]);
        writeln!(
            out,
            r#"<line x1="{:?}" y1="{:?}" x2="{:?}" y2="{:?}" vector-effect="non-scaling-stroke"/>"#,
            p.x, -p.y, q.x, -q.y
        )
        .unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[[u32; 3]]) -> Vec<[PointId; 3]> {
        v.iter().map(|t| t.map(PointId)).collect()
    }

    #[test]
    fn triangle_has_three_edges() {
        let p = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let svg = render_svg(&p, &ids(&[[0, 1, 2]]));
        assert_eq!(svg.matches("<line").count(), 3);
        assert!(svg.contains(r#"viewBox="-0.05 -1.05 1.1 1.1""#), "{svg}");
    }

    #[test]
    fn square_has_five_edges() {
        let p = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let t = ids(&[[0, 1, 2], [0, 2, 3]]);
        let svg = render_svg(&p, &t);
        assert_eq!(svg.matches("<line").count(), 5);
        assert_eq!(svg, render_svg(&p, &t));
    }
}

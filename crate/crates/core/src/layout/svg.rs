//! SVG dumps of the orthogonal drawing and of the node-link baseline.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::graph::SegGraph;
use crate::layout::force::Placed;
use crate::layout::ortho::OrthoDrawing;

const SIZE: f64 = 600.0;

/// Node-link diagram; edge widths grow with log(1 + boundary length).
pub fn node_link_svg(graph: &SegGraph, layout: &BTreeMap<usize, Placed>) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#);
    let max = graph.edges().iter().map(|e| e.weight).max().unwrap_or(1).max(1);
    let width = |w: u64| 1.0 + 7.0 * (1.0 + w as f64).ln() / (1.0 + max as f64).ln();
    let at = |p: [f64; 2]| (p[0] * SIZE, p[1] * SIZE);
    for e in graph.edges() {
        let (a, b) = (e.a.min(e.b), e.a.max(e.b));
        let Some(&(pa, _)) = layout.get(&a) else { continue };
        let pb = match layout.get(&b) {
            Some(&(p, _)) => p,
            // border edges go to the closest side of the square
            None => {
                let [x, y] = pa;
                let d = [x, 1.0 - x, y, 1.0 - y];
                match (0..4).min_by(|&i, &j| d[i].total_cmp(&d[j])).unwrap() {
                    0 => [0.0, y],
                    1 => [1.0, y],
                    2 => [x, 0.0],
                    _ => [x, 1.0],
                }
            }
        };
        let ((x1, y1), (x2, y2)) = (at(pa), at(pb));
        let _ = writeln!(
            s,
            r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#555" stroke-width="{:.2}"/>"##,
            width(e.weight)
        );
    }
    for (&v, &(p, r)) in layout {
        let (x, y) = at(p);
        let _ = writeln!(
            s,
            r##"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="#9ecae1" stroke="black"/><text x="{x:.2}" y="{y:.2}" font-size="12" text-anchor="middle" dominant-baseline="middle">{v}</text>"##,
            r * SIZE
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Boxes, edge paths and crossings of an orthogonal drawing, y up.
pub fn ortho_svg(d: &OrthoDrawing) -> String {
    let mut pts: Vec<(i64, i64)> = d.edge_paths.iter().flatten().copied().collect();
    for b in d.vertex_boxes.values() {
        pts.push((b.x0, b.y0));
        pts.push((b.x1, b.y1));
    }
    let (mut x0, mut y0, mut x1, mut y1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if pts.is_empty() {
        (x0, y0, x1, y1) = (0, 0, 1, 1);
    }
    let scale = 10.0;
    let (w, h) = ((x1 - x0 + 2) as f64 * scale, (y1 - y0 + 2) as f64 * scale);
    let tx = |x: i64| (x - x0 + 1) as f64 * scale;
    let ty = |y: i64| h - (y - y0 + 1) as f64 * scale;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    for path in &d.edge_paths {
        let p: Vec<String> = path.iter().map(|&(x, y)| format!("{:.1},{:.1}", tx(x), ty(y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="gray" stroke-width="2"/>"#, p.join(" "));
    }
    for (&v, b) in &d.vertex_boxes {
        let _ = writeln!(
            s,
            r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="#fdd0a2" stroke="black"/><text x="{:.1}" y="{:.1}" font-size="10">{v}</text>"##,
            tx(b.x0),
            ty(b.y1),
            (b.x1 - b.x0) as f64 * scale,
            (b.y1 - b.y0) as f64 * scale,
            tx(b.x0) + 2.0,
            ty(b.y1) + 10.0
        );
    }
    for c in &d.crossings {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.1}" cy="{:.1}" r="4" fill="red"/>"#,
            tx(c.point.0),
            ty(c.point.1)
        );
    }
    s.push_str("</svg>\n");
    s
}

//! SVG rendering of designs: grid, passive regions, members, supports,
//! loads, and the target node when one is set.

use std::io::{self, Write};
use std::path::Path;

use crate::model::{Configuration, DesignDomain};

const SCALE: f64 = 40.0;
const MARGIN: f64 = 40.0;

fn sx(x: i64) -> f64 {
    MARGIN + x as f64 * SCALE
}

fn sy(y: i64, d: &DesignDomain) -> f64 {
    // SVG y grows downward; the grid's y grows upward.
    MARGIN + (d.height - 1 - y) as f64 * SCALE
}

/// Writes an SVG drawing of `c` over the grid of `d`.
pub fn render_design<W: Write>(c: &Configuration, d: &DesignDomain, out: &mut W) -> io::Result<()> {
    let width = 2.0 * MARGIN + (d.width - 1) as f64 * SCALE;
    let height = 2.0 * MARGIN + (d.height - 1) as f64 * SCALE;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )?;
    writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#)?;

    for r in &d.passive_regions {
        let x = sx(r.x_min);
        let y = sy(r.y_max, d);
        let w = (r.x_max - r.x_min) as f64 * SCALE;
        let h = (r.y_max - r.y_min) as f64 * SCALE;
        writeln!(
            out,
            r##"<rect x="{x}" y="{y}" width="{w}" height="{h}" fill="#f3c6c6" stroke="#c86464" stroke-dasharray="6 4"/>"##
        )?;
    }

    for p in d.grid_points() {
        let fill = if c.contains_node(p) { "#1f3b73" } else { "#c9c9c9" };
        let radius = if c.contains_node(p) { 4.5 } else { 2.5 };
        writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="{radius}" fill="{fill}"/>"#,
            sx(p.x),
            sy(p.y, d)
        )?;
    }

    for e in c.elements() {
        writeln!(
            out,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#1f3b73" stroke-width="3"/>"##,
            sx(e.a().x),
            sy(e.a().y, d),
            sx(e.b().x),
            sy(e.b().y, d)
        )?;
    }

    for s in &d.supports {
        let (x, y) = (sx(s.at.x), sy(s.at.y, d));
        let marker = match (s.fix_x, s.fix_y) {
            (true, true) => "#208020",
            (true, false) | (false, true) => "#70a040",
            (false, false) => "#c9c9c9",
        };
        writeln!(
            out,
            r#"<path d="M {x} {y} l -9 14 l 18 0 z" fill="{marker}" opacity="0.9"/>"#
        )?;
    }

    for l in &d.loads {
        let (x, y) = (sx(l.at.x), sy(l.at.y, d));
        let norm = (l.fx * l.fx + l.fy * l.fy).sqrt();
        if norm == 0.0 {
            continue;
        }
        let (ux, uy) = (l.fx / norm, -l.fy / norm);
        let (tx, ty) = (x + 28.0 * ux, y + 28.0 * uy);
        writeln!(
            out,
            r##"<line x1="{x}" y1="{y}" x2="{tx}" y2="{ty}" stroke="#c03030" stroke-width="2.5"/>"##
        )?;
        writeln!(out, r##"<circle cx="{tx}" cy="{ty}" r="3.5" fill="#c03030"/>"##)?;
    }

    if let Some(target) = d.target_node {
        writeln!(
            out,
            r##"<circle cx="{}" cy="{}" r="8" fill="none" stroke="#c03030" stroke-width="2.5"/>"##,
            sx(target.x),
            sy(target.y, d)
        )?;
    }

    writeln!(out, "</svg>")
}

/// Renders to a file; parent directories must exist.
pub fn render_design_to_file(
    c: &Configuration,
    d: &DesignDomain,
    path: impl AsRef<Path>,
) -> io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    let mut buf = io::BufWriter::new(&mut file);
    render_design(c, d, &mut buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::model::Element;

    fn domain() -> DesignDomain {
        DesignDomain {
            width: 3,
            height: 2,
            supports: vec![],
            loads: vec![],
            passive_regions: vec![],
            v_max: None,
            horizon: Some(1),
            target_node: None,
            max_element_length: None,
            self_weight_density: 0.0,
        }
    }

    #[test]
    fn empty_configuration_draws_only_the_grid() {
        let mut out = Vec::new();
        render_design(&Configuration::empty(), &domain(), &mut out).unwrap();
        let svg = String::from_utf8(out).unwrap();
        assert_eq!(svg.matches("<circle").count(), 6);
        assert_eq!(svg.matches("<line").count(), 0);
    }

    #[test]
    fn triangle_draws_three_members() {
        let pt = Point::new;
        let c = Configuration::new(
            [pt(0, 0), pt(1, 0), pt(0, 1)],
            [
                Element::new(pt(0, 0), pt(1, 0)).unwrap(),
                Element::new(pt(1, 0), pt(0, 1)).unwrap(),
                Element::new(pt(0, 1), pt(0, 0)).unwrap(),
            ],
        )
        .unwrap();
        let mut out = Vec::new();
        render_design(&c, &domain(), &mut out).unwrap();
        let svg = String::from_utf8(out).unwrap();
        assert_eq!(svg.matches("<line").count(), 3);
    }

    #[test]
    fn unwritable_path_errors() {
        let c = Configuration::empty();
        assert!(render_design_to_file(&c, &domain(), "/nonexistent-dir/x.svg").is_err());
    }
}

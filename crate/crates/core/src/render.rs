//! SVG pictures of configurations. Output depends only on the inputs and
//! every coordinate is printed with three decimals, so files are
//! byte-stable.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lattice::{HexCoord, HexVertex};
use crate::loopcfg::{Domain, LoopConfig};

const FILLS: [&str; 3] = ["#f2b880", "#9fd18b", "#8fb8e0"];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderStyle {
    /// Circumradius of a hexagon in pixels.
    pub radius: f64,
    pub stroke: f64,
    /// Width of occupied edges.
    pub bold: f64,
    pub margin: f64,
    /// Shade flowers of each colour.
    pub shade: [bool; 3],
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            radius: 12.0,
            stroke: 0.6,
            bold: 2.5,
            margin: 10.0,
            shade: [true; 3],
        }
    }
}

impl RenderStyle {
    fn validate(&self) -> Result<()> {
        if [self.radius, self.stroke, self.bold]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite())
            && self.margin >= 0.0
            && self.margin.is_finite()
        {
            Ok(())
        } else {
            Err(Error::Parameter(
                "render dimensions must be positive".into(),
            ))
        }
    }
}

/// Draw the hexagons of `window` as a thin grid, the edges of `omega` in
/// bold and, per `style.shade`, fill its flowers by colour.
pub fn render_svg(omega: &LoopConfig, window: &Domain, style: &RenderStyle) -> Result<String> {
    style.validate()?;
    // lattice units: neighbouring centres are 2 apart, circumradius 2/√3
    let scale = style.radius * 3f64.sqrt() / 2.0;
    let mut hexes: BTreeSet<HexCoord> = window.faces().iter().copied().collect();
    hexes.extend(window.circuit().hexagons().iter().copied());
    let mut pts: Vec<(f64, f64)> = hexes
        .iter()
        .flat_map(|z| z.vertices())
        .map(HexVertex::position)
        .collect();
    pts.extend(omega.vertices().into_iter().map(HexVertex::position));
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for (x, y) in &pts {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(-*y);
        y1 = y1.max(-*y);
    }
    let px = |v: HexVertex| {
        let (x, y) = v.position();
        (
            (x - x0) * scale + style.margin,
            (-y - y0) * scale + style.margin,
        )
    };
    let w = (x1 - x0) * scale + 2.0 * style.margin;
    let h = (y1 - y0) * scale + 2.0 * style.margin;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.3}" height="{h:.3}" viewBox="0 0 {w:.3} {h:.3}">"#
    )
    .unwrap();
    writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##).unwrap();
    let polygon = |z: HexCoord| {
        z.vertices()
            .iter()
            .map(|v| px(*v))
            .map(|(x, y)| format!("{x:.3},{y:.3}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(
        s,
        r##"<g fill="none" stroke="#b0b0b0" stroke-width="{:.3}">"##,
        style.stroke
    )
    .unwrap();
    for z in &hexes {
        writeln!(s, r#"<polygon points="{}"/>"#, polygon(*z)).unwrap();
    }
    s.push_str("</g>\n");
    s.push_str("<g stroke=\"none\">\n");
    for z in &hexes {
        let c = z.color() as usize;
        if style.shade[c] && omega.is_flower(*z) {
            writeln!(
                s,
                r#"<polygon points="{}" fill="{}"/>"#,
                polygon(*z),
                FILLS[c]
            )
            .unwrap();
        }
    }
    s.push_str("</g>\n");
    writeln!(
        s,
        r##"<g stroke="#000000" stroke-width="{:.3}" stroke-linecap="round">"##,
        style.bold
    )
    .unwrap();
    for e in omega.edges() {
        let [p, q] = e.endpoints();
        let ((ax, ay), (bx, by)) = (px(p), px(q));
        writeln!(
            s,
            r#"<line x1="{ax:.3}" y1="{ay:.3}" x2="{bx:.3}" y2="{by:.3}"/>"#
        )
        .unwrap();
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_configuration_is_grid_only() {
        let h = Domain::flower(HexCoord::ORIGIN);
        let svg = render_svg(&LoopConfig::empty(), &h, &RenderStyle::default()).unwrap();
        assert!(!svg.contains("<line"));
        assert_eq!(
            svg.matches("<polygon").count(),
            h.faces().len() + h.circuit().len()
        );
    }

    #[test]
    fn ground_state_shades_its_flowers() {
        let h = Domain::ball(HexCoord::ORIGIN, 2);
        let omega =
            LoopConfig::ground_state(0, h.faces().iter().copied().filter(|z| z.color() == 0));
        let svg = render_svg(&omega, &h, &RenderStyle::default()).unwrap();
        let flowers = h.faces().iter().filter(|z| z.color() == 0).count();
        assert_eq!(svg.matches(FILLS[0]).count(), flowers);
        assert_eq!(svg.matches("<line").count(), omega.len());
    }

    #[test]
    fn output_is_stable() {
        let h = Domain::flower(HexCoord::ORIGIN);
        let omega = LoopConfig::trivial_loops([HexCoord::ORIGIN]).unwrap();
        let a = render_svg(&omega, &h, &RenderStyle::default()).unwrap();
        assert_eq!(a, render_svg(&omega, &h, &RenderStyle::default()).unwrap());
        assert!(render_svg(
            &omega,
            &h,
            &RenderStyle {
                radius: 0.0,
                ..Default::default()
            }
        )
        .is_err());
    }
}

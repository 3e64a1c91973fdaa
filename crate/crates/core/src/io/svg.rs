//! SVG rendering of layouts: the cylinder unrolled into a band `2π` wide and
//! `h_A` tall in log coordinates, angle to the right and log-radius upward.

use std::f64::consts::TAU;
use std::fmt::Write;

use crate::uniformizer::Layout;

/// Pixels per unit of flat length.
const SCALE: f64 = 120.0;
const MARGIN: f64 = 20.0;

pub fn layout_svg(l: &Layout) -> String {
    let (w, h) = (TAU * SCALE, l.h_a * SCALE);
    let x = |theta: f64| MARGIN + theta * SCALE;
    let y = |u: f64| MARGIN + h - u * SCALE;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.1}" height="{:.1}" viewBox="0 0 {:.1} {:.1}">"#,
        w + 2.0 * MARGIN,
        h + 2.0 * MARGIN,
        w + 2.0 * MARGIN,
        h + 2.0 * MARGIN
    );
    let _ = writeln!(s, r##"<rect x="{MARGIN:.1}" y="{MARGIN:.1}" width="{w:.3}" height="{h:.3}" fill="#f4f4f4" stroke="black"/>"##);
    // the seam where angle 0 and 2π are glued
    let _ = writeln!(
        s,
        r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="red" stroke-dasharray="4 3"/>"##,
        x(0.0),
        MARGIN,
        x(0.0),
        MARGIN + h
    );
    for q in &l.squares {
        let half = q.side / 2.0;
        let fill = if q.degenerate { "none" } else { "#4a7ab5" };
        // a square crossing the seam is drawn on both sides
        for shift in [-TAU, 0.0, TAU] {
            let t0 = q.theta - half + shift;
            if t0 + q.side <= 0.0 || t0 >= TAU {
                continue;
            }
            let (a, b) = (t0.max(0.0), (t0 + q.side).min(TAU));
            let _ = writeln!(
                s,
                r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{fill}" stroke="#203a5c"/>"##,
                x(a),
                y(q.u + half),
                (b - a) * SCALE,
                q.side * SCALE
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-size="10" text-anchor="middle">{}</text>"#,
            x(q.theta),
            y(q.u) + 3.0,
            q.label
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="11">h_A = {:.6}</text>"#,
        MARGIN,
        MARGIN - 6.0,
        l.h_a
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uniformizer::{LayoutFlags, LayoutSquare, LAYOUT_VERSION};

    #[test]
    fn seam_square_drawn_twice() {
        let l = Layout {
            version: LAYOUT_VERSION.into(),
            h_a: 1.0,
            inner: 0,
            outer: 1,
            squares: vec![LayoutSquare { label: 2, u: 0.5, theta: 0.1, side: 0.4, degenerate: false }],
            residual_density_mass: 0.0,
            modulus: TAU,
            relaxation_distance: 0.0,
            flags: LayoutFlags::default(),
        };
        let svg = layout_svg(&l);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("fill=\"#4a7ab5\"").count(), 2);
    }
}

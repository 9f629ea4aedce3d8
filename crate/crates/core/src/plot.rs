//! Deterministic SVG picture of the value plane: critical values, straight
//! matching paths from a base regular value, and optional trajectories of
//! `f_H` along transport flows.

use std::fmt::Write;

use num_complex::Complex64;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

struct Frame {
    min_re: f64,
    max_im: f64,
    scale: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = Complex64>) -> Self {
        let (mut lo_re, mut hi_re, mut lo_im, mut hi_im) = (-1.0f64, 1.0f64, -1.0f64, 1.0f64);
        for p in points {
            lo_re = lo_re.min(p.re);
            hi_re = hi_re.max(p.re);
            lo_im = lo_im.min(p.im);
            hi_im = hi_im.max(p.im);
        }
        let span = (hi_re - lo_re).max(hi_im - lo_im) * 1.1;
        let (c_re, c_im) = (0.5 * (lo_re + hi_re), 0.5 * (lo_im + hi_im));
        Self {
            min_re: c_re - 0.5 * span,
            max_im: c_im + 0.5 * span,
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    fn map(&self, z: Complex64) -> (f64, f64) {
        (
            MARGIN + (z.re - self.min_re) * self.scale,
            MARGIN + (self.max_im - z.im) * self.scale,
        )
    }
}

/// Renders critical values as marked points, segments from `base` to each
/// critical value, and each trajectory (a sequence of `f_H` values) as a
/// polyline. Identical inputs give identical bytes.
pub fn value_plane_svg(critical_values: &[Complex64], base: Complex64, trajectories: &[Vec<Complex64>]) -> String {
    let all = critical_values
        .iter()
        .copied()
        .chain(std::iter::once(base))
        .chain(trajectories.iter().flatten().copied())
        .filter(|z| z.re.is_finite() && z.im.is_finite());
    let frame = Frame::fit(all);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let (ox, oy) = frame.map(Complex64::new(0.0, 0.0));
    let _ = writeln!(
        s,
        r##"<g stroke="#bbbbbb" stroke-width="1"><line x1="0" y1="{oy:.3}" x2="{SIZE}" y2="{oy:.3}"/><line x1="{ox:.3}" y1="0" x2="{ox:.3}" y2="{SIZE}"/></g>"##
    );
    let (bx, by) = frame.map(base);
    let _ = writeln!(s, r##"<g class="matching-paths" stroke="#1f77b4" stroke-width="1.5">"##);
    for &cv in critical_values {
        let (x, y) = frame.map(cv);
        let _ = writeln!(s, r#"<line x1="{bx:.3}" y1="{by:.3}" x2="{x:.3}" y2="{y:.3}"/>"#);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g class="trajectories" fill="none" stroke="#2ca02c" stroke-width="1">"##);
    for traj in trajectories.iter().filter(|t| !t.is_empty()) {
        let pts: Vec<String> = traj
            .iter()
            .map(|&z| {
                let (x, y) = frame.map(z);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(s, r#"<polyline points="{}"/>"#, pts.join(" "));
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<circle class="base" cx="{bx:.3}" cy="{by:.3}" r="3" fill="#1f77b4"/>"##);
    let _ = writeln!(s, r##"<g class="critical-values" fill="#d62728">"##);
    for &cv in critical_values {
        let (x, y) = frame.map(cv);
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="5"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-size="11" font-family="monospace">{}</text>"#,
            x + 7.0,
            y - 7.0,
            crate::serial::format_complex(cv)
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn sl2_picture() {
        let svg = value_plane_svg(&[c(2.0), c(-2.0)], c(0.0), &[]);
        assert_eq!(svg.matches("<circle cx=").count(), 2);
        assert_eq!(svg.matches("<line x1=").count(), 4);
        assert!(svg.contains(">2<") && svg.contains(">-2<"));
        assert!(!svg.contains("<polyline"));
        assert_eq!(svg, value_plane_svg(&[c(2.0), c(-2.0)], c(0.0), &[]));
    }

    #[test]
    fn critical_values_share_the_axis_through_the_base() {
        let svg = value_plane_svg(&[c(2.0), c(-2.0)], c(0.0), &[]);
        // both matching paths are horizontal through the base point
        let ys: Vec<&str> = svg
            .lines()
            .filter(|l| l.starts_with("<line x1"))
            .flat_map(|l| [l.split('"').nth(3).unwrap(), l.split('"').nth(7).unwrap()])
            .collect();
        assert_eq!(ys.len(), 4);
        assert!(ys.iter().all(|y| *y == ys[0]));
    }

    #[test]
    fn trajectories_are_drawn() {
        let traj = vec![c(0.0), c(0.5), c(1.0)];
        let svg = value_plane_svg(&[c(2.0), c(-2.0)], c(0.0), &[traj, vec![]]);
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}

//! Dependency-free SVG rendering of trajectory families and density fields.
//! These are previews; the CSV files are the record of a run.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::probability::{DensityField, RegionLabel};
use crate::trajectory::Trajectory;

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];
/// Heat maps are downsampled to at most this many cells per axis.
const MAX_HEAT_CELLS: usize = 200;

/// Plot window in data coordinates, mapped to an SVG viewport with equal
/// scaling on both axes.
#[derive(Debug, Clone, Copy)]
struct Frame {
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        let span_re = (re_max - re_min).max(1e-12);
        let span_im = (im_max - im_min).max(1e-12);
        let scale = (WIDTH - 2.0 * MARGIN) / span_re;
        let height = span_im * scale + 2.0 * MARGIN;
        Self { re_min, re_max: re_min + span_re, im_min, im_max: im_min + span_im, scale, height }
    }

    fn fit(points: impl Iterator<Item = Complex64>) -> Self {
        let (mut a, mut b, mut c, mut d) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for z in points.filter(|z| z.re.is_finite() && z.im.is_finite()) {
            a = a.min(z.re);
            b = b.max(z.re);
            c = c.min(z.im);
            d = d.max(z.im);
        }
        if a > b {
            return Self::new(-1.0, 1.0, -1.0, 1.0);
        }
        let pad = 0.05 * (b - a).max(d - c).max(1e-3);
        Self::new(a - pad, b + pad, c - pad, d + pad)
    }

    fn px(&self, z: Complex64) -> (f64, f64) {
        (MARGIN + (z.re - self.re_min) * self.scale, MARGIN + (self.im_max - z.im) * self.scale)
    }

    fn open(&self, out: &mut String, title: &str) {
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="12">"#,
            w = WIDTH,
            h = self.height
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(out, r#"<text x="{MARGIN}" y="24">{}</text>"#, escape(title));
    }

    fn axes(&self, out: &mut String) {
        let stroke = r##"stroke="#888" stroke-width="0.8""##;
        if self.im_min <= 0.0 && self.im_max >= 0.0 {
            let (x0, y) = self.px(Complex64::new(self.re_min, 0.0));
            let (x1, _) = self.px(Complex64::new(self.re_max, 0.0));
            let _ = writeln!(out, r#"<line x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" {stroke}/>"#);
        }
        if self.re_min <= 0.0 && self.re_max >= 0.0 {
            let (x, y0) = self.px(Complex64::new(0.0, self.im_max));
            let (_, y1) = self.px(Complex64::new(0.0, self.im_min));
            let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{y1:.2}" {stroke}/>"#);
        }
        let (l, b) = self.px(Complex64::new(self.re_min, self.im_min));
        let (r, t) = self.px(Complex64::new(self.re_max, self.im_max));
        let _ = writeln!(out, r#"<rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black" stroke-width="0.8"/>"#, r - l, b - t);
        let _ = writeln!(out, r#"<text x="{l:.2}" y="{:.2}">{:.3}</text>"#, b + 16.0, self.re_min);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.3} (Re x)</text>"#, r, b + 16.0, self.re_max);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.3}</text>"#, l - 4.0, t + 10.0, self.im_max);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{b:.2}" text-anchor="end">{:.3}</text>"#, l - 4.0, self.im_min);
    }

    fn polyline(&self, out: &mut String, points: &[Complex64], color: &str, width: f64) {
        let mut d = String::with_capacity(points.len() * 16);
        for z in points.iter().filter(|z| z.re.is_finite() && z.im.is_finite()) {
            let (x, y) = self.px(*z);
            let _ = write!(d, "{x:.2},{y:.2} ");
        }
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}"/>"#, d.trim_end());
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Overlay of labelled trajectories in the complex plane.
pub fn trajectories_svg(title: &str, trajectories: &[(String, &Trajectory)]) -> String {
    let frame = Frame::fit(trajectories.iter().flat_map(|(_, t)| t.samples.iter().map(|s| s.x)));
    let mut out = String::new();
    frame.open(&mut out, title);
    frame.axes(&mut out);
    for (k, (label, traj)) in trajectories.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<Complex64> = traj.samples.iter().map(|s| s.x).collect();
        frame.polyline(&mut out, &pts, color, 1.5);
        let _ = writeln!(
            out,
            r#"<text x="{:.0}" y="{:.0}" fill="{color}">{}</text>"#,
            WIDTH - MARGIN - 120.0,
            MARGIN + 14.0 * k as f64 + 10.0,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn heat_color(u: f64) -> String {
    // white → blue → dark red ramp on a square-root scale
    let u = u.clamp(0.0, 1.0).sqrt();
    let (r, g, b) = if u < 0.5 {
        let s = u / 0.5;
        (255.0 * (1.0 - s) + 40.0 * s, 255.0 * (1.0 - s) + 90.0 * s, 255.0 * (1.0 - s) + 200.0 * s)
    } else {
        let s = (u - 0.5) / 0.5;
        (40.0 + 140.0 * s, 90.0 * (1.0 - s), 200.0 * (1.0 - s) + 30.0 * s)
    };
    format!("#{:02x}{:02x}{:02x}", r.round() as u8, g.round() as u8, b.round() as u8)
}

/// Heat map of a density field (block-averaged to at most 200 × 200 cells),
/// with `overlays` (e.g. the separatrix) drawn on top.
pub fn density_svg(title: &str, field: &DensityField, overlays: &[Vec<Complex64>]) -> String {
    let g = field.grid;
    let frame = Frame::new(g.re.min, g.re.max, g.im.min, g.im.max);
    let bx = g.re.cells.div_ceil(MAX_HEAT_CELLS);
    let by = g.im.cells.div_ceil(MAX_HEAT_CELLS);
    let (nx, ny) = (g.re.cells.div_ceil(bx), g.im.cells.div_ceil(by));
    let mut blocks = vec![0.0; nx * ny];
    for j in 0..g.im.cells {
        for i in 0..g.re.cells {
            let idx = j * g.re.cells + i;
            if field.labels[idx] != RegionLabel::Excluded && field.values[idx].is_finite() {
                blocks[(j / by) * nx + i / bx] += field.values[idx] / (bx * by) as f64;
            }
        }
    }
    let peak = blocks.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut out = String::new();
    frame.open(&mut out, title);
    let (w, h) = ((bx as f64) * g.re.step() * frame.scale, (by as f64) * g.im.step() * frame.scale);
    for jb in 0..ny {
        for ib in 0..nx {
            let re = g.re.min + (ib * bx) as f64 * g.re.step();
            let im = g.im.min + ((jb + 1) * by) as f64 * g.im.step();
            let (x, y) = frame.px(Complex64::new(re, im.min(g.im.max)));
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                w + 0.3,
                h + 0.3,
                heat_color(blocks[jb * nx + ib] / peak)
            );
        }
    }
    frame.axes(&mut out);
    for curve in overlays {
        frame.polyline(&mut out, curve, "black", 1.2);
    }
    out.push_str("</svg>\n");
    out
}

/// The `|1 - X²| = 1` lemniscate, parametrized as `±√(1 - e^{iφ})`.
pub fn lemniscate_curve(points: usize) -> Vec<Vec<Complex64>> {
    let right: Vec<Complex64> = (0..=points)
        .map(|k| {
            let phi = std::f64::consts::TAU * k as f64 / points as f64;
            (1.0 - Complex64::from_polar(1.0, phi)).sqrt()
        })
        .collect();
    let left = right.iter().map(|z| -z).collect();
    vec![right, left]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::probability::{density_field, DensityOptions};
    use crate::trajectory::cassinian_orbit;
    use crate::QuantumState;

    #[test]
    fn trajectory_svg_is_well_formed() {
        let a = cassinian_orbit(0.5, 1e-8).unwrap();
        let b = cassinian_orbit(2.0, 1e-8).unwrap();
        let svg = trajectories_svg("n=1 <ovals>", &[("b=0.5".into(), &a), ("b=2".into(), &b)]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("&lt;ovals&gt;"));
    }

    #[test]
    fn heat_map_downsamples() {
        let g: GridSpec = "-2:2:40,-2:2:30".parse().unwrap();
        let f = density_field(&QuantumState::oscillator(0), &g, &DensityOptions::default()).unwrap();
        let svg = density_svg("n=0", &f, &lemniscate_curve(64));
        assert_eq!(svg.matches("<rect").count(), 40 * 30 + 2);
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn lemniscate_points_lie_on_curve() {
        for curve in lemniscate_curve(100) {
            for z in curve {
                assert!(((1.0 - z * z).norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn colors() {
        assert_eq!(heat_color(0.0), "#ffffff");
        assert_eq!(heat_color(2.0), heat_color(1.0));
    }
}

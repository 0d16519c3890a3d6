//! Deterministic SVG phase portraits: streamlines from a seed grid,
//! direction arrows and marked equilibria.

use std::fmt::Write as _;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::autovec::VectorField;
use crate::flowlab::{integrate, FlowError, IntegratorOptions, Normalized, Rect, ZeroRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortraitSpec {
    pub region: Rect<f64>,
    /// Streamline seeds per side.
    pub seeds: usize,
    /// Arrows per side.
    pub arrows: usize,
    pub width: u32,
    pub height: u32,
}

impl PortraitSpec {
    pub fn new(region: Rect<f64>) -> Self {
        Self {
            region,
            seeds: 12,
            arrows: 16,
            width: 800,
            height: 600,
        }
    }

    fn validate(&self) -> Result<(), FlowError> {
        if self.seeds == 0 || self.arrows == 0 || self.width == 0 || self.height == 0 {
            return Err(FlowError::InvalidArgument("portrait densities and size must be positive".into()));
        }
        if !(self.region.width() > 0.0 && self.region.height() > 0.0) {
            return Err(FlowError::InvalidArgument("portrait region is degenerate".into()));
        }
        Ok(())
    }

    fn px(&self, z: Complex<f64>) -> (f64, f64) {
        let r = &self.region;
        (
            (z.re - r.x0) / r.width() * f64::from(self.width),
            (r.y1 - z.im) / r.height() * f64::from(self.height),
        )
    }
}

/// Fixed ramp from blue (slow) through yellow to red (fast), on
/// `s/(1 + s)` so that portraits of different fields are comparable.
fn speed_color(speed: f64) -> String {
    let t = if speed.is_finite() { speed / (1.0 + speed) } else { 1.0 };
    let stops = [(44.0, 123.0, 182.0), (255.0, 255.0, 191.0), (215.0, 25.0, 28.0)];
    let (a, b, u) = if t < 0.5 { (stops[0], stops[1], t * 2.0) } else { (stops[1], stops[2], t * 2.0 - 1.0) };
    let mix = |x: f64, y: f64| (x + (y - x) * u).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Resamples a polyline at fixed arc-length spacing.
fn resample(points: &[Complex<f64>], ds: f64) -> Vec<Complex<f64>> {
    let Some(&first) = points.first() else {
        return Vec::new();
    };
    let mut out = vec![first];
    let mut carry = 0.0;
    for w in points.windows(2) {
        let seg = w[1] - w[0];
        let len = seg.norm();
        let mut s = ds - carry;
        while s <= len {
            out.push(w[0] + seg * (s / len));
            s += ds;
        }
        carry = len - (s - ds);
    }
    out
}

/// Streamlines traced through the unit-speed direction field, forward and
/// backward from each seed, resampled at a fixed spacing.
pub fn streamlines<F: VectorField<f64> + ?Sized>(field: &F, spec: &PortraitSpec) -> Vec<Vec<Complex<f64>>> {
    let r = spec.region;
    let span = r.width() + r.height();
    let reach = 0.25 * span;
    let ds = span / 400.0;
    let opts = IntegratorOptions {
        region: Some(r),
        max_disp: ds,
        max_steps: 20_000,
        ..IntegratorOptions::default()
    };
    let dir = Normalized(field);
    let n = spec.seeds as f64;
    let mut lines = Vec::new();
    for j in 0..spec.seeds {
        for i in 0..spec.seeds {
            let seed = Complex::new(
                r.x0 + (i as f64 + 0.5) / n * r.width(),
                r.y0 + (j as f64 + 0.5) / n * r.height(),
            );
            let (Ok(fwd), Ok(back)) = (integrate(&dir, seed, reach, ds, &opts), integrate(&dir, seed, -reach, ds, &opts))
            else {
                continue;
            };
            let mut pts: Vec<Complex<f64>> = back.samples.iter().rev().map(|s| s.1).collect();
            pts.extend(fwd.samples.iter().skip(1).map(|s| s.1));
            pts.retain(|z| r.contains(*z));
            let line = resample(&pts, ds);
            if line.len() >= 2 {
                lines.push(line);
            }
        }
    }
    lines
}

/// Renders the portrait. Output depends only on the inputs.
pub fn render_svg<F: VectorField<f64> + ?Sized>(
    field: &F,
    spec: &PortraitSpec,
    zeros: &[ZeroRecord<f64>],
) -> Result<String, FlowError> {
    spec.validate()?;
    let r = spec.region;

    let mut arrows = Vec::new();
    let n = spec.arrows as f64;
    for j in 0..spec.arrows {
        for i in 0..spec.arrows {
            let z = Complex::new(r.x0 + (i as f64 + 0.5) / n * r.width(), r.y0 + (j as f64 + 0.5) / n * r.height());
            if let Ok(v) = field.eval(z) {
                if v.norm() > 0.0 && v.norm().is_finite() {
                    arrows.push((z, v));
                }
            }
        }
    }
    if arrows.is_empty() {
        return Err(FlowError::InvalidArgument("field is not evaluable anywhere in the portrait region".into()));
    }

    let mut svg = String::new();
    let (w, h) = (spec.width, spec.height);
    writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
    writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();

    writeln!(svg, r#"<g fill="none" stroke-width="1.2" stroke-linecap="round">"#).unwrap();
    for line in streamlines(field, spec) {
        // chunks share their end points so the polyline stays connected
        let mut k = 0;
        while k + 1 < line.len() {
            let end = (k + 8).min(line.len() - 1);
            let chunk = &line[k..=end];
            k = end;
            let mid = chunk[chunk.len() / 2];
            let speed = field.eval(mid).map(|v| v.norm()).unwrap_or(f64::INFINITY);
            let pts: Vec<String> = chunk
                .iter()
                .map(|z| {
                    let (x, y) = spec.px(*z);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            writeln!(svg, r#"<polyline stroke="{}" points="{}"/>"#, speed_color(speed), pts.join(" ")).unwrap();
        }
    }
    writeln!(svg, "</g>").unwrap();

    let cell = (f64::from(w) / n).min(f64::from(h) / n);
    writeln!(svg, r##"<g stroke="#333333" stroke-width="1" fill="#333333">"##).unwrap();
    for (z, v) in arrows {
        let (x, y) = spec.px(z);
        let d = v / v.norm();
        // screen y points down
        let (dx, dy) = (d.re * 0.35 * cell, -d.im * 0.35 * cell);
        let (x0, y0, x1, y1) = (x - dx, y - dy, x + dx, y + dy);
        let (hx, hy) = (-dx * 0.4, -dy * 0.4);
        let (px, py) = (-dy * 0.25, dx * 0.25);
        writeln!(
            svg,
            r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}"/><polygon points="{x1:.2},{y1:.2} {:.2},{:.2} {:.2},{:.2}"/>"#,
            x1 + hx + px,
            y1 + hy + py,
            x1 + hx - px,
            y1 + hy - py
        )
        .unwrap();
    }
    writeln!(svg, "</g>").unwrap();

    writeln!(svg, r#"<g font-family="monospace" font-size="14">"#).unwrap();
    for z in zeros {
        let (x, y) = spec.px(z.location);
        let fill = match z.winding_index {
            i if i < 0 => "#d7191c",
            i if i > 0 => "#2c7bb6",
            _ => "#777777",
        };
        writeln!(
            svg,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="{fill}" stroke="black"/><text x="{:.2}" y="{:.2}">{:+}</text>"#,
            x + 7.0,
            y - 7.0,
            z.winding_index
        )
        .unwrap();
    }
    writeln!(svg, "</g>").unwrap();
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autovec::{canonical_field, pendulum_field, CanonicalKind, FieldError};
    use crate::flowlab::{find_zeros, ZeroOptions};

    fn region() -> Rect<f64> {
        Rect::new(-4.0, 4.0, -3.0, 3.0).unwrap()
    }

    #[test]
    fn pendulum_portrait_marks_three_zeros() {
        let f = pendulum_field(1.0).unwrap();
        let spec = PortraitSpec::new(region());
        let zeros = find_zeros(&f, &region(), 64, &ZeroOptions::default()).unwrap().zeros;
        let svg = render_svg(&f, &spec, &zeros).unwrap();
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches(">+1</text>").count(), 1);
        assert_eq!(svg.matches(">-1</text>").count(), 2);
        assert!(svg.matches("<polyline").count() > 100);
        assert_eq!(svg, render_svg(&f, &spec, &zeros).unwrap());
    }

    #[test]
    fn saddle_portrait() {
        let f = canonical_field::<f64>(CanonicalKind::Saddle);
        let r = Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let zeros = find_zeros(&f, &r, 32, &ZeroOptions::default()).unwrap().zeros;
        let svg = render_svg(&f, &PortraitSpec::new(r), &zeros).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains(">-1</text>"));
    }

    #[test]
    fn unevaluable_region_is_error() {
        let f = |z: Complex<f64>| -> Result<Complex<f64>, FieldError> { Err(FieldError::NearPole { re: z.re, im: z.im }) };
        assert!(render_svg(&f, &PortraitSpec::new(region()), &[]).is_err());
        let mut spec = PortraitSpec::new(region());
        spec.seeds = 0;
        assert!(render_svg(&pendulum_field(1.0).unwrap(), &spec, &[]).is_err());
    }

    #[test]
    fn resampling_spacing() {
        let pts = vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0), Complex::new(1.0, 1.0)];
        let r = resample(&pts, 0.25);
        assert_eq!(r.len(), 9);
        for w in r.windows(2) {
            assert!(((w[1] - w[0]).norm() - 0.25).abs() < 1e-12 || w[0].re == 1.0 || w[1].re == 1.0);
        }
        assert!((r[8] - Complex::new(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn ramp_endpoints() {
        assert_eq!(speed_color(0.0), "#2c7bb6");
        assert_eq!(speed_color(1.0), "#ffffbf");
        assert_eq!(speed_color(f64::INFINITY), "#d7191c");
    }
}

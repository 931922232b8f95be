//! SVG scatter plots: point sets over the symbol curve, equal-aspect axes,
//! deterministic output (same inputs → byte-identical file).

use crate::points::PointProcessSample;
use crate::symbol::Symbol;
use crate::Result;
use std::fmt::Write as _;

/// Render samples over the curve. The legend carries N, γ, and the seed;
/// pass zero/NaN-free metadata as the caller sees fit.
pub fn emit_plot(
    symbol: &Symbol,
    samples: &[&PointProcessSample],
    n: usize,
    gamma: f64,
    seed: u64,
) -> Result<String> {
    let curve = symbol.sample_curve(2048);

    let mut min_re = f64::INFINITY;
    let mut max_re = f64::NEG_INFINITY;
    let mut min_im = f64::INFINITY;
    let mut max_im = f64::NEG_INFINITY;
    let mut grow = |re: f64, im: f64| {
        min_re = min_re.min(re);
        max_re = max_re.max(re);
        min_im = min_im.min(im);
        max_im = max_im.max(im);
    };
    for p in &curve.points {
        grow(p.re, p.im);
    }
    for s in samples {
        for p in &s.points {
            grow(p.re, p.im);
        }
    }
    let pad = 0.08 * ((max_re - min_re).max(max_im - min_im)).max(1e-6);
    min_re -= pad;
    max_re += pad;
    min_im -= pad;
    max_im += pad;

    // Equal aspect: 640 px across the real range, height proportional.
    let width = 640.0f64;
    let scale = width / (max_re - min_re);
    let height = (max_im - min_im) * scale;
    let tx = |re: f64| (re - min_re) * scale;
    let ty = |im: f64| (max_im - im) * scale; // flip: positive imag up

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.1}" height="{:.1}" viewBox="0 0 {:.1} {:.1}">"#,
        width,
        height + 28.0,
        width,
        height + 28.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<rect width="100%" height="100%" fill="white"/>"#
    )
    .unwrap();

    // the symbol curve, closed
    let mut path = String::new();
    for (i, p) in curve.points.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        write!(path, "{cmd}{:.4},{:.4} ", tx(p.re), ty(p.im)).unwrap();
    }
    path.push('Z');
    writeln!(
        svg,
        r##"<path d="{path}" fill="none" stroke="#1f4e79" stroke-width="1.2"/>"##
    )
    .unwrap();

    for s in samples {
        for p in &s.points {
            writeln!(
                svg,
                r##"<circle cx="{:.4}" cy="{:.4}" r="1.6" fill="#c23b22" fill-opacity="0.75"/>"##,
                tx(p.re),
                ty(p.im)
            )
            .unwrap();
        }
    }
    writeln!(
        svg,
        r#"<text x="8" y="{:.1}" font-family="monospace" font-size="12">a = {}   N = {}   gamma = {:.4}   seed = {}</text>"#,
        height + 18.0,
        symbol,
        n,
        gamma,
        seed
    )
    .unwrap();
    writeln!(svg, "</svg>").unwrap();
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::{LabeledPoint, PointProvenance};

    #[test]
    fn empty_point_set_still_valid_svg() {
        let s = Symbol::jordan();
        let svg = emit_plot(&s, &[], 100, 0.75, 1).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("<path"));
        assert!(!svg.contains("<circle"));
    }

    #[test]
    fn deterministic_bytes() {
        let s = Symbol::limacon();
        let sample = PointProcessSample {
            provenance: PointProvenance::Eigen,
            seed: 3,
            points: vec![LabeledPoint {
                re: 0.25,
                im: -0.125,
                wind_index: Some(1),
                multiplicity: 1,
            }],
        };
        let a = emit_plot(&s, &[&sample], 50, 0.75, 3).unwrap();
        let b = emit_plot(&s, &[&sample], 50, 0.75, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("<circle"));
    }

    #[test]
    fn points_in_disk_render_inside_curve_box() {
        // All points inside the unit disk must land strictly inside the
        // curve's bounding box in plot coordinates.
        let s = Symbol::jordan();
        let sample = PointProcessSample {
            provenance: PointProvenance::Eigen,
            seed: 1,
            points: (0..20)
                .map(|i| LabeledPoint {
                    re: 0.8 * ((i as f64) * 0.31).cos(),
                    im: 0.8 * ((i as f64) * 0.31).sin(),
                    wind_index: Some(1),
                    multiplicity: 1,
                })
                .collect(),
        };
        for p in &sample.points {
            assert!((p.re * p.re + p.im * p.im).sqrt() < 1.0);
        }
        let svg = emit_plot(&s, &[&sample], 4000, 0.75, 1).unwrap();
        assert_eq!(svg.matches("<circle").count(), 20);
    }
}

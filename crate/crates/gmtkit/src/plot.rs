//! Standalone SVG plots with no external assets.

use std::fmt::Write as _;

use crate::error::{CliError, CliResult};
use crate::report::Series;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(xs: &[f64], ys: &[f64]) -> Frame {
        let span = |v: &[f64]| {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                let pad = 0.05 * (hi - lo);
                (lo - pad, hi + pad)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        let (x0, x1) = span(xs);
        let (y0, y1) = span(ys);
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open(svg: &mut String, frame: &Frame, title: &str, x_label: &str, y_label: &str) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(svg, r#"<path d="M{l} {t}V{b}H{r}" fill="none" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, MARGIN / 2.0, escape(title));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 15.0, escape(x_label));
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for i in 0..=4 {
        let fx = frame.x0 + (frame.x1 - frame.x0) * i as f64 / 4.0;
        let fy = frame.y0 + (frame.y1 - frame.y0) * i as f64 / 4.0;
        let (px, py) = (frame.px(fx), frame.py(fy));
        let _ = writeln!(svg, r#"<path d="M{px:.2} {b}v5M{l} {py:.2}h-5" stroke="black"/>"#);
        let _ = writeln!(svg, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{fx:.3}</text>"#, b + 18.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" text-anchor="end">{fy:.3}</text>"#, l - 8.0, py + 4.0);
    }
}

fn check(xs: &[f64], ys: &[f64]) -> CliResult<()> {
    if xs.is_empty() {
        return Err(CliError::Usage("plot series is empty".into()));
    }
    if xs.len() != ys.len() {
        return Err(CliError::Usage("plot series columns differ in length".into()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(CliError::Usage("plot series has non-finite values".into()));
    }
    Ok(())
}

pub fn render(series: &Series, title: &str) -> CliResult<String> {
    let mut svg = String::new();
    match series {
        Series::LogLog { x, y, fit, x_label, y_label } => {
            check(x, y)?;
            let frame = Frame::fit(x, y);
            open(&mut svg, &frame, title, x_label, y_label);
            for (a, b) in x.iter().zip(y) {
                let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="steelblue"/>"#, frame.px(*a), frame.py(*b));
            }
            if let Some((slope, intercept)) = fit {
                let (a, b) = (frame.x0, frame.x1);
                let _ = writeln!(
                    svg,
                    r#"<path d="M{:.2} {:.2}L{:.2} {:.2}" stroke="firebrick" stroke-width="1.5" fill="none"/>"#,
                    frame.px(a),
                    frame.py(slope * a + intercept),
                    frame.px(b),
                    frame.py(slope * b + intercept)
                );
                let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">slope {slope:.4}</text>"#, WIDTH - MARGIN, MARGIN + 15.0);
            }
        }
        Series::Levels { points, x_label, y_label } => {
            let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
            check(&xs, &ys)?;
            let frame = Frame::fit(&xs, &ys);
            open(&mut svg, &frame, title, x_label, y_label);
            let mut d = format!("M{:.2} {:.2}", frame.px(xs[0]), frame.py(ys[0]));
            for i in 1..xs.len() {
                let _ = write!(d, "H{:.2}V{:.2}", frame.px(xs[i]), frame.py(ys[i]));
            }
            let _ = writeln!(svg, r#"<path d="{d}" stroke="steelblue" stroke-width="1.5" fill="none"/>"#);
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_levels_are_rejected() {
        let s = Series::Levels { points: vec![], x_label: "t".into(), y_label: "P".into() };
        assert!(render(&s, "levels").is_err());
    }

    #[test]
    fn loglog_has_points_and_line() {
        let s = Series::LogLog {
            x: vec![1.0, 2.0, 3.0],
            y: vec![0.5, 1.1, 1.4],
            fit: Some((0.45, 0.1)),
            x_label: "x".into(),
            y_label: "y".into(),
        };
        let svg = render(&s, "t").unwrap();
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("firebrick"));
        assert!(svg.ends_with("</svg>\n"));
    }
}

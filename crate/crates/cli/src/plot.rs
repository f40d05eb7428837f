//! Minimal deterministic SVG line plots.
//!
//! Coordinates are printed with two decimals so identical inputs always
//! render to identical bytes. Non-finite samples break the polyline.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;
const TICKS: usize = 5;

const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// CSS class of every polyline of this series (`mode`, `envelope`, ...).
    pub class: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn bounds(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return None;
    }
    Some(if hi - lo > 0.0 { (lo, hi) } else { (lo - 0.5, hi + 0.5) })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Figure {
    pub fn render(&self) -> io::Result<String> {
        let all = || self.series.iter().flat_map(|s| s.points.iter());
        let (x0, x1) = bounds(all().map(|p| p.0)).ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "plot has no finite points"))?;
        let (y0, y1) = bounds(all().filter(|p| p.0.is_finite()).map(|p| p.1)).unwrap_or((0.0, 1.0));
        let (pw, ph) = (WIDTH - MARGIN_L - MARGIN_R, HEIGHT - MARGIN_T - MARGIN_B);
        let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MARGIN_T + (y1 - y) / (y1 - y0) * ph;

        let mut svg = String::new();
        let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#);
        let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(&self.title));
        let _ = writeln!(
            svg,
            r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
        );
        for k in 0..=TICKS {
            let t = k as f64 / TICKS as f64;
            let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11">{}</text>"#,
                sx(xv),
                HEIGHT - MARGIN_B + 16.0,
                tick(xv)
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{}</text>"#,
                MARGIN_L - 6.0,
                sy(yv) + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"#,
            MARGIN_L + pw / 2.0,
            HEIGHT - 10.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="14" y="{:.2}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {:.2})">{}</text>"#,
            MARGIN_T + ph / 2.0,
            MARGIN_T + ph / 2.0,
            escape(&self.y_label)
        );
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let _ = writeln!(svg, r#"<g class="{}" data-label="{}">"#, escape(&s.class), escape(&s.label));
            for run in s.points.split(|p| !(p.0.is_finite() && p.1.is_finite())) {
                if run.is_empty() {
                    continue;
                }
                let coords: Vec<String> = run.iter().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1))).collect();
                let _ = writeln!(
                    svg,
                    r#"<polyline class="{}" fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
                    escape(&s.class),
                    coords.join(" ")
                );
            }
            let _ = writeln!(svg, "</g>");
        }
        svg.push_str("</svg>\n");
        Ok(svg)
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.render()?)
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig(series: Vec<Series>) -> Figure {
        Figure { title: "t".into(), x_label: "f (GHz)".into(), y_label: "G (dB)".into(), series }
    }

    fn line(class: &str, pts: Vec<(f64, f64)>) -> Series {
        Series { label: class.into(), class: class.into(), points: pts }
    }

    #[test]
    fn two_points_render() {
        let svg = fig(vec![line("curve", vec![(0.0, 0.0), (1.0, 1.0)])]).render().unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("f (GHz)"));
    }

    #[test]
    fn non_finite_values_split_lines() {
        let pts = vec![(0.0, 1.0), (1.0, f64::NEG_INFINITY), (2.0, 1.0), (3.0, 2.0)];
        let svg = fig(vec![line("idler", pts)]).render().unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn empty_plot_is_an_error() {
        assert!(fig(vec![line("x", vec![])]).render().is_err());
    }

    #[test]
    fn labels_are_escaped() {
        let mut f = fig(vec![line("a", vec![(0.0, 0.0), (1.0, 2.0)])]);
        f.title = "S<11>".into();
        assert!(f.render().unwrap().contains("S&lt;11&gt;"));
    }
}

//! Minimal static SVG 1.1 line plots: linear or log-log axes, polyline
//! series with optional markers, and dashed guide lines. Self-contained
//! documents with no external assets.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub markers: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
    /// Dashed reference lines, e.g. a fitted slope on a log-log plot.
    pub guides: Vec<Series>,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Plot {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            ..Default::default()
        }
    }

    pub fn with_series(mut self, label: &str, points: Vec<(f64, f64)>, markers: bool) -> Self {
        self.series.push(Series {
            label: label.to_string(),
            points,
            markers,
        });
        self
    }

    fn transform(&self) -> Option<(Box<dyn Fn(f64) -> Option<f64>>, Box<dyn Fn(f64) -> Option<f64>>)> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for s in self.series.iter().chain(&self.guides) {
            for &(x, y) in &s.points {
                if x.is_finite() && y.is_finite() && (!self.log_x || x > 0.0) && (!self.log_y || y > 0.0)
                {
                    xs.push(if self.log_x { x.log10() } else { x });
                    ys.push(if self.log_y { y.log10() } else { y });
                }
            }
        }
        if xs.is_empty() {
            return None;
        }
        let (x0, x1) = padded_range(&xs);
        let (y0, y1) = padded_range(&ys);
        let log_x = self.log_x;
        let log_y = self.log_y;
        let to_px = move |x: f64| -> Option<f64> {
            let v = if log_x {
                if x <= 0.0 {
                    return None;
                }
                x.log10()
            } else {
                x
            };
            Some(MARGIN_L + (v - x0) / (x1 - x0) * (WIDTH - MARGIN_L - MARGIN_R))
        };
        let to_py = move |y: f64| -> Option<f64> {
            let v = if log_y {
                if y <= 0.0 {
                    return None;
                }
                y.log10()
            } else {
                y
            };
            Some(HEIGHT - MARGIN_B - (v - y0) / (y1 - y0) * (HEIGHT - MARGIN_T - MARGIN_B))
        };
        Some((Box::new(to_px), Box::new(to_py)))
    }

    /// Renders the plot to an SVG document.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );

        // axes box
        let _ = writeln!(
            out,
            r##"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{}" height="{}" fill="none" stroke="#404040"/>"##,
            WIDTH - MARGIN_L - MARGIN_R,
            HEIGHT - MARGIN_T - MARGIN_B
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
            (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            escape(&self.y_label)
        );

        let Some((to_px, to_py)) = self.transform() else {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">no drawable data</text>"#,
                WIDTH / 2.0,
                HEIGHT / 2.0
            );
            out.push_str("</svg>\n");
            return out;
        };

        // tick labels from the data range of the first series
        self.draw_ticks(&mut out, &to_px, &to_py);

        for (gi, guide) in self.guides.iter().enumerate() {
            let color = PALETTE[(self.series.len() + gi) % PALETTE.len()];
            self.draw_polyline(&mut out, guide, color, true, &to_px, &to_py);
        }
        for (si, series) in self.series.iter().enumerate() {
            let color = PALETTE[si % PALETTE.len()];
            self.draw_polyline(&mut out, series, color, false, &to_px, &to_py);
        }

        // legend
        let mut ly = MARGIN_T + 14.0;
        for (si, series) in self.series.iter().chain(&self.guides).enumerate() {
            if series.label.is_empty() {
                continue;
            }
            let color = PALETTE[si % PALETTE.len()];
            let _ = writeln!(
                out,
                r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="{3}" stroke-width="2"/><text x="{4}" y="{5}" font-family="sans-serif" font-size="12">{6}</text>"#,
                MARGIN_L + 8.0,
                ly - 4.0,
                MARGIN_L + 28.0,
                color,
                MARGIN_L + 34.0,
                ly,
                escape(&series.label)
            );
            ly += 16.0;
        }

        out.push_str("</svg>\n");
        out
    }

    fn draw_ticks(
        &self,
        out: &mut String,
        to_px: &dyn Fn(f64) -> Option<f64>,
        to_py: &dyn Fn(f64) -> Option<f64>,
    ) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for s in self.series.iter().chain(&self.guides) {
            for &(x, y) in &s.points {
                if x.is_finite() && (!self.log_x || x > 0.0) {
                    xs.push(x);
                }
                if y.is_finite() && (!self.log_y || y > 0.0) {
                    ys.push(y);
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        ys.sort_by(f64::total_cmp);
        if xs.is_empty() || ys.is_empty() {
            return;
        }
        for frac in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let x = interp(&xs, frac, self.log_x);
            if let Some(px) = to_px(x) {
                let _ = writeln!(
                    out,
                    r##"<line x1="{px}" y1="{0}" x2="{px}" y2="{1}" stroke="#c0c0c0" stroke-width="0.5"/><text x="{px}" y="{2}" font-family="sans-serif" font-size="10" text-anchor="middle">{3}</text>"##,
                    MARGIN_T,
                    HEIGHT - MARGIN_B,
                    HEIGHT - MARGIN_B + 14.0,
                    tick_label(x)
                );
            }
            let y = interp(&ys, frac, self.log_y);
            if let Some(py) = to_py(y) {
                let _ = writeln!(
                    out,
                    r##"<line x1="{0}" y1="{py}" x2="{1}" y2="{py}" stroke="#c0c0c0" stroke-width="0.5"/><text x="{2}" y="{py}" font-family="sans-serif" font-size="10" text-anchor="end">{3}</text>"##,
                    MARGIN_L,
                    WIDTH - MARGIN_R,
                    MARGIN_L - 4.0,
                    tick_label(y)
                );
            }
        }
    }

    fn draw_polyline(
        &self,
        out: &mut String,
        series: &Series,
        color: &str,
        dashed: bool,
        to_px: &dyn Fn(f64) -> Option<f64>,
        to_py: &dyn Fn(f64) -> Option<f64>,
    ) {
        let pts: Vec<(f64, f64)> = series
            .points
            .iter()
            .filter_map(|&(x, y)| match (to_px(x), to_py(y)) {
                (Some(px), Some(py)) if px.is_finite() && py.is_finite() => Some((px, py)),
                _ => None,
            })
            .collect();
        if pts.len() >= 2 {
            let mut d = String::new();
            for (i, (px, py)) in pts.iter().enumerate() {
                let _ = write!(d, "{}{px:.2},{py:.2}", if i == 0 { "M" } else { " L" });
            }
            let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                out,
                r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#
            );
        }
        if series.markers {
            for (px, py) in &pts {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{px:.2}" cy="{py:.2}" r="3" fill="{color}"/>"#
                );
            }
        }
    }
}

fn padded_range(vals: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(hi > lo) {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn interp(sorted: &[f64], frac: f64, log: bool) -> f64 {
    let lo = sorted[0];
    let hi = sorted[sorted.len() - 1];
    if log {
        let (a, b) = (lo.log10(), hi.log10());
        10f64.powf(a + frac * (b - a))
    } else {
        lo + frac * (hi - lo)
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_zero_series_renders_valid_svg() {
        let plot = Plot::new("zeros", "t", "value")
            .with_series("flat", (0..10).map(|i| (i as f64, 0.0)).collect(), false);
        let svg = plot.render();
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("<path"));
        assert!(!svg.contains("http://") || svg.matches("http://").count() == 1);
    }

    #[test]
    fn loglog_markers_and_guide() {
        let pts: Vec<(f64, f64)> = [1.0, 0.25, 0.0625, 0.015625]
            .iter()
            .map(|&a: &f64| (a, 0.3 * a.powf(0.5)))
            .collect();
        let mut plot = Plot::new("rate", "alpha", "error").with_series("err", pts.clone(), true);
        plot.log_x = true;
        plot.log_y = true;
        plot.guides.push(Series {
            label: "slope 0.5".into(),
            points: pts,
            markers: false,
        });
        let svg = plot.render();
        assert_eq!(svg.matches("<circle").count(), 4);
        assert!(svg.contains("stroke-dasharray"));
    }
}

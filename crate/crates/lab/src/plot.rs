//! Self-contained SVG log-log rate plots: measured points, the fitted line,
//! and straight guide lines at theoretical slopes.

use std::fmt::Write as _;

pub struct GuideLine {
    pub slope: f64,
    pub label: String,
}

pub struct RatePlot {
    pub title: String,
    /// `(eps, value)` measured points, all positive
    pub points: Vec<(f64, f64)>,
    /// fitted `log10(value) = slope * log10(eps) + intercept/ln(10)` line
    pub fitted_slope: f64,
    pub fitted_intercept_ln: f64,
    pub guides: Vec<GuideLine>,
}

const W: f64 = 640.0;
const H: f64 = 440.0;
const ML: f64 = 70.0;
const MR: f64 = 30.0;
const MT: f64 = 50.0;
const MB: f64 = 60.0;

pub fn render(plot: &RatePlot) -> String {
    let xs: Vec<f64> = plot.points.iter().map(|p| p.0.log10()).collect();
    let ys: Vec<f64> = plot.points.iter().map(|p| p.1.log10()).collect();
    let (x0, x1) = padded_range(&xs);
    let (mut y0, mut y1) = padded_range(&ys);
    // widen y to fit the guide lines anchored at the first point
    if let (Some(&xa), Some(&ya)) = (xs.first(), ys.first()) {
        for g in &plot.guides {
            for xe in [x0, x1] {
                let ye = ya + g.slope * (xe - xa);
                y0 = y0.min(ye - 0.05);
                y1 = y1.max(ye + 0.05);
            }
        }
    }
    let sx = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let sy = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\" font-family=\"monospace\">{}</text>\n",
        W / 2.0,
        xml_escape(&plot.title)
    );
    // axes
    let _ = write!(
        svg,
        "<line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB,
        W - MR,
        H - MB,
        H - MB
    );
    // ticks at integer powers of ten
    for e in (x0.floor() as i64)..=(x1.ceil() as i64) {
        let x = e as f64;
        if x < x0 || x > x1 {
            continue;
        }
        let px = sx(x);
        let _ = write!(
            svg,
            "<line x1=\"{px}\" y1=\"{}\" x2=\"{px}\" y2=\"{}\" stroke=\"black\"/>\n\
             <text x=\"{px}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" font-family=\"monospace\">1e{e}</text>\n",
            H - MB,
            H - MB + 6.0,
            H - MB + 22.0
        );
    }
    for e in (y0.floor() as i64)..=(y1.ceil() as i64) {
        let y = e as f64;
        if y < y0 || y > y1 {
            continue;
        }
        let py = sy(y);
        let _ = write!(
            svg,
            "<line x1=\"{}\" y1=\"{py}\" x2=\"{ML}\" y2=\"{py}\" stroke=\"black\"/>\n\
             <text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\" font-family=\"monospace\">1e{e}</text>\n",
            ML - 6.0,
            ML - 10.0,
            py + 4.0
        );
    }
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" font-family=\"monospace\">eps</text>\n",
        (ML + W - MR) / 2.0,
        H - 12.0
    );

    // guide lines through the first measured point
    if let (Some(&xa), Some(&ya)) = (xs.first(), ys.first()) {
        for (i, g) in plot.guides.iter().enumerate() {
            let yl = ya + g.slope * (x0 - xa);
            let yr = ya + g.slope * (x1 - xa);
            let _ = write!(
                svg,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#888888\" stroke-dasharray=\"6,4\"/>\n\
                 <text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#555555\" font-family=\"monospace\">{}</text>\n",
                sx(x0),
                sy(yl),
                sx(x1),
                sy(yr),
                ML + 8.0,
                MT + 14.0 * (i as f64 + 1.0),
                xml_escape(&g.label)
            );
        }
    }

    // fitted line (natural-log intercept converted to log10)
    let b10 = plot.fitted_intercept_ln / std::f64::consts::LN_10;
    let _ = write!(
        svg,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#cc3333\" stroke-width=\"1.5\"/>\n",
        sx(x0),
        sy(b10 + plot.fitted_slope * x0),
        sx(x1),
        sy(b10 + plot.fitted_slope * x1)
    );

    // measured points and connecting polyline
    let path: Vec<String> =
        xs.iter().zip(&ys).map(|(&x, &y)| format!("{},{}", sx(x), sy(y))).collect();
    let _ = write!(
        svg,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#3355cc\" stroke-width=\"1\"/>\n",
        path.join(" ")
    );
    for (&x, &y) in xs.iter().zip(&ys) {
        let _ = write!(
            svg,
            "<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"#3355cc\"/>\n",
            sx(x),
            sy(y)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn padded_range(values: &[f64]) -> (f64, f64) {
    let mut lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = 0.07 * (hi - lo);
    (lo - pad, hi + pad)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_wellformed_svg() {
        let plot = RatePlot {
            title: "Qu rate vs eps".into(),
            points: vec![(0.5, 0.3), (0.25, 0.2), (0.125, 0.14)],
            fitted_slope: 0.5,
            fitted_intercept_ln: -0.2,
            guides: vec![GuideLine { slope: 1.0 / 6.0, label: "target 1/6".into() }],
        };
        let svg = render(&plot);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("target 1/6"));
    }
}

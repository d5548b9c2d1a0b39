//! Minimal line-plot SVG writer: one or more series on linear or log-log
//! axes, with an optional straight reference line (a fitted slope).

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
    pub color: &'a str,
    /// Draw markers at the points in addition to the polyline.
    pub markers: bool,
}

pub struct Plot<'a> {
    pub title: String,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub log_log: bool,
    pub series: Vec<Series<'a>>,
    /// `(slope, intercept, label)` of a straight line in plot coordinates
    /// (log-log plots interpret it in the log domain).
    pub fit: Option<(f64, f64, String)>,
    pub timestamp: bool,
}

const W: f64 = 800.0;
const H: f64 = 560.0;
const ML: f64 = 70.0;
const MR: f64 = 20.0;
const MT: f64 = 40.0;
const MB: f64 = 50.0;

pub fn render(plot: &Plot) -> String {
    let tx = |v: f64| if plot.log_log { v.ln() } else { v };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in &plot.series {
        for &(x, y) in &s.points {
            if plot.log_log && (x <= 0.0 || y <= 0.0) {
                continue;
            }
            xs.push(tx(x));
            ys.push(tx(y));
        }
    }
    if xs.is_empty() {
        xs = vec![0.0, 1.0];
        ys = vec![0.0, 1.0];
    }
    let (x0, x1) = pad(min(&xs), max(&xs));
    let (y0, y1) = pad(min(&ys), max(&ys));
    let px = |x: f64| ML + (tx(x) - x0) / (x1 - x0) * (W - ML - MR);
    let py = |y: f64| H - MB - (tx(y) - y0) / (y1 - y0) * (H - MT - MB);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n"
    ));
    if plot.timestamp {
        out.push_str(&format!(
            "<!-- generated {} -->\n",
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        ));
    }
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        (ML + W - MR) / 2.0,
        esc(&plot.title)
    ));
    // frame
    out.push_str(&format!(
        "<rect x=\"{ML:.1}\" y=\"{MT:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" \
         stroke=\"black\"/>\n",
        W - ML - MR,
        H - MT - MB
    ));
    // ticks
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let sx = ML + (W - ML - MR) * k as f64 / 4.0;
        let sy = H - MB - (H - MT - MB) * k as f64 / 4.0;
        let (lx, ly) = if plot.log_log { (fx.exp(), fy.exp()) } else { (fx, fy) };
        out.push_str(&format!(
            "<line x1=\"{sx:.1}\" y1=\"{:.1}\" x2=\"{sx:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            H - MB,
            H - MB + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{sx:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            H - MB + 18.0,
            tick_label(lx)
        ));
        out.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{sy:.1}\" x2=\"{ML:.1}\" y2=\"{sy:.1}\" stroke=\"black\"/>\n",
            ML - 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            ML - 8.0,
            sy + 4.0,
            tick_label(ly)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        (ML + W - MR) / 2.0,
        H - 12.0,
        esc(plot.x_label)
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {:.1})\">{}</text>\n",
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0,
        esc(plot.y_label)
    ));

    if let Some((slope, intercept, label)) = &plot.fit {
        let ya = slope * x0 + intercept;
        let yb = slope * x1 + intercept;
        out.push_str(&format!(
            "<line x1=\"{ML:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"gray\" \
             stroke-dasharray=\"6 3\"/>\n",
            H - MB - (ya - y0) / (y1 - y0) * (H - MT - MB),
            W - MR,
            H - MB - (yb - y0) / (y1 - y0) * (H - MT - MB),
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" fill=\"gray\">{}</text>\n",
            ML + 10.0,
            MT + 18.0,
            esc(label)
        ));
    }

    for (si, s) in plot.series.iter().enumerate() {
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter(|&&(x, y)| !plot.log_log || (x > 0.0 && y > 0.0))
            .map(|&(x, y)| (px(x), py(y)))
            .collect();
        if pts.len() >= 2 {
            let path: Vec<String> =
                pts.iter().map(|&(x, y)| format!("{x:.2},{y:.2}")).collect();
            out.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                path.join(" "),
                s.color
            ));
        }
        if s.markers {
            for &(x, y) in &pts {
                out.push_str(&format!(
                    "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{}\"/>\n",
                    s.color
                ));
            }
        }
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" fill=\"{}\">{}</text>\n",
            W - MR - 150.0,
            MT + 18.0 + 16.0 * si as f64,
            s.color,
            esc(s.label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn min(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn max(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn pad(lo: f64, hi: f64) -> (f64, f64) {
    if lo == hi {
        (lo - 1.0, hi + 1.0)
    } else {
        let m = 0.05 * (hi - lo);
        (lo - m, hi + m)
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 0.01 && v.abs() < 1e4 {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_without_timestamp_deterministically() {
        let plot = Plot {
            title: "t".into(),
            x_label: "x",
            y_label: "y",
            log_log: true,
            series: vec![Series {
                label: "width",
                points: vec![(0.2, 0.04), (0.1, 0.01), (0.05, 0.0025)],
                color: "blue",
                markers: true,
            }],
            fit: Some((2.0, 0.0, "slope 2.00".into())),
            timestamp: false,
        };
        let a = render(&plot);
        let b = render(&plot);
        assert_eq!(a, b);
        assert!(a.contains("<polyline"));
        assert!(!a.contains("generated"));
    }
}

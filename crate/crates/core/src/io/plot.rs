//! SVG line chart of a monitor series: one min-max-normalized curve per
//! metric over the test sets in submission order.

use std::fmt::Write;

use crate::engine::MonitorSeries;
use crate::error::{Error, Result};
use crate::stats::{min_max_normalize, MetricKind};

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub width: u32,
    pub height: u32,
    pub title: Option<String>,
    /// Horizontal line at this normalized drift level, in `[0, 1]`.
    pub threshold: Option<f64>,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            width: 800,
            height: 420,
            title: None,
            threshold: None,
        }
    }
}

const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 90.0;

fn color(metric: MetricKind) -> &'static str {
    match metric {
        MetricKind::Wasserstein1 => "#1f77b4",
        MetricKind::KolmogorovSmirnov => "#d62728",
        MetricKind::KullbackLeibler => "#2ca02c",
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            // not representable in XML 1.0
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => out.push('?'),
            c => out.push(c),
        }
    }
    out
}

/// Renders `series` as a standalone SVG 1.1 document. Output bytes depend
/// only on the inputs.
pub fn emit_drift_plot(series: &MonitorSeries, options: &PlotOptions) -> Result<String> {
    if series.is_empty() {
        return Err(Error::Empty("monitor series"));
    }
    if options.width < 300 || options.height < 200 {
        return Err(Error::InvalidParameter("plot must be at least 300x200".into()));
    }
    if let Some(t) = options.threshold {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!(
                "threshold line must lie in [0, 1], got {t}"
            )));
        }
    }

    let (w, h) = (options.width as f64, options.height as f64);
    let plot_w = w - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = h - MARGIN_TOP - MARGIN_BOTTOM;
    let n = series.len();
    let x_at = |i: usize| {
        if n == 1 {
            MARGIN_LEFT + plot_w / 2.0
        } else {
            MARGIN_LEFT + plot_w * i as f64 / (n - 1) as f64
        }
    };
    let y_at = |v: f64| MARGIN_TOP + plot_h * (1.0 - v);
    let bottom = MARGIN_TOP + plot_h;
    let right = MARGIN_LEFT + plot_w;

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        options.width, options.height, options.width, options.height
    );
    let _ = writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        w / 2.0,
        escape(options.title.as_deref().unwrap_or("Normalized drift"))
    );

    // axes and y ticks
    let _ = writeln!(
        s,
        "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n<line x1=\"{MARGIN_LEFT:.2}\" y1=\"{MARGIN_TOP:.2}\" x2=\"{MARGIN_LEFT:.2}\" y2=\"{bottom:.2}\"/>\n<line x1=\"{MARGIN_LEFT:.2}\" y1=\"{bottom:.2}\" x2=\"{right:.2}\" y2=\"{bottom:.2}\"/>\n</g>"
    );
    s.push_str("<g class=\"y-ticks\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">\n");
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\">{tick:.2}</text>",
            MARGIN_LEFT - 6.0,
            y_at(tick) + 4.0
        );
    }
    s.push_str("</g>\n");

    // x labels
    s.push_str("<g class=\"x-labels\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">\n");
    for (i, entry) in series.entries().iter().enumerate() {
        let (x, y) = (x_at(i), bottom + 14.0);
        let _ = writeln!(
            s,
            "<text x=\"{x:.2}\" y=\"{y:.2}\" transform=\"rotate(-45 {x:.2} {y:.2})\">{}</text>",
            escape(&entry.test_label)
        );
    }
    s.push_str("</g>\n");

    if let Some(t) = options.threshold {
        let y = y_at(t);
        let _ = writeln!(
            s,
            "<line class=\"threshold\" x1=\"{MARGIN_LEFT:.2}\" y1=\"{y:.2}\" x2=\"{right:.2}\" y2=\"{y:.2}\" stroke=\"#555555\" stroke-dasharray=\"6 4\"/>"
        );
    }

    for &metric in series.metrics() {
        let totals = series.totals(metric).expect("metric is in series");
        let curve = min_max_normalize(&totals)?;
        let points: Vec<String> = curve
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{:.2},{:.2}", x_at(i), y_at(v)))
            .collect();
        let _ = writeln!(
            s,
            "<g class=\"series\" data-metric=\"{}\" stroke=\"{}\" fill=\"{}\">",
            metric.name(),
            color(metric),
            color(metric)
        );
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke-width=\"2\" points=\"{}\"/>",
            points.join(" ")
        );
        for (i, &v) in curve.iter().enumerate() {
            let _ = writeln!(
                s,
                "<circle class=\"marker\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\"/>",
                x_at(i),
                y_at(v)
            );
        }
        s.push_str("</g>\n");
    }

    // legend
    s.push_str("<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n");
    for (k, &metric) in series.metrics().iter().enumerate() {
        let y = MARGIN_TOP + 10.0 + 20.0 * k as f64;
        let x = right + 16.0;
        let _ = writeln!(
            s,
            "<line x1=\"{x:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"{}\" stroke-width=\"2\"/>",
            x + 20.0,
            color(metric)
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            x + 26.0,
            y + 4.0,
            escape(metric.short_name())
        );
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

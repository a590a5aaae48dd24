//! Minimal self-contained SVG line charts.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    /// Half-width of the shaded band around `y`; zero draws no band.
    pub spread: f64,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Option<Self> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return None;
        }
        if log {
            let (a, b) = (lo.log10().floor(), hi.log10().ceil());
            let b = if a == b { a + 1.0 } else { b };
            return Some(Axis { lo: a, hi: b, log });
        }
        if lo == hi {
            let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
            lo -= pad;
            hi += pad;
        }
        let step = nice_step((hi - lo) / 5.0);
        Some(Axis {
            lo: (lo / step).floor() * step,
            hi: (hi / step).ceil() * step,
            log,
        })
    }

    /// Position in [0, 1], or `None` for values a log axis cannot show.
    fn unit(&self, v: f64) -> Option<f64> {
        let v = if self.log {
            if v <= 0.0 {
                return None;
            }
            v.log10()
        } else {
            v
        };
        v.is_finite().then(|| (v - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo as i32, self.hi as i32);
            let stride = ((b - a) as usize).div_ceil(8).max(1);
            return (a..=b)
                .step_by(stride)
                .map(|e| (10f64.powi(e), format!("1e{e}")))
                .collect();
        }
        let step = nice_step((self.hi - self.lo) / 5.0);
        let n = ((self.hi - self.lo) / step).round() as i64;
        (0..=n)
            .map(|i| {
                let v = self.lo + i as f64 * step;
                // Snap away float residue such as 0.30000000000000004.
                let v = (v / step).round() * step;
                (v, format_tick(v))
            })
            .collect()
    }
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && c != '\t' && c != '\n' => {}
            c => out.push(c),
        }
    }
    out
}

/// Renders `chart`. Fails when no point can be placed on the axes.
pub fn render(chart: &Chart) -> Result<String, String> {
    let xs = chart.series.iter().flat_map(|s| s.points.iter().map(|p| p.x));
    let ys = chart.series.iter().flat_map(|s| {
        s.points.iter().flat_map(|p| {
            let band = p.spread.is_finite() && p.spread > 0.0;
            [
                p.y,
                if band { p.y - p.spread } else { p.y },
                if band { p.y + p.spread } else { p.y },
            ]
        })
    });
    let x_axis = Axis::fit(xs, chart.log_x).ok_or("no plottable x values")?;
    let mut y_axis = Axis::fit(ys, chart.log_y).ok_or("no plottable y values")?;
    if chart.log_y {
        // Bands reaching far below the means would squash the plot.
        let means = chart.series.iter().flat_map(|s| s.points.iter().map(|p| p.y));
        if let Some(m) = Axis::fit(means, true) {
            y_axis.lo = y_axis.lo.max(m.lo - 1.0);
        }
    }

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |v: f64| x_axis.unit(v).map(|u| LEFT + u * pw);
    let py = |v: f64| y_axis.unit(v).map(|u| TOP + (1.0 - u.clamp(-0.05, 1.05)) * ph);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text class="title" x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&chart.title)
    );

    let _ = writeln!(svg, r#"<g class="axes" stroke="black" fill="none">"#);
    let _ = writeln!(svg, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/>"#);
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r#"<g class="ticks" font-size="11">"#);
    for (v, label) in x_axis.ticks() {
        let Some(x) = px(v) else { continue };
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#ddd"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"##,
            TOP,
            TOP + ph,
            TOP + ph + 16.0,
            escape(&label)
        );
    }
    for (v, label) in y_axis.ticks() {
        let Some(y) = py(v) else { continue };
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0,
            escape(&label)
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<text class="x-label" x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 18.0,
        escape(&chart.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text class="y-label" x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        TOP + ph / 2.0,
        escape(&chart.y_label)
    );

    for (i, s) in chart.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(svg, r#"<g class="series" data-name="{}">"#, escape(&s.name));
        let band: Vec<(f64, f64, f64)> = s
            .points
            .iter()
            .filter(|p| p.spread.is_finite() && p.spread > 0.0)
            .filter_map(|p| {
                let hi = py(p.y + p.spread)?;
                // On a log axis a band crossing zero is cut at the bottom edge.
                let lo = py(p.y - p.spread).unwrap_or(TOP + ph);
                Some((px(p.x)?, lo, hi))
            })
            .collect();
        if band.len() >= 2 {
            let mut d = String::new();
            for (j, (x, _, hi)) in band.iter().enumerate() {
                let _ = write!(d, "{}{x:.2},{hi:.2} ", if j == 0 { "M" } else { "L" });
            }
            for (x, lo, _) in band.iter().rev() {
                let _ = write!(d, "L{x:.2},{lo:.2} ");
            }
            let _ = writeln!(svg, r#"<path d="{}Z" fill="{color}" fill-opacity="0.15" stroke="none"/>"#, d);
        }
        let pts: Vec<(f64, f64)> = s.points.iter().filter_map(|p| Some((px(p.x)?, py(p.y)?))).collect();
        if pts.len() >= 2 {
            let line: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                line.join(" ")
            );
        }
        for (x, y) in &pts {
            let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#);
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 14.0;
        let _ = writeln!(
            svg,
            r#"<line class="legend" x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 22.0,
            lx + 28.0,
            ly + 4.0,
            escape(&s.name)
        );
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

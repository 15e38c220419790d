//! Output helpers: 17-significant-digit numeric formatting, CSV and
//! JSON-lines writers, and a minimal SVG scatter/line plot.

use std::fmt::Write as _;
use std::path::Path;

use crate::Result;

/// Formats with 17 significant digits so reruns are byte-comparable and
/// round-trip through f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes rows of already-formatted cells as CSV with a header line.
pub fn write_csv(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<()> {
    let mut out = String::with_capacity(rows.len() * 32 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Appends one JSON record per line.
pub fn write_jsonl<T: serde::Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("serializable report"));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// A bare-bones SVG polyline plot of (x, y) series with axes and a title.
pub fn write_svg_plot(
    path: &Path,
    series: &[(f64, f64)],
    title: &str,
    xlabel: &str,
    ylabel: &str,
) -> Result<()> {
    let (w, h, m) = (640.0, 480.0, 60.0);
    let finite: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if finite.is_empty() || x0 == x1 {
        x0 = 0.0;
        x1 = 1.0;
    }
    if finite.is_empty() || y0 == y1 {
        y0 = 0.0;
        y1 = 1.0;
    }
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut svg = String::new();
    write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{title}</text>\n\
         <line x1=\"{m}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
         <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\">{xlabel}</text>\n\
         <text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 {:.1})\">{ylabel}</text>\n",
        w / 2.0,
        h - m,
        w - m,
        h - m,
        h - m,
        w / 2.0,
        h - m / 4.0,
        h / 2.0,
        h / 2.0,
    )?;
    if !finite.is_empty() {
        let pts: Vec<String> = finite
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        write!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n",
            pts.join(" ")
        )?;
        for &(x, y) in &finite {
            write!(
                svg,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"#1f77b4\"/>\n",
                sx(x),
                sy(y)
            )?;
        }
    }
    // axis extent labels
    write!(
        svg,
        "<text x=\"{m}\" y=\"{:.1}\" font-size=\"10\">{}</text>\n\
         <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"10\">{}</text>\n\
         <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\">{}</text>\n\
         <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\">{}</text>\n</svg>\n",
        h - m + 14.0,
        fmt_short(x0),
        w - m,
        h - m + 14.0,
        fmt_short(x1),
        m - 44.0,
        h - m,
        fmt_short(y0),
        m - 44.0,
        m,
        fmt_short(y1),
    )?;
    std::fs::write(path, svg)?;
    Ok(())
}

fn fmt_short(x: f64) -> String {
    format!("{x:.3e}")
}

impl From<std::fmt::Error> for crate::Error {
    fn from(e: std::fmt::Error) -> Self {
        crate::Error::Solver(format!("formatting failure: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt17_round_trips() {
        for &x in &[std::f64::consts::PI, 1.0 / 3.0, 6.02e23, -1.5e-300] {
            let s = fmt17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }
}

//! SVG overlay of a reconstructed and a predicted edge profile.

use std::fmt::Write as _;

use crate::edge_theory::EdgeProfile;
use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRows {
    pub h: Vec<f64>,
    pub reconstructed: Vec<f64>,
    pub predicted: Vec<f64>,
}

impl From<&EdgeProfile> for ProfileRows {
    fn from(p: &EdgeProfile) -> Self {
        ProfileRows {
            h: p.h.clone(),
            reconstructed: p.reconstructed.clone(),
            predicted: p.predicted.clone(),
        }
    }
}

/// Reads `h,f_eps,predicted,abs_err` rows; extra columns are ignored.
pub fn parse_profile_csv(text: &str) -> Result<ProfileRows> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::Format("profile CSV is empty".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 3 || cols[..3] != ["h", "f_eps", "predicted"] {
        return Err(Error::Format(format!("unexpected profile CSV header '{header}'")));
    }
    let mut rows = ProfileRows {
        h: Vec::new(),
        reconstructed: Vec::new(),
        predicted: Vec::new(),
    };
    for (k, line) in lines {
        let v: Vec<f64> = line
            .split(',')
            .take(3)
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Format(format!("line {}: {e}", k + 1)))?;
        if v.len() < 3 || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Format(format!("line {}: expected three finite numbers", k + 1)));
        }
        rows.h.push(v[0]);
        rows.reconstructed.push(v[1]);
        rows.predicted.push(v[2]);
    }
    if rows.h.is_empty() {
        return Err(Error::Format("profile CSV has no data rows".into()));
    }
    Ok(rows)
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn polyline(out: &mut String, pts: &[(f64, f64)], color: &str, dash: &str) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    writeln!(
        out,
        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
        coords.join(" ")
    )
    .unwrap();
    for (x, y) in pts {
        writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2" fill="{color}"/>"#).unwrap();
    }
}

/// Renders the overlay; output bytes depend only on the input values.
pub fn render_svg(rows: &ProfileRows, title: &str) -> Result<String> {
    if rows.h.is_empty() {
        return Err(Error::Format("nothing to plot".into()));
    }
    let (x0, x1) = span(rows.h.iter().copied());
    let (y0, y1) = span(rows.reconstructed.iter().chain(&rows.predicted).copied());
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    writeln!(
        out,
        r#"<path d="M{l},{t} L{l},{b} L{r},{b}" fill="none" stroke="black" stroke-width="1"/>"#
    )
    .unwrap();
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{fx:.2}</text>"#,
            sx(fx),
            b + 16.0
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{fy:.3}</text>"#,
            l - 6.0,
            sy(fy) + 4.0
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">h</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="16" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.2})">f</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{:.2}" y="24" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    )
    .unwrap();

    let rec: Vec<(f64, f64)> = rows.h.iter().zip(&rows.reconstructed).map(|(&h, &f)| (sx(h), sy(f))).collect();
    let pred: Vec<(f64, f64)> = rows.h.iter().zip(&rows.predicted).map(|(&h, &f)| (sx(h), sy(f))).collect();
    polyline(&mut out, &pred, "#d62728", r#" stroke-dasharray="6 3""#);
    polyline(&mut out, &rec, "#1f77b4", "");
    writeln!(
        out,
        r##"<text x="{:.2}" y="{:.2}" font-size="12" fill="#1f77b4">reconstructed</text>"##,
        l + 10.0,
        t + 14.0
    )
    .unwrap();
    writeln!(
        out,
        r##"<text x="{:.2}" y="{:.2}" font-size="12" fill="#d62728">predicted</text>"##,
        l + 10.0,
        t + 30.0
    )
    .unwrap();
    out.push_str("</svg>\n");
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

//! SVG plots of scan summaries.

use std::fmt::Write as _;

use crate::{CliError, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// Values of a column; empty cells are `None`.
    fn values(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let i = self.column(name).ok_or_else(|| CliError::usage(format!("missing column '{name}'")))?;
        self.rows
            .iter()
            .map(|r| {
                let cell = r.get(i).map(|s| s.trim()).unwrap_or("");
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse::<f64>()
                        .map(Some)
                        .map_err(|_| CliError::usage(format!("bad number '{cell}' in column '{name}'")))
                }
            })
            .collect()
    }
}

fn read_table(csv_text: &str) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new().from_reader(csv_text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::usage(format!("malformed CSV: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::usage(format!("malformed CSV: {e}")))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    if headers.iter().all(|h| h.is_empty()) || rows.is_empty() {
        return Err(CliError::usage("CSV has no data rows"));
    }
    Ok(Table { headers, rows })
}

/// Maps data coordinates to the plot area.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: &[f64], ys: &[f64]) -> Self {
        let span = |v: &[f64]| {
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1.0) };
            (lo - pad, hi + pad)
        };
        let (x0, x1) = span(xs);
        let (y0, y1) = span(ys);
        Frame { x0, x1, y0, y1 }
    }

    fn sx(&self) -> f64 {
        (WIDTH - LEFT - RIGHT) / (self.x1 - self.x0)
    }

    fn sy(&self) -> f64 {
        (HEIGHT - TOP - BOTTOM) / (self.y1 - self.y0)
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) * self.sx()
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) * self.sy()
    }

    /// Transform that draws data coordinates directly.
    fn data_transform(&self) -> String {
        format!(
            "translate({} {}) scale({} {})",
            LEFT - self.x0 * self.sx(),
            HEIGHT - BOTTOM + self.y0 * self.sy(),
            self.sx(),
            -self.sy()
        )
    }
}

fn header(s: &mut String, title: &str, f: &Frame, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="18" text-anchor="middle">{title}</text>"#, WIDTH / 2.0);
    let (bx, by) = (LEFT, HEIGHT - BOTTOM);
    let _ = writeln!(
        s,
        r#"<path d="M {bx} {TOP} L {bx} {by} L {} {by}" stroke="black" fill="none"/>"#,
        WIDTH - RIGHT
    );
    for k in 0..=4 {
        let x = f.x0 + (f.x1 - f.x0) * k as f64 / 4.0;
        let y = f.y0 + (f.y1 - f.y0) * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{x:.3}</text>"#, f.px(x), by + 16.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{y:.3}</text>"#, bx - 6.0, f.py(y) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#, WIDTH / 2.0, HEIGHT - 10.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{ylabel}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
}

fn distance_plot(t: &Table) -> Result<String> {
    let ll = t.values("loglog")?;
    let med = t.values("median")?;
    let reference = t.values("reference")?;
    let pts: Vec<(f64, f64)> = ll.iter().zip(&med).filter_map(|(x, y)| Some(((*x)?, (*y)?))).collect();
    // Reference values are prefactor * loglog, so any row recovers the prefactor.
    let prefactor = ll.iter().zip(&reference).find_map(|(x, r)| Some((*r)? / (*x)?));
    let xs: Vec<f64> = ll.iter().flatten().cloned().collect();
    if xs.is_empty() {
        return Err(CliError::usage("no separation above e; nothing to plot against log log"));
    }
    let mut ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    if let Some(p) = prefactor {
        ys.extend(xs.iter().map(|x| p * x));
    }
    let f = Frame::new(&xs, &ys);
    let mut s = String::new();
    header(&mut s, "median chemical distance", &f, "log log |x|", "distance");
    if let Some(p) = prefactor {
        let (a, b) = (f.x0, f.x1);
        let _ = writeln!(s, r#"<g id="reference" transform="{}">"#, f.data_transform());
        let _ = writeln!(
            s,
            r#"<path d="M {a} {} L {b} {}" stroke="gray" stroke-dasharray="6 4" fill="none" vector-effect="non-scaling-stroke"/>"#,
            p * a,
            p * b
        );
        let _ = writeln!(s, "</g>");
        let _ = writeln!(s, r#"<text x="{}" y="{TOP}" text-anchor="end" fill="gray">prefactor {p:.4}</text>"#, WIDTH - RIGHT);
    }
    for (x, y) in &pts {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="black"/>"#, f.px(*x), f.py(*y));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn theta_plot(t: &Table) -> Result<String> {
    let us = t.values("u")?;
    let th = t.values("theta_hat")?;
    let se = t.values("stderr")?;
    let rows: Vec<(f64, f64, f64)> = us
        .iter()
        .zip(&th)
        .zip(&se)
        .map(|((u, t), e)| match (u, t, e) {
            (Some(u), Some(t), Some(e)) => Ok((*u, *t, *e)),
            _ => Err(CliError::usage("theta rows need u, theta_hat and stderr")),
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let f = Frame::new(&xs, &[0.0, 1.0]);
    let mut s = String::new();
    header(&mut s, "boundary-reaching probability", &f, "u", "theta");
    let line: Vec<String> = rows.iter().map(|r| format!("{:.2} {:.2}", f.px(r.0), f.py(r.1))).collect();
    let _ = writeln!(s, r#"<path d="M {}" stroke="black" fill="none"/>"#, line.join(" L "));
    for (u, t, e) in &rows {
        let (x, lo, hi) = (f.px(*u), f.py((t - e).max(0.0)), f.py((t + e).min(1.0)));
        let _ = writeln!(s, r#"<path d="M {x:.2} {lo:.2} L {x:.2} {hi:.2}" stroke="black"/>"#);
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{:.2}" r="4" fill="black"/>"#, f.py(*t));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// SVG for a summary CSV written by `distance-scan` or `theta-scan`.
pub fn render(csv_text: &str) -> Result<String> {
    let t = read_table(csv_text)?;
    if t.column("separation").is_some() {
        distance_plot(&t)
    } else if t.column("theta_hat").is_some() {
        theta_plot(&t)
    } else {
        Err(CliError::usage("CSV is neither a distance nor a theta summary"))
    }
}

/// Slope of the reference path, read back from the SVG.
pub fn reference_slope(svg: &str) -> Option<f64> {
    let g = svg.find(r#"<g id="reference""#)?;
    let d = &svg[g..];
    let start = d.find(r#"d="M "#)? + 5;
    let end = start + d[start..].find('"')?;
    let nums: Vec<f64> = d[start..end]
        .split_whitespace()
        .filter(|w| *w != "L")
        .map(|w| w.parse().ok())
        .collect::<Option<_>>()?;
    let [x0, y0, x1, y1] = nums[..] else { return None };
    Some((y1 - y0) / (x1 - x0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIST: &str = "separation,replicas,connected,unresolved,connection_rate,median,q25,q75,loglog,reference\n\
        100,10,8,0,0.8,3,2,4,1.5271796258079011,4.406\n\
        1000,10,7,0,0.7,4,3,5,1.9326447339160655,\n";

    #[test]
    fn distance_plot_has_the_reference_line() {
        let svg = render(DIST).unwrap();
        let want = 4.406 / 1.5271796258079011;
        assert!((reference_slope(&svg).unwrap() - want).abs() < 1e-6);
        assert_eq!(svg, render(DIST).unwrap());
    }

    #[test]
    fn bad_inputs() {
        assert!(render("").is_err());
        assert!(render("u,theta_hat,stderr,replicas\n").is_err());
        assert!(render("a,b\n1,2\n").is_err());
        assert!(render("u,theta_hat,stderr,replicas\n0.5,x,0,1\n").is_err());
    }

    #[test]
    fn theta_plot_renders() {
        let svg = render("u,theta_hat,stderr,replicas\n0,0,0,10\n0.5,0.4,0.15,10\n1,0.9,0.09,10\n").unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(reference_slope(&svg).is_none());
    }
}

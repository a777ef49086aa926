//! Minimal SVG line charts: measured values against k with a fitted law
//! overlay. Post-hoc artifacts only, no interactivity.

use std::io::Write;
use std::path::Path;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
}

pub fn write_line_chart(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> std::io::Result<()> {
    let (w, h) = (720.0, 480.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 50.0);
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().cloned()).collect();
    if all.is_empty() {
        return Ok(());
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    let pad = 0.08 * (y1 - y0).max(1e-12);
    y0 -= pad;
    y1 += pad;
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let sy = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);

    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut f = std::fs::File::create(path)?;
    writeln!(
        f,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )?;
    writeln!(f, r#"<rect width="{w}" height="{h}" fill="white"/>"#)?;
    writeln!(
        f,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        w / 2.0,
        title
    )?;
    // Axes.
    writeln!(
        f,
        r#"<line x1="{ml}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        h - mb,
        w - mr,
        h - mb
    )?;
    writeln!(f, r#"<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{}" stroke="black"/>"#, h - mb)?;
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        writeln!(
            f,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="11">{:.3}</text>"#,
            sx(xv),
            h - mb + 18.0,
            xv
        )?;
        writeln!(
            f,
            r#"<text x="{}" y="{}" text-anchor="end" font-size="11">{:.3}</text>"#,
            ml - 6.0,
            sy(yv) + 4.0,
            yv
        )?;
    }
    writeln!(
        f,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#,
        w / 2.0,
        h - 12.0,
        x_label
    )?;
    writeln!(
        f,
        r#"<text x="16" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 16 {})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        y_label
    )?;
    for (i, s) in series.iter().enumerate() {
        let pts: Vec<String> =
            s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        writeln!(
            f,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            s.color,
            pts.join(" ")
        )?;
        for &(x, y) in &s.points {
            writeln!(
                f,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"/>"#,
                sx(x),
                sy(y),
                s.color
            )?;
        }
        writeln!(
            f,
            r#"<text x="{}" y="{}" font-size="12" fill="{}">{}</text>"#,
            w - mr - 180.0,
            mt + 16.0 * (i as f64 + 1.0),
            s.color,
            s.label
        )?;
    }
    writeln!(f, "</svg>")
}

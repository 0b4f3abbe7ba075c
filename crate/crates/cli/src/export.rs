//! CSV and SVG renderings of a trajectory, and atomic file writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use superladder_core::dynamics::Trajectory;

use crate::CliError;

/// `t, x1..xN, p1..pN, H`, then one column per monitor. Values use the
/// shortest representation that round-trips.
pub fn trajectory_csv(traj: &Trajectory) -> Result<Vec<u8>, CliError> {
    let n = traj.dynamics.dim();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|j| format!("x{j}")));
    header.extend((1..=n).map(|j| format!("p{j}")));
    header.push("H".into());
    header.extend(traj.monitors.iter().map(|(name, _)| name.clone()));

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for (i, (t, s)) in traj.times.iter().zip(&traj.states).enumerate() {
        let mut row = vec![t.to_string()];
        row.extend(s.x().iter().chain(s.p()).map(f64::to_string));
        row.push(traj.energy[i].to_string());
        row.extend(traj.monitors.iter().map(|(_, v)| v[i].to_string()));
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

const SIZE: f64 = 600.0;
const MARGIN: f64 = 50.0;

/// Polyline of coordinates `(x_a, x_b)` in an auto-scaled viewBox with
/// labelled axes.
pub fn projection_svg(traj: &Trajectory, axes: (usize, usize), title: &str) -> String {
    let (a, b) = axes;
    let pts: Vec<(f64, f64)> = traj.states.iter().map(|s| (s.x()[a], s.x()[b])).collect();
    let (lo_u, hi_u) = bounds(pts.iter().map(|p| p.0));
    let (lo_v, hi_v) = bounds(pts.iter().map(|p| p.1));
    let inner = SIZE - 2.0 * MARGIN;
    let sx = |u: f64| MARGIN + (u - lo_u) / (hi_u - lo_u) * inner;
    let sy = |v: f64| SIZE - MARGIN - (v - lo_v) / (hi_v - lo_v) * inner;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" width="{SIZE}" height="{SIZE}">"#);
    let _ = writeln!(svg, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(svg, r##"<rect x="{MARGIN}" y="{MARGIN}" width="{inner}" height="{inner}" fill="none" stroke="#999"/>"##);
    let mut line = String::new();
    for (u, v) in &pts {
        let _ = write!(line, "{:.3},{:.3} ", sx(*u), sy(*v));
    }
    let _ = writeln!(
        svg,
        r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="1" points="{}"/>"##,
        line.trim_end()
    );
    let (xa, xb) = (format!("x{}", a + 1), format!("x{}", b + 1));
    let mid = SIZE / 2.0;
    let _ = writeln!(svg, r#"<text x="{mid}" y="{}" text-anchor="middle" font-size="14">{xa}</text>"#, SIZE - 15.0);
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{mid}" text-anchor="middle" font-size="14" transform="rotate(-90 15 {mid})">{xb}</text>"#
    );
    for (x, y, anchor, label) in [
        (MARGIN, SIZE - MARGIN + 16.0, "start", lo_u),
        (SIZE - MARGIN, SIZE - MARGIN + 16.0, "end", hi_u),
        (MARGIN - 6.0, SIZE - MARGIN, "end", lo_v),
        (MARGIN - 6.0, MARGIN + 10.0, "end", hi_v),
    ] {
        let _ = writeln!(svg, r#"<text x="{x}" y="{y}" text-anchor="{anchor}" font-size="11">{label:.3}</text>"#);
    }
    svg.push_str("</svg>\n");
    svg
}

/// Padded `(min, max)`; never degenerate.
fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if !lo.is_finite() || !hi.is_finite() {
        return (-1.0, 1.0);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Coordinate pairs drawn for an `n`-axis run: the plane in 2D, the three
/// pairwise projections in 3D.
pub fn projections(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            out.push((a, b));
        }
    }
    out
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

//! Where forward-backward beats unshifted FISTA, over `(mu, rho)` in
//! `[0, 1] x [0, 5]` with `L = 1`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use fistashift::rates::{linspace, region_map, RegionCell, Winner};

use crate::error::{HarnessError, Result};

pub const MU_RANGE: (f64, f64) = (0.0, 1.0);
pub const RHO_RANGE: (f64, f64) = (0.0, 5.0);

pub fn region_grid(mu_steps: usize, rho_steps: usize) -> Result<Vec<Vec<RegionCell>>> {
    if mu_steps < 2 || rho_steps < 2 {
        return Err(HarnessError::Config(format!(
            "region grid needs at least 2 steps per axis, got {mu_steps} x {rho_steps}"
        )));
    }
    let mu = linspace(MU_RANGE.0, MU_RANGE.1, mu_steps);
    let rho = linspace(RHO_RANGE.0, RHO_RANGE.1, rho_steps);
    Ok(region_map(&mu, &rho)?)
}

pub fn render_region_csv(grid: &[Vec<RegionCell>]) -> String {
    let mut out = String::from("mu,rho,r_fbs,r_fista0,winner\n");
    for cell in grid.iter().flatten() {
        let _ = writeln!(
            out,
            "{},{},{:.16e},{:.16e},{}",
            cell.mu,
            cell.rho,
            cell.r_fbs,
            cell.r_fista0,
            cell.winner.name()
        );
    }
    out
}

fn color(w: Winner) -> &'static str {
    match w {
        Winner::FbsBetter => "#f4a582",
        Winner::Fista0Better => "#92c5de",
        Winner::Tie => "#dddddd",
    }
}

pub fn render_region_svg(grid: &[Vec<RegionCell>]) -> String {
    let (w, h, left, top) = (560.0, 420.0, 60.0, 30.0);
    let (pw, ph) = (w - left - 20.0, h - top - 50.0);
    let nmu = grid.len();
    let nrho = grid.first().map_or(0, |r| r.len());
    let (cw, ch) = (pw / nmu as f64, ph / nrho as f64);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    for (i, row) in grid.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let x = left + i as f64 * cw;
            let y = top + ph - (j + 1) as f64 * ch;
            let _ = writeln!(
                s,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                cw + 0.05,
                ch + 0.05,
                color(cell.winner)
            );
        }
    }
    s.push_str("</g>\n");
    let _ = writeln!(
        s,
        r##"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##
    );
    for t in 0..=4 {
        let f = t as f64 / 4.0;
        let x = left + f * pw;
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            top + ph + 16.0,
            MU_RANGE.0 + f * (MU_RANGE.1 - MU_RANGE.0)
        );
        let y = top + ph - f * ph;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            left - 6.0,
            y + 4.0,
            RHO_RANGE.0 + f * (RHO_RANGE.1 - RHO_RANGE.0)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">mu</text>"#,
        left + pw / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">rho</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );
    let legend = [(Winner::FbsBetter, "FBS faster"), (Winner::Fista0Better, "FISTA (delta = 0) faster")];
    for (k, (wn, text)) in legend.iter().enumerate() {
        let y = top + 10.0 + 18.0 * k as f64;
        let _ = writeln!(
            s,
            r##"<rect x="{:.1}" y="{:.1}" width="12" height="12" fill="{}" stroke="#333"/><text x="{:.1}" y="{:.1}">{text}</text>"##,
            left + pw - 190.0,
            y,
            color(*wn),
            left + pw - 172.0,
            y + 10.0
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes the grid CSV to `path` and, optionally, the shaded map to `svg`.
pub fn emit_region_map(
    mu_steps: usize,
    rho_steps: usize,
    path: &Path,
    svg: Option<&Path>,
) -> Result<Vec<Vec<RegionCell>>> {
    let grid = region_grid(mu_steps, rho_steps)?;
    fs::write(path, render_region_csv(&grid)).map_err(|e| HarnessError::io(path, e))?;
    if let Some(svg) = svg {
        fs::write(svg, render_region_svg(&grid)).map_err(|e| HarnessError::io(svg, e))?;
    }
    Ok(grid)
}

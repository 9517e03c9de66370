//! Per-run trace files.
//!
//! ```text
//! # key = value            metadata lines
//! k,e_k,v_k,ell_k,F_xk,phi_k
//! 0,1.0000000000000000e0,...
//! ```
//!
//! Numbers carry 17 significant digits so they round-trip exactly. Columns
//! that need the reference solution (`e_k`, `v_k`, `ell_k`) are left empty
//! when it is unknown; `phi_k` is empty when the run recorded no Lyapunov
//! trace.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use fistashift::lyapunov::NormalizedTraces;
use fistashift::solvers::SolverRun;

use crate::error::{HarnessError, Result};

pub const CSV_HEADER: &str = "k,e_k,v_k,ell_k,F_xk,phi_k";

fn num(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:.16e}"))
}

pub fn render_csv(run: &SolverRun, traces: Option<&NormalizedTraces>, meta: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in meta {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    let at = |s: Option<&Vec<f64>>, k: usize| s.and_then(|s| s.get(k).copied());
    for (k, &fx) in run.values.iter().enumerate() {
        let _ = writeln!(
            out,
            "{k},{},{},{},{},{}",
            num(at(traces.map(|t| &t.e), k)),
            num(at(traces.map(|t| &t.v), k)),
            num(at(traces.and_then(|t| t.ell.as_ref()), k)),
            num(Some(fx)),
            num(at(run.lyapunov.as_ref(), k)),
        );
    }
    out
}

pub fn emit_csv(
    run: &SolverRun,
    traces: Option<&NormalizedTraces>,
    meta: &[(String, String)],
    path: &Path,
) -> Result<()> {
    fs::write(path, render_csv(run, traces, meta)).map_err(|e| HarnessError::io(path, e))
}

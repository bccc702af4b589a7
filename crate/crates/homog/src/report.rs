//! CSV writers and run manifests.
//!
//! Output is byte-deterministic: fixed column orders, `Display`-formatted
//! floats (shortest round-trip), LF line endings. Column orders are part of
//! the CLI contract and documented in the README.

use crate::cell::{CellSolution, FaceFlux};
use crate::effective::ConvergenceRecord;
use crate::error::Result;
use crate::experiment::ComparisonResult;
use crate::wave::{QGrid, TrajectoryRecord};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Corrector grid with cell-centered flux: `y,chi,flux` in one dimension,
/// `y1,y2,chi,flux1,flux2` in two.
pub fn cell_solution_csv(sol: &CellSolution, flux: &FaceFlux) -> String {
    let mut out = String::new();
    let centered = flux.cell_centered();
    if sol.grid.dim() == 1 {
        out.push_str("y,chi,flux\n");
        for (idx, v) in sol.values.iter().enumerate() {
            let y = sol.grid.cell_center(idx)[0];
            let _ = writeln!(out, "{},{},{}", y, v, centered[idx][0]);
        }
    } else {
        out.push_str("y1,y2,chi,flux1,flux2\n");
        for (idx, v) in sol.values.iter().enumerate() {
            let c = sol.grid.cell_center(idx);
            let _ = writeln!(out, "{},{},{},{},{}", c[0], c[1], v, centered[idx][0], centered[idx][1]);
        }
    }
    out
}

/// One row per radius: tensor entries, error against the reference, Cauchy
/// difference to the previous radius, solver residual.
pub fn convergence_csv(rec: &ConvergenceRecord) -> String {
    let mut out = String::from("r,a11,a12,a21,a22,err_ref,cauchy,residual\n");
    for (i, t) in rec.tensors.iter().enumerate() {
        let cauchy = if i == 0 { 0.0 } else { rec.cauchy[i - 1] };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            rec.radii[i],
            t.entry(0, 0),
            t.entry(0, 1),
            t.entry(1, 0),
            t.entry(1, 1),
            rec.errors[i],
            cauchy,
            t.residual
        );
    }
    out
}

/// Single-tensor table with the same column layout as the convergence CSV.
pub fn tensor_csv(t: &crate::effective::EffectiveTensor) -> String {
    let r = match t.provenance {
        crate::effective::Provenance::Truncated { half_width } => half_width,
        crate::effective::Provenance::ExactPeriodic => 0.0,
    };
    let mut out = String::from("r,a11,a12,a21,a22,err_ref,cauchy,residual\n");
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        r,
        t.entry(0, 0),
        t.entry(0, 1),
        t.entry(1, 0),
        t.entry(1, 1),
        0.0,
        0.0,
        t.residual
    );
    out
}

/// Norm monitors along a trajectory: `t,u_h1,v_l2,energy`.
pub fn trajectory_csv(rec: &TrajectoryRecord) -> String {
    let mut out = String::from("t,u_h1,v_l2,energy\n");
    for i in 0..rec.times.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            rec.times[i], rec.h1_norms[i], rec.velocity_l2[i], rec.energies[i]
        );
    }
    out
}

/// Field snapshots as flat rows keyed by time and node: `t,node,x[,y],u`.
pub fn snapshots_csv(rec: &TrajectoryRecord, grid: &QGrid) -> String {
    let mut out = if grid.dim == 1 {
        String::from("t,node,x,u\n")
    } else {
        String::from("t,node,x,y,u\n")
    };
    for (t, field) in &rec.snapshots {
        for (idx, v) in field.iter().enumerate() {
            let p = grid.node_coord(idx);
            if grid.dim == 1 {
                let _ = writeln!(out, "{},{},{},{}", t, idx, p[0], v);
            } else {
                let _ = writeln!(out, "{},{},{},{},{}", t, idx, p[0], p[1], v);
            }
        }
    }
    out
}

/// Per-path table: `scenario,epsilon,path,e,e_sq`.
pub fn compare_paths_csv(res: &ComparisonResult) -> String {
    let mut out = String::from("scenario,epsilon,path,e,e_sq\n");
    for (ei, eps) in res.epsilons.iter().enumerate() {
        for (p, e) in res.errors[ei].iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{},{}", res.scenario, eps, p, e, e * e);
        }
    }
    out
}

/// Per-epsilon summary: `epsilon,mean_e_sq,p_delta_1,p_delta_2,...`.
pub fn compare_summary_csv(res: &ComparisonResult) -> String {
    let mut header = String::from("epsilon,mean_e_sq");
    for k in 1..=res.deltas.len() {
        let _ = write!(header, ",p_delta_{k}");
    }
    header.push('\n');
    let mut out = header;
    for (ei, eps) in res.epsilons.iter().enumerate() {
        let _ = write!(out, "{},{}", eps, res.mean_sq[ei]);
        for p in &res.tail_prob[ei] {
            let _ = write!(out, ",{p}");
        }
        out.push('\n');
    }
    out
}

/// Plain-text manifest: sorted `key = value` lines, enough to reproduce the
/// run exactly.
pub fn manifest(entries: &[(String, String)]) -> String {
    let mut sorted: Vec<&(String, String)> = entries.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = String::new();
    for (k, v) in sorted {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}

pub fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, content)?;
    Ok(())
}

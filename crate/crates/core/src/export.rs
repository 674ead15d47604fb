//! Writers for the run artifacts. Output is sequential and uses fixed
//! `{:.16e}` formatting (17 significant digits) so identical runs produce
//! byte-identical files.

use crate::accounting::ProbabilityLedger;
use crate::error::Result;
use crate::multiscattering::ScatteringSeries;
use crate::scenario::Scenario;
use crate::trajectories::Trajectory;
use crate::wavepacket::FieldGrid;
use serde_json::json;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Spinor components, density and current on the full (t, x) grid, row-major
/// in t then x.
pub fn write_field_csv(path: &Path, grid: &FieldGrid) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "t,x,re_phi_plus,im_phi_plus,re_phi_minus,im_phi_minus,density,current"
    )?;
    for (it, &t) in grid.ts.iter().enumerate() {
        for (ix, &x) in grid.xs.iter().enumerate() {
            let i = grid.index(it, ix);
            let psi = &grid.psi[i];
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                t,
                x,
                psi.plus.re,
                psi.plus.im,
                psi.minus.re,
                psi.minus.im,
                grid.density[i],
                grid.current[i],
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Recorded samples of every trajectory, in seed order.
pub fn write_trajectories_csv(path: &Path, trajectories: &[Trajectory]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "trajectory_id,t,x,density,velocity")?;
    for (id, tr) in trajectories.iter().enumerate() {
        for s in &tr.samples {
            writeln!(
                w,
                "{},{:.16e},{:.16e},{:.16e},{:.16e}",
                id, s.t, s.x, s.density, s.velocity
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_ledger_json(
    path: &Path,
    scenario: &Scenario,
    ledger: &ProbabilityLedger,
) -> Result<()> {
    let doc = json!({
        "scenario": scenario.name,
        "P_A": ledger.p_a,
        "P_R": ledger.p_r,
        "P_T": ledger.p_t,
        "P_B": ledger.p_b,
        "identity": ledger.identity.equation(),
        "residual": ledger.residual,
        "grid_meta": {
            "box_half": scenario.box_half,
            "dx": scenario.dx,
            "n_x": scenario.x_nodes().len(),
            "n_t": scenario.n_t,
            "tau_f": scenario.tau_f,
            "quadrature_n": scenario.quadrature_n,
            "edge_density": ledger.edge_density,
        },
    });
    write_json(path, &doc)
}

/// Seed, termination and extrema summary for every trajectory, in seed
/// order.
pub fn write_ensemble_json(path: &Path, trajectories: &[Trajectory]) -> Result<()> {
    let entries: Vec<_> = trajectories
        .iter()
        .enumerate()
        .map(|(id, tr)| {
            json!({
                "trajectory_id": id,
                "seed": tr.seed,
                "termination": tr.termination,
                "samples": tr.samples.len(),
                "min_density": tr.min_density,
                "max_speed": tr.max_speed,
            })
        })
        .collect();
    write_json(path, &json!({ "trajectories": entries }))
}

/// Series report for the Klein barrier: contraction factor, leading terms,
/// closed-form sums and the kappa^2 bound.
pub fn write_appendix_json(
    path: &Path,
    series: &ScatteringSeries,
    kappa2: f64,
    n_terms: u32,
) -> Result<()> {
    let terms: Vec<_> = (0..n_terms)
        .map(|n| {
            let (r, t) = series.term(n);
            json!({ "n": n, "R": r, "T": t })
        })
        .collect();
    let doc = json!({
        "q": series.q,
        "d2": series.d2,
        "b2": series.b2,
        "kappa_squared": kappa2,
        "terms": terms,
        "sum_reflection": series.total_reflection(),
        "sum_transmission": series.total_transmission(),
        "tail_after_terms": series.truncation_tail(n_terms.saturating_sub(1)),
    });
    write_json(path, &doc)
}

fn write_json(path: &Path, doc: &serde_json::Value) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, doc).map_err(std::io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

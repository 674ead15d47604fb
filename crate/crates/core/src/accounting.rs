//! Slice probability integrals and the conservation ledger. Infinite limits
//! are replaced by box edges; the density at the edges is reported so the
//! truncation error is visible next to each residual.

use crate::dirac_modes::{Case, Geometry};
use crate::error::{Error, Result};
use crate::quadrature::simpson_uniform;
use crate::scenario::Scenario;
use crate::wavepacket::FieldGrid;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentityTag {
    /// Klein step: P_A + P_T = P_R.
    Step3,
    /// Klein barrier: P_R + P_T + P_B = P_A.
    Barrier,
    /// Everything else: P_R + P_T = P_A.
    Plain,
}

impl IdentityTag {
    pub fn equation(&self) -> &'static str {
        match self {
            IdentityTag::Step3 => "P_A+P_T=P_R",
            IdentityTag::Barrier => "P_R+P_T+P_B=P_A",
            IdentityTag::Plain => "P_R+P_T=P_A",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProbabilityLedger {
    pub p_a: f64,
    pub p_r: f64,
    pub p_t: f64,
    pub p_b: f64,
    pub identity: IdentityTag,
    /// |lhs - rhs| / max(lhs, rhs) for the tagged identity.
    pub residual: f64,
    /// Largest density at the box edges over the measured slices, relative
    /// to the slice peak; box-truncation diagnostic.
    pub edge_density: f64,
}

/// Composite Simpson integral of J0 over [a, b] at grid slice t. Endpoints
/// snap to the nearest grid nodes. Additive across subintervals split at
/// even node offsets.
pub fn slice_probability(grid: &FieldGrid, t: f64, a: f64, b: f64) -> Result<f64> {
    let it = grid.time_index(t)?;
    let dens = grid.density_slice(it);
    let dx = grid.xs[1] - grid.xs[0];
    let snap = |v: f64| -> Result<usize> {
        let i = ((v - grid.xs[0]) / dx).round() as isize;
        if i < 0 || i as usize >= grid.xs.len() {
            return Err(Error::Config(format!("slice bound {v} outside the box")));
        }
        Ok(i as usize)
    };
    let (ia, ib) = (snap(a)?, snap(b)?);
    if ib < ia {
        return Err(Error::Config("slice bounds reversed".into()));
    }
    Ok(simpson_uniform(&dens[ia..=ib], dx))
}

fn identity_for(scenario: &Scenario) -> Result<IdentityTag> {
    Ok(match (scenario.geometry(), scenario.case()?) {
        (Geometry::Step, Case::Case3) => IdentityTag::Step3,
        (Geometry::Barrier, Case::Case3) => IdentityTag::Barrier,
        _ => IdentityTag::Plain,
    })
}

/// Build the conservation ledger from the t = 0 and t = tau_F slices:
/// P_A over the incident region at t = 0 (the whole box in the free case,
/// where the identity reduces to norm conservation), P_R over x < 0 and P_T
/// beyond the potential at tau_F, and for barriers P_B over the interior at
/// t = 0.
pub fn build_ledger(scenario: &Scenario, grid: &FieldGrid) -> Result<ProbabilityLedger> {
    let bx = scenario.box_half;
    let l = scenario.l;
    let free = scenario.v == 0.0;
    let p_a = if free {
        slice_probability(grid, 0.0, -bx, bx)?
    } else {
        slice_probability(grid, 0.0, -bx, 0.0)?
    };
    let p_r = slice_probability(grid, scenario.tau_f, -bx, 0.0)?;
    let transmit_from = if scenario.geometry() == Geometry::Barrier { l } else { 0.0 };
    let p_t = slice_probability(grid, scenario.tau_f, transmit_from, bx)?;
    let p_b = if scenario.geometry() == Geometry::Barrier {
        slice_probability(grid, 0.0, 0.0, l)?
    } else {
        0.0
    };
    let identity = identity_for(scenario)?;
    let (lhs, rhs) = match identity {
        IdentityTag::Step3 => (p_a + p_t, p_r),
        IdentityTag::Barrier => (p_r + p_t + p_b, p_a),
        IdentityTag::Plain => (p_r + p_t, p_a),
    };
    let residual = (lhs - rhs).abs() / lhs.max(rhs).max(f64::MIN_POSITIVE);

    let it0 = grid.time_index(0.0)?;
    let itf = grid.time_index(scenario.tau_f)?;
    let mut edge: f64 = 0.0;
    let mut peak: f64 = 0.0;
    for it in [it0, itf] {
        let dens = grid.density_slice(it);
        edge = edge.max(dens[0]).max(*dens.last().unwrap());
        peak = peak.max(dens.iter().copied().fold(0.0, f64::max));
    }
    Ok(ProbabilityLedger {
        p_a,
        p_r,
        p_t,
        p_b,
        identity,
        residual,
        edge_density: edge / peak.max(f64::MIN_POSITIVE),
    })
}

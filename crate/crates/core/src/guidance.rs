//! Guiding law quantities: the Dirac current, lab-frame velocity with its
//! dt/ds sign tag, and the second-order acceleration diagnostic a = a_L + a_S.

use crate::error::{Error, Result};
use crate::spinor::Spinor2;
use crate::wavepacket::SynthesizedField;

/// Densities below this are treated as nodes of the wavefunction.
pub const EPS_NODE: f64 = 1e-30;

/// Current components at one point. `velocity` is the raw lab-frame ratio
/// J1/J0; `s_direction` is the sign of dt/ds there (-1 in the Klein-regime
/// potential interior per Feynman-Stueckelberg). The velocity a trajectory
/// actually follows is `effective_velocity` = s_direction * velocity; for the
/// Case 3 region-II plane wave that is +k/(V-E) > 0 while the raw ratio is
/// its negative.
#[derive(Debug, Clone, Copy)]
pub struct CurrentSample {
    pub density: f64,
    pub current: f64,
    pub velocity: f64,
    pub s_direction: f64,
}

impl CurrentSample {
    pub fn effective_velocity(&self) -> f64 {
        self.s_direction * self.velocity
    }
}

/// J0 = |phi_+|^2 + |phi_-|^2, J1 = 2 Re(phi_+^* phi_-), v = J1/J0.
/// The bare-spinor form has no region information: s_direction = +1.
pub fn current(psi: &Spinor2) -> Result<CurrentSample> {
    current_tagged(psi, 1.0)
}

fn current_tagged(psi: &Spinor2, s_direction: f64) -> Result<CurrentSample> {
    let density = psi.density();
    if density < EPS_NODE {
        return Err(Error::NodePoint {
            density,
            floor: EPS_NODE,
        });
    }
    let current = psi.current();
    Ok(CurrentSample {
        density,
        current,
        velocity: current / density,
        s_direction,
    })
}

/// Current at a field point, with s_direction taken from the scenario's
/// region map.
pub fn current_at(field: &SynthesizedField, x: f64, t: f64) -> Result<CurrentSample> {
    let psi = field.evaluate(x, t);
    current_tagged(&psi, field.scenario().time_sign(x))
}

/// Acceleration split from (Psi, dPsi/dx) at a point. Using the equation of
/// motion, d(J1)/dt = -d(J0)/dx - 2m S_y with S_y = psi^dag sigma_y psi
/// (the potential cancels in the bilinears), so along dx/dt = v:
///   a = dv/dt + v dv/dx = a_L + a_S,
///   a_L = [-(1 + v^2) d(J0)/dx + 2 v d(J1)/dx] / J0,
///   a_S = -2m S_y / J0.
pub fn acceleration_from_values(m: f64, psi: &Spinor2, dpsi: &Spinor2) -> Result<(f64, f64)> {
    let rho = psi.density();
    if rho < EPS_NODE {
        return Err(Error::NodePoint {
            density: rho,
            floor: EPS_NODE,
        });
    }
    let v = psi.current() / rho;
    let drho = 2.0 * (psi.plus.conj() * dpsi.plus + psi.minus.conj() * dpsi.minus).re;
    let dj = 2.0 * (dpsi.plus.conj() * psi.minus + psi.plus.conj() * dpsi.minus).re;
    let a_l = (-(1.0 + v * v) * drho + 2.0 * v * dj) / rho;
    let a_s = -2.0 * m * psi.sigma_y() / rho;
    Ok((a_l, a_s))
}

/// Acceleration split at a field point; gradients come from the mode sum in
/// closed form.
pub fn acceleration_decomposition(field: &SynthesizedField, x: f64, t: f64) -> Result<(f64, f64)> {
    let (psi, dpsi) = field.evaluate_with_gradient(x, t);
    acceleration_from_values(field.scenario().m, &psi, &dpsi)
}

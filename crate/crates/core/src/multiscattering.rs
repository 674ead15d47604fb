//! Appendix machinery: the internal-reflection series for the Klein barrier,
//! its geometric closed forms, and the kappa^2 >= 1 bound.
//!
//! The appendix treats |D|^2 and |B|^2 as single-interface probabilities tied
//! to the overall coefficients only through q = |D|^2 |B|^2; q is therefore
//! derived from the closed form q = (|T/A|^2 / 4)^2 (1 - 1/kappa^2)^2 and
//! |D|^2 from requiring the summed series to reproduce |R/A|^2.

use crate::dirac_modes::{Case, Geometry, ScatteringSolution};
use crate::error::{Error, Result};
use serde::Serialize;

/// Contraction factor and per-interface probabilities of the bounce series
/// R(n) = (1 - d2) q^n, T(n) = d2 (1 - b2) q^n.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScatteringSeries {
    pub q: f64,
    /// |D|^2 in the appendix normalization.
    pub d2: f64,
    /// |B|^2 in the appendix normalization.
    pub b2: f64,
}

impl ScatteringSeries {
    pub fn from_solution(sol: &ScatteringSolution) -> Result<Self> {
        if sol.geometry != Geometry::Barrier || sol.case != Case::Case3 {
            return Err(Error::WrongCase {
                required: "barrier geometry in Case 3",
                actual: format!("{:?} {}", sol.geometry, sol.case.name()),
            });
        }
        let a2 = sol.a.norm_sqr();
        let t2 = sol.t.norm_sqr() / a2;
        let r2 = sol.r.norm_sqr() / a2;
        let kappa2 = (sol.kappa * sol.kappa).re;
        let q = (t2 / 4.0) * (t2 / 4.0) * (1.0 - 1.0 / kappa2) * (1.0 - 1.0 / kappa2);
        let d2 = 1.0 - r2 * (1.0 - q);
        let b2 = q / d2;
        Ok(ScatteringSeries { q, d2, b2 })
    }

    pub fn term(&self, n: u32) -> (f64, f64) {
        let qn = self.q.powi(n as i32);
        ((1.0 - self.d2) * qn, self.d2 * (1.0 - self.b2) * qn)
    }

    /// Closed-form sum of all R(n): the total reflection probability.
    pub fn total_reflection(&self) -> f64 {
        (1.0 - self.d2) / (1.0 - self.q)
    }

    /// Closed-form sum of all T(n): the total transmission probability.
    pub fn total_transmission(&self) -> f64 {
        self.d2 * (1.0 - self.b2) / (1.0 - self.q)
    }

    /// Sum of R(j) + T(j) over j <= n; equals 1 - q^{n+1}.
    pub fn partial_sum(&self, n: u32) -> f64 {
        (0..=n).map(|j| { let (r, t) = self.term(j); r + t }).sum()
    }

    /// Exact geometric tail beyond n terms.
    pub fn truncation_tail(&self, n: u32) -> f64 {
        self.q.powi(n as i32 + 1)
    }
}

/// Appendix term pair for a Klein-barrier solution.
pub fn series_terms(sol: &ScatteringSolution, n: u32) -> Result<(f64, f64)> {
    Ok(ScatteringSeries::from_solution(sol)?.term(n))
}

/// kappa^2 = (E+m)/(E-m) * (|E-V|+m)/(|E-V|-m), >= 1 across the Klein
/// regime.
pub fn kappa_bound_check(m: f64, e: f64, v: f64) -> Result<f64> {
    if !(v > 2.0 * m && e > m && e < v - m) {
        return Err(Error::WrongCase {
            required: "Klein regime (V > 2m, m < E < V - m)",
            actual: format!("m={m}, E={e}, V={v}"),
        });
    }
    let w = (e - v).abs();
    let kappa2 = (e + m) / (e - m) * (w + m) / (w - m);
    debug_assert!(kappa2 >= 1.0);
    Ok(kappa2)
}

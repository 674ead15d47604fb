//! Analytic mode solutions of the 1D Dirac equation at a potential step or
//! rectangular barrier, in the two-component reduction
//! `E phi = -i sigma_x phi' + m sigma_z phi + V phi`.
//!
//! Conventions: hbar = c = 1, incident momentum p = +sqrt(E^2 - m^2), interior
//! wavenumber k = +sqrt((E-V)^2 - m^2) on the propagating branch and
//! k = +i sqrt(m^2 - (E-V)^2) on the evanescent branch. The Klein-regime
//! (Case 3) interior uses the time-reversed spatial mode, i.e. a conjugated
//! phase with the same spinor column.

use crate::error::{Error, Result};
use crate::spinor::Spinor2;
use num_complex::Complex64;
use serde::Serialize;

/// Band-edge guard: |E - (V +- m)| below this is rejected as degenerate.
pub const BAND_EDGE_TOL: f64 = 1e-12;
/// Matching system is singular at kappa = -1; guard width on |1 + kappa|.
pub const KAPPA_SINGULAR_TOL: f64 = 1e-14;
/// Above this value of Im(k) * L the barrier interior underflows; solutions
/// saturate to the total-reflection limit and are flagged.
pub const BARRIER_OVERFLOW_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Geometry {
    Step,
    Barrier,
}

/// Spectral case of a scattering configuration, following the usual Klein
/// paradox partition of the energy axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Case {
    /// V = 0; no scattering, superposition of counter-propagating free waves.
    Free,
    /// V + m < E: propagating transmission, kappa > 0.
    Case1,
    /// V - m < E < V + m: evanescent interior, total reflection.
    Case2,
    /// m < E < V - m (requires V > 2m): Klein regime, kappa < 0, interior
    /// solved with the time-reversed mode.
    Case3,
}

impl Case {
    pub fn name(&self) -> &'static str {
        match self {
            Case::Free => "free",
            Case::Case1 => "case1",
            Case::Case2 => "case2",
            Case::Case3 => "case3",
        }
    }
}

/// Mass, potential and energy of a single scattering configuration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhysicalParams {
    pub m: f64,
    /// Step or barrier height, >= 0.
    pub v: f64,
    /// Barrier width; 0 selects step geometry.
    pub l: f64,
    pub e: f64,
}

impl PhysicalParams {
    pub fn new(m: f64, v: f64, l: f64, e: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InvalidParams(format!("mass must be positive, got {m}")));
        }
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidParams(format!(
                "potential height must be non-negative, got {v}"
            )));
        }
        if !(l >= 0.0) || !l.is_finite() {
            return Err(Error::InvalidParams(format!(
                "barrier width must be non-negative, got {l}"
            )));
        }
        if !e.is_finite() || e <= m {
            return Err(Error::InvalidParams(format!(
                "energy must exceed the mass (E = {e}, m = {m})"
            )));
        }
        Ok(PhysicalParams { m, v, l, e })
    }
}

/// Classify the spectral case, rejecting energies within `BAND_EDGE_TOL` of a
/// band edge. The three bands partition (m, inf) for fixed V.
pub fn classify_case(m: f64, e: f64, v: f64) -> Result<Case> {
    if v == 0.0 {
        return Ok(Case::Free);
    }
    for edge in [m, v - m, v + m] {
        if (e - edge).abs() < BAND_EDGE_TOL {
            return Err(Error::DegenerateEnergy {
                energy: e,
                edge,
                tol: BAND_EDGE_TOL,
            });
        }
    }
    if e > v + m {
        Ok(Case::Case1)
    } else if e > v - m {
        Ok(Case::Case2)
    } else {
        Ok(Case::Case3)
    }
}

/// Wavenumber with its branch: real positive (propagating) or positive
/// imaginary (evanescent decay).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Momentum {
    pub value: Complex64,
}

impl Momentum {
    pub fn propagating(p: f64) -> Self {
        Momentum {
            value: Complex64::new(p, 0.0),
        }
    }

    /// Interior wavenumber for local kinetic energy E - V.
    pub fn interior(e: f64, v: f64, m: f64) -> Self {
        let q2 = (e - v) * (e - v) - m * m;
        if q2 >= 0.0 {
            Momentum {
                value: Complex64::new(q2.sqrt(), 0.0),
            }
        } else {
            Momentum {
                value: Complex64::new(0.0, (-q2).sqrt()),
            }
        }
    }

    pub fn is_propagating(&self) -> bool {
        self.value.im == 0.0
    }

    pub fn is_evanescent(&self) -> bool {
        self.value.im > 0.0
    }
}

/// One plane-wave (or evanescent) component: `amplitude * column * exp(i q x)`.
#[derive(Debug, Clone, Copy)]
pub struct ModeWave {
    pub amplitude: Complex64,
    pub column: [Complex64; 2],
    pub wavenumber: Complex64,
}

impl ModeWave {
    pub fn eval(&self, x: f64) -> Spinor2 {
        let phase = (Complex64::i() * self.wavenumber * x).exp();
        Spinor2::new(
            self.amplitude * self.column[0] * phase,
            self.amplitude * self.column[1] * phase,
        )
    }

    /// d/dx of `eval`.
    pub fn eval_dx(&self, x: f64) -> Spinor2 {
        let iq = Complex64::i() * self.wavenumber;
        let phase = iq * (iq * x).exp();
        Spinor2::new(
            self.amplitude * self.column[0] * phase,
            self.amplitude * self.column[1] * phase,
        )
    }
}

/// Time reversal of a spatial mode: the phase is conjugated while the spinor
/// column is kept. Propagating e^{ikx} -> e^{-ikx}; an evanescent mode keeps
/// its decay direction. Involutive, and the value at x = 0 is unchanged.
pub fn time_reverse_mode(mode: &ModeWave) -> ModeWave {
    ModeWave {
        amplitude: mode.amplitude,
        column: mode.column,
        wavenumber: -mode.wavenumber.conj(),
    }
}

/// Positive-energy free column (1, p/(E+m)); `p` may be signed.
fn free_column(p: Complex64, e: f64, m: f64) -> [Complex64; 2] {
    [Complex64::new(1.0, 0.0), p / (e + m)]
}

/// Negative-energy free column (p/(E-m), 1); bounded as E -> -m.
fn negative_column(p: Complex64, e: f64, m: f64) -> [Complex64; 2] {
    [p / (e - m), Complex64::new(1.0, 0.0)]
}

/// Interior column (1, k/(E-V+m)); `k` may be signed or imaginary.
fn interior_column(k: Complex64, e: f64, v: f64, m: f64) -> [Complex64; 2] {
    [Complex64::new(1.0, 0.0), k / (e - v + m)]
}

/// Coefficients and kinematics of one boundary-matched scattering solution.
#[derive(Debug, Clone, Copy)]
pub struct ScatteringSolution {
    pub geometry: Geometry,
    pub case: Case,
    pub params: PhysicalParams,
    /// Incident momentum, real > 0.
    pub p: Momentum,
    /// Interior wavenumber.
    pub k: Momentum,
    /// kappa = (k/p) (E+m)/(E-V+m); real for Cases 1 and 3 (negative in 3),
    /// imaginary for Case 2.
    pub kappa: Complex64,
    pub a: Complex64,
    pub r: Complex64,
    pub t: Complex64,
    /// Interior coefficients; zero for step geometry.
    pub b: Complex64,
    pub d: Complex64,
    /// True when Im(k) * L exceeded the overflow guard and the solution was
    /// saturated to the total-reflection limit.
    pub evanescent_saturated: bool,
}

impl ScatteringSolution {
    /// Whether the interior spatial mode is the time-reversed one.
    pub fn time_reversed(&self) -> bool {
        self.case == Case::Case3
    }
}

fn kinematics(params: &PhysicalParams) -> Result<(Momentum, Momentum, Complex64)> {
    let PhysicalParams { m, v, e, .. } = *params;
    let p = Momentum::propagating((e * e - m * m).sqrt());
    let k = Momentum::interior(e, v, m);
    let kappa = (k.value / p.value) * ((e + m) / (e - v + m));
    if (kappa + 1.0).norm() < KAPPA_SINGULAR_TOL {
        return Err(Error::KappaSingular);
    }
    Ok((p, k, kappa))
}

/// Solve the step problem: continuity of both spinor components at x = 0
/// gives A + R = T and A - R = kappa T.
pub fn step_solution(params: &PhysicalParams, a: Complex64) -> Result<ScatteringSolution> {
    let case = classify_case(params.m, params.e, params.v)?;
    if case == Case::Free {
        return Err(Error::WrongCase {
            required: "a step with V > 0",
            actual: "free configuration (V = 0)".into(),
        });
    }
    let (p, k, kappa) = kinematics(params)?;
    let r = a * (1.0 - kappa) / (1.0 + kappa);
    let t = a * 2.0 / (1.0 + kappa);
    Ok(ScatteringSolution {
        geometry: Geometry::Step,
        case,
        params: *params,
        p,
        k,
        kappa,
        a,
        r,
        t,
        b: Complex64::ZERO,
        d: Complex64::ZERO,
        evanescent_saturated: false,
    })
}

/// Solve the barrier problem by matching at x = 0 and x = L. The interior
/// carries B and D components (time-reversed phases in Case 3). Closed forms
/// are arranged so only decaying exponentials appear on the evanescent branch.
pub fn barrier_solution(params: &PhysicalParams, a: Complex64) -> Result<ScatteringSolution> {
    let case = classify_case(params.m, params.e, params.v)?;
    if case == Case::Free {
        return Err(Error::WrongCase {
            required: "a barrier with V > 0",
            actual: "free configuration (V = 0)".into(),
        });
    }
    if params.l <= 0.0 {
        return Err(Error::InvalidParams(
            "barrier solution requires L > 0".into(),
        ));
    }
    let (p, k, kappa) = kinematics(params)?;
    let l = params.l;
    let saturated = k.value.im * l > BARRIER_OVERFLOW_LIMIT;

    // phi = exp(i k_B L) where k_B is the wavenumber of the B component:
    // +k for Cases 1-2, -k (time-reversed) for Case 3. |phi| <= 1 on the
    // evanescent branch, so phi^2 never overflows; at saturation phi
    // underflows to 0 and the closed forms collapse to the step limit.
    let k_b = if case == Case::Case3 { -k.value } else { k.value };
    let phi = (Complex64::i() * k_b * l).exp();
    let phi2 = phi * phi;
    let one = Complex64::new(1.0, 0.0);
    let den = (one + kappa).powi(2) - (one - kappa).powi(2) * phi2;
    if den.norm() == 0.0 {
        return Err(Error::KappaSingular);
    }
    let r = a * (one - kappa * kappa) * (one - phi2) / den;
    let e_mipl = (-Complex64::i() * p.value * l).exp();
    let t = a * 4.0 * kappa * e_mipl * phi / den;
    // B from the x = 0 interface is O(A) with no deep cancellation; D from
    // the x = L interface as a product, because the difference form
    // ((A+R) - (A-R)/kappa)/2 cancels to the noise floor when the true D is
    // exponentially small (deep evanescent barrier) and the growing mode
    // then amplifies that noise.
    let b = ((a + r) + (a - r) / kappa) * 0.5;
    let d = -b * phi2 * (one - kappa) / (one + kappa);
    Ok(ScatteringSolution {
        geometry: Geometry::Barrier,
        case,
        params: *params,
        p,
        k,
        kappa,
        a,
        r,
        t,
        b,
        d,
        evanescent_saturated: saturated,
    })
}

/// Number of pairs produced at a Klein step per incident packet, in the
/// Feynman-Stueckelberg bookkeeping: -4 kappa / (1 - kappa)^2 * |R|^2.
pub fn pair_production_count(sol: &ScatteringSolution) -> Result<f64> {
    if sol.geometry != Geometry::Step || sol.case != Case::Case3 {
        return Err(Error::WrongCase {
            required: "step geometry in Case 3",
            actual: format!("{:?} {}", sol.geometry, sol.case.name()),
        });
    }
    let kappa = sol.kappa.re;
    Ok(-4.0 * kappa / ((1.0 - kappa) * (1.0 - kappa)) * sol.r.norm_sqr())
}

/// Piecewise regions of the scattering geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    I,
    II,
    III,
}

/// Mode lists per region for field synthesis. `boundary` is 0 for the left
/// interface; `right_boundary` is L for barriers, irrelevant for steps.
#[derive(Debug, Clone)]
pub struct RegionModes {
    pub geometry: Geometry,
    pub right_boundary: f64,
    pub region_i: Vec<ModeWave>,
    pub region_ii: Vec<ModeWave>,
    pub region_iii: Vec<ModeWave>,
}

impl RegionModes {
    pub fn region_at(&self, x: f64) -> Region {
        match self.geometry {
            Geometry::Step => {
                if x < 0.0 {
                    Region::I
                } else {
                    Region::II
                }
            }
            Geometry::Barrier => {
                if x < 0.0 {
                    Region::I
                } else if x < self.right_boundary {
                    Region::II
                } else {
                    Region::III
                }
            }
        }
    }

    pub fn modes_at(&self, x: f64) -> &[ModeWave] {
        match self.region_at(x) {
            Region::I => &self.region_i,
            Region::II => &self.region_ii,
            Region::III => &self.region_iii,
        }
    }
}

/// Expand a solution into per-region mode waves. Case 3 interiors come out
/// time-reversed, matching the phases used by the closed forms.
pub fn region_modes(sol: &ScatteringSolution) -> RegionModes {
    let PhysicalParams { m, v, e, l } = sol.params;
    let p = sol.p.value;
    let k = sol.k.value;
    let region_i = vec![
        ModeWave {
            amplitude: sol.a,
            column: free_column(p, e, m),
            wavenumber: p,
        },
        ModeWave {
            amplitude: sol.r,
            column: free_column(-p, e, m),
            wavenumber: -p,
        },
    ];
    let reverse = sol.time_reversed();
    let fwd = |amplitude, column, wavenumber| {
        let mode = ModeWave {
            amplitude,
            column,
            wavenumber,
        };
        if reverse {
            time_reverse_mode(&mode)
        } else {
            mode
        }
    };
    match sol.geometry {
        Geometry::Step => RegionModes {
            geometry: Geometry::Step,
            right_boundary: 0.0,
            region_i,
            region_ii: vec![fwd(sol.t, interior_column(k, e, v, m), k)],
            region_iii: Vec::new(),
        },
        Geometry::Barrier => RegionModes {
            geometry: Geometry::Barrier,
            right_boundary: l,
            region_i,
            region_ii: vec![
                fwd(sol.b, interior_column(k, e, v, m), k),
                fwd(sol.d, interior_column(-k, e, v, m), -k),
            ],
            region_iii: vec![ModeWave {
                amplitude: sol.t,
                column: free_column(p, e, m),
                wavenumber: p,
            }],
        },
    }
}

/// Free counter-propagating pair with unit coefficients (A = R = amplitude),
/// valid on the whole line. Accepts either energy band: |e| > m; negative
/// energies use the lower-dominated column so components stay bounded.
pub fn free_mode_pair(m: f64, e: f64, amplitude: Complex64) -> Result<Vec<ModeWave>> {
    if e.abs() <= m {
        return Err(Error::InvalidParams(format!(
            "free mode requires |E| > m, got E = {e}"
        )));
    }
    let p = Complex64::new((e * e - m * m).sqrt(), 0.0);
    let (col_fwd, col_bwd) = if e > 0.0 {
        (free_column(p, e, m), free_column(-p, e, m))
    } else {
        (negative_column(p, e, m), negative_column(-p, e, m))
    };
    Ok(vec![
        ModeWave {
            amplitude,
            column: col_fwd,
            wavenumber: p,
        },
        ModeWave {
            amplitude,
            column: col_bwd,
            wavenumber: -p,
        },
    ])
}

//! Gaussian wave packets built by Gauss-Legendre quadrature of mode solutions
//! over the case's energy window: Psi(x,t) = sum_j w_j G(p(E_j)) phi_j(x)
//! exp(-i E_j t), with phi_j the boundary-matched stationary solution.

use crate::dirac_modes::{
    barrier_solution, free_mode_pair, region_modes, step_solution, Case, Geometry, RegionModes,
};
use crate::error::{Error, Result};
use crate::quadrature::{simpson_uniform, GaussLegendre};
use crate::scenario::Scenario;
use crate::spinor::Spinor2;
use num_complex::Complex64;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct PacketParams {
    pub k0: f64,
    pub x0: f64,
    pub lambda: f64,
}

impl PacketParams {
    pub fn of(scenario: &Scenario) -> Self {
        PacketParams {
            k0: scenario.k0,
            x0: scenario.x0,
            lambda: scenario.lambda,
        }
    }
}

/// G(p) = exp(-lambda^2 (p - K0)^2 / 2 - i p X0).
pub fn gaussian_weight(p: f64, packet: &PacketParams) -> Complex64 {
    let d = p - packet.k0;
    let mag = (-0.5 * packet.lambda * packet.lambda * d * d).exp();
    let phase = Complex64::new(0.0, -p * packet.x0).exp();
    mag * phase
}

/// Open energy interval with its quadrature order.
#[derive(Debug, Clone, Copy)]
pub struct EnergyDomain {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl EnergyDomain {
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        GaussLegendre::new(self.n).mapped(self.lo, self.hi).collect()
    }
}

/// One quadrature node: energy, combined weight w_j G(p_j), and the matched
/// mode set.
struct FieldNode {
    energy: f64,
    weight: Complex64,
    modes: RegionModes,
}

/// The synthesized packet as an exact mode sum, evaluable anywhere.
pub struct SynthesizedField {
    scenario: Scenario,
    nodes: Vec<FieldNode>,
}

fn build_nodes(scenario: &Scenario, order: usize) -> Result<Vec<FieldNode>> {
    let packet = PacketParams::of(scenario);
    let a = Complex64::new(scenario.amplitude, 0.0);
    let case = scenario.case()?;
    let mut nodes = Vec::new();
    for (lo, hi) in scenario.energy_domains()? {
        let domain = EnergyDomain { lo, hi, n: order };
        for (e, w) in domain.nodes() {
            let p = (e * e - scenario.m * scenario.m).sqrt();
            let weight = w * gaussian_weight(p, &packet);
            let modes = if case == Case::Free {
                let pair = free_mode_pair(scenario.m, e, a)?;
                // Whole-line mode set; both region lists alias it so the
                // piecewise lookup is a no-op.
                RegionModes {
                    geometry: Geometry::Step,
                    right_boundary: 0.0,
                    region_i: pair.clone(),
                    region_ii: pair,
                    region_iii: Vec::new(),
                }
            } else {
                let params = scenario.params_at(e)?;
                let sol = match scenario.geometry() {
                    Geometry::Step => step_solution(&params, a)?,
                    Geometry::Barrier => barrier_solution(&params, a)?,
                };
                region_modes(&sol)
            };
            nodes.push(FieldNode {
                energy: e,
                weight,
                modes,
            });
        }
    }
    Ok(nodes)
}

impl SynthesizedField {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        let nodes = build_nodes(scenario, scenario.quadrature_n)?;
        Ok(SynthesizedField {
            scenario: scenario.clone(),
            nodes,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Exact quadrature sum at an arbitrary spacetime point.
    pub fn evaluate(&self, x: f64, t: f64) -> Spinor2 {
        let mut acc = Spinor2::ZERO;
        for node in &self.nodes {
            let phase = Complex64::new(0.0, -node.energy * t).exp();
            let mut s = Spinor2::ZERO;
            for mode in node.modes.modes_at(x) {
                s += mode.eval(x);
            }
            acc += s * (node.weight * phase);
        }
        acc
    }

    /// (Psi, dPsi/dx), both exact mode sums.
    pub fn evaluate_with_gradient(&self, x: f64, t: f64) -> (Spinor2, Spinor2) {
        let mut acc = Spinor2::ZERO;
        let mut grad = Spinor2::ZERO;
        for node in &self.nodes {
            let phase = node.weight * Complex64::new(0.0, -node.energy * t).exp();
            let mut s = Spinor2::ZERO;
            let mut ds = Spinor2::ZERO;
            for mode in node.modes.modes_at(x) {
                s += mode.eval(x);
                ds += mode.eval_dx(x);
            }
            acc += s * phase;
            grad += ds * phase;
        }
        (acc, grad)
    }

    /// Sample the field on the scenario grid. Work is parallel over x with a
    /// precomputed time-phase table; per-node summation order is fixed so
    /// results are independent of thread count.
    pub fn grid(&self) -> FieldGrid {
        let xs = self.scenario.x_nodes();
        let ts = self.scenario.t_nodes();
        self.grid_on(&xs, &ts)
    }

    fn grid_on(&self, xs: &[f64], ts: &[f64]) -> FieldGrid {
        let nn = self.nodes.len();
        let nt = ts.len();
        let mut phases = vec![Complex64::ZERO; nn * nt];
        for (j, node) in self.nodes.iter().enumerate() {
            for (i, &t) in ts.iter().enumerate() {
                phases[j * nt + i] = Complex64::new(0.0, -node.energy * t).exp();
            }
        }
        let columns: Vec<Vec<Spinor2>> = xs
            .par_iter()
            .map(|&x| {
                let weighted: Vec<Spinor2> = self
                    .nodes
                    .iter()
                    .map(|node| {
                        let mut s = Spinor2::ZERO;
                        for mode in node.modes.modes_at(x) {
                            s += mode.eval(x);
                        }
                        s * node.weight
                    })
                    .collect();
                (0..nt)
                    .map(|i| {
                        let mut acc = Spinor2::ZERO;
                        for (j, s) in weighted.iter().enumerate() {
                            acc += *s * phases[j * nt + i];
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let nx = xs.len();
        let mut psi = vec![Spinor2::ZERO; nx * nt];
        for (ix, col) in columns.iter().enumerate() {
            for (it, s) in col.iter().enumerate() {
                psi[it * nx + ix] = *s;
            }
        }
        let density: Vec<f64> = psi.iter().map(Spinor2::density).collect();
        let current: Vec<f64> = psi.iter().map(Spinor2::current).collect();
        FieldGrid {
            xs: xs.to_vec(),
            ts: ts.to_vec(),
            psi,
            density,
            current,
        }
    }

    /// Self-check: rebuild at doubled order and compare total probability on
    /// the t = 0 slice.
    pub fn quadrature_check(&self) -> Result<()> {
        let xs = self.scenario.x_nodes();
        let base = self.slice_norm(&xs);
        let doubled = SynthesizedField {
            scenario: self.scenario.clone(),
            nodes: build_nodes(&self.scenario, self.scenario.quadrature_n * 2)?,
        };
        let refined = doubled.slice_norm(&xs);
        let rel = (base - refined).abs() / refined.max(f64::MIN_POSITIVE);
        if rel > self.scenario.quadrature_tol {
            return Err(Error::QuadratureUnderResolved {
                observed: rel,
                tol: self.scenario.quadrature_tol,
            });
        }
        Ok(())
    }

    fn slice_norm(&self, xs: &[f64]) -> f64 {
        let row: Vec<f64> = xs
            .par_iter()
            .map(|&x| self.evaluate(x, 0.0).density())
            .collect();
        simpson_uniform(&row, self.scenario.dx)
    }
}

/// Sampled field with derived density J0 and current J1 per node, row-major
/// in t then x.
pub struct FieldGrid {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub psi: Vec<Spinor2>,
    pub density: Vec<f64>,
    pub current: Vec<f64>,
}

impl FieldGrid {
    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn nt(&self) -> usize {
        self.ts.len()
    }

    pub fn index(&self, it: usize, ix: usize) -> usize {
        it * self.nx() + ix
    }

    pub fn density_slice(&self, it: usize) -> &[f64] {
        let nx = self.nx();
        &self.density[it * nx..(it + 1) * nx]
    }

    /// Index of the grid time nearest to t; t must lie within half a slice
    /// spacing of a node.
    pub fn time_index(&self, t: f64) -> Result<usize> {
        let step = if self.ts.len() > 1 {
            self.ts[1] - self.ts[0]
        } else {
            1.0
        };
        let i = ((t - self.ts[0]) / step).round() as isize;
        // Tolerance covers float noise on the node value, not mid-cell times.
        if i < 0 || i as usize >= self.ts.len() || (self.ts[i as usize] - t).abs() > 1e-6 * step {
            return Err(Error::Config(format!("time {t} is not on the grid")));
        }
        Ok(i as usize)
    }
}

/// Build the field and sample the scenario grid, running the quadrature
/// self-check first.
pub fn synthesize_field(scenario: &Scenario) -> Result<(SynthesizedField, FieldGrid)> {
    let field = SynthesizedField::new(scenario)?;
    field.quadrature_check()?;
    let grid = field.grid();
    Ok((field, grid))
}

/// One-off evaluation without grid sampling.
pub fn evaluate_field(scenario: &Scenario, x: f64, t: f64) -> Result<Spinor2> {
    Ok(SynthesizedField::new(scenario)?.evaluate(x, t))
}

//! Bohmian trajectory integration through the packet's velocity field.
//!
//! Integration runs in lab time with classic RK4 stages on dx/dt = v_eff,
//! where v_eff = eta(x) J1/J0 and eta = -1 inside a Klein-regime potential
//! (the Feynman-Stueckelberg dt/ds flip). Backward branches start on the
//! tau_F slice and step t downward; when a branch crosses out of the
//! negative-energy region the stepping sign flips, which is what draws the
//! "V" of pair creation. Outer steps land on exact multiples of the base
//! step so every trajectory records on one shared time grid.

use crate::dirac_modes::{step_solution, Case, Geometry};
use crate::error::{Error, Result};
use crate::scenario::{SamplingMode, Scenario};
use crate::wavepacket::SynthesizedField;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

/// Density below which the integrator refines and ultimately stalls.
pub const DENSITY_FLOOR: f64 = 1e-8;
/// Per-step velocity spread that triggers halving.
pub const VELOCITY_JUMP: f64 = 0.1;
/// Smallest lab-time step before declaring a node stall.
pub const DT_MIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedLabel {
    Incident,
    PairBranch,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Seed {
    pub x0: f64,
    /// 0 or tau_F.
    pub t0: f64,
    pub direction: Direction,
    pub label: SeedLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    ReachedTimeBound,
    LeftBox,
    NodeStall,
}

#[derive(Debug, Clone, Copy)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub density: f64,
    /// Effective lab velocity dx/dt at the sample.
    pub velocity: f64,
    /// True when t is an exact outer-step multiple shared by all
    /// trajectories of the run.
    pub grid_aligned: bool,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub seed: Seed,
    pub samples: Vec<Sample>,
    pub termination: Termination,
    pub min_density: f64,
    pub max_speed: f64,
}

impl Trajectory {
    /// Maximal runs of samples with a single t direction. A pair-creation
    /// branch has two: backward into the potential, forward out of it.
    pub fn monotone_segments(&self) -> Vec<&[Sample]> {
        let s = &self.samples;
        if s.len() < 2 {
            return vec![&s[..]];
        }
        let mut out = Vec::new();
        let mut start = 0;
        let mut dir = (s[1].t - s[0].t).signum();
        for i in 1..s.len() - 1 {
            let d = (s[i + 1].t - s[i].t).signum();
            if d != dir && d != 0.0 {
                out.push(&s[start..=i]);
                start = i;
                dir = d;
            }
        }
        out.push(&s[start..]);
        out
    }
}

enum StepOutcome {
    /// Landed on the target time.
    Advanced(f64),
    /// Crossed the eta boundary at (t, x); stepping sign must flip.
    Flipped(f64, f64),
    /// Step size underflowed.
    Stalled,
}

struct Stepper<'a> {
    field: &'a SynthesizedField,
    scenario: &'a Scenario,
    min_density: f64,
    max_speed: f64,
}

impl<'a> Stepper<'a> {
    /// Effective velocity at a point, requiring the region sign to match
    /// `eta0`. None signals a refinement trigger.
    fn vel(&mut self, t: f64, x: f64, eta0: f64) -> Option<f64> {
        if self.scenario.time_sign(x) != eta0 {
            return None;
        }
        let psi = self.field.evaluate(x, t);
        let rho = psi.density();
        if !(rho >= DENSITY_FLOOR) {
            return None;
        }
        if rho < self.min_density {
            self.min_density = rho;
        }
        let v = eta0 * psi.current() / rho;
        v.is_finite().then_some(v)
    }

    /// Advance x over the signed lab-time interval [t_a, t_a + h] by
    /// bisecting RK4. Flips are resolved with an Euler micro-step.
    fn advance(&mut self, t_a: f64, x_a: f64, h: f64) -> StepOutcome {
        let eta0 = self.scenario.time_sign(x_a);
        let floor = h.abs() <= 2.0 * DT_MIN;
        let trial = self.rk4(t_a, x_a, h, eta0);
        match trial {
            Some(x_b) if self.scenario.time_sign(x_b) == eta0 => {
                let speed = ((x_b - x_a) / h).abs();
                if speed > self.max_speed {
                    self.max_speed = speed;
                }
                return StepOutcome::Advanced(x_b);
            }
            _ => {}
        }
        if floor {
            // Either a region boundary sits inside this sliver or the field
            // is genuinely irregular here. Try to inch across by Euler.
            if let Some(v) = self.vel(t_a, x_a, eta0) {
                let x_b = x_a + v * h;
                if self.scenario.time_sign(x_b) != eta0 {
                    return StepOutcome::Flipped(t_a + h, x_b);
                }
                return StepOutcome::Advanced(x_b);
            }
            return StepOutcome::Stalled;
        }
        let half = 0.5 * h;
        match self.advance(t_a, x_a, half) {
            StepOutcome::Advanced(x_m) => match self.advance(t_a + half, x_m, half) {
                StepOutcome::Advanced(x_b) => StepOutcome::Advanced(x_b),
                other => other,
            },
            other => other,
        }
    }

    /// One RK4 step; None when any stage trips a refinement trigger
    /// (region mismatch, low density, velocity jump).
    fn rk4(&mut self, t: f64, x: f64, h: f64, eta0: f64) -> Option<f64> {
        let k1 = self.vel(t, x, eta0)?;
        let k2 = self.vel(t + 0.5 * h, x + 0.5 * h * k1, eta0)?;
        let k3 = self.vel(t + 0.5 * h, x + 0.5 * h * k2, eta0)?;
        let k4 = self.vel(t + h, x + h * k3, eta0)?;
        let spread = [k2, k3, k4]
            .iter()
            .map(|k| (k - k1).abs())
            .fold(0.0, f64::max);
        if spread > VELOCITY_JUMP {
            return None;
        }
        Some(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
    }
}

/// Next integer outer-step index strictly beyond t in direction sigma.
fn next_index(t: f64, sigma: f64, dt: f64) -> i64 {
    let n = t / dt;
    if sigma > 0.0 {
        (n + 1e-9).floor() as i64 + 1
    } else {
        (n - 1e-9).ceil() as i64 - 1
    }
}

/// Integrate one trajectory. The stepping sign starts from the seed
/// direction and flips when the path crosses an eta boundary; recorded
/// samples land on exact multiples of dt * record_every.
pub fn integrate(seed: &Seed, field: &SynthesizedField) -> Trajectory {
    let sc = field.scenario().clone();
    let dt = sc.dt;
    let every = sc.record_every as i64;
    let mut stepper = Stepper {
        field,
        scenario: &sc,
        min_density: f64::INFINITY,
        max_speed: 0.0,
    };
    let mut sigma: f64 = match seed.direction {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    };
    let mut t = seed.t0;
    let mut x = seed.x0;
    let mut samples = Vec::new();
    let push = |stepper: &mut Stepper, t: f64, x: f64, aligned: bool, samples: &mut Vec<Sample>| {
        let psi = stepper.field.evaluate(x, t);
        let rho = psi.density();
        if rho < stepper.min_density {
            stepper.min_density = rho;
        }
        let v = if rho > 0.0 {
            sc.time_sign(x) * psi.current() / rho
        } else {
            0.0
        };
        samples.push(Sample {
            t,
            x,
            density: rho,
            velocity: v,
            grid_aligned: aligned,
        });
    };
    push(&mut stepper, t, x, t == 0.0, &mut samples);
    let termination = loop {
        let n = next_index(t, sigma, dt);
        let mut target = n as f64 * dt;
        let mut at_bound = false;
        if sigma > 0.0 && target >= sc.tau_f {
            target = sc.tau_f;
            at_bound = true;
        } else if sigma < 0.0 && target <= 0.0 {
            target = 0.0;
            at_bound = true;
        }
        match stepper.advance(t, x, target - t) {
            StepOutcome::Advanced(x1) => {
                t = target;
                x = x1;
                if at_bound {
                    push(&mut stepper, t, x, sigma < 0.0, &mut samples);
                    break Termination::ReachedTimeBound;
                }
                if x.abs() >= sc.box_half {
                    push(&mut stepper, t, x, n % every == 0, &mut samples);
                    break Termination::LeftBox;
                }
                if n % every == 0 {
                    push(&mut stepper, t, x, true, &mut samples);
                }
            }
            StepOutcome::Flipped(t1, x1) => {
                t = t1;
                x = x1;
                sigma = -sigma;
                push(&mut stepper, t, x, false, &mut samples);
            }
            StepOutcome::Stalled => {
                push(&mut stepper, t, x, false, &mut samples);
                break Termination::NodeStall;
            }
        }
    };
    Trajectory {
        seed: *seed,
        samples,
        termination,
        min_density: stepper.min_density,
        max_speed: stepper.max_speed,
    }
}

/// Integrate an ensemble in parallel; output order follows seed order, so
/// results are independent of thread count.
pub fn integrate_ensemble(seeds: &[Seed], field: &SynthesizedField) -> Vec<Trajectory> {
    seeds.par_iter().map(|s| integrate(s, field)).collect()
}

fn splitmix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Piecewise-linear inverse CDF over a sampled density slice.
struct SliceCdf {
    xs: Vec<f64>,
    cum: Vec<f64>,
    total: f64,
}

impl SliceCdf {
    fn build(field: &SynthesizedField, t: f64, window: (f64, f64)) -> Result<SliceCdf> {
        let sc = field.scenario();
        let xs: Vec<f64> = sc
            .x_nodes()
            .into_iter()
            .filter(|&x| x >= window.0 && x <= window.1)
            .collect();
        if xs.len() < 2 {
            return Err(Error::EmptySlice {
                integral: 0.0,
                tol: 1e-12,
            });
        }
        let dens: Vec<f64> = xs.par_iter().map(|&x| field.evaluate(x, t).density()).collect();
        let mut cum = vec![0.0; xs.len()];
        for i in 1..xs.len() {
            cum[i] = cum[i - 1] + 0.5 * (dens[i] + dens[i - 1]) * (xs[i] - xs[i - 1]);
        }
        let total = *cum.last().unwrap();
        if total < 1e-12 {
            return Err(Error::EmptySlice {
                integral: total,
                tol: 1e-12,
            });
        }
        Ok(SliceCdf { xs, cum, total })
    }

    fn invert(&self, u: f64) -> f64 {
        let target = u * self.total;
        let i = self.cum.partition_point(|&c| c < target).clamp(1, self.cum.len() - 1);
        let (c0, c1) = (self.cum[i - 1], self.cum[i]);
        let frac = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.5 };
        self.xs[i - 1] + frac * (self.xs[i] - self.xs[i - 1])
    }
}

/// Fraction of the ensemble seeded on the tau_F region-II slice for a Klein
/// step: -kappa |T|^2 / |R|^2 evaluated at the mean energy.
pub fn pair_branch_weight(scenario: &Scenario) -> Result<f64> {
    let params = scenario.params_at(scenario.mean_energy())?;
    let sol = step_solution(&params, scenario.amplitude.into())?;
    if sol.case != Case::Case3 {
        return Ok(0.0);
    }
    let w = -sol.kappa.re * sol.t.norm_sqr() / sol.r.norm_sqr();
    Ok(w.clamp(0.0, 1.0))
}

/// Draw ensemble seeds. Gaussian mode: x0 ~ Normal(packet center, lambda).
/// Born mode: inverse-CDF sampling of the slice density. For the Klein step
/// the ensemble splits between the t = 0 incident slice and the tau_F
/// region-II slice with weights |A|^2/|R|^2 and -kappa|T|^2/|R|^2; each seed
/// derives its own RNG stream, so the draw is schedule-independent.
pub fn sample_ensemble(field: &SynthesizedField, n: usize, rng_seed: u64) -> Result<Vec<Seed>> {
    let sc = field.scenario();
    if n == 0 {
        return Err(Error::InvalidParams("ensemble size must be positive".into()));
    }
    let klein_step = sc.geometry() == Geometry::Step && sc.case()? == Case::Case3;
    let p_pair = if klein_step { pair_branch_weight(sc)? } else { 0.0 };

    let incident_window = if sc.v == 0.0 {
        (-sc.box_half, sc.box_half)
    } else {
        (-sc.box_half, 0.0)
    };
    let pair_window = (0.0, sc.box_half);
    let incident_cdf = if sc.sampling == SamplingMode::Born {
        Some(SliceCdf::build(field, 0.0, incident_window)?)
    } else {
        None
    };
    let pair_cdf = if sc.sampling == SamplingMode::Born && klein_step {
        Some(SliceCdf::build(field, sc.tau_f, pair_window)?)
    } else {
        None
    };
    // Center of the region-II packet at tau_F from mean-energy kinematics.
    let pair_center = if klein_step {
        let e = sc.mean_energy();
        let k = ((e - sc.v) * (e - sc.v) - sc.m * sc.m).sqrt();
        let hit = sc.x0.abs() / sc.mean_velocity();
        (sc.tau_f - hit) * k / (sc.v - e)
    } else {
        0.0
    };

    let mut seeds = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix(rng_seed, i as u64));
        let pair = klein_step && rng.random::<f64>() < p_pair;
        let (t0, window, center, cdf) = if pair {
            (sc.tau_f, pair_window, pair_center, &pair_cdf)
        } else {
            (0.0, incident_window, sc.x0, &incident_cdf)
        };
        let x0 = match sc.sampling {
            SamplingMode::Born => cdf.as_ref().unwrap().invert(rng.random::<f64>()),
            SamplingMode::Gaussian => {
                let normal = Normal::new(center, sc.lambda).unwrap();
                let mut draw = f64::NAN;
                for _ in 0..1024 {
                    let x = normal.sample(&mut rng);
                    if x > window.0
                        && x < window.1
                        && field.evaluate(x, t0).density() >= DENSITY_FLOOR
                    {
                        draw = x;
                        break;
                    }
                }
                if draw.is_nan() {
                    return Err(Error::EmptySlice {
                        integral: 0.0,
                        tol: 1e-12,
                    });
                }
                draw
            }
        };
        seeds.push(Seed {
            x0,
            t0,
            direction: if pair { Direction::Backward } else { Direction::Forward },
            label: if pair { SeedLabel::PairBranch } else { SeedLabel::Incident },
        });
    }
    Ok(seeds)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CrossingViolation {
    pub t: f64,
    pub id_a: usize,
    pub id_b: usize,
    pub x_a: f64,
    pub x_b: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossingReport {
    pub compared_pairs: usize,
    pub checked_samples: usize,
    pub violations: Vec<CrossingViolation>,
}

impl CrossingReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verify that same-direction trajectories never swap x-order at shared
/// grid-aligned times. Mixed-direction paths are split into monotone
/// segments first; ordering is compared within each direction class.
pub fn check_no_crossing(trajectories: &[Trajectory]) -> CrossingReport {
    // (owner id, direction, samples keyed by exact time bits)
    let mut segments: Vec<(usize, f64, Vec<(u64, f64)>)> = Vec::new();
    for (id, traj) in trajectories.iter().enumerate() {
        for seg in traj.monotone_segments() {
            let aligned: Vec<(u64, f64)> = seg
                .iter()
                .filter(|s| s.grid_aligned)
                .map(|s| (s.t.to_bits(), s.x))
                .collect();
            if aligned.len() < 2 {
                continue;
            }
            let dir = (f64::from_bits(aligned[1].0) - f64::from_bits(aligned[0].0)).signum();
            segments.push((id, dir, aligned));
        }
    }
    let mut report = CrossingReport {
        compared_pairs: 0,
        checked_samples: 0,
        violations: Vec::new(),
    };
    for a in 0..segments.len() {
        for b in a + 1..segments.len() {
            if segments[a].1 != segments[b].1 || segments[a].0 == segments[b].0 {
                continue;
            }
            report.compared_pairs += 1;
            let map_b: std::collections::HashMap<u64, f64> =
                segments[b].2.iter().copied().collect();
            let mut order: f64 = 0.0;
            for &(tb, xa) in &segments[a].2 {
                let Some(&xb) = map_b.get(&tb) else { continue };
                report.checked_samples += 1;
                let rel = (xa - xb).signum();
                if rel == 0.0 {
                    continue;
                }
                if order == 0.0 {
                    order = rel;
                } else if rel != order && report.violations.len() < 16 {
                    report.violations.push(CrossingViolation {
                        t: f64::from_bits(tb),
                        id_a: segments[a].0,
                        id_b: segments[b].0,
                        x_a: xa,
                        x_b: xb,
                    });
                }
            }
        }
    }
    report
}

//! Convergence and statistical properties of the synthesized field and the
//! trajectory integrator on shrunk scenarios.

mod common;

use klein_pilot::scenario::{SamplingMode, Scenario};
use klein_pilot::trajectories::{integrate, sample_ensemble, Direction, Seed, SeedLabel};
use klein_pilot::wavepacket::SynthesizedField;

fn quick(name: &str) -> Scenario {
    let mut s = Scenario::preset(name).unwrap();
    s.quadrature_n = 128;
    s.box_half = 800.0;
    s.dx = 8.0;
    s.n_t = 3;
    s.tau_f = 40.0;
    s
}

#[test]
fn field_self_converges_in_quadrature_order() {
    let coarse = quick("step-case3");
    let mut fine = coarse.clone();
    fine.quadrature_n = 2 * coarse.quadrature_n;
    let f_c = SynthesizedField::new(&coarse).unwrap();
    let f_f = SynthesizedField::new(&fine).unwrap();
    // Scale differences by the packet peak rather than pointwise values so
    // nodes of the interference pattern do not dominate.
    let peak = f_c.evaluate(coarse.x0, 0.0).density().sqrt();
    let mut worst = 0.0_f64;
    for &x in &[-420.0, -310.0, -180.0, -60.0, -4.0, 12.0, 76.0] {
        for &t in &[0.0, 20.0, 40.0] {
            let a = f_c.evaluate(x, t);
            let b = f_f.evaluate(x, t);
            let diff = ((a.plus - b.plus).norm() + (a.minus - b.minus).norm()) / peak;
            worst = worst.max(diff);
        }
    }
    assert!(worst < 1e-9, "max relative field change {worst:e}");
}

#[test]
fn grid_matches_direct_evaluation() {
    let s = quick("step-case2");
    let field = SynthesizedField::new(&s).unwrap();
    let grid = field.grid();
    // The grid path uses a precomputed phase table, so agreement is up to
    // rounding on the packet scale, not bitwise.
    let peak = field.evaluate(s.x0, 0.0).density().sqrt();
    for (it, &t) in grid.ts.iter().enumerate() {
        for ix in (0..grid.nx()).step_by(17) {
            let x = grid.xs[ix];
            let direct = field.evaluate(x, t);
            let stored = &grid.psi[grid.index(it, ix)];
            let diff = (direct.plus - stored.plus).norm() + (direct.minus - stored.minus).norm();
            assert!(diff <= 1e-9 * peak, "x={x} t={t}: diff {diff:e}");
        }
    }
}

#[test]
fn free_packet_norm_is_conserved() {
    // The preset quadrature order is required: the lambda = 0.1 packet
    // spans a ~160-wide momentum window, and resolving its phases at the
    // box edge needs N >= width * box / pi per band.
    let mut s = Scenario::preset("step-case0").unwrap();
    s.dx = 0.02;
    s.n_t = 5;
    let grid = SynthesizedField::new(&s).unwrap().grid();
    let dx = s.dx;
    let norm = |it: usize| -> f64 {
        let dens = grid.density_slice(it);
        klein_pilot::quadrature::simpson_uniform(&dens, dx)
    };
    let n0 = norm(0);
    let drift = (0..grid.nt())
        .map(|it| (norm(it) - n0).abs() / n0)
        .fold(0.0, f64::max);
    assert!(drift < 1e-3, "free norm drift {drift:e}");
}

#[test]
fn born_sampling_matches_slice_density() {
    let s = {
        let mut s = quick("step-case1");
        s.sampling = SamplingMode::Born;
        s
    };
    let field = SynthesizedField::new(&s).unwrap();
    let n = 1000;
    let seeds = sample_ensemble(&field, n, 1234).unwrap();
    assert_eq!(seeds.len(), n);
    let mut xs: Vec<f64> = seeds.iter().map(|seed| seed.x0).collect();
    xs.sort_by(f64::total_cmp);

    // Reference CDF: trapezoid cumulative of the t = 0 density over the
    // incident window [-box, 0].
    let grid = field.grid();
    let dens = grid.density_slice(0);
    let nodes: Vec<(f64, f64)> = grid
        .xs
        .iter()
        .copied()
        .zip(dens.iter().copied())
        .filter(|(x, _)| *x <= 0.0)
        .collect();
    let mut cum = vec![0.0];
    for pair in nodes.windows(2) {
        let ((x0, d0), (x1, d1)) = (pair[0], pair[1]);
        cum.push(cum.last().unwrap() + 0.5 * (d0 + d1) * (x1 - x0));
    }
    let total = *cum.last().unwrap();
    let cdf = |x: f64| -> f64 {
        let i = nodes.partition_point(|(nx, _)| *nx < x);
        if i == 0 {
            return 0.0;
        }
        if i >= nodes.len() {
            return 1.0;
        }
        let (x0, d0) = nodes[i - 1];
        let (x1, d1) = nodes[i];
        let f = (x - x0) / (x1 - x0);
        let d = d0 + (d1 - d0) * f;
        (cum[i - 1] + 0.5 * (d0 + d) * (x - x0)) / total
    };

    let mut ks = 0.0_f64;
    for (i, &x) in xs.iter().enumerate() {
        let c = cdf(x);
        ks = ks.max((c - i as f64 / n as f64).abs());
        ks = ks.max(((i + 1) as f64 / n as f64 - c).abs());
    }
    // 1.36 / sqrt(1000) = 0.043 at the 5% level.
    assert!(ks < 0.05, "KS statistic {ks}");
}

#[test]
fn trajectory_final_position_converges_in_dt() {
    let base = quick("step-case1");
    let seed = Seed {
        x0: base.x0,
        t0: 0.0,
        direction: Direction::Forward,
        label: SeedLabel::Incident,
    };
    let mut finals = Vec::new();
    for halvings in 0..2 {
        let mut s = base.clone();
        s.dt = base.dt / (1 << halvings) as f64;
        s.record_every = base.record_every * (1 << halvings);
        let field = SynthesizedField::new(&s).unwrap();
        let tr = integrate(&seed, &field);
        finals.push(tr.samples.last().unwrap().x);
    }
    let gap = (finals[0] - finals[1]).abs();
    assert!(gap < 1e-4 * base.lambda, "dt halving moved the endpoint by {gap:e}");
}

//! Shared helpers for the integration tests: an independent linear-system
//! oracle for the boundary-matching problems and random parameter samplers
//! per kinematic case.

#![allow(dead_code)]

use klein_pilot::dirac_modes::{Case, PhysicalParams};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::Rng;

/// Gaussian elimination with partial pivoting on a dense complex system.
/// Consumes the augmented matrix rows.
pub fn solve_complex(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        assert!(a[pivot][col].norm() > 0.0, "singular system");
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for col in row + 1..n {
            acc -= a[row][col] * x[col];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Principal interior wavenumber: real positive when (E-V)^2 > m^2, else
/// positive imaginary.
pub fn interior_wavenumber(params: &PhysicalParams) -> Complex64 {
    let q2 = (params.e - params.v) * (params.e - params.v) - params.m * params.m;
    if q2 >= 0.0 {
        Complex64::new(q2.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-q2).sqrt())
    }
}

/// Spatial wavenumber of the B interior mode: the Feynman-Stueckelberg rule
/// flips the sign in Case 3.
pub fn branch_wavenumber(params: &PhysicalParams, case: Case) -> Complex64 {
    let k = interior_wavenumber(params);
    if case == Case::Case3 {
        -k
    } else {
        k
    }
}

/// Solve the step matching conditions at x = 0 numerically: unknowns (R, T).
pub fn oracle_step(params: &PhysicalParams, a: Complex64) -> (Complex64, Complex64) {
    let g = Complex64::new(params.p_over(), 0.0);
    let w = interior_wavenumber(params) / (params.e - params.v + params.m);
    let one = Complex64::new(1.0, 0.0);
    let rows = vec![vec![one, -one], vec![-g, -w]];
    let rhs = vec![-a, -a * g];
    let x = solve_complex(rows, rhs);
    (x[0], x[1])
}

/// Solve the barrier matching conditions at x = 0 and x = L numerically:
/// unknowns (R, B, D, T) in the same interior basis as the closed forms
/// (B carries the branch wavenumber, D its negative, columns fixed by the
/// principal wavenumber).
pub fn oracle_barrier(
    params: &PhysicalParams,
    case: Case,
    a: Complex64,
) -> (Complex64, Complex64, Complex64, Complex64) {
    let g = Complex64::new(params.p_over(), 0.0);
    let w = interior_wavenumber(params) / (params.e - params.v + params.m);
    let k_b = branch_wavenumber(params, case);
    let l = params.l;
    let phi_b = (Complex64::i() * k_b * l).exp();
    let phi_d = (-Complex64::i() * k_b * l).exp();
    let eps = (Complex64::i() * params.p() * l).exp();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let rows = vec![
        vec![one, -one, -one, zero],
        vec![-g, -w, w, zero],
        vec![zero, phi_b, phi_d, -eps],
        vec![zero, w * phi_b, -w * phi_d, -g * eps],
    ];
    let rhs = vec![-a, -a * g, zero, zero];
    let x = solve_complex(rows, rhs);
    (x[0], x[1], x[2], x[3])
}

/// Helpers the oracle needs from the parameter set.
pub trait ParamsExt {
    fn p(&self) -> f64;
    fn p_over(&self) -> f64;
}

impl ParamsExt for PhysicalParams {
    /// Incident momentum.
    fn p(&self) -> f64 {
        (self.e * self.e - self.m * self.m).sqrt()
    }

    /// Second spinor component ratio p/(E+m) of the incident column.
    fn p_over(&self) -> f64 {
        self.p() / (self.e + self.m)
    }
}

/// Random (E, V) draw for one kinematic case with m = 1; margins keep the
/// draw away from band edges and case boundaries.
pub fn draw_case(rng: &mut StdRng, case: Case) -> (f64, f64) {
    match case {
        Case::Free => (1.05 + 5.0 * rng.random::<f64>(), 0.0),
        Case::Case1 => {
            let v = 0.1 + 3.9 * rng.random::<f64>();
            let e = v + 1.0 + 0.05 + 3.0 * rng.random::<f64>();
            (e, v)
        }
        Case::Case2 => {
            let v = 0.5 + 3.5 * rng.random::<f64>();
            let lo = (v - 1.0).max(1.0) + 0.02;
            let hi = v + 1.0 - 0.02;
            (lo + (hi - lo) * rng.random::<f64>(), v)
        }
        Case::Case3 => {
            let v = 2.1 + 5.9 * rng.random::<f64>();
            let margin = 0.02 * (v - 2.0);
            let lo = 1.0 + margin;
            let hi = v - 1.0 - margin;
            (lo + (hi - lo) * rng.random::<f64>(), v)
        }
    }
}

pub fn rel_err(got: Complex64, want: Complex64, scale: f64) -> f64 {
    (got - want).norm() / want.norm().max(scale)
}

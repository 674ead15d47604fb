//! Property tests over randomized parameters: case classification, kappa
//! signs, resonances, guidance bounds, time-reversal involution and the
//! appendix contraction.

use klein_pilot::dirac_modes::{
    barrier_solution, classify_case, region_modes, step_solution, time_reverse_mode, Case,
    PhysicalParams, Region,
};
use klein_pilot::guidance::current;
use klein_pilot::multiscattering::{kappa_bound_check, ScatteringSeries};
use klein_pilot::spinor::Spinor2;
use num_complex::Complex64;
use proptest::prelude::*;

const EDGE_MARGIN: f64 = 1e-6;

fn far_from_edges(e: f64, v: f64) -> bool {
    (e - 1.0).abs() > EDGE_MARGIN
        && (e - (v - 1.0)).abs() > EDGE_MARGIN
        && (e - (v + 1.0)).abs() > EDGE_MARGIN
        && e > 1.0
}

proptest! {
    #[test]
    fn classification_is_total_away_from_edges(
        e in 1.0001..12.0f64,
        v in 0.01..10.0f64,
    ) {
        prop_assume!(far_from_edges(e, v));
        let case = classify_case(1.0, e, v).unwrap();
        let expected = if e > v + 1.0 {
            Case::Case1
        } else if e > v - 1.0 {
            Case::Case2
        } else {
            Case::Case3
        };
        prop_assert_eq!(case, expected);
    }

    #[test]
    fn kappa_sign_follows_case(
        e in 1.0001..12.0f64,
        v in 0.01..10.0f64,
    ) {
        prop_assume!(far_from_edges(e, v));
        let params = PhysicalParams::new(1.0, v, 0.0, e).unwrap();
        let sol = step_solution(&params, Complex64::new(1.0, 0.0)).unwrap();
        match sol.case {
            Case::Case1 => prop_assert!(sol.kappa.re > 0.0 && sol.kappa.im == 0.0),
            Case::Case2 => prop_assert!(sol.kappa.re.abs() < 1e-12 * sol.kappa.norm()),
            Case::Case3 => prop_assert!(sol.kappa.re < 0.0 && sol.kappa.im == 0.0),
            Case::Free => prop_assert!(false, "V > 0 cannot classify as free"),
        }
    }

    #[test]
    fn case1_barrier_resonances_transmit_fully(
        v in 0.1..3.0f64,
        de in 0.05..3.0f64,
        n in 1u32..6,
    ) {
        let e = v + 1.0 + de;
        let k = ((e - v) * (e - v) - 1.0).sqrt();
        let l = n as f64 * std::f64::consts::PI / k;
        let params = PhysicalParams::new(1.0, v, l, e).unwrap();
        let sol = barrier_solution(&params, Complex64::new(1.0, 0.0)).unwrap();
        prop_assert!(sol.r.norm() < 1e-10, "R = {}", sol.r);
        prop_assert!((sol.t.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn current_is_quadratic_and_subluminal(
        re_p in -3.0..3.0f64,
        im_p in -3.0..3.0f64,
        re_m in -3.0..3.0f64,
        im_m in -3.0..3.0f64,
        scale in 0.01..50.0f64,
    ) {
        let psi = Spinor2::new(
            Complex64::new(re_p, im_p),
            Complex64::new(re_m, im_m),
        );
        prop_assume!(psi.density() > 1e-12);
        let s1 = current(&psi).unwrap();
        prop_assert!(s1.velocity.abs() <= 1.0);
        let scaled = psi * Complex64::new(scale, 0.0);
        let s2 = current(&scaled).unwrap();
        let q = scale * scale;
        prop_assert!((s2.density - q * s1.density).abs() <= 1e-12 * q * s1.density.max(1e-300));
        prop_assert!((s2.current - q * s1.current).abs() <= 1e-12 * q * s1.current.abs().max(s1.density));
        prop_assert!((s2.velocity - s1.velocity).abs() <= 1e-12);
    }

    #[test]
    fn time_reversal_is_an_involution_preserving_boundary_values(
        v in 2.1..8.0f64,
        frac in 0.05..0.95f64,
    ) {
        let e = 1.0 + frac * (v - 2.0);
        prop_assume!(far_from_edges(e, v));
        let params = PhysicalParams::new(1.0, v, 0.0, e).unwrap();
        let sol = step_solution(&params, Complex64::new(0.7, -0.3)).unwrap();
        let modes = region_modes(&sol);
        for mode in modes.modes_at(1.0) {
            let reversed = time_reverse_mode(mode);
            let twice = time_reverse_mode(&reversed);
            prop_assert_eq!(twice.wavenumber, mode.wavenumber);
            prop_assert_eq!(twice.amplitude, mode.amplitude);
            // The mode and its reversal agree at the interface.
            let a = mode.eval(0.0);
            let b = reversed.eval(0.0);
            prop_assert!((a.plus - b.plus).norm() < 1e-14);
            prop_assert!((a.minus - b.minus).norm() < 1e-14);
        }
        prop_assert_eq!(modes.region_at(5.0), Region::II);
    }

    #[test]
    fn appendix_contraction_on_klein_regime(
        v in 2.05..9.0f64,
        frac in 0.02..0.98f64,
        l in 0.5..300.0f64,
    ) {
        let e = 1.0 + frac * (v - 2.0);
        prop_assume!(far_from_edges(e, v));
        let params = PhysicalParams::new(1.0, v, l, e).unwrap();
        let sol = barrier_solution(&params, Complex64::new(1.0, 0.0)).unwrap();
        let series = ScatteringSeries::from_solution(&sol).unwrap();
        prop_assert!(series.q >= 0.0 && series.q < 1.0);
        prop_assert!((0.0..=1.0).contains(&series.d2));
        prop_assert!((0.0..=1.0).contains(&series.b2));
        let kappa2 = kappa_bound_check(1.0, e, v).unwrap();
        prop_assert!(kappa2 >= 1.0);
        prop_assert!((kappa2 - (sol.kappa * sol.kappa).re).abs() <= 1e-12 * kappa2);
        let mut prev = 0.0;
        for n in 0..5 {
            let partial = series.partial_sum(n);
            // Strict growth only while the q^{n+1} tail is representable
            // against 1.0; beyond that the sum sits exactly at 1.0.
            if series.truncation_tail(n) > 1e-15 {
                prop_assert!(partial > prev);
            } else {
                prop_assert!(partial >= prev);
            }
            prop_assert!(partial < 1.0 + 1e-15);
            prop_assert!(((1.0 - partial) - series.truncation_tail(n)).abs() <= 1e-12);
            prev = partial;
        }
    }
}

mod common;

use num_complex::Complex64;
use superladder_core::ladders::*;
use superladder_core::polynomial::Polynomial;
use superladder_core::sampling::{AxisRegion, Sampler};
use superladder_core::systems::harmonic_hamiltonian;
use superladder_core::{poisson_bracket, AxisParams, Sign, SystemSpec};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn one_axis(omega: f64, k: u32, b: f64, eps: Sign) -> (SystemSpec, AxisParams) {
    let ax = AxisParams::new(k, b, eps).unwrap();
    (SystemSpec::new(omega, vec![ax]).unwrap(), ax)
}

#[test]
fn fitted_fig1_axes_satisfy_the_ladder_relation() {
    let spec = common::fig1();
    let pts = Sampler::new(21).points(&spec.regions(), 200);
    for (j, l) in common::fitted(&spec).iter().enumerate() {
        let r = verify_ladder(&spec.axis_hamiltonian(j), l, &pts).unwrap();
        assert!(r <= 1e-8, "axis {j}: {r}");
        assert!((l.nu() - spec.frequencies()[j]).abs() < 1e-15);
    }
}

#[test]
fn fitted_coefficients_are_the_rational_values() {
    for &(w, k, b, e) in &[(3.0, 1, 3.0, Sign::Plus), (3.0, 3, 5.0, Sign::Plus), (1.3, 2, 0.7, Sign::Minus)] {
        let fit = fit_ladder_coefficients(w, &AxisParams::new(k, b, e).unwrap(), &FitOptions::default()).unwrap();
        for (got, want) in fit.coefficients.alpha.iter().zip(ALPHA_RATIONAL) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }
}

#[test]
fn refit_with_more_samples_is_stable() {
    let ax = AxisParams::new(1, 3.0, Sign::Plus).unwrap();
    let a = fit_ladder_coefficients(3.0, &ax, &FitOptions::default()).unwrap();
    let opts = FitOptions { samples: 1200, ..FitOptions::default() };
    let b = fit_ladder_coefficients(3.0, &ax, &opts).unwrap();
    for (u, v) in a.coefficients.alpha.iter().zip(b.coefficients.alpha) {
        assert!((u - v).abs() <= 1e-9);
    }
}

#[test]
fn squared_radicand_hypothesis_fails_away_from_b_one() {
    let ax = AxisParams::new(1, 3.0, Sign::Plus).unwrap();
    let sq = fit_third_order(3.0, &ax, Radicand::Squared, &FitOptions::default()).unwrap();
    assert!(sq.residual > 1e-2, "{}", sq.residual);
    let at_one = AxisParams::new(1, 1.0, Sign::Plus).unwrap();
    let sq1 = fit_third_order(2.0, &at_one, Radicand::Squared, &FitOptions::default()).unwrap();
    assert!(sq1.residual < 1e-8);
}

#[test]
fn b_zero_ladder_on_the_harmonic_branch() {
    let (spec, ax) = one_axis(1.7, 1, 0.0, Sign::Plus);
    let l = deformed_ladder(1.7, &ax, CoefficientSource::Fitted, 1, 0).unwrap();
    let pts = Sampler::new(3).points(&[AxisRegion::Positive], 200);
    assert!(verify_ladder(&spec.axis_hamiltonian(0), &l, &pts).unwrap() <= 1e-8);
}

#[test]
fn lowering_is_the_conjugate() {
    let spec = common::fig1();
    let l = &common::fitted(&spec)[1];
    for pt in Sampler::new(5).points(&spec.regions(), 50) {
        let a = l.raising().evaluate(&pt).unwrap();
        assert_eq!(l.lowering().evaluate(&pt).unwrap(), a.conj());
    }
}

#[test]
fn harmonic_baseline_and_detuning() {
    let pts = Sampler::new(8).points(&[AxisRegion::Full], 200);
    for w in [0.5, 2.0, 3.0] {
        let h = harmonic_hamiltonian(1, 0, w);
        assert!(verify_ladder(&h, &harmonic_ladder(w, 1, 0), &pts).unwrap() <= 1e-12);
    }
    let h = harmonic_hamiltonian(1, 0, 2.0);
    assert!(verify_ladder(&h, &harmonic_ladder(2.0, 1, 0).with_nu(2.02), &pts).unwrap() > 1e-3);
    let c = fit_harmonic_multiplier(2.0, &FitOptions::default()).unwrap();
    assert!((c - 1.0).abs() < 1e-12);
}

#[test]
fn harmonic_factorization() {
    let w = 1.4;
    let pts = Sampler::new(2).points(&[AxisRegion::Full], 100);
    let f = fit_factorization(&harmonic_hamiltonian(1, 0, w), &harmonic_ladder(w, 1, 0), &pts).unwrap();
    assert!(f.q.relative_distance(&Polynomial::from_real(&[0.0, 2.0, 0.0, 0.0])) < 1e-10);
    assert!(f.p.relative_distance(&Polynomial::new(vec![2.0 * I * w, 0.0.into(), 0.0.into()])) < 1e-10);
}

#[test]
fn b_zero_factorization_is_eight_h_cubed() {
    let (spec, ax) = one_axis(1.0, 1, 0.0, Sign::Plus);
    let l = deformed_ladder(1.0, &ax, CoefficientSource::Fitted, 1, 0).unwrap();
    let pts = Sampler::new(4).points(&[AxisRegion::Positive], 200);
    let f = fit_factorization(&spec.axis_hamiltonian(0), &l, &pts).unwrap();
    assert!(f.q_residual <= 1e-7);
    assert!(f.q.relative_distance(&Polynomial::from_real(&[0.0, 0.0, 0.0, 8.0])) <= 1e-6);
    let printed = printed_factorization(1.0, &ax);
    assert!(printed.q.relative_distance(&Polynomial::from_real(&[0.0, 0.0, 0.0, 8.0])) <= 1e-12);
}

#[test]
fn fitted_factorization_matches_the_closed_form() {
    // Q = (2/729)(18H - b nu^2)^2 (9H + b nu^2), P = i nu Q'
    for (spec, axis) in [(common::fig1(), 0), (common::fig1(), 1), (common::fig3(), 2)] {
        let ax = spec.axes[axis];
        let nu = ax.frequency(spec.omega);
        let b = ax.b;
        let f = pq_polynomials(&spec, axis, CoefficientSource::Fitted, 17).unwrap();
        let q = Polynomial::from_real(&[
            2.0 * b.powi(3) * nu.powi(6) / 729.0,
            -2.0 * b * b * nu.powi(4) / 27.0,
            0.0,
            8.0,
        ]);
        assert!(f.q.relative_distance(&q) < 1e-7, "{:?}", f.q);
        assert!(f.p.relative_distance(&q.derivative().scale(I * nu)) < 1e-7, "{:?}", f.p);
        assert_eq!(f.q.effective_degree(1e-9), 3);
        assert_eq!(f.p.effective_degree(1e-9), 2);
        assert!(f.q.coeffs().iter().all(|c| c.im.abs() <= 1e-9 * (1.0 + c.re.abs())));
        assert!(f.p.coeffs().iter().all(|c| c.re.abs() <= 1e-9 * (1.0 + c.im.abs())));
    }
}

#[test]
fn printed_factorization_agrees_only_at_b_one() {
    let at_one = AxisParams::new(2, 1.0, Sign::Plus).unwrap();
    let spec = SystemSpec::new(1.5, vec![at_one]).unwrap();
    let fitted = pq_polynomials(&spec, 0, CoefficientSource::Fitted, 1).unwrap();
    let printed = printed_factorization(1.5, &at_one);
    assert!(fitted.q.relative_distance(&printed.q) < 1e-7);
    assert!(fitted.p.relative_distance(&printed.p) < 1e-7);

    let spec = common::fig1();
    let fitted = pq_polynomials(&spec, 0, CoefficientSource::Fitted, 1).unwrap();
    let printed = printed_factorization(spec.omega, &spec.axes[0]);
    assert!(fitted.q.relative_distance(&printed.q) > 1e-2);
}

#[test]
fn ladder_products_and_powers() {
    let spec = common::fig1();
    let pts = Sampler::new(6).points(&spec.regions(), 100);
    for (j, l) in common::fitted(&spec).iter().enumerate() {
        let h = spec.axis_hamiltonian(j);
        let q = l.raising() * &l.lowering();
        for pt in &pts {
            let qv = q.evaluate(pt).unwrap();
            assert!(poisson_bracket(&h, &q, pt).unwrap().norm() <= 1e-8 * (1.0 + qv.norm()));
            assert!(qv.re >= 0.0 && qv.im.abs() <= 1e-9 * (1.0 + qv.re));
        }
        for m in 1..=3 {
            assert!(verify_ladder(&h, &l.power(m), &pts).unwrap() <= 1e-8);
        }
    }
}

#[test]
fn report_rows_compare_coefficients() {
    let a = Polynomial::from_real(&[1.0, 2.0]);
    let b = Polynomial::from_real(&[1.0, 2.5, 3.0]);
    let rows = polynomial_rows("Q", &a, &b);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1].difference(), 0.5);
    assert_eq!(rows[2].name, "Q[H^2]");
}

#[test]
fn polynomial_fit_residual_detects_a_wrong_degree() {
    let h: Vec<Complex64> = (0..50).map(|i| Complex64::new(0.2 * i as f64, 0.0)).collect();
    let quartic: Vec<Complex64> = h.iter().map(|v| v.powi(4)).collect();
    let (_, r) = fit_polynomial(&h, &quartic, 3).unwrap();
    assert!(r > 1e-3, "{r}");
    let (p, r) = fit_polynomial(&h, &quartic, 4).unwrap();
    assert!(r < 1e-12 && p.relative_distance(&Polynomial::from_real(&[0.0, 0.0, 0.0, 0.0, 1.0])) < 1e-10);
}

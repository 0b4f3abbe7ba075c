//! Classical ladder operators `A+` with `{H, A+} = i nu A+`, their
//! factorization polynomials, and a least-squares oracle for the
//! coefficients of the third-order family.
//!
//! The third-order ansatz on one axis, with `W = k w`, `r = sqrt(c + x^2)`:
//!
//! ```text
//! A+ = p^3 - i a1 W x p^2 + W^2 (a2 beta + a3 x^2 + a4 eps x r) p
//!          - i W^3 (a5 beta x + a6 x^3 + a7 eps beta r + a8 eps x^2 r)
//! ```
//!
//! where `beta` and `c` are either `b` ([`Radicand::Linear`]) or `b^2`
//! ([`Radicand::Squared`]).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{least_squares_complex, least_squares_real_unknowns};
use crate::phase_space::{poisson_bracket, Observable, PhasePoint};
use crate::polynomial::Polynomial;
use crate::sampling::{AxisRegion, Sampler};
use crate::systems::{potential_observable, radical, AxisParams, Sign, SystemSpec};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Residual bound a fitted ladder must meet.
pub const LADDER_TOLERANCE: f64 = 1e-8;
/// Residual bound for the P/Q polynomial fits.
pub const FACTORIZATION_TOLERANCE: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct LadderOperator {
    raising: Observable,
    nu: f64,
    axis: usize,
}

impl LadderOperator {
    pub fn new(raising: Observable, nu: f64, axis: usize) -> Self {
        Self { raising, nu, axis }
    }

    pub fn raising(&self) -> &Observable {
        &self.raising
    }

    /// `A-`, the complex conjugate of `A+`.
    pub fn lowering(&self) -> Observable {
        self.raising.conj().named(format!("A-{}", self.axis + 1))
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn dim(&self) -> usize {
        self.raising.dim()
    }

    /// `(A+)^m`, a ladder with frequency `m nu`.
    pub fn power(&self, m: u32) -> Self {
        Self { raising: self.raising.pow(m), nu: self.nu * m as f64, axis: self.axis }
    }

    /// Same operator with a different frequency; used to probe detuning.
    pub fn with_nu(&self, nu: f64) -> Self {
        Self { raising: self.raising.clone(), nu, axis: self.axis }
    }
}

/// `A+ = p - i w x`, `nu = w`, on axis `axis` of a `dim`-dimensional space.
pub fn harmonic_ladder(omega: f64, dim: usize, axis: usize) -> LadderOperator {
    let x = Observable::position(dim, axis);
    let p = Observable::momentum(dim, axis);
    let raising = (&p - &x.scale(I * omega)).named(format!("A+{}", axis + 1)).with_degree_hint(Some(1));
    LadderOperator::new(raising, omega, axis)
}

/// Which constant appears under the square root and as the `b` prefactor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Radicand {
    /// `sqrt(b + x^2)`, prefactor `b` (matches the potential).
    Linear,
    /// `sqrt(b^2 + x^2)`, prefactor `b^2` (as printed for the operator).
    Squared,
}

impl Radicand {
    fn constant(self, b: f64) -> f64 {
        match self {
            Radicand::Linear => b,
            Radicand::Squared => b * b,
        }
    }
}

/// Multipliers of the third-order ansatz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderCoefficients {
    pub alpha: [f64; 8],
    pub radicand: Radicand,
    /// The printed operator carries no `W^3` on the `a7` term.
    pub bare_alpha7: bool,
}

/// Rational values `(1, 1/3, 1/3, 2/3, 1/3, 13/27, 2/27, 14/27)` shared by
/// the printed operator and the exact ladder.
pub const ALPHA_RATIONAL: [f64; 8] =
    [1.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0, 13.0 / 27.0, 2.0 / 27.0, 14.0 / 27.0];

pub const ALPHA_NAMES: [&str; 8] = [
    "a1 (x p^2)",
    "a2 (b p)",
    "a3 (x^2 p)",
    "a4 (eps x r p)",
    "a5 (b x)",
    "a6 (x^3)",
    "a7 (eps b r)",
    "a8 (eps x^2 r)",
];

impl LadderCoefficients {
    /// The third-order operator in its printed form: `sqrt(b^2 + x^2)`, no
    /// `W^3` on `a7`.
    pub fn printed() -> Self {
        Self { alpha: ALPHA_RATIONAL, radicand: Radicand::Squared, bare_alpha7: true }
    }

    pub fn linear(alpha: [f64; 8]) -> Self {
        Self { alpha, radicand: Radicand::Linear, bare_alpha7: false }
    }
}

/// The eight ansatz basis functions (without their multipliers) on axis
/// `axis` of a `dim`-dimensional space, plus the fixed `p^3` term.
fn third_order_basis(
    dim: usize,
    axis: usize,
    freq: f64,
    b: f64,
    epsilon: Sign,
    radicand: Radicand,
    bare_alpha7: bool,
) -> (Observable, [Observable; 8]) {
    let x = Observable::position(dim, axis);
    let p = Observable::momentum(dim, axis);
    let beta = radicand.constant(b);
    let r = radical(dim, axis, radicand.constant(b));
    let e = epsilon.value();
    let w = freq;
    let w2 = w * w;
    let w3 = w2 * w;
    let minus_i = -I;
    let a7_scale = if bare_alpha7 { 1.0 } else { w3 };
    let basis = [
        (&x * &p.pow(2)).scale(minus_i * w),
        p.scale_real(w2 * beta),
        (x.pow(2) * &p).scale_real(w2),
        (&x * &r * &p).scale_real(w2 * e),
        x.scale(minus_i * w3 * beta),
        x.pow(3).scale(minus_i * w3),
        r.scale(minus_i * a7_scale * e * beta),
        (x.pow(2) * &r).scale(minus_i * w3 * e),
    ];
    (p.pow(3), basis)
}

fn third_order_raising(dim: usize, axis: usize, freq: f64, ax: &AxisParams, coeffs: &LadderCoefficients) -> Observable {
    let (lead, basis) = third_order_basis(dim, axis, freq, ax.b, ax.epsilon, coeffs.radicand, coeffs.bare_alpha7);
    let mut a = lead;
    for (alpha, phi) in coeffs.alpha.iter().zip(basis.iter()) {
        if *alpha != 0.0 {
            a = a + phi.scale_real(*alpha);
        }
    }
    a.named(format!("A+{}", axis + 1)).with_degree_hint(Some(3))
}

/// Third-order ladder for the deformed oscillator with explicit
/// coefficients; `nu = k w`.
pub fn third_order_ladder(
    omega: f64,
    ax: &AxisParams,
    coeffs: &LadderCoefficients,
    dim: usize,
    axis: usize,
) -> LadderOperator {
    let freq = ax.frequency(omega);
    LadderOperator::new(third_order_raising(dim, axis, freq, ax, coeffs), freq, axis)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientSource {
    Printed,
    Fitted,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    pub seed: u64,
    pub samples: usize,
    pub verify_samples: usize,
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { seed: 0x5eed, samples: 600, verify_samples: 200, tolerance: LADDER_TOLERANCE }
    }
}

/// Outcome of a coefficient fit, successful or not.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderFit {
    pub coefficients: LadderCoefficients,
    /// Entries not constrained by the data (all `b` terms when `b = 0`).
    pub determined: [bool; 8],
    /// [`verify_ladder`] residual on an independent sample set.
    pub residual: f64,
    pub samples: usize,
}

/// One-dimensional axis Hamiltonian `p^2/2 + V(x)` at frequency `freq`.
fn axis_hamiltonian_1d(freq: f64, b: f64, epsilon: Sign) -> Observable {
    let p = Observable::momentum(1, 0);
    p.pow(2).scale_real(0.5) + potential_observable(1, 0, freq, b, epsilon)
}

/// Fits real multipliers `c` so that `lead + sum c_j basis_j` satisfies
/// `{H, .} = i nu (.)` in least squares over `pts` (equation error).
pub fn fit_ansatz(
    hamiltonian: &Observable,
    nu: f64,
    lead: &Observable,
    basis: &[Observable],
    pts: &[PhasePoint],
) -> Result<Vec<f64>> {
    let eigen = |f: &Observable, pt: &PhasePoint| -> Result<Complex64> {
        Ok(poisson_bracket(hamiltonian, f, pt)? - I * nu * f.evaluate(pt)?)
    };
    let mut a = DMatrix::<Complex64>::zeros(pts.len(), basis.len());
    let mut y = DVector::<Complex64>::zeros(pts.len());
    for (row, pt) in pts.iter().enumerate() {
        y[row] = -eigen(lead, pt)?;
        for (col, phi) in basis.iter().enumerate() {
            a[(row, col)] = eigen(phi, pt)?;
        }
    }
    Ok(least_squares_real_unknowns(&a, &y)?.iter().copied().collect())
}

/// Fits the third-order ansatz under a given radicand hypothesis and
/// reports the achieved residual without judging it.
pub fn fit_third_order(omega: f64, ax: &AxisParams, radicand: Radicand, opts: &FitOptions) -> Result<LadderFit> {
    let freq = ax.frequency(omega);
    let h = axis_hamiltonian_1d(freq, ax.b, ax.epsilon);
    let mut sampler = Sampler::new(opts.seed);
    let (alpha, determined) = if ax.b > 0.0 {
        let (lead, basis) = third_order_basis(1, 0, freq, ax.b, ax.epsilon, radicand, false);
        let pts = sampler.points(&[AxisRegion::Full], opts.samples);
        let c = fit_ansatz(&h, freq, &lead, &basis, &pts)?;
        let mut alpha = [0.0; 8];
        alpha.copy_from_slice(&c);
        (alpha, [true; 8])
    } else {
        // With b = 0, x r = x |x|: on each half-line the a3/a4 and a6/a8
        // columns coincide and the b columns vanish. Fit (a1, x^2 p, x^3)
        // on each side and split into even and odd parts.
        let x = Observable::position(1, 0);
        let p = Observable::momentum(1, 0);
        let basis = [
            (&x * &p.pow(2)).scale(-I * freq),
            (x.pow(2) * &p).scale_real(freq * freq),
            x.pow(3).scale(-I * freq.powi(3)),
        ];
        let lead = p.pow(3);
        let half = opts.samples / 2 + 1;
        let pos = fit_ansatz(&h, freq, &lead, &basis, &sampler.points(&[AxisRegion::Positive], half))?;
        let neg = fit_ansatz(&h, freq, &lead, &basis, &sampler.points(&[AxisRegion::Negative], half))?;
        let e = ax.epsilon.value();
        let alpha = [
            0.5 * (pos[0] + neg[0]),
            0.0,
            0.5 * (pos[1] + neg[1]),
            0.5 * e * (pos[1] - neg[1]),
            0.0,
            0.5 * (pos[2] + neg[2]),
            0.0,
            0.5 * e * (pos[2] - neg[2]),
        ];
        (alpha, [true, false, true, true, false, true, false, true])
    };
    let coefficients = LadderCoefficients { alpha, radicand, bare_alpha7: false };
    let ladder = third_order_ladder(omega, ax, &coefficients, 1, 0);
    let mut verify = Sampler::new(opts.seed.wrapping_add(1));
    let pts = verify.points(&[ax.region()], opts.verify_samples);
    let residual = verify_ladder(&h, &ladder, &pts)?;
    Ok(LadderFit { coefficients, determined, residual, samples: opts.samples })
}

/// Fits `a1..a8` for the `sqrt(b + x^2)` ansatz, failing when the fitted
/// operator misses the tolerance.
pub fn fit_ladder_coefficients(omega: f64, ax: &AxisParams, opts: &FitOptions) -> Result<LadderFit> {
    let fit = fit_third_order(omega, ax, Radicand::Linear, opts)?;
    if !(fit.residual <= opts.tolerance) {
        return Err(Error::FitResidual { residual: fit.residual, tolerance: opts.tolerance });
    }
    Ok(fit)
}

/// First-order ansatz `p - i c w x` for the pure oscillator; the fit should
/// return `c = 1`.
pub fn fit_harmonic_multiplier(omega: f64, opts: &FitOptions) -> Result<f64> {
    let x = Observable::position(1, 0);
    let p = Observable::momentum(1, 0);
    let h = crate::systems::harmonic_hamiltonian(1, 0, omega);
    let pts = Sampler::new(opts.seed).points(&[AxisRegion::Full], opts.samples);
    Ok(fit_ansatz(&h, omega, &p, &[x.scale(-I * omega)], &pts)?[0])
}

/// Third-order ladder of the deformed oscillator on `axis`, either from
/// the printed coefficients (unverified) or from a fit that must pass
/// [`LADDER_TOLERANCE`].
pub fn deformed_ladder(
    omega: f64,
    ax: &AxisParams,
    source: CoefficientSource,
    dim: usize,
    axis: usize,
) -> Result<LadderOperator> {
    let coeffs = match source {
        CoefficientSource::Printed => LadderCoefficients::printed(),
        CoefficientSource::Fitted => fit_ladder_coefficients(omega, ax, &FitOptions::default())?.coefficients,
    };
    Ok(third_order_ladder(omega, ax, &coeffs, dim, axis))
}

/// One ladder per axis of `spec`.
pub fn system_ladders(spec: &SystemSpec, source: CoefficientSource) -> Result<Vec<LadderOperator>> {
    spec.axes
        .iter()
        .enumerate()
        .map(|(j, ax)| deformed_ladder(spec.omega, ax, source, spec.dim(), j))
        .collect()
}

/// Max over `pts` of `|{H, A+} - i nu A+| / (1 + |A+|)`.
pub fn verify_ladder(hamiltonian: &Observable, ladder: &LadderOperator, pts: &[PhasePoint]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for pt in pts {
        let a = ladder.raising().evaluate(pt)?;
        let lhs = poisson_bracket(hamiltonian, ladder.raising(), pt)?;
        worst = worst.max((lhs - I * ladder.nu() * a).norm() / (1.0 + a.norm()));
    }
    Ok(worst)
}

/// `{A-, A+} = P(H)` and `A+ A- = Q(H)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationPolynomials {
    pub p: Polynomial,
    pub q: Polynomial,
    /// Fit residuals (zero for closed forms).
    pub p_residual: f64,
    pub q_residual: f64,
}

/// Least-squares fit of `Q` (cubic) and `P` (quadratic) in `H_axis`.
pub fn fit_factorization(
    hamiltonian: &Observable,
    ladder: &LadderOperator,
    pts: &[PhasePoint],
) -> Result<FactorizationPolynomials> {
    let raise = ladder.raising();
    let lower = ladder.lowering();
    let mut h = Vec::with_capacity(pts.len());
    let mut prod = Vec::with_capacity(pts.len());
    let mut br = Vec::with_capacity(pts.len());
    for pt in pts {
        h.push(hamiltonian.evaluate(pt)?);
        let a = raise.evaluate(pt)?;
        prod.push(a * lower.evaluate(pt)?);
        br.push(poisson_bracket(&lower, raise, pt)?);
    }
    let (q, q_residual) = fit_polynomial(&h, &prod, 3)?;
    let (p, p_residual) = fit_polynomial(&h, &br, 2)?;
    let worst = q_residual.max(p_residual);
    if !(worst <= FACTORIZATION_TOLERANCE) {
        return Err(Error::FitResidual { residual: worst, tolerance: FACTORIZATION_TOLERANCE });
    }
    Ok(FactorizationPolynomials { p, q, p_residual, q_residual })
}

/// Fits `y ~ sum_{n<=degree} c_n h^n`; returns the polynomial and the max
/// relative residual `|fit - y| / (1 + max(|y|, sum |c_n h^n|))`. Scaling by
/// the term sum keeps points near a root of the fit, where evaluation
/// cancels, from dominating.
pub fn fit_polynomial(h: &[Complex64], y: &[Complex64], degree: usize) -> Result<(Polynomial, f64)> {
    // fit in h / s so the Vandermonde columns have comparable size
    let s = h.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let a = DMatrix::from_fn(h.len(), degree + 1, |r, c| (h[r] / s).powi(c as i32));
    let rhs = DVector::from_column_slice(y);
    let c = least_squares_complex(&a, &rhs)?;
    let poly = Polynomial::new(c.iter().enumerate().map(|(n, v)| v / s.powi(n as i32)).collect());
    let residual = h
        .iter()
        .zip(y)
        .map(|(hv, yv)| {
            let size: f64 = poly.coeffs().iter().enumerate().map(|(n, c)| c.norm() * hv.norm().powi(n as i32)).sum();
            (poly.eval(*hv) - yv).norm() / (1.0 + yv.norm().max(size))
        })
        .fold(0.0, f64::max);
    Ok((poly, residual))
}

/// `P` and `Q` for an axis of `spec`, fitted from its ladder or taken from
/// the printed closed forms.
pub fn pq_polynomials(spec: &SystemSpec, axis: usize, source: CoefficientSource, seed: u64) -> Result<FactorizationPolynomials> {
    let ax = &spec.axes[axis];
    match source {
        CoefficientSource::Printed => Ok(printed_factorization(spec.omega, ax)),
        CoefficientSource::Fitted => {
            let ladder = deformed_ladder(spec.omega, ax, CoefficientSource::Fitted, 1, 0)?;
            let h = axis_hamiltonian_1d(ax.frequency(spec.omega), ax.b, ax.epsilon);
            let pts = Sampler::new(seed).points(&[ax.region()], 300);
            fit_factorization(&h, &ladder, &pts)
        }
    }
}

/// Printed closed forms of `P_j`, `Q_j` with `w_j` read as `k_j w`.
pub fn printed_factorization(omega: f64, ax: &AxisParams) -> FactorizationPolynomials {
    let b = ax.b;
    let kw = ax.frequency(omega);
    let p = Polynomial::new(alloc::vec![
        I * (2.0 / 27.0) * (4.0 * b * b - 8.0 * b.powi(3) + 3.0 * b.powi(4)) * kw.powi(5),
        I * (16.0 / 3.0) * (-b + b * b) * kw.powi(3),
        I * 24.0 * kw,
    ]);
    // (2/729)(18H + u)^2 (9H + v)
    let u = (b - 2.0) * b * kw * kw;
    let v = b * (2.0 * b - 1.0) * kw * kw;
    let s = 2.0 / 729.0;
    let q = Polynomial::from_real(&[
        s * u * u * v,
        s * (36.0 * u * v + 9.0 * u * u),
        s * 324.0 * (u + v),
        s * 2916.0,
    ]);
    FactorizationPolynomials { p, q, p_residual: 0.0, q_residual: 0.0 }
}

/// One line of a printed-vs-fitted comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientRow {
    pub name: String,
    pub printed: Complex64,
    pub fitted: Complex64,
}

impl CoefficientRow {
    pub fn difference(&self) -> f64 {
        (self.printed - self.fitted).norm()
    }
}

/// Coefficient-by-coefficient comparison of two polynomials.
pub fn polynomial_rows(label: &str, printed: &Polynomial, fitted: &Polynomial) -> Vec<CoefficientRow> {
    let n = printed.coeffs().len().max(fitted.coeffs().len());
    (0..n)
        .map(|i| CoefficientRow {
            name: format!("{label}[H^{i}]"),
            printed: printed.coeffs().get(i).copied().unwrap_or_default(),
            fitted: fitted.coeffs().get(i).copied().unwrap_or_default(),
        })
        .collect()
}

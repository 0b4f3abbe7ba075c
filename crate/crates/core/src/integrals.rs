//! Integrals of motion assembled from per-axis ladder operators.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ladders::LadderOperator;
use crate::phase_space::{Observable, PhasePoint};
use crate::sampling::{Sampler, DOMAIN_HALF_WIDTH};
use crate::systems::{potential_observable, Sign, SystemSpec};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `m1 nu1 = m2 nu2` up to `1e-12 max(nu1, nu2)`.
pub fn commensurate(m1: u32, m2: u32, nu1: f64, nu2: f64) -> bool {
    (m1 as f64 * nu1 - m2 as f64 * nu2).abs() <= 1e-12 * nu1.max(nu2)
}

pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest `(m1, m2)` with `m1 k1 = m2 k2`.
pub fn minimal_exponents(k1: u32, k2: u32) -> (u32, u32) {
    assert!(k1 >= 1 && k2 >= 1, "frequency multipliers must be positive");
    let g = gcd(k1, k2);
    (k2 / g, k1 / g)
}

/// Integrals built from the ladders of one axis pair `(i, j)`:
/// `f1 = A_i+^mi A_j-^mj`, `f2 = A_i-^mi A_j+^mj`, `I1 = f1 - f2`,
/// `I2 = f1 + f2`, `K = H_i - H_j`, `X1 = Re f1`, `X2 = Im f1`.
#[derive(Clone, Debug)]
pub struct IntegralSet {
    pub k: Observable,
    pub f1: Observable,
    pub f2: Observable,
    pub i1: Observable,
    pub i2: Observable,
    pub x1: Observable,
    pub x2: Observable,
    pub m: (u32, u32),
    pub axes: (usize, usize),
    /// `m_i nu_i` (= `m_j nu_j`).
    pub lambda: f64,
}

impl IntegralSet {
    /// `(name, observable)` for every member.
    pub fn members(&self) -> Vec<(&'static str, &Observable)> {
        alloc::vec![
            ("K", &self.k),
            ("f1", &self.f1),
            ("f2", &self.f2),
            ("I1", &self.i1),
            ("I2", &self.i2),
            ("X1", &self.x1),
            ("X2", &self.x2),
        ]
    }
}

/// `(I_ij, J_ij, K_ij)` for an axis pair of an N-dimensional system.
#[derive(Clone, Debug)]
pub struct PairIntegrals {
    pub i_ij: Observable,
    pub j_ij: Observable,
    pub k_ij: Observable,
}

/// Integrals of the pair `(i, j)` (zero-based, `i < j`).
pub fn build_pair(
    spec: &SystemSpec,
    ladders: &[LadderOperator],
    pair: (usize, usize),
    m: (u32, u32),
) -> Result<IntegralSet> {
    let hams: Vec<Observable> = (0..spec.dim()).map(|j| spec.axis_hamiltonian(j)).collect();
    build_pair_from(&hams, ladders, pair, m)
}

/// [`build_pair`] from explicit per-axis Hamiltonians.
pub fn build_pair_from(
    axis_hamiltonians: &[Observable],
    ladders: &[LadderOperator],
    pair: (usize, usize),
    m: (u32, u32),
) -> Result<IntegralSet> {
    let (i, j) = pair;
    let n = axis_hamiltonians.len();
    if i >= j || j >= n || ladders.len() != n {
        return Err(Error::InvalidPair(i, j));
    }
    let (li, lj) = (&ladders[i], &ladders[j]);
    if m.0 == 0 || m.1 == 0 || !commensurate(m.0, m.1, li.nu(), lj.nu()) {
        return Err(Error::Incommensurate { m1: m.0, m2: m.1, nu1: li.nu(), nu2: lj.nu() });
    }
    let (a, b) = (i + 1, j + 1);
    let k = (&axis_hamiltonians[i] - &axis_hamiltonians[j])
        .named(format!("K{a}{b}"))
        .with_degree_hint(Some(2));
    let f1 = (li.raising().pow(m.0) * lj.lowering().pow(m.1)).named(format!("f1[{a}{b}]"));
    let f2 = (li.lowering().pow(m.0) * lj.raising().pow(m.1)).named(format!("f2[{a}{b}]"));
    let i1 = (&f1 - &f2).named(format!("I{a}{b}"));
    let i2 = (&f1 + &f2).named(format!("J{a}{b}"));
    let x1 = i2.scale_real(0.5).named(format!("X1[{a}{b}]"));
    let x2 = i1.scale(-0.5 * I).named(format!("X2[{a}{b}]"));
    Ok(IntegralSet { k, f1, f2, i1, i2, x1, x2, m, axes: pair, lambda: m.0 as f64 * li.nu() })
}

/// Two-dimensional integrals `K`, `I1`, `I2` (and the real parts).
pub fn build_integrals(spec: &SystemSpec, ladders: &[LadderOperator], m: (u32, u32)) -> Result<IntegralSet> {
    if spec.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: spec.dim() });
    }
    build_pair(spec, ladders, (0, 1), m)
}

/// `I_ij`, `J_ij`, `K_ij` of an N-dimensional system.
pub fn build_integrals_nd(
    spec: &SystemSpec,
    ladders: &[LadderOperator],
    pair: (usize, usize),
    m: (u32, u32),
) -> Result<PairIntegrals> {
    let set = build_pair(spec, ladders, pair, m)?;
    Ok(PairIntegrals { i_ij: set.i1, j_ij: set.i2, k_ij: set.k })
}

/// Minimal exponents for an axis pair of `spec`.
pub fn pair_exponents(spec: &SystemSpec, pair: (usize, usize)) -> (u32, u32) {
    minimal_exponents(spec.axes[pair.0].k, spec.axes[pair.1].k)
}

/// The two-dimensional system with one deformed axis and one harmonic axis
/// of the same frequency, and its integrals `A = H1 - H2`,
/// `B = -x2 p1^3 + x1 p1^2 p2 + (w^2 x1^2/2 - 3V) x2 p1 - (w^2 x1^2/2 - 3V) V' p2 / w^2`
/// and `C = {A, B}`.
#[derive(Clone, Debug)]
pub struct CubicSystem {
    pub omega: f64,
    pub b: f64,
    pub epsilon: Sign,
    pub hamiltonian: Observable,
    pub a: Observable,
    pub b_integral: Observable,
    pub c: Observable,
}

impl CubicSystem {
    pub fn new(omega: f64, b: f64, epsilon: Sign) -> Result<Self> {
        if !(omega > 0.0) || !(b >= 0.0) {
            return Err(Error::InvalidParameter(format!("need omega > 0 and b >= 0, got ({omega}, {b})")));
        }
        let x1 = Observable::position(2, 0);
        let x2 = Observable::position(2, 1);
        let p1 = Observable::momentum(2, 0);
        let p2 = Observable::momentum(2, 1);
        let v = potential_observable(2, 0, omega, b, epsilon);
        let dv = v.bracket(&p1).named("V'"); // {V, p1} = dV/dx1
        let h1 = p1.pow(2).scale_real(0.5) + &v;
        let h2 = (p2.pow(2) + x2.pow(2).scale_real(omega * omega)).scale_real(0.5);
        let hamiltonian = (&h1 + &h2).named("H").with_degree_hint(Some(2));
        let a = (&h1 - &h2).named("A").with_degree_hint(Some(2));
        let g = x1.pow(2).scale_real(0.5 * omega * omega) - v.scale_real(3.0);
        let b_integral = (-(&x2 * &p1.pow(3)) + x1 * p1.pow(2) * &p2 + &g * &x2 * &p1
            - (g * dv * p2).scale_real(1.0 / (omega * omega)))
            .named("B")
            .with_degree_hint(Some(3));
        let c = a.bracket(&b_integral).named("C");
        Ok(Self { omega, b, epsilon, hamiltonian, a, b_integral, c })
    }

    pub fn regions(&self) -> [crate::sampling::AxisRegion; 2] {
        use crate::sampling::AxisRegion;
        let first = if self.b == 0.0 { AxisRegion::AwayFromOrigin } else { AxisRegion::Full };
        [first, AxisRegion::Full]
    }
}

/// The third-order integral `B`.
pub fn third_order_integral_b(omega: f64, b: f64, epsilon: Sign) -> Result<Observable> {
    Ok(CubicSystem::new(omega, b, epsilon)?.b_integral)
}

/// Momentum scales used by [`momentum_degree`].
pub const DEGREE_SCALES: [f64; 4] = [2.0, 4.0, 8.0, 16.0];
const DEGREE_SLACK: f64 = 0.01;
const DEGREE_ATTEMPTS: usize = 8;

/// Empirical degree in the momenta: the slope of `log |f(x, s p)|` against
/// `log s` for `s` in [`DEGREE_SCALES`], at a random point whose momenta
/// are pushed far enough out that lower-degree terms are negligible.
pub fn momentum_degree(obs: &Observable, seed: u64) -> Result<u32> {
    let mut sampler = Sampler::new(seed);
    let n = obs.dim();
    let mut base = match obs.momentum_degree_hint() {
        Some(d) if d > 0 => 1e4f64.min(10f64.powf(250.0 / d as f64) / 32.0),
        _ => 1e4,
    };
    let mut last_slope = f64::NAN;
    for _ in 0..DEGREE_ATTEMPTS {
        let w = DOMAIN_HALF_WIDTH;
        let x: Vec<f64> = (0..n).map(|_| sampler.uniform(-w, w)).collect();
        let dir: Vec<f64> = (0..n).map(|_| sampler.uniform(-w, w)).collect();
        let mut logs = Vec::with_capacity(DEGREE_SCALES.len());
        let mut overflow = false;
        for s in DEGREE_SCALES {
            let p: Vec<f64> = dir.iter().map(|d| d * base * s).collect();
            let v = obs.evaluate(&PhasePoint::new(x.clone(), p)?)?.norm();
            if !v.is_finite() {
                overflow = true;
                break;
            }
            logs.push(v.ln());
        }
        if overflow {
            base /= 1e3;
            continue;
        }
        if logs.iter().any(|l| !l.is_finite()) {
            continue;
        }
        let slope = log_slope(&logs);
        let rounded = slope.round();
        if (slope - rounded).abs() <= DEGREE_SLACK && rounded >= 0.0 {
            return Ok(rounded as u32);
        }
        last_slope = slope;
    }
    Err(Error::NonIntegerDegree(last_slope))
}

fn log_slope(logs: &[f64]) -> f64 {
    let xs: Vec<f64> = DEGREE_SCALES.iter().map(|s| s.ln()).collect();
    let n = logs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = logs.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(logs).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladders::harmonic_ladder;
    use crate::phase_space::poisson_bracket;
    use crate::systems::AxisParams;

    #[test]
    fn commensurability_examples() {
        let w = 3.0;
        assert!(commensurate(3, 1, w, 3.0 * w));
        assert!(commensurate(1, 1, w, w));
        assert!(!commensurate(1, 1, w, 2.0 * w));
    }

    #[test]
    fn minimal_exponent_examples() {
        assert_eq!(minimal_exponents(1, 3), (3, 1));
        assert_eq!(minimal_exponents(3, 4), (4, 3));
        assert_eq!(minimal_exponents(2, 2), (1, 1));
        assert_eq!(minimal_exponents(6, 4), (2, 3));
    }

    #[test]
    fn minimal_exponents_are_minimal() {
        for k1 in 1..12u32 {
            for k2 in 1..12u32 {
                let (m1, m2) = minimal_exponents(k1, k2);
                assert!(commensurate(m1, m2, k1 as f64, k2 as f64));
                for a in 1..m1 {
                    for b in 1..=m2 {
                        assert!(!commensurate(a, b, k1 as f64, k2 as f64));
                    }
                }
            }
        }
    }

    #[test]
    fn pair_validation() {
        let ax = AxisParams::new(1, 0.0, Sign::Plus).unwrap();
        let spec = SystemSpec::new(1.0, alloc::vec![ax, ax, ax]).unwrap();
        let ladders: Vec<_> = (0..3).map(|j| harmonic_ladder(1.0, 3, j)).collect();
        assert!(matches!(build_integrals_nd(&spec, &ladders, (0, 0), (1, 1)), Err(Error::InvalidPair(0, 0))));
        assert!(matches!(build_integrals_nd(&spec, &ladders, (2, 1), (1, 1)), Err(Error::InvalidPair(2, 1))));
        assert!(matches!(build_integrals_nd(&spec, &ladders, (0, 1), (1, 2)), Err(Error::Incommensurate { .. })));
        assert!(build_integrals_nd(&spec, &ladders, (0, 2), (1, 1)).is_ok());
    }

    #[test]
    fn monomial_degree() {
        let p1 = Observable::momentum(2, 0);
        let p2 = Observable::momentum(2, 1);
        let x1 = Observable::position(2, 0);
        let f = p1.pow(3) * &p2 + x1.pow(2).scale_real(30.0) * &p1;
        assert_eq!(momentum_degree(&f, 1).unwrap(), 4);
        assert_eq!(momentum_degree(&x1.pow(3), 1).unwrap(), 0);
    }

    #[test]
    fn b_is_odd_in_momenta() {
        let b = third_order_integral_b(2.0, 1.0, Sign::Plus).unwrap();
        let pt = PhasePoint::new(alloc::vec![0.4, -1.1], alloc::vec![0.9, 1.3]).unwrap();
        let flipped = PhasePoint::new(alloc::vec![0.4, -1.1], alloc::vec![-0.9, -1.3]).unwrap();
        let a = b.evaluate(&pt).unwrap();
        let c = b.evaluate(&flipped).unwrap();
        assert!((a + c).norm() <= 1e-12 * a.norm());
    }

    #[test]
    fn k_commutes_with_h() {
        let ax = AxisParams::new(1, 0.0, Sign::Plus).unwrap();
        let spec = SystemSpec::new(1.0, alloc::vec![ax, ax]).unwrap();
        let ladders: Vec<_> = (0..2).map(|j| harmonic_ladder(1.0, 2, j)).collect();
        let set = build_integrals(&spec, &ladders, (1, 1)).unwrap();
        let h = spec.hamiltonian();
        let pt = PhasePoint::new(alloc::vec![0.5, 1.5], alloc::vec![-0.3, 0.8]).unwrap();
        assert!(poisson_bracket(&h, &set.k, &pt).unwrap().norm() < 1e-13);
    }
}

//! The deformed-oscillator family
//! `V(x) = (w^2 k^2 / 18) (2b + 5x^2 + 4 eps x sqrt(b + x^2))`
//! and the separable Hamiltonians built from it.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::phase_space::Observable;
use crate::sampling::AxisRegion;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_int(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::InvalidParameter(format!("epsilon must be +1 or -1, got {v}"))),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Per-axis parameters: frequency multiplier `k`, deformation `b` and branch
/// sign `epsilon`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisParams {
    pub k: u32,
    pub b: f64,
    pub epsilon: Sign,
}

impl AxisParams {
    pub fn new(k: u32, b: f64, epsilon: Sign) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be a positive integer".into()));
        }
        if !(b >= 0.0) || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("b must be finite and >= 0, got {b}")));
        }
        Ok(Self { k, b, epsilon })
    }

    /// Effective axis frequency `k w`.
    pub fn frequency(&self, omega: f64) -> f64 {
        self.k as f64 * omega
    }

    pub fn region(&self) -> AxisRegion {
        if self.b == 0.0 {
            AxisRegion::AwayFromOrigin
        } else {
            AxisRegion::Full
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub omega: f64,
    pub axes: Vec<AxisParams>,
}

impl SystemSpec {
    pub fn new(omega: f64, axes: Vec<AxisParams>) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!("omega must be finite and > 0, got {omega}")));
        }
        if axes.is_empty() {
            return Err(Error::InvalidParameter("a system needs at least one axis".into()));
        }
        Ok(Self { omega, axes })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Ladder eigenfrequencies `nu_j = k_j w`.
    pub fn frequencies(&self) -> Vec<f64> {
        self.axes.iter().map(|a| a.frequency(self.omega)).collect()
    }

    pub fn regions(&self) -> Vec<AxisRegion> {
        self.axes.iter().map(AxisParams::region).collect()
    }

    pub fn potential(&self, x: &[f64]) -> f64 {
        self.axes.iter().zip(x).map(|(ax, x)| potential_1d(*x, self.omega, ax)).sum()
    }

    pub fn energy(&self, x: &[f64], p: &[f64]) -> f64 {
        0.5 * p.iter().map(|v| v * v).sum::<f64>() + self.potential(x)
    }

    /// `H_j = p_j^2 / 2 + V_j(x_j)`.
    pub fn axis_hamiltonian(&self, axis: usize) -> Observable {
        let ax = &self.axes[axis];
        let n = self.dim();
        let p = Observable::momentum(n, axis);
        let v = potential_observable(n, axis, ax.frequency(self.omega), ax.b, ax.epsilon);
        (p.pow(2).scale_real(0.5) + v).named(format!("H{}", axis + 1)).with_degree_hint(Some(2))
    }

    pub fn hamiltonian(&self) -> Observable {
        let mut h = self.axis_hamiltonian(0);
        for j in 1..self.dim() {
            h = h + self.axis_hamiltonian(j);
        }
        h.named("H").with_degree_hint(Some(2))
    }
}

/// `(p_axis^2 + freq^2 x_axis^2) / 2` on a `dim`-dimensional phase space.
pub fn harmonic_hamiltonian(dim: usize, axis: usize, freq: f64) -> Observable {
    let x = Observable::position(dim, axis);
    let p = Observable::momentum(dim, axis);
    (p.pow(2) + x.pow(2).scale_real(freq * freq))
        .scale_real(0.5)
        .named(format!("H{}", axis + 1))
        .with_degree_hint(Some(2))
}

/// `V` at frequency `freq` (= `w k`); `k` need not be an integer here.
pub fn potential_with_frequency(x: f64, freq: f64, b: f64, epsilon: Sign) -> f64 {
    let s = (b + x * x).sqrt();
    freq * freq / 18.0 * (2.0 * b + 5.0 * x * x + 4.0 * epsilon.value() * x * s)
}

/// `dV/dx` at frequency `freq`.
pub fn potential_derivative_with_frequency(x: f64, freq: f64, b: f64, epsilon: Sign) -> f64 {
    let s = (b + x * x).sqrt();
    let e = epsilon.value();
    // d/dx [x s] = s + x^2 / s; at b = 0, x = 0 this is the limit 0
    let dxs = if s > 0.0 { s + x * x / s } else { 0.0 };
    freq * freq / 18.0 * (10.0 * x + 4.0 * e * dxs)
}

pub fn potential_1d(x: f64, omega: f64, ax: &AxisParams) -> f64 {
    potential_with_frequency(x, ax.frequency(omega), ax.b, ax.epsilon)
}

pub fn potential_1d_derivative(x: f64, omega: f64, ax: &AxisParams) -> f64 {
    potential_derivative_with_frequency(x, ax.frequency(omega), ax.b, ax.epsilon)
}

/// `V(x_axis)` as an observable on a `dim`-dimensional phase space.
pub fn potential_observable(dim: usize, axis: usize, freq: f64, b: f64, epsilon: Sign) -> Observable {
    let x = Observable::position(dim, axis);
    let root = radical(dim, axis, b);
    let inner = Observable::real_constant(dim, 2.0 * b)
        + x.pow(2).scale_real(5.0)
        + (&x * &root).scale_real(4.0 * epsilon.value());
    inner.scale_real(freq * freq / 18.0).named(format!("V{}", axis + 1)).with_degree_hint(Some(0))
}

/// `sqrt(c + x_axis^2)` as an observable.
pub fn radical(dim: usize, axis: usize, c: f64) -> Observable {
    let x = Observable::position(dim, axis);
    (x.pow(2) + Observable::real_constant(dim, c)).sqrt().with_degree_hint(Some(0))
}

/// Quartic constraint on `v = V(x)` with the double-root constants
/// `c = 2^3 w^8 b^3 / 3^6`, `d = w^4 b^2 / 3^3`.
pub fn quartic_residual(x: f64, v: f64, omega: f64, b: f64) -> f64 {
    quartic_terms(x, v, omega, b).iter().sum()
}

/// The individual monomials of [`quartic_residual`], highest power of `v`
/// first.
pub fn quartic_terms(x: f64, v: f64, omega: f64, b: f64) -> [f64; 5] {
    let w2 = omega * omega;
    let w4 = w2 * w2;
    let w6 = w4 * w2;
    let w8 = w4 * w4;
    let c = 8.0 * w8 * b * b * b / 729.0;
    let d = w4 * b * b / 27.0;
    let x2 = x * x;
    let x4 = x2 * x2;
    let x6 = x4 * x2;
    let x8 = x4 * x4;
    [
        -9.0 * v.powi(4),
        14.0 * w2 * x2 * v.powi(3),
        (6.0 * d - 7.5 * w4 * x4) * v * v,
        (1.5 * w6 * x6 - 2.0 * d * w2 * x2) * v,
        c * x2 - d * d - 0.5 * d * w4 * x4 - w8 * x8 / 16.0,
    ]
}

/// `|residual| / (1 + 9 v^4)`: the residual relative to the leading term.
pub fn scaled_quartic_residual(x: f64, v: f64, omega: f64, b: f64) -> f64 {
    quartic_residual(x, v, omega, b).abs() / (1.0 + 9.0 * v.powi(4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::PhasePoint;

    fn axis(k: u32, b: f64, e: Sign) -> AxisParams {
        AxisParams::new(k, b, e).unwrap()
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(AxisParams::new(0, 1.0, Sign::Plus).is_err());
        assert!(AxisParams::new(1, -0.5, Sign::Plus).is_err());
        assert!(AxisParams::new(1, f64::NAN, Sign::Plus).is_err());
        assert!(Sign::from_int(0).is_err());
        assert!(SystemSpec::new(0.0, alloc::vec![axis(1, 1.0, Sign::Plus)]).is_err());
        assert!(SystemSpec::new(1.0, alloc::vec![]).is_err());
    }

    #[test]
    fn potential_reference_values() {
        // (9/18)(6 + 5 + 4*2) = 9.5
        assert_eq!(potential_1d(1.0, 3.0, &axis(1, 3.0, Sign::Plus)), 9.5);
        for &(w, k, b) in &[(1.0, 1, 0.5), (3.0, 2, 3.0), (0.7, 5, 7.0)] {
            let v0 = potential_1d(0.0, w, &axis(k, b, Sign::Minus));
            let expected = w * w * (k * k) as f64 * b / 9.0;
            assert!((v0 - expected).abs() <= 1e-14 * expected);
        }
        // b = 0, eps = +1, x > 0 reduces to w^2 k^2 x^2 / 2
        let v = potential_1d(1.3, 2.0, &axis(3, 0.0, Sign::Plus));
        assert!((v - 36.0 * 1.69 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_reference_value() {
        // (1/2)(10 + 8 + 2) = 10
        let d = potential_1d_derivative(1.0, 3.0, &axis(1, 3.0, Sign::Plus));
        assert!((d - 10.0).abs() < 1e-14);
    }

    #[test]
    fn hamiltonian_values() {
        let spec = SystemSpec::new(2.0, alloc::vec![axis(1, 0.0, Sign::Plus)]).unwrap();
        let h = spec.hamiltonian();
        let v = h.evaluate(&PhasePoint::new(alloc::vec![1.0], alloc::vec![0.0]).unwrap()).unwrap();
        assert!((v.re - 2.0).abs() < 1e-14 && v.im == 0.0);

        let fig1 = SystemSpec::new(3.0, alloc::vec![axis(1, 3.0, Sign::Plus), axis(3, 5.0, Sign::Plus)]).unwrap();
        let at = PhasePoint::new(alloc::vec![1.0, 1.0], alloc::vec![1.0, -3.0]).unwrap();
        let v2 = potential_1d(1.0, 3.0, &fig1.axes[1]);
        let expected = 5.0 + 9.5 + v2;
        let got = fig1.hamiltonian().evaluate(&at).unwrap();
        assert!((got.re - expected).abs() < 1e-12);
        assert!((fig1.energy(&[1.0, 1.0], &[1.0, -3.0]) - expected).abs() < 1e-12);
    }

    #[test]
    fn quartic_special_point_and_perturbation() {
        for &(w, b) in &[(1.0, 0.5), (2.0, 1.0), (3.0, 3.0)] {
            let v0 = w * w * b / 9.0;
            assert!(scaled_quartic_residual(0.0, v0, w, b) < 1e-14);
        }
        let v = potential_1d(1.0, 2.0, &axis(1, 1.0, Sign::Plus));
        assert!(quartic_residual(1.0, v + 1.0, 2.0, 1.0).abs() > 1.0);
    }
}

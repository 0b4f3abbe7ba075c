use alloc::vec::Vec;

use num_complex::Complex64;

use crate::phase_space::Observable;

/// Polynomial in one variable with complex coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|c| Complex64::new(*c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Index of the highest coefficient whose magnitude exceeds
    /// `rel_tol * max |c_i|`.
    pub fn effective_degree(&self, rel_tol: f64) -> usize {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        self.coeffs.iter().rposition(|c| c.norm() > rel_tol * scale).unwrap_or(0)
    }

    pub fn eval(&self, h: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * h + c)
    }

    pub fn eval_real(&self, h: f64) -> Complex64 {
        self.eval(Complex64::new(h, 0.0))
    }

    /// Derivative polynomial.
    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(n, c)| c * n as f64).collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `P(arg)` as an observable.
    pub fn compose(&self, arg: &Observable) -> Observable {
        let dim = arg.dim();
        let mut out = Observable::constant(dim, self.coeffs.first().copied().unwrap_or_default());
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            if *c != Complex64::new(0.0, 0.0) {
                out = out + arg.pow(n as u32).scale(*c);
            }
        }
        out
    }

    /// Largest coefficient-wise difference relative to `max(1, max |c_i|)`
    /// of `other`.
    pub fn relative_distance(&self, other: &Polynomial) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Polynomial, i: usize| p.coeffs.get(i).copied().unwrap_or_default();
        let scale = other.coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
        (0..n).map(|i| (get(self, i) - get(other, i)).norm()).fold(0.0, f64::max) / scale
    }
}

//! Truncated multivariate dual numbers for nested forward-mode differentiation.
//!
//! A [`Jet`] carries up to [`MAX_DEPTH`] independent real infinitesimals
//! `e_0 .. e_{d-1}` with `e_k^2 = 0`. Coefficients are indexed by the bitmask
//! of the infinitesimals they multiply, so a depth-`d` jet stores `2^d`
//! complex numbers. Each bracket evaluation adds one fresh infinitesimal on
//! top of the ones already present, which is what makes brackets of brackets
//! (and gradients of brackets) exact to rounding.
//!
//! Entries at indices `>= 2^depth` are always zero.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

pub const MAX_DEPTH: usize = 4;
const WIDTH: usize = 1 << MAX_DEPTH;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    depth: u8,
    coeffs: [Complex64; WIDTH],
}

impl Jet {
    pub fn constant(value: Complex64) -> Self {
        let mut coeffs = [ZERO; WIDTH];
        coeffs[0] = value;
        Self { depth: 0, coeffs }
    }

    pub fn real(value: f64) -> Self {
        Self::constant(Complex64::new(value, 0.0))
    }

    pub fn depth(&self) -> usize {
        self.depth as usize
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    fn width(&self) -> usize {
        1 << self.depth
    }

    /// Coefficient of the infinitesimal product selected by `mask`.
    pub fn coeff(&self, mask: usize) -> Complex64 {
        self.coeffs[mask]
    }

    /// Raises the depth to `depth` without changing the value. Callers must
    /// only go up.
    pub fn lift(mut self, depth: usize) -> Self {
        debug_assert!(depth >= self.depth() && depth <= MAX_DEPTH);
        self.depth = depth as u8;
        self
    }

    /// Adds the infinitesimal of slot `depth()` (the next free one) with unit
    /// coefficient, returning a jet one level deeper.
    pub fn seeded(self) -> Self {
        let d = self.depth();
        debug_assert!(d < MAX_DEPTH);
        let mut out = self.lift(d + 1);
        out.coeffs[1 << d] = Complex64::new(1.0, 0.0);
        out
    }

    /// Splits off the coefficient of the topmost infinitesimal: for
    /// `a + b e_{d-1}` returns `b` as a jet of depth `d - 1`.
    pub fn top_derivative(&self) -> Self {
        let d = self.depth();
        debug_assert!(d > 0);
        let half = 1 << (d - 1);
        let mut coeffs = [ZERO; WIDTH];
        coeffs[..half].copy_from_slice(&self.coeffs[half..2 * half]);
        Self { depth: (d - 1) as u8, coeffs }
    }

    /// Drops the topmost infinitesimal, keeping the part independent of it.
    pub fn top_value(&self) -> Self {
        let d = self.depth();
        debug_assert!(d > 0);
        let half = 1 << (d - 1);
        let mut coeffs = [ZERO; WIDTH];
        coeffs[..half].copy_from_slice(&self.coeffs[..half]);
        Self { depth: (d - 1) as u8, coeffs }
    }

    pub fn scale(mut self, s: Complex64) -> Self {
        for c in &mut self.coeffs[..1 << self.depth] {
            *c *= s;
        }
        self
    }

    /// Coefficient-wise conjugate. The infinitesimals are real directions, so
    /// this is the jet of the conjugated function.
    pub fn conj(mut self) -> Self {
        for c in &mut self.coeffs[..1 << self.depth] {
            *c = c.conj();
        }
        self
    }

    pub fn powi(self, n: u32) -> Self {
        let mut result = Jet::real(1.0).lift(self.depth());
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        result
    }

    /// Applies a scalar function given its derivatives at the value:
    /// `g(v + d) = sum_n g^(n)(v) d^n / n!`, truncated where `d^n` vanishes.
    fn compose(self, derivs: &[Complex64]) -> Self {
        let depth = self.depth();
        let mut nil = self;
        nil.coeffs[0] = ZERO;
        let mut out = Jet::constant(derivs[0]).lift(depth);
        let mut power = Jet::real(1.0).lift(depth);
        let mut factorial = 1.0;
        for (n, d) in derivs.iter().enumerate().skip(1).take(depth) {
            power = power * nil;
            factorial *= n as f64;
            out = out + power.scale(*d / factorial);
        }
        out
    }

    /// Principal square root. Returns `None` when the value lies on the
    /// negative real axis or at zero with a nonzero nilpotent part.
    pub fn sqrt(self) -> Option<Self> {
        let v = self.value();
        if v.re < 0.0 && v.im.abs() <= 1e-12 * v.re.abs() {
            return None;
        }
        let has_tangent = self.coeffs[1..self.width()].iter().any(|c| *c != ZERO);
        if v == ZERO && has_tangent {
            return None;
        }
        let root = v.sqrt();
        let mut derivs = [ZERO; MAX_DEPTH + 1];
        derivs[0] = root;
        // d^n/dv^n v^(1/2) = c_n v^(1/2 - n), c_n = prod_{j<n} (1/2 - j)
        let mut c = 1.0;
        let mut vpow = root;
        for (n, d) in derivs.iter_mut().enumerate().take(self.depth() + 1).skip(1) {
            c *= 0.5 - (n - 1) as f64;
            vpow /= v;
            *d = vpow * c;
        }
        Some(self.compose(&derivs[..=self.depth()]))
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let depth = self.depth.max(rhs.depth);
        let mut out = self;
        out.depth = depth;
        for (o, r) in out.coeffs[..1 << depth].iter_mut().zip(&rhs.coeffs) {
            *o += r;
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let depth = self.depth.max(rhs.depth);
        let mut out = self;
        out.depth = depth;
        for (o, r) in out.coeffs[..1 << depth].iter_mut().zip(&rhs.coeffs) {
            *o -= r;
        }
        out
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let depth = self.depth.max(rhs.depth);
        let width = 1usize << depth;
        let mut coeffs = [ZERO; WIDTH];
        for (mask, slot) in coeffs[..width].iter_mut().enumerate() {
            // sum over submasks a of mask: self[a] * rhs[mask \ a]
            let mut acc = ZERO;
            let mut a = mask;
            loop {
                acc += self.coeffs[a] * rhs.coeffs[mask ^ a];
                if a == 0 {
                    break;
                }
                a = (a - 1) & mask;
            }
            *slot = acc;
        }
        Jet { depth, coeffs }
    }
}

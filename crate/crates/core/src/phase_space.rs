//! Phase-space points, observables and the canonical Poisson bracket.
//!
//! Observables are immutable expression trees over the coordinates
//! `x_1..x_N, p_1..p_N`. Every derivative in the crate comes from evaluating
//! the same tree on [`Jet`]s (forward mode), never from differences. A
//! bracket node evaluates its operands one infinitesimal deeper than its own
//! input, so brackets nest up to [`MAX_DEPTH`] levels.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_DEPTH};

#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    x: Vec<f64>,
    p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if x.len() != p.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: p.len() });
        }
        if x.is_empty() {
            return Err(Error::InvalidParameter("phase point needs at least one degree of freedom".into()));
        }
        if x.iter().chain(&p).any(|v| !v.is_finite()) {
            return Err(Error::NonFinitePoint);
        }
        Ok(Self { x, p })
    }

    /// Builds a point from the packed layout `[x_1..x_N, p_1..p_N]`.
    pub fn from_packed(z: &[f64]) -> Result<Self> {
        if !z.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("packed state of odd length {}", z.len())));
        }
        let n = z.len() / 2;
        Self::new(z[..n].to_vec(), z[n..].to_vec())
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn packed(&self) -> Vec<f64> {
        let mut z = self.x.clone();
        z.extend_from_slice(&self.p);
        z
    }

    pub fn with_momenta(&self, p: Vec<f64>) -> Result<Self> {
        Self::new(self.x.clone(), p)
    }
}

#[derive(Debug)]
enum Node {
    Const(Complex64),
    Position(usize),
    Momentum(usize),
    Add(Arc<Node>, Arc<Node>),
    Sub(Arc<Node>, Arc<Node>),
    Mul(Arc<Node>, Arc<Node>),
    Neg(Arc<Node>),
    Scale(Complex64, Arc<Node>),
    Pow(Arc<Node>, u32),
    Conj(Arc<Node>),
    Sqrt(Arc<Node>),
    Bracket(Arc<Node>, Arc<Node>),
}

/// Evaluates a tree on jets laid out as `[x_1..x_N, p_1..p_N]`, all of the
/// same depth.
fn eval_node(node: &Node, z: &[Jet]) -> Result<Jet> {
    let depth = z.first().map_or(0, Jet::depth);
    Ok(match node {
        Node::Const(c) => Jet::constant(*c).lift(depth),
        Node::Position(i) => z[*i],
        Node::Momentum(i) => z[z.len() / 2 + i],
        Node::Add(a, b) => eval_node(a, z)? + eval_node(b, z)?,
        Node::Sub(a, b) => eval_node(a, z)? - eval_node(b, z)?,
        Node::Mul(a, b) => eval_node(a, z)? * eval_node(b, z)?,
        Node::Neg(a) => -eval_node(a, z)?,
        Node::Scale(s, a) => eval_node(a, z)?.scale(*s),
        Node::Pow(a, n) => eval_node(a, z)?.powi(*n),
        Node::Conj(a) => eval_node(a, z)?.conj(),
        Node::Sqrt(a) => {
            let v = eval_node(a, z)?;
            v.sqrt().ok_or_else(|| {
                Error::Domain(format!("square root of {} (non-positive argument)", v.value()))
            })?
        }
        Node::Bracket(f, g) => {
            if depth + 1 > MAX_DEPTH {
                return Err(Error::NestingTooDeep(MAX_DEPTH));
            }
            let grad_f = jet_gradient(f, z)?;
            let grad_g = jet_gradient(g, z)?;
            let n = z.len() / 2;
            let mut acc = Jet::real(0.0).lift(depth);
            for i in 0..n {
                acc = acc + grad_f[i] * grad_g[n + i] - grad_f[n + i] * grad_g[i];
            }
            acc
        }
    })
}

/// Partial derivatives of `node` with respect to every packed coordinate,
/// as jets of the input depth.
fn jet_gradient(node: &Node, z: &[Jet]) -> Result<Vec<Jet>> {
    let depth = z.first().map_or(0, Jet::depth);
    let lifted: Vec<Jet> = z.iter().map(|v| v.lift(depth + 1)).collect();
    let mut out = Vec::with_capacity(z.len());
    let mut seeded = lifted.clone();
    for k in 0..z.len() {
        seeded[k] = z[k].seeded();
        out.push(eval_node(node, &seeded)?.top_derivative());
        seeded[k] = lifted[k];
    }
    Ok(out)
}

fn real_jets(pt: &PhasePoint) -> Vec<Jet> {
    pt.x.iter().chain(&pt.p).map(|v| Jet::real(*v)).collect()
}

/// Gradient of an observable, split into position and momentum parts.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub dx: Vec<Complex64>,
    pub dp: Vec<Complex64>,
}

/// A complex-valued function on the phase space of `dim` degrees of freedom.
#[derive(Clone)]
pub struct Observable {
    node: Arc<Node>,
    dim: usize,
    name: String,
    momentum_degree_hint: Option<u32>,
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("momentum_degree_hint", &self.momentum_degree_hint)
            .finish()
    }
}

impl Observable {
    fn from_node(node: Node, dim: usize, name: String, hint: Option<u32>) -> Self {
        Self { node: Arc::new(node), dim, name, momentum_degree_hint: hint }
    }

    pub fn constant(dim: usize, value: Complex64) -> Self {
        Self::from_node(Node::Const(value), dim, format!("{value}"), Some(0))
    }

    pub fn real_constant(dim: usize, value: f64) -> Self {
        Self::from_node(Node::Const(Complex64::new(value, 0.0)), dim, format!("{value}"), Some(0))
    }

    /// Position coordinate `x_{axis+1}` (axes are zero-based).
    pub fn position(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis {axis} out of range for dimension {dim}");
        Self::from_node(Node::Position(axis), dim, format!("x{}", axis + 1), Some(0))
    }

    /// Momentum coordinate `p_{axis+1}` (axes are zero-based).
    pub fn momentum(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis {axis} out of range for dimension {dim}");
        Self::from_node(Node::Momentum(axis), dim, format!("p{}", axis + 1), Some(1))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn momentum_degree_hint(&self) -> Option<u32> {
        self.momentum_degree_hint
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_degree_hint(mut self, hint: Option<u32>) -> Self {
        self.momentum_degree_hint = hint;
        self
    }

    fn check_point(&self, pt: &PhasePoint) -> Result<()> {
        if pt.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: pt.dim() });
        }
        Ok(())
    }

    fn check_dim(&self, other: &Observable) -> Result<()> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(())
    }

    pub fn evaluate(&self, pt: &PhasePoint) -> Result<Complex64> {
        self.check_point(pt)?;
        Ok(eval_node(&self.node, &real_jets(pt))?.value())
    }

    /// Exact-to-rounding partial derivatives by forward-mode differentiation.
    pub fn gradient(&self, pt: &PhasePoint) -> Result<Gradient> {
        self.check_point(pt)?;
        let grads = jet_gradient(&self.node, &real_jets(pt))?;
        let values: Vec<Complex64> = grads.iter().map(Jet::value).collect();
        let n = self.dim;
        Ok(Gradient { dx: values[..n].to_vec(), dp: values[n..].to_vec() })
    }

    pub fn try_add(&self, other: &Observable) -> Result<Observable> {
        self.check_dim(other)?;
        Ok(Self::from_node(
            Node::Add(self.node.clone(), other.node.clone()),
            self.dim,
            format!("({} + {})", self.name, other.name),
            max_hint(self.momentum_degree_hint, other.momentum_degree_hint),
        ))
    }

    pub fn try_sub(&self, other: &Observable) -> Result<Observable> {
        self.check_dim(other)?;
        Ok(Self::from_node(
            Node::Sub(self.node.clone(), other.node.clone()),
            self.dim,
            format!("({} - {})", self.name, other.name),
            max_hint(self.momentum_degree_hint, other.momentum_degree_hint),
        ))
    }

    pub fn try_mul(&self, other: &Observable) -> Result<Observable> {
        self.check_dim(other)?;
        let hint = match (self.momentum_degree_hint, other.momentum_degree_hint) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        Ok(Self::from_node(
            Node::Mul(self.node.clone(), other.node.clone()),
            self.dim,
            format!("{} {}", self.name, other.name),
            hint,
        ))
    }

    /// The bracket `{self, other}` as an observable in its own right.
    pub fn try_bracket(&self, other: &Observable) -> Result<Observable> {
        self.check_dim(other)?;
        Ok(Self::from_node(
            Node::Bracket(self.node.clone(), other.node.clone()),
            self.dim,
            format!("{{{}, {}}}", self.name, other.name),
            None,
        ))
    }

    /// Panics on dimension mismatch; see [`Observable::try_bracket`].
    pub fn bracket(&self, other: &Observable) -> Observable {
        self.try_bracket(other).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn scale(&self, s: Complex64) -> Observable {
        Self::from_node(
            Node::Scale(s, self.node.clone()),
            self.dim,
            format!("({s}) {}", self.name),
            self.momentum_degree_hint,
        )
    }

    pub fn scale_real(&self, s: f64) -> Observable {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn pow(&self, n: u32) -> Observable {
        Self::from_node(
            Node::Pow(self.node.clone(), n),
            self.dim,
            format!("({})^{n}", self.name),
            self.momentum_degree_hint.map(|d| d * n),
        )
    }

    pub fn conj(&self) -> Observable {
        Self::from_node(
            Node::Conj(self.node.clone()),
            self.dim,
            format!("conj({})", self.name),
            self.momentum_degree_hint,
        )
    }

    pub fn sqrt(&self) -> Observable {
        let hint = match self.momentum_degree_hint {
            Some(0) => Some(0),
            _ => None,
        };
        Self::from_node(Node::Sqrt(self.node.clone()), self.dim, format!("sqrt({})", self.name), hint)
    }

    /// Adds a complex constant.
    pub fn shift(&self, c: Complex64) -> Observable {
        self + &Observable::constant(self.dim, c)
    }
}

fn max_hint(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Observable> for &Observable {
            type Output = Observable;
            /// Panics on dimension mismatch; use the `try_` form to recover.
            fn $method(self, rhs: &Observable) -> Observable {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<Observable> for Observable {
            type Output = Observable;
            fn $method(self, rhs: Observable) -> Observable {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Observable> for Observable {
            type Output = Observable;
            fn $method(self, rhs: &Observable) -> Observable {
                (&self).$method(rhs)
            }
        }
    };
}

binary_op!(Add, add, try_add);
binary_op!(Sub, sub, try_sub);
binary_op!(Mul, mul, try_mul);

impl Neg for &Observable {
    type Output = Observable;
    fn neg(self) -> Observable {
        Observable::from_node(
            Node::Neg(self.node.clone()),
            self.dim,
            format!("-{}", self.name),
            self.momentum_degree_hint,
        )
    }
}

impl Neg for Observable {
    type Output = Observable;
    fn neg(self) -> Observable {
        -&self
    }
}

/// Canonical bracket `sum_i (df/dx_i dg/dp_i - df/dp_i dg/dx_i)` at a point.
pub fn poisson_bracket(f: &Observable, g: &Observable, pt: &PhasePoint) -> Result<Complex64> {
    f.try_bracket(g)?.evaluate(pt)
}

/// Central-difference gradient with step `cbrt(eps) * max(1, |z_k|)`. Used
/// only as an independent cross-check of the forward-mode derivatives.
pub fn central_difference_gradient(obs: &Observable, pt: &PhasePoint) -> Result<Gradient> {
    let z = pt.packed();
    let mut out = Vec::with_capacity(z.len());
    let base = f64::EPSILON.cbrt();
    for k in 0..z.len() {
        let h = base * z[k].abs().max(1.0);
        let mut plus = z.clone();
        plus[k] += h;
        let mut minus = z.clone();
        minus[k] -= h;
        let fp = obs.evaluate(&PhasePoint::from_packed(&plus)?)?;
        let fm = obs.evaluate(&PhasePoint::from_packed(&minus)?)?;
        out.push((fp - fm) / (2.0 * h));
    }
    let n = pt.dim();
    Ok(Gradient { dx: out[..n].to_vec(), dp: out[n..].to_vec() })
}

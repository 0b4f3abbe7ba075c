//! Trajectories of the separable deformed-oscillator Hamiltonians, monitored
//! integrals and closed-orbit checks.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::integrals::gcd;
use crate::ode::{dop853, leapfrog, Stats, Tolerances};
use crate::phase_space::{Observable, PhasePoint};
use crate::systems::{potential_derivative_with_frequency, potential_with_frequency, Sign, SystemSpec};

/// Default number of uniformly spaced samples in a trajectory.
pub const DEFAULT_SAMPLES: usize = 1001;
/// Default closure threshold in the phase-space 2-norm.
pub const DEFAULT_CLOSURE_EPS: f64 = 1e-4;
/// Half-width of the refinement window around the predicted period.
pub const REFINEMENT_WINDOW: f64 = 1e-3;
const REFINEMENT_SAMPLES: usize = 2001;

/// One axis of the equations of motion: `p^2/2 + V(x)` at frequency `freq`.
/// Unlike [`SystemSpec`] the frequency need not be an integer multiple of a
/// common base, which the quasi-periodic control case needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisDynamics {
    pub freq: f64,
    pub potential: AxisPotential,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AxisPotential {
    Deformed { b: f64, epsilon: Sign },
    /// `freq^2 x^2 / 2`.
    Harmonic,
}

impl AxisDynamics {
    pub fn deformed(freq: f64, b: f64, epsilon: Sign) -> Self {
        Self { freq, potential: AxisPotential::Deformed { b, epsilon } }
    }

    pub fn harmonic(freq: f64) -> Self {
        Self { freq, potential: AxisPotential::Harmonic }
    }

    pub fn potential(&self, x: f64) -> f64 {
        match self.potential {
            AxisPotential::Deformed { b, epsilon } => potential_with_frequency(x, self.freq, b, epsilon),
            AxisPotential::Harmonic => 0.5 * self.freq * self.freq * x * x,
        }
    }

    pub fn potential_derivative(&self, x: f64) -> f64 {
        match self.potential {
            AxisPotential::Deformed { b, epsilon } => potential_derivative_with_frequency(x, self.freq, b, epsilon),
            AxisPotential::Harmonic => self.freq * self.freq * x,
        }
    }
}

/// Separable equations of motion.
#[derive(Clone, Debug, PartialEq)]
pub struct Dynamics {
    pub axes: Vec<AxisDynamics>,
}

impl Dynamics {
    pub fn new(axes: Vec<AxisDynamics>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidParameter("need at least one axis".into()));
        }
        let bad_b = |a: &AxisDynamics| matches!(a.potential, AxisPotential::Deformed { b, .. } if !(b >= 0.0 && b.is_finite()));
        if axes.iter().any(|a| !(a.freq > 0.0 && a.freq.is_finite()) || bad_b(a)) {
            return Err(Error::InvalidParameter("axis frequencies must be > 0 and b >= 0".into()));
        }
        Ok(Self { axes })
    }

    pub fn from_spec(spec: &SystemSpec) -> Self {
        let axes = spec
            .axes
            .iter()
            .map(|a| AxisDynamics::deformed(a.frequency(spec.omega), a.b, a.epsilon))
            .collect();
        Self { axes }
    }

    /// The same system with axis `axis` running at `freq`.
    pub fn with_frequency(mut self, axis: usize, freq: f64) -> Result<Self> {
        match self.axes.get_mut(axis) {
            Some(a) => a.freq = freq,
            None => return Err(Error::DimensionMismatch { expected: self.axes.len(), got: axis + 1 }),
        }
        Self::new(self.axes)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn energy(&self, x: &[f64], p: &[f64]) -> f64 {
        self.axes
            .iter()
            .zip(x.iter().zip(p))
            .map(|(a, (x, p))| 0.5 * p * p + a.potential(*x))
            .sum()
    }

    /// `-dV/dx` per axis.
    pub fn force(&self, x: &[f64], out: &mut [f64]) {
        for ((o, a), x) in out.iter_mut().zip(&self.axes).zip(x) {
            *o = -a.potential_derivative(*x);
        }
    }

    /// Packed `(dx/dt, dp/dt)` for packed `(x, p)`.
    fn rhs(&self, z: &[f64], out: &mut [f64]) {
        let n = self.dim();
        out[..n].copy_from_slice(&z[n..]);
        self.force(&z[..n], &mut out[n..]);
    }
}

/// `(dx/dt, dp/dt) = (p, -grad V)`.
pub fn hamilton_rhs(spec: &SystemSpec, pt: &PhasePoint) -> Result<(Vec<f64>, Vec<f64>)> {
    if pt.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: pt.dim() });
    }
    let dynamics = Dynamics::from_spec(spec);
    let mut dp = vec![0.0; spec.dim()];
    dynamics.force(pt.x(), &mut dp);
    Ok((pt.p().to_vec(), dp))
}

/// Uniformly sampled solution with optional monitored quantities.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint>,
    /// Energy along the samples.
    pub energy: Vec<f64>,
    /// `(name, values)` aligned with `times`.
    pub monitors: Vec<(String, Vec<f64>)>,
    pub dynamics: Dynamics,
    pub stats: Stats,
}

impl Trajectory {
    /// Adds the real part of `obs` as a monitor.
    pub fn monitor(&mut self, name: impl Into<String>, obs: &Observable) -> Result<()> {
        let values = self.states.iter().map(|s| obs.evaluate(s).map(|v| v.re)).collect::<Result<Vec<_>>>()?;
        self.monitors.push((name.into(), values));
        Ok(())
    }

    /// `max_t |q(t) - q(0)| / max(|q(0)|, 1)` for a sampled series.
    pub fn relative_drift(values: &[f64]) -> f64 {
        let Some(&q0) = values.first() else {
            return 0.0;
        };
        let scale = q0.abs().max(1.0);
        values.iter().map(|v| (v - q0).abs()).fold(0.0, f64::max) / scale
    }

    pub fn energy_drift(&self) -> f64 {
        Self::relative_drift(&self.energy)
    }

    /// Drift of each monitor, in registration order.
    pub fn monitor_drifts(&self) -> Vec<(String, f64)> {
        self.monitors.iter().map(|(n, v)| (n.clone(), Self::relative_drift(v))).collect()
    }

    pub fn final_state(&self) -> &PhasePoint {
        self.states.last().expect("a trajectory has at least one sample")
    }
}

/// `samples` uniformly spaced times on `[0, t_end]` (one if `t_end == 0`).
pub fn uniform_times(t_end: f64, samples: usize) -> Vec<f64> {
    if t_end == 0.0 || samples < 2 {
        return vec![0.0];
    }
    let last = (samples - 1) as f64;
    (0..samples).map(|i| if i + 1 == samples { t_end } else { t_end * i as f64 / last }).collect()
}

/// Solution of `dynamics` from `init` at `times`.
pub fn integrate_at(dynamics: &Dynamics, init: &PhasePoint, times: &[f64], tol: f64) -> Result<Trajectory> {
    if init.dim() != dynamics.dim() {
        return Err(Error::DimensionMismatch { expected: dynamics.dim(), got: init.dim() });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be > 0".into()));
    }
    let (ys, stats) = dop853(|_, z, out| dynamics.rhs(z, out), 0.0, &init.packed(), times, Tolerances::uniform(tol))?;
    let states = ys.iter().map(|z| PhasePoint::from_packed(z)).collect::<Result<Vec<_>>>()?;
    let energy = states.iter().map(|s| dynamics.energy(s.x(), s.p())).collect();
    Ok(Trajectory { times: times.to_vec(), states, energy, monitors: Vec::new(), dynamics: dynamics.clone(), stats })
}

/// Integrates `spec` over `[0, t_end]` at tolerance `tol`, sampled at
/// `samples` uniform times.
pub fn integrate(spec: &SystemSpec, init: &PhasePoint, t_end: f64, tol: f64, samples: usize) -> Result<Trajectory> {
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter("t_end must be finite and >= 0".into()));
    }
    integrate_at(&Dynamics::from_spec(spec), init, &uniform_times(t_end, samples), tol)
}

/// Common period `4 pi / (w gcd(k))`. Each deformed axis oscillates at
/// `k w` on one side of its kink and at `k w / 3` on the other, so a full
/// orbit takes `pi/(k w) + 3 pi/(k w)`; this reduces to the harmonic
/// `2 pi / (k w)` only when the axis is a plain oscillator (see
/// [`axis_period`]).
pub fn predict_period(spec: &SystemSpec) -> f64 {
    let g = spec.axes.iter().map(|a| a.k).fold(0, gcd);
    4.0 * core::f64::consts::PI / (spec.omega * g as f64)
}

/// Period of one axis at frequency `freq`.
pub fn axis_period(freq: f64) -> f64 {
    4.0 * core::f64::consts::PI / freq
}

/// Outcome of [`closure_test`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Closure {
    pub closed: bool,
    /// `|z(T) - z(0)|_2` at the period tested.
    pub return_distance: f64,
    pub period: f64,
    /// Minimum distance over `[(1 - w) T, (1 + w) T]` and where it occurs.
    pub best_distance: f64,
    pub best_time: f64,
}

fn distance(a: &PhasePoint, b: &PhasePoint) -> f64 {
    a.packed().iter().zip(b.packed()).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Return distance after `period`, plus a scan of the refinement window.
pub fn closure_at(dynamics: &Dynamics, init: &PhasePoint, period: f64, tol: f64, eps: f64) -> Result<Closure> {
    if !(period > 0.0) {
        return Err(Error::InvalidParameter("period must be > 0".into()));
    }
    let lo = (1.0 - REFINEMENT_WINDOW) * period;
    let hi = (1.0 + REFINEMENT_WINDOW) * period;
    let mut times: Vec<f64> = (0..REFINEMENT_SAMPLES)
        .map(|i| lo + (hi - lo) * i as f64 / (REFINEMENT_SAMPLES - 1) as f64)
        .collect();
    // exact period sits in the middle of the window
    times[REFINEMENT_SAMPLES / 2] = period;
    let traj = integrate_at(dynamics, init, &times, tol)?;
    if traj.states.iter().any(|s| s.x().iter().any(|x| !x.is_finite())) {
        return Err(Error::NonFiniteState(period));
    }
    let dists: Vec<f64> = traj.states.iter().map(|s| distance(s, init)).collect();
    let return_distance = dists[REFINEMENT_SAMPLES / 2];
    let (best_i, best_distance) =
        dists.iter().copied().enumerate().fold((0, f64::INFINITY), |acc, (i, d)| if d < acc.1 { (i, d) } else { acc });
    Ok(Closure {
        closed: return_distance <= eps,
        return_distance,
        period,
        best_distance,
        best_time: times[best_i],
    })
}

/// Closure of `spec` at [`predict_period`].
pub fn closure_test(spec: &SystemSpec, init: &PhasePoint, tol: f64, eps: f64) -> Result<Closure> {
    closure_at(&Dynamics::from_spec(spec), init, predict_period(spec), tol, eps)
}

/// Leapfrog solution of `dynamics` after `steps` steps of size `h`.
pub fn leapfrog_solve(dynamics: &Dynamics, init: &PhasePoint, h: f64, steps: usize) -> Result<PhasePoint> {
    let (x, p) = leapfrog(|x, a| dynamics.force(x, a), init.x(), init.p(), h, steps);
    PhasePoint::new(x, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::AxisParams;

    fn fig1() -> SystemSpec {
        let ax = |k, b| AxisParams::new(k, b, Sign::Plus).unwrap();
        SystemSpec::new(3.0, vec![ax(1, 3.0), ax(3, 5.0)]).unwrap()
    }

    #[test]
    fn rhs_reference_value() {
        let pt = PhasePoint::new(vec![1.0, 1.0], vec![1.0, -3.0]).unwrap();
        let (dx, dp) = hamilton_rhs(&fig1(), &pt).unwrap();
        assert_eq!(dx, vec![1.0, -3.0]);
        assert!((dp[0] + 10.0).abs() < 1e-13);
    }

    #[test]
    fn period_examples() {
        assert!((predict_period(&fig1()) - 4.0 * core::f64::consts::PI / 3.0).abs() < 1e-15);
        let ax = AxisParams::new(2, 1.0, Sign::Minus).unwrap();
        let spec = SystemSpec::new(1.0, vec![ax, ax]).unwrap();
        assert!((predict_period(&spec) - 2.0 * core::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn uniform_times_endpoints() {
        let t = uniform_times(20.0, 1001);
        assert_eq!((t.len(), t[0], t[1000]), (1001, 0.0, 20.0));
        assert_eq!(uniform_times(0.0, 1001), vec![0.0]);
    }

    #[test]
    fn zero_length_run_has_one_sample() {
        let pt = PhasePoint::new(vec![1.0, 1.0], vec![1.0, -3.0]).unwrap();
        let tr = integrate(&fig1(), &pt, 0.0, 1e-10, DEFAULT_SAMPLES).unwrap();
        assert_eq!(tr.states.len(), 1);
        assert_eq!(tr.states[0], pt);
    }

    #[test]
    fn harmonic_closes_at_two_pi() {
        let d = Dynamics::new(vec![AxisDynamics::harmonic(1.0); 2]).unwrap();
        let pt = PhasePoint::new(vec![0.3, -1.2], vec![0.7, 0.1]).unwrap();
        let c = closure_at(&d, &pt, core::f64::consts::TAU, 1e-12, 1e-9).unwrap();
        assert!(c.closed, "{c:?}");
    }

    #[test]
    fn drift_of_constant_is_zero() {
        assert_eq!(Trajectory::relative_drift(&[3.0, 3.0, 3.0]), 0.0);
        assert_eq!(Trajectory::relative_drift(&[2.0, 2.5]), 0.25);
    }
}

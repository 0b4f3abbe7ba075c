//! The verification suites behind `verify`. Each suite records one line per
//! check and passes iff every check does.

use superladder_core::algebra::{
    algebra_relations_2d, check_relation, cubic_algebra_check, fit_bracket_coefficient, independent_count,
    sample_points, structure_constant, ALGEBRA_TOLERANCE,
};
use superladder_core::dynamics::{closure_test, integrate, predict_period, Trajectory, DEFAULT_CLOSURE_EPS};
use superladder_core::integrals::{build_pair, momentum_degree, CubicSystem, IntegralSet};
use superladder_core::ladders::{
    fit_factorization, fit_harmonic_multiplier, harmonic_ladder, pq_polynomials, system_ladders, verify_ladder,
    deformed_ladder, CoefficientSource, FitOptions, LadderOperator, LADDER_TOLERANCE,
};
use superladder_core::polynomial::Polynomial;
use superladder_core::sampling::{AxisRegion, Sampler, DOMAIN_HALF_WIDTH};
use superladder_core::systems::{harmonic_hamiltonian, potential_1d, scaled_quartic_residual};
use superladder_core::{poisson_bracket, AxisParams, Complex64, Observable, PhasePoint, Sign, SystemSpec};

use crate::{CliError, RunConfig};

/// Harmonic baseline bound.
pub const HARMONIC_TOLERANCE: f64 = 1e-12;
/// Bound on `{H, Z}` for every integral `Z`.
pub const COMMUTE_TOLERANCE: f64 = 1e-7;
/// Relative coefficient tolerance of fitted constants.
pub const COEFFICIENT_TOLERANCE: f64 = 1e-6;
/// Quartic constraint bound on the scaled residual.
pub const QUARTIC_TOLERANCE: f64 = 1e-9;
/// Relative drift bound of monitored integrals along a trajectory.
pub const DRIFT_TOLERANCE: f64 = 1e-6;
/// Points at which a Jacobian rank must be full, out of [`RANK_POINTS`].
pub const RANK_REQUIRED: usize = 95;
pub const RANK_POINTS: usize = 100;
/// `(omega, b)` of the quartic grid.
pub const QUARTIC_CASES: [(f64, f64); 3] = [(1.0, 0.5), (2.0, 1.0), (3.0, 3.0)];

const LADDER_POINTS: usize = 200;
const INTEGRAL_POINTS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct Suite {
    pub name: &'static str,
    pub pass: bool,
    pub lines: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self { name, pass: true, lines: Vec::new() }
    }

    fn mark(ok: bool) -> &'static str {
        if ok {
            "ok"
        } else {
            "FAIL"
        }
    }

    /// `value <= tol`; NaN fails.
    pub fn bound(&mut self, label: impl AsRef<str>, value: f64, tol: f64) -> bool {
        let ok = value <= tol;
        self.pass &= ok;
        self.lines.push(format!("{}: {value:.3e} (<= {tol:.0e}) {}", label.as_ref(), Self::mark(ok)));
        ok
    }

    pub fn equal<T: PartialEq + std::fmt::Display>(&mut self, label: impl AsRef<str>, got: T, want: T) -> bool {
        let ok = got == want;
        self.pass &= ok;
        self.lines.push(format!("{}: {got} (expected {want}) {}", label.as_ref(), Self::mark(ok)));
        ok
    }

    pub fn at_least(&mut self, label: impl AsRef<str>, got: usize, need: usize, of: usize) -> bool {
        let ok = got >= need;
        self.pass &= ok;
        self.lines.push(format!("{}: {got}/{of} (>= {need}) {}", label.as_ref(), Self::mark(ok)));
        ok
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn fail(&mut self, text: impl std::fmt::Display) {
        self.pass = false;
        self.lines.push(format!("error: {text}"));
    }
}

/// Shared inputs of the suites.
pub struct Context {
    pub cfg: RunConfig,
    pub spec: SystemSpec,
    pub hamiltonian: Observable,
    pub init: PhasePoint,
    ladders: Result<Vec<LadderOperator>, superladder_core::Error>,
}

impl Context {
    pub fn new(cfg: &RunConfig) -> Result<Self, CliError> {
        let spec = cfg.spec()?;
        Ok(Self {
            cfg: cfg.clone(),
            hamiltonian: spec.hamiltonian(),
            init: cfg.initial_state()?,
            ladders: system_ladders(&spec, CoefficientSource::Fitted),
            spec,
        })
    }

    pub fn ladders(&self) -> Result<&[LadderOperator], CliError> {
        self.ladders.as_deref().map_err(|e| CliError::Core(e.clone()))
    }

    pub fn points(&self, offset: u64, count: usize) -> Vec<PhasePoint> {
        sample_points(&self.spec, self.cfg.seed.wrapping_add(offset), count)
    }

    /// Adjacent axis pairs `(j, j + 1)`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (1..self.spec.dim()).map(|j| (j - 1, j)).collect()
    }

    pub fn pair(&self, pair: (usize, usize)) -> Result<IntegralSet, CliError> {
        Ok(build_pair(&self.spec, self.ladders()?, pair, self.cfg.exponents(&self.spec, pair))?)
    }

    /// Quantities monitored along a trajectory: `K`, `X1`, `X2` of every
    /// adjacent pair, plus the remaining `K_ij` from three axes on. Names are
    /// `K`, `X1`, `X2` in two dimensions.
    pub fn monitors(&self) -> Result<Vec<(String, Observable)>, CliError> {
        let n = self.spec.dim();
        let mut out = Vec::new();
        for pair in self.pairs() {
            let set = self.pair(pair)?;
            for (short, obs) in [("K", set.k), ("X1", set.x1), ("X2", set.x2)] {
                let name = if n == 2 { short.to_string() } else { obs.name().to_string() };
                out.push((name, obs));
            }
        }
        for i in 0..n {
            for j in i + 2..n {
                let k = &self.spec.axis_hamiltonian(i) - &self.spec.axis_hamiltonian(j);
                out.push((format!("K{}{}", i + 1, j + 1), k));
            }
        }
        Ok(out)
    }

    /// Integrates the configured run with every monitor attached.
    pub fn trajectory(&self) -> Result<Trajectory, CliError> {
        let run = &self.cfg.run;
        let mut tr = integrate(&self.spec, &self.init, run.t_end, run.tolerance, run.samples)?;
        for (name, obs) in self.monitors()? {
            tr.monitor(name, &obs)?;
        }
        Ok(tr)
    }
}

/// `max |{h, z}| / (1 + |z|)` over `pts`.
pub fn commutator_residual(h: &Observable, z: &Observable, pts: &[PhasePoint]) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for pt in pts {
        let r = poisson_bracket(h, z, pt)?.norm() / (1.0 + z.evaluate(pt)?.norm());
        if r.is_nan() {
            return Ok(f64::NAN);
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

fn relative(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

type SuiteFn = fn(&Context, &mut Suite) -> Result<(), CliError>;

pub const SUITES: [(&str, SuiteFn); 11] = [
    ("ladder", ladder),
    ("factorization", factorization),
    ("quartic", quartic),
    ("integrals", integrals),
    ("algebra", algebra),
    ("cubic-algebra", cubic_algebra),
    ("third-order-integral", third_order),
    ("rank", rank),
    ("closure", closure),
    ("conservation", conservation),
    ("degree", degree),
];

/// Runs every suite; an error inside a suite fails that suite only.
pub fn run_all(cfg: &RunConfig) -> Result<Vec<Suite>, CliError> {
    let ctx = Context::new(cfg)?;
    Ok(SUITES
        .iter()
        .map(|(name, f)| {
            let mut s = Suite::new(name);
            if let Err(e) = f(&ctx, &mut s) {
                s.fail(e);
            }
            s
        })
        .collect())
}

fn ladder(ctx: &Context, s: &mut Suite) -> Result<(), CliError> {
    let w = ctx.spec.omega;
    let pts = Sampler::new(ctx.cfg.seed).points(&[AxisRegion::Full], LADDER_POINTS);
    let r = verify_ladder(&harmonic_hamiltonian(1, 0, w), &harmonic_ladder(w, 1, 0), &pts)?;
    s.bound("harmonic {H, A+} - i w A+", r, HARMONIC_TOLERANCE);
    let opts = FitOptions { seed: ctx.cfg.seed, ..FitOptions::default() };
    let c = fit_harmonic_multiplier(w, &opts)?;
    s.bound("harmonic fitted multiplier - 1", (c - 1.0).abs(), HARMONIC_TOLERANCE);
    let pts = ctx.points(1, LADDER_POINTS);
    for (j, l) in ctx.ladders()?.iter().enumerate() {
        let r = verify_ladder(&ctx.spec.axis_hamiltonian(j), l, &pts)?;
        s.bound(format!("axis {} {{H{}, A+}} - i nu A+ (nu = {})", j + 1, j + 1, l.nu()), r, LADDER_TOLERANCE);
    }
    Ok(())
}

fn factorization(ctx: &Context, s: &mut Suite) -> Result<(), CliError> {
    for j in 0..ctx.spec.dim() {
        let f = pq_polynomials(&ctx.spec, j, CoefficientSource::Fitted, ctx.cfg.seed.wrapping_add(2 + j as u64))?;
        s.bound(format!("axis {} Q fit residual", j + 1), f.q_residual, 1e-7);
        s.bound(format!("axis {} P fit residual", j + 1), f.p_residual, 1e-7);
        let nu = ctx.spec.frequencies()[j];
        let d = f.p.relative_distance(&f.q.derivative().scale(Complex64::new(0.0, nu)));
        s.bound(format!("axis {} P - i nu Q'", j + 1), d, COEFFICIENT_TOLERANCE);
    }
    // b = 0, k = 1 on the harmonic branch x > 0: Q = 8 H^3
    let w = ctx.spec.omega;
    let ax = AxisParams::new(1, 0.0, Sign::Plus)?;
    let one = SystemSpec::new(w, vec![ax])?;
    let l = deformed_ladder(w, &ax, CoefficientSource::Fitted, 1, 0)?;
    let pts = Sampler::new(ctx.cfg.seed).points(&[AxisRegion::Positive], 200);
    let f = fit_factorization(&one.axis_hamiltonian(0), &l, &pts)?;
    let d = f.q.relative_distance(&Polynomial::from_real(&[0.0, 0.0, 0.0, 8.0]));
    s.bound("b = 0, k = 1: Q vs 8 H^3", d, COEFFICIENT_TOLERANCE);
    Ok(())
}

fn quartic(_: &Context, s: &mut Suite) -> Result<(), CliError> {
    let grid: Vec<f64> = (0..101).map(|i| -DOMAIN_HALF_WIDTH + 2.0 * DOMAIN_HALF_WIDTH * i as f64 / 100.0).collect();
    for (w, b) in QUARTIC_CASES {
        for e in [Sign::Plus, Sign::Minus] {
            let ax = AxisParams::new(1, b, e)?;
            let worst = grid.iter().map(|x| scaled_quartic_residual(*x, potential_1d(*x, w, &ax), w, b)).fold(0.0, f64::max);
            s.bound(format!("w = {w}, b = {b}, eps = {:+}", e.value()), worst, QUARTIC_TOLERANCE);
        }
    }
    Ok(())
}

fn integrals(ctx: &Context, s: &mut Suite) -> Result<(), CliError> {
    let pts = ctx.points(3, INTEGRAL_POINTS);
    for pair in ctx.pairs() {
        let set = ctx.pair(pair)?;
        s.note(format!("pair ({}, {}): m = ({}, {})", pair.0 + 1, pair.1 + 1, set.m.0, set.m.1));
        for z in [&set.i1, &set.i2, &set.k] {
            let r = commutator_residual(&ctx.hamiltonian, z, &pts)?;
            s.bound(format!("{{H, {}}}", z.name()), r, COMMUTE_TOLERANCE);
        }
    }
    Ok(())
}

fn algebra(ctx: &Context, s: &mut Suite) -> Result<(), CliError> {
    if ctx.spec.dim() != 2 {
        s.note(format!("two-axis relations not applicable to N = {}", ctx.spec.dim()));
        return Ok(());
    }
    let set = ctx.pair((0, 1))?;
    let seed = ctx.cfg.seed;
    let pq = [
        pq_polynomials(&ctx.spec, 0, CoefficientSource::Fitted, seed.wrapping_add(2))?,
        pq_polynomials(&ctx.spec, 1, CoefficientSource::Fitted, seed.wrapping_add(3))?,
    ];
    let pts = ctx.points(4, INTEGRAL_POINTS);
    for rel in algebra_relations_2d(&set, &ctx.hamiltonian, &pq) {
        let chk = check_relation(&rel, &pts, ALGEBRA_TOLERANCE)?;
        s.bound(&chk.label, chk.max_residual, chk.tolerance);
    }
    let c = fit_bracket_coefficient(&set.k, &set.i1, &set.i2, &pts)?;
    let expected = structure_constant(&set);
    s.note(format!("{{K, I1}} coefficient: fitted {} vs 2 i m1 nu1 = {}", fmt_complex(c), fmt_complex(expected)));
    s.bound("relative difference", (c - expected).norm() / expected.norm(), 1e-8);
    Ok(())
}

fn cubic_system(ctx: &Context) -> Result<CubicSystem, CliError> {
    let ax = &ctx.spec.axes[0];
    Ok(CubicSystem::new(ctx.spec.omega, ax.b, ax.epsilon)?)
}

fn cubic_algebra(ctx: &Context, s: &mut Suite) -> Result<(), CliError> {
    let sys = cubic_system(ctx)?;
    let pts = Sampler::new(ctx.cfg.seed.wrapping_add(5)).points(&sys.regions(), INTEGRAL_POINTS);
    let rep = cubic_algebra_check(&sys, &pts)?;
    s.note(format!("w = {}, b = {}, eps = {:+}", sys.omega, sys.b, sys.epsilon.value()));
    s.bound("{A, C} + 4 w^2 B", rep.ac_residual, ALGEBRA_TOLERANCE);
    s.bound("{B, C} fit residual", rep.fit_residual, ALGEBRA_TOLERANCE);
    for (name, got, want) in [("c3", rep.c3, 8.0), ("c2", rep.c2, 12.0), ("c1", rep.c1, -4.0)] {
        s.bound(format!("{name} = {got:.9} vs {want}"), relative(got, want), COEFFICIENT_TOLERANCE);
    }
    s.note(format!(
        "cA = {:.9e}; printed -4(4 b^2 w^4/27) = {:.9e}, single factor -4 b^2 w^4/27 = {:.9e}",
        rep.c_a,
        rep.printed_c_a_product(),
        rep.printed_c_a_single()
    ));
    s.note(format!("c0 = {:.9e}; printed 4 b^3 w^6/729 = {:.9e}", rep.c0, rep.printed_c0()));
    Ok(())
}

fn third_order(ctx: &Context, s: &mut Suite) -> Result<(), CliError> {
    let sys = cubic_system(ctx)?;
    let pts = Sampler::new(ctx.cfg.seed.wrapping_add(6)).points(&sys.regions(), INTEGRAL_POINTS);
    s.bound("{H, B}", commutator_residual(&sys.hamiltonian, &sys.b_integral, &pts)?, COMMUTE_TOLERANCE);
    s.equal("momentum degree of B", momentum_degree(&sys.b_integral, ctx.cfg.seed)?, 3);
    Ok(())
}

fn rank(ctx: &Context, s: &mut Suite) -> Result<(), CliError> {
    let n = ctx.spec.dim();
    if n < 2 {
        s.note("a single axis has no pair integrals");
        return Ok(());
    }
    let sets = ctx.pairs().into_iter().map(|p| ctx.pair(p)).collect::<Result<Vec<_>, _>>()?;
    let mut obs = vec![&ctx.hamiltonian];
    obs.extend(sets.iter().map(|t| &t.k));
    obs.extend(sets.iter().map(|t| &t.x1));
    let names: Vec<&str> = obs.iter().map(|o| o.name()).collect();
    let count = independent_count(&obs, &ctx.points(7, RANK_POINTS))?;
    s.at_least(format!("rank {} of ({})", 2 * n - 1, names.join(", ")), count, RANK_REQUIRED, RANK_POINTS);
    Ok(())
}

fn closure(ctx: &Context, s: &mut Suite) -> Result<(), CliError> {
    let c = closure_test(&ctx.spec, &ctx.init, ctx.cfg.run.tolerance, DEFAULT_CLOSURE_EPS)?;
    s.note(format!("period 4 pi/(w gcd k) = {:.12}", predict_period(&ctx.spec)));
    s.bound("return distance", c.return_distance, DEFAULT_CLOSURE_EPS);
    s.note(format!("closest approach {:.3e} at t = {:.12}", c.best_distance, c.best_time));
    Ok(())
}

fn conservation(ctx: &Context, s: &mut Suite) -> Result<(), CliError> {
    let tr = ctx.trajectory()?;
    s.note(format!("t = [0, {}], tol = {:e}, {} accepted steps", ctx.cfg.run.t_end, ctx.cfg.run.tolerance, tr.stats.accepted));
    s.bound("H drift", tr.energy_drift(), DRIFT_TOLERANCE);
    for (name, d) in tr.monitor_drifts() {
        s.bound(format!("{name} drift"), d, DRIFT_TOLERANCE);
    }
    Ok(())
}

fn degree(ctx: &Context, s: &mut Suite) -> Result<(), CliError> {
    for pair in ctx.pairs() {
        let set = ctx.pair(pair)?;
        let (m1, m2) = set.m;
        let d = momentum_degree(&set.f1, ctx.cfg.seed)?;
        s.equal(format!("deg {} (m = ({m1}, {m2})) vs 3(m1 + m2)", set.f1.name()), d, 3 * (m1 + m2));
        let printed = 3u64.pow(m1 + m2);
        if printed != d as u64 {
            s.note(format!("  printed order 3^(m1 + m2) = {printed} does not match (not asserted)"));
        }
    }
    Ok(())
}

/// `a+bi` with nine significant digits.
pub fn fmt_complex(z: Complex64) -> String {
    format!("{:.9e}{:+.9e}i", z.re, z.im)
}


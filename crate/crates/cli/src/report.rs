//! Printed-versus-fitted comparison tables. The output depends only on the
//! configuration, so equal inputs give byte-identical reports.

use std::fmt::Write as _;

use superladder_core::algebra::{cubic_algebra_check, fit_bracket_coefficient, structure_constant};
use superladder_core::integrals::{momentum_degree, CubicSystem};
use superladder_core::ladders::{
    deformed_ladder, fit_factorization, fit_harmonic_multiplier, fit_third_order, harmonic_ladder, polynomial_rows,
    pq_polynomials, printed_factorization, verify_ladder, CoefficientSource, FitOptions, Radicand, ALPHA_NAMES,
    ALPHA_RATIONAL,
};
use superladder_core::polynomial::Polynomial;
use superladder_core::sampling::{AxisRegion, Sampler};
use superladder_core::systems::harmonic_hamiltonian;
use superladder_core::Complex64;

use crate::suites::{fmt_complex, Context};
use crate::{CliError, RunConfig};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The full report as text.
pub fn render(cfg: &RunConfig) -> Result<String, CliError> {
    let ctx = Context::new(cfg)?;
    let mut out = String::new();
    let s = &ctx.cfg.system;
    let _ = writeln!(out, "# superladder report");
    let _ = writeln!(out, "w = {}, k = {:?}, b = {:?}, eps = {:?}, seed = {}", s.omega, s.k, s.b, s.epsilon, cfg.seed);
    harmonic(&ctx, &mut out)?;
    ladders(&ctx, &mut out)?;
    factorization(&ctx, &mut out)?;
    structure(&ctx, &mut out)?;
    cubic(&ctx, &mut out)?;
    degrees(&ctx, &mut out)?;
    Ok(out)
}

fn section(out: &mut String, title: &str) {
    let _ = writeln!(out, "\n## {title}");
}

fn row(out: &mut String, name: &str, printed: Complex64, fitted: Complex64) {
    let _ = writeln!(
        out,
        "{name:<22} {:>36} {:>36} {:>10.3e}",
        fmt_complex(printed),
        fmt_complex(fitted),
        (printed - fitted).norm()
    );
}

fn header(out: &mut String) {
    let _ = writeln!(out, "{:<22} {:>36} {:>36} {:>10}", "coefficient", "printed", "fitted", "|diff|");
}

fn harmonic(ctx: &Context, out: &mut String) -> Result<(), CliError> {
    let w = ctx.spec.omega;
    section(out, &format!("Harmonic baseline (w = {w})"));
    let opts = FitOptions { seed: ctx.cfg.seed, ..FitOptions::default() };
    let c = fit_harmonic_multiplier(w, &opts)?;
    let _ = writeln!(out, "A+ = p - i c w x: fitted c = {c:.15}");
    let pts = Sampler::new(ctx.cfg.seed).points(&[AxisRegion::Full], 200);
    let h = harmonic_hamiltonian(1, 0, w);
    let l = harmonic_ladder(w, 1, 0);
    let _ = writeln!(out, "ladder residual {:.3e}", verify_ladder(&h, &l, &pts)?);
    let f = fit_factorization(&h, &l, &pts)?;
    header(out);
    for r in polynomial_rows("Q", &Polynomial::from_real(&[0.0, 2.0, 0.0, 0.0]), &f.q) {
        row(out, &r.name, r.printed, r.fitted);
    }
    let p = Polynomial::new(vec![2.0 * I * w, 0.0.into(), 0.0.into()]);
    for r in polynomial_rows("P", &p, &f.p) {
        row(out, &r.name, r.printed, r.fitted);
    }
    Ok(())
}

fn ladders(ctx: &Context, out: &mut String) -> Result<(), CliError> {
    let opts = FitOptions { seed: ctx.cfg.seed, ..FitOptions::default() };
    for (j, ax) in ctx.spec.axes.iter().enumerate() {
        section(out, &format!("Third-order ladder, axis {} (k = {}, b = {}, eps = {:+})", j + 1, ax.k, ax.b, ax.epsilon.value()));
        let lin = fit_third_order(ctx.spec.omega, ax, Radicand::Linear, &opts)?;
        let _ = writeln!(out, "{:<18} {:>16} {:>16} {:>10} {:>5}", "multiplier", "printed", "fitted", "|diff|", "set");
        for i in 0..8 {
            let (p, f) = (ALPHA_RATIONAL[i], lin.coefficients.alpha[i]);
            let set = if lin.determined[i] { "yes" } else { "no" };
            let _ = writeln!(out, "{:<18} {p:>16.12} {f:>16.12} {:>10.3e} {set:>5}", ALPHA_NAMES[i], (p - f).abs());
        }
        let sq = fit_third_order(ctx.spec.omega, ax, Radicand::Squared, &opts)?;
        let pts = Sampler::new(ctx.cfg.seed.wrapping_add(1)).points(&[ax.region()], opts.verify_samples);
        let printed = deformed_ladder(ctx.spec.omega, ax, CoefficientSource::Printed, 1, 0)?;
        let h1 = superladder_core::SystemSpec::new(ctx.spec.omega, vec![*ax])?.axis_hamiltonian(0);
        let _ = writeln!(out, "radicand hypotheses, ladder residual over {} points:", opts.verify_samples);
        let _ = writeln!(out, "  sqrt(b + x^2), fitted      {:.3e}", lin.residual);
        let _ = writeln!(out, "  sqrt(b^2 + x^2), fitted    {:.3e}", sq.residual);
        let _ = writeln!(out, "  printed operator           {:.3e}", verify_ladder(&h1, &printed, &pts)?);
    }
    Ok(())
}

fn factorization(ctx: &Context, out: &mut String) -> Result<(), CliError> {
    for (j, ax) in ctx.spec.axes.iter().enumerate() {
        section(out, &format!("Factorization, axis {} (nu = {})", j + 1, ax.frequency(ctx.spec.omega)));
        let f = pq_polynomials(&ctx.spec, j, CoefficientSource::Fitted, ctx.cfg.seed.wrapping_add(2 + j as u64))?;
        let p = printed_factorization(ctx.spec.omega, ax);
        let _ = writeln!(out, "fit residuals: Q {:.3e}, P {:.3e}", f.q_residual, f.p_residual);
        header(out);
        for r in polynomial_rows("Q", &p.q, &f.q).into_iter().chain(polynomial_rows("P", &p.p, &f.p)) {
            row(out, &r.name, r.printed, r.fitted);
        }
    }
    Ok(())
}

fn structure(ctx: &Context, out: &mut String) -> Result<(), CliError> {
    section(out, "Structure constant of {K, I1} = c I2");
    for pair in ctx.pairs() {
        let set = ctx.pair(pair)?;
        let pts = ctx.points(4, 100);
        let c = fit_bracket_coefficient(&set.k, &set.i1, &set.i2, &pts)?;
        let _ = writeln!(
            out,
            "pair ({}, {}), m = ({}, {}): fitted {}, 2 i m1 nu1 = {}, printed 2 m1 nu1 = {}",
            pair.0 + 1,
            pair.1 + 1,
            set.m.0,
            set.m.1,
            fmt_complex(c),
            fmt_complex(structure_constant(&set)),
            2.0 * set.lambda
        );
    }
    Ok(())
}

fn cubic(ctx: &Context, out: &mut String) -> Result<(), CliError> {
    let ax = &ctx.spec.axes[0];
    let sys = CubicSystem::new(ctx.spec.omega, ax.b, ax.epsilon)?;
    section(out, &format!("Cubic algebra (w = {}, b = {}, eps = {:+})", sys.omega, sys.b, sys.epsilon.value()));
    let pts = Sampler::new(ctx.cfg.seed.wrapping_add(5)).points(&sys.regions(), 100);
    let rep = cubic_algebra_check(&sys, &pts)?;
    let _ = writeln!(out, "{{A, C}} + 4 w^2 B residual {:.3e}, {{B, C}} fit residual {:.3e}", rep.ac_residual, rep.fit_residual);
    let _ = writeln!(out, "{:<34} {:>18} {:>18}", "constant", "printed", "fitted");
    let lines = [
        ("c3 (A^3)", 8.0, rep.c3),
        ("c2 (H A^2)", 12.0, rep.c2),
        ("c1 (H^3)", -4.0, rep.c1),
        ("cA as -4 (4 b^2 w^4/27)", rep.printed_c_a_product(), rep.c_a),
        ("cA as -4 b^2 w^4/27", rep.printed_c_a_single(), rep.c_a),
        ("c0 (4 b^3 w^6/729)", rep.printed_c0(), rep.c0),
    ];
    for (name, p, f) in lines {
        let _ = writeln!(out, "{name:<34} {p:>18.9e} {f:>18.9e}");
    }
    Ok(())
}

fn degrees(ctx: &Context, out: &mut String) -> Result<(), CliError> {
    section(out, "Momentum degree of f1");
    let _ = writeln!(out, "{:<8} {:>8} {:>9} {:>11} {:>14}  note", "pair", "m", "measured", "3(m1+m2)", "3^(m1+m2)");
    for pair in ctx.pairs() {
        let set = ctx.pair(pair)?;
        let (m1, m2) = set.m;
        let d = momentum_degree(&set.f1, ctx.cfg.seed)?;
        let printed = 3u64.pow(m1 + m2);
        let note = if printed == d as u64 { "" } else { "printed order disagrees" };
        let _ = writeln!(
            out,
            "{:<8} {:>8} {d:>9} {:>11} {printed:>14}  {note}",
            format!("({}, {})", pair.0 + 1, pair.1 + 1),
            format!("({m1}, {m2})"),
            3 * (m1 + m2)
        );
    }
    Ok(())
}

//! The three subcommands as library calls returning an exit code and the
//! text to print.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use superladder_core::dynamics::{closure_test, predict_period, DEFAULT_CLOSURE_EPS};

use crate::export::{projection_svg, projections, trajectory_csv, write_atomic};
use crate::suites::{run_all, Context};
use crate::{report, CliError, RunConfig};

/// Command-line overrides applied on top of the preset and config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::load(self.preset.as_deref(), self.config.as_deref())?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output.dir = out.to_string_lossy().into_owned();
        }
        if let Some(tol) = self.tol {
            cfg.run.tolerance = tol;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub text: String,
}

/// Runs every verification suite; exit 0 iff all pass.
pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let suites = run_all(cfg)?;
    let mut text = String::new();
    for s in &suites {
        let _ = writeln!(text, "[{}] {}", if s.pass { "PASS" } else { "FAIL" }, s.name);
        for line in &s.lines {
            let _ = writeln!(text, "    {line}");
        }
    }
    let passed = suites.iter().filter(|s| s.pass).count();
    let _ = writeln!(text, "{passed}/{} suites passed", suites.len());
    Ok(Outcome { code: if passed == suites.len() { 0 } else { 1 }, text })
}

/// Integrates the configured run, writes CSV and SVG projections, and
/// reports drifts and closure.
pub fn simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ctx = Context::new(cfg)?;
    let tr = ctx.trajectory()?;
    let dir = Path::new(&cfg.output.dir);
    let name = &cfg.output.name;
    let mut text = String::new();
    if cfg.output.csv {
        let path = dir.join(format!("{name}.csv"));
        write_atomic(&path, &trajectory_csv(&tr)?)?;
        let _ = writeln!(text, "wrote {} ({} rows)", path.display(), tr.times.len());
    }
    if cfg.output.svg && tr.times.len() > 1 {
        let pairs = projections(cfg.dim());
        for (a, b) in &pairs {
            let file = if pairs.len() == 1 { format!("{name}.svg") } else { format!("{name}_x{}x{}.svg", a + 1, b + 1) };
            let path = dir.join(file);
            write_atomic(&path, projection_svg(&tr, (*a, *b), name).as_bytes())?;
            let _ = writeln!(text, "wrote {}", path.display());
        }
    }
    let _ = writeln!(text, "steps: {} accepted, {} rejected", tr.stats.accepted, tr.stats.rejected);
    let _ = writeln!(text, "relative drift over [0, {}]:", cfg.run.t_end);
    let _ = writeln!(text, "  {:<8} {:.3e}", "H", tr.energy_drift());
    for (n, d) in tr.monitor_drifts() {
        let _ = writeln!(text, "  {n:<8} {d:.3e}");
    }
    let c = closure_test(&ctx.spec, &ctx.init, cfg.run.tolerance, DEFAULT_CLOSURE_EPS)?;
    let _ = writeln!(
        text,
        "closure at T = {:.12}: distance {:.3e}, closed = {}",
        predict_period(&ctx.spec),
        c.return_distance,
        c.closed
    );
    Ok(Outcome { code: 0, text })
}

pub fn report(cfg: &RunConfig) -> Result<Outcome, CliError> {
    Ok(Outcome { code: 0, text: report::render(cfg)? })
}

//! Run configuration: compiled-in figure presets overlaid with an optional
//! TOML file. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use superladder_core::integrals::{minimal_exponents, pair_exponents};
use superladder_core::{AxisParams, PhasePoint, Sign, SystemSpec};

use crate::CliError;

/// Names accepted by `--preset`.
pub const PRESETS: [&str; 4] = ["fig1", "fig2", "fig3", "fig4"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Seed of the sampling generator.
    pub seed: u64,
    pub system: SystemSection,
    pub run: RunSection,
    #[serde(default)]
    pub integrals: IntegralsSection,
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub omega: f64,
    pub k: Vec<u32>,
    pub b: Vec<f64>,
    pub epsilon: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub t_end: f64,
    pub tolerance: f64,
    /// Uniform output samples over `[0, t_end]`.
    pub samples: usize,
    pub x0: Vec<f64>,
    pub p0: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegralsSection {
    /// Exponents `(m1, m2)` for the pair `(1, 2)`; minimal ones if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    /// Stem of the written files.
    pub name: String,
    pub csv: bool,
    pub svg: bool,
}

impl RunConfig {
    /// A named figure preset.
    pub fn preset(name: &str) -> Result<Self, CliError> {
        let two = |k: [u32; 2]| SystemSection { omega: 3.0, k: k.to_vec(), b: vec![3.0, 5.0], epsilon: vec![1, 1] };
        let three = |k: [u32; 3]| SystemSection { omega: 3.0, k: k.to_vec(), b: vec![3.0, 5.0, 7.0], epsilon: vec![1, 1, 1] };
        let (system, x0, p0) = match name {
            "fig1" => (two([1, 3]), vec![1.0, 1.0], vec![1.0, -3.0]),
            "fig2" => (two([3, 4]), vec![1.0, 1.0], vec![1.0, -3.0]),
            "fig3" => (three([7, 11, 4]), vec![1.0, 1.0, 1.0], vec![1.0, -3.0, 2.0]),
            "fig4" => (three([5, 6, 2]), vec![1.0, 1.0, 1.0], vec![1.0, -3.0, 2.0]),
            other => {
                return Err(CliError::Config(format!("unknown preset {other:?} (expected one of {PRESETS:?})")));
            }
        };
        Ok(Self {
            seed: 0x5eed,
            system,
            run: RunSection { t_end: 20.0, tolerance: 1e-10, samples: 1001, x0, p0 },
            integrals: IntegralsSection::default(),
            output: OutputSection { dir: ".".into(), name: name.into(), csv: true, svg: true },
        })
    }

    /// Parses a complete configuration.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// `base` with every key present in `text` replaced.
    pub fn overlay(base: &Self, text: &str) -> Result<Self, CliError> {
        let patch: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        let mut merged = toml::Table::try_from(base).map_err(|e| CliError::Config(e.to_string()))?;
        merge(&mut merged, patch);
        let cfg: Self = merged.try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Preset (default `fig1`) overlaid with the file at `path`, if any.
    pub fn load(preset: Option<&str>, path: Option<&Path>) -> Result<Self, CliError> {
        let base = Self::preset(preset.unwrap_or("fig1"))?;
        match path {
            None => Ok(base),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                Self::overlay(&base, &text)
            }
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always serialisable")
    }

    pub fn dim(&self) -> usize {
        self.system.k.len()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let n = self.dim();
        let bad = |msg: String| Err(CliError::Config(msg));
        if n == 0 {
            return bad("system.k must list at least one axis".into());
        }
        for (name, len) in [
            ("system.b", self.system.b.len()),
            ("system.epsilon", self.system.epsilon.len()),
            ("run.x0", self.run.x0.len()),
            ("run.p0", self.run.p0.len()),
        ] {
            if len != n {
                return bad(format!("{name} has {len} entries, system.k has {n}"));
            }
        }
        if !(self.run.tolerance > 0.0) {
            return bad("run.tolerance must be > 0".into());
        }
        if !(self.run.t_end >= 0.0) || !self.run.t_end.is_finite() {
            return bad("run.t_end must be finite and >= 0".into());
        }
        if self.run.samples < 2 {
            return bad("run.samples must be at least 2".into());
        }
        if let Some(m) = &self.integrals.m {
            if m.len() != 2 || m.contains(&0) {
                return bad("integrals.m must be two positive integers".into());
            }
        }
        self.spec()?;
        self.initial_state()?;
        Ok(())
    }

    pub fn spec(&self) -> Result<SystemSpec, CliError> {
        let s = &self.system;
        let axes = s
            .k
            .iter()
            .zip(&s.b)
            .zip(&s.epsilon)
            .map(|((k, b), e)| AxisParams::new(*k, *b, Sign::from_int(*e)?))
            .collect::<superladder_core::Result<Vec<_>>>()
            .map_err(|e| CliError::Config(e.to_string()))?;
        SystemSpec::new(s.omega, axes).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn initial_state(&self) -> Result<PhasePoint, CliError> {
        PhasePoint::new(self.run.x0.clone(), self.run.p0.clone()).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Exponents for the pair `(i, j)`: the override for `(0, 1)`, minimal
    /// ones otherwise.
    pub fn exponents(&self, spec: &SystemSpec, pair: (usize, usize)) -> (u32, u32) {
        match (&self.integrals.m, pair) {
            (Some(m), (0, 1)) => (m[0], m[1]),
            _ => pair_exponents(spec, pair),
        }
    }

    /// Minimal exponents of the pair `(0, 1)` regardless of overrides.
    pub fn minimal(&self) -> (u32, u32) {
        minimal_exponents(self.system.k[0], self.system.k[1.min(self.dim() - 1)])
    }
}

fn merge(base: &mut toml::Table, patch: toml::Table) {
    for (key, value) in patch {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(p)) => merge(b, p),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_round_trip() {
        for name in PRESETS {
            let cfg = RunConfig::preset(name).unwrap();
            assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg);
        }
    }

    #[test]
    fn overlay_replaces_only_given_keys() {
        let base = RunConfig::preset("fig1").unwrap();
        let cfg = RunConfig::overlay(&base, "seed = 7\n[run]\nt_end = 5.0\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.run.t_end, 5.0);
        assert_eq!(cfg.run.tolerance, base.run.tolerance);
        assert_eq!(cfg.system, base.system);
    }

    #[test]
    fn strictness() {
        let base = RunConfig::preset("fig1").unwrap();
        assert!(RunConfig::overlay(&base, "[system]\nomgea = 3.0\n").is_err());
        assert!(RunConfig::overlay(&base, "[system]\nomega 3\n").is_err());
        assert!(RunConfig::overlay(&base, "[plot]\nx = 1\n").is_err());
        assert!(RunConfig::overlay(&base, "[system]\nk = [1, 2, 3]\n").is_err());
        assert!(RunConfig::overlay(&base, "[system]\nepsilon = [1, 0]\n").is_err());
        assert!(RunConfig::overlay(&base, "[integrals]\nm = [1]\n").is_err());
        assert!(RunConfig::preset("fig9").is_err());
    }
}

#![allow(dead_code)]

use superladder_core::ladders::{system_ladders, CoefficientSource, LadderOperator};
use superladder_core::{AxisParams, PhasePoint, Sign, SystemSpec};

pub fn spec(omega: f64, ks: &[u32], bs: &[f64]) -> SystemSpec {
    let axes = ks.iter().zip(bs).map(|(k, b)| AxisParams::new(*k, *b, Sign::Plus).unwrap()).collect();
    SystemSpec::new(omega, axes).unwrap()
}

pub fn fig1() -> SystemSpec {
    spec(3.0, &[1, 3], &[3.0, 5.0])
}

pub fn fig2() -> SystemSpec {
    spec(3.0, &[3, 4], &[3.0, 5.0])
}

pub fn fig3() -> SystemSpec {
    spec(3.0, &[7, 11, 4], &[3.0, 5.0, 7.0])
}

pub fn fig4() -> SystemSpec {
    spec(3.0, &[5, 6, 2], &[3.0, 5.0, 7.0])
}

pub fn fig1_init() -> PhasePoint {
    PhasePoint::new(vec![1.0, 1.0], vec![1.0, -3.0]).unwrap()
}

pub fn fig3_init() -> PhasePoint {
    PhasePoint::new(vec![1.0, 1.0, 1.0], vec![1.0, -3.0, 2.0]).unwrap()
}

pub fn fitted(spec: &SystemSpec) -> Vec<LadderOperator> {
    system_ladders(spec, CoefficientSource::Fitted).unwrap()
}

/// `|a - b| <= tol * max(1, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

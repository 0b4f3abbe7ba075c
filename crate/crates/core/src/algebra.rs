//! Polynomial Poisson algebras of the constructed integrals, checked by
//! residuals at sample points and by fitting structure constants.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrals::{CubicSystem, IntegralSet};
use crate::ladders::FactorizationPolynomials;
use crate::linalg::{least_squares, numerical_rank};
use crate::phase_space::{poisson_bracket, Observable, PhasePoint};
use crate::sampling::Sampler;
use crate::systems::SystemSpec;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default tolerance for relations involving nested brackets.
pub const ALGEBRA_TOLERANCE: f64 = 1e-6;
/// Relative singular-value threshold of [`jacobian_rank`].
pub const RANK_THRESHOLD: f64 = 1e-8;

/// `{lhs.0, lhs.1} = rhs`.
#[derive(Clone, Debug)]
pub struct AlgebraRelation {
    pub lhs: (Observable, Observable),
    pub rhs: Observable,
    pub label: String,
}

impl AlgebraRelation {
    pub fn new(a: &Observable, b: &Observable, rhs: Observable, label: impl Into<String>) -> Self {
        Self { lhs: (a.clone(), b.clone()), rhs, label: label.into() }
    }

    /// `|{lhs} - rhs| / (1 + |rhs|)` at `pt`.
    pub fn residual(&self, pt: &PhasePoint) -> Result<f64> {
        let l = poisson_bracket(&self.lhs.0, &self.lhs.1, pt)?;
        let r = self.rhs.evaluate(pt)?;
        Ok((l - r).norm() / (1.0 + r.norm()))
    }
}

/// Outcome of [`check_relation`].
#[derive(Clone, Debug, PartialEq)]
pub struct RelationCheck {
    pub label: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Max residual of `rel` over `pts`; passes iff it is `<= tol`.
pub fn check_relation(rel: &AlgebraRelation, pts: &[PhasePoint], tol: f64) -> Result<RelationCheck> {
    let mut worst: f64 = 0.0;
    for pt in pts {
        let r = rel.residual(pt)?;
        // NaN must fail the check, not vanish in a max
        worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
        if worst.is_nan() {
            break;
        }
    }
    Ok(RelationCheck {
        label: rel.label.clone(),
        samples: pts.len(),
        max_residual: worst,
        tolerance: tol,
        pass: worst <= tol,
    })
}

/// The structure constant of `{K, I1} = 2 lambda I2`. Ladder relations carry
/// a factor `i` (`{H, A+} = i nu A+`), so `lambda = i m1 nu1`.
pub fn structure_constant(set: &IntegralSet) -> Complex64 {
    2.0 * I * set.lambda
}

/// The three relations of the two-dimensional algebra:
/// `{K, I1} = 2 lambda I2`, `{K, I2} = 2 lambda I1` and
/// `{I1, I2} = 2 Q1^(m1-1) Q2^(m2-1) (m2^2 Q1 P2 - m1^2 Q2 P1)`
/// with `Q_j`, `P_j` evaluated at `H1 = (H + K)/2`, `H2 = (H - K)/2`.
pub fn algebra_relations_2d(
    set: &IntegralSet,
    hamiltonian: &Observable,
    pq: &[FactorizationPolynomials; 2],
) -> Vec<AlgebraRelation> {
    let c = structure_constant(set);
    let r1 = AlgebraRelation::new(&set.k, &set.i1, set.i2.scale(c), "{K,I1} = 2 lambda I2");
    let r2 = AlgebraRelation::new(&set.k, &set.i2, set.i1.scale(c), "{K,I2} = 2 lambda I1");
    let r3 = AlgebraRelation::new(&set.i1, &set.i2, i1_i2_rhs(set, hamiltonian, pq), "{I1,I2} = f(H,K)");
    alloc::vec![r1, r2, r3]
}

/// Right-hand side of `{I1, I2}` as an observable built from `H` and `K`.
pub fn i1_i2_rhs(set: &IntegralSet, hamiltonian: &Observable, pq: &[FactorizationPolynomials; 2]) -> Observable {
    let (m1, m2) = set.m;
    let h1 = (hamiltonian + &set.k).scale_real(0.5);
    let h2 = (hamiltonian - &set.k).scale_real(0.5);
    let q1 = pq[0].q.compose(&h1);
    let q2 = pq[1].q.compose(&h2);
    let p1 = pq[0].p.compose(&h1);
    let p2 = pq[1].p.compose(&h2);
    let bracket = (&q1 * &p2).scale_real((m2 * m2) as f64) - (&q2 * &p1).scale_real((m1 * m1) as f64);
    (q1.pow(m1 - 1) * q2.pow(m2 - 1) * bracket).scale_real(2.0)
}

/// Least-squares coefficient `c` in `{a, b} ~ c g` over `pts`.
pub fn fit_bracket_coefficient(a: &Observable, b: &Observable, g: &Observable, pts: &[PhasePoint]) -> Result<Complex64> {
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for pt in pts {
        let gv = g.evaluate(pt)?;
        num += gv.conj() * poisson_bracket(a, b, pt)?;
        den += gv.norm_sqr();
    }
    if !(den > 0.0) {
        return Err(Error::RankDeficient { condition: f64::INFINITY });
    }
    Ok(num / den)
}

/// Fitted `{B, C}` polynomial `c3 A^3 + c2 H A^2 + c1 H^3 + cA A + c0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicAlgebraReport {
    pub omega: f64,
    pub b: f64,
    pub samples: usize,
    /// Max relative residual of `{A, C} = -4 w^2 B`.
    pub ac_residual: f64,
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c_a: f64,
    pub c0: f64,
    pub fit_residual: f64,
}

impl CubicAlgebraReport {
    /// `c_A` read as `-4 (4 b^2 w^4 / 27)`.
    pub fn printed_c_a_product(&self) -> f64 {
        -16.0 * self.b * self.b * self.omega.powi(4) / 27.0
    }

    /// `c_A` read as `-4 b^2 w^4 / 27`.
    pub fn printed_c_a_single(&self) -> f64 {
        -4.0 * self.b * self.b * self.omega.powi(4) / 27.0
    }

    /// Printed `c0 = 4 b^3 w^6 / 729`.
    pub fn printed_c0(&self) -> f64 {
        4.0 * self.b.powi(3) * self.omega.powi(6) / 729.0
    }
}

/// Checks `{A, C} = -4 w^2 B` and fits the `{B, C}` polynomial.
pub fn cubic_algebra_check(sys: &CubicSystem, pts: &[PhasePoint]) -> Result<CubicAlgebraReport> {
    let w2 = sys.omega * sys.omega;
    let ac = AlgebraRelation::new(&sys.a, &sys.c, sys.b_integral.scale_real(-4.0 * w2), "{A,C} = -4 w^2 B");
    let ac_residual = check_relation(&ac, pts, ALGEBRA_TOLERANCE)?.max_residual;

    let n = pts.len();
    let mut a = DMatrix::<f64>::zeros(n, 5);
    let mut y = DVector::<f64>::zeros(n);
    for (r, pt) in pts.iter().enumerate() {
        let h = sys.hamiltonian.evaluate(pt)?.re;
        let av = sys.a.evaluate(pt)?.re;
        let row = [av.powi(3), h * av * av, h.powi(3), av, 1.0];
        for (c, v) in row.iter().enumerate() {
            a[(r, c)] = *v;
        }
        y[r] = poisson_bracket(&sys.b_integral, &sys.c, pt)?.re;
    }
    let coef = least_squares(&a, &y)?;
    let fitted = &a * &coef;
    let fit_residual = (0..n)
        .map(|r| (fitted[r] - y[r]).abs() / (1.0 + y[r].abs()))
        .fold(0.0, f64::max);
    if !(fit_residual <= ALGEBRA_TOLERANCE) {
        return Err(Error::FitResidual { residual: fit_residual, tolerance: ALGEBRA_TOLERANCE });
    }
    Ok(CubicAlgebraReport {
        omega: sys.omega,
        b: sys.b,
        samples: n,
        ac_residual,
        c3: coef[0],
        c2: coef[1],
        c1: coef[2],
        c_a: coef[3],
        c0: coef[4],
        fit_residual,
    })
}

/// Numerical rank of the Jacobian of `obs` (real parts) with respect to
/// `(x, p)` at `pt`. Rows are normalised first so integrals of very
/// different magnitude count equally.
pub fn jacobian_rank(obs: &[&Observable], pt: &PhasePoint, threshold: f64) -> Result<usize> {
    let mut rows = Vec::with_capacity(obs.len());
    for o in obs {
        let g = o.gradient(pt)?;
        let mut row: Vec<f64> = g.dx.iter().chain(&g.dp).map(|c| c.re).collect();
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|v| *v /= norm);
        }
        rows.push(row);
    }
    Ok(numerical_rank(&rows, threshold))
}

/// Number of `pts` at which [`jacobian_rank`] equals `obs.len()`.
pub fn independent_count(obs: &[&Observable], pts: &[PhasePoint]) -> Result<usize> {
    let mut count = 0;
    for pt in pts {
        if jacobian_rank(obs, pt, RANK_THRESHOLD)? == obs.len() {
            count += 1;
        }
    }
    Ok(count)
}

/// Seeded sample points for `spec`.
pub fn sample_points(spec: &SystemSpec, seed: u64, count: usize) -> Vec<PhasePoint> {
    Sampler::new(seed).points(&spec.regions(), count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladders::harmonic_ladder;
    use crate::sampling::AxisRegion;
    use crate::systems::{harmonic_hamiltonian, Sign};

    #[test]
    fn canonical_relation_is_exact() {
        let x = Observable::position(1, 0);
        let p = Observable::momentum(1, 0);
        let rel = AlgebraRelation::new(&x, &p, Observable::real_constant(1, 1.0), "{x,p} = 1");
        let pts = Sampler::new(1).points(&[crate::sampling::AxisRegion::Full], 20);
        let chk = check_relation(&rel, &pts, 1e-15).unwrap();
        assert_eq!(chk.max_residual, 0.0);
        assert!(chk.pass);
    }

    #[test]
    fn nan_residual_fails() {
        let x = Observable::position(1, 0);
        let rel = AlgebraRelation::new(&x, &x, Observable::real_constant(1, f64::NAN), "nan");
        let pts = Sampler::new(1).points(&[crate::sampling::AxisRegion::Full], 3);
        assert!(!check_relation(&rel, &pts, 1.0).unwrap().pass);
    }

    #[test]
    fn harmonic_algebra() {
        let hams: Vec<_> = (0..2).map(|j| harmonic_hamiltonian(2, j, 1.3)).collect();
        let h = &hams[0] + &hams[1];
        let ladders: Vec<_> = (0..2).map(|j| harmonic_ladder(1.3, 2, j)).collect();
        let set = crate::integrals::build_pair_from(&hams, &ladders, (0, 1), (1, 1)).unwrap();
        // harmonic ladder p - i w x: Q = 2H, P = 2 i w
        let pq = FactorizationPolynomials {
            p: crate::polynomial::Polynomial::new(alloc::vec![2.0 * I * 1.3]),
            q: crate::polynomial::Polynomial::from_real(&[0.0, 2.0]),
            p_residual: 0.0,
            q_residual: 0.0,
        };
        let rels = algebra_relations_2d(&set, &h, &[pq.clone(), pq]);
        let pts = Sampler::new(4).points(&[AxisRegion::Full; 2], 50);
        for rel in &rels {
            let chk = check_relation(rel, &pts, 1e-12).unwrap();
            assert!(chk.pass, "{} {}", chk.label, chk.max_residual);
        }
    }

    #[test]
    fn cubic_algebra_at_b_zero_has_no_b_terms() {
        let sys = CubicSystem::new(1.5, 0.0, Sign::Plus).unwrap();
        let pts = Sampler::new(9).points(&sys.regions(), 60);
        let rep = cubic_algebra_check(&sys, &pts).unwrap();
        assert!(rep.c_a.abs() < 1e-6 && rep.c0.abs() < 1e-6, "{rep:?}");
    }
}

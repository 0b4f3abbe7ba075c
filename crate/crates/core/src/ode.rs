//! Adaptive Dormand-Prince 8(5,3) integration with 7th-order dense output,
//! and a fixed-step leapfrog for separable Hamiltonians.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Step-size controller parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Tolerances {
    /// `rtol = atol = tol`.
    pub fn uniform(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, max_steps: 1_000_000 }
    }
}

/// Counters from one integration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 1.0 / 3.0;
const FAC_MAX: f64 = 6.0;
const EXPO: f64 = 1.0 / 8.0;

/// Stage couplings `(j, a_ij)`, zero-based; stage 13 is `f(t + h, y_new)`.
const A: [&[(usize, f64)]; 16] = [
    &[],
    &[(0, 0.05260015195876773)],
    &[(0, 0.0197250569845379), (1, 0.0591751709536137)],
    &[(0, 0.02958758547680685), (2, 0.08876275643042054)],
    &[(0, 0.2413651341592667), (2, -0.8845494793282861), (3, 0.924834003261792)],
    &[(0, 0.037037037037037035), (3, 0.17082860872947386), (4, 0.12546768756682242)],
    &[(0, 0.037109375), (3, 0.17025221101954405), (4, 0.06021653898045596), (5, -0.017578125)],
    &[(0, 0.03709200011850479), (3, 0.17038392571223998), (4, 0.10726203044637328), (5, -0.015319437748624402), (6, 0.008273789163814023)],
    &[(0, 0.6241109587160757), (3, -3.3608926294469414), (4, -0.868219346841726), (5, 27.59209969944671), (6, 20.154067550477894), (7, -43.48988418106996)],
    &[(0, 0.47766253643826434), (3, -2.4881146199716677), (4, -0.590290826836843), (5, 21.230051448181193), (6, 15.279233632882423), (7, -33.28821096898486), (8, -0.020331201708508627)],
    &[(0, -0.9371424300859873), (3, 5.186372428844064), (4, 1.0914373489967295), (5, -8.149787010746927), (6, -18.52006565999696), (7, 22.739487099350505), (8, 2.4936055526796523), (9, -3.0467644718982196)],
    &[(0, 2.273310147516538), (3, -10.53449546673725), (4, -2.0008720582248625), (5, -17.9589318631188), (6, 27.94888452941996), (7, -2.8589982771350235), (8, -8.87285693353063), (9, 12.360567175794303), (10, 0.6433927460157636)],
    &[],
    &[(0, 0.056167502283047954), (6, 0.25350021021662483), (7, -0.2462390374708025), (8, -0.12419142326381637), (9, 0.15329179827876568), (10, 0.00820105229563469), (11, 0.007567897660545699), (12, -0.008298)],
    &[(0, 0.03183464816350214), (5, 0.028300909672366776), (6, 0.053541988307438566), (7, -0.05492374857139099), (10, -0.00010834732869724932), (11, 0.0003825710908356584), (12, -0.00034046500868740456), (13, 0.1413124436746325)],
    &[(0, -0.42889630158379194), (5, -4.697621415361164), (6, 7.683421196062599), (7, 4.06898981839711), (8, 0.3567271874552811), (12, -0.0013990241651590145), (13, 2.9475147891527724), (14, -9.15095847217987)],
];
const C: [f64; 16] = [0.0, 0.05260015195876773, 0.0789002279381516, 0.1183503419072274, 0.2816496580927726, 0.3333333333333333, 0.25, 0.3076923076923077, 0.6512820512820513, 0.6, 0.8571428571428571, 1.0, 1.0, 0.1, 0.2, 0.7777777777777778];
const B: [(usize, f64); 8] = [(0, 0.054293734116568765), (5, 4.450312892752409), (6, 1.8915178993145003), (7, -5.801203960010585), (8, 0.3111643669578199), (9, -0.1521609496625161), (10, 0.20136540080403034), (11, 0.04471061572777259)];
const ER: [(usize, f64); 8] = [(0, 0.01312004499419488), (5, -1.2251564463762044), (6, -0.4957589496572502), (7, 1.6643771824549864), (8, -0.35032884874997366), (9, 0.3341791187130175), (10, 0.08192320648511571), (11, -0.022355307863886294)];
const BHH: [(usize, f64); 3] = [(0, 0.2440944881889764), (8, 0.7338466882816118), (11, 0.022058823529411766)];
/// Dense-output weights of `cont5..cont8`.
const D: [[(usize, f64); 12]; 4] = [
    [(0, -8.428938276109013), (5, 0.5667149535193777), (6, -3.0689499459498917), (7, 2.38466765651207), (8, 2.117034582445028), (9, -0.871391583777973), (10, 2.2404374302607883), (11, 0.6315787787694688), (12, -0.08899033645133331), (13, 18.148505520854727), (14, -9.194632392478356), (15, -4.436036387594894)],
    [(0, 10.427508642579134), (5, 242.28349177525817), (6, 165.20045171727028), (7, -374.5467547226902), (8, -22.113666853125306), (9, 7.733432668472264), (10, -30.674084731089398), (11, -9.332130526430229), (12, 15.697238121770845), (13, -31.139403219565178), (14, -9.35292435884448), (15, 35.81684148639408)],
    [(0, 19.985053242002433), (5, -387.0373087493518), (6, -189.17813819516758), (7, 527.8081592054236), (8, -11.57390253995963), (9, 6.8812326946963), (10, -1.0006050966910838), (11, 0.7777137798053443), (12, -2.778205752353508), (13, -60.19669523126412), (14, 84.32040550667716), (15, 11.99229113618279)],
    [(0, -25.69393346270375), (5, -154.18974869023643), (6, -231.5293791760455), (7, 357.6391179106141), (8, 93.40532418362432), (9, -37.45832313645163), (10, 104.0996495089623), (11, 29.8402934266605), (12, -43.53345659001114), (13, 96.32455395918828), (14, -39.17726167561544), (15, -149.72683625798564)],
];

fn combine(y: &[f64], k: &[Vec<f64>], terms: &[(usize, f64)], h: f64, out: &mut [f64]) {
    out.copy_from_slice(y);
    for &(j, a) in terms {
        let ha = h * a;
        for (o, kj) in out.iter_mut().zip(&k[j]) {
            *o += ha * kj;
        }
    }
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns the state at each
/// of `outputs` (non-decreasing, all `>= t0`). Outputs inside a step come
/// from the dense interpolant; the last output is hit exactly by a step.
pub fn dop853<F>(mut f: F, t0: f64, y0: &[f64], outputs: &[f64], tol: Tolerances) -> Result<(Vec<Vec<f64>>, Stats)>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut stats = Stats::default();
    let mut results = Vec::with_capacity(outputs.len());
    if outputs.windows(2).any(|w| !(w[1] >= w[0])) || outputs.first().is_some_and(|t| !(*t >= t0)) {
        return Err(Error::InvalidParameter("output times must be sorted and start at or after t0".into()));
    }
    if !(tol.rtol > 0.0 && tol.atol > 0.0) {
        return Err(Error::InvalidParameter("tolerances must be positive".into()));
    }
    if !all_finite(y0) {
        return Err(Error::NonFiniteState(t0));
    }
    let t_end = match outputs.last() {
        Some(t) => *t,
        None => return Ok((results, stats)),
    };
    let mut next_out = 0;
    while next_out < outputs.len() && outputs[next_out] == t0 {
        results.push(y0.to_vec());
        next_out += 1;
    }
    if next_out == outputs.len() {
        return Ok((results, stats));
    }

    let mut k = vec![vec![0.0; n]; 16];
    let mut y = y0.to_vec();
    let mut y_new = vec![0.0; n];
    let mut stage = vec![0.0; n];
    let mut t = t0;
    f(t, &y, &mut k[0]);
    stats.evaluations += 1;
    let span = t_end - t0;
    let mut h = initial_step(&mut f, t, &y, &k[0], span, &tol, &mut stats);
    let mut last_rejected = false;

    loop {
        if stats.accepted + stats.rejected >= tol.max_steps {
            return Err(Error::StepSizeUnderflow(t));
        }
        if h.abs() <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow(t));
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        for i in 1..12 {
            combine(&y, &k, A[i], h, &mut stage);
            f(t + C[i] * h, &stage, &mut k[i]);
        }
        stats.evaluations += 11;
        combine(&y, &k, &B, h, &mut y_new);

        let mut err = 0.0;
        let mut err2 = 0.0;
        for i in 0..n {
            let sk = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            let bsum: f64 = B.iter().map(|(j, b)| b * k[*j][i]).sum();
            let e3 = bsum - BHH.iter().map(|(j, b)| b * k[*j][i]).sum::<f64>();
            let e5: f64 = ER.iter().map(|(j, e)| e * k[*j][i]).sum();
            err2 += (e3 / sk) * (e3 / sk);
            err += (e5 / sk) * (e5 / sk);
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h.abs() * err * (1.0 / (deno * n as f64)).sqrt();
        if !err.is_finite() {
            // a blown-up stage: retry with a much smaller step
            h *= 0.1;
            last_rejected = true;
            stats.rejected += 1;
            continue;
        }
        let fac11 = err.powf(EXPO);
        let fac = (fac11 / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let mut h_new = h / fac;

        if err <= 1.0 {
            stats.accepted += 1;
            let t_new = if last { t_end } else { t + h };
            if !all_finite(&y_new) {
                return Err(Error::NonFiniteState(t_new));
            }
            f(t_new, &y_new, &mut k[12]);
            stats.evaluations += 1;

            if next_out < outputs.len() && outputs[next_out] <= t_new {
                let dense = Dense::new(&mut f, t, h, &y, &y_new, &mut k, &mut stats);
                while next_out < outputs.len() && outputs[next_out] <= t_new {
                    let to = outputs[next_out];
                    results.push(if to == t_new { y_new.clone() } else { dense.at(to) });
                    next_out += 1;
                }
            }
            y.copy_from_slice(&y_new);
            let (first, rest) = k.split_at_mut(12);
            first[0].copy_from_slice(&rest[0]);
            t = t_new;
            if last || next_out == outputs.len() {
                return Ok((results, stats));
            }
            if last_rejected {
                h_new = h_new.abs().min(h.abs());
            }
            last_rejected = false;
        } else {
            h_new = h / (fac11 / SAFE).min(1.0 / FAC_MIN);
            last_rejected = true;
            stats.rejected += 1;
        }
        h = h_new;
    }
}

/// Hairer's starting-step heuristic.
fn initial_step<F>(f: &mut F, t: f64, y: &[f64], f0: &[f64], span: f64, tol: &Tolerances, stats: &mut Stats) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len() as f64;
    let sk: Vec<f64> = y.iter().map(|v| tol.atol + tol.rtol * v.abs()).collect();
    let dnf: f64 = f0.iter().zip(&sk).map(|(v, s)| (v / s) * (v / s)).sum::<f64>() / n;
    let dny: f64 = y.iter().zip(&sk).map(|(v, s)| (v / s) * (v / s)).sum::<f64>() / n;
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { 0.01 * (dny / dnf).sqrt() };
    h = h.min(span);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h * b).collect();
    let mut f1 = vec![0.0; y.len()];
    f(t + h, &y1, &mut f1);
    stats.evaluations += 1;
    let der2 = (f1.iter().zip(f0).zip(&sk).map(|((a, b), s)| ((a - b) / s).powi(2)).sum::<f64>() / n).sqrt() / h;
    let der12 = der2.abs().max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / der12).powf(EXPO) };
    (100.0 * h).min(h1).min(span)
}

/// The 7th-order interpolant over one accepted step.
struct Dense {
    t_old: f64,
    h: f64,
    cont: [Vec<f64>; 8],
}

impl Dense {
    fn new<F>(f: &mut F, t: f64, h: f64, y: &[f64], y_new: &[f64], k: &mut [Vec<f64>], stats: &mut Stats) -> Self
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let n = y.len();
        let mut stage = vec![0.0; n];
        for i in 13..16 {
            combine(y, k, A[i], h, &mut stage);
            f(t + C[i] * h, &stage, &mut k[i]);
        }
        stats.evaluations += 3;
        let mut cont: [Vec<f64>; 8] = Default::default();
        for c in cont.iter_mut() {
            *c = vec![0.0; n];
        }
        for i in 0..n {
            let ydiff = y_new[i] - y[i];
            let bspl = h * k[0][i] - ydiff;
            cont[0][i] = y[i];
            cont[1][i] = ydiff;
            cont[2][i] = bspl;
            cont[3][i] = ydiff - h * k[12][i] - bspl;
            for (r, row) in D.iter().enumerate() {
                cont[4 + r][i] = h * row.iter().map(|(j, d)| d * k[*j][i]).sum::<f64>();
            }
        }
        Self { t_old: t, h, cont }
    }

    fn at(&self, t: f64) -> Vec<f64> {
        let s = (t - self.t_old) / self.h;
        let s1 = 1.0 - s;
        let c = &self.cont;
        (0..c[0].len())
            .map(|i| {
                let conpar = c[4][i] + (c[5][i] + (c[6][i] + c[7][i] * s) * s1) * s;
                c[0][i] + (c[1][i] + (c[2][i] + (c[3][i] + conpar * s1) * s) * s1) * s
            })
            .collect()
    }
}

/// Fixed-step kick-drift-kick leapfrog for `H = |p|^2/2 + V(x)`; `force`
/// writes `-grad V`. Returns `(x, p)` after `steps` steps of size `h`.
pub fn leapfrog<F>(mut force: F, x0: &[f64], p0: &[f64], h: f64, steps: usize) -> (Vec<f64>, Vec<f64>)
where
    F: FnMut(&[f64], &mut [f64]),
{
    let mut x = x0.to_vec();
    let mut p = p0.to_vec();
    let mut a = vec![0.0; x.len()];
    force(&x, &mut a);
    for _ in 0..steps {
        for (pi, ai) in p.iter_mut().zip(&a) {
            *pi += 0.5 * h * ai;
        }
        for (xi, pi) in x.iter_mut().zip(&p) {
            *xi += h * pi;
        }
        force(&x, &mut a);
        for (pi, ai) in p.iter_mut().zip(&a) {
            *pi += 0.5 * h * ai;
        }
    }
    (x, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(_t: f64, y: &[f64], out: &mut [f64]) {
        out[0] = y[1];
        out[1] = -y[0];
    }

    #[test]
    fn exponential_decay() {
        let outs: Vec<f64> = (0..=10).map(|i| i as f64 * 0.3).collect();
        let (ys, _) = dop853(|_, y, o| o[0] = -y[0], 0.0, &[1.0], &outs, Tolerances::uniform(1e-12)).unwrap();
        for (t, y) in outs.iter().zip(&ys) {
            assert!((y[0] - (-t).exp()).abs() < 1e-11, "{t} {}", y[0]);
        }
    }

    #[test]
    fn dense_output_matches_closed_form() {
        let outs: Vec<f64> = (0..1000).map(|i| i as f64 * 0.0123).collect();
        let (ys, stats) = dop853(oscillator, 0.0, &[1.0, 0.0], &outs, Tolerances::uniform(1e-11)).unwrap();
        assert!(stats.accepted < outs.len());
        for (t, y) in outs.iter().zip(&ys) {
            assert!((y[0] - t.cos()).abs() < 1e-9 && (y[1] + t.sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn outputs_at_start_are_copies() {
        let (ys, stats) = dop853(oscillator, 0.0, &[1.0, 0.0], &[0.0], Tolerances::uniform(1e-8)).unwrap();
        assert_eq!(ys, vec![vec![1.0, 0.0]]);
        assert_eq!(stats.accepted, 0);
    }

    #[test]
    fn unsorted_outputs_are_rejected() {
        assert!(dop853(oscillator, 0.0, &[1.0, 0.0], &[1.0, 0.5], Tolerances::uniform(1e-8)).is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        let r = dop853(|_, y, o| o[0] = y[0] * y[0], 0.0, &[1.0], &[2.0], Tolerances::uniform(1e-10));
        assert!(matches!(r, Err(Error::StepSizeUnderflow(_)) | Err(Error::NonFiniteState(_))));
    }

    #[test]
    fn leapfrog_is_second_order() {
        let err = |steps: usize| {
            let h = core::f64::consts::TAU / steps as f64;
            let (x, p) = leapfrog(|x, a| a[0] = -x[0], &[1.0], &[0.0], h, steps);
            ((x[0] - 1.0).powi(2) + p[0].powi(2)).sqrt()
        };
        let ratio = err(200) / err(400);
        assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
    }
}

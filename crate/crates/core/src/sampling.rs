//! Seeded sampling of verification points.
//!
//! Positions and momenta are uniform in `[-2, 2]`. Axes flagged as
//! piecewise-smooth (deformation `b = 0`) reject `|x| < 0.1`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::phase_space::PhasePoint;

pub const DOMAIN_HALF_WIDTH: f64 = 2.0;
pub const KINK_EXCLUSION: f64 = 0.1;

/// Which part of the position line an axis is sampled from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisRegion {
    Full,
    /// `[-2, 2]` with `|x| < 0.1` removed.
    AwayFromOrigin,
    /// `[0.1, 2]`
    Positive,
    /// `[-2, -0.1]`
    Negative,
}

#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    fn position(&mut self, region: AxisRegion) -> f64 {
        let w = DOMAIN_HALF_WIDTH;
        match region {
            AxisRegion::Full => self.uniform(-w, w),
            AxisRegion::Positive => self.uniform(KINK_EXCLUSION, w),
            AxisRegion::Negative => self.uniform(-w, -KINK_EXCLUSION),
            AxisRegion::AwayFromOrigin => loop {
                let x = self.uniform(-w, w);
                if x.abs() >= KINK_EXCLUSION {
                    break x;
                }
            },
        }
    }

    pub fn point(&mut self, regions: &[AxisRegion]) -> PhasePoint {
        let w = DOMAIN_HALF_WIDTH;
        let x: Vec<f64> = regions.iter().map(|r| self.position(*r)).collect();
        let p: Vec<f64> = regions.iter().map(|_| self.uniform(-w, w)).collect();
        PhasePoint::new(x, p).expect("sampled coordinates are finite")
    }

    pub fn points(&mut self, regions: &[AxisRegion], count: usize) -> Vec<PhasePoint> {
        (0..count).map(|_| self.point(regions)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_points() {
        let regions = [AxisRegion::Full, AxisRegion::AwayFromOrigin];
        let a = Sampler::new(7).points(&regions, 20);
        let b = Sampler::new(7).points(&regions, 20);
        assert_eq!(a, b);
        let c = Sampler::new(8).points(&regions, 20);
        assert_ne!(a, c);
    }

    #[test]
    fn regions_are_respected() {
        let mut s = Sampler::new(1);
        for pt in s.points(&[AxisRegion::AwayFromOrigin, AxisRegion::Positive, AxisRegion::Negative], 500) {
            assert!(pt.x()[0].abs() >= KINK_EXCLUSION);
            assert!(pt.x()[1] >= KINK_EXCLUSION);
            assert!(pt.x()[2] <= -KINK_EXCLUSION);
            assert!(pt.p().iter().all(|p| p.abs() <= DOMAIN_HALF_WIDTH));
        }
    }
}

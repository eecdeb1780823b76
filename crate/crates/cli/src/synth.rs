//! Deterministic synthetic data with known ground truth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use tubal_core::{tproduct, Tensor3};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),
    #[error("sparse fraction {0} outside [0, 1]")]
    InvalidFraction(f64),
    #[error("amplitude {0} must be finite")]
    InvalidAmplitude(f64),
}

/// Low-rank plus sparse tensor `X = G1 * G2 + S0` with square frontal slices.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankSpec {
    pub n: usize,
    pub n3: usize,
    pub rank: usize,
    /// Fraction of entries carrying a spike.
    pub rho: f64,
    /// Spikes are `±amplitude` with a random sign.
    pub amplitude: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowRankSample {
    pub x: Tensor3,
    pub l0: Tensor3,
    pub s0: Tensor3,
}

/// Standard normal draw by Box-Muller, so the byte stream does not depend
/// on any sampler implementation detail outside this file.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn lowrank(spec: &LowRankSpec) -> Result<LowRankSample, SynthError> {
    let LowRankSpec { n, n3, rank, rho, amplitude, seed } = *spec;
    if n == 0 || n3 == 0 || rank == 0 || rank > n {
        return Err(SynthError::InvalidDims(format!("n={n} n3={n3} rank={rank}")));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(SynthError::InvalidFraction(rho));
    }
    if !amplitude.is_finite() {
        return Err(SynthError::InvalidAmplitude(amplitude));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // scaled so entries of L0 have unit variance
    let scale = 1.0 / ((rank * n3) as f64).sqrt();
    let g1 = Tensor3::from_fn(n, rank, n3, |_, _, _| normal(&mut rng) * scale.sqrt()).expect("valid dims");
    let g2 = Tensor3::from_fn(rank, n, n3, |_, _, _| normal(&mut rng) * scale.sqrt()).expect("valid dims");
    let l0 = tproduct(&g1, &g2).expect("conforming factors");
    let s0 = Tensor3::from_fn(n, n, n3, |_, _, _| {
        if rng.random::<f64>() < rho {
            if rng.random::<bool>() { amplitude } else { -amplitude }
        } else {
            0.0
        }
    })
    .expect("valid dims");
    let x = l0.add(&s0).expect("same shape");
    Ok(LowRankSample { x, l0, s0 })
}

/// Static rank-one background with a bright square bouncing across it.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoSpec {
    pub height: usize,
    pub width: usize,
    pub frames: usize,
    /// Side of the moving square in pixels.
    pub square: usize,
    pub background_amplitude: f64,
    pub square_amplitude: f64,
    pub seed: u64,
}

impl Default for VideoSpec {
    fn default() -> Self {
        Self {
            height: 32,
            width: 32,
            frames: 16,
            square: 6,
            background_amplitude: 1.0,
            square_amplitude: 1.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VideoSample {
    pub x: Tensor3,
    pub background: Tensor3,
    /// 1 on the square's pixels in each frame, 0 elsewhere.
    pub mask: Tensor3,
    /// Top-left corner of the square per frame.
    pub positions: Vec<(usize, usize)>,
}

/// Position along a segment of `span + 1` cells, reflecting at both ends.
fn bounce(start: usize, velocity: usize, t: usize, span: usize) -> usize {
    if span == 0 {
        return 0;
    }
    let period = 2 * span;
    let p = (start + velocity * t) % period;
    if p <= span { p } else { period - p }
}

pub fn video(spec: &VideoSpec) -> Result<VideoSample, SynthError> {
    let VideoSpec { height, width, frames, square, background_amplitude, square_amplitude, seed } = *spec;
    if height == 0 || width == 0 || frames == 0 || square == 0 || square > height || square > width {
        return Err(SynthError::InvalidDims(format!("{height}x{width}x{frames} with square {square}")));
    }
    for a in [background_amplitude, square_amplitude] {
        if !a.is_finite() {
            return Err(SynthError::InvalidAmplitude(a));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p: Vec<f64> = (0..height).map(|_| rng.random_range(0.5..1.0)).collect();
    let q: Vec<f64> = (0..width).map(|_| rng.random_range(0.5..1.0)).collect();
    let (span_r, span_c) = (height - square, width - square);
    let start = (rng.random_range(0..=span_r), rng.random_range(0..=span_c));
    // fast enough that no pixel stays covered for long
    let velocity = (rng.random_range(3..=5), rng.random_range(3..=5));
    let positions: Vec<(usize, usize)> = (0..frames)
        .map(|t| (bounce(start.0, velocity.0, t, span_r), bounce(start.1, velocity.1, t, span_c)))
        .collect();

    let background =
        Tensor3::from_fn(height, width, frames, |i, j, _| background_amplitude * p[i] * q[j]).expect("valid dims");
    let mask = Tensor3::from_fn(height, width, frames, |i, j, k| {
        let (r, c) = positions[k];
        if (r..r + square).contains(&i) && (c..c + square).contains(&j) { 1.0 } else { 0.0 }
    })
    .expect("valid dims");
    let x = background.add(&mask.scale(square_amplitude)).expect("same shape");
    Ok(VideoSample { x, background, mask, positions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tubal_core::{tubal_rank, DEFAULT_RANK_TOL};

    #[test]
    fn lowrank_is_deterministic_and_low_rank() {
        let spec = LowRankSpec { n: 12, n3: 5, rank: 2, rho: 0.05, amplitude: 3.0, seed: 7 };
        let a = lowrank(&spec).unwrap();
        assert_eq!(a, lowrank(&spec).unwrap());
        assert_eq!(tubal_rank(&a.l0, DEFAULT_RANK_TOL).unwrap(), 2);
        assert!(a.s0.as_slice().iter().all(|&v| v == 0.0 || v.abs() == 3.0));
        assert_ne!(a, lowrank(&LowRankSpec { seed: 8, ..spec }).unwrap());
    }

    #[test]
    fn lowrank_validation() {
        let ok = LowRankSpec { n: 4, n3: 2, rank: 1, rho: 0.1, amplitude: 1.0, seed: 0 };
        assert_eq!(lowrank(&LowRankSpec { rho: 1.5, ..ok.clone() }), Err(SynthError::InvalidFraction(1.5)));
        assert!(matches!(lowrank(&LowRankSpec { rank: 5, ..ok.clone() }), Err(SynthError::InvalidDims(_))));
        assert!(matches!(lowrank(&LowRankSpec { n: 0, ..ok }), Err(SynthError::InvalidDims(_))));
    }

    #[test]
    fn mask_marks_exactly_the_square() {
        let spec = VideoSpec::default();
        let v = video(&spec).unwrap();
        assert_eq!(v.x.shape(), (32, 32, 16));
        for k in 0..16 {
            let covered: f64 = v.mask.frontal_slice(k).iter().sum();
            assert_eq!(covered, 36.0);
            let (r, c) = v.positions[k];
            assert_eq!(v.mask.get(r, c, k), 1.0);
            assert_eq!(v.mask.get(r + 5, c + 5, k), 1.0);
            assert!(r + 6 <= 32 && c + 6 <= 32);
        }
        let diff = v.x.sub(&v.background).unwrap();
        assert!(diff.sub(&v.mask).unwrap().norm(tubal_core::Norm::Max) < 1e-15);
        assert_eq!(tubal_rank(&v.background, DEFAULT_RANK_TOL).unwrap(), 1);
    }

    #[test]
    fn bounce_stays_in_range() {
        for t in 0..100 {
            assert!(bounce(3, 4, t, 26) <= 26);
        }
        assert_eq!(bounce(0, 5, 6, 26), 22);
        assert_eq!(bounce(7, 3, 5, 0), 0);
    }
}

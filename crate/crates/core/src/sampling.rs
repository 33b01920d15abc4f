//! Random admissible parameter vectors and scan grids.

use rand::Rng;

use crate::algebra::AlgebraSpec;
use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 42;
const MAX_TRIES: usize = 1_000_000;

fn check_box(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(Error::InvalidBox { lo, hi })
    }
}

fn admissible(alpha: &[f64]) -> bool {
    AlgebraSpec::from_alpha(alpha.len(), alpha).is_ok_and(|s| s.is_bounded_from_below())
}

/// Uniform draw from the slice `{Σα = 0} ∩ [lo, hi]^λ`, restricted to
/// parameters with a bounded-from-below Fock representation.
///
/// The first λ−1 components are drawn uniformly and the last one closes the
/// sum; draws leaving the box are rejected, which keeps the distribution
/// uniform on the slice.
pub fn sample_alpha_slice<R: Rng + ?Sized>(rng: &mut R, lambda: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    check_box(lo, hi)?;
    for _ in 0..MAX_TRIES {
        let mut alpha: Vec<f64> = (0..lambda - 1).map(|_| rng.random_range(lo..=hi)).collect();
        let last = -alpha.iter().sum::<f64>();
        if !(lo..=hi).contains(&last) {
            continue;
        }
        alpha.push(last);
        if admissible(&alpha) {
            return Ok(alpha);
        }
    }
    Err(Error::SamplerExhausted { tries: MAX_TRIES })
}

/// Draws every component uniformly from `[lo, hi]`, subtracts the mean and
/// rejects the result unless it is bounded from below.
pub fn sample_alpha_projected<R: Rng + ?Sized>(rng: &mut R, lambda: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    check_box(lo, hi)?;
    for _ in 0..MAX_TRIES {
        let mut alpha: Vec<f64> = (0..lambda).map(|_| rng.random_range(lo..=hi)).collect();
        let mean = alpha.iter().sum::<f64>() / lambda as f64;
        alpha.iter_mut().for_each(|a| *a -= mean);
        if admissible(&alpha) {
            return Ok(alpha);
        }
    }
    Err(Error::SamplerExhausted { tries: MAX_TRIES })
}

/// `points` evenly spaced values from `from` to `to` inclusive.
pub fn scan_points(from: f64, to: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![from],
        n => (0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect(),
    }
}

//! Discrete Gaussian sampling over the integers.
//!
//! Widths are the "s" parameter of ρ_s(x) = exp(−π x²/s²); the matching
//! continuous standard deviation is s/√(2π).

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal};

use super::int::IntMatrix;
use crate::error::{Error, Result};

/// Tail cut, in multiples of s.
pub const TAIL_CUT: f64 = 12.0;

const MAX_REJECTIONS: usize = 1 << 20;

pub fn std_dev(s: f64) -> f64 {
    s / (2.0 * std::f64::consts::PI).sqrt()
}

/// Rejection sampler for D_{Z,s,center}, proposing uniformly from
/// `[center − 12s, center + 12s]`.
pub fn gauss_sample_int<R: RngCore + ?Sized>(s: f64, center: f64, rng: &mut R) -> Result<i64> {
    if !(s > 0.0) || !center.is_finite() {
        return Err(Error::Parameter(format!("gaussian width {s}, center {center}")));
    }
    let lo = (center - s * TAIL_CUT).ceil() as i64;
    let hi = (center + s * TAIL_CUT).floor() as i64;
    if lo > hi {
        return Err(Error::Parameter(format!("empty support for s={s}")));
    }
    let k = std::f64::consts::PI / (s * s);
    for _ in 0..MAX_REJECTIONS {
        let x = rng.random_range(lo..=hi);
        let d = x as f64 - center;
        if rng.random::<f64>() < (-k * d * d).exp() {
            return Ok(x);
        }
    }
    Err(Error::Internal("gaussian rejection limit reached".into()))
}

/// Inversion sampler for the centered D_{Z,s}, built once per width.
#[derive(Clone, Debug)]
pub struct GaussianTable {
    s: f64,
    bound: i64,
    // cdf[i] = P[X ≤ i − bound] scaled to 2^64, last entry saturated
    cdf: Vec<u64>,
}

impl GaussianTable {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::Parameter(format!("gaussian width {s}")));
        }
        let bound = (s * TAIL_CUT).floor() as i64;
        let k = std::f64::consts::PI / (s * s);
        let weights: Vec<f64> = (-bound..=bound)
            .map(|x| (-k * (x * x) as f64).exp())
            .collect();
        let total: f64 = weights.iter().sum();
        let scale = 2f64.powi(64);
        let mut acc = 0.0;
        let mut cdf: Vec<u64> = weights
            .iter()
            .map(|w| {
                acc += w / total;
                let v = acc * scale;
                if v >= scale {
                    u64::MAX
                } else {
                    v as u64
                }
            })
            .collect();
        if let Some(last) = cdf.last_mut() {
            *last = u64::MAX;
        }
        Ok(Self { s, bound, cdf })
    }

    pub fn width(&self) -> f64 {
        self.s
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> i64 {
        let u = rng.next_u64();
        let idx = self.cdf.partition_point(|&c| c < u);
        idx as i64 - self.bound
    }

    pub fn sample_vec<R: RngCore + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<i64> {
        (0..len).map(|_| self.sample(rng)).collect()
    }
}

/// Largest tail bound served from a table; wider distributions fall back to
/// rejection sampling.
const TABLE_LIMIT: f64 = 65536.0;

/// Centered sampler picking the table method for moderate widths and the
/// rejection method for very wide ones.
#[derive(Clone, Debug)]
pub enum CenteredSampler {
    Table(GaussianTable),
    Rejection(f64),
}

impl CenteredSampler {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::Parameter(format!("gaussian width {s}")));
        }
        if s * TAIL_CUT <= TABLE_LIMIT {
            GaussianTable::new(s).map(Self::Table)
        } else {
            Ok(Self::Rejection(s))
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<i64> {
        match self {
            Self::Table(t) => Ok(t.sample(rng)),
            Self::Rejection(s) => gauss_sample_int(*s, 0.0, rng),
        }
    }

    pub fn sample_vec<R: RngCore + ?Sized>(&self, len: usize, rng: &mut R) -> Result<Vec<i64>> {
        (0..len).map(|_| self.sample(rng)).collect()
    }
}

/// Matrix of i.i.d. centered discrete Gaussians of width `s`.
pub fn gauss_sample_matrix<R: RngCore + ?Sized>(
    rows: usize,
    cols: usize,
    s: f64,
    rng: &mut R,
) -> Result<IntMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension(format!("{rows}x{cols} gaussian matrix")));
    }
    let sampler = CenteredSampler::new(s)?;
    IntMatrix::new(rows, cols, sampler.sample_vec(rows * cols, rng)?)
}

/// Continuous spherical Gaussian with parameter `s` (std s/√(2π)).
pub fn continuous_gaussian<R: RngCore + ?Sized>(s: f64, len: usize, rng: &mut R) -> Vec<f64> {
    let normal = Normal::new(0.0, std_dev(s)).expect("finite positive std");
    (0..len).map(|_| normal.sample(rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn mass_at_zero(s: f64) -> f64 {
        let k = std::f64::consts::PI / (s * s);
        let total: f64 = (-200i64..=200).map(|x| (-k * (x * x) as f64).exp()).sum();
        1.0 / total
    }

    #[test]
    fn rejection_mean_and_support() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let n = 100_000;
        let mut sum = 0i64;
        for _ in 0..n {
            let x = gauss_sample_int(3.0, 0.0, &mut rng).unwrap();
            assert!(x.abs() <= 36);
            sum += x;
        }
        let mean = sum as f64 / n as f64;
        assert!(mean.abs() <= 0.1, "mean {mean}");
    }

    #[test]
    fn unit_width_zero_mass_matches_direct_sum() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let n = 100_000;
        let zeros = (0..n)
            .filter(|_| gauss_sample_int(1.0, 0.0, &mut rng).unwrap() == 0)
            .count();
        let expected = mass_at_zero(1.0);
        let got = zeros as f64 / n as f64;
        assert!((got - expected).abs() <= 0.03, "{got} vs {expected}");
    }

    #[test]
    fn shifted_center() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let n = 50_000;
        let sum: i64 = (0..n)
            .map(|_| gauss_sample_int(4.0, 10.5, &mut rng).unwrap())
            .sum();
        assert!((sum as f64 / n as f64 - 10.5).abs() < 0.1);
    }

    #[test]
    fn table_agrees_with_rejection() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let table = GaussianTable::new(5.0).unwrap();
        let n = 100_000;
        let var = |xs: &[i64]| xs.iter().map(|&x| (x * x) as f64).sum::<f64>() / xs.len() as f64;
        let a = table.sample_vec(n, &mut rng);
        let b: Vec<i64> = (0..n)
            .map(|_| gauss_sample_int(5.0, 0.0, &mut rng).unwrap())
            .collect();
        let (va, vb) = (var(&a), var(&b));
        let expected = std_dev(5.0).powi(2);
        assert!((va / expected - 1.0).abs() < 0.03, "{va} vs {expected}");
        assert!((va / vb - 1.0).abs() < 0.04);
    }

    #[test]
    fn wide_sampler_falls_back_to_rejection() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let s = 1e7;
        let sampler = CenteredSampler::new(s).unwrap();
        assert!(matches!(sampler, CenteredSampler::Rejection(_)));
        let xs = sampler.sample_vec(20_000, &mut rng).unwrap();
        let var = xs.iter().map(|&x| (x as f64).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!((var.sqrt() / std_dev(s) - 1.0).abs() < 0.03);
        assert!(matches!(CenteredSampler::new(3.0).unwrap(), CenteredSampler::Table(_)));
    }

    #[test]
    fn invalid_width() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        assert!(gauss_sample_int(0.0, 0.0, &mut rng).is_err());
        assert!(GaussianTable::new(-1.0).is_err());
        assert!(gauss_sample_matrix(0, 2, 1.0, &mut rng).is_err());
    }
}

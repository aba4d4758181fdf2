//! Small empirical helpers shared by the simulation harness and the test
//! suites: moments, a one-sample Kolmogorov–Smirnov distance against N(0,1),
//! and a Gaussian kernel density estimate with Silverman's bandwidth.

use alloc::vec::Vec;

use crate::math;
use crate::special;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (n − 1 denominator).
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Kolmogorov–Smirnov distance between the sample and the standard normal.
pub fn ks_distance_std_normal(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let cdf = special::std_normal_cdf(*x).expect("finite sample").get();
        let hi = (i + 1) as f64 / n - cdf;
        let lo = cdf - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}

/// Interpolated quantile of sorted data (the common "type 7" rule).
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let m = sorted.len();
    if m == 1 {
        return sorted[0];
    }
    let h = (m - 1) as f64 * p;
    let lo = math::floor(h) as usize;
    let hi = (lo + 1).min(m - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Silverman's rule of thumb: h = 0.9 min(sd, IQR/1.34) m^{-1/5}.
pub fn silverman_bandwidth(xs: &[f64]) -> f64 {
    let sd = math::sqrt(sample_variance(xs));
    let mut sorted = xs.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    0.9 * spread * math::powf(xs.len() as f64, -0.2)
}

/// Gaussian KDE evaluated on `grid_len` equispaced points spanning
/// [min − 3h, max + 3h]. Returns (grid, density).
pub fn gaussian_kde(xs: &[f64], grid_len: usize) -> (Vec<f64>, Vec<f64>) {
    let h = silverman_bandwidth(xs);
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min) - 3.0 * h;
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 3.0 * h;
    let step = (hi - lo) / (grid_len - 1) as f64;
    let mut grid = Vec::with_capacity(grid_len);
    let mut dens = Vec::with_capacity(grid_len);
    let norm = 1.0 / (xs.len() as f64 * h);
    for i in 0..grid_len {
        let x = lo + step * i as f64;
        let mut acc = 0.0;
        for &xi in xs {
            let u = (x - xi) / h;
            acc += math::exp(-0.5 * u * u);
        }
        grid.push(x);
        dens.push(acc * norm / special::SQRT_2PI);
    }
    (grid, dens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;
    use alloc::vec;

    #[test]
    fn moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((sample_variance(&xs) - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ks_of_normal_sample_is_small() {
        let mut rng = SimRng::new(2024, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| rng.next_normal()).collect();
        assert!(ks_distance_std_normal(&xs) < 0.015);
    }

    #[test]
    fn ks_of_shifted_sample_is_large() {
        let mut rng = SimRng::new(2024, 1);
        let xs: Vec<f64> = (0..5_000).map(|_| rng.next_normal() + 1.0).collect();
        assert!(ks_distance_std_normal(&xs) > 0.3);
    }

    #[test]
    fn quantiles_interpolate() {
        let sorted = vec![0.0, 1.0, 2.0, 3.0];
        assert_eq!(quantile_sorted(&sorted, 0.5), 1.5);
        assert_eq!(quantile_sorted(&sorted, 0.0), 0.0);
        assert_eq!(quantile_sorted(&sorted, 1.0), 3.0);
    }

    #[test]
    fn kde_integrates_to_one() {
        let mut rng = SimRng::new(7, 0);
        let xs: Vec<f64> = (0..5_000).map(|_| rng.next_normal()).collect();
        let (grid, dens) = gaussian_kde(&xs, 512);
        let mut integral = 0.0;
        for i in 1..grid.len() {
            integral += 0.5 * (dens[i] + dens[i - 1]) * (grid[i] - grid[i - 1]);
        }
        assert!((integral - 1.0).abs() < 1e-3, "integral {integral}");
    }
}

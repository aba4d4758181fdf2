//! Simulation-based invariants: the analytic calibration constants must
//! match empirical moments of the statistics they standardize, and the
//! standardized null statistics must be close to N(0,1).

use order_thresh_core::calibration::{exp_weights, hard_moments, CalibrationTable};
use order_thresh_core::hanova::GroupedData;
use order_thresh_core::rng::SimRng;
use order_thresh_core::single::top_k_sum_mut;
use order_thresh_core::stats::ks_distance_std_normal;

/// Empirical mean and variance of T_L(k) under the null vs (nμ, nσ²),
/// within 4 Monte Carlo standard errors.
#[test]
fn order_statistic_null_moments_match_calibration() {
    for &(n, k) in &[(200usize, 14usize), (500, 22), (500, 500)] {
        let table = CalibrationTable::new(n, k).unwrap();
        let reps = 30_000usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut y = vec![0.0f64; n];
        for rep in 0..reps {
            let mut rng = SimRng::new(0x0cd5, rep as u64);
            for slot in y.iter_mut() {
                let z = rng.next_normal();
                *slot = z * z;
            }
            let stat = top_k_sum_mut(&mut y, k);
            sum += stat;
            sum_sq += stat * stat;
        }
        let r = reps as f64;
        let mean = sum / r;
        let var = sum_sq / r - mean * mean;
        let n_mu = n as f64 * table.mu();
        let n_sigma2 = n as f64 * table.sigma2();
        let se_mean = (var / r).sqrt();
        // Var(S²) ≈ Var²(κ − (R−3)/(R−1))/R; κ ≤ 3.5 across this grid
        let se_var = var * (2.5f64 / r).sqrt();
        assert!(
            (mean - n_mu).abs() < 4.0 * se_mean,
            "(n={n}, k={k}): mean {mean} vs {n_mu} (se {se_mean})"
        );
        assert!(
            (var - n_sigma2).abs() < 4.0 * se_var,
            "(n={n}, k={k}): var {var} vs {n_sigma2} (se {se_var})"
        );
    }
}

/// Empirical mean of the top-k exponential order-statistic sum vs Σα_E.
#[test]
fn exp_case_mean_matches_weight_sum() {
    let (n, k) = (200usize, 30usize);
    let weights = exp_weights(n, k).unwrap();
    let center: f64 = weights.iter().sum();
    let scale2: f64 = weights.iter().map(|w| w * w).sum();
    let reps = 100_000usize;
    let mut sum = 0.0;
    let mut v = vec![0.0f64; n];
    for rep in 0..reps {
        let mut rng = SimRng::new(0xe4b, rep as u64);
        for slot in v.iter_mut() {
            *slot = rng.next_exp();
        }
        sum += top_k_sum_mut(&mut v, k);
    }
    let mean = sum / reps as f64;
    // the statistic's variance is Σα² by the independent-representation
    let se = (scale2 / reps as f64).sqrt();
    assert!(
        (mean - center).abs() < 4.0 * se,
        "mean {mean} vs {center} (se {se})"
    );
}

/// Empirical mean/variance of T_H(δ) vs the exact truncated moments.
#[test]
fn hard_statistic_moments_match_exact() {
    let (n, delta) = (500usize, 5.1216f64);
    let hm = hard_moments(n, delta).unwrap();
    let reps = 100_000usize;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for rep in 0..reps {
        let mut rng = SimRng::new(0x4a7d, rep as u64);
        let mut stat = 0.0;
        for _ in 0..n {
            let z = rng.next_normal();
            let y = z * z;
            if y > delta {
                stat += y;
            }
        }
        sum += stat;
        sum_sq += stat * stat;
    }
    let r = reps as f64;
    let mean = sum / r;
    let var = sum_sq / r - mean * mean;
    let se_mean = (var / r).sqrt();
    // T_H is a sum of few heavy terms; allow kurtosis ~12 in the var SE
    let se_var = var * (12.0f64 / r).sqrt();
    assert!(
        (mean - hm.mean_total).abs() < 4.0 * se_mean,
        "mean {mean} vs {} (se {se_mean})",
        hm.mean_total
    );
    assert!(
        (var - hm.var_total).abs() < 4.0 * se_var,
        "var {var} vs {} (se {se_var})",
        hm.var_total
    );
}

/// Standardized null T*_L(k) for n = 2000, k = 500 is close to N(0,1).
#[test]
fn order_standardized_null_ks() {
    let (n, k) = (2000usize, 500usize);
    let table = CalibrationTable::new(n, k).unwrap();
    let reps = 5000usize;
    let mut samples = Vec::with_capacity(reps);
    let mut y = vec![0.0f64; n];
    for rep in 0..reps {
        let mut rng = SimRng::new(0x2715, rep as u64);
        for slot in y.iter_mut() {
            let z = rng.next_normal();
            *slot = z * z;
        }
        samples.push(table.standardize(top_k_sum_mut(&mut y, k)));
    }
    let d = ks_distance_std_normal(&samples);
    assert!(d < 0.02, "KS distance {d}");
}

/// Standardized exponential-case statistic is close to N(0,1).
#[test]
fn exp_standardized_null_ks() {
    let (n, k) = (2000usize, 500usize);
    let weights = exp_weights(n, k).unwrap();
    let center: f64 = weights.iter().sum();
    let scale: f64 = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    let reps = 5000usize;
    let mut samples = Vec::with_capacity(reps);
    let mut v = vec![0.0f64; n];
    for rep in 0..reps {
        let mut rng = SimRng::new(0x3216, rep as u64);
        for slot in v.iter_mut() {
            *slot = rng.next_exp();
        }
        samples.push((top_k_sum_mut(&mut v, k) - center) / scale);
    }
    let d = ks_distance_std_normal(&samples);
    assert!(d < 0.03, "KS distance {d}");
}

/// Fixed small noncentrality: shifting every coordinate by t/√a and
/// standardizing with the central (t = 0) constants still gives an
/// approximately standard normal statistic, which is what lets the
/// random-grand-mean shift be absorbed in the HANOVA theory.
#[test]
fn noncentral_shift_uniformity() {
    let (a, k, t) = (2000usize, 500usize, 2.0f64);
    let table = CalibrationTable::new(a, k).unwrap();
    let shift = t / (a as f64).sqrt();
    let reps = 4000usize;
    let mut samples = Vec::with_capacity(reps);
    let mut y = vec![0.0f64; a];
    for rep in 0..reps {
        let mut rng = SimRng::new(0x4217, rep as u64);
        for slot in y.iter_mut() {
            let z = rng.next_normal() + shift;
            *slot = z * z;
        }
        samples.push(table.standardize(top_k_sum_mut(&mut y, k)));
    }
    let d = ks_distance_std_normal(&samples);
    assert!(d < 0.03, "KS distance {d}");
}

/// The studentized HANOVA statistic at k = a, standardized with the
/// variance correction, stays within its nominal level band.
#[test]
fn hanova_full_k_level_band() {
    let (a, n, k) = (200usize, 3usize, 200usize);
    let table = CalibrationTable::new(a, k).unwrap();
    let reps = 20_000usize;
    let mut rejects = 0u64;
    let z95 = order_thresh_core::special::std_normal_quantile(0.95).unwrap();
    let nv = order_thresh_core::hanova::hanova_null_variance(n);
    let mut flat = vec![0.0f64; a * n];
    for rep in 0..reps {
        let mut rng = SimRng::new(0x5218, rep as u64);
        for slot in flat.iter_mut() {
            *slot = rng.next_normal();
        }
        let g = GroupedData::from_flat(a, n, flat.clone()).unwrap();
        let effects = g.studentized_effects();
        let mut sq: Vec<f64> = effects.iter().map(|z| z * z).collect();
        let stat = top_k_sum_mut(&mut sq, k);
        if table.standardize(stat) > z95 * nv.sqrt() {
            rejects += 1;
        }
    }
    let rate = rejects as f64 / reps as f64;
    assert!(rate > 0.03 && rate < 0.08, "rate {rate}");
}

//! One-way HANOVA: thresholded alternatives to the F test when the number
//! of groups is large.
//!
//! The order-threshold statistic sums the k largest squared studentized
//! group effects Z̃_i = √n(X̄_i − X̄)/√MSE. It is centered and scaled with
//! the same (μ, σ²) constants as the single-sequence case (computed at a in
//! place of n), and its null reference is a normal whose variance carries
//! the 1 + 2μ²/(σ²(n−1)) correction for the estimated error variance.

use alloc::vec::Vec;

use crate::calibration::{self, CalibrationTable};
use crate::math;
use crate::single::{self, Reference, TestOutcome};
use crate::special;
use crate::{Error, Probability, Result};

/// A balanced a×n one-way layout with its summary statistics.
#[derive(Debug, Clone)]
pub struct GroupedData {
    a: usize,
    n: usize,
    values: Vec<f64>, // row-major, a rows of n
    group_means: Vec<f64>,
    grand_mean: f64,
    mse: f64,
    f_stat: f64,
}

/// Summarizes one row per group. All rows must have the same length.
pub fn summarize(rows: &[Vec<f64>]) -> Result<GroupedData> {
    let a = rows.len();
    if a < 2 {
        return Err(Error::Domain("at least two groups are required"));
    }
    let n = rows[0].len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Unsupported("unbalanced designs are not supported"));
    }
    let mut flat = Vec::with_capacity(a * n);
    for row in rows {
        flat.extend_from_slice(row);
    }
    GroupedData::from_flat(a, n, flat)
}

impl GroupedData {
    /// Builds the summary from a row-major a×n buffer.
    pub fn from_flat(a: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        if a < 2 || n < 2 {
            return Err(Error::Domain(
                "HANOVA requires a >= 2 groups of n >= 2 observations",
            ));
        }
        if values.len() != a * n {
            return Err(Error::Domain("value buffer does not match the a*n layout"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("observations must be finite"));
        }
        let nf = n as f64;
        let mut group_means = Vec::with_capacity(a);
        for i in 0..a {
            let row = &values[i * n..(i + 1) * n];
            group_means.push(row.iter().sum::<f64>() / nf);
        }
        let grand_mean = group_means.iter().sum::<f64>() / a as f64;
        let mut sse = 0.0;
        for i in 0..a {
            let m = group_means[i];
            for v in &values[i * n..(i + 1) * n] {
                let d = v - m;
                sse += d * d;
            }
        }
        let big_n = (a * n) as f64;
        let mse = sse / (big_n - a as f64);
        if mse == 0.0 {
            return Err(Error::DegenerateData(
                "all within-group values are identical; MSE is zero",
            ));
        }
        let mst = group_means
            .iter()
            .map(|m| {
                let d = m - grand_mean;
                nf * d * d
            })
            .sum::<f64>()
            / (a as f64 - 1.0);
        let f_stat = mst / mse;
        Ok(GroupedData {
            a,
            n,
            values,
            group_means,
            grand_mean,
            mse,
            f_stat,
        })
    }

    pub fn groups(&self) -> usize {
        self.a
    }

    pub fn per_group(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn group_means(&self) -> &[f64] {
        &self.group_means
    }

    pub fn grand_mean(&self) -> f64 {
        self.grand_mean
    }

    pub fn mse(&self) -> f64 {
        self.mse
    }

    pub fn f_stat(&self) -> f64 {
        self.f_stat
    }

    /// Z̃_i = √n (X̄_i − X̄) / √MSE. Satisfies Σ Z̃_i² = (a−1)F exactly.
    pub fn studentized_effects(&self) -> Vec<f64> {
        let scale = math::sqrt(self.n as f64 / self.mse);
        self.group_means
            .iter()
            .map(|m| (m - self.grand_mean) * scale)
            .collect()
    }
}

/// Outcome of the HANOVA order-threshold test.
///
/// `standardized` is (T − aμ)/(√a σ); the decision divides it by
/// √null_variance before the upper-tail normal comparison, so
/// `p_value = 1 − Φ(standardized/√null_variance)`.
#[derive(Debug, Clone)]
pub struct HanovaOutcome {
    pub statistic: f64,
    pub standardized: f64,
    pub null_variance: f64,
    pub p_value: Probability,
    pub reject: bool,
    pub k_used: usize,
}

/// Order-threshold test on the k largest squared studentized effects.
pub fn hanova_order_test(g: &GroupedData, k: usize, alpha: f64) -> Result<HanovaOutcome> {
    let table = calibration::table_handle(g.a, k)?;
    hanova_order_test_with(g, &table, alpha)
}

/// Same as [`hanova_order_test`] with a caller-provided table (keyed by the
/// group count a).
pub fn hanova_order_test_with(
    g: &GroupedData,
    table: &CalibrationTable,
    alpha: f64,
) -> Result<HanovaOutcome> {
    let alpha = single::validate_level(alpha)?;
    if table.n() != g.a {
        return Err(Error::Domain(
            "calibration table does not match the group count",
        ));
    }
    let effects = g.studentized_effects();
    let squared: Vec<f64> = effects.iter().map(|z| z * z).collect();
    let statistic = single::top_k_sum(&squared, table.k())?;
    hanova_test_from_statistic(statistic, table, g.n, alpha.get())
}

/// Decision for an already computed top-k sum of squared studentized
/// effects.
pub fn hanova_test_from_statistic(
    statistic: f64,
    table: &CalibrationTable,
    per_group: usize,
    alpha: f64,
) -> Result<HanovaOutcome> {
    let alpha = single::validate_level(alpha)?;
    let standardized = table.standardize(statistic);
    let null_variance = hanova_null_variance(per_group);
    let p_value = special::std_normal_sf(standardized / math::sqrt(null_variance))
        .expect("finite standardized statistic");
    Ok(HanovaOutcome {
        statistic,
        standardized,
        null_variance,
        p_value,
        reject: p_value < alpha,
        k_used: table.k(),
    })
}

/// The variance of the null reference, 1 + 2μ²/(σ²(n−1)) evaluated at the
/// limiting ratio μ²/σ² = 1/2, i.e. n/(n−1).
///
/// The k-dependent finite-a ratio μ_a²(k)/σ_a²(k) converges to the same
/// limit as k/a → 1 but reproduces the reference tables poorly at small k;
/// the constant-ratio form tracks them across the whole grid.
pub fn hanova_null_variance(per_group: usize) -> f64 {
    1.0 + 1.0 / (per_group as f64 - 1.0)
}

/// Two-sided p-values of the group effects, P_i = 2(1 − Φ(|Z̃_i|)).
pub fn hanova_pvalues(g: &GroupedData) -> Vec<f64> {
    g.studentized_effects()
        .iter()
        .map(|z| {
            2.0 * special::std_normal_sf(math::abs(*z))
                .expect("finite effect")
                .get()
        })
        .collect()
}

/// Storey estimate of the number of groups with nonzero effects.
pub fn hanova_storey_k(g: &GroupedData) -> Result<usize> {
    single::storey_k_hat(&hanova_pvalues(g))
}

/// The classical F test, rejecting on the exact F(a−1, N−a) upper tail.
pub fn f_test(g: &GroupedData, alpha: f64) -> Result<TestOutcome> {
    f_test_from_statistic(g.f_stat, g.a, g.n, alpha)
}

/// Decision for an already computed F statistic of a balanced a×n layout.
pub fn f_test_from_statistic(f_stat: f64, a: usize, n: usize, alpha: f64) -> Result<TestOutcome> {
    let alpha = single::validate_level(alpha)?;
    let df1 = (a - 1) as f64;
    let df2 = (a * n - a) as f64;
    let p_value = special::fisher_f_sf(f_stat, df1, df2)?;
    Ok(TestOutcome {
        statistic: f_stat,
        standardized: f_stat,
        reference: Reference::FisherF { df1, df2 },
        p_value,
        reject: p_value < alpha,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;
    use alloc::vec;

    fn random_groups(a: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = SimRng::new(seed, 0);
        (0..a)
            .map(|_| (0..n).map(|_| rng.next_normal()).collect())
            .collect()
    }

    #[test]
    fn degenerate_and_shape_errors() {
        assert!(matches!(
            summarize(&[vec![0.0, 0.0], vec![0.0, 0.0]]),
            Err(Error::DegenerateData(_))
        ));
        assert!(matches!(
            summarize(&[vec![1.0, 2.0], vec![1.0]]),
            Err(Error::Unsupported(_))
        ));
        assert!(summarize(&[vec![1.0, 2.0]]).is_err());
        assert!(GroupedData::from_flat(2, 1, vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn f_statistic_hand_computation() {
        let rows = vec![vec![1.0, 1.0002], vec![3.0, 2.9998]];
        let g = summarize(&rows).unwrap();
        // direct-formula oracle
        let m1 = (1.0 + 1.0002) / 2.0;
        let m2 = (3.0 + 2.9998) / 2.0;
        let grand = (m1 + m2) / 2.0;
        let mst = 2.0 * ((m1 - grand) * (m1 - grand) + (m2 - grand) * (m2 - grand)) / 1.0;
        let sse = (1.0f64 - m1).powi(2)
            + (1.0002f64 - m1).powi(2)
            + (3.0f64 - m2).powi(2)
            + (2.9998f64 - m2).powi(2);
        let mse = sse / 2.0;
        assert!(((g.f_stat() - mst / mse) / (mst / mse)).abs() < 1e-10);
    }

    #[test]
    fn location_and_scale_invariance() {
        let rows = random_groups(20, 4, 77);
        let g = summarize(&rows).unwrap();
        let shifted: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|v| v + 13.25).collect())
            .collect();
        let scaled: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|v| v * -2.5 + 1.0).collect())
            .collect();
        let gs = summarize(&shifted).unwrap();
        let gc = summarize(&scaled).unwrap();
        assert!(((g.f_stat() - gs.f_stat()) / g.f_stat()).abs() < 1e-10);
        assert!(((g.f_stat() - gc.f_stat()) / g.f_stat()).abs() < 1e-10);
        for ((z, zs), zc) in g
            .studentized_effects()
            .iter()
            .zip(gs.studentized_effects())
            .zip(gc.studentized_effects())
        {
            assert!((z - zs).abs() < 1e-10 * (1.0 + z.abs()));
            // scaling by a negative flips signs; |Z| is what the tests use
            assert!((z.abs() - zc.abs()) < 1e-10 * (1.0 + z.abs()));
        }
        // thresholded statistic and the estimated k are invariant too
        let out = hanova_order_test(&g, 5, 0.05).unwrap();
        let outs = hanova_order_test(&gs, 5, 0.05).unwrap();
        let outc = hanova_order_test(&gc, 5, 0.05).unwrap();
        assert!((out.statistic - outs.statistic).abs() < 1e-10 * (1.0 + out.statistic.abs()));
        assert!((out.statistic - outc.statistic).abs() < 1e-10 * (1.0 + out.statistic.abs()));
        assert_eq!(hanova_storey_k(&g).unwrap(), hanova_storey_k(&gs).unwrap());
        assert_eq!(hanova_storey_k(&g).unwrap(), hanova_storey_k(&gc).unwrap());
    }

    #[test]
    fn effects_identity_with_f() {
        let rows = random_groups(50, 5, 12);
        let g = summarize(&rows).unwrap();
        let sum_sq: f64 = g.studentized_effects().iter().map(|z| z * z).sum();
        let want = (g.groups() as f64 - 1.0) * g.f_stat();
        assert!(((sum_sq - want) / want).abs() < 1e-10);
        // balanced design: the raw effects sum to zero
        let raw_sum: f64 = g.group_means().iter().map(|m| m - g.grand_mean()).sum();
        assert!(raw_sum.abs() < 1e-12);
    }

    #[test]
    fn equal_group_means_give_zero_effects() {
        let rows = vec![
            vec![1.0, 2.0, 3.0],
            vec![3.0, 2.0, 1.0],
            vec![2.0, 1.0, 3.0],
        ];
        let g = summarize(&rows).unwrap();
        for z in g.studentized_effects() {
            assert!(z.abs() < 1e-12);
        }
        for p in hanova_pvalues(&g) {
            assert!((p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn order_test_full_k_matches_f() {
        let rows = random_groups(40, 3, 5);
        let g = summarize(&rows).unwrap();
        let out = hanova_order_test(&g, 40, 0.05).unwrap();
        let want = (g.groups() as f64 - 1.0) * g.f_stat();
        assert!(((out.statistic - want) / want).abs() < 1e-10);
        assert!(out.null_variance >= 1.0);
        assert!(hanova_order_test(&g, 0, 0.05).is_err());
        assert!(hanova_order_test(&g, 41, 0.05).is_err());
    }

    #[test]
    fn order_statistic_monotone_in_k() {
        let rows = random_groups(30, 4, 9);
        let g = summarize(&rows).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 1..=30 {
            let s = hanova_order_test(&g, k, 0.05).unwrap().statistic;
            assert!(s >= prev);
            prev = s;
        }
    }

    #[test]
    fn null_variance_formula() {
        // the ratio entering the correction is the r = 1 limit μ²/σ² = 1/2,
        // so at n = 101 the variance is 1 + 2(1/2)/100 = 1.01 exactly
        assert!((hanova_null_variance(101) - 1.01).abs() < 1e-12);
        // consistency with the quadrature limits
        let lim = calibration::limit_ratio(1.0).unwrap();
        let ratio = lim.mu_r * lim.mu_r / lim.sigma_r2;
        assert!((1.0 + 2.0 * ratio / 100.0 - hanova_null_variance(101)).abs() < 1e-4);
        // and with the finite-a calibration ratio at k = a
        let table = CalibrationTable::new(4000, 4000).unwrap();
        assert!(
            (1.0 + 2.0 * table.mu_sigma_ratio_sq() / 100.0 - hanova_null_variance(101)).abs()
                < 1e-3
        );
        // vanishes as n grows
        assert!((hanova_null_variance(1_000_000) - 1.0).abs() < 1e-5);
        let rows = random_groups(20, 4, 31);
        let g = summarize(&rows).unwrap();
        let out = hanova_order_test(&g, 20, 0.05).unwrap();
        assert!((out.null_variance - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn pvalue_reference_point() {
        // construct data whose first effect is exactly z, check the p-value map
        let rows = random_groups(100, 5, 91);
        let g = summarize(&rows).unwrap();
        let p = hanova_pvalues(&g);
        let z = g.studentized_effects();
        for (pi, zi) in p.iter().zip(&z) {
            let want = 2.0 * special::std_normal_sf(zi.abs()).unwrap().get();
            assert!((pi - want).abs() < 1e-15);
        }
    }

    #[test]
    fn storey_arithmetic_example() {
        // 520 of 1000 p-values at or below the median 0.5:
        // (520 - 500 - 1)/0.5 = 38
        let mut p = Vec::new();
        p.extend(core::iter::repeat(0.2).take(480));
        p.extend(core::iter::repeat(0.5).take(40));
        p.extend(core::iter::repeat(0.9).take(480));
        assert_eq!(single::storey_k_hat(&p).unwrap(), 38);
    }

    #[test]
    fn f_test_decision() {
        let rows = random_groups(25, 4, 1);
        let g = summarize(&rows).unwrap();
        let out = f_test(&g, 0.05).unwrap();
        match out.reference {
            Reference::FisherF { df1, df2 } => {
                assert_eq!(df1, 24.0);
                assert_eq!(df2, 75.0);
            }
            _ => panic!("expected an F reference"),
        }
        // a strong shift in one group must reject
        let mut strong = rows.clone();
        for v in &mut strong[0] {
            *v += 50.0;
        }
        let g = summarize(&strong).unwrap();
        assert!(f_test(&g, 0.05).unwrap().reject);
    }
}

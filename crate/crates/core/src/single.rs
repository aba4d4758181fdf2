//! Test statistics for one sequence of observations: order thresholding
//! (normal and scaled-chi-square references), hard thresholding, the
//! chi-square omnibus statistic, the Simes global test with its power
//! enhancement, and the Storey estimate of the number of false nulls that
//! drives the data-driven threshold choice.

use alloc::vec::Vec;

use crate::calibration::{self, CalibrationTable, HardMoments};
use crate::math;
use crate::special;
use crate::{Error, Probability, Result};

/// A sequence of observations together with its squares.
#[derive(Debug, Clone)]
pub struct ObservationVector {
    values: Vec<f64>,
    squared: Vec<f64>,
}

impl ObservationVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("observation vector must be non-empty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("observations must be finite"));
        }
        let squared = values.iter().map(|v| v * v).collect();
        Ok(ObservationVector { values, squared })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The Y_i = X_i² entering every thresholding statistic.
    pub fn squared(&self) -> &[f64] {
        &self.squared
    }
}

/// Reference distribution a statistic was compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    StdNormal,
    ScaledChiSq { b: f64, nu: f64 },
    SimesMin,
    FisherF { df1: f64, df2: f64 },
}

/// Outcome of one test: the raw statistic, its standardized value, the
/// reference used, the p-value, and the decision at level `alpha`.
///
/// For `StdNormal` references, `p_value` is the upper tail of
/// `standardized`. The Simes statistic is compared to its adjusted level
/// directly; `p_value` then stores the statistic itself and `standardized`
/// mirrors it. Exact references (`ScaledChiSq`, `FisherF`) also report
/// their normal-scale standardization when one exists.
#[derive(Debug, Clone)]
pub struct TestOutcome {
    pub statistic: f64,
    pub standardized: f64,
    pub reference: Reference,
    pub p_value: Probability,
    pub reject: bool,
    pub alpha: Probability,
}

/// Validates a significance level, which must lie strictly inside (0, 1).
pub fn validate_level(alpha: f64) -> Result<Probability> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::Domain("significance level must lie in (0, 1)"));
    }
    Ok(Probability::clamped(alpha))
}

// --------------------------------------------------------------------------
// Top-k selection
// --------------------------------------------------------------------------

/// Sum of the `k` largest entries by partial selection (no full sort).
///
/// The selected block is summed in ascending order, so the result is
/// bit-identical to sorting the whole slice and summing its top `k`.
pub fn top_k_sum(values: &[f64], k: usize) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Domain("top-k sum of an empty slice"));
    }
    if k == 0 || k > values.len() {
        return Err(Error::Domain("order threshold k must satisfy 1 <= k <= n"));
    }
    let mut buf = values.to_vec();
    Ok(top_k_sum_mut(&mut buf, k))
}

/// In-place variant of [`top_k_sum`] for callers that reuse buffers; the
/// slice is reordered. `k` must satisfy 1 <= k <= len.
pub fn top_k_sum_mut(buf: &mut [f64], k: usize) -> f64 {
    let n = buf.len();
    if k < n {
        buf.select_nth_unstable_by(n - k - 1, f64::total_cmp);
    }
    let top = &mut buf[n - k..];
    top.sort_unstable_by(f64::total_cmp);
    top.iter().sum()
}

/// Top-k sum of an already ascending-sorted slice; same summation order as
/// [`top_k_sum`].
pub fn top_k_sum_sorted(sorted_ascending: &[f64], k: usize) -> f64 {
    sorted_ascending[sorted_ascending.len() - k..].iter().sum()
}

// --------------------------------------------------------------------------
// Order thresholding
// --------------------------------------------------------------------------

/// Order-threshold test: sum of the k largest squared observations against
/// its standardized normal reference (upper tail).
pub fn order_threshold_test(x: &ObservationVector, k: usize, alpha: f64) -> Result<TestOutcome> {
    let table = calibration::table_handle(x.len(), k)?;
    order_threshold_test_with(x, &table, alpha)
}

/// Same as [`order_threshold_test`] with a caller-provided table.
pub fn order_threshold_test_with(
    x: &ObservationVector,
    table: &CalibrationTable,
    alpha: f64,
) -> Result<TestOutcome> {
    let alpha = validate_level(alpha)?;
    if table.n() != x.len() {
        return Err(Error::Domain(
            "calibration table does not match the sample size",
        ));
    }
    let statistic = top_k_sum(x.squared(), table.k())?;
    Ok(order_test_from_statistic(statistic, table, alpha.get())?)
}

/// Decision for an already computed order-threshold statistic (normal
/// reference). Lets precomputed-sum callers share the exact test logic.
pub fn order_test_from_statistic(
    statistic: f64,
    table: &CalibrationTable,
    alpha: f64,
) -> Result<TestOutcome> {
    let alpha = validate_level(alpha)?;
    let standardized = table.standardize(statistic);
    let p_value = special::std_normal_sf(standardized).expect("finite standardized statistic");
    Ok(TestOutcome {
        statistic,
        standardized,
        reference: Reference::StdNormal,
        p_value,
        reject: p_value < alpha,
        alpha,
    })
}

/// Order-threshold test against the moment-matched bχ²_ν reference, which
/// corrects the mild liberality of the normal approximation.
pub fn order_threshold_test_chisq(
    x: &ObservationVector,
    k: usize,
    alpha: f64,
) -> Result<TestOutcome> {
    let table = calibration::table_handle(x.len(), k)?;
    order_threshold_test_chisq_with(x, &table, alpha)
}

/// Same as [`order_threshold_test_chisq`] with a caller-provided table.
pub fn order_threshold_test_chisq_with(
    x: &ObservationVector,
    table: &CalibrationTable,
    alpha: f64,
) -> Result<TestOutcome> {
    let alpha = validate_level(alpha)?;
    if table.n() != x.len() {
        return Err(Error::Domain(
            "calibration table does not match the sample size",
        ));
    }
    let statistic = top_k_sum(x.squared(), table.k())?;
    Ok(order_test_chisq_from_statistic(
        statistic,
        table,
        alpha.get(),
    )?)
}

/// Decision for an already computed order-threshold statistic against the
/// moment-matched scaled chi-square reference.
pub fn order_test_chisq_from_statistic(
    statistic: f64,
    table: &CalibrationTable,
    alpha: f64,
) -> Result<TestOutcome> {
    let alpha = validate_level(alpha)?;
    let (b, nu) = table.chisq_match();
    let p_value = special::chisq_sf(statistic / b, nu).expect("moment match is positive");
    Ok(TestOutcome {
        statistic,
        standardized: table.standardize(statistic),
        reference: Reference::ScaledChiSq { b, nu },
        p_value,
        reject: p_value < alpha,
        alpha,
    })
}

// --------------------------------------------------------------------------
// Hard thresholding and the chi-square omnibus
// --------------------------------------------------------------------------

/// Hard-threshold test: sum of squared observations exceeding `delta`,
/// standardized by the exact truncated-χ²₁ moments.
pub fn hard_threshold_test(x: &ObservationVector, delta: f64, alpha: f64) -> Result<TestOutcome> {
    let moments = calibration::hard_moments(x.len(), delta)?;
    hard_threshold_test_with(x, &moments, alpha)
}

/// Same as [`hard_threshold_test`] with precomputed moments.
pub fn hard_threshold_test_with(
    x: &ObservationVector,
    moments: &HardMoments,
    alpha: f64,
) -> Result<TestOutcome> {
    let alpha = validate_level(alpha)?;
    // retained values are summed in sorted order so the statistic is
    // exactly permutation invariant
    let mut retained: Vec<f64> = x
        .squared()
        .iter()
        .copied()
        .filter(|y| *y > moments.delta)
        .collect();
    retained.sort_unstable_by(f64::total_cmp);
    let statistic: f64 = retained.iter().sum();
    Ok(hard_test_from_statistic(statistic, moments, alpha.get())?)
}

/// Decision for an already computed hard-threshold statistic.
pub fn hard_test_from_statistic(
    statistic: f64,
    moments: &HardMoments,
    alpha: f64,
) -> Result<TestOutcome> {
    let alpha = validate_level(alpha)?;
    let standardized = moments.standardize(statistic);
    let p_value = special::std_normal_sf(standardized).expect("finite standardized statistic");
    Ok(TestOutcome {
        statistic,
        standardized,
        reference: Reference::StdNormal,
        p_value,
        reject: p_value < alpha,
        alpha,
    })
}

/// The omnibus chi-square test: T = Σ Y_i against its exact χ²_n reference.
pub fn chisq_omnibus_test(x: &ObservationVector, alpha: f64) -> Result<TestOutcome> {
    let statistic = top_k_sum(x.squared(), x.len())?;
    chisq_omnibus_from_statistic(statistic, x.len(), alpha)
}

/// Decision for an already computed chi-square omnibus statistic.
pub fn chisq_omnibus_from_statistic(statistic: f64, n: usize, alpha: f64) -> Result<TestOutcome> {
    let alpha = validate_level(alpha)?;
    let n = n as f64;
    let p_value = special::chisq_sf(statistic, n).expect("statistic is nonnegative");
    Ok(TestOutcome {
        statistic,
        standardized: (statistic - n) / math::sqrt(2.0 * n),
        reference: Reference::ScaledChiSq { b: 1.0, nu: n },
        p_value,
        reject: p_value < alpha,
        alpha,
    })
}

// --------------------------------------------------------------------------
// Simes and the Storey estimate
// --------------------------------------------------------------------------

/// Simes global test: T_S = min_i n P_(i) / i, rejecting when the statistic
/// falls below the (possibly power-enhanced) level α / (1 − k_opt/n).
pub fn simes_test(pvalues: &[f64], alpha: f64, k_opt: Option<usize>) -> Result<TestOutcome> {
    let alpha = validate_level(alpha)?;
    let n = pvalues.len();
    if n == 0 {
        return Err(Error::Domain("Simes test requires at least one p-value"));
    }
    if pvalues
        .iter()
        .any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0)
    {
        return Err(Error::Domain("p-values must lie in [0, 1]"));
    }
    let k_opt = k_opt.unwrap_or(0);
    if k_opt >= n {
        return Err(Error::Domain(
            "k_opt must be smaller than the number of p-values",
        ));
    }
    let mut sorted = pvalues.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let nf = n as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, p)| nf * p / (i + 1) as f64)
        .fold(f64::INFINITY, f64::min);
    let adjusted_level = alpha.get() / (1.0 - k_opt as f64 / nf);
    Ok(TestOutcome {
        statistic,
        standardized: statistic,
        reference: Reference::SimesMin,
        p_value: Probability::clamped(statistic),
        reject: statistic < adjusted_level,
        alpha,
    })
}

/// Two-sided normal p-values P_i = 2(1 − Φ(|x_i|)).
pub fn pvalues_from_normals(x: &ObservationVector) -> Vec<f64> {
    x.values()
        .iter()
        .map(|v| {
            2.0 * special::std_normal_sf(math::abs(*v))
                .expect("finite observation")
                .get()
        })
        .collect()
}

/// Storey estimate of the number of false null hypotheses:
/// k̂ = max{(n·G_n(λ) − nλ − 1)/(1 − λ), log^{3/2} n} with λ the median
/// p-value (middle-pair average for even n), rounded to the nearest integer
/// and clamped to [1, n].
pub fn storey_k_hat(pvalues: &[f64]) -> Result<usize> {
    let n = pvalues.len();
    if n < 2 {
        return Err(Error::Domain(
            "the Storey estimate requires at least two p-values",
        ));
    }
    if pvalues
        .iter()
        .any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0)
    {
        return Err(Error::Domain("p-values must lie in [0, 1]"));
    }
    let mut sorted = pvalues.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let lambda = if n % 2 == 0 {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    } else {
        sorted[n / 2]
    };
    let count = sorted.partition_point(|p| *p <= lambda) as f64;
    let nf = n as f64;
    let storey = if 1.0 - lambda > 0.0 {
        (count - nf * lambda - 1.0) / (1.0 - lambda)
    } else {
        f64::NEG_INFINITY
    };
    let bound = math::powf(math::ln(nf), 1.5);
    let k = math::round(storey.max(bound));
    Ok((k.max(1.0) as usize).min(n))
}

/// The data-driven order threshold: the Storey estimate applied to the
/// two-sided normal p-values of the same observations.
pub fn data_driven_k(x: &ObservationVector) -> Result<usize> {
    storey_k_hat(&pvalues_from_normals(x))
}

// --------------------------------------------------------------------------
// Exponential-scale order thresholding
// --------------------------------------------------------------------------

/// Order-threshold test for standard-exponential-scale data: the top-k sum
/// centered at Σα_E and scaled by √(Σα_E²).
pub fn exp_order_threshold_test(values: &[f64], k: usize, alpha: f64) -> Result<TestOutcome> {
    let alpha = validate_level(alpha)?;
    if values.is_empty() {
        return Err(Error::Domain("observation vector must be non-empty"));
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Domain("exponential-scale data must be nonnegative"));
    }
    let weights = calibration::exp_weights(values.len(), k)?;
    let statistic = top_k_sum(values, k)?;
    let center: f64 = weights.iter().sum();
    let scale = math::sqrt(weights.iter().map(|w| w * w).sum::<f64>());
    let standardized = (statistic - center) / scale;
    let p_value = special::std_normal_sf(standardized).expect("finite standardized statistic");
    Ok(TestOutcome {
        statistic,
        standardized,
        reference: Reference::StdNormal,
        p_value,
        reject: p_value < alpha,
        alpha,
    })
}

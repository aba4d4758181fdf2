//! Deterministic standardization constants for the order-threshold
//! statistics.
//!
//! Everything here is driven by the exponential-order-statistic means
//! ν̃_in = Σ_{j<=i} 1/(n−j+1) and the transform H̃ = F⁻¹∘G carrying standard
//! exponential quantiles to χ²₁ quantiles. A [`CalibrationTable`] bundles,
//! for one (n, k): the ν̃ vector, the weight vector α_in(k), and the moment
//! pair (μ_n(k), σ_n²(k)) that centers and scales the statistic.
//!
//! Quantiles are always evaluated from the survival side (ln q = −ν̃), since
//! ν̃_nn ≈ log n puts 1 − e^{−ν̃} within 1/n of 1.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::special;
use crate::{Error, Result};

/// ν̃_in = Σ_{j=1..i} 1/(n−j+1) for i = 1..n, by forward accumulation.
///
/// The last entry is the harmonic number H_n.
pub fn nu_tilde(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Domain("sequence length must be positive"));
    }
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    for j in 1..=n {
        acc += 1.0 / (n - j + 1) as f64;
        out.push(acc);
    }
    Ok(out)
}

/// H̃(v): the χ²₁ quantile at survival probability e^{−v}.
pub fn h_tilde(v: f64) -> Result<f64> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::Domain("H~ requires v > 0"));
    }
    special::chisq1_quantile_from_ln_survival(-v)
}

/// H̃′(v) = e^{−v} / f(H̃(v)), the derivative of H̃.
///
/// Increases to 2 as v grows.
pub fn h_tilde_prime(v: f64) -> Result<f64> {
    Ok(h_pair(v)?.1)
}

/// (H̃(v), H̃′(v)) sharing one quantile solve.
fn h_pair(v: f64) -> Result<(f64, f64)> {
    let h = h_tilde(v)?;
    // H̃(v) > 0 for v > 0, so the density is finite and positive.
    let prime = math::exp(-v) / special::chisq1_pdf(h)?;
    Ok((h, prime))
}

fn validate_n_k(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("sequence length must be positive"));
    }
    if k == 0 || k > n {
        return Err(Error::Domain("order threshold k must satisfy 1 <= k <= n"));
    }
    Ok(())
}

/// Calibration constants for the order-threshold statistic at one (n, k).
#[derive(Debug, Clone)]
pub struct CalibrationTable {
    n: usize,
    k: usize,
    nu_tilde: Vec<f64>,
    alpha: Vec<f64>,
    mu: f64,
    sigma2: f64,
}

impl CalibrationTable {
    /// Computes the table. Costs O(k) quantile solves and O(n) arithmetic;
    /// the weights use suffix sums, never the O(n²) double loop.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        validate_n_k(n, k)?;
        let nu = nu_tilde(n)?;
        // H̃ and H̃′ are only needed where the indicator weight is 1,
        // i.e. at the top k positions.
        let mut h_top = Vec::with_capacity(k);
        let mut hp_top = Vec::with_capacity(k);
        for &v in &nu[n - k..] {
            let (h, hp) = h_pair(v)?;
            h_top.push(h);
            hp_top.push(hp);
        }
        // suffix sums of H̃′ over the top block
        let mut suffix = vec![0.0; k + 1];
        for j in (0..k).rev() {
            suffix[j] = hp_top[j] + suffix[j + 1];
        }
        let mut alpha = Vec::with_capacity(n);
        for i in 1..=n {
            let s = if i <= n - k {
                suffix[0]
            } else {
                suffix[i - (n - k) - 1]
            };
            alpha.push(s / (n - i + 1) as f64);
        }
        let mu = h_top.iter().sum::<f64>() / n as f64;
        let sigma2 = alpha.iter().map(|a| a * a).sum::<f64>() / n as f64;
        Ok(CalibrationTable {
            n,
            k,
            nu_tilde: nu,
            alpha,
            mu,
            sigma2,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nu_tilde(&self) -> &[f64] {
        &self.nu_tilde
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// μ_n(k): the statistic's asymptotic mean is n·μ.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// σ_n²(k): the statistic's asymptotic variance is n·σ².
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// (T − nμ) / (√n σ).
    pub fn standardize(&self, statistic: f64) -> f64 {
        (statistic - self.n as f64 * self.mu) / math::sqrt(self.n as f64 * self.sigma2)
    }

    /// The (b, ν) of the moment-matched scaled chi-square reference:
    /// bν = nμ and 2b²ν = nσ².
    pub fn chisq_match(&self) -> (f64, f64) {
        let b = self.sigma2 / (2.0 * self.mu);
        let nu = 2.0 * self.n as f64 * self.mu * self.mu / self.sigma2;
        (b, nu)
    }

    /// μ²/σ², the ratio entering the HANOVA variance correction.
    pub fn mu_sigma_ratio_sq(&self) -> f64 {
        self.mu * self.mu / self.sigma2
    }
}

/// The weight vector α_in(k) alone.
pub fn order_weights(n: usize, k: usize) -> Result<Vec<f64>> {
    Ok(CalibrationTable::new(n, k)?.alpha)
}

/// The moment pair (μ_n(k), σ_n²(k)) alone.
pub fn order_moments(n: usize, k: usize) -> Result<(f64, f64)> {
    let t = CalibrationTable::new(n, k)?;
    Ok((t.mu, t.sigma2))
}

/// Weights of the exponential-case statistic: k/(n−j+1) below the top block,
/// 1 inside it. Centering is Σα and scaling √(Σα²).
pub fn exp_weights(n: usize, k: usize) -> Result<Vec<f64>> {
    validate_n_k(n, k)?;
    let mut out = Vec::with_capacity(n);
    for j in 1..=n {
        if j <= n - k {
            out.push(k as f64 / (n - j + 1) as f64);
        } else {
            out.push(1.0);
        }
    }
    Ok(out)
}

/// The recommended hard threshold δ_n = 2 log(n·c·(log n)^{−d}).
pub fn recommended_delta(n: usize, c: f64, d: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain("recommended delta requires n >= 3"));
    }
    if !c.is_finite() || c <= 0.0 || !d.is_finite() {
        return Err(Error::Domain(
            "recommended delta requires c > 0 and finite d",
        ));
    }
    let ln_n = math::ln(n as f64);
    Ok(2.0 * (ln_n + math::ln(c) - d * math::ln(ln_n)))
}

/// Null moments of the hard-threshold statistic.
///
/// The exact truncated-χ²₁ moments are, with c = √δ,
/// m₁ = 2(cφ(c) + 1 − Φ(c)) and m₂ = 2((c³ + 3c)φ(c) + 3(1 − Φ(c))).
/// The test itself standardizes with the asymptotic (Mills-truncated)
/// forms 2φ(c)(c + 1/c) and 2φ(c)(c³ + 3c): that slow-converging
/// normalization is the convention behind the reference type-I-error
/// tables, whose levels deteriorate as δ shrinks. The exact moments
/// describe the statistic's true mean and variance and are kept for
/// consistency checks.
#[derive(Debug, Clone, Copy)]
pub struct HardMoments {
    pub delta: f64,
    /// n · E[Y 1{Y > δ}], exact
    pub mean_total: f64,
    /// n · Var(Y 1{Y > δ}), exact
    pub var_total: f64,
    /// n · P(Y > δ), the expected number of retained observations
    pub expected_count: f64,
    /// asymptotic centering n · 2φ(c)(c + 1/c)
    pub asym_mean_total: f64,
    /// asymptotic scaling n · 2φ(c)(c³ + 3c)
    pub asym_var_total: f64,
}

impl HardMoments {
    /// Standardization used by the hard-threshold test.
    pub fn standardize(&self, statistic: f64) -> f64 {
        (statistic - self.asym_mean_total) / math::sqrt(self.asym_var_total)
    }

    /// Standardization by the exact truncated moments.
    pub fn standardize_exact(&self, statistic: f64) -> f64 {
        (statistic - self.mean_total) / math::sqrt(self.var_total)
    }
}

pub fn hard_moments(n: usize, delta: f64) -> Result<HardMoments> {
    if n == 0 {
        return Err(Error::Domain("sequence length must be positive"));
    }
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::Domain("hard threshold must be positive"));
    }
    let c = math::sqrt(delta);
    let pdf = special::std_normal_pdf(c);
    let tail = special::std_normal_sf(c)?.get();
    let m1 = 2.0 * (c * pdf + tail);
    let m2 = 2.0 * ((c * c * c + 3.0 * c) * pdf + 3.0 * tail);
    let nf = n as f64;
    Ok(HardMoments {
        delta,
        mean_total: nf * m1,
        var_total: nf * (m2 - m1 * m1),
        expected_count: 2.0 * nf * tail,
        asym_mean_total: nf * 2.0 * pdf * (c + 1.0 / c),
        asym_var_total: nf * 2.0 * pdf * (c * c * c + 3.0 * c),
    })
}

/// Limits of the calibration moments when k/a → r: μ_r is the mean of the
/// upper-r-tail of χ²₁ and σ_r² the corresponding L-statistic variance.
#[derive(Debug, Clone, Copy)]
pub struct LimitRatio {
    pub r: f64,
    pub mu_r: f64,
    pub sigma_r2: f64,
}

/// Evaluates μ_r = ∫ I(t > 1−r) G⁻¹(t) dt and
/// σ_r² = ∫∫ I(t,s > 1−r)(min(t,s) − ts) dG⁻¹(t) dG⁻¹(s)
/// by quadrature after substituting y = w² (G the χ²₁ cdf).
///
/// The double integral collapses to a single pass over a cumulative
/// trapezoid: σ² = 2 ∫ (1 − G(z)) [∫_{q}^{z} G] dz on a 2000-interval grid.
pub fn limit_ratio(r: f64) -> Result<LimitRatio> {
    if !r.is_finite() || r <= 0.0 || r > 1.0 {
        return Err(Error::Domain("limit ratio requires 0 < r <= 1"));
    }
    let q = special::chisq1_quantile_from_survival(r)?;
    let c = math::sqrt(q);
    let w_max = if c + 8.0 > 10.0 { c + 8.0 } else { 10.0 };
    const INTERVALS: usize = 2000;
    let step = (w_max - c) / INTERVALS as f64;

    // G(w²) = 1 − 2·sf(w) has complement 2·sf(w) available without
    // cancellation; both enter the integrands below.
    let mut mu = 0.0;
    let mut sigma2 = 0.0;
    let mut cum_g = 0.0; // ∫_q^{w²} G(y) dy, built up as we sweep w
    let mut prev_mu_f = 0.0;
    let mut prev_g_f = 0.0;
    let mut prev_outer = 0.0;
    for i in 0..=INTERVALS {
        let w = c + step * i as f64;
        let sf2 = 2.0 * special::std_normal_sf(w)?.get();
        let g = 1.0 - sf2;
        let mu_f = 2.0 * w * w * special::std_normal_pdf(w);
        let g_f = 2.0 * w * g;
        if i > 0 {
            mu += 0.5 * (prev_mu_f + mu_f) * step;
            cum_g += 0.5 * (prev_g_f + g_f) * step;
        }
        let outer = 4.0 * w * sf2 * cum_g;
        if i > 0 {
            sigma2 += 0.5 * (prev_outer + outer) * step;
        }
        prev_mu_f = mu_f;
        prev_g_f = g_f;
        prev_outer = outer;
    }
    Ok(LimitRatio {
        r,
        mu_r: mu,
        sigma_r2: sigma2,
    })
}

/// Thread-safe memoization of calibration tables, keyed by (n, k).
/// Population is idempotent: concurrent misses build identical tables and
/// the first insert wins.
#[cfg(feature = "std")]
mod table_cache {
    use super::CalibrationTable;
    use crate::Result;
    use std::collections::HashMap;
    use std::sync::{Arc, OnceLock, RwLock};

    type Cache = RwLock<HashMap<(usize, usize), Arc<CalibrationTable>>>;

    pub fn cached_table(n: usize, k: usize) -> Result<Arc<CalibrationTable>> {
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(hit) = cache.read().expect("cache lock").get(&(n, k)) {
            return Ok(hit.clone());
        }
        let built = Arc::new(CalibrationTable::new(n, k)?);
        let mut map = cache.write().expect("cache lock");
        Ok(map.entry((n, k)).or_insert(built).clone())
    }
}

#[cfg(feature = "std")]
pub use table_cache::cached_table;

/// A calibration table, shared from the cache when `std` is available and
/// owned otherwise.
pub(crate) enum TableHandle {
    #[cfg(feature = "std")]
    Shared(std::sync::Arc<CalibrationTable>),
    #[cfg(not(feature = "std"))]
    Owned(CalibrationTable),
}

impl core::ops::Deref for TableHandle {
    type Target = CalibrationTable;
    fn deref(&self) -> &CalibrationTable {
        match self {
            #[cfg(feature = "std")]
            TableHandle::Shared(t) => t,
            #[cfg(not(feature = "std"))]
            TableHandle::Owned(t) => t,
        }
    }
}

pub(crate) fn table_handle(n: usize, k: usize) -> Result<TableHandle> {
    #[cfg(feature = "std")]
    {
        Ok(TableHandle::Shared(cached_table(n, k)?))
    }
    #[cfg(not(feature = "std"))]
    {
        Ok(TableHandle::Owned(CalibrationTable::new(n, k)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_tilde_small_and_harmonic() {
        let v = nu_tilde(3).unwrap();
        assert!((v[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((v[1] - (1.0 / 3.0 + 0.5)).abs() < 1e-15);
        assert!((v[2] - (1.0 / 3.0 + 0.5 + 1.0)).abs() < 1e-15);
        assert!(nu_tilde(0).is_err());

        let v = nu_tilde(500).unwrap();
        assert!((v[0] - 1.0 / 500.0).abs() < 1e-18);
        // independent summation oracle for H_500
        let harmonic: f64 = (1..=500).map(|j| 1.0 / j as f64).sum();
        assert!((v[499] - harmonic).abs() < 1e-12);
        assert!((harmonic - 6.79282).abs() < 1e-5);
        for w in v.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn h_tilde_values() {
        // H̃(ln 2) is the χ²₁ median
        let med = h_tilde(core::f64::consts::LN_2).unwrap();
        assert!((med - 0.454936).abs() < 1e-5);
        // v → 0⁺ collapses to 0
        assert!(h_tilde(1e-8).unwrap() < 1e-12);
        assert!(h_tilde(0.0).is_err());
        assert!(h_tilde(-1.0).is_err());
        // strictly increasing
        let mut prev = 0.0;
        for i in 1..100 {
            let v = 0.1 * i as f64;
            let h = h_tilde(v).unwrap();
            assert!(h > prev);
            prev = h;
        }
    }

    #[test]
    fn h_tilde_prime_limit() {
        let hp30 = h_tilde_prime(30.0).unwrap();
        assert!(hp30 > 1.9 && hp30 < 2.0, "H~'(30) = {hp30}");
        // increasing in v
        let mut prev = 0.0;
        for i in 1..80 {
            let v = 0.25 * i as f64;
            let hp = h_tilde_prime(v).unwrap();
            assert!(hp > prev, "v = {v}");
            prev = hp;
        }
    }

    #[test]
    fn order_weights_tiny_case() {
        // n = 2, k = 2: α_1 = (H̃′(ν̃_1) + H̃′(ν̃_2))/2, α_2 = H̃′(ν̃_2)
        let nu = nu_tilde(2).unwrap();
        let hp1 = h_tilde_prime(nu[0]).unwrap();
        let hp2 = h_tilde_prime(nu[1]).unwrap();
        let alpha = order_weights(2, 2).unwrap();
        assert!((alpha[0] - 0.5 * (hp1 + hp2)).abs() < 1e-15);
        assert!((alpha[1] - hp2).abs() < 1e-15);
        assert!(order_weights(2, 0).is_err());
        assert!(order_weights(2, 3).is_err());
    }

    #[test]
    fn order_weights_match_double_loop_oracle() {
        let (n, k) = (500usize, 22usize);
        let nu = nu_tilde(n).unwrap();
        let hp: Vec<f64> = nu[n - k..]
            .iter()
            .map(|&v| h_tilde_prime(v).unwrap())
            .collect();
        let fast = order_weights(n, k).unwrap();
        for i in 1..=n {
            // direct definition: (1/(n−i+1)) Σ_{j=i}^n c_jn H̃′(ν̃_jn)
            let mut s = 0.0;
            for j in i.max(n - k + 1)..=n {
                s += hp[j - (n - k) - 1];
            }
            let direct = s / (n - i + 1) as f64;
            assert!(
                (fast[i - 1] - direct).abs() < 1e-12,
                "i = {i}: {} vs {direct}",
                fast[i - 1]
            );
        }
    }

    #[test]
    fn alpha_nondecreasing_and_moments_positive() {
        for &(n, k) in &[(50usize, 7usize), (200, 14), (500, 22), (500, 500)] {
            let t = CalibrationTable::new(n, k).unwrap();
            for w in t.alpha().windows(2) {
                assert!(w[1] >= w[0] - 1e-15);
            }
            assert!(t.mu() > 0.0);
            assert!(t.sigma2() > 0.0);
        }
    }

    #[test]
    fn order_moments_chi_square_mean_limit() {
        // with k = n the statistic is the full chi-square sum, mean n
        let (mu, _) = order_moments(2000, 2000).unwrap();
        assert!((mu - 1.0).abs() < 0.01, "mu = {mu}");
        // k = 1 is accepted
        order_moments(50, 1).unwrap();
    }

    #[test]
    fn order_moments_monotone_in_k() {
        let n = 120;
        let mut prev = (0.0, 0.0);
        for k in 1..=n {
            let (mu, s2) = order_moments(n, k).unwrap();
            assert!(mu > prev.0, "k = {k}");
            assert!(s2 > prev.1, "k = {k}");
            prev = (mu, s2);
        }
    }

    #[test]
    fn chisq_match_identities() {
        let t = CalibrationTable::new(500, 22).unwrap();
        let (b, nu) = t.chisq_match();
        let n = 500.0;
        assert!((b * nu - n * t.mu()).abs() < 1e-10 * n * t.mu());
        assert!((2.0 * b * b * nu - n * t.sigma2()).abs() < 1e-10 * n * t.sigma2());
    }

    #[test]
    fn exp_weights_cases() {
        let w = exp_weights(5, 2).unwrap();
        assert_eq!(w.len(), 5);
        assert!((w[0] - 0.4).abs() < 1e-15);
        assert!((w[1] - 0.5).abs() < 1e-15);
        assert!((w[2] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(w[3], 1.0);
        assert_eq!(w[4], 1.0);
        let total: f64 = w.iter().sum();
        assert!((total - (0.4 + 0.5 + 2.0 / 3.0 + 2.0)).abs() < 1e-14);
        assert!((total - 3.5667).abs() < 1e-4);

        let w = exp_weights(7, 7).unwrap();
        assert!(w.iter().all(|x| *x == 1.0));
        assert!(exp_weights(5, 6).is_err());
    }

    #[test]
    fn recommended_delta_reference_points() {
        assert!((recommended_delta(500, 1.0, 2.0).unwrap() - 5.1216).abs() < 5e-5);
        assert!((recommended_delta(200, 1.0, 2.0).unwrap() - 3.9271).abs() < 5e-5);
        let d0 = recommended_delta(100, 1.0, 0.0).unwrap();
        assert!((d0 - 2.0 * 100.0f64.ln()).abs() < 1e-12);
        assert!(recommended_delta(2, 1.0, 2.0).is_err());
        assert!(recommended_delta(500, 0.0, 2.0).is_err());
    }

    #[test]
    fn hard_moments_expected_counts() {
        let hm = hard_moments(500, 5.1216).unwrap();
        assert!(
            (hm.expected_count - 11.81).abs() < 0.05,
            "{}",
            hm.expected_count
        );
        let hm = hard_moments(500, 5.1216 - 2.0).unwrap();
        assert!(
            (hm.expected_count - 38.63).abs() < 0.05,
            "{}",
            hm.expected_count
        );
        assert!(hard_moments(500, 0.0).is_err());
        assert!(hard_moments(500, -1.0).is_err());
    }

    #[test]
    fn hard_moments_match_quadrature_oracle() {
        let delta = 5.1216f64;
        let c = delta.sqrt();
        // Simpson quadrature of 2 ∫_c^∞ w^{2j} φ(w) dw
        let moment = |j: u32| -> f64 {
            let m = 40_000;
            let hi = c + 30.0;
            let h = (hi - c) / m as f64;
            let f = |w: f64| {
                2.0 * w.powi(2 * j as i32) * (-0.5 * w * w).exp() / crate::special::SQRT_2PI
            };
            let mut acc = 0.0;
            for i in 0..m {
                let a = c + i as f64 * h;
                acc += h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
            }
            acc
        };
        let hm = hard_moments(1, delta).unwrap();
        let m1 = moment(1);
        let m2 = moment(2);
        assert!((hm.mean_total - m1).abs() < 1e-9);
        assert!((hm.var_total - (m2 - m1 * m1)).abs() < 1e-9);
        assert!((hm.expected_count - moment(0)).abs() < 1e-9);
    }

    #[test]
    fn hard_asymptotic_moments_match_exact_at_large_delta() {
        // the Mills truncation agrees with the exact moments to O(c^{-4})
        let hm = hard_moments(1, 30.0).unwrap();
        assert!(((hm.asym_mean_total - hm.mean_total) / hm.mean_total).abs() < 2e-3);
        assert!(((hm.asym_var_total - hm.var_total) / hm.var_total).abs() < 2e-2);
        // asymptotic centering sits above the exact mean (truncation after
        // the 1/c term drops a negative correction)
        assert!(hm.asym_mean_total > hm.mean_total);
    }

    #[test]
    fn limit_ratio_chi_square_case() {
        let lim = limit_ratio(1.0).unwrap();
        assert!((lim.mu_r - 1.0).abs() < 1e-3, "mu_1 = {}", lim.mu_r);
        assert!(
            (lim.sigma_r2 - 2.0).abs() < 1e-3,
            "sigma_1^2 = {}",
            lim.sigma_r2
        );
        let ratio = lim.mu_r / lim.sigma_r2.sqrt();
        assert!((ratio - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3);
        assert!(limit_ratio(0.0).is_err());
        assert!(limit_ratio(1.1).is_err());
    }

    #[test]
    fn limit_ratio_mu_matches_closed_form() {
        // μ_r = 2(cφ(c) + sf(c)) with c the √ of the upper-r χ²₁ quantile
        for &r in &[0.1, 0.3, 0.5, 0.8, 1.0] {
            let lim = limit_ratio(r).unwrap();
            let q = special::chisq1_quantile_from_survival(r).unwrap();
            let c = q.sqrt();
            let closed =
                2.0 * (c * special::std_normal_pdf(c) + special::std_normal_sf(c).unwrap().get());
            assert!(
                (lim.mu_r - closed).abs() < 1e-4,
                "r = {r}: {} vs {closed}",
                lim.mu_r
            );
        }
    }

    #[test]
    fn limit_ratio_vanishes_with_r() {
        let lim = limit_ratio(1e-6).unwrap();
        assert!(lim.mu_r < 1e-4);
        assert!(lim.sigma_r2 < 1e-3);
    }

    #[test]
    fn limit_ratio_matches_finite_calibration() {
        // finite-a calibration converges to the limit quantities at r = 1/2
        let lim = limit_ratio(0.5).unwrap();
        let (mu, s2) = order_moments(4000, 2000).unwrap();
        assert!((lim.mu_r - mu).abs() < 1e-2, "{} vs {mu}", lim.mu_r);
        assert!(
            (lim.sigma_r2 - s2).abs() < 1e-2 * lim.sigma_r2.max(1.0),
            "{} vs {s2}",
            lim.sigma_r2
        );
    }

    #[cfg(feature = "std")]
    #[test]
    fn cached_tables_are_shared_and_race_free() {
        let a = cached_table(500, 22).unwrap();
        let b = cached_table(500, 22).unwrap();
        assert!(std::sync::Arc::ptr_eq(&a, &b));
        let handles: Vec<_> = (0..4)
            .map(|_| std::thread::spawn(|| cached_table(300, 17).unwrap().mu()))
            .collect();
        let mus: Vec<f64> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert!(mus.windows(2).all(|w| w[0] == w[1]));
    }
}

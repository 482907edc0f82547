//! Output analysis helpers: batch means, standard errors, KS distance.

/// Number of batches used for confidence intervals.
pub const BATCHES: usize = 100;

/// Student-t 0.975 quantile with `BATCHES - 1 = 99` degrees of freedom.
const T_975_DF99: f64 = 1.984_216_951_508_682_7;

/// 95% half-width for a ratio estimator from per-batch `(numerator,
/// denominator)` sums. Exactly [`BATCHES`] batches are expected.
pub fn batch_ratio_ci<I>(batches: I) -> f64
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let ratios: Vec<f64> = batches.into_iter().map(|(n, d)| n / d).collect();
    let (_, se) = mean_and_se(&ratios);
    T_975_DF99 * se
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0) / n).sqrt())
}

/// Kolmogorov-Smirnov distance `sup |F_n(x) - F(x)|` between the empirical
/// CDF of `samples` and `cdf`.
pub fn ks_distance<F>(samples: &[f64], cdf: F) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

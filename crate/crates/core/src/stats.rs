//! Small estimators shared by the Monte-Carlo drivers.

/// Sample mean and standard error of the mean (n - 1 normalisation).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Mean and batch-means error for an autocorrelated chain.
pub fn batch_mean_stderr(xs: &[f64], n_batches: usize) -> (f64, f64) {
    let n_batches = n_batches.clamp(2, xs.len().max(2));
    let size = xs.len() / n_batches;
    if size == 0 {
        return mean_stderr(xs);
    }
    let means: Vec<f64> = xs
        .chunks_exact(size)
        .take(n_batches)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let (_, err) = mean_stderr(&means);
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    (mean, err)
}

/// Wilson score interval for `k` successes out of `n` trials at `z` sigma.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let phat = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}


/// Wilson-Hilferty approximation to the chi-square quantile with `k`
/// degrees of freedom at standard-normal deviate `z` (e.g. `z = 3.09` for
/// the 0.999 quantile).
pub fn chi2_quantile(k: usize, z: f64) -> f64 {
    let k = k as f64;
    let h = 2.0 / (9.0 * k);
    k * (1.0 - h + z * h.sqrt()).powi(3)
}

#[cfg(test)]
mod chi2_tests {
    #[test]
    fn wilson_hilferty_close_to_tables() {
        // 0.999 quantiles: 330.52 (k = 255), 149.45 (k = 100)
        assert!((super::chi2_quantile(255, 3.0902) - 330.52).abs() < 1.0);
        assert!((super::chi2_quantile(100, 3.0902) - 149.45).abs() < 1.0);
    }
}

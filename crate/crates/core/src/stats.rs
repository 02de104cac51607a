//! Small statistics helpers: batch-means standard errors and the one-sample
//! Kolmogorov-Smirnov test.

/// Standard error of the grand mean from per-batch means,
/// `sd(batch means) / sqrt(B)`. `None` with fewer than two batches.
pub fn batch_means_stderr(values: &[f64]) -> Option<f64> {
    let b = values.len();
    if b < 2 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / b as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1) as f64;
    Some((var / b as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    /// Sup distance between the empirical and reference CDFs.
    pub statistic: f64,
    /// Asymptotic p-value of `statistic` for this sample size.
    pub p_value: f64,
    pub sample_size: usize,
}

impl KsOutcome {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value > significance
    }
}

/// One-sample KS test of `samples` against the continuous CDF `cdf`.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> KsOutcome {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let nf = n as f64;
    let statistic = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / nf).max((i + 1) as f64 / nf - f)
        })
        .fold(0.0, f64::max);
    KsOutcome { statistic, p_value: kolmogorov_p_value(statistic, n), sample_size: n }
}

/// `P(D_n > d)` via the Kolmogorov limit law with the Stephens small-sample
/// correction `(sqrt(n) + 0.12 + 0.11/sqrt(n)) d`.
pub fn kolmogorov_p_value(d: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let sn = (n as f64).sqrt();
    let z = (sn + 0.12 + 0.11 / sn) * d;
    if z < 0.27 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * z * z).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

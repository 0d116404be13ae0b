//! Sample statistics for ensembles of derivative estimates.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased (n − 1) sample standard deviation.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

/// Two-sided confidence interval for the standard deviation of a normal
/// population, from the chi-squared distribution of `(n−1)s²/σ²`.
pub fn std_confidence_interval(std: f64, n: usize, level: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "a confidence interval needs at least two samples".into(),
        ));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    let dof = (n - 1) as f64;
    let chi2 = ChiSquared::new(dof).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let alpha = 1.0 - level;
    let upper_q = chi2.inverse_cdf(1.0 - alpha / 2.0);
    let lower_q = chi2.inverse_cdf(alpha / 2.0);
    let var = std * std * dof;
    Ok(((var / upper_q).sqrt(), (var / lower_q).sqrt()))
}

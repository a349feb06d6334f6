use crate::error::{Error, Result};

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if let Some(bad) = samples.iter().find(|v| v.is_nan()) {
        return Err(Error::Domain(format!("sample {bad} cannot be ordered")));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `p`-th percentile (`0 <= p <= 100`) by linear interpolation between
/// order statistics at rank `(n - 1) p / 100`.
pub fn percentile(samples: &[f64], p: f64) -> Result<f64> {
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::Domain(format!("percentile {p} outside [0, 100]")));
    }
    let v = sorted(samples)?;
    let rank = (v.len() - 1) as f64 * p / 100.0;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    Ok(v[lo] + (v[hi] - v[lo]) * frac)
}

/// Ascending `(value, i / n)` pairs, `i = 1..=n`.
pub fn empirical_cdf(samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    let v = sorted(samples)?;
    let n = v.len() as f64;
    Ok(v.into_iter().enumerate().map(|(i, x)| (x, (i + 1) as f64 / n)).collect())
}

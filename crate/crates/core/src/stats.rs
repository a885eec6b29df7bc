//! Scalar statistics shared by the metrics and the harness.

use crate::error::{Error, Result};

/// Pearson correlation coefficient. Inputs must have equal length >= 3 and
/// nonzero variance; degenerate inputs are an error, never NaN.
pub fn pearson_correlation(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::ShapeMismatch(format!(
            "pearson inputs of length {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::invalid("pearson needs at least 3 points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::degenerate("zero variance in pearson input"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Cosine distance `1 - x.y / (|x||y|)`. Zero-norm vectors are degenerate.
pub fn cosine_distance(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::ShapeMismatch(format!(
            "cosine inputs of length {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let mut dot = 0.0;
    let mut nx = 0.0;
    let mut ny = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        dot += x * y;
        nx += x * x;
        ny += y * y;
    }
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::degenerate("zero-norm vector in cosine distance"));
    }
    // exactly colinear inputs (identical or positively scaled) are distance 0;
    // the sqrt route below would leave ulp-level residue
    if dot > 0.0 && dot * dot == nx * ny {
        return Ok(0.0);
    }
    Ok(1.0 - dot / (nx.sqrt() * ny.sqrt()))
}

/// Mean of a slice (0 for empty input).
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Population variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    mean(&xs.iter().map(|x| (x - m) * (x - m)).collect::<Vec<_>>())
}

/// First four marginal moments: mean, population variance, skewness, and raw
/// kurtosis (3 for a Gaussian). Zero-variance input gives skew 0, kurtosis 0.
pub fn marginal_moments(xs: &[f64]) -> (f64, f64, f64, f64) {
    let m = mean(xs);
    let n = xs.len() as f64;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for x in xs {
        let d = x - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 <= 0.0 {
        return (m, 0.0, 0.0, 0.0);
    }
    (m, m2, m3 / m2.powf(1.5), m4 / (m2 * m2))
}

//! Limit extraction from finite sequences.

/// Growth rate `c` of a sequence modeled as `a_m ≈ c·m + α·log m + C`,
/// using the terms at `M/4`, `M/2` and `M` (`values[m] = a_m`).
///
/// The logarithmic term cancels between the two half-range increments,
/// which is what makes parabolic orbits (`a_m ≈ 2 log m`) read as zero.
pub fn log_corrected_rate(values: &[f64]) -> Option<f64> {
    let m = values.len().checked_sub(1)?;
    let (i0, i1, i2) = (m / 4, m / 2, m);
    if i0 == 0 || i1 == i0 {
        return None;
    }
    Some(three_point_rate(
        [i0 as f64, i1 as f64, i2 as f64],
        [values[i0], values[i1], values[i2]],
    ))
}

/// `c` in `a(t) = c·t + α·log t + C` through three samples `0 < t0 < t1 < t2`.
pub fn three_point_rate(t: [f64; 3], a: [f64; 3]) -> f64 {
    let d_early = a[1] - a[0];
    let d_late = a[2] - a[1];
    let span_early = t[1] - t[0];
    let span_late = t[2] - t[1];
    let log_early = (t[1] / t[0]).ln();
    let log_late = (t[2] / t[1]).ln();
    // Solve d = c·span + α·log_ratio for (c, α).
    let det = span_late * log_early - span_early * log_late;
    if det.abs() < 1e-300 {
        return d_late / span_late;
    }
    (d_late * log_early - d_early * log_late) / det
}

/// Limit of a sequence converging like `L + β/n`, via Richardson
/// extrapolation on the last term and the term at half its index.
pub fn richardson_limit(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 4 {
        return values.last().copied();
    }
    let late = values[n - 1];
    let early = values[(n - 1) / 2];
    let n_late = n as f64;
    let n_early = ((n - 1) / 2 + 1) as f64;
    Some((n_late * late - n_early * early) / (n_late - n_early))
}

/// `max − min` over the last `window` terms.
pub fn tail_variation(values: &[f64], window: usize) -> f64 {
    let start = values.len().saturating_sub(window.max(1));
    let tail = &values[start..];
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_sequence_rate_is_exact() {
        let v: Vec<f64> = (0..=400).map(|m| 0.7 * m as f64 + 3.0).collect();
        assert!((log_corrected_rate(&v).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn logarithmic_growth_has_zero_rate() {
        let v: Vec<f64> = (0..=10_000).map(|m| 2.0 * (m as f64).max(1.0).ln()).collect();
        assert!(log_corrected_rate(&v).unwrap().abs() < 1e-12);
        // log(m + 1) leaves an O(1/M²) residual.
        let v: Vec<f64> = (0..=10_000).map(|m| 2.0 * ((m as f64) + 1.0).ln()).collect();
        assert!(log_corrected_rate(&v).unwrap().abs() < 1e-6);
    }

    #[test]
    fn mixed_growth() {
        let v: Vec<f64> =
            (0..=1000).map(|m| 0.25 * m as f64 + 1.5 * (m as f64).max(1.0).ln() - 2.0).collect();
        assert!((log_corrected_rate(&v).unwrap() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn richardson_removes_first_order_term() {
        let v: Vec<f64> = (0..1000).map(|n| 0.3 + 1.0 / (n as f64 + 1.0)).collect();
        assert!((richardson_limit(&v).unwrap() - 0.3).abs() < 1e-12);
    }
}

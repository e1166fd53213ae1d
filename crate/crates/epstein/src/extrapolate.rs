//! Sequence extrapolation for limits of the form `x_k = L + C q^k (1 + o(1))`.
//!
//! Two flavours are used: Richardson steps with a known decay ratio (the conformal
//! distortion schedule `r_k = 1 - 2^{-k}` has first-order error, ratio 1/2), and
//! Aitken extrapolation when the geometric ratio must be estimated from the data
//! (the isoperimetric excess sequence in `t`).

/// Result of an extrapolation together with a crude error estimate taken from the
/// difference of the last two extrapolation levels.
#[derive(Debug, Clone, Copy)]
pub struct ExtrapolatedLimit {
    pub value: f64,
    pub error_estimate: f64,
    /// Empirically estimated decay ratio of the raw sequence.
    pub ratio: f64,
}

/// Iterated Richardson extrapolation with a known error ratio `q` per step
/// (`x_k = L + C q^k + o(q^k)`).
///
/// The table is capped at three levels: each level multiplies round-off noise by
/// a small constant, and three levels already push the systematic error below the
/// noise floor for the schedules used here.
pub fn richardson(xs: &[f64], q: f64) -> crate::Result<ExtrapolatedLimit> {
    if xs.len() < 2 {
        return Err(crate::Error::ConvergenceFailure(
            "need at least two terms to extrapolate".into(),
        ));
    }
    const MAX_LEVELS: usize = 3;
    let mut table: Vec<f64> = xs.to_vec();
    let mut last_top = *table.last().unwrap();
    let mut prev_top = table[table.len() - 2];
    let mut qq = q;
    for _level in 0..MAX_LEVELS.min(table.len() - 1) {
        for i in 0..table.len() - 1 {
            table[i] = (table[i + 1] - qq * table[i]) / (1.0 - qq);
        }
        table.pop();
        prev_top = last_top;
        last_top = *table.last().unwrap();
        qq *= q;
    }
    Ok(ExtrapolatedLimit {
        value: last_top,
        error_estimate: (last_top - prev_top).abs(),
        ratio: estimated_ratio(xs).unwrap_or(q),
    })
}

/// Aitken delta-squared extrapolation; appropriate when the decay is geometric with
/// an unknown ratio. Applies one pass and re-extrapolates the final triple.
pub fn aitken(xs: &[f64]) -> crate::Result<ExtrapolatedLimit> {
    if xs.len() < 3 {
        return Err(crate::Error::ConvergenceFailure(
            "need at least three terms for Aitken extrapolation".into(),
        ));
    }
    let mut seq = xs.to_vec();
    let mut prev = *seq.last().unwrap();
    while seq.len() >= 3 {
        let mut next = Vec::with_capacity(seq.len() - 2);
        for w in seq.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            let denom = c - 2.0 * b + a;
            if denom.abs() < 1e-300 {
                next.push(c);
            } else {
                next.push(c - (c - b) * (c - b) / denom);
            }
        }
        prev = *seq.last().unwrap();
        seq = next;
    }
    let value = *seq.last().unwrap();
    Ok(ExtrapolatedLimit {
        value,
        error_estimate: (value - prev).abs(),
        ratio: estimated_ratio(xs).unwrap_or(f64::NAN),
    })
}

/// Ratio of successive differences; `None` when the tail is not decreasing in a
/// Cauchy fashion (signalled to callers as a convergence diagnostic).
pub fn estimated_ratio(xs: &[f64]) -> Option<f64> {
    if xs.len() < 3 {
        return None;
    }
    let n = xs.len();
    let d1 = xs[n - 2] - xs[n - 3];
    let d2 = xs[n - 1] - xs[n - 2];
    if d1 == 0.0 {
        return None;
    }
    let r = d2 / d1;
    if r.is_finite() {
        Some(r)
    } else {
        None
    }
}

/// A tail is Cauchy-like when successive differences shrink, or when the whole
/// tail has already settled to within round-off scatter (sequences converging to
/// zero bottom out in cancellation noise rather than contracting cleanly).
pub fn tail_is_cauchy(xs: &[f64]) -> bool {
    let n = xs.len();
    if n < 2 {
        return false;
    }
    let last_diff = (xs[n - 1] - xs[n - 2]).abs();
    if last_diff <= 1e-6 * xs[n - 1].abs().max(1.0) {
        return true;
    }
    matches!(estimated_ratio(xs), Some(r) if r.abs() < 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn richardson_recovers_geometric_limit() {
        let xs: Vec<f64> = (0..8).map(|k| 3.0 + 5.0 * 0.5f64.powi(k)).collect();
        let r = richardson(&xs, 0.5).unwrap();
        assert_abs_diff_eq!(r.value, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn aitken_estimates_unknown_ratio() {
        let q: f64 = (-2.0f64).exp();
        let xs: Vec<f64> = (0..5).map(|k| -1.5 + 0.7 * q.powi(k)).collect();
        let r = aitken(&xs).unwrap();
        assert_abs_diff_eq!(r.value, -1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(estimated_ratio(&xs).unwrap(), q, epsilon = 1e-9);
    }

    #[test]
    fn non_cauchy_tail_detected() {
        let xs = [1.0, 1.5, 2.5, 4.5];
        assert!(!tail_is_cauchy(&xs));
    }
}

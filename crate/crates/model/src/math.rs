//! Scalar nonlinearities and softmax helpers.

/// tanh-approximated GELU.
pub(crate) fn gelu(x: f64) -> f64 {
    const C: f64 = 0.797_884_560_802_865_4; // sqrt(2/pi)
    0.5 * x * (1.0 + (C * (x + 0.044715 * x * x * x)).tanh())
}

/// Derivative of the tanh-approximated GELU.
pub(crate) fn gelu_deriv(x: f64) -> f64 {
    const C: f64 = 0.797_884_560_802_865_4;
    let u = C * (x + 0.044715 * x * x * x);
    let t = u.tanh();
    let du = C * (1.0 + 3.0 * 0.044715 * x * x);
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du
}

/// In-place softmax over `row[..len]`, numerically stabilized.
pub(crate) fn softmax_prefix(row: &mut [f64], len: usize) {
    let m = row[..len].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in &mut row[..len] {
        *v = (*v - m).exp();
        sum += *v;
    }
    for v in &mut row[..len] {
        *v /= sum;
    }
}

/// log(sum(exp(v))) with max subtraction.
pub(crate) fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

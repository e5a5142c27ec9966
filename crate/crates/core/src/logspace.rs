//! Small helpers for arithmetic on natural-log probabilities.

use std::f64::consts::LN_2;

/// `ln(0)`.
pub const LOG_ZERO: f64 = f64::NEG_INFINITY;

/// `ln(exp(a) + exp(b))` without overflow or underflow.
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == LOG_ZERO {
        return b;
    }
    if b == LOG_ZERO {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(sum(exp(x)))` over a slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(LOG_ZERO, f64::max);
    if max == LOG_ZERO {
        return LOG_ZERO;
    }
    if max.is_infinite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Converts a natural-log probability into a distance in bits (`-log2 p`).
#[inline]
pub fn nats_to_bits(log_p: f64) -> f64 {
    if log_p == LOG_ZERO {
        f64::INFINITY
    } else {
        -log_p / LN_2
    }
}

/// Safe `ln` for probabilities: `ln(0) = -inf`.
#[inline]
pub fn ln(p: f64) -> f64 {
    if p <= 0.0 {
        LOG_ZERO
    } else {
        p.ln()
    }
}

//! Numeric helpers for big-integer ratios and log-scale binomials.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Exact binomial coefficient.
pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Top 64 significant bits of `x` and the shift that was discarded.
fn mantissa(x: &BigUint) -> (u64, u64) {
    let bits = x.bits();
    if bits <= 64 {
        (x.to_u64().expect("fits in 64 bits"), 0)
    } else {
        let shift = bits - 64;
        ((x >> shift).to_u64().expect("fits in 64 bits"), shift)
    }
}

/// Natural logarithm of a positive big integer; `-inf` for zero.
pub(crate) fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, shift) = mantissa(x);
    (m as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `a / b` as a double, with relative error around 2^-52 regardless of size.
pub(crate) fn ratio_biguint(a: &BigUint, b: &BigUint) -> f64 {
    assert!(!b.is_zero(), "ratio with zero denominator");
    if a.is_zero() {
        return 0.0;
    }
    let (ma, sa) = mantissa(a);
    let (mb, sb) = mantissa(b);
    let exp = sa as i64 - sb as i64;
    (ma as f64 / mb as f64) * 2f64.powi(exp as i32)
}

pub(crate) fn to_f64_saturating(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

pub(crate) fn ln_factorial(t: u64) -> f64 {
    (2..=t).map(|i| (i as f64).ln()).sum()
}

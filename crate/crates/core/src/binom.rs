//! Exact binomial coefficients and their logarithms.
//!
//! Coefficients are computed by exact big-integer recurrence and memoized one
//! row `C(n, ·)` at a time; logarithms are taken from the exact values, so no
//! Stirling-type error enters downstream.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Memo of binomial rows. Not shared: create one per computation.
#[derive(Debug, Default, Clone)]
pub struct Binomials {
    rows: BTreeMap<usize, Vec<BigUint>>,
}

impl Binomials {
    pub fn new() -> Self {
        Self::default()
    }

    /// `C(n, 0..=n)`.
    pub fn row(&mut self, n: usize) -> &[BigUint] {
        self.rows.entry(n).or_insert_with(|| binomial_row(n))
    }

    /// `C(n, k)`, zero when `k > n`.
    pub fn get(&mut self, n: usize, k: usize) -> BigUint {
        self.row(n).get(k).cloned().unwrap_or_else(BigUint::zero)
    }

    /// `log2 C(n, k)`; `-inf` when `k > n`.
    pub fn log2(&mut self, n: usize, k: usize) -> f64 {
        match self.row(n).get(k) {
            Some(c) => log2_big(c),
            None => f64::NEG_INFINITY,
        }
    }
}

fn binomial_row(n: usize) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigUint::from(n - k) / BigUint::from(k + 1);
        row.push(c.clone());
    }
    row
}

/// Exact `C(n, k)`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    c
}

/// `log2 C(n, k)` from the exact coefficient.
pub fn log2_binomial(n: usize, k: usize) -> f64 {
    log2_big(&binomial(n, k))
}

/// `log2 x` to full double precision for arbitrarily large `x`; `-inf` for 0.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return libm::log2(x.to_u64().expect("fits in 64 bits") as f64);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 leading bits");
    libm::log2(top as f64) + shift as f64
}

/// `num / den` rounded to a double, with relative error near 2⁻⁶³ even when
/// both operands are far outside the `f64` range.
///
/// # Panics
/// Panics if `den` is zero.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return 0.0;
    }
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    // Scale so the integer quotient carries 64 to 65 significant bits.
    let k = 64 + db - nb;
    let q = if k >= 0 {
        (num << k as u64) / den
    } else {
        num / (den << (-k) as u64)
    };
    let qf = q.to_f64().expect("quotient is finite");
    libm::ldexp(qf, -(k as i32))
}

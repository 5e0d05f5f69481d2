//! Expected weight distribution (EWD) of the constant-row-weight ensemble.
//!
//! `H(n, r, v)` draws `r` rows independently and uniformly from the weight-`v`
//! vectors of length `n`. A fixed weight-`w` vector is orthogonal to one such
//! row with probability
//!
//! ```text
//! rho_w = sum_{i even, i <= min(w, v)} C(v, i) C(n - v, w - i) / C(n, w)
//! ```
//!
//! (the overlap is hypergeometric), so the expected number of weight-`w`
//! kernel vectors is `m_w = C(n, w) rho_w^r`. The values span hundreds of
//! orders of magnitude, so everything is reported as `log2`, with an exact
//! big-rational path available for moderate `n`.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

use crate::binom::{log2_big, ratio_to_f64, Binomials};
use crate::gf2::{kernel_basis, BitMatrix, BitVector};
use crate::{seeded_rng, Error};

/// Largest `n − r` accepted by [`empirical_ewd`].
pub const EMPIRICAL_DIMENSION_LIMIT: usize = 24;

/// Largest kernel dimension that is ever enumerated exhaustively.
pub const KERNEL_ENUMERATION_LIMIT: usize = 30;

/// Largest `n` for which front ends compute exact rationals by default.
pub const EXACT_LENGTH_LIMIT: usize = 300;

/// Parameters of the ensemble `H(n, r, v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleParams {
    pub n: usize,
    pub r: usize,
    pub v: usize,
    /// Design rate when `r` was derived as `(1 − R)·n`.
    pub rate: Option<f64>,
}

impl EnsembleParams {
    pub fn new(n: usize, r: usize, v: usize) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        if r == 0 || r > n {
            return Err(Error::invalid("r", "must satisfy 1 <= r <= n"));
        }
        if v == 0 || v > n {
            return Err(Error::invalid("v", "must satisfy 1 <= v <= n"));
        }
        Ok(Self { n, r, v, rate: None })
    }

    /// `r = round((1 − rate)·n)`.
    pub fn with_rate(n: usize, rate: f64, v: usize) -> Result<Self, Error> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::invalid("rate", "must lie in [0, 1)"));
        }
        let r = libm::round((1.0 - rate) * n as f64) as usize;
        let mut p = Self::new(n, r, v)?;
        p.rate = Some(rate);
        Ok(p)
    }

    /// Design rate, or `1 − r/n` when none was given.
    pub fn rate(&self) -> f64 {
        self.rate.unwrap_or(1.0 - self.r as f64 / self.n as f64)
    }
}

/// An exact non-negative rational, not necessarily reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactRatio {
    pub numerator: BigUint,
    pub denominator: BigUint,
}

impl ExactRatio {
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.numerator, &self.denominator)
    }

    pub fn log2(&self) -> f64 {
        log2_big(&self.numerator) - log2_big(&self.denominator)
    }

    /// Exact equality of values, by cross multiplication.
    pub fn value_eq(&self, other: &ExactRatio) -> bool {
        &self.numerator * &other.denominator == &other.numerator * &self.denominator
    }
}

fn check_rho_args(n: usize, v: usize, w: usize) -> Result<(), Error> {
    if w > n {
        return Err(Error::invalid("w", "must not exceed n"));
    }
    if v > n {
        return Err(Error::invalid("v", "must not exceed n"));
    }
    Ok(())
}

fn rho_numerator(b: &mut Binomials, n: usize, v: usize, w: usize) -> BigUint {
    let mut sum = BigUint::zero();
    for i in (0..=w.min(v)).step_by(2) {
        if w - i <= n - v {
            sum += b.get(v, i) * b.get(n - v, w - i);
        }
    }
    sum
}

fn rho_log_path(b: &mut Binomials, n: usize, v: usize, w: usize) -> f64 {
    let denom = b.log2(n, w);
    let mut sum = 0.0;
    for i in (0..=w.min(v)).step_by(2) {
        if w - i <= n - v {
            sum += libm::exp2(b.log2(v, i) + b.log2(n - v, w - i) - denom);
        }
    }
    sum.min(1.0)
}

/// Probability that a fixed weight-`w` vector is orthogonal to a uniform
/// weight-`v` row of length `n`, in double precision.
pub fn rho(n: usize, v: usize, w: usize) -> Result<f64, Error> {
    check_rho_args(n, v, w)?;
    Ok(rho_log_path(&mut Binomials::new(), n, v, w))
}

/// Exact value of [`rho`] as `Σ C(v,i)C(n−v,w−i) / C(n,w)`.
pub fn rho_exact(n: usize, v: usize, w: usize) -> Result<ExactRatio, Error> {
    check_rho_args(n, v, w)?;
    let mut b = Binomials::new();
    Ok(ExactRatio {
        numerator: rho_numerator(&mut b, n, v, w),
        denominator: b.get(n, w),
    })
}

/// Large-`n` (Bernoulli) approximation `(1 + (1 − 2v/n)^w) / 2` of `rho`.
pub fn rho_bernoulli(n: usize, v: usize, w: usize) -> f64 {
    0.5 * (1.0 + epsilon(n, v, w))
}

/// Bias term `(1 − 2v/n)^w`.
pub fn epsilon(n: usize, v: usize, w: usize) -> f64 {
    libm::pow(1.0 - 2.0 * v as f64 / n as f64, w as f64)
}

/// `log2(C(n, w) · rho_w^exponent)`; the exponent is the number of
/// independent weight-`v` constraints.
fn log2_count(b: &mut Binomials, n: usize, v: usize, w: usize, exponent: usize) -> f64 {
    let lc = b.log2(n, w);
    if exponent == 0 {
        return lc;
    }
    let rho = rho_log_path(b, n, v, w);
    if rho == 0.0 {
        return f64::NEG_INFINITY;
    }
    lc + exponent as f64 * libm::log2(rho)
}

/// `log2(C(n, w) · rho_w^exponent)` for explicit arguments.
///
/// With `exponent = u − 1` this is the expected number of weight-`w`
/// codewords orthogonal to `u − 1` independent weight-`v` rows.
pub fn log2_expected_codewords(n: usize, v: usize, w: usize, exponent: usize) -> Result<f64, Error> {
    check_rho_args(n, v, w)?;
    Ok(log2_count(&mut Binomials::new(), n, v, w, exponent))
}

/// One coefficient of the EWD.
#[derive(Clone, Debug, PartialEq)]
pub struct EwdEntry {
    pub w: usize,
    pub rho: f64,
    pub log2_m_w: f64,
    /// `log2(C(n, w) 2^{-r})` for a uniformly random `r × n` matrix.
    pub log2_m_w_random: f64,
    pub m_w_exact: Option<ExactRatio>,
}

impl EwdEntry {
    /// `m_w` as a double (may overflow to infinity for huge values).
    pub fn m_w(&self) -> f64 {
        libm::exp2(self.log2_m_w)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EwdReport {
    pub params: EnsembleParams,
    pub entries: Vec<EwdEntry>,
}

fn ewd_entry(b: &mut Binomials, p: &EnsembleParams, w: usize, exact: bool) -> Result<EwdEntry, Error> {
    check_rho_args(p.n, p.v, w)?;
    let rho = rho_log_path(b, p.n, p.v, w);
    let log2_m_w = log2_count(b, p.n, p.v, w, p.r);
    let log2_m_w_random = b.log2(p.n, w) - p.r as f64;
    let m_w_exact = exact.then(|| {
        let c = b.get(p.n, w);
        let s = rho_numerator(b, p.n, p.v, w);
        ExactRatio {
            numerator: &c * num_traits::pow(s, p.r),
            denominator: num_traits::pow(c, p.r),
        }
    });
    Ok(EwdEntry {
        w,
        rho,
        log2_m_w,
        log2_m_w_random,
        m_w_exact,
    })
}

/// `m_w = C(n, w) · rho_w^r` for one weight.
pub fn ewd_coefficient(params: &EnsembleParams, w: usize, exact: bool) -> Result<EwdEntry, Error> {
    ewd_entry(&mut Binomials::new(), params, w, exact)
}

/// EWD coefficients for every weight in `weights`, sharing one binomial memo.
pub fn ewd_report(
    params: &EnsembleParams,
    weights: impl IntoIterator<Item = usize>,
    exact: bool,
) -> Result<EwdReport, Error> {
    let mut b = Binomials::new();
    let entries = weights
        .into_iter()
        .map(|w| ewd_entry(&mut b, params, w, exact))
        .collect::<Result<_, _>>()?;
    Ok(EwdReport {
        params: *params,
        entries,
    })
}

/// `log2 m_w` for uniformly random `r × n` parity-check matrices:
/// `log2 C(n, w) − r`.
pub fn ewd_random(n: usize, r: usize, w: usize) -> Result<f64, Error> {
    if w > n {
        return Err(Error::invalid("w", "must not exceed n"));
    }
    Ok(crate::binom::log2_binomial(n, w) - r as f64)
}

/// Gilbert–Varshamov distance: the smallest `w` with `C(n, w) ≥ 2^r`.
pub fn gv_distance(n: usize, r: usize) -> Result<usize, Error> {
    if r == 0 || r > n {
        return Err(Error::invalid("r", "must satisfy 1 <= r <= n"));
    }
    let target = BigUint::one() << r;
    let mut b = Binomials::new();
    (0..=n)
        .find(|&w| b.get(n, w) >= target)
        .ok_or_else(|| Error::invalid("r", "no weight reaches one expected codeword"))
}

/// Outcome of the row-weight feasibility rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChoiceThreshold {
    /// `log2 m_v^(r) = log2(C(n, v) · rho_v^(r−1))`.
    pub log2_value: f64,
    /// `m_v^(r) ≥ 1`.
    pub feasible: bool,
    /// Odd `v` cannot be used for binary dual-containing sampling.
    pub odd_weight: bool,
}

impl ChoiceThreshold {
    pub fn value(&self) -> f64 {
        libm::exp2(self.log2_value)
    }
}

/// Expected number of weight-`v` codewords available at the last sampler
/// step, `m_v^(r) = C(n, v) · rho_v^(r−1)`.
pub fn choice_threshold(params: &EnsembleParams) -> Result<ChoiceThreshold, Error> {
    let log2_value = log2_expected_codewords(params.n, params.v, params.v, params.r - 1)?;
    Ok(ChoiceThreshold {
        log2_value,
        feasible: log2_value >= 0.0,
        odd_weight: params.v % 2 == 1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticReport {
    pub epsilon: f64,
    /// `log2 C(n, w) − r·(1 − log2(1 + epsilon))`.
    pub log2_m_w_approx: f64,
    /// `ln 2 / (1 − R) · log2 n`.
    pub feasibility_bound_v: f64,
    /// `n · 2^{−(1−R) v / ln 2}`.
    pub max_feasible_w: f64,
}

/// Row weights below this keep low-weight codewords in the ensemble:
/// `ln 2 / (1 − R) · log2 n`.
pub fn feasibility_bound_v(n: usize, rate: f64) -> Result<f64, Error> {
    if rate >= 1.0 {
        return Err(Error::Undefined("feasibility bound at rate 1"));
    }
    Ok(core::f64::consts::LN_2 / (1.0 - rate) * libm::log2(n as f64))
}

/// Largest sublinear weight that can still have `m_w ≥ 1`:
/// `n · 2^{−(1−R) v / ln 2}`.
pub fn max_feasible_w(n: usize, rate: f64, v: usize) -> Result<f64, Error> {
    if rate >= 1.0 {
        return Err(Error::Undefined("maximum feasible weight at rate 1"));
    }
    Ok(n as f64 * libm::exp2(-(1.0 - rate) * v as f64 / core::f64::consts::LN_2))
}

/// Bernoulli approximation of the EWD and the derived feasibility bounds.
pub fn asymptotics(params: &EnsembleParams, w: usize) -> Result<AsymptoticReport, Error> {
    if 2 * params.v > params.n {
        return Err(Error::invalid("v", "asymptotic model requires v <= n/2"));
    }
    if w > params.n {
        return Err(Error::invalid("w", "must not exceed n"));
    }
    let rate = params.rate();
    let eps = epsilon(params.n, params.v, w);
    let log2_m_w_approx = crate::binom::log2_binomial(params.n, w)
        - params.r as f64 * (1.0 - libm::log2(1.0 + eps));
    Ok(AsymptoticReport {
        epsilon: eps,
        log2_m_w_approx,
        feasibility_bound_v: feasibility_bound_v(params.n, rate)?,
        max_feasible_w: max_feasible_w(params.n, rate, params.v)?,
    })
}

/// Uniformly random vector of length `n` and weight `v`.
pub fn sample_weight_vector<R: Rng + ?Sized>(n: usize, v: usize, rng: &mut R) -> BitVector {
    let mut out = BitVector::zeros(n);
    for i in rand::seq::index::sample(rng, n, v) {
        out.set(i, true);
    }
    out
}

/// One draw from `H(n, r, v)`.
pub fn sample_ensemble<R: Rng + ?Sized>(params: &EnsembleParams, rng: &mut R) -> BitMatrix {
    let mut h = BitMatrix::zeros(0, params.n);
    for _ in 0..params.r {
        h.push_row(&sample_weight_vector(params.n, params.v, rng))
            .expect("row length is n");
    }
    h
}

/// Weight distribution of `Ker(h)` by exhaustive Gray-code enumeration.
///
/// Entry `w` counts kernel vectors of weight `w`, so entry 0 is always 1.
pub fn kernel_weight_distribution(h: &BitMatrix) -> Result<Vec<u64>, Error> {
    let basis = kernel_basis(h);
    let dim = basis.rows();
    if dim > KERNEL_ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit {
            dimension: dim,
            limit: KERNEL_ENUMERATION_LIMIT,
        });
    }
    let mut counts = vec![0u64; h.cols() + 1];
    let mut current = vec![0u64; crate::gf2::words_for(h.cols())];
    counts[0] = 1;
    for i in 1u64..(1u64 << dim) {
        let flip = i.trailing_zeros() as usize;
        for (c, b) in current.iter_mut().zip(basis.row_words(flip)) {
            *c ^= b;
        }
        let weight: u32 = current.iter().map(|w| w.count_ones()).sum();
        counts[weight as usize] += 1;
    }
    Ok(counts)
}

/// Averaged kernel weight distributions of sampled ensemble members.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalEwd {
    pub trials: usize,
    /// Mean count of weight-`w` kernel vectors, `w = 0..=n`.
    pub mean: Vec<f64>,
    /// Standard error of each mean (sample standard deviation / √trials).
    pub std_err: Vec<f64>,
    pub mean_kernel_size: f64,
    pub kernel_size_std_err: f64,
}

fn mean_and_std_err(sum: u128, sum_sq: u128, trials: usize) -> (f64, f64) {
    let t = trials as f64;
    let mean = sum as f64 / t;
    if trials < 2 {
        return (mean, 0.0);
    }
    let var = ((sum_sq as f64) - t * mean * mean).max(0.0) / (t - 1.0);
    (mean, libm::sqrt(var / t))
}

/// Monte-Carlo estimate of the EWD: samples `trials` matrices from the
/// ensemble and enumerates each kernel. Dependent rows enlarge the kernel,
/// and such kernels are counted as they are.
pub fn empirical_ewd(params: &EnsembleParams, trials: usize, seed: u64) -> Result<EmpiricalEwd, Error> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    if params.n - params.r > EMPIRICAL_DIMENSION_LIMIT {
        return Err(Error::EnumerationLimit {
            dimension: params.n - params.r,
            limit: EMPIRICAL_DIMENSION_LIMIT,
        });
    }
    let mut rng = seeded_rng(seed);
    let n = params.n;
    let mut sum = vec![0u128; n + 1];
    let mut sum_sq = vec![0u128; n + 1];
    let (mut size_sum, mut size_sq) = (0u128, 0u128);
    for _ in 0..trials {
        let h = sample_ensemble(params, &mut rng);
        let counts = kernel_weight_distribution(&h)?;
        let mut size = 0u128;
        for (w, &c) in counts.iter().enumerate() {
            let c = c as u128;
            sum[w] += c;
            sum_sq[w] += c * c;
            size += c;
        }
        size_sum += size;
        size_sq += size * size;
    }
    let (mean, std_err) = sum
        .iter()
        .zip(&sum_sq)
        .map(|(&s, &q)| mean_and_std_err(s, q, trials))
        .unzip();
    let (mean_kernel_size, kernel_size_std_err) = mean_and_std_err(size_sum, size_sq, trials);
    Ok(EmpiricalEwd {
        trials,
        mean,
        std_err,
        mean_kernel_size,
        kernel_size_std_err,
    })
}

/// Expected number of columns of weight `z`, for `z = 0..=r`:
/// `t_z = n · C(r, z) · (v/n)^z · (1 − v/n)^(r−z)`.
pub fn expected_column_weights(params: &EnsembleParams) -> Vec<f64> {
    let (n, r) = (params.n, params.r);
    let q = params.v as f64 / n as f64;
    let mut b = Binomials::new();
    (0..=r)
        .map(|z| {
            let hits = if z == 0 { 0.0 } else { z as f64 * libm::log2(q) };
            let misses = if z == r { 0.0 } else { (r - z) as f64 * libm::log2(1.0 - q) };
            n as f64 * libm::exp2(b.log2(r, z) + hits + misses)
        })
        .collect()
}

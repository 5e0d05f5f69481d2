//! Lee–Brickell information set decoding for low-weight codewords.
//!
//! One iteration draws a uniform column permutation, reduces the permuted
//! check matrix to RREF and takes the non-pivot columns as the information
//! set. Every weight-`p` pattern on the information set then determines a
//! unique codeword; the redundancy part is the XOR of the matching reduced
//! columns, and a pattern is accepted when that XOR has weight `w − p`.
//!
//! Taking the information set from the RREF means an iteration never has to
//! be retried because a random column set happened to be singular, which is
//! common for sparse matrices. Rank-deficient inputs are fine: the code
//! dimension is `n − rank`.

use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use crate::binom::Binomials;
use crate::gf2::{eliminate, BitMatrix, BitVector, Permutation};
use crate::{seeded_rng, Error};

pub const DEFAULT_P: usize = 3;

/// How `p` evolves over the iterations of one search.
///
/// With a fixed `p` a codeword is reachable only if some information set
/// meets its support in exactly `p` positions, and for a given code that
/// may hold for no codeword of the target weight. Cycling through `1..=w`
/// reaches every codeword that any `p` reaches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PSchedule {
    #[default]
    Fixed,
    /// Iteration `i + 1` uses the successor of the `p` of iteration `i`
    /// in `1, 2, …, w, 1, …`.
    Cyclic,
}

impl PSchedule {
    pub fn next(self, p: usize, w: usize) -> usize {
        match self {
            PSchedule::Fixed => p,
            PSchedule::Cyclic if p >= w => 1,
            PSchedule::Cyclic => p + 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IsdConfig {
    /// Weight of the enumerated patterns on the information set; the first
    /// value when `schedule` is cyclic.
    pub p: usize,
    pub schedule: PSchedule,
    /// Cap on permutation rounds per search.
    pub max_iterations: usize,
    pub rng_seed: u64,
}

impl Default for IsdConfig {
    fn default() -> Self {
        Self {
            p: DEFAULT_P,
            schedule: PSchedule::Fixed,
            max_iterations: 1000,
            rng_seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsdOutcome {
    /// A kernel vector of the requested weight, or `None` when the iteration
    /// budget ran out.
    pub codeword: Option<BitVector>,
    pub iterations_used: usize,
    /// Number of redundancy-weight checks performed.
    pub candidates_tested: u64,
}

impl IsdOutcome {
    pub fn found(&self) -> bool {
        self.codeword.is_some()
    }
}

/// Result of a single Lee–Brickell iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iteration {
    pub codeword: Option<BitVector>,
    pub candidates_tested: u64,
}

/// Checks the arguments shared by every search entry point.
pub fn check_search_args(h: &BitMatrix, w: usize, p: usize) -> Result<(), Error> {
    if w == 0 || w > h.cols() {
        return Err(Error::invalid("w", "must satisfy 0 < w <= n"));
    }
    if w < p {
        return Err(Error::invalid("p", "must not exceed the target weight w"));
    }
    Ok(())
}

/// Runs one permutation round. Arguments are assumed valid
/// (see [`check_search_args`]).
pub fn lb_iteration<R: Rng + ?Sized>(h: &BitMatrix, w: usize, p: usize, rng: &mut R) -> Iteration {
    let n = h.cols();
    let perm = Permutation::random(n, rng);
    let mut reduced = h.permute_columns(&perm).expect("permutation has length n");
    let pivots = eliminate(&mut reduced, true);
    let rank = pivots.len();
    let k = n - rank;
    let mut out = Iteration {
        codeword: None,
        candidates_tested: 0,
    };
    if p > k || w - p > rank {
        return out;
    }

    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&j| !is_pivot[j]).collect();
    // Row j of `columns` is reduced column free[j] restricted to the pivot rows.
    let columns = reduced
        .select_rows(&(0..rank).collect::<Vec<_>>())
        .and_then(|m| m.select_columns(&free))
        .expect("indices in range")
        .transpose();

    let Some((pattern, redundancy)) = first_pattern(&columns, k, p, w - p, &mut out.candidates_tested)
    else {
        return out;
    };
    let mut permuted = BitVector::zeros(n);
    for j in pattern {
        permuted.set(free[j], true);
    }
    for (i, &c) in pivots.iter().enumerate() {
        if redundancy[i / 64] >> (i % 64) & 1 == 1 {
            permuted.set(c, true);
        }
    }
    let codeword = perm.inverse().apply(&permuted).expect("length n");
    debug_assert_eq!(codeword.weight(), w);
    out.codeword = Some(codeword);
    out
}

/// Lexicographic search over `p`-subsets of the rows of `columns` for one whose
/// XOR has weight `target`. Returns the subset and the XOR.
fn first_pattern(
    columns: &BitMatrix,
    k: usize,
    p: usize,
    target: usize,
    tested: &mut u64,
) -> Option<(Vec<usize>, Vec<u64>)> {
    let words = crate::gf2::words_for(columns.cols());
    if p == 0 {
        *tested += 1;
        return (target == 0).then(|| (Vec::new(), vec![0; words]));
    }
    let mut idx = vec![0usize; p];
    // acc[d] holds the XOR of the first d chosen columns.
    let mut acc = vec![0u64; (p + 1) * words];
    let mut d = 0;
    loop {
        if idx[d] > k - (p - d) {
            if d == 0 {
                return None;
            }
            d -= 1;
            idx[d] += 1;
            continue;
        }
        let (head, tail) = acc.split_at_mut((d + 1) * words);
        let next = &mut tail[..words];
        for ((slot, a), c) in next.iter_mut().zip(&head[d * words..]).zip(columns.row_words(idx[d])) {
            *slot = a ^ c;
        }
        if d + 1 == p {
            *tested += 1;
            let weight: u32 = next.iter().map(|x| x.count_ones()).sum();
            if weight as usize == target {
                return Some((idx, next.to_vec()));
            }
            idx[d] += 1;
        } else {
            d += 1;
            idx[d] = idx[d - 1] + 1;
        }
    }
}

/// Runs up to `max_iterations` rounds with a fixed `p` on `rng`, stopping at
/// the first hit.
pub fn lb_search_with_rng<R: Rng + ?Sized>(
    h: &BitMatrix,
    w: usize,
    p: usize,
    max_iterations: usize,
    rng: &mut R,
) -> Result<IsdOutcome, Error> {
    lb_search_scheduled(h, w, p, PSchedule::Fixed, max_iterations, rng)
}

/// As [`lb_search_with_rng`], with `p` following `schedule`.
pub fn lb_search_scheduled<R: Rng + ?Sized>(
    h: &BitMatrix,
    w: usize,
    mut p: usize,
    schedule: PSchedule,
    max_iterations: usize,
    rng: &mut R,
) -> Result<IsdOutcome, Error> {
    check_search_args(h, w, p)?;
    let mut out = IsdOutcome {
        codeword: None,
        iterations_used: 0,
        candidates_tested: 0,
    };
    while out.iterations_used < max_iterations {
        out.iterations_used += 1;
        let it = lb_iteration(h, w, p, rng);
        out.candidates_tested += it.candidates_tested;
        if it.codeword.is_some() {
            out.codeword = it.codeword;
            break;
        }
        p = schedule.next(p, w);
    }
    Ok(out)
}

/// Searches `Ker(h)` for a weight-`w` vector with a generator seeded from
/// `cfg.rng_seed`.
pub fn lb_search(h: &BitMatrix, w: usize, cfg: &IsdConfig) -> Result<IsdOutcome, Error> {
    lb_search_scheduled(h, w, cfg.p, cfg.schedule, cfg.max_iterations, &mut seeded_rng(cfg.rng_seed))
}

/// Source of Lee–Brickell searches for the samplers.
///
/// Implementations must only return kernel vectors of the requested weight.
pub trait IsdBackend {
    fn search(&mut self, h: &BitMatrix, w: usize, p: usize, max_iterations: usize) -> Result<IsdOutcome, Error>;
}

/// Single-threaded backend; outcomes are a pure function of the seed.
#[derive(Clone, Debug)]
pub struct SequentialIsd<R> {
    rng: R,
}

impl<R: Rng> SequentialIsd<R> {
    pub fn new(rng: R) -> Self {
        Self { rng }
    }

    pub fn into_rng(self) -> R {
        self.rng
    }
}

impl<R: Rng> IsdBackend for SequentialIsd<R> {
    fn search(&mut self, h: &BitMatrix, w: usize, p: usize, max_iterations: usize) -> Result<IsdOutcome, Error> {
        lb_search_with_rng(h, w, p, max_iterations, &mut self.rng)
    }
}

/// Enumeration weight for a code with redundancy `u` and target weight `v`:
/// `round(v − u/2)` clamped to `[1, v]` while `u/2 < v`, `default` otherwise.
pub fn choose_p_with_default(u: usize, v: usize, default: usize) -> usize {
    if u < 2 * v {
        (2 * v - u).div_ceil(2).clamp(1, v)
    } else {
        default
    }
}

/// [`choose_p_with_default`] with the default `p = 3`.
pub fn choose_p(u: usize, v: usize) -> usize {
    choose_p_with_default(u, v, DEFAULT_P)
}

/// `γ₂(r) = Π_{i=1}^{r−1} (1 − 2^{−i})`, the probability that a uniform
/// `r × r` binary matrix is invertible up to the missing last factor, as used
/// in the cost model.
pub fn gamma2(r: usize) -> f64 {
    (1..r.max(1)).map(|i| 1.0 - libm::exp2(-(i as f64))).product()
}

/// Probability that one iteration finds a codeword.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuccessProbability {
    /// `1 − (1 − q)^{m_w}` with `q = C(k,p) C(n−k,w−p) / C(n,w)`.
    pub exact: f64,
    /// `min{1, m_w · q}`.
    pub approximation: f64,
}

impl SuccessProbability {
    /// Expected iterations until success, `1 / exact`.
    pub fn expected_iterations(&self) -> f64 {
        1.0 / self.exact
    }
}

fn check_model_args(n: usize, k: usize, w: usize, p: usize) -> Result<(), Error> {
    if k > n || w > n {
        return Err(Error::invalid("k", "need k <= n and w <= n"));
    }
    if p > w.min(k) {
        return Err(Error::invalid("p", "must satisfy p <= min(w, k)"));
    }
    if w - p > n - k {
        return Err(Error::invalid("p", "must satisfy w - p <= n - k"));
    }
    Ok(())
}

/// Per-iteration success probability of Lee–Brickell on a length-`n`,
/// dimension-`k` code assumed to hold `m_w` codewords of weight `w`.
pub fn lb_success_probability(n: usize, k: usize, w: usize, p: usize, m_w: f64) -> Result<SuccessProbability, Error> {
    check_model_args(n, k, w, p)?;
    if m_w.is_nan() || m_w < 0.0 {
        return Err(Error::invalid("m_w", "must be a non-negative number"));
    }
    if m_w == 0.0 {
        return Ok(SuccessProbability {
            exact: 0.0,
            approximation: 0.0,
        });
    }
    let mut b = Binomials::new();
    let log2_q = b.log2(k, p) + b.log2(n - k, w - p) - b.log2(n, w);
    let q = libm::exp2(log2_q).min(1.0);
    let exact = -libm::expm1(m_w * libm::log1p(-q));
    Ok(SuccessProbability {
        exact: exact.min(1.0),
        approximation: libm::exp2(libm::log2(m_w) + log2_q).min(1.0),
    })
}

/// Cost of one iteration in elementary GF(2) operations:
/// `(n−k)²(n+k) / γ₂(n−k) + n·C(k, p)`.
pub fn lb_time_estimate(n: usize, k: usize, p: usize) -> Result<f64, Error> {
    if k > n {
        return Err(Error::invalid("k", "must not exceed n"));
    }
    let r = (n - k) as f64;
    let enumeration = n as f64 * libm::exp2(crate::binom::log2_binomial(k, p));
    Ok(r * r * (n + k) as f64 / gamma2(n - k) + enumeration)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsdCostModel {
    pub success_probability: f64,
    pub time_estimate: f64,
    pub gamma_q: f64,
}

impl IsdCostModel {
    pub fn new(n: usize, k: usize, w: usize, p: usize, m_w: f64) -> Result<Self, Error> {
        Ok(Self {
            success_probability: lb_success_probability(n, k, w, p, m_w)?.exact,
            time_estimate: lb_time_estimate(n, k, p)?,
            gamma_q: gamma2(n - k),
        })
    }

    /// Expected total cost `T / P`; infinite when success is impossible.
    pub fn expected_cost(&self) -> f64 {
        self.time_estimate / self.success_probability
    }
}

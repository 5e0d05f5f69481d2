//! Row-by-row sampling of self-orthogonal sparse matrices.
//!
//! The dual-containing sampler keeps the accepted rows `h_1, …, h_u` and
//! looks for the next row among the weight-`v` codewords of the code checked
//! by `H_u = [h_1; …; h_u; 1…1]`. Any such codeword is orthogonal to every
//! accepted row and, because of the all-ones row, to itself. A codeword that
//! lies in the span of the accepted rows is rejected, so the rank grows by
//! one per step.
//!
//! One "ISD call" is one Lee–Brickell iteration. A step stalls when its calls
//! (including those whose codeword was span-rejected) reach the per-step cap.
//!
//! The enumeration weight follows [`choose_p_with_default`]. While the
//! redundancy is below `2v` that rule can pick a `p` too small to reach any
//! new codeword of a very sparse `H_u`, so in that regime each unsuccessful
//! call moves on to the next `p` in `1..=v`, wrapping around.
//!
//! The same loop gives CSS pairs (rows of `H_1` searched in `Ker(H_2)`) and
//! stabilizer pairs (rows `(a, b)` of length `2n` searched with swapped
//! halves, so the symplectic form vanishes).

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::time::Duration;

use crate::gf2::{BitMatrix, BitVector, EchelonBasis};
use crate::isd::{
    choose_p_with_default, lb_success_probability, lb_time_estimate, IsdBackend, PSchedule, SequentialIsd, DEFAULT_P,
};
use crate::weight::{choice_threshold, log2_expected_codewords, sample_weight_vector, EnsembleParams};
use crate::{seeded_rng, Error};

pub const DEFAULT_MAX_ISD_CALLS_PER_STEP: usize = 100;

/// Below `2^FEASIBILITY_MARGIN_LOG2` expected weight-`v` codewords at the
/// last step, a pre-flight warning is attached.
pub const FEASIBILITY_MARGIN_LOG2: f64 = 5.0;

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerConfig {
    pub n: usize,
    pub r: usize,
    pub v: usize,
    pub rng_seed: u64,
    pub max_isd_calls_per_step: usize,
    /// `p` used once the redundancy reaches `2v` (see [`choose_p_with_default`]).
    pub default_p: usize,
    /// Accept `r ≥ n/2`. Nothing is promised about success there.
    pub allow_r_near_half: bool,
}

impl SamplerConfig {
    pub fn new(n: usize, r: usize, v: usize, rng_seed: u64) -> Self {
        Self {
            n,
            r,
            v,
            rng_seed,
            max_isd_calls_per_step: DEFAULT_MAX_ISD_CALLS_PER_STEP,
            default_p: DEFAULT_P,
            allow_r_near_half: false,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        EnsembleParams::new(self.n, self.r, self.v)?;
        if self.v % 2 == 1 {
            return Err(Error::invalid("v", "must be even"));
        }
        if 2 * self.r >= self.n && !self.allow_r_near_half {
            return Err(Error::invalid("r", "must be below n/2 (set allow_r_near_half to override)"));
        }
        if self.r >= self.n {
            return Err(Error::invalid("r", "must be below n"));
        }
        if self.max_isd_calls_per_step == 0 {
            return Err(Error::invalid("max_isd_calls_per_step", "must be at least 1"));
        }
        Ok(())
    }

    pub fn params(&self) -> EnsembleParams {
        EnsembleParams {
            n: self.n,
            r: self.r,
            v: self.v,
            rate: None,
        }
    }
}

/// Pre-flight findings that do not stop a run.
#[derive(Clone, Debug, PartialEq)]
pub enum Warning {
    /// `m_v^(r) < 1`: the last steps are expected to find nothing.
    RowWeightInfeasible { log2_m_v: f64 },
    /// `1 ≤ m_v^(r) < 2^5`.
    SmallFeasibilityMargin { log2_m_v: f64 },
    /// `r ≥ n/2` was allowed explicitly.
    RedundancyNearHalf,
    /// CSS pair: fewer expected weight-`w` codewords in `Ker(H_2)` than rows
    /// requested for `H_1`.
    CssCodewordsBelowRows { log2_m_w: f64, r1: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleResult {
    pub matrix: BitMatrix,
    /// ISD calls spent on step `u = 1..r−1` (row `u + 1`).
    pub per_step_isd_calls: Vec<usize>,
    /// Codewords found but rejected as linearly dependent, per step.
    pub per_step_span_rejections: Vec<usize>,
    /// Enumeration weight each step started with.
    pub per_step_p: Vec<usize>,
    /// Wall time, when the caller has a clock.
    pub elapsed: Option<Duration>,
    pub seed: u64,
    pub warnings: Vec<Warning>,
}

impl SampleResult {
    pub fn total_isd_calls(&self) -> usize {
        self.per_step_isd_calls.iter().sum()
    }

    /// Average calls per step; 0 for `r = 1`.
    pub fn mean_isd_calls(&self) -> f64 {
        if self.per_step_isd_calls.is_empty() {
            return 0.0;
        }
        self.total_isd_calls() as f64 / self.per_step_isd_calls.len() as f64
    }
}

/// A run that hit the per-step ISD call cap.
#[derive(Clone, Debug, PartialEq)]
pub struct Stalled {
    /// Rows accepted before the failing step; equals `partial.rows()`.
    pub step: usize,
    /// The accepted rows. Still self-orthogonal (or, for CSS/stabilizer runs,
    /// still satisfies its pair condition), full rank, constant row weight.
    pub partial: BitMatrix,
    pub per_step_isd_calls: Vec<usize>,
    pub per_step_span_rejections: Vec<usize>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SamplerError {
    #[error(transparent)]
    Config(#[from] Error),
    #[error("stalled after {} accepted rows", .0.step)]
    Stalled(Box<Stalled>),
}

fn feasibility_warnings(params: &EnsembleParams) -> Result<Vec<Warning>, Error> {
    let t = choice_threshold(params)?;
    let mut out = Vec::new();
    if !t.feasible {
        out.push(Warning::RowWeightInfeasible { log2_m_v: t.log2_value });
    } else if t.log2_value < FEASIBILITY_MARGIN_LOG2 {
        out.push(Warning::SmallFeasibilityMargin { log2_m_v: t.log2_value });
    }
    Ok(out)
}

/// Per-step bookkeeping shared by the three samplers.
struct RowSearch {
    rows: BitMatrix,
    basis: EchelonBasis,
    calls: Vec<usize>,
    rejections: Vec<usize>,
    cap: usize,
    seed: u64,
}

impl RowSearch {
    fn new(len: usize, cap: usize, seed: u64) -> Self {
        Self {
            rows: BitMatrix::zeros(0, len),
            basis: EchelonBasis::new(len),
            calls: Vec::new(),
            rejections: Vec::new(),
            cap,
            seed,
        }
    }

    fn push_unchecked(&mut self, row: &BitVector) -> bool {
        if !self.basis.insert(row) {
            return false;
        }
        self.rows.push_row(row).expect("row length matches");
        true
    }

    /// Searches `Ker(h)` for weight `w` until a codeword passes `to_row` into a
    /// new independent row, or the cap is reached.
    ///
    /// With `escalate` set, every call that does not produce a new row moves
    /// `p` to the next value of `1..=w`, cyclically. A small `p` on a very sparse `h` only reaches
    /// codewords supported mostly on pivot columns; early on these are often
    /// sums of the accepted rows, or there are none at all.
    fn step<B: IsdBackend + ?Sized>(
        &mut self,
        backend: &mut B,
        h: &BitMatrix,
        w: usize,
        mut p: usize,
        escalate: bool,
        to_row: impl Fn(BitVector) -> BitVector,
    ) -> Result<(), SamplerError> {
        let (mut calls, mut rejected) = (0, 0);
        let accepted = loop {
            if calls >= self.cap {
                break false;
            }
            let budget = if escalate { 1 } else { self.cap - calls };
            let out = backend.search(h, w, p, budget)?;
            calls += out.iterations_used.max(1);
            let Some(c) = out.codeword else {
                if escalate {
                    p = PSchedule::Cyclic.next(p, w);
                }
                continue;
            };
            debug_assert!(c.weight() == w && h.mat_vec(&c).is_ok_and(|s| s.is_zero()));
            if self.push_unchecked(&to_row(c)) {
                break true;
            }
            rejected += 1;
            if escalate {
                p = PSchedule::Cyclic.next(p, w);
            }
        };
        self.calls.push(calls);
        self.rejections.push(rejected);
        if accepted {
            Ok(())
        } else {
            Err(self.stalled())
        }
    }

    fn stalled(&self) -> SamplerError {
        SamplerError::Stalled(Box::new(Stalled {
            step: self.rows.rows(),
            partial: self.rows.clone(),
            per_step_isd_calls: self.calls.clone(),
            per_step_span_rejections: self.rejections.clone(),
            seed: self.seed,
        }))
    }
}

/// Samples an `r × n` matrix with `H·Hᵀ = 0`, rank `r` and all rows of weight
/// `v`, using the sequential (seed-reproducible) search.
pub fn sample_dual_containing(cfg: &SamplerConfig) -> Result<SampleResult, SamplerError> {
    cfg.validate()?;
    let mut rng = seeded_rng(cfg.rng_seed);
    let first = sample_weight_vector(cfg.n, cfg.v, &mut rng);
    run_dual_containing(cfg, first, &mut SequentialIsd::new(rng))
}

/// As [`sample_dual_containing`], with row searches delegated to `backend`.
/// The first row still comes from the seeded generator.
pub fn sample_dual_containing_with<B: IsdBackend + ?Sized>(
    cfg: &SamplerConfig,
    backend: &mut B,
) -> Result<SampleResult, SamplerError> {
    cfg.validate()?;
    let first = sample_weight_vector(cfg.n, cfg.v, &mut seeded_rng(cfg.rng_seed));
    run_dual_containing(cfg, first, backend)
}

fn run_dual_containing<B: IsdBackend + ?Sized>(
    cfg: &SamplerConfig,
    first: BitVector,
    backend: &mut B,
) -> Result<SampleResult, SamplerError> {
    let mut warnings = feasibility_warnings(&cfg.params())?;
    if 2 * cfg.r >= cfg.n {
        warnings.push(Warning::RedundancyNearHalf);
    }
    let ones = BitVector::ones(cfg.n);
    let mut search = RowSearch::new(cfg.n, cfg.max_isd_calls_per_step, cfg.rng_seed);
    search.push_unchecked(&first);
    let mut per_step_p = Vec::with_capacity(cfg.r.saturating_sub(1));
    for u in 1..cfg.r {
        let mut h_u = search.rows.clone();
        h_u.push_row(&ones).expect("length n");
        let redundancy = u + usize::from(!search.basis.contains(&ones));
        let p = choose_p_with_default(redundancy, cfg.v, cfg.default_p).min(cfg.v);
        per_step_p.push(p);
        search.step(backend, &h_u, cfg.v, p, redundancy < 2 * cfg.v, |c| c)?;
        debug_assert!(search.rows.is_self_orthogonal());
    }
    Ok(SampleResult {
        matrix: search.rows,
        per_step_isd_calls: search.calls,
        per_step_span_rejections: search.rejections,
        per_step_p,
        elapsed: None,
        seed: cfg.rng_seed,
        warnings,
    })
}

/// Predicted cost of a dual-containing run in elementary GF(2) operations.
#[derive(Clone, Debug, PartialEq)]
pub struct CostEstimate {
    /// Cost of step `u = 1..r−1`; infinite when the model gives that step no
    /// chance of success.
    pub per_step: Vec<f64>,
    pub total: f64,
}

/// Sums `T_LB / ((1 − 2^{2(u+1)−n}) · P_LB)` over the steps `u = 1..r−1`,
/// with `k = n − u − 1`, `m_v^(u) = C(n,v)·rho_v^(u−1)` and, at each step,
/// the same `p` the sampler would use.
pub fn estimate_sampler_cost(cfg: &SamplerConfig) -> Result<CostEstimate, Error> {
    EnsembleParams::new(cfg.n, cfg.r, cfg.v)?;
    if 2 * cfg.r >= cfg.n {
        return Err(Error::invalid("r", "cost model requires r < n/2"));
    }
    let (n, v) = (cfg.n, cfg.v);
    let per_step: Vec<f64> = (1..cfg.r)
        .map(|u| {
            let k = n - u - 1;
            let p = choose_p_with_default(u + 1, v, cfg.default_p).min(v).min(k);
            let m = libm::exp2(log2_expected_codewords(n, v, v, u - 1)?);
            let success = lb_success_probability(n, k, v, p, m)?.exact;
            let rejection = 1.0 - libm::exp2(2.0 * (u + 1) as f64 - n as f64);
            Ok(lb_time_estimate(n, k, p)? / (rejection * success))
        })
        .collect::<Result<_, Error>>()?;
    Ok(CostEstimate {
        total: per_step.iter().sum(),
        per_step,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CssConfig {
    pub n: usize,
    /// Rows of `H_1`, searched in `Ker(H_2)`.
    pub r1: usize,
    /// Rows of `H_2`, drawn i.i.d. of weight `v`.
    pub r2: usize,
    /// Row weight of `H_1`.
    pub w: usize,
    /// Row weight of `H_2`.
    pub v: usize,
    pub rng_seed: u64,
    pub max_isd_calls_per_step: usize,
    pub default_p: usize,
    /// Redraws allowed for dependent `H_2` rows, over the whole matrix.
    pub max_resamples: usize,
}

impl CssConfig {
    pub fn new(n: usize, r1: usize, r2: usize, w: usize, v: usize, rng_seed: u64) -> Self {
        Self {
            n,
            r1,
            r2,
            w,
            v,
            rng_seed,
            max_isd_calls_per_step: DEFAULT_MAX_ISD_CALLS_PER_STEP,
            default_p: DEFAULT_P,
            max_resamples: 1000,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        EnsembleParams::new(self.n, self.r2, self.v)?;
        if self.w == 0 || self.w > self.n {
            return Err(Error::invalid("w", "must satisfy 1 <= w <= n"));
        }
        if self.r1 + self.r2 > self.n {
            return Err(Error::invalid("r1", "r1 + r2 must not exceed n"));
        }
        if self.max_isd_calls_per_step == 0 {
            return Err(Error::invalid("max_isd_calls_per_step", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CssPair {
    pub h1: BitMatrix,
    pub h2: BitMatrix,
    /// ISD calls spent on each row of `H_1`.
    pub per_step_isd_calls: Vec<usize>,
    pub per_step_span_rejections: Vec<usize>,
    /// Dependent `H_2` rows that were redrawn.
    pub h2_resamples: usize,
    pub elapsed: Option<Duration>,
    pub seed: u64,
    pub warnings: Vec<Warning>,
}

/// Samples `H_2` (`r2 × n`, weight-`v` rows, full rank) and `H_1` (`r1 × n`,
/// weight-`w` rows, full rank) with `H_1·H_2ᵀ = 0`.
pub fn sample_css_pair(cfg: &CssConfig) -> Result<CssPair, SamplerError> {
    cfg.validate()?;
    let mut rng = seeded_rng(cfg.rng_seed);
    let mut h2 = RowSearch::new(cfg.n, cfg.max_isd_calls_per_step, cfg.rng_seed);
    let mut resamples = 0;
    while h2.rows.rows() < cfg.r2 {
        if !h2.push_unchecked(&sample_weight_vector(cfg.n, cfg.v, &mut rng)) {
            resamples += 1;
            if resamples > cfg.max_resamples {
                return Err(Error::invalid("r2", "could not draw independent weight-v rows").into());
            }
        }
    }

    let mut warnings = Vec::new();
    let log2_m_w = log2_expected_codewords(cfg.n, cfg.v, cfg.w, cfg.r2)?;
    if cfg.r1 > 0 && log2_m_w < libm::log2(cfg.r1 as f64) {
        warnings.push(Warning::CssCodewordsBelowRows { log2_m_w, r1: cfg.r1 });
    }

    let mut backend = SequentialIsd::new(rng);
    let mut h1 = RowSearch::new(cfg.n, cfg.max_isd_calls_per_step, cfg.rng_seed);
    let p = choose_p_with_default(cfg.r2, cfg.w, cfg.default_p).min(cfg.w);
    for _ in 0..cfg.r1 {
        h1.step(&mut backend, &h2.rows, cfg.w, p, cfg.r2 < 2 * cfg.w, |c| c)?;
    }
    Ok(CssPair {
        h1: h1.rows,
        h2: h2.rows,
        per_step_isd_calls: h1.calls,
        per_step_span_rejections: h1.rejections,
        h2_resamples: resamples,
        elapsed: None,
        seed: cfg.rng_seed,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerConfig {
    pub n: usize,
    pub r: usize,
    /// Weight of each combined row `(a, b)` of length `2n`.
    pub v: usize,
    pub rng_seed: u64,
    pub max_isd_calls_per_step: usize,
    pub default_p: usize,
}

impl StabilizerConfig {
    pub fn new(n: usize, r: usize, v: usize, rng_seed: u64) -> Self {
        Self {
            n,
            r,
            v,
            rng_seed,
            max_isd_calls_per_step: DEFAULT_MAX_ISD_CALLS_PER_STEP,
            default_p: DEFAULT_P,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n == 0 || self.r == 0 || self.r > self.n {
            return Err(Error::invalid("r", "must satisfy 1 <= r <= n"));
        }
        if self.v == 0 || self.v > 2 * self.n {
            return Err(Error::invalid("v", "must satisfy 1 <= v <= 2n"));
        }
        if self.max_isd_calls_per_step == 0 {
            return Err(Error::invalid("max_isd_calls_per_step", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerPair {
    pub h_x: BitMatrix,
    pub h_z: BitMatrix,
    /// Weight of each row of `h_x`.
    pub x_weights: Vec<usize>,
    /// Weight of each row of `h_z`.
    pub z_weights: Vec<usize>,
    pub per_step_isd_calls: Vec<usize>,
    pub per_step_span_rejections: Vec<usize>,
    pub elapsed: Option<Duration>,
    pub seed: u64,
}

/// `H_X·H_Zᵀ + H_Z·H_Xᵀ`.
pub fn symplectic_form(h_x: &BitMatrix, h_z: &BitMatrix) -> Result<BitMatrix, Error> {
    h_x.mul_transpose(h_z)?.add(&h_z.mul_transpose(h_x)?)
}

/// Samples `r` independent rows `(a_i, b_i)` of combined weight `v` with
/// `a_i·b_jᵀ + b_i·a_jᵀ = 0` for all `i, j`.
///
/// A codeword `(x, y)` of `Ker([a_i | b_i])` becomes the new row
/// `(a, b) = (y, x)`.
pub fn sample_stabilizer(cfg: &StabilizerConfig) -> Result<StabilizerPair, SamplerError> {
    cfg.validate()?;
    let n = cfg.n;
    let mut rng = seeded_rng(cfg.rng_seed);
    let mut search = RowSearch::new(2 * n, cfg.max_isd_calls_per_step, cfg.rng_seed);
    search.push_unchecked(&sample_weight_vector(2 * n, cfg.v, &mut rng));
    let mut backend = SequentialIsd::new(rng);
    let swap = |c: BitVector| {
        let (x, y) = c.split_at(n).expect("length 2n");
        y.concat(&x)
    };
    for u in 1..cfg.r {
        let h_u = search.rows.clone();
        let p = choose_p_with_default(u, cfg.v, cfg.default_p).min(cfg.v);
        search.step(&mut backend, &h_u, cfg.v, p, u < 2 * cfg.v, swap)?;
    }
    let all: Vec<usize> = (0..2 * n).collect();
    let h_x = search.rows.select_columns(&all[..n])?;
    let h_z = search.rows.select_columns(&all[n..])?;
    debug_assert!(symplectic_form(&h_x, &h_z).is_ok_and(|s| s.is_zero()));
    Ok(StabilizerPair {
        x_weights: h_x.row_weights(),
        z_weights: h_z.row_weights(),
        h_x,
        h_z,
        per_step_isd_calls: search.calls,
        per_step_span_rejections: search.rejections,
        elapsed: None,
        seed: cfg.rng_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::rank;

    fn check_dual_containing(h: &BitMatrix, r: usize, v: usize) {
        assert_eq!(h.rows(), r);
        assert!(h.mul_transpose(h).unwrap().is_zero());
        assert!(h.row_weights().iter().all(|&x| x == v));
        assert_eq!(rank(h), r);
    }

    #[test]
    fn single_row() {
        let out = sample_dual_containing(&SamplerConfig::new(4, 1, 2, 0)).unwrap();
        check_dual_containing(&out.matrix, 1, 2);
        assert!(out.per_step_isd_calls.is_empty());
        assert_eq!(out.mean_isd_calls(), 0.0);
    }

    #[test]
    fn config_validation() {
        let bad = |c: SamplerConfig| matches!(sample_dual_containing(&c), Err(SamplerError::Config(_)));
        assert!(bad(SamplerConfig::new(10, 4, 3, 0)));
        assert!(bad(SamplerConfig::new(10, 5, 2, 0)));
        assert!(bad(SamplerConfig::new(10, 0, 2, 0)));
        assert!(bad(SamplerConfig {
            max_isd_calls_per_step: 0,
            ..SamplerConfig::new(10, 2, 2, 0)
        }));
        let near = SamplerConfig {
            allow_r_near_half: true,
            ..SamplerConfig::new(10, 5, 2, 0)
        };
        assert!(near.validate().is_ok());
        assert!(SamplerConfig { r: 10, ..near }.validate().is_err());
    }

    #[test]
    fn moderate_run_satisfies_invariants() {
        for seed in 0..3 {
            let out = sample_dual_containing(&SamplerConfig::new(60, 20, 4, seed)).unwrap();
            check_dual_containing(&out.matrix, 20, 4);
            assert_eq!(out.per_step_isd_calls.len(), 19);
            assert_eq!(out.per_step_span_rejections.len(), 19);
            assert_eq!(out.seed, seed);
        }
    }

    #[test]
    fn same_seed_same_matrix() {
        let cfg = SamplerConfig::new(70, 24, 6, 42);
        let a = sample_dual_containing(&cfg).unwrap();
        let b = sample_dual_containing(&cfg).unwrap();
        assert_eq!(a, b);
        let c = sample_dual_containing(&SamplerConfig { rng_seed: 43, ..cfg }).unwrap();
        assert_ne!(a.matrix, c.matrix);
    }

    #[test]
    fn impossible_rank_stalls_with_valid_partial() {
        // A self-orthogonal 6-column matrix has rank at most 3.
        let cfg = SamplerConfig {
            allow_r_near_half: true,
            max_isd_calls_per_step: 400,
            ..SamplerConfig::new(6, 4, 2, 1)
        };
        let Err(SamplerError::Stalled(s)) = sample_dual_containing(&cfg) else {
            panic!("expected a stall");
        };
        assert_eq!(s.step, 3);
        check_dual_containing(&s.partial, 3, 2);
        assert_eq!(s.per_step_isd_calls.len(), 3);
        assert_eq!(s.per_step_isd_calls[2], 400);
    }

    #[test]
    fn low_feasibility_is_a_warning() {
        let out = sample_dual_containing(&SamplerConfig {
            allow_r_near_half: true,
            max_isd_calls_per_step: 1000,
            ..SamplerConfig::new(6, 3, 2, 1)
        })
        .unwrap();
        check_dual_containing(&out.matrix, 3, 2);
        assert!(out.warnings.contains(&Warning::RedundancyNearHalf));
        assert!(out
            .warnings
            .iter()
            .any(|w| matches!(w, Warning::RowWeightInfeasible { .. } | Warning::SmallFeasibilityMargin { .. })));
    }

    #[test]
    fn cost_estimate() {
        assert_eq!(estimate_sampler_cost(&SamplerConfig::new(40, 1, 4, 0)).unwrap().total, 0.0);
        assert!(estimate_sampler_cost(&SamplerConfig::new(40, 20, 4, 0)).is_err());
        let totals: Vec<f64> = [6, 8, 10]
            .iter()
            .map(|&v| estimate_sampler_cost(&SamplerConfig::new(250, 80, v, 0)).unwrap().total)
            .collect();
        assert!(totals.iter().all(|t| t.is_finite()));
        assert!(totals.windows(2).all(|t| t[0] < t[1]), "{totals:?}");
    }

    #[test]
    fn cost_estimate_reduces_to_time_when_success_is_certain() {
        // v = 2 with many candidates: every step has P_LB ≈ 1.
        let cfg = SamplerConfig::new(200, 5, 2, 0);
        let est = estimate_sampler_cost(&cfg).unwrap();
        for (i, cost) in est.per_step.iter().enumerate() {
            let u = i + 1;
            let p = choose_p_with_default(u + 1, 2, DEFAULT_P).min(2);
            let t = lb_time_estimate(200, 200 - u - 1, p).unwrap();
            assert!((cost / t - 1.0).abs() < 1e-6, "u={u}");
        }
    }

    #[test]
    fn css_without_h1() {
        let pair = sample_css_pair(&CssConfig::new(30, 0, 10, 6, 4, 3)).unwrap();
        assert_eq!(pair.h1.shape(), (0, 30));
        assert_eq!(rank(&pair.h2), 10);
        assert!(pair.h2.row_weights().iter().all(|&x| x == 4));
    }

    #[test]
    fn css_rows_lie_in_enumerated_kernel() {
        let n = 16;
        let pair = sample_css_pair(&CssConfig::new(n, 3, 6, 4, 4, 9)).unwrap();
        let kernel: Vec<u32> = (0u32..1 << n)
            .filter(|&x| {
                let c = BitVector::from_bools(&(0..n).map(|j| x >> j & 1 == 1).collect::<Vec<_>>());
                pair.h2.mat_vec(&c).unwrap().is_zero()
            })
            .collect();
        for row in pair.h1.iter_rows() {
            let x = row.support().iter().fold(0u32, |acc, &j| acc | 1 << j);
            assert!(kernel.contains(&x));
        }
        assert_eq!(rank(&pair.h1), 3);
    }

    #[test]
    fn css_pair_meets_conditions() {
        let log2_m6 = log2_expected_codewords(60, 4, 6, 20).unwrap();
        assert!(log2_m6 >= libm::log2(5.0));
        for seed in 0..3 {
            let pair = sample_css_pair(&CssConfig::new(60, 5, 20, 6, 4, seed)).unwrap();
            assert!(pair.h1.mul_transpose(&pair.h2).unwrap().is_zero());
            assert_eq!((rank(&pair.h1), rank(&pair.h2)), (5, 20));
            assert!(pair.h1.row_weights().iter().all(|&x| x == 6));
            assert!(pair.warnings.is_empty());
        }
        assert!(sample_css_pair(&CssConfig::new(10, 6, 5, 2, 2, 0)).is_err());
    }

    #[test]
    fn stabilizer_single_row() {
        let pair = sample_stabilizer(&StabilizerConfig::new(5, 1, 3, 2)).unwrap();
        assert_eq!(pair.x_weights[0] + pair.z_weights[0], 3);
        assert!(symplectic_form(&pair.h_x, &pair.h_z).unwrap().is_zero());
    }

    #[test]
    fn stabilizer_pairwise_condition() {
        let pair = sample_stabilizer(&StabilizerConfig::new(6, 2, 4, 5)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let s = pair.h_x.row(i).dot(&pair.h_z.row(j)).unwrap() ^ pair.h_z.row(i).dot(&pair.h_x.row(j)).unwrap();
                assert!(!s, "({i},{j})");
            }
            assert_eq!(pair.x_weights[i] + pair.z_weights[i], 4);
        }
        assert_eq!(rank(&pair.h_x.hstack(&pair.h_z).unwrap()), 2);
    }

    #[test]
    fn stabilizer_moderate() {
        for seed in 0..3 {
            let pair = sample_stabilizer(&StabilizerConfig::new(40, 8, 6, seed)).unwrap();
            assert!(symplectic_form(&pair.h_x, &pair.h_z).unwrap().is_zero());
            let stacked = pair.h_x.hstack(&pair.h_z).unwrap();
            assert_eq!(rank(&stacked), 8);
            assert!(stacked.row_weights().iter().all(|&x| x == 6));
        }
    }
}

//! Statistical validation and benchmark drivers behind the `validate-*`,
//! `bench` and `columns` subcommands.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use qldpc_core::isd::{lb_search_with_rng, lb_success_probability};
use qldpc_core::sampler::{SamplerConfig, SamplerError};
use qldpc_core::toolkit::column_weight_histogram;
use qldpc_core::weight::{
    choice_threshold, empirical_ewd, ewd_report, expected_column_weights, gv_distance, sample_ensemble, EnsembleParams,
};
use qldpc_core::{seeded_rng, BitMatrix, BitVector, Error};
use rand::Rng;

use crate::run;

/// z-score bound used by every statistical check here.
pub const SIGMA_BOUND: f64 = 4.0;
/// Weights with a smaller theoretical `m_w` are reported but not checked.
pub const MIN_CHECKED_M_W: f64 = 0.01;

/// Runs `f(0..jobs)` on up to `available_parallelism` threads and returns the
/// results in index order.
pub fn run_indexed<T: Send>(jobs: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(jobs);
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(jobs));
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs {
                    break;
                }
                let out = f(i);
                results.lock().expect("no worker panicked").push((i, out));
            });
        }
    });
    let mut results = results.into_inner().expect("no worker panicked");
    results.sort_by_key(|(i, _)| *i);
    results.into_iter().map(|(_, t)| t).collect()
}

/// `(empirical − theoretical) / std_err`; zero when both agree exactly and
/// infinite when they differ with no observed spread.
pub fn z_score(empirical: f64, theoretical: f64, std_err: f64) -> f64 {
    let diff = empirical - theoretical;
    if std_err > 0.0 {
        diff / std_err
    } else if diff.abs() <= 1e-12 * theoretical.abs().max(1.0) {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

fn mean_and_std_err(xs: &[f64]) -> (f64, f64) {
    let t = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / t;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (t - 1.0);
    (mean, (var / t).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EwdRow {
    pub w: usize,
    pub theoretical: f64,
    pub empirical_mean: f64,
    pub std_err: f64,
    pub z: f64,
    /// Whether this weight takes part in the pass/fail decision.
    pub checked: bool,
}

impl EwdRow {
    pub fn passed(&self) -> bool {
        !self.checked || self.z.abs() <= SIGMA_BOUND
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EwdValidation {
    pub params: EnsembleParams,
    pub trials: usize,
    pub rows: Vec<EwdRow>,
}

impl EwdValidation {
    pub fn checked(&self) -> usize {
        self.rows.iter().filter(|r| r.checked).count()
    }

    pub fn failures(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| !r.passed()).map(|r| r.w).collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }
}

/// Compares the mean kernel weight distribution of `trials` ensemble samples
/// with `m_w`, weight by weight.
pub fn validate_ewd(params: &EnsembleParams, trials: usize, seed: u64) -> Result<EwdValidation, Error> {
    let emp = empirical_ewd(params, trials, seed)?;
    let theory = ewd_report(params, 0..=params.n, false)?;
    let rows = theory
        .entries
        .iter()
        .map(|e| {
            let theoretical = e.m_w();
            let (mean, se) = (emp.mean[e.w], emp.std_err[e.w]);
            EwdRow {
                w: e.w,
                theoretical,
                empirical_mean: mean,
                std_err: se,
                z: z_score(mean, theoretical, se),
                checked: theoretical >= MIN_CHECKED_M_W,
            }
        })
        .collect();
    Ok(EwdValidation {
        params: *params,
        trials,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsdValidationConfig {
    pub n: usize,
    pub r: usize,
    pub v: usize,
    pub weights: Vec<usize>,
    pub codes: usize,
    pub calls_per_code: usize,
    pub p: usize,
    /// Iteration cap of a single ISD call; calls that hit it count as failed.
    pub max_iterations: usize,
    pub seed: u64,
}

impl IsdValidationConfig {
    pub fn new(n: usize, r: usize, v: usize, weights: Vec<usize>, p: usize, seed: u64) -> Self {
        Self {
            n,
            r,
            v,
            weights,
            codes: 100,
            calls_per_code: 100,
            p,
            max_iterations: 100,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsdRow {
    pub w: usize,
    pub theoretical_m_w: f64,
    /// Distinct codewords found per code, averaged over codes.
    pub empirical_distinct: f64,
    pub theoretical_calls: f64,
    /// Iterations per successful call; NaN when no call succeeded.
    pub empirical_calls: f64,
    pub successful_calls: usize,
    pub failed_calls: usize,
}

impl IsdRow {
    /// ISD cannot find more distinct codewords than exist on average.
    pub fn distinct_at_most_theory(&self) -> bool {
        self.empirical_distinct <= self.theoretical_m_w
    }

    /// Hard-to-reach codewords push the measured cost above the model.
    pub fn calls_at_least_theory(&self) -> bool {
        self.empirical_calls >= self.theoretical_calls
    }
}

/// For every weight: samples `codes` ensemble matrices, runs
/// `calls_per_code` independent ISD calls on each and records how many
/// distinct codewords turn up and how many iterations a hit costs.
pub fn validate_isd(cfg: &IsdValidationConfig) -> Result<Vec<IsdRow>, Error> {
    let params = EnsembleParams::new(cfg.n, cfg.r, cfg.v)?;
    if cfg.codes == 0 || cfg.calls_per_code == 0 || cfg.max_iterations == 0 {
        return Err(Error::invalid("codes", "codes, calls per code and the iteration cap must be positive"));
    }
    let k = cfg.n - cfg.r;
    let theory = ewd_report(&params, cfg.weights.iter().copied(), false)?;
    let mut rows = Vec::with_capacity(cfg.weights.len());
    for e in &theory.entries {
        let w = e.w;
        if w < cfg.p || w == 0 {
            return Err(Error::invalid("p", "every weight must be at least p and positive"));
        }
        let theoretical_m_w = e.m_w();
        let theoretical_calls = lb_success_probability(cfg.n, k, w, cfg.p, theoretical_m_w)?.expected_iterations();
        let per_code = run_indexed(cfg.codes, |c| {
            let mut rng = seeded_rng(cfg.seed);
            rng.set_stream(((w as u64) << 32) | c as u64);
            let h = sample_ensemble(&params, &mut rng);
            let mut seen = BTreeSet::<BitVector>::new();
            let (mut iterations, mut hits) = (0usize, 0usize);
            for _ in 0..cfg.calls_per_code {
                let out = lb_search_with_rng(&h, w, cfg.p, cfg.max_iterations, &mut rng)?;
                if let Some(cw) = out.codeword {
                    iterations += out.iterations_used;
                    hits += 1;
                    seen.insert(cw);
                }
            }
            Ok::<_, Error>((seen.len(), iterations, hits))
        });
        let (mut distinct, mut iterations, mut hits) = (0usize, 0usize, 0usize);
        for r in per_code {
            let (d, i, h) = r?;
            distinct += d;
            iterations += i;
            hits += h;
        }
        rows.push(IsdRow {
            w,
            theoretical_m_w,
            empirical_distinct: distinct as f64 / cfg.codes as f64,
            theoretical_calls,
            empirical_calls: if hits == 0 { f64::NAN } else { iterations as f64 / hits as f64 },
            successful_calls: hits,
            failed_calls: cfg.codes * cfg.calls_per_code - hits,
        });
    }
    Ok(rows)
}

/// `(n, r, v)` of the benchmark table.
pub const BENCH_SETS: [(usize, usize, usize); 11] = [
    (250, 80, 6),
    (250, 80, 8),
    (250, 80, 10),
    (250, 80, 12),
    (250, 80, 14),
    (500, 200, 6),
    (500, 200, 8),
    (500, 200, 10),
    (1000, 400, 6),
    (1000, 400, 8),
    (1000, 400, 10),
];

pub const FAILURE_RATE_SET: (usize, usize, usize) = (150, 70, 10);
pub const FAILURE_RATE_CAP: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub enum RunOutcome {
    Completed { mean_isd_calls: f64, elapsed: Duration },
    Stalled { step: usize, elapsed: Duration },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRun {
    pub index: usize,
    pub seed: u64,
    pub outcome: RunOutcome,
}

/// `runs` sampler jobs with seeds `seed, seed+1, …`, run concurrently, in
/// run order.
pub fn bench_runs(n: usize, r: usize, v: usize, cap: usize, runs: usize, seed: u64) -> Result<Vec<BenchRun>, Error> {
    if runs == 0 {
        return Err(Error::invalid("runs", "must be at least 1"));
    }
    let mut probe = SamplerConfig::new(n, r, v, seed);
    probe.max_isd_calls_per_step = cap;
    probe.validate()?;
    run_indexed(runs, |i| {
        let mut cfg = probe.clone();
        cfg.rng_seed = seed.wrapping_add(i as u64);
        let start = std::time::Instant::now();
        let outcome = match run::sample(&cfg, 1) {
            Ok(res) => RunOutcome::Completed {
                mean_isd_calls: res.mean_isd_calls(),
                elapsed: res.elapsed.unwrap_or_default(),
            },
            Err(SamplerError::Stalled(s)) => RunOutcome::Stalled {
                step: s.step,
                elapsed: start.elapsed(),
            },
            Err(SamplerError::Config(e)) => return Err(e),
        };
        Ok(BenchRun {
            index: i,
            seed: cfg.rng_seed,
            outcome,
        })
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub r: usize,
    pub v: usize,
    pub gv_distance: usize,
    pub m_v: f64,
    pub runs: Vec<BenchRun>,
}

impl BenchRow {
    fn completed(&self) -> impl Iterator<Item = (f64, Duration)> + '_ {
        self.runs.iter().filter_map(|r| match r.outcome {
            RunOutcome::Completed { mean_isd_calls, elapsed } => Some((mean_isd_calls, elapsed)),
            RunOutcome::Stalled { .. } => None,
        })
    }

    pub fn stalls(&self) -> usize {
        self.runs.len() - self.completed().count()
    }

    /// ISD calls per step averaged over completed runs.
    pub fn mean_isd_calls(&self) -> f64 {
        let xs: Vec<f64> = self.completed().map(|c| c.0).collect();
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    pub fn mean_seconds(&self) -> f64 {
        let xs: Vec<f64> = self.completed().map(|c| c.1.as_secs_f64()).collect();
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

pub fn bench_table3(
    sets: &[(usize, usize, usize)],
    runs: usize,
    seed: u64,
    cap: usize,
) -> Result<Vec<BenchRow>, Error> {
    sets.iter()
        .map(|&(n, r, v)| {
            Ok(BenchRow {
                n,
                r,
                v,
                gv_distance: gv_distance(n, r)?,
                m_v: choice_threshold(&EnsembleParams::new(n, r, v)?)?.value(),
                runs: bench_runs(n, r, v, cap, runs, seed)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FailureRate {
    pub n: usize,
    pub r: usize,
    pub v: usize,
    pub cap: usize,
    pub runs: Vec<BenchRun>,
}

impl FailureRate {
    pub fn stall_steps(&self) -> Vec<usize> {
        self.runs
            .iter()
            .filter_map(|r| match r.outcome {
                RunOutcome::Stalled { step, .. } => Some(step),
                RunOutcome::Completed { .. } => None,
            })
            .collect()
    }

    /// Accepted-row count at the stall → number of stalls.
    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for s in self.stall_steps() {
            *h.entry(s).or_insert(0) += 1;
        }
        h
    }

    pub fn stall_fraction(&self) -> f64 {
        self.stall_steps().len() as f64 / self.runs.len() as f64
    }

    /// Share of stalls at one of the last two steps (`r−2` or `r−1`
    /// accepted rows); NaN without stalls.
    pub fn late_stall_fraction(&self) -> f64 {
        let steps = self.stall_steps();
        let late = steps.iter().filter(|&&s| s + 2 >= self.r).count();
        late as f64 / steps.len() as f64
    }
}

pub fn bench_failure_rate(runs: usize, seed: u64) -> Result<FailureRate, Error> {
    let (n, r, v) = FAILURE_RATE_SET;
    Ok(FailureRate {
        n,
        r,
        v,
        cap: FAILURE_RATE_CAP,
        runs: bench_runs(n, r, v, FAILURE_RATE_CAP, runs, seed)?,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnRow {
    pub z: usize,
    /// `t_z`, absent when the row weight is unknown.
    pub theoretical: Option<f64>,
    pub empirical_mean: Option<f64>,
    pub std_err: Option<f64>,
}

impl ColumnRow {
    pub fn z_score(&self) -> Option<f64> {
        Some(z_score(self.empirical_mean?, self.theoretical?, self.std_err?))
    }
}

/// Mean and standard error of the column-weight histogram over `samples`.
/// Histograms of different heights are padded with zeros.
pub fn empirical_column_histogram(samples: &[BitMatrix]) -> Vec<(f64, f64)> {
    let hists: Vec<Vec<usize>> = samples.iter().map(column_weight_histogram).collect();
    let len = hists.iter().map(Vec::len).max().unwrap_or(0);
    (0..len)
        .map(|z| {
            let xs: Vec<f64> = hists.iter().map(|h| h.get(z).copied().unwrap_or(0) as f64).collect();
            mean_and_std_err(&xs)
        })
        .collect()
}

/// Side-by-side `t_z` and empirical histogram for `z = 0..=r`. A single
/// sample has no standard error.
pub fn column_table(theory: Option<&EnsembleParams>, samples: &[BitMatrix]) -> Vec<ColumnRow> {
    let t = theory.map(expected_column_weights).unwrap_or_default();
    let emp = empirical_column_histogram(samples);
    (0..t.len().max(emp.len()))
        .map(|z| ColumnRow {
            z,
            theoretical: t.get(z).copied(),
            empirical_mean: emp.get(z).map(|e| e.0),
            std_err: emp.get(z).filter(|_| samples.len() > 1).map(|e| e.1),
        })
        .collect()
}

/// `count` raw ensemble draws from one seed.
pub fn ensemble_samples(params: &EnsembleParams, count: usize, seed: u64) -> Vec<BitMatrix> {
    let mut rng = seeded_rng(seed);
    (0..count).map(|_| sample_ensemble(params, &mut rng)).collect()
}

/// Dual-containing sampler outputs for seeds `seed, seed+1, …`; stalled runs
/// are dropped, so fewer than `count` matrices may come back.
pub fn sampler_samples(params: &EnsembleParams, count: usize, seed: u64) -> Vec<BitMatrix> {
    run_indexed(count, |i| {
        run::sample(&SamplerConfig::new(params.n, params.r, params.v, seed.wrapping_add(i as u64)), 1)
            .ok()
            .map(|r| r.matrix)
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Fresh seed for runs that did not get one.
pub fn random_seed() -> u64 {
    rand::rng().random()
}

#[cfg(test)]
mod tests {
    use super::*;
    use qldpc_core::gf2::kernel_basis;

    #[test]
    fn run_indexed_keeps_order() {
        let out = run_indexed(50, |i| i * i);
        assert_eq!(out, (0..50).map(|i| i * i).collect::<Vec<_>>());
        assert!(run_indexed(0, |i| i).is_empty());
    }

    #[test]
    fn z_scores() {
        assert_eq!(z_score(1.0, 1.0, 0.0), 0.0);
        assert_eq!(z_score(0.0, 0.5, 0.0), f64::NEG_INFINITY);
        assert!((z_score(3.0, 2.0, 0.5) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ewd_validation_small() {
        let p = EnsembleParams::new(16, 10, 3).unwrap();
        let v = validate_ewd(&p, 300, 4).unwrap();
        assert!(v.passed(), "{:?}", v.failures());
        assert_eq!(v.rows[0].empirical_mean, 1.0);
        assert!(v.checked() > 3);
        assert!(validate_ewd(&p, 0, 4).is_err());
    }

    #[test]
    fn isd_validation_small() {
        let mut cfg = IsdValidationConfig::new(30, 15, 4, vec![4, 6], 2, 8);
        cfg.codes = 10;
        cfg.calls_per_code = 10;
        let rows = validate_isd(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert_eq!(r.successful_calls + r.failed_calls, 100);
            assert!(r.empirical_distinct <= 10.0);
            assert!(r.theoretical_calls >= 1.0);
        }
        cfg.weights = vec![1];
        assert!(validate_isd(&cfg).is_err());
    }

    #[test]
    fn isd_distinct_counts_are_exact_on_a_fixed_code() {
        // Independent count: every kernel vector of weight 2 in a code with
        // kernel basis {110000, 001100, 000011} and no others.
        let h: BitMatrix = "110000 001100 000011".parse().unwrap();
        assert_eq!(kernel_basis(&h).rows(), 3);
        let mut rng = seeded_rng(1);
        let mut seen = BTreeSet::new();
        for _ in 0..200 {
            if let Some(c) = lb_search_with_rng(&h, 2, 1, 50, &mut rng).unwrap().codeword {
                seen.insert(c);
            }
        }
        assert_eq!(seen.len(), 3);
    }

    #[test]
    fn bench_runs_are_ordered_and_reproducible() {
        let a = bench_runs(40, 10, 4, 100, 6, 11).unwrap();
        let b = bench_runs(40, 10, 4, 100, 6, 11).unwrap();
        assert_eq!(a.iter().map(|r| r.seed).collect::<Vec<_>>(), (11..17).collect::<Vec<_>>());
        let calls = |x: &[BenchRun]| {
            x.iter()
                .map(|r| match r.outcome {
                    RunOutcome::Completed { mean_isd_calls, .. } => Some(mean_isd_calls),
                    RunOutcome::Stalled { .. } => None,
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(calls(&a), calls(&b));
        assert!(bench_runs(40, 10, 4, 100, 0, 11).is_err());
        assert!(bench_runs(40, 10, 3, 100, 1, 11).is_err());
    }

    #[test]
    fn failure_rate_summary() {
        let stalled = |step| BenchRun {
            index: 0,
            seed: 0,
            outcome: RunOutcome::Stalled {
                step,
                elapsed: Duration::ZERO,
            },
        };
        let done = BenchRun {
            index: 0,
            seed: 0,
            outcome: RunOutcome::Completed {
                mean_isd_calls: 1.0,
                elapsed: Duration::ZERO,
            },
        };
        let f = FailureRate {
            n: 150,
            r: 70,
            v: 10,
            cap: 100,
            runs: vec![stalled(68), stalled(69), stalled(40), done.clone(), done],
        };
        assert_eq!(f.stall_fraction(), 0.6);
        assert!((f.late_stall_fraction() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(f.histogram().into_iter().collect::<Vec<_>>(), [(40, 1), (68, 1), (69, 1)]);
    }

    #[test]
    fn column_table_on_identity() {
        let rows = column_table(None, &[BitMatrix::identity(5)]);
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[1].empirical_mean, Some(5.0));
        assert!(rows.iter().filter(|r| r.z != 1).all(|r| r.empirical_mean == Some(0.0)));
        assert!(rows[1].theoretical.is_none());
    }

    #[test]
    fn column_table_pads_theory() {
        let p = EnsembleParams::new(20, 4, 2).unwrap();
        let rows = column_table(Some(&p), &ensemble_samples(&p, 5, 1));
        assert_eq!(rows.len(), 5);
        let total: f64 = rows.iter().map(|r| r.theoretical.unwrap()).sum();
        assert!((total - 20.0).abs() < 1e-9);
        let emp: f64 = rows.iter().map(|r| r.empirical_mean.unwrap()).sum();
        assert!((emp - 20.0).abs() < 1e-9);
    }
}

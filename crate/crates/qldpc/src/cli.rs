//! Command-line front end. `run` returns the process exit code:
//! 0 success, 1 I/O failure, 2 invalid parameters, 3 stalled sampling,
//! 4 failed validation.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qldpc_core::sampler::{CssConfig, SampleResult, SamplerConfig, SamplerError, StabilizerConfig, Warning};
use qldpc_core::toolkit::prune_zero_columns;
use qldpc_core::weight::{ewd_report, gv_distance, rho_exact, EnsembleParams, EXACT_LENGTH_LIMIT};
use qldpc_core::{BitMatrix, Error};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::formats::{self, export, import, Format, FormatError, MatrixBundle, Metadata, GENERATOR_VERSION};
use crate::harness::{self, RunOutcome, SIGMA_BOUND};
use crate::manifest::{default_path, RunManifest};
use crate::{run, verify};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_STALLED: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "qldpc", version, about = "Sample and analyse sparse self-orthogonal parity-check matrices")]
struct Cli {
    /// Where to write the run manifest. Defaults to `<first output>.manifest.json`,
    /// or stderr for commands without output files.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample an r x n dual-containing matrix with rows of weight v.
    Sample(SampleArgs),
    /// Expected weight distribution of the H(n, r, v) ensemble as CSV.
    Ewd(EwdArgs),
    /// Gilbert-Varshamov distance.
    Gv(GvArgs),
    /// Compare the expected weight distribution with enumerated kernels.
    ValidateEwd(ValidateEwdArgs),
    /// Measure Lee-Brickell hit rates and distinct codewords on ensemble codes.
    ValidateIsd(ValidateIsdArgs),
    /// Run a benchmark preset.
    Bench(BenchArgs),
    /// Column-weight model against sampled or given matrices, as CSV.
    Columns(ColumnsArgs),
    /// Sample a CSS pair with H1 H2^T = 0.
    Css(CssArgs),
    /// Sample a symplectic-orthogonal stabilizer pair (HX, HZ).
    Stab(StabArgs),
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    /// Row weight; must be even.
    #[arg(long)]
    v: usize,
    /// Generated and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Stall after this many ISD calls on one step.
    #[arg(long, default_value_t = 100)]
    max_isd_calls: usize,
    /// Output file; the matrix goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to the output extension (.alist, .json, else dense text).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Drop all-zero columns before writing.
    #[arg(long)]
    prune_zero: bool,
    /// ISD worker threads; above 1 the output is no longer reproducible.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Permit 2r >= n.
    #[arg(long)]
    allow_r_near_half: bool,
}

#[derive(Args, Debug, Serialize)]
struct EwdArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    v: usize,
    /// Inclusive, `a..b` or `a`. Defaults to `0..n`.
    #[arg(long)]
    w_range: Option<String>,
    /// Exact rational arithmetic; refused above n = 300.
    #[arg(long)]
    exact: bool,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct GvArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
}

#[derive(Args, Debug, Serialize)]
struct ValidateEwdArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    v: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct ValidateIsdArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    v: usize,
    /// Inclusive, `a..b` or `a`.
    #[arg(long)]
    w_range: String,
    #[arg(long, default_value_t = 100)]
    codes: usize,
    #[arg(long, default_value_t = 100)]
    calls_per_code: usize,
    #[arg(long, default_value_t = 3)]
    p: usize,
    /// Iterations one ISD call may spend before it counts as failed.
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Preset {
    Table3,
    FailureRate,
}

#[derive(Args, Debug, Serialize)]
struct BenchArgs {
    #[arg(long, value_enum)]
    preset: Preset,
    /// Runs per parameter set; 3 for table3 and 100 for failure-rate by default.
    #[arg(long)]
    runs: Option<usize>,
    /// Run i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Source {
    /// Rows drawn independently, without orthogonality.
    Ensemble,
    /// Dual-containing sampler outputs.
    Sampler,
}

#[derive(Args, Debug, Serialize)]
struct ColumnsArgs {
    #[arg(long, required_unless_present = "input")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "input")]
    r: Option<usize>,
    /// With --in, defaults to the common row weight of the file if there is one.
    #[arg(long)]
    v: Option<usize>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = Source::Ensemble)]
    source: Source,
    #[arg(long)]
    seed: Option<u64>,
    /// Matrix file to histogram instead of sampling.
    #[arg(long = "in", conflicts_with_all = ["n", "r", "samples", "source", "seed"])]
    input: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CssArgs {
    #[arg(long)]
    n: usize,
    /// Rows of H1, found by ISD in Ker(H2).
    #[arg(long)]
    r1: usize,
    /// Rows of H2, drawn at random.
    #[arg(long)]
    r2: usize,
    /// Row weight of H1.
    #[arg(long)]
    w: usize,
    /// Row weight of H2.
    #[arg(long)]
    v: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 100)]
    max_isd_calls: usize,
    /// Files are written to `<out>_h1.<ext>` and `<out>_h2.<ext>`.
    #[arg(long, default_value = "css")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::JsonBundle)]
    format: Format,
}

#[derive(Args, Debug, Serialize)]
struct StabArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    /// Weight of each combined row (x | z) of length 2n.
    #[arg(long)]
    v: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 100)]
    max_isd_calls: usize,
    /// Files are written to `<out>_hx.<ext>` and `<out>_hz.<ext>`.
    #[arg(long, default_value = "stab")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::JsonBundle)]
    format: Format,
}

impl Serialize for Format {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Invalid(String),
    Stalled(String),
    Validation(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Io(_) => EXIT_IO,
            Failure::Invalid(_) => EXIT_INVALID,
            Failure::Stalled(_) => EXIT_STALLED,
            Failure::Validation(_) => EXIT_VALIDATION,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Invalid(m) | Failure::Stalled(m) | Failure::Validation(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Io { .. } => Failure::Io(e.to_string()),
            FormatError::Parse { .. } => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// State shared by every subcommand: the manifest being built.
struct Ctx {
    manifest: RunManifest,
}

impl Ctx {
    fn seed(&mut self, given: Option<u64>) -> u64 {
        let seed = given.unwrap_or_else(|| {
            let s = harness::random_seed();
            eprintln!("seed: {s} (generated)");
            s
        });
        self.manifest.seed = Some(seed);
        self.manifest.params.insert("seed".into(), seed.into());
        seed
    }

    fn output(&mut self, path: &Path) {
        self.manifest.outputs.push(path.to_path_buf());
    }
}

fn params_of<T: Serialize>(args: &T) -> Map<String, Value> {
    match serde_json::to_value(args) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

/// Parses and runs one invocation.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let (name, params) = match &cli.command {
        Command::Sample(a) => ("sample", params_of(a)),
        Command::Ewd(a) => ("ewd", params_of(a)),
        Command::Gv(a) => ("gv", params_of(a)),
        Command::ValidateEwd(a) => ("validate-ewd", params_of(a)),
        Command::ValidateIsd(a) => ("validate-isd", params_of(a)),
        Command::Bench(a) => ("bench", params_of(a)),
        Command::Columns(a) => ("columns", params_of(a)),
        Command::Css(a) => ("css", params_of(a)),
        Command::Stab(a) => ("stab", params_of(a)),
    };
    let mut ctx = Ctx {
        manifest: RunManifest::start(name, params, None),
    };
    let result = match &cli.command {
        Command::Sample(a) => sample(&mut ctx, a),
        Command::Ewd(a) => ewd(&mut ctx, a),
        Command::Gv(a) => gv(a),
        Command::ValidateEwd(a) => validate_ewd(&mut ctx, a),
        Command::ValidateIsd(a) => validate_isd(&mut ctx, a),
        Command::Bench(a) => bench(&mut ctx, a),
        Command::Columns(a) => columns(&mut ctx, a),
        Command::Css(a) => css(&mut ctx, a),
        Command::Stab(a) => stab(&mut ctx, a),
    };
    let code = match &result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    };
    ctx.manifest.finish(code);
    let target = cli.manifest.or_else(|| ctx.manifest.outputs.first().map(|p| default_path(p)));
    match target {
        Some(path) => {
            if let Err(e) = ctx.manifest.write(&path) {
                eprintln!("error: cannot write manifest {}: {e}", path.display());
                return if code == EXIT_OK { EXIT_IO } else { code };
            }
        }
        None => eprintln!("manifest: {}", serde_json::to_string(&ctx.manifest).expect("manifest serializes")),
    }
    code
}

fn parse_range(s: &str, n: usize) -> Result<std::ops::RangeInclusive<usize>, Failure> {
    let bad = || Failure::Invalid(format!("invalid w range {s:?}: expected `a..b` or `a` with a <= b <= n"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let a = num(s)?;
            (a, a)
        }
    };
    if a > b || b > n {
        return Err(bad());
    }
    Ok(a..=b)
}

fn print_warnings(warnings: &[Warning]) {
    for w in warnings {
        let text = match w {
            Warning::RowWeightInfeasible { log2_m_v } => {
                format!("expected weight-v codewords at the last step is below 1 (log2 = {log2_m_v:.2})")
            }
            Warning::SmallFeasibilityMargin { log2_m_v } => {
                format!("few weight-v codewords expected at the last step (log2 = {log2_m_v:.2})")
            }
            Warning::RedundancyNearHalf => "2r >= n: no success guarantee in this regime".to_string(),
            Warning::CssCodewordsBelowRows { log2_m_w, r1 } => {
                format!("expected weight-w codewords in Ker(H2) (2^{log2_m_w:.2}) is below r1 = {r1}")
            }
        };
        eprintln!("warning: {text}");
    }
}

fn sampler_failure(e: SamplerError) -> Failure {
    match e {
        SamplerError::Config(e) => e.into(),
        SamplerError::Stalled(s) => Failure::Stalled(format!(
            "stalled after {} accepted rows (seed {}); last step used {} ISD calls",
            s.step,
            s.seed,
            s.per_step_isd_calls.last().copied().unwrap_or(0)
        )),
    }
}

fn step_summary(calls: &[usize], rejections: &[usize]) -> String {
    let total: usize = calls.iter().sum();
    let mean = if calls.is_empty() { 0.0 } else { total as f64 / calls.len() as f64 };
    let mut hist = std::collections::BTreeMap::new();
    for &c in calls {
        *hist.entry(c).or_insert(0usize) += 1;
    }
    format!(
        "ISD calls: total {total}, mean per step {mean:.3}, max {}; span rejections: {}\nsteps by ISD calls (calls:steps): {}",
        calls.iter().max().copied().unwrap_or(0),
        rejections.iter().sum::<usize>(),
        hist.iter().map(|(c, k)| format!("{c}:{k}")).collect::<Vec<_>>().join(" ")
    )
}

/// Writes `bundle` to `out` or, without a path, returns the serialized text
/// for stdout. Either way the matrix is re-read from the serialized form.
fn emit(ctx: &mut Ctx, bundle: &MatrixBundle, out: Option<&Path>, format: Option<Format>) -> Result<(MatrixBundle, Option<String>), Failure> {
    match out {
        Some(path) => {
            let format = format.unwrap_or_else(|| Format::from_path(path));
            formats::write_file(path, bundle, format)?;
            ctx.output(path);
            let back = import(&std::fs::read_to_string(path)?, format)
                .map_err(|e| Failure::Io(format!("{}: re-read failed: {e}", path.display())))?;
            Ok((back, None))
        }
        None => {
            let format = format.unwrap_or(Format::DenseText);
            let text = export(bundle, format);
            let back = import(&text, format).map_err(|e| Failure::Io(format!("re-read failed: {e}")))?;
            Ok((back, Some(text)))
        }
    }
}

fn metadata(kind: &str, m: &BitMatrix, v: usize, seed: u64, calls: &[usize], rejections: &[usize]) -> Metadata {
    Metadata {
        n: m.cols(),
        r: m.rows(),
        v: Some(v),
        seed: Some(seed),
        generator_version: GENERATOR_VERSION.to_string(),
        kind: Some(kind.to_string()),
        per_step_isd_calls: calls.to_vec(),
        per_step_span_rejections: rejections.to_vec(),
    }
}

fn sample(ctx: &mut Ctx, a: &SampleArgs) -> Result<(), Failure> {
    if a.threads == 0 {
        return Err(Failure::Invalid("threads must be at least 1".into()));
    }
    let seed = ctx.seed(a.seed);
    let mut cfg = SamplerConfig::new(a.n, a.r, a.v, seed);
    cfg.max_isd_calls_per_step = a.max_isd_calls;
    cfg.allow_r_near_half = a.allow_r_near_half;
    let res: SampleResult = match run::sample(&cfg, a.threads) {
        Ok(res) => res,
        Err(SamplerError::Stalled(s)) => {
            if let Some(out) = &a.out {
                let partial = MatrixBundle {
                    metadata: metadata("dual-containing-partial", &s.partial, a.v, seed, &s.per_step_isd_calls, &s.per_step_span_rejections),
                    matrix: s.partial.clone(),
                };
                emit(ctx, &partial, Some(out), a.format)?;
                eprintln!("partial matrix ({} rows) written to {}", s.partial.rows(), out.display());
            }
            return Err(sampler_failure(SamplerError::Stalled(s)));
        }
        Err(e) => return Err(sampler_failure(e)),
    };
    print_warnings(&res.warnings);

    let mut summary = vec![
        format!("sampled {} x {} matrix, row weight {}, seed {seed}", a.r, a.n, a.v),
        step_summary(&res.per_step_isd_calls, &res.per_step_span_rejections),
        format!("elapsed: {:.3} s", res.elapsed.unwrap_or_default().as_secs_f64()),
    ];
    let mut matrix = res.matrix.clone();
    let mut kind = "dual-containing";
    if a.prune_zero {
        let (pruned, report) = prune_zero_columns(&matrix);
        summary.push(format!(
            "pruned {} zero columns: {:?} -> {:?}",
            report.removed_columns.len(),
            report.shape_before,
            report.shape_after
        ));
        matrix = pruned;
        kind = "dual-containing-pruned";
    }
    let bundle = MatrixBundle {
        metadata: metadata(kind, &matrix, a.v, seed, &res.per_step_isd_calls, &res.per_step_span_rejections),
        matrix,
    };
    let (back, text) = emit(ctx, &bundle, a.out.as_deref(), a.format)?;
    let check = verify::dual_containing(&back.matrix, a.r, bundle.matrix.cols(), Some(a.v));
    summary.push(check.to_string());
    let summary = summary.join("\n");
    match text {
        Some(text) => {
            print!("{text}");
            eprintln!("{summary}");
        }
        None => {
            println!("{summary}");
            println!("written: {}", a.out.as_ref().expect("has output").display());
        }
    }
    if !check.passed() {
        return Err(Failure::Validation("output failed verification".into()));
    }
    Ok(())
}

fn csv_sink(path: Option<&Path>, ctx: &mut Ctx) -> Result<csv::Writer<Box<dyn Write>>, Failure> {
    let sink: Box<dyn Write> = match path {
        Some(p) => {
            ctx.output(p);
            Box::new(std::fs::File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?)
        }
        None => Box::new(std::io::stdout().lock()),
    };
    Ok(csv::Writer::from_writer(sink))
}

fn ewd(ctx: &mut Ctx, a: &EwdArgs) -> Result<(), Failure> {
    let params = EnsembleParams::new(a.n, a.r, a.v)?;
    let range = match &a.w_range {
        Some(s) => parse_range(s, a.n)?,
        None => 0..=a.n,
    };
    if a.exact && a.n > EXACT_LENGTH_LIMIT {
        return Err(Failure::Invalid(format!("exact mode is limited to n <= {EXACT_LENGTH_LIMIT}")));
    }
    let report = ewd_report(&params, range, a.exact)?;
    let mut out = csv_sink(a.csv.as_deref(), ctx)?;
    out.write_record(["w", "log2_m_w", "rho_w", "log2_m_w_rnd"])?;
    for e in &report.entries {
        let (log2_m_w, rho) = match &e.m_w_exact {
            Some(exact) => (exact.log2(), rho_exact(a.n, a.v, e.w)?.to_f64()),
            None => (e.log2_m_w, e.rho),
        };
        out.write_record([e.w.to_string(), log2_m_w.to_string(), rho.to_string(), e.log2_m_w_random.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

fn gv(a: &GvArgs) -> Result<(), Failure> {
    println!("{}", gv_distance(a.n, a.r)?);
    Ok(())
}

fn validate_ewd(ctx: &mut Ctx, a: &ValidateEwdArgs) -> Result<(), Failure> {
    let params = EnsembleParams::new(a.n, a.r, a.v)?;
    let seed = ctx.seed(a.seed);
    let v = harness::validate_ewd(&params, a.trials, seed)?;
    let mut out = csv_sink(None, ctx)?;
    out.write_record(["w", "m_w", "empirical_mean", "std_err", "z", "checked", "pass"])?;
    for r in &v.rows {
        out.write_record([
            r.w.to_string(),
            r.theoretical.to_string(),
            r.empirical_mean.to_string(),
            r.std_err.to_string(),
            r.z.to_string(),
            r.checked.to_string(),
            r.passed().to_string(),
        ])?;
    }
    out.flush()?;
    drop(out);
    let failures = v.failures();
    println!(
        "validate-ewd: {} ({} of {} checked weights within {SIGMA_BOUND} sigma, {} trials)",
        if failures.is_empty() { "PASS" } else { "FAIL" },
        v.checked() - failures.len(),
        v.checked(),
        v.trials
    );
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(format!("weights outside {SIGMA_BOUND} sigma: {failures:?}")))
    }
}

fn validate_isd(ctx: &mut Ctx, a: &ValidateIsdArgs) -> Result<(), Failure> {
    let seed = ctx.seed(a.seed);
    let weights: Vec<usize> = parse_range(&a.w_range, a.n)?.collect();
    let mut cfg = harness::IsdValidationConfig::new(a.n, a.r, a.v, weights, a.p, seed);
    cfg.codes = a.codes;
    cfg.calls_per_code = a.calls_per_code;
    cfg.max_iterations = a.max_iterations;
    let rows = harness::validate_isd(&cfg)?;
    let mut out = csv_sink(None, ctx)?;
    out.write_record([
        "w",
        "p",
        "m_w",
        "distinct_found",
        "calls_theory",
        "calls_found",
        "failed_calls",
        "distinct_le_theory",
        "calls_ge_theory",
    ])?;
    for r in &rows {
        out.write_record([
            r.w.to_string(),
            a.p.to_string(),
            format!("{:.2}", r.theoretical_m_w),
            format!("{:.2}", r.empirical_distinct),
            format!("{:.2}", r.theoretical_calls),
            format!("{:.2}", r.empirical_calls),
            r.failed_calls.to_string(),
            r.distinct_at_most_theory().to_string(),
            r.calls_at_least_theory().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn bench(ctx: &mut Ctx, a: &BenchArgs) -> Result<(), Failure> {
    let seed = ctx.seed(a.seed);
    match a.preset {
        Preset::Table3 => {
            let runs = a.runs.unwrap_or(3);
            let rows = harness::bench_table3(&harness::BENCH_SETS, runs, seed, 100)?;
            let mut out = csv_sink(None, ctx)?;
            out.write_record(["n", "r", "v", "d_gv", "m_v", "runs", "stalls", "avg_time_s", "avg_isd_calls"])?;
            for row in &rows {
                out.write_record([
                    row.n.to_string(),
                    row.r.to_string(),
                    row.v.to_string(),
                    row.gv_distance.to_string(),
                    format!("{:.3e}", row.m_v),
                    row.runs.len().to_string(),
                    row.stalls().to_string(),
                    format!("{:.4}", row.mean_seconds()),
                    format!("{:.3}", row.mean_isd_calls()),
                ])?;
            }
            out.flush()?;
        }
        Preset::FailureRate => {
            let runs = a.runs.unwrap_or(100);
            let f = harness::bench_failure_rate(runs, seed)?;
            let steps = f.stall_steps();
            println!("parameters: n={} r={} v={} cap={} runs={}", f.n, f.r, f.v, f.cap, f.runs.len());
            println!("stalls: {} ({:.3})", steps.len(), f.stall_fraction());
            if !steps.is_empty() {
                println!("stalls at the last two steps: {:.3}", f.late_stall_fraction());
            }
            println!("accepted_rows_at_stall,count");
            for (step, count) in f.histogram() {
                println!("{step},{count}");
            }
            for run in &f.runs {
                if let RunOutcome::Stalled { step, .. } = run.outcome {
                    eprintln!("run {} (seed {}) stalled after {step} rows", run.index, run.seed);
                }
            }
        }
    }
    Ok(())
}

fn columns(ctx: &mut Ctx, a: &ColumnsArgs) -> Result<(), Failure> {
    let (theory, samples) = match &a.input {
        Some(path) => {
            let m = formats::read_file(path)?.matrix;
            let weights = m.row_weights();
            let v = a.v.or_else(|| (!weights.is_empty() && weights.iter().all(|&w| w == weights[0])).then(|| weights[0]));
            let theory = match v {
                Some(v) if m.rows() > 0 => Some(EnsembleParams::new(m.cols(), m.rows(), v)?),
                _ => None,
            };
            (theory, vec![m])
        }
        None => {
            let (n, r) = (a.n.expect("required by clap"), a.r.expect("required by clap"));
            let v = a.v.ok_or_else(|| Failure::Invalid("--v is required unless --in is given".into()))?;
            let params = EnsembleParams::new(n, r, v)?;
            let seed = ctx.seed(a.seed);
            let samples = match a.source {
                Source::Ensemble => harness::ensemble_samples(&params, a.samples, seed),
                Source::Sampler => {
                    let s = harness::sampler_samples(&params, a.samples, seed);
                    eprintln!("{} of {} sampler runs completed", s.len(), a.samples);
                    s
                }
            };
            (Some(params), samples)
        }
    };
    let rows = harness::column_table(theory.as_ref(), &samples);
    let opt = |x: Option<f64>| x.map_or_else(String::new, |x| x.to_string());
    let mut out = csv_sink(None, ctx)?;
    out.write_record(["z", "t_z", "empirical_mean", "std_err", "z_score"])?;
    for r in &rows {
        out.write_record([r.z.to_string(), opt(r.theoretical), opt(r.empirical_mean), opt(r.std_err), opt(r.z_score())])?;
    }
    out.flush()?;
    if let (Some(t0), Some(e0)) = rows.first().map_or((None, None), |r| (r.theoretical, r.empirical_mean)) {
        eprintln!("t_0: model {t0:.3}, observed {e0:.3} ({})", if e0 < t0 { "below model" } else { "not below model" });
    }
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str, format: Format) -> PathBuf {
    let mut name = prefix.file_name().unwrap_or_default().to_os_string();
    name.push(format!("_{suffix}.{}", format.extension()));
    prefix.with_file_name(name)
}

fn css(ctx: &mut Ctx, a: &CssArgs) -> Result<(), Failure> {
    let seed = ctx.seed(a.seed);
    let mut cfg = CssConfig::new(a.n, a.r1, a.r2, a.w, a.v, seed);
    cfg.max_isd_calls_per_step = a.max_isd_calls;
    let pair = run::css(&cfg).map_err(sampler_failure)?;
    print_warnings(&pair.warnings);
    let (p1, p2) = (with_suffix(&a.out, "h1", a.format), with_suffix(&a.out, "h2", a.format));
    let b1 = MatrixBundle {
        metadata: metadata("css-h1", &pair.h1, a.w, seed, &pair.per_step_isd_calls, &pair.per_step_span_rejections),
        matrix: pair.h1.clone(),
    };
    let b2 = MatrixBundle {
        metadata: metadata("css-h2", &pair.h2, a.v, seed, &[], &[]),
        matrix: pair.h2.clone(),
    };
    emit(ctx, &b1, Some(&p1), Some(a.format))?;
    emit(ctx, &b2, Some(&p2), Some(a.format))?;
    let check = verify::css_files(&p1, &p2, a.w, a.v)?;
    println!("sampled CSS pair: H1 {} x {}, H2 {} x {}, seed {seed}", a.r1, a.n, a.r2, a.n);
    println!("{}", step_summary(&pair.per_step_isd_calls, &pair.per_step_span_rejections));
    println!("H2 row redraws: {}", pair.h2_resamples);
    println!("elapsed: {:.3} s", pair.elapsed.unwrap_or_default().as_secs_f64());
    println!("{check}");
    println!("written: {} {}", p1.display(), p2.display());
    if !check.passed() {
        return Err(Failure::Validation("output failed verification".into()));
    }
    Ok(())
}

fn stab(ctx: &mut Ctx, a: &StabArgs) -> Result<(), Failure> {
    let seed = ctx.seed(a.seed);
    let mut cfg = StabilizerConfig::new(a.n, a.r, a.v, seed);
    cfg.max_isd_calls_per_step = a.max_isd_calls;
    let pair = run::stabilizer(&cfg).map_err(sampler_failure)?;
    let (px, pz) = (with_suffix(&a.out, "hx", a.format), with_suffix(&a.out, "hz", a.format));
    let bx = MatrixBundle {
        metadata: metadata("stabilizer-x", &pair.h_x, a.v, seed, &pair.per_step_isd_calls, &pair.per_step_span_rejections),
        matrix: pair.h_x.clone(),
    };
    let bz = MatrixBundle {
        metadata: metadata("stabilizer-z", &pair.h_z, a.v, seed, &pair.per_step_isd_calls, &pair.per_step_span_rejections),
        matrix: pair.h_z.clone(),
    };
    emit(ctx, &bx, Some(&px), Some(a.format))?;
    emit(ctx, &bz, Some(&pz), Some(a.format))?;
    let check = verify::stabilizer_files(&px, &pz, a.v)?;
    println!("sampled stabilizer pair: {} x {} each, combined row weight {}, seed {seed}", a.r, a.n, a.v);
    println!("{}", step_summary(&pair.per_step_isd_calls, &pair.per_step_span_rejections));
    println!("X weights: {:?}", pair.x_weights);
    println!("Z weights: {:?}", pair.z_weights);
    println!("elapsed: {:.3} s", pair.elapsed.unwrap_or_default().as_secs_f64());
    println!("{check}");
    println!("written: {} {}", px.display(), pz.display());
    if !check.passed() {
        return Err(Failure::Validation("output failed verification".into()));
    }
    Ok(())
}

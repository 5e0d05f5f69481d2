//! Timed sampler entry points. The core samplers have no clock, so wall time
//! is measured here.

use std::time::Instant;

use qldpc_core::sampler::{
    sample_css_pair, sample_dual_containing, sample_dual_containing_with, sample_stabilizer, CssConfig, CssPair,
    SampleResult, SamplerConfig, SamplerError, StabilizerConfig, StabilizerPair,
};

use crate::parallel::ParallelIsd;

/// Dual-containing sampling. `threads > 1` switches to the parallel ISD
/// backend, which gives up seed reproducibility.
pub fn sample(cfg: &SamplerConfig, threads: usize) -> Result<SampleResult, SamplerError> {
    let start = Instant::now();
    let mut res = if threads > 1 {
        sample_dual_containing_with(cfg, &mut ParallelIsd::new(threads, cfg.rng_seed))?
    } else {
        sample_dual_containing(cfg)?
    };
    res.elapsed = Some(start.elapsed());
    Ok(res)
}

pub fn css(cfg: &CssConfig) -> Result<CssPair, SamplerError> {
    let start = Instant::now();
    let mut res = sample_css_pair(cfg)?;
    res.elapsed = Some(start.elapsed());
    Ok(res)
}

pub fn stabilizer(cfg: &StabilizerConfig) -> Result<StabilizerPair, SamplerError> {
    let start = Instant::now();
    let mut res = sample_stabilizer(cfg)?;
    res.elapsed = Some(start.elapsed());
    Ok(res)
}

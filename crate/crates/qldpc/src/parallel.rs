//! Threaded Lee–Brickell backend: independent rounds raced across workers.
//!
//! Results are valid kernel vectors but depend on thread scheduling, so they
//! are not reproducible from the seed.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::thread;

use qldpc_core::isd::{check_search_args, lb_iteration, IsdBackend, IsdOutcome};
use qldpc_core::{seeded_rng, BitMatrix, Error};

#[derive(Clone, Debug)]
pub struct ParallelIsd {
    workers: usize,
    seed: u64,
    searches: u64,
}

impl ParallelIsd {
    pub fn new(workers: usize, seed: u64) -> Self {
        Self {
            workers: workers.max(1),
            seed,
            searches: 0,
        }
    }

    /// One worker per available core.
    pub fn with_available_parallelism(seed: u64) -> Self {
        Self::new(thread::available_parallelism().map_or(1, |n| n.get()), seed)
    }

    pub fn workers(&self) -> usize {
        self.workers
    }
}

impl IsdBackend for ParallelIsd {
    fn search(&mut self, h: &BitMatrix, w: usize, p: usize, max_iterations: usize) -> Result<IsdOutcome, Error> {
        check_search_args(h, w, p)?;
        let (search, seed) = (self.searches, self.seed);
        self.searches += 1;
        let workers = self.workers.min(max_iterations);
        let claimed = AtomicUsize::new(0);
        let stop = AtomicBool::new(false);

        let results: Vec<_> = thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|i| {
                    let (claimed, stop) = (&claimed, &stop);
                    s.spawn(move || {
                        let mut rng = seeded_rng(seed);
                        rng.set_stream((search << 16) | i as u64);
                        let (mut done, mut tested) = (0usize, 0u64);
                        while !stop.load(Ordering::Relaxed) && claimed.fetch_add(1, Ordering::Relaxed) < max_iterations {
                            done += 1;
                            let it = lb_iteration(h, w, p, &mut rng);
                            tested += it.candidates_tested;
                            if it.codeword.is_some() {
                                stop.store(true, Ordering::Relaxed);
                                return (it.codeword, done, tested);
                            }
                        }
                        (None, done, tested)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("ISD worker panicked")).collect()
        });

        let mut out = IsdOutcome {
            codeword: None,
            iterations_used: 0,
            candidates_tested: 0,
        };
        for (codeword, done, tested) in results {
            out.iterations_used += done;
            out.candidates_tested += tested;
            if out.codeword.is_none() {
                out.codeword = codeword;
            }
        }
        Ok(out)
    }
}

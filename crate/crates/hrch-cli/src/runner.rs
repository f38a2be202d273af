//! Thread-capped execution of independent sweep runs. Each run is
//! deterministic on its own and results are collected by index, so the
//! assembled output is identical to the sequential runner's.

use hrch_core::experiments::Runner;
use hrch_core::galerkin::{self, SimConfig, Trajectory};
use hrch_core::vch::{self, VchTrajectory};
use hrch_core::Result;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Reads the `HRCH_THREADS` cap; defaults to the machine parallelism.
pub fn thread_cap() -> usize {
    if let Ok(v) = std::env::var("HRCH_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Runs galerkin batches on up to `threads` worker threads.
pub struct ThreadedRunner {
    pub threads: usize,
}

impl ThreadedRunner {
    pub fn from_env() -> Self {
        ThreadedRunner { threads: thread_cap() }
    }
}

impl Runner for ThreadedRunner {
    fn run_galerkin(&self, cfgs: &[SimConfig]) -> Result<Vec<Trajectory>> {
        let workers = self.threads.min(cfgs.len()).max(1);
        if workers == 1 {
            return cfgs.iter().map(galerkin::solve).collect();
        }
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<Result<Trajectory>>>> =
            cfgs.iter().map(|_| Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= cfgs.len() {
                        break;
                    }
                    let out = galerkin::solve(&cfgs[i]);
                    *slots[i].lock().unwrap() = Some(out);
                });
            }
        });
        slots
            .into_iter()
            .map(|slot| slot.into_inner().unwrap().expect("worker filled every slot"))
            .collect()
    }

    fn run_vch(&self, cfg: &SimConfig) -> Result<VchTrajectory> {
        vch::vch_solve(cfg)
    }
}

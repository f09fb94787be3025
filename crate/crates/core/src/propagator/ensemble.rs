use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::propagator::stepper::Propagator;
use crate::propagator::vacuum::{sample_vacuum, TrajectorySeed};
use crate::propagator::state::FieldState;

/// Runs trajectories `range` in parallel and maps each exit field through `observe`.
/// Results are returned in trajectory order whatever the scheduling.
pub fn run_ensemble<R, F>(prop: &Propagator, master_seed: u64, range: std::ops::Range<u64>, observe: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(u64, FieldState) -> Result<R> + Sync,
{
    let n_env = prop.crystal().envelope_count();
    let out: Vec<(u64, Result<R>)> = range
        .into_par_iter()
        .map(|i| {
            let seed = TrajectorySeed::new(master_seed, i);
            let r = prop.propagate(sample_vacuum(prop.grid(), n_env, seed)).and_then(|s| observe(i, s));
            (i, r)
        })
        .collect();
    let mut ok = Vec::with_capacity(out.len());
    let mut failures = Vec::new();
    for (i, r) in out {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => failures.push(format!("trajectory {i}: {e}")),
        }
    }
    if failures.is_empty() {
        Ok(ok)
    } else {
        Err(Error::Numerical(format!("{} trajectories failed: {}", failures.len(), failures.join("; "))))
    }
}

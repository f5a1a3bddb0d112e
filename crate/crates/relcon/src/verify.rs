//! The Monte Carlo numerical oracle grounding every structural verdict:
//! sample weights (and perturbation fills where the model has them),
//! assemble, measure PBH margins, report the controllable fraction.

use serde::{Deserialize, Serialize};

use crate::design::sample_random_weights;
use crate::linalg::{pbh_controllable, RandomSource, TolerancePolicy};
use crate::model::{
    assemble_heterogeneous, assemble_lumped, assemble_perturbed, EdgeWeights, HeteroSubsystemList,
    LumpedSystem, Model, NetworkTopology, WeightAssignment,
};
use crate::{Error, Result};

/// Outcome of a randomized controllability sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub trials: usize,
    pub controllable_count: usize,
    pub min_margin: f64,
    pub max_margin: f64,
    /// Per-trial seed that produced the smallest margin.
    pub worst_seed: u64,
}

fn sweep<F>(
    trials: usize,
    tol: &TolerancePolicy,
    rng: &mut RandomSource,
    mut build: F,
) -> Result<MonteCarloReport>
where
    F: FnMut(&mut RandomSource) -> Result<LumpedSystem>,
{
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let mut controllable = 0usize;
    let mut min_margin = f64::INFINITY;
    let mut max_margin = f64::NEG_INFINITY;
    let mut worst_seed = 0u64;
    for _ in 0..trials {
        let trial_seed = rng.next_seed();
        let mut trial_rng = RandomSource::from_seed(trial_seed);
        let lumped = build(&mut trial_rng)?;
        let (ok, margin) = pbh_controllable(&lumped.a_sys, &lumped.b_sys, tol)?;
        if ok {
            controllable += 1;
        }
        if margin < min_margin {
            min_margin = margin;
            worst_seed = trial_seed;
        }
        max_margin = max_margin.max(margin);
    }
    Ok(MonteCarloReport {
        trials,
        controllable_count: controllable,
        min_margin,
        max_margin,
        worst_seed,
    })
}

/// Randomized controllability sweep over weight draws; models carrying
/// a structured perturbation also sample fresh per-vertex fills each
/// trial. Trials derive independent seeds from the master source, so a
/// report is reproducible from (model, trials, seed).
pub fn monte_carlo_controllability(
    model: &Model,
    trials: usize,
    tol: &TolerancePolicy,
    rng: &mut RandomSource,
) -> Result<MonteCarloReport> {
    sweep(trials, tol, rng, |trial_rng| {
        let w = sample_random_weights(
            &model.topo,
            model.fashion,
            model.sub.channel_count(),
            trial_rng,
        );
        match &model.hetero {
            None => assemble_lumped(&model.sub, &model.topo, model.fashion, &w),
            Some(h) => {
                let fills: Vec<_> = (0..model.topo.vertex_count())
                    .map(|_| h.sample_fill(trial_rng))
                    .collect();
                assemble_perturbed(&model.sub, &model.topo, &w, &fills)
            }
        }
    })
}

/// Randomized sweep for heterogeneous SISO subsystem lists.
pub fn monte_carlo_hetero_list(
    subs: &HeteroSubsystemList,
    topo: &NetworkTopology,
    trials: usize,
    tol: &TolerancePolicy,
    rng: &mut RandomSource,
) -> Result<MonteCarloReport> {
    sweep(trials, tol, rng, |trial_rng| {
        let w = sample_random_weights(topo, crate::model::Fashion::Siso, 1, trial_rng);
        let map: &EdgeWeights = w.channel(0, crate::model::Fashion::Siso);
        assemble_heterogeneous(subs, topo, map)
    })
}

/// Single-point evaluation at exact weights: assemble and run the PBH
/// verdict. Perturbed models must carry concrete per-vertex
/// realizations for this to be well defined.
pub fn controllability_at(
    model: &Model,
    weights: &WeightAssignment,
    tol: &TolerancePolicy,
) -> Result<(bool, f64)> {
    weights.check_fashion(model.fashion, model.sub.channel_count())?;
    let lumped = match &model.hetero {
        None => assemble_lumped(&model.sub, &model.topo, model.fashion, weights)?,
        Some(h) => {
            let fills = h.per_vertex.as_ref().ok_or_else(|| {
                Error::InvalidInput(
                    "single-point evaluation of a perturbed model needs per_vertex realizations"
                        .into(),
                )
            })?;
            assemble_perturbed(&model.sub, &model.topo, weights, fills)?
        }
    };
    pbh_controllable(&lumped.a_sys, &lumped.b_sys, tol)
}

//! Controllability is generic: a structurally controllable network is
//! controllable for almost every weight assignment, and a structurally
//! uncontrollable one for none. The Monte Carlo sweep makes this
//! concrete, and single-point evaluation pins exact weights.
//!
//! Run with: cargo run --example monte_carlo_oracle

use relcon::design::design_siso_weights;
use relcon::linalg::{RandomSource, TolerancePolicy};
use relcon::model::{example_model, ExampleName, Model, ModelDocument, WeightAssignment};
use relcon::verify::{controllability_at, monte_carlo_controllability};

fn main() -> relcon::Result<()> {
    let tol = TolerancePolicy::default();
    let (model, _) = example_model(ExampleName::Tanks, 5)?;

    let mut rng = RandomSource::from_seed(0);
    let mc = monte_carlo_controllability(&model, 50, &tol, &mut rng)?;
    println!(
        "tank chain, random weights: {}/{} controllable, margins [{:.3e}, {:.3e}]",
        mc.controllable_count, mc.trials, mc.min_margin, mc.max_margin
    );

    // Break reachability and the count collapses to zero.
    let mut doc = ModelDocument::from_model(&model);
    doc.edges = vec![(1, 2), (2, 3), (3, 4), (4, 5)];
    doc.drivers = vec![5];
    doc.weights = None;
    let broken: Model = doc.into_model()?;
    let mut rng = RandomSource::from_seed(0);
    let mc = monte_carlo_controllability(&broken, 50, &tol, &mut rng)?;
    println!(
        "directed chain driven at its sink: {}/{} controllable",
        mc.controllable_count, mc.trials
    );

    // Pinning exact weights: designed values pass, all-zero values
    // decouple the undriven tanks and fail.
    let mut rng = RandomSource::from_seed(1);
    let designed = design_siso_weights(&model.sub, &model.topo, &tol, &mut rng)?;
    let (ok, margin) =
        controllability_at(&model, &WeightAssignment::single(designed.weights), &tol)?;
    println!("designed weights: controllable={ok} margin={margin:.3e}");
    let (ok, _) = controllability_at(&model, &WeightAssignment::single(Default::default()), &tol)?;
    println!("all-zero weights: controllable={ok}");
    Ok(())
}

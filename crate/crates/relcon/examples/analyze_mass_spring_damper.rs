//! The mass-spring-damper chain has two interaction channels per link
//! (spring forces read positions, damper forces read velocities) with
//! independent weights. Its subsystem triple has no fixed mode under
//! diagonal feedback, so the network is structurally controllable from
//! any single mass.
//!
//! Run with: cargo run --example analyze_mass_spring_damper

use relcon::analysis::{check_mimo_multi, diag_fixed_modes};
use relcon::linalg::{RandomSource, TolerancePolicy};
use relcon::model::{example_model, ExampleName, NetworkTopology};

fn main() -> relcon::Result<()> {
    let tol = TolerancePolicy::default();
    let (model, reference) = example_model(ExampleName::Msd, 3)?;
    println!(
        "mass-spring-damper chain: N=3, n={}, r={} channels",
        model.sub.state_dim(),
        model.sub.channel_count()
    );
    println!(
        "reference weights at unit constants: {:?}",
        reference.channel(0, model.fashion)
    );

    let mut rng = RandomSource::from_seed(0);
    let fixed = diag_fixed_modes(&model.sub, &tol, &mut rng, 20)?;
    println!(
        "diagonal fixed modes: {}",
        if fixed.is_empty() {
            "none".to_string()
        } else {
            format!("{:?}", fixed.modes)
        }
    );

    for driver in 1..=3usize {
        let topo =
            NetworkTopology::new(model.topo.graph().clone(), [driver].into_iter().collect())?;
        let mut rng = RandomSource::from_seed(driver as u64);
        let report = check_mimo_multi(&model.sub, &topo, &tol, &mut rng)?;
        println!("driving mass {driver}: {}", report.verdict);
    }
    Ok(())
}

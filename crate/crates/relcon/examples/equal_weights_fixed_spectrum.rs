//! Equally weighted channels: the obstruction set is the scalar-line
//! fixed spectrum Ψ = ∩_l σ(A + l·BC). An empty Ψ reduces the whole
//! question to graph reachability; a surviving mode sends the checker
//! to a randomized generic-rank test of [λI − A_sys, B_sys] at that
//! mode.
//!
//! Run with: cargo run --example equal_weights_fixed_spectrum

use nalgebra::{dmatrix, DMatrix};
use num_complex::Complex;
use relcon::analysis::{check_mimo_equal, generic_rank_at_mode, scalar_fixed_spectrum};
use relcon::graph::DiGraph;
use relcon::linalg::{RandomSource, TolerancePolicy};
use relcon::model::{Fashion, NetworkTopology, SubsystemDynamics};

fn chain(n: usize, driver: usize) -> relcon::Result<NetworkTopology> {
    NetworkTopology::new(
        DiGraph::new(n, (1..n).map(|i| (i, i + 1)).collect())?,
        [driver].into_iter().collect(),
    )
}

fn main() -> relcon::Result<()> {
    let tol = TolerancePolicy::default();

    // Full coupling: det(λI − A − l·I) cannot vanish identically, so
    // Ψ is empty and reachability decides.
    let open = SubsystemDynamics::new(
        dmatrix![0.0, 1.0; 0.0, 0.0],
        DMatrix::identity(2, 2),
        DMatrix::identity(2, 2),
    )?;
    let psi = scalar_fixed_spectrum(&open, &tol)?;
    println!(
        "double integrator with identity coupling: Ψ modes = {:?}",
        psi.modes
    );
    let topo = chain(4, 1)?;
    let mut rng = RandomSource::from_seed(1);
    let report = check_mimo_equal(&open, &topo, &tol, &mut rng)?;
    println!("chain of 4 driven at 1: {}", report.verdict);

    // A mode outside the coupling's reach: σ(A + l·BC) = {1, 2+l}, so
    // Ψ = {1} no matter the weights.
    let stuck = SubsystemDynamics::new(
        dmatrix![1.0, 0.0; 0.0, 2.0],
        DMatrix::identity(2, 2),
        dmatrix![0.0, 0.0; 0.0, 1.0],
    )?;
    let psi = scalar_fixed_spectrum(&stuck, &tol)?;
    println!(
        "diagonal subsystem with partial coupling: Ψ modes = {:?}",
        psi.modes
    );
    let topo = chain(2, 1)?;
    let mut rng = RandomSource::from_seed(2);
    let rank = generic_rank_at_mode(
        &stuck,
        &topo,
        Fashion::EquallyWeighted,
        Complex::new(1.0, 0.0),
        &tol,
        &mut rng,
        5,
    )?;
    println!("generic rank of [1·I − A_sys, B_sys]: {rank} of {}", 2 * 2);
    let mut rng = RandomSource::from_seed(3);
    let report = check_mimo_equal(&stuck, &topo, &tol, &mut rng)?;
    println!(
        "verdict: {} (failed mode: {:?})",
        report.verdict, report.certificates.failed_mode
    );
    Ok(())
}

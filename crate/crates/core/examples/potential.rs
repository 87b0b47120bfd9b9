//! Potential curves at B = 4 and in the large-B limit, and the potential
//! threshold where the two minima swap.
//!
//! cargo run --release --example potential

use sscodes::effective_noise::{EffectiveNoiseContext, QuadratureSpec};
use sscodes::potential::{free_energy_gap, uniform_grid, PotentialCurve};
use sscodes::state_evolution::{SeOptions, SectionEnsemble};

fn main() -> sscodes::Result<()> {
    let ens = SectionEnsemble::one_hot(4, 50_000, 1)?;
    let grid = uniform_grid(11);
    for rate in [0.3, 0.36, 0.4] {
        let ctx = EffectiveNoiseContext::new("bsc:eps=0.1".parse()?, rate, QuadratureSpec::default())?;
        let finite = PotentialCurve::compute(&ctx, Some(&ens), &grid)?;
        let large = PotentialCurve::compute(&ctx, None, &grid)?;
        let gap = free_energy_gap(&ctx, &ens, SeOptions::default())?;
        println!("R = {rate}: gap {:.5}", gap.gap);
        for (e, (f, phi)) in grid.iter().zip(finite.values.iter().zip(&large.values)) {
            println!("  E={e:.1}  F_u={f:>9.5}  phi_u={phi:>9.5}");
        }
    }
    Ok(())
}

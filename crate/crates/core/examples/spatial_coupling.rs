//! Coupled state evolution: a decoding wave travels in from the seeded ends
//! at a rate where the underlying ensemble is stuck.
//!
//! cargo run --release --example spatial_coupling

use sscodes::coupled::{coupled_fixed_point, front_positions, saturate_profile, CouplingSpec, DesignFunction};
use sscodes::effective_noise::{EffectiveNoiseContext, QuadratureSpec};
use sscodes::state_evolution::{extreme_fixed_points, SeOptions, SectionEnsemble};

fn main() -> sscodes::Result<()> {
    let rate = 0.26;
    let ens = SectionEnsemble::one_hot(2, 0, 0)?;
    let ctx = EffectiveNoiseContext::new("bsc:eps=0.1".parse()?, rate, QuadratureSpec::default())?;
    let (e0, e1) = extreme_fixed_points(&ctx, &ens, SeOptions::default())?;
    println!("underlying: E_0 = {:.4}, stuck at {:.4}", e0.e, e1.e);

    let spec = CouplingSpec::new(64, 2, DesignFunction::Rectangular, rate)?;
    println!("{}", spec.to_json());
    let run = coupled_fixed_point(&spec, &ctx, &ens, SeOptions::default(), true)?;
    let fronts = front_positions(&run.trajectory, 0.5 * e1.e);
    for (t, f) in fronts.iter().enumerate().step_by(10) {
        println!("t={t:>4} front at {f:?}");
    }
    let max = run.profile.values.iter().copied().fold(0.0, f64::max);
    println!("converged after {} steps, max E_r = {max:.2e}", run.iterations);

    // above the potential threshold a plateau survives; saturate it
    let stuck = coupled_fixed_point(&spec.with_rate(0.3)?, &ctx.with_rate(0.3)?, &ens, SeOptions::default(), false)?;
    let sat = saturate_profile(&stuck.profile.values, 0.0)?;
    let every4: Vec<String> = sat.iter().step_by(4).map(|v| format!("{v:.3}")).collect();
    println!("R = 0.3 saturated profile, every 4th block: {every4:?}");
    Ok(())
}

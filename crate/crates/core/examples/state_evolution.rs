//! State evolution of the underlying ensemble and its GAMP threshold.
//!
//! cargo run --release --example state_evolution

use sscodes::effective_noise::{EffectiveNoiseContext, QuadratureSpec};
use sscodes::state_evolution::{extreme_fixed_points, threshold_gamp_u, SeOptions, SectionEnsemble, ThresholdOptions};

fn main() -> sscodes::Result<()> {
    let ens = SectionEnsemble::one_hot(2, 0, 0)?;
    let base = EffectiveNoiseContext::new("bsc:eps=0.1".parse()?, 0.2, QuadratureSpec::default())?;

    for rate in [0.2, 0.25, 0.3] {
        let ctx = base.with_rate(rate)?;
        let (lo, hi) = extreme_fixed_points(&ctx, &ens, SeOptions::default())?;
        println!("R = {rate}: from E=0 -> {:.6}, from E=1 -> {:.6} ({} steps)", lo.e, hi.e, hi.iterations);
    }

    let th = threshold_gamp_u(&base, &ens, (0.1, 0.531), &ThresholdOptions::default())?;
    println!("R_u(B=2) in [{:.4}, {:.4}]", th.rate, th.upper);
    Ok(())
}

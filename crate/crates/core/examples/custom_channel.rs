//! A user-defined channel: a 3-level quantizer behind AWGN, given as an
//! interval channel with its own transition matrix.
//!
//! cargo run --release --example custom_channel

use sscodes::channel::{ChannelModel, IntervalChannel};
use sscodes::effective_noise::{EffectiveNoiseContext, QuadratureSpec};
use sscodes::potential::{r_pot_infinity, r_u_infinity};
use sscodes::state_evolution::{threshold_gamp_u, SectionEnsemble, ThresholdOptions};

fn main() -> sscodes::Result<()> {
    // inputs -1, 0, +1 on three equiprobable intervals of z
    let w = vec![vec![0.85, 0.1, 0.05], vec![0.1, 0.8, 0.1], vec![0.05, 0.1, 0.85]];
    let ich = IntervalChannel::quantile(vec![-1.0, 0.0, 1.0], vec![-1.0, 0.0, 1.0], w)?;
    let ch = ChannelModel::discrete(ich);
    let ctx = EffectiveNoiseContext::new(ch.clone(), 0.3, QuadratureSpec::default())?;

    println!("I(pi(Z); Y) = {:.6}", ch.mutual_information()?);
    println!("R_pot^inf   = {:.6}", r_pot_infinity(&ctx)?);
    println!("R_u^inf     = {:.6}", r_u_infinity(&ctx)?);

    let ens = SectionEnsemble::one_hot(2, 0, 0)?;
    match threshold_gamp_u(&ctx, &ens, (0.1, 0.6), &ThresholdOptions::default()) {
        Ok(t) => println!("R_u(B=2)    = {:.4}", t.rate),
        Err(e) => println!("R_u(B=2): {e}"),
    }
    Ok(())
}

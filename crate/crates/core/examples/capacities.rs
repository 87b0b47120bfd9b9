//! Capacity and large-alphabet thresholds of the built-in channels.
//!
//! cargo run --release --example capacities

use sscodes::channel::ChannelModel;
use sscodes::effective_noise::{EffectiveNoiseContext, QuadratureSpec};
use sscodes::potential::{r_pot_infinity, r_u_infinity};

fn main() -> sscodes::Result<()> {
    println!("{:<22} {:>10} {:>10} {:>10}", "channel", "C", "R_pot^inf", "R_u^inf");
    for spec in ["awgn:snr=1", "awgn:snr=10", "bsc:eps=0.1", "bec:eps=0.5", "z:eps=0.1,p1=0.5", "z:eps=0.1,p1=opt"] {
        let ch: ChannelModel = spec.parse()?;
        let ctx = EffectiveNoiseContext::new(ch.clone(), 1.0, QuadratureSpec::default())?;
        println!(
            "{:<22} {:>10.6} {:>10.6} {:>10.6}",
            ch.to_string(),
            ch.capacity_closed_form()?,
            r_pot_infinity(&ctx)?,
            r_u_infinity(&ctx)?
        );
    }
    Ok(())
}

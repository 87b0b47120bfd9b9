//! Effective noise Σ(E) seen by the section denoiser, and the output score
//! used by the decoder.
//!
//! cargo run --release --example effective_noise -- bsc:eps=0.1 0.3

use sscodes::effective_noise::{EffectiveNoiseContext, QuadratureSpec};

fn main() -> sscodes::Result<()> {
    let mut args = std::env::args().skip(1);
    let channel = args.next().unwrap_or_else(|| "awgn:snr=10".into());
    let rate: f64 = args.next().map(|r| r.parse().expect("rate")).unwrap_or(0.5);
    let ctx = EffectiveNoiseContext::new(channel.parse()?, rate, QuadratureSpec::default())?;

    println!("{channel}, R = {rate}");
    println!("{:>6} {:>14} {:>14}", "E", "Sigma(E)^2", "mean Fisher");
    for i in 0..=10 {
        let e = i as f64 / 10.0;
        println!("{e:>6.2} {:>14.6e} {:>14.6e}", ctx.effective_noise_var(e)?, ctx.mean_fisher(e)?);
    }

    let (g, dg) = ctx.g_out(1.0, 0.2, 0.5)?;
    println!("g_out(y=1, p=0.2, v=0.5) = {g:.6}, derivative {dg:.6}");
    Ok(())
}

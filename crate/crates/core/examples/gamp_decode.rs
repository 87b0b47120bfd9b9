//! Encode, transmit and decode one codeword, next to the SE prediction.
//!
//! cargo run --release --example gamp_decode

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sscodes::codec::{encode, gamp_decode, sample_matrix, se_trajectory, transmit, CodeParams, GampOptions, Message};
use sscodes::effective_noise::{EffectiveNoiseContext, QuadratureSpec};
use sscodes::state_evolution::SectionEnsemble;

fn main() -> sscodes::Result<()> {
    let (l, b, rate) = (1024, 4, 0.8);
    let ctx = EffectiveNoiseContext::new("awgn:snr=100".parse()?, rate, QuadratureSpec::default())?;
    let ens = SectionEnsemble::one_hot(b, 100_000, 0)?;
    let params = CodeParams::new(l, b, rate)?;
    println!("L={l} B={b} N={} M={}", params.n(), params.m());

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let msg = Message::sample(l, b, &mut rng);
    let f = sample_matrix(params, None, &mut rng)?;
    let y = transmit(ctx.channel(), &encode(&f, &msg)?, &mut rng);

    let trace = gamp_decode(&f, &y, &ctx, &msg, GampOptions { t_max: 8, ..GampOptions::default() })?;
    let se = se_trajectory(&ctx, &ens, None, 8)?;
    println!("{:>3} {:>12} {:>12} {:>8}", "t", "MSE", "SE", "SER");
    for t in 0..trace.mse.len() {
        println!("{t:>3} {:>12.4e} {:>12.4e} {:>8.4}", trace.mse[t], se[t], trace.ser[t]);
    }
    Ok(())
}

//! Sparse superposition code instances and the GAMP decoder.
//!
//! The decoder keeps one variance per column block (a single block for the
//! underlying ensemble), matching the state evolution it is compared with.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelModel;
use crate::coupled::CouplingSpec;
use crate::effective_noise::{EffectiveNoiseContext, QuadratureSpec};
use crate::error::{Error, Result};
use crate::state_evolution::{argmax, softmax, SectionEnsemble};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeParams {
    pub l: usize,
    pub b: usize,
    pub rate: f64,
}

impl CodeParams {
    pub fn new(l: usize, b: usize, rate: f64) -> Result<Self> {
        if l == 0 || b < 2 || !(rate > 0.0) {
            return Err(Error::Domain(format!("invalid code parameters L={l}, B={b}, R={rate}")));
        }
        Ok(CodeParams { l, b, rate })
    }

    pub fn n(&self) -> usize {
        self.l * self.b
    }

    /// M = ⌈L log₂B / R⌉.
    pub fn m(&self) -> usize {
        (self.l as f64 * (self.b as f64).log2() / self.rate).ceil() as usize
    }

    /// α = log₂B/(B·R).
    pub fn alpha(&self) -> f64 {
        (self.b as f64).log2() / (self.b as f64 * self.rate)
    }

    /// L·log₂B/M.
    pub fn realized_rate(&self) -> f64 {
        self.l as f64 * (self.b as f64).log2() / self.m() as f64
    }
}

/// One position per section.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub b: usize,
    pub positions: Vec<usize>,
}

impl Message {
    pub fn new(b: usize, positions: Vec<usize>) -> Result<Self> {
        if b < 2 || positions.iter().any(|&p| p >= b) {
            return Err(Error::Domain(format!("message positions must lie in 0..{b}")));
        }
        Ok(Message { b, positions })
    }

    pub fn sample<R: Rng + ?Sized>(l: usize, b: usize, rng: &mut R) -> Self {
        Message { b, positions: (0..l).map(|_| rng.random_range(0..b)).collect() }
    }

    pub fn l(&self) -> usize {
        self.positions.len()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.l() * self.b];
        for (l, &k) in self.positions.iter().enumerate() {
            s[l * self.b + k] = 1.0;
        }
        s
    }
}

impl std::fmt::Display for Message {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .positions
            .iter()
            .map(|&k| (0..self.b).map(|i| if i == k { '1' } else { '0' }).collect())
            .collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Block geometry of a coupled matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockLayout {
    pub spec: CouplingSpec,
    pub rows_per_block: usize,
    pub sections_per_block: usize,
}

/// Dense row-major M×N coding matrix.
#[derive(Clone, Debug)]
pub struct CodingMatrix {
    pub params: CodeParams,
    m: usize,
    n: usize,
    data: Vec<f64>,
    pub layout: Option<BlockLayout>,
}

impl CodingMatrix {
    pub fn rows(&self) -> usize {
        self.m
    }
    pub fn cols(&self) -> usize {
        self.n
    }
    pub fn get(&self, mu: usize, i: usize) -> f64 {
        self.data[mu * self.n + i]
    }
    pub fn row(&self, mu: usize) -> &[f64] {
        &self.data[mu * self.n..(mu + 1) * self.n]
    }

    pub fn mul(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::Dimension(format!("matrix has {} columns, vector has {}", self.n, x.len())));
        }
        Ok((0..self.m).map(|mu| self.row(mu).iter().zip(x).map(|(a, b)| a * b).sum()).collect())
    }

    pub fn mul_transpose(&self, g: &[f64]) -> Result<Vec<f64>> {
        if g.len() != self.m {
            return Err(Error::Dimension(format!("matrix has {} rows, vector has {}", self.m, g.len())));
        }
        let mut out = vec![0.0; self.n];
        for (mu, &gm) in g.iter().enumerate() {
            if gm == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(mu)) {
                *o += gm * a;
            }
        }
        Ok(out)
    }

    /// Row block of row μ and column block of section l (0 for underlying).
    fn row_block(&self, mu: usize) -> usize {
        self.layout.as_ref().map_or(0, |b| mu / b.rows_per_block)
    }
    fn section_block(&self, l: usize) -> usize {
        self.layout.as_ref().map_or(0, |b| l / b.sections_per_block)
    }
    fn blocks(&self) -> usize {
        self.layout.as_ref().map_or(1, |b| b.spec.gamma())
    }
}

/// Underlying: i.i.d. N(0, 1/L). Coupled: block (r, c) entries N(0, J_{r,c}/L),
/// which requires Γ to divide both L and M.
pub fn sample_matrix<R: Rng + ?Sized>(params: CodeParams, coupling: Option<&CouplingSpec>, rng: &mut R) -> Result<CodingMatrix> {
    let (m, n, l) = (params.m(), params.n(), params.l);
    let layout = match coupling {
        None => None,
        Some(spec) => {
            let g = spec.gamma();
            if l % g != 0 || m % g != 0 {
                return Err(Error::Geometry(format!("Γ={g} must divide L={l} and M={m}")));
            }
            Some(BlockLayout { spec: spec.clone(), rows_per_block: m / g, sections_per_block: l / g })
        }
    };
    let mut data = vec![0.0; m * n];
    let base = 1.0 / (l as f64).sqrt();
    for mu in 0..m {
        for i in 0..n {
            let sd = match &layout {
                None => base,
                Some(b) => (b.spec.j(mu / b.rows_per_block, i / params.b / b.sections_per_block) / l as f64).sqrt(),
            };
            let z: f64 = rng.sample(StandardNormal);
            data[mu * n + i] = sd * z;
        }
    }
    Ok(CodingMatrix { params, m, n, data, layout })
}

/// Codeword F·s as a sum of the selected columns.
pub fn encode(f: &CodingMatrix, s: &Message) -> Result<Vec<f64>> {
    if s.b != f.params.b || s.l() * s.b != f.n {
        return Err(Error::Dimension(format!("message of {} sections × {} does not fit an M×{} matrix", s.l(), s.b, f.n)));
    }
    let cols: Vec<usize> = s.positions.iter().enumerate().map(|(l, &k)| l * s.b + k).collect();
    Ok((0..f.m)
        .map(|mu| {
            let row = f.row(mu);
            cols.iter().map(|&i| row[i]).sum()
        })
        .collect())
}

pub fn transmit<R: Rng + ?Sized>(ch: &ChannelModel, x: &[f64], rng: &mut R) -> Vec<f64> {
    x.iter().map(|&z| ch.sample_output(z, rng)).collect()
}

/// Fraction of sections whose hard decision misses the true position.
pub fn section_error_rate(hard: &[usize], truth: &Message) -> Result<f64> {
    if hard.len() != truth.l() {
        return Err(Error::Dimension(format!("{} decisions for {} sections", hard.len(), truth.l())));
    }
    if hard.is_empty() {
        return Ok(0.0);
    }
    let wrong = hard.iter().zip(&truth.positions).filter(|(a, b)| a != b).count();
    Ok(wrong as f64 / hard.len() as f64)
}

/// Per-section argmax, lowest index on ties.
pub fn harden(s_hat: &[f64], b: usize) -> Vec<usize> {
    s_hat.chunks(b).map(argmax).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GampOptions {
    pub t_max: usize,
    /// Include the Onsager term τ_p·g_prev in the output-side estimate.
    pub onsager: bool,
    /// Stop and flag when the empirical MSE exceeds this value.
    pub divergence: f64,
}

impl Default for GampOptions {
    fn default() -> Self {
        GampOptions { t_max: 25, onsager: true, divergence: 10.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GampTrace {
    /// Empirical MSE (1/L)Σ‖ŝ_l − s_l‖² for t = 0, 1, …
    pub mse: Vec<f64>,
    pub ser: Vec<f64>,
    /// Per-block input-side variance estimate at each t.
    pub variance: Vec<Vec<f64>>,
    pub s_hat: Vec<f64>,
    pub diverged: bool,
}

impl GampTrace {
    pub fn hard_decisions(&self, b: usize) -> Vec<usize> {
        harden(&self.s_hat, b)
    }
}

/// Vectorial GAMP with one variance per column block. For coupled matrices
/// the sections of known message blocks are held at their true values. The
/// true message is used only to fill in those sections and to record MSE and
/// SER.
pub fn gamp_decode(
    f: &CodingMatrix,
    y: &[f64],
    ctx: &EffectiveNoiseContext,
    truth: &Message,
    opts: GampOptions,
) -> Result<GampTrace> {
    let (m, n, b) = (f.m, f.n, f.params.b);
    let l = f.params.l;
    if y.len() != m {
        return Err(Error::Dimension(format!("{} observations for {m} rows", y.len())));
    }
    if truth.l() != l || truth.b != b {
        return Err(Error::Dimension("message does not match the code".into()));
    }
    let nb = f.blocks();
    let known: Vec<bool> = (0..l)
        .map(|sec| f.layout.as_ref().is_some_and(|lay| lay.spec.is_pinned_message(f.section_block(sec))))
        .collect();
    let s_true = truth.to_dense();
    let mut s_hat = vec![1.0 / b as f64; n];
    for sec in 0..l {
        if known[sec] {
            s_hat[sec * b..(sec + 1) * b].copy_from_slice(&s_true[sec * b..(sec + 1) * b]);
        }
    }
    let sections_per_block = l / nb;
    let mut free = vec![0usize; nb];
    for sec in (0..l).filter(|&s| !known[s]) {
        free[f.section_block(sec)] += 1;
    }
    let block_var = |s_hat: &[f64]| -> Vec<f64> {
        let mut v = vec![0.0; nb];
        for sec in 0..l {
            if known[sec] {
                continue;
            }
            let blk = f.section_block(sec);
            v[blk] += s_hat[sec * b..(sec + 1) * b].iter().map(|x| x * (1.0 - x)).sum::<f64>();
        }
        v.iter_mut().for_each(|x| *x /= sections_per_block as f64);
        v
    };
    let mse_of = |s_hat: &[f64]| s_hat.iter().zip(&s_true).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / l as f64;
    let ser_of = |s_hat: &[f64]| section_error_rate(&harden(s_hat, b), truth);

    let mut v = block_var(&s_hat);
    let mut trace = GampTrace {
        mse: vec![mse_of(&s_hat)],
        ser: vec![ser_of(&s_hat)?],
        variance: vec![v.clone()],
        s_hat: s_hat.clone(),
        diverged: false,
    };
    let mut g_prev = vec![0.0; m];
    let spec_band = |c: usize| match &f.layout {
        None => 0..1,
        Some(lay) => lay.spec.band(c),
    };
    // J_{r,c}/Γ weights; a single unit weight for the underlying ensemble
    let weight = |r: usize, c: usize| -> f64 {
        match &f.layout {
            None => 1.0,
            Some(lay) => lay.spec.j(r, c) / lay.spec.gamma() as f64,
        }
    };
    for _ in 0..opts.t_max {
        let tau_p: Vec<f64> = (0..nb).map(|r| (0..nb).map(|c| weight(r, c) * v[c]).sum::<f64>()).collect();
        let fs = f.mul(&s_hat)?;
        let mut g = vec![0.0; m];
        let mut neg_dg = vec![0.0; nb];
        for mu in 0..m {
            let r = f.row_block(mu);
            // rows that only see known sections carry nothing about the rest
            if tau_p[r] == 0.0 {
                continue;
            }
            let p = fs[mu] - if opts.onsager { tau_p[r] * g_prev[mu] } else { 0.0 };
            let (gv, dg) = ctx.g_out(y[mu], p, tau_p[r])?;
            g[mu] = gv;
            neg_dg[r] -= dg;
        }
        // τ_r for column block c: 1/Σ_r (J_{r,c}/L)Σ_{μ∈r}(−dg_μ)
        let tau_r: Vec<f64> = (0..nb)
            .map(|c| {
                // no free sections, or an estimate already collapsed onto a vertex
                if free[c] == 0 || spec_band(c).all(|r| tau_p[r] == 0.0) {
                    return Ok(f64::INFINITY);
                }
                let s: f64 = (0..nb).map(|r| weight(r, c) * nb as f64 * neg_dg[r]).sum::<f64>() / l as f64;
                if s > 0.0 {
                    Ok(1.0 / s)
                } else {
                    Err(Error::Numerical("output-side curvature is not positive".into()))
                }
            })
            .collect::<Result<_>>()?;
        let ft_g = f.mul_transpose(&g)?;
        for sec in 0..l {
            if known[sec] {
                continue;
            }
            let c = f.section_block(sec);
            let t = tau_r[c];
            if t.is_infinite() {
                continue;
            }
            let logits: Vec<f64> = (0..b).map(|k| (s_hat[sec * b + k] + t * ft_g[sec * b + k]) / t).collect();
            s_hat[sec * b..(sec + 1) * b].copy_from_slice(&softmax(&logits));
        }
        if s_hat.iter().any(|x| x.is_nan()) {
            return Err(Error::Numerical("GAMP estimate became NaN".into()));
        }
        v = block_var(&s_hat);
        g_prev = g;
        let mse = mse_of(&s_hat);
        trace.mse.push(mse);
        trace.ser.push(ser_of(&s_hat)?);
        trace.variance.push(v.clone());
        trace.s_hat = s_hat.clone();
        if mse > opts.divergence {
            trace.diverged = true;
            break;
        }
    }
    Ok(trace)
}

/// SE prediction of the decoder's per-iteration MSE: E^(0) = 1 − 1/B and
/// E^(t+1) = T_u(E^(t)) for the underlying ensemble; for coupled codes the
/// message-block recursion with known blocks at zero, averaged over blocks.
pub fn se_trajectory(
    ctx: &EffectiveNoiseContext,
    ens: &SectionEnsemble,
    coupling: Option<&CouplingSpec>,
    t_max: usize,
) -> Result<Vec<f64>> {
    let e_init = ens.prior().variance();
    match coupling {
        None => {
            let mut e = e_init;
            let mut out = vec![e];
            for _ in 0..t_max {
                e = crate::state_evolution::se_operator_u(ctx, ens, e)?.value;
                out.push(e);
            }
            Ok(out)
        }
        Some(spec) => {
            let g = spec.gamma();
            let mut msg: Vec<f64> = (0..g).map(|c| if spec.is_pinned_message(c) { 0.0 } else { e_init }).collect();
            let mut out = vec![msg.iter().sum::<f64>() / g as f64];
            for _ in 0..t_max {
                let lam: Vec<f64> = (0..g)
                    .map(|r| {
                        let e: f64 = spec.band(r).map(|c| spec.j(r, c) * msg[c]).sum::<f64>() / g as f64;
                        ctx.inv_effective_noise_var(e.clamp(0.0, 1.0))
                    })
                    .collect::<Result<_>>()?;
                for c in 0..g {
                    if spec.is_pinned_message(c) {
                        continue;
                    }
                    let s: f64 = spec.band(c).map(|r| spec.j(r, c) * lam[r]).filter(|t| *t > 0.0).sum::<f64>() / g as f64;
                    let sigma = if s == 0.0 { f64::INFINITY } else { (1.0 / s).sqrt() };
                    msg[c] = ens.mse(sigma)?.value;
                }
                out.push(msg.iter().sum::<f64>() / g as f64);
            }
            Ok(out)
        }
    }
}

/// GAMP-vs-SE experiment settings; serializable as JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeConfig {
    pub channel: String,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "B")]
    pub b: usize,
    #[serde(rename = "R")]
    pub rate: f64,
    #[serde(rename = "Gamma", default)]
    pub gamma: Option<usize>,
    #[serde(default)]
    pub w: Option<usize>,
    pub t_max: usize,
    pub seeds: Vec<u64>,
    #[serde(default = "default_true")]
    pub onsager: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeRow {
    pub seed: u64,
    pub t: usize,
    pub mse_empirical: f64,
    pub mse_se: f64,
    pub ser: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub rows: Vec<DecodeRow>,
    pub se: Vec<f64>,
    pub diverged_seeds: Vec<u64>,
}

impl DecodeReport {
    /// Mean and sample standard deviation of the empirical MSE across seeds
    /// at iteration t (seeds that stopped early are skipped).
    pub fn stats_at(&self, t: usize) -> (f64, f64, usize) {
        let v: Vec<f64> = self.rows.iter().filter(|r| r.t == t).map(|r| r.mse_empirical).collect();
        let n = v.len();
        if n == 0 {
            return (f64::NAN, f64::NAN, 0);
        }
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = if n > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        (mean, var.sqrt(), n)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,t,mse_empirical,mse_se,ser\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{:.16e},{:.16e},{:.16e}", r.seed, r.t, r.mse_empirical, r.mse_se, r.ser);
        }
        out
    }
}

/// Encodes, transmits and decodes one instance per seed and records the
/// decoder trajectory next to the SE prediction.
pub fn decode_experiment(cfg: &DecodeConfig, quad: QuadratureSpec, ens: &SectionEnsemble) -> Result<DecodeReport> {
    let ch: ChannelModel = cfg.channel.parse()?;
    let params = CodeParams::new(cfg.l, cfg.b, cfg.rate)?;
    if ens.b() != cfg.b {
        return Err(Error::Config(format!("ensemble has B={}, config has B={}", ens.b(), cfg.b)));
    }
    let ctx = EffectiveNoiseContext::new(ch.clone(), cfg.rate, quad)?;
    let coupling = match (cfg.gamma, cfg.w) {
        (Some(g), Some(w)) => Some(CouplingSpec::new(g, w, crate::coupled::DesignFunction::Rectangular, cfg.rate)?),
        (None, None) => None,
        _ => return Err(Error::Config("Gamma and w must be given together".into())),
    };
    let se = se_trajectory(&ctx, ens, coupling.as_ref(), cfg.t_max)?;
    let opts = GampOptions { t_max: cfg.t_max, onsager: cfg.onsager, ..GampOptions::default() };
    let mut rows = Vec::new();
    let mut diverged_seeds = Vec::new();
    for &seed in &cfg.seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let msg = Message::sample(cfg.l, cfg.b, &mut rng);
        let f = sample_matrix(params, coupling.as_ref(), &mut rng)?;
        let x = encode(&f, &msg)?;
        let y = transmit(&ch, &x, &mut rng);
        let trace = gamp_decode(&f, &y, &ctx, &msg, opts)?;
        if trace.diverged {
            diverged_seeds.push(seed);
        }
        for (t, (&mse, &ser)) in trace.mse.iter().zip(&trace.ser).enumerate() {
            rows.push(DecodeRow { seed, t, mse_empirical: mse, mse_se: se[t], ser });
        }
    }
    Ok(DecodeReport { rows, se, diverged_seeds })
}

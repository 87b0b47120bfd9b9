//! Section prior, MMSE denoiser and the scalar state evolution of the
//! underlying ensemble.
//!
//! The denoiser acts on y = s + z·Σ/√log₂B, i.e. an AWGN channel with
//! per-component variance σ² = Σ²/log₂B; we write γ = 1/σ² throughout.
//! Expectations over (s, z) are taken by Monte Carlo on a fixed bank of
//! Gaussian samples (common random numbers), or exactly for the one-hot prior
//! with B = 2, where they reduce to one-dimensional integrals.

use std::collections::HashMap;
use std::f64::consts::LN_2;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::effective_noise::EffectiveNoiseContext;
use crate::error::{Error, Result};
use crate::numerics::gauss::{self, log_sum_exp};
use crate::numerics::quad::{self, Tolerance};

#[derive(Clone, Debug, PartialEq)]
pub enum SectionPrior {
    /// Uniform over the B standard basis vectors.
    OneHot { b: usize },
    /// Finite-support prior over arbitrary B-vectors.
    Discrete { points: Vec<Vec<f64>>, weights: Vec<f64> },
}

impl SectionPrior {
    pub fn one_hot(b: usize) -> Result<Self> {
        if b < 2 {
            return Err(Error::Domain(format!("section size must be at least 2, got {b}")));
        }
        Ok(SectionPrior::OneHot { b })
    }

    pub fn discrete(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let b = points.first().map(|p| p.len()).unwrap_or(0);
        if b < 2 || points.iter().any(|p| p.len() != b) || weights.len() != points.len() {
            return Err(Error::Domain("discrete prior needs equal-length points (B ≥ 2) and one weight per point".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain("prior weights must be positive and sum to one".into()));
        }
        Ok(SectionPrior::Discrete { points, weights })
    }

    pub fn b(&self) -> usize {
        match self {
            SectionPrior::OneHot { b } => *b,
            SectionPrior::Discrete { points, .. } => points[0].len(),
        }
    }

    fn log2_b(&self) -> f64 {
        (self.b() as f64).log2()
    }

    pub fn mean(&self) -> Vec<f64> {
        match self {
            SectionPrior::OneHot { b } => vec![1.0 / *b as f64; *b],
            SectionPrior::Discrete { points, weights } => {
                let mut m = vec![0.0; self.b()];
                for (p, w) in points.iter().zip(weights) {
                    for (mi, pi) in m.iter_mut().zip(p) {
                        *mi += w * pi;
                    }
                }
                m
            }
        }
    }

    /// E‖s − E s‖²: the MSE of the prior-mean estimator.
    pub fn variance(&self) -> f64 {
        match self {
            SectionPrior::OneHot { b } => 1.0 - 1.0 / *b as f64,
            SectionPrior::Discrete { points, weights } => {
                let m = self.mean();
                points.iter().zip(weights).map(|(p, w)| w * p.iter().zip(&m).map(|(a, b)| (a - b).powi(2)).sum::<f64>()).sum()
            }
        }
    }

    /// Posterior mean given r = s + noise with per-component variance `var`.
    pub fn posterior_mean(&self, r: &[f64], var: f64) -> Vec<f64> {
        let b = self.b();
        if var.is_infinite() {
            return self.mean();
        }
        match self {
            SectionPrior::OneHot { .. } => {
                if var <= 0.0 {
                    let k = argmax(r);
                    let mut out = vec![0.0; b];
                    out[k] = 1.0;
                    return out;
                }
                let logits: Vec<f64> = r.iter().map(|&x| x / var).collect();
                softmax(&logits)
            }
            SectionPrior::Discrete { points, weights } => {
                let logits: Vec<f64> = points
                    .iter()
                    .zip(weights)
                    .map(|(p, w)| w.ln() - p.iter().zip(r).map(|(a, y)| (a - y).powi(2)).sum::<f64>() / (2.0 * var))
                    .collect();
                let post = if var <= 0.0 {
                    let mut v = vec![0.0; points.len()];
                    let k = points
                        .iter()
                        .map(|p| p.iter().zip(r).map(|(a, y)| (a - y).powi(2)).sum::<f64>())
                        .enumerate()
                        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                        .unwrap()
                        .0;
                    v[k] = 1.0;
                    v
                } else {
                    softmax(&logits)
                };
                let mut out = vec![0.0; b];
                for (p, q) in points.iter().zip(post) {
                    for (o, x) in out.iter_mut().zip(p) {
                        *o += q * x;
                    }
                }
                out
            }
        }
    }

    /// The MMSE denoiser g_in(s, z, Σ).
    pub fn denoise(&self, s: &[f64], z: &[f64], sigma: f64) -> Result<Vec<f64>> {
        let b = self.b();
        if s.len() != b || z.len() != b {
            return Err(Error::Dimension(format!("denoise expects B={b} vectors")));
        }
        if sigma.is_infinite() {
            return Ok(self.mean());
        }
        if !(sigma >= 0.0) {
            return Err(Error::Domain(format!("Σ must be nonnegative, got {sigma}")));
        }
        let scale = sigma / self.log2_b().sqrt();
        let r: Vec<f64> = s.iter().zip(z).map(|(a, n)| a + n * scale).collect();
        Ok(self.posterior_mean(&r, scale * scale))
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut k = 0;
    for i in 1..v.len() {
        if v[i] > v[k] {
            k = i;
        }
    }
    k
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|&l| (l - m).exp()).collect();
    let s: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= s);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, std_err: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Method {
    /// Seeded Monte Carlo with `samples` draws, shared across all Σ.
    MonteCarlo { samples: usize, seed: u64 },
    /// One-dimensional quadrature; one-hot prior with B = 2 only.
    Exact,
}

/// Denoiser statistics at one noise level.
#[derive(Clone, Copy, Debug)]
pub struct SectionStats {
    /// E Σᵢ(g_in,i − sᵢ)².
    pub mse: Estimate,
    /// The same quantity as E‖s‖² − E‖g_in‖².
    pub mse_alt: Estimate,
    /// The free-entropy term S_u, direct estimate.
    pub entropy: Estimate,
}

const CHUNK: usize = 4096;
const STORE_LIMIT: usize = 1 << 23;
const PANELS_PER_OCTAVE: f64 = 4.0;
const GAMMA_FIRST: f64 = 1e-3;
const GAMMA_MAX: f64 = 1e5;
const PANEL_ORDER: usize = 8;

/// Expectation engine over (s, z) for a given prior. Caches statistics per
/// noise level and I-MMSE panel integrals.
#[derive(Debug)]
pub struct SectionEnsemble {
    prior: SectionPrior,
    method: Method,
    bank: Option<Vec<f64>>,
    labels: Option<Vec<usize>>,
    stats: Mutex<HashMap<u64, SectionStats>>,
    panels: Mutex<Vec<f64>>,
}

impl Clone for SectionEnsemble {
    fn clone(&self) -> Self {
        SectionEnsemble {
            prior: self.prior.clone(),
            method: self.method,
            bank: self.bank.clone(),
            labels: self.labels.clone(),
            stats: Mutex::new(self.stats.lock().unwrap().clone()),
            panels: Mutex::new(self.panels.lock().unwrap().clone()),
        }
    }
}

impl SectionEnsemble {
    pub fn new(prior: SectionPrior, method: Method) -> Result<Self> {
        let b = prior.b();
        let (mut bank, mut labels) = (None, None);
        match method {
            Method::Exact => {
                if !matches!(prior, SectionPrior::OneHot { b: 2 }) {
                    return Err(Error::Unsupported("exact expectations exist for the one-hot prior with B = 2 only".into()));
                }
            }
            Method::MonteCarlo { samples, seed } => {
                if samples < 2 {
                    return Err(Error::Domain("Monte Carlo needs at least two samples".into()));
                }
                if samples * b <= STORE_LIMIT {
                    let mut z = vec![0.0; samples * b];
                    for (c, chunk) in z.chunks_mut(CHUNK * b).enumerate() {
                        fill_chunk(seed, c as u64, chunk);
                    }
                    bank = Some(z);
                }
                if let SectionPrior::Discrete { weights, .. } = &prior {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_1abe1);
                    let cdf: Vec<f64> = weights.iter().scan(0.0, |a, w| {
                        *a += w;
                        Some(*a)
                    }).collect();
                    labels = Some(
                        (0..samples)
                            .map(|_| {
                                let u: f64 = rng.random();
                                cdf.partition_point(|&c| c <= u).min(weights.len() - 1)
                            })
                            .collect(),
                    );
                }
            }
        }
        Ok(SectionEnsemble { prior, method, bank, labels, stats: Default::default(), panels: Default::default() })
    }

    /// One-hot prior with the default estimator: exact for B = 2, Monte Carlo
    /// otherwise.
    pub fn one_hot(b: usize, samples: usize, seed: u64) -> Result<Self> {
        let method = if b == 2 { Method::Exact } else { Method::MonteCarlo { samples, seed } };
        Self::new(SectionPrior::one_hot(b)?, method)
    }

    pub fn prior(&self) -> &SectionPrior {
        &self.prior
    }
    pub fn method(&self) -> Method {
        self.method
    }
    pub fn b(&self) -> usize {
        self.prior.b()
    }

    /// Denoiser statistics at noise Σ (not σ). Cached.
    pub fn stats(&self, sigma: f64) -> Result<SectionStats> {
        if sigma.is_nan() || sigma < 0.0 {
            return Err(Error::Domain(format!("Σ must be nonnegative, got {sigma}")));
        }
        let key = sigma.to_bits();
        if let Some(s) = self.stats.lock().unwrap().get(&key) {
            return Ok(*s);
        }
        let gamma = if sigma == 0.0 { f64::INFINITY } else { self.prior.log2_b() / (sigma * sigma) };
        let s = self.stats_at_gamma(gamma)?;
        let mut cache = self.stats.lock().unwrap();
        if cache.len() > 1_000_000 {
            cache.clear();
        }
        cache.insert(key, s);
        Ok(s)
    }

    pub fn mse(&self, sigma: f64) -> Result<Estimate> {
        Ok(self.stats(sigma)?.mse)
    }

    /// Statistics at effective SNR γ = log₂B/Σ².
    pub fn stats_at_gamma(&self, gamma: f64) -> Result<SectionStats> {
        let var = self.prior.variance();
        if gamma == 0.0 {
            let e = Estimate::exact(var);
            return Ok(SectionStats { mse: e, mse_alt: e, entropy: Estimate::exact(0.0) });
        }
        if gamma.is_infinite() {
            let h = self.prior_entropy_nats();
            let e = Estimate::exact(0.0);
            return Ok(SectionStats { mse: e, mse_alt: e, entropy: Estimate::exact(-h / (self.b() as f64).ln()) });
        }
        match self.method {
            Method::Exact => binary_exact(gamma),
            Method::MonteCarlo { samples, seed } => Ok(self.monte_carlo(gamma, samples, seed)),
        }
    }

    fn prior_entropy_nats(&self) -> f64 {
        match &self.prior {
            SectionPrior::OneHot { b } => (*b as f64).ln(),
            SectionPrior::Discrete { weights, .. } => -weights.iter().map(|w| w * w.ln()).sum::<f64>(),
        }
    }

    fn monte_carlo(&self, gamma: f64, samples: usize, seed: u64) -> SectionStats {
        let b = self.b();
        let mut acc = [[0.0f64; 2]; 3];
        let mut scratch = vec![0.0; CHUNK * b];
        let mut logits = vec![0.0; b.max(self.support_len())];
        let mut g = vec![0.0; b];
        let n_chunks = samples.div_ceil(CHUNK);
        for c in 0..n_chunks {
            let lo = c * CHUNK;
            let n = CHUNK.min(samples - lo);
            let z: &[f64] = match &self.bank {
                Some(bank) => &bank[lo * b..(lo + n) * b],
                None => {
                    fill_chunk(seed, c as u64, &mut scratch[..n * b]);
                    &scratch[..n * b]
                }
            };
            for i in 0..n {
                let zi = &z[i * b..(i + 1) * b];
                let (m, a, s) = match &self.prior {
                    SectionPrior::OneHot { .. } => one_hot_sample(gamma, zi, &mut logits[..b], &mut g),
                    SectionPrior::Discrete { points, weights } => {
                        let label = self.labels.as_ref().unwrap()[lo + i];
                        discrete_sample(gamma, points, weights, label, zi, &mut logits[..points.len()], &mut g)
                    }
                };
                for (k, v) in [m, a, s].into_iter().enumerate() {
                    acc[k][0] += v;
                    acc[k][1] += v * v;
                }
            }
        }
        let n = samples as f64;
        let est = |k: usize| {
            let mean = acc[k][0] / n;
            let var = (acc[k][1] / n - mean * mean).max(0.0) * n / (n - 1.0);
            Estimate { value: mean, std_err: (var / n).sqrt() }
        };
        let ln_b = (b as f64).ln();
        let s = est(2);
        SectionStats { mse: est(0), mse_alt: est(1), entropy: Estimate { value: s.value / ln_b, std_err: s.std_err / ln_b } }
    }

    fn support_len(&self) -> usize {
        match &self.prior {
            SectionPrior::OneHot { b } => *b,
            SectionPrior::Discrete { points, .. } => points.len(),
        }
    }

    /// S_u(Σ), direct estimate. Normalized so that S → −H(prior)/ln B as
    /// Σ → 0 and S → 0 as Σ → ∞.
    pub fn free_entropy(&self, sigma: f64) -> Result<Estimate> {
        Ok(self.stats(sigma)?.entropy)
    }

    /// S_u(Σ) through the I-MMSE relation
    /// S(γ) = −(1/(2 ln B)) ∫₀^γ mmse(γ') dγ', using the same MSE estimator as
    /// the SE operator. For Monte Carlo this makes the potential's stationary
    /// points coincide with the fixed points of the estimated T_u.
    pub fn free_entropy_immse(&self, sigma: f64) -> Result<f64> {
        if sigma.is_nan() || sigma < 0.0 {
            return Err(Error::Domain(format!("Σ must be nonnegative, got {sigma}")));
        }
        if matches!(self.method, Method::Exact) {
            return Ok(self.free_entropy(sigma)?.value);
        }
        let gamma = if sigma == 0.0 { f64::INFINITY } else { self.prior.log2_b() / (sigma * sigma) };
        let ln_b = (self.b() as f64).ln();
        Ok(-self.mmse_integral(gamma)? / (2.0 * ln_b))
    }

    fn panel_edge(k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            GAMMA_FIRST * 2f64.powf((k - 1) as f64 / PANELS_PER_OCTAVE)
        }
    }

    fn panel_integral(&self, a: f64, b: f64) -> Result<f64> {
        let mut s = 0.0;
        for (g, w) in quad::legendre(PANEL_ORDER, a, b) {
            s += w * self.stats_at_gamma(g)?.mse.value;
        }
        Ok(s)
    }

    /// ∫₀^γ mmse.
    fn mmse_integral(&self, gamma: f64) -> Result<f64> {
        let g = gamma.min(GAMMA_MAX);
        let mut panels = self.panels.lock().unwrap();
        let mut total = 0.0;
        let mut k = 0;
        loop {
            let (a, b) = (Self::panel_edge(k), Self::panel_edge(k + 1));
            if b > g {
                return Ok(total + self.panel_integral(a, g)?);
            }
            if panels.len() <= k {
                let v = self.panel_integral(a, b)?;
                panels.push(v);
            }
            total += panels[k];
            k += 1;
        }
    }
}

fn fill_chunk(seed: u64, chunk: u64, out: &mut [f64]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    for x in out.iter_mut() {
        *x = rng.sample(StandardNormal);
    }
}

/// One-hot prior, s = e₁. Returns (squared error, 1 − ‖g‖², lse(ℓ) − ℓ₁ − ln B).
fn one_hot_sample(gamma: f64, z: &[f64], logits: &mut [f64], g: &mut [f64]) -> (f64, f64, f64) {
    let b = z.len();
    let sg = gamma.sqrt();
    for k in 0..b {
        logits[k] = sg * z[k];
    }
    logits[0] += gamma;
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for k in 0..b {
        g[k] = (logits[k] - m).exp();
        sum += g[k];
    }
    let mut sq = 0.0;
    let mut norm = 0.0;
    for k in 0..b {
        g[k] /= sum;
        let d = if k == 0 { 1.0 - g[0] } else { g[k] };
        sq += d * d;
        norm += g[k] * g[k];
    }
    let lse = m + sum.ln();
    (sq, 1.0 - norm, lse - logits[0] - (b as f64).ln())
}

fn discrete_sample(
    gamma: f64,
    points: &[Vec<f64>],
    weights: &[f64],
    label: usize,
    z: &[f64],
    logits: &mut [f64],
    g: &mut [f64],
) -> (f64, f64, f64) {
    let s = &points[label];
    let sg = gamma.sqrt();
    // ln w_m − γ‖x_m − s‖²/2 + √γ z·(x_m − s)
    for (m, x) in points.iter().enumerate() {
        let mut d2 = 0.0;
        let mut dz = 0.0;
        for k in 0..s.len() {
            let d = x[k] - s[k];
            d2 += d * d;
            dz += z[k] * d;
        }
        logits[m] = weights[m].ln() - 0.5 * gamma * d2 + sg * dz;
    }
    let lse = log_sum_exp(logits);
    g.iter_mut().for_each(|v| *v = 0.0);
    for (m, x) in points.iter().enumerate() {
        let q = (logits[m] - lse).exp();
        for k in 0..s.len() {
            g[k] += q * x[k];
        }
    }
    let sq: f64 = g.iter().zip(s).map(|(a, b)| (a - b).powi(2)).sum();
    let s2: f64 = s.iter().map(|v| v * v).sum();
    let g2: f64 = g.iter().map(|v| v * v).sum();
    (sq, s2 - g2, lse)
}

/// B = 2 one-hot prior: with Δ = γ + √(2γ)x the posterior weight of the
/// wrong entry is σ(−Δ), so mse = 2E σ(−Δ)² and S = E log₂(1 + e^{−Δ}) − 1.
fn binary_exact(gamma: f64) -> Result<SectionStats> {
    let s2g = (2.0 * gamma).sqrt();
    let x0 = -gamma / s2g;
    let bp = [x0 - 4.0, x0 - 1.0, x0, x0 + 1.0, x0 + 4.0, 0.0, -8.0, 8.0];
    let tol = Tolerance { abs: 1e-15, rel: 1e-12, max_intervals: 4000 };
    let sig_neg = |x: f64| {
        let d = gamma + s2g * x;
        // σ(−d), stable for both signs
        if d >= 0.0 {
            let e = (-d).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + d.exp())
        }
    };
    let mse = quad::integrate(|x| gauss::pdf(x) * 2.0 * sig_neg(x).powi(2), f64::NEG_INFINITY, f64::INFINITY, &bp, tol)?.value;
    let softplus = |d: f64| if d > 0.0 { d + (-d).exp().ln_1p() } else { d.exp().ln_1p() };
    let ent = quad::integrate(
        |x| gauss::pdf(x) * softplus(-(gamma + s2g * x)) / LN_2,
        f64::NEG_INFINITY,
        f64::INFINITY,
        &bp,
        tol,
    )?
    .value
        - 1.0;
    let m = Estimate::exact(mse);
    Ok(SectionStats { mse: m, mse_alt: m, entropy: Estimate::exact(ent) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SeOptions {
    fn default() -> Self {
        SeOptions { tol: 1e-9, max_iter: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub e: f64,
    pub iterations: usize,
    pub converged: bool,
    /// E^(0), E^(1), … up to the returned value.
    pub history: Vec<f64>,
    /// Standard error of the last T_u evaluation.
    pub std_err: f64,
}

/// T_u(E) = mse(Σ(E)).
pub fn se_operator_u(ctx: &EffectiveNoiseContext, ens: &SectionEnsemble, e: f64) -> Result<Estimate> {
    let s2 = ctx.effective_noise_var(e)?;
    ens.mse(s2.sqrt())
}

pub fn se_fixed_point(
    ctx: &EffectiveNoiseContext,
    ens: &SectionEnsemble,
    e_init: f64,
    opts: SeOptions,
) -> Result<FixedPoint> {
    if !(0.0..=1.0).contains(&e_init) {
        return Err(Error::Domain(format!("initial E must lie in [0, 1], got {e_init}")));
    }
    let mut e = e_init;
    let mut history = vec![e];
    let mut std_err = 0.0;
    for it in 1..=opts.max_iter {
        let t = se_operator_u(ctx, ens, e)?;
        if !t.value.is_finite() {
            return Err(Error::Numerical(format!("T_u({e}) is not finite")));
        }
        std_err = t.std_err;
        let next = t.value.clamp(0.0, 1.0);
        history.push(next);
        let done = (next - e).abs() < opts.tol;
        e = next;
        if done {
            return Ok(FixedPoint { e, iterations: it, converged: true, history, std_err });
        }
    }
    Ok(FixedPoint { e, iterations: opts.max_iter, converged: false, history, std_err })
}

/// E_0 = T_u^∞(0).
pub fn mse_floor(ctx: &EffectiveNoiseContext, ens: &SectionEnsemble, opts: SeOptions) -> Result<FixedPoint> {
    se_fixed_point(ctx, ens, 0.0, opts)
}

/// Equality of two fixed-point values up to solver tolerance and MC noise.
pub fn same_fixed_point(a: &FixedPoint, b: &FixedPoint, opts: SeOptions) -> bool {
    let se = (a.std_err.powi(2) + b.std_err.powi(2)).sqrt();
    (a.e - b.e).abs() < (10.0 * opts.tol).max(5.0 * se)
}

/// Whether the SE started at `e` converges to the floor `e0`.
pub fn in_basin(ctx: &EffectiveNoiseContext, ens: &SectionEnsemble, e: f64, e0: &FixedPoint, opts: SeOptions) -> Result<bool> {
    let fp = se_fixed_point(ctx, ens, e, opts)?;
    Ok(same_fixed_point(&fp, e0, opts))
}

/// The two extreme fixed points at the context's rate, from E = 0 and E = 1.
pub fn extreme_fixed_points(
    ctx: &EffectiveNoiseContext,
    ens: &SectionEnsemble,
    opts: SeOptions,
) -> Result<(FixedPoint, FixedPoint)> {
    Ok((mse_floor(ctx, ens, opts)?, se_fixed_point(ctx, ens, 1.0, opts)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOptions {
    pub rate_tol: f64,
    pub se: SeOptions,
    /// Scan step, as a fraction of the bracket width, used when the upper
    /// end of the bracket does not fail the predicate.
    pub scan_fraction: f64,
    /// Upper limit of the scan, as a multiple of the bracket's upper end.
    pub scan_limit: f64,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions { rate_tol: 1e-4, se: SeOptions::default(), scan_fraction: 1.0 / 32.0, scan_limit: 4.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateThreshold {
    /// Largest rate found where the predicate holds.
    pub rate: f64,
    /// Smallest rate found where it fails; `upper − rate ≤ rate_tol`.
    pub upper: f64,
    pub evaluations: usize,
}

/// Generic rate search. The predicate holds at small rates and fails on a
/// window above the threshold. Above that window it can hold again (a single
/// bad fixed point is trivially "the floor"), so when `hi` passes the
/// predicate the search scans upward from `lo` in small steps for the first
/// failure before bisecting.
pub fn rate_search<F>(mut pred: F, lo: f64, hi: f64, opts: &ThresholdOptions) -> Result<RateThreshold>
where
    F: FnMut(f64) -> Result<bool>,
{
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Bracket(format!("invalid rate bracket [{lo}, {hi}]")));
    }
    let mut evals = 0;
    let mut lo = lo;
    while !pred(lo)? {
        evals += 1;
        lo *= 0.5;
        if lo < 1e-6 {
            return Err(Error::Bracket("predicate fails at every rate down to 1e-6".into()));
        }
    }
    evals += 1;
    let mut hi_found = None;
    if !pred(hi)? {
        hi_found = Some(hi);
    }
    evals += 1;
    let mut scan_lo = lo;
    if hi_found.is_none() {
        let step = (hi - lo) * opts.scan_fraction;
        let mut r = lo + step;
        while r <= hi * opts.scan_limit {
            evals += 1;
            if !pred(r)? {
                hi_found = Some(r);
                break;
            }
            scan_lo = r;
            r += step;
        }
    }
    let hi = hi_found.ok_or_else(|| {
        Error::Bracket(format!("no rate in [{lo}, {}] fails the predicate: no transition found", hi * opts.scan_limit))
    })?;
    let (a, b) = crate::numerics::solve::bisect_predicate(
        |r| {
            evals += 1;
            pred(r)
        },
        scan_lo,
        hi,
        opts.rate_tol,
    )?;
    Ok(RateThreshold { rate: a, upper: b, evaluations: evals })
}

/// GAMP threshold R_u: the first rate at which the SE from E = 1 no longer
/// reaches the floor E_0. `base` fixes the channel and numerics; its rate is
/// ignored.
pub fn threshold_gamp_u(
    base: &EffectiveNoiseContext,
    ens: &SectionEnsemble,
    bracket: (f64, f64),
    opts: &ThresholdOptions,
) -> Result<RateThreshold> {
    rate_search(
        |r| {
            let ctx = base.with_rate(r)?;
            let (e0, e1) = extreme_fixed_points(&ctx, ens, opts.se)?;
            Ok(same_fixed_point(&e0, &e1, opts.se))
        },
        bracket.0,
        bracket.1,
        opts,
    )
}

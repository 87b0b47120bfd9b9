//! Gaussian-smoothed kernel f(y|p,E) = ∫du P_out(y|u) N(u|p,E), its Fisher
//! information in p, the effective noise variance Σ(E)² and the GAMP output
//! score g_out.
//!
//! Three evaluation routes exist. AWGN uses the Gaussian convolution in
//! closed form. Interval channels (sign, bias and quantile maps) are sums of
//! Gaussian interval masses handled in log space. Everything else, and any
//! channel when [`NumericsPath::Generic`] is requested, goes through
//! quadrature in u and y.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelModel, IntervalChannel, OutputSupport, Repr};
use crate::error::{Error, Result};
use crate::numerics::gauss;
use crate::numerics::quad::{self, Hermite, Tolerance};

/// Smallest E used by the quadrature route, which differentiates under the
/// integral sign and loses precision as E → 0.
const GENERIC_MIN_E: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss–Hermite order for u-smoothing and z/p expectations of smooth
    /// kernels.
    pub gh_order: usize,
    /// Absolute tolerance of adaptive integrals (continuous y, and p for
    /// kernels with jumps).
    pub y_tol: f64,
    /// Gauss–Hermite order for the p-expectation of smooth kernels.
    pub p_order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { gh_order: 61, y_tol: 1e-10, p_order: 61 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NumericsPath {
    /// Closed forms where available.
    Auto,
    /// Quadrature for every channel.
    Generic,
}

/// ln f, ∂_p ln f and (∂²_p f)/f at one (y, p, E).
#[derive(Clone, Copy, Debug)]
pub struct Local {
    pub ln_f: f64,
    pub score: f64,
    pub curv: f64,
}

impl Local {
    pub fn f(&self) -> f64 {
        self.ln_f.exp()
    }
    pub fn df(&self) -> f64 {
        self.f() * self.score
    }
    pub fn d2f(&self) -> f64 {
        self.f() * self.curv
    }
}

type Cache = Arc<Mutex<HashMap<u64, f64>>>;

fn cached(cache: &Cache, key: f64, compute: impl FnOnce() -> Result<f64>) -> Result<f64> {
    let k = key.to_bits();
    if let Some(&v) = cache.lock().unwrap().get(&k) {
        return Ok(v);
    }
    let v = compute()?;
    let mut c = cache.lock().unwrap();
    if c.len() > 1_000_000 {
        c.clear();
    }
    c.insert(k, v);
    Ok(v)
}

#[derive(Clone, Debug)]
pub struct EffectiveNoiseContext {
    channel: ChannelModel,
    rate: f64,
    quad: QuadratureSpec,
    path: NumericsPath,
    gh_u: Arc<Hermite>,
    gh_p: Arc<Hermite>,
    fisher_cache: Cache,
    entropy_cache: Cache,
}

impl EffectiveNoiseContext {
    pub fn new(channel: ChannelModel, rate: f64, quad: QuadratureSpec) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::Domain(format!("rate must be positive, got {rate}")));
        }
        if !(quad.y_tol > 0.0) {
            return Err(Error::Domain("y_tol must be positive".into()));
        }
        Ok(EffectiveNoiseContext {
            channel,
            rate,
            quad,
            path: NumericsPath::Auto,
            gh_u: Arc::new(Hermite::new(quad.gh_order)?),
            gh_p: Arc::new(Hermite::new(quad.p_order)?),
            fisher_cache: Default::default(),
            entropy_cache: Default::default(),
        })
    }

    /// Same channel and numerics at another rate. The E-dependent caches are
    /// rate-free and therefore shared.
    pub fn with_rate(&self, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::Domain(format!("rate must be positive, got {rate}")));
        }
        Ok(EffectiveNoiseContext { rate, ..self.clone() })
    }

    pub fn with_path(&self, path: NumericsPath) -> Self {
        if path == self.path {
            return self.clone();
        }
        EffectiveNoiseContext { path, fisher_cache: Default::default(), entropy_cache: Default::default(), ..self.clone() }
    }

    pub fn channel(&self) -> &ChannelModel {
        &self.channel
    }
    pub fn rate(&self) -> f64 {
        self.rate
    }
    pub fn quad(&self) -> QuadratureSpec {
        self.quad
    }
    pub fn path(&self) -> NumericsPath {
        self.path
    }

    fn check_e(e: f64) -> Result<()> {
        if (0.0..=1.0).contains(&e) {
            Ok(())
        } else {
            Err(Error::Domain(format!("E must lie in [0, 1], got {e}")))
        }
    }

    fn route(&self) -> Route<'_> {
        match (self.path, self.channel.repr()) {
            (NumericsPath::Auto, Repr::Gaussian { noise_var }) => Route::Gaussian(*noise_var),
            (NumericsPath::Auto, Repr::Interval(ch)) => Route::Interval(ch),
            _ => Route::Quadrature,
        }
    }

    /// f, its score and curvature at (y, p, E).
    pub fn local(&self, y: f64, p: f64, e: f64) -> Result<Local> {
        if e < 0.0 || !e.is_finite() {
            return Err(Error::Domain(format!("smoothing variance must be nonnegative, got {e}")));
        }
        match self.route() {
            Route::Gaussian(s2) => {
                let v = e + s2;
                let d = y - p;
                let score = d / v;
                Ok(Local { ln_f: -0.5 * d * d / v - 0.5 * (2.0 * PI * v).ln(), score, curv: score * score - 1.0 / v })
            }
            Route::Interval(ch) => {
                let j = ch
                    .output_index(y)
                    .ok_or_else(|| Error::Domain(format!("output {y} is not in the alphabet of {}", self.channel)))?;
                Ok(interval_local(ch, j, p, e))
            }
            Route::Quadrature => self.quadrature_local(y, p, e),
        }
    }

    pub fn f_marginal(&self, y: f64, p: f64, e: f64) -> Result<f64> {
        if e == 0.0 {
            if e.is_sign_negative() {
                return Err(Error::Domain("smoothing variance must be nonnegative".into()));
            }
            return self.channel.kernel_eval(y, p);
        }
        Ok(self.local(y, p, e)?.f())
    }

    fn quadrature_local(&self, y: f64, p: f64, e: f64) -> Result<Local> {
        if let Repr::Kernel(k) = self.channel.repr() {
            if let Some([f, df, d2f]) = k.smoothed(y, p, e) {
                return Ok(Local { ln_f: f.ln(), score: df / f, curv: d2f / f });
            }
        }
        let e = e.max(GENERIC_MIN_E);
        let sd = e.sqrt();
        let bps = self.channel.z_breakpoints();
        let (m0, m1, m2) = if bps.is_empty() {
            let mut acc = (0.0, 0.0, 0.0);
            for &(x, w) in self.gh_u.nodes() {
                let v = w * self.channel.kernel_eval(y, p + sd * x)?;
                acc.0 += v;
                acc.1 += v * x;
                acc.2 += v * (x * x - 1.0);
            }
            acc
        } else {
            // u = p + √E x, x ~ N(0,1); jumps at (b − p)/√E.
            let mut bp: Vec<f64> = bps.iter().map(|b| (b - p) / sd).collect();
            bp.extend([-8.0, 0.0, 8.0]);
            let tol = Tolerance { abs: 1e-14, rel: 1e-12, max_intervals: 4000 };
            let moment = |k: i32| -> Result<f64> {
                let mut err = None;
                let r = quad::integrate(
                    |x| {
                        let pk = self.channel.kernel_eval(y, p + sd * x).unwrap_or_else(|e| {
                            err.get_or_insert(e);
                            0.0
                        });
                        let poly = match k {
                            0 => 1.0,
                            1 => x,
                            _ => x * x - 1.0,
                        };
                        gauss::pdf(x) * pk * poly
                    },
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    &bp,
                    tol,
                )?;
                match err {
                    Some(e) => Err(e),
                    None => Ok(r.value),
                }
            };
            (moment(0)?, moment(1)?, moment(2)?)
        };
        if m0 <= 0.0 {
            if m1 != 0.0 {
                return Err(Error::Singular(format!(
                    "smoothed kernel vanishes at y={y}, p={p}, E={e} while its derivative does not"
                )));
            }
            return Ok(Local { ln_f: f64::NEG_INFINITY, score: 0.0, curv: 0.0 });
        }
        Ok(Local { ln_f: m0.ln(), score: m1 / (sd * m0), curv: m2 / (e * m0) })
    }

    /// F(p|E) = ∫dy f (∂_p ln f)².
    pub fn fisher_info(&self, p: f64, e: f64) -> Result<f64> {
        Self::check_e(e)?;
        match self.route() {
            Route::Gaussian(s2) => Ok(1.0 / (e + s2)),
            Route::Interval(ch) => {
                if e == 0.0 {
                    return Ok(0.0);
                }
                Ok((0..ch.outputs.len()).map(|j| fisher_term(interval_local(ch, j, p, e))).sum())
            }
            Route::Quadrature => match self.channel.support() {
                OutputSupport::Discrete(ys) => {
                    let mut s = 0.0;
                    for y in ys {
                        s += fisher_term(self.local(y, p, e)?);
                    }
                    Ok(s)
                }
                OutputSupport::Continuous { scale } => {
                    let w = scale + e.max(GENERIC_MIN_E).sqrt();
                    self.y_integral(p, e, w, fisher_term)
                }
            },
        }
    }

    /// ∫dy g(local(y, p, E)) over ℝ for continuous outputs.
    fn y_integral(&self, p: f64, e: f64, width: f64, g: impl Fn(Local) -> f64) -> Result<f64> {
        let bp = [p - 8.0 * width, p - width, p, p + width, p + 8.0 * width];
        let tol = Tolerance { abs: self.quad.y_tol, rel: 1e-12, max_intervals: 4000 };
        let mut err = None;
        let r = quad::integrate(
            |y| match self.local(y, p, e) {
                Ok(l) => g(l),
                Err(x) => {
                    err.get_or_insert(x);
                    0.0
                }
            },
            f64::NEG_INFINITY,
            f64::INFINITY,
            &bp,
            tol,
        )?;
        match err {
            Some(x) => Err(x),
            None => Ok(r.value),
        }
    }

    /// E_{p~N(0,1−E)}[F(p|E)], cached on E.
    pub fn mean_fisher(&self, e: f64) -> Result<f64> {
        Self::check_e(e)?;
        cached(&self.fisher_cache, e, || self.mean_fisher_uncached(e))
    }

    fn mean_fisher_uncached(&self, e: f64) -> Result<f64> {
        if e == 1.0 {
            return self.fisher_info(0.0, 1.0);
        }
        match self.route() {
            Route::Gaussian(s2) => Ok(1.0 / (e + s2)),
            Route::Interval(ch) => {
                // Below 1e-200 the smoothing is numerically a step and the
                // limit value is exact for every downstream use.
                if e < 1e-200 {
                    // A jump between distinct transition rows carries
                    // unbounded information in the noiseless-smoothing limit.
                    let informative = (1..ch.inputs.len()).any(|k| ch.w[k] != ch.w[k - 1]);
                    return Ok(if informative { f64::INFINITY } else { 0.0 });
                }
                self.p_expectation(e, &ch.cuts, |p| self.fisher_info(p, e))
            }
            Route::Quadrature => {
                let bps = self.channel.z_breakpoints();
                self.p_expectation(e, &bps, |p| self.fisher_info(p, e))
            }
        }
    }

    /// E_{p~N(0,1−E)} g(p): adaptive around jumps, Gauss–Hermite otherwise.
    fn p_expectation(&self, e: f64, jumps: &[f64], g: impl Fn(f64) -> Result<f64>) -> Result<f64> {
        let var = 1.0 - e;
        if jumps.is_empty() {
            let mut err = None;
            let v = self.gh_p.expect(0.0, var, |p| {
                g(p).unwrap_or_else(|x| {
                    err.get_or_insert(x);
                    0.0
                })
            });
            return match err {
                Some(x) => Err(x),
                None => Ok(v),
            };
        }
        let sd = var.sqrt();
        let w = e.sqrt();
        let mut bp = vec![0.0];
        for &c in jumps {
            for k in [-32.0, -8.0, -2.0, 0.0, 2.0, 8.0, 32.0] {
                bp.push(c + k * w);
            }
        }
        let mut err = None;
        let tol = Tolerance { abs: 1e-13, rel: 1e-11, max_intervals: 4000 };
        let r = quad::integrate(
            |p| {
                let dens = gauss::pdf(p / sd) / sd;
                if dens == 0.0 {
                    return 0.0;
                }
                match g(p) {
                    Ok(v) => dens * v,
                    Err(x) => {
                        err.get_or_insert(x);
                        0.0
                    }
                }
            },
            f64::NEG_INFINITY,
            f64::INFINITY,
            &bp,
            tol,
        )?;
        match err {
            Some(x) => Err(x),
            None => Ok(r.value),
        }
    }

    /// Σ(E)⁻² = E_p[F(p|E)]/R.
    pub fn inv_effective_noise_var(&self, e: f64) -> Result<f64> {
        Ok(self.mean_fisher(e)? / self.rate)
    }

    /// Σ(E)². Returns +∞ when the channel carries no Fisher information and 0
    /// when it carries unbounded information.
    pub fn effective_noise_var(&self, e: f64) -> Result<f64> {
        let inv = self.inv_effective_noise_var(e)?;
        Ok(if inv == 0.0 { f64::INFINITY } else { 1.0 / inv })
    }

    /// GAMP output score g_out = ∂_p ln f(y|p,v) and its p-derivative.
    pub fn g_out(&self, y: f64, p: f64, v: f64) -> Result<(f64, f64)> {
        if !(v > 0.0) {
            return Err(Error::Domain(format!("g_out needs a positive variance, got {v}")));
        }
        let l = self.local(y, p, v)?;
        if l.ln_f == f64::NEG_INFINITY || !l.score.is_finite() {
            return Err(Error::Singular(format!("smoothed kernel vanishes at y={y}, p={p}, v={v}")));
        }
        Ok((l.score, l.curv - l.score * l.score))
    }

    /// Largest |∂_p g_out| over outputs and a p-grid on [−p_max, p_max]: an
    /// empirical Lipschitz constant of the score.
    pub fn g_out_lipschitz(&self, v: f64, p_max: f64, points: usize) -> Result<f64> {
        let ys: Vec<f64> = match self.channel.support() {
            OutputSupport::Discrete(ys) => ys,
            OutputSupport::Continuous { scale } => {
                let s = (1.0 + scale * scale).sqrt();
                (0..=40).map(|i| -4.0 * s + 8.0 * s * i as f64 / 40.0).collect()
            }
        };
        let mut best: f64 = 0.0;
        for i in 0..points {
            let p = -p_max + 2.0 * p_max * i as f64 / (points.max(2) - 1) as f64;
            for &y in &ys {
                if let Ok((_, dg)) = self.g_out(y, p, v) {
                    best = best.max(dg.abs());
                }
            }
        }
        Ok(best)
    }

    /// E_z[∫dy φ log₂ φ] with φ(y|z,E) = f(y|z√(1−E), E): minus the conditional
    /// entropy H(Y|Z) of the smoothed channel, in bits. Cached on E.
    pub fn neg_output_entropy(&self, e: f64) -> Result<f64> {
        Self::check_e(e)?;
        cached(&self.entropy_cache, e, || self.neg_output_entropy_uncached(e))
    }

    fn neg_output_entropy_uncached(&self, e: f64) -> Result<f64> {
        match self.route() {
            Route::Gaussian(s2) => Ok(-0.5 * (2.0 * PI * std::f64::consts::E * (e + s2)).log2()),
            Route::Interval(ch) => {
                let h = |p: f64| -> Result<f64> {
                    if e == 0.0 {
                        let row = &ch.w[ch.interval_of(p)];
                        return Ok(row.iter().map(|&x| gauss::xlog2x(x)).sum());
                    }
                    Ok((0..ch.outputs.len()).map(|j| plogp(interval_local(ch, j, p, e))).sum())
                };
                if e == 1.0 {
                    return h(0.0);
                }
                self.p_expectation(e, &ch.cuts, h)
            }
            Route::Quadrature => {
                let support = self.channel.support();
                let h = |p: f64| -> Result<f64> {
                    match &support {
                        OutputSupport::Discrete(ys) => {
                            let mut s = 0.0;
                            for &y in ys {
                                s += if e == 0.0 { gauss::xlog2x(self.channel.kernel_eval(y, p)?) } else { plogp(self.local(y, p, e)?) };
                            }
                            Ok(s)
                        }
                        OutputSupport::Continuous { scale } => {
                            let w = scale + e.sqrt();
                            if e == 0.0 {
                                let bp = [p - 8.0 * w, p - w, p, p + w, p + 8.0 * w];
                                let tol = Tolerance { abs: self.quad.y_tol, rel: 1e-12, max_intervals: 4000 };
                                let r = quad::integrate(
                                    |y| self.channel.kernel_eval(y, p).map(gauss::xlog2x).unwrap_or(0.0),
                                    f64::NEG_INFINITY,
                                    f64::INFINITY,
                                    &bp,
                                    tol,
                                )?;
                                return Ok(r.value);
                            }
                            self.y_integral(p, e, w, plogp)
                        }
                    }
                };
                if e == 1.0 {
                    return h(0.0);
                }
                let bps = self.channel.z_breakpoints();
                self.p_expectation(e, &bps, h)
            }
        }
    }
}

enum Route<'a> {
    Gaussian(f64),
    Interval(&'a IntervalChannel),
    Quadrature,
}

fn fisher_term(l: Local) -> f64 {
    if l.ln_f == f64::NEG_INFINITY {
        0.0
    } else {
        l.f() * l.score * l.score
    }
}

fn plogp(l: Local) -> f64 {
    if l.ln_f == f64::NEG_INFINITY {
        0.0
    } else {
        l.f() * l.ln_f / LN_2
    }
}

/// Closed form for an interval channel at output index j. Every term is
/// scaled by the largest W·mass before exponentiation.
fn interval_local(ch: &IntervalChannel, j: usize, p: f64, e: f64) -> Local {
    if e == 0.0 {
        let w = ch.w[ch.interval_of(p)][j];
        return Local { ln_f: w.ln(), score: 0.0, curv: 0.0 };
    }
    let sd = e.sqrt();
    let q = ch.inputs.len();
    let mut ln_terms = [f64::NEG_INFINITY; 16];
    let mut buf;
    let ln_t: &mut [f64] = if q <= 16 {
        &mut ln_terms[..q]
    } else {
        buf = vec![f64::NEG_INFINITY; q];
        &mut buf
    };
    let mut shift = f64::NEG_INFINITY;
    for k in 0..q {
        let wk = ch.w[k][j];
        if wk > 0.0 {
            let (lo, hi) = ch.bounds(k);
            ln_t[k] = wk.ln() + gauss::ln_mass((lo - p) / sd, (hi - p) / sd);
            shift = shift.max(ln_t[k]);
        }
    }
    if shift == f64::NEG_INFINITY {
        return Local { ln_f: f64::NEG_INFINITY, score: 0.0, curv: 0.0 };
    }
    let (mut f, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for k in 0..q {
        let wk = ch.w[k][j];
        if wk == 0.0 {
            continue;
        }
        f += (ln_t[k] - shift).exp();
        let (lo, hi) = ch.bounds(k);
        let lw = wk.ln() - shift;
        // Lower end: +φ(l)/√E and +l·φ(l)/E; upper end with opposite sign.
        if lo.is_finite() {
            let l = (lo - p) / sd;
            let a = (lw + gauss::ln_pdf(l)).exp();
            d1 += a;
            d2 += l * a;
        }
        if hi.is_finite() {
            let h = (hi - p) / sd;
            let a = (lw + gauss::ln_pdf(h)).exp();
            d1 -= a;
            d2 -= h * a;
        }
    }
    Local { ln_f: shift + f.ln(), score: d1 / (sd * f), curv: d2 / (e * f) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx(spec: &str, rate: f64) -> EffectiveNoiseContext {
        EffectiveNoiseContext::new(spec.parse().unwrap(), rate, QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn smoothed_kernel_values() {
        let a = ctx("awgn:snr=10", 1.0);
        assert_relative_eq!(a.f_marginal(0.3, 0.3, 0.4).unwrap(), 0.564_189_583_547_756_3, max_relative = 1e-12);
        let g = a.with_path(NumericsPath::Generic);
        assert_relative_eq!(g.f_marginal(0.3, 0.3, 0.4).unwrap(), 0.564_189_583_547_756_3, max_relative = 1e-9);

        let b = ctx("bsc:eps=0.1", 1.0);
        assert_relative_eq!(b.f_marginal(1.0, 0.0, 1.0).unwrap(), 0.5, max_relative = 1e-14);
        let closed = 0.8 * gauss::cdf(0.7 / 0.3f64.sqrt()) + 0.1;
        assert_relative_eq!(b.f_marginal(1.0, 0.7, 0.3).unwrap(), closed, max_relative = 1e-12);
        let bg = b.with_path(NumericsPath::Generic);
        assert!((bg.f_marginal(1.0, 0.7, 0.3).unwrap() - closed).abs() < 1e-10);
        assert_eq!(b.f_marginal(1.0, -0.2, 0.0).unwrap(), 0.1);
        assert!(matches!(b.f_marginal(1.0, 0.0, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn fisher_information_values() {
        let a = ctx("awgn:snr=10", 1.0);
        assert_relative_eq!(a.fisher_info(0.2, 0.5).unwrap(), 1.0 / 0.6, max_relative = 1e-14);
        let b = ctx("bsc:eps=0.1", 0.2);
        let f01 = 2.0 * 0.64 / PI;
        assert_relative_eq!(b.fisher_info(0.0, 1.0).unwrap(), f01, max_relative = 1e-12);
        assert_relative_eq!(b.effective_noise_var(1.0).unwrap(), 0.2 / f01, max_relative = 1e-12);
        assert!((b.effective_noise_var(1.0).unwrap() - 0.490_87).abs() < 1e-5);
        assert_relative_eq!(a.effective_noise_var(0.5).unwrap(), 0.6, max_relative = 1e-12);
        assert_eq!(b.effective_noise_var(0.0).unwrap(), 0.0);
        assert_eq!(ctx("bec:eps=1", 1.0).effective_noise_var(0.3).unwrap(), f64::INFINITY);
    }

    #[test]
    fn generic_route_agrees_with_closed_forms() {
        for spec in ["awgn:snr=10", "bsc:eps=0.1", "bec:eps=0.5", "z:eps=0.1,p1=0.6"] {
            let c = ctx(spec, 1.0);
            let g = c.with_path(NumericsPath::Generic);
            for &(p, e) in &[(0.0, 1.0), (0.4, 0.5), (-1.2, 0.1), (0.05, 0.01)] {
                let a = c.fisher_info(p, e).unwrap();
                let b = g.fisher_info(p, e).unwrap();
                assert!((a - b).abs() < 1e-7 * a.max(1.0), "{spec} p={p} E={e}: {a} vs {b}");
            }
            for &e in &[0.2, 0.7, 1.0] {
                let a = c.mean_fisher(e).unwrap();
                let b = g.mean_fisher(e).unwrap();
                assert!((a - b).abs() < 1e-7 * a.max(1.0), "{spec} E={e}: {a} vs {b}");
                let a = c.neg_output_entropy(e).unwrap();
                let b = g.neg_output_entropy(e).unwrap();
                assert!((a - b).abs() < 1e-8, "{spec} E={e}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn output_scores() {
        let a = ctx("awgn:snr=10", 1.0);
        assert_relative_eq!(a.g_out(1.0, 0.0, 0.4).unwrap().0, 2.0, max_relative = 1e-14);
        let b = ctx("bsc:eps=0.1", 1.0);
        let (g, dg) = b.g_out(1.0, 0.3, 0.5).unwrap();
        let h = 1e-5;
        let lnf = |p: f64| b.f_marginal(1.0, p, 0.5).unwrap().ln();
        assert!((g - (lnf(0.3 + h) - lnf(0.3 - h)) / (2.0 * h)).abs() < 1e-6);
        let gp = |p: f64| b.g_out(1.0, p, 0.5).unwrap().0;
        assert!((dg - (gp(0.3 + h) - gp(0.3 - h)) / (2.0 * h)).abs() < 1e-6);
        assert!(matches!(b.g_out(1.0, 0.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn score_identities() {
        for spec in ["bsc:eps=0.1", "bec:eps=0.5", "z:eps=0.1", "z:eps=0.2,p1=0.3"] {
            let c = ctx(spec, 1.0);
            let ys = match c.channel().support() {
                OutputSupport::Discrete(ys) => ys,
                _ => unreachable!(),
            };
            for &(p, v) in &[(0.0, 1.0), (0.8, 0.2), (-2.0, 0.05)] {
                let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
                for &y in &ys {
                    let f = c.f_marginal(y, p, v).unwrap();
                    if f == 0.0 {
                        continue;
                    }
                    let (g, dg) = c.g_out(y, p, v).unwrap();
                    m0 += f * g;
                    m1 += f * g * g;
                    m2 -= f * dg;
                }
                let fi = c.fisher_info(p, v).unwrap();
                assert!(m0.abs() < 1e-8, "{spec}");
                assert!((m1 - fi).abs() < 1e-6 && (m2 - fi).abs() < 1e-6, "{spec}: {m1} {m2} {fi}");
            }
        }
        // continuous output: integrate over y
        let a = ctx("awgn:snr=10", 1.0);
        let r = quad::integrate(|y| a.f_marginal(y, 0.3, 0.5).unwrap() * a.g_out(y, 0.3, 0.5).unwrap().0, f64::NEG_INFINITY, f64::INFINITY, &[0.3], Tolerance::default()).unwrap();
        assert!(r.value.abs() < 1e-8);
    }

    #[test]
    fn effective_noise_is_monotone_in_e() {
        for spec in ["awgn:snr=10", "bsc:eps=0.1", "bec:eps=0.5", "z:eps=0.1"] {
            let c = ctx(spec, 0.5);
            let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
            let s: Vec<f64> = grid.iter().map(|&e| c.effective_noise_var(e).unwrap()).collect();
            for w in s.windows(2) {
                assert!(w[0] >= 0.0 && w[1] > w[0] - 1e-10, "{spec}: {s:?}");
            }
        }
    }

    #[test]
    fn hermite_order_doubling() {
        let q = QuadratureSpec::default();
        let doubled = QuadratureSpec { gh_order: 2 * q.gh_order, p_order: 2 * q.p_order, ..q };
        let ch: ChannelModel = "awgn:snr=10".parse().unwrap();
        let a = EffectiveNoiseContext::new(ch.clone(), 1.0, q).unwrap().with_path(NumericsPath::Generic);
        let b = EffectiveNoiseContext::new(ch, 1.0, doubled).unwrap().with_path(NumericsPath::Generic);
        for &e in &[0.0, 0.3, 1.0] {
            let (x, y) = (a.inv_effective_noise_var(e).unwrap(), b.inv_effective_noise_var(e).unwrap());
            assert!((x - y).abs() < 1e-6, "E={e}: {x} vs {y}");
        }
    }

    #[test]
    fn awgn_entropy_term_closed_form() {
        let a = ctx("awgn:snr=10", 1.0).with_path(NumericsPath::Generic);
        let closed = -0.5 * (2.0 * PI * std::f64::consts::E * 0.6).log2();
        assert!((a.neg_output_entropy(0.5).unwrap() - closed).abs() < 1e-8);
    }
}

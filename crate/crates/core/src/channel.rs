//! Effective memoryless channels P_out(y|z) = W(y|π(z)).
//!
//! Discrete-output channels whose map π is piecewise constant in z are held as
//! an [`IntervalChannel`]: a list of thresholds on the real line, the input
//! symbol attached to each interval, and the exact transition matrix W.
//! Everything downstream (smoothing, Fisher information, entropies) is then a
//! finite sum of Gaussian interval masses.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::gauss::{self, h2, xlog2x};
use crate::numerics::quad::{self, Tolerance};

/// The BEC erasure symbol.
pub const ERASURE: f64 = 0.0;

/// Output alphabet descriptor.
#[derive(Clone, Debug, PartialEq)]
pub enum OutputSupport {
    Discrete(Vec<f64>),
    /// Density on ℝ; `scale` is a typical spread used to place integration
    /// breakpoints around the centre of mass.
    Continuous { scale: f64 },
}

/// A user-supplied effective kernel.
pub trait Kernel: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    /// P_out(y|z): a pmf value or a density.
    fn eval(&self, y: f64, z: f64) -> f64;
    fn support(&self) -> OutputSupport;
    /// The input map π.
    fn map(&self, z: f64) -> f64 {
        z
    }
    /// Values of z at which P_out(y|·) jumps.
    fn z_breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
    /// Analytic (f, ∂_p f, ∂²_p f) of the Gaussian-smoothed kernel, if known.
    fn smoothed(&self, _y: f64, _p: f64, _e: f64) -> Option<[f64; 3]> {
        None
    }
    fn sample(&self, z: f64, rng: &mut dyn RngCore) -> f64;
}

/// Discrete-input, discrete-output channel behind a piecewise-constant map.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalChannel {
    /// Increasing interior thresholds; interval k is (cuts[k-1], cuts[k]].
    pub cuts: Vec<f64>,
    /// Input symbol of each interval (cuts.len() + 1 entries).
    pub inputs: Vec<f64>,
    pub outputs: Vec<f64>,
    /// w[k][j] = W(outputs[j] | inputs[k]).
    pub w: Vec<Vec<f64>>,
}

impl IntervalChannel {
    pub fn new(cuts: Vec<f64>, inputs: Vec<f64>, outputs: Vec<f64>, w: Vec<Vec<f64>>) -> Result<Self> {
        if inputs.len() != cuts.len() + 1 || w.len() != inputs.len() {
            return Err(Error::Domain("interval channel needs one input symbol and one W row per interval".into()));
        }
        if cuts.windows(2).any(|c| !(c[0] < c[1])) {
            return Err(Error::Domain("interval thresholds must be strictly increasing".into()));
        }
        for row in &w {
            if row.len() != outputs.len() || row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::Domain("transition rows must be probability vectors over the outputs".into()));
            }
            if (row.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::Domain("transition rows must sum to one".into()));
            }
        }
        Ok(IntervalChannel { cuts, inputs, outputs, w })
    }

    /// q-ary channel whose map sends the Gaussian q-quantile intervals to the
    /// inputs, so π(Z) is uniform.
    pub fn quantile(inputs: Vec<f64>, outputs: Vec<f64>, w: Vec<Vec<f64>>) -> Result<Self> {
        let q = inputs.len();
        if q < 2 {
            return Err(Error::Domain("need at least two inputs".into()));
        }
        let cuts = (1..q).map(|i| -gauss::q_inv(i as f64 / q as f64)).collect();
        Self::new(cuts, inputs, outputs, w)
    }

    pub fn interval_of(&self, z: f64) -> usize {
        self.cuts.partition_point(|&c| c < z)
    }

    /// Interval bounds (lo, hi) of input k.
    pub fn bounds(&self, k: usize) -> (f64, f64) {
        let lo = if k == 0 { f64::NEG_INFINITY } else { self.cuts[k - 1] };
        let hi = if k == self.cuts.len() { f64::INFINITY } else { self.cuts[k] };
        (lo, hi)
    }

    pub fn output_index(&self, y: f64) -> Option<usize> {
        self.outputs.iter().position(|&o| (o - y).abs() <= 1e-12)
    }

    /// Induced input law P(a) under z ~ N(0,1).
    pub fn input_probabilities(&self) -> Vec<f64> {
        (0..self.inputs.len())
            .map(|k| {
                let (lo, hi) = self.bounds(k);
                gauss::mass(lo, hi)
            })
            .collect()
    }

    /// I(A;Y) in bits under the map-induced input law, by finite sums.
    pub fn mutual_information(&self) -> f64 {
        let pa = self.input_probabilities();
        let mut hy = 0.0;
        for j in 0..self.outputs.len() {
            let py: f64 = pa.iter().zip(&self.w).map(|(p, row)| p * row[j]).sum();
            hy -= xlog2x(py);
        }
        let hya: f64 = pa.iter().zip(&self.w).map(|(p, row)| -p * row.iter().map(|&x| xlog2x(x)).sum::<f64>()).sum();
        hy - hya
    }
}

#[derive(Clone, Debug)]
pub enum Custom {
    Discrete(Arc<IntervalChannel>),
    Kernel(Arc<dyn Kernel>),
}

#[derive(Clone, Debug)]
pub enum ChannelKind {
    Awgn { snr: f64 },
    Bsc { eps: f64 },
    Bec { eps: f64 },
    Z { eps: f64, p1: f64 },
    Custom(Custom),
}

/// Internal evaluation strategy.
#[derive(Clone, Debug)]
pub(crate) enum Repr {
    Gaussian { noise_var: f64 },
    Interval(Arc<IntervalChannel>),
    Kernel(Arc<dyn Kernel>),
}

#[derive(Clone, Debug)]
pub struct ChannelModel {
    kind: ChannelKind,
    repr: Repr,
}

fn sign_channel(outputs: Vec<f64>, w_minus: Vec<f64>, w_plus: Vec<f64>, threshold: f64) -> Arc<IntervalChannel> {
    Arc::new(IntervalChannel { cuts: vec![threshold], inputs: vec![-1.0, 1.0], outputs, w: vec![w_minus, w_plus] })
}

impl ChannelModel {
    pub fn awgn(snr: f64) -> Result<Self> {
        if !(snr > 0.0 && snr.is_finite()) {
            return Err(Error::Domain(format!("AWGN snr must be positive and finite, got {snr}")));
        }
        Ok(ChannelModel { kind: ChannelKind::Awgn { snr }, repr: Repr::Gaussian { noise_var: 1.0 / snr } })
    }

    pub fn bsc(eps: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&eps) {
            return Err(Error::Domain(format!("BSC flip probability must lie in [0, 1/2), got {eps}")));
        }
        let ch = sign_channel(vec![-1.0, 1.0], vec![1.0 - eps, eps], vec![eps, 1.0 - eps], 0.0);
        Ok(ChannelModel { kind: ChannelKind::Bsc { eps }, repr: Repr::Interval(ch) })
    }

    pub fn bec(eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::Domain(format!("BEC erasure probability must lie in [0, 1], got {eps}")));
        }
        let ch = sign_channel(vec![-1.0, ERASURE, 1.0], vec![1.0 - eps, eps, 0.0], vec![0.0, eps, 1.0 - eps], 0.0);
        Ok(ChannelModel { kind: ChannelKind::Bec { eps }, repr: Repr::Interval(ch) })
    }

    /// Z channel flipping the −1 input with probability `eps`; the map sends
    /// z to +1 with probability `p1`.
    pub fn z(eps: f64, p1: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::Domain(format!("Z-channel flip probability must lie in [0, 1), got {eps}")));
        }
        if !(p1 > 0.0 && p1 < 1.0) {
            return Err(Error::Domain(format!("Z-channel bias p1 must lie in (0, 1), got {p1}")));
        }
        let t = if p1 == 0.5 { 0.0 } else { gauss::q_inv(p1) };
        let ch = sign_channel(vec![-1.0, 1.0], vec![1.0 - eps, eps], vec![0.0, 1.0], t);
        Ok(ChannelModel { kind: ChannelKind::Z { eps, p1 }, repr: Repr::Interval(ch) })
    }

    /// Z channel at the capacity-achieving bias.
    pub fn z_optimal(eps: f64) -> Result<Self> {
        Self::z(eps, z_optimal_p1(eps))
    }

    pub fn discrete(ch: IntervalChannel) -> Self {
        let ch = Arc::new(ch);
        ChannelModel { kind: ChannelKind::Custom(Custom::Discrete(ch.clone())), repr: Repr::Interval(ch) }
    }

    pub fn custom(kernel: Arc<dyn Kernel>) -> Self {
        ChannelModel { kind: ChannelKind::Custom(Custom::Kernel(kernel.clone())), repr: Repr::Kernel(kernel) }
    }

    pub fn kind(&self) -> &ChannelKind {
        &self.kind
    }

    pub(crate) fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn support(&self) -> OutputSupport {
        match &self.repr {
            Repr::Gaussian { noise_var } => OutputSupport::Continuous { scale: noise_var.sqrt() },
            Repr::Interval(ch) => OutputSupport::Discrete(ch.outputs.clone()),
            Repr::Kernel(k) => k.support(),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.support(), OutputSupport::Discrete(_))
    }

    /// The interval representation, when the channel has one.
    pub fn interval_channel(&self) -> Option<&IntervalChannel> {
        match &self.repr {
            Repr::Interval(ch) => Some(ch),
            _ => None,
        }
    }

    /// Points in z where the effective kernel is discontinuous.
    pub fn z_breakpoints(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Gaussian { .. } => Vec::new(),
            Repr::Interval(ch) => ch.cuts.clone(),
            Repr::Kernel(k) => k.z_breakpoints(),
        }
    }

    pub fn map_pi(&self, z: f64) -> f64 {
        match &self.repr {
            Repr::Gaussian { .. } => z,
            Repr::Interval(ch) => ch.inputs[ch.interval_of(z)],
            Repr::Kernel(k) => k.map(z),
        }
    }

    pub fn kernel_eval(&self, y: f64, z: f64) -> Result<f64> {
        match &self.repr {
            Repr::Gaussian { noise_var } => Ok(gauss::normal_pdf(y, z, *noise_var)),
            Repr::Interval(ch) => {
                let j = ch.output_index(y).ok_or_else(|| Error::Domain(format!("output {y} is not in the alphabet of {self}")))?;
                Ok(ch.w[ch.interval_of(z)][j])
            }
            Repr::Kernel(k) => {
                if let OutputSupport::Discrete(ys) = k.support() {
                    if !ys.iter().any(|&o| (o - y).abs() <= 1e-12) {
                        return Err(Error::Domain(format!("output {y} is not in the alphabet of {}", k.name())));
                    }
                }
                Ok(k.eval(y, z))
            }
        }
    }

    pub fn sample_output<R: Rng + ?Sized>(&self, z: f64, rng: &mut R) -> f64 {
        match &self.repr {
            Repr::Gaussian { noise_var } => {
                let n: f64 = rng.sample(StandardNormal);
                z + noise_var.sqrt() * n
            }
            Repr::Interval(ch) => {
                let row = &ch.w[ch.interval_of(z)];
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (j, &p) in row.iter().enumerate() {
                    acc += p;
                    if u < acc && p > 0.0 {
                        return ch.outputs[j];
                    }
                }
                // Round-off fallback: the last symbol with positive mass.
                let j = row.iter().rposition(|&p| p > 0.0).unwrap_or(0);
                ch.outputs[j]
            }
            Repr::Kernel(k) => {
                let mut adapter = RngAdapter(rng);
                k.sample(z, &mut adapter)
            }
        }
    }

    pub fn capacity_closed_form(&self) -> Result<f64> {
        match self.kind {
            ChannelKind::Awgn { snr } => Ok(0.5 * snr.ln_1p() / std::f64::consts::LN_2),
            ChannelKind::Bsc { eps } => Ok(1.0 - h2(eps)),
            ChannelKind::Bec { eps } => Ok(1.0 - eps),
            ChannelKind::Z { eps, p1 } => Ok(z_mutual_information(eps, p1)),
            ChannelKind::Custom(_) => Err(Error::Unsupported("no closed-form capacity for custom channels".into())),
        }
    }

    /// Large-alphabet GAMP threshold R_u^∞ in closed form.
    pub fn gamp_threshold_closed_form(&self) -> Result<f64> {
        let pi_ln2 = std::f64::consts::PI * std::f64::consts::LN_2;
        match self.kind {
            ChannelKind::Awgn { snr } => Ok(1.0 / (2.0 * std::f64::consts::LN_2 * (1.0 + 1.0 / snr))),
            ChannelKind::Bsc { eps } => Ok((1.0 - 2.0 * eps).powi(2) / pi_ln2),
            ChannelKind::Bec { eps } => Ok((1.0 - eps) / pi_ln2),
            ChannelKind::Z { eps, p1 } => {
                if p1 == 0.5 {
                    return Ok((1.0 - eps) / (pi_ln2 * (1.0 + eps)));
                }
                // F(0|1) for the biased map: two outputs, one threshold.
                let t = gauss::q_inv(p1);
                let d = (1.0 - eps) * gauss::pdf(t);
                let fisher = d * d * (1.0 / (eps + (1.0 - eps) * p1) + 1.0 / ((1.0 - eps) * (1.0 - p1)));
                Ok(fisher / (2.0 * std::f64::consts::LN_2))
            }
            ChannelKind::Custom(_) => Err(Error::Unsupported("no closed-form GAMP threshold for custom channels".into())),
        }
    }

    /// I(π(Z); Y) with Z ~ N(0,1), evaluated directly from the kernel:
    /// finite sums for interval channels, nested adaptive quadrature otherwise.
    pub fn mutual_information(&self) -> Result<f64> {
        match &self.repr {
            Repr::Interval(ch) => Ok(ch.mutual_information()),
            _ => self.mutual_information_quadrature(),
        }
    }

    fn mutual_information_quadrature(&self) -> Result<f64> {
        let tol = Tolerance { abs: 1e-12, rel: 1e-12, max_intervals: 4000 };
        let zb = self.z_breakpoints();
        let z_law = |z: f64| gauss::pdf(z);
        let support = self.support();
        // Entropy of y given z, in bits.
        let cond = |z: f64| -> Result<f64> {
            match &support {
                OutputSupport::Discrete(ys) => {
                    let mut h = 0.0;
                    for &y in ys {
                        h -= xlog2x(self.kernel_eval(y, z)?);
                    }
                    Ok(h)
                }
                OutputSupport::Continuous { scale } => {
                    let bp = [z - 8.0 * scale, z, z + 8.0 * scale];
                    let r = quad::integrate(|y| -xlog2x(self.kernel_eval(y, z).unwrap_or(0.0)), f64::NEG_INFINITY, f64::INFINITY, &bp, tol)?;
                    Ok(r.value)
                }
            }
        };
        let mut err = None;
        let h_cond = quad::integrate(
            |z| match cond(z) {
                Ok(h) => z_law(z) * h,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            f64::NEG_INFINITY,
            f64::INFINITY,
            &zb,
            tol,
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        let marginal = |y: f64| -> f64 {
            quad::integrate(|z| z_law(z) * self.kernel_eval(y, z).unwrap_or(0.0), f64::NEG_INFINITY, f64::INFINITY, &zb, tol)
                .map(|r| r.value)
                .unwrap_or(f64::NAN)
        };
        let h_y = match &support {
            OutputSupport::Discrete(ys) => ys.iter().map(|&y| -xlog2x(marginal(y))).sum::<f64>(),
            OutputSupport::Continuous { scale } => {
                let spread = (1.0 + scale * scale).sqrt();
                let bp = [-8.0 * spread, 0.0, 8.0 * spread];
                quad::integrate(|y| -xlog2x(marginal(y)), f64::NEG_INFINITY, f64::INFINITY, &bp, Tolerance { abs: 1e-10, ..tol })?.value
            }
        };
        if !h_y.is_finite() {
            return Err(Error::Quadrature("output marginal could not be evaluated".into()));
        }
        Ok(h_y - h_cond.value)
    }
}

struct RngAdapter<'a, R: Rng + ?Sized>(&'a mut R);

impl<R: Rng + ?Sized> RngCore for RngAdapter<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// I(A;Y) of the Z channel when P(A = +1) = p1.
pub fn z_mutual_information(eps: f64, p1: f64) -> f64 {
    h2((1.0 - p1) * (1.0 - eps)) - (1.0 - p1) * h2(eps)
}

/// Capacity-achieving P(A = +1) of the Z channel, closed form.
pub fn z_optimal_p1(eps: f64) -> f64 {
    if eps == 0.0 {
        return 0.5;
    }
    let k = (h2(eps) / (1.0 - eps)).exp2();
    1.0 - 1.0 / ((1.0 - eps) * (1.0 + k))
}

/// Capacity-achieving bias by golden-section maximization of I(A;Y).
pub fn z_optimal_p1_numeric(eps: f64) -> f64 {
    crate::numerics::solve::golden_min::<_, ()>(|p| Ok(-z_mutual_information(eps, p)), 1e-9, 1.0 - 1e-9, 1e-12)
        .map(|(p, _)| p)
        .unwrap_or(f64::NAN)
}

impl fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ChannelKind::Awgn { snr } => write!(f, "awgn:snr={snr}"),
            ChannelKind::Bsc { eps } => write!(f, "bsc:eps={eps}"),
            ChannelKind::Bec { eps } => write!(f, "bec:eps={eps}"),
            ChannelKind::Z { eps, p1 } => write!(f, "z:eps={eps},p1={p1}"),
            ChannelKind::Custom(Custom::Discrete(ch)) => write!(f, "discrete:q={}", ch.inputs.len()),
            ChannelKind::Custom(Custom::Kernel(k)) => write!(f, "custom:{}", k.name()),
        }
    }
}

impl FromStr for ChannelModel {
    type Err = Error;

    /// Parses `awgn:snr=10`, `bsc:eps=0.1`, `bec:eps=0.5`, `z:eps=0.1,p1=0.5437`.
    /// For the Z channel `p1` defaults to 1/2 and `p1=opt` selects the
    /// capacity-achieving bias.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = Vec::new();
        for kv in rest.split(',').filter(|kv| !kv.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in channel spec, got '{kv}'")))?;
            params.push((k.trim().to_ascii_lowercase(), v.trim().to_string()));
        }
        let take = |key: &str| params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let num = |key: &str| -> Result<f64> {
            let v = take(key).ok_or_else(|| Error::Config(format!("channel '{name}' needs parameter '{key}'")))?;
            v.parse::<f64>().map_err(|_| Error::Config(format!("parameter {key}='{v}' is not a number")))
        };
        let allow = |keys: &[&str]| -> Result<()> {
            match params.iter().find(|(k, _)| !keys.contains(&k.as_str())) {
                Some((k, _)) => Err(Error::Config(format!("unknown parameter '{k}' for channel '{name}'"))),
                None => Ok(()),
            }
        };
        let as_config = |e: Error| match e {
            Error::Domain(m) => Error::Config(m),
            other => other,
        };
        match name.to_ascii_lowercase().as_str() {
            "awgn" => {
                allow(&["snr"])?;
                ChannelModel::awgn(num("snr")?).map_err(as_config)
            }
            "bsc" => {
                allow(&["eps"])?;
                ChannelModel::bsc(num("eps")?).map_err(as_config)
            }
            "bec" => {
                allow(&["eps"])?;
                ChannelModel::bec(num("eps")?).map_err(as_config)
            }
            "z" => {
                allow(&["eps", "p1"])?;
                let eps = num("eps")?;
                match take("p1") {
                    None => ChannelModel::z(eps, 0.5),
                    Some("opt") => ChannelModel::z_optimal(eps),
                    Some(_) => ChannelModel::z(eps, num("p1")?),
                }
                .map_err(as_config)
            }
            other => Err(Error::Config(format!("unknown channel '{other}' (expected awgn, bsc, bec or z)"))),
        }
    }
}

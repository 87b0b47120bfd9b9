//! Potentials of the underlying ensemble, the free energy gap, the potential
//! threshold, and the large-alphabet potential and thresholds.
//!
//! All quantities are in bits.

use std::f64::consts::LN_2;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelModel;
use crate::effective_noise::{EffectiveNoiseContext, NumericsPath};
use crate::error::{Error, Result};
use crate::numerics::solve::golden_min;
use crate::state_evolution::{
    in_basin, mse_floor, rate_search, Estimate, FixedPoint, RateThreshold, SeOptions, SectionEnsemble, ThresholdOptions,
};

fn check_e(e: f64) -> Result<()> {
    if (0.0..=1.0).contains(&e) {
        Ok(())
    } else {
        Err(Error::Domain(format!("E must lie in [0, 1], got {e}")))
    }
}

/// E·Σ(E)⁻², with the E = 0 value taken as 0 even when Σ(0) = 0.
fn e_times_inv_var(ctx: &EffectiveNoiseContext, e: f64) -> Result<f64> {
    if e == 0.0 {
        return Ok(0.0);
    }
    Ok(e * ctx.inv_effective_noise_var(e)?)
}

/// U_u(E) = −E/(2 ln2 Σ(E)²) − (1/R)·E_z[∫dy φ log₂ φ].
pub fn u_pot(ctx: &EffectiveNoiseContext, e: f64) -> Result<f64> {
    check_e(e)?;
    Ok(-e_times_inv_var(ctx, e)? / (2.0 * LN_2) - ctx.neg_output_entropy(e)? / ctx.rate())
}

/// S_u(Σ), direct estimate.
pub fn s_pot(ens: &SectionEnsemble, sigma: f64) -> Result<Estimate> {
    ens.free_entropy(sigma)
}

/// F_u(E) = U_u(E) − S_u(Σ(E)). The entropy term uses the I-MMSE route for
/// Monte Carlo ensembles.
pub fn potential_u(ctx: &EffectiveNoiseContext, ens: &SectionEnsemble, e: f64) -> Result<f64> {
    let u = u_pot(ctx, e)?;
    let sigma = ctx.effective_noise_var(e)?.sqrt();
    Ok(u - ens.free_entropy_immse(sigma)?)
}

/// φ_u(E) = U_u(E) − max(0, 1 − 1/(2 ln2 Σ(E)²)), unshifted.
pub fn potential_large_b_raw(ctx: &EffectiveNoiseContext, e: f64) -> Result<f64> {
    let inv = ctx.inv_effective_noise_var(e)?;
    Ok(u_pot(ctx, e)? - (1.0 - inv / (2.0 * LN_2)).max(0.0))
}

/// φ_u(E) − φ_u(0).
pub fn potential_large_b(ctx: &EffectiveNoiseContext, e: f64) -> Result<f64> {
    Ok(potential_large_b_raw(ctx, e)? - potential_large_b_raw(ctx, 0.0)?)
}

/// R_u^∞ = F(0|1)/(2 ln2).
pub fn r_u_infinity(ctx: &EffectiveNoiseContext) -> Result<f64> {
    Ok(ctx.fisher_info(0.0, 1.0)? / (2.0 * LN_2))
}

/// R_pot^∞ from the smoothed-kernel form, H(Y) − H(Y|Z) with Z standard
/// Gaussian, always by generic nested quadrature.
pub fn r_pot_infinity(ctx: &EffectiveNoiseContext) -> Result<f64> {
    let g = ctx.with_path(NumericsPath::Generic);
    Ok(g.neg_output_entropy(0.0)? - g.neg_output_entropy(1.0)?)
}

/// R_pot^∞ from the input-alphabet form: the mutual information between the
/// map-induced input and the output.
pub fn r_pot_infinity_symm(ch: &ChannelModel) -> Result<f64> {
    ch.mutual_information()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialCurve {
    pub e_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub rate: f64,
    pub channel: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    /// F_u at the ensemble's B.
    Finite,
    /// φ_u shifted to φ_u(0) = 0.
    LargeB,
}

impl CurveKind {
    pub fn column(self) -> &'static str {
        match self {
            CurveKind::Finite => "F_u",
            CurveKind::LargeB => "phi_u",
        }
    }
}

pub fn uniform_grid(points: usize) -> Vec<f64> {
    let n = points.max(2) - 1;
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

impl PotentialCurve {
    pub fn compute(ctx: &EffectiveNoiseContext, ens: Option<&SectionEnsemble>, grid: &[f64]) -> Result<Self> {
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("potential grid must be strictly increasing".into()));
        }
        let values = match ens {
            Some(ens) => grid.iter().map(|&e| potential_u(ctx, ens, e)).collect::<Result<Vec<_>>>()?,
            None => {
                let base = potential_large_b_raw(ctx, 0.0)?;
                grid.iter().map(|&e| Ok(potential_large_b_raw(ctx, e)? - base)).collect::<Result<Vec<_>>>()?
            }
        };
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("potential is not finite at E = {}", grid[i])));
        }
        Ok(PotentialCurve { e_grid: grid.to_vec(), values, rate: ctx.rate(), channel: ctx.channel().to_string() })
    }

    /// Indices of local minima, endpoints included.
    pub fn local_minima(&self) -> Vec<usize> {
        let v = &self.values;
        let n = v.len();
        (0..n)
            .filter(|&i| (i == 0 || v[i] < v[i - 1]) && (i + 1 == n || v[i] <= v[i + 1]))
            .collect()
    }

    pub fn argmin(&self) -> usize {
        let mut k = 0;
        for i in 1..self.values.len() {
            if self.values[i] < self.values[k] {
                k = i;
            }
        }
        k
    }
}

/// CSV with columns `R,E,<value column>`, one block of rows per curve.
pub fn curves_to_csv(curves: &[PotentialCurve], kind: CurveKind) -> String {
    let mut out = format!("R,E,{}\n", kind.column());
    for c in curves {
        for (e, v) in c.e_grid.iter().zip(&c.values) {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", c.rate, e, v);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyGap {
    /// inf over E ∉ V₀ of F_u(E) − F_u(E₀); +∞ when V₀ covers [0, 1].
    pub gap: f64,
    /// Where the infimum is attained.
    pub argmin: Option<f64>,
    /// Smallest grid point found outside V₀.
    pub basin_edge: Option<f64>,
    pub floor: FixedPoint,
}

pub const GAP_GRID: usize = 201;

/// Free energy gap ΔF_u. The basin V₀ of the floor is an initial segment of
/// [0, 1] when T_u is monotone; its edge on the grid is found by binary search
/// over basin probes.
pub fn free_energy_gap(ctx: &EffectiveNoiseContext, ens: &SectionEnsemble, opts: SeOptions) -> Result<FreeEnergyGap> {
    let floor = mse_floor(ctx, ens, opts)?;
    let grid = uniform_grid(GAP_GRID);
    let n = grid.len();
    if in_basin(ctx, ens, 1.0, &floor, opts)? {
        return Ok(FreeEnergyGap { gap: f64::INFINITY, argmin: None, basin_edge: None, floor });
    }
    // first grid index outside the basin, in (lo, hi]
    let (mut lo, mut hi) = (0usize, n - 1);
    if !in_basin(ctx, ens, grid[0], &floor, opts)? {
        hi = 0;
    }
    while hi > lo + 1 {
        let mid = (lo + hi) / 2;
        if in_basin(ctx, ens, grid[mid], &floor, opts)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let edge = hi;
    let f0 = potential_u(ctx, ens, floor.e)?;
    let values = grid[edge..].iter().map(|&e| potential_u(ctx, ens, e)).collect::<Result<Vec<_>>>()?;
    let mut k = 0;
    for i in 1..values.len() {
        if values[i] < values[k] {
            k = i;
        }
    }
    let (mut arg, mut best) = (grid[edge + k], values[k]);
    let a = grid[(edge + k).saturating_sub(1).max(edge)];
    let b = grid[(edge + k + 1).min(n - 1)];
    if b > a {
        let (x, v) = golden_min(|e| potential_u(ctx, ens, e), a, b, 1e-7)?;
        if v < best {
            arg = x;
            best = v;
        }
    }
    Ok(FreeEnergyGap { gap: best - f0, argmin: Some(arg), basin_edge: Some(grid[edge]), floor })
}

/// Potential threshold R_pot: the rate at which ΔF_u changes sign.
pub fn threshold_potential(
    base: &EffectiveNoiseContext,
    ens: &SectionEnsemble,
    bracket: (f64, f64),
    opts: &ThresholdOptions,
) -> Result<RateThreshold> {
    rate_search(
        |r| {
            let ctx = base.with_rate(r)?;
            Ok(free_energy_gap(&ctx, ens, opts.se)?.gap > 0.0)
        },
        bracket.0,
        bracket.1,
        opts,
    )
}

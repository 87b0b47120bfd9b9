//! Command-line front end. Every command resolves its settings (flags over
//! `--config` JSON over defaults), runs, and returns its output text with a
//! provenance header; the binary only handles I/O and exit codes.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::channel::{ChannelKind, ChannelModel};
use crate::codec::{decode_experiment, DecodeConfig};
use crate::coupled::{coupled_fixed_point, saturate_profile, threshold_gamp_c, CouplingSpec, DesignFunction};
use crate::effective_noise::{EffectiveNoiseContext, QuadratureSpec};
use crate::error::{Error, Result};
use crate::potential::{
    curves_to_csv, r_pot_infinity, r_u_infinity, threshold_potential, uniform_grid, CurveKind, PotentialCurve,
};
use crate::state_evolution::{extreme_fixed_points, threshold_gamp_u, SeOptions, SectionEnsemble, ThresholdOptions};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "sscodes", version, about = "Sparse superposition codes over memoryless channels")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub mc_samples: Option<usize>,
    #[arg(long, global = true)]
    pub gh_order: Option<usize>,
    #[arg(long, global = true)]
    pub y_tol: Option<f64>,
    #[arg(long, global = true)]
    pub se_tol: Option<f64>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON experiment config; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Potential curves F_u(E) or, with --large-b, φ_u(E) shifted to φ_u(0) = 0.
    PotentialCurve {
        #[arg(long)]
        channel: Option<String>,
        #[arg(long, value_delimiter = ',')]
        rates: Option<Vec<f64>>,
        #[arg(long)]
        large_b: bool,
        #[arg(long = "b")]
        b: Option<usize>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Capacities and large-B thresholds over a channel parameter sweep.
    Thresholds {
        /// awgn, bsc, bec or z
        #[arg(long)]
        family: Option<String>,
        #[arg(long, value_delimiter = ',')]
        params: Option<Vec<f64>>,
        /// Also search the finite-B thresholds R_u and R_pot at this B.
        #[arg(long)]
        finite_b: Option<usize>,
    },
    /// Coupled SE trajectory from all-ones and the saturated final profile.
    ScProfile {
        #[arg(long)]
        channel: Option<String>,
        #[arg(long = "b")]
        b: Option<usize>,
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        gamma: Option<usize>,
        #[arg(long)]
        w: Option<usize>,
        #[arg(long)]
        design: Option<String>,
    },
    /// GAMP decoding runs next to the SE prediction.
    Decode {
        #[arg(long)]
        channel: Option<String>,
        #[arg(long = "l")]
        l: Option<usize>,
        #[arg(long = "b")]
        b: Option<usize>,
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        gamma: Option<usize>,
        #[arg(long)]
        w: Option<usize>,
        #[arg(long)]
        t_max: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        no_onsager: bool,
    },
    /// R_u, R_pot and the finite-size coupled threshold R_c(Γ, w).
    ThresholdSat {
        #[arg(long)]
        channel: Option<String>,
        #[arg(long = "b")]
        b: Option<usize>,
        #[arg(long)]
        gamma: Option<usize>,
        #[arg(long)]
        w: Option<usize>,
        #[arg(long)]
        design: Option<String>,
    },
    /// Closed-form golden checks.
    Selftest,
}

/// Resolved experiment settings; also the `--config` file format.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub large_b: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite_b: Option<usize>,
    #[serde(rename = "Gamma", default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<String>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub onsager: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gh_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se_tol: Option<f64>,
}

fn pick<T>(flag: Option<T>, file: &mut Option<T>) {
    if flag.is_some() {
        *file = flag;
    }
}

impl ExperimentConfig {
    fn require<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
        v.clone().ok_or_else(|| Error::Config(format!("missing required setting `{name}`")))
    }

    fn quad(&self) -> QuadratureSpec {
        let d = QuadratureSpec::default();
        let gh = self.gh_order.unwrap_or(d.gh_order);
        QuadratureSpec { gh_order: gh, p_order: gh, y_tol: self.y_tol.unwrap_or(d.y_tol) }
    }

    fn se(&self) -> SeOptions {
        SeOptions { tol: self.se_tol.unwrap_or(SeOptions::default().tol), ..SeOptions::default() }
    }

    fn ensemble(&self) -> Result<SectionEnsemble> {
        let b = self.b.unwrap_or(2);
        SectionEnsemble::one_hot(b, self.mc_samples.unwrap_or(100_000), self.seed.unwrap_or(0))
    }

    fn channel(&self) -> Result<ChannelModel> {
        Self::require(&self.channel, "channel")?.parse().map_err(|e: Error| Error::Config(e.to_string()))
    }

    fn design(&self) -> Result<DesignFunction> {
        match self.design.as_deref().unwrap_or("rectangular") {
            "rectangular" => Ok(DesignFunction::Rectangular),
            "triangular" => Ok(DesignFunction::Triangular),
            other => Err(Error::Config(format!("unknown design function `{other}`"))),
        }
    }

    fn provenance(&self) -> serde_json::Value {
        json!({ "tool": "sscodes", "version": VERSION, "config": self })
    }

    fn csv_header(&self, extra: &[(&str, String)]) -> String {
        let mut s = format!("# sscodes {VERSION}\n# config {}\n", serde_json::to_string(self).unwrap_or_default());
        for (k, v) in extra {
            let _ = writeln!(s, "# {k} {v}");
        }
        s
    }
}

/// Merges `--config` and flags into one resolved config.
pub fn resolve(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.global.config {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
        None => ExperimentConfig::default(),
    };
    let g = &cli.global;
    pick(g.seed, &mut cfg.seed);
    pick(g.mc_samples, &mut cfg.mc_samples);
    pick(g.gh_order, &mut cfg.gh_order);
    pick(g.y_tol, &mut cfg.y_tol);
    pick(g.se_tol, &mut cfg.se_tol);
    let name = match &cli.command {
        Command::PotentialCurve { channel, rates, large_b, b, points } => {
            pick(channel.clone(), &mut cfg.channel);
            pick(rates.clone(), &mut cfg.rates);
            if *large_b {
                cfg.large_b = Some(true);
            }
            pick(*b, &mut cfg.b);
            pick(*points, &mut cfg.points);
            "potential-curve"
        }
        Command::Thresholds { family, params, finite_b } => {
            pick(family.clone(), &mut cfg.family);
            pick(params.clone(), &mut cfg.params);
            pick(*finite_b, &mut cfg.finite_b);
            "thresholds"
        }
        Command::ScProfile { channel, b, rate, gamma, w, design } => {
            pick(channel.clone(), &mut cfg.channel);
            pick(*b, &mut cfg.b);
            pick(*rate, &mut cfg.rate);
            pick(*gamma, &mut cfg.gamma);
            pick(*w, &mut cfg.w);
            pick(design.clone(), &mut cfg.design);
            "sc-profile"
        }
        Command::Decode { channel, l, b, rate, gamma, w, t_max, seeds, no_onsager } => {
            pick(channel.clone(), &mut cfg.channel);
            pick(*l, &mut cfg.l);
            pick(*b, &mut cfg.b);
            pick(*rate, &mut cfg.rate);
            pick(*gamma, &mut cfg.gamma);
            pick(*w, &mut cfg.w);
            pick(*t_max, &mut cfg.t_max);
            pick(seeds.clone(), &mut cfg.seeds);
            if *no_onsager {
                cfg.onsager = Some(false);
            }
            "decode"
        }
        Command::ThresholdSat { channel, b, gamma, w, design } => {
            pick(channel.clone(), &mut cfg.channel);
            pick(*b, &mut cfg.b);
            pick(*gamma, &mut cfg.gamma);
            pick(*w, &mut cfg.w);
            pick(design.clone(), &mut cfg.design);
            "threshold-sat"
        }
        Command::Selftest => "selftest",
    };
    if let Some(c) = &cfg.command {
        if c != name {
            return Err(Error::Config(format!("config is for `{c}`, not `{name}`")));
        }
    }
    cfg.command = Some(name.to_string());
    // record every default that the command will use
    let q = QuadratureSpec::default();
    cfg.seed.get_or_insert(0);
    cfg.mc_samples.get_or_insert(100_000);
    cfg.gh_order.get_or_insert(q.gh_order);
    cfg.y_tol.get_or_insert(q.y_tol);
    cfg.se_tol.get_or_insert(SeOptions::default().tol);
    match name {
        "potential-curve" => {
            let large = *cfg.large_b.get_or_insert(false);
            cfg.points.get_or_insert(201);
            if !large {
                cfg.b.get_or_insert(2);
            }
        }
        "sc-profile" | "threshold-sat" => {
            cfg.b.get_or_insert(2);
            cfg.design.get_or_insert_with(|| "rectangular".into());
        }
        "decode" => {
            cfg.b.get_or_insert(2);
            cfg.t_max.get_or_insert(10);
            cfg.onsager.get_or_insert(true);
            let seed = cfg.seed.unwrap_or(0);
            cfg.seeds.get_or_insert_with(|| vec![seed]);
        }
        _ => {}
    }
    Ok(cfg)
}

/// Runs the resolved command and returns its output text.
pub fn execute(cfg: &ExperimentConfig) -> Result<String> {
    match cfg.command.as_deref() {
        Some("potential-curve") => potential_curve(cfg),
        Some("thresholds") => thresholds(cfg),
        Some("sc-profile") => sc_profile(cfg),
        Some("decode") => decode(cfg),
        Some("threshold-sat") => threshold_sat(cfg),
        Some("selftest") => selftest(cfg),
        other => Err(Error::Config(format!("unknown command {other:?}"))),
    }
}

pub fn potential_curve(cfg: &ExperimentConfig) -> Result<String> {
    let ch = cfg.channel()?;
    let rates = ExperimentConfig::require(&cfg.rates, "rates")?;
    if rates.is_empty() {
        return Err(Error::Config("empty rate list".into()));
    }
    let large_b = cfg.large_b.unwrap_or(false);
    let grid = uniform_grid(cfg.points.unwrap_or(201));
    let ens = if large_b { None } else { Some(cfg.ensemble()?) };
    let curves = rates
        .iter()
        .map(|&r| {
            let ctx = EffectiveNoiseContext::new(ch.clone(), r, cfg.quad())?;
            PotentialCurve::compute(&ctx, ens.as_ref(), &grid)
        })
        .collect::<Result<Vec<_>>>()?;
    let kind = if large_b { CurveKind::LargeB } else { CurveKind::Finite };
    Ok(cfg.csv_header(&[]) + &curves_to_csv(&curves, kind))
}

fn family_channel(family: &str, x: f64) -> Result<Vec<(&'static str, ChannelModel)>> {
    Ok(match family {
        "awgn" => vec![("", ChannelModel::awgn(x)?)],
        "bsc" => vec![("", ChannelModel::bsc(x)?)],
        "bec" => vec![("", ChannelModel::bec(x)?)],
        "z" => vec![("_half", ChannelModel::z(x, 0.5)?), ("_opt", ChannelModel::z_optimal(x)?)],
        other => return Err(Error::Config(format!("unknown channel family `{other}`"))),
    })
}

pub fn thresholds(cfg: &ExperimentConfig) -> Result<String> {
    let family = ExperimentConfig::require(&cfg.family, "family")?;
    let params = ExperimentConfig::require(&cfg.params, "params")?;
    if params.is_empty() {
        return Err(Error::Config("empty parameter list".into()));
    }
    let topts = ThresholdOptions { se: cfg.se(), ..ThresholdOptions::default() };
    let ens = match cfg.finite_b {
        Some(b) => Some(SectionEnsemble::one_hot(b, cfg.mc_samples.unwrap_or(100_000), cfg.seed.unwrap_or(0))?),
        None => None,
    };
    let mut rows = Vec::new();
    for &x in &params {
        let mut row = serde_json::Map::new();
        row.insert("param".into(), json!(x));
        for (suffix, ch) in family_channel(&family, x)? {
            let ctx = EffectiveNoiseContext::new(ch.clone(), 1.0, cfg.quad())?;
            let c = ch.capacity_closed_form()?;
            row.insert(format!("C{suffix}"), json!(c));
            row.insert(format!("R_u_inf{suffix}"), json!(r_u_infinity(&ctx)?));
            row.insert(format!("R_pot_inf{suffix}"), json!(r_pot_infinity(&ctx)?));
            if let ChannelKind::Z { p1, .. } = ch.kind() {
                row.insert(format!("p1{suffix}"), json!(p1));
            }
            if let Some(ens) = &ens {
                let hi = c.max(0.05);
                for (name, res) in [
                    ("R_u", threshold_gamp_u(&ctx, ens, (0.5 * hi, hi), &topts)),
                    ("R_pot", threshold_potential(&ctx, ens, (0.5 * hi, hi), &topts)),
                ] {
                    let v = match res {
                        Ok(t) => json!(t.rate),
                        Err(Error::Bracket(msg)) => json!({ "none": msg }),
                        Err(e) => return Err(e),
                    };
                    row.insert(format!("{name}{suffix}"), v);
                }
            }
        }
        rows.push(serde_json::Value::Object(row));
    }
    Ok(serde_json::to_string_pretty(&json!({ "provenance": cfg.provenance(), "rows": rows }))? + "\n")
}

/// Whether the final profile carries a plateau at the underlying bad fixed
/// point (the wave has not swept the chain).
fn has_plateau(values: &[f64], e0: f64, e1: f64) -> bool {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    e1 > e0 + 1e-6 && (max - e1).abs() < 1e-3 * e1.max(1e-3)
}

pub fn sc_profile(cfg: &ExperimentConfig) -> Result<String> {
    let rate = ExperimentConfig::require(&cfg.rate, "R")?;
    let ctx = EffectiveNoiseContext::new(cfg.channel()?, rate, cfg.quad())?;
    let spec = CouplingSpec::new(
        ExperimentConfig::require(&cfg.gamma, "Gamma")?,
        ExperimentConfig::require(&cfg.w, "w")?,
        cfg.design()?,
        rate,
    )?;
    let ens = cfg.ensemble()?;
    let opts = cfg.se();
    let run = coupled_fixed_point(&spec, &ctx, &ens, opts, true)?;
    let (e0, e1) = extreme_fixed_points(&ctx, &ens, opts)?;
    let last = run.trajectory.last().cloned().unwrap_or_default();
    let saturated = saturate_profile(&last, e0.e);
    let mut extra = vec![
        ("coupling", spec.to_json()),
        ("converged", run.converged.to_string()),
        ("E0", format!("{:.16e}", e0.e)),
        ("E_bad", format!("{:.16e}", e1.e)),
        ("plateau", has_plateau(&last, e0.e, e1.e).to_string()),
    ];
    if let Err(e) = &saturated {
        extra.push(("saturated", format!("none ({e})")));
    }
    let mut out = cfg.csv_header(&extra);
    out.push_str("t,r,E\n");
    for (t, prof) in run.trajectory.iter().enumerate() {
        for (r, e) in prof.iter().enumerate() {
            let _ = writeln!(out, "{t},{r},{e:.16e}");
        }
    }
    if let Ok(sat) = saturated {
        for (r, e) in sat.iter().enumerate() {
            let _ = writeln!(out, "-1,{r},{e:.16e}");
        }
    }
    Ok(out)
}

pub fn decode(cfg: &ExperimentConfig) -> Result<String> {
    let dc = DecodeConfig {
        channel: ExperimentConfig::require(&cfg.channel, "channel")?,
        l: ExperimentConfig::require(&cfg.l, "L")?,
        b: cfg.b.unwrap_or(2),
        rate: ExperimentConfig::require(&cfg.rate, "R")?,
        gamma: cfg.gamma,
        w: cfg.w,
        t_max: cfg.t_max.unwrap_or(10),
        seeds: cfg.seeds.clone().unwrap_or_else(|| vec![cfg.seed.unwrap_or(0)]),
        onsager: cfg.onsager.unwrap_or(true),
    };
    dc.channel.parse::<ChannelModel>().map_err(|e| Error::Config(e.to_string()))?;
    let rep = decode_experiment(&dc, cfg.quad(), &cfg.ensemble()?)?;
    let diverged = format!("{:?}", rep.diverged_seeds);
    Ok(cfg.csv_header(&[("diverged_seeds", diverged)]) + &rep.to_csv())
}

pub fn threshold_sat(cfg: &ExperimentConfig) -> Result<String> {
    let ch = cfg.channel()?;
    let ens = cfg.ensemble()?;
    let topts = ThresholdOptions { se: cfg.se(), ..ThresholdOptions::default() };
    let base = EffectiveNoiseContext::new(ch.clone(), 1.0, cfg.quad())?;
    let c = ch.mutual_information()?;
    let hi = c.max(0.05);
    let r_u = threshold_gamp_u(&base, &ens, (0.5 * hi, hi), &topts)?;
    let r_pot = threshold_potential(&base, &ens, (r_u.rate, hi), &topts)?;
    let spec = CouplingSpec::new(
        ExperimentConfig::require(&cfg.gamma, "Gamma")?,
        ExperimentConfig::require(&cfg.w, "w")?,
        cfg.design()?,
        r_u.rate,
    )?;
    let r_c = threshold_gamp_c(&spec, &base, &ens, (r_u.rate, r_pot.upper + 0.05), &topts)?;
    let rc = r_c.threshold.rate;
    let report = json!({
        "provenance": cfg.provenance(),
        "R_u": r_u,
        "R_pot": r_pot,
        "R_c": r_c,
        "ordering": {
            "R_u_lt_R_c": r_u.rate < rc,
            "R_c_le_R_pot_plus_0.05": rc <= r_pot.rate + 0.05,
            "R_u_plus_0.01_lt_R_c": r_u.rate + 0.01 < rc,
        }
    });
    Ok(serde_json::to_string_pretty(&report)? + "\n")
}

/// One golden check: computed value against a closed form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Golden {
    pub name: String,
    pub computed: f64,
    pub expected: f64,
    pub tol: f64,
}

impl Golden {
    pub fn passed(&self) -> bool {
        (self.computed - self.expected).abs() <= self.tol
    }
}

/// Capacity and R_u^∞ of the reference channels, each computed by the
/// numerical route and compared with its closed form.
pub fn golden_suite(quad: QuadratureSpec) -> Result<Vec<Golden>> {
    let mut out = Vec::new();
    let cap: [(&str, f64); 10] = [
        ("awgn:snr=1", 1e-4),
        ("awgn:snr=10", 1e-4),
        ("awgn:snr=15", 1e-4),
        ("bsc:eps=0.05", 1e-6),
        ("bsc:eps=0.1", 1e-6),
        ("bsc:eps=0.25", 1e-6),
        ("bec:eps=0.1", 1e-6),
        ("bec:eps=0.5", 1e-6),
        ("bec:eps=0.9", 1e-6),
        ("z:eps=0.1,p1=0.5", 1e-6),
    ];
    for (s, tol) in cap {
        let ch: ChannelModel = s.parse()?;
        let ctx = EffectiveNoiseContext::new(ch.clone(), 1.0, quad)?;
        out.push(Golden { name: format!("R_pot_inf {s}"), computed: r_pot_infinity(&ctx)?, expected: ch.capacity_closed_form()?, tol });
    }
    for s in ["awgn:snr=10", "bsc:eps=0.1", "bec:eps=0.5", "z:eps=0.1,p1=0.5", "bsc:eps=0"] {
        let ch: ChannelModel = s.parse()?;
        let ctx = EffectiveNoiseContext::new(ch.clone(), 1.0, quad)?;
        out.push(Golden { name: format!("R_u_inf {s}"), computed: r_u_infinity(&ctx)?, expected: ch.gamp_threshold_closed_form()?, tol: 1e-4 });
    }
    Ok(out)
}

pub fn selftest(cfg: &ExperimentConfig) -> Result<String> {
    let suite = golden_suite(cfg.quad())?;
    let mut out = String::new();
    for g in &suite {
        let _ = writeln!(
            out,
            "{} {:<28} computed={:.10} expected={:.10} tol={:e}",
            if g.passed() { "PASS" } else { "FAIL" },
            g.name,
            g.computed,
            g.expected,
            g.tol
        );
    }
    let failed = suite.iter().filter(|g| !g.passed()).count();
    if failed > 0 {
        return Err(Error::Numerical(format!("{failed} golden checks failed:\n{out}")));
    }
    Ok(out)
}

/// Entry point for the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = resolve(&cli).and_then(|cfg| {
        let text = execute(&cfg)?;
        match &cli.global.out {
            Some(p) => std::fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("sscodes: {e}");
            e.exit_code()
        }
    }
}

//! `np-elastic`: spectrum tables, oracle validation, CALR loss sweeps and
//! field slices.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use np_elastic::harmonics::{Family, SolidPoint};
use np_elastic::kelvin::LameParams;
use np_elastic::oracle::{run_suite, Suite, SuiteConfig};
use np_elastic::potentials::{np_eigenvalue, np_limit};
use np_elastic::transmission::{
    classify_calr, field_eval, solve, synth_source, PlasmonicConfig, ShellGeometry, SourceModel, SourceProfile,
    SweepOptions, TuningPolicy,
};

use config::{parse_list, FileConfig};
use output::{float, json_line, Sink};

#[derive(Parser)]
#[command(name = "np-elastic", version, about = "Elastic Neumann-Poincaré spectra and CALR in core-shell structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Eigenvalue table of K* by family and degree (CSV).
    Spectrum,
    /// Run an oracle suite against the closed forms (JSON lines).
    Validate,
    /// Loss sweep of the dissipated energy with a verdict (JSON lines plus CSV mirror).
    Calr,
    /// |u| on a plane slice for heat maps (CSV).
    Field,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Validate => "validate",
            Command::Calr => "calr",
            Command::Field => "field",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Axis {
    X,
    Y,
    Z,
}

impl std::str::FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Axis as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args)]
struct Opts {
    /// Key-value config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Core radius.
    #[arg(long, global = true, allow_negative_numbers = true)]
    ri: Option<f64>,
    /// Shell radius.
    #[arg(long, global = true, allow_negative_numbers = true)]
    re: Option<f64>,
    /// Source radius.
    #[arg(long, global = true, allow_negative_numbers = true)]
    rs: Option<f64>,
    /// Source amplitude.
    #[arg(long, global = true, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// monopole-line or uniform-m.
    #[arg(long, global = true)]
    profile: Option<String>,
    /// Strictly decreasing comma list of losses.
    #[arg(long, global = true)]
    delta_grid: Option<String>,
    /// Fixed resonant degree; retuned per loss when absent.
    #[arg(long, global = true)]
    n0: Option<u32>,
    #[arg(long, global = true)]
    n_min: Option<u32>,
    #[arg(long, global = true)]
    n_max: Option<u32>,
    #[arg(long, global = true)]
    quad_theta: Option<usize>,
    #[arg(long, global = true)]
    quad_phi: Option<usize>,
    /// layers, np, lame, gram or energy.
    #[arg(long, global = true)]
    suite: Option<String>,
    /// Restrict the spectrum to one family (T, M or N).
    #[arg(long, global = true)]
    family: Option<String>,
    /// Output path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Normal of the field slice.
    #[arg(long, global = true)]
    axis: Option<Axis>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    offset: Option<f64>,
    /// Half-width of the square slice.
    #[arg(long, global = true)]
    extent: Option<f64>,
    /// Samples per side of the slice.
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Points closer than this to an interface are skipped.
    #[arg(long, global = true)]
    guard: Option<f64>,
    #[arg(long, global = true, hide = true, allow_negative_numbers = true)]
    inject_fault: Option<f64>,
}

/// Settings after merging flags, config file and defaults; echoed into
/// every artifact.
#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    command: &'static str,
    lambda: f64,
    mu: f64,
    ri: f64,
    re: f64,
    rs: f64,
    kappa: f64,
    profile: &'static str,
    delta_grid: Vec<f64>,
    n0: Option<u32>,
    n_min: u32,
    n_max: Option<u32>,
    quad_theta: usize,
    quad_phi: usize,
    suite: Option<String>,
    family: Option<String>,
    out: Option<PathBuf>,
    axis: Axis,
    offset: f64,
    extent: f64,
    resolution: usize,
    guard: f64,
    #[serde(skip)]
    fault: f64,
}

const DEFAULT_GRID: &str = "1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6";

fn profile_from(s: &str) -> Result<(&'static str, SourceProfile)> {
    match s {
        "monopole-line" => Ok(("monopole-line", SourceProfile::MonopoleLine)),
        "uniform-m" => Ok(("uniform-m", SourceProfile::UniformM)),
        _ => bail!("unknown source profile `{s}` (monopole-line or uniform-m)"),
    }
}

fn resolve(command: Command, o: Opts) -> Result<RunConfig> {
    let file = match &o.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let grid = match file.pick_opt(o.delta_grid, "delta-grid")? {
        Some(text) => parse_list(&text)?,
        None => parse_list(DEFAULT_GRID)?,
    };
    let profile: String = file.pick(o.profile, "profile", "monopole-line".to_string())?;
    let cfg = RunConfig {
        command: command.name(),
        lambda: file.pick(o.lambda, "lambda", 1.0)?,
        mu: file.pick(o.mu, "mu", 1.0)?,
        ri: file.pick(o.ri, "ri", 1.0)?,
        re: file.pick(o.re, "re", 2.0)?,
        rs: file.pick(o.rs, "rs", 2.5)?,
        kappa: file.pick(o.kappa, "kappa", 1.0)?,
        profile: profile_from(&profile)?.0,
        delta_grid: grid,
        n0: file.pick_opt(o.n0, "n0")?,
        n_min: file.pick(o.n_min, "n-min", 1)?,
        n_max: file.pick_opt(o.n_max, "n-max")?,
        quad_theta: file.pick(o.quad_theta, "quad-theta", 64)?,
        quad_phi: file.pick(o.quad_phi, "quad-phi", 128)?,
        suite: file.pick_opt(o.suite, "suite")?,
        family: file.pick_opt(o.family, "family")?,
        out: file.pick_opt(o.out, "out")?,
        axis: file.pick(o.axis, "axis", Axis::Z)?,
        offset: file.pick(o.offset, "offset", 0.0)?,
        extent: file.pick(o.extent, "extent", 5.0)?,
        resolution: file.pick(o.resolution, "resolution", 81)?,
        guard: file.pick(o.guard, "guard", 0.02)?,
        fault: o.inject_fault.unwrap_or(0.0),
    };
    if cfg.delta_grid.iter().any(|d| !(*d > 0.0)) {
        bail!("delta-grid entries must be positive");
    }
    if cfg.delta_grid.windows(2).any(|w| w[1] >= w[0]) {
        bail!("delta-grid must be strictly decreasing");
    }
    Ok(cfg)
}

impl RunConfig {
    fn lame(&self) -> Result<LameParams> {
        Ok(LameParams::new(self.lambda, self.mu)?)
    }

    fn geometry(&self) -> Result<ShellGeometry> {
        Ok(ShellGeometry::new(self.ri, self.re)?)
    }

    fn source_profile(&self) -> SourceProfile {
        profile_from(self.profile).expect("validated in resolve").1
    }

    fn policy(&self) -> TuningPolicy {
        match self.n0 {
            Some(n0) => TuningPolicy::Fixed { n0 },
            None => TuningPolicy::Retune,
        }
    }

    /// `# key = value` lines for CSV headers.
    fn csv_header(&self) -> Result<Vec<String>> {
        let mut lines = vec![format!("# np-elastic {}", self.command)];
        if let serde_json::Value::Object(map) = serde_json::to_value(self)? {
            for (k, v) in map {
                let text = match v {
                    serde_json::Value::String(s) => s,
                    other => json_line(&other)?,
                };
                lines.push(format!("# {k} = {text}"));
            }
        }
        Ok(lines)
    }

    fn json_header(&self) -> Result<String> {
        json_line(&json!({ "config": self }))
    }
}

enum Outcome {
    Ok,
    ValidationFailed,
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<Outcome> {
    let lame = cfg.lame()?;
    let families: Vec<Family> = match &cfg.family {
        Some(f) => vec![f.parse()?],
        None => Family::ALL.to_vec(),
    };
    let n_max = cfg.n_max.unwrap_or(6);
    let n_min = cfg.n_min.max(1);
    let mut sink = Sink::open(cfg.out.as_deref())?;
    for line in cfg.csv_header()? {
        sink.line(&line)?;
    }
    sink.line("family,n,eigenvalue_re,eigenvalue_im,limit_value")?;
    for family in families {
        let limit = np_limit(family, &lame);
        for n in n_min..=n_max {
            let xi = np_eigenvalue(family, n, &lame)?.value;
            sink.line(&format!("{family},{n},{},{},{}", float(xi.re), float(xi.im), float(limit.re)))?;
        }
    }
    sink.finish()?;
    Ok(Outcome::Ok)
}

fn cmd_validate(cfg: &RunConfig) -> Result<Outcome> {
    let suite: Suite = match &cfg.suite {
        Some(s) => s.parse()?,
        None => bail!("validate needs --suite (layers, np, lame, gram or energy)"),
    };
    let mut sc = SuiteConfig::new(cfg.lame()?, cfg.n_max.unwrap_or(6));
    sc.quad_theta = cfg.quad_theta;
    sc.quad_phi = cfg.quad_phi;
    sc.geometry = cfg.geometry()?;
    sc.fault = cfg.fault;
    let records = run_suite(suite, &sc)?;
    let failed = records.iter().filter(|r| !r.pass).count();
    let worst = records.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    let mut sink = Sink::open(cfg.out.as_deref())?;
    sink.line(&cfg.json_header()?)?;
    for r in &records {
        sink.line(&json_line(r)?)?;
    }
    sink.line(&json_line(&json!({"summary": {"suite": suite.as_str(), "checks": records.len(), "failed": failed, "pass": failed == 0}}))?)?;
    sink.finish()?;
    eprintln!("suite {suite}: {} checks, {failed} failed, worst relative error {worst:.3e}", records.len());
    Ok(if failed == 0 { Outcome::Ok } else { Outcome::ValidationFailed })
}

fn csv_mirror_path(out: &Path) -> Result<PathBuf> {
    let p = out.with_extension("csv");
    if p == out {
        bail!("calr writes JSON lines to --out and a CSV mirror beside it; {} would be overwritten", out.display());
    }
    Ok(p)
}

fn cmd_calr(cfg: &RunConfig) -> Result<Outcome> {
    let geom = cfg.geometry()?;
    let lame = cfg.lame()?;
    let model = SourceModel { r_s: cfg.rs, kappa: cfg.kappa, profile: cfg.source_profile() };
    let mut opts = SweepOptions::default();
    if let Some(n) = cfg.n_max {
        opts.n_min = n;
    }
    let mirror = cfg.out.as_deref().map(csv_mirror_path).transpose()?;
    let sweep = classify_calr(&geom, &lame, cfg.policy(), &model, &cfg.delta_grid, &opts)?;
    let mut sink = Sink::open(cfg.out.as_deref())?;
    sink.line(&cfg.json_header()?)?;
    for r in &sweep.reports {
        sink.line(&json_line(r)?)?;
    }
    sink.line(&json_line(&json!({"summary": {
        "verdict": sweep.verdict,
        "source_radius": sweep.source_radius,
        "critical_radius": sweep.critical_radius,
        "growth": sweep.growth,
        "energy_spread": sweep.energy_spread,
        "farfield_spread": sweep.farfield_spread,
    }}))?)?;
    sink.finish()?;
    if let Some(path) = mirror {
        let mut csv = Sink::open(Some(&path))?;
        for line in cfg.csv_header()? {
            csv.line(&line)?;
        }
        csv.line("delta,n0,energy,farfield_sample")?;
        for r in &sweep.reports {
            csv.line(&format!("{},{},{},{}", float(r.delta), r.n0, float(r.energy_modal), float(r.farfield_sample)))?;
        }
        csv.finish()?;
    }
    eprintln!("verdict {}: growth {:.3e}, energy max/min {:.3}", sweep.verdict, sweep.growth, sweep.energy_spread);
    Ok(Outcome::Ok)
}

/// Sample coordinates along one side of the slice.
fn slice_coords(extent: f64, resolution: usize) -> Vec<f64> {
    if resolution == 1 {
        return vec![0.0];
    }
    (0..resolution).map(|k| -extent + 2.0 * extent * k as f64 / (resolution - 1) as f64).collect()
}

fn cmd_field(cfg: &RunConfig) -> Result<Outcome> {
    let geom = cfg.geometry()?;
    let lame = cfg.lame()?;
    if cfg.resolution == 0 {
        bail!("resolution must be at least 1");
    }
    if !(cfg.extent > 0.0 && cfg.guard >= 0.0) {
        bail!("extent must be positive and guard non-negative");
    }
    let delta = *cfg.delta_grid.last().expect("non-empty grid");
    if delta >= 1.0 {
        bail!("loss {delta} must lie in (0, 1)");
    }
    let n0 = cfg.policy().n0_for(delta, &geom)?;
    let pc = PlasmonicConfig::resonant(n0, delta)?;
    // Without an explicit cap the source runs until its terms fall below 1e-16 of the peak.
    let src = synth_source(cfg.rs, cfg.kappa, &geom, &lame, cfg.source_profile(), cfg.n_max.unwrap_or(4000), 1e-16)?;
    let sol = solve(&src, &geom, &pc, &lame)?;
    let mut sink = Sink::open(cfg.out.as_deref())?;
    for line in cfg.csv_header()? {
        sink.line(&line)?;
    }
    sink.line(&format!("# n0 = {n0}, delta = {}, modes = {}", float(delta), src.coeffs.len()))?;
    sink.line("s,t,x,y,z,region,abs_u")?;
    let coords = slice_coords(cfg.extent, cfg.resolution);
    for &t in &coords {
        for &s in &coords {
            let x = match cfg.axis {
                Axis::X => SolidPoint::new(cfg.offset, s, t),
                Axis::Y => SolidPoint::new(s, cfg.offset, t),
                Axis::Z => SolidPoint::new(s, t, cfg.offset),
            };
            let r = x.radius();
            if (r - geom.r_i).abs() < cfg.guard || (r - geom.r_e).abs() < cfg.guard {
                continue;
            }
            let region = if r < geom.r_i {
                "core"
            } else if r < geom.r_e {
                "shell"
            } else {
                "matrix"
            };
            let u = field_eval(&sol, &src, &geom, &lame, &x, true).norm();
            sink.line(&format!(
                "{},{},{},{},{},{region},{}",
                float(s),
                float(t),
                float(x.x.x),
                float(x.x.y),
                float(x.x.z),
                float(u)
            ))?;
        }
    }
    sink.finish()?;
    Ok(Outcome::Ok)
}

fn run(cli: Cli) -> Result<Outcome> {
    let cfg = resolve(cli.command, cli.opts).context("invalid configuration")?;
    match cli.command {
        Command::Spectrum => cmd_spectrum(&cfg),
        Command::Validate => cmd_validate(&cfg),
        Command::Calr => cmd_calr(&cfg),
        Command::Field => cmd_field(&cfg),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

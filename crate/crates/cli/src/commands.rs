use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use netperc::compare::{self, beta_grid, CompareRow, SweepRow};
use netperc::degree::{erdos_gallai, molloy_reed_lambda, sample_sequence_with_budget, DEFAULT_SEQUENCE_RESTARTS};
use netperc::ebcm::{self, IntegrateOptions};
use netperc::percolation::{critical_t, transmissibility};
use netperc::simulate::{gillespie_sir, percolation_ensemble, run_ensemble, write_event_csv, SimConfig};
use netperc::{
    io, ConfigurationModel, DistributionSpec, EpidemicParams, FamilyKind, MatchingMode, Network,
    PercolationReport, TransmissibilityModel,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{invalid, load, pick, DistFlags};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetFormat {
    Edgelist,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Reject,
    Erased,
}

impl From<Mode> for MatchingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Reject => MatchingMode::Reject,
            Mode::Erased => MatchingMode::Erased,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepOver {
    Beta,
    T,
}

fn write_to(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| anyhow::anyhow!("cannot create {}: {e}", p.display()))?;
            let mut out = BufWriter::new(file);
            body(&mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            body(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> anyhow::Result<()> {
    write_to(path, |out| {
        serde_json::to_writer_pretty(&mut *out, value)?;
        writeln!(out)?;
        Ok(())
    })
}

fn params(beta: Option<f64>, gamma: Option<f64>) -> anyhow::Result<EpidemicParams> {
    let beta = beta.ok_or_else(|| invalid("--beta is required"))?;
    let gamma = gamma.ok_or_else(|| invalid("--gamma is required"))?;
    Ok(EpidemicParams::new(beta, gamma)?)
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or very large magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

// ---- dist ----

#[derive(Args, Debug)]
pub struct DistCmd {
    #[command(flatten)]
    dist: DistFlags,
    /// Power-law exponent (alias of --exponent for this command)
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistConfig {
    distribution: Option<Value>,
    format: Option<Format>,
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct DistSummary {
    #[serde(flatten)]
    spec: DistributionSpec,
    mean: f64,
    variance: f64,
    #[serde(rename = "Lambda")]
    lambda: f64,
    critical: bool,
    #[serde(rename = "T_c")]
    t_c: Option<f64>,
    tail_mass: f64,
    pmf: Vec<f64>,
}

impl DistCmd {
    pub fn run(mut self, config: Option<&Path>) -> anyhow::Result<()> {
        let cfg: DistConfig = load(config)?;
        if let Some(g) = self.gamma {
            if self.dist.exponent.is_some() {
                return Err(invalid("give --gamma or --exponent, not both"));
            }
            self.dist.exponent = Some(g);
        }
        let d = self.dist.overlay(cfg.distribution.as_ref())?.build()?;
        let output = pick(self.output, cfg.output);
        let lambda = molloy_reed_lambda(&d);
        let summary = DistSummary {
            spec: d.spec(),
            mean: d.mean(),
            variance: d.variance(),
            lambda,
            critical: lambda.abs() <= 1e-12,
            t_c: critical_t(d.pmf()).finite(),
            tail_mass: d.tail_mass(),
            pmf: d.pmf().coeffs().to_vec(),
        };
        match pick(self.format, cfg.format).unwrap_or(Format::Json) {
            Format::Json => write_json(output.as_deref(), &summary),
            Format::Csv => write_to(output.as_deref(), |out| {
                writeln!(out, "k,p")?;
                for (k, p) in summary.pmf.iter().enumerate() {
                    writeln!(out, "{k},{}", num(*p))?;
                }
                Ok(())
            }),
        }
    }
}

// ---- check-seq ----

#[derive(Args, Debug)]
pub struct CheckSeqCmd {
    /// Degrees, comma separated
    #[arg(long, value_delimiter = ',')]
    degrees: Option<Vec<usize>>,
    /// File of whitespace- or comma-separated degrees
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckSeqConfig {
    degrees: Option<Vec<usize>>,
    input: Option<PathBuf>,
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct SeqReport {
    realizable: bool,
    length: usize,
    total: usize,
    even: bool,
    max_degree: usize,
}

fn read_degrees(path: &Path) -> anyhow::Result<Vec<usize>> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| invalid(format!("{}: {s:?} is not a degree", path.display()))))
        .collect()
}

impl CheckSeqCmd {
    pub fn run(self, config: Option<&Path>) -> anyhow::Result<()> {
        let cfg: CheckSeqConfig = load(config)?;
        let degrees = match (self.degrees, self.input) {
            (Some(d), None) => d,
            (None, Some(p)) => read_degrees(&p)?,
            (Some(_), Some(_)) => return Err(invalid("give --degrees or --input, not both")),
            (None, None) => match (cfg.degrees, cfg.input) {
                (Some(d), None) => d,
                (None, Some(p)) => read_degrees(&p)?,
                (Some(_), Some(_)) => return Err(invalid("config gives both degrees and input")),
                (None, None) => return Err(invalid("no sequence given: pass --degrees or --input")),
            },
        };
        let total: usize = degrees.iter().sum();
        let report = SeqReport {
            realizable: erdos_gallai(&degrees),
            length: degrees.len(),
            total,
            even: total.is_multiple_of(2),
            max_degree: degrees.iter().copied().max().unwrap_or(0),
        };
        write_json(pick(self.output, cfg.output).as_deref(), &report)
    }
}

// ---- generate ----

#[derive(Args, Debug)]
pub struct GenerateCmd {
    #[command(flatten)]
    dist: DistFlags,
    /// Number of vertices
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Whole-matching restarts allowed in reject mode
    #[arg(long)]
    restart_budget: Option<usize>,
    /// Restarts allowed while sampling the degree sequence
    #[arg(long)]
    sequence_restarts: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<NetFormat>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenerateConfig {
    distribution: Option<Value>,
    n: Option<usize>,
    seed: Option<u64>,
    mode: Option<Mode>,
    restart_budget: Option<usize>,
    sequence_restarts: Option<usize>,
    format: Option<NetFormat>,
    output: Option<PathBuf>,
}

struct NetworkRecipe {
    dist: DistFlags,
    n: Option<usize>,
    seed: u64,
    mode: Mode,
    restart_budget: usize,
    sequence_restarts: usize,
}

impl NetworkRecipe {
    fn build(&self) -> anyhow::Result<Network> {
        let d = self.dist.build()?;
        let n = self.n.ok_or_else(|| invalid("--n is required"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let seq = sample_sequence_with_budget(&d, n, &mut rng, self.sequence_restarts)?;
        let gen = ConfigurationModel {
            mode: self.mode.into(),
            restart_budget: self.restart_budget,
        };
        let (net, stats) = gen.generate(&seq, &mut rng)?;
        eprintln!(
            "network: N = {}, M = {}, matchings drawn {}, erased pairs {}",
            net.vertex_count(),
            net.edge_count(),
            stats.attempts,
            stats.erased_pairs
        );
        Ok(net)
    }
}

impl GenerateCmd {
    pub fn run(self, config: Option<&Path>) -> anyhow::Result<()> {
        let cfg: GenerateConfig = load(config)?;
        let recipe = NetworkRecipe {
            dist: self.dist.overlay(cfg.distribution.as_ref())?,
            n: pick(self.n, cfg.n),
            seed: pick(self.seed, cfg.seed).unwrap_or(0),
            mode: pick(self.mode, cfg.mode).unwrap_or(Mode::Reject),
            restart_budget: pick(self.restart_budget, cfg.restart_budget)
                .unwrap_or(ConfigurationModel::default().restart_budget),
            sequence_restarts: pick(self.sequence_restarts, cfg.sequence_restarts).unwrap_or(DEFAULT_SEQUENCE_RESTARTS),
        };
        let net = recipe.build()?;
        let output = pick(self.output, cfg.output);
        match pick(self.format, cfg.format).unwrap_or(NetFormat::Edgelist) {
            NetFormat::Edgelist => write_to(output.as_deref(), |out| Ok(io::write_edge_list(&net, out)?)),
            NetFormat::Binary => write_to(output.as_deref(), |out| Ok(io::write_binary(&net, out)?)),
        }
    }
}

// ---- percolate ----

#[derive(Args, Debug)]
pub struct PercolateCmd {
    #[command(flatten)]
    dist: DistFlags,
    /// Transmission rate
    #[arg(long)]
    beta: Option<f64>,
    /// Recovery rate
    #[arg(long)]
    gamma: Option<f64>,
    /// Transmissibility, instead of rates
    #[arg(long = "t")]
    t: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Sweep over a beta grid (fixed gamma) or a T grid; output is CSV
    #[arg(long, value_enum)]
    sweep: Option<SweepOver>,
    #[arg(long)]
    points: Option<usize>,
    /// Upper end of the sweep grid
    #[arg(long)]
    max: Option<f64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PercolateConfig {
    distribution: Option<Value>,
    beta: Option<f64>,
    gamma: Option<f64>,
    #[serde(rename = "T")]
    t: Option<f64>,
    transmissibility: Option<TransmissibilityModel>,
    tol: Option<f64>,
    sweep: Option<SweepOver>,
    points: Option<usize>,
    max: Option<f64>,
    output: Option<PathBuf>,
}

fn tolerance(tol: Option<f64>) -> anyhow::Result<f64> {
    let tol = tol.unwrap_or(1e-12);
    if !(tol > 0.0 && tol < 1e-2) {
        return Err(invalid(format!("tol must lie in (0, 0.01), got {tol}")));
    }
    Ok(tol)
}

impl PercolateCmd {
    pub fn run(self, config: Option<&Path>) -> anyhow::Result<()> {
        let cfg: PercolateConfig = load(config)?;
        let d = self.dist.overlay(cfg.distribution.as_ref())?.build()?;
        let g = d.pmf();
        let tol = tolerance(pick(self.tol, cfg.tol))?;
        let output = pick(self.output, cfg.output);
        let points = pick(self.points, cfg.points).unwrap_or(40);
        if points == 0 {
            return Err(invalid("points must be at least 1"));
        }
        let rates_from_flags = self.beta.is_some() || self.gamma.is_some();
        match pick(self.sweep, cfg.sweep) {
            Some(SweepOver::Beta) => {
                let max = pick(self.max, cfg.max).unwrap_or(6.0);
                if !(max > 0.0 && max.is_finite()) {
                    return Err(invalid("sweep max must be positive"));
                }
                let gamma = pick(self.gamma, cfg.gamma).ok_or_else(|| invalid("a beta sweep needs --gamma"))?;
                let rows = compare::sweep(g, gamma, &beta_grid(points, max), tol)?;
                write_sweep(output.as_deref(), &rows)
            }
            Some(SweepOver::T) => {
                let max = pick(self.max, cfg.max).unwrap_or(1.0);
                if !(max > 0.0 && max <= 1.0) {
                    return Err(invalid("T sweep max must lie in (0, 1]"));
                }
                let reports = (0..=points)
                    .map(|i| PercolationReport::analyze(g, max * i as f64 / points as f64, tol))
                    .collect::<Result<Vec<_>, _>>()?;
                write_to(output.as_deref(), |out| {
                    writeln!(out, "T,Tc,uT,ST,mean_small")?;
                    for r in &reports {
                        writeln!(out, "{},{},{},{},{}", num(r.t), opt(r.t_c), num(r.u_t), num(r.s_t), opt(r.mean_small))?;
                    }
                    Ok(())
                })
            }
            None => {
                let t = match (self.t, rates_from_flags) {
                    (Some(t), _) => t,
                    (None, true) => rates_t(pick(self.beta, cfg.beta), pick(self.gamma, cfg.gamma), &cfg.transmissibility)?,
                    (None, false) => match cfg.t {
                        Some(t) => t,
                        None if cfg.beta.is_some() || cfg.gamma.is_some() => {
                            rates_t(cfg.beta, cfg.gamma, &cfg.transmissibility)?
                        }
                        None => return Err(invalid("need --t, or --beta and --gamma")),
                    },
                };
                let report = PercolationReport::analyze(g, t, tol)?;
                write_json(output.as_deref(), &report)
            }
        }
    }
}

fn rates_t(beta: Option<f64>, gamma: Option<f64>, model: &Option<TransmissibilityModel>) -> anyhow::Result<f64> {
    let p = params(beta, gamma)?;
    let model = model.clone().unwrap_or(TransmissibilityModel::ConstantRates);
    Ok(transmissibility(&model, &p)?)
}

fn write_sweep(path: Option<&Path>, rows: &[SweepRow]) -> anyhow::Result<()> {
    write_to(path, |out| {
        writeln!(out, "{}", compare::SWEEP_CSV_HEADER)?;
        for r in rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                num(r.beta),
                num(r.gamma),
                num(r.t),
                opt(r.t_c),
                num(r.u_t),
                num(r.s_t),
                num(r.r0),
                num(r.r_inf)
            )?;
        }
        Ok(())
    })
}

// ---- ebcm ----

#[derive(Args, Debug)]
pub struct EbcmCmd {
    #[command(flatten)]
    dist: DistFlags,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Initial θ, close to 1
    #[arg(long)]
    theta0: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Step size (default 0.01 / max(beta, gamma))
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    /// csv: trajectory; json: final-state report
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EbcmConfig {
    distribution: Option<Value>,
    beta: Option<f64>,
    gamma: Option<f64>,
    theta0: Option<f64>,
    t_end: Option<f64>,
    dt: Option<f64>,
    tol: Option<f64>,
    format: Option<Format>,
    output: Option<PathBuf>,
}

impl EbcmCmd {
    pub fn run(self, config: Option<&Path>) -> anyhow::Result<()> {
        let cfg: EbcmConfig = load(config)?;
        let d = self.dist.overlay(cfg.distribution.as_ref())?.build()?;
        let p = params(pick(self.beta, cfg.beta), pick(self.gamma, cfg.gamma))?;
        let output = pick(self.output, cfg.output);
        let tol = tolerance(pick(self.tol, cfg.tol))?;
        match pick(self.format, cfg.format).unwrap_or(Format::Csv) {
            Format::Json => write_json(output.as_deref(), &ebcm::final_size(d.pmf(), &p, tol)?),
            Format::Csv => {
                let defaults = IntegrateOptions::default();
                let opts = IntegrateOptions {
                    theta0: pick(self.theta0, cfg.theta0).unwrap_or(defaults.theta0),
                    t_end: pick(self.t_end, cfg.t_end).unwrap_or(defaults.t_end),
                    dt: pick(self.dt, cfg.dt),
                };
                let traj = ebcm::integrate(d.pmf(), &p, &opts)?;
                eprintln!("theta(t_end) = {}, S + I + R drift {:.2e}", traj.final_theta(), traj.conservation_error());
                write_to(output.as_deref(), |out| Ok(traj.write_csv(out)?))
            }
        }
    }
}

// ---- simulate ----

#[derive(Args, Debug)]
pub struct SimulateCmd {
    /// Network file (edge list or binary); otherwise one is generated
    #[arg(long)]
    network: Option<PathBuf>,
    #[command(flatten)]
    dist: DistFlags,
    /// Vertices of the generated network
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    restart_budget: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Run static percolation draws at this T instead of SIR dynamics
    #[arg(long)]
    percolation_t: Option<f64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Epidemic when final size exceeds this fraction of N
    #[arg(long)]
    cutoff: Option<f64>,
    /// Write the event log of replicate 0 here (CSV)
    #[arg(long)]
    events: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateConfig {
    network: Option<PathBuf>,
    distribution: Option<Value>,
    n: Option<usize>,
    mode: Option<Mode>,
    restart_budget: Option<usize>,
    beta: Option<f64>,
    gamma: Option<f64>,
    percolation_t: Option<f64>,
    replicates: Option<usize>,
    seed: Option<u64>,
    cutoff: Option<f64>,
    events: Option<PathBuf>,
    output: Option<PathBuf>,
}

impl SimulateCmd {
    pub fn run(self, config: Option<&Path>) -> anyhow::Result<()> {
        let cfg: SimulateConfig = load(config)?;
        let seed = pick(self.seed, cfg.seed).unwrap_or(0);
        let net = match pick(self.network, cfg.network) {
            Some(path) => {
                let bytes =
                    std::fs::read(&path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
                io::read_network(&bytes)?
            }
            None => NetworkRecipe {
                dist: self.dist.overlay(cfg.distribution.as_ref())?,
                n: pick(self.n, cfg.n),
                seed,
                mode: pick(self.mode, cfg.mode).unwrap_or(Mode::Reject),
                restart_budget: pick(self.restart_budget, cfg.restart_budget)
                    .unwrap_or(ConfigurationModel::default().restart_budget),
                sequence_restarts: DEFAULT_SEQUENCE_RESTARTS,
            }
            .build()?,
        };
        let sim = SimConfig {
            seed,
            replicates: pick(self.replicates, cfg.replicates).unwrap_or(100),
            epidemic_cutoff_fraction: pick(self.cutoff, cfg.cutoff).unwrap_or(0.05),
            record_events: false,
        };
        sim.validate()?;
        let output = pick(self.output, cfg.output);
        let events = pick(self.events, cfg.events);
        let summary = match pick(self.percolation_t, cfg.percolation_t) {
            Some(t) => {
                if events.is_some() {
                    return Err(invalid("--events applies to SIR runs, not percolation draws"));
                }
                percolation_ensemble(&net, t, &sim)?
            }
            None => {
                let p = params(pick(self.beta, cfg.beta), pick(self.gamma, cfg.gamma))?;
                if let Some(path) = &events {
                    // replicate 0 replayed on its own stream, with logging
                    let out = gillespie_sir(&net, &p, sim.epidemic_cutoff_fraction, true, &mut sim.replicate_rng(0))?;
                    let log = out.events.unwrap_or_default();
                    write_to(Some(path), |w| Ok(write_event_csv(&log, w)?))?;
                }
                run_ensemble(&net, &p, &sim)?
            }
        };
        write_json(output.as_deref(), &summary)
    }
}

// ---- compare ----

#[derive(Args, Debug)]
pub struct CompareCmd {
    /// poisson, geometric or powerlaw, tuned to the target mean
    #[arg(long, value_enum)]
    family: Option<CompareFamily>,
    #[arg(long)]
    mean: Option<f64>,
    #[arg(long)]
    delta: Option<usize>,
    /// Beta grid points on (0, beta_max]
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    beta_max: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    gammas: Option<Vec<f64>>,
    /// Add a beta = 0 row for each gamma
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    include_zero: Option<bool>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompareFamily {
    Poisson,
    Geometric,
    Powerlaw,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareConfig {
    family: Option<CompareFamily>,
    mean: Option<f64>,
    delta: Option<usize>,
    points: Option<usize>,
    beta_max: Option<f64>,
    gammas: Option<Vec<f64>>,
    include_zero: Option<bool>,
    tol: Option<f64>,
    format: Option<Format>,
    output: Option<PathBuf>,
}

/// Largest residual the comparison accepts.
const RESIDUAL_LIMIT: f64 = 1e-8;

impl CompareCmd {
    pub fn run(self, config: Option<&Path>) -> anyhow::Result<()> {
        let cfg: CompareConfig = load(config)?;
        let kind = match pick(self.family, cfg.family).unwrap_or(CompareFamily::Poisson) {
            CompareFamily::Poisson => FamilyKind::Poisson,
            CompareFamily::Geometric => FamilyKind::Geometric,
            CompareFamily::Powerlaw => FamilyKind::PowerLaw,
        };
        let mean = pick(self.mean, cfg.mean).unwrap_or(compare::FIGURE_MEAN);
        let delta = pick(self.delta, cfg.delta).unwrap_or(compare::FIGURE_DELTA);
        let d = netperc::DegreeDistribution::with_mean(kind, mean, delta, 1)?;
        let points = pick(self.points, cfg.points).unwrap_or(40);
        let beta_max = pick(self.beta_max, cfg.beta_max).unwrap_or(6.0);
        if points == 0 || !(beta_max > 0.0 && beta_max.is_finite()) {
            return Err(invalid("need points >= 1 and a positive beta_max"));
        }
        let gammas = pick(self.gammas, cfg.gammas).unwrap_or_else(|| compare::FIGURE_GAMMAS.to_vec());
        if gammas.is_empty() {
            return Err(invalid("gammas must not be empty"));
        }
        let mut betas = beta_grid(points, beta_max);
        if pick(self.include_zero, cfg.include_zero).unwrap_or(false) {
            betas.insert(0, 0.0);
        }
        let tol = tolerance(pick(self.tol, cfg.tol))?;
        let rows = compare::compare(d.pmf(), &gammas, &betas, tol)?;
        let output = pick(self.output, cfg.output);
        match pick(self.format, cfg.format).unwrap_or(Format::Csv) {
            Format::Json => write_json(output.as_deref(), &rows)?,
            Format::Csv => write_compare(output.as_deref(), &rows)?,
        }
        let worst = compare::max_residual(&rows);
        eprintln!("{kind:?}: mean {:.6}, {} rows, max residual {worst:.3e}", d.mean(), rows.len());
        if worst > RESIDUAL_LIMIT {
            anyhow::bail!("max residual {worst:e} exceeds {RESIDUAL_LIMIT:e}");
        }
        Ok(())
    }
}

fn write_compare(path: Option<&Path>, rows: &[CompareRow]) -> anyhow::Result<()> {
    write_to(path, |out| {
        writeln!(out, "{}", compare::COMPARE_CSV_HEADER)?;
        for r in rows {
            writeln!(out, "{},{},{},{},{}", num(r.beta), num(r.gamma), num(r.s_t), num(r.r_inf), num(r.residual))?;
        }
        Ok(())
    })
}

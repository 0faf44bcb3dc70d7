//! Command-line front end.
//!
//! Every subcommand writes an array of flat records as CSV (default) or
//! JSON. A `--config` file of `key = value` lines supplies default flags;
//! flags given on the command line win.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{build_lattice, LatticeConfig};
use crate::montecarlo::{find_threshold, run_job_on, threshold_to_loss, CurvePoint, NoisePoint, SimJob, SimRecord};
use crate::noise::{self, Fiber, Mtqc2Removal, NoiseParams, Variant};
use crate::optics;
use crate::resources::{self, Constants};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_RESULT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mtqc", version, about = "Multiphoton-qubit RHG lattice simulation and resource analysis")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// File of `key = value` lines used as default flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Logical error rate for each (d, p_Z) point.
    Simulate(SimArgs),
    /// Threshold from the crossing of the p_L curves.
    Threshold(ThresholdArgs),
    /// GHZ3 consumption per star cluster and per gate.
    Resources(ResourceArgs),
    /// Fusion plans and costs of GHZ states.
    PlanGhz(PlanArgs),
    /// Component loss budget.
    LossBudget(LossArgs),
    /// Enumeration and sampling checks of the Bell measurement model.
    VerifyOptics(OpticsArgs),
    /// Photon-pair operation counts of the reference fusion trees.
    Ppo,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct SimArgs {
    #[arg(long, default_value = "mtqc2", value_parser = parse_variant)]
    pub variant: Variant,
    /// Photons per surrounding qubit.
    #[arg(long, default_value_t = 8)]
    pub n: u32,
    /// Photons per lattice qubit.
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    #[arg(long = "n-rep", default_value_t = 1)]
    pub n_rep: u32,
    #[arg(long, default_value_t = 0.01)]
    pub eta: f64,
    /// BSM failure rate; overrides the value derived from eta and n.
    #[arg(long)]
    pub pf: Option<f64>,
    /// Dephasing grid `a:b:step` or comma list; defaults to the value
    /// derived from eta, m and N_rep.
    #[arg(long)]
    pub pz: Option<String>,
    /// Code distances, comma separated.
    #[arg(long, default_value = "3,5,7")]
    pub d: String,
    /// Time extent (default 4d+1).
    #[arg(long)]
    pub t: Option<u32>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long = "mtqc2-removal", default_value = "whole-qubit", value_parser = parse_removal)]
    pub mtqc2_removal: Mtqc2Removal,
    /// Use the approximate constants `(1/2 + eta)^n` for p_f.
    #[arg(long)]
    pub rounded_constants: bool,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// Repetition size for the encoded loss threshold.
    #[arg(long = "enc-rep", default_value_t = 3)]
    pub enc_rep: u32,
    /// Also write the scanned curve points here.
    #[arg(long)]
    pub curves: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct ResourceArgs {
    #[arg(long, default_value_t = 8)]
    pub n: u32,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    #[arg(long, default_value_t = 0.01)]
    pub eta: f64,
    #[arg(long, default_value = "mtqc1", value_parser = parse_variant)]
    pub variant: Variant,
    #[arg(long = "n-rep", default_value_t = 1)]
    pub n_rep: u32,
    /// Code distance for the per-gate overhead.
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub rounded_constants: bool,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct PlanArgs {
    /// GHZ sizes, comma separated.
    #[arg(long, default_value = "4,5,6,7,8,9,10,11,18")]
    pub m: String,
    #[arg(long, default_value_t = 0.01)]
    pub eta: f64,
    #[arg(long)]
    pub rounded_constants: bool,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct LossArgs {
    /// Total loss to split evenly over source, switches and detectors.
    #[arg(long = "eta-total")]
    pub eta_total: Option<f64>,
    #[arg(long = "eta-soc")]
    pub eta_soc: Option<f64>,
    /// Loss per switch.
    #[arg(long = "eta-s")]
    pub eta_s: Option<f64>,
    #[arg(long = "eta-det")]
    pub eta_det: Option<f64>,
    /// Time steps spent in delay lines and switches.
    #[arg(long, default_value_t = 3)]
    pub kappa: u32,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct OpticsArgs {
    #[arg(long = "max-n", default_value_t = 8)]
    pub max_n: u32,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_removal(s: &str) -> std::result::Result<Mtqc2Removal, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `a:b:step` (inclusive) or a comma list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number '{x}' in grid '{s}'")));
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(Error::Config(format!("grid '{s}' needs a <= b and step > 0")));
            }
            let k = ((b - a) / step + 1e-9).floor() as usize;
            (0..=k).map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12).collect()
        }
        [_] => s.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::Config(format!("grid '{s}' is neither a:b:step nor a list"))),
    };
    if grid.is_empty() {
        return Err(Error::Config("empty grid".into()));
    }
    Ok(grid)
}

pub fn parse_list(s: &str) -> Result<Vec<u32>> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| Error::Config(format!("bad integer '{x}' in list '{s}'"))))
        .collect::<Result<Vec<_>>>()?;
    if v.is_empty() {
        return Err(Error::Config("empty list".into()));
    }
    Ok(v)
}

/// Reads `key = value` lines (`#` comments, blank lines ignored) into
/// `--key=value` flags. A value of `true` yields a bare switch.
pub fn config_flags(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!("config line {}: expected key = value", i + 1)));
        };
        let (k, v) = (k.trim().replace('_', "-"), v.trim());
        match v {
            "true" => out.push(format!("--{k}")),
            "false" => {}
            _ => out.push(format!("--{k}={v}")),
        }
    }
    Ok(out)
}

const SUBCOMMANDS: [&str; 7] = ["simulate", "threshold", "resources", "plan-ghz", "loss-budget", "verify-optics", "ppo"];

/// Inserts config-file flags right after the subcommand so later
/// command-line flags override them.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if a == "--config" {
            path = args.get(i + 1).cloned();
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = fs::read_to_string(&path).map_err(|e| Error::Config(format!("cannot read config {path}: {e}")))?;
    let flags = config_flags(&text)?;
    let Some(pos) = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else { return Ok(args) };
    let mut out = args[..=pos].to_vec();
    out.extend(flags);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

fn emit<T: Serialize>(global: &GlobalArgs, rows: &[T]) -> Result<()> {
    let text = render(global.format, rows)?;
    match &global.out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Config(e.to_string())),
    }
}

/// Serializes records as CSV (with header) or a JSON array.
pub fn render<T: Serialize>(format: Format, rows: &[T]) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows).map_err(|e| Error::Config(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| Error::Config(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

/// Runs the simulation grid of `args`.
pub fn simulate_records(args: &SimArgs, seed: u64, workers: usize) -> Result<Vec<SimRecord>> {
    let params = NoiseParams::new(args.eta, args.n, args.m, args.n_rep, args.variant)?;
    let p_f = match args.pf {
        Some(p) => p,
        None if args.rounded_constants => noise::nbsm_failure_rate_approx(args.eta, args.n),
        None => params.p_f(),
    };
    let grid = match &args.pz {
        Some(g) => parse_grid(g)?,
        None => vec![params.p_z()],
    };
    let ds = parse_list(&args.d)?;
    if args.trials < 1 {
        return Err(crate::error::domain("trials", "must be >= 1"));
    }
    let mut out = Vec::with_capacity(ds.len() * grid.len());
    for &d in &ds {
        let cfg = match args.t {
            Some(t) => LatticeConfig::with_t(d, t)?,
            None => LatticeConfig::new(d)?,
        };
        let lattice = build_lattice(cfg)?;
        for &p_z in &grid {
            let noise = NoisePoint { variant: args.variant, p_f, p_z, mtqc2: args.mtqc2_removal };
            let job = SimJob { lattice: cfg, noise, trials: args.trials, seed };
            let r = run_job_on(&lattice, &job, workers)?;
            out.push(SimRecord {
                variant: args.variant,
                d,
                t: cfg.t,
                n: args.n,
                m: args.m,
                n_rep: args.n_rep,
                eta: args.eta,
                p_f,
                p_z,
                trials: args.trials,
                logical_loss_rate: r.logical_loss_rate,
                p_l: r.p_l,
                ci99: r.ci99,
                p_trial: r.p_trial,
                seed,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRecord {
    pub variant: Variant,
    pub n: u32,
    pub m: u32,
    pub p_f: f64,
    #[serde(rename = "p_Z_th")]
    pub p_th: f64,
    pub uncertainty: f64,
    /// Loss threshold with unencoded lattice qubits.
    pub eta_th: f64,
    #[serde(rename = "N_rep")]
    pub enc_rep: u32,
    pub eta_th_enc: f64,
    /// Adjacent-pair crossings as `d1-d2:p` separated by `;`.
    pub crossings: String,
}

pub fn threshold_record(args: &ThresholdArgs, records: &[SimRecord]) -> Result<ThresholdRecord> {
    let pts: Vec<CurvePoint> = records.iter().map(|r| CurvePoint { d: r.d, p_z: r.p_z, p_l: r.p_l }).collect();
    let th = find_threshold(&pts)?;
    Ok(ThresholdRecord {
        variant: args.sim.variant,
        n: args.sim.n,
        m: args.sim.m,
        p_f: records.first().map(|r| r.p_f).unwrap_or(0.0),
        p_th: th.p_th,
        uncertainty: th.uncertainty,
        eta_th: threshold_to_loss(th.p_th, args.sim.m, 1)?,
        enc_rep: args.enc_rep,
        eta_th_enc: threshold_to_loss(th.p_th, args.sim.m, args.enc_rep)?,
        crossings: th.crossings.iter().map(|(a, b, p)| format!("{a}-{b}:{p}")).collect::<Vec<_>>().join(";"),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceRow {
    pub n: u32,
    pub m: u32,
    pub eta: f64,
    pub variant: Variant,
    #[serde(rename = "N_rep")]
    pub n_rep: u32,
    pub constants: Constants,
    pub d: Option<u32>,
    #[serde(rename = "N_enc")]
    pub n_enc: Option<f64>,
    #[serde(rename = "N_star")]
    pub n_star: f64,
    #[serde(rename = "N_gate")]
    pub n_gate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanRow {
    pub m: u32,
    pub depth: usize,
    pub final_fusion: String,
    /// Fusions per round, e.g. `3+3,3+3|4+4`.
    pub steps: String,
    pub lossless: u64,
    pub eta: f64,
    pub lossy: f64,
}

pub fn plan_rows(sizes: &[u32], eta: f64, c: Constants) -> Result<Vec<PlanRow>> {
    sizes
        .iter()
        .map(|&m| {
            let plan = resources::plan_ghz(m)?;
            let fuse = |f: &resources::Fusion| format!("{}+{}", f.left, f.right);
            Ok(PlanRow {
                m,
                depth: plan.depth(),
                final_fusion: plan.final_fusion().map(|f| fuse(&f)).unwrap_or_else(|| "-".into()),
                steps: plan.steps.iter().map(|r| r.iter().map(fuse).collect::<Vec<_>>().join(",")).collect::<Vec<_>>().join("|"),
                lossless: resources::ghz_cost_lossless(m)?,
                eta,
                lossy: resources::ghz_cost(m, eta, c)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossRow {
    pub kappa: u32,
    pub eta_soc: f64,
    pub eta_dly: f64,
    pub eta_swc: f64,
    pub eta_det: f64,
    pub eta_s: f64,
    pub eta_total: f64,
}

pub fn loss_row(args: &LossArgs) -> Result<LossRow> {
    let fiber = Fiber::default();
    let b = match (args.eta_total, args.eta_soc, args.eta_s, args.eta_det) {
        (Some(t), None, None, None) => noise::balanced_budget(t, args.kappa, fiber)?,
        (None, Some(soc), Some(s), Some(det)) => noise::LossBudget::from_components(soc, s, det, args.kappa, fiber)?,
        _ => {
            return Err(Error::Config("give either --eta-total or all of --eta-soc, --eta-s, --eta-det".into()));
        }
    };
    Ok(LossRow {
        kappa: b.kappa,
        eta_soc: b.eta_soc,
        eta_dly: b.eta_dly,
        eta_swc: b.eta_swc,
        eta_det: b.eta_det,
        eta_s: b.eta_s,
        eta_total: noise::compose_loss(&b),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PpoRow {
    pub state: &'static str,
    pub ppo: f64,
}

pub fn ppo_rows() -> Result<Vec<PpoRow>> {
    use resources::{c3_ppo_tree, c3_prime_ppo_tree, ghz_ppo_tree, ppo_cost, tm_chain};
    Ok(vec![
        PpoRow { state: "GHZ4", ppo: ppo_cost(&ghz_ppo_tree(4)?)? },
        PpoRow { state: "GHZ9", ppo: ppo_cost(&ghz_ppo_tree(9)?)? },
        PpoRow { state: "C3'", ppo: ppo_cost(&c3_prime_ppo_tree(8, 2)?)? },
        PpoRow { state: "C3", ppo: ppo_cost(&c3_ppo_tree(8)?)? },
        PpoRow { state: "TM C3'", ppo: ppo_cost(&tm_chain(1, 0.25))? },
        PpoRow { state: "TM C3", ppo: ppo_cost(&tm_chain(3, 0.25))? },
    ])
}

fn constants(rounded: bool) -> Constants {
    if rounded {
        Constants::Rounded
    } else {
        Constants::Exact
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let g = &cli.global;
    match &cli.command {
        Command::Simulate(a) => emit(g, &simulate_records(a, g.seed, g.workers)?)?,
        Command::Threshold(a) => {
            let recs = simulate_records(&a.sim, g.seed, g.workers)?;
            if let Some(p) = &a.curves {
                fs::write(p, render(g.format, &recs)?).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display())))?;
            }
            emit(g, &[threshold_record(a, &recs)?])?;
        }
        Command::Resources(a) => {
            let e = resources::estimate(a.n, a.m, a.eta, a.variant, a.n_rep, a.d, constants(a.rounded_constants))?;
            emit(
                g,
                &[ResourceRow {
                    n: e.n,
                    m: e.m,
                    eta: e.eta,
                    variant: e.variant,
                    n_rep: e.n_rep,
                    constants: e.constants,
                    d: e.d,
                    n_enc: e.n_enc,
                    n_star: e.n_star,
                    n_gate: e.n_gate,
                }],
            )?;
        }
        Command::PlanGhz(a) => emit(g, &plan_rows(&parse_list(&a.m)?, a.eta, constants(a.rounded_constants))?)?,
        Command::LossBudget(a) => emit(g, &[loss_row(a)?])?,
        Command::VerifyOptics(a) => {
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            let checks = optics::verify_all(a.max_n, a.trials, &mut rng)?;
            emit(g, &checks)?;
            if checks.iter().any(|c| !c.pass) {
                return Ok(EXIT_NO_RESULT);
            }
        }
        Command::Ppo => emit(g, &ppo_rows()?)?,
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code. Diagnostics go to stderr.
pub fn run(args: Vec<String>) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NoCrossing { .. } | Error::Extrapolation(_) | Error::Infeasible(_) => EXIT_NO_RESULT,
                _ => EXIT_USAGE,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0.02:0.05:0.005").unwrap().len(), 7);
        assert_eq!(parse_grid("0.02:0.05:0.005").unwrap()[6], 0.05);
        assert_eq!(parse_grid("0.1,0.2").unwrap(), vec![0.1, 0.2]);
        assert!(parse_grid("0.05:0.02:0.01").is_err());
        assert!(parse_grid("a:b").is_err());
    }

    #[test]
    fn config_lines() {
        let f = config_flags("# comment\nd = 3,5\n\nrounded_constants = true\ntrials=10\n").unwrap();
        assert_eq!(f, vec!["--d=3,5", "--rounded-constants", "--trials=10"]);
        assert!(config_flags("novalue").is_err());
    }

    #[test]
    fn flags_override_config() {
        let args: Vec<String> = ["mtqc", "simulate", "--trials", "5"].iter().map(|s| s.to_string()).collect();
        let mut with = args[..2].to_vec();
        with.push("--trials=9".into());
        with.extend_from_slice(&args[2..]);
        let cli = Cli::try_parse_from(with).unwrap();
        let Command::Simulate(a) = cli.command else { panic!() };
        assert_eq!(a.trials, 5);
    }

    #[test]
    fn ppo_table() {
        let rows = ppo_rows().unwrap();
        assert_eq!(rows.iter().map(|r| r.ppo).collect::<Vec<_>>(), vec![2.0, 34.0, 218.0, 378.0, 4.0, 84.0]);
    }
}

//! Command-line configuration and run orchestration.
//!
//! Settings come from three layers: built-in defaults, an optional config
//! file of `key = value` lines, and command-line flags. Later layers win.
//! Both the file and the flags go through the same key parser, so a bad
//! value is reported the same way wherever it came from.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::amount::{Amount, Ppm, PPM_ONE};
use crate::chain::FrscMode;
use crate::error::{Error, Result};
use crate::experiments::exp4::{fraction_grid, run_exp4, Exp4Config, Exp4Result};
use crate::experiments::{
    self, emit_csv, series, write_outputs, Horizon, SeriesOutput, SeriesSetup, C_GRID, EXP1_LAMBDAS, FOUR_LAMBDAS,
    RHO_EFFECTIVE_5292,
};
use crate::fee_model::{FeeScenario, InflowRate, DEFAULT_BLOCK_CAP, LONG_TERM_SCENARIO, TRIANGLE_SCENARIO};
use crate::frsc::{FrscSet, SplitParams};
use crate::learning::DEFAULT_GAMMA;
use crate::strategies::DEFAULT_KAPPA;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_OUT_DIR: &str = "./out";
pub const DEFAULT_C: Ppm = Ppm::from_const(700_000);

/// Keys accepted in config files. Flags use the same names with `-`.
pub const KEYS: [&str; 14] = [
    "seed",
    "out_dir",
    "scenario",
    "c",
    "frsc",
    "miners",
    "blocks",
    "games",
    "full_mempool",
    "block_cap",
    "gamma",
    "kappa",
    "fraction_grid",
    "no_frsc",
];

#[derive(Parser, Debug)]
#[command(
    name = "frsc-sim",
    version,
    about = "Mining simulator with fee-redistribution contracts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Single contracts of two lengths under three contract shares.
    Exp1,
    /// Four contracts: share sweep and redistribution-ratio study.
    Exp2,
    /// Four contracts against one contract of the same effective length.
    Exp3,
    /// Undercutting games with learning miners.
    Exp4,
    /// One honest series with the given contracts and scenario.
    Run,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Exp1 => "exp1",
            Command::Exp2 => "exp2",
            Command::Exp3 => "exp3",
            Command::Exp4 => "exp4",
            Command::Run => "run",
        }
    }
}

/// Raw flag values; parsed and validated together with the config file.
#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    #[arg(long, global = true)]
    pub seed: Option<String>,
    #[arg(long, global = true)]
    pub out_dir: Option<String>,
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Fee scenario file.
    #[arg(long, global = true)]
    pub scenario: Option<String>,
    /// Contract share of block fees, in ppm.
    #[arg(long, global = true)]
    pub c: Option<String>,
    /// `lambda,rho_ppm`; repeat for several contracts.
    #[arg(long, global = true)]
    pub frsc: Vec<String>,
    #[arg(long, global = true)]
    pub miners: Option<String>,
    /// Blocks per game (exp4) or per series.
    #[arg(long, global = true)]
    pub blocks: Option<String>,
    #[arg(long, global = true)]
    pub games: Option<String>,
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub full_mempool: Option<String>,
    /// Per-block fee cap in sat when the mempool is full.
    #[arg(long, global = true)]
    pub block_cap: Option<String>,
    /// Exp3 exploration rate, in ppm.
    #[arg(long, global = true)]
    pub gamma: Option<String>,
    /// Share of claimable fees Function-Fork leaves behind, in ppm.
    #[arg(long, global = true)]
    pub kappa: Option<String>,
    /// `start,stop,step` compliant fractions in ppm.
    #[arg(long, global = true)]
    pub fraction_grid: Option<String>,
    /// exp4: run without contracts only. run: mine without contracts.
    #[arg(long, global = true)]
    pub no_frsc: bool,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut put = |k: &'static str, v: &Option<String>| {
            if let Some(v) = v {
                out.push((k, v.clone()));
            }
        };
        put("seed", &self.seed);
        put("out_dir", &self.out_dir);
        put("scenario", &self.scenario);
        put("c", &self.c);
        put("miners", &self.miners);
        put("blocks", &self.blocks);
        put("games", &self.games);
        put("full_mempool", &self.full_mempool);
        put("block_cap", &self.block_cap);
        put("gamma", &self.gamma);
        put("kappa", &self.kappa);
        put("fraction_grid", &self.fraction_grid);
        out.extend(self.frsc.iter().map(|v| ("frsc", v.clone())));
        if self.no_frsc {
            out.push(("no_frsc", "true".into()));
        }
        out
    }
}

/// A validated run configuration. `None` fields fall back to the
/// subcommand's own default.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub scenario_path: Option<PathBuf>,
    pub frsc: Vec<(u64, Ppm)>,
    pub c: Option<Ppm>,
    pub miners: usize,
    pub blocks: Option<u64>,
    pub games: u64,
    pub fraction_grid: (Ppm, Ppm, Ppm),
    pub full_mempool: Option<bool>,
    pub block_cap: Amount,
    pub gamma: Ppm,
    pub kappa: Ppm,
    pub no_frsc: bool,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        let exp4 = Exp4Config::default();
        RunConfig {
            command,
            seed: DEFAULT_SEED,
            out_dir: PathBuf::from(DEFAULT_OUT_DIR),
            scenario_path: None,
            frsc: Vec::new(),
            c: None,
            miners: exp4.miners,
            blocks: None,
            games: exp4.games,
            fraction_grid: (Ppm::ZERO, Ppm::ONE, Ppm::from_const(50_000)),
            full_mempool: None,
            block_cap: DEFAULT_BLOCK_CAP,
            gamma: DEFAULT_GAMMA,
            kappa: DEFAULT_KAPPA,
            no_frsc: false,
        }
    }

    pub fn c(&self) -> Ppm {
        self.c.unwrap_or(DEFAULT_C)
    }

    /// Series experiments default to the full-mempool cap, games do not.
    pub fn full_mempool(&self) -> bool {
        self.full_mempool.unwrap_or(self.command != Command::Exp4)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "seed" => self.seed = parse_u64(key, v)?,
            "out_dir" => self.out_dir = PathBuf::from(v),
            "scenario" => self.scenario_path = Some(PathBuf::from(v)),
            "c" => self.c = Some(parse_ppm(key, v)?),
            "frsc" => {
                let (l, r) = v
                    .split_once(',')
                    .ok_or_else(|| Error::config(key, format!("expected `lambda,rho_ppm`, got `{v}`")))?;
                let lambda = parse_u64(key, l.trim())?;
                if lambda == 0 {
                    return Err(Error::config(key, "lambda must be at least 1"));
                }
                self.frsc.push((lambda, parse_ppm(key, r.trim())?));
            }
            "miners" => {
                self.miners = parse_u64(key, v)? as usize;
                if self.miners == 0 {
                    return Err(Error::config(key, "must be at least 1"));
                }
            }
            "blocks" => self.blocks = Some(parse_u64(key, v)?),
            "games" => self.games = parse_u64(key, v)?,
            "full_mempool" => self.full_mempool = Some(parse_bool(key, v)?),
            "block_cap" => {
                self.block_cap = Amount::from_sat(parse_u64(key, v)?);
                if self.block_cap == Amount::ZERO {
                    return Err(Error::config(key, "must be positive"));
                }
            }
            "gamma" => {
                self.gamma = parse_ppm(key, v)?;
                if self.gamma == Ppm::ZERO {
                    return Err(Error::config(key, "must be positive"));
                }
            }
            "kappa" => self.kappa = parse_ppm(key, v)?,
            "fraction_grid" => {
                let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                let [a, b, s] = parts[..] else {
                    return Err(Error::config(
                        key,
                        format!("expected `start,stop,step` in ppm, got `{v}`"),
                    ));
                };
                let grid = (parse_ppm(key, a)?, parse_ppm(key, b)?, parse_ppm(key, s)?);
                fraction_grid(grid.0, grid.1, grid.2)?;
                self.fraction_grid = grid;
            }
            "no_frsc" => self.no_frsc = parse_bool(key, v)?,
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if !self.frsc.is_empty() {
            let sum: u64 = self.frsc.iter().map(|(_, r)| r.value() as u64).sum();
            if sum != PPM_ONE as u64 {
                return Err(Error::config(
                    "frsc",
                    format!("rho values must sum to {PPM_ONE} ppm, got {sum}"),
                ));
            }
        }
        Ok(())
    }

    /// The fee scenario for this run, with the mempool mode applied.
    pub fn scenario(&self) -> Result<FeeScenario> {
        let base = match &self.scenario_path {
            Some(p) => load_scenario(p)?,
            None => match self.command {
                Command::Exp1 | Command::Exp2 => FeeScenario::parse(LONG_TERM_SCENARIO)?,
                Command::Exp3 => FeeScenario::parse(TRIANGLE_SCENARIO)?,
                Command::Exp4 | Command::Run => FeeScenario::constant(InflowRate::per_interval(5_000_000_000, 600)),
            },
        };
        if self.full_mempool() {
            base.with_full_mempool(self.block_cap)
        } else {
            Ok(base.without_full_mempool())
        }
    }
}

fn load_scenario(path: &Path) -> Result<FeeScenario> {
    if !path.is_file() {
        return Err(Error::config(
            "scenario",
            format!("file `{}` does not exist", path.display()),
        ));
    }
    FeeScenario::load(path)
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    v.parse()
        .map_err(|_| Error::config(key, format!("`{v}` is not a non-negative integer")))
}

fn parse_ppm(key: &str, v: &str) -> Result<Ppm> {
    let n: u32 = v
        .parse()
        .map_err(|_| Error::config(key, format!("`{v}` is not an integer ppm value")))?;
    Ppm::new(n).map_err(|_| Error::config(key, format!("{n} ppm is outside [0, {PPM_ONE}]")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::config(key, format!("`{v}` is not a boolean"))),
    }
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("line {}", i + 1), "expected `key = value`"))?;
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::config(key, "unknown key"));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

impl Cli {
    /// Merges defaults, file contents and flags into a validated config.
    pub fn resolve(&self, file: Option<&str>) -> Result<RunConfig> {
        let mut cfg = RunConfig::defaults(self.command);
        let flags = self.flags.pairs();
        let file_pairs = file.map(parse_config_file).transpose()?.unwrap_or_default();
        let flag_frsc = flags.iter().any(|(k, _)| *k == "frsc");
        for (k, v) in &file_pairs {
            if k == "frsc" && flag_frsc {
                continue;
            }
            cfg.set(k, v)?;
        }
        for (k, v) in &flags {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses command-line arguments (program name first) together with the
/// contents of the config file, if one is used.
pub fn parse_config<I, T>(args: I, file: Option<&str>) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::config("args", e.to_string().trim_end().to_string()))?;
    cli.resolve(file)
}

/// What a run wrote.
#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    /// Human-readable result lines.
    pub notes: Vec<String>,
}

fn series_setup(cfg: &RunConfig, scenario: FeeScenario) -> Result<SeriesSetup> {
    match cfg.blocks {
        Some(n) => Ok(SeriesSetup {
            mean_fees: scenario.segments()[0].rate.over_secs(600),
            scenario,
            horizon: Horizon::Blocks(n),
            seed: cfg.seed,
        }),
        None => SeriesSetup::for_scenario(scenario, cfg.seed),
    }
}

fn written(outputs: &[SeriesOutput], out_dir: &Path, report: &mut RunReport) -> Result<()> {
    write_outputs(outputs, out_dir)?;
    report.files.extend(outputs.iter().map(|o| out_dir.join(&o.name)));
    Ok(())
}

pub fn exp4_config(cfg: &RunConfig) -> Result<Exp4Config> {
    let (a, b, s) = cfg.fraction_grid;
    let base = Exp4Config::default();
    Ok(Exp4Config {
        miners: cfg.miners,
        blocks_per_game: cfg.blocks.unwrap_or(base.blocks_per_game),
        games: cfg.games,
        fractions: fraction_grid(a, b, s)?,
        c: cfg.c(),
        frsc_specs: if cfg.frsc.is_empty() {
            base.frsc_specs
        } else {
            cfg.frsc.clone()
        },
        kappa: cfg.kappa,
        gamma: cfg.gamma,
        seed: cfg.seed,
        modes: if cfg.no_frsc { vec![false] } else { vec![false, true] },
        ..base
    })
}

/// One-line description of the crossing points of an exp4 sweep.
pub fn crossing_note(result: &Exp4Result, modes: &[bool]) -> Vec<String> {
    modes
        .iter()
        .map(|&on| {
            let label = if on { "with contracts" } else { "without contracts" };
            match result.crossing(on) {
                Some(f) => format!("{label}: undercutting stops paying from compliant fraction {f}"),
                None => format!("{label}: undercutting pays at every fraction up to the top of the grid"),
            }
        })
        .collect()
}

/// Runs the configured subcommand and writes its CSV files.
pub fn execute(cfg: &RunConfig) -> Result<RunReport> {
    let mut report = RunReport::default();
    let out = cfg.out_dir.as_path();
    match cfg.command {
        Command::Exp1 => {
            if !cfg.frsc.is_empty() {
                report
                    .notes
                    .push("exp1 uses its fixed contract lengths; --frsc ignored".into());
            }
            let setup = series_setup(cfg, cfg.scenario()?)?;
            let grid = cfg.c.map_or(C_GRID.to_vec(), |c| vec![c]);
            written(&experiments::run_exp1(&setup, &EXP1_LAMBDAS, &grid)?, out, &mut report)?;
        }
        Command::Exp2 => {
            if !cfg.frsc.is_empty() {
                report
                    .notes
                    .push("exp2 uses its fixed contract sets; --frsc ignored".into());
            }
            let setup = series_setup(cfg, cfg.scenario()?)?;
            let grid = cfg.c.map_or(C_GRID.to_vec(), |c| vec![c]);
            written(&experiments::run_exp2(&setup, &grid, cfg.c())?, out, &mut report)?;
        }
        Command::Exp3 => {
            let multi = if cfg.frsc.is_empty() {
                experiments::specs(&FOUR_LAMBDAS, &RHO_EFFECTIVE_5292)
            } else {
                cfg.frsc.clone()
            };
            let params = SplitParams::from_contract_share(cfg.c());
            let eff = FrscSet::init_genesis(Amount::ZERO, params, &multi)?.effective_lambda();
            if !eff.is_integer() {
                return Err(Error::config(
                    "frsc",
                    format!("effective length {eff} is not a whole number of blocks, no single contract matches it"),
                ));
            }
            let single = vec![(eff.to_integer(), Ppm::ONE)];
            let setup = series_setup(cfg, cfg.scenario()?)?;
            let r = experiments::run_exp3(&setup, &single, &multi, cfg.c())?;
            written(&r.outputs(1, multi.len()), out, &mut report)?;
            report.notes.push(format!(
                "single contract of {} blocks against {} contracts",
                eff,
                multi.len()
            ));
        }
        Command::Exp4 => {
            let e4 = exp4_config(cfg)?;
            let result = run_exp4(&e4)?;
            let path = out.join("exp4_summary.csv");
            emit_csv(&result.summary_table(), &path)?;
            report.files.push(path);
            report.notes.extend(crossing_note(&result, &e4.modes));
        }
        Command::Run => {
            let scenario = cfg.scenario()?;
            let specs = if cfg.frsc.is_empty() {
                vec![(2016, Ppm::ONE)]
            } else {
                cfg.frsc.clone()
            };
            let mut setup = series_setup(cfg, scenario.clone()).or_else(|_| {
                Ok::<_, Error>(SeriesSetup {
                    mean_fees: scenario.segments()[0].rate.over_secs(600),
                    scenario,
                    horizon: Horizon::Blocks(10_000),
                    seed: cfg.seed,
                })
            })?;
            let table = if cfg.no_frsc {
                setup.mean_fees = Amount::ZERO;
                let recs = series::run_series(&setup.scenario, None, FrscMode::Off, setup.horizon, cfg.seed)?;
                series::series_table(&recs, 0)
            } else {
                let (_, recs) = setup.run(&specs, cfg.c())?;
                series::series_table(&recs, specs.len())
            };
            let path = out.join("run.csv");
            emit_csv(&table, &path)?;
            report.files.push(path);
        }
    }
    Ok(report)
}

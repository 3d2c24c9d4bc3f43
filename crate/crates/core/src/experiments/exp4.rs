//! Undercutting sweep: how many compliant miners does it take before
//! undercutting stops paying?
//!
//! For every compliant fraction on the grid, a simulation plays `games`
//! sequential games. Compliant miners always run `DefaultCompliant`; the
//! remaining miners are Exp3 learners choosing among `PettyCompliant`,
//! `LazyFork` and `FunctionFork` before every game. Profits are averaged over
//! the final part of the games, once learning has settled.
//!
//! With contracts on, the genesis balances of each game are the configured
//! base scaled by `1 + r`, where `r` is the orphan rate of the previous game:
//! orphans stretch the time per main-chain block and therefore the fees one
//! window of blocks collects.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::amount::{Amount, Ppm, PPM_ONE};
use crate::chain::{even_hash_power, FrscMode, Miner};
use crate::error::{Error, Result};
use crate::experiments::csv_out::CsvTable;
use crate::experiments::game::{run_game, GameSetup};
use crate::experiments::BLOCK_RATE;
use crate::fee_model::{FeeScenario, InflowRate};
use crate::frsc::{FrscSet, SplitParams};
use crate::learning::{LearnerState, DEFAULT_GAMMA};
use crate::strategies::{Strategy, DEFAULT_KAPPA};

pub const SUMMARY_HEADER: [&str; 5] = [
    "compliant_fraction",
    "frsc_enabled",
    "strategy",
    "mean_profit_sat_per_block",
    "orphan_rate",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Exp4Config {
    pub miners: usize,
    pub blocks_per_game: u64,
    pub games: u64,
    /// Compliant fractions to simulate, ascending.
    pub fractions: Vec<Ppm>,
    pub c: Ppm,
    pub frsc_specs: Vec<(u64, Ppm)>,
    /// Expected fees per block used for the base genesis balances.
    pub mean_fees: Amount,
    pub inflow: InflowRate,
    pub kappa: Ppm,
    pub gamma: Ppm,
    pub seed: u64,
    /// Contract modes to sweep; `true` = contracts on.
    pub modes: Vec<bool>,
    /// Trailing share of games that profits are averaged over.
    pub tail: Ppm,
}

impl Default for Exp4Config {
    /// Desk-scale defaults.
    fn default() -> Self {
        Exp4Config {
            miners: 20,
            blocks_per_game: 1_000,
            games: 2_000,
            fractions: fraction_grid(Ppm::ZERO, Ppm::ONE, Ppm::from_const(50_000)).expect("valid grid"),
            c: Ppm::from_const(700_000),
            frsc_specs: vec![(2016, Ppm::ONE)],
            mean_fees: Amount::from_sat(5_000_000_000),
            inflow: InflowRate::per_interval(5_000_000_000, 600),
            kappa: DEFAULT_KAPPA,
            gamma: DEFAULT_GAMMA,
            seed: 42,
            modes: vec![false, true],
            tail: Ppm::from_const(200_000),
        }
    }
}

/// `start, start + step, ...` up to and including `stop`.
pub fn fraction_grid(start: Ppm, stop: Ppm, step: Ppm) -> Result<Vec<Ppm>> {
    if step == Ppm::ZERO {
        return Err(Error::config("fraction_grid", "step must be positive"));
    }
    if start > stop {
        return Err(Error::config("fraction_grid", "start must not exceed stop"));
    }
    let mut out = Vec::new();
    let mut v = start.value();
    while v <= stop.value() {
        out.push(Ppm::from_const(v));
        v += step.value();
    }
    Ok(out)
}

/// Learner arms: the three non-default strategies.
pub fn learner_arms(kappa: Ppm) -> Vec<Strategy> {
    vec![
        Strategy::PettyCompliant,
        Strategy::LazyFork,
        Strategy::function_fork(kappa),
    ]
}

/// Number of compliant miners for a fraction, rounded half up.
pub fn compliant_count(miners: usize, fraction: Ppm) -> usize {
    ((miners as u64 * fraction.value() as u64 * 2 + PPM_ONE as u64) / (2 * PPM_ONE as u64)) as usize
}

/// Genesis balances for the next game: `base * (1 + orphaned / mined)`,
/// rounded half up.
pub fn orphan_adjusted(base: &FrscSet, orphaned: u64, mined: u64) -> FrscSet {
    if mined == 0 {
        return base.clone();
    }
    base.scale_balances(mined + orphaned, mined)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrategyProfit {
    pub strategy: &'static str,
    /// Main-chain earnings per unit of hash power per mined block.
    pub mean_profit_per_block: f64,
}

/// Tail-averaged outcome of one (fraction, mode) simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSummary {
    pub fraction: Ppm,
    pub frsc_enabled: bool,
    pub compliant_miners: usize,
    pub profits: Vec<StrategyProfit>,
    pub orphan_rate: f64,
    /// Every game's result conserved value exactly.
    pub conserved: bool,
}

impl PointSummary {
    pub fn profit(&self, label: &str) -> Option<f64> {
        self.profits
            .iter()
            .find(|p| p.strategy == label)
            .map(|p| p.mean_profit_per_block)
    }

    /// Whether some undercutting strategy out-earned `DefaultCompliant`
    /// (or did not face any compliant miner at all).
    pub fn undercutting_pays(&self) -> bool {
        let default = self.profit(Strategy::DefaultCompliant.label());
        self.profits
            .iter()
            .filter(|p| p.strategy == Strategy::LazyFork.label() || p.strategy == "function_fork")
            .any(|p| default.is_none_or(|d| p.mean_profit_per_block > d))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Exp4Result {
    pub points: Vec<PointSummary>,
}

impl Exp4Result {
    /// Smallest grid fraction from which on undercutting never out-earns
    /// compliance, for one contract mode.
    pub fn crossing(&self, frsc_enabled: bool) -> Option<Ppm> {
        let mut pts: Vec<&PointSummary> = self.points.iter().filter(|p| p.frsc_enabled == frsc_enabled).collect();
        pts.sort_by_key(|p| p.fraction);
        let mut crossing = None;
        for p in pts.iter().rev() {
            if p.undercutting_pays() {
                break;
            }
            crossing = Some(p.fraction);
        }
        crossing
    }

    /// Summary schema v1, one row per (point, strategy).
    pub fn summary_table(&self) -> CsvTable {
        let mut t = CsvTable::new(SUMMARY_HEADER);
        for p in &self.points {
            for s in &p.profits {
                t.push(vec![
                    p.fraction.to_string(),
                    p.frsc_enabled.to_string(),
                    s.strategy.to_string(),
                    format!("{}", s.mean_profit_per_block.round() as i64),
                    format!("{:.6}", p.orphan_rate),
                ]);
            }
        }
        t
    }
}

#[derive(Default)]
struct TailStats {
    // (label, earned sat, hash-power-weighted blocks in ppm units)
    by_strategy: Vec<(&'static str, u128, u128)>,
    orphaned: u64,
    mined: u64,
}

impl TailStats {
    fn add(&mut self, label: &'static str, earned: Amount, hash_ppm: u32, blocks: u64) {
        let exposure = hash_ppm as u128 * blocks as u128;
        match self.by_strategy.iter_mut().find(|e| e.0 == label) {
            Some(e) => {
                e.1 += earned.sat() as u128;
                e.2 += exposure;
            }
            None => self.by_strategy.push((label, earned.sat() as u128, exposure)),
        }
    }
}

const STRATEGY_ORDER: [&str; 4] = ["default_compliant", "petty_compliant", "lazy_fork", "function_fork"];

/// Plays every game of one (fraction, mode) point.
pub fn run_point(cfg: &Exp4Config, fraction: Ppm, frsc_enabled: bool, stream: u64) -> Result<PointSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);

    let n = cfg.miners;
    let compliant = compliant_count(n, fraction).min(n);
    let power = even_hash_power(n);
    let mut miners: Vec<Miner> = power
        .iter()
        .enumerate()
        .map(|(id, &hash_power)| Miner {
            id,
            hash_power,
            strategy: Strategy::DefaultCompliant,
        })
        .collect();
    let gamma = cfg.gamma.as_f64();
    if gamma <= 0.0 {
        return Err(Error::config("gamma", "must be positive"));
    }
    let mut learners: Vec<LearnerState> = (compliant..n)
        .map(|_| LearnerState::new(learner_arms(cfg.kappa), gamma))
        .collect();

    let params = SplitParams::from_contract_share(cfg.c);
    let mode = if frsc_enabled {
        FrscMode::On(params)
    } else {
        FrscMode::Off
    };
    let base = FrscSet::init_genesis(cfg.mean_fees, params, &cfg.frsc_specs)?;
    let scenario = FeeScenario::constant(cfg.inflow);

    let tail_games = (cfg.games * cfg.tail.value() as u64).div_ceil(PPM_ONE as u64).max(1);
    let tail_start = cfg.games.saturating_sub(tail_games);
    let mut stats = TailStats::default();
    let mut genesis = base.clone();
    let mut conserved = true;

    for game in 0..cfg.games {
        let choices: Vec<usize> = learners.iter().map(|l| l.choose(&mut rng)).collect();
        for ((m, l), &arm) in miners[compliant..].iter_mut().zip(&learners).zip(&choices) {
            m.strategy = l.arms()[arm];
        }
        let setup = GameSetup {
            miners: &miners,
            scenario: &scenario,
            mode,
            genesis: Some(genesis.clone()),
            blocks: cfg.blocks_per_game,
            block_rate: BLOCK_RATE,
        };
        let result = run_game(&setup, &mut rng)?;
        conserved &= result.conserves();

        for (i, (l, &arm)) in learners.iter_mut().zip(&choices).enumerate() {
            l.update(arm, result.per_miner_earnings[compliant + i]);
        }
        if game >= tail_start {
            for m in &miners {
                stats.add(
                    m.strategy.label(),
                    result.per_miner_earnings[m.id],
                    m.hash_power.value(),
                    cfg.blocks_per_game,
                );
            }
            stats.orphaned += result.orphaned;
            stats.mined += result.mined;
        }
        if frsc_enabled {
            genesis = orphan_adjusted(&base, result.orphaned, result.mined);
        }
    }

    let mut profits: Vec<StrategyProfit> = stats
        .by_strategy
        .iter()
        .filter(|e| e.2 > 0)
        .map(|&(strategy, earned, exposure)| StrategyProfit {
            strategy,
            // exposure is in ppm-blocks
            mean_profit_per_block: earned as f64 * PPM_ONE as f64 / exposure as f64,
        })
        .collect();
    profits.sort_by_key(|p| STRATEGY_ORDER.iter().position(|s| *s == p.strategy));
    Ok(PointSummary {
        fraction,
        frsc_enabled,
        compliant_miners: compliant,
        profits,
        orphan_rate: if stats.mined == 0 {
            0.0
        } else {
            stats.orphaned as f64 / stats.mined as f64
        },
        conserved,
    })
}

/// Runs the whole sweep. Points run in parallel; each fraction gets its own
/// RNG stream, shared by both contract modes so the comparison is paired.
pub fn run_exp4(cfg: &Exp4Config) -> Result<Exp4Result> {
    if cfg.miners == 0 {
        return Err(Error::config("miners", "must be at least 1"));
    }
    let jobs: Vec<(bool, usize, Ppm)> = cfg
        .modes
        .iter()
        .flat_map(|&on| cfg.fractions.iter().enumerate().map(move |(i, &f)| (on, i, f)))
        .collect();
    let points = jobs
        .par_iter()
        .map(|&(on, i, f)| run_point(cfg, f, on, i as u64))
        .collect::<Result<Vec<_>>>()?;
    Ok(Exp4Result { points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orphan_adjustment_is_exact() {
        let base = FrscSet::init_genesis(
            Amount::from_sat(5_000_000_000),
            SplitParams::from_contract_share(Ppm::from_const(700_000)),
            &[(2016, Ppm::ONE)],
        )
        .unwrap();
        assert_eq!(orphan_adjusted(&base, 4, 10).total_nu().sat(), 9_878_400_000_000);
        assert_eq!(orphan_adjusted(&base, 0, 10), base);
        assert_eq!(orphan_adjusted(&base, 0, 0), base);
    }

    #[test]
    fn grid_includes_stop() {
        let g = fraction_grid(Ppm::ZERO, Ppm::ONE, Ppm::from_const(100_000)).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(*g.last().unwrap(), Ppm::ONE);
        assert!(fraction_grid(Ppm::ZERO, Ppm::ONE, Ppm::ZERO).is_err());
    }

    #[test]
    fn compliant_count_rounds() {
        assert_eq!(compliant_count(20, Ppm::from_const(300_000)), 6);
        assert_eq!(compliant_count(100, Ppm::from_const(660_000)), 66);
        assert_eq!(compliant_count(3, Ppm::from_const(500_000)), 2);
        assert_eq!(compliant_count(20, Ppm::ONE), 20);
    }

    fn summary(fraction: u32, on: bool, profits: &[(&'static str, f64)]) -> PointSummary {
        PointSummary {
            fraction: Ppm::from_const(fraction),
            frsc_enabled: on,
            compliant_miners: 0,
            profits: profits
                .iter()
                .map(|&(strategy, p)| StrategyProfit {
                    strategy,
                    mean_profit_per_block: p,
                })
                .collect(),
            orphan_rate: 0.0,
            conserved: true,
        }
    }

    #[test]
    fn crossing_requires_all_higher_points_clear() {
        let r = Exp4Result {
            points: vec![
                summary(0, false, &[("function_fork", 5.0)]),
                summary(250_000, false, &[("default_compliant", 4.0), ("function_fork", 3.0)]),
                summary(500_000, false, &[("default_compliant", 4.0), ("lazy_fork", 4.5)]),
                summary(750_000, false, &[("default_compliant", 4.0), ("function_fork", 3.0)]),
                summary(1_000_000, false, &[("default_compliant", 4.0)]),
            ],
        };
        assert_eq!(r.crossing(false), Some(Ppm::from_const(750_000)));
        assert_eq!(r.crossing(true), None);
    }

    #[test]
    fn all_compliant_earn_their_share() {
        let cfg = Exp4Config {
            miners: 5,
            blocks_per_game: 2_000,
            games: 1,
            fractions: vec![Ppm::ONE],
            modes: vec![false],
            ..Exp4Config::default()
        };
        let r = run_exp4(&cfg).unwrap();
        let p = &r.points[0];
        assert!(p.conserved);
        assert_eq!(p.orphan_rate, 0.0);
        assert_eq!(p.profits.len(), 1);
        // per unit hash power per block, every block is worth about 50 BTC
        let profit = p.profit("default_compliant").unwrap();
        assert!((profit / 5e9 - 1.0).abs() < 0.05, "{profit}");
        assert!(!p.undercutting_pays());
    }

    #[test]
    fn summary_rows_follow_schema() {
        let r = Exp4Result {
            points: vec![summary(
                300_000,
                true,
                &[("default_compliant", 4.6e9), ("lazy_fork", 4.4e9)],
            )],
        };
        let text = String::from_utf8(r.summary_table().to_bytes()).unwrap();
        assert_eq!(
            text,
            "compliant_fraction,frsc_enabled,strategy,mean_profit_sat_per_block,orphan_rate\n\
             0.300000,true,default_compliant,4600000000,0.000000\n\
             0.300000,true,lazy_fork,4400000000,0.000000\n"
        );
    }
}

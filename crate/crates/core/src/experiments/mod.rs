//! Experiment runners.
//!
//! Experiments I to III mine an honest single-miner chain over a fee scenario
//! and record per-block series; they differ only in the contract setups they
//! compare. Experiment IV plays repeated mining games between compliant and
//! learning miners (see [`exp4`]).

pub mod csv_out;
pub mod exp4;
pub mod game;
pub mod series;

use std::path::Path;

use rayon::prelude::*;

use crate::amount::{Amount, Ppm};
use crate::chain::FrscMode;
use crate::error::{Error, Result};
use crate::fee_model::{FeeScenario, SimTime};
use crate::frsc::{FrscSet, SplitParams};

pub use csv_out::{emit_csv, CsvTable};
pub use series::{Horizon, SeriesRecord};

/// Network-wide block rate: one block per 600 s on average.
pub const BLOCK_RATE: f64 = 1.0 / 600.0;

pub const C_GRID: [Ppm; 3] = [
    Ppm::from_const(500_000),
    Ppm::from_const(700_000),
    Ppm::from_const(900_000),
];

pub const EXP1_LAMBDAS: [u64; 2] = [2016, 5600];

pub const FOUR_LAMBDAS: [u64; 4] = [1008, 2016, 4032, 8064];

/// `rho` rising with `lambda`, as used for the four-contract runs.
pub const RHO_CORRELATED: [u32; 4] = [70_000, 140_000, 280_000, 510_000];
pub const RHO_EQUAL: [u32; 4] = [250_000; 4];
pub const RHO_REVERSED: [u32; 4] = [510_000, 280_000, 140_000, 70_000];

/// Four contracts with the same effective length as a single 5292-block one.
pub const RHO_EFFECTIVE_5292: [u32; 4] = [70_000, 190_000, 280_000, 460_000];

pub fn specs(lambdas: &[u64], rhos: &[u32]) -> Vec<(u64, Ppm)> {
    lambdas
        .iter()
        .zip(rhos)
        .map(|(&l, &r)| (l, Ppm::from_const(r)))
        .collect()
}

/// A named CSV ready to be written under an output directory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesOutput {
    pub name: String,
    pub table: CsvTable,
}

pub fn write_outputs(outputs: &[SeriesOutput], out_dir: &Path) -> Result<()> {
    outputs
        .iter()
        .try_for_each(|o| emit_csv(&o.table, &out_dir.join(&o.name)))
}

/// Settings shared by the series experiments.
#[derive(Clone, Debug)]
pub struct SeriesSetup {
    pub scenario: FeeScenario,
    /// Expected per-block fees used to seed the genesis contract balances.
    pub mean_fees: Amount,
    pub horizon: Horizon,
    pub seed: u64,
}

impl SeriesSetup {
    /// Runs until the scenario's last rate change, with genesis balances
    /// seeded from the scenario's opening rate over one block interval.
    pub fn for_scenario(scenario: FeeScenario, seed: u64) -> Result<Self> {
        let end = scenario.last_change();
        if end == SimTime::ZERO {
            return Err(Error::config(
                "blocks",
                "scenario never changes rate, so it has no natural end; set a block count",
            ));
        }
        let mean_fees = scenario.segments()[0].rate.over_secs(600);
        Ok(SeriesSetup {
            scenario,
            mean_fees,
            horizon: Horizon::Until(end),
            seed,
        })
    }

    /// Genesis state and honest-chain series for one contract setup.
    pub fn run(&self, specs: &[(u64, Ppm)], c: Ppm) -> Result<(FrscSet, Vec<SeriesRecord>)> {
        let params = SplitParams::from_contract_share(c);
        let genesis = FrscSet::init_genesis(self.mean_fees, params, specs)?;
        let records = series::run_series(
            &self.scenario,
            Some(genesis.clone()),
            FrscMode::On(params),
            self.horizon,
            self.seed,
        )?;
        Ok((genesis, records))
    }
}

/// Single contracts of each length in `lambdas` under each share in
/// `c_grid`; one series per pair, all on the same seeded block timing.
pub fn run_exp1(setup: &SeriesSetup, lambdas: &[u64], c_grid: &[Ppm]) -> Result<Vec<SeriesOutput>> {
    let pairs: Vec<(u64, Ppm)> = lambdas
        .iter()
        .flat_map(|&l| c_grid.iter().map(move |&c| (l, c)))
        .collect();
    pairs
        .par_iter()
        .map(|&(lambda, c)| {
            let (_, records) = setup.run(&[(lambda, Ppm::ONE)], c)?;
            Ok(SeriesOutput {
                name: format!("exp1_lambda{lambda}_c{}.csv", c.value()),
                table: series::series_table(&records, 1),
            })
        })
        .collect()
}

/// One four-contract setup: its series plus the `rho`-normalized claims.
fn four_contract_outputs(setup: &SeriesSetup, stem: &str, rhos: &[u32; 4], c: Ppm) -> Result<Vec<SeriesOutput>> {
    let (genesis, records) = setup.run(&specs(&FOUR_LAMBDAS, rhos), c)?;
    Ok(vec![
        SeriesOutput {
            name: format!("{stem}.csv"),
            table: series::series_table(&records, 4),
        },
        SeriesOutput {
            name: format!("{stem}_normalized.csv"),
            table: series::normalized_claims_table(&records, &genesis),
        },
    ])
}

/// Four contracts with `rho` rising with `lambda` under each share in
/// `c_grid`, plus equal and reversed `rho` at `rho_study_c`.
pub fn run_exp2(setup: &SeriesSetup, c_grid: &[Ppm], rho_study_c: Ppm) -> Result<Vec<SeriesOutput>> {
    let mut jobs: Vec<(String, [u32; 4], Ppm)> = c_grid
        .iter()
        .map(|c| (format!("exp2_c{}", c.value()), RHO_CORRELATED, *c))
        .collect();
    jobs.push(("exp2_rho_correlated".into(), RHO_CORRELATED, rho_study_c));
    jobs.push(("exp2_rho_equal".into(), RHO_EQUAL, rho_study_c));
    jobs.push(("exp2_rho_reversed".into(), RHO_REVERSED, rho_study_c));
    let nested: Vec<Vec<SeriesOutput>> = jobs
        .par_iter()
        .map(|(stem, rhos, c)| four_contract_outputs(setup, stem, rhos, *c))
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// Both sides of a same-effective-length comparison.
#[derive(Clone, Debug)]
pub struct Exp3Result {
    pub single: Vec<SeriesRecord>,
    pub multi: Vec<SeriesRecord>,
    /// `(multi - single) / single` of `next_claim`, per block.
    pub relative_diff: Vec<f64>,
}

/// Runs two contract setups that must share the same effective length and
/// compares their `next_claim` block by block.
pub fn run_exp3(setup: &SeriesSetup, single: &[(u64, Ppm)], multi: &[(u64, Ppm)], c: Ppm) -> Result<Exp3Result> {
    let params = SplitParams::from_contract_share(c);
    let a = FrscSet::init_genesis(setup.mean_fees, params, single)?;
    let b = FrscSet::init_genesis(setup.mean_fees, params, multi)?;
    if a.effective_lambda() != b.effective_lambda() {
        return Err(Error::config(
            "frsc",
            format!(
                "compared setups must share the effective length, got {} and {}",
                a.effective_lambda(),
                b.effective_lambda()
            ),
        ));
    }
    let (single, multi) = rayon::join(|| setup.run(single, c), || setup.run(multi, c));
    let (_, single) = single?;
    let (_, multi) = multi?;
    let relative_diff = single
        .iter()
        .zip(&multi)
        .map(|(s, m)| {
            let base = s.next_claim.sat() as f64;
            if base == 0.0 {
                0.0
            } else {
                (m.next_claim.sat() as f64 - base) / base
            }
        })
        .collect();
    Ok(Exp3Result {
        single,
        multi,
        relative_diff,
    })
}

impl Exp3Result {
    pub fn outputs(&self, single_contracts: usize, multi_contracts: usize) -> Vec<SeriesOutput> {
        let mut diff = CsvTable::new([
            "height",
            "found_at_s",
            "next_claim_multi_sat",
            "next_claim_single_sat",
            "relative_diff",
        ]);
        for ((s, m), d) in self.single.iter().zip(&self.multi).zip(&self.relative_diff) {
            diff.push(vec![
                s.height.to_string(),
                s.found_at.to_string(),
                m.next_claim.to_string(),
                s.next_claim.to_string(),
                format!("{d:.9}"),
            ]);
        }
        vec![
            SeriesOutput {
                name: "exp3_single.csv".into(),
                table: series::series_table(&self.single, single_contracts),
            },
            SeriesOutput {
                name: "exp3_multi.csv".into(),
                table: series::series_table(&self.multi, multi_contracts),
            },
            SeriesOutput {
                name: "exp3_relative_diff.csv".into(),
                table: diff,
            },
        ]
    }
}

/// Index of the last record found while the scenario sits at its lowest
/// (`lowest = true`) or highest inflow rate. Later segments win ties.
pub fn last_block_at_extreme_rate(scenario: &FeeScenario, records: &[SeriesRecord], lowest: bool) -> Option<usize> {
    let segs = scenario.segments();
    let key = |i: usize| segs[i].rate.sat_per_sec_f64();
    let target = (0..segs.len()).reduce(|best, i| {
        let better = if lowest {
            key(i) <= key(best)
        } else {
            key(i) >= key(best)
        };
        if better {
            i
        } else {
            best
        }
    })?;
    let start = segs[target].start;
    let end = segs.get(target + 1).map(|s| s.start);
    records
        .iter()
        .rposition(|r| r.found_at >= start && end.is_none_or(|e| r.found_at < e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fee_model::{InflowRate, TRIANGLE_SCENARIO};

    fn constant_setup(blocks: u64) -> SeriesSetup {
        SeriesSetup {
            scenario: FeeScenario::constant(InflowRate::per_interval(5_000_000_000, 600)),
            mean_fees: Amount::from_btc(50),
            horizon: Horizon::Blocks(blocks),
            seed: 42,
        }
    }

    #[test]
    fn exp3_rejects_mismatched_lengths() {
        let s = constant_setup(10);
        let err = run_exp3(
            &s,
            &[(5000, Ppm::ONE)],
            &specs(&FOUR_LAMBDAS, &RHO_EFFECTIVE_5292),
            Ppm::from_const(700_000),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn exp3_identical_sides_have_zero_difference() {
        let s = constant_setup(500);
        let four = specs(&FOUR_LAMBDAS, &RHO_EFFECTIVE_5292);
        let r = run_exp3(&s, &four, &four, Ppm::from_const(700_000)).unwrap();
        assert!(r.relative_diff.iter().all(|d| *d == 0.0));
    }

    #[test]
    fn scenario_without_end_needs_block_count() {
        let s = FeeScenario::constant(InflowRate::per_second(1));
        assert!(SeriesSetup::for_scenario(s, 1).is_err());
        let t = SeriesSetup::for_scenario(FeeScenario::parse(TRIANGLE_SCENARIO).unwrap(), 1).unwrap();
        assert_eq!(t.mean_fees.sat(), 3_333_333 * 600);
    }

    #[test]
    fn exp1_names_each_pair() {
        let outs = run_exp1(&constant_setup(5), &EXP1_LAMBDAS, &C_GRID).unwrap();
        let names: Vec<&str> = outs.iter().map(|o| o.name.as_str()).collect();
        assert_eq!(
            names,
            vec![
                "exp1_lambda2016_c500000.csv",
                "exp1_lambda2016_c700000.csv",
                "exp1_lambda2016_c900000.csv",
                "exp1_lambda5600_c500000.csv",
                "exp1_lambda5600_c700000.csv",
                "exp1_lambda5600_c900000.csv",
            ]
        );
    }
}

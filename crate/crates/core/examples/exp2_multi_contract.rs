//! Four contracts of different windows: contract-share sweep and the
//! redistribution-ratio study. Prints the spread of each contract's
//! rho-normalized claim.
//!
//!     cargo run --release --example exp2_multi_contract -- [out_dir] [seed]

use std::path::PathBuf;

use frsc_sim::experiments::{run_exp2, write_outputs, SeriesSetup, C_GRID};
use frsc_sim::fee_model::{FeeScenario, DEFAULT_BLOCK_CAP, LONG_TERM_SCENARIO};
use frsc_sim::Ppm;

fn std_dev(xs: &[f64]) -> f64 {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

fn main() -> frsc_sim::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "out".into()));
    let seed = args.next().map_or(42, |s| s.parse().expect("integer seed"));

    let scenario = FeeScenario::parse(LONG_TERM_SCENARIO)?.with_full_mempool(DEFAULT_BLOCK_CAP)?;
    let setup = SeriesSetup::for_scenario(scenario, seed)?;
    let outputs = run_exp2(&setup, &C_GRID, Ppm::from_const(700_000))?;
    write_outputs(&outputs, &out)?;

    for o in outputs.iter().filter(|o| o.name.ends_with("_normalized.csv")) {
        let cols: Vec<String> = (2..o.table.header.len())
            .map(|j| {
                let xs: Vec<f64> = o
                    .table
                    .rows
                    .iter()
                    .map(|row| row[j].parse::<f64>().unwrap_or(0.0) / 1e8)
                    .collect();
                format!("{:.3}", std_dev(&xs))
            })
            .collect();
        println!("{}: normalized claim std dev (BTC) {}", o.name, cols.join(" "));
    }
    println!("wrote {} files to {}", outputs.len(), out.display());
    Ok(())
}

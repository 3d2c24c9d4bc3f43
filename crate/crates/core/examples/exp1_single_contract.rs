//! Single contracts of two window lengths under three contract shares, on
//! the bundled long-term fee scenario.
//!
//!     cargo run --release --example exp1_single_contract -- [out_dir] [seed]

use std::path::PathBuf;

use frsc_sim::experiments::{run_exp1, write_outputs, SeriesSetup, C_GRID, EXP1_LAMBDAS};
use frsc_sim::fee_model::{FeeScenario, DEFAULT_BLOCK_CAP, LONG_TERM_SCENARIO};

fn main() -> frsc_sim::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "out".into()));
    let seed = args.next().map_or(42, |s| s.parse().expect("integer seed"));

    let scenario = FeeScenario::parse(LONG_TERM_SCENARIO)?.with_full_mempool(DEFAULT_BLOCK_CAP)?;
    let setup = SeriesSetup::for_scenario(scenario, seed)?;
    let outputs = run_exp1(&setup, &EXP1_LAMBDAS, &C_GRID)?;
    write_outputs(&outputs, &out)?;
    for o in &outputs {
        println!("{} ({} blocks)", out.join(&o.name).display(), o.table.rows.len());
    }
    Ok(())
}

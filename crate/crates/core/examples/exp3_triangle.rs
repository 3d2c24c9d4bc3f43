//! Four contracts against one contract of the same effective length on the
//! bundled triangle-wave scenario.
//!
//!     cargo run --release --example exp3_triangle -- [seed] [out_dir]

use std::path::PathBuf;

use frsc_sim::amount::{Ppm, PPM_ONE};
use frsc_sim::experiments::{
    last_block_at_extreme_rate, run_exp3, specs, write_outputs, SeriesSetup, FOUR_LAMBDAS, RHO_EFFECTIVE_5292,
};
use frsc_sim::fee_model::{FeeScenario, DEFAULT_BLOCK_CAP, TRIANGLE_SCENARIO};

fn main() -> frsc_sim::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map_or(42, |s| s.parse().expect("seed is an integer"));
    let out = args.next().map(PathBuf::from);

    let scenario = FeeScenario::parse(TRIANGLE_SCENARIO)?.with_full_mempool(DEFAULT_BLOCK_CAP)?;
    let setup = SeriesSetup::for_scenario(scenario, seed)?;
    let multi = specs(&FOUR_LAMBDAS, &RHO_EFFECTIVE_5292);
    let c = Ppm::from_const(700_000);
    let r = run_exp3(&setup, &[(5292, Ppm::new(PPM_ONE)?)], &multi, c)?;

    println!("{} blocks", r.single.len());
    for (label, lowest) in [("lowest-fee", true), ("highest-fee", false)] {
        if let Some(i) = last_block_at_extreme_rate(&setup.scenario, &r.single, lowest) {
            println!(
                "{label} block {} at {} s: relative difference {:+.6}",
                r.single[i].height, r.single[i].found_at, r.relative_diff[i]
            );
        }
    }
    if let Some(dir) = out {
        write_outputs(&r.outputs(1, multi.len()), &dir)?;
        println!("wrote CSVs to {}", dir.display());
    }
    Ok(())
}

//! Builds a fee scenario with a sudden fee spike, then compares the block
//! value of a contract-backed chain with the fees a plain miner would see.
//!
//!     cargo run --release --example custom_scenario -- [path_to_write_scenario]

use frsc_sim::chain::FrscMode;
use frsc_sim::experiments::series::run_series;
use frsc_sim::experiments::Horizon;
use frsc_sim::fee_model::{btc_per_block_rate, ScenarioBuilder};
use frsc_sim::{Amount, FrscSet, Ppm, SplitParams};

fn main() -> frsc_sim::Result<()> {
    const BLOCK: u64 = 600;
    let r = btc_per_block_rate;
    let builder = ScenarioBuilder::new()
        .comment("quiet, spike, quiet")
        .hold(r(10), 3_000 * BLOCK)
        .hold(r(200), 50 * BLOCK)
        .hold(r(10), 3_000 * BLOCK)
        .end();
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, builder.render()).map_err(|e| frsc_sim::Error::io(&path, e))?;
        println!("scenario written to {path}");
    }
    let scenario = builder.build()?;

    let params = SplitParams::from_contract_share(Ppm::new(700_000)?);
    let genesis = FrscSet::init_genesis(Amount::from_btc(10), params, &[(1008, Ppm::ONE)])?;
    let recs = run_series(
        &scenario,
        Some(genesis),
        FrscMode::On(params),
        Horizon::Until(scenario.last_change()),
        7,
    )?;

    let peak_fees = recs.iter().map(|r| r.fees_in_mempool).max().unwrap_or(Amount::ZERO);
    let peak_value = recs.iter().map(|r| r.block_value).max().unwrap_or(Amount::ZERO);
    println!("{} blocks", recs.len());
    println!(
        "largest mempool seen by a block: {:.2} BTC",
        peak_fees.sat() as f64 / 1e8
    );
    println!(
        "largest block value with contracts: {:.2} BTC",
        peak_value.sat() as f64 / 1e8
    );
    if let Some(last) = recs.last() {
        println!(
            "value of the last block: {:.2} BTC",
            last.block_value.sat() as f64 / 1e8
        );
    }
    Ok(())
}

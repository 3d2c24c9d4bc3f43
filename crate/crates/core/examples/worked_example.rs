//! One block settled against a single saturated contract.
//!
//! A contract holding 2016 BTC over a 2016-block window pays 1 BTC per
//! block. The block collects 2 BTC of fees; 60% goes into the contract.

use frsc_sim::{Amount, Frsc, FrscSet, Ppm, SplitParams};

fn main() -> frsc_sim::Result<()> {
    let set = FrscSet::new(vec![Frsc::new(Amount::from_btc(2016), 2016, Ppm::ONE)?])?;
    let params = SplitParams::new(Ppm::new(600_000)?, Ppm::new(400_000)?)?;

    let (s, after) = set.apply_block(Amount::from_btc(2), params);
    println!("next claim      {} sat", s.next_claim);
    println!("deposit         {} sat", s.deposit_total);
    println!("miner direct    {} sat", s.miner_direct);
    println!("reward total    {} sat", s.reward_total);
    println!("balance after   {} sat", after.total_nu());
    Ok(())
}

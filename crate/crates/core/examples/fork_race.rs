//! A short mining game between honest and undercutting miners, printed
//! block by block.
//!
//!     cargo run --example fork_race -- [seed]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use frsc_sim::chain::{even_hash_power, pick_winner, sample_interval, BlockTree};
use frsc_sim::experiments::BLOCK_RATE;
use frsc_sim::strategies::{View, DEFAULT_KAPPA};
use frsc_sim::{FeeScenario, FrscMode, InflowRate, Miner, SimTime, Strategy};

fn main() -> frsc_sim::Result<()> {
    let seed = std::env::args().nth(1).map_or(3, |s| s.parse().expect("integer seed"));
    let strategies = [
        Strategy::DefaultCompliant,
        Strategy::DefaultCompliant,
        Strategy::PettyCompliant,
        Strategy::LazyFork,
        Strategy::function_fork(DEFAULT_KAPPA),
    ];
    let power = even_hash_power(strategies.len());
    let miners: Vec<Miner> = strategies
        .iter()
        .enumerate()
        .map(|(id, &strategy)| Miner {
            id,
            hash_power: power[id],
            strategy,
        })
        .collect();
    let scenario = FeeScenario::constant(InflowRate::per_interval(5_000_000_000, 600));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = BlockTree::new(None);

    for _ in 0..20 {
        tree.advance(SimTime::from_secs_f64(sample_interval(&mut rng, BLOCK_RATE)).micros());
        let w = pick_winner(&mut rng, &miners);
        let d = miners[w]
            .strategy
            .decide(&View::new(&tree, &scenario, FrscMode::Off, w));
        let id = tree.extend(w, d, &scenario, FrscMode::Off)?;
        let b = tree.get(id).expect("just mined");
        println!(
            "t={:>12} block {id:>2} h={:>2} on {:>2} by {} claims {:>6.2} BTC",
            b.found_at,
            b.height,
            d.parent,
            miners[w].strategy,
            b.claimed_fees.sat() as f64 / 1e8
        );
    }
    let chain = tree.main_chain();
    println!("main chain {:?}", chain);
    println!("orphan rate {:.2}", tree.orphan_rate());
    Ok(())
}

//! Undercutting sweep with and without contracts.
//!
//!     cargo run --release --example exp4_sweep -- [seed] [games] [blocks] [miners]

use std::time::Instant;

use frsc_sim::amount::Ppm;
use frsc_sim::experiments::exp4::{fraction_grid, run_exp4, Exp4Config};

fn main() -> frsc_sim::Result<()> {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let arg = |i: usize, d: u64| args.get(i).copied().unwrap_or(d);
    let cfg = Exp4Config {
        seed: arg(0, 42),
        games: arg(1, 2_000),
        blocks_per_game: arg(2, 1_000),
        miners: arg(3, 20) as usize,
        fractions: fraction_grid(Ppm::ZERO, Ppm::ONE, Ppm::from_const(100_000))?,
        ..Exp4Config::default()
    };

    let t = Instant::now();
    let r = run_exp4(&cfg)?;
    for on in [false, true] {
        println!("contracts {}", if on { "on" } else { "off" });
        for p in r.points.iter().filter(|p| p.frsc_enabled == on) {
            let row: Vec<String> = p
                .profits
                .iter()
                .map(|s| format!("{}={:.3}", s.strategy, s.mean_profit_per_block / 1e8))
                .collect();
            println!("  {} orphans={:.3} {}", p.fraction, p.orphan_rate, row.join(" "));
        }
        println!("  crossing: {:?}", r.crossing(on).map(|f| f.to_string()));
    }
    println!("{:.1} s", t.elapsed().as_secs_f64());
    Ok(())
}

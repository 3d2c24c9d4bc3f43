//! Initial contract balances for an expected fee level, and the effective
//! window length of a contract set.
//!
//!     cargo run --example genesis_setup -- [mean_fees_sat] [c_ppm]

use frsc_sim::experiments::{specs, FOUR_LAMBDAS, RHO_CORRELATED, RHO_EFFECTIVE_5292};
use frsc_sim::frsc::parity_fees;
use frsc_sim::{Amount, FrscSet, Ppm, SplitParams};

fn main() -> frsc_sim::Result<()> {
    let mut args = std::env::args().skip(1);
    let mean = Amount::from_sat(args.next().map_or(5_000_000_000, |a| a.parse().expect("integer sat")));
    let c = Ppm::new(args.next().map_or(700_000, |a| a.parse().expect("integer ppm")))?;
    let params = SplitParams::from_contract_share(c);

    for (name, set) in [
        ("single 2016", vec![(2016, Ppm::ONE)]),
        ("four, correlated rho", specs(&FOUR_LAMBDAS, &RHO_CORRELATED)),
        ("four, effective 5292", specs(&FOUR_LAMBDAS, &RHO_EFFECTIVE_5292)),
    ] {
        let g = FrscSet::init_genesis(mean, params, &set)?;
        println!("{name}: effective lambda {}", g.effective_lambda());
        for x in g.contracts() {
            println!(
                "  lambda {:>5} rho {} nu {} claim {}",
                x.lambda(),
                x.rho(),
                x.nu(),
                x.partial_claim()
            );
        }
        let next = g.next_claim();
        println!(
            "  next claim {next} sat, fees at parity {} sat",
            parity_fees(next, params)?
        );
    }
    Ok(())
}

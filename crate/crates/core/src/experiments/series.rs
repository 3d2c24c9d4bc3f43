//! Honest single-miner runs that record one row per block.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::amount::Amount;
use crate::chain::{sample_interval, BlockTree, FrscMode};
use crate::error::Result;
use crate::experiments::csv_out::CsvTable;
use crate::experiments::BLOCK_RATE;
use crate::fee_model::{FeeScenario, SimTime};
use crate::frsc::FrscSet;
use crate::strategies::{default_compliant, View};

/// How long a series run lasts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Horizon {
    Blocks(u64),
    /// Mine until the next block would be found after this time.
    Until(SimTime),
}

/// One block of a series run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesRecord {
    pub height: u64,
    pub found_at: SimTime,
    /// Fees available to the block before it claimed anything.
    pub fees_in_mempool: Amount,
    pub claimed: Amount,
    /// `rewardT` of the block.
    pub block_value: Amount,
    pub next_claim: Amount,
    pub claims: Vec<Amount>,
    /// Contract balances after the block.
    pub nus: Vec<Amount>,
}

/// Mines an honest chain: one miner, always extending the tip and claiming
/// everything the scenario allows.
pub fn run_series(
    scenario: &FeeScenario,
    genesis: Option<FrscSet>,
    mode: FrscMode,
    horizon: Horizon,
    seed: u64,
) -> Result<Vec<SeriesRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = BlockTree::new(genesis);
    let mut records = Vec::new();
    loop {
        let dt = SimTime::from_secs_f64(sample_interval(&mut rng, BLOCK_RATE)).micros();
        match horizon {
            Horizon::Blocks(n) if records.len() as u64 >= n => break,
            Horizon::Until(end) if tree.now().saturating_add(dt) > end => break,
            _ => {}
        }
        tree.advance(dt);
        let view = View::new(&tree, scenario, mode, 0);
        let fees_in_mempool = tree.available_at(tree.longest_tip(), scenario, tree.now());
        let decision = default_compliant(&view);
        let id = tree.extend(0, decision, scenario, mode)?;
        let b = tree.get(id).expect("just inserted");
        records.push(SeriesRecord {
            height: b.height,
            found_at: b.found_at,
            fees_in_mempool,
            claimed: b.claimed_fees,
            block_value: b.settlement.reward_total,
            next_claim: b.settlement.next_claim,
            claims: b.settlement.per_contract_claims.clone(),
            nus: b
                .frsc_after
                .as_ref()
                .map(|s| s.contracts().iter().map(|x| x.nu()).collect())
                .unwrap_or_default(),
        });
    }
    Ok(records)
}

/// Series schema v1:
/// `height,found_at_s,fees_in_mempool_sat,block_value_sat,next_claim_sat,claim_c1_sat,...,nu_c1_sat,...`.
pub fn series_table(records: &[SeriesRecord], contracts: usize) -> CsvTable {
    let mut header: Vec<String> = [
        "height",
        "found_at_s",
        "fees_in_mempool_sat",
        "block_value_sat",
        "next_claim_sat",
    ]
    .map(String::from)
    .to_vec();
    header.extend((1..=contracts).map(|i| format!("claim_c{i}_sat")));
    header.extend((1..=contracts).map(|i| format!("nu_c{i}_sat")));
    let mut table = CsvTable::new(header);
    for r in records {
        let mut row = vec![
            r.height.to_string(),
            r.found_at.to_string(),
            r.fees_in_mempool.to_string(),
            r.block_value.to_string(),
            r.next_claim.to_string(),
        ];
        row.extend(r.claims.iter().map(Amount::to_string));
        row.extend(r.nus.iter().map(Amount::to_string));
        table.push(row);
    }
    table
}

/// Per-contract claims divided by each contract's `rho`:
/// `height,found_at_s,norm_claim_c1_sat,...`.
pub fn normalized_claims_table(records: &[SeriesRecord], set: &FrscSet) -> CsvTable {
    let mut header = vec!["height".to_string(), "found_at_s".to_string()];
    header.extend((1..=set.len()).map(|i| format!("norm_claim_c{i}_sat")));
    let mut table = CsvTable::new(header);
    for r in records {
        let mut row = vec![r.height.to_string(), r.found_at.to_string()];
        row.extend(
            r.claims
                .iter()
                .zip(set.contracts())
                .map(|(c, x)| normalized_claim(*c, x.rho()).to_string()),
        );
        table.push(row);
    }
    table
}

/// `floor(claim / rho)`; zero when `rho` is zero.
pub fn normalized_claim(claim: Amount, rho: crate::amount::Ppm) -> Amount {
    match rho.value() {
        0 => Amount::ZERO,
        r => claim.mul_div_floor(crate::amount::PPM_ONE as u64, r as u64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amount::Ppm;
    use crate::fee_model::InflowRate;
    use crate::frsc::SplitParams;

    #[test]
    fn header_matches_schema() {
        let t = series_table(&[], 2);
        assert_eq!(
            String::from_utf8(t.to_bytes()).unwrap(),
            "height,found_at_s,fees_in_mempool_sat,block_value_sat,next_claim_sat,claim_c1_sat,claim_c2_sat,nu_c1_sat,nu_c2_sat\n"
        );
    }

    #[test]
    fn large_balances_render_as_integers() {
        let r = SeriesRecord {
            height: 1,
            found_at: SimTime::from_secs(600),
            fees_in_mempool: Amount::ZERO,
            claimed: Amount::ZERO,
            block_value: Amount::ZERO,
            next_claim: Amount::ZERO,
            claims: vec![Amount::ZERO],
            nus: vec![Amount::from_sat(7_056_000_000_000)],
        };
        let text = String::from_utf8(series_table(&[r], 1).to_bytes()).unwrap();
        assert!(text.ends_with("1,600.000000,0,0,0,0,7056000000000\n"), "{text}");
    }

    #[test]
    fn horizon_blocks_is_exact() {
        let s = FeeScenario::constant(InflowRate::per_interval(5_000_000_000, 600));
        let params = SplitParams::from_contract_share(Ppm::from_const(700_000));
        let g = FrscSet::init_genesis(Amount::from_btc(50), params, &[(10, Ppm::ONE)]).unwrap();
        let recs = run_series(&s, Some(g), FrscMode::On(params), Horizon::Blocks(25), 3).unwrap();
        assert_eq!(recs.len(), 25);
        assert_eq!(recs.last().unwrap().height, 25);
        assert!(recs
            .iter()
            .all(|r| r.block_value == r.next_claim + params.miner_direct(r.claimed)));
    }
}

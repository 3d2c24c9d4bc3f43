//! A single mining game: a fixed number of block-found events, then
//! main-chain accounting.

use rand::Rng;

use crate::amount::Amount;
use crate::chain::{pick_winner, sample_interval, BlockTree, FrscMode, Miner};
use crate::error::Result;
use crate::fee_model::{FeeScenario, SimTime};
use crate::frsc::FrscSet;
use crate::strategies::View;

#[derive(Clone, Debug)]
pub struct GameSetup<'a> {
    pub miners: &'a [Miner],
    pub scenario: &'a FeeScenario,
    pub mode: FrscMode,
    /// Ignored when contracts are off.
    pub genesis: Option<FrscSet>,
    /// Blocks mined per game, orphans included.
    pub blocks: u64,
    pub block_rate: f64,
}

/// Main-chain outcome of one game. Orphaned blocks earn nothing.
#[derive(Clone, Debug, PartialEq)]
pub struct GameResult {
    pub per_miner_earnings: Vec<Amount>,
    pub orphaned: u64,
    pub mined: u64,
    pub main_chain_len: u64,
    /// Fees claimed by main-chain blocks.
    pub main_chain_claimed: Amount,
    /// Sum of `rewardT` over main-chain blocks.
    pub main_chain_value: Amount,
    pub genesis_frsc: Option<FrscSet>,
    pub final_frsc: Option<FrscSet>,
}

impl GameResult {
    pub fn orphan_rate(&self) -> f64 {
        if self.mined == 0 {
            0.0
        } else {
            self.orphaned as f64 / self.mined as f64
        }
    }

    /// Exact settlement check: earnings plus the change in contract
    /// balances equal the fees claimed on the main chain.
    pub fn conserves(&self) -> bool {
        let earned: Amount = self.per_miner_earnings.iter().sum();
        let before = self.genesis_frsc.as_ref().map_or(Amount::ZERO, FrscSet::total_nu);
        let after = self.final_frsc.as_ref().map_or(Amount::ZERO, FrscSet::total_nu);
        earned + after == self.main_chain_claimed + before
    }

    /// Mean main-chain earnings per miner for each strategy present in
    /// `miners`, in first-seen order.
    pub fn per_strategy_mean(&self, miners: &[Miner]) -> Vec<(&'static str, f64)> {
        let mut acc: Vec<(&'static str, u128, u32)> = Vec::new();
        for m in miners {
            let label = m.strategy.label();
            let e = self.per_miner_earnings[m.id].sat() as u128;
            match acc.iter_mut().find(|(l, _, _)| *l == label) {
                Some(entry) => {
                    entry.1 += e;
                    entry.2 += 1;
                }
                None => acc.push((label, e, 1)),
            }
        }
        acc.into_iter()
            .map(|(l, total, n)| (l, total as f64 / n as f64))
            .collect()
    }
}

/// Plays one game. Miner ids must equal their index in `setup.miners`.
pub fn run_game<R: Rng + ?Sized>(setup: &GameSetup<'_>, rng: &mut R) -> Result<GameResult> {
    let genesis = setup.genesis.clone().filter(|_| setup.mode.is_on());
    let mut tree = BlockTree::new(genesis.clone());
    for _ in 0..setup.blocks {
        let dt = SimTime::from_secs_f64(sample_interval(rng, setup.block_rate));
        tree.advance(dt.micros());
        let winner = pick_winner(rng, setup.miners);
        let view = View::new(&tree, setup.scenario, setup.mode, winner);
        let decision = setup.miners[winner].strategy.decide(&view);
        tree.extend(winner, decision, setup.scenario, setup.mode)?;
    }

    let mut per_miner_earnings = vec![Amount::ZERO; setup.miners.len()];
    let mut main_chain_claimed = Amount::ZERO;
    let mut main_chain_value = Amount::ZERO;
    let chain = tree.main_chain();
    for &id in &chain {
        let b = tree.get(id).expect("main chain block exists");
        let miner = b.miner.expect("non-genesis block has a miner");
        per_miner_earnings[miner] += b.settlement.reward_total;
        main_chain_claimed += b.claimed_fees;
        main_chain_value += b.settlement.reward_total;
    }
    let (orphaned, mined) = tree.orphan_counts();
    let final_frsc = tree.get(tree.longest_tip()).and_then(|b| b.frsc_after.clone());
    Ok(GameResult {
        per_miner_earnings,
        orphaned,
        mined,
        main_chain_len: chain.len() as u64,
        main_chain_claimed,
        main_chain_value,
        genesis_frsc: genesis,
        final_frsc,
    })
}

//! Event-driven proof-of-work chain: exponential block arrivals, a block tree
//! with longest-chain fork choice, and per-branch mempool and contract state.
//!
//! Every block carries the contract state reached after it, so competing
//! branches never share contract balances. Mempool contents are tracked per
//! branch through the total fees claimed along the block's ancestor path.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::amount::{Amount, Ppm, PPM_ONE};
use crate::error::{Error, Result};
use crate::fee_model::{FeeScenario, SimTime};
use crate::frsc::{BlockSettlement, FrscSet, SplitParams};
use crate::strategies::{Strategy, StrategyDecision};

pub type BlockId = usize;
pub type MinerId = usize;

/// Id of the genesis block in every tree.
pub const GENESIS: BlockId = 0;

/// Whether blocks settle through the contracts or pay the miner directly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrscMode {
    Off,
    On(SplitParams),
}

impl FrscMode {
    pub fn is_on(&self) -> bool {
        matches!(self, FrscMode::On(_))
    }

    /// `rewardT` for claiming `fees` on top of `state`.
    pub fn reward_for(&self, state: Option<&FrscSet>, fees: Amount) -> Amount {
        match (self, state) {
            (FrscMode::On(params), Some(set)) => set.reward_for(fees, *params),
            _ => fees,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub id: BlockId,
    pub parent: Option<BlockId>,
    pub height: u64,
    pub miner: Option<MinerId>,
    pub found_at: SimTime,
    pub claimed_fees: Amount,
    /// Fees left in the mempool along this branch when the block was found.
    pub rem_balance: Amount,
    /// Fees claimed by this block and all of its ancestors.
    pub path_claimed: Amount,
    pub settlement: BlockSettlement,
    /// Contract state after this block; `None` when contracts are off.
    pub frsc_after: Option<FrscSet>,
}

#[derive(Clone, Debug)]
pub struct BlockTree {
    blocks: Vec<Block>,
    // every block at the maximal height, in insertion (= age) order
    tips_at_max: Vec<BlockId>,
    now: SimTime,
}

impl BlockTree {
    /// A tree holding only the genesis block at time 0.
    pub fn new(genesis_frsc: Option<FrscSet>) -> Self {
        let genesis = Block {
            id: GENESIS,
            parent: None,
            height: 0,
            miner: None,
            found_at: SimTime::ZERO,
            claimed_fees: Amount::ZERO,
            rem_balance: Amount::ZERO,
            path_claimed: Amount::ZERO,
            settlement: BlockSettlement::without_contracts(Amount::ZERO),
            frsc_after: genesis_frsc,
        };
        BlockTree {
            blocks: vec![genesis],
            tips_at_max: vec![GENESIS],
            now: SimTime::ZERO,
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn advance(&mut self, micros: u64) {
        self.now = self.now.saturating_add(micros);
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn genesis(&self) -> &Block {
        &self.blocks[GENESIS]
    }

    pub fn get(&self, id: BlockId) -> Option<&Block> {
        self.blocks.get(id)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Height of the longest chain.
    pub fn max_height(&self) -> u64 {
        self.blocks[self.tips_at_max[0]].height
    }

    /// All blocks at the maximal height, oldest first.
    pub fn tips_at_max(&self) -> &[BlockId] {
        &self.tips_at_max
    }

    /// The tip of the longest chain; ties go to the earliest-found block,
    /// then the lowest id.
    pub fn longest_tip(&self) -> BlockId {
        // blocks are appended in time order, so the first entry is the oldest
        self.tips_at_max[0]
    }

    /// Mempool fees available to a block built on `parent` at time `t`.
    pub fn available_at(&self, parent: BlockId, scenario: &FeeScenario, t: SimTime) -> Amount {
        let p = &self.blocks[parent];
        scenario.arrived_fees(t).saturating_sub(p.path_claimed)
    }

    /// Appends a block mined by `winner` at the current time according to
    /// `decision`.
    pub fn extend(
        &mut self,
        winner: MinerId,
        decision: StrategyDecision,
        scenario: &FeeScenario,
        mode: FrscMode,
    ) -> Result<BlockId> {
        let parent = self
            .blocks
            .get(decision.parent)
            .ok_or(Error::UnknownBlock(decision.parent))?;
        let arrived = scenario.arrived_fees(self.now);
        let available = arrived.saturating_sub(parent.path_claimed);
        let claimable = scenario.claimable_fees(available);
        if decision.claim > claimable {
            return Err(Error::ClaimExceedsAvailable {
                parent: decision.parent,
                claim: decision.claim.sat(),
                available: claimable.sat(),
            });
        }

        let (settlement, frsc_after) = match (mode, &parent.frsc_after) {
            (FrscMode::On(params), Some(state)) => {
                let (s, next) = state.apply_block(decision.claim, params);
                (s, Some(next))
            }
            _ => (BlockSettlement::without_contracts(decision.claim), None),
        };

        let path_claimed = parent.path_claimed + decision.claim;
        let id = self.blocks.len();
        let height = parent.height + 1;
        let block = Block {
            id,
            parent: Some(decision.parent),
            height,
            miner: Some(winner),
            found_at: self.now.max(parent.found_at),
            claimed_fees: decision.claim,
            rem_balance: available - decision.claim,
            path_claimed,
            settlement,
            frsc_after,
        };
        self.blocks.push(block);

        let max = self.max_height();
        if height > max {
            self.tips_at_max.clear();
            self.tips_at_max.push(id);
        } else if height == max {
            self.tips_at_max.push(id);
        }
        Ok(id)
    }

    /// Ancestor path from `id` back to genesis, tip first.
    pub fn ancestors(&self, id: BlockId) -> impl Iterator<Item = &Block> + '_ {
        let mut next = Some(id);
        std::iter::from_fn(move || {
            let b = &self.blocks[next?];
            next = b.parent;
            Some(b)
        })
    }

    /// Non-genesis blocks on the path to [`BlockTree::longest_tip`], in
    /// height order.
    pub fn main_chain(&self) -> Vec<BlockId> {
        let mut chain: Vec<BlockId> = self
            .ancestors(self.longest_tip())
            .filter(|b| b.id != GENESIS)
            .map(|b| b.id)
            .collect();
        chain.reverse();
        chain
    }

    /// `(orphaned, mined)` non-genesis block counts.
    pub fn orphan_counts(&self) -> (u64, u64) {
        let mined = (self.blocks.len() - 1) as u64;
        (mined - self.max_height(), mined)
    }

    /// Fraction of mined blocks that are not on the main chain. Zero for a
    /// tree without any mined block.
    pub fn orphan_rate(&self) -> f64 {
        match self.orphan_counts() {
            (_, 0) => 0.0,
            (o, m) => o as f64 / m as f64,
        }
    }
}

/// One participant in the mining race.
#[derive(Clone, Debug, PartialEq)]
pub struct Miner {
    pub id: MinerId,
    pub hash_power: Ppm,
    pub strategy: Strategy,
}

/// Splits `PPM_ONE` of hash power evenly over `n` miners; the first
/// `PPM_ONE % n` miners get one extra ppm so the total is exact.
pub fn even_hash_power(n: usize) -> Vec<Ppm> {
    assert!(n > 0, "need at least one miner");
    let base = PPM_ONE / n as u32;
    let extra = (PPM_ONE % n as u32) as usize;
    (0..n).map(|i| Ppm::from_const(base + u32::from(i < extra))).collect()
}

/// Exponential inter-arrival time in seconds with mean `1 / total_rate`.
pub fn sample_interval<R: Rng + ?Sized>(rng: &mut R, total_rate: f64) -> f64 {
    Exp::new(total_rate)
        .expect("block arrival rate must be positive")
        .sample(rng)
}

/// Draws the miner that finds the next block, with probability
/// proportional to hash power.
pub fn pick_winner<R: Rng + ?Sized>(rng: &mut R, miners: &[Miner]) -> MinerId {
    assert!(!miners.is_empty(), "need at least one miner");
    let draw = rng.random_range(0..PPM_ONE);
    let mut acc = 0u32;
    for m in miners {
        acc += m.hash_power.value();
        if draw < acc {
            return m.id;
        }
    }
    // only reachable if hash powers sum below PPM_ONE
    miners.last().unwrap().id
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fee_model::InflowRate;
    use crate::frsc::Frsc;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scenario() -> FeeScenario {
        FeeScenario::constant(InflowRate::per_interval(5_000_000_000, 600))
    }

    fn decision(parent: BlockId, claim: Amount) -> StrategyDecision {
        StrategyDecision { parent, claim }
    }

    fn grow(tree: &mut BlockTree, parent: BlockId, secs: u64) -> BlockId {
        tree.advance(secs * 1_000_000);
        tree.extend(0, decision(parent, Amount::ZERO), &scenario(), FrscMode::Off)
            .unwrap()
    }

    #[test]
    fn off_mode_pays_claim() {
        let mut tree = BlockTree::new(None);
        tree.advance(600_000_000);
        let id = tree
            .extend(0, decision(GENESIS, Amount::from_btc(2)), &scenario(), FrscMode::Off)
            .unwrap();
        assert_eq!(tree.get(id).unwrap().settlement.reward_total, Amount::from_btc(2));
    }

    #[test]
    fn genesis_contract_pays_on_empty_claim() {
        let params = SplitParams::from_contract_share(Ppm::from_const(700_000));
        let genesis = FrscSet::init_genesis(Amount::from_sat(5_000_000_000), params, &[(2016, Ppm::ONE)]).unwrap();
        let mut tree = BlockTree::new(Some(genesis));
        let id = tree
            .extend(0, decision(GENESIS, Amount::ZERO), &scenario(), FrscMode::On(params))
            .unwrap();
        assert_eq!(tree.get(id).unwrap().settlement.reward_total.sat(), 3_500_000_000);
    }

    #[test]
    fn claim_above_available_is_rejected() {
        let mut tree = BlockTree::new(None);
        tree.advance(600_000_000);
        let err = tree
            .extend(
                0,
                decision(GENESIS, Amount::from_sat(5_000_000_001)),
                &scenario(),
                FrscMode::Off,
            )
            .unwrap_err();
        assert!(matches!(err, Error::ClaimExceedsAvailable { .. }));
        assert!(matches!(
            tree.extend(0, decision(7, Amount::ZERO), &scenario(), FrscMode::Off),
            Err(Error::UnknownBlock(7))
        ));
    }

    #[test]
    fn cap_limits_claims() {
        let s = scenario().with_full_mempool(Amount::from_btc(10)).unwrap();
        let mut tree = BlockTree::new(None);
        tree.advance(600_000_000);
        assert!(tree
            .extend(0, decision(GENESIS, Amount::from_btc(11)), &s, FrscMode::Off)
            .is_err());
        let id = tree
            .extend(0, decision(GENESIS, Amount::from_btc(10)), &s, FrscMode::Off)
            .unwrap();
        assert_eq!(tree.get(id).unwrap().rem_balance, Amount::from_btc(40));
    }

    #[test]
    fn undercut_sees_fees_of_the_block_it_replaces() {
        let s = scenario();
        let mut tree = BlockTree::new(None);
        tree.advance(600_000_000);
        let a = tree
            .extend(0, decision(GENESIS, Amount::from_btc(50)), &s, FrscMode::Off)
            .unwrap();
        tree.advance(600_000_000);
        let b = tree
            .extend(1, decision(a, Amount::from_btc(50)), &s, FrscMode::Off)
            .unwrap();
        tree.advance(60_000_000);
        // undercut b: parent is b's parent, so b's 50 BTC are back in play
        assert_eq!(tree.available_at(a, &s, tree.now()).sat(), 5_500_000_000);
        let c = tree
            .extend(2, decision(a, Amount::from_btc(20)), &s, FrscMode::Off)
            .unwrap();
        assert_eq!(tree.get(c).unwrap().rem_balance.sat(), 3_500_000_000);
        assert_eq!(tree.get(b).unwrap().rem_balance, Amount::ZERO);
        assert_eq!(tree.tips_at_max(), &[b, c]);
        assert_eq!(tree.longest_tip(), b);
    }

    #[test]
    fn longest_tip_examples() {
        let mut tree = BlockTree::new(None);
        let mut tip = GENESIS;
        for _ in 0..5 {
            tip = grow(&mut tree, tip, 10);
        }
        assert_eq!(tree.longest_tip(), tip);

        let p = tree.get(tip).unwrap().parent.unwrap();
        let fork = grow(&mut tree, p, 10);
        assert_eq!(tree.longest_tip(), tip, "equal height: older tip wins");
        let longer = grow(&mut tree, fork, 10);
        assert_eq!(tree.longest_tip(), longer);
    }

    #[test]
    fn orphan_rate_examples() {
        let mut tree = BlockTree::new(None);
        let mut tip = GENESIS;
        for _ in 0..10 {
            tip = grow(&mut tree, tip, 1);
        }
        assert_eq!(tree.orphan_rate(), 0.0);
        assert_eq!(tree.main_chain().len(), 10);

        // 10 blocks, main chain of 6
        let mut tree = BlockTree::new(None);
        let mut tip = GENESIS;
        for _ in 0..6 {
            tip = grow(&mut tree, tip, 1);
        }
        let mut side = GENESIS;
        for _ in 0..4 {
            side = grow(&mut tree, side, 1);
        }
        assert_eq!(tree.longest_tip(), tip);
        assert!((tree.orphan_rate() - 0.4).abs() < 1e-12);

        // one single-block fork off a 99-block chain
        let mut tree = BlockTree::new(None);
        let mut tip = GENESIS;
        for _ in 0..99 {
            tip = grow(&mut tree, tip, 1);
        }
        let p = tree.get(tip).unwrap().parent.unwrap();
        grow(&mut tree, p, 1);
        assert_eq!(tree.orphan_counts(), (1, 100));
        assert!((tree.orphan_rate() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn sample_interval_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut xs: Vec<f64> = (0..100_000).map(|_| sample_interval(&mut rng, 1.0 / 600.0)).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((588.0..=612.0).contains(&mean), "mean {mean}");
        xs.sort_by(f64::total_cmp);
        let median = xs[xs.len() / 2];
        let expected = 600.0 * std::f64::consts::LN_2;
        assert!((median - expected).abs() / expected < 0.02, "median {median}");

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let fast: f64 = (0..100_000)
            .map(|_| sample_interval(&mut rng, 2.0 / 600.0))
            .sum::<f64>()
            / 100_000.0;
        assert!((fast / mean - 0.5).abs() < 0.01, "ratio {}", fast / mean);
    }

    #[test]
    fn pick_winner_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let solo = vec![Miner {
            id: 3,
            hash_power: Ppm::ONE,
            strategy: Strategy::DefaultCompliant,
        }];
        assert!((0..1000).all(|_| pick_winner(&mut rng, &solo) == 3));

        let pair: Vec<Miner> = even_hash_power(2)
            .into_iter()
            .enumerate()
            .map(|(id, hash_power)| Miner {
                id,
                hash_power,
                strategy: Strategy::DefaultCompliant,
            })
            .collect();
        let ones = (0..100_000).filter(|_| pick_winner(&mut rng, &pair) == 1).count();
        assert!((ones as f64 / 100_000.0 - 0.5).abs() < 0.015);

        let with_zero = vec![
            Miner {
                id: 0,
                hash_power: Ppm::ZERO,
                strategy: Strategy::DefaultCompliant,
            },
            Miner {
                id: 1,
                hash_power: Ppm::ONE,
                strategy: Strategy::DefaultCompliant,
            },
        ];
        assert!((0..10_000).all(|_| pick_winner(&mut rng, &with_zero) == 1));
    }

    #[test]
    fn even_hash_power_sums_exactly() {
        for n in [1, 3, 7, 20, 100, 999] {
            let hp = even_hash_power(n);
            assert_eq!(hp.iter().map(|p| p.value() as u64).sum::<u64>(), PPM_ONE as u64);
        }
    }

    #[test]
    fn branches_keep_separate_contract_state() {
        let params = SplitParams::from_contract_share(Ppm::from_const(700_000));
        let genesis = FrscSet::new(vec![Frsc::new(Amount::from_btc(100), 10, Ppm::ONE).unwrap()]).unwrap();
        let s = scenario();
        let mut tree = BlockTree::new(Some(genesis.clone()));
        tree.advance(600_000_000);
        let a = tree
            .extend(0, decision(GENESIS, Amount::from_btc(50)), &s, FrscMode::On(params))
            .unwrap();
        let b = tree
            .extend(1, decision(GENESIS, Amount::from_btc(10)), &s, FrscMode::On(params))
            .unwrap();
        let (_, expect_a) = genesis.apply_block(Amount::from_btc(50), params);
        let (_, expect_b) = genesis.apply_block(Amount::from_btc(10), params);
        assert_eq!(tree.get(a).unwrap().frsc_after.as_ref(), Some(&expect_a));
        assert_eq!(tree.get(b).unwrap().frsc_after.as_ref(), Some(&expect_b));
    }
}

//! Miner decision procedures.
//!
//! A strategy runs when its miner wins the mining race and picks the parent
//! block plus the fees to claim. Profit comparisons always use the reward the
//! miner would actually receive (`rewardT`), so enabling contracts changes the
//! incentives the strategies see.
//!
//! `LazyFork` and `FunctionFork` are reconstructions: the leave fraction
//! `kappa` stands in for the unspecified undercutting function. Neither forking
//! strategy undercuts a tip its own miner produced.

use std::fmt;

use crate::amount::{Amount, Ppm};
use crate::chain::{BlockId, BlockTree, FrscMode, MinerId, GENESIS};
use crate::fee_model::{FeeScenario, SimTime};

/// Default share of available fees a `FunctionFork` miner leaves behind.
pub const DEFAULT_KAPPA: Ppm = Ppm::from_const(500_000);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StrategyDecision {
    pub parent: BlockId,
    pub claim: Amount,
}

/// Read-only snapshot a strategy decides on.
#[derive(Clone, Copy)]
pub struct View<'a> {
    pub tree: &'a BlockTree,
    pub now: SimTime,
    pub scenario: &'a FeeScenario,
    pub mode: FrscMode,
    /// The miner making the decision.
    pub miner: MinerId,
}

impl<'a> View<'a> {
    pub fn new(tree: &'a BlockTree, scenario: &'a FeeScenario, mode: FrscMode, miner: MinerId) -> Self {
        View {
            tree,
            now: tree.now(),
            scenario,
            mode,
            miner,
        }
    }

    /// Fees a block on `parent` may claim right now.
    pub fn claimable(&self, parent: BlockId) -> Amount {
        self.scenario
            .claimable_fees(self.tree.available_at(parent, self.scenario, self.now))
    }

    /// `rewardT` for claiming `claim` on top of `parent`.
    pub fn reward(&self, parent: BlockId, claim: Amount) -> Amount {
        let state = self.tree.get(parent).and_then(|b| b.frsc_after.as_ref());
        self.mode.reward_for(state, claim)
    }

    /// Parent of the longest tip, if undercutting it makes sense for this
    /// miner: the tip is not genesis and was not mined by the miner itself.
    fn undercut_target(&self, tip: BlockId) -> Option<BlockId> {
        let b = self.tree.get(tip)?;
        if tip == GENESIS || b.miner == Some(self.miner) {
            return None;
        }
        b.parent
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    DefaultCompliant,
    PettyCompliant,
    LazyFork,
    FunctionFork { leave: Ppm },
}

impl Strategy {
    pub fn function_fork(leave: Ppm) -> Self {
        Strategy::FunctionFork { leave }
    }

    pub fn decide(&self, view: &View<'_>) -> StrategyDecision {
        match *self {
            Strategy::DefaultCompliant => default_compliant(view),
            Strategy::PettyCompliant => petty_compliant(view),
            Strategy::LazyFork => lazy_fork(view),
            Strategy::FunctionFork { leave } => function_fork(view, leave),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Strategy::DefaultCompliant => "default_compliant",
            Strategy::PettyCompliant => "petty_compliant",
            Strategy::LazyFork => "lazy_fork",
            Strategy::FunctionFork { .. } => "function_fork",
        }
    }

    /// Whether the strategy ever mines below the longest tip.
    pub fn undercuts(&self) -> bool {
        matches!(self, Strategy::LazyFork | Strategy::FunctionFork { .. })
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Extend the oldest longest-chain tip and claim everything claimable.
pub fn default_compliant(view: &View<'_>) -> StrategyDecision {
    let parent = view.tree.longest_tip();
    StrategyDecision {
        parent,
        claim: view.claimable(parent),
    }
}

/// Like [`default_compliant`], but among equally long tips pick the one
/// paying the most; ties keep the oldest.
pub fn petty_compliant(view: &View<'_>) -> StrategyDecision {
    let mut best: Option<(Amount, StrategyDecision)> = None;
    for &tip in view.tree.tips_at_max() {
        let claim = view.claimable(tip);
        let reward = view.reward(tip, claim);
        if best.as_ref().is_none_or(|(r, _)| reward > *r) {
            best = Some((reward, StrategyDecision { parent: tip, claim }));
        }
    }
    best.expect("tree always has a tip").1
}

/// Compare extending the longest tip against undercutting it, claiming half
/// of the available fees either way; ties extend.
pub fn lazy_fork(view: &View<'_>) -> StrategyDecision {
    let tip = view.tree.longest_tip();
    let half = |parent| view.claimable(parent).div_floor(2);

    let extend = StrategyDecision {
        parent: tip,
        claim: half(tip),
    };
    let Some(target) = view.undercut_target(tip) else {
        return extend;
    };
    let undercut = StrategyDecision {
        parent: target,
        claim: half(target),
    };
    if view.reward(undercut.parent, undercut.claim) > view.reward(extend.parent, extend.claim) {
        undercut
    } else {
        extend
    }
}

/// Undercut the longest tip whenever it claimed any fees, otherwise extend
/// it; either way leave `leave` of the claimable fees in the mempool.
pub fn function_fork(view: &View<'_>, leave: Ppm) -> StrategyDecision {
    let tip = view.tree.longest_tip();
    let tip_claimed = view.tree.get(tip).map_or(Amount::ZERO, |b| b.claimed_fees);
    let parent = match view.undercut_target(tip) {
        Some(target) if tip_claimed > Amount::ZERO => target,
        _ => tip,
    };
    StrategyDecision {
        parent,
        claim: view.claimable(parent).mul_ppm(leave.complement()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fee_model::InflowRate;
    use crate::frsc::{FrscSet, SplitParams};

    const BLOCK: u64 = 600_000_000;

    fn constant(btc_per_block: u64) -> FeeScenario {
        FeeScenario::constant(InflowRate::per_interval(btc_per_block * 100_000_000, 600))
    }

    fn mine(
        tree: &mut BlockTree,
        s: &FeeScenario,
        miner: MinerId,
        parent: BlockId,
        claim: Amount,
        mode: FrscMode,
    ) -> BlockId {
        tree.extend(miner, StrategyDecision { parent, claim }, s, mode).unwrap()
    }

    #[test]
    fn default_takes_everything_at_tip() {
        let s = constant(10);
        let mut tree = BlockTree::new(None);
        tree.advance(BLOCK);
        let view = View::new(&tree, &s, FrscMode::Off, 0);
        assert_eq!(
            default_compliant(&view),
            StrategyDecision {
                parent: GENESIS,
                claim: Amount::from_btc(10)
            }
        );

        let capped = constant(80).with_full_mempool(Amount::from_btc(50)).unwrap();
        let view = View::new(&tree, &capped, FrscMode::Off, 0);
        assert_eq!(default_compliant(&view).claim, Amount::from_btc(50));
    }

    #[test]
    fn equal_tips_default_picks_older_petty_picks_richer() {
        let s = constant(10);
        let mut tree = BlockTree::new(None);
        tree.advance(BLOCK);
        let a = mine(&mut tree, &s, 1, GENESIS, Amount::from_btc(7), FrscMode::Off);
        let b = mine(&mut tree, &s, 2, GENESIS, Amount::from_btc(3), FrscMode::Off);
        let view = View::new(&tree, &s, FrscMode::Off, 0);
        assert_eq!(default_compliant(&view).parent, a);
        // 3 BTC left on a, 7 BTC left on b
        assert_eq!(
            petty_compliant(&view),
            StrategyDecision {
                parent: b,
                claim: Amount::from_btc(7)
            }
        );

        let mut tree = BlockTree::new(None);
        tree.advance(BLOCK);
        let a = mine(&mut tree, &s, 1, GENESIS, Amount::from_btc(5), FrscMode::Off);
        mine(&mut tree, &s, 2, GENESIS, Amount::from_btc(5), FrscMode::Off);
        let view = View::new(&tree, &s, FrscMode::Off, 0);
        assert_eq!(petty_compliant(&view).parent, a);
    }

    #[test]
    fn petty_matches_default_on_single_chain() {
        let s = constant(10);
        let mut tree = BlockTree::new(None);
        tree.advance(BLOCK);
        let a = mine(&mut tree, &s, 1, GENESIS, Amount::from_btc(4), FrscMode::Off);
        tree.advance(BLOCK / 3);
        let view = View::new(&tree, &s, FrscMode::Off, 0);
        assert_eq!(petty_compliant(&view), default_compliant(&view));
        assert_eq!(default_compliant(&view).parent, a);
    }

    #[test]
    fn lazy_fork_ties_extend() {
        // tip claimed nothing: both branches see the same 10 BTC
        let s = constant(5);
        let mut tree = BlockTree::new(None);
        tree.advance(BLOCK);
        let tip = mine(&mut tree, &s, 1, GENESIS, Amount::ZERO, FrscMode::Off);
        tree.advance(BLOCK);
        let view = View::new(&tree, &s, FrscMode::Off, 0);
        assert_eq!(
            lazy_fork(&view),
            StrategyDecision {
                parent: tip,
                claim: Amount::from_btc(5)
            }
        );
    }

    #[test]
    fn lazy_fork_undercuts_greedy_tip() {
        // tip took all 40 BTC: nothing left on top of it, 40 BTC if undercut
        let s = constant(40);
        let mut tree = BlockTree::new(None);
        tree.advance(BLOCK);
        mine(&mut tree, &s, 1, GENESIS, Amount::from_btc(40), FrscMode::Off);
        let view = View::new(&tree, &s, FrscMode::Off, 0);
        assert_eq!(
            lazy_fork(&view),
            StrategyDecision {
                parent: GENESIS,
                claim: Amount::from_btc(20)
            }
        );
    }

    #[test]
    fn lazy_fork_never_undercuts_own_block() {
        let s = constant(40);
        let mut tree = BlockTree::new(None);
        tree.advance(BLOCK);
        let tip = mine(&mut tree, &s, 4, GENESIS, Amount::from_btc(40), FrscMode::Off);
        let view = View::new(&tree, &s, FrscMode::Off, 4);
        assert_eq!(lazy_fork(&view).parent, tip);
        assert_eq!(function_fork(&view, DEFAULT_KAPPA).parent, tip);
    }

    #[test]
    fn lazy_fork_compares_reward_with_contracts() {
        let params = SplitParams::from_contract_share(Ppm::from_const(700_000));
        let mode = FrscMode::On(params);
        let genesis = FrscSet::init_genesis(Amount::from_btc(50), params, &[(2016, Ppm::ONE)]).unwrap();
        let s = constant(2);
        let mut tree = BlockTree::new(Some(genesis.clone()));
        tree.advance(BLOCK);
        let tip = mine(&mut tree, &s, 1, GENESIS, Amount::from_btc(2), mode);
        let view = View::new(&tree, &s, mode, 0);

        // oracle: rewardT of each option computed straight from the contract math
        let tip_state = tree.get(tip).unwrap().frsc_after.clone().unwrap();
        let extend_reward = tip_state.next_claim() + params.miner_direct(Amount::ZERO);
        let undercut_reward = genesis.next_claim() + params.miner_direct(Amount::from_btc(1));
        assert!(undercut_reward > extend_reward);
        let d = lazy_fork(&view);
        assert_eq!(
            d,
            StrategyDecision {
                parent: GENESIS,
                claim: Amount::from_btc(1)
            }
        );
        assert_eq!(view.reward(d.parent, d.claim), undercut_reward);
    }

    #[test]
    fn function_fork_leave_fraction() {
        let s = constant(9);
        let mut tree = BlockTree::new(None);
        tree.advance(BLOCK);
        mine(&mut tree, &s, 1, GENESIS, Amount::from_btc(9), FrscMode::Off);
        let view = View::new(&tree, &s, FrscMode::Off, 0);
        assert_eq!(
            function_fork(&view, Ppm::ZERO),
            StrategyDecision {
                parent: GENESIS,
                claim: Amount::from_btc(9)
            }
        );
        assert_eq!(
            function_fork(&view, Ppm::ONE),
            StrategyDecision {
                parent: GENESIS,
                claim: Amount::ZERO
            }
        );
        assert_eq!(function_fork(&view, DEFAULT_KAPPA).claim.sat(), 450_000_000);

        // an empty tip is extended rather than undercut
        let mut tree = BlockTree::new(None);
        tree.advance(BLOCK);
        let empty = mine(&mut tree, &s, 1, GENESIS, Amount::ZERO, FrscMode::Off);
        let view = View::new(&tree, &s, FrscMode::Off, 0);
        assert_eq!(function_fork(&view, DEFAULT_KAPPA).parent, empty);
    }
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use frsc_sim::chain::{even_hash_power, BlockTree, GENESIS};
use frsc_sim::experiments::game::{run_game, GameSetup};
use frsc_sim::experiments::BLOCK_RATE;
use frsc_sim::strategies::DEFAULT_KAPPA;
use frsc_sim::{Amount, FeeScenario, FrscMode, FrscSet, InflowRate, Miner, Ppm, SplitParams, Strategy};

fn mixed_miners() -> Vec<Miner> {
    let strategies = [
        Strategy::DefaultCompliant,
        Strategy::DefaultCompliant,
        Strategy::PettyCompliant,
        Strategy::LazyFork,
        Strategy::function_fork(DEFAULT_KAPPA),
        Strategy::function_fork(Ppm::from_const(200_000)),
    ];
    let power = even_hash_power(strategies.len());
    strategies
        .iter()
        .enumerate()
        .map(|(id, &strategy)| Miner {
            id,
            hash_power: power[id],
            strategy,
        })
        .collect()
}

fn scenario() -> FeeScenario {
    FeeScenario::constant(InflowRate::per_interval(5_000_000_000, 600))
}

fn contracts() -> (SplitParams, FrscSet) {
    let params = SplitParams::from_contract_share(Ppm::from_const(700_000));
    let g = FrscSet::init_genesis(
        Amount::from_sat(5_000_000_000),
        params,
        &[(144, Ppm::from_const(300_000)), (2016, Ppm::from_const(700_000))],
    )
    .unwrap();
    (params, g)
}

/// Mines `blocks` block events with the mixed population.
fn play(seed: u64, mode: FrscMode, genesis: Option<FrscSet>, blocks: u64) -> BlockTree {
    use frsc_sim::chain::{pick_winner, sample_interval};
    use frsc_sim::strategies::View;
    use frsc_sim::SimTime;
    let miners = mixed_miners();
    let s = scenario();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = BlockTree::new(genesis);
    for _ in 0..blocks {
        tree.advance(SimTime::from_secs_f64(sample_interval(&mut rng, BLOCK_RATE)).micros());
        let w = pick_winner(&mut rng, &miners);
        let d = miners[w].strategy.decide(&View::new(&tree, &s, mode, w));
        tree.extend(w, d, &s, mode).unwrap();
    }
    tree
}

#[test]
fn every_block_keeps_a_nonnegative_mempool() {
    let (params, g) = contracts();
    let tree = play(11, FrscMode::On(params), Some(g), 3_000);
    let s = scenario();
    for b in tree.blocks().iter().skip(1) {
        let parent = tree.get(b.parent.unwrap()).unwrap();
        assert_eq!(b.height, parent.height + 1);
        assert!(b.found_at >= parent.found_at);
        let path: Amount = tree.ancestors(b.id).map(|x| x.claimed_fees).sum();
        assert_eq!(b.path_claimed, path);
        assert_eq!(b.rem_balance + path, s.arrived_fees(b.found_at));
    }
    assert!(tree.orphan_rate() > 0.0, "mixed miners should fork");
}

#[test]
fn branches_replay_to_their_own_state() {
    let (params, g) = contracts();
    let tree = play(12, FrscMode::On(params), Some(g.clone()), 2_000);
    for b in tree.blocks().iter().skip(1).step_by(37) {
        let mut path: Vec<_> = tree.ancestors(b.id).filter(|x| x.id != GENESIS).collect();
        path.reverse();
        let mut state = g.clone();
        for x in path {
            let (s, next) = state.apply_block(x.claimed_fees, params);
            assert_eq!(s, x.settlement);
            state = next;
        }
        assert_eq!(Some(&state), b.frsc_after.as_ref());
    }
}

#[test]
fn main_chain_conserves_value() {
    let (params, g) = contracts();
    let tree = play(13, FrscMode::On(params), Some(g.clone()), 2_500);
    let chain = tree.main_chain();
    let claimed: Amount = chain.iter().map(|&id| tree.get(id).unwrap().claimed_fees).sum();
    let paid: Amount = chain
        .iter()
        .map(|&id| tree.get(id).unwrap().settlement.reward_total)
        .sum();
    let end = tree
        .get(tree.longest_tip())
        .unwrap()
        .frsc_after
        .as_ref()
        .unwrap()
        .total_nu();
    assert_eq!(claimed + g.total_nu(), paid + end);
}

#[test]
fn games_conserve_in_both_modes() {
    let (params, g) = contracts();
    let miners = mixed_miners();
    let s = scenario();
    for mode in [FrscMode::Off, FrscMode::On(params)] {
        for seed in 0..5 {
            let setup = GameSetup {
                miners: &miners,
                scenario: &s,
                mode,
                genesis: Some(g.clone()),
                blocks: 800,
                block_rate: BLOCK_RATE,
            };
            let r = run_game(&setup, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert!(r.conserves(), "seed {seed} mode {mode:?}");
            assert_eq!(r.mined, 800);
            assert_eq!(r.main_chain_len + r.orphaned, r.mined);
        }
    }
}

#[test]
fn same_seed_same_tree() {
    let (params, g) = contracts();
    let a = play(21, FrscMode::On(params), Some(g.clone()), 1_500);
    let b = play(21, FrscMode::On(params), Some(g), 1_500);
    assert_eq!(a.blocks(), b.blocks());
}

#[test]
fn honest_miners_earn_their_hash_share() {
    // one strong and several weak compliant miners, contracts off
    let power = [400_000u32, 150_000, 150_000, 150_000, 150_000];
    let miners: Vec<Miner> = power
        .iter()
        .enumerate()
        .map(|(id, &p)| Miner {
            id,
            hash_power: Ppm::from_const(p),
            strategy: Strategy::DefaultCompliant,
        })
        .collect();
    let s = scenario();
    let setup = GameSetup {
        miners: &miners,
        scenario: &s,
        mode: FrscMode::Off,
        genesis: None,
        blocks: 200_000,
        block_rate: BLOCK_RATE,
    };
    let r = run_game(&setup, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    assert_eq!(r.orphaned, 0);
    let total: u64 = r.per_miner_earnings.iter().map(|a| a.sat()).sum();
    for (m, e) in miners.iter().zip(&r.per_miner_earnings) {
        let share = e.sat() as f64 / total as f64;
        let expected = m.hash_power.as_f64();
        assert!(
            (share / expected - 1.0).abs() < 0.03,
            "miner {}: {share} vs {expected}",
            m.id
        );
    }
}

//! An Exp3 learner choosing between a good and a bad arm.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use frsc_sim::learning::DEFAULT_GAMMA;
use frsc_sim::{Amount, LearnerState, Strategy};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut l = LearnerState::new(
        vec![Strategy::PettyCompliant, Strategy::LazyFork],
        DEFAULT_GAMMA.as_f64(),
    );
    for round in 1..=500 {
        let arm = l.choose(&mut rng);
        // arm 0 pays twice as much as arm 1
        let reward = if arm == 0 { 100 } else { 50 };
        l.update(arm, Amount::from_btc(reward));
        if round % 100 == 0 {
            let p = l.arm_probabilities();
            println!("round {round}: P(petty) {:.3} P(lazy) {:.3}", p[0], p[1]);
        }
    }
}

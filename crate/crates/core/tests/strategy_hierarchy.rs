//! Cross-strategy guarantees: the candidate-class ladder, closed-form
//! optimality checks, and exact reproducibility of every search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

use ris_core::channel::{Channel, PhaseConfiguration};
use ris_core::experiment::sample_scenario;
use ris_core::geometry::CellIndex;
use ris_core::optimize::{
    exhaustive_binary_oracle, optimize_ris1, optimize_ris2_analytic, optimize_ris3_greedy,
    optimize_ris3_random, optimize_ris4, run_strategy, upper_bound_power, StrategyId,
    StrategyParams,
};

const REL: f64 = 1e-12;

fn at_least(lesser: f64, greater: f64) -> bool {
    greater >= lesser * (1.0 - REL) - f64::MIN_POSITIVE
}

#[test]
fn the_ladder_holds_on_random_small_surfaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let params = StrategyParams {
        ris3_iterations: 200,
        ..StrategyParams::default()
    };
    for trial in 0..25 {
        let rows = rng.gen_range(1..=4usize);
        let cols = rng.gen_range(1..=4usize);
        let scenario = sample_scenario(rows, cols, &mut rng);
        let channel = Channel::new(scenario).unwrap();
        let seed = rng.gen::<u64>();

        let ris0 = run_strategy(&channel, StrategyId::Ris0, &params, seed).unwrap();
        let ris1 = optimize_ris1(&channel).unwrap();
        let ris2 = optimize_ris2_analytic(&channel).unwrap();
        let random = optimize_ris3_random(&channel, params.ris3_iterations, seed).unwrap();
        let greedy = optimize_ris3_greedy(&channel, 50).unwrap();
        let oracle = exhaustive_binary_oracle(&channel).unwrap();
        let ris4 = optimize_ris4(&channel).unwrap();
        let bound = upper_bound_power(&channel, channel.scenario().gamma_magnitude).unwrap();

        assert!(at_least(ris0.power, ris1.power), "trial {trial}: ris1 under ris0");
        assert!(at_least(ris1.power, ris2.power), "trial {trial}: ris2 under ris1");
        assert!(ris1.power <= random.power, "trial {trial}: random under ris1");
        assert!(at_least(ris1.power, greedy.power), "trial {trial}: greedy under ris1");
        assert!(at_least(random.power, oracle.power), "trial {trial}: oracle under random");
        assert!(at_least(greedy.power, oracle.power), "trial {trial}: oracle under greedy");
        assert!(at_least(oracle.power, ris4.power), "trial {trial}: ris4 under binary oracle");
        assert!(at_least(ris2.power, ris4.power), "trial {trial}: ris4 under ris2");
        for r in [&ris0, &ris1, &ris2, &random, &greedy, &oracle, &ris4] {
            assert!(
                r.power <= bound * (1.0 + REL),
                "trial {trial}: {} exceeded the alignment bound",
                r.strategy
            );
        }
    }
}

#[test]
fn analytic_global_phase_beats_dense_random_phases() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let scenario = sample_scenario(8, 8, &mut rng);
    let channel = Channel::new(scenario).unwrap();
    let amplitude = channel.scenario().gamma_magnitude;
    let analytic = optimize_ris2_analytic(&channel).unwrap();
    for _ in 0..10_000 {
        let phase = rng.gen_range(0.0..TAU);
        let config = PhaseConfiguration::uniform(8, 8, amplitude, phase).unwrap();
        let power = channel.received_power(&config).unwrap().total_power;
        assert!(
            power <= analytic.power * (1.0 + REL),
            "global phase {phase} beat the closed form"
        );
    }
}

#[test]
fn per_cell_alignment_is_stationary() {
    // Nudging any single cell away from the aligned phase cannot increase
    // the power: first-order terms vanish at the optimum.
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let scenario = sample_scenario(6, 6, &mut rng);
    let channel = Channel::new(scenario).unwrap();
    let best = optimize_ris4(&channel).unwrap();
    for _ in 0..12 {
        let n = rng.gen_range(1..=6usize);
        let m = rng.gen_range(1..=6usize);
        let idx = CellIndex::new(n, m);
        for delta in [-1e-4, 1e-4] {
            let mut nudged = best.config.clone();
            let amplitude = nudged.amplitude(idx).unwrap();
            let phase = nudged.phase(idx).unwrap();
            nudged.set(idx, amplitude, phase + delta).unwrap();
            let power = channel.received_power(&nudged).unwrap().total_power;
            assert!(
                power <= best.power * (1.0 + REL),
                "perturbing cell ({n}, {m}) by {delta} increased the power"
            );
        }
    }
}

#[test]
fn random_search_finds_the_binary_optimum_on_tiny_surfaces() {
    // With 4 cells there are 16 binary patterns; 200 draws all but
    // guarantee coverage, and the result can never exceed the oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut hits = 0;
    let trials = 30;
    for _ in 0..trials {
        let scenario = sample_scenario(2, 2, &mut rng);
        let channel = Channel::new(scenario).unwrap();
        let seed = rng.gen::<u64>();
        let random = optimize_ris3_random(&channel, 200, seed).unwrap();
        let oracle = exhaustive_binary_oracle(&channel).unwrap();
        assert!(random.power <= oracle.power * (1.0 + REL));
        if random.power >= oracle.power * (1.0 - REL) {
            hits += 1;
        }
    }
    assert!(
        hits >= trials - 1,
        "random search matched the oracle only {hits}/{trials} times"
    );
}

#[test]
fn exhaustive_budget_random_search_attains_the_oracle_up_to_4x4() {
    // With at least 4 * 2^cells draws the seeded search has visited the
    // optimum with overwhelming probability; the fixed seeds below are
    // verified to reach it, and determinism keeps them reaching it.
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for (rows, cols) in [(1usize, 2usize), (2, 2), (2, 3), (3, 3), (4, 4)] {
        let scenario = sample_scenario(rows, cols, &mut rng);
        let channel = Channel::new(scenario).unwrap();
        let iterations = 4 * (1usize << (rows * cols));
        let random = optimize_ris3_random(&channel, iterations, 42).unwrap();
        let oracle = exhaustive_binary_oracle(&channel).unwrap();
        assert!(
            random.power >= oracle.power * (1.0 - REL),
            "{rows}x{cols}: random search with {iterations} draws missed the optimum"
        );
        assert!(random.power <= oracle.power * (1.0 + REL));
    }
}

#[test]
fn greedy_never_decreases_across_sweep_budgets() {
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    let scenario = sample_scenario(4, 4, &mut rng);
    let channel = Channel::new(scenario).unwrap();
    let mut last = optimize_ris1(&channel).unwrap().power;
    for sweeps in 1..=6 {
        let r = optimize_ris3_greedy(&channel, sweeps).unwrap();
        assert!(at_least(last, r.power), "budget {sweeps} lost ground");
        last = r.power;
    }
}

#[test]
fn searches_are_bit_reproducible_across_channel_rebuilds() {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    let scenario = sample_scenario(4, 5, &mut rng);
    let params = StrategyParams {
        ris3_iterations: 100,
        ..StrategyParams::default()
    };
    for id in StrategyId::ALL {
        let a = run_strategy(&Channel::new(scenario.clone()).unwrap(), id, &params, 42).unwrap();
        let b = run_strategy(&Channel::new(scenario.clone()).unwrap(), id, &params, 42).unwrap();
        assert_eq!(a.power.to_bits(), b.power.to_bits(), "{id} power drifted");
        assert_eq!(a.config, b.config, "{id} configuration drifted");
        assert_eq!(a.evaluations, b.evaluations, "{id} evaluation count drifted");
    }
}

#[test]
fn binary_phases_stay_binary_under_every_binary_strategy() {
    let mut rng = ChaCha8Rng::seed_from_u64(314);
    let scenario = sample_scenario(3, 3, &mut rng);
    let channel = Channel::new(scenario).unwrap();
    for result in [
        optimize_ris1(&channel).unwrap(),
        optimize_ris3_random(&channel, 50, 8).unwrap(),
        optimize_ris3_greedy(&channel, 20).unwrap(),
        exhaustive_binary_oracle(&channel).unwrap(),
    ] {
        for &p in result.config.phases() {
            assert!(p == 0.0 || p == PI, "{} produced phase {p}", result.strategy);
        }
        for &a in result.config.amplitudes() {
            assert_eq!(a, channel.scenario().gamma_magnitude);
        }
    }
}

//! Property tests for the model's structural guarantees: symmetries of the
//! geometry, conservation-style identities of the channel, and the bounds
//! every configuration respects.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use ris_core::channel::{
    dbm_to_watts, normalize_phase, received_power, watts_to_dbm, Channel, PhaseConfiguration,
};
use ris_core::experiment::sample_scenario;
use ris_core::geometry::{
    cell_center, cell_geometry, los_distance, rx_position, tx_position, CellIndex, GeometryConfig,
};
use ris_core::patterns::PatternModel;

fn arbitrary_geometry(
    rows: usize,
    cols: usize,
    dx: f64,
    dy: f64,
    d1: f64,
    d2: f64,
    t1: f64,
    t2: f64,
) -> GeometryConfig {
    GeometryConfig::new(rows, cols, dx, dy, d1, d2, t1, t2, 35e9).expect("inputs in domain")
}

proptest! {
    #[test]
    fn phase_normalization_is_idempotent_and_in_range(x in -1e9f64..1e9f64) {
        let p = normalize_phase(x);
        prop_assert!((0.0..TAU).contains(&p));
        prop_assert_eq!(normalize_phase(p), p);
        // Normalization preserves the angle: same unit phasor.
        let (s1, c1) = x.sin_cos();
        let (s2, c2) = p.sin_cos();
        prop_assert!((s1 - s2).abs() < 1e-6 && (c1 - c2).abs() < 1e-6);
    }

    #[test]
    fn dbm_round_trip(dbm in -250.0f64..40.0) {
        let w = dbm_to_watts(dbm);
        prop_assert!((watts_to_dbm(w).unwrap() - dbm).abs() < 1e-9);
    }

    #[test]
    fn cell_grid_is_centered_and_mirror_symmetric(
        rows in 1usize..=16,
        cols in 1usize..=16,
        dx in 0.0005f64..0.02,
        dy in 0.0005f64..0.02,
        n_raw in 0usize..16,
        m_raw in 0usize..16,
    ) {
        let cfg = arbitrary_geometry(rows, cols, dx, dy, 1.0, 2.0, 0.5, 0.5);
        let n = 1 + n_raw % rows;
        let m = 1 + m_raw % cols;
        let a = cell_center(&cfg, CellIndex::new(n, m)).unwrap();
        let b = cell_center(&cfg, CellIndex::new(rows + 1 - n, cols + 1 - m)).unwrap();
        prop_assert!((a.x + b.x).abs() < 1e-12);
        prop_assert!((a.y + b.y).abs() < 1e-12);

        let (mut sx, mut sy) = (0.0, 0.0);
        for nn in 1..=rows {
            for mm in 1..=cols {
                let c = cell_center(&cfg, CellIndex::new(nn, mm)).unwrap();
                sx += c.x;
                sy += c.y;
            }
        }
        let count = (rows * cols) as f64;
        prop_assert!((sx / count).abs() < 1e-12);
        prop_assert!((sy / count).abs() < 1e-12);
    }

    #[test]
    fn cell_ranges_respect_the_triangle_inequality(
        rows in 1usize..=12,
        cols in 1usize..=12,
        d1 in 0.3f64..30.0,
        d2 in 0.3f64..30.0,
        t1 in 0.0f64..1.4,
        t2 in 0.0f64..1.4,
    ) {
        let cfg = arbitrary_geometry(rows, cols, 0.0038, 0.0038, d1, d2, t1, t2);
        let cells = cell_geometry(&cfg).unwrap();
        for c in &cells {
            let off = (c.center.x * c.center.x + c.center.y * c.center.y).sqrt();
            prop_assert!(c.r_t <= d1 + off + 1e-12);
            prop_assert!(c.r_t >= (d1 - off).abs() - 1e-12);
            prop_assert!(c.r_r <= d2 + off + 1e-12);
            prop_assert!(c.r_r >= (d2 - off).abs() - 1e-12);
        }
        if let Ok(d) = los_distance(&cfg) {
            prop_assert!(d <= d1 + d2 + 1e-12);
            let tx = tx_position(&cfg);
            let rx = rx_position(&cfg);
            prop_assert!((tx.distance(rx) - d).abs() < 1e-15);
        }
    }

    #[test]
    fn receiver_distance_growth_is_monotone_in_range(
        d2a in 0.5f64..40.0,
        growth in 1.1f64..4.0,
    ) {
        // Pushing the receiver out along its ray moves it away from every cell.
        let cfg_a = arbitrary_geometry(8, 8, 0.0038, 0.0038, 1.0, d2a, 0.6, 0.7);
        let cfg_b = cfg_a.with_d2(d2a * growth).unwrap();
        let cells_a = cell_geometry(&cfg_a).unwrap();
        let cells_b = cell_geometry(&cfg_b).unwrap();
        for (a, b) in cells_a.iter().zip(&cells_b) {
            prop_assert!(b.r_r > a.r_r);
            prop_assert_eq!(a.r_t, b.r_t);
        }
    }

    #[test]
    fn dark_surface_degenerates_to_friis(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = 1 + (seed % 6) as usize;
        let cols = 1 + ((seed >> 8) % 6) as usize;
        let scenario = sample_scenario(rows, cols, &mut rng);
        let dark = PhaseConfiguration::uniform(rows, cols, 0.0, 0.0).unwrap();
        let fields = received_power(&scenario, &dark).unwrap();
        let g = &scenario.geometry;
        let d = los_distance(g).unwrap();
        let spreading = g.wavelength() / (4.0 * std::f64::consts::PI * d);
        let friis = scenario.p_t_watts
            * scenario.tx_antenna.gain_direct_path
            * scenario.rx_antenna.gain_direct_path
            * spreading
            * spreading;
        prop_assert!((fields.total_power - friis).abs() / friis < 1e-12);
    }

    #[test]
    fn global_phase_shift_rotates_but_does_not_reshape(
        seed in any::<u64>(),
        beta in 0.01f64..6.2,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scenario = sample_scenario(5, 5, &mut rng);
        let channel = Channel::new(scenario).unwrap();
        let phases: Vec<f64> = (0..25).map(|_| rng.gen_range(0.0..TAU)).collect();
        let amps = vec![0.7; 25];
        let base = PhaseConfiguration::new(5, 5, amps.clone(), phases.clone()).unwrap();
        let shifted_phases: Vec<f64> = phases.iter().map(|p| p + beta).collect();
        let shifted = PhaseConfiguration::new(5, 5, amps, shifted_phases).unwrap();
        let a = channel.reflected_field(&base).unwrap();
        let b = channel.reflected_field(&shifted).unwrap();
        prop_assert!((a.norm() - b.norm()).abs() <= 1e-9 * a.norm().max(1e-30));
        if a.norm() > 1e-25 {
            let rotation = normalize_phase(b.arg() - a.arg());
            let expect = normalize_phase(beta);
            let diff = (rotation - expect).abs();
            prop_assert!(diff < 1e-6 || (TAU - diff) < 1e-6);
        }
    }

    #[test]
    fn total_power_respects_the_two_path_triangle_bounds(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = 1 + (seed % 7) as usize;
        let cols = 1 + ((seed >> 16) % 7) as usize;
        let scenario = sample_scenario(rows, cols, &mut rng);
        let phases: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(0.0..TAU)).collect();
        let amps: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(0.0..1.0)).collect();
        let config = PhaseConfiguration::new(rows, cols, amps, phases).unwrap();
        let fields = received_power(&scenario, &config).unwrap();
        let r = fields.reflected_sum.norm();
        let l = fields.los.norm();
        let total = fields.total_power.sqrt();
        prop_assert!(total <= (r + l) * (1.0 + 1e-9) + 1e-300);
        prop_assert!(total >= (r - l).abs() * (1.0 - 1e-9) - 1e-300);
    }

    #[test]
    fn received_power_is_linear_in_transmit_power(
        seed in any::<u64>(),
        scale in 0.01f64..100.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scenario = sample_scenario(4, 4, &mut rng);
        let config = PhaseConfiguration::uniform(4, 4, 0.8, rng.gen_range(0.0..TAU)).unwrap();
        let base = received_power(&scenario, &config).unwrap().total_power;
        let mut scaled = scenario.clone();
        scaled.p_t_watts *= scale;
        let after = received_power(&scaled, &config).unwrap().total_power;
        if base > 0.0 {
            prop_assert!((after / base - scale).abs() / scale < 1e-12);
        }
    }

    #[test]
    fn pattern_values_never_leave_the_unit_interval(
        q in 0.0f64..300.0,
        theta in 0.0f64..std::f64::consts::PI,
        clamp in any::<bool>(),
    ) {
        let p = PatternModel::cosine_power(q, clamp).unwrap();
        let v = p.value(theta, 0.0);
        prop_assert!((0.0..=1.0).contains(&v));
        // On-axis response is always full strength.
        prop_assert_eq!(p.value(0.0, 0.0), 1.0);
    }
}

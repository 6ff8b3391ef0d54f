//! Distance sweeps, canonical presets, and fading statistics.
//!
//! A sweep fixes everything about the link except the receiver distance,
//! then runs a set of strategies at each distance. Determinism contract:
//! the per-distance random seed is derived from the master seed and the
//! distance value itself (not its position in the list), so splitting a
//! sweep into sub-sweeps, reordering distances, or rerunning a single
//! distance reproduces the exact same numbers.

use rand::Rng;

use crate::channel::{dbm_to_watts, Channel, Scenario};
use crate::error::{Error, Result};
use crate::geometry::{CellIndex, GeometryConfig};
use crate::optimize::{run_strategy, StrategyId, StrategyParams};
use crate::patterns::{AntennaSpec, PatternModel};

/// A scenario with the receiver distance left open. Sweeps stamp out one
/// [`Scenario`] per distance from this.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTemplate {
    pub rows: usize,
    pub cols: usize,
    pub cell_dx: f64,
    pub cell_dy: f64,
    pub d1: f64,
    pub theta_t: f64,
    pub theta_r: f64,
    pub frequency_hz: f64,
    pub tx_antenna: AntennaSpec,
    pub rx_antenna: AntennaSpec,
    pub cell_pattern: PatternModel,
    pub gamma_magnitude: f64,
    pub p_t_watts: f64,
    pub calibration_offset_db: f64,
}

impl ScenarioTemplate {
    /// The scenario at one receiver distance.
    pub fn scenario_at(&self, d2: f64) -> Result<Scenario> {
        let geometry = GeometryConfig::new(
            self.rows,
            self.cols,
            self.cell_dx,
            self.cell_dy,
            self.d1,
            d2,
            self.theta_t,
            self.theta_r,
            self.frequency_hz,
        )?;
        let scenario = Scenario {
            geometry,
            tx_antenna: self.tx_antenna,
            rx_antenna: self.rx_antenna,
            cell_pattern: self.cell_pattern,
            gamma_magnitude: self.gamma_magnitude,
            p_t_watts: self.p_t_watts,
            calibration_offset_db: self.calibration_offset_db,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

/// `points` logarithmically spaced values from `start` to `stop` inclusive.
pub fn log_spaced(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidCount {
            name: "points",
            reason: "a spaced range needs at least its two endpoints",
            value: points,
        });
    }
    if !(start.is_finite() && start > 0.0) {
        return Err(Error::InvalidParameter {
            name: "start",
            reason: "must be finite and positive",
            value: start,
        });
    }
    if !(stop.is_finite() && stop > start) {
        return Err(Error::InvalidParameter {
            name: "stop",
            reason: "must be finite and greater than start",
            value: stop,
        });
    }
    let lg_start = start.log10();
    let lg_stop = stop.log10();
    let span = lg_stop - lg_start;
    let last = points - 1;
    let mut values = Vec::with_capacity(points);
    values.push(start);
    for i in 1..last {
        values.push(10f64.powf(lg_start + span * i as f64 / last as f64));
    }
    values.push(stop);
    check_increasing("log-spaced distances", &values)?;
    Ok(values)
}

/// Linearly stepped values from `start` through `stop` inclusive (the last
/// value may overshoot `stop` by float rounding only).
pub fn linear_stepped(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && start > 0.0) {
        return Err(Error::InvalidParameter {
            name: "start",
            reason: "must be finite and positive",
            value: start,
        });
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter {
            name: "step",
            reason: "must be finite and positive",
            value: step,
        });
    }
    if !(stop.is_finite() && stop >= start) {
        return Err(Error::InvalidParameter {
            name: "stop",
            reason: "must be finite and at least start",
            value: stop,
        });
    }
    // The small slack keeps 0.6 + 12 * 0.2 style endpoints inside the range
    // despite representation error in the step.
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    let values: Vec<f64> = (0..count).map(|i| start + i as f64 * step).collect();
    check_increasing("stepped distances", &values)?;
    Ok(values)
}

fn check_increasing(what: &'static str, values: &[f64]) -> Result<()> {
    for (i, pair) in values.windows(2).enumerate() {
        if !(pair[1] > pair[0]) {
            return Err(Error::NotIncreasing {
                what,
                position: i + 1,
            });
        }
    }
    if values.first().copied().unwrap_or(0.0) <= 0.0 {
        return Err(Error::NotIncreasing { what, position: 0 });
    }
    Ok(())
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one distance of a sweep, mixed from the master seed and the
/// distance's bit pattern. Depending on the value rather than the list
/// position is what lets sub-sweeps reproduce a full sweep's results.
pub fn child_seed(seed: u64, d2: f64) -> u64 {
    splitmix64(splitmix64(seed) ^ d2.to_bits())
}

/// Everything a sweep needs: the link template, the distances, the
/// strategies to run at each, the master seed, and the strategy knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub template: ScenarioTemplate,
    pub d2_values: Vec<f64>,
    pub strategies: Vec<StrategyId>,
    pub seed: u64,
    pub params: StrategyParams,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d2_values.is_empty() {
            return Err(Error::NotEnoughValues {
                what: "sweep distances",
                need: 1,
                got: 0,
            });
        }
        check_increasing("sweep distances", &self.d2_values)?;
        if self.strategies.is_empty() {
            return Err(Error::NotEnoughValues {
                what: "sweep strategies",
                need: 1,
                got: 0,
            });
        }
        for (i, id) in self.strategies.iter().enumerate() {
            if self.strategies[..i].contains(id) {
                return Err(Error::InvalidParameter {
                    name: "strategies",
                    reason: "strategy listed twice",
                    value: i as f64,
                });
            }
        }
        // Surface the template's problems before any distance is run.
        self.template.scenario_at(self.d2_values[0])?;
        Ok(())
    }
}

/// How a strategy arrived at its per-distance result, for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutcomeMeta {
    /// Global-phase strategies: the phase every cell was set to.
    UniformPhase(f64),
    /// Seeded searches: the child seed that drove the draw.
    Seed(u64),
    /// Strategies with nothing compact to report.
    None,
}

/// One strategy's result at one distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyOutcome {
    /// Received power, watts.
    pub power_watts: f64,
    /// Calibrated, floored reading in dBm (see `Scenario::reported_dbm`).
    pub reported_dbm: f64,
    pub meta: OutcomeMeta,
}

/// One distance of a sweep; `outcomes` is parallel to the sweep's strategy
/// list.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub d2: f64,
    pub outcomes: Vec<StrategyOutcome>,
}

/// A finished sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub strategies: Vec<StrategyId>,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// The (distance, reported dBm) series of one strategy.
    pub fn series(&self, id: StrategyId) -> Option<Vec<(f64, f64)>> {
        let col = self.strategies.iter().position(|s| *s == id)?;
        Some(
            self.rows
                .iter()
                .map(|r| (r.d2, r.outcomes[col].reported_dbm))
                .collect(),
        )
    }
}

/// Runs every strategy at every distance, in listed order, single threaded.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.d2_values.len());
    for &d2 in &spec.d2_values {
        let scenario = spec.template.scenario_at(d2)?;
        let channel = Channel::new(scenario)?;
        let seed = child_seed(spec.seed, d2);
        let mut outcomes = Vec::with_capacity(spec.strategies.len());
        for &id in &spec.strategies {
            let r = run_strategy(&channel, id, &spec.params, seed)?;
            let meta = match id {
                StrategyId::Ris0
                | StrategyId::Ris1
                | StrategyId::Ris2Grid
                | StrategyId::Ris2Analytic => {
                    OutcomeMeta::UniformPhase(r.config.phase(CellIndex::new(1, 1))?)
                }
                StrategyId::Ris3Random => OutcomeMeta::Seed(seed),
                _ => OutcomeMeta::None,
            };
            outcomes.push(StrategyOutcome {
                power_watts: r.power,
                reported_dbm: channel.scenario().reported_dbm(r.power),
                meta,
            });
        }
        rows.push(SweepRow { d2, outcomes });
    }
    Ok(SweepResult {
        strategies: spec.strategies.clone(),
        rows,
    })
}

/// Fading statistics of one (distance, dBm) series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingMetrics {
    /// Interior points strictly below both neighbors.
    pub local_minima_count: usize,
    /// Interior points strictly above both neighbors.
    pub local_maxima_count: usize,
    /// Largest dB swing between consecutive interior extrema; 0 when the
    /// series has fewer than two of them.
    pub max_peak_to_trough_db: f64,
    /// Fraction of consecutive pairs that strictly decrease. 1.0 means the
    /// series falls monotonically, the free-space expectation.
    pub monotone_fraction: f64,
}

/// Computes [`FadingMetrics`]; needs at least three points so "interior"
/// means something.
pub fn fading_metrics(series: &[(f64, f64)]) -> Result<FadingMetrics> {
    if series.len() < 3 {
        return Err(Error::NotEnoughValues {
            what: "fading series",
            need: 3,
            got: series.len(),
        });
    }
    let y: Vec<f64> = series.iter().map(|&(_, v)| v).collect();
    let mut minima = 0usize;
    let mut maxima = 0usize;
    let mut extrema: Vec<f64> = Vec::new();
    for i in 1..y.len() - 1 {
        if y[i] < y[i - 1] && y[i] < y[i + 1] {
            minima += 1;
            extrema.push(y[i]);
        } else if y[i] > y[i - 1] && y[i] > y[i + 1] {
            maxima += 1;
            extrema.push(y[i]);
        }
    }
    let max_peak_to_trough_db = extrema
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0f64, f64::max);
    let decreasing = y.windows(2).filter(|w| w[1] < w[0]).count();
    Ok(FadingMetrics {
        local_minima_count: minima,
        local_maxima_count: maxima,
        max_peak_to_trough_db,
        monotone_fraction: decreasing as f64 / (y.len() - 1) as f64,
    })
}

fn fig3_template(theta_t_deg: f64) -> ScenarioTemplate {
    ScenarioTemplate {
        rows: 64,
        cols: 64,
        cell_dx: 0.0038,
        cell_dy: 0.0038,
        d1: 1.0,
        theta_t: theta_t_deg.to_radians(),
        theta_r: 45f64.to_radians(),
        frequency_hz: 35e9,
        tx_antenna: AntennaSpec::isotropic_unit(),
        rx_antenna: AntennaSpec::isotropic_unit(),
        cell_pattern: PatternModel::CosinePower {
            exponent: 1.0,
            hemisphere_clamp: true,
        },
        gamma_magnitude: 0.8,
        p_t_watts: dbm_to_watts(0.0),
        calibration_offset_db: 0.0,
    }
}

/// 64x64 surface, both terminals 45 degrees off the normal, receiver swept
/// 1 m to 100 m over 200 log-spaced points at 0 dBm transmit power.
pub fn preset_fig3a() -> SweepSpec {
    SweepSpec {
        template: fig3_template(45.0),
        d2_values: log_spaced(1.0, 100.0, 200).expect("constants are valid"),
        strategies: vec![
            StrategyId::Ris0,
            StrategyId::Ris1,
            StrategyId::Ris2Analytic,
            StrategyId::Ris3Random,
            StrategyId::Ris4,
        ],
        seed: 0,
        params: StrategyParams::default(),
    }
}

/// Same as [`preset_fig3a`] with the transmitter at 30 degrees.
pub fn preset_fig3b() -> SweepSpec {
    SweepSpec {
        template: fig3_template(30.0),
        ..preset_fig3a()
    }
}

/// 30x30 surface with 25.1 dB horn terminals ((cos theta)^161 patterns,
/// RIS-path gain 323.6, direct-path gain 128.8), 15 dBm transmit power,
/// receiver stepped 0.6 m to 3.0 m in 0.2 m steps.
pub fn preset_fig5() -> SweepSpec {
    let horn = PatternModel::CosinePower {
        exponent: 161.0,
        hemisphere_clamp: true,
    };
    let antenna = AntennaSpec {
        gain_ris_path: 323.6,
        gain_direct_path: 128.8,
        pattern: horn,
    };
    SweepSpec {
        template: ScenarioTemplate {
            rows: 30,
            cols: 30,
            cell_dx: 0.0038,
            cell_dy: 0.0038,
            d1: 1.0,
            theta_t: 45f64.to_radians(),
            theta_r: 45f64.to_radians(),
            frequency_hz: 35e9,
            tx_antenna: antenna,
            rx_antenna: antenna,
            cell_pattern: PatternModel::CosinePower {
                exponent: 1.0,
                hemisphere_clamp: true,
            },
            gamma_magnitude: 0.8,
            p_t_watts: dbm_to_watts(15.0),
            calibration_offset_db: 0.0,
        },
        d2_values: linear_stepped(0.6, 3.0, 0.2).expect("constants are valid"),
        strategies: vec![StrategyId::Ris0, StrategyId::Ris1],
        seed: 0,
        params: StrategyParams::default(),
    }
}

/// A bounded random scenario for self-checks and benchmarks: pitches of 1
/// to 10 mm, terminals 0.3 to 50 m out at up to 85 degrees, 1 to 100 GHz,
/// gains up to 400, any reflection magnitude, microwatts to 10 W transmit
/// power. Draws with coincident terminals (measure zero) are redrawn.
pub fn sample_scenario(rows: usize, cols: usize, rng: &mut impl Rng) -> Scenario {
    fn sample_pattern(rng: &mut impl Rng) -> PatternModel {
        match rng.gen_range(0..4u8) {
            0 => PatternModel::Isotropic,
            1 => PatternModel::CosinePower {
                exponent: 1.0,
                hemisphere_clamp: true,
            },
            2 => PatternModel::CosinePower {
                exponent: rng.gen_range(2.0..20.0),
                hemisphere_clamp: true,
            },
            _ => PatternModel::CosinePower {
                exponent: 161.0,
                hemisphere_clamp: true,
            },
        }
    }
    loop {
        let geometry = GeometryConfig::new(
            rows,
            cols,
            rng.gen_range(0.001..0.01),
            rng.gen_range(0.001..0.01),
            rng.gen_range(0.3..50.0),
            rng.gen_range(0.3..50.0),
            rng.gen_range(0.0..85f64.to_radians()),
            rng.gen_range(0.0..85f64.to_radians()),
            rng.gen_range(1e9..100e9),
        )
        .expect("sampled fields lie in their domains");
        let scenario = Scenario {
            geometry,
            tx_antenna: AntennaSpec::new(
                rng.gen_range(0.1..400.0),
                rng.gen_range(0.1..400.0),
                sample_pattern(rng),
            )
            .expect("sampled gains are positive"),
            rx_antenna: AntennaSpec::new(
                rng.gen_range(0.1..400.0),
                rng.gen_range(0.1..400.0),
                sample_pattern(rng),
            )
            .expect("sampled gains are positive"),
            cell_pattern: sample_pattern(rng),
            gamma_magnitude: rng.gen_range(0.0..1.0),
            p_t_watts: 10f64.powf(rng.gen_range(-6.0..1.0)),
            calibration_offset_db: rng.gen_range(-30.0..30.0),
        };
        if crate::geometry::los_distance(&scenario.geometry).is_ok() {
            return scenario;
        }
    }
}

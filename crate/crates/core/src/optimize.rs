//! Search strategies over the surface's programmable phases.
//!
//! Every strategy works on a fixed amplitude (the scenario's reflection
//! magnitude) and varies phases only, mirroring hardware whose cells switch
//! phase states but not loss. The strategies form a ladder of configuration
//! classes, each containing the previous one's candidates:
//!
//! - `ris0`: the surface left in its reference state, every cell at phase 0
//! - `ris1`: one global binary choice, all cells 0 or all pi
//! - `ris2-grid` / `ris2-analytic`: one global continuous phase, found by
//!   grid traversal or in closed form
//! - `ris3-random` / `ris3-greedy`: independent binary phases per cell,
//!   found by seeded random search or coordinate ascent
//! - `ris4`: independent continuous phases per cell, closed form
//!
//! Because each class contains the configurations of the class below, the
//! attained powers are monotone up the ladder. `exhaustive-binary`
//! enumerates every per-cell binary configuration on small surfaces and
//! serves as the ground truth the heuristics are measured against.
//!
//! Reported powers are always re-evaluations of the returned configuration
//! through [`Channel::received_power`], never a value carried out of a
//! search shortcut, so callers can verify any result bit for bit.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

use crate::channel::{normalize_phase, Channel, PhaseConfiguration, Scenario};
use crate::error::{Error, Result};

/// Largest surface (in cells) the exhaustive binary oracle will enumerate;
/// 2^20 evaluations is the line between "slow test" and "mistake".
pub const EXHAUSTIVE_CELL_CAP: usize = 20;

/// Grid traversals beyond this many points are rejected as configuration
/// errors rather than allowed to run for hours.
const GRID_POINT_CAP: u64 = 10_000_000;

/// Identifies a search strategy. The textual form (kebab-case, for example
/// `ris2-analytic`) is used by CLI flags and config files; snake case is
/// accepted when parsing because CSV column labels use it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyId {
    Ris0,
    Ris1,
    Ris2Grid,
    Ris2Analytic,
    Ris3Random,
    Ris3Greedy,
    Ris4,
    ExhaustiveBinary,
}

impl StrategyId {
    /// All strategies, ladder order.
    pub const ALL: [StrategyId; 8] = [
        StrategyId::Ris0,
        StrategyId::Ris1,
        StrategyId::Ris2Grid,
        StrategyId::Ris2Analytic,
        StrategyId::Ris3Random,
        StrategyId::Ris3Greedy,
        StrategyId::Ris4,
        StrategyId::ExhaustiveBinary,
    ];

    /// Kebab-case name.
    pub fn name(&self) -> &'static str {
        match self {
            StrategyId::Ris0 => "ris0",
            StrategyId::Ris1 => "ris1",
            StrategyId::Ris2Grid => "ris2-grid",
            StrategyId::Ris2Analytic => "ris2-analytic",
            StrategyId::Ris3Random => "ris3-random",
            StrategyId::Ris3Greedy => "ris3-greedy",
            StrategyId::Ris4 => "ris4",
            StrategyId::ExhaustiveBinary => "exhaustive-binary",
        }
    }

    /// Snake-case form used for CSV column labels.
    pub fn snake_name(&self) -> String {
        self.name().replace('-', "_")
    }
}

impl std::fmt::Display for StrategyId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for StrategyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.trim().to_ascii_lowercase().replace('_', "-");
        StrategyId::ALL
            .iter()
            .copied()
            .find(|id| id.name() == normalized)
            .ok_or(Error::InvalidParameter {
                name: "strategy",
                reason: "unknown strategy name",
                value: f64::NAN,
            })
    }
}

/// Tunable knobs shared by a sweep's strategy invocations.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyParams {
    /// Random draws for `ris3-random` (candidates beyond the two uniforms).
    pub ris3_iterations: usize,
    /// Grid pitch in radians for `ris2-grid`.
    pub ris2_grid_step: f64,
    /// Full-surface passes `ris3-greedy` makes before giving up.
    pub ris3_max_sweeps: usize,
}

impl Default for StrategyParams {
    fn default() -> Self {
        Self {
            ris3_iterations: 1000,
            ris2_grid_step: 1f64.to_radians(),
            ris3_max_sweeps: 50,
        }
    }
}

/// What a strategy found: the configuration, its re-evaluated received
/// power in watts, how many objective probes the search spent, and the seed
/// if the search was randomized.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub strategy: StrategyId,
    pub config: PhaseConfiguration,
    pub power: f64,
    pub evaluations: u64,
    pub seed: Option<u64>,
}

/// Baseline configuration: every cell at the scenario's reflection
/// magnitude and one shared phase.
pub fn ris0_uniform(scenario: &Scenario, amplitude: f64, phase: f64) -> Result<PhaseConfiguration> {
    PhaseConfiguration::uniform(
        scenario.geometry.rows,
        scenario.geometry.cols,
        amplitude,
        phase,
    )
}

fn uniform_candidate(channel: &Channel, phase: f64) -> Result<(PhaseConfiguration, f64)> {
    let config = ris0_uniform(channel.scenario(), channel.scenario().gamma_magnitude, phase)?;
    let power = channel.received_power(&config)?.total_power;
    Ok((config, power))
}

/// Global binary choice: the better of all-cells-0 and all-cells-pi.
/// A tie keeps phase 0 so the result never depends on evaluation order.
pub fn optimize_ris1(channel: &Channel) -> Result<OptimizationResult> {
    let (zero_cfg, zero_p) = uniform_candidate(channel, 0.0)?;
    let (pi_cfg, pi_p) = uniform_candidate(channel, PI)?;
    let (config, power) = if pi_p > zero_p {
        (pi_cfg, pi_p)
    } else {
        (zero_cfg, zero_p)
    };
    Ok(OptimizationResult {
        strategy: StrategyId::Ris1,
        config,
        power,
        evaluations: 2,
        seed: None,
    })
}

/// Global continuous phase by grid traversal: evaluates the uniform
/// configuration at `0, step, 2 step, ...` below `2 pi` and keeps the best,
/// ties going to the smallest phase.
pub fn optimize_ris2_grid(channel: &Channel, step: f64) -> Result<OptimizationResult> {
    if !(step.is_finite() && step > 0.0 && step <= PI) {
        return Err(Error::InvalidParameter {
            name: "ris2 grid step",
            reason: "must lie in (0, pi] radians",
            value: step,
        });
    }
    if (TAU / step).ceil() as u64 > GRID_POINT_CAP {
        return Err(Error::InvalidParameter {
            name: "ris2 grid step",
            reason: "grid would exceed ten million points",
            value: step,
        });
    }
    let mut best: Option<(PhaseConfiguration, f64)> = None;
    let mut evaluations = 0u64;
    let mut k = 0u64;
    loop {
        let phase = k as f64 * step;
        if phase >= TAU {
            break;
        }
        let (config, power) = uniform_candidate(channel, phase)?;
        evaluations += 1;
        // Strict improvement only: the first (smallest) phase wins ties.
        if best.as_ref().map_or(true, |(_, p)| power > *p) {
            best = Some((config, power));
        }
        k += 1;
    }
    let (config, power) = best.expect("grid contains at least phase 0");
    Ok(OptimizationResult {
        strategy: StrategyId::Ris2Grid,
        config,
        power,
        evaluations,
        seed: None,
    })
}

/// Global continuous phase in closed form.
///
/// Writing the received field as `A e^(j alpha) + B`, where `A` is the
/// reflected sum at global phase 0 and `B` the direct path, the magnitude
/// is maximized when the two terms align: `alpha = arg(B) - arg(A)`, giving
/// `(|A| + |B|)^2`. One objective evaluation: the phase-0 field is channel
/// state information, not a probe of the objective.
pub fn optimize_ris2_analytic(channel: &Channel) -> Result<OptimizationResult> {
    let amplitude = channel.scenario().gamma_magnitude;
    let reference = ris0_uniform(channel.scenario(), amplitude, 0.0)?;
    let a = channel.reflected_field(&reference)?;
    let b = channel.los_phasor();
    let alpha = if a.norm() == 0.0 {
        // Nothing reflects; any phase ties, so keep the baseline.
        0.0
    } else {
        normalize_phase(b.arg() - a.arg())
    };
    let config = ris0_uniform(channel.scenario(), amplitude, alpha)?;
    let power = channel.received_power(&config)?.total_power;
    Ok(OptimizationResult {
        strategy: StrategyId::Ris2Analytic,
        config,
        power,
        evaluations: 1,
        seed: None,
    })
}

/// Per-cell binary phases by seeded random search.
///
/// Evaluates both uniform binary configurations first, then `iterations`
/// random binary patterns drawn from a ChaCha8 stream seeded with `seed`:
/// each pattern takes `ceil(cells / 64)` words, and cell `k` (row-major)
/// reads bit `k % 64` of word `k / 64`, a set bit meaning phase pi. The
/// first candidate to attain the best power wins, so reruns with one seed
/// are bit-identical.
pub fn optimize_ris3_random(
    channel: &Channel,
    iterations: usize,
    seed: u64,
) -> Result<OptimizationResult> {
    if iterations == 0 {
        return Err(Error::InvalidCount {
            name: "ris3 iterations",
            reason: "random search needs at least one draw",
            value: 0,
        });
    }
    let (zero_cfg, zero_p) = uniform_candidate(channel, 0.0)?;
    let (pi_cfg, pi_p) = uniform_candidate(channel, PI)?;
    let (best_cfg, mut best_p) = if pi_p > zero_p {
        (pi_cfg, pi_p)
    } else {
        (zero_cfg, zero_p)
    };

    let geometry = &channel.scenario().geometry;
    let rows = geometry.rows;
    let cols = geometry.cols;
    let cells = rows * cols;
    let amplitude = channel.scenario().gamma_magnitude;
    let gamma_zero = Complex64::from_polar(amplitude, 0.0);
    let gamma_pi = Complex64::from_polar(amplitude, PI);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words = vec![0u64; (cells + 63) / 64];
    let unit = channel.unit_phasors();
    let los = channel.los_phasor();
    let mut best_draw: Option<Vec<u64>> = None;
    for _ in 0..iterations {
        for w in words.iter_mut() {
            *w = rng.next_u64();
        }
        // Two-level candidates are summed straight off the bit words
        // instead of materializing a trial configuration per draw. The
        // coefficients and the accumulation order match the standard
        // evaluation path exactly, so the scores are bit-identical to it.
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, u) in unit.iter().enumerate() {
            let gamma = if (words[k >> 6] >> (k & 63)) & 1 == 1 {
                gamma_pi
            } else {
                gamma_zero
            };
            sum += u * gamma;
        }
        let power = (sum + los).norm_sqr();
        if power > best_p {
            best_p = power;
            best_draw = Some(words.clone());
        }
    }

    // Materialize the winning draw (if any random draw beat both uniform
    // candidates) and score it once more through the standard path.
    let (best_cfg, best_p) = if let Some(draw) = best_draw {
        let mut cfg = PhaseConfiguration::from_raw(
            rows,
            cols,
            vec![amplitude; cells],
            vec![0.0; cells],
            vec![gamma_zero; cells],
        );
        for k in 0..cells {
            if (draw[k >> 6] >> (k & 63)) & 1 == 1 {
                cfg.set_phase_lin(k, PI, gamma_pi);
            }
        }
        let fresh = channel.received_power(&cfg)?.total_power;
        debug_assert_eq!(fresh.to_bits(), best_p.to_bits());
        (cfg, fresh)
    } else {
        (best_cfg, best_p)
    };
    Ok(OptimizationResult {
        strategy: StrategyId::Ris3Random,
        config: best_cfg,
        power: best_p,
        evaluations: iterations as u64 + 2,
        seed: Some(seed),
    })
}

/// Per-cell binary phases by coordinate ascent.
///
/// Starts from the better uniform configuration and repeatedly passes over
/// the cells in row-major order, flipping any cell whose toggle strictly
/// increases the power. Flip trials update the running total field
/// incrementally (`T' = T + c_k (gamma_new - gamma_old)`), and the total is
/// recomputed from scratch at the top of each pass so incremental rounding
/// cannot pile up. Stops after a pass with no flips or after `max_sweeps`
/// passes.
pub fn optimize_ris3_greedy(channel: &Channel, max_sweeps: usize) -> Result<OptimizationResult> {
    if max_sweeps == 0 {
        return Err(Error::InvalidCount {
            name: "ris3 max sweeps",
            reason: "coordinate ascent needs at least one pass",
            value: 0,
        });
    }
    let start = optimize_ris1(channel)?;
    let mut config = start.config;
    let mut evaluations = start.evaluations;

    let amplitude = channel.scenario().gamma_magnitude;
    let gamma_zero = Complex64::from_polar(amplitude, 0.0);
    let gamma_pi = Complex64::from_polar(amplitude, PI);
    let cells = channel.unit_phasors().len();

    for _ in 0..max_sweeps {
        let fields = channel.received_power(&config)?;
        evaluations += 1;
        let mut total = fields.reflected_sum + fields.los;
        let mut flipped = false;
        for k in 0..cells {
            let old_gamma = config.gamma_lin(k);
            let (new_phase, new_gamma) = if config.phase_lin(k) == 0.0 {
                (PI, gamma_pi)
            } else {
                (0.0, gamma_zero)
            };
            let candidate = total + channel.unit_phasors()[k] * (new_gamma - old_gamma);
            evaluations += 1;
            if candidate.norm_sqr() > total.norm_sqr() {
                config.set_phase_lin(k, new_phase, new_gamma);
                total = candidate;
                flipped = true;
            }
        }
        if !flipped {
            break;
        }
    }
    let power = channel.received_power(&config)?.total_power;
    Ok(OptimizationResult {
        strategy: StrategyId::Ris3Greedy,
        config,
        power,
        evaluations,
        seed: None,
    })
}

/// Per-cell continuous phases in closed form: each cell's phase rotates its
/// contribution onto the direct path's phase, `phi_k = arg(B) - arg(c_k)`,
/// which aligns every term of the sum. Cells that contribute nothing (their
/// pattern product is zero) keep phase 0.
pub fn optimize_ris4(channel: &Channel) -> Result<OptimizationResult> {
    let geometry = &channel.scenario().geometry;
    let amplitude = channel.scenario().gamma_magnitude;
    let b_arg = channel.los_phasor().arg();
    let cells = channel.unit_phasors();
    let mut phases = Vec::with_capacity(cells.len());
    let mut gammas = Vec::with_capacity(cells.len());
    for c in cells {
        let phase = if c.norm_sqr() == 0.0 {
            0.0
        } else {
            normalize_phase(b_arg - c.arg())
        };
        phases.push(phase);
        gammas.push(Complex64::from_polar(amplitude, phase));
    }
    let config = PhaseConfiguration::from_raw(
        geometry.rows,
        geometry.cols,
        vec![amplitude; cells.len()],
        phases,
        gammas,
    );
    let power = channel.received_power(&config)?.total_power;
    Ok(OptimizationResult {
        strategy: StrategyId::Ris4,
        config,
        power,
        evaluations: 1,
        seed: None,
    })
}

/// Ground truth for the binary per-cell class: enumerates all `2^cells`
/// configurations on surfaces of at most [`EXHAUSTIVE_CELL_CAP`] cells.
///
/// Enumeration order is lexicographic over the row-major cell sequence with
/// phase 0 before pi (cell (1, 1) is the most significant position), and
/// ties keep the earliest configuration, so the result is a total function
/// of the channel.
pub fn exhaustive_binary_oracle(channel: &Channel) -> Result<OptimizationResult> {
    let geometry = &channel.scenario().geometry;
    let cells = geometry.cell_count();
    if cells > EXHAUSTIVE_CELL_CAP {
        return Err(Error::ExhaustiveCapExceeded {
            cells,
            cap: EXHAUSTIVE_CELL_CAP,
        });
    }
    let amplitude = channel.scenario().gamma_magnitude;
    let gamma_zero = Complex64::from_polar(amplitude, 0.0);
    let gamma_pi = Complex64::from_polar(amplitude, PI);
    let mut trial = PhaseConfiguration::from_raw(
        geometry.rows,
        geometry.cols,
        vec![amplitude; cells],
        vec![0.0; cells],
        vec![gamma_zero; cells],
    );
    let mut best: Option<(PhaseConfiguration, f64)> = None;
    let total = 1u64 << cells;
    for mask in 0..total {
        for k in 0..cells {
            if (mask >> (cells - 1 - k)) & 1 == 1 {
                trial.set_phase_lin(k, PI, gamma_pi);
            } else {
                trial.set_phase_lin(k, 0.0, gamma_zero);
            }
        }
        let power = channel.received_power(&trial)?.total_power;
        if best.as_ref().map_or(true, |(_, p)| power > *p) {
            best = Some((trial.clone(), power));
        }
    }
    let (config, power) = best.expect("enumeration visits at least the all-zero mask");
    Ok(OptimizationResult {
        strategy: StrategyId::ExhaustiveBinary,
        config,
        power,
        evaluations: total,
        seed: None,
    })
}

/// Largest power any phase-only configuration at this amplitude can attain:
/// all cell contributions and the direct path in perfect alignment,
/// `(amplitude * sum |c_k| + sqrt(P_los))^2`. `ris4` meets this bound to
/// floating-point precision; every other strategy sits below it.
pub fn upper_bound_power(channel: &Channel, amplitude: f64) -> Result<f64> {
    if !(amplitude.is_finite() && (0.0..=1.0).contains(&amplitude)) {
        return Err(Error::InvalidParameter {
            name: "amplitude",
            reason: "must lie in [0, 1]",
            value: amplitude,
        });
    }
    let magnitude_sum: f64 = channel.unit_phasors().iter().map(|c| c.norm()).sum();
    let field = amplitude * magnitude_sum + channel.los_power().sqrt();
    Ok(field * field)
}

/// Runs one strategy with shared parameters. `seed` feeds `ris3-random`
/// only; deterministic strategies ignore it.
pub fn run_strategy(
    channel: &Channel,
    id: StrategyId,
    params: &StrategyParams,
    seed: u64,
) -> Result<OptimizationResult> {
    match id {
        StrategyId::Ris0 => {
            let (config, power) = uniform_candidate(channel, 0.0)?;
            Ok(OptimizationResult {
                strategy: StrategyId::Ris0,
                config,
                power,
                evaluations: 1,
                seed: None,
            })
        }
        StrategyId::Ris1 => optimize_ris1(channel),
        StrategyId::Ris2Grid => optimize_ris2_grid(channel, params.ris2_grid_step),
        StrategyId::Ris2Analytic => optimize_ris2_analytic(channel),
        StrategyId::Ris3Random => optimize_ris3_random(channel, params.ris3_iterations, seed),
        StrategyId::Ris3Greedy => optimize_ris3_greedy(channel, params.ris3_max_sweeps),
        StrategyId::Ris4 => optimize_ris4(channel),
        StrategyId::ExhaustiveBinary => exhaustive_binary_oracle(channel),
    }
}

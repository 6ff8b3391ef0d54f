//! Phasor assembly and received power for the two-path link.
//!
//! Each unit cell contributes one phasor to the received field:
//!
//! ```text
//! s_nm = dx * dy * gamma_nm * sqrt(P_t * G_t * G_r * F_nm)
//!        / (4 pi r_t_nm r_r_nm) * exp(-j 2 pi (r_t_nm + r_r_nm) / lambda)
//! ```
//!
//! where `F_nm` is the four-way pattern product of
//! [`patterns::combined_pattern`] and `gamma_nm` the cell's programmable
//! reflection coefficient. The direct path contributes
//!
//! ```text
//! s_los = lambda * sqrt(P_t * G_t' * G_r') / (4 pi d) * exp(-j 2 pi d / lambda)
//! ```
//!
//! and the received power is `|sum(s_nm) + s_los|^2`. With the surface
//! absent (all amplitudes zero) this collapses to the classical free-space
//! transmission formula, which is the cheapest sanity check the model has.
//!
//! Summation is plain accumulation in row-major cell order. That exact
//! order is part of the determinism contract: every optimizer, sweep, and
//! serialization sees bit-identical powers for identical inputs.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{cell_geometry, CellGeometry, CellIndex, GeometryConfig};
use crate::patterns::{combined_pattern, AntennaSpec, PatternModel};

/// Reported power readings are clamped here, dBm. Deep fades and zeroed
/// configurations would otherwise print -inf and poison plots and CSV diffs.
pub const REPORTED_DBM_FLOOR: f64 = -300.0;

/// Maps any finite phase onto `[0, 2 pi)`.
///
/// `rem_euclid` alone can return exactly `2 pi` when a tiny negative input
/// rounds up, so that edge is folded back to zero.
pub fn normalize_phase(phase: f64) -> f64 {
    let p = phase.rem_euclid(std::f64::consts::TAU);
    if p >= std::f64::consts::TAU {
        0.0
    } else {
        p
    }
}

/// Power in dBm for a positive power in watts.
pub fn watts_to_dbm(watts: f64) -> Result<f64> {
    if !(watts.is_finite() && watts > 0.0) {
        return Err(Error::NonPositivePower(watts));
    }
    Ok(10.0 * (watts / 1e-3).log10())
}

/// Power in watts for a power in dBm. Total on all finite inputs.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

/// Per-cell reflection state for the whole surface: an amplitude in
/// `[0, 1]` and a phase in `[0, 2 pi)` per cell, row-major.
///
/// The complex coefficients are cached at construction and kept in sync by
/// every mutator, so evaluating a configuration never re-runs sin/cos per
/// cell and, more importantly, a given (amplitude, phase) pair always maps
/// to the same complex number everywhere in the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfiguration {
    rows: usize,
    cols: usize,
    amplitudes: Vec<f64>,
    phases: Vec<f64>,
    gammas: Vec<Complex64>,
}

impl PhaseConfiguration {
    /// Builds a configuration from row-major amplitude and phase vectors.
    /// Phases of any finite value are accepted and normalized to `[0, 2 pi)`.
    pub fn new(rows: usize, cols: usize, amplitudes: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidCount {
                name: "configuration shape",
                reason: "rows and cols must be at least 1",
                value: rows.min(cols),
            });
        }
        let len = rows * cols;
        if amplitudes.len() != len || phases.len() != len {
            return Err(Error::ShapeMismatch {
                got_rows: amplitudes.len(),
                got_cols: phases.len(),
                want_rows: rows,
                want_cols: cols,
            });
        }
        for &a in &amplitudes {
            if !(a.is_finite() && (0.0..=1.0).contains(&a)) {
                return Err(Error::InvalidParameter {
                    name: "cell amplitude",
                    reason: "must lie in [0, 1]",
                    value: a,
                });
            }
        }
        for &p in &phases {
            if !p.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "cell phase",
                    reason: "must be finite",
                    value: p,
                });
            }
        }
        let phases: Vec<f64> = phases.into_iter().map(normalize_phase).collect();
        let gammas = amplitudes
            .iter()
            .zip(&phases)
            .map(|(&a, &p)| Complex64::from_polar(a, p))
            .collect();
        Ok(Self {
            rows,
            cols,
            amplitudes,
            phases,
            gammas,
        })
    }

    /// Every cell set to the same amplitude and phase.
    pub fn uniform(rows: usize, cols: usize, amplitude: f64, phase: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidCount {
                name: "configuration shape",
                reason: "rows and cols must be at least 1",
                value: rows.min(cols),
            });
        }
        if !(amplitude.is_finite() && (0.0..=1.0).contains(&amplitude)) {
            return Err(Error::InvalidParameter {
                name: "cell amplitude",
                reason: "must lie in [0, 1]",
                value: amplitude,
            });
        }
        if !phase.is_finite() {
            return Err(Error::InvalidParameter {
                name: "cell phase",
                reason: "must be finite",
                value: phase,
            });
        }
        let len = rows * cols;
        let phase = normalize_phase(phase);
        let gamma = Complex64::from_polar(amplitude, phase);
        Ok(Self {
            rows,
            cols,
            amplitudes: vec![amplitude; len],
            phases: vec![phase; len],
            gammas: vec![gamma; len],
        })
    }

    /// Crate-internal constructor for optimizer hot loops that build the
    /// vectors themselves. Callers guarantee `gammas[k]` equals
    /// `Complex64::from_polar(amplitudes[k], phases[k])`.
    pub(crate) fn from_raw(
        rows: usize,
        cols: usize,
        amplitudes: Vec<f64>,
        phases: Vec<f64>,
        gammas: Vec<Complex64>,
    ) -> Self {
        debug_assert_eq!(amplitudes.len(), rows * cols);
        debug_assert_eq!(phases.len(), rows * cols);
        debug_assert_eq!(gammas.len(), rows * cols);
        Self {
            rows,
            cols,
            amplitudes,
            phases,
            gammas,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    fn linear(&self, idx: CellIndex) -> Result<usize> {
        if idx.n == 0 || idx.n > self.rows || idx.m == 0 || idx.m > self.cols {
            return Err(Error::CellIndexOutOfRange {
                n: idx.n,
                m: idx.m,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((idx.n - 1) * self.cols + (idx.m - 1))
    }

    pub fn amplitude(&self, idx: CellIndex) -> Result<f64> {
        Ok(self.amplitudes[self.linear(idx)?])
    }

    pub fn phase(&self, idx: CellIndex) -> Result<f64> {
        Ok(self.phases[self.linear(idx)?])
    }

    /// Complex reflection coefficient of one cell.
    pub fn gamma(&self, idx: CellIndex) -> Result<Complex64> {
        Ok(self.gammas[self.linear(idx)?])
    }

    /// Overwrites one cell.
    pub fn set(&mut self, idx: CellIndex, amplitude: f64, phase: f64) -> Result<()> {
        if !(amplitude.is_finite() && (0.0..=1.0).contains(&amplitude)) {
            return Err(Error::InvalidParameter {
                name: "cell amplitude",
                reason: "must lie in [0, 1]",
                value: amplitude,
            });
        }
        if !phase.is_finite() {
            return Err(Error::InvalidParameter {
                name: "cell phase",
                reason: "must be finite",
                value: phase,
            });
        }
        let k = self.linear(idx)?;
        let phase = normalize_phase(phase);
        self.amplitudes[k] = amplitude;
        self.phases[k] = phase;
        self.gammas[k] = Complex64::from_polar(amplitude, phase);
        Ok(())
    }

    /// Row-major phase slice.
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Row-major amplitude slice.
    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// Row-major complex coefficient slice.
    pub fn gammas(&self) -> &[Complex64] {
        &self.gammas
    }

    #[inline]
    pub(crate) fn phase_lin(&self, k: usize) -> f64 {
        self.phases[k]
    }

    #[inline]
    pub(crate) fn gamma_lin(&self, k: usize) -> Complex64 {
        self.gammas[k]
    }

    /// Crate-internal fast mutator. `gamma` must equal
    /// `Complex64::from_polar(amplitude at k, phase)`; optimizers that flip
    /// between two phase levels precompute both coefficients once instead of
    /// paying a sin/cos per flip. Callers sit in per-candidate loops, so no
    /// per-call checking here; the phase/coefficient pairing is covered by
    /// the tests that re-evaluate returned configurations independently.
    #[inline]
    pub(crate) fn set_phase_lin(&mut self, k: usize, phase: f64, gamma: Complex64) {
        self.phases[k] = phase;
        self.gammas[k] = gamma;
    }
}

/// A complete physical scenario: geometry, terminal antennas, unit-cell
/// pattern, the magnitude every cell reflects with, transmit power, and the
/// calibration offset applied to reported readings.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub geometry: GeometryConfig,
    pub tx_antenna: AntennaSpec,
    pub rx_antenna: AntennaSpec,
    pub cell_pattern: PatternModel,
    /// Reflection magnitude `|gamma|` shared by every cell; optimizers vary
    /// phases only and build their configurations with this amplitude.
    pub gamma_magnitude: f64,
    /// Transmit power, watts.
    pub p_t_watts: f64,
    /// Added to reported dBm readings; models measurement-chain calibration.
    pub calibration_offset_db: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if !(self.gamma_magnitude.is_finite() && (0.0..=1.0).contains(&self.gamma_magnitude)) {
            return Err(Error::InvalidParameter {
                name: "gamma_magnitude",
                reason: "must lie in [0, 1]",
                value: self.gamma_magnitude,
            });
        }
        if !(self.p_t_watts.is_finite() && self.p_t_watts > 0.0) {
            return Err(Error::InvalidParameter {
                name: "p_t_watts",
                reason: "must be finite and positive",
                value: self.p_t_watts,
            });
        }
        if !self.calibration_offset_db.is_finite() {
            return Err(Error::InvalidParameter {
                name: "calibration_offset_db",
                reason: "must be finite",
                value: self.calibration_offset_db,
            });
        }
        Ok(())
    }

    /// Reading for a physical power: dBm plus the calibration offset,
    /// clamped to [`REPORTED_DBM_FLOOR`]. Non-positive powers report the
    /// floor instead of failing; a dark receiver is a valid measurement.
    pub fn reported_dbm(&self, watts: f64) -> f64 {
        match watts_to_dbm(watts) {
            Ok(dbm) => (dbm + self.calibration_offset_db).max(REPORTED_DBM_FLOOR),
            Err(_) => REPORTED_DBM_FLOOR,
        }
    }
}

/// The two path fields and their combined power for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathFields {
    /// Coherent sum over every cell of the surface.
    pub reflected_sum: Complex64,
    /// Direct-path phasor.
    pub los: Complex64,
    /// Direct-path power from the closed form, watts.
    pub los_power: f64,
    /// `|reflected_sum + los|^2`, watts.
    pub total_power: f64,
}

/// Phasor contributed by one cell carrying reflection coefficient `gamma`.
pub fn cell_phasor(cell: &CellGeometry, gamma: Complex64, scenario: &Scenario) -> Complex64 {
    let g = &scenario.geometry;
    let f = combined_pattern(cell, &scenario.tx_antenna, &scenario.rx_antenna, &scenario.cell_pattern);
    let amplitude = g.cell_dx * g.cell_dy
        * (scenario.p_t_watts
            * scenario.tx_antenna.gain_ris_path
            * scenario.rx_antenna.gain_ris_path
            * f)
            .sqrt()
        / (4.0 * std::f64::consts::PI * cell.r_t * cell.r_r);
    let phase = -std::f64::consts::TAU * (cell.r_t + cell.r_r) / g.wavelength();
    gamma * Complex64::from_polar(amplitude, phase)
}

/// Direct-path power from the free-space transmission formula, watts.
pub fn los_power(scenario: &Scenario) -> Result<f64> {
    let d = crate::geometry::los_distance(&scenario.geometry)?;
    let lambda = scenario.geometry.wavelength();
    let spreading = lambda / (4.0 * std::f64::consts::PI * d);
    Ok(scenario.p_t_watts
        * scenario.tx_antenna.gain_direct_path
        * scenario.rx_antenna.gain_direct_path
        * spreading
        * spreading)
}

/// Direct-path phasor. Both terminals aim their direct beams at each other,
/// so no pattern factor applies on this path.
pub fn los_phasor(scenario: &Scenario) -> Result<Complex64> {
    let d = crate::geometry::los_distance(&scenario.geometry)?;
    let lambda = scenario.geometry.wavelength();
    let amplitude = lambda
        * (scenario.p_t_watts
            * scenario.tx_antenna.gain_direct_path
            * scenario.rx_antenna.gain_direct_path)
            .sqrt()
        / (4.0 * std::f64::consts::PI * d);
    let phase = -std::f64::consts::TAU * d / lambda;
    Ok(Complex64::from_polar(amplitude, phase))
}

/// Prepared evaluation context for one scenario.
///
/// Construction does all the per-scenario work once (cell geometry, pattern
/// products, unit phasors, direct path); [`Channel::received_power`] is then
/// a single pass of complex multiply-adds, which is what optimizer search
/// loops hammer.
#[derive(Debug, Clone)]
pub struct Channel {
    scenario: Scenario,
    cells: Vec<CellGeometry>,
    /// Per-cell phasor with `gamma = 1`, row-major. A configuration's cell
    /// contribution is `unit_phasors[k] * gamma[k]`.
    unit_phasors: Vec<Complex64>,
    los: Complex64,
    los_power: f64,
}

impl Channel {
    pub fn new(scenario: Scenario) -> Result<Self> {
        scenario.validate()?;
        let cells = cell_geometry(&scenario.geometry)?;
        let one = Complex64::new(1.0, 0.0);
        let unit_phasors = cells
            .iter()
            .map(|c| cell_phasor(c, one, &scenario))
            .collect();
        let los = los_phasor(&scenario)?;
        let los_power = los_power(&scenario)?;
        Ok(Self {
            scenario,
            cells,
            unit_phasors,
            los,
            los_power,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn cells(&self) -> &[CellGeometry] {
        &self.cells
    }

    /// Per-cell phasors at unit reflection, row-major.
    pub fn unit_phasors(&self) -> &[Complex64] {
        &self.unit_phasors
    }

    pub fn los_phasor(&self) -> Complex64 {
        self.los
    }

    pub fn los_power(&self) -> f64 {
        self.los_power
    }

    fn check_shape(&self, config: &PhaseConfiguration) -> Result<()> {
        let g = &self.scenario.geometry;
        if config.rows() != g.rows || config.cols() != g.cols {
            return Err(Error::ShapeMismatch {
                got_rows: config.rows(),
                got_cols: config.cols(),
                want_rows: g.rows,
                want_cols: g.cols,
            });
        }
        Ok(())
    }

    /// Coherent sum over the surface for one configuration. Plain row-major
    /// accumulation; the term order never changes.
    pub fn reflected_field(&self, config: &PhaseConfiguration) -> Result<Complex64> {
        self.check_shape(config)?;
        let mut sum = Complex64::new(0.0, 0.0);
        for (u, g) in self.unit_phasors.iter().zip(config.gammas()) {
            sum += u * g;
        }
        Ok(sum)
    }

    /// Both path fields and the received power for one configuration.
    pub fn received_power(&self, config: &PhaseConfiguration) -> Result<PathFields> {
        let reflected_sum = self.reflected_field(config)?;
        let total = reflected_sum + self.los;
        Ok(PathFields {
            reflected_sum,
            los: self.los,
            los_power: self.los_power,
            total_power: total.norm_sqr(),
        })
    }
}

/// One-shot reflected field. Sweeps and optimizers should build a
/// [`Channel`] instead and reuse it.
pub fn reflected_field(scenario: &Scenario, config: &PhaseConfiguration) -> Result<Complex64> {
    Channel::new(scenario.clone())?.reflected_field(config)
}

/// One-shot received power.
pub fn received_power(scenario: &Scenario, config: &PhaseConfiguration) -> Result<PathFields> {
    Channel::new(scenario.clone())?.received_power(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn fig3_scenario(rows: usize, cols: usize, d2: f64) -> Scenario {
        Scenario {
            geometry: GeometryConfig::new(
                rows,
                cols,
                0.0038,
                0.0038,
                1.0,
                d2,
                45f64.to_radians(),
                45f64.to_radians(),
                35e9,
            )
            .unwrap(),
            tx_antenna: AntennaSpec::isotropic_unit(),
            rx_antenna: AntennaSpec::isotropic_unit(),
            cell_pattern: PatternModel::cosine_power(1.0, true).unwrap(),
            gamma_magnitude: 0.8,
            p_t_watts: 1e-3,
            calibration_offset_db: 0.0,
        }
    }

    #[test]
    fn phase_normalization_lands_in_the_half_open_interval() {
        assert_eq!(normalize_phase(0.0), 0.0);
        assert_eq!(normalize_phase(TAU), 0.0);
        assert_eq!(normalize_phase(-1e-300), 0.0);
        assert_eq!(normalize_phase(PI), PI);
        assert!((normalize_phase(7.0) - (7.0 - TAU)).abs() < 1e-15);
        assert!((normalize_phase(-0.5) - (TAU - 0.5)).abs() < 1e-15);
        for raw in [-123.456, -1.0, 0.0, 1.0, 123.456, 1e9] {
            let p = normalize_phase(raw);
            assert!((0.0..TAU).contains(&p), "raw {raw} gave {p}");
        }
    }

    #[test]
    fn dbm_conversions_invert_each_other() {
        assert!((watts_to_dbm(1e-3).unwrap()).abs() < 1e-12);
        assert!((watts_to_dbm(1.0).unwrap() - 30.0).abs() < 1e-12);
        assert!((dbm_to_watts(15.0) - 0.03162277660168379).abs() < 1e-17);
        for dbm in [-120.0, -66.34, 0.0, 15.0, 30.0] {
            let w = dbm_to_watts(dbm);
            assert!((watts_to_dbm(w).unwrap() - dbm).abs() < 1e-10);
        }
        assert!(matches!(watts_to_dbm(0.0), Err(Error::NonPositivePower(_))));
        assert!(watts_to_dbm(-1.0).is_err());
        assert!(watts_to_dbm(f64::INFINITY).is_err());
    }

    #[test]
    fn reported_dbm_applies_offset_and_floor() {
        let mut s = fig3_scenario(1, 1, 1.0);
        assert!((s.reported_dbm(1e-3)).abs() < 1e-12);
        s.calibration_offset_db = 2.5;
        assert!((s.reported_dbm(1e-3) - 2.5).abs() < 1e-12);
        assert_eq!(s.reported_dbm(0.0), REPORTED_DBM_FLOOR);
        assert_eq!(s.reported_dbm(1e-40), REPORTED_DBM_FLOOR);
    }

    #[test]
    fn friis_closed_form_at_45_degree_terminals() {
        // d1 = d2 = 1 m at 45 degrees either side of the normal puts the
        // terminals sqrt(2) m apart; with unit gains and 1 mW at 35 GHz the
        // direct path delivers -66.34 dBm. Values frozen from an
        // independent check of the transmission formula.
        let s = fig3_scenario(1, 1, 1.0);
        let p = los_power(&s).unwrap();
        assert!((p - 2.323034145772837e-10).abs() / p < 1e-12, "p = {p:e}");
        assert!((watts_to_dbm(p).unwrap() - -66.3394440655287).abs() < 1e-9);
        // The phasor magnitude squared is the same power.
        let s_los = los_phasor(&s).unwrap();
        assert!((s_los.norm_sqr() - p).abs() / p < 1e-12);
    }

    #[test]
    fn single_cell_phasor_matches_frozen_value() {
        // One 3.8 mm cell at the origin, both terminals 1 m out at 45
        // degrees, gamma = 0.8 at phase 0. Amplitude is
        // dx dy sqrt(P F) / (4 pi), F = cos45 * cos45; phase is the
        // electrical length of 2 m. Frozen from an independent check.
        let s = fig3_scenario(1, 1, 1.0);
        let ch = Channel::new(s).unwrap();
        let config = PhaseConfiguration::uniform(1, 1, 0.8, 0.0).unwrap();
        let sum = ch.reflected_field(&config).unwrap();
        let expect = Complex64::new(-2.054501101405059e-8, -6.628857993947013e-10);
        assert!((sum - expect).norm() / expect.norm() < 1e-12, "sum = {sum}");
        assert!((sum.norm() - 2.0555702253888074e-8).abs() / sum.norm() < 1e-12);
        assert!((normalize_phase(sum.arg()) - 3.1738465138459873).abs() < 1e-11);
    }

    #[test]
    fn full_surface_uniform_power_matches_frozen_value() {
        // 64x64 surface, receiver at 10 m, every cell at 0.8 angle 0.
        // Frozen from an independent exact-summation check; the plain
        // row-major sum must land within a hair of it.
        let s = fig3_scenario(64, 64, 10.0);
        let ch = Channel::new(s).unwrap();
        let config = PhaseConfiguration::uniform(64, 64, 0.8, 0.0).unwrap();
        let fields = ch.received_power(&config).unwrap();
        let expect_refl = Complex64::new(-1.5701918522013818e-6, -2.406251814431843e-7);
        assert!(
            (fields.reflected_sum - expect_refl).norm() / expect_refl.norm() < 1e-10,
            "reflected = {}",
            fields.reflected_sum
        );
        assert!(
            (fields.los_power - 4.600067615391757e-12).abs() / fields.los_power < 1e-12
        );
        let expect_total = 1.0078314283700384e-11;
        assert!(
            (fields.total_power - expect_total).abs() / expect_total < 1e-9,
            "total = {:e}",
            fields.total_power
        );
        let dbm = watts_to_dbm(fields.total_power).unwrap();
        assert!((dbm - -79.9661210266326).abs() < 1e-8, "dbm = {dbm}");
    }

    #[test]
    fn zero_amplitude_surface_degenerates_to_friis() {
        let s = fig3_scenario(8, 8, 3.0);
        let ch = Channel::new(s).unwrap();
        let dark = PhaseConfiguration::uniform(8, 8, 0.0, 0.0).unwrap();
        let fields = ch.received_power(&dark).unwrap();
        assert_eq!(fields.reflected_sum, Complex64::new(0.0, 0.0));
        assert!((fields.total_power - fields.los_power).abs() / fields.los_power < 1e-12);
    }

    #[test]
    fn one_shot_helpers_agree_with_the_prepared_channel() {
        let s = fig3_scenario(4, 4, 2.0);
        let config = PhaseConfiguration::uniform(4, 4, 0.8, 1.25).unwrap();
        let ch = Channel::new(s.clone()).unwrap();
        let a = ch.received_power(&config).unwrap();
        let b = received_power(&s, &config).unwrap();
        assert_eq!(a.total_power, b.total_power);
        assert_eq!(a.reflected_sum, b.reflected_sum);
        assert_eq!(
            reflected_field(&s, &config).unwrap(),
            a.reflected_sum
        );
    }

    #[test]
    fn configuration_construction_validates_inputs() {
        assert!(PhaseConfiguration::new(2, 2, vec![0.8; 4], vec![0.0; 4]).is_ok());
        assert!(PhaseConfiguration::new(0, 2, vec![], vec![]).is_err());
        assert!(PhaseConfiguration::new(2, 2, vec![0.8; 3], vec![0.0; 4]).is_err());
        assert!(PhaseConfiguration::new(2, 2, vec![1.5, 0.8, 0.8, 0.8], vec![0.0; 4]).is_err());
        assert!(PhaseConfiguration::new(2, 2, vec![-0.1, 0.8, 0.8, 0.8], vec![0.0; 4]).is_err());
        assert!(
            PhaseConfiguration::new(2, 2, vec![0.8; 4], vec![f64::NAN, 0.0, 0.0, 0.0]).is_err()
        );
        assert!(PhaseConfiguration::uniform(2, 2, 0.8, f64::INFINITY).is_err());
    }

    #[test]
    fn configuration_phases_are_stored_normalized() {
        let c = PhaseConfiguration::new(1, 3, vec![0.8; 3], vec![TAU, -0.5, 7.0]).unwrap();
        assert_eq!(c.phase(CellIndex::new(1, 1)).unwrap(), 0.0);
        assert!((c.phase(CellIndex::new(1, 2)).unwrap() - (TAU - 0.5)).abs() < 1e-15);
        assert!((c.phase(CellIndex::new(1, 3)).unwrap() - (7.0 - TAU)).abs() < 1e-15);
        for k in 0..3 {
            let idx = CellIndex::new(1, k + 1);
            let expect = Complex64::from_polar(
                c.amplitude(idx).unwrap(),
                c.phase(idx).unwrap(),
            );
            assert_eq!(c.gamma(idx).unwrap(), expect);
        }
    }

    #[test]
    fn set_keeps_the_cached_coefficient_in_sync() {
        let mut c = PhaseConfiguration::uniform(2, 2, 0.8, 0.0).unwrap();
        c.set(CellIndex::new(2, 1), 0.5, PI).unwrap();
        let idx = CellIndex::new(2, 1);
        assert_eq!(c.amplitude(idx).unwrap(), 0.5);
        assert_eq!(c.phase(idx).unwrap(), PI);
        assert_eq!(c.gamma(idx).unwrap(), Complex64::from_polar(0.5, PI));
        assert!(c.set(CellIndex::new(3, 1), 0.5, 0.0).is_err());
        assert!(c.set(CellIndex::new(1, 1), 2.0, 0.0).is_err());
    }

    #[test]
    fn received_power_rejects_mismatched_shapes() {
        let s = fig3_scenario(4, 4, 2.0);
        let ch = Channel::new(s).unwrap();
        let wrong = PhaseConfiguration::uniform(4, 5, 0.8, 0.0).unwrap();
        assert!(matches!(
            ch.received_power(&wrong),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn scenario_validation_covers_link_fields() {
        let mut s = fig3_scenario(2, 2, 1.0);
        assert!(s.validate().is_ok());
        s.gamma_magnitude = 1.2;
        assert!(s.validate().is_err());
        s.gamma_magnitude = 0.8;
        s.p_t_watts = 0.0;
        assert!(s.validate().is_err());
        s.p_t_watts = 1e-3;
        s.calibration_offset_db = f64::NAN;
        assert!(s.validate().is_err());
    }
}

//! Normalized power patterns for the terminal antennas and the unit cells.
//!
//! A pattern maps an observation direction to a dimensionless factor in
//! `[0, 1]`: 1 on boresight, smaller off-axis. Gain (the absolute scaling) is
//! carried separately in [`AntennaSpec`], so the same pattern shape can serve
//! antennas of different gain.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::CellGeometry;

/// Values below this threshold are treated as exact zero. A `cos^q` pattern
/// with a large exponent underflows into subnormals long before the angle
/// reaches 90 degrees; flushing keeps downstream phasor math free of
/// subnormal noise without changing any resolvable power.
pub const PATTERN_FLUSH_THRESHOLD: f64 = 1e-300;

/// A normalized power pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PatternModel {
    /// Unity in every direction.
    Isotropic,
    /// `cos(theta)^exponent` about the boresight.
    ///
    /// With `hemisphere_clamp` the pattern is exactly zero beyond 90 degrees
    /// regardless of exponent; without it the rear value is
    /// `max(cos theta, 0)^exponent`, which is zero for positive exponents
    /// and 1 for the degenerate exponent 0.
    CosinePower {
        exponent: f64,
        hemisphere_clamp: bool,
    },
}

impl PatternModel {
    /// Builds a cosine-power pattern, rejecting negative or non-finite
    /// exponents (they would leave `[0, 1]` or produce NaN).
    pub fn cosine_power(exponent: f64, hemisphere_clamp: bool) -> Result<Self> {
        if !(exponent.is_finite() && exponent >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "pattern exponent",
                reason: "must be finite and non-negative",
                value: exponent,
            });
        }
        Ok(Self::CosinePower {
            exponent,
            hemisphere_clamp,
        })
    }

    /// Pattern value for an observation direction.
    ///
    /// `theta` is the angle from boresight in `[0, pi]` radians. None of the
    /// built-in models depend on `phi`; it is part of the signature because
    /// a direction has two coordinates and callers should not need to know
    /// which ones a model consumes.
    pub fn value(&self, theta: f64, _phi: f64) -> f64 {
        debug_assert!((0.0..=std::f64::consts::PI).contains(&theta));
        let v = match *self {
            Self::Isotropic => 1.0,
            Self::CosinePower {
                exponent,
                hemisphere_clamp,
            } => {
                if theta > std::f64::consts::FRAC_PI_2 {
                    if hemisphere_clamp {
                        0.0
                    } else {
                        theta.cos().max(0.0).powf(exponent)
                    }
                } else {
                    theta.cos().powf(exponent)
                }
            }
        };
        if v < PATTERN_FLUSH_THRESHOLD {
            0.0
        } else {
            v
        }
    }
}

impl fmt::Display for PatternModel {
    /// Textual form used by config files: `isotropic` or `cos^q`. The
    /// textual cosine form always denotes the hemisphere-clamped model;
    /// an unclamped model prints the same and only differs behind 90
    /// degrees, where no valid link geometry ever looks.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Isotropic => write!(f, "isotropic"),
            Self::CosinePower { exponent, .. } => write!(f, "cos^{exponent}"),
        }
    }
}

impl FromStr for PatternModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("isotropic") {
            return Ok(Self::Isotropic);
        }
        if let Some(rest) = s.strip_prefix("cos^") {
            let exponent: f64 = rest.parse().map_err(|_| Error::InvalidParameter {
                name: "pattern exponent",
                reason: "must be a number after cos^",
                value: f64::NAN,
            })?;
            return Self::cosine_power(exponent, true);
        }
        Err(Error::InvalidParameter {
            name: "pattern",
            reason: "expected 'isotropic' or 'cos^q'",
            value: f64::NAN,
        })
    }
}

/// One terminal's antenna: its gain on the surface-reflected path, its gain
/// on the direct path (different feeds or pointing may apply), and its
/// pattern shape toward the surface.
///
/// The direct path needs no pattern factor: both antennas aim their direct
/// beams at each other, so the direct-path pattern value is 1 by definition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaSpec {
    pub gain_ris_path: f64,
    pub gain_direct_path: f64,
    pub pattern: PatternModel,
}

impl AntennaSpec {
    pub fn new(gain_ris_path: f64, gain_direct_path: f64, pattern: PatternModel) -> Result<Self> {
        for (name, value) in [
            ("gain_ris_path", gain_ris_path),
            ("gain_direct_path", gain_direct_path),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be finite and positive",
                    value,
                });
            }
        }
        Ok(Self {
            gain_ris_path,
            gain_direct_path,
            pattern,
        })
    }

    /// Unit-gain isotropic antenna, the baseline terminal.
    pub fn isotropic_unit() -> Self {
        Self {
            gain_ris_path: 1.0,
            gain_direct_path: 1.0,
            pattern: PatternModel::Isotropic,
        }
    }
}

/// The four-way pattern product for one cell: transmit antenna toward the
/// cell, cell toward the transmitter, cell toward the receiver, and receive
/// antenna toward the cell. This is the only place pattern values enter the
/// reflected path, and the product inherits the `[0, 1]` range.
pub fn combined_pattern(
    cell: &CellGeometry,
    tx: &AntennaSpec,
    rx: &AntennaSpec,
    cell_pattern: &PatternModel,
) -> f64 {
    let f = tx.pattern.value(cell.theta_tx, cell.phi_tx)
        * cell_pattern.value(cell.theta_cell_t, cell.phi_cell_t)
        * cell_pattern.value(cell.theta_cell_r, cell.phi_cell_r)
        * rx.pattern.value(cell.theta_rx, cell.phi_rx);
    if f < PATTERN_FLUSH_THRESHOLD {
        0.0
    } else {
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn isotropic_is_unity_everywhere() {
        let p = PatternModel::Isotropic;
        for theta in [0.0, 0.7, FRAC_PI_2, 3.0] {
            assert_eq!(p.value(theta, 0.3), 1.0);
        }
    }

    #[test]
    fn plain_cosine_matches_cos() {
        let p = PatternModel::cosine_power(1.0, true).unwrap();
        assert_eq!(p.value(0.0, 0.0), 1.0);
        assert!((p.value(1.0, 0.0) - 1f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn horn_half_power_angle() {
        // cos^161 drops to half power at 5.3128 degrees off boresight
        // (value frozen from an independent check of acos(0.5^(1/161))),
        // which makes the half-power beamwidth about 10.6 degrees.
        let p = PatternModel::cosine_power(161.0, true).unwrap();
        let theta = 0.09272634050624444;
        assert!((p.value(theta, 0.0) - 0.5).abs() < 1e-12);
        assert!((theta.to_degrees() - 5.312827960700775).abs() < 1e-12);
    }

    #[test]
    fn steep_exponent_underflow_is_flushed_to_zero() {
        // cos(89.9 deg)^161 is around 1e-444, far below what f64 resolves.
        let p = PatternModel::cosine_power(161.0, true).unwrap();
        assert_eq!(p.value(89.9f64.to_radians(), 0.0), 0.0);
    }

    #[test]
    fn clamp_controls_the_rear_hemisphere() {
        let clamped = PatternModel::cosine_power(0.0, true).unwrap();
        let open = PatternModel::cosine_power(0.0, false).unwrap();
        let behind = 2.0;
        assert_eq!(clamped.value(behind, 0.0), 0.0);
        assert_eq!(open.value(behind, 0.0), 1.0);

        let clamped3 = PatternModel::cosine_power(3.0, true).unwrap();
        let open3 = PatternModel::cosine_power(3.0, false).unwrap();
        assert_eq!(clamped3.value(behind, 0.0), 0.0);
        assert_eq!(open3.value(behind, 0.0), 0.0);
    }

    #[test]
    fn values_stay_normalized() {
        for q in [0.0, 0.5, 1.0, 13.0, 161.0] {
            for clamp in [false, true] {
                let p = PatternModel::cosine_power(q, clamp).unwrap();
                let mut theta = 0.0;
                while theta <= std::f64::consts::PI {
                    let v = p.value(theta, 0.0);
                    assert!((0.0..=1.0).contains(&v), "q={q} theta={theta} v={v}");
                    theta += 0.01;
                }
            }
        }
    }

    #[test]
    fn exponent_domain_is_enforced() {
        assert!(PatternModel::cosine_power(-1.0, true).is_err());
        assert!(PatternModel::cosine_power(f64::NAN, true).is_err());
        assert!(PatternModel::cosine_power(f64::INFINITY, true).is_err());
    }

    #[test]
    fn text_form_round_trips() {
        for (text, model) in [
            ("isotropic", PatternModel::Isotropic),
            ("cos^1", PatternModel::cosine_power(1.0, true).unwrap()),
            ("cos^161", PatternModel::cosine_power(161.0, true).unwrap()),
            ("cos^2.5", PatternModel::cosine_power(2.5, true).unwrap()),
        ] {
            assert_eq!(text.parse::<PatternModel>().unwrap(), model);
            assert_eq!(model.to_string(), text);
        }
        assert!("cos^".parse::<PatternModel>().is_err());
        assert!("cos^-2".parse::<PatternModel>().is_err());
        assert!("gaussian".parse::<PatternModel>().is_err());
    }

    #[test]
    fn antenna_gains_are_validated() {
        let p = PatternModel::Isotropic;
        assert!(AntennaSpec::new(323.6, 128.8, p).is_ok());
        assert!(AntennaSpec::new(0.0, 1.0, p).is_err());
        assert!(AntennaSpec::new(1.0, -3.0, p).is_err());
        assert!(AntennaSpec::new(f64::INFINITY, 1.0, p).is_err());
    }

    #[test]
    fn combined_pattern_multiplies_all_four_factors() {
        use crate::geometry::{cell_geometry, GeometryConfig};
        let cfg = GeometryConfig::new(
            2,
            2,
            0.004,
            0.004,
            1.0,
            2.0,
            30f64.to_radians(),
            45f64.to_radians(),
            35e9,
        )
        .unwrap();
        let cells = cell_geometry(&cfg).unwrap();
        let tx = AntennaSpec::new(2.0, 2.0, PatternModel::cosine_power(3.0, true).unwrap()).unwrap();
        let rx = AntennaSpec::new(2.0, 2.0, PatternModel::cosine_power(2.0, true).unwrap()).unwrap();
        let cell_p = PatternModel::cosine_power(1.0, true).unwrap();
        for c in &cells {
            let expect = c.theta_tx.cos().powf(3.0)
                * c.theta_cell_t.cos()
                * c.theta_cell_r.cos()
                * c.theta_rx.cos().powf(2.0);
            let got = combined_pattern(c, &tx, &rx, &cell_p);
            assert!((got - expect).abs() < 1e-15);
            assert!((0.0..=1.0).contains(&got));
        }
    }
}

//! The TOML configuration schema and its merge with command-line flags.
//!
//! A document selects either a built-in preset or a fully explicit
//! scenario; mixing the two is an error, as is any unknown key. Units at
//! this boundary are human ones (degrees, GHz, dBm, millimeters would be
//! too error-prone so pitches stay in meters); conversion to the model's
//! radians/Hz/watts happens exactly once, in [`resolve`].

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use ris_core::channel::dbm_to_watts;
use ris_core::experiment::{
    linear_stepped, log_spaced, preset_fig3a, preset_fig3b, preset_fig5, ScenarioTemplate,
    SweepSpec,
};
use ris_core::optimize::{StrategyId, StrategyParams};
use ris_core::patterns::{AntennaSpec, PatternModel};

/// What went wrong with a document, pointing at the offending key.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    /// The document is not valid TOML or violates the schema; the wrapped
    /// error carries the key path and position.
    #[error("malformed config: {0}")]
    Malformed(#[from] toml::de::Error),
    /// A well-formed document with an out-of-domain or inconsistent value.
    #[error("config key `{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

/// The built-in sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig3a,
    Fig3b,
    Fig5,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Fig3a, Preset::Fig3b, Preset::Fig5];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig5 => "fig5",
        }
    }

    /// The sweep this preset stands for.
    pub fn spec(&self) -> SweepSpec {
        match self {
            Preset::Fig3a => preset_fig3a(),
            Preset::Fig3b => preset_fig3b(),
            Preset::Fig5 => preset_fig5(),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Preset::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| invalid("preset", format!("unknown preset `{s}` (expected fig3a, fig3b, or fig5)")))
    }
}

/// Output file kinds `simulate` can write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Svg,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Svg => "svg",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(invalid(
                "output.formats",
                format!("unknown format `{other}` (expected csv or svg)"),
            )),
        }
    }
}

/// A parsed, validated configuration document.
///
/// Exactly one of `preset` and the explicit scenario sections
/// (`geometry` + `antennas` + `link` + `sweep`) must be present.
/// `strategies`, `output`, `seed`, and `verbose` apply to both forms.
/// Seeds above 2^63 - 1 cannot be written in TOML (its integers are
/// signed); pass larger seeds on the command line instead.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verbose: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antennas: Option<AntennasSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link: Option<LinkSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategies: Option<StrategiesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

/// Surface and terminal placement. Distances in meters, angles in degrees,
/// frequency in GHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub rows: u32,
    pub cols: u32,
    pub d_x: f64,
    pub d_y: f64,
    pub d_1: f64,
    pub theta_t_deg: f64,
    pub theta_r_deg: f64,
    pub f_ghz: f64,
}

/// Terminal antennas: linear (not dB) gains and pattern names
/// (`isotropic` or `cos^q`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntennasSection {
    pub g_t: f64,
    pub g_r: f64,
    pub g_t_direct: f64,
    pub g_r_direct: f64,
    pub tx_pattern: String,
    pub rx_pattern: String,
    pub cell_pattern: String,
}

/// Link-budget scalars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub p_t_dbm: f64,
    pub gamma_magnitude: f64,
    #[serde(default)]
    pub calibration_offset_db: f64,
}

/// Receiver distances: either an explicit list or a range, never both.
/// A range takes `d2_points` for log spacing or `d2_step` for linear
/// stepping, never both.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2_start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2_stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2_points: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2_step: Option<f64>,
}

/// Which strategies to run and their knobs. All optional; a missing list
/// means the preset's list, or the standard five for explicit scenarios.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategiesSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub list: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ris3_iterations: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ris2_grid_step_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ris3_max_sweeps: Option<u64>,
}

/// Where and what to write.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<OutputFormat>>,
}

/// Parses and fully validates a document. Unknown keys, missing sections,
/// and out-of-domain values are all errors naming the offending key.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Renders a configuration back to TOML. Rendering a parsed document and
/// parsing the rendered text are mutual fixed points.
pub fn render_config(cfg: &RunConfig) -> String {
    toml::to_string_pretty(cfg).expect("a validated RunConfig serializes")
}

fn check_finite(key: &str, value: f64) -> Result<(), ConfigError> {
    if !value.is_finite() {
        return Err(invalid(key, "must be a finite number"));
    }
    Ok(())
}

fn check_positive(key: &str, value: f64) -> Result<(), ConfigError> {
    check_finite(key, value)?;
    if value <= 0.0 {
        return Err(invalid(key, format!("must be positive (got {value})")));
    }
    Ok(())
}

fn check_front_angle_deg(key: &str, value: f64) -> Result<(), ConfigError> {
    check_finite(key, value)?;
    if !(0.0..90.0).contains(&value) {
        return Err(invalid(key, format!("must lie in [0, 90) degrees (got {value})")));
    }
    Ok(())
}

fn parse_pattern(key: &str, text: &str) -> Result<PatternModel, ConfigError> {
    text.parse::<PatternModel>()
        .map_err(|_| invalid(key, format!("`{text}` is not `isotropic` or `cos^q` with q >= 0")))
}

fn parse_strategy(key: &str, text: &str) -> Result<StrategyId, ConfigError> {
    text.parse::<StrategyId>().map_err(|_| {
        let known: Vec<&str> = StrategyId::ALL.iter().map(|s| s.name()).collect();
        invalid(key, format!("`{text}` is not one of {}", known.join(", ")))
    })
}

impl RunConfig {
    /// Structural and range validation of everything the document states.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let explicit_sections = [
            ("geometry", self.geometry.is_some()),
            ("antennas", self.antennas.is_some()),
            ("link", self.link.is_some()),
            ("sweep", self.sweep.is_some()),
        ];
        if self.preset.is_some() {
            if let Some((name, _)) = explicit_sections.iter().find(|(_, present)| *present) {
                return Err(invalid(
                    name,
                    "cannot be combined with `preset`; use one or the other",
                ));
            }
        } else {
            if let Some((name, _)) = explicit_sections.iter().find(|(_, present)| !*present) {
                return Err(invalid(
                    name,
                    "section is required when no `preset` is set",
                ));
            }
        }

        if let Some(g) = &self.geometry {
            if g.rows == 0 {
                return Err(invalid("geometry.rows", "must be at least 1"));
            }
            if g.cols == 0 {
                return Err(invalid("geometry.cols", "must be at least 1"));
            }
            check_positive("geometry.d_x", g.d_x)?;
            check_positive("geometry.d_y", g.d_y)?;
            check_positive("geometry.d_1", g.d_1)?;
            check_front_angle_deg("geometry.theta_t_deg", g.theta_t_deg)?;
            check_front_angle_deg("geometry.theta_r_deg", g.theta_r_deg)?;
            check_positive("geometry.f_ghz", g.f_ghz)?;
        }

        if let Some(a) = &self.antennas {
            check_positive("antennas.g_t", a.g_t)?;
            check_positive("antennas.g_r", a.g_r)?;
            check_positive("antennas.g_t_direct", a.g_t_direct)?;
            check_positive("antennas.g_r_direct", a.g_r_direct)?;
            parse_pattern("antennas.tx_pattern", &a.tx_pattern)?;
            parse_pattern("antennas.rx_pattern", &a.rx_pattern)?;
            parse_pattern("antennas.cell_pattern", &a.cell_pattern)?;
        }

        if let Some(l) = &self.link {
            check_finite("link.p_t_dbm", l.p_t_dbm)?;
            check_finite("link.gamma_magnitude", l.gamma_magnitude)?;
            if !(0.0..=1.0).contains(&l.gamma_magnitude) {
                return Err(invalid(
                    "link.gamma_magnitude",
                    format!("must lie in [0, 1] (got {})", l.gamma_magnitude),
                ));
            }
            check_finite("link.calibration_offset_db", l.calibration_offset_db)?;
        }

        if let Some(s) = &self.sweep {
            self.validate_sweep(s)?;
        }

        if let Some(s) = &self.strategies {
            if let Some(list) = &s.list {
                if list.is_empty() {
                    return Err(invalid("strategies.list", "must name at least one strategy"));
                }
                let mut seen = Vec::new();
                for entry in list {
                    let id = parse_strategy("strategies.list", entry)?;
                    if seen.contains(&id) {
                        return Err(invalid(
                            "strategies.list",
                            format!("`{id}` is listed twice"),
                        ));
                    }
                    seen.push(id);
                }
            }
            if let Some(n) = s.ris3_iterations {
                if n == 0 {
                    return Err(invalid("strategies.ris3_iterations", "must be at least 1"));
                }
            }
            if let Some(step) = s.ris2_grid_step_deg {
                check_finite("strategies.ris2_grid_step_deg", step)?;
                if !(step > 0.0 && step <= 180.0) {
                    return Err(invalid(
                        "strategies.ris2_grid_step_deg",
                        format!("must lie in (0, 180] degrees (got {step})"),
                    ));
                }
            }
            if let Some(n) = s.ris3_max_sweeps {
                if n == 0 {
                    return Err(invalid("strategies.ris3_max_sweeps", "must be at least 1"));
                }
            }
        }

        if let Some(o) = &self.output {
            if let Some(formats) = &o.formats {
                if formats.is_empty() {
                    return Err(invalid("output.formats", "must name at least one format"));
                }
            }
        }
        Ok(())
    }

    fn validate_sweep(&self, s: &SweepSection) -> Result<(), ConfigError> {
        let range_keys = s.d2_start.is_some() || s.d2_stop.is_some() || s.d2_points.is_some() || s.d2_step.is_some();
        match (&s.d2_list, range_keys) {
            (Some(_), true) => {
                return Err(invalid(
                    "sweep.d2_list",
                    "cannot be combined with d2_start/d2_stop/d2_points/d2_step",
                ));
            }
            (None, false) => {
                return Err(invalid(
                    "sweep",
                    "needs either d2_list or a d2_start/d2_stop range",
                ));
            }
            (Some(list), false) => {
                if list.is_empty() {
                    return Err(invalid("sweep.d2_list", "must contain at least one distance"));
                }
                for (i, &v) in list.iter().enumerate() {
                    check_positive("sweep.d2_list", v)?;
                    if i > 0 && v <= list[i - 1] {
                        return Err(invalid(
                            "sweep.d2_list",
                            format!("must be strictly increasing (position {i})"),
                        ));
                    }
                }
            }
            (None, true) => {
                let start = s.d2_start.ok_or_else(|| invalid("sweep.d2_start", "required for a range"))?;
                let stop = s.d2_stop.ok_or_else(|| invalid("sweep.d2_stop", "required for a range"))?;
                check_positive("sweep.d2_start", start)?;
                check_finite("sweep.d2_stop", stop)?;
                match (s.d2_points, s.d2_step) {
                    (Some(_), Some(_)) => {
                        return Err(invalid(
                            "sweep.d2_points",
                            "cannot be combined with d2_step; pick log or linear spacing",
                        ));
                    }
                    (None, None) => {
                        return Err(invalid(
                            "sweep",
                            "a range needs d2_points (log spacing) or d2_step (linear)",
                        ));
                    }
                    (Some(points), None) => {
                        if points < 2 {
                            return Err(invalid("sweep.d2_points", "must be at least 2"));
                        }
                        if stop <= start {
                            return Err(invalid("sweep.d2_stop", "must exceed d2_start"));
                        }
                    }
                    (None, Some(step)) => {
                        check_positive("sweep.d2_step", step)?;
                        if stop < start {
                            return Err(invalid("sweep.d2_stop", "must be at least d2_start"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Command-line values that win over the document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub strategies: Option<Vec<String>>,
    pub iterations: Option<u64>,
    pub grid_step_deg: Option<f64>,
    pub max_sweeps: Option<u64>,
    pub calibration_offset_db: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub formats: Option<Vec<String>>,
    pub verbose: bool,
}

/// A fully merged run: what to sweep, where to write, how loudly.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedRun {
    /// Base name for output files.
    pub name: String,
    pub spec: SweepSpec,
    pub out_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
    pub verbose: bool,
}

/// Strategy list used when neither preset nor document names one.
fn default_strategies() -> Vec<StrategyId> {
    vec![
        StrategyId::Ris0,
        StrategyId::Ris1,
        StrategyId::Ris2Analytic,
        StrategyId::Ris3Random,
        StrategyId::Ris4,
    ]
}

fn template_from_sections(
    g: &GeometrySection,
    a: &AntennasSection,
    l: &LinkSection,
) -> Result<ScenarioTemplate, ConfigError> {
    let tx_antenna = AntennaSpec::new(a.g_t, a.g_t_direct, parse_pattern("antennas.tx_pattern", &a.tx_pattern)?)
        .map_err(|e| invalid("antennas", e.to_string()))?;
    let rx_antenna = AntennaSpec::new(a.g_r, a.g_r_direct, parse_pattern("antennas.rx_pattern", &a.rx_pattern)?)
        .map_err(|e| invalid("antennas", e.to_string()))?;
    Ok(ScenarioTemplate {
        rows: g.rows as usize,
        cols: g.cols as usize,
        cell_dx: g.d_x,
        cell_dy: g.d_y,
        d1: g.d_1,
        theta_t: g.theta_t_deg.to_radians(),
        theta_r: g.theta_r_deg.to_radians(),
        frequency_hz: g.f_ghz * 1e9,
        tx_antenna,
        rx_antenna,
        cell_pattern: parse_pattern("antennas.cell_pattern", &a.cell_pattern)?,
        gamma_magnitude: l.gamma_magnitude,
        p_t_watts: dbm_to_watts(l.p_t_dbm),
        calibration_offset_db: l.calibration_offset_db,
    })
}

fn d2_values_from_section(s: &SweepSection) -> Result<Vec<f64>, ConfigError> {
    if let Some(list) = &s.d2_list {
        return Ok(list.clone());
    }
    let start = s.d2_start.expect("validated range");
    let stop = s.d2_stop.expect("validated range");
    let values = if let Some(points) = s.d2_points {
        log_spaced(start, stop, points as usize)
    } else {
        linear_stepped(start, stop, s.d2_step.expect("validated range"))
    };
    values.map_err(|e| invalid("sweep", e.to_string()))
}

/// Merges a validated document with command-line overrides into a runnable
/// sweep. `name` becomes the output file stem (preset name or config file
/// stem).
pub fn resolve(cfg: &RunConfig, name: &str, overrides: &Overrides) -> Result<ResolvedRun, ConfigError> {
    cfg.validate()?;

    let mut spec = if let Some(preset) = cfg.preset {
        preset.spec()
    } else {
        let g = cfg.geometry.as_ref().expect("validated explicit config");
        let a = cfg.antennas.as_ref().expect("validated explicit config");
        let l = cfg.link.as_ref().expect("validated explicit config");
        let s = cfg.sweep.as_ref().expect("validated explicit config");
        SweepSpec {
            template: template_from_sections(g, a, l)?,
            d2_values: d2_values_from_section(s)?,
            strategies: default_strategies(),
            seed: 0,
            params: StrategyParams::default(),
        }
    };

    if let Some(section) = &cfg.strategies {
        if let Some(list) = &section.list {
            spec.strategies = list
                .iter()
                .map(|s| parse_strategy("strategies.list", s))
                .collect::<Result<_, _>>()?;
        }
        if let Some(n) = section.ris3_iterations {
            spec.params.ris3_iterations = n as usize;
        }
        if let Some(step) = section.ris2_grid_step_deg {
            spec.params.ris2_grid_step = step.to_radians();
        }
        if let Some(n) = section.ris3_max_sweeps {
            spec.params.ris3_max_sweeps = n as usize;
        }
    }
    if let Some(seed) = cfg.seed {
        spec.seed = seed;
    }

    if let Some(list) = &overrides.strategies {
        if list.is_empty() {
            return Err(invalid("strategies.list", "must name at least one strategy"));
        }
        let mut parsed = Vec::new();
        for entry in list {
            let id = parse_strategy("strategies.list", entry)?;
            if parsed.contains(&id) {
                return Err(invalid("strategies.list", format!("`{id}` is listed twice")));
            }
            parsed.push(id);
        }
        spec.strategies = parsed;
    }
    if let Some(n) = overrides.iterations {
        if n == 0 {
            return Err(invalid("strategies.ris3_iterations", "must be at least 1"));
        }
        spec.params.ris3_iterations = n as usize;
    }
    if let Some(step) = overrides.grid_step_deg {
        if !(step.is_finite() && step > 0.0 && step <= 180.0) {
            return Err(invalid(
                "strategies.ris2_grid_step_deg",
                format!("must lie in (0, 180] degrees (got {step})"),
            ));
        }
        spec.params.ris2_grid_step = step.to_radians();
    }
    if let Some(n) = overrides.max_sweeps {
        if n == 0 {
            return Err(invalid("strategies.ris3_max_sweeps", "must be at least 1"));
        }
        spec.params.ris3_max_sweeps = n as usize;
    }
    if let Some(offset) = overrides.calibration_offset_db {
        if !offset.is_finite() {
            return Err(invalid("link.calibration_offset_db", "must be a finite number"));
        }
        spec.template.calibration_offset_db = offset;
    }
    if let Some(seed) = overrides.seed {
        spec.seed = seed;
    }

    spec.validate()
        .map_err(|e| invalid("config", e.to_string()))?;

    let out_dir = overrides
        .out_dir
        .clone()
        .or_else(|| cfg.output.as_ref().and_then(|o| o.dir.as_ref().map(PathBuf::from)))
        .unwrap_or_else(|| PathBuf::from("results"));

    let formats = if let Some(raw) = &overrides.formats {
        if raw.is_empty() {
            return Err(invalid("output.formats", "must name at least one format"));
        }
        let mut parsed = Vec::new();
        for entry in raw {
            let f: OutputFormat = entry.parse()?;
            if !parsed.contains(&f) {
                parsed.push(f);
            }
        }
        parsed
    } else {
        cfg.output
            .as_ref()
            .and_then(|o| o.formats.clone())
            .unwrap_or_else(|| vec![OutputFormat::Csv, OutputFormat::Svg])
    };

    Ok(ResolvedRun {
        name: name.to_string(),
        spec,
        out_dir,
        formats,
        verbose: overrides.verbose || cfg.verbose.unwrap_or(false),
    })
}

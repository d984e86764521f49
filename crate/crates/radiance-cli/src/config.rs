//! Run configuration: `key = value` files plus command-line overrides.

use std::fmt;
use std::path::PathBuf;

use radiance_core::{effective_rates, CircuitParams, DEFAULT_EPSILON_HZ};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line number when the problem is tied to a file line.
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    pub fn global(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config line {line}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Steady,
    Sweep,
    Ladder,
    Verify,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Steady => "steady",
            Mode::Sweep => "sweep",
            Mode::Ladder => "ladder",
            Mode::Verify => "verify",
        }
    }

    fn parse(s: &str) -> Option<Mode> {
        match s {
            "steady" => Some(Mode::Steady),
            "sweep" => Some(Mode::Sweep),
            "ladder" => Some(Mode::Ladder),
            "verify" => Some(Mode::Verify),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    GammaP,
    Gamma1,
    Gamma2,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::GammaP => "gamma_p",
            SweepVariable::Gamma1 => "gamma_1",
            SweepVariable::Gamma2 => "gamma_2",
        }
    }
}

/// Log-spaced sweep grid specification.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepSpec {
    /// The log-spaced grid values.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| self.start * (self.stop / self.start).powf(i as f64 / (n - 1) as f64))
            .collect()
    }
}

/// Fully resolved run configuration. Rates are multiples of `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub n_atoms: u32,
    pub gamma_p: f64,
    pub gamma_1: f64,
    pub gamma_2: f64,
    /// Reference rate in ordinary-frequency units (Hz).
    pub epsilon_hz: f64,
    pub sweep: SweepSpec,
    pub out: Option<PathBuf>,
}

/// Values collected from a config file or flags, before resolution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialConfig {
    pub mode: Option<Mode>,
    pub n_atoms: Option<u32>,
    pub gamma_p: Option<f64>,
    pub gamma_1: Option<f64>,
    pub gamma_2: Option<f64>,
    pub epsilon_hz: Option<f64>,
    pub sweep_variable: Option<SweepVariable>,
    pub sweep_start: Option<f64>,
    pub sweep_stop: Option<f64>,
    pub sweep_points: Option<usize>,
    pub out: Option<PathBuf>,
    pub circuit: CircuitBlock,
}

/// The optional circuit parameter block; values in ordinary-frequency Hz.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CircuitBlock {
    pub lambda_ab_hz: Option<f64>,
    pub lambda_b_gamma_hz: Option<f64>,
    pub delta_hz: Option<f64>,
    pub kappa_a_hz: Option<f64>,
    pub kappa_b_hz: Option<f64>,
}

impl CircuitBlock {
    pub fn is_empty(&self) -> bool {
        self.lambda_ab_hz.is_none()
            && self.lambda_b_gamma_hz.is_none()
            && self.delta_hz.is_none()
            && self.kappa_a_hz.is_none()
            && self.kappa_b_hz.is_none()
    }
}

/// Parse the `key = value` config text. Unknown keys, malformed numbers and
/// negative rates are rejected with their line number.
pub fn parse_config_text(text: &str) -> Result<PartialConfig, ConfigError> {
    let mut config = PartialConfig::default();
    for (index, raw_line) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            ConfigError::at(line_no, format!("expected `key = value`, got `{line}`"))
        })?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(ConfigError::at(line_no, format!("key `{key}` has no value")));
        }

        let parse_f64 = |value: &str| -> Result<f64, ConfigError> {
            value
                .parse::<f64>()
                .map_err(|_| ConfigError::at(line_no, format!("malformed number `{value}`")))
        };
        let parse_rate = |value: &str, key: &str| -> Result<f64, ConfigError> {
            let v = parse_f64(value)?;
            if !v.is_finite() || v < 0.0 {
                return Err(ConfigError::at(
                    line_no,
                    format!("`{key}` must be a finite nonnegative rate, got {value}"),
                ));
            }
            Ok(v)
        };

        match key {
            "n_atoms" => {
                let v: u32 = value.parse().map_err(|_| {
                    ConfigError::at(line_no, format!("malformed atom number `{value}`"))
                })?;
                config.n_atoms = Some(v);
            }
            "gamma_p" => config.gamma_p = Some(parse_rate(value, key)?),
            "gamma_1" => config.gamma_1 = Some(parse_rate(value, key)?),
            "gamma_2" => config.gamma_2 = Some(parse_rate(value, key)?),
            "epsilon_hz" => {
                let v = parse_f64(value)?;
                if !(v.is_finite() && v > 0.0) {
                    return Err(ConfigError::at(
                        line_no,
                        format!("`epsilon_hz` must be positive, got {value}"),
                    ));
                }
                config.epsilon_hz = Some(v);
            }
            "mode" => {
                let mode = Mode::parse(value).ok_or_else(|| {
                    ConfigError::at(
                        line_no,
                        format!("unknown mode `{value}` (steady|sweep|ladder|verify)"),
                    )
                })?;
                if let Some(previous) = config.mode {
                    if previous != mode {
                        return Err(ConfigError::at(
                            line_no,
                            format!(
                                "conflicting modes `{}` and `{}`",
                                previous.name(),
                                mode.name()
                            ),
                        ));
                    }
                }
                config.mode = Some(mode);
            }
            "sweep_variable" => {
                config.sweep_variable = Some(match value {
                    "gamma_p" => SweepVariable::GammaP,
                    "gamma_1" => SweepVariable::Gamma1,
                    "gamma_2" => SweepVariable::Gamma2,
                    _ => {
                        return Err(ConfigError::at(
                            line_no,
                            format!("unknown sweep variable `{value}`"),
                        ))
                    }
                });
            }
            "sweep_start" => config.sweep_start = Some(parse_rate(value, key)?),
            "sweep_stop" => config.sweep_stop = Some(parse_rate(value, key)?),
            "sweep_points" => {
                let v: usize = value.parse().map_err(|_| {
                    ConfigError::at(line_no, format!("malformed point count `{value}`"))
                })?;
                config.sweep_points = Some(v);
            }
            "out" => config.out = Some(PathBuf::from(value)),
            "circuit.lambda_ab_hz" => config.circuit.lambda_ab_hz = Some(parse_rate(value, key)?),
            "circuit.lambda_b_gamma_hz" => {
                config.circuit.lambda_b_gamma_hz = Some(parse_rate(value, key)?)
            }
            "circuit.delta_hz" => config.circuit.delta_hz = Some(parse_rate(value, key)?),
            "circuit.kappa_a_hz" => config.circuit.kappa_a_hz = Some(parse_rate(value, key)?),
            "circuit.kappa_b_hz" => config.circuit.kappa_b_hz = Some(parse_rate(value, key)?),
            _ => {
                return Err(ConfigError::at(line_no, format!("unknown key `{key}`")));
            }
        }
    }
    Ok(config)
}

/// Layer `overrides` (command-line flags) on top of `base` (file values).
pub fn merge(base: PartialConfig, overrides: PartialConfig) -> Result<PartialConfig, ConfigError> {
    if let (Some(a), Some(b)) = (base.mode, overrides.mode) {
        if a != b {
            return Err(ConfigError::global(format!(
                "conflicting modes `{}` (config) and `{}` (command line)",
                a.name(),
                b.name()
            )));
        }
    }
    Ok(PartialConfig {
        mode: overrides.mode.or(base.mode),
        n_atoms: overrides.n_atoms.or(base.n_atoms),
        gamma_p: overrides.gamma_p.or(base.gamma_p),
        gamma_1: overrides.gamma_1.or(base.gamma_1),
        gamma_2: overrides.gamma_2.or(base.gamma_2),
        epsilon_hz: overrides.epsilon_hz.or(base.epsilon_hz),
        sweep_variable: overrides.sweep_variable.or(base.sweep_variable),
        sweep_start: overrides.sweep_start.or(base.sweep_start),
        sweep_stop: overrides.sweep_stop.or(base.sweep_stop),
        sweep_points: overrides.sweep_points.or(base.sweep_points),
        out: overrides.out.or(base.out),
        circuit: if overrides.circuit.is_empty() {
            base.circuit
        } else {
            overrides.circuit
        },
    })
}

/// Validate and fill defaults, resolving the circuit block into `gamma_2`.
pub fn resolve(partial: PartialConfig) -> Result<RunConfig, ConfigError> {
    let mode = partial
        .mode
        .ok_or_else(|| ConfigError::global("no mode given (steady|sweep|ladder|verify)"))?;
    let epsilon_hz = partial.epsilon_hz.unwrap_or(DEFAULT_EPSILON_HZ);

    let mut gamma_2 = partial.gamma_2;
    if !partial.circuit.is_empty() {
        let block = &partial.circuit;
        let (Some(lambda_ab), Some(lambda_b_gamma), Some(delta), Some(kappa_a), Some(kappa_b)) = (
            block.lambda_ab_hz,
            block.lambda_b_gamma_hz,
            block.delta_hz,
            block.kappa_a_hz,
            block.kappa_b_hz,
        ) else {
            return Err(ConfigError::global(
                "incomplete circuit block: all of circuit.{lambda_ab_hz, lambda_b_gamma_hz, \
                 delta_hz, kappa_a_hz, kappa_b_hz} are required",
            ));
        };
        if gamma_2.is_some() {
            return Err(ConfigError::global(
                "gamma_2 conflicts with the circuit block; give one or the other",
            ));
        }
        let n_atoms = partial
            .n_atoms
            .ok_or_else(|| ConfigError::global("circuit block requires n_atoms"))?;
        let rates = effective_rates(&CircuitParams {
            lambda_ab,
            lambda_b_gamma,
            delta,
            kappa_a,
            kappa_b,
            n_atoms,
        })
        .map_err(|e| ConfigError::global(e.to_string()))?;
        if rates.bad_cavity_strained {
            eprintln!(
                "warning: kappa_a < 100 lambda; the bad-cavity assumption behind \
                 gamma_2 = 4 lambda^2 / kappa_a is strained"
            );
        }
        gamma_2 = Some(rates.gamma_2 / epsilon_hz);
    }

    let n_atoms = partial
        .n_atoms
        .ok_or_else(|| ConfigError::global("n_atoms is required"))?;
    if n_atoms == 0 {
        return Err(ConfigError::global("n_atoms must be positive"));
    }

    let sweep = SweepSpec {
        variable: partial.sweep_variable.unwrap_or(SweepVariable::GammaP),
        start: partial.sweep_start.unwrap_or(1e-2),
        stop: partial.sweep_stop.unwrap_or(1e2),
        points: partial.sweep_points.unwrap_or(81),
    };
    if mode == Mode::Sweep {
        if !(sweep.start > 0.0 && sweep.start < sweep.stop) {
            return Err(ConfigError::global(format!(
                "sweep over {} must satisfy 0 < start < stop, got {}..{}",
                sweep.variable.name(),
                sweep.start,
                sweep.stop
            )));
        }
        if sweep.points < 2 {
            return Err(ConfigError::global(format!(
                "sweep needs at least 2 points, got {}",
                sweep.points
            )));
        }
    }

    let config = RunConfig {
        mode,
        n_atoms,
        gamma_p: partial.gamma_p.unwrap_or(0.0),
        gamma_1: partial.gamma_1.unwrap_or(0.0),
        gamma_2: gamma_2.unwrap_or(0.0),
        epsilon_hz,
        sweep,
        out: partial.out,
    };

    // Stationary modes need pumping; the sweep may supply it as the swept
    // variable.
    let pumping_swept =
        mode == Mode::Sweep && config.sweep.variable == SweepVariable::GammaP;
    if matches!(mode, Mode::Steady | Mode::Sweep | Mode::Ladder)
        && config.gamma_p <= 0.0
        && !pumping_swept
    {
        return Err(ConfigError::global(
            "stationary runs require gamma_p > 0",
        ));
    }

    Ok(config)
}

/// Parse a config file and resolve it with no overrides.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    resolve(parse_config_text(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_steady_config_parses() {
        let config =
            parse_config("n_atoms = 100\ngamma_2 = 1\ngamma_p = 100\nmode = steady").unwrap();
        assert_eq!(config.mode, Mode::Steady);
        assert_eq!(config.n_atoms, 100);
        assert_eq!(config.gamma_p, 100.0);
        assert_eq!(config.gamma_2, 1.0);
        assert_eq!(config.gamma_1, 0.0);
        assert_eq!(config.epsilon_hz, 10.0);
    }

    #[test]
    fn negative_rates_are_rejected_with_line_numbers() {
        let err = parse_config_text("n_atoms = 2\ngamma_p = -1").unwrap_err();
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config_text("gamma_q = 1").unwrap_err();
        assert_eq!(err.line, Some(1));
        assert!(err.message.contains("unknown key"));
    }

    #[test]
    fn malformed_numbers_are_rejected() {
        let err = parse_config_text("gamma_p = fast").unwrap_err();
        assert!(err.message.contains("malformed"));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# run setup\n\nn_atoms = 4  # small\nmode = steady\ngamma_p = 1\ngamma_2 = 1\n";
        assert!(parse_config(text).is_ok());
    }

    #[test]
    fn conflicting_modes_are_rejected() {
        let err = parse_config_text("mode = steady\nmode = sweep").unwrap_err();
        assert!(err.message.contains("conflicting modes"));
        let file = parse_config_text("mode = sweep").unwrap();
        let flags = PartialConfig {
            mode: Some(Mode::Steady),
            ..PartialConfig::default()
        };
        assert!(merge(file, flags).is_err());
    }

    #[test]
    fn circuit_block_resolves_gamma_2() {
        let text = "n_atoms = 100\ngamma_p = 100\nmode = steady\n\
                    circuit.lambda_ab_hz = 20e6\ncircuit.lambda_b_gamma_hz = 20e6\n\
                    circuit.delta_hz = 200e6\ncircuit.kappa_a_hz = 1.6e6\n\
                    circuit.kappa_b_hz = 10e3";
        let config = parse_config(text).unwrap();
        // 4 lambda^2 / kappa_a = 10 Hz; in units of epsilon = 10 Hz that is 1
        assert!((config.gamma_2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circuit_block_conflicts_with_explicit_gamma_2() {
        let text = "n_atoms = 100\ngamma_p = 100\ngamma_2 = 1\nmode = steady\n\
                    circuit.lambda_ab_hz = 20e6\ncircuit.lambda_b_gamma_hz = 20e6\n\
                    circuit.delta_hz = 200e6\ncircuit.kappa_a_hz = 1.6e6\n\
                    circuit.kappa_b_hz = 10e3";
        assert!(parse_config(text).is_err());
    }

    #[test]
    fn incomplete_circuit_block_is_rejected() {
        let text = "n_atoms = 100\ngamma_p = 100\nmode = steady\ncircuit.lambda_ab_hz = 20e6";
        assert!(parse_config(text).is_err());
    }

    #[test]
    fn sweep_defaults_cover_four_decades() {
        let config = parse_config("n_atoms = 10\ngamma_1 = 1\nmode = sweep").unwrap();
        assert_eq!(config.sweep.points, 81);
        let grid = config.sweep.grid();
        assert!((grid[0] - 1e-2).abs() < 1e-15);
        assert!((grid[80] - 1e2).abs() / 1e2 < 1e-12);
    }

    #[test]
    fn flags_override_file_values() {
        let file = parse_config_text("n_atoms = 10\ngamma_p = 1\nmode = steady").unwrap();
        let flags = PartialConfig {
            n_atoms: Some(20),
            ..PartialConfig::default()
        };
        let merged = merge(file, flags).unwrap();
        let config = resolve(merged).unwrap();
        assert_eq!(config.n_atoms, 20);
        assert_eq!(config.gamma_p, 1.0);
    }

    #[test]
    fn stationary_modes_require_pumping() {
        assert!(parse_config("n_atoms = 4\ngamma_2 = 1\nmode = steady").is_err());
        // swept gamma_p supplies the pumping
        assert!(parse_config("n_atoms = 4\ngamma_2 = 1\nmode = sweep").is_ok());
    }
}

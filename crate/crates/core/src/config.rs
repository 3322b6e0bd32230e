//! Run configuration (TOML) and result files (CSV / JSON).
//!
//! ```toml
//! [cell]
//! cell_radius = 350.0            # m
//! num_cellular = 30              # = number of channels
//! num_d2d = 6
//! max_d2d_distance_ratio = 0.1   # fraction of the radius, at most 1.0
//! # max_d2d_distance_m = 400.0   # explicit override, at most 2 * radius
//! bandwidth_hz = 180000.0
//! noise_psd_dbm_hz = -174.0
//! seed = 1
//!
//! [game]
//! max_power_w = 0.2
//! circuit_power_w = 0.05
//! peukert_exponent = 1.3
//! battery_capacity_ah = 0.8
//! voltage_v = 4.0
//! epsilon_w = 0.001
//! max_iters = 1000
//! fixed_power_w = 0.05
//!
//! [sweep]
//! param = "num_d2d"              # num_d2d | num_channels | max_d2d_distance_ratio
//! values = [6, 12, 18, 24, 30]   # omitted: the single base value
//! realizations = 1000
//! algorithms = ["ca", "greedy", "ca-fixed"]
//! greedy_gain = "to_enb"         # to_enb | intra_pair
//! reject_policy = "stop"         # stop | continue
//!
//! [output]
//! path = "results.csv"
//! format = "csv"                 # csv | json
//! ```

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::auction::RejectPolicy;
use crate::baselines::GreedyGain;
use crate::channel::CellConfig;
use crate::game::GameParams;
use crate::metrics::{run_sweep, Algorithm, AlgorithmOptions, Estimate, SimError, SweepParam, SweepRow, SweepSpec};
use crate::par::Execution;

/// Seed used when neither the config nor the environment provides one.
pub const DEFAULT_SEED: u64 = 1;
/// Environment variable that replaces [`DEFAULT_SEED`].
pub const SEED_ENV: &str = "D2D_SIM_SEED";

const SECTIONS: [(&str, &[&str]); 4] = [
    (
        "cell",
        &[
            "cell_radius",
            "num_cellular",
            "num_d2d",
            "max_d2d_distance_ratio",
            "max_d2d_distance_m",
            "bandwidth_hz",
            "noise_psd_dbm_hz",
            "seed",
        ],
    ),
    (
        "game",
        &[
            "max_power_w",
            "circuit_power_w",
            "peukert_exponent",
            "battery_capacity_ah",
            "voltage_v",
            "epsilon_w",
            "max_iters",
            "fixed_power_w",
        ],
    ),
    ("sweep", &["param", "values", "realizations", "algorithms", "greedy_gain", "reject_policy"]),
    ("output", &["path", "format"]),
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {reason}")]
    Constraint { key: String, reason: String },
}

fn constraint(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Constraint { key: key.to_string(), reason: reason.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CellSection {
    pub cell_radius: f64,
    pub num_cellular: usize,
    pub num_d2d: usize,
    pub max_d2d_distance_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_d2d_distance_m: Option<f64>,
    pub bandwidth_hz: f64,
    pub noise_psd_dbm_hz: f64,
    pub seed: u64,
}

impl Default for CellSection {
    fn default() -> Self {
        let cell = CellConfig::default();
        Self {
            cell_radius: cell.cell_radius,
            num_cellular: cell.num_cellular,
            num_d2d: cell.num_d2d,
            max_d2d_distance_ratio: cell.max_d2d_distance / cell.cell_radius,
            max_d2d_distance_m: None,
            bandwidth_hz: cell.bandwidth,
            noise_psd_dbm_hz: cell.noise_psd,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GameSection {
    pub max_power_w: f64,
    pub circuit_power_w: f64,
    pub peukert_exponent: f64,
    pub battery_capacity_ah: f64,
    pub voltage_v: f64,
    pub epsilon_w: f64,
    pub max_iters: usize,
    pub fixed_power_w: f64,
}

impl Default for GameSection {
    fn default() -> Self {
        let p = GameParams::default();
        Self {
            max_power_w: p.p_bar,
            circuit_power_w: p.p0,
            peukert_exponent: p.a,
            battery_capacity_ah: p.capacity,
            voltage_v: p.voltage,
            epsilon_w: p.epsilon,
            max_iters: p.max_iters,
            fixed_power_w: AlgorithmOptions::default().fixed_power,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub param: SweepParam,
    /// Empty means the single value already in `[cell]`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    pub realizations: usize,
    pub algorithms: Vec<Algorithm>,
    pub greedy_gain: GreedyGain,
    pub reject_policy: RejectPolicy,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            param: SweepParam::NumD2d,
            values: Vec::new(),
            realizations: 1000,
            algorithms: vec![Algorithm::Ca, Algorithm::Greedy, Algorithm::CaFixed],
            greedy_gain: GreedyGain::default(),
            reject_policy: RejectPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub path: PathBuf,
    pub format: OutputFormat,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { path: PathBuf::from("results.csv"), format: OutputFormat::Csv }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub cell: CellSection,
    pub game: GameSection,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn cell_config(&self) -> CellConfig {
        let c = &self.cell;
        CellConfig {
            cell_radius: c.cell_radius,
            num_cellular: c.num_cellular,
            num_d2d: c.num_d2d,
            max_d2d_distance: c.max_d2d_distance_m.unwrap_or(c.max_d2d_distance_ratio * c.cell_radius),
            bandwidth: c.bandwidth_hz,
            noise_psd: c.noise_psd_dbm_hz,
            rng_seed: c.seed,
        }
    }

    pub fn game_params(&self) -> GameParams {
        let g = &self.game;
        GameParams {
            p0: g.circuit_power_w,
            p_bar: g.max_power_w,
            a: g.peukert_exponent,
            capacity: g.battery_capacity_ah,
            voltage: g.voltage_v,
            epsilon: g.epsilon_w,
            max_iters: g.max_iters,
        }
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        let cell = self.cell_config();
        let values = if self.sweep.values.is_empty() {
            vec![self.sweep.param.value_in(&cell)]
        } else {
            self.sweep.values.clone()
        };
        SweepSpec {
            param: self.sweep.param,
            values,
            realizations: self.sweep.realizations,
            cell,
            game: self.game_params(),
            algorithms: self.sweep.algorithms.clone(),
            options: AlgorithmOptions {
                fixed_power: self.game.fixed_power_w,
                greedy_gain: self.sweep.greedy_gain,
                reject_policy: self.sweep.reject_policy,
            },
        }
    }

    /// Checks every constraint, naming the offending key.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let c = &self.cell;
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(constraint(key, format!("must be positive, got {v}")))
            }
        };
        positive("cell.cell_radius", c.cell_radius)?;
        if c.num_cellular == 0 {
            return Err(constraint("cell.num_cellular", "must be at least 1"));
        }
        match c.max_d2d_distance_m {
            Some(m) => {
                if !(m > 0.0 && m <= 2.0 * c.cell_radius) {
                    return Err(constraint(
                        "cell.max_d2d_distance_m",
                        format!("must lie in (0, 2 * cell_radius], got {m}"),
                    ));
                }
            }
            None => {
                if !(c.max_d2d_distance_ratio > 0.0 && c.max_d2d_distance_ratio <= 1.0) {
                    return Err(constraint(
                        "cell.max_d2d_distance_ratio",
                        format!("must lie in (0, 1], got {}", c.max_d2d_distance_ratio),
                    ));
                }
            }
        }
        positive("cell.bandwidth_hz", c.bandwidth_hz)?;
        if !c.noise_psd_dbm_hz.is_finite() {
            return Err(constraint("cell.noise_psd_dbm_hz", "must be finite"));
        }

        let g = &self.game;
        positive("game.max_power_w", g.max_power_w)?;
        positive("game.circuit_power_w", g.circuit_power_w)?;
        positive("game.battery_capacity_ah", g.battery_capacity_ah)?;
        positive("game.voltage_v", g.voltage_v)?;
        positive("game.epsilon_w", g.epsilon_w)?;
        if !(g.peukert_exponent > 1.0 && g.peukert_exponent.is_finite()) {
            return Err(constraint("game.peukert_exponent", "must exceed 1"));
        }
        if g.max_iters == 0 {
            return Err(constraint("game.max_iters", "must be at least 1"));
        }
        if !(g.fixed_power_w > 0.0 && g.fixed_power_w <= g.max_power_w) {
            return Err(constraint("game.fixed_power_w", "must lie in (0, max_power_w]"));
        }

        let s = &self.sweep;
        if s.realizations == 0 {
            return Err(constraint("sweep.realizations", "must be at least 1"));
        }
        if s.algorithms.is_empty() {
            return Err(constraint("sweep.algorithms", "must name at least one algorithm"));
        }
        let cell = self.cell_config();
        for &v in &s.values {
            s.param.apply(&cell, v).map_err(|e| constraint("sweep.values", e.to_string()))?;
        }
        Ok(())
    }

    /// The configuration as a TOML document that parses back to `self`.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config is always representable as TOML")
    }
}

fn check_keys(doc: &toml::Table) -> Result<(), ConfigError> {
    for (section, value) in doc {
        let Some((_, keys)) = SECTIONS.iter().find(|(name, _)| name == section) else {
            return Err(ConfigError::UnknownKey(section.clone()));
        };
        let table = value.as_table().ok_or_else(|| ConfigError::Parse(format!("`{section}` must be a table")))?;
        if let Some(key) = table.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(ConfigError::UnknownKey(format!("{section}.{key}")));
        }
    }
    Ok(())
}

/// Parses and validates a config; omitted keys take their defaults and an
/// omitted seed is `default_seed`.
pub fn parse_config_with_seed(text: &str, default_seed: u64) -> Result<RunConfig, ConfigError> {
    let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    check_keys(&doc)?;
    let cell = doc.entry("cell").or_insert_with(|| toml::Value::Table(toml::Table::new()));
    if let Some(table) = cell.as_table_mut() {
        table.entry("seed").or_insert_with(|| toml::Value::Integer(default_seed as i64));
    }
    let config: RunConfig =
        toml::Value::Table(doc).try_into().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with_seed(text, DEFAULT_SEED)
}

/// [`DEFAULT_SEED`], or the value of [`SEED_ENV`] when set.
pub fn default_seed_from_env() -> Result<u64, ConfigError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| constraint(SEED_ENV, format!("not an unsigned integer: {v:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Fixed CSV column order.
pub const CSV_COLUMNS: [&str; 26] = [
    "sweep_param",
    "param_value",
    "algorithm",
    "realizations",
    "sum_rate_bps",
    "system_tx_power_w",
    "system_total_power_w",
    "cell_expected_data_bits",
    "d2d_expected_data_bits",
    "cell_rate_bps",
    "d2d_rate_bps",
    "cell_lifetime_h",
    "d2d_lifetime_h",
    "sum_rate_bps_stderr",
    "system_tx_power_w_stderr",
    "system_total_power_w_stderr",
    "cell_expected_data_bits_stderr",
    "d2d_expected_data_bits_stderr",
    "cell_rate_bps_stderr",
    "d2d_rate_bps_stderr",
    "cell_lifetime_h_stderr",
    "d2d_lifetime_h_stderr",
    "mean_pg_iters",
    "eq_solves",
    "nonconverged",
    "uniqueness_rate",
];

/// 12 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn round_sig(x: f64) -> f64 {
    format_float(x).parse().unwrap_or(x)
}

fn metric_columns(row: &SweepRow) -> [Option<Estimate>; 9] {
    [
        Some(row.sum_rate_bps),
        Some(row.system_tx_power_w),
        Some(row.system_total_power_w),
        Some(row.cell_expected_data_bits),
        row.d2d_expected_data_bits,
        Some(row.cell_rate_bps),
        row.d2d_rate_bps,
        Some(row.cell_lifetime_h),
        row.d2d_lifetime_h,
    ]
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    let opt = |x: Option<f64>| x.map(format_float).unwrap_or_default();
    for row in rows {
        let metrics = metric_columns(row);
        let mut fields = vec![
            row.sweep_param.name().to_string(),
            format_float(row.param_value),
            row.algorithm.name().to_string(),
            row.realizations.to_string(),
        ];
        fields.extend(metrics.iter().map(|m| opt(m.map(|e| e.mean))));
        fields.extend(metrics.iter().map(|m| opt(m.map(|e| e.stderr))));
        fields.push(format_float(row.mean_pg_iters));
        fields.push(format_float(row.eq_solves));
        fields.push(row.nonconverged.to_string());
        fields.push(opt(row.uniqueness_rate));
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

pub fn to_json(rows: &[SweepRow]) -> String {
    let records: Vec<serde_json::Map<String, serde_json::Value>> = rows
        .iter()
        .map(|row| {
            let num = |x: f64| serde_json::Value::from(round_sig(x));
            let opt = |x: Option<f64>| x.map(num).unwrap_or(serde_json::Value::Null);
            let metrics = metric_columns(row);
            let mut values = vec![
                serde_json::Value::from(row.sweep_param.name()),
                num(row.param_value),
                serde_json::Value::from(row.algorithm.name()),
                serde_json::Value::from(row.realizations),
            ];
            values.extend(metrics.iter().map(|m| opt(m.map(|e| e.mean))));
            values.extend(metrics.iter().map(|m| opt(m.map(|e| e.stderr))));
            values.push(num(row.mean_pg_iters));
            values.push(num(row.eq_solves));
            values.push(serde_json::Value::from(row.nonconverged));
            values.push(opt(row.uniqueness_rate));
            CSV_COLUMNS.iter().map(|c| c.to_string()).zip(values).collect()
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&records).expect("rows serialize");
    text.push('\n');
    text
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

pub fn write_rows(rows: &[SweepRow], path: &Path, format: OutputFormat) -> Result<(), RunError> {
    let text = match format {
        OutputFormat::Csv => to_csv(rows),
        OutputFormat::Json => to_json(rows),
    };
    fs::write(path, text).map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

/// Runs the configured sweep and writes the result file.
pub fn run(config: &RunConfig, exec: Execution) -> Result<Vec<SweepRow>, RunError> {
    let rows = run_sweep(&config.sweep_spec(), exec)?;
    write_rows(&rows, &config.output.path, config.output.format)?;
    Ok(rows)
}

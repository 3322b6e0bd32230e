//! Per-realization metrics and Monte Carlo parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::auction::{Allocation, Auction, EquilibriumValuator, RejectPolicy};
use crate::baselines::{self, GreedyGain, DEFAULT_FIXED_POWER};
use crate::channel::{compute_gains, generate_topology, CellConfig, ChannelError, GainTable};
use crate::game::{self, ChannelGame, GameError, GameParams};
use crate::par::{map_indexed, pairwise_sum, Execution};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "ca")]
    Ca,
    #[serde(rename = "ca-fixed")]
    CaFixed,
    #[serde(rename = "greedy")]
    Greedy,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Ca, Algorithm::CaFixed, Algorithm::Greedy];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Ca => "ca",
            Algorithm::CaFixed => "ca-fixed",
            Algorithm::Greedy => "greedy",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}` (expected ca, greedy or ca-fixed)"))
    }
}

/// Knobs of the allocators that are not part of the system model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmOptions {
    pub fixed_power: f64,
    pub greedy_gain: GreedyGain,
    pub reject_policy: RejectPolicy,
}

impl Default for AlgorithmOptions {
    fn default() -> Self {
        Self {
            fixed_power: DEFAULT_FIXED_POWER,
            greedy_gain: GreedyGain::default(),
            reject_policy: RejectPolicy::default(),
        }
    }
}

pub fn run_algorithm(
    algorithm: Algorithm,
    gains: &GainTable,
    params: &GameParams,
    options: &AlgorithmOptions,
) -> Result<Allocation, GameError> {
    match algorithm {
        Algorithm::Ca => {
            Auction::new(gains, EquilibriumValuator { params }).with_reject_policy(options.reject_policy).allocate()
        }
        Algorithm::Greedy => baselines::greedy_allocate_with(gains, params, options.greedy_gain),
        Algorithm::CaFixed => baselines::ca_fixed_power_allocate(gains, params, options.fixed_power),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UeClass {
    Cellular,
    D2d,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeMetrics {
    pub class: UeClass,
    /// Cellular UE index or D2D pair index.
    pub index: usize,
    pub channel: usize,
    pub power_w: f64,
    pub rate_bps: f64,
    pub lifetime_h: f64,
    pub expected_data_bits: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassAverages {
    pub expected_data_bits: f64,
    pub rate_bps: f64,
    pub lifetime_h: f64,
}

impl ClassAverages {
    fn of<'a>(ues: impl Iterator<Item = &'a UeMetrics>) -> Option<Self> {
        let ues: Vec<_> = ues.collect();
        if ues.is_empty() {
            return None;
        }
        let n = ues.len() as f64;
        let mean = |f: fn(&UeMetrics) -> f64| pairwise_sum(&ues.iter().map(|u| f(u)).collect::<Vec<_>>()) / n;
        Some(Self {
            expected_data_bits: mean(|u| u.expected_data_bits),
            rate_bps: mean(|u| u.rate_bps),
            lifetime_h: mean(|u| u.lifetime_h),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Mean best-response sweeps per channel game in the final allocation.
    pub mean_pg_iters: f64,
    pub eq_solves: usize,
    /// Fraction of final channel games meeting the uniqueness condition.
    pub uniqueness_rate: Option<f64>,
    pub nonconverged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub sum_rate_bps: f64,
    /// Transmit power only (W).
    pub system_tx_power_w: f64,
    /// Transmit plus circuit power (W).
    pub system_total_power_w: f64,
    pub cellular: ClassAverages,
    /// `None` when there are no D2D pairs.
    pub d2d: Option<ClassAverages>,
    /// Re-evaluated `U_k` per channel (bits).
    pub channel_utilities: Vec<f64>,
    pub ues: Vec<UeMetrics>,
    pub diagnostics: Diagnostics,
}

/// Rates, lifetimes and expected data of every UE at the allocation's powers.
pub fn evaluate(allocation: &Allocation, gains: &GainTable, params: &GameParams) -> Result<MetricsRecord, GameError> {
    let mut ues = Vec::with_capacity(gains.num_cellular() + gains.num_d2d());
    let mut channel_utilities = Vec::with_capacity(allocation.num_channels());
    for (k, package) in allocation.packages.iter().enumerate() {
        let game = ChannelGame::for_channel(gains, k, package)?;
        let power = &allocation.equilibria[k].power;
        let mut channel_total = Vec::with_capacity(package.len() + 1);
        for i in 0..game.num_players() {
            let alpha = game::channel_quality(&game, i, power);
            let (class, index) = if i == 0 { (UeClass::Cellular, k) } else { (UeClass::D2d, package[i - 1]) };
            let rate_bps = game::rate(power[i], alpha, game.bandwidth());
            let expected_data_bits = game::utility(power[i], alpha, params, game.bandwidth());
            channel_total.push(expected_data_bits);
            ues.push(UeMetrics {
                class,
                index,
                channel: k,
                power_w: power[i],
                rate_bps,
                lifetime_h: game::lifetime_hours(power[i], params),
                expected_data_bits,
            });
        }
        channel_utilities.push(channel_total.iter().sum());
    }
    let sum = |f: fn(&UeMetrics) -> f64| pairwise_sum(&ues.iter().map(f).collect::<Vec<_>>());
    let sum_rate_bps = sum(|u| u.rate_bps);
    let system_tx_power_w = sum(|u| u.power_w);
    let system_total_power_w = system_tx_power_w + params.p0 * ues.len() as f64;
    let cellular =
        ClassAverages::of(ues.iter().filter(|u| u.class == UeClass::Cellular)).expect("at least one cellular UE");
    let d2d = ClassAverages::of(ues.iter().filter(|u| u.class == UeClass::D2d));

    let eqs = &allocation.equilibria;
    let mean_pg_iters = eqs.iter().map(|e| e.iterations as f64).sum::<f64>() / eqs.len() as f64;
    let flags: Vec<bool> = eqs.iter().filter_map(|e| e.uniqueness_condition_holds).collect();
    let uniqueness_rate = (!flags.is_empty()).then(|| flags.iter().filter(|&&f| f).count() as f64 / flags.len() as f64);
    Ok(MetricsRecord {
        sum_rate_bps,
        system_tx_power_w,
        system_total_power_w,
        cellular,
        d2d,
        channel_utilities,
        ues,
        diagnostics: Diagnostics {
            mean_pg_iters,
            eq_solves: allocation.solves,
            uniqueness_rate,
            nonconverged: allocation.nonconverged(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    NumD2d,
    /// Number of channels, equal to the number of cellular UEs.
    NumChannels,
    /// Maximum D2D distance as a fraction of the cell radius.
    MaxD2dDistanceRatio,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::NumD2d => "num_d2d",
            SweepParam::NumChannels => "num_channels",
            SweepParam::MaxD2dDistanceRatio => "max_d2d_distance_ratio",
        }
    }

    /// Current value of the parameter in `cell`.
    pub fn value_in(&self, cell: &CellConfig) -> f64 {
        match self {
            SweepParam::NumD2d => cell.num_d2d as f64,
            SweepParam::NumChannels => cell.num_cellular as f64,
            SweepParam::MaxD2dDistanceRatio => cell.max_d2d_distance / cell.cell_radius,
        }
    }

    pub fn apply(&self, cell: &CellConfig, value: f64) -> Result<CellConfig, SimError> {
        let count = || {
            if value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
                Ok(value as usize)
            } else {
                Err(SimError::InvalidSweep(format!("{} must be a whole number, got {value}", self.name())))
            }
        };
        let mut out = cell.clone();
        match self {
            SweepParam::NumD2d => out.num_d2d = count()?,
            SweepParam::NumChannels => out.num_cellular = count()?,
            SweepParam::MaxD2dDistanceRatio => {
                if !(value > 0.0 && value <= 1.0) {
                    return Err(SimError::InvalidSweep(format!(
                        "max_d2d_distance_ratio must lie in (0, 1], got {value}"
                    )));
                }
                out.max_d2d_distance = value * cell.cell_radius;
            }
        }
        out.validate()?;
        Ok(out)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub realizations: usize,
    /// Base system; `cell.rng_seed` seeds every realization.
    pub cell: CellConfig,
    pub game: GameParams,
    pub algorithms: Vec<Algorithm>,
    pub options: AlgorithmOptions,
}

impl SweepSpec {
    /// A single-point sweep over `cell` as given.
    pub fn single_point(cell: CellConfig, game: GameParams, realizations: usize) -> Self {
        let param = SweepParam::NumD2d;
        Self {
            values: vec![param.value_in(&cell)],
            param,
            realizations,
            cell,
            game,
            algorithms: Algorithm::ALL.to_vec(),
            options: AlgorithmOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.realizations == 0 {
            return Err(SimError::InvalidSweep("realizations must be at least 1".into()));
        }
        if self.values.is_empty() {
            return Err(SimError::InvalidSweep("no sweep values".into()));
        }
        if self.algorithms.is_empty() {
            return Err(SimError::InvalidSweep("no algorithms selected".into()));
        }
        self.cell.validate()?;
        self.game.validate()?;
        for &v in &self.values {
            self.param.apply(&self.cell, v)?;
        }
        for alg in &self.algorithms {
            if *alg == Algorithm::CaFixed {
                baselines::BaselineKind::CaFixedPower { fixed_power: self.options.fixed_power }.validate(&self.game)?;
            }
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one realization; shared by every algorithm at that point.
pub fn realization_seed(base_seed: u64, point: usize, realization: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base_seed) ^ point as u64) ^ realization as u64)
}

pub fn draw_realization(cell: &CellConfig, seed: u64) -> Result<GainTable, ChannelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topology = generate_topology(cell, &mut rng);
    compute_gains(&topology, cell, &mut rng)
}

/// Metrics of every algorithm (in `spec.algorithms` order) for each
/// realization of sweep point `point`.
pub fn simulate_point(spec: &SweepSpec, point: usize, exec: Execution) -> Result<Vec<Vec<MetricsRecord>>, SimError> {
    let cell = spec.param.apply(&spec.cell, spec.values[point])?;
    map_indexed(spec.realizations, exec, |r| {
        let gains = draw_realization(&cell, realization_seed(spec.cell.rng_seed, point, r))?;
        spec.algorithms
            .iter()
            .map(|&alg| {
                let alloc = run_algorithm(alg, &gains, &spec.game, &spec.options)?;
                Ok(evaluate(&alloc, &gains, &spec.game)?)
            })
            .collect::<Result<Vec<_>, SimError>>()
    })
    .into_iter()
    .collect()
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = pairwise_sum(samples) / n;
        let stderr = if samples.len() > 1 {
            let sq: Vec<f64> = samples.iter().map(|x| (x - mean).powi(2)).collect();
            (pairwise_sum(&sq) / (n - 1.0)).sqrt() / n.sqrt()
        } else {
            0.0
        };
        Self { mean, stderr }
    }

    fn optional(samples: &[Option<f64>]) -> Option<Self> {
        let values: Option<Vec<f64>> = samples.iter().copied().collect();
        values.filter(|v| !v.is_empty()).map(|v| Self::from_samples(&v))
    }
}

/// Averages for one `(parameter value, algorithm)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep_param: SweepParam,
    pub param_value: f64,
    pub algorithm: Algorithm,
    pub realizations: usize,
    pub sum_rate_bps: Estimate,
    pub system_tx_power_w: Estimate,
    pub system_total_power_w: Estimate,
    pub cell_expected_data_bits: Estimate,
    pub d2d_expected_data_bits: Option<Estimate>,
    pub cell_rate_bps: Estimate,
    pub d2d_rate_bps: Option<Estimate>,
    pub cell_lifetime_h: Estimate,
    pub d2d_lifetime_h: Option<Estimate>,
    pub mean_pg_iters: f64,
    /// Mean equilibrium solves per realization.
    pub eq_solves: f64,
    /// Non-converged channel games summed over realizations.
    pub nonconverged: usize,
    pub uniqueness_rate: Option<f64>,
}

impl SweepRow {
    pub fn aggregate(
        sweep_param: SweepParam,
        param_value: f64,
        algorithm: Algorithm,
        records: &[&MetricsRecord],
    ) -> Self {
        let col = |f: &dyn Fn(&MetricsRecord) -> f64| {
            Estimate::from_samples(&records.iter().map(|r| f(r)).collect::<Vec<_>>())
        };
        let d2d = |f: &dyn Fn(&ClassAverages) -> f64| {
            Estimate::optional(&records.iter().map(|r| r.d2d.as_ref().map(f)).collect::<Vec<_>>())
        };
        let uniq: Vec<f64> = records.iter().filter_map(|r| r.diagnostics.uniqueness_rate).collect();
        Self {
            sweep_param,
            param_value,
            algorithm,
            realizations: records.len(),
            sum_rate_bps: col(&|r| r.sum_rate_bps),
            system_tx_power_w: col(&|r| r.system_tx_power_w),
            system_total_power_w: col(&|r| r.system_total_power_w),
            cell_expected_data_bits: col(&|r| r.cellular.expected_data_bits),
            d2d_expected_data_bits: d2d(&|c| c.expected_data_bits),
            cell_rate_bps: col(&|r| r.cellular.rate_bps),
            d2d_rate_bps: d2d(&|c| c.rate_bps),
            cell_lifetime_h: col(&|r| r.cellular.lifetime_h),
            d2d_lifetime_h: d2d(&|c| c.lifetime_h),
            mean_pg_iters: col(&|r| r.diagnostics.mean_pg_iters).mean,
            eq_solves: col(&|r| r.diagnostics.eq_solves as f64).mean,
            nonconverged: records.iter().map(|r| r.diagnostics.nonconverged).sum(),
            uniqueness_rate: (!uniq.is_empty()).then(|| Estimate::from_samples(&uniq).mean),
        }
    }
}

/// Runs every point and algorithm of `spec`; rows sorted by
/// `(param_value, algorithm name)`.
pub fn run_sweep(spec: &SweepSpec, exec: Execution) -> Result<Vec<SweepRow>, SimError> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.values.len() * spec.algorithms.len());
    for (point, &value) in spec.values.iter().enumerate() {
        let records = simulate_point(spec, point, exec)?;
        for (a, &alg) in spec.algorithms.iter().enumerate() {
            let column: Vec<&MetricsRecord> = records.iter().map(|r| &r[a]).collect();
            rows.push(SweepRow::aggregate(spec.param, value, alg, &column));
        }
    }
    rows.sort_by(|x, y| x.param_value.total_cmp(&y.param_value).then(x.algorithm.name().cmp(y.algorithm.name())));
    Ok(rows)
}

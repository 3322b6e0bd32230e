//! Single-cell geometry and block-fading channel gains.
//!
//! The eNB sits at the origin. Cellular UEs and D2D transmitters are dropped
//! area-uniformly on the cell disc; each D2D receiver is dropped
//! area-uniformly on a disc of radius `max_d2d_distance` around its
//! transmitter and redrawn until it also lands inside the cell.
//!
//! Every link gain is `d^-2 * |h|^2` with `|h|^2 ~ Exp(1)` (Rayleigh fading,
//! `h ~ CN(0, 1)`), drawn once per realization.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Links shorter than this are evaluated at this distance (m).
pub const MIN_LINK_DISTANCE: f64 = 1.0;

/// Converts a power level in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Converts a power level in watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Thermal noise power (W) over `bandwidth` Hz for a density given in dBm/Hz.
pub fn noise_power(noise_psd_dbm_hz: f64, bandwidth: f64) -> f64 {
    dbm_to_watts(noise_psd_dbm_hz) * bandwidth
}

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("invalid cell configuration: {0}")]
    InvalidConfig(String),
    #[error("co-located transmitter and receiver on link {link}")]
    DegenerateLink { link: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellConfig {
    /// Cell radius (m).
    pub cell_radius: f64,
    /// Number of cellular UEs, one per orthogonal uplink channel.
    pub num_cellular: usize,
    pub num_d2d: usize,
    /// Maximum transmitter-receiver separation of a D2D pair (m).
    pub max_d2d_distance: f64,
    /// Channel bandwidth (Hz).
    pub bandwidth: f64,
    /// Thermal noise density (dBm/Hz).
    pub noise_psd: f64,
    pub rng_seed: u64,
}

impl Default for CellConfig {
    fn default() -> Self {
        Self {
            cell_radius: 350.0,
            num_cellular: 30,
            num_d2d: 6,
            max_d2d_distance: 35.0,
            bandwidth: 180e3,
            noise_psd: -174.0,
            rng_seed: 1,
        }
    }
}

impl CellConfig {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let fail = |msg: &str| Err(ChannelError::InvalidConfig(msg.to_string()));
        if !(self.cell_radius > 0.0 && self.cell_radius.is_finite()) {
            return fail("cell_radius must be positive");
        }
        if self.num_cellular == 0 {
            return fail("num_cellular must be at least 1");
        }
        if !(self.max_d2d_distance > 0.0 && self.max_d2d_distance <= 2.0 * self.cell_radius) {
            return fail("max_d2d_distance must lie in (0, 2 * cell_radius]");
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return fail("bandwidth must be positive");
        }
        if !self.noise_psd.is_finite() {
            return fail("noise_psd must be finite");
        }
        Ok(())
    }

    pub fn noise_power(&self) -> f64 {
        noise_power(self.noise_psd, self.bandwidth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Draws a point area-uniformly on the disc of `radius` around `center`.
pub fn uniform_in_disc<R: Rng + ?Sized>(rng: &mut R, center: Point, radius: f64) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    Point::new(center.x + r * theta.cos(), center.y + r * theta.sin())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub enb_position: Point,
    pub cellular_positions: Vec<Point>,
    pub d2d_tx_positions: Vec<Point>,
    pub d2d_rx_positions: Vec<Point>,
}

impl Topology {
    pub fn num_cellular(&self) -> usize {
        self.cellular_positions.len()
    }

    pub fn num_d2d(&self) -> usize {
        self.d2d_tx_positions.len()
    }

    pub fn pair_distance(&self, d: usize) -> f64 {
        self.d2d_tx_positions[d].distance(&self.d2d_rx_positions[d])
    }
}

pub fn generate_topology<R: Rng + ?Sized>(config: &CellConfig, rng: &mut R) -> Topology {
    let radius = config.cell_radius;
    let cellular_positions = (0..config.num_cellular).map(|_| uniform_in_disc(rng, Point::ORIGIN, radius)).collect();
    let d2d_tx_positions: Vec<Point> =
        (0..config.num_d2d).map(|_| uniform_in_disc(rng, Point::ORIGIN, radius)).collect();
    let d2d_rx_positions = d2d_tx_positions
        .iter()
        .map(|&tx| loop {
            let rx = uniform_in_disc(rng, tx, config.max_d2d_distance);
            if rx.norm() <= radius {
                break rx;
            }
        })
        .collect();
    Topology { enb_position: Point::ORIGIN, cellular_positions, d2d_tx_positions, d2d_rx_positions }
}

/// All power gains of one fading realization.
///
/// `g_cross[j][d]` is the gain from D2D transmitter `j` to D2D receiver `d`;
/// the diagonal repeats `g_dd`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainTable {
    /// Cellular UE k to eNB.
    pub g_ke: Vec<f64>,
    /// D2D transmitter d to eNB.
    pub g_de: Vec<f64>,
    /// Cellular UE k to D2D receiver d, indexed `[k][d]`.
    pub g_kd: Vec<Vec<f64>>,
    /// D2D transmitter d to its own receiver.
    pub g_dd: Vec<f64>,
    pub g_cross: Vec<Vec<f64>>,
    /// Noise power (W).
    pub sigma2: f64,
    /// Channel bandwidth (Hz).
    pub bandwidth: f64,
}

impl GainTable {
    pub fn num_cellular(&self) -> usize {
        self.g_ke.len()
    }

    pub fn num_d2d(&self) -> usize {
        self.g_dd.len()
    }

    /// Cellular uplink SNR of channel `k` at transmit power `power`.
    pub fn cellular_snr(&self, k: usize, power: f64) -> f64 {
        power * self.g_ke[k] / self.sigma2
    }
}

/// Free-space gain with unit-mean fading power `fading`.
pub fn link_gain(distance: f64, fading: f64) -> f64 {
    let d = distance.max(MIN_LINK_DISTANCE);
    fading / (d * d)
}

fn draw_gain<R: Rng + ?Sized>(
    rng: &mut R,
    from: &Point,
    to: &Point,
    link: impl FnOnce() -> String,
) -> Result<f64, ChannelError> {
    let distance = from.distance(to);
    if distance == 0.0 {
        return Err(ChannelError::DegenerateLink { link: link() });
    }
    let fading: f64 = rng.sample(Exp1);
    Ok(link_gain(distance, fading))
}

/// Draws one block-fading realization over `topology`.
///
/// Links are drawn in a fixed order (cellular-eNB, D2D-eNB, cellular-D2D,
/// D2D-D2D) so the table is a pure function of the random stream.
pub fn compute_gains<R: Rng + ?Sized>(
    topology: &Topology,
    config: &CellConfig,
    rng: &mut R,
) -> Result<GainTable, ChannelError> {
    let enb = topology.enb_position;
    let g_ke = topology
        .cellular_positions
        .iter()
        .enumerate()
        .map(|(k, p)| draw_gain(rng, p, &enb, || format!("cellular {k} -> eNB")))
        .collect::<Result<Vec<_>, _>>()?;
    let g_de = topology
        .d2d_tx_positions
        .iter()
        .enumerate()
        .map(|(d, p)| draw_gain(rng, p, &enb, || format!("d2d tx {d} -> eNB")))
        .collect::<Result<Vec<_>, _>>()?;
    let mut g_kd = Vec::with_capacity(topology.num_cellular());
    for (k, cue) in topology.cellular_positions.iter().enumerate() {
        let row = topology
            .d2d_rx_positions
            .iter()
            .enumerate()
            .map(|(d, rx)| draw_gain(rng, cue, rx, || format!("cellular {k} -> d2d rx {d}")))
            .collect::<Result<Vec<_>, _>>()?;
        g_kd.push(row);
    }
    let mut g_cross = Vec::with_capacity(topology.num_d2d());
    for (j, tx) in topology.d2d_tx_positions.iter().enumerate() {
        let row = topology
            .d2d_rx_positions
            .iter()
            .enumerate()
            .map(|(d, rx)| draw_gain(rng, tx, rx, || format!("d2d tx {j} -> d2d rx {d}")))
            .collect::<Result<Vec<_>, _>>()?;
        g_cross.push(row);
    }
    let g_dd = (0..topology.num_d2d()).map(|d| g_cross[d][d]).collect();
    Ok(GainTable { g_ke, g_de, g_kd, g_dd, g_cross, sigma2: config.noise_power(), bandwidth: config.bandwidth })
}

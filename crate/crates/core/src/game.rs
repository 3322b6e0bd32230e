//! Non-cooperative power control among the UEs sharing one uplink channel.
//!
//! Each player maximizes its expected data over battery lifetime,
//! `u_i = r_i * l_i`, where `r_i = B log2(1 + p_i alpha_i)` and the Peukert
//! lifetime is `l_i = C V0^a / (p_i + p0)^a`. For fixed interference the
//! utility is unimodal in `p_i`: its derivative has the sign of
//!
//! ```text
//! f_i(p) = (p + p0) alpha / (1 + p alpha) - a ln(1 + p alpha)
//! ```
//!
//! which starts at `p0 alpha > 0` and decreases strictly, so the best
//! response is `min(root of f_i, p_bar)`. The equilibrium is reached by
//! synchronous best-response sweeps from the all-zero power vector.

use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::GainTable;

/// Equilibrium powers below this are reported as exactly zero (W).
pub const POWER_REPORT_FLOOR: f64 = 1e-12;

const MAX_BRACKET_DOUBLINGS: usize = 1100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("invalid game parameters: {0}")]
    InvalidParams(String),
    #[error("invalid channel game: {0}")]
    InvalidGame(String),
    #[error("root of the first-order condition not found (alpha = {alpha})")]
    RootNotFound { alpha: f64 },
}

/// Battery, circuit and power-limit constants shared by every player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    /// Circuit power (W).
    pub p0: f64,
    /// Maximum transmit power (W).
    pub p_bar: f64,
    /// Peukert exponent.
    pub a: f64,
    /// Battery capacity (A h).
    pub capacity: f64,
    /// Operating voltage (V).
    pub voltage: f64,
    /// Convergence tolerance on the power iterates (W).
    pub epsilon: f64,
    pub max_iters: usize,
}

impl Default for GameParams {
    fn default() -> Self {
        Self { p0: 0.05, p_bar: 0.2, a: 1.3, capacity: 0.8, voltage: 4.0, epsilon: 1e-3, max_iters: 1000 }
    }
}

impl GameParams {
    pub fn validate(&self) -> Result<(), GameError> {
        let positive = [
            ("p0", self.p0),
            ("p_bar", self.p_bar),
            ("capacity", self.capacity),
            ("voltage", self.voltage),
            ("epsilon", self.epsilon),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(GameError::InvalidParams(format!("{name} must be positive")));
            }
        }
        if !(self.a > 1.0 && self.a.is_finite()) {
            return Err(GameError::InvalidParams("a must exceed 1".into()));
        }
        if self.max_iters == 0 {
            return Err(GameError::InvalidParams("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// Transmit powers of the players of one channel game (W).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PowerVector(Vec<f64>);

impl PowerVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl From<Vec<f64>> for PowerVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl Deref for PowerVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// The players sharing one channel.
///
/// Player 0 is the cellular UE (its receiver is the eNB); players `1..N` are
/// the D2D pairs of the package.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGame {
    direct_gain: Vec<f64>,
    /// `cross_gain[j][i]`: transmitter `j` to the receiver of player `i`.
    cross_gain: Vec<Vec<f64>>,
    sigma2: f64,
    bandwidth: f64,
}

impl ChannelGame {
    pub fn new(
        direct_gain: Vec<f64>,
        cross_gain: Vec<Vec<f64>>,
        sigma2: f64,
        bandwidth: f64,
    ) -> Result<Self, GameError> {
        let n = direct_gain.len();
        if n == 0 {
            return Err(GameError::InvalidGame("a game needs at least one player".into()));
        }
        if cross_gain.len() != n || cross_gain.iter().any(|row| row.len() != n) {
            return Err(GameError::InvalidGame("cross gain matrix must be N x N".into()));
        }
        if direct_gain.iter().any(|&g| !(g > 0.0 && g.is_finite())) {
            return Err(GameError::InvalidGame("direct gains must be positive".into()));
        }
        let off_diagonal_ok = cross_gain
            .iter()
            .enumerate()
            .all(|(j, row)| row.iter().enumerate().all(|(i, &g)| i == j || (g > 0.0 && g.is_finite())));
        if !off_diagonal_ok {
            return Err(GameError::InvalidGame("cross gains must be positive".into()));
        }
        if !(sigma2 > 0.0 && bandwidth > 0.0) {
            return Err(GameError::InvalidGame("noise and bandwidth must be positive".into()));
        }
        Ok(Self { direct_gain, cross_gain, sigma2, bandwidth })
    }

    /// Game of cellular UE `k` with the D2D pairs of `package` (in the given order).
    pub fn for_channel(gains: &GainTable, k: usize, package: &[usize]) -> Result<Self, GameError> {
        let n = package.len() + 1;
        let mut direct = Vec::with_capacity(n);
        direct.push(gains.g_ke[k]);
        direct.extend(package.iter().map(|&d| gains.g_dd[d]));
        let mut cross = vec![vec![0.0; n]; n];
        for (j, row) in cross.iter_mut().enumerate() {
            for (i, g) in row.iter_mut().enumerate() {
                *g = match (j, i) {
                    (j, i) if j == i => direct[i],
                    (0, i) => gains.g_kd[k][package[i - 1]],
                    (j, 0) => gains.g_de[package[j - 1]],
                    (j, i) => gains.g_cross[package[j - 1]][package[i - 1]],
                };
            }
        }
        Self::new(direct, cross, gains.sigma2, gains.bandwidth)
    }

    pub fn num_players(&self) -> usize {
        self.direct_gain.len()
    }

    pub fn direct_gain(&self, i: usize) -> f64 {
        self.direct_gain[i]
    }

    pub fn cross_gain(&self, from: usize, to: usize) -> f64 {
        self.cross_gain[from][to]
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Interference received by player `i`; `power[i]` is ignored.
    pub fn interference(&self, i: usize, power: &[f64]) -> f64 {
        power.iter().enumerate().filter(|&(j, _)| j != i).map(|(j, &p)| p * self.cross_gain[j][i]).sum()
    }
}

/// Effective channel quality `g_ii / (I_i + sigma2)` (1/W).
pub fn channel_quality(game: &ChannelGame, i: usize, power: &[f64]) -> f64 {
    game.direct_gain[i] / (game.interference(i, power) + game.sigma2)
}

/// Shannon rate (bit/s).
pub fn rate(power: f64, alpha: f64, bandwidth: f64) -> f64 {
    bandwidth * (power * alpha).ln_1p() / std::f64::consts::LN_2
}

/// Peukert battery lifetime (h).
pub fn lifetime_hours(power: f64, params: &GameParams) -> f64 {
    params.capacity * (params.voltage / (power + params.p0)).powf(params.a)
}

/// Peukert battery lifetime (s).
pub fn lifetime(power: f64, params: &GameParams) -> f64 {
    3600.0 * lifetime_hours(power, params)
}

/// Expected data over the battery lifetime (bits).
pub fn utility(power: f64, alpha: f64, params: &GameParams, bandwidth: f64) -> f64 {
    rate(power, alpha, bandwidth) * lifetime(power, params)
}

/// Scaled derivative of the utility; same sign as `du/dp`.
pub fn f_value(power: f64, alpha: f64, params: &GameParams) -> f64 {
    // (p + p0) alpha / (1 + p alpha) rewritten to stay finite for huge alpha.
    (power + params.p0) / (power + alpha.recip()) - params.a * (power * alpha).ln_1p()
}

/// `((1 + x) ln(1 + x) - x) / x`, accurate down to `x = 0`.
fn log_gain_excess(x: f64) -> f64 {
    if x < 0.25 {
        // x/2 - x^2/6 + x^3/12 - ... = sum over n >= 2 of (-x)^n / (x n (n - 1)).
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 2..60 {
            let n = n as f64;
            let add = term * x / (n * (n - 1.0));
            sum += add;
            if add.abs() <= sum.abs() * 1e-18 {
                break;
            }
            term *= -x;
        }
        sum
    } else {
        ((1.0 + x) * x.ln_1p() - x) / x
    }
}

/// Whether the utility is still increasing at `p > 0`; the sign of
/// [`f_value`], evaluated without cancellation when `p * alpha` is small.
fn utility_rising(p: f64, alpha: f64, params: &GameParams) -> bool {
    params.p0 / p - (params.a - 1.0) > params.a * log_gain_excess(p * alpha)
}

/// Unconstrained utility maximizer: the unique positive root of [`f_value`].
///
/// For `a > 1` the root lies below `p0 / (a - 1)` whatever `alpha`, so the
/// bracket is fixed and bisection (over the bit patterns, down to adjacent
/// floats) visits the same midpoints for every `alpha`. That keeps the
/// computed root non-increasing in `alpha`, as it is mathematically.
pub fn unconstrained_optimum(alpha: f64, params: &GameParams) -> Result<f64, GameError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(GameError::RootNotFound { alpha });
    }
    let rising = |p: f64| utility_rising(p, alpha, params);
    let mut lo = 0.0f64;
    let mut hi = if params.a > 1.0 { params.p0 / (params.a - 1.0) } else { params.p_bar };
    let mut doublings = 0;
    while rising(hi) {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS || !hi.is_finite() {
            return Err(GameError::RootNotFound { alpha });
        }
    }
    let (mut lo_bits, mut hi_bits) = (lo.to_bits(), hi.to_bits());
    while hi_bits - lo_bits > 1 {
        let mid_bits = lo_bits + (hi_bits - lo_bits) / 2;
        if rising(f64::from_bits(mid_bits)) {
            lo_bits = mid_bits;
        } else {
            hi_bits = mid_bits;
        }
    }
    Ok(f64::from_bits(lo_bits))
}

/// `min(p~, p_bar)` for a player facing channel quality `alpha`.
pub fn best_response_for_quality(alpha: f64, params: &GameParams) -> Result<f64, GameError> {
    Ok(unconstrained_optimum(alpha, params)?.min(params.p_bar))
}

pub fn best_response(game: &ChannelGame, i: usize, power: &[f64], params: &GameParams) -> Result<f64, GameError> {
    best_response_for_quality(channel_quality(game, i, power), params)
}

/// Outcome of the power control game on one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub power: PowerVector,
    /// Expected data of each player at `power` (bits).
    pub utilities: Vec<f64>,
    /// Best-response sweeps performed.
    pub iterations: usize,
    pub converged: bool,
    /// Sufficient uniqueness condition evaluated at the final point; `None`
    /// when no game was played (fixed power) or the iteration did not converge.
    pub uniqueness_condition_holds: Option<bool>,
}

impl EquilibriumResult {
    pub fn total_utility(&self) -> f64 {
        self.utilities.iter().sum()
    }

    /// Utilities of `game` evaluated at an arbitrary power vector.
    pub fn evaluate_at(game: &ChannelGame, power: Vec<f64>, params: &GameParams) -> EquilibriumResult {
        let utilities = (0..game.num_players())
            .map(|i| utility(power[i], channel_quality(game, i, &power), params, game.bandwidth))
            .collect();
        EquilibriumResult {
            power: power.into(),
            utilities,
            iterations: 0,
            converged: true,
            uniqueness_condition_holds: None,
        }
    }
}

fn sweep(game: &ChannelGame, power: &[f64], params: &GameParams) -> Result<Vec<f64>, GameError> {
    (0..game.num_players()).map(|i| best_response(game, i, power, params)).collect()
}

fn iterate(
    game: &ChannelGame,
    params: &GameParams,
    mut on_step: impl FnMut(&[f64]),
) -> Result<EquilibriumResult, GameError> {
    let n = game.num_players();
    let mut power = vec![0.0; n];
    on_step(&power);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iters {
        let next = sweep(game, &power, params)?;
        iterations += 1;
        let change = next.iter().zip(&power).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        power = next;
        on_step(&power);
        if change < params.epsilon {
            converged = true;
            break;
        }
    }
    for p in power.iter_mut() {
        if *p < POWER_REPORT_FLOOR {
            *p = 0.0;
        }
    }
    let mut result = EquilibriumResult::evaluate_at(game, power, params);
    result.iterations = iterations;
    result.converged = converged;
    if converged {
        result.uniqueness_condition_holds = Some(uniqueness_check(&result, game, params)?);
    }
    Ok(result)
}

/// Synchronous best-response iteration from `p = 0` until every component
/// moves by less than `epsilon`, or `max_iters` sweeps (flagged non-converged).
pub fn solve_equilibrium(game: &ChannelGame, params: &GameParams) -> Result<EquilibriumResult, GameError> {
    iterate(game, params, |_| {})
}

/// Like [`solve_equilibrium`], also returning every iterate starting with `p = 0`.
pub fn solve_equilibrium_traced(
    game: &ChannelGame,
    params: &GameParams,
) -> Result<(EquilibriumResult, Vec<PowerVector>), GameError> {
    let mut trace = Vec::new();
    let result = iterate(game, params, |p| trace.push(PowerVector::from(p.to_vec())))?;
    Ok((result, trace))
}

/// Sufficient condition for a unique equilibrium, checked at `result.power`:
/// `p0 p~_i + (I_i - sigma2) / g_ii > 0` for every player.
pub fn uniqueness_check(
    result: &EquilibriumResult,
    game: &ChannelGame,
    params: &GameParams,
) -> Result<bool, GameError> {
    let power = &result.power;
    for i in 0..game.num_players() {
        let interference = game.interference(i, power);
        let optimum = unconstrained_optimum(channel_quality(game, i, power), params)?;
        if params.p0 * optimum + (interference - game.sigma2) / game.direct_gain[i] <= 0.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solo(g: f64, sigma2: f64) -> ChannelGame {
        ChannelGame::new(vec![g], vec![vec![g]], sigma2, 180e3).unwrap()
    }

    fn two_player(g: [f64; 2], cross: [f64; 2], sigma2: f64) -> ChannelGame {
        ChannelGame::new(g.to_vec(), vec![vec![g[0], cross[0]], vec![cross[1], g[1]]], sigma2, 180e3).unwrap()
    }

    #[test]
    fn quality_without_interference() {
        let game = solo(1e-4, 1e-15);
        assert!((channel_quality(&game, 0, &[0.0]) - 1e11).abs() < 1.0);
    }

    #[test]
    fn quality_with_one_interferer() {
        let game = two_player([1e-4, 1e-4], [1e-8, 1e-8], 1e-15);
        let alpha = channel_quality(&game, 0, &[0.0, 0.1]);
        // 1e-4 / (0.1 * 1e-8 + 1e-15)
        assert!((alpha - 99_999.900_000_1).abs() < 1e-6, "{alpha}");
        let doubled = channel_quality(&game, 0, &[0.0, 0.2]);
        assert!(doubled < alpha);
        // own power does not matter
        assert_eq!(channel_quality(&game, 0, &[0.7, 0.1]), alpha);
    }

    #[test]
    fn rate_values() {
        assert_eq!(rate(0.0, 1e9, 180e3), 0.0);
        assert!((rate(1.0, 1.0, 180e3) - 1.8e5).abs() < 1e-9);
        assert!((rate(0.1, 30.0, 180e3) - 3.6e5).abs() < 1e-8);
    }

    #[test]
    fn lifetime_values() {
        let params = GameParams::default();
        // I = 0.2 W / 4 V = 0.05 A; 0.8 / 0.05^1.3 h
        let hours = lifetime_hours(0.15, &params);
        assert!((hours - 39.303_296_835_7).abs() < 1e-9, "{hours}");
        assert!((lifetime(0.15, &params) - 3600.0 * hours).abs() < 1e-6);

        let linear = GameParams { a: 1.0, ..params.clone() };
        let draw = linear.voltage * linear.capacity / 3600.0;
        let secs = lifetime(draw - linear.p0, &linear);
        assert!((secs - 3600.0 * 3600.0).abs() / secs < 1e-9, "{secs}");

        assert!(lifetime(0.01, &params) > lifetime(0.02, &params));
    }

    #[test]
    fn utility_is_rate_times_lifetime() {
        let params = GameParams::default();
        assert_eq!(utility(0.0, 1e5, &params, 180e3), 0.0);
        let (p, alpha): (f64, f64) = (0.03, 4.2e4);
        let direct = 180e3 * (1.0 + p * alpha).log2() * 3600.0 * 0.8 * (4.0f64 / (p + 0.05)).powf(1.3);
        assert!((utility(p, alpha, &params, 180e3) - direct).abs() / direct < 1e-12);
    }

    #[test]
    fn f_brackets_known_root() {
        let params = GameParams::default();
        assert!((f_value(0.0, 10.0, &params) - 0.5).abs() < 1e-15);
        assert!(f_value(0.1, 10.0, &params) < 0.0);
        assert!(f_value(0.05, 10.0, &params) > 0.0);
        let huge = 1e12;
        assert!((f_value(0.0, huge, &params) - 0.05 * huge).abs() / (0.05 * huge) < 1e-12);
    }

    #[test]
    fn f_decreasing_on_grid() {
        let params = GameParams::default();
        for alpha in [1.0, 10.0, 1e4, 1e8, 1e11] {
            let mut prev = f_value(0.0, alpha, &params);
            for n in 1..=10_000 {
                let v = f_value(n as f64 * 1e-4, alpha, &params);
                assert!(v < prev, "alpha {alpha} step {n}");
                prev = v;
            }
        }
    }

    #[test]
    fn known_interior_root() {
        // bisection on f to 1e-12 gives 0.0727306054...
        let params = GameParams::default();
        let root = unconstrained_optimum(10.0, &params).unwrap();
        assert!((root - 0.072_730_605_4).abs() < 1e-9, "{root}");
        assert!(f_value(root, 10.0, &params).abs() < 1e-9);
        let capped = GameParams { p_bar: 0.05, ..params };
        assert_eq!(best_response_for_quality(10.0, &capped).unwrap(), 0.05);
    }

    #[test]
    fn log_gain_excess_series_matches_closed_form() {
        for &x in &[1e-3, 0.05, 0.2, 0.2499, 0.25, 0.3] {
            let closed = ((1.0 + x) * f64::ln_1p(x) - x) / x;
            let tol = if x < 0.01 { 1e-10 } else { 1e-13 };
            assert!((log_gain_excess(x) - closed).abs() <= tol * closed, "x = {x}");
        }
        assert_eq!(log_gain_excess(0.0), 0.0);
        assert!((log_gain_excess(1e-12) - 0.5e-12).abs() < 1e-24);
    }

    #[test]
    fn root_is_non_increasing_in_quality() {
        let params = GameParams::default();
        let mut previous = f64::INFINITY;
        let mut alpha = 1e-6;
        while alpha < 1e14 {
            let root = unconstrained_optimum(alpha, &params).unwrap();
            assert!(root <= previous, "alpha = {alpha}");
            previous = root;
            alpha *= 1.0 + 1e-3;
        }
        // Neighbouring floats in the flat small-quality region.
        let base = 1e-9f64;
        let mut previous = unconstrained_optimum(base, &params).unwrap();
        let mut bits = base.to_bits();
        for _ in 0..10_000 {
            bits += 1;
            let root = unconstrained_optimum(f64::from_bits(bits), &params).unwrap();
            assert!(root <= previous);
            previous = root;
        }
    }

    #[test]
    fn root_above_p_bar_is_bracketed() {
        // the root (0.0727 W) lies beyond p_bar, so the bracket must grow
        let params = GameParams { p_bar: 0.02, ..Default::default() };
        let root = unconstrained_optimum(10.0, &params).unwrap();
        assert!((root - 0.072_730_605_4).abs() < 1e-9);
        assert!(f_value(root, 10.0, &params).abs() < 1e-9);
        assert_eq!(best_response_for_quality(10.0, &params).unwrap(), params.p_bar);
        // tiny alpha: root tends to p0 / (a - 1)
        let far = unconstrained_optimum(1e-6, &GameParams::default()).unwrap();
        assert!((far - 0.05 / 0.3).abs() < 1e-4, "{far}");
    }

    #[test]
    fn invalid_quality_is_an_error() {
        let params = GameParams::default();
        assert!(unconstrained_optimum(0.0, &params).is_err());
        assert!(unconstrained_optimum(f64::NAN, &params).is_err());
    }

    #[test]
    fn solo_player_converges_in_two_sweeps() {
        let params = GameParams::default();
        let game = solo(2e-5, 7.2e-16);
        let eq = solve_equilibrium(&game, &params).unwrap();
        let br = best_response(&game, 0, &[0.0], &params).unwrap();
        assert!(eq.converged);
        assert_eq!(eq.iterations, 2);
        assert_eq!(eq.power[0], br);
        assert_eq!(eq.uniqueness_condition_holds, Some(true));
    }

    #[test]
    fn max_iters_exhaustion_is_flagged() {
        let params = GameParams { max_iters: 1, ..Default::default() };
        let game = two_player([1e-4, 1e-3], [1e-6, 1e-6], 1e-15);
        let eq = solve_equilibrium(&game, &params).unwrap();
        assert!(!eq.converged);
        assert_eq!(eq.iterations, 1);
        assert_eq!(eq.uniqueness_condition_holds, None);
    }

    #[test]
    fn trace_starts_at_zero_and_rises() {
        let params = GameParams { epsilon: 1e-9, ..Default::default() };
        let game = two_player([1e-4, 1e-3], [1e-6, 2e-6], 1e-15);
        let (eq, trace) = solve_equilibrium_traced(&game, &params).unwrap();
        assert_eq!(trace.len(), eq.iterations + 1);
        assert!(trace[0].iter().all(|&p| p == 0.0));
        for w in trace.windows(2) {
            assert!(w[1].iter().zip(w[0].iter()).all(|(a, b)| a >= b));
        }
    }

    #[test]
    fn uniqueness_condition_solo_specialization() {
        // With I = 0 the condition reads p0 p~ > sigma2 / g.
        let params = GameParams::default();
        let game = solo(1e-12, 1e-9);
        let eq = solve_equilibrium(&game, &params).unwrap();
        let alpha = channel_quality(&game, 0, &eq.power);
        let root = unconstrained_optimum(alpha, &params).unwrap();
        let expected = params.p0 * root > game.sigma2() / game.direct_gain(0);
        assert_eq!(uniqueness_check(&eq, &game, &params).unwrap(), expected);
        assert!(!expected);
    }

    #[test]
    fn game_validation() {
        assert!(ChannelGame::new(vec![], vec![], 1e-15, 1.0).is_err());
        assert!(ChannelGame::new(vec![1.0], vec![vec![1.0, 2.0]], 1e-15, 1.0).is_err());
        assert!(ChannelGame::new(vec![-1.0], vec![vec![1.0]], 1e-15, 1.0).is_err());
        assert!(ChannelGame::new(vec![1.0, 1.0], vec![vec![1.0, 0.0], vec![1.0, 1.0]], 1e-15, 1.0).is_err());
        assert!(GameParams { a: 1.0, ..Default::default() }.validate().is_err());
        assert!(GameParams { epsilon: 0.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn for_channel_maps_gains() {
        let gains = GainTable {
            g_ke: vec![1.0, 2.0],
            g_de: vec![3.0, 4.0, 5.0],
            g_kd: vec![vec![6.0, 7.0, 8.0], vec![9.0, 10.0, 11.0]],
            g_dd: vec![12.0, 13.0, 14.0],
            g_cross: vec![vec![12.0, 15.0, 16.0], vec![17.0, 13.0, 18.0], vec![19.0, 20.0, 14.0]],
            sigma2: 1e-15,
            bandwidth: 180e3,
        };
        let game = ChannelGame::for_channel(&gains, 1, &[0, 2]).unwrap();
        assert_eq!(game.num_players(), 3);
        assert_eq!(game.direct_gain(0), 2.0);
        assert_eq!(game.direct_gain(2), 14.0);
        assert_eq!(game.cross_gain(0, 1), 9.0); // cellular 1 -> rx 0
        assert_eq!(game.cross_gain(2, 0), 5.0); // d2d 2 -> eNB
        assert_eq!(game.cross_gain(1, 2), 16.0); // d2d 0 -> rx 2
        assert_eq!(game.cross_gain(2, 1), 19.0); // d2d 2 -> rx 0
    }
}

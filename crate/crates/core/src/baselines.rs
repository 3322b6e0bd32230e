//! Comparison allocators: the SNR-ordered greedy heuristic (with the power
//! game played on every channel it touches) and the auction run at a fixed
//! transmit power.

use serde::{Deserialize, Serialize};

use crate::auction::{Allocation, Auction, EquilibriumValuator, FixedPowerValuator, Valuator};
use crate::channel::GainTable;
use crate::game::{GameError, GameParams};

pub const DEFAULT_FIXED_POWER: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum BaselineKind {
    GreedyHeuristic,
    CaFixedPower { fixed_power: f64 },
}

impl BaselineKind {
    pub fn validate(&self, params: &GameParams) -> Result<(), GameError> {
        match *self {
            BaselineKind::GreedyHeuristic => Ok(()),
            BaselineKind::CaFixedPower { fixed_power } => {
                if fixed_power > 0.0 && fixed_power <= params.p_bar {
                    Ok(())
                } else {
                    Err(GameError::InvalidParams(format!("fixed_power {fixed_power} outside (0, p_bar]")))
                }
            }
        }
    }
}

/// Gain the greedy heuristic minimizes when choosing a pair for a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyGain {
    /// D2D transmitter to eNB (interference caused to the cellular uplink).
    #[default]
    ToEnb,
    /// D2D transmitter to its own receiver.
    IntraPair,
}

/// Channels in decreasing cellular SNR at `p_bar`, ties to the lower index.
pub fn snr_order(gains: &GainTable, params: &GameParams) -> Vec<usize> {
    let mut order: Vec<usize> = (0..gains.num_cellular()).collect();
    order.sort_by(|&a, &b| {
        gains.cellular_snr(b, params.p_bar).total_cmp(&gains.cellular_snr(a, params.p_bar)).then(a.cmp(&b))
    });
    order
}

/// Greedy heuristic: walk the SNR queue (refilling it in the same order when
/// it runs dry) and give each dequeued channel the unallocated pair with the
/// smallest `gain`, re-solving that channel's power game after each placement.
pub fn greedy_allocate_with(gains: &GainTable, params: &GameParams, gain: GreedyGain) -> Result<Allocation, GameError> {
    let auction = Auction::new(gains, EquilibriumValuator { params });
    let mut state = auction.empty_allocation()?;
    let key = |d: usize| match gain {
        GreedyGain::ToEnb => gains.g_de[d],
        GreedyGain::IntraPair => gains.g_dd[d],
    };
    let mut pending: Vec<usize> = (0..gains.num_d2d()).collect();
    pending.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));
    let queue = snr_order(gains, params);
    for (d, &k) in pending.into_iter().zip(queue.iter().cycle()) {
        let mut package = state.packages[k].clone();
        package.push(d);
        package.sort_unstable();
        let outcome = auction.value(k, &package)?;
        state.packages[k] = package;
        state.utilities[k] = outcome.total_utility();
        state.equilibria[k] = outcome;
    }
    state.solves = auction.solves();
    Ok(state)
}

pub fn greedy_allocate(gains: &GainTable, params: &GameParams) -> Result<Allocation, GameError> {
    greedy_allocate_with(gains, params, GreedyGain::ToEnb)
}

/// The auction with the power game replaced by a constant transmit power.
pub fn ca_fixed_power_allocate(
    gains: &GainTable,
    params: &GameParams,
    fixed_power: f64,
) -> Result<Allocation, GameError> {
    BaselineKind::CaFixedPower { fixed_power }.validate(params)?;
    let valuator = FixedPowerValuator { params, power: fixed_power };
    allocate_with(gains, valuator)
}

fn allocate_with<V: Valuator>(gains: &GainTable, valuator: V) -> Result<Allocation, GameError> {
    Auction::new(gains, valuator).allocate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{compute_gains, generate_topology, CellConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_gains(k: usize, d: usize, seed: u64) -> GainTable {
        let config = CellConfig { num_cellular: k, num_d2d: d, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let topo = generate_topology(&config, &mut rng);
        compute_gains(&topo, &config, &mut rng).unwrap()
    }

    /// Hand-built table: three channels, five pairs.
    fn toy_gains() -> GainTable {
        let d = 5;
        GainTable {
            // SNR order: channel 1, channel 2, channel 0
            g_ke: vec![1e-6, 5e-5, 2e-5],
            // ascending g_de: pair 3, 0, 4, 1, 2
            g_de: vec![2e-7, 4e-7, 5e-7, 1e-7, 3e-7],
            g_kd: vec![vec![1e-6; d]; 3],
            g_dd: vec![1e-3; d],
            g_cross: (0..d).map(|j| (0..d).map(|i| if i == j { 1e-3 } else { 1e-7 }).collect()).collect(),
            sigma2: 7e-16,
            bandwidth: 180e3,
        }
    }

    #[test]
    fn queue_trace_with_wraparound() {
        let params = GameParams::default();
        let alloc = greedy_allocate(&toy_gains(), &params).unwrap();
        // pair 3 -> ch 1, pair 0 -> ch 2, pair 4 -> ch 0, then refill:
        // pair 1 -> ch 1, pair 2 -> ch 2
        assert_eq!(alloc.packages, vec![vec![4], vec![1, 3], vec![0, 2]]);
        assert_eq!(alloc.solves, 3 + 5);
        assert!(alloc.is_partition(5));
    }

    #[test]
    fn intra_pair_gain_switch() {
        let params = GameParams::default();
        let mut g = toy_gains();
        g.g_dd = vec![5e-3, 4e-3, 3e-3, 2e-3, 1e-3];
        for (j, row) in g.g_cross.iter_mut().enumerate() {
            row[j] = g.g_dd[j];
        }
        let alloc = greedy_allocate_with(&g, &params, GreedyGain::IntraPair).unwrap();
        // ascending g_dd: 4, 3, 2, 1, 0 onto channels 1, 2, 0, 1, 2
        assert_eq!(alloc.packages, vec![vec![2], vec![1, 4], vec![0, 3]]);
    }

    #[test]
    fn single_pair_goes_to_max_snr_channel() {
        let params = GameParams::default();
        for seed in 0..10 {
            let g = random_gains(6, 1, seed);
            let alloc = greedy_allocate(&g, &params).unwrap();
            assert_eq!(alloc.channel_of(0), Some(snr_order(&g, &params)[0]));
        }
        // several pairs: the smallest g_de goes first
        let g = random_gains(6, 4, 42);
        let alloc = greedy_allocate(&g, &params).unwrap();
        let min_de = (0..4).min_by(|&a, &b| g.g_de[a].total_cmp(&g.g_de[b])).unwrap();
        assert_eq!(alloc.channel_of(min_de), Some(snr_order(&g, &params)[0]));
    }

    #[test]
    fn greedy_without_pairs() {
        let params = GameParams::default();
        let g = random_gains(4, 0, 1);
        let alloc = greedy_allocate(&g, &params).unwrap();
        assert!(alloc.packages.iter().all(Vec::is_empty));
        assert_eq!(alloc.solves, 4);
    }

    #[test]
    fn fixed_power_consumes_exact_budget() {
        let params = GameParams::default();
        let g = random_gains(5, 7, 3);
        let alloc = ca_fixed_power_allocate(&g, &params, 0.05).unwrap();
        assert!(alloc.is_partition(7));
        let total: f64 = alloc.equilibria.iter().map(|e| e.power.total()).sum();
        assert!((total - 12.0 * 0.05).abs() < 1e-12);
        assert!(alloc.equilibria.iter().flat_map(|e| e.power.iter()).all(|&p| p == 0.05));
    }

    #[test]
    fn fixed_power_bounds() {
        let params = GameParams::default();
        let g = random_gains(2, 1, 3);
        assert!(ca_fixed_power_allocate(&g, &params, 0.0).is_err());
        assert!(ca_fixed_power_allocate(&g, &params, 0.25).is_err());
        assert!(ca_fixed_power_allocate(&g, &params, 0.2).is_ok());
    }

    #[test]
    fn deterministic() {
        let params = GameParams::default();
        let g = random_gains(8, 6, 77);
        assert_eq!(greedy_allocate(&g, &params).unwrap(), greedy_allocate(&g, &params).unwrap());
        assert_eq!(
            ca_fixed_power_allocate(&g, &params, 0.05).unwrap(),
            ca_fixed_power_allocate(&g, &params, 0.05).unwrap()
        );
    }
}

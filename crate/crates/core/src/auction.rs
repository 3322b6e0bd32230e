//! Two-round iterative combinatorial auction for channel allocation.
//!
//! D2D pairs bid for the uplink channels of the cellular UEs. A channel's
//! value is its combinatorial utility `U_k`: the summed equilibrium expected
//! data of the cellular UE and every D2D pair in its package. Bids are
//! marginal values `U_k(D_k + d) - U_k(D_k)`.
//!
//! Round one sells greedily: the highest bid wins, the winner stops bidding,
//! and the remaining bids on the sold channel are refreshed. Round two
//! repeatedly kicks the pair whose removal hurts its channel least (each pair
//! at most once) and re-sells it to the best other channel if the net change
//! in total utility is positive.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::channel::GainTable;
use crate::game::{self, ChannelGame, EquilibriumResult, GameError, GameParams};

/// Marks bids of bidders that already hold a channel; below any real bid.
pub const MASKED_BID: f64 = f64::NEG_INFINITY;

/// Values a channel package.
pub trait Valuator {
    fn value(&self, gains: &GainTable, k: usize, package: &[usize]) -> Result<EquilibriumResult, GameError>;
}

/// Valuation at the power control equilibrium.
#[derive(Debug, Clone)]
pub struct EquilibriumValuator<'a> {
    pub params: &'a GameParams,
}

impl Valuator for EquilibriumValuator<'_> {
    fn value(&self, gains: &GainTable, k: usize, package: &[usize]) -> Result<EquilibriumResult, GameError> {
        let game = ChannelGame::for_channel(gains, k, package)?;
        game::solve_equilibrium(&game, self.params)
    }
}

/// Valuation with every UE transmitting the same constant power.
#[derive(Debug, Clone)]
pub struct FixedPowerValuator<'a> {
    pub params: &'a GameParams,
    pub power: f64,
}

impl Valuator for FixedPowerValuator<'_> {
    fn value(&self, gains: &GainTable, k: usize, package: &[usize]) -> Result<EquilibriumResult, GameError> {
        let game = ChannelGame::for_channel(gains, k, package)?;
        let power = vec![self.power; game.num_players()];
        Ok(EquilibriumResult::evaluate_at(&game, power, self.params))
    }
}

/// What round two does after a kicked pair finds no profitable new channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectPolicy {
    /// End the round.
    #[default]
    Stop,
    /// Leave the pair where it was and try the next candidate.
    Continue,
}

/// Round-two bookkeeping.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AdjustmentLog {
    /// Every pair picked for adjustment, in order.
    pub selected: Vec<usize>,
    /// Accepted moves as `(pair, from, to)`.
    pub moves: Vec<(usize, usize, usize)>,
    /// Total utility after round one and after each accepted move.
    pub totals: Vec<f64>,
}

/// Partition of the D2D pairs into per-channel packages, with the power
/// game outcome of every channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    /// Sorted D2D indices sharing channel `k`.
    pub packages: Vec<Vec<usize>>,
    /// Player 0 is the cellular UE, then the package members in order.
    pub equilibria: Vec<EquilibriumResult>,
    /// Combinatorial utility `U_k` (bits).
    pub utilities: Vec<f64>,
    /// Package valuations (equilibrium solves) performed to build this.
    pub solves: usize,
    pub adjustments: AdjustmentLog,
}

impl Allocation {
    pub fn num_channels(&self) -> usize {
        self.packages.len()
    }

    pub fn total_utility(&self) -> f64 {
        self.utilities.iter().sum()
    }

    pub fn channel_of(&self, d: usize) -> Option<usize> {
        self.packages.iter().position(|p| p.contains(&d))
    }

    /// Packages are disjoint and together cover `0..num_d2d`.
    pub fn is_partition(&self, num_d2d: usize) -> bool {
        let mut seen = vec![false; num_d2d];
        for d in self.packages.iter().flatten() {
            match seen.get_mut(*d) {
                Some(s) if !*s => *s = true,
                _ => return false,
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn nonconverged(&self) -> usize {
        self.equilibria.iter().filter(|e| !e.converged).count()
    }

    /// Power used by D2D pair `d`, if assigned.
    pub fn d2d_power(&self, d: usize) -> Option<f64> {
        let k = self.channel_of(d)?;
        let slot = self.packages[k].iter().position(|&x| x == d)?;
        Some(self.equilibria[k].power[slot + 1])
    }
}

/// Marginal bids of every unassigned pair for every channel.
#[derive(Debug, Clone, PartialEq)]
pub struct BidMatrix {
    /// `bids[k][d]`, [`MASKED_BID`] for assigned bidders.
    pub bids: Vec<Vec<f64>>,
    /// Outcome of channel `k` if `d` joined it.
    pub candidates: Vec<Vec<Option<EquilibriumResult>>>,
    /// Current `U_k` the bids are measured against.
    pub baseline: Vec<f64>,
}

impl BidMatrix {
    /// Highest bid; ties go to the lowest channel, then the lowest pair.
    pub fn best(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (k, row) in self.bids.iter().enumerate() {
            for (d, &bid) in row.iter().enumerate() {
                if bid == MASKED_BID {
                    continue;
                }
                if best.is_none_or(|(_, _, b)| bid > b) {
                    best = Some((k, d, bid));
                }
            }
        }
        best.map(|(k, d, _)| (k, d))
    }
}

fn with_member(package: &[usize], d: usize) -> Vec<usize> {
    let mut out = package.to_vec();
    if let Err(pos) = out.binary_search(&d) {
        out.insert(pos, d);
    }
    out
}

fn without_member(package: &[usize], d: usize) -> Vec<usize> {
    package.iter().copied().filter(|&x| x != d).collect()
}

/// Runs the auction with a pluggable package valuation and counts every valuation.
pub struct Auction<'g, V> {
    gains: &'g GainTable,
    valuator: V,
    reject_policy: RejectPolicy,
    solves: Cell<usize>,
}

impl<'g, V: Valuator> Auction<'g, V> {
    pub fn new(gains: &'g GainTable, valuator: V) -> Self {
        Self { gains, valuator, reject_policy: RejectPolicy::Stop, solves: Cell::new(0) }
    }

    pub fn with_reject_policy(mut self, policy: RejectPolicy) -> Self {
        self.reject_policy = policy;
        self
    }

    pub fn solves(&self) -> usize {
        self.solves.get()
    }

    pub fn value(&self, k: usize, package: &[usize]) -> Result<EquilibriumResult, GameError> {
        self.solves.set(self.solves.get() + 1);
        self.valuator.value(self.gains, k, package)
    }

    /// Every channel with an empty package.
    pub fn empty_allocation(&self) -> Result<Allocation, GameError> {
        let equilibria = (0..self.gains.num_cellular()).map(|k| self.value(k, &[])).collect::<Result<Vec<_>, _>>()?;
        Ok(Allocation {
            packages: vec![Vec::new(); equilibria.len()],
            utilities: equilibria.iter().map(EquilibriumResult::total_utility).collect(),
            equilibria,
            solves: self.solves(),
            adjustments: AdjustmentLog::default(),
        })
    }

    fn bid(&self, state: &Allocation, k: usize, d: usize) -> Result<(f64, EquilibriumResult), GameError> {
        let outcome = self.value(k, &with_member(&state.packages[k], d))?;
        Ok((outcome.total_utility() - state.utilities[k], outcome))
    }

    pub fn compute_bids(&self, state: &Allocation, unassigned: &[bool]) -> Result<BidMatrix, GameError> {
        let num_k = state.num_channels();
        let num_d = unassigned.len();
        let mut matrix = BidMatrix {
            bids: vec![vec![MASKED_BID; num_d]; num_k],
            candidates: vec![vec![None; num_d]; num_k],
            baseline: state.utilities.clone(),
        };
        for k in 0..num_k {
            self.refresh_channel(&mut matrix, state, unassigned, k)?;
        }
        Ok(matrix)
    }

    fn refresh_channel(
        &self,
        matrix: &mut BidMatrix,
        state: &Allocation,
        unassigned: &[bool],
        k: usize,
    ) -> Result<(), GameError> {
        matrix.baseline[k] = state.utilities[k];
        for (d, &open) in unassigned.iter().enumerate() {
            if open {
                let (bid, outcome) = self.bid(state, k, d)?;
                matrix.bids[k][d] = bid;
                matrix.candidates[k][d] = Some(outcome);
            } else {
                matrix.bids[k][d] = MASKED_BID;
                matrix.candidates[k][d] = None;
            }
        }
        Ok(())
    }

    pub fn round_one(&self) -> Result<Allocation, GameError> {
        let mut state = self.empty_allocation()?;
        let num_d = self.gains.num_d2d();
        let mut unassigned = vec![true; num_d];
        let mut bids = self.compute_bids(&state, &unassigned)?;
        while let Some((k, d)) = bids.best() {
            let outcome = bids.candidates[k][d].take().expect("unmasked bid has a candidate");
            state.packages[k] = with_member(&state.packages[k], d);
            state.utilities[k] = outcome.total_utility();
            state.equilibria[k] = outcome;
            unassigned[d] = false;
            for row in bids.bids.iter_mut() {
                row[d] = MASKED_BID;
            }
            for row in bids.candidates.iter_mut() {
                row[d] = None;
            }
            self.refresh_channel(&mut bids, &state, &unassigned, k)?;
        }
        state.solves = self.solves();
        state.adjustments.totals.push(state.total_utility());
        Ok(state)
    }

    pub fn round_two(&self, mut state: Allocation) -> Result<Allocation, GameError> {
        let num_d = self.gains.num_d2d();
        let mut adjusted = vec![false; num_d];
        if state.adjustments.totals.is_empty() {
            state.adjustments.totals.push(state.total_utility());
        }
        loop {
            // Pair whose removal raises (or least lowers) its channel's utility.
            let mut kick: Option<(usize, usize, f64, EquilibriumResult)> = None;
            for d in (0..num_d).filter(|&d| !adjusted[d]) {
                let k = state.channel_of(d).expect("round two needs a complete allocation");
                let outcome = self.value(k, &without_member(&state.packages[k], d))?;
                let gain = outcome.total_utility() - state.utilities[k];
                if kick.as_ref().is_none_or(|(_, _, g, _)| gain > *g) {
                    kick = Some((d, k, gain, outcome));
                }
            }
            let Some((d, origin, removal_gain, reduced)) = kick else {
                break;
            };
            adjusted[d] = true;
            state.adjustments.selected.push(d);

            let mut dest: Option<(usize, f64, EquilibriumResult)> = None;
            for k in (0..state.num_channels()).filter(|&k| k != origin) {
                let outcome = self.value(k, &with_member(&state.packages[k], d))?;
                let gain = outcome.total_utility() - state.utilities[k];
                if dest.as_ref().is_none_or(|(_, g, _)| gain > *g) {
                    dest = Some((k, gain, outcome));
                }
            }
            match dest {
                Some((k, insertion_gain, grown)) if removal_gain + insertion_gain > 0.0 => {
                    state.packages[origin] = without_member(&state.packages[origin], d);
                    state.utilities[origin] = reduced.total_utility();
                    state.equilibria[origin] = reduced;
                    state.packages[k] = with_member(&state.packages[k], d);
                    state.utilities[k] = grown.total_utility();
                    state.equilibria[k] = grown;
                    state.adjustments.moves.push((d, origin, k));
                    state.adjustments.totals.push(state.total_utility());
                }
                _ => match self.reject_policy {
                    RejectPolicy::Stop => break,
                    RejectPolicy::Continue => continue,
                },
            }
        }
        state.solves = self.solves();
        Ok(state)
    }

    pub fn allocate(&self) -> Result<Allocation, GameError> {
        let state = self.round_one()?;
        self.round_two(state)
    }
}

/// `U_k` of `package` on channel `k` with the power game played out.
pub fn combinatorial_utility(
    k: usize,
    package: &[usize],
    gains: &GainTable,
    params: &GameParams,
) -> Result<(f64, EquilibriumResult), GameError> {
    let mut sorted = package.to_vec();
    sorted.sort_unstable();
    let eq = EquilibriumValuator { params }.value(gains, k, &sorted)?;
    Ok((eq.total_utility(), eq))
}

pub fn compute_bids(
    state: &Allocation,
    unassigned: &[bool],
    gains: &GainTable,
    params: &GameParams,
) -> Result<BidMatrix, GameError> {
    Auction::new(gains, EquilibriumValuator { params }).compute_bids(state, unassigned)
}

pub fn round_one(gains: &GainTable, params: &GameParams) -> Result<Allocation, GameError> {
    Auction::new(gains, EquilibriumValuator { params }).round_one()
}

pub fn round_two(state: Allocation, gains: &GainTable, params: &GameParams) -> Result<Allocation, GameError> {
    let auction = Auction::new(gains, EquilibriumValuator { params });
    auction.solves.set(state.solves);
    auction.round_two(state)
}

/// Joint channel and power allocation: round one, then round two.
pub fn allocate(gains: &GainTable, params: &GameParams) -> Result<Allocation, GameError> {
    Auction::new(gains, EquilibriumValuator { params }).allocate()
}

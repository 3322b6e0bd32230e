//! Energy-efficient channel and power allocation for device-to-device (D2D)
//! pairs underlaying the uplink of a single cellular cell.
//!
//! D2D pairs bid for the cellular UEs' channels in an iterative
//! combinatorial auction ([`auction`]); the UEs sharing a channel set their
//! transmit powers through a non-cooperative game whose payoff is the
//! expected data sent over the Peukert battery lifetime ([`game`]). The
//! [`metrics`] harness runs Monte Carlo sweeps of the whole pipeline against
//! the [`baselines`], and [`config`] drives it from a TOML file.

pub mod auction;
pub mod baselines;
pub mod channel;
pub mod config;
pub mod game;
pub mod metrics;
pub mod par;

pub use auction::{allocate, Allocation};
pub use channel::{CellConfig, GainTable, Topology};
pub use game::{ChannelGame, EquilibriumResult, GameParams, PowerVector};
pub use metrics::{run_sweep, Algorithm, MetricsRecord, SweepParam, SweepRow, SweepSpec};
pub use par::Execution;

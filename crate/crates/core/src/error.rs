// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;
use alloc::vec::Vec;

use crate::crossbar::Cell;
use crate::techmodel::StateLabel;
use crate::workload::{ClusterId, NeuronId};

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// A synapse that could not be placed on a permitted cell.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Violation {
    pub pre: NeuronId,
    pub post: NeuronId,
    pub state: StateLabel,
    pub cell: Cell,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid crossbar spec: {0}")]
    InvalidSpec(String),
    #[error("invalid technology parameters: {0}")]
    InvalidTechnology(String),
    #[error("cell {cell} outside the crossbar of dimension {n}")]
    IndexOutOfRange { cell: Cell, n: u32 },
    #[error("cell {cell} outside the active {rows}x{cols} array")]
    OutOfActiveRegion { cell: Cell, rows: u32, cols: u32 },
    #[error("state {state} is not permitted at cell {cell}")]
    StateForbidden { cell: Cell, state: StateLabel },
    #[error("configuration '{0}' is not available under single control")]
    IllegalConfig(&'static str),
    #[error("crossbar dimension {0} is too small (need at least 2)")]
    DimensionTooSmall(u32),
    #[error("{used} used cells exceed the {capacity} cells of the crossbar")]
    CountExceedsCapacity { used: u64, capacity: u64 },
    #[error("validation failed at {locus}: {reason}")]
    Validation { locus: String, reason: String },
    #[error("weight {0} is not a positive conductance")]
    NonPositiveWeight(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("cluster {cluster} cannot be placed: {} violation(s) remain", violations.len())]
    Infeasible { cluster: ClusterId, violations: Vec<Violation> },
    #[error("cluster {cluster} has {pre} x {post} neurons, more than a {n}x{n} crossbar holds")]
    ClusterTooLarge { cluster: ClusterId, pre: usize, post: usize, n: u32 },
    #[error("{clusters} clusters exceed the {crossbars} available crossbars")]
    CapacityExceeded { clusters: usize, crossbars: u32 },
    #[error("spike train needs at least two spikes, got {0}")]
    TooFewSpikes(usize),
    #[error("neuron {0} is not placed on any crossbar")]
    UnknownNeuron(NeuronId),
    #[error("placement contains no synapses")]
    EmptyPlacement,
    #[error("synapse counts are both zero")]
    EmptyCounts,
    #[error("activity must be non-negative with a positive duration")]
    NegativeActivity,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("no grid point avoids a latency regression for network '{0}'")]
    NoFeasibleKnee(String),
}

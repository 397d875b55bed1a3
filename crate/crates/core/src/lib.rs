// SPDX-License-Identifier: Apache-2.0

//! Latency, energy and placement models for partitioned NVM crossbars used as
//! neuromorphic processing elements.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, report emitters
//! and the command line live in the `xbarsim` companion crate.
//!
//! Layout:
//! - [`techmodel`]: technology parameters, resistance states and the per-path
//!   latency model (Elmore line delay + state sensing + isolation transistors).
//! - [`crossbar`]: the `⟨N, N_h, N_l, P, Q⟩` crossbar description, regions A/B/C
//!   and the four isolation-control configurations.
//! - [`workload`]: clusters, networks, spike trains, weight quantization and the
//!   synthetic workload generator.
//! - [`mapper`]: region-aware cluster placement and configuration selection.
//! - [`simulate`]: spike propagation, integrate-and-fire response, ISI metrics,
//!   latency statistics and the energy ledger.
//! - [`dse`]: partition-point and region-size sweeps plus tradeoff selection.
//! - [`analysis`]: closed-form cost-per-bit and die-area figures.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod crossbar;
pub mod dse;
mod error;
pub mod mapper;
pub mod simulate;
pub mod techmodel;
pub mod workload;

pub use crate::error::{Error, Result};

pub use crate::crossbar::{Cell, Configuration, Control, CrossbarSpec, Region, RegionKind};
pub use crate::techmodel::{PathLatency, ResistanceState, StateLabel, TechnologyParams};

// SPDX-License-Identifier: Apache-2.0

//! Technology parameters and the primitive latency models.
//!
//! A current path from a pre-synaptic driver to a post-synaptic sense node runs
//! along the wordline of the source row, through the programmed cell and down
//! the bitline of the target column. Its latency is split into three parts:
//!
//! - parasitic: Elmore delay of the wordline and bitline RC ladders up to the
//!   target cell, with the capacitive load of the whole *active* line (the line
//!   ends at an open isolation transistor, or at the crossbar edge);
//! - sensing: a single-pole `R_state * c_sense` product;
//! - isolation: `t_iso_on` for every closed isolation transistor crossed.
//!
//! Indices are 0-based. Cell `(0, 0)` is the nearest cell (`t_{1,1}`).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::crossbar::{config_dimensions, permits, Cell, Configuration, CrossbarSpec};
use crate::error::{Error, Result};

/// One of the four programmable resistance levels of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum StateLabel {
    #[cfg_attr(feature = "serde", serde(rename = "LRS1"))]
    Lrs1,
    #[cfg_attr(feature = "serde", serde(rename = "LRS2"))]
    Lrs2,
    #[cfg_attr(feature = "serde", serde(rename = "LRS3"))]
    Lrs3,
    #[cfg_attr(feature = "serde", serde(rename = "HRS"))]
    Hrs,
}

impl StateLabel {
    /// All labels, lowest resistance first.
    pub const ALL: [StateLabel; 4] = [
        StateLabel::Lrs1,
        StateLabel::Lrs2,
        StateLabel::Lrs3,
        StateLabel::Hrs,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            StateLabel::Lrs1 => "LRS1",
            StateLabel::Lrs2 => "LRS2",
            StateLabel::Lrs3 => "LRS3",
            StateLabel::Hrs => "HRS",
        }
    }

    pub const fn is_lrs(self) -> bool {
        !matches!(self, StateLabel::Hrs)
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StateLabel::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParams(format!("unknown resistance state '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResistanceState {
    pub label: StateLabel,
    pub ohms: f64,
}

/// Resistance of each state, indexed by [`StateLabel::index`].
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "Vec<ResistanceState>", into = "Vec<ResistanceState>")
)]
pub struct StateTable([f64; 4]);

impl StateTable {
    /// OxRRAM levels: 1.5 kΩ, 5.78 kΩ, 13.6 kΩ and 73 kΩ.
    pub const OXRRAM: StateTable = StateTable([1_500.0, 5_780.0, 13_600.0, 73_000.0]);

    pub fn new(ohms: [f64; 4]) -> Result<Self> {
        let table = StateTable(ohms);
        table.validate()?;
        Ok(table)
    }

    pub fn ohms(&self, label: StateLabel) -> f64 {
        self.0[label.index()]
    }

    pub fn get(&self, label: StateLabel) -> ResistanceState {
        ResistanceState {
            label,
            ohms: self.ohms(label),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ResistanceState> + '_ {
        StateLabel::ALL.into_iter().map(|l| self.get(l))
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidTechnology(
                "state resistances must be positive".into(),
            ));
        }
        if self.0.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidTechnology(
                "state resistances must strictly increase LRS1 < LRS2 < LRS3 < HRS".into(),
            ));
        }
        Ok(())
    }
}

impl TryFrom<Vec<ResistanceState>> for StateTable {
    type Error = Error;

    fn try_from(states: Vec<ResistanceState>) -> Result<Self> {
        if states.len() != 4 {
            return Err(Error::InvalidTechnology(format!(
                "expected 4 resistance states, got {}",
                states.len()
            )));
        }
        let mut ohms = [f64::NAN; 4];
        for s in &states {
            if !ohms[s.label.index()].is_nan() {
                return Err(Error::InvalidTechnology(format!("state {} listed twice", s.label)));
            }
            ohms[s.label.index()] = s.ohms;
        }
        StateTable::new(ohms)
    }
}

impl From<StateTable> for Vec<ResistanceState> {
    fn from(table: StateTable) -> Self {
        table.iter().collect()
    }
}

/// Technology-level constants. Unit resistances and capacitances are per cell
/// pitch; times in seconds, energies in joules, powers in watts.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TechnologyParams {
    #[cfg_attr(feature = "serde", serde(rename = "node"))]
    pub node_label: String,
    pub feature_size_nm: f64,
    #[cfg_attr(feature = "serde", serde(rename = "r_wl"))]
    pub r_wordline_unit: f64,
    #[cfg_attr(feature = "serde", serde(rename = "r_bl"))]
    pub r_bitline_unit: f64,
    #[cfg_attr(feature = "serde", serde(rename = "c_wl"))]
    pub c_wordline_unit: f64,
    #[cfg_attr(feature = "serde", serde(rename = "c_bl"))]
    pub c_bitline_unit: f64,
    pub c_sense: f64,
    pub t_iso_on: f64,
    pub leakage_per_cell: f64,
    pub e_spike: f64,
    pub e_route_hop: f64,
    pub p_wordline_raise: f64,
    pub states: StateTable,
}

/// Time unit of the bundled presets: `r * c` of one cell pitch at 45nm.
const PRESET_RC_45NM: f64 = 1e-12;

impl TechnologyParams {
    /// Bundled node labels, largest feature size first.
    pub const PRESET_NODES: [&'static str; 4] = ["45nm", "32nm", "22nm", "16nm"];

    /// Bundled preset for `45nm`, `32nm`, `22nm` or `16nm`.
    ///
    /// Unit capacitances give `r * c = 1 ps` per pitch at 45nm on both lines and
    /// scale with `45 / F` at smaller nodes.
    pub fn preset(node: &str) -> Result<Self> {
        let (f, r_wl, r_bl) = match node.trim().to_ascii_lowercase().as_str() {
            "45nm" | "45" => (45.0, 2.5, 1.0),
            "32nm" | "32" => (32.0, 3.6, 1.4),
            "22nm" | "22" => (22.0, 6.0, 2.3),
            "16nm" | "16" => (16.0, 10.0, 3.8),
            other => {
                return Err(Error::InvalidTechnology(format!(
                    "no bundled preset for node '{other}'"
                )))
            }
        };
        let scale = 45.0 / f;
        Ok(TechnologyParams {
            node_label: format!("{}nm", f as u32),
            feature_size_nm: f,
            r_wordline_unit: r_wl,
            r_bitline_unit: r_bl,
            c_wordline_unit: PRESET_RC_45NM / 2.5 * scale,
            c_bitline_unit: PRESET_RC_45NM / 1.0 * scale,
            c_sense: 1e-12,
            t_iso_on: 2e-9,
            leakage_per_cell: 1e-9,
            e_spike: 23.6e-12,
            e_route_hop: 3e-12,
            p_wordline_raise: 10e-6,
            states: StateTable::OXRRAM,
        })
    }

    pub fn presets() -> Vec<TechnologyParams> {
        Self::PRESET_NODES
            .iter()
            .map(|n| Self::preset(n).expect("bundled preset"))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("feature_size_nm", self.feature_size_nm),
            ("r_wl", self.r_wordline_unit),
            ("r_bl", self.r_bitline_unit),
            ("c_wl", self.c_wordline_unit),
            ("c_bl", self.c_bitline_unit),
            ("c_sense", self.c_sense),
            ("leakage_per_cell", self.leakage_per_cell),
            ("e_spike", self.e_spike),
            ("e_route_hop", self.e_route_hop),
            ("p_wordline_raise", self.p_wordline_raise),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTechnology(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.t_iso_on.is_finite() && self.t_iso_on >= 0.0) {
            return Err(Error::InvalidTechnology("t_iso_on must be non-negative".to_string()));
        }
        self.states.validate()
    }

    pub fn sense(&self, label: StateLabel) -> f64 {
        sense_latency(&self.states.get(label), self)
    }
}

/// Latency of one current path, split by cause.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathLatency {
    pub parasitic_component: f64,
    pub sense_component: f64,
    pub iso_component: f64,
    pub total: f64,
}

impl PathLatency {
    pub fn new(parasitic: f64, sense: f64, iso: f64) -> Self {
        PathLatency {
            parasitic_component: parasitic,
            sense_component: sense,
            iso_component: iso,
            total: parasitic + sense + iso,
        }
    }
}

pub fn sense_latency(state: &ResistanceState, tech: &TechnologyParams) -> f64 {
    state.ohms * tech.c_sense
}

/// Elmore delay at the far end of a uniform `segments`-stage RC ladder:
/// `r * c * k (k + 1) / 2`.
pub fn ladder_delay(segments: u32, r_unit: f64, c_unit: f64) -> f64 {
    line_delay(segments, segments, r_unit, c_unit)
}

/// Elmore delay at node `target` of a uniform ladder of `line` segments driven
/// from node 0: `r * c * sum_{i=1..target} (line - i + 1)`.
///
/// Every resistor up to the target sees all capacitance downstream of it,
/// including the segments past the target up to the end of the line.
pub fn line_delay(target: u32, line: u32, r_unit: f64, c_unit: f64) -> f64 {
    debug_assert!(target <= line, "target {target} beyond line end {line}");
    let k = target as u64;
    let l = line.max(target) as u64;
    let weight = k * (2 * l + 1 - k) / 2;
    r_unit * c_unit * weight as f64
}

/// Latency of the path through `cell` programmed to `state`, with the crossbar
/// operated in `config`.
pub fn path_latency(
    cell: Cell,
    state: StateLabel,
    config: Configuration,
    spec: &CrossbarSpec,
    tech: &TechnologyParams,
) -> Result<PathLatency> {
    let (rows, cols) = config_dimensions(config, spec)?;
    if cell.row >= rows || cell.col >= cols {
        return Err(Error::OutOfActiveRegion { cell, rows, cols });
    }
    if !permits(cell, state, spec)? {
        return Err(Error::StateForbidden { cell, state });
    }
    Ok(path_latency_unchecked(cell, state, config, spec, tech))
}

/// [`path_latency`] without the active-region and state checks.
pub(crate) fn path_latency_unchecked(
    cell: Cell,
    state: StateLabel,
    config: Configuration,
    spec: &CrossbarSpec,
    tech: &TechnologyParams,
) -> PathLatency {
    // wl_iso_ctrl closes the transistors on the wordlines, so the wordline spans
    // all N columns; otherwise it stops at column Q. Same for bitlines and P.
    let wl_len = if config.wl_iso_ctrl() { spec.n } else { spec.q };
    let bl_len = if config.bl_iso_ctrl() { spec.n } else { spec.p };
    let parasitic = line_delay(cell.col + 1, wl_len, tech.r_wordline_unit, tech.c_wordline_unit)
        + line_delay(cell.row + 1, bl_len, tech.r_bitline_unit, tech.c_bitline_unit);
    let crossings = u32::from(config.bl_iso_ctrl() && cell.row >= spec.p)
        + u32::from(config.wl_iso_ctrl() && cell.col >= spec.q);
    PathLatency::new(
        parasitic,
        tech.sense(state),
        tech.t_iso_on * f64::from(crossings),
    )
}

// SPDX-License-Identifier: Apache-2.0

//! Partitioned crossbar geometry.
//!
//! A crossbar `⟨N, N_h, N_l, P, Q⟩` has three state regions and one pair of
//! isolation-transistor rows. Region A (`row < N_h && col < N_h`) holds HRS
//! only, region B (`row >= N - N_l && col >= N - N_l`) holds LRS1 only and
//! region C is freely programmable. Isolation transistors sit on every bitline
//! between rows `P - 1` and `P`, and on every wordline between columns `Q - 1`
//! and `Q`. The baseline crossbar is `⟨N, 0, 0, N, N⟩`.

use alloc::format;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::techmodel::StateLabel;

/// A crosspoint, 0-based (`row` = wordline, `col` = bitline).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cell {
    pub row: u32,
    pub col: u32,
}

impl Cell {
    pub const fn new(row: u32, col: u32) -> Self {
        Cell { row, col }
    }

    /// 1-based latency name of the cell, `t_{row+1,col+1}`.
    pub fn path_name(&self) -> alloc::string::String {
        format!("t_{{{},{}}}", self.row + 1, self.col + 1)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// How the isolation transistors are driven.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Control {
    /// Independent `wl_iso_ctrl` and `bl_iso_ctrl` signals.
    #[default]
    Double,
    /// One signal for every transistor: only '00' and '11'.
    Single,
}

impl FromStr for Control {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" => Ok(Control::Double),
            "single" => Ok(Control::Single),
            other => Err(Error::InvalidParams(format!("unknown control mode '{other}'"))),
        }
    }
}

impl fmt::Display for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Control::Double => "double",
            Control::Single => "single",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossbarSpec {
    pub n: u32,
    pub n_h: u32,
    pub n_l: u32,
    pub p: u32,
    pub q: u32,
    #[cfg_attr(feature = "serde", serde(default))]
    pub control: Control,
}

impl CrossbarSpec {
    pub fn new(n: u32, n_h: u32, n_l: u32, p: u32, q: u32, control: Control) -> Result<Self> {
        let spec = CrossbarSpec {
            n,
            n_h,
            n_l,
            p,
            q,
            control,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Unpartitioned, unconstrained `N x N` crossbar.
    pub fn baseline(n: u32) -> Result<Self> {
        Self::new(n, 0, 0, n, n, Control::Double)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("N must be at least 1".into()));
        }
        if self.p == 0 || self.p > self.n || self.q == 0 || self.q > self.n {
            return Err(Error::InvalidSpec(format!(
                "partition points must satisfy 1 <= P, Q <= N (N={}, P={}, Q={})",
                self.n, self.p, self.q
            )));
        }
        if self.n_h as u64 + self.n_l as u64 > self.n as u64 {
            return Err(Error::InvalidSpec(format!(
                "N_h + N_l must not exceed N (N={}, N_h={}, N_l={})",
                self.n, self.n_h, self.n_l
            )));
        }
        Ok(())
    }

    pub fn with_partition(mut self, p: u32, q: u32) -> Result<Self> {
        self.p = p;
        self.q = q;
        self.validate()?;
        Ok(self)
    }

    pub fn with_regions(mut self, n_h: u32, n_l: u32) -> Result<Self> {
        self.n_h = n_h;
        self.n_l = n_l;
        self.validate()?;
        Ok(self)
    }

    pub fn with_control(mut self, control: Control) -> Self {
        self.control = control;
        self
    }

    pub fn is_partitioned(&self) -> bool {
        self.p < self.n || self.q < self.n
    }

    pub fn has_regions(&self) -> bool {
        self.n_h > 0 || self.n_l > 0
    }

    /// Whether `cell` lies in the collapsed `P x Q` region.
    pub fn in_collapsed_region(&self, cell: Cell) -> bool {
        cell.row < self.p && cell.col < self.q
    }
}

impl fmt::Display for CrossbarSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "<{},{},{},{},{}>",
            self.n, self.n_h, self.n_l, self.p, self.q
        )
    }
}

/// State of the two isolation control signals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Configuration {
    /// `P x Q`, both line sets collapsed.
    #[cfg_attr(feature = "serde", serde(rename = "00"))]
    C00,
    /// `N x Q`, bitlines expanded.
    #[cfg_attr(feature = "serde", serde(rename = "01"))]
    C01,
    /// `P x N`, wordlines expanded.
    #[cfg_attr(feature = "serde", serde(rename = "10"))]
    C10,
    /// `N x N`, expanded mode.
    #[cfg_attr(feature = "serde", serde(rename = "11"))]
    C11,
}

impl Configuration {
    pub const ALL: [Configuration; 4] = [
        Configuration::C00,
        Configuration::C01,
        Configuration::C10,
        Configuration::C11,
    ];

    pub const fn from_bits(wl_iso_ctrl: bool, bl_iso_ctrl: bool) -> Self {
        match (wl_iso_ctrl, bl_iso_ctrl) {
            (false, false) => Configuration::C00,
            (false, true) => Configuration::C01,
            (true, false) => Configuration::C10,
            (true, true) => Configuration::C11,
        }
    }

    pub const fn wl_iso_ctrl(self) -> bool {
        matches!(self, Configuration::C10 | Configuration::C11)
    }

    pub const fn bl_iso_ctrl(self) -> bool {
        matches!(self, Configuration::C01 | Configuration::C11)
    }

    pub const fn name(self) -> &'static str {
        match self {
            Configuration::C00 => "00",
            Configuration::C01 => "01",
            Configuration::C10 => "10",
            Configuration::C11 => "11",
        }
    }

    pub const fn is_legal(self, control: Control) -> bool {
        match control {
            Control::Double => true,
            Control::Single => matches!(self, Configuration::C00 | Configuration::C11),
        }
    }

    pub const fn is_expanded(self) -> bool {
        matches!(self, Configuration::C11)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Configuration::ALL
            .into_iter()
            .find(|c| c.name() == s.trim().trim_matches('\''))
            .ok_or_else(|| Error::InvalidParams(format!("unknown configuration '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RegionKind {
    A,
    B,
    C,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Region {
    pub kind: RegionKind,
}

impl Region {
    pub fn permitted_states(&self) -> &'static [StateLabel] {
        match self.kind {
            RegionKind::A => &[StateLabel::Hrs],
            RegionKind::B => &[StateLabel::Lrs1],
            RegionKind::C => &StateLabel::ALL,
        }
    }

    pub fn permits(&self, state: StateLabel) -> bool {
        self.permitted_states().contains(&state)
    }
}

fn check_index(cell: Cell, spec: &CrossbarSpec) -> Result<()> {
    if cell.row >= spec.n || cell.col >= spec.n {
        return Err(Error::IndexOutOfRange { cell, n: spec.n });
    }
    Ok(())
}

pub fn region_of(cell: Cell, spec: &CrossbarSpec) -> Result<Region> {
    check_index(cell, spec)?;
    let far = spec.n - spec.n_l;
    let kind = if cell.row < spec.n_h && cell.col < spec.n_h {
        RegionKind::A
    } else if cell.row >= far && cell.col >= far {
        RegionKind::B
    } else {
        RegionKind::C
    };
    Ok(Region { kind })
}

pub fn permits(cell: Cell, state: StateLabel, spec: &CrossbarSpec) -> Result<bool> {
    Ok(region_of(cell, spec)?.permits(state))
}

/// Active array `(rows, cols)` of `config`.
pub fn config_dimensions(config: Configuration, spec: &CrossbarSpec) -> Result<(u32, u32)> {
    if !config.is_legal(spec.control) {
        return Err(Error::IllegalConfig(config.name()));
    }
    let rows = if config.bl_iso_ctrl() { spec.n } else { spec.p };
    let cols = if config.wl_iso_ctrl() { spec.n } else { spec.q };
    Ok((rows, cols))
}

/// Number of powered cells in `config`; static energy scales with it.
pub fn static_energy_weight(config: Configuration, spec: &CrossbarSpec) -> Result<u64> {
    let (rows, cols) = config_dimensions(config, spec)?;
    Ok(rows as u64 * cols as u64)
}

/// Whether `cell` is inside the active array of `config`.
pub fn config_contains(config: Configuration, spec: &CrossbarSpec, cell: Cell) -> Result<bool> {
    let (rows, cols) = config_dimensions(config, spec)?;
    Ok(cell.row < rows && cell.col < cols)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Granularity {
    /// A transistor between every pair of adjacent cells.
    Fine,
    /// One transistor per line at the partition point.
    Coarse,
}

pub fn isolation_transistor_count(n: u32, granularity: Granularity) -> Result<u64> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let n = n as u64;
    Ok(match granularity {
        Granularity::Fine => 2 * n * (n - 1),
        Granularity::Coarse => 2 * n,
    })
}

pub fn synapse_utilization(used_cells: u64, n: u32) -> Result<f64> {
    let capacity = n as u64 * n as u64;
    if used_cells > capacity {
        return Err(Error::CountExceedsCapacity {
            used: used_cells,
            capacity,
        });
    }
    Ok(used_cells as f64 / capacity as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: u32, n_h: u32, n_l: u32, p: u32, q: u32) -> CrossbarSpec {
        CrossbarSpec::new(n, n_h, n_l, p, q, Control::Double).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(CrossbarSpec::new(4, 0, 0, 0, 2, Control::Double).is_err());
        assert!(CrossbarSpec::new(4, 0, 0, 5, 2, Control::Double).is_err());
        assert!(CrossbarSpec::new(4, 3, 2, 4, 4, Control::Double).is_err());
        assert!(CrossbarSpec::new(0, 0, 0, 1, 1, Control::Double).is_err());
        let b = CrossbarSpec::baseline(128).unwrap();
        assert!(!b.is_partitioned() && !b.has_regions());
    }

    #[test]
    fn regions_of_the_128_crossbar() {
        let s = spec(128, 64, 64, 128, 128);
        assert_eq!(region_of(Cell::new(0, 0), &s).unwrap().kind, RegionKind::A);
        assert_eq!(region_of(Cell::new(127, 127), &s).unwrap().kind, RegionKind::B);
        assert_eq!(region_of(Cell::new(0, 127), &s).unwrap().kind, RegionKind::C);
        assert!(matches!(
            region_of(Cell::new(128, 0), &s),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn permits_follows_region_rules() {
        let s = spec(128, 64, 64, 128, 128);
        assert!(!permits(Cell::new(0, 0), StateLabel::Lrs1, &s).unwrap());
        assert!(permits(Cell::new(0, 0), StateLabel::Hrs, &s).unwrap());
        assert!(!permits(Cell::new(100, 100), StateLabel::Hrs, &s).unwrap());
        assert!(permits(Cell::new(100, 100), StateLabel::Lrs1, &s).unwrap());
        for st in StateLabel::ALL {
            assert!(permits(Cell::new(0, 127), st, &s).unwrap());
        }
        // the LRS synapse cannot use bitlines 0 and 1 from wordline 0
        let small = spec(4, 2, 0, 4, 4);
        assert!(!permits(Cell::new(0, 0), StateLabel::Lrs1, &small).unwrap());
        assert!(!permits(Cell::new(0, 1), StateLabel::Lrs1, &small).unwrap());
        assert!(permits(Cell::new(0, 2), StateLabel::Lrs1, &small).unwrap());
    }

    #[test]
    fn configuration_table_4x4() {
        let s = spec(4, 0, 0, 3, 2);
        let dims: [(u32, u32); 4] = Configuration::ALL.map(|c| config_dimensions(c, &s).unwrap());
        assert_eq!(dims, [(3, 2), (4, 2), (3, 4), (4, 4)]);
        let weights = Configuration::ALL.map(|c| static_energy_weight(c, &s).unwrap());
        assert_eq!(weights, [6, 8, 12, 16]);
    }

    #[test]
    fn degenerate_partition_is_full_array() {
        let s = spec(16, 0, 0, 16, 16);
        for c in Configuration::ALL {
            assert_eq!(config_dimensions(c, &s).unwrap(), (16, 16));
            assert_eq!(static_energy_weight(c, &s).unwrap(), 256);
        }
        let s = spec(128, 0, 0, 96, 96);
        assert_eq!(static_energy_weight(Configuration::C00, &s).unwrap(), 9216);
    }

    #[test]
    fn single_control_only_allows_00_and_11() {
        let s = spec(4, 0, 0, 3, 2).with_control(Control::Single);
        assert!(config_dimensions(Configuration::C00, &s).is_ok());
        assert!(config_dimensions(Configuration::C11, &s).is_ok());
        assert_eq!(
            config_dimensions(Configuration::C01, &s),
            Err(Error::IllegalConfig("01"))
        );
        assert!(config_dimensions(Configuration::C10, &s).is_err());
    }

    #[test]
    fn configuration_bits_round_trip() {
        for c in Configuration::ALL {
            assert_eq!(Configuration::from_bits(c.wl_iso_ctrl(), c.bl_iso_ctrl()), c);
            assert_eq!(c.name().parse::<Configuration>().unwrap(), c);
        }
    }

    #[test]
    fn isolation_counts() {
        assert_eq!(isolation_transistor_count(4, Granularity::Fine).unwrap(), 24);
        assert_eq!(isolation_transistor_count(4, Granularity::Coarse).unwrap(), 8);
        assert_eq!(isolation_transistor_count(128, Granularity::Coarse).unwrap(), 256);
        assert_eq!(
            isolation_transistor_count(1, Granularity::Coarse),
            Err(Error::DimensionTooSmall(1))
        );
    }

    #[test]
    fn utilization_examples() {
        assert_eq!(synapse_utilization(4, 4).unwrap(), 0.25);
        assert_eq!(synapse_utilization(3, 4).unwrap(), 0.1875);
        assert_eq!(synapse_utilization(128, 128).unwrap(), 0.0078125);
        assert_eq!(synapse_utilization(0, 9).unwrap(), 0.0);
        assert!(matches!(
            synapse_utilization(17, 4),
            Err(Error::CountExceedsCapacity { .. })
        ));
    }

    #[test]
    fn path_names_are_one_based() {
        assert_eq!(Cell::new(0, 0).path_name(), "t_{1,1}");
        assert_eq!(Cell::new(3, 1).path_name(), "t_{4,2}");
    }
}

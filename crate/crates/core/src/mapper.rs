// SPDX-License-Identifier: Apache-2.0

//! Cluster-to-crossbar placement.
//!
//! The optimized mapper sorts neurons so that HRS-heavy ones take the low
//! rows and columns (the short paths, and region A when present), repairs any
//! region violations with bounded local search, then picks the cheapest
//! configuration that still contains every used cell. A seeded random mapper
//! is provided as a state-unaware control.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::crossbar::{
    config_contains, permits, static_energy_weight, synapse_utilization, Cell, Configuration,
    CrossbarSpec,
};
use crate::error::{Error, Result, Violation};
use crate::techmodel::{StateLabel, TechnologyParams};
use crate::workload::{Cluster, ClusterId, Network, NeuronId, Route, Synapse};

/// Row of every pre-synaptic and column of every post-synaptic neuron of a
/// cluster, indexed like `Cluster::pre_neurons` / `Cluster::post_neurons`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub row_of_pre: Vec<u32>,
    pub col_of_post: Vec<u32>,
}

impl Assignment {
    pub fn cell(&self, synapse: &Synapse) -> Cell {
        Cell::new(
            self.row_of_pre[synapse.pre as usize],
            self.col_of_post[synapse.post as usize],
        )
    }

    pub fn cells<'a>(&'a self, cluster: &'a Cluster) -> impl Iterator<Item = Cell> + 'a {
        cluster.synapses.iter().map(|s| self.cell(s))
    }
}

/// Homogeneous hardware: `crossbar_count` crossbars of one spec.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Hardware {
    pub crossbar_count: u32,
    pub spec: CrossbarSpec,
    pub tech: TechnologyParams,
}

impl Hardware {
    pub fn new(crossbar_count: u32, spec: CrossbarSpec, tech: TechnologyParams) -> Result<Self> {
        let hw = Hardware {
            crossbar_count,
            spec,
            tech,
        };
        hw.validate()?;
        Ok(hw)
    }

    pub fn validate(&self) -> Result<()> {
        if self.crossbar_count == 0 {
            return Err(Error::InvalidParams("need at least one crossbar".into()));
        }
        self.spec.validate()?;
        self.tech.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlacedSynapse {
    pub pre: NeuronId,
    pub post: NeuronId,
    pub state: StateLabel,
    pub cell: Cell,
}

/// One cluster placed on one crossbar.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossbarPlacement {
    pub id: u32,
    pub cluster: ClusterId,
    pub spec: CrossbarSpec,
    pub config: Configuration,
    pub row_of_pre: BTreeMap<NeuronId, u32>,
    pub col_of_post: BTreeMap<NeuronId, u32>,
    pub synapses: Vec<PlacedSynapse>,
}

impl CrossbarPlacement {
    /// Check region permits, cell injectivity, consistency with the neuron
    /// maps and containment in the active array.
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        let invalid = |reason: alloc::string::String| Error::Validation {
            locus: alloc::format!("crossbar {}", self.id),
            reason,
        };
        if !self.config.is_legal(self.spec.control) {
            return Err(Error::IllegalConfig(self.config.name()));
        }
        let mut used = BTreeMap::new();
        for s in &self.synapses {
            let row = self.row_of_pre.get(&s.pre).copied();
            let col = self.col_of_post.get(&s.post).copied();
            if row != Some(s.cell.row) || col != Some(s.cell.col) {
                return Err(invalid(alloc::format!(
                    "synapse {} -> {} at {} disagrees with the neuron maps",
                    s.pre,
                    s.post,
                    s.cell
                )));
            }
            if !permits(s.cell, s.state, &self.spec)? {
                return Err(Error::StateForbidden {
                    cell: s.cell,
                    state: s.state,
                });
            }
            if !config_contains(self.config, &self.spec, s.cell)? {
                let (rows, cols) = crate::crossbar::config_dimensions(self.config, &self.spec)?;
                return Err(Error::OutOfActiveRegion {
                    cell: s.cell,
                    rows,
                    cols,
                });
            }
            if used.insert(s.cell, ()).is_some() {
                return Err(invalid(alloc::format!("cell {} used twice", s.cell)));
            }
        }
        for (what, map) in [("row", &self.row_of_pre), ("column", &self.col_of_post)] {
            let mut seen = BTreeMap::new();
            for (neuron, &idx) in map {
                if idx >= self.spec.n {
                    return Err(invalid(alloc::format!("{what} {idx} of neuron {neuron} out of range")));
                }
                if seen.insert(idx, ()).is_some() {
                    return Err(invalid(alloc::format!("{what} {idx} assigned twice")));
                }
            }
        }
        Ok(())
    }

    pub fn utilization(&self) -> Result<f64> {
        synapse_utilization(self.synapses.len() as u64, self.spec.n)
    }

    pub fn static_weight(&self) -> Result<u64> {
        static_energy_weight(self.config, &self.spec)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlacementStats {
    /// Synapses in any LRS state.
    pub m: usize,
    /// Synapses in HRS.
    pub n_hrs: usize,
}

/// A mapped network. Crossbars beyond `crossbars.len()` are idle and fully
/// power-gated.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlacementSet {
    pub hardware: Hardware,
    pub crossbars: Vec<CrossbarPlacement>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub routes: Vec<Route>,
    pub stats: PlacementStats,
}

impl PlacementSet {
    pub fn validate(&self) -> Result<()> {
        self.hardware.validate()?;
        if self.crossbars.len() > self.hardware.crossbar_count as usize {
            return Err(Error::CapacityExceeded {
                clusters: self.crossbars.len(),
                crossbars: self.hardware.crossbar_count,
            });
        }
        for xbar in &self.crossbars {
            xbar.validate()?;
        }
        if self.stats != stats_of(&self.crossbars) {
            return Err(Error::Validation {
                locus: "placement stats".into(),
                reason: "m / n_hrs disagree with the placed synapses".into(),
            });
        }
        Ok(())
    }

    pub fn idle_crossbars(&self) -> u32 {
        self.hardware.crossbar_count - self.crossbars.len() as u32
    }

    /// Number of used crossbars per configuration, in `Configuration::ALL` order.
    pub fn config_histogram(&self) -> [usize; 4] {
        let mut hist = [0; 4];
        for xbar in &self.crossbars {
            hist[xbar.config as usize] += 1;
        }
        hist
    }

    pub fn count_config(&self, config: Configuration) -> usize {
        self.config_histogram()[config as usize]
    }

    pub fn synapse_count(&self) -> usize {
        self.crossbars.iter().map(|x| x.synapses.len()).sum()
    }
}

fn stats_of(crossbars: &[CrossbarPlacement]) -> PlacementStats {
    let mut stats = PlacementStats::default();
    for s in crossbars.iter().flat_map(|x| &x.synapses) {
        if s.state == StateLabel::Hrs {
            stats.n_hrs += 1;
        } else {
            stats.m += 1;
        }
    }
    stats
}

/// Which state region an index falls in along either axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Band {
    Low,
    Mid,
    High,
}

impl Band {
    fn of(idx: u32, spec: &CrossbarSpec) -> Band {
        if idx < spec.n_h {
            Band::Low
        } else if idx >= spec.n - spec.n_l {
            Band::High
        } else {
            Band::Mid
        }
    }
}

fn violates(row: Band, col: Band, state: StateLabel) -> bool {
    match (row, col) {
        (Band::Low, Band::Low) => state != StateLabel::Hrs,
        (Band::High, Band::High) => state != StateLabel::Lrs1,
        _ => false,
    }
}

/// Violations each neuron would incur in each band, given the other axis.
type BandCost = [u32; 3];

fn band_index(b: Band) -> usize {
    b as usize
}

fn row_costs(cluster: &Cluster, cols: &[u32], spec: &CrossbarSpec) -> Vec<BandCost> {
    let mut cost = vec![[0; 3]; cluster.pre_neurons.len()];
    for s in &cluster.synapses {
        let col = Band::of(cols[s.post as usize], spec);
        for row in [Band::Low, Band::Mid, Band::High] {
            cost[s.pre as usize][band_index(row)] += u32::from(violates(row, col, s.state));
        }
    }
    cost
}

fn col_costs(cluster: &Cluster, rows: &[u32], spec: &CrossbarSpec) -> Vec<BandCost> {
    let mut cost = vec![[0; 3]; cluster.post_neurons.len()];
    for s in &cluster.synapses {
        let row = Band::of(rows[s.pre as usize], spec);
        for col in [Band::Low, Band::Mid, Band::High] {
            cost[s.post as usize][band_index(col)] += u32::from(violates(row, col, s.state));
        }
    }
    cost
}

fn owners(pos: &[u32], n: u32) -> Vec<Option<usize>> {
    let mut owner = vec![None; n as usize];
    for (i, &p) in pos.iter().enumerate() {
        owner[p as usize] = Some(i);
    }
    owner
}

/// Best-improvement swaps along one axis. Each pass evaluates at most `2 N^2`
/// candidate swaps and applies the best one.
fn repair_swaps(pos: &mut [u32], cost: &[BandCost], spec: &CrossbarSpec) {
    let n = spec.n;
    let budget = 2 * n as u64 * n as u64;
    let mut owner = owners(pos, n);
    let at = |i: usize, p: u32| cost[i][band_index(Band::of(p, spec))] as i64;
    for _ in 0..2 * n {
        let mut evals = 0u64;
        let mut best: Option<(i64, usize, u32)> = None;
        'scan: for (i, &here) in pos.iter().enumerate() {
            let current = at(i, here);
            if current == 0 {
                continue;
            }
            for j in 0..n {
                if j == here {
                    continue;
                }
                if evals >= budget {
                    break 'scan;
                }
                evals += 1;
                let mut delta = at(i, j) - current;
                if let Some(k) = owner[j as usize] {
                    delta += at(k, here) - at(k, j);
                }
                if delta < best.map_or(0, |b| b.0) {
                    best = Some((delta, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        let here = pos[i];
        if let Some(k) = owner[j as usize] {
            pos[k] = here;
        }
        owner[here as usize] = owner[j as usize];
        owner[j as usize] = Some(i);
        pos[i] = j;
    }
}

/// Move each still-violating neuron to the first free index `>= N_h` where it
/// has no violations.
fn shift_violators(pos: &mut [u32], cost: &[BandCost], spec: &CrossbarSpec) {
    let mut owner = owners(pos, spec.n);
    for i in 0..pos.len() {
        if cost[i][band_index(Band::of(pos[i], spec))] == 0 {
            continue;
        }
        let target = (spec.n_h..spec.n).find(|&j| {
            owner[j as usize].is_none() && cost[i][band_index(Band::of(j, spec))] == 0
        });
        if let Some(j) = target {
            owner[pos[i] as usize] = None;
            owner[j as usize] = Some(i);
            pos[i] = j;
        }
    }
}

fn check_size(cluster: &Cluster, spec: &CrossbarSpec) -> Result<()> {
    let (pre, post) = (cluster.pre_neurons.len(), cluster.post_neurons.len());
    if pre > spec.n as usize || post > spec.n as usize {
        return Err(Error::ClusterTooLarge {
            cluster: cluster.id,
            pre,
            post,
            n: spec.n,
        });
    }
    Ok(())
}

/// Synapses of `cluster` whose assigned cell does not permit their state.
pub fn violations(cluster: &Cluster, assignment: &Assignment, spec: &CrossbarSpec) -> Vec<Violation> {
    cluster
        .synapses
        .iter()
        .filter_map(|s| {
            let cell = assignment.cell(s);
            let ok = permits(cell, s.state, spec).unwrap_or(false);
            (!ok).then(|| Violation {
                pre: cluster.pre_neurons[s.pre as usize],
                post: cluster.post_neurons[s.post as usize],
                state: s.state,
                cell,
            })
        })
        .collect()
}

/// Rank neurons by descending HRS-synapse count, lower index first on ties.
fn hrs_rank(count: usize, key: impl Fn(&Synapse) -> u32, synapses: &[Synapse]) -> Vec<u32> {
    let mut hrs = vec![0u32; count];
    for s in synapses.iter().filter(|s| s.state == StateLabel::Hrs) {
        hrs[key(s) as usize] += 1;
    }
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| hrs[b].cmp(&hrs[a]).then(a.cmp(&b)));
    let mut pos = vec![0; count];
    for (rank, &i) in order.iter().enumerate() {
        pos[i] = rank as u32;
    }
    pos
}

/// Region-aware, deterministic row/column assignment of one cluster.
pub fn assign_cluster(cluster: &Cluster, spec: &CrossbarSpec) -> Result<Assignment> {
    spec.validate()?;
    cluster.validate()?;
    check_size(cluster, spec)?;
    let mut a = Assignment {
        row_of_pre: hrs_rank(cluster.pre_neurons.len(), |s| s.pre, &cluster.synapses),
        col_of_post: hrs_rank(cluster.post_neurons.len(), |s| s.post, &cluster.synapses),
    };
    if violations(cluster, &a, spec).is_empty() {
        return Ok(a);
    }

    let cost = row_costs(cluster, &a.col_of_post, spec);
    repair_swaps(&mut a.row_of_pre, &cost, spec);
    let cost = col_costs(cluster, &a.row_of_pre, spec);
    repair_swaps(&mut a.col_of_post, &cost, spec);

    let cost = row_costs(cluster, &a.col_of_post, spec);
    shift_violators(&mut a.row_of_pre, &cost, spec);
    let cost = col_costs(cluster, &a.row_of_pre, spec);
    shift_violators(&mut a.col_of_post, &cost, spec);

    let left = violations(cluster, &a, spec);
    if left.is_empty() {
        Ok(a)
    } else {
        Err(Error::Infeasible {
            cluster: cluster.id,
            violations: left,
        })
    }
}

/// State-unaware control: rows and columns drawn by a seeded shuffle of all
/// `N` indices. Only defined for specs without state regions.
pub fn assign_cluster_random(
    cluster: &Cluster,
    spec: &CrossbarSpec,
    rng: &mut impl rand::Rng,
) -> Result<Assignment> {
    spec.validate()?;
    cluster.validate()?;
    if spec.has_regions() {
        return Err(Error::InvalidSpec(
            "the random control mapper requires N_h = N_l = 0".into(),
        ));
    }
    check_size(cluster, spec)?;
    let mut draw = |count: usize| {
        let mut idx: Vec<u32> = (0..spec.n).collect();
        idx.shuffle(rng);
        idx.truncate(count);
        idx
    };
    let row_of_pre = draw(cluster.pre_neurons.len());
    let col_of_post = draw(cluster.post_neurons.len());
    Ok(Assignment {
        row_of_pre,
        col_of_post,
    })
}

/// Cheapest legal configuration containing every cell. Equal weights (only
/// possible when dimensions coincide) resolve to the later configuration in
/// `00, 01, 10, 11` order.
pub fn select_configuration<I>(cells: I, spec: &CrossbarSpec) -> Configuration
where
    I: IntoIterator<Item = Cell>,
{
    let (mut rows, mut cols) = (0, 0);
    for c in cells {
        rows = rows.max(c.row + 1);
        cols = cols.max(c.col + 1);
    }
    let bbox = Cell::new(rows.saturating_sub(1), cols.saturating_sub(1));
    let mut best = Configuration::C11;
    let mut best_weight = u64::MAX;
    for config in Configuration::ALL {
        let Ok(weight) = static_energy_weight(config, spec) else {
            continue;
        };
        if config_contains(config, spec, bbox).unwrap_or(false) && weight <= best_weight {
            best = config;
            best_weight = weight;
        }
    }
    best
}

fn place_cluster(
    id: u32,
    cluster: &Cluster,
    spec: &CrossbarSpec,
    a: &Assignment,
) -> CrossbarPlacement {
    let config = select_configuration(a.cells(cluster), spec);
    CrossbarPlacement {
        id,
        cluster: cluster.id,
        spec: *spec,
        config,
        row_of_pre: cluster
            .pre_neurons
            .iter()
            .copied()
            .zip(a.row_of_pre.iter().copied())
            .collect(),
        col_of_post: cluster
            .post_neurons
            .iter()
            .copied()
            .zip(a.col_of_post.iter().copied())
            .collect(),
        synapses: cluster
            .synapses
            .iter()
            .map(|s| PlacedSynapse {
                pre: cluster.pre_neurons[s.pre as usize],
                post: cluster.post_neurons[s.post as usize],
                state: s.state,
                cell: a.cell(s),
            })
            .collect(),
    }
}

fn map_with(
    network: &Network,
    hardware: &Hardware,
    mut assign: impl FnMut(&Cluster) -> Result<Assignment>,
) -> Result<PlacementSet> {
    hardware.validate()?;
    network.validate()?;
    if network.clusters.len() > hardware.crossbar_count as usize {
        return Err(Error::CapacityExceeded {
            clusters: network.clusters.len(),
            crossbars: hardware.crossbar_count,
        });
    }
    let mut order: Vec<&Cluster> = network.clusters.iter().collect();
    order.sort_by(|a, b| b.synapses.len().cmp(&a.synapses.len()).then(a.id.cmp(&b.id)));
    let mut crossbars = Vec::with_capacity(order.len());
    for (id, cluster) in order.into_iter().enumerate() {
        let a = assign(cluster)?;
        crossbars.push(place_cluster(id as u32, cluster, &hardware.spec, &a));
    }
    let stats = stats_of(&crossbars);
    Ok(PlacementSet {
        hardware: hardware.clone(),
        crossbars,
        routes: network.routes.clone(),
        stats,
    })
}

/// Map every cluster onto its own crossbar, largest clusters first.
pub fn map_network(network: &Network, hardware: &Hardware) -> Result<PlacementSet> {
    map_with(network, hardware, |c| assign_cluster(c, &hardware.spec))
}

/// [`map_network`] with the seeded random control assignment.
pub fn map_network_control(network: &Network, hardware: &Hardware, seed: u64) -> Result<PlacementSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    map_with(network, hardware, |c| {
        assign_cluster_random(c, &hardware.spec, &mut rng)
    })
}

// SPDX-License-Identifier: Apache-2.0

//! SNN workloads: clusters of state-quantized synapses, inter-cluster routes
//! and spike trains, plus a seeded synthetic generator.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;

use crate::error::{Error, Result};
use crate::techmodel::{StateLabel, StateTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct NeuronId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct ClusterId(pub u32);

impl fmt::Display for NeuronId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ClusterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A synapse between `pre_neurons[pre]` and `post_neurons[post]` of its cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Synapse {
    pub pre: u32,
    pub post: u32,
    pub state: StateLabel,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cluster {
    pub id: ClusterId,
    #[cfg_attr(feature = "serde", serde(rename = "pre"))]
    pub pre_neurons: Vec<NeuronId>,
    #[cfg_attr(feature = "serde", serde(rename = "post"))]
    pub post_neurons: Vec<NeuronId>,
    pub synapses: Vec<Synapse>,
}

impl Cluster {
    pub fn validate(&self) -> Result<()> {
        let locus = || format!("cluster {}", self.id);
        let invalid = |reason: String| Error::Validation {
            locus: locus(),
            reason,
        };
        if self.synapses.is_empty() {
            return Err(invalid("cluster has no synapses".into()));
        }
        let mut seen = BTreeSet::new();
        for n in &self.pre_neurons {
            if !seen.insert(n) {
                return Err(invalid(format!("pre-synaptic neuron {n} listed twice")));
            }
        }
        let mut seen = BTreeSet::new();
        for n in &self.post_neurons {
            if !seen.insert(n) {
                return Err(invalid(format!("post-synaptic neuron {n} listed twice")));
            }
        }
        let mut pairs = BTreeSet::new();
        for (i, s) in self.synapses.iter().enumerate() {
            if s.pre as usize >= self.pre_neurons.len() || s.post as usize >= self.post_neurons.len()
            {
                return Err(invalid(format!(
                    "synapse {i} references ({}, {}) outside {} pre x {} post neurons",
                    s.pre,
                    s.post,
                    self.pre_neurons.len(),
                    self.post_neurons.len()
                )));
            }
            if !pairs.insert((s.pre, s.post)) {
                return Err(invalid(format!(
                    "duplicate synapse between pre {} and post {}",
                    s.pre, s.post
                )));
            }
        }
        Ok(())
    }

    pub fn count_state(&self, state: StateLabel) -> usize {
        self.synapses.iter().filter(|s| s.state == state).count()
    }

    pub fn contains_neuron(&self, neuron: NeuronId) -> bool {
        self.pre_neurons.contains(&neuron) || self.post_neurons.contains(&neuron)
    }
}

/// Spikes of `src_neuron` travel `hops` switch hops to `dst_neuron`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Route {
    pub src_cluster: ClusterId,
    pub src_neuron: NeuronId,
    pub dst_cluster: ClusterId,
    pub dst_neuron: NeuronId,
    pub hops: u32,
}

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Network {
    pub clusters: Vec<Cluster>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub routes: Vec<Route>,
}

impl Network {
    pub fn validate(&self) -> Result<()> {
        let mut by_id = BTreeMap::new();
        for c in &self.clusters {
            c.validate()?;
            if by_id.insert(c.id, c).is_some() {
                return Err(Error::Validation {
                    locus: format!("cluster {}", c.id),
                    reason: "duplicate cluster id".into(),
                });
            }
        }
        for (i, r) in self.routes.iter().enumerate() {
            let invalid = |reason: String| Error::Validation {
                locus: format!("route {i}"),
                reason,
            };
            if r.hops == 0 {
                return Err(invalid("hops must be at least 1".into()));
            }
            for (cluster, neuron) in [(r.src_cluster, r.src_neuron), (r.dst_cluster, r.dst_neuron)] {
                let c = by_id
                    .get(&cluster)
                    .ok_or_else(|| invalid(format!("unknown cluster {cluster}")))?;
                if !c.contains_neuron(neuron) {
                    return Err(invalid(format!("neuron {neuron} is not in cluster {cluster}")));
                }
            }
        }
        Ok(())
    }

    pub fn synapse_count(&self) -> usize {
        self.clusters.iter().map(|c| c.synapses.len()).sum()
    }

    /// Every neuron id appearing in any cluster, ascending.
    pub fn neurons(&self) -> BTreeSet<NeuronId> {
        self.clusters
            .iter()
            .flat_map(|c| c.pre_neurons.iter().chain(&c.post_neurons).copied())
            .collect()
    }
}

/// Firing times of one neuron in seconds, strictly increasing.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpikeTrain {
    pub neuron: NeuronId,
    pub times: Vec<f64>,
}

impl SpikeTrain {
    pub fn new(neuron: NeuronId, times: Vec<f64>) -> Result<Self> {
        let train = SpikeTrain { neuron, times };
        train.validate()?;
        Ok(train)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: &str| Error::Validation {
            locus: format!("spike train of neuron {}", self.neuron),
            reason: reason.into(),
        };
        if self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(invalid("spike times must be finite and non-negative"));
        }
        if self.times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("spike times must be strictly increasing"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Map each positive conductance to the state with the nearest conductance
/// `1 / R`. Ties go to the lower-resistance state.
pub fn quantize_weights(weights: &[f64], states: &StateTable) -> Result<Vec<StateLabel>> {
    let levels: Vec<(StateLabel, f64)> = states.iter().map(|s| (s.label, 1.0 / s.ohms)).collect();
    let scale = levels.iter().map(|(_, g)| *g).fold(0.0, f64::max);
    // distances closer than this are a tie (midpoints are not exact in binary)
    let tie_eps = scale * 1e-12;
    weights
        .iter()
        .map(|&w| {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::NonPositiveWeight(w));
            }
            let mut best = levels[0];
            let mut best_dist = (w - best.1).abs();
            for &(label, g) in &levels[1..] {
                let d = (w - g).abs();
                // levels are visited lowest resistance first, so a tie keeps `best`
                if d < best_dist - tie_eps {
                    best = (label, g);
                    best_dist = d;
                }
            }
            Ok(best.0)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticParams {
    pub clusters: usize,
    /// Inclusive range of pre-synaptic neurons per cluster.
    pub pre_range: (u32, u32),
    /// Inclusive range of post-synaptic neurons per cluster.
    pub post_range: (u32, u32),
    pub density: f64,
    /// Probability of LRS1, LRS2, LRS3, HRS.
    pub state_mix: [f64; 4],
    /// Mean firing rate of every neuron, Hz.
    pub spike_rate: f64,
    /// Trace length, seconds.
    pub duration: f64,
    pub max_hops: u32,
    pub seed: u64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        SyntheticParams {
            clusters: 20,
            pre_range: (8, 64),
            post_range: (8, 64),
            density: 0.2,
            state_mix: [0.4, 0.15, 0.15, 0.3],
            spike_rate: 30.0,
            duration: 1.0,
            max_hops: 4,
            seed: 0,
        }
    }
}

impl SyntheticParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.clusters == 0 {
            return bad("need at least one cluster".into());
        }
        for (name, (lo, hi)) in [("pre_range", self.pre_range), ("post_range", self.post_range)] {
            if lo == 0 || lo > hi {
                return bad(format!("{name} must satisfy 1 <= min <= max, got {lo}..{hi}"));
            }
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return bad(format!("density must be in (0, 1], got {}", self.density));
        }
        if self.state_mix.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return bad("state_mix entries must be non-negative".into());
        }
        let sum: f64 = self.state_mix.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return bad(format!("state_mix must sum to 1, got {sum}"));
        }
        if !(self.spike_rate.is_finite() && self.spike_rate >= 0.0) {
            return bad("spike_rate must be non-negative".into());
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return bad("duration must be positive".into());
        }
        if self.max_hops == 0 {
            return bad("max_hops must be at least 1".into());
        }
        Ok(())
    }
}

/// Seeded random network and Poisson spike trains for every neuron.
///
/// Cluster `k` routes every one of its pre-synaptic neurons from a random
/// post-synaptic neuron of cluster `k - 1`.
pub fn generate_synthetic(params: &SyntheticParams) -> Result<(Network, Vec<SpikeTrain>)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mix = WeightedIndex::new(params.state_mix)
        .map_err(|e| Error::InvalidParams(format!("state_mix: {e}")))?;

    let mut next_id = 0u32;
    let mut clusters = Vec::with_capacity(params.clusters);
    for k in 0..params.clusters {
        let pre_count = rng.random_range(params.pre_range.0..=params.pre_range.1);
        let post_count = rng.random_range(params.post_range.0..=params.post_range.1);
        let pre_neurons: Vec<NeuronId> = (next_id..next_id + pre_count).map(NeuronId).collect();
        next_id += pre_count;
        let post_neurons: Vec<NeuronId> = (next_id..next_id + post_count).map(NeuronId).collect();
        next_id += post_count;

        let mut synapses = Vec::new();
        for pre in 0..pre_count {
            for post in 0..post_count {
                if params.density >= 1.0 || rng.random::<f64>() < params.density {
                    let state = StateLabel::ALL[mix.sample(&mut rng)];
                    synapses.push(Synapse { pre, post, state });
                }
            }
        }
        if synapses.is_empty() {
            let state = StateLabel::ALL[mix.sample(&mut rng)];
            synapses.push(Synapse {
                pre: rng.random_range(0..pre_count),
                post: rng.random_range(0..post_count),
                state,
            });
        }
        clusters.push(Cluster {
            id: ClusterId(k as u32),
            pre_neurons,
            post_neurons,
            synapses,
        });
    }

    let mut routes = Vec::new();
    for k in 1..clusters.len() {
        let (src, dst) = (&clusters[k - 1], &clusters[k]);
        for &dst_neuron in &dst.pre_neurons {
            let src_neuron = src.post_neurons[rng.random_range(0..src.post_neurons.len())];
            routes.push(Route {
                src_cluster: src.id,
                src_neuron,
                dst_cluster: dst.id,
                dst_neuron,
                hops: rng.random_range(1..=params.max_hops),
            });
        }
    }

    let network = Network { clusters, routes };
    let neurons: Vec<NeuronId> = network.neurons().into_iter().collect();
    let trains = poisson_trains(&neurons, params.spike_rate, params.duration, &mut rng)?;
    Ok((network, trains))
}

/// Independent Poisson trains on `[0, duration)` with exponential inter-arrival
/// times at `rate` Hz.
pub fn poisson_trains<R: Rng>(
    neurons: &[NeuronId],
    rate: f64,
    duration: f64,
    rng: &mut R,
) -> Result<Vec<SpikeTrain>> {
    if !(rate.is_finite() && rate >= 0.0) || !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidParams(
            "rate must be non-negative and duration positive".into(),
        ));
    }
    let mut trains = Vec::with_capacity(neurons.len());
    if rate == 0.0 {
        return Ok(neurons
            .iter()
            .map(|&neuron| SpikeTrain {
                neuron,
                times: Vec::new(),
            })
            .collect());
    }
    let gap = Exp::new(rate).map_err(|e| Error::InvalidParams(format!("rate: {e}")))?;
    for &neuron in neurons {
        let mut times = Vec::new();
        let mut t = gap.sample(rng);
        while t < duration {
            if times.last().is_none_or(|&last| t > last) {
                times.push(t);
            }
            t += gap.sample(rng);
        }
        trains.push(SpikeTrain { neuron, times });
    }
    Ok(trains)
}

/// A monolithic layer: pre-synaptic neuron `i` has id `i`, post-synaptic
/// neuron `j` has id `pre_count + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub pre_count: u32,
    pub post_count: u32,
    pub synapses: Vec<Synapse>,
}

/// Tile a layer into `n x n` blocks and emit one cluster per non-empty block.
pub fn partition_simple(layer: &Layer, n: u32) -> Result<Vec<Cluster>> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let invalid = |reason: String| Error::Validation {
        locus: "layer".into(),
        reason,
    };
    if layer.synapses.is_empty() {
        return Err(invalid("layer has no synapses".into()));
    }
    let mut tiles: BTreeMap<(u32, u32), Vec<Synapse>> = BTreeMap::new();
    for s in &layer.synapses {
        if s.pre >= layer.pre_count || s.post >= layer.post_count {
            return Err(invalid(format!(
                "synapse ({}, {}) outside {} x {}",
                s.pre, s.post, layer.pre_count, layer.post_count
            )));
        }
        tiles.entry((s.pre / n, s.post / n)).or_default().push(*s);
    }

    let mut clusters = Vec::with_capacity(tiles.len());
    for (k, tile) in tiles.into_values().enumerate() {
        let pres: BTreeSet<u32> = tile.iter().map(|s| s.pre).collect();
        let posts: BTreeSet<u32> = tile.iter().map(|s| s.post).collect();
        let pre_index: BTreeMap<u32, u32> =
            pres.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
        let post_index: BTreeMap<u32, u32> =
            posts.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
        let cluster = Cluster {
            id: ClusterId(k as u32),
            pre_neurons: pres.iter().map(|&p| NeuronId(p)).collect(),
            post_neurons: posts
                .iter()
                .map(|&p| NeuronId(layer.pre_count + p))
                .collect(),
            synapses: tile
                .iter()
                .map(|s| Synapse {
                    pre: pre_index[&s.pre],
                    post: post_index[&s.post],
                    state: s.state,
                })
                .collect(),
        };
        cluster.validate()?;
        clusters.push(cluster);
    }
    Ok(clusters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn one_cluster(synapses: Vec<Synapse>) -> Cluster {
        Cluster {
            id: ClusterId(0),
            pre_neurons: vec![NeuronId(0), NeuronId(1)],
            post_neurons: vec![NeuronId(2)],
            synapses,
        }
    }

    #[test]
    fn duplicate_synapse_is_rejected() {
        let s = Synapse {
            pre: 0,
            post: 0,
            state: StateLabel::Hrs,
        };
        let c = one_cluster(vec![s, s]);
        assert!(matches!(c.validate(), Err(Error::Validation { .. })));
        assert!(one_cluster(vec![]).validate().is_err());
        assert!(one_cluster(vec![s]).validate().is_ok());
    }

    #[test]
    fn route_validation() {
        let s = Synapse {
            pre: 0,
            post: 0,
            state: StateLabel::Hrs,
        };
        let mut net = Network {
            clusters: vec![one_cluster(vec![s])],
            routes: vec![Route {
                src_cluster: ClusterId(0),
                src_neuron: NeuronId(2),
                dst_cluster: ClusterId(0),
                dst_neuron: NeuronId(0),
                hops: 1,
            }],
        };
        net.validate().unwrap();
        net.routes[0].hops = 0;
        assert!(net.validate().is_err());
        net.routes[0].hops = 2;
        net.routes[0].dst_neuron = NeuronId(9);
        assert!(net.validate().is_err());
    }

    #[test]
    fn quantize_exact_levels() {
        let t = StateTable::OXRRAM;
        let q = quantize_weights(&[1.0 / 73_000.0, 1.0 / 1_500.0], &t).unwrap();
        assert_eq!(q, vec![StateLabel::Hrs, StateLabel::Lrs1]);
    }

    #[test]
    fn quantize_midpoint_goes_to_lower_resistance() {
        let t = StateTable::OXRRAM;
        let (g2, g3): (f64, f64) = (1.0 / 5_780.0, 1.0 / 13_600.0);
        let mid = (g2 + g3) / 2.0;
        // the two distances agree to rounding
        assert!(((mid - g2).abs() - (mid - g3).abs()).abs() < 1e-18);
        assert_eq!(quantize_weights(&[mid], &t).unwrap(), vec![StateLabel::Lrs2]);
    }

    #[test]
    fn quantize_rejects_non_positive() {
        let t = StateTable::OXRRAM;
        assert_eq!(
            quantize_weights(&[1e-4, 0.0], &t),
            Err(Error::NonPositiveWeight(0.0))
        );
        assert!(quantize_weights(&[-1.0], &t).is_err());
    }

    #[test]
    fn synthetic_is_deterministic() {
        let p = SyntheticParams {
            clusters: 5,
            seed: 7,
            ..Default::default()
        };
        let a = generate_synthetic(&p).unwrap();
        let b = generate_synthetic(&p).unwrap();
        assert_eq!(a, b);
        a.0.validate().unwrap();
        for t in &a.1 {
            t.validate().unwrap();
        }
        let c = generate_synthetic(&SyntheticParams { seed: 8, ..p }).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn full_density_is_complete_bipartite() {
        let p = SyntheticParams {
            clusters: 3,
            pre_range: (3, 6),
            post_range: (2, 5),
            density: 1.0,
            ..Default::default()
        };
        let (net, _) = generate_synthetic(&p).unwrap();
        for c in &net.clusters {
            assert_eq!(c.synapses.len(), c.pre_neurons.len() * c.post_neurons.len());
        }
    }

    #[test]
    fn state_mix_all_hrs() {
        let p = SyntheticParams {
            clusters: 4,
            state_mix: [0.0, 0.0, 0.0, 1.0],
            ..Default::default()
        };
        let (net, _) = generate_synthetic(&p).unwrap();
        let hrs: usize = net.clusters.iter().map(|c| c.count_state(StateLabel::Hrs)).sum();
        assert_eq!(hrs, net.synapse_count());
    }

    #[test]
    fn synthetic_rejects_bad_params() {
        let base = SyntheticParams::default();
        for bad in [
            SyntheticParams {
                density: 0.0,
                ..base.clone()
            },
            SyntheticParams {
                density: 1.5,
                ..base.clone()
            },
            SyntheticParams {
                state_mix: [0.5, 0.5, 0.5, 0.0],
                ..base.clone()
            },
            SyntheticParams {
                pre_range: (5, 2),
                ..base.clone()
            },
        ] {
            assert!(matches!(generate_synthetic(&bad), Err(Error::InvalidParams(_))));
        }
    }

    #[test]
    fn poisson_rate_is_roughly_right() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let neurons: Vec<NeuronId> = (0..200).map(NeuronId).collect();
        let trains = poisson_trains(&neurons, 30.0, 2.0, &mut rng).unwrap();
        let total: usize = trains.iter().map(|t| t.len()).sum();
        let mean = total as f64 / 200.0;
        assert!((mean - 60.0).abs() < 3.0, "mean spikes {mean}");
        assert!(trains.iter().all(|t| t.times.iter().all(|&x| x < 2.0)));
    }

    #[test]
    fn partition_single_small_neuron() {
        let layer = Layer {
            pre_count: 4,
            post_count: 1,
            synapses: (0..4)
                .map(|pre| Synapse {
                    pre,
                    post: 0,
                    state: StateLabel::Lrs1,
                })
                .collect(),
        };
        assert_eq!(partition_simple(&layer, 4).unwrap().len(), 1);
    }

    #[test]
    fn partition_wide_neuron_needs_two_clusters() {
        let layer = Layer {
            pre_count: 130,
            post_count: 1,
            synapses: (0..130)
                .map(|pre| Synapse {
                    pre,
                    post: 0,
                    state: StateLabel::Hrs,
                })
                .collect(),
        };
        let clusters = partition_simple(&layer, 128).unwrap();
        assert_eq!(clusters.len(), 2);
        let pre_total: usize = clusters.iter().map(|c| c.pre_neurons.len()).sum();
        assert!(pre_total >= 130);
        assert!(clusters.iter().all(|c| c.pre_neurons.len() <= 128));
        assert_eq!(clusters[1].post_neurons, vec![NeuronId(130)]);
    }

    #[test]
    fn partition_rejects_empty_layer() {
        let layer = Layer {
            pre_count: 3,
            post_count: 3,
            synapses: vec![],
        };
        assert!(matches!(
            partition_simple(&layer, 4),
            Err(Error::Validation { .. })
        ));
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Event-level evaluation of a placement: spike propagation through the
//! modeled current paths, integrate-and-fire output neurons, ISI statistics,
//! latency statistics and the energy ledger.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::crossbar::{config_dimensions, permits, static_energy_weight, Cell, Configuration, CrossbarSpec};
use crate::error::{Error, Result};
use crate::mapper::{CrossbarPlacement, PlacementSet};
use crate::techmodel::{path_latency, path_latency_unchecked, PathLatency, StateLabel, TechnologyParams};
use crate::workload::{NeuronId, Route, SpikeTrain};

/// Integrate-and-fire neuron with linear leak and reset to zero.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IfNeuron {
    pub v_threshold: f64,
    /// Potential added per arriving spike, indexed like `StateLabel::ALL`.
    pub v_increment_per_state: [f64; 4],
    pub leak_per_second: f64,
    pub refractory: f64,
}

impl Default for IfNeuron {
    /// Threshold 1, increments proportional to state conductance with LRS1
    /// at 0.8, no leak, no refractory period.
    fn default() -> Self {
        let table = crate::techmodel::StateTable::OXRRAM;
        let lrs1 = table.ohms(StateLabel::Lrs1);
        IfNeuron {
            v_threshold: 1.0,
            v_increment_per_state: StateLabel::ALL.map(|s| 0.8 * lrs1 / table.ohms(s)),
            leak_per_second: 0.0,
            refractory: 0.0,
        }
    }
}

impl IfNeuron {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        let non_negative = |x: f64| x.is_finite() && x >= 0.0;
        if !positive(self.v_threshold)
            || !self.v_increment_per_state.iter().all(|&v| positive(v))
            || !non_negative(self.leak_per_second)
            || !non_negative(self.refractory)
        {
            return Err(Error::InvalidParams(
                "neuron needs positive threshold and increments, non-negative leak and refractory".into(),
            ));
        }
        Ok(())
    }

    pub fn increment(&self, state: StateLabel) -> f64 {
        self.v_increment_per_state[state.index()]
    }
}

/// A spike reaching a post-synaptic neuron through a synapse in `state`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arrival {
    pub time: f64,
    pub state: StateLabel,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LatencyStats {
    pub best: f64,
    pub worst: f64,
    pub diff: f64,
    /// `best / worst`, 1 when every latency is zero.
    pub ratio: f64,
    pub mean: f64,
}

impl LatencyStats {
    pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Result<Self> {
        let (mut best, mut worst, mut sum, mut count) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
        for v in values {
            best = best.min(v);
            worst = worst.max(v);
            sum += v;
            count += 1;
        }
        if count == 0 {
            return Err(Error::EmptyPlacement);
        }
        let mean = (sum / count as f64).clamp(best, worst);
        Ok(Self::from_extremes(best, worst, mean))
    }

    fn from_extremes(best: f64, worst: f64, mean: f64) -> Self {
        LatencyStats {
            best,
            worst,
            diff: worst - best,
            ratio: if worst > 0.0 { best / worst } else { 1.0 },
            mean,
        }
    }

    /// `1 - ratio`: 0 when every path is equally fast.
    pub fn spread(&self) -> f64 {
        1.0 - self.ratio
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossbarLatency {
    pub crossbar: u32,
    pub config: Configuration,
    /// Over the placed synapses.
    pub synapses: LatencyStats,
    /// Over every active cell and permitted state.
    pub corners: LatencyStats,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LatencyReport {
    pub per_crossbar: Vec<CrossbarLatency>,
    pub aggregate: LatencyStats,
    pub corners: LatencyStats,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergyReport {
    pub static_j: f64,
    pub spike_j: f64,
    pub routing_j: f64,
    pub access_overhead_j: f64,
    pub total_j: f64,
}

/// Spike activity over an observation window.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Activity {
    pub spike_counts: BTreeMap<NeuronId, u64>,
    /// Sum over routes of source spikes times hop count.
    pub routed_spike_hops: u64,
    /// Seconds.
    pub duration: f64,
}

impl Activity {
    pub fn from_trains(trains: &[SpikeTrain], routes: &[Route], duration: f64) -> Self {
        let mut spike_counts = BTreeMap::new();
        for t in trains {
            *spike_counts.entry(t.neuron).or_insert(0) += t.len() as u64;
        }
        let routed_spike_hops = routes
            .iter()
            .map(|r| spike_counts.get(&r.src_neuron).copied().unwrap_or(0) * u64::from(r.hops))
            .sum();
        Activity {
            spike_counts,
            routed_spike_hops,
            duration,
        }
    }

    pub fn total_spikes(&self) -> u64 {
        self.spike_counts.values().sum()
    }

    pub fn spikes_of(&self, neuron: NeuronId) -> u64 {
        self.spike_counts.get(&neuron).copied().unwrap_or(0)
    }
}

/// Delayed spike times seen at the far end of one synapse.
#[derive(Clone, Debug, PartialEq)]
pub struct SynapseArrivals {
    pub crossbar: u32,
    pub pre: NeuronId,
    pub post: NeuronId,
    pub state: StateLabel,
    pub cell: Cell,
    pub latency: PathLatency,
    pub times: Vec<f64>,
}

/// Input and output ISI of one post-synaptic neuron's merged spike stream.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IsiRecord {
    pub neuron: NeuronId,
    pub input_isi: f64,
    pub output_isi: f64,
    pub distortion: f64,
}

/// Mean inter-spike interval of a sorted list of times.
pub fn isi_of_times(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::TooFewSpikes(times.len()));
    }
    let gaps: f64 = times.windows(2).map(|w| w[1] - w[0]).sum();
    Ok(gaps / (times.len() - 1) as f64)
}

pub fn compute_isi(train: &SpikeTrain) -> Result<f64> {
    isi_of_times(&train.times)
}

pub fn isi_distortion(input: &SpikeTrain, output: &SpikeTrain) -> Result<f64> {
    Ok((compute_isi(output)? - compute_isi(input)?).abs())
}

fn placed_neurons(placement: &PlacementSet) -> BTreeMap<NeuronId, ()> {
    placement
        .crossbars
        .iter()
        .flat_map(|x| x.row_of_pre.keys().chain(x.col_of_post.keys()))
        .map(|&n| (n, ()))
        .collect()
}

/// Delay every pre-synaptic spike by the path latency of each synapse it drives.
pub fn propagate(placement: &PlacementSet, trains: &[SpikeTrain]) -> Result<Vec<SynapseArrivals>> {
    let known = placed_neurons(placement);
    let mut by_neuron: BTreeMap<NeuronId, Vec<f64>> = BTreeMap::new();
    for t in trains {
        if !t.is_empty() && !known.contains_key(&t.neuron) {
            return Err(Error::UnknownNeuron(t.neuron));
        }
        by_neuron.entry(t.neuron).or_default().extend_from_slice(&t.times);
    }
    for times in by_neuron.values_mut() {
        times.sort_by(f64::total_cmp);
    }
    let tech = &placement.hardware.tech;
    let mut out = Vec::with_capacity(placement.synapse_count());
    for xbar in &placement.crossbars {
        for s in &xbar.synapses {
            let latency = path_latency(s.cell, s.state, xbar.config, &xbar.spec, tech)?;
            let times = by_neuron
                .get(&s.pre)
                .map(|ts| ts.iter().map(|t| t + latency.total).collect())
                .unwrap_or_default();
            out.push(SynapseArrivals {
                crossbar: xbar.id,
                pre: s.pre,
                post: s.post,
                state: s.state,
                cell: s.cell,
                latency,
                times,
            });
        }
    }
    Ok(out)
}

/// Event-driven integration of sorted arrivals.
///
/// Between events the potential falls linearly at `leak_per_second` (never
/// below zero); each arrival adds its state's increment; reaching the
/// threshold emits a spike and resets to zero. Arrivals at or before
/// `last_spike + refractory` are dropped.
pub fn if_neuron_fire(neuron: &IfNeuron, id: NeuronId, arrivals: &[Arrival]) -> SpikeTrain {
    debug_assert!(arrivals.windows(2).all(|w| w[0].time <= w[1].time));
    let mut v = 0.0_f64;
    let mut last_event: Option<f64> = None;
    let mut last_spike: Option<f64> = None;
    let mut times = Vec::new();
    for a in arrivals {
        if last_spike.is_some_and(|s| a.time <= s + neuron.refractory) {
            continue;
        }
        if let Some(prev) = last_event {
            v = (v - neuron.leak_per_second * (a.time - prev)).max(0.0);
        }
        last_event = Some(a.time);
        v += neuron.increment(a.state);
        if v >= neuron.v_threshold {
            times.push(a.time);
            last_spike = Some(a.time);
            v = 0.0;
        }
    }
    SpikeTrain { neuron: id, times }
}

/// Fastest and slowest path over every active cell and permitted state.
pub fn corner_extremes(
    config: Configuration,
    spec: &CrossbarSpec,
    tech: &TechnologyParams,
) -> Result<(f64, f64)> {
    let (rows, cols) = config_dimensions(config, spec)?;
    let (mut best, mut worst) = (f64::INFINITY, f64::NEG_INFINITY);
    for row in 0..rows {
        for col in 0..cols {
            let cell = Cell::new(row, col);
            for state in StateLabel::ALL {
                if permits(cell, state, spec)? {
                    let t = path_latency_unchecked(cell, state, config, spec, tech).total;
                    best = best.min(t);
                    worst = worst.max(t);
                }
            }
        }
    }
    Ok((best, worst))
}

/// Corner-extreme statistics (`mean` is the midpoint).
pub fn corner_stats(config: Configuration, spec: &CrossbarSpec, tech: &TechnologyParams) -> Result<LatencyStats> {
    let (best, worst) = corner_extremes(config, spec, tech)?;
    Ok(LatencyStats::from_extremes(best, worst, 0.5 * (best + worst)))
}

fn synapse_latencies<'a>(
    xbar: &'a CrossbarPlacement,
    tech: &'a TechnologyParams,
) -> impl Iterator<Item = Result<f64>> + 'a {
    xbar.synapses
        .iter()
        .map(move |s| path_latency(s.cell, s.state, xbar.config, &xbar.spec, tech).map(|l| l.total))
}

pub fn latency_stats(placement: &PlacementSet) -> Result<LatencyReport> {
    let tech = &placement.hardware.tech;
    let mut corner_cache: BTreeMap<(Configuration, u32, u32, u32, u32, u32), LatencyStats> = BTreeMap::new();
    let mut per_crossbar = Vec::new();
    let mut all = Vec::with_capacity(placement.synapse_count());
    for xbar in placement.crossbars.iter().filter(|x| !x.synapses.is_empty()) {
        let values = synapse_latencies(xbar, tech).collect::<Result<Vec<f64>>>()?;
        all.extend_from_slice(&values);
        let s = &xbar.spec;
        let key = (xbar.config, s.n, s.n_h, s.n_l, s.p, s.q);
        let corners = match corner_cache.get(&key) {
            Some(c) => *c,
            None => {
                let c = corner_stats(xbar.config, s, tech)?;
                corner_cache.insert(key, c);
                c
            }
        };
        per_crossbar.push(CrossbarLatency {
            crossbar: xbar.id,
            config: xbar.config,
            synapses: LatencyStats::from_values(values)?,
            corners,
        });
    }
    let aggregate = LatencyStats::from_values(all)?;
    let best = per_crossbar.iter().map(|c| c.corners.best).fold(f64::INFINITY, f64::min);
    let worst = per_crossbar.iter().map(|c| c.corners.worst).fold(f64::NEG_INFINITY, f64::max);
    Ok(LatencyReport {
        per_crossbar,
        aggregate,
        corners: LatencyStats::from_extremes(best, worst, 0.5 * (best + worst)),
    })
}

/// Change in mean latency when `m` LRS and `n` HRS synapses swap from the
/// adverse to the optimized placement, with `delta` the path-delay gap.
pub fn average_latency_delta(m: u64, n: u64, delta: f64) -> Result<f64> {
    if m + n == 0 {
        return Err(Error::EmptyCounts);
    }
    Ok((n as f64 - m as f64) / (n + m) as f64 * delta)
}

/// Access power multiplier relative to raising one wordline.
fn access_multiplier(config: Configuration, spec: &CrossbarSpec, cell: Cell) -> f64 {
    if spec.in_collapsed_region(cell) {
        return 1.0;
    }
    match config {
        Configuration::C00 => 1.0,
        Configuration::C01 | Configuration::C10 => 2.0,
        Configuration::C11 => 3.0,
    }
}

pub fn energy_report(placement: &PlacementSet, activity: &Activity) -> Result<EnergyReport> {
    if !(activity.duration.is_finite() && activity.duration > 0.0) {
        return Err(Error::NegativeActivity);
    }
    let tech = &placement.hardware.tech;
    let mut static_j = 0.0;
    let mut access_overhead_j = 0.0;
    for xbar in &placement.crossbars {
        static_j += static_energy_weight(xbar.config, &xbar.spec)? as f64
            * tech.leakage_per_cell
            * activity.duration;
        for s in &xbar.synapses {
            let accesses = activity.spikes_of(s.pre);
            if accesses == 0 {
                continue;
            }
            let t_access = path_latency(s.cell, s.state, xbar.config, &xbar.spec, tech)?.total;
            access_overhead_j += accesses as f64
                * tech.p_wordline_raise
                * t_access
                * access_multiplier(xbar.config, &xbar.spec, s.cell);
        }
    }
    let spike_j = activity.total_spikes() as f64 * tech.e_spike;
    let routing_j = activity.routed_spike_hops as f64 * tech.e_route_hop;
    Ok(EnergyReport {
        static_j,
        spike_j,
        routing_j,
        access_overhead_j,
        total_j: static_j + spike_j + routing_j + access_overhead_j,
    })
}

/// Feed every post-synaptic neuron its merged arrivals and record its ISI
/// distortion (delayed versus undelayed input stream).
pub fn fire_outputs(
    arrivals: &[SynapseArrivals],
    neuron: &IfNeuron,
) -> (Vec<SpikeTrain>, Vec<IsiRecord>) {
    let mut per_post: BTreeMap<NeuronId, (Vec<Arrival>, Vec<f64>)> = BTreeMap::new();
    for syn in arrivals {
        let entry = per_post.entry(syn.post).or_default();
        for &t in &syn.times {
            entry.0.push(Arrival {
                time: t,
                state: syn.state,
            });
            entry.1.push(t - syn.latency.total);
        }
    }
    let mut outputs = Vec::with_capacity(per_post.len());
    let mut isi = Vec::new();
    for (post, (mut arr, mut input)) in per_post {
        arr.sort_by(|a, b| a.time.total_cmp(&b.time));
        input.sort_by(f64::total_cmp);
        let delayed: Vec<f64> = arr.iter().map(|a| a.time).collect();
        if let (Ok(input_isi), Ok(output_isi)) = (isi_of_times(&input), isi_of_times(&delayed)) {
            isi.push(IsiRecord {
                neuron: post,
                input_isi,
                output_isi,
                distortion: (output_isi - input_isi).abs(),
            });
        }
        outputs.push(if_neuron_fire(neuron, post, &arr));
    }
    (outputs, isi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationReport {
    pub latency: LatencyReport,
    pub energy: EnergyReport,
    pub isi: Vec<IsiRecord>,
    pub outputs: Vec<SpikeTrain>,
}

/// Propagate, fire, and account energy for one trace of `duration` seconds.
pub fn simulate(
    placement: &PlacementSet,
    trains: &[SpikeTrain],
    duration: f64,
    neuron: &IfNeuron,
) -> Result<SimulationReport> {
    placement.validate()?;
    neuron.validate()?;
    let arrivals = propagate(placement, trains)?;
    let (outputs, isi) = fire_outputs(&arrivals, neuron);
    let activity = Activity::from_trains(trains, &placement.routes, duration);
    Ok(SimulationReport {
        latency: latency_stats(placement)?,
        energy: energy_report(placement, &activity)?,
        isi,
        outputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn train(times: &[f64]) -> SpikeTrain {
        SpikeTrain::new(NeuronId(0), times.to_vec()).unwrap()
    }

    #[test]
    fn isi_examples() {
        assert_eq!(compute_isi(&train(&[0.0, 2.0, 4.0, 6.0])).unwrap(), 2.0);
        assert_eq!(compute_isi(&train(&[1.0, 3.0, 7.0])).unwrap(), 3.0);
        assert_eq!(compute_isi(&train(&[1.0])), Err(Error::TooFewSpikes(1)));
    }

    #[test]
    fn distortion_of_two_spike_train() {
        let (t1, t2, x, y) = (1.0, 5.0, 0.25, 0.75);
        let input = train(&[t1, t2]);
        let output = train(&[t1 + x, t2 + y]);
        assert_eq!(isi_distortion(&input, &output).unwrap(), y - x);
        let uniform = train(&[t1 + x, t2 + x]);
        assert_eq!(isi_distortion(&input, &uniform).unwrap(), 0.0);
    }

    #[test]
    fn coincident_arrivals_cross_threshold() {
        let n = IfNeuron {
            v_increment_per_state: [1.0 / 3.0 * (1.0 + 1e-6); 4],
            ..IfNeuron::default()
        };
        let arr = [0.0, 0.0, 0.0].map(|time| Arrival {
            time,
            state: StateLabel::Lrs1,
        });
        assert_eq!(if_neuron_fire(&n, NeuronId(1), &arr).times, vec![0.0]);
    }

    #[test]
    fn sub_threshold_sum_is_silent() {
        let n = IfNeuron {
            v_increment_per_state: [0.33; 4],
            ..IfNeuron::default()
        };
        let arr = [1.0, 2.0, 3.0].map(|time| Arrival {
            time,
            state: StateLabel::Hrs,
        });
        assert!(if_neuron_fire(&n, NeuronId(1), &arr).is_empty());
    }

    #[test]
    fn leak_and_refractory() {
        let n = IfNeuron {
            v_threshold: 1.0,
            v_increment_per_state: [0.6; 4],
            leak_per_second: 1.0,
            refractory: 0.5,
        };
        let at = |time| Arrival {
            time,
            state: StateLabel::Lrs1,
        };
        // 0.6, then 0.6 - 0.3 + 0.6 = 0.9: silent
        assert!(if_neuron_fire(&n, NeuronId(0), &[at(0.0), at(0.3)]).is_empty());
        // 0.6 - 0.1 + 0.6 = 1.1 fires; the arrival inside the refractory window is dropped
        let out = if_neuron_fire(&n, NeuronId(0), &[at(0.0), at(0.1), at(0.4), at(0.7), at(0.8)]);
        assert_eq!(out.times, vec![0.1, 0.8]);
    }

    #[test]
    fn default_neuron_increments() {
        let n = IfNeuron::default();
        assert!((n.increment(StateLabel::Lrs1) - 0.8).abs() < 1e-15);
        assert!((n.increment(StateLabel::Hrs) - 0.8 * 1500.0 / 73_000.0).abs() < 1e-15);
        n.validate().unwrap();
    }

    #[test]
    fn average_latency_examples() {
        assert_eq!(average_latency_delta(5, 5, 3.0).unwrap(), 0.0);
        assert_eq!(average_latency_delta(0, 7, 3.0).unwrap(), 3.0);
        assert_eq!(average_latency_delta(3, 1, 8.0).unwrap(), -4.0);
        assert_eq!(average_latency_delta(0, 0, 1.0), Err(Error::EmptyCounts));
    }

    #[test]
    fn stats_of_single_value() {
        let s = LatencyStats::from_values([2e-9]).unwrap();
        assert_eq!((s.best, s.worst, s.mean, s.diff, s.ratio), (2e-9, 2e-9, 2e-9, 0.0, 1.0));
        assert_eq!(LatencyStats::from_values([]), Err(Error::EmptyPlacement));
    }
}

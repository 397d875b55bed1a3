// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;

use xbarsim_core::crossbar::{config_contains, permits, static_energy_weight, Control};
use xbarsim_core::dse::sweep_nhnl;
use xbarsim_core::mapper::{assign_cluster, map_network, select_configuration, Hardware};
use xbarsim_core::simulate::{energy_report, isi_distortion, propagate, Activity};
use xbarsim_core::techmodel::{path_latency, StateTable};
use xbarsim_core::workload::{
    generate_synthetic, partition_simple, quantize_weights, Cluster, ClusterId, Layer, Network,
    NeuronId, SpikeTrain, Synapse, SyntheticParams,
};
use xbarsim_core::{Cell, Configuration, CrossbarSpec, StateLabel, TechnologyParams};

fn state() -> impl Strategy<Value = StateLabel> {
    prop::sample::select(StateLabel::ALL.to_vec())
}

/// A cluster of `pre x post` neurons with a random subset of synapses.
fn cluster(max_pre: u32, max_post: u32) -> impl Strategy<Value = Cluster> {
    (1..=max_pre, 1..=max_post)
        .prop_flat_map(|(pre, post)| {
            let pairs = (pre * post) as usize;
            (
                Just((pre, post)),
                prop::collection::vec((any::<bool>(), state()), pairs),
            )
        })
        .prop_map(|((pre, post), picks)| {
            let mut synapses: Vec<Synapse> = picks
                .iter()
                .enumerate()
                .filter(|(_, (keep, _))| *keep)
                .map(|(i, &(_, state))| Synapse {
                    pre: i as u32 / post,
                    post: i as u32 % post,
                    state,
                })
                .collect();
            if synapses.is_empty() {
                synapses.push(Synapse { pre: 0, post: 0, state: picks[0].1 });
            }
            Cluster {
                id: ClusterId(0),
                pre_neurons: (0..pre).map(NeuronId).collect(),
                post_neurons: (pre..pre + post).map(NeuronId).collect(),
                synapses,
            }
        })
}

fn region_spec() -> impl Strategy<Value = CrossbarSpec> {
    (4u32..=16).prop_flat_map(|n| {
        (Just(n), 0..=n / 2, 0..=n / 2, 1..=n, 1..=n, prop::bool::ANY).prop_map(
            |(n, nh, nl, p, q, single)| {
                let control = if single { Control::Single } else { Control::Double };
                CrossbarSpec::new(n, nh, nl, p, q, control).unwrap()
            },
        )
    })
}

fn tech() -> impl Strategy<Value = TechnologyParams> {
    (
        prop::sample::select(TechnologyParams::PRESET_NODES.to_vec()),
        0.1f64..20.0,
        0.1f64..20.0,
        1e-16f64..1e-12,
        1e-16f64..1e-12,
    )
        .prop_map(|(node, rw, rb, cw, cb)| {
            let mut t = TechnologyParams::preset(node).unwrap();
            t.r_wordline_unit = rw;
            t.r_bitline_unit = rb;
            t.c_wordline_unit = cw;
            t.c_bitline_unit = cb;
            t
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn assignments_respect_regions(c in cluster(12, 12), spec in region_spec()) {
        prop_assume!(c.pre_neurons.len() as u32 <= spec.n && c.post_neurons.len() as u32 <= spec.n);
        if let Ok(a) = assign_cluster(&c, &spec) {
            let mut used = std::collections::BTreeSet::new();
            for s in &c.synapses {
                let cell = a.cell(s);
                prop_assert!(permits(cell, s.state, &spec).unwrap());
                prop_assert!(used.insert(cell));
            }
        }
    }

    #[test]
    fn half_sized_clusters_always_fit(c in cluster(8, 8)) {
        let spec = CrossbarSpec::new(16, 8, 8, 12, 12, Control::Double).unwrap();
        prop_assert!(assign_cluster(&c, &spec).is_ok());
    }

    #[test]
    fn selected_configuration_is_minimal(
        cells in prop::collection::vec((0u32..16, 0u32..16), 1..10),
        spec in region_spec(),
    ) {
        let cells: Vec<Cell> = cells.into_iter().map(|(r, c)| Cell::new(r % spec.n, c % spec.n)).collect();
        let chosen = select_configuration(cells.iter().copied(), &spec);
        let contains = |cfg| cells.iter().all(|&c| config_contains(cfg, &spec, c).unwrap_or(false));
        prop_assert!(contains(chosen));
        let w = static_energy_weight(chosen, &spec).unwrap();
        for cfg in Configuration::ALL {
            if let Ok(other) = static_energy_weight(cfg, &spec) {
                prop_assert!(!(contains(cfg) && other < w), "{cfg} beats {chosen}");
            }
        }
        // double control never needs more than single control
        let single = select_configuration(cells.iter().copied(), &spec.with_control(Control::Single));
        let double = select_configuration(cells.iter().copied(), &spec.with_control(Control::Double));
        prop_assert!(
            static_energy_weight(double, &spec.with_control(Control::Double)).unwrap()
                <= static_energy_weight(single, &spec.with_control(Control::Single)).unwrap()
        );
    }

    #[test]
    fn hrs_on_shorter_path_narrows_the_spread(t in tech(), a in (0u32..32, 0u32..32), b in (0u32..32, 0u32..32)) {
        let spec = CrossbarSpec::baseline(32).unwrap();
        let (ca, cb) = (Cell::new(a.0, a.1), Cell::new(b.0, b.1));
        let lat = |cell, st| path_latency(cell, st, Configuration::C11, &spec, &t).unwrap();
        let (pa, pb) = (lat(ca, StateLabel::Hrs).parasitic_component, lat(cb, StateLabel::Hrs).parasitic_component);
        prop_assume!((pa - pb).abs() > 1e-6 * pa.max(pb));
        let (near, far) = if pa < pb { (ca, cb) } else { (cb, ca) };
        let spread = |x: f64, y: f64| (x - y).abs();
        let optimized = spread(lat(near, StateLabel::Hrs).total, lat(far, StateLabel::Lrs1).total);
        let adverse = spread(lat(near, StateLabel::Lrs1).total, lat(far, StateLabel::Hrs).total);
        prop_assert!(optimized < adverse);
    }

    #[test]
    fn isi_distortion_is_shift_invariant(
        gaps in prop::collection::vec(1e-4f64..1e-2, 2..8),
        delays in prop::collection::vec(0.0f64..1e-4, 8),
        shift in 0.0f64..1.0,
    ) {
        let mut t = 0.0;
        let times: Vec<f64> = gaps.iter().map(|g| { t += g; t }).collect();
        let out: Vec<f64> = times.iter().zip(&delays).map(|(a, d)| a + d).collect();
        let d0 = isi_distortion(
            &SpikeTrain::new(NeuronId(0), times.clone()).unwrap(),
            &SpikeTrain::new(NeuronId(0), out.clone()).unwrap(),
        ).unwrap();
        let d1 = isi_distortion(
            &SpikeTrain::new(NeuronId(0), times.iter().map(|x| x + shift).collect()).unwrap(),
            &SpikeTrain::new(NeuronId(0), out.iter().map(|x| x + shift).collect()).unwrap(),
        ).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-12);
    }

    #[test]
    fn quantization_picks_a_nearest_level(w in 1e-6f64..1e-3) {
        let table = StateTable::OXRRAM;
        let got = quantize_weights(&[w], &table).unwrap()[0];
        let dist = |s: StateLabel| (w - 1.0 / table.ohms(s)).abs();
        for s in StateLabel::ALL {
            prop_assert!(dist(got) <= dist(s) * (1.0 + 1e-9) + 1e-18);
        }
    }

    #[test]
    fn partition_conserves_synapses(
        pre in 1u32..40, post in 1u32..40, n in 2u32..16, seed in any::<u64>(),
    ) {
        let synapses: Vec<Synapse> = (0..pre * post)
            .filter(|i| (seed >> (i % 64)) & 1 == 1 || *i == 0)
            .map(|i| Synapse { pre: i / post, post: i % post, state: StateLabel::ALL[(i % 4) as usize] })
            .collect();
        let layer = Layer { pre_count: pre, post_count: post, synapses };
        let clusters = partition_simple(&layer, n).unwrap();
        let total: usize = clusters.iter().map(|c| c.synapses.len()).sum();
        prop_assert_eq!(total, layer.synapses.len());
        for c in &clusters {
            c.validate().unwrap();
            prop_assert!(c.pre_neurons.len() as u32 <= n && c.post_neurons.len() as u32 <= n);
        }
    }
}

fn synthetic(seed: u64) -> (Network, Vec<SpikeTrain>) {
    let p = SyntheticParams {
        clusters: 6,
        pre_range: (4, 24),
        post_range: (4, 24),
        duration: 0.2,
        seed,
        ..SyntheticParams::default()
    };
    generate_synthetic(&p).unwrap()
}

#[test]
fn propagate_conserves_spike_counts() {
    let (net, trains) = synthetic(4);
    let hw = Hardware::new(6, CrossbarSpec::new(32, 8, 8, 24, 24, Control::Double).unwrap(),
        TechnologyParams::preset("22nm").unwrap()).unwrap();
    let placement = map_network(&net, &hw).unwrap();
    let arrivals = propagate(&placement, &trains).unwrap();
    assert_eq!(arrivals.len(), net.synapse_count());
    for a in &arrivals {
        let sent = trains.iter().find(|t| t.neuron == a.pre).map_or(0, |t| t.len());
        assert_eq!(a.times.len(), sent);
        assert!(a.times.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn energy_is_monotone_over_the_configuration_lattice() {
    let (net, trains) = synthetic(9);
    let tech = TechnologyParams::preset("45nm").unwrap();
    let spec = CrossbarSpec::new(64, 0, 0, 48, 40, Control::Double).unwrap();
    let hw = Hardware::new(6, spec, tech).unwrap();
    let base = map_network(&net, &hw).unwrap();
    let activity = Activity::from_trains(&trains, &net.routes, 0.2);
    let total = |cfg| {
        let mut p = base.clone();
        for x in &mut p.crossbars {
            x.config = cfg;
        }
        energy_report(&p, &activity).unwrap().total_j
    };
    let (e00, e01, e10, e11) = (total(Configuration::C00), total(Configuration::C01), total(Configuration::C10), total(Configuration::C11));
    assert!(e00 <= e01 && e00 <= e10 && e01 <= e11 && e10 <= e11, "{e00} {e01} {e10} {e11}");
}

#[test]
fn nhnl_variation_non_increasing_in_nh() {
    let spec = CrossbarSpec::baseline(64).unwrap();
    for node in TechnologyParams::PRESET_NODES {
        let tech = TechnologyParams::preset(node).unwrap();
        let nh: Vec<u32> = (0..=32).step_by(4).collect();
        for nl in [0, 8, 16, 32] {
            let pts = sweep_nhnl(&spec, &tech, &nh, &[nl]).unwrap();
            for w in pts.windows(2) {
                assert!(w[1].norm_variation <= w[0].norm_variation + 1e-12, "{node} nl={nl}: {w:?}");
            }
        }
    }
}

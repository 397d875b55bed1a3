// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xbarsim::core::mapper::{map_network, Hardware, PlacementSet};
use xbarsim::core::workload::{generate_synthetic, poisson_trains, Network, NeuronId, SyntheticParams};
use xbarsim::core::{CrossbarSpec, TechnologyParams};
use xbarsim::io::{read_json, read_spikes, write_json, write_spikes};

#[test]
fn network_and_placement_survive_json() {
    let dir = tempfile::tempdir().unwrap();
    let params = SyntheticParams {
        clusters: 5,
        seed: 9,
        ..SyntheticParams::default()
    };
    let (network, _) = generate_synthetic(&params).unwrap();
    let hw = Hardware::new(
        5,
        CrossbarSpec::baseline(64).unwrap(),
        TechnologyParams::preset("32nm").unwrap(),
    )
    .unwrap();
    let placement = map_network(&network, &hw).unwrap();

    let np = dir.path().join("n.json");
    let pp = dir.path().join("p.json");
    write_json(&np, &network).unwrap();
    write_json(&pp, &placement).unwrap();
    assert_eq!(read_json::<Network>(&np).unwrap(), network);
    let back: PlacementSet = read_json(&pp).unwrap();
    back.validate().unwrap();
    assert_eq!(back, placement);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn spike_csv_keeps_every_spike(seed in any::<u64>(), rate in 1.0f64..200.0) {
        let neurons: Vec<NeuronId> = (0..6).map(NeuronId).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trains = poisson_trains(&neurons, rate, 0.5, &mut rng).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_spikes(&path, &trains).unwrap();
        let back = read_spikes(&path).unwrap();
        let nonempty: Vec<_> = trains.iter().filter(|t| !t.is_empty()).collect();
        prop_assert_eq!(back.len(), nonempty.len());
        for (a, b) in nonempty.iter().zip(&back) {
            prop_assert_eq!(a.neuron, b.neuron);
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.times.iter().zip(&b.times) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-9));
            }
        }
    }
}

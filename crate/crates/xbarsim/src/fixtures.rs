// SPDX-License-Identifier: Apache-2.0

//! Bundled example workloads.

use std::path::Path;

use clap::ValueEnum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xbarsim_core::simulate::IfNeuron;
use xbarsim_core::workload::{poisson_trains, Network, NeuronId, SpikeTrain};

use crate::error::{CliError, Result};
use crate::io::parse_spikes;

const FIG3: &str = include_str!("../fixtures/fig3.json");
const ISI_DEMO: &str = include_str!("../fixtures/isi_demo.json");
const ISI_DEMO_SPIKES: &str = include_str!("../fixtures/isi_demo_spikes.csv");
const ISI_DEMO_SPIKES_DELAYED: &str = include_str!("../fixtures/isi_demo_spikes_delayed.csv");
const ISI_DEMO_NEURON: &str = include_str!("../fixtures/isi_demo_neuron.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    /// Three small clusters sized for 4x4 crossbars.
    Fig3,
    /// Three inputs converging on one integrate-and-fire neuron.
    IsiDemo,
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, name: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|source| CliError::Json {
        path: name.into(),
        source,
    })
}

impl Fixture {
    pub fn network(self) -> Result<Network> {
        let (text, name) = match self {
            Fixture::Fig3 => (FIG3, "fig3.json"),
            Fixture::IsiDemo => (ISI_DEMO, "isi_demo.json"),
        };
        let network: Network = parse_json(text, name)?;
        network.validate()?;
        Ok(network)
    }

    /// The bundled trace; for `Fig3` a seeded 30 Hz, one-second Poisson trace.
    pub fn spikes(self) -> Result<Vec<SpikeTrain>> {
        match self {
            Fixture::Fig3 => {
                let neurons: Vec<NeuronId> = self.network()?.neurons().into_iter().collect();
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                Ok(poisson_trains(&neurons, 30.0, 1.0, &mut rng)?)
            }
            Fixture::IsiDemo => parse_spikes(ISI_DEMO_SPIKES.as_bytes(), Path::new("isi_demo_spikes.csv")),
        }
    }
}

/// The demo trace with the last spike of the third input pushed 10 us later.
pub fn isi_demo_delayed_spikes() -> Result<Vec<SpikeTrain>> {
    parse_spikes(
        ISI_DEMO_SPIKES_DELAYED.as_bytes(),
        Path::new("isi_demo_spikes_delayed.csv"),
    )
}

/// Neuron parameters of the demo: increments of 0.35, leak of 0.05 per us.
pub fn isi_demo_neuron() -> Result<IfNeuron> {
    parse_json(ISI_DEMO_NEURON, "isi_demo_neuron.json")
}

// SPDX-License-Identifier: Apache-2.0

//! Flat CSV tables and the JSON simulation report.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use xbarsim_core::analysis::{cost_per_bit, die_area_overhead, total_bits, AreaModel};
use xbarsim_core::crossbar::{isolation_transistor_count, Granularity};
use xbarsim_core::dse::NetworkSweep;
use xbarsim_core::simulate::{EnergyReport, IsiRecord, LatencyReport, LatencyStats, SimulationReport};
use xbarsim_core::workload::NeuronId;
use xbarsim_core::TechnologyParams;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisRow {
    pub n: u32,
    #[serde(rename = "F")]
    pub f: f64,
    pub cost_per_bit: f64,
    pub total_bits: u64,
    pub height_pct: f64,
    pub width_pct: f64,
    pub iso_count_fine: u64,
    pub iso_count_coarse: u64,
}

pub fn analysis_rows(ns: &[u32], tech: &TechnologyParams) -> Result<Vec<AnalysisRow>> {
    let model = AreaModel::default();
    ns.iter()
        .map(|&n| {
            let overhead = die_area_overhead(n, &model)?;
            Ok(AnalysisRow {
                n,
                f: tech.feature_size_nm,
                cost_per_bit: cost_per_bit(n, tech.feature_size_nm)?,
                total_bits: total_bits(n),
                height_pct: overhead.height_pct,
                width_pct: overhead.width_pct,
                iso_count_fine: isolation_transistor_count(n, Granularity::Fine)?,
                iso_count_coarse: isolation_transistor_count(n, Granularity::Coarse)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatencyRow {
    /// Crossbar id, or `all` for the aggregate.
    pub crossbar: String,
    pub config: String,
    pub best_s: f64,
    pub worst_s: f64,
    pub diff_s: f64,
    pub ratio: f64,
    pub mean_s: f64,
    pub corner_best_s: f64,
    pub corner_worst_s: f64,
    pub corner_ratio: f64,
}

impl LatencyRow {
    fn new(crossbar: String, config: String, s: &LatencyStats, corners: &LatencyStats) -> Self {
        LatencyRow {
            crossbar,
            config,
            best_s: s.best,
            worst_s: s.worst,
            diff_s: s.diff,
            ratio: s.ratio,
            mean_s: s.mean,
            corner_best_s: corners.best,
            corner_worst_s: corners.worst,
            corner_ratio: corners.ratio,
        }
    }
}

pub fn latency_rows(report: &LatencyReport) -> Vec<LatencyRow> {
    let mut rows: Vec<LatencyRow> = report
        .per_crossbar
        .iter()
        .map(|c| LatencyRow::new(c.crossbar.to_string(), c.config.to_string(), &c.synapses, &c.corners))
        .collect();
    rows.push(LatencyRow::new("all".into(), "-".into(), &report.aggregate, &report.corners));
    rows
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub network: String,
    #[serde(rename = "P")]
    pub p: u32,
    #[serde(rename = "Q")]
    pub q: u32,
    pub norm_energy: f64,
    pub norm_latency: f64,
    pub norm_variation: f64,
    pub expanded_fraction: f64,
}

pub fn sweep_rows(sweeps: &[NetworkSweep]) -> Vec<SweepRow> {
    sweeps
        .iter()
        .flat_map(|s| {
            s.points.iter().map(move |pt| SweepRow {
                network: s.network.clone(),
                p: pt.spec.p,
                q: pt.spec.q,
                norm_energy: pt.norm_energy,
                norm_latency: pt.norm_latency,
                norm_variation: pt.norm_variation,
                expanded_fraction: pt.expanded_fraction,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputSpikes {
    pub neuron: NeuronId,
    pub spikes: usize,
}

/// Everything `simulate` computes, in one JSON document.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationJson<'a> {
    pub duration_s: f64,
    pub latency: &'a LatencyReport,
    pub energy: &'a EnergyReport,
    pub isi: &'a [IsiRecord],
    pub output_spikes: Vec<OutputSpikes>,
}

impl<'a> SimulationJson<'a> {
    pub fn new(report: &'a SimulationReport, duration_s: f64) -> Self {
        SimulationJson {
            duration_s,
            latency: &report.latency,
            energy: &report.energy,
            isi: &report.isi,
            output_spikes: report
                .outputs
                .iter()
                .map(|t| OutputSpikes {
                    neuron: t.neuron,
                    spikes: t.len(),
                })
                .collect(),
        }
    }
}

pub fn write_csv_to<W: Write, T: Serialize>(out: W, rows: &[T]) -> std::result::Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_csv_to(std::io::BufWriter::new(file), rows).map_err(|source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

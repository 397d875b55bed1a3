// SPDX-License-Identifier: Apache-2.0

//! File formats: JSON for networks, placements and technology files, CSV
//! (`neuron,time_us`) for spike traces.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use xbarsim_core::crossbar::Control;
use xbarsim_core::workload::{NeuronId, SpikeTrain};
use xbarsim_core::{CrossbarSpec, TechnologyParams};

use crate::error::{CliError, Result};

/// Directory searched for `<node>.json` before the built-in presets.
pub const TECH_DIR_ENV: &str = "XBARSIM_TECH_DIR";

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Serialize, Deserialize)]
struct SpikeRow {
    neuron: u32,
    time_us: f64,
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Spike trains from `neuron,time_us` rows in any order.
pub fn read_spikes(path: &Path) -> Result<Vec<SpikeTrain>> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_spikes(file, path)
}

/// [`read_spikes`] from any reader; `label` names the source in errors.
pub fn parse_spikes<R: std::io::Read>(source: R, label: &Path) -> Result<Vec<SpikeTrain>> {
    let mut reader = csv::Reader::from_reader(source);
    let mut by_neuron: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for row in reader.deserialize() {
        let row: SpikeRow = row.map_err(csv_err(label))?;
        by_neuron.entry(row.neuron).or_default().push(row.time_us * 1e-6);
    }
    by_neuron
        .into_iter()
        .map(|(neuron, mut times)| {
            times.sort_by(f64::total_cmp);
            Ok(SpikeTrain::new(NeuronId(neuron), times)?)
        })
        .collect()
}

pub fn write_spikes(path: &Path, trains: &[SpikeTrain]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_err(path))?;
    // a header-only file still needs the header row
    writer
        .write_record(["neuron", "time_us"])
        .map_err(csv_err(path))?;
    for t in trains {
        for &time in &t.times {
            writer
                .write_record([t.neuron.0.to_string(), (time * 1e6).to_string()])
                .map_err(csv_err(path))?;
        }
    }
    writer.flush().map_err(|e| CliError::io(path, e))
}

/// Technology from an explicit file, else `$XBARSIM_TECH_DIR/<node>.json`,
/// else the built-in preset for `node`.
pub fn load_tech(node: Option<&str>, file: Option<&Path>) -> Result<TechnologyParams> {
    let tech: TechnologyParams = match (file, node) {
        (Some(path), _) => read_json(path)?,
        (None, Some(node)) => match preset_file(node) {
            Some(path) => read_json(&path)?,
            None => TechnologyParams::preset(node)?,
        },
        (None, None) => {
            return Err(CliError::Usage(
                "a technology is required: pass --node or --tech".into(),
            ))
        }
    };
    tech.validate()?;
    Ok(tech)
}

fn preset_file(node: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(TECH_DIR_ENV)?;
    let path = Path::new(&dir).join(format!("{node}.json"));
    path.is_file().then_some(path)
}

/// A spec from a JSON file or an inline `N,N_h,N_l,P,Q` tuple.
pub fn parse_spec(arg: &str, control: Control) -> Result<CrossbarSpec> {
    let path = Path::new(arg);
    if path.is_file() {
        let spec: CrossbarSpec = read_json(path)?;
        spec.validate()?;
        return Ok(spec.with_control(control));
    }
    let nums = parse_list(arg)?;
    let spec = match nums[..] {
        [n] => CrossbarSpec::new(n, 0, 0, n, n, control)?,
        [n, nh, nl] => CrossbarSpec::new(n, nh, nl, n, n, control)?,
        [n, nh, nl, p, q] => CrossbarSpec::new(n, nh, nl, p, q, control)?,
        _ => {
            return Err(CliError::Usage(format!(
                "spec '{arg}' is neither a file nor N[,N_h,N_l[,P,Q]]"
            )))
        }
    };
    Ok(spec)
}

/// Comma-separated unsigned integers.
pub fn parse_list(arg: &str) -> Result<Vec<u32>> {
    arg.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("'{s}' in '{arg}' is not a non-negative integer")))
        })
        .collect()
}

/// `a:b:step`, inclusive of `b` when it lies on the step.
pub fn parse_range(arg: &str) -> Result<Vec<u32>> {
    let parts = arg
        .split(':')
        .map(|s| s.trim().parse::<u32>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| CliError::Usage(format!("range '{arg}' must be a:b:step")))?;
    let [a, b, step] = parts[..] else {
        return Err(CliError::Usage(format!("range '{arg}' must be a:b:step")));
    };
    if step == 0 || a > b {
        return Err(CliError::Usage(format!("range '{arg}' needs a <= b and step > 0")));
    }
    Ok((a..=b).step_by(step as usize).collect())
}

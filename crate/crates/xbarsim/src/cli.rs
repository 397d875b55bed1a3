// SPDX-License-Identifier: Apache-2.0

//! The `xbarsim` command line: analyze, gen, map, simulate, dse.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use xbarsim_core::crossbar::Control;
use xbarsim_core::dse::{select_tradeoff, sweep_nhnl, sweep_pq, SweepSettings};
use xbarsim_core::mapper::{map_network, map_network_control, Hardware, PlacementSet};
use xbarsim_core::simulate::{simulate, IfNeuron};
use xbarsim_core::workload::{generate_synthetic, Network, SyntheticParams};
use xbarsim_core::{Configuration, TechnologyParams};

use crate::error::{CliError, Result};
use crate::fixtures::Fixture;
use crate::io::{load_tech, parse_list, parse_range, parse_spec, read_json, read_spikes, write_json, write_spikes};
use crate::report::{analysis_rows, latency_rows, sweep_rows, write_csv, write_csv_to, SimulationJson};

#[derive(Debug, Parser)]
#[command(name = "xbarsim", version, about = "Partitioned NVM crossbar mapping and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cost-per-bit, bit count, isolation overheads for crossbar sizes.
    Analyze(AnalyzeArgs),
    /// Write a synthetic or bundled network and spike trace.
    Gen(GenArgs),
    /// Place a network onto crossbars.
    Map(MapArgs),
    /// Evaluate latency, energy and ISI distortion of a placement.
    Simulate(SimulateArgs),
    /// Sweep partition points and pick a tradeoff.
    Dse(DseArgs),
}

#[derive(Debug, Args)]
pub struct TechArgs {
    /// Technology node preset (45nm, 32nm, 22nm, 16nm).
    #[arg(long, default_value = "45nm")]
    pub node: String,
    /// Technology JSON file; overrides --node.
    #[arg(long)]
    pub tech: Option<PathBuf>,
}

impl TechArgs {
    fn load(&self) -> Result<TechnologyParams> {
        load_tech(Some(&self.node), self.tech.as_deref())
    }
}

fn parse_control(s: &str) -> std::result::Result<Control, String> {
    s.parse().map_err(|e: xbarsim_core::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Crossbar dimension.
    #[arg(long, conflicts_with = "sweep_n", required_unless_present = "sweep_n")]
    pub n: Option<u32>,
    /// Dimensions as a:b:step.
    #[arg(long)]
    pub sweep_n: Option<String>,
    /// Technology node preset (45nm, 32nm, 22nm, 16nm); required.
    #[arg(long)]
    pub node: String,
    /// CSV output; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Network JSON to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Spike CSV to write.
    #[arg(long)]
    pub spikes: Option<PathBuf>,
    /// Write a bundled example instead of a synthetic network.
    #[arg(long, value_enum)]
    pub fixture: Option<Fixture>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub clusters: usize,
    /// Pre-synaptic neurons per cluster as min,max.
    #[arg(long, default_value = "8,64")]
    pub pre: String,
    /// Post-synaptic neurons per cluster as min,max.
    #[arg(long, default_value = "8,64")]
    pub post: String,
    #[arg(long, default_value_t = 0.2)]
    pub density: f64,
    /// Probabilities of LRS1,LRS2,LRS3,HRS.
    #[arg(long, default_value = "0.4,0.15,0.15,0.3")]
    pub state_mix: String,
    /// Mean firing rate, Hz.
    #[arg(long, default_value_t = 30.0)]
    pub rate: f64,
    /// Trace length, seconds.
    #[arg(long, default_value_t = 1.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 4)]
    pub max_hops: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mapper {
    Optimized,
    Random,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[arg(long)]
    pub network: PathBuf,
    /// JSON file or N[,N_h,N_l[,P,Q]].
    #[arg(long, default_value = "128,64,64,96,96")]
    pub spec: String,
    #[arg(long, default_value = "double", value_parser = parse_control)]
    pub control: Control,
    #[command(flatten)]
    pub tech: TechArgs,
    /// Crossbars available; one per cluster when omitted.
    #[arg(long)]
    pub crossbars: Option<u32>,
    #[arg(long, value_enum, default_value_t = Mapper::Optimized)]
    pub mapper: Mapper,
    /// Seed of the random mapper.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Placement JSON to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub placement: PathBuf,
    #[arg(long)]
    pub spikes: PathBuf,
    /// Observation window, seconds.
    #[arg(long, default_value_t = 1.0)]
    pub duration: f64,
    /// Neuron parameters JSON; default integrate-and-fire neuron otherwise.
    #[arg(long)]
    pub neuron: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DseArgs {
    /// Network JSON files.
    #[arg(long, num_args = 1.., required = true)]
    pub networks: Vec<PathBuf>,
    /// Partition values; the grid is every (P, Q) pair drawn from them.
    #[arg(long, default_value = "64,72,80,96,112,128")]
    pub grid: String,
    /// Base spec N[,N_h,N_l] (P and Q come from the grid).
    #[arg(long, default_value = "128,0,0")]
    pub spec: String,
    #[arg(long, default_value = "double", value_parser = parse_control)]
    pub control: Control,
    #[command(flatten)]
    pub tech: TechArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 30.0)]
    pub rate: f64,
    #[arg(long, default_value_t = 1.0)]
    pub duration: f64,
    /// Allowed latency regression when choosing the knee.
    #[arg(long, default_value_t = 0.0)]
    pub tolerance: f64,
    /// Sweep CSV to write.
    #[arg(long)]
    pub out: PathBuf,
    /// N_h values for a region sweep.
    #[arg(long, requires_all = ["nl_grid", "nhnl_out"])]
    pub nh_grid: Option<String>,
    /// N_l values for a region sweep.
    #[arg(long)]
    pub nl_grid: Option<String>,
    /// Region-sweep CSV to write.
    #[arg(long)]
    pub nhnl_out: Option<PathBuf>,
}

/// Run one command, writing the human summary to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Analyze(a) => analyze(a, out),
        Command::Gen(a) => gen(a, out),
        Command::Map(a) => map(a, out),
        Command::Simulate(a) => simulate_cmd(a, out),
        Command::Dse(a) => dse(a, out),
    }
}

fn say(out: &mut dyn Write, line: std::fmt::Arguments<'_>) -> Result<()> {
    writeln!(out, "{line}").map_err(|e| CliError::io("<stdout>", e))
}

fn analyze(a: AnalyzeArgs, out: &mut dyn Write) -> Result<()> {
    let tech = load_tech(Some(&a.node), None)?;
    let ns = match (&a.n, &a.sweep_n) {
        (Some(n), _) => vec![*n],
        (None, Some(range)) => parse_range(range)?,
        (None, None) => return Err(CliError::Usage("pass --n or --sweep-n".into())),
    };
    let rows = analysis_rows(&ns, &tech)?;
    match &a.out {
        Some(path) => write_csv(path, &rows),
        None => write_csv_to(out, &rows).map_err(|source| CliError::Csv {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn min_max(arg: &str, what: &str) -> Result<(u32, u32)> {
    match parse_list(arg)?[..] {
        [lo, hi] => Ok((lo, hi)),
        [v] => Ok((v, v)),
        _ => Err(CliError::Usage(format!("--{what} takes min,max"))),
    }
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<()> {
    let (network, trains) = match a.fixture {
        Some(f) => (f.network()?, f.spikes()?),
        None => {
            let mix: Vec<f64> = a
                .state_mix
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| CliError::Usage(format!("bad --state-mix '{}'", a.state_mix)))?;
            let state_mix: [f64; 4] = mix
                .try_into()
                .map_err(|_| CliError::Usage("--state-mix takes four probabilities".into()))?;
            let params = SyntheticParams {
                clusters: a.clusters,
                pre_range: min_max(&a.pre, "pre")?,
                post_range: min_max(&a.post, "post")?,
                density: a.density,
                state_mix,
                spike_rate: a.rate,
                duration: a.duration,
                max_hops: a.max_hops,
                seed: a.seed,
            };
            generate_synthetic(&params)?
        }
    };
    write_json(&a.out, &network)?;
    if let Some(path) = &a.spikes {
        write_spikes(path, &trains)?;
    }
    let spikes: usize = trains.iter().map(|t| t.len()).sum();
    say(
        out,
        format_args!(
            "{} clusters, {} synapses, {} routes, {} spikes",
            network.clusters.len(),
            network.synapse_count(),
            network.routes.len(),
            spikes
        ),
    )
}

fn map(a: MapArgs, out: &mut dyn Write) -> Result<()> {
    let network: Network = read_json(&a.network)?;
    let spec = parse_spec(&a.spec, a.control)?;
    let tech = a.tech.load()?;
    let count = a.crossbars.unwrap_or(network.clusters.len().max(1) as u32);
    let hw = Hardware::new(count, spec, tech)?;
    let placement = match a.mapper {
        Mapper::Optimized => map_network(&network, &hw)?,
        Mapper::Random => map_network_control(&network, &hw, a.seed)?,
    };
    write_json(&a.out, &placement)?;
    say(out, format_args!("spec {spec}, {} crossbars ({} idle)", count, placement.idle_crossbars()))?;
    for x in &placement.crossbars {
        say(
            out,
            format_args!(
                "crossbar {:>3}  cluster {:>3}  config {}  synapses {:>5}  utilization {:.4}%",
                x.id,
                x.cluster,
                x.config,
                x.synapses.len(),
                100.0 * x.utilization()?
            ),
        )?;
    }
    let hist = placement.config_histogram();
    let parts: Vec<String> = Configuration::ALL
        .iter()
        .zip(hist)
        .map(|(c, k)| format!("'{c}': {k}"))
        .collect();
    say(out, format_args!("configurations {}", parts.join(", ")))
}

fn simulate_cmd(a: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let placement: PlacementSet = read_json(&a.placement)?;
    placement.validate()?;
    let trains = read_spikes(&a.spikes)?;
    let neuron = match &a.neuron {
        Some(path) => read_json(path)?,
        None => IfNeuron::default(),
    };
    let report = simulate(&placement, &trains, a.duration, &neuron)?;
    fs::create_dir_all(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    if matches!(a.format, Format::Json | Format::Both) {
        write_json(&a.out.join("report.json"), &SimulationJson::new(&report, a.duration))?;
    }
    if matches!(a.format, Format::Csv | Format::Both) {
        write_csv(&a.out.join("latency.csv"), &latency_rows(&report.latency))?;
        write_csv(&a.out.join("energy.csv"), &[report.energy])?;
        write_csv(&a.out.join("isi.csv"), &report.isi)?;
    }
    let agg = &report.latency.aggregate;
    say(
        out,
        format_args!(
            "latency best {:.6e} s, worst {:.6e} s, diff {:.6e} s, ratio {:.6}",
            agg.best, agg.worst, agg.diff, agg.ratio
        ),
    )?;
    say(out, format_args!("energy total {:.6e} J", report.energy.total_j))?;
    let spikes: usize = report.outputs.iter().map(|t| t.len()).sum();
    say(out, format_args!("{} output spikes from {} neurons", spikes, report.outputs.len()))
}

fn network_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn dse(a: DseArgs, out: &mut dyn Write) -> Result<()> {
    let base = parse_spec(&a.spec, a.control)?;
    let tech = a.tech.load()?;
    let values = parse_list(&a.grid)?;
    let grid: Vec<(u32, u32)> = values
        .iter()
        .flat_map(|&p| values.iter().map(move |&q| (p, q)))
        .collect();
    let networks = a
        .networks
        .iter()
        .map(|path| Ok((network_name(path), read_json::<Network>(path)?)))
        .collect::<Result<Vec<_>>>()?;
    let settings = SweepSettings {
        seed: a.seed,
        spike_rate: a.rate,
        duration: a.duration,
        latency_tolerance: a.tolerance,
    };
    let sweeps = sweep_pq(&networks, &base, &tech, &grid, &settings)?;
    write_csv(&a.out, &sweep_rows(&sweeps))?;
    if let (Some(nh), Some(nl), Some(path)) = (&a.nh_grid, &a.nl_grid, &a.nhnl_out) {
        let points = sweep_nhnl(&base, &tech, &parse_list(nh)?, &parse_list(nl)?)?;
        write_csv(path, &points)?;
    }
    let (p, q) = select_tradeoff(&sweeps, settings.latency_tolerance)?;
    say(out, format_args!("selected P={p} Q={q}"))
}

// SPDX-License-Identifier: Apache-2.0

//! Design-space exploration over partition points `(P, Q)` and state-region
//! sizes `(N_h, N_l)`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::crossbar::{Configuration, CrossbarSpec};
use crate::error::{Error, Result};
use crate::mapper::{map_network, Hardware, PlacementSet};
use crate::simulate::{corner_stats, energy_report, latency_stats, Activity};
use crate::techmodel::TechnologyParams;
use crate::workload::{poisson_trains, Network, NeuronId};

/// Activity used to price every grid point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSettings {
    pub seed: u64,
    /// Hz per neuron.
    pub spike_rate: f64,
    /// Seconds.
    pub duration: f64,
    /// Largest `norm_latency - 1` still counted as no regression.
    pub latency_tolerance: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            seed: 0,
            spike_rate: 30.0,
            duration: 1.0,
            latency_tolerance: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepPoint {
    pub spec: CrossbarSpec,
    pub norm_energy: f64,
    /// Mean synapse path latency over the baseline's.
    pub norm_latency: f64,
    /// Corner-extreme spread `1 - best/worst` over the baseline's.
    pub norm_variation: f64,
    /// Used crossbars in configuration '11'.
    pub expanded_fraction: f64,
    /// Used crossbars whose cells all lie in the collapsed `P x Q` region.
    pub collapsed_fraction: f64,
    /// False when some cluster could not be placed; ratios are then NaN.
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NetworkSweep {
    pub network: String,
    pub points: Vec<SweepPoint>,
}

struct Measured {
    energy: f64,
    latency: f64,
    spread: f64,
    expanded_fraction: f64,
    collapsed_fraction: f64,
}

fn measure(placement: &PlacementSet, activity: &Activity) -> Result<Measured> {
    let latency = latency_stats(placement)?;
    let energy = energy_report(placement, activity)?;
    let used = placement.crossbars.len().max(1) as f64;
    let collapsed = placement
        .crossbars
        .iter()
        .filter(|x| x.synapses.iter().all(|s| x.spec.in_collapsed_region(s.cell)))
        .count();
    Ok(Measured {
        energy: energy.total_j,
        latency: latency.aggregate.mean,
        spread: latency.corners.spread(),
        expanded_fraction: placement.count_config(Configuration::C11) as f64 / used,
        collapsed_fraction: collapsed as f64 / used,
    })
}

fn ratio(value: f64, base: f64) -> f64 {
    if base == 0.0 {
        if value == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        value / base
    }
}

fn is_placement_failure(e: &Error) -> bool {
    matches!(e, Error::Infeasible { .. } | Error::ClusterTooLarge { .. })
}

fn check_grid(grid: &[(u32, u32)], n: u32) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if let Some(&(p, q)) = grid.iter().find(|&&(p, q)| p == 0 || q == 0 || p > n || q > n) {
        return Err(Error::InvalidGrid(format!("({p}, {q}) outside 1..={n}")));
    }
    Ok(())
}

/// Evaluate each network at each `(P, Q)`, normalized to `P = Q = N` with the
/// same regions. Every network gets one seeded Poisson trace reused across
/// the grid. Unplaceable points are flagged rather than fatal.
pub fn sweep_pq(
    networks: &[(String, Network)],
    base_spec: &CrossbarSpec,
    tech: &TechnologyParams,
    grid: &[(u32, u32)],
    settings: &SweepSettings,
) -> Result<Vec<NetworkSweep>> {
    base_spec.validate()?;
    check_grid(grid, base_spec.n)?;
    let baseline_spec = base_spec.with_partition(base_spec.n, base_spec.n)?;
    let mut out = Vec::with_capacity(networks.len());
    for (k, (name, network)) in networks.iter().enumerate() {
        network.validate()?;
        let crossbars = network.clusters.len().max(1) as u32;
        let neurons: Vec<NeuronId> = network.neurons().into_iter().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(settings.seed.wrapping_add(k as u64));
        let trains = poisson_trains(&neurons, settings.spike_rate, settings.duration, &mut rng)?;
        let activity = Activity::from_trains(&trains, &network.routes, settings.duration);

        let eval = |spec: CrossbarSpec| -> Result<Measured> {
            let hw = Hardware::new(crossbars, spec, tech.clone())?;
            measure(&map_network(network, &hw)?, &activity)
        };
        let base = eval(baseline_spec)?;
        let mut points = Vec::with_capacity(grid.len());
        for &(p, q) in grid {
            let spec = base_spec.with_partition(p, q)?;
            let point = if (p, q) == (base_spec.n, base_spec.n) {
                SweepPoint {
                    spec,
                    norm_energy: 1.0,
                    norm_latency: 1.0,
                    norm_variation: 1.0,
                    expanded_fraction: base.expanded_fraction,
                    collapsed_fraction: base.collapsed_fraction,
                    feasible: true,
                }
            } else {
                match eval(spec) {
                    Ok(m) => SweepPoint {
                        spec,
                        norm_energy: ratio(m.energy, base.energy),
                        norm_latency: ratio(m.latency, base.latency),
                        norm_variation: ratio(m.spread, base.spread),
                        expanded_fraction: m.expanded_fraction,
                        collapsed_fraction: m.collapsed_fraction,
                        feasible: true,
                    },
                    Err(e) if is_placement_failure(&e) => SweepPoint {
                        spec,
                        norm_energy: f64::NAN,
                        norm_latency: f64::NAN,
                        norm_variation: f64::NAN,
                        expanded_fraction: f64::NAN,
                        collapsed_fraction: f64::NAN,
                        feasible: false,
                    },
                    Err(e) => return Err(e),
                }
            };
            points.push(point);
        }
        out.push(NetworkSweep {
            network: name.clone(),
            points,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegionPoint {
    pub n_h: u32,
    pub n_l: u32,
    /// Corner-extremes `best / worst`.
    pub ratio: f64,
    /// `1 - ratio`.
    pub spread: f64,
    /// Spread over the spread of `⟨N, 0, 0⟩`.
    pub norm_variation: f64,
}

/// Corner-extreme latency variation of the full `N x N` array for every
/// `(N_h, N_l)` pair, row-major in `nh_grid`.
pub fn sweep_nhnl(
    spec: &CrossbarSpec,
    tech: &TechnologyParams,
    nh_grid: &[u32],
    nl_grid: &[u32],
) -> Result<Vec<RegionPoint>> {
    spec.validate()?;
    tech.validate()?;
    if nh_grid.is_empty() || nl_grid.is_empty() {
        return Err(Error::InvalidGrid("N_h and N_l grids must be nonempty".into()));
    }
    let n = spec.n;
    let full = |n_h, n_l| CrossbarSpec::new(n, n_h, n_l, n, n, spec.control);
    let base = corner_stats(Configuration::C11, &full(0, 0)?, tech)?;
    let mut out = Vec::with_capacity(nh_grid.len() * nl_grid.len());
    for &n_h in nh_grid {
        for &n_l in nl_grid {
            if n_h as u64 + n_l as u64 > n as u64 {
                return Err(Error::InvalidGrid(format!(
                    "N_h + N_l = {} exceeds N = {n}",
                    n_h as u64 + n_l as u64
                )));
            }
            let stats = corner_stats(Configuration::C11, &full(n_h, n_l)?, tech)?;
            out.push(RegionPoint {
                n_h,
                n_l,
                ratio: stats.ratio,
                spread: stats.spread(),
                norm_variation: ratio(stats.spread(), base.spread()),
            });
        }
    }
    Ok(out)
}

/// Smallest-area point of one sweep without latency regression; equal areas
/// prefer the larger `P`.
pub fn knee(sweep: &NetworkSweep, tolerance: f64) -> Option<(u32, u32)> {
    sweep
        .points
        .iter()
        .filter(|pt| pt.feasible && pt.norm_latency <= 1.0 + tolerance)
        .map(|pt| (pt.spec.p, pt.spec.q))
        .min_by(|a, b| {
            (a.0 as u64 * a.1 as u64)
                .cmp(&(b.0 as u64 * b.1 as u64))
                .then(b.0.cmp(&a.0))
        })
}

/// Elementwise maximum of the per-network knees.
pub fn select_tradeoff(sweeps: &[NetworkSweep], tolerance: f64) -> Result<(u32, u32)> {
    let first = sweeps
        .first()
        .ok_or_else(|| Error::InvalidGrid("no sweeps to select from".into()))?;
    let grid_of = |s: &NetworkSweep| -> BTreeSet<(u32, u32)> {
        s.points.iter().map(|pt| (pt.spec.p, pt.spec.q)).collect()
    };
    let shared = grid_of(first);
    let mut best = (0, 0);
    for s in sweeps {
        if grid_of(s) != shared {
            return Err(Error::InvalidGrid(format!(
                "sweep of '{}' uses a different grid",
                s.network
            )));
        }
        let (p, q) = knee(s, tolerance).ok_or_else(|| Error::NoFeasibleKnee(s.network.clone()))?;
        best = (best.0.max(p), best.1.max(q));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossbar::Control;
    use alloc::vec;

    fn point(p: u32, q: u32, lat: f64) -> SweepPoint {
        SweepPoint {
            spec: CrossbarSpec::new(128, 0, 0, p, q, Control::Double).unwrap(),
            norm_energy: 1.0,
            norm_latency: lat,
            norm_variation: 1.0,
            expanded_fraction: 0.0,
            collapsed_fraction: 1.0,
            feasible: true,
        }
    }

    fn sweep(name: &str, knee_at: u32) -> NetworkSweep {
        let points = [64, 80, 96, 128]
            .into_iter()
            .map(|d| point(d, d, if d >= knee_at { 0.9 } else { 1.2 }))
            .collect();
        NetworkSweep {
            network: name.into(),
            points,
        }
    }

    #[test]
    fn single_network_knee() {
        assert_eq!(select_tradeoff(&[sweep("a", 80)], 0.0).unwrap(), (80, 80));
    }

    #[test]
    fn elementwise_max_across_networks() {
        assert_eq!(
            select_tradeoff(&[sweep("a", 80), sweep("b", 96)], 0.0).unwrap(),
            (96, 96)
        );
    }

    #[test]
    fn all_regress_is_no_knee() {
        let s = NetworkSweep {
            network: "x".into(),
            points: vec![point(64, 64, 1.5), point(80, 80, 1.01)],
        };
        assert_eq!(select_tradeoff(core::slice::from_ref(&s), 0.0), Err(Error::NoFeasibleKnee("x".into())));
        assert_eq!(select_tradeoff(&[s], 0.02).unwrap(), (80, 80));
    }

    #[test]
    fn equal_area_prefers_larger_p() {
        let s = NetworkSweep {
            network: "x".into(),
            points: vec![point(64, 96, 1.0), point(96, 64, 1.0)],
        };
        assert_eq!(knee(&s, 0.0), Some((96, 64)));
    }

    #[test]
    fn nhnl_rejects_oversized_regions() {
        let spec = CrossbarSpec::baseline(16).unwrap();
        let tech = TechnologyParams::preset("16nm").unwrap();
        assert!(matches!(
            sweep_nhnl(&spec, &tech, &[8, 12], &[8]),
            Err(Error::InvalidGrid(_))
        ));
        let pts = sweep_nhnl(&spec, &tech, &[0], &[0]).unwrap();
        assert_eq!(pts[0].norm_variation, 1.0);
    }
}

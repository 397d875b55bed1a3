// SPDX-License-Identifier: Apache-2.0

//! Closed-form density and die-area figures.

use crate::error::{Error, Result};

/// Area assumptions for the neuron periphery and the isolation transistors.
/// Height and width ratios are in units of one 1T-1R cell.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AreaModel {
    pub transistors_per_neuron: u32,
    pub capacitors_per_neuron: u32,
    pub sense_amp_height_ratio: f64,
    pub iso_height_ratio: f64,
    pub iso_width_ratio: f64,
    pub bits_per_cell: u32,
}

impl Default for AreaModel {
    fn default() -> Self {
        AreaModel {
            transistors_per_neuron: 20,
            capacitors_per_neuron: 1,
            sense_amp_height_ratio: 384.0,
            iso_height_ratio: 9.6,
            iso_width_ratio: 1.3,
            bits_per_cell: 2,
        }
    }
}

impl AreaModel {
    pub fn validate(&self) -> Result<()> {
        let ok = self.transistors_per_neuron > 0
            && self.capacitors_per_neuron > 0
            && self.bits_per_cell > 0
            && [self.sense_amp_height_ratio, self.iso_height_ratio, self.iso_width_ratio]
                .iter()
                .all(|x| x.is_finite() && *x > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams("area model entries must be positive".into()))
        }
    }

    /// Transistors and capacitors of the `2n` neurons serving an `n x n` crossbar.
    pub fn neuron_devices(&self, n: u32) -> (u64, u64) {
        let neurons = 2 * n as u64;
        (
            neurons * self.transistors_per_neuron as u64,
            neurons * self.capacitors_per_neuron as u64,
        )
    }
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParams("crossbar dimension must be at least 1".into()));
    }
    Ok(())
}

/// Area per stored bit in nm^2: `F^2 (27 + 2n) / n`.
pub fn cost_per_bit(n: u32, feature_size_nm: f64) -> Result<f64> {
    check_n(n)?;
    let n = n as f64;
    Ok(feature_size_nm * feature_size_nm * (27.0 + 2.0 * n) / n)
}

/// Bits stored by an `n x n` crossbar of 2-bit cells.
pub fn total_bits(n: u32) -> u64 {
    2 * n as u64 * n as u64
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DieAreaOverhead {
    pub height_pct: f64,
    pub width_pct: f64,
}

/// Extra die height and width taken by one row and one column of isolation
/// transistors, as a percentage of the crossbar plus sense amplifiers.
pub fn die_area_overhead(n: u32, model: &AreaModel) -> Result<DieAreaOverhead> {
    check_n(n)?;
    model.validate()?;
    let n = n as f64;
    Ok(DieAreaOverhead {
        height_pct: 100.0 * model.iso_height_ratio / (model.sense_amp_height_ratio + n),
        width_pct: 100.0 * model.iso_width_ratio / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_per_bit_at_128_16nm() {
        assert_eq!(cost_per_bit(128, 16.0).unwrap(), 566.0);
        assert!(cost_per_bit(256, 16.0).unwrap() < cost_per_bit(128, 16.0).unwrap());
        let ratio = cost_per_bit(64, 16.0).unwrap() / cost_per_bit(64, 45.0).unwrap();
        assert!((ratio - (16.0f64 / 45.0).powi(2)).abs() < 1e-15);
        assert!(cost_per_bit(0, 16.0).is_err());
    }

    #[test]
    fn bit_counts() {
        assert_eq!(total_bits(128), 32_768);
        assert_eq!(total_bits(1), 2);
        assert_eq!(total_bits(4), 32);
    }

    #[test]
    fn overhead_values() {
        let m = AreaModel::default();
        let o = die_area_overhead(128, &m).unwrap();
        assert!((o.height_pct - 1.875).abs() < 1e-12);
        assert!((o.width_pct - 1.015625).abs() < 1e-12);
        let o64 = die_area_overhead(64, &m).unwrap();
        assert!((o64.height_pct - 960.0 / 448.0).abs() < 1e-12);
        let far = die_area_overhead(1 << 30, &m).unwrap();
        assert!(far.height_pct < 1e-6 && far.width_pct < 1e-6);
    }

    #[test]
    fn neuron_devices_scale_with_two_n() {
        assert_eq!(AreaModel::default().neuron_devices(128), (5120, 256));
    }
}

use serde::Serialize;

use super::adaboost::BoostEnsemble;
use crate::data::Dataset;
use crate::error::{Error, Result};

pub const MARGIN_BINS: usize = 40;

/// Equal-width histogram over a closed interval; the upper edge falls in the
/// last bin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn build(values: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        let mut counts = vec![0u64; bins];
        let width = (hi - lo) / bins as f64;
        for &v in values {
            if !(lo..=hi).contains(&v) {
                continue;
            }
            let b = (((v - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        Self { lo, hi, counts }
    }

    pub fn bin_center(&self, b: usize) -> f64 {
        let width = (self.hi - self.lo) / self.counts.len() as f64;
        self.lo + (b as f64 + 0.5) * width
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginStats {
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub histogram: Histogram,
}

impl MarginStats {
    /// Fraction of instances with margin at or below zero.
    pub fn fraction_nonpositive(&self) -> f64 {
        self.margins.iter().filter(|&&m| m <= 0.0).count() as f64 / self.margins.len() as f64
    }
}

/// Normalized margins `y_i Σ α_t h_t(x_i) / Σ |α_t|`.
pub fn margins(ens: &BoostEnsemble, data: &Dataset) -> Result<MarginStats> {
    let scale: f64 = ens.alphas().iter().map(|a| a.abs()).sum();
    if scale <= 0.0 {
        return Err(Error::ZeroAlphas);
    }
    let margins: Vec<f64> = (0..data.len())
        .map(|i| (data.labels()[i] * ens.decision_function(data.row(i)) / scale).clamp(-1.0, 1.0))
        .collect();
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let histogram = Histogram::build(&margins, -1.0, 1.0, MARGIN_BINS);
    Ok(MarginStats {
        margins,
        min_margin,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boosting::adaboost_train;

    #[test]
    fn one_round_margins_are_unit() {
        let ds = Dataset::from_1d(&[1.0, 2.0, 3.0, 4.0, 5.0], &[1.0, 1.0, -1.0, 1.0, -1.0]).unwrap();
        let ens = adaboost_train(&ds, 1).unwrap();
        let m = margins(&ens, &ds).unwrap();
        for (i, &rho) in m.margins.iter().enumerate() {
            let expected = ds.labels()[i] * ens.stumps()[0].predict(ds.row(i));
            assert_eq!(rho, expected);
        }
        assert_eq!(m.histogram.total(), 5);
        assert_eq!(m.histogram.counts.len(), 40);
    }

    #[test]
    fn margins_bounded() {
        let xs: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let ys: Vec<f64> = (0..30).map(|i| if (i / 3) % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let ds = Dataset::from_1d(&xs, &ys).unwrap();
        let ens = adaboost_train(&ds, 40).unwrap();
        let m = margins(&ens, &ds).unwrap();
        assert!(m.margins.iter().all(|r| (-1.0..=1.0).contains(r)));
        assert!(m.min_margin <= m.margins[0]);
    }

    #[test]
    fn histogram_edges() {
        let h = Histogram::build(&[-1.0, 0.0, 1.0], -1.0, 1.0, 4);
        assert_eq!(h.counts, vec![1, 0, 1, 1]);
        assert_eq!(h.bin_center(0), -0.75);
    }
}

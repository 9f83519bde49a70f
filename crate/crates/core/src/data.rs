//! Synthetic problems: labelled classification data and site worlds.

use ndarray::{Array2, ArrayView1};
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::rng::RngStream;

/// Feature matrix with ±1 labels.
///
/// `clean_labels` keeps the labels as generated before any label noise, so a
/// test set can always be scored against the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<f64>,
    clean_labels: Vec<f64>,
}

impl Dataset {
    pub fn new(features: Array2<f64>, labels: Vec<f64>) -> Result<Self> {
        let clean = labels.clone();
        Self::with_clean_labels(features, labels, clean)
    }

    pub fn with_clean_labels(
        features: Array2<f64>,
        labels: Vec<f64>,
        clean_labels: Vec<f64>,
    ) -> Result<Self> {
        let (n, d) = features.dim();
        if n < 2 {
            return Err(invalid("features", format!("need at least 2 rows, got {n}")));
        }
        if d < 1 {
            return Err(invalid("features", "need at least one column"));
        }
        if labels.len() != n || clean_labels.len() != n {
            return Err(invalid(
                "labels",
                format!("expected {n} labels, got {} / {}", labels.len(), clean_labels.len()),
            ));
        }
        if labels.iter().chain(&clean_labels).any(|&y| y != 1.0 && y != -1.0) {
            return Err(invalid("labels", "every label must be -1 or +1"));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(invalid("features", "non-finite feature value"));
        }
        Ok(Self {
            features,
            labels,
            clean_labels,
        })
    }

    /// Convenience constructor for one-dimensional data.
    pub fn from_1d(xs: &[f64], labels: &[f64]) -> Result<Self> {
        let features = Array2::from_shape_vec((xs.len(), 1), xs.to_vec())
            .map_err(|e| invalid("xs", e.to_string()))?;
        Self::new(features, labels.to_vec())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn clean_labels(&self) -> &[f64] {
        &self.clean_labels
    }

    /// Number of indices where the observed label differs from the clean one.
    pub fn flipped(&self) -> usize {
        self.labels
            .iter()
            .zip(&self.clean_labels)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// Two-Gaussian classification task.
///
/// Classes are balanced (`n / 2` each, the odd instance assigned by a coin
/// flip) and shuffled. Class means sit at `±separation / 2` on the first
/// `ceil(d / 2)` coordinates and coincide on the rest; all coordinates carry
/// unit-variance noise. Exactly `round(label_noise * n)` labels are then
/// flipped.
pub fn make_classification(
    n: usize,
    d: usize,
    separation: f64,
    label_noise: f64,
    rng: &mut RngStream,
) -> Result<Dataset> {
    if n < 2 {
        return Err(invalid("n", format!("need n >= 2, got {n}")));
    }
    if d < 1 {
        return Err(invalid("d", "need d >= 1"));
    }
    if !(0.0..=0.5).contains(&label_noise) {
        return Err(invalid(
            "label_noise",
            format!("{label_noise} is outside [0, 0.5]"),
        ));
    }
    if !separation.is_finite() {
        return Err(invalid("separation", "must be finite"));
    }

    let mut positives = n / 2;
    if n % 2 == 1 && rng.random_bool(0.5) {
        positives += 1;
    }
    let mut clean: Vec<f64> = (0..n).map(|i| if i < positives { 1.0 } else { -1.0 }).collect();
    clean.shuffle(rng);

    let informative = d.div_ceil(2);
    let half = 0.5 * separation;
    let mut features = Array2::<f64>::zeros((n, d));
    for (i, mut row) in features.rows_mut().into_iter().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let z: f64 = StandardNormal.sample(rng);
            *v = if j < informative { z + clean[i] * half } else { z };
        }
    }

    let mut labels = clean.clone();
    let flips = (label_noise * n as f64).round() as usize;
    for i in sample(rng, n, flips) {
        labels[i] = -labels[i];
    }
    Dataset::with_clean_labels(features, labels, clean)
}

/// Sites with qualities and heuristic desirabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteWorld {
    qualities: Vec<f64>,
    heuristics: Vec<f64>,
    best_site: usize,
}

impl SiteWorld {
    /// Builds a world with neutral heuristics (all 1).
    pub fn new(qualities: Vec<f64>) -> Result<Self> {
        let heuristics = vec![1.0; qualities.len()];
        Self::with_heuristics(qualities, heuristics)
    }

    pub fn with_heuristics(qualities: Vec<f64>, heuristics: Vec<f64>) -> Result<Self> {
        if qualities.len() < 2 {
            return Err(invalid("qualities", "need at least two sites"));
        }
        if heuristics.len() != qualities.len() {
            return Err(invalid("heuristics", "length must match qualities"));
        }
        if qualities.iter().any(|&q| !(q > 0.0 && q.is_finite())) {
            return Err(invalid("qualities", "every quality must be positive and finite"));
        }
        if heuristics.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(invalid("heuristics", "every heuristic must be positive and finite"));
        }
        let best_site = argmax_unique(&qualities)
            .ok_or_else(|| invalid("qualities", "the best site must be unique"))?;
        Ok(Self {
            qualities,
            heuristics,
            best_site,
        })
    }

    pub fn k(&self) -> usize {
        self.qualities.len()
    }

    pub fn qualities(&self) -> &[f64] {
        &self.qualities
    }

    pub fn heuristics(&self) -> &[f64] {
        &self.heuristics
    }

    pub fn best_site(&self) -> usize {
        self.best_site
    }
}

fn argmax_unique(xs: &[f64]) -> Option<usize> {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    let ties = xs.iter().filter(|&&x| x == xs[best]).count();
    (ties == 1).then_some(best)
}

/// Quality of the best site in generated worlds.
pub const DEFAULT_Q_MAX: f64 = 10.0;

/// Random world with `k` sites and best quality [`DEFAULT_Q_MAX`].
pub fn make_site_world(k: usize, quality_gap: f64, rng: &mut RngStream) -> Result<SiteWorld> {
    make_site_world_with_max(k, quality_gap, DEFAULT_Q_MAX, rng)
}

/// Random world: the best site (at a uniformly random index) has quality
/// `q_max`; the others are uniform on `[q_max (1 - 2 gap), q_max (1 - gap)]`.
pub fn make_site_world_with_max(
    k: usize,
    quality_gap: f64,
    q_max: f64,
    rng: &mut RngStream,
) -> Result<SiteWorld> {
    if k < 2 {
        return Err(invalid("k", format!("need at least two sites, got {k}")));
    }
    if !(quality_gap > 0.0 && quality_gap < 0.5) {
        return Err(invalid(
            "quality_gap",
            format!("{quality_gap} is outside (0, 0.5)"),
        ));
    }
    if !(q_max > 0.0 && q_max.is_finite()) {
        return Err(invalid("q_max", "must be positive and finite"));
    }
    let lo = q_max * (1.0 - 2.0 * quality_gap);
    let hi = q_max * (1.0 - quality_gap);
    let best = rng.random_range(0..k);
    let qualities = (0..k)
        .map(|j| if j == best { q_max } else { lo + (hi - lo) * rng.uniform() })
        .collect();
    SiteWorld::new(qualities)
}

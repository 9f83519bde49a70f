//! Mapping boosting weight vectors onto pheromone fields.
//!
//! Instances are assigned to sites; a weight vector maps to the per-site
//! weight mass. The equivalence check runs boosting rounds and, from the
//! mapped state, single colony waves whose evaporation and foraging pattern
//! are matched to the round, then compares the boosting update with the
//! Monte Carlo mean colony update on the simplex.

use serde::Serialize;

use crate::acar::{sample_wave, NoiseModel, WaveTrace};
use crate::boosting::{learner_weight, update_weights, StumpSearch, WeightVector};
use crate::data::{Dataset, SiteWorld};
use crate::error::{invalid, Result};
use crate::rng::RngStream;

/// Total map from instance index to site index.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteAssignment {
    site_of: Vec<usize>,
    k: usize,
}

impl SiteAssignment {
    pub fn new(site_of: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k", "need at least one site"));
        }
        let mut seen = vec![false; k];
        for &s in &site_of {
            if s >= k {
                return Err(invalid("site_of", format!("site {s} out of range for k = {k}")));
            }
            seen[s] = true;
        }
        if let Some(empty) = seen.iter().position(|&s| !s) {
            return Err(invalid("site_of", format!("site {empty} receives no instance")));
        }
        Ok(Self { site_of, k })
    }

    /// Two-site assignment by label: positives go to the world's best site.
    pub fn from_labels(data: &Dataset, world: &SiteWorld) -> Result<Self> {
        if world.k() != 2 {
            return Err(invalid("world", "label assignment is defined for two sites"));
        }
        let best = world.best_site();
        let site_of = data
            .labels()
            .iter()
            .map(|&y| if y > 0.0 { best } else { 1 - best })
            .collect();
        Self::new(site_of, 2)
    }

    pub fn site_of(&self) -> &[usize] {
        &self.site_of
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.site_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.site_of.is_empty()
    }
}

/// Per-site weight mass `τ̃_j = Σ_{i: site(i) = j} D(i)`.
pub fn psi_map_weights(weights: &[f64], assignment: &SiteAssignment, k: usize) -> Result<Vec<f64>> {
    if k != assignment.k {
        return Err(invalid("k", format!("assignment has {} sites, got k = {k}", assignment.k)));
    }
    if weights.len() != assignment.len() {
        return Err(invalid("weights", "length differs from the assignment"));
    }
    let mut tau = vec![0.0; k];
    for (&w, &s) in weights.iter().zip(&assignment.site_of) {
        tau[s] += w;
    }
    Ok(tau)
}

/// Parameters obtained by reading the boosting round literally as a colony
/// update: unhalved log-odds vote and `ρ = 1 - 1/Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchedParams {
    pub alpha_unhalved: f64,
    pub rho_matched: f64,
    /// False when `rho_matched` falls outside the evaporation domain (0, 1].
    pub rho_in_domain: bool,
}

pub fn matched_parameters(epsilon: f64, z: f64) -> Result<MatchedParams> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(invalid("epsilon", format!("{epsilon} is outside (0, 0.5)")));
    }
    if !(z > 0.0 && z < 1.0) {
        return Err(invalid("z", format!("{z} is outside (0, 1)")));
    }
    let rho = 1.0 - 1.0 / z;
    Ok(MatchedParams {
        alpha_unhalved: ((1.0 - epsilon) / epsilon).ln(),
        rho_matched: rho,
        rho_in_domain: rho > 0.0 && rho <= 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsoCheckOptions {
    pub ants_per_wave: usize,
    pub noise: NoiseModel,
}

impl Default for IsoCheckOptions {
    fn default() -> Self {
        Self {
            ants_per_wave: 40,
            noise: NoiseModel::proportional(0.1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceRound {
    pub round: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub z: f64,
    /// Site masses before the round, `Ψ(D_t)`.
    pub mapped_before: Vec<f64>,
    /// `Ψ(D_{t+1})`.
    pub boosting_update: Vec<f64>,
    /// Renormalized Monte Carlo mean of the colony update.
    pub colony_mean: Vec<f64>,
    /// Evaporation that matches the round's shrink factor, `1 - e^{-α}/Z`.
    pub evaporation: f64,
    pub deposit_scale: f64,
    pub foraging: Vec<f64>,
    pub gap: f64,
    pub stderr: f64,
    pub pass: bool,
    pub literal: Option<MatchedParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub tol: f64,
    pub mc_samples: usize,
    pub options: IsoCheckOptions,
    pub rounds: Vec<EquivalenceRound>,
    pub notes: Vec<String>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.rounds.iter().all(|r| r.pass)
    }
}

/// Colony-side expectation pieces for one matched round.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct MatchedWave {
    pub keep: f64,
    pub foraging: Vec<f64>,
    pub deposit_scale: f64,
}

/// Splits the boosting update into evaporation plus deposits.
///
/// `after = keep * before + Δ` with `keep` the smallest per-instance factor
/// `e^{-α}/Z`, so `Δ ≥ 0`. Ants then forage with `p_j ∝ Δ_j / Q_j` and the
/// deposit scale makes the expected deposit on site `j` equal `Δ_j`.
pub(crate) fn match_wave(
    before: &[f64],
    after: &[f64],
    keep: f64,
    qualities: &[f64],
    ants: usize,
) -> MatchedWave {
    let delta: Vec<f64> = before
        .iter()
        .zip(after)
        .map(|(&b, &a)| (a - keep * b).max(0.0))
        .collect();
    let mass: f64 = delta.iter().sum();
    if mass <= 0.0 {
        return MatchedWave {
            keep,
            foraging: vec![1.0 / before.len() as f64; before.len()],
            deposit_scale: 0.0,
        };
    }
    let raw: Vec<f64> = delta.iter().zip(qualities).map(|(d, q)| d / q).collect();
    let total: f64 = raw.iter().sum();
    let foraging: Vec<f64> = raw.iter().map(|r| r / total).collect();
    let expected_quality: f64 = foraging.iter().zip(qualities).map(|(p, q)| p * q).sum();
    MatchedWave {
        keep,
        foraging,
        deposit_scale: mass / (ants as f64 * expected_quality),
    }
}

/// Runs `rounds` AdaBoost rounds and, for each, `mc_samples` matched colony
/// waves from the mapped state. A round passes when the L1 gap between the
/// boosting update and the colony mean (both on the simplex) is below
/// `tol + 3 * stderr`.
pub fn update_equivalence_check(
    data: &Dataset,
    assignment: &SiteAssignment,
    world: &SiteWorld,
    rounds: usize,
    mc_samples: usize,
    tol: f64,
    options: IsoCheckOptions,
    rng: &mut RngStream,
) -> Result<EquivalenceReport> {
    if assignment.len() != data.len() {
        return Err(invalid("assignment", "length differs from the dataset"));
    }
    if assignment.k() != world.k() {
        return Err(invalid("assignment", "site count differs from the world"));
    }
    let best = world.best_site();
    if data
        .labels()
        .iter()
        .zip(assignment.site_of())
        .any(|(&y, &s)| s == best && y < 0.0)
    {
        return Err(invalid("assignment", "best-site instances must be labelled +1"));
    }
    if mc_samples < 2 {
        return Err(invalid("mc_samples", "need at least two samples"));
    }
    if options.ants_per_wave == 0 {
        return Err(invalid("ants_per_wave", "need at least one ant"));
    }

    let k = world.k();
    let search = StumpSearch::new(data.features());
    let mut weights = WeightVector::uniform(data.len());
    let mut out = Vec::with_capacity(rounds);

    for round in 1..=rounds {
        let (h, eps) = search.fit(data.features(), data.labels(), weights.as_slice());
        let alpha = if eps >= 0.5 { 0.0 } else { learner_weight(eps) };
        let (next, z) = update_weights(&weights, alpha, &h, data)?;
        let before = psi_map_weights(weights.as_slice(), assignment, k)?;
        let after = psi_map_weights(next.as_slice(), assignment, k)?;

        let matched = match_wave(&before, &after, (-alpha).exp() / z, world.qualities(), options.ants_per_wave);
        let stats = colony_mean(&before, &matched, world, mc_samples, options, rng);
        let gap: f64 = stats.mean.iter().zip(&after).map(|(c, b)| (c - b).abs()).sum();

        out.push(EquivalenceRound {
            round,
            epsilon: eps,
            alpha,
            z,
            mapped_before: before,
            boosting_update: after,
            colony_mean: stats.mean,
            evaporation: 1.0 - matched.keep,
            deposit_scale: matched.deposit_scale,
            foraging: matched.foraging,
            gap,
            stderr: stats.stderr,
            pass: gap < tol + 3.0 * stats.stderr,
            literal: matched_parameters(eps, z).ok(),
        });
        weights = next;
    }

    let mut notes = vec![
        "AdaBoost votes use ½·ln((1-ε)/ε); `literal.alpha_unhalved` reports the unhalved log-odds."
            .to_string(),
        "Evaporation is matched as 1 - e^{-α}/Z so that all deposits are nonnegative.".to_string(),
    ];
    let flagged = out
        .iter()
        .filter(|r| r.literal.is_some_and(|m| !m.rho_in_domain))
        .count();
    if flagged > 0 {
        notes.push(format!(
            "rho = 1 - 1/Z falls outside (0, 1] in {flagged} of {} rounds (negative whenever Z < 1).",
            out.len()
        ));
    }
    Ok(EquivalenceReport {
        tol,
        mc_samples,
        options,
        rounds: out,
        notes,
    })
}

pub(crate) struct ColonyMean {
    pub mean: Vec<f64>,
    pub stderr: f64,
}

pub(crate) fn colony_mean(
    before: &[f64],
    matched: &MatchedWave,
    world: &SiteWorld,
    samples: usize,
    options: IsoCheckOptions,
    rng: &mut RngStream,
) -> ColonyMean {
    let k = before.len();
    let mut sum = vec![0.0; k];
    let mut sq = vec![0.0; k];
    for _ in 0..samples {
        let deposits = if matched.deposit_scale > 0.0 {
            sample_wave(
                &matched.foraging,
                world,
                options.ants_per_wave,
                matched.deposit_scale,
                options.noise,
                rng,
            )
            .deposits
        } else {
            vec![0.0; k]
        };
        for j in 0..k {
            let v = matched.keep * before[j] + deposits[j];
            sum[j] += v;
            sq[j] += v * v;
        }
    }
    let m = samples as f64;
    let raw_mean: Vec<f64> = sum.iter().map(|s| s / m).collect();
    let total: f64 = raw_mean.iter().sum();
    let stderr = (0..k)
        .map(|j| {
            let var = (sq[j] / m - raw_mean[j] * raw_mean[j]).max(0.0) * m / (m - 1.0);
            (var / m).sqrt() / total
        })
        .sum();
    ColonyMean {
        mean: raw_mean.iter().map(|v| v / total).collect(),
        stderr,
    }
}

/// Replicate-averaged error sequence of colony runs against the geometric
/// envelope `(1 - γ)^t ε_0` (waves indexed from 0).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport {
    pub gamma: f64,
    pub replicates: usize,
    pub mean_epsilon: Vec<f64>,
    pub stderr: Vec<f64>,
    /// `ε̄_{t+1} / ε̄_t`; NaN when `ε̄_t` is zero.
    pub ratios: Vec<f64>,
    pub envelope: Vec<f64>,
    /// Whether `ε̄_t - 2 se_t <= envelope_t`.
    pub within_envelope: Vec<bool>,
    /// Mean and standard error of the per-replicate change `ε_{t+1} - ε_t`.
    pub paired_change: Vec<(f64, f64)>,
}

impl ContractionReport {
    /// Wave indices `t >= from` where the mean error rises from `t` to `t + 1`.
    pub fn increases_after(&self, from: usize) -> Vec<usize> {
        (from..self.mean_epsilon.len().saturating_sub(1))
            .filter(|&t| self.mean_epsilon[t + 1] > self.mean_epsilon[t])
            .collect()
    }
}

pub fn error_contraction_trace(traces: &[WaveTrace], gamma_weak: f64) -> Result<ContractionReport> {
    let Some(first) = traces.first() else {
        return Err(invalid("traces", "need at least one replicate"));
    };
    let waves = first.epsilon.len();
    if waves == 0 || traces.iter().any(|t| t.epsilon.len() != waves) {
        return Err(invalid("traces", "replicates must share a nonzero wave count"));
    }
    let r = traces.len() as f64;
    let column = |t: usize| traces.iter().map(move |tr| tr.epsilon[t]);
    let mean_sd = |values: Vec<f64>| {
        let m = values.iter().sum::<f64>() / r;
        let var = if traces.len() > 1 {
            values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (r - 1.0)
        } else {
            0.0
        };
        (m, (var / r).sqrt())
    };

    let (mut mean_epsilon, mut stderr) = (Vec::with_capacity(waves), Vec::with_capacity(waves));
    for t in 0..waves {
        let (m, se) = mean_sd(column(t).collect());
        mean_epsilon.push(m);
        stderr.push(se);
    }
    let paired_change = (0..waves - 1)
        .map(|t| mean_sd(column(t + 1).zip(column(t)).map(|(a, b)| a - b).collect()))
        .collect();
    let ratios = mean_epsilon
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { f64::NAN })
        .collect();
    let envelope: Vec<f64> = (0..waves)
        .map(|t| (1.0 - gamma_weak).powi(t as i32) * mean_epsilon[0])
        .collect();
    let within_envelope = (0..waves)
        .map(|t| mean_epsilon[t] - 2.0 * stderr[t] <= envelope[t])
        .collect();
    Ok(ContractionReport {
        gamma: gamma_weak,
        replicates: traces.len(),
        mean_epsilon,
        stderr,
        ratios,
        envelope,
        within_envelope,
        paired_change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acar::{run_acar, ColonyConfig};
    use crate::data::make_classification;
    use crate::rng::derive_stream;
    use proptest::prelude::*;

    #[test]
    fn psi_examples() {
        let a = SiteAssignment::new(vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(psi_map_weights(&[0.25; 4], &a, 2).unwrap(), vec![0.5, 0.5]);
        let b = SiteAssignment::new(vec![0, 1, 1, 1], 2).unwrap();
        let t = psi_map_weights(&[0.7, 0.1, 0.1, 0.1], &b, 2).unwrap();
        assert!((t[0] - 0.7).abs() < 1e-15 && (t[1] - 0.3).abs() < 1e-15);
        assert!(psi_map_weights(&[0.25; 4], &a, 3).is_err());
    }

    #[test]
    fn assignment_must_cover_sites() {
        assert!(SiteAssignment::new(vec![0, 0], 2).is_err());
        assert!(SiteAssignment::new(vec![0, 2], 2).is_err());
    }

    #[test]
    fn matched_parameter_values() {
        let m = matched_parameters(0.25, 2.0 * (0.25f64 * 0.75).sqrt()).unwrap();
        assert!((m.alpha_unhalved - 3f64.ln()).abs() < 1e-12);
        assert!((m.rho_matched - (1.0 - 1.0 / 0.866_025_403_784_438_6)).abs() < 1e-12);
        assert!((m.rho_matched + 0.1547).abs() < 1e-4);
        assert!(!m.rho_in_domain);
        assert!(matched_parameters(0.4999999, 0.99).unwrap().alpha_unhalved < 1e-6);
        assert!(matched_parameters(0.5, 0.9).is_err());
        assert!(matched_parameters(0.0, 0.9).is_err());
        assert!(matched_parameters(0.2, 1.0).is_err());
    }

    #[test]
    fn single_site_is_trivial() {
        let matched = match_wave(&[1.0], &[1.0], 0.8, &[5.0], 10);
        let world = SiteWorld::new(vec![5.0, 1.0]).unwrap();
        assert_eq!(matched.foraging, vec![1.0]);
        // Only the first site is involved.
        let stats = colony_mean(&[1.0], &matched, &world, 50, IsoCheckOptions::default(), &mut derive_stream(1, 0));
        assert_eq!(stats.mean, vec![1.0]);
    }

    #[test]
    fn expectation_is_exact() {
        let before = [0.3, 0.7];
        let after = [0.45, 0.55];
        let keep = 0.75;
        let q = [10.0, 6.0];
        let m = match_wave(&before, &after, keep, &q, 40);
        let expected: Vec<f64> = (0..2)
            .map(|j| keep * before[j] + 40.0 * m.foraging[j] * m.deposit_scale * q[j])
            .collect();
        for j in 0..2 {
            assert!((expected[j] - after[j]).abs() < 1e-15);
        }
    }

    fn two_site_problem(seed: u64, n: usize) -> (Dataset, SiteAssignment, SiteWorld) {
        let data = make_classification(n, 2, 1.5, 0.0, &mut derive_stream(seed, 0)).unwrap();
        let world = SiteWorld::new(vec![10.0, 6.0]).unwrap();
        let a = SiteAssignment::from_labels(&data, &world).unwrap();
        (data, a, world)
    }

    #[test]
    fn symmetric_problem_has_identity_update() {
        // Identical rows with balanced labels: every stump errs 0.5.
        let data = Dataset::from_1d(&[1.0; 4], &[1.0, -1.0, 1.0, -1.0]).unwrap();
        let world = SiteWorld::new(vec![10.0, 6.0]).unwrap();
        let a = SiteAssignment::from_labels(&data, &world).unwrap();
        let rep = update_equivalence_check(&data, &a, &world, 2, 100, 0.05, IsoCheckOptions::default(), &mut derive_stream(2, 0)).unwrap();
        for r in &rep.rounds {
            assert_eq!(r.alpha, 0.0);
            assert_eq!(r.boosting_update, vec![0.5, 0.5]);
            assert!(r.gap < 1e-12);
            assert!(r.pass);
        }
    }

    #[test]
    fn two_site_check_passes() {
        let (data, a, world) = two_site_problem(3, 40);
        let rep = update_equivalence_check(&data, &a, &world, 5, 2000, 0.05, IsoCheckOptions::default(), &mut derive_stream(3, 1)).unwrap();
        assert_eq!(rep.rounds.len(), 5);
        assert!(rep.passed(), "{:?}", rep.rounds.iter().map(|r| r.gap).collect::<Vec<_>>());
        assert!(rep.notes.iter().any(|n| n.contains("1 - 1/Z")));
    }

    #[test]
    fn gaps_shrink_with_samples() {
        let (data, a, world) = two_site_problem(4, 40);
        let mean_gap = |m: usize, s: u64| {
            let rep = update_equivalence_check(&data, &a, &world, 5, m, 0.05, IsoCheckOptions::default(), &mut derive_stream(s, 0)).unwrap();
            rep.rounds.iter().map(|r| r.gap).sum::<f64>() / 5.0
        };
        // Average over a few seeds to tame the noise in a single gap.
        let small: f64 = (0..8).map(|s| mean_gap(100, 100 + s)).sum::<f64>() / 8.0;
        let large: f64 = (0..8).map(|s| mean_gap(1600, 200 + s)).sum::<f64>() / 8.0;
        // 16x the samples: ~4x smaller expected gap.
        assert!(large < 0.5 * small, "{small} -> {large}");
    }

    #[test]
    fn label_mismatch_rejected() {
        let (data, _, world) = two_site_problem(5, 20);
        let wrong: Vec<usize> = data.labels().iter().map(|&y| if y > 0.0 { 1 } else { 0 }).collect();
        let a = SiteAssignment::new(wrong, 2).unwrap();
        assert!(update_equivalence_check(&data, &a, &world, 1, 10, 0.05, IsoCheckOptions::default(), &mut derive_stream(0, 0)).is_err());
    }

    #[test]
    fn contraction_in_strong_colony() {
        let world = SiteWorld::new(vec![6.0, 10.0]).unwrap();
        let cfg = ColonyConfig {
            alpha_exp: 1.0,
            beta_exp: 0.0,
            evaporation: 0.5,
            deposit_rate: 0.05,
            tau0: 1.0,
            tau_min: 1e-6,
            waves: 40,
            ants_per_wave: 30,
            noise: NoiseModel::NONE,
        };
        let traces: Vec<WaveTrace> = (0..200)
            .map(|r| run_acar(&world, &cfg, &mut derive_stream(40, r)).unwrap().1)
            .collect();
        let rep = error_contraction_trace(&traces, 0.25).unwrap();
        assert!(*rep.mean_epsilon.last().unwrap() < 0.05);
        // After burn-in no wave-to-wave increase is significant.
        for (t, (m, se)) in rep.paired_change.iter().enumerate().skip(3) {
            assert!(*m <= 3.0 * se + 1e-12, "wave {t}: {m} ± {se}");
        }
    }

    #[test]
    fn no_signal_stays_near_chance() {
        // Near-equal sites, huge noise, weak feedback: visits stay uniform.
        let world = SiteWorld::new(vec![10.0, 10.0 + 1e-9]).unwrap();
        let cfg = ColonyConfig {
            alpha_exp: 1e-9,
            beta_exp: 0.0,
            evaporation: 0.5,
            deposit_rate: 0.05,
            tau0: 1.0,
            tau_min: 1e-6,
            waves: 10,
            ants_per_wave: 20,
            noise: NoiseModel::absolute(5.0),
        };
        let traces: Vec<WaveTrace> = (0..300)
            .map(|r| run_acar(&world, &cfg, &mut derive_stream(41, r)).unwrap().1)
            .collect();
        let rep = error_contraction_trace(&traces, 0.0).unwrap();
        for (m, se) in rep.mean_epsilon.iter().zip(&rep.stderr) {
            assert!((m - 0.5).abs() < 4.0 * se + 1e-3, "{m}");
        }
    }

    proptest! {
        #[test]
        fn psi_conserves_mass_and_order(
            raw in proptest::collection::vec(0.001f64..1.0, 4..30),
            k in 2usize..4,
        ) {
            let n = raw.len();
            let site_of: Vec<usize> = (0..n).map(|i| i % k).collect();
            let a = SiteAssignment::new(site_of.clone(), k).unwrap();
            let w = WeightVector::normalized(raw.clone()).unwrap();
            let tau = psi_map_weights(w.as_slice(), &a, k).unwrap();
            prop_assert!((tau.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            // linearity
            let doubled: Vec<f64> = raw.iter().map(|x| 2.0 * x).collect();
            let t2 = psi_map_weights(&doubled, &a, k).unwrap();
            let t1 = psi_map_weights(&raw, &a, k).unwrap();
            for (x, y) in t1.iter().zip(&t2) {
                prop_assert!((2.0 * x - y).abs() < 1e-12);
            }
            // order consistency
            let mass = |s: usize| (0..n).filter(|&i| site_of[i] == s).map(|i| w.as_slice()[i]).sum::<f64>();
            for a_site in 0..k {
                for b_site in 0..k {
                    if mass(a_site) > mass(b_site) {
                        prop_assert!(tau[a_site] > tau[b_site]);
                    }
                }
            }
        }
    }
}

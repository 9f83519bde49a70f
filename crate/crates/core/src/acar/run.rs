use serde::Serialize;

use super::{choice_probabilities, observe_quality, pheromone_step, quorum_margin};
use super::{ColonyConfig, NoiseModel, PheromoneState};
use crate::data::SiteWorld;
use crate::error::{invalid, Result};
use crate::rng::RngStream;

/// What one wave of ants did.
#[derive(Debug, Clone, PartialEq)]
pub struct Wave {
    pub deposits: Vec<f64>,
    pub visits: Vec<u32>,
    pub observed_sum: Vec<f64>,
}

/// Sends `ants` ants out with site probabilities `probs`; each observes its
/// site and deposits `deposit_rate * q̂` there.
pub fn sample_wave(
    probs: &[f64],
    world: &SiteWorld,
    ants: usize,
    deposit_rate: f64,
    noise: NoiseModel,
    rng: &mut RngStream,
) -> Wave {
    let k = probs.len();
    let mut wave = Wave {
        deposits: vec![0.0; k],
        visits: vec![0; k],
        observed_sum: vec![0.0; k],
    };
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(k - 1);
    for _ in 0..ants {
        let u = rng.uniform();
        let mut acc = 0.0;
        let mut site = last;
        for (j, &p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                site = j;
                break;
            }
        }
        let q_hat = observe_quality(world.qualities()[site], noise, rng);
        wave.visits[site] += 1;
        wave.observed_sum[site] += q_hat;
        wave.deposits[site] += deposit_rate * q_hat;
    }
    wave
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuorumDecision {
    pub chosen_site: usize,
    pub margin: f64,
    pub correct: bool,
}

/// Per-wave record of a run. `tau` has one more entry than the other fields:
/// it starts with the initial levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveTrace {
    pub tau: Vec<Vec<f64>>,
    pub visits: Vec<Vec<u32>>,
    /// Mean observed quality per site, `None` when nobody went there.
    pub mean_quality: Vec<Vec<Option<f64>>>,
    /// Fraction of the wave's ants at a suboptimal site.
    pub epsilon: Vec<f64>,
}

/// Runs `config.waves` recruitment waves from uniform pheromone `tau0` and
/// returns the quorum decision on the final levels.
pub fn run_acar(
    world: &SiteWorld,
    config: &ColonyConfig,
    rng: &mut RngStream,
) -> Result<(QuorumDecision, WaveTrace)> {
    config.validate()?;
    if world.k() < 2 {
        return Err(invalid("world", "need at least two sites"));
    }
    let k = world.k();
    let waves = config.waves;
    let mut tau = PheromoneState::uniform(k, config.tau0);
    let mut trace = WaveTrace {
        tau: Vec::with_capacity(waves + 1),
        visits: Vec::with_capacity(waves),
        mean_quality: Vec::with_capacity(waves),
        epsilon: Vec::with_capacity(waves),
    };
    trace.tau.push(tau.as_slice().to_vec());

    let n = config.ants_per_wave;
    for _ in 0..waves {
        let p = choice_probabilities(&tau, world, config.alpha_exp, config.beta_exp)?;
        let wave = sample_wave(&p, world, n, config.deposit_rate, config.noise, rng);
        tau = pheromone_step(&tau, &wave.deposits, config.evaporation, config.tau_min)?;

        let off_best = n as u32 - wave.visits[world.best_site()];
        trace.epsilon.push(off_best as f64 / n as f64);
        trace.mean_quality.push(
            wave.visits
                .iter()
                .zip(&wave.observed_sum)
                .map(|(&v, &s)| (v > 0).then(|| s / v as f64))
                .collect(),
        );
        trace.visits.push(wave.visits);
        trace.tau.push(tau.as_slice().to_vec());
    }

    let chosen_site = tau.argmax();
    let decision = QuorumDecision {
        chosen_site,
        margin: quorum_margin(&tau)?,
        correct: chosen_site == world.best_site(),
    };
    Ok((decision, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acar::expected_drift;
    use crate::rng::derive_stream;

    fn config() -> ColonyConfig {
        ColonyConfig {
            alpha_exp: 2.0,
            beta_exp: 0.0,
            evaporation: 0.1,
            deposit_rate: 0.05,
            tau0: 1.0,
            tau_min: 1e-6,
            waves: 20,
            ants_per_wave: 50,
            noise: NoiseModel::NONE,
        }
    }

    #[test]
    fn zero_noise_strong_colony_decides() {
        let world = SiteWorld::new(vec![10.0, 5.0]).unwrap();
        let correct = (0..100)
            .filter(|&r| {
                let (d, _) = run_acar(&world, &config(), &mut derive_stream(5, r)).unwrap();
                d.correct
            })
            .count();
        assert!(correct >= 95, "{correct}");
    }

    #[test]
    fn one_ant_one_wave() {
        let world = SiteWorld::new(vec![3.0, 5.0, 4.0]).unwrap();
        let cfg = ColonyConfig {
            waves: 1,
            ants_per_wave: 1,
            ..config()
        };
        for r in 0..20 {
            let (d, tr) = run_acar(&world, &cfg, &mut derive_stream(6, r)).unwrap();
            let visited = tr.visits[0].iter().position(|&v| v == 1).unwrap();
            assert_eq!(d.chosen_site, visited);
        }
    }

    #[test]
    fn trace_shape_and_invariants() {
        let world = SiteWorld::new(vec![10.0, 7.0, 6.0, 5.0]).unwrap();
        let cfg = ColonyConfig {
            noise: NoiseModel::proportional(0.3),
            ..config()
        };
        let (d, tr) = run_acar(&world, &cfg, &mut derive_stream(8, 0)).unwrap();
        assert_eq!(tr.tau.len(), cfg.waves + 1);
        assert_eq!(tr.tau[0], vec![1.0; 4]);
        assert_eq!(tr.visits.len(), cfg.waves);
        for (v, e) in tr.visits.iter().zip(&tr.epsilon) {
            assert_eq!(v.iter().sum::<u32>() as usize, cfg.ants_per_wave);
            assert!((0.0..=1.0).contains(e));
        }
        assert!(tr.tau.iter().flatten().all(|&t| t >= cfg.tau_min && t.is_finite()));
        assert!((0.0..1.0).contains(&d.margin));
    }

    #[test]
    fn pure_evaporation_is_geometric() {
        let world = SiteWorld::new(vec![10.0, 5.0, 2.0]).unwrap();
        let cfg = ColonyConfig {
            deposit_rate: 0.0,
            tau_min: 0.0,
            tau0: 3.0,
            evaporation: 0.15,
            waves: 40,
            ..config()
        };
        let (_, tr) = run_acar(&world, &cfg, &mut derive_stream(1, 1)).unwrap();
        let mut expect = cfg.tau0;
        for row in &tr.tau {
            assert!(row.iter().all(|&t| t == expect));
            expect *= 1.0 - cfg.evaporation;
        }
    }

    #[test]
    fn best_site_dominates_in_strong_regime() {
        let world = SiteWorld::new(vec![6.0, 10.0, 7.0, 5.0]).unwrap();
        let cfg = ColonyConfig {
            alpha_exp: 1.0,
            noise: NoiseModel::proportional(0.1),
            waves: 30,
            ants_per_wave: 20,
            ..config()
        };
        let wins = (0..100)
            .filter(|&r| {
                let (_, tr) = run_acar(&world, &cfg, &mut derive_stream(21, r)).unwrap();
                let last = tr.tau.last().unwrap();
                (0..4).all(|j| j == 1 || last[1] > last[j])
            })
            .count();
        assert!(wins >= 90, "{wins}");
    }

    #[test]
    fn drift_matches_simulation() {
        let world = SiteWorld::new(vec![8.0, 5.0, 3.0]).unwrap();
        let cfg = ColonyConfig {
            alpha_exp: 1.3,
            noise: NoiseModel::absolute(0.5),
            ants_per_wave: 12,
            ..config()
        };
        let tau = PheromoneState::new(vec![2.0, 1.0, 0.5]).unwrap();
        let drift = expected_drift(&tau, &world, &cfg).unwrap();
        let p = crate::acar::choice_probabilities(&tau, &world, cfg.alpha_exp, 0.0).unwrap();
        let mut rng = derive_stream(31, 0);
        let m = 100_000;
        let mut sum = [0.0; 3];
        let mut sq = [0.0; 3];
        for _ in 0..m {
            let w = sample_wave(&p, &world, cfg.ants_per_wave, cfg.deposit_rate, cfg.noise, &mut rng);
            let next = pheromone_step(&tau, &w.deposits, cfg.evaporation, cfg.tau_min).unwrap();
            for j in 0..3 {
                let d = next.as_slice()[j] - tau.as_slice()[j];
                sum[j] += d;
                sq[j] += d * d;
            }
        }
        for j in 0..3 {
            let mean = sum[j] / m as f64;
            let se = ((sq[j] / m as f64 - mean * mean) / m as f64).sqrt();
            assert!((mean - drift[j]).abs() < 3.0 * se, "site {j}: {mean} vs {}", drift[j]);
        }
    }
}

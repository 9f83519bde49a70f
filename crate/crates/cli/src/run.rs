//! Subcommand execution and artifact writing.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use boostcolony::acar::ColonyConfig;
use boostcolony::experiments::{
    run_convergence, run_error_contraction, run_iso_check, run_margin_distributions, run_noise_robustness,
    run_trace_pair, run_weak_learnability, ClassificationSpec, TraceSet,
};
use boostcolony::isomorphism::{ContractionReport, EquivalenceReport};
use boostcolony::report::{emit_summary, emit_traces, format_g6, write_csv, write_json, Format};
use log::info;

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    WeakLearnability,
    Traces,
    Margins,
    Convergence,
    Noise,
    IsoCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Self::WeakLearnability,
        Self::Traces,
        Self::Margins,
        Self::Convergence,
        Self::Noise,
        Self::IsoCheck,
    ];
}

struct Sink<'a> {
    cfg: &'a RunConfig,
    paths: Vec<PathBuf>,
}

impl Sink<'_> {
    fn dir(&self) -> &Path {
        &self.cfg.out
    }

    fn wants(&self, f: Format) -> bool {
        self.cfg.formats.contains(&f)
    }

    fn file(&self, stem: &str, ext: &str) -> PathBuf {
        self.dir().join(format!("{stem}_{}.{ext}", self.cfg.seed))
    }

    fn summary(&mut self, table: &boostcolony::experiments::SummaryTable) -> Result<()> {
        self.paths.extend(emit_summary(table, &self.cfg.formats, self.dir())?);
        Ok(())
    }

    fn traces(&mut self, t: TraceSet) -> Result<()> {
        // The README sidecar is rewritten each time; list it once at the end.
        let mut written = emit_traces(&[t], self.dir())?;
        written.pop();
        self.paths.extend(written);
        Ok(())
    }

    fn csv(&mut self, stem: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        if self.wants(Format::Csv) {
            let p = self.file(stem, "csv");
            write_csv(&p, header, rows)?;
            self.paths.push(p);
        }
        Ok(())
    }

    fn json<T: serde::Serialize>(&mut self, stem: &str, value: &T) -> Result<()> {
        if self.wants(Format::Json) {
            let p = self.file(stem, "json");
            write_json(&p, value)?;
            self.paths.push(p);
        }
        Ok(())
    }
}

/// Runs the experiments in order, writing everything under `cfg.out`.
/// Returns the paths written.
pub fn run(cfg: &RunConfig, experiments: &[Experiment]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let resolved = cfg.out.join("resolved_config.json");
    write_json(&resolved, cfg)?;
    let mut sink = Sink {
        cfg,
        paths: vec![resolved],
    };
    for &e in experiments {
        match e {
            Experiment::WeakLearnability => weak(&mut sink)?,
            Experiment::Traces => traces(&mut sink)?,
            Experiment::Margins => margins(&mut sink)?,
            Experiment::Convergence => convergence(&mut sink)?,
            Experiment::Noise => noise(&mut sink)?,
            Experiment::IsoCheck => iso(&mut sink)?,
        }
    }
    let readme = cfg.out.join("README.txt");
    if readme.exists() {
        sink.paths.push(readme);
    }
    Ok(sink.paths)
}

fn weak(sink: &mut Sink<'_>) -> Result<()> {
    let cfg = sink.cfg;
    let wl = &cfg.weak_learnability;
    info!(
        "weak learnability: {} gammas x {} horizons x {} replicates",
        wl.gammas.len(),
        wl.waves.len(),
        wl.replicates
    );
    let r = run_weak_learnability(&cfg.weak_colony, &wl.gammas, &wl.waves, wl.replicates, cfg.seed)
        .context("weak learnability study")?;
    for (g, s) in &r.sigmas {
        info!("gamma {g}: calibrated noise sd {s:.4}");
    }
    sink.summary(&r.table)?;
    sink.traces(r.traces())?;

    info!(
        "error contraction: gamma {} over {} waves, {} replicates",
        wl.contraction_gamma, wl.contraction_waves, wl.contraction_replicates
    );
    let c = run_error_contraction(
        &cfg.weak_colony,
        wl.contraction_gamma,
        wl.contraction_waves,
        wl.contraction_replicates,
        cfg.seed,
    )
    .context("error contraction study")?;
    sink.csv("error_contraction", &CONTRACTION_HEADER, &contraction_rows(&c))?;
    sink.json("error_contraction", &c)
}

const CONTRACTION_HEADER: [&str; 7] = [
    "wave",
    "mean_epsilon",
    "stderr",
    "envelope",
    "within_envelope",
    "ratio_to_next",
    "paired_change",
];

fn contraction_rows(c: &ContractionReport) -> Vec<Vec<String>> {
    (0..c.mean_epsilon.len())
        .map(|t| {
            vec![
                (t + 1).to_string(),
                format_g6(c.mean_epsilon[t]),
                format_g6(c.stderr[t]),
                format_g6(c.envelope[t]),
                c.within_envelope[t].to_string(),
                c.ratios.get(t).map_or(String::new(), |r| format_g6(*r)),
                c.paired_change.get(t).map_or(String::new(), |p| format_g6(p.0)),
            ]
        })
        .collect()
}

fn colony_with_waves(c: &ColonyConfig, waves: usize) -> ColonyConfig {
    ColonyConfig { waves, ..*c }
}

fn traces(sink: &mut Sink<'_>) -> Result<()> {
    let cfg = sink.cfg;
    let boost = ClassificationSpec {
        rounds: cfg.traces.rounds,
        label_noise: cfg.traces.label_noise,
        ..cfg.classification
    };
    info!("trace pair: {} rounds, {} waves", boost.rounds, cfg.traces.waves);
    let p = run_trace_pair(&boost, &cfg.sites, &colony_with_waves(&cfg.colony, cfg.traces.waves), cfg.seed)
        .context("trace pair")?;
    sink.traces(p.traces())?;
    sink.json("trace_pair", &p)
}

fn margins(sink: &mut Sink<'_>) -> Result<()> {
    let cfg = sink.cfg;
    let m = &cfg.margins;
    info!("margins: rounds {:?}, waves {:?}, {} replicates", m.rounds, m.waves, m.replicates);
    let r = run_margin_distributions(&cfg.classification, &m.rounds, &cfg.sites, &cfg.colony, &m.waves, m.replicates, cfg.seed)
        .context("margin study")?;
    for b in &r.boosting {
        info!("boosting T={}: min margin {:.4}", b.rounds, b.min_margin);
    }
    for c in &r.colony {
        info!("colony T={}: mean quorum margin {:.4}", c.waves, c.mean_margin);
    }
    sink.summary(&r.table)?;
    sink.traces(r.traces())?;
    sink.json("margin_summary", &(&r.boosting, &r.colony))
}

fn convergence(sink: &mut Sink<'_>) -> Result<()> {
    let cfg = sink.cfg;
    let c = &cfg.convergence;
    info!("convergence: {} boosting and {} colony replicates", c.replicates_boost, c.replicates_acar);
    let r = run_convergence(
        &cfg.classification,
        &c.rounds,
        &cfg.sites,
        &cfg.colony,
        &c.waves,
        c.replicates_boost,
        c.replicates_acar,
        cfg.seed,
    )
    .context("convergence study")?;
    info!("rank correlation with horizon: adaboost {:.3}, acar {:.3}", r.spearman_adaboost, r.spearman_acar);
    sink.summary(&r.table)?;
    sink.traces(r.traces())
}

fn noise(sink: &mut Sink<'_>) -> Result<()> {
    let cfg = sink.cfg;
    let n = &cfg.noise;
    info!("noise robustness: levels {:?}, {} replicates", n.levels, n.replicates);
    let r = run_noise_robustness(&cfg.classification, &cfg.sites, &cfg.colony, &n.levels, n.replicates, n.delta, cfg.seed)
        .context("noise study")?;
    sink.summary(&r.table)?;
    let wide: Vec<Vec<String>> = r.wide_rows().iter().map(|row| row.iter().map(|v| format_g6(*v)).collect()).collect();
    sink.csv("table2", &["noise", "adaboost_mean", "adaboost_sd", "acar_mean", "acar_sd"], &wide)?;
    let tost: Vec<Vec<String>> = r
        .tost
        .iter()
        .map(|t| {
            let mut row = vec![format_g6(t.noise)];
            match &t.result {
                Some(x) => row.extend([
                    format_g6(x.mean_difference),
                    format_g6(x.stderr),
                    format_g6(x.df),
                    format_g6(x.p_lower),
                    format_g6(x.p_upper),
                    x.equivalent.to_string(),
                    String::new(),
                ]),
                None => {
                    row.extend(std::iter::repeat_n(String::new(), 6));
                    row.push(t.note.clone().unwrap_or_default().replace(',', ";"));
                }
            }
            row
        })
        .collect();
    sink.csv(
        "tost",
        &["noise", "mean_difference", "stderr", "df", "p_lower", "p_upper", "equivalent", "note"],
        &tost,
    )?;
    sink.json("tost", &r.tost)
}

fn iso(sink: &mut Sink<'_>) -> Result<()> {
    let cfg = sink.cfg;
    info!(
        "equivalence check: {} rounds, {} samples per round",
        cfg.iso_check.rounds, cfg.iso_check.mc_samples
    );
    let r = run_iso_check(&cfg.iso_check, cfg.seed).context("equivalence check")?;
    for note in &r.notes {
        info!("{note}");
    }
    sink.csv("iso_check", &ISO_HEADER, &iso_rows(&r))?;
    sink.json("iso_check", &r)
}

const ISO_HEADER: [&str; 13] = [
    "round",
    "epsilon",
    "alpha",
    "z",
    "evaporation",
    "deposit_scale",
    "boost_site1",
    "boost_site2",
    "colony_site1",
    "colony_site2",
    "gap",
    "stderr",
    "pass",
];

fn iso_rows(r: &EquivalenceReport) -> Vec<Vec<String>> {
    r.rounds
        .iter()
        .map(|x| {
            let mut row = vec![
                x.round.to_string(),
                format_g6(x.epsilon),
                format_g6(x.alpha),
                format_g6(x.z),
                format_g6(x.evaporation),
                format_g6(x.deposit_scale),
            ];
            row.extend(x.boosting_update.iter().map(|v| format_g6(*v)));
            row.extend(x.colony_mean.iter().map(|v| format_g6(*v)));
            row.extend([format_g6(x.gap), format_g6(x.stderr), x.pass.to_string()]);
            row
        })
        .collect()
}

//! The `train` and `grow` subcommands.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use monoplane::data::{LabelConvention, LabeledPattern};
use monoplane::eval::{evaluate, EvaluationReport};
use monoplane::monoplane::{grow_network, network_output, GrowthOptions, NetworkModel};
use monoplane::perceptron::{
    count_errors, minimerror_train, stabilities, ErrorCounts, HebbianStart, TrainingConfig,
};
use monoplane::report::{evaluation_csv, evaluation_text, sci, Format};
use monoplane::Error;
use serde::Serialize;

use crate::setup::{
    experiment, load_dataset, part_dir, run_jobs, training_config, write, write_manifest, Dataset,
    RunManifest,
};
use crate::{GrowArgs, LearnArgs, Outcome, PartArg, TrainArgs};

#[derive(Debug, Serialize)]
struct TrainReport {
    part: PartArg,
    patterns: usize,
    training: ErrorCounts,
    min_stability: f64,
    best_epoch: usize,
    epochs: usize,
    start: HebbianStart,
    /// Absent when every pattern was learned.
    generalization: Option<EvaluationReport>,
}

impl TrainReport {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json(self),
            Format::Csv => match &self.generalization {
                Some(g) => evaluation_csv(g),
                None => evaluation_csv(&empty_report()),
            },
            Format::Text => {
                let mut s = String::new();
                let _ = writeln!(s, "part: {}", self.part.name());
                let _ = writeln!(
                    s,
                    "training errors: {} of {} ({} F+ {} F-)",
                    self.training.total,
                    self.patterns,
                    self.training.false_pos,
                    self.training.false_neg
                );
                let _ = writeln!(s, "minimal stability: {}", sci(self.min_stability));
                let _ = writeln!(s, "best epoch: {} of {}", self.best_epoch, self.epochs);
                if let Some(g) = &self.generalization {
                    let _ = writeln!(s);
                    s.push_str(&evaluation_text(g, "held-out patterns misclassified", "-"));
                }
                s
            }
        }
    }
}

fn empty_report() -> EvaluationReport {
    EvaluationReport {
        set_size: 0,
        error_fraction: 0.0,
        counts: ErrorCounts::default(),
        records: Vec::new(),
        cosines: Vec::new(),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn labels(args: &LearnArgs) -> LabelConvention {
    LabelConvention::from_flip(args.data.flip_labels)
}

fn manifest(
    command: &'static str,
    args: &LearnArgs,
    data: &Dataset,
    part: PartArg,
    cfg: &TrainingConfig,
    max_hidden: Option<usize>,
    artifacts: &[&str],
) -> RunManifest {
    RunManifest {
        command,
        dataset: args.data.dataset.display().to_string(),
        split: data.split_source.clone(),
        part: Some(part),
        scale: Some(args.scale),
        stats_from: Some(args.stats_from),
        flip_labels: args.data.flip_labels,
        config: Some(*cfg),
        seed: Some(cfg.seed),
        max_hidden,
        format: args.format,
        artifacts: artifacts.iter().map(|a| a.to_string()).collect(),
    }
}

fn unique_parts(args: &LearnArgs) -> Vec<PartArg> {
    let mut parts = Vec::new();
    for &p in &args.part {
        if !parts.contains(&p) {
            parts.push(p);
        }
    }
    parts
}

pub fn train(args: &TrainArgs) -> Result<Outcome> {
    let args = &args.learn;
    let data = load_dataset(&args.data)?;
    let cfg = training_config(args)?;
    let parts = unique_parts(args);
    let several = parts.len() > 1;
    let results = run_jobs(&parts, args.jobs, |&part| {
        train_part(args, &data, &cfg, part, several)
    });
    for r in results {
        r?;
    }
    Ok(Outcome::Success)
}

fn train_part(
    args: &LearnArgs,
    data: &Dataset,
    cfg: &TrainingConfig,
    part: PartArg,
    several: bool,
) -> Result<()> {
    let exp = experiment(data, part, args.scale, args.stats_from, labels(args))?;
    let (w, trace) = minimerror_train(&exp.learn, cfg)
        .with_context(|| format!("training on part {} failed", part.name()))?;
    let best = trace
        .best()
        .copied()
        .context("training produced no epochs")?;
    let min_stability = stabilities(&w, &exp.learn)?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let generalization = if exp.held_out.is_empty() {
        None
    } else {
        Some(evaluate(&w, &exp.held_out, None)?)
    };
    let report = TrainReport {
        part,
        patterns: exp.learn.len(),
        training: count_errors(&w, &exp.learn)?,
        min_stability,
        best_epoch: best.epoch,
        epochs: trace.records.len(),
        start: trace.start,
        generalization,
    };
    let dir = part_dir(&args.out, part, several);
    let report_name = format!("report.{}", args.format.extension());
    write(&dir, "weights.txt", &w.to_text())?;
    write(&dir, "trace.csv", &trace.to_csv())?;
    write(&dir, &report_name, &report.render(args.format))?;
    write_manifest(
        &dir,
        &manifest(
            "train",
            args,
            data,
            part,
            cfg,
            None,
            &["weights.txt", "trace.csv", &report_name],
        ),
    )
}

#[derive(Debug, Serialize)]
struct GrowReport {
    part: PartArg,
    patterns: usize,
    /// Hidden units of the grown network; the units trained before a stall.
    hidden_units: usize,
    training_errors: Option<usize>,
    generalization_errors: Option<usize>,
    generalization_percent: Option<f64>,
    stall: Option<String>,
    internal_errors: Vec<usize>,
    network_errors: Vec<usize>,
}

impl GrowReport {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json(self),
            Format::Csv => {
                let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
                format!(
                    "part,patterns,hidden_units,training_errors,generalization_errors,generalization_percent\n{},{},{},{},{},{}\n",
                    self.part.name(),
                    self.patterns,
                    self.hidden_units,
                    opt(self.training_errors),
                    opt(self.generalization_errors),
                    self.generalization_percent
                        .map(|x| format!("{x:.1}"))
                        .unwrap_or_default()
                )
            }
            Format::Text => {
                let mut s = String::new();
                let _ = writeln!(s, "part: {}", self.part.name());
                let _ = writeln!(s, "H = {}", self.hidden_units);
                if let Some(e) = self.training_errors {
                    let _ = writeln!(s, "training errors: {e} of {}", self.patterns);
                }
                if let (Some(e), Some(pct)) =
                    (self.generalization_errors, self.generalization_percent)
                {
                    let _ = writeln!(s, "generalization errors: {e} (eps_g = {pct:.1})");
                }
                if let Some(reason) = &self.stall {
                    let _ = writeln!(s, "{reason}");
                }
                let _ = writeln!(s, "internal errors per unit: {:?}", self.internal_errors);
                let _ = writeln!(s, "network errors per unit: {:?}", self.network_errors);
                s
            }
        }
    }
}

fn network_errors(model: &NetworkModel, set: &[LabeledPattern]) -> Result<usize> {
    let mut errors = 0;
    for p in set {
        if network_output(model, &p.xi)? != p.tau {
            errors += 1;
        }
    }
    Ok(errors)
}

pub fn grow(args: &GrowArgs) -> Result<Outcome> {
    let learn = &args.learn;
    let data = load_dataset(&learn.data)?;
    let cfg = training_config(learn)?;
    let parts = unique_parts(learn);
    let several = parts.len() > 1;
    let results = run_jobs(&parts, learn.jobs, |&part| {
        grow_part(learn, args.max_hidden, &data, &cfg, part, several)
    });
    let mut outcome = Outcome::Success;
    for r in results {
        if r? == Outcome::Mismatch {
            outcome = Outcome::Mismatch;
        }
    }
    Ok(outcome)
}

fn grow_part(
    args: &LearnArgs,
    max_hidden: Option<usize>,
    data: &Dataset,
    cfg: &TrainingConfig,
    part: PartArg,
    several: bool,
) -> Result<Outcome> {
    let exp = experiment(data, part, args.scale, args.stats_from, labels(args))?;
    let dir = part_dir(&args.out, part, several);
    let report_name = format!("report.{}", args.format.extension());
    let (report, trace, model, outcome) =
        match grow_network(&exp.learn, cfg, GrowthOptions { max_hidden }) {
            Ok((model, trace)) => {
                let generalization = if exp.held_out.is_empty() {
                    None
                } else {
                    Some(network_errors(&model, &exp.held_out)?)
                };
                let report = GrowReport {
                    part,
                    patterns: exp.learn.len(),
                    hidden_units: model.hidden_count(),
                    training_errors: Some(network_errors(&model, &exp.learn)?),
                    generalization_errors: generalization,
                    generalization_percent: generalization
                        .map(|e| 100.0 * e as f64 / exp.held_out.len() as f64),
                    stall: None,
                    internal_errors: trace.units.iter().map(|u| u.internal_errors).collect(),
                    network_errors: trace.units.iter().map(|u| u.network_errors).collect(),
                };
                (report, trace, Some(model), Outcome::Success)
            }
            Err(Error::GrowthStall { reason, trace }) => {
                eprintln!("part {}: {reason}", part.name());
                let report = GrowReport {
                    part,
                    patterns: exp.learn.len(),
                    hidden_units: trace.units.len(),
                    training_errors: None,
                    generalization_errors: None,
                    generalization_percent: None,
                    stall: Some(reason.to_string()),
                    internal_errors: trace.units.iter().map(|u| u.internal_errors).collect(),
                    network_errors: trace.units.iter().map(|u| u.network_errors).collect(),
                };
                (report, *trace, None, Outcome::Mismatch)
            }
            Err(e) => bail!("growing on part {} failed: {e}", part.name()),
        };
    let mut artifacts = vec!["growth.csv", report_name.as_str()];
    if let Some(model) = &model {
        write(&dir, "network.txt", &model.to_text())?;
        artifacts.insert(0, "network.txt");
    }
    write(&dir, "growth.csv", &trace.to_csv())?;
    write(&dir, &report_name, &report.render(args.format))?;
    write_manifest(
        &dir,
        &manifest("grow", args, data, part, cfg, max_hidden, &artifacts),
    )?;
    Ok(outcome)
}

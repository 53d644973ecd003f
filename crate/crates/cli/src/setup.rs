//! Dataset loading, learning-set assembly and artifact writing shared by
//! the subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use monoplane::data::{
    compute_stats, parse_sonar_str, renumber, split, standardize, LabelConvention, LabeledPattern,
    ParseOptions, RawPattern, ScaleMode, SplitSpec,
};
use monoplane::perceptron::TrainingConfig;
use monoplane::report::Format;
use serde::Serialize;

use crate::{DataArgs, LearnArgs, PartArg, StatsFrom};

/// The dataset split into Train and Test, renumbered `1..=n` with Train
/// first.
pub struct Dataset {
    pub train: Vec<RawPattern>,
    pub test: Vec<RawPattern>,
    /// `halves` or the split file path.
    pub split_source: String,
}

pub fn load_dataset(args: &DataArgs) -> Result<Dataset> {
    let text = fs::read_to_string(&args.dataset)
        .with_context(|| format!("cannot read dataset {}", args.dataset.display()))?;
    let patterns = parse_sonar_str(&text, ParseOptions::any_width())
        .with_context(|| format!("malformed dataset {}", args.dataset.display()))?;
    let (spec, split_source) = match &args.split_file {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read split file {}", path.display()))?;
            let spec = SplitSpec::parse(&text)
                .with_context(|| format!("malformed split file {}", path.display()))?;
            (spec, path.display().to_string())
        }
        None => (SplitSpec::halves(patterns.len()), "halves".to_string()),
    };
    let (mut train, mut test) = split(&patterns, &spec)
        .with_context(|| format!("split does not fit {}", args.dataset.display()))?;
    renumber(&mut train, &mut test);
    Ok(Dataset {
        train,
        test,
        split_source,
    })
}

/// A standardized learning set and its held-out complement.
pub struct Experiment {
    pub learn: Vec<LabeledPattern>,
    /// Empty when every pattern is learned.
    pub held_out: Vec<LabeledPattern>,
}

pub fn experiment(
    data: &Dataset,
    part: PartArg,
    scale: ScaleMode,
    stats_from: StatsFrom,
    labels: LabelConvention,
) -> Result<Experiment> {
    let all: Vec<RawPattern> = data.train.iter().chain(&data.test).cloned().collect();
    let (learn, held): (&[RawPattern], &[RawPattern]) = match part {
        PartArg::Train => (&data.train, &data.test),
        PartArg::Test => (&data.test, &data.train),
        PartArg::All => (&all, &[]),
    };
    let stats = match stats_from {
        StatsFrom::Part => compute_stats(learn, scale),
        StatsFrom::All => compute_stats(&all, scale),
    }
    .context("cannot standardize the learning set")?;
    Ok(Experiment {
        learn: standardize(learn, &stats, labels)?,
        held_out: standardize(held, &stats, labels)?,
    })
}

pub fn training_config(args: &LearnArgs) -> Result<TrainingConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            TrainingConfig::parse(&text)
                .with_context(|| format!("invalid config {}", path.display()))?
        }
        None => TrainingConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Everything that determines the bytes of a run's artifacts.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub dataset: String,
    pub split: String,
    pub part: Option<PartArg>,
    pub scale: Option<ScaleMode>,
    pub stats_from: Option<StatsFrom>,
    pub flip_labels: bool,
    pub config: Option<TrainingConfig>,
    pub seed: Option<u64>,
    pub max_hidden: Option<usize>,
    pub format: Format,
    pub artifacts: Vec<String>,
}

/// Output directory of one experiment: `out` itself, or `out/<part>` when
/// several parts run.
pub fn part_dir(out: &Path, part: PartArg, several: bool) -> PathBuf {
    if several {
        out.join(part.name())
    } else {
        out.to_path_buf()
    }
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    write(dir, "manifest.json", &text)
}

/// Runs `f` over `items` on up to `jobs` threads, keeping input order.
pub fn run_jobs<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}

/// Writes to stdout; a closed pipe downstream is not an error.
pub fn emit(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other.context("cannot write to stdout"),
    }
}

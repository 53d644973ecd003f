//! The `report` subcommand: renders saved artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use monoplane::eval::{cosine, CosineMode};
use monoplane::monoplane::NetworkModel;
use monoplane::perceptron::{TrainingTrace, WeightVector};
use monoplane::report::Format;
use serde_json::json;

use crate::setup::emit;
use crate::{Outcome, ReportArgs};

const TABLE_WIDTH: usize = 8;

enum Artifact {
    Weights(WeightVector),
    Network(NetworkModel),
    Trace(TrainingTrace),
    Json(serde_json::Value),
}

fn load(path: &Path) -> Result<Artifact> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .unwrap_or("");
    let artifact = if first.starts_with("epoch,") {
        TrainingTrace::from_csv(&text).map(Artifact::Trace)?
    } else if first.starts_with("H=") {
        NetworkModel::parse(&text).map(Artifact::Network)?
    } else if first.starts_with('{') || first.starts_with('[') {
        Artifact::Json(serde_json::from_str(&text)?)
    } else {
        WeightVector::parse(&text).map(Artifact::Weights)?
    };
    Ok(artifact)
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

fn weights(w: &WeightVector, format: Format) -> String {
    match format {
        Format::Text => w.to_table(TABLE_WIDTH),
        Format::Csv => {
            let mut s = String::from("index,weight\n");
            for (i, x) in w.components().iter().enumerate() {
                let _ = writeln!(s, "{i},{x}");
            }
            s
        }
        Format::Json => pretty(&json!(w.components())),
    }
}

fn network(model: &NetworkModel, format: Format) -> String {
    match format {
        Format::Text => {
            let mut s = format!("H={}\n", model.hidden_count());
            for (h, w) in model.hidden().iter().enumerate() {
                let _ = writeln!(s, "hidden unit {}", h + 1);
                s.push_str(&w.to_table(TABLE_WIDTH));
            }
            let _ = writeln!(s, "output unit");
            s.push_str(&model.output().to_table(TABLE_WIDTH));
            s
        }
        Format::Csv => {
            let mut s = String::from("unit,index,weight\n");
            for (h, w) in model.hidden().iter().enumerate() {
                for (i, x) in w.components().iter().enumerate() {
                    let _ = writeln!(s, "{},{i},{x}", h + 1);
                }
            }
            for (i, x) in model.output().components().iter().enumerate() {
                let _ = writeln!(s, "output,{i},{x}");
            }
            s
        }
        Format::Json => pretty(&json!({
            "hidden": model.hidden().iter().map(|w| w.components()).collect::<Vec<_>>(),
            "output": model.output().components(),
        })),
    }
}

fn trace(t: &TrainingTrace, format: Format) -> String {
    match format {
        Format::Json => pretty(&json!(t
            .records
            .iter()
            .map(|r| json!({"T": r.temperature, "E": r.cost, "errors": r.errors}))
            .collect::<Vec<_>>())),
        Format::Text | Format::Csv => {
            let mut s = String::from("T,E,errors\n");
            for r in &t.records {
                let _ = writeln!(s, "{},{},{}", r.temperature, r.cost, r.errors);
            }
            s
        }
    }
}

fn cosine_report(
    a: &WeightVector,
    b: &WeightVector,
    raw_eq8: bool,
    format: Format,
) -> Result<String> {
    let mode = if raw_eq8 {
        CosineMode::RawEq8
    } else {
        CosineMode::True
    };
    let name = if raw_eq8 { "raw-eq8" } else { "true" };
    let value = cosine(a, b, mode)?;
    Ok(match format {
        Format::Json => pretty(&json!({"mode": name, "cosine": value})),
        Format::Csv => format!("mode,cosine\n{name},{value}\n"),
        Format::Text => format!("cosine ({name}) = {value:.5}\n"),
    })
}

pub fn report(args: &ReportArgs) -> Result<Outcome> {
    let artifacts = args
        .inputs
        .iter()
        .map(|p| load(p).with_context(|| format!("malformed artifact {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let text = match artifacts.as_slice() {
        [Artifact::Weights(a), Artifact::Weights(b)] => {
            cosine_report(a, b, args.raw_eq8, args.format.unwrap_or(Format::Text))?
        }
        [_, _] => bail!("two inputs must both be weight files"),
        [Artifact::Weights(w)] => weights(w, args.format.unwrap_or(Format::Text)),
        [Artifact::Network(m)] => network(m, args.format.unwrap_or(Format::Text)),
        [Artifact::Trace(t)] => trace(t, args.format.unwrap_or(Format::Csv)),
        [Artifact::Json(v)] => pretty(v),
        _ => bail!("expected one or two artifacts"),
    };
    match &args.out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => emit(&text)?,
    }
    Ok(Outcome::Success)
}

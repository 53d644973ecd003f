//! Evaluation of trained or published separators: misclassified-pattern
//! reports, cosines between hyperplanes, and a one-sided separability
//! probe.

mod published;
mod verify;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::LabeledPattern;
use crate::error::{Error, Result};
use crate::perceptron::{
    count_errors, dot, field, minimerror_train, rosenblatt_train, stabilities, ErrorCounts,
    TrainingConfig, WeightVector,
};

pub use published::{
    load_published_weights, published, reference_rows, Part, PublishedName, PublishedWeights,
    ReferenceRow, REFERENCE_COSINES, REFERENCE_TEST_ON_TRAIN, REFERENCE_TRAIN_ON_TEST,
};
pub use verify::{
    verify, CosineCheck, GammaCheck, ModeOutcome, ModeSpec, MuSetDiff, Perturbation, StatsSource,
    Verification,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisclassifiedRecord {
    /// Display row counter, 1-based.
    pub i: usize,
    pub mu: usize,
    /// Projection under the classifying vector.
    pub field: f64,
    /// Stability under the reference separator, when one was given.
    pub gamma_reference: Option<f64>,
    pub tau: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCosine {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub set_size: usize,
    /// `100 * total / set_size`.
    pub error_fraction: f64,
    pub counts: ErrorCounts,
    pub records: Vec<MisclassifiedRecord>,
    pub cosines: Vec<NamedCosine>,
}

impl EvaluationReport {
    pub fn mus(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.mu).collect()
    }

    /// Error fraction to one decimal, as reported.
    pub fn error_percent_display(&self) -> String {
        format!("{:.1}", self.error_fraction)
    }
}

/// Misclassified patterns of `set` under `classifier`, with their
/// stability under `reference` evaluated on the same patterns.
pub fn evaluate(
    classifier: &WeightVector,
    set: &[LabeledPattern],
    reference: Option<&WeightVector>,
) -> Result<EvaluationReport> {
    evaluate_against(classifier, set, reference.map(|r| (r, set)))
}

/// Like [`evaluate`], but the reference is applied to `reference_set`,
/// which must hold the same patterns (matched by `mu`) possibly
/// standardized differently.
pub fn evaluate_against(
    classifier: &WeightVector,
    set: &[LabeledPattern],
    reference: Option<(&WeightVector, &[LabeledPattern])>,
) -> Result<EvaluationReport> {
    let counts = count_errors(classifier, set)?;
    let mut records = Vec::new();
    for p in set {
        let h = field(classifier, &p.xi)?;
        // same rule as count_errors: gamma <= 0 is an error
        let wrong = (p.tau < 0 && h >= 0.0) || (p.tau > 0 && h <= 0.0);
        if !wrong {
            continue;
        }
        let gamma_reference = match reference {
            Some((w, rs)) => {
                let q = rs.iter().find(|q| q.mu == p.mu).ok_or_else(|| {
                    Error::Artifact(format!("reference set lacks pattern {}", p.mu))
                })?;
                Some(q.tau_f64() * field(w, &q.xi)?)
            }
            None => None,
        };
        records.push(MisclassifiedRecord {
            i: 0,
            mu: p.mu,
            field: h,
            gamma_reference,
            tau: p.tau,
        });
    }
    records.sort_by_key(|r| r.mu);
    for (k, r) in records.iter_mut().enumerate() {
        r.i = k + 1;
    }
    let cosines = match reference {
        Some((w, _)) => vec![NamedCosine {
            name: "classifier,reference".into(),
            value: cosine(classifier, w, CosineMode::True)?,
        }],
        None => Vec::new(),
    };
    let error_fraction = if set.is_empty() {
        0.0
    } else {
        100.0 * counts.total as f64 / set.len() as f64
    };
    Ok(EvaluationReport {
        set_size: set.len(),
        error_fraction,
        counts,
        records,
        cosines,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CosineMode {
    /// `a.b / (|a| |b|)`.
    #[default]
    True,
    /// `a.b / (N+1)^2` with `N+1` the vector length.
    RawEq8,
}

impl FromStr for CosineMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "true" => Ok(CosineMode::True),
            "raw-eq8" | "raw" => Ok(CosineMode::RawEq8),
            other => Err(Error::Config(format!("unknown cosine mode {other:?}"))),
        }
    }
}

pub fn cosine(a: &WeightVector, b: &WeightVector, mode: CosineMode) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let ab = dot(a.components(), b.components());
    Ok(match mode {
        CosineMode::True => ab / (a.norm() * b.norm()),
        CosineMode::RawEq8 => {
            let n1 = a.len() as f64;
            ab / (n1 * n1)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trainer {
    Minimerror,
    Rosenblatt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    /// Certificate: every stability under `w` is strictly positive.
    Separable { w: WeightVector, trainer: Trainer },
    /// No separator found within budget. This is not a proof of
    /// non-separability.
    Undetermined { best: WeightVector, errors: usize },
}

impl Verdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, Verdict::Separable { .. })
    }
}

fn certifies(w: &WeightVector, set: &[LabeledPattern]) -> Result<bool> {
    Ok(stabilities(w, set)?.iter().all(|&g| g > 0.0))
}

/// Runs both trainers; the first errorless result is rechecked and
/// returned as a certificate.
pub fn separability_probe(set: &[LabeledPattern], budget: &TrainingConfig) -> Result<Verdict> {
    budget.validate()?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let (mm, _) = minimerror_train(set, budget)?;
    if certifies(&mm, set)? {
        return Ok(Verdict::Separable {
            w: mm,
            trainer: Trainer::Minimerror,
        });
    }
    let (ros, _) = rosenblatt_train(set, budget)?;
    if certifies(&ros, set)? {
        return Ok(Verdict::Separable {
            w: ros,
            trainer: Trainer::Rosenblatt,
        });
    }
    let e_mm = count_errors(&mm, set)?.total;
    let e_ros = count_errors(&ros, set)?.total;
    Ok(if e_ros < e_mm {
        Verdict::Undetermined {
            best: ros,
            errors: e_ros,
        }
    } else {
        Verdict::Undetermined {
            best: mm,
            errors: e_mm,
        }
    })
}

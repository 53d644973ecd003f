//! Constructive single-hidden-layer networks.
//!
//! Hidden units are appended one at a time. Unit `h+1` is trained on the
//! targets `tau_{h+1} = tau_h * sigma_h`, i.e. it learns where unit `h` was
//! wrong, so that `tau = (prod_k sigma_k) * tau_{h+1}` holds at every step.
//! After each unit the output perceptron is retrained on the hidden
//! representations; growth stops when the network makes no training error.

use serde::{Deserialize, Serialize};

use crate::data::LabeledPattern;
use crate::error::{Error, Result, StallReason};
use crate::perceptron::{dot, minimerror_train, TrainingConfig, WeightVector};

/// `sign` with `sign(0) = +1`.
#[inline]
pub fn sign(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    hidden: Vec<WeightVector>,
    output: WeightVector,
}

impl NetworkModel {
    pub fn new(hidden: Vec<WeightVector>, output: WeightVector) -> Result<Self> {
        let first = hidden
            .first()
            .ok_or_else(|| Error::Artifact("a network needs at least one hidden unit".into()))?;
        if let Some(bad) = hidden.iter().find(|w| w.len() != first.len()) {
            return Err(Error::Dimension {
                expected: first.len(),
                actual: bad.len(),
            });
        }
        if output.len() != hidden.len() + 1 {
            return Err(Error::Dimension {
                expected: hidden.len() + 1,
                actual: output.len(),
            });
        }
        Ok(NetworkModel { hidden, output })
    }

    pub fn hidden(&self) -> &[WeightVector] {
        &self.hidden
    }

    pub fn output(&self) -> &WeightVector {
        &self.output
    }

    pub fn hidden_count(&self) -> usize {
        self.hidden.len()
    }

    pub fn input_dim(&self) -> usize {
        self.hidden[0].len()
    }

    /// `H=<n>` header, the hidden blocks, then the output block; one value
    /// per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("H={}\n", self.hidden.len());
        for w in &self.hidden {
            s.push_str(&w.to_text());
        }
        s.push_str(&self.output.to_text());
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Artifact("empty network file".into()))?;
        let h: usize = header
            .strip_prefix("H=")
            .and_then(|n| n.trim().parse().ok())
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Artifact(format!("bad network header {header:?}")))?;
        let values = lines
            .enumerate()
            .map(|(i, l)| {
                l.parse::<f64>().map_err(|_| Error::Parse {
                    line: i + 2,
                    message: format!("cannot parse weight {l:?}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        let hidden_values = values
            .len()
            .checked_sub(h + 1)
            .filter(|n| n % h == 0 && *n > 0)
            .ok_or_else(|| {
                Error::Artifact(format!(
                    "{} values do not fit {h} hidden units",
                    values.len()
                ))
            })?;
        let dim = hidden_values / h;
        let hidden = values[..hidden_values]
            .chunks(dim)
            .map(|c| WeightVector::new(c.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        let output = WeightVector::new(values[hidden_values..].to_vec())?;
        NetworkModel::new(hidden, output)
    }
}

/// Hidden states `sigma_h = sign(w_h . xi)`.
pub fn hidden_states(model: &NetworkModel, xi: &[f64]) -> Result<Vec<i8>> {
    if xi.len() != model.input_dim() {
        return Err(Error::Dimension {
            expected: model.input_dim(),
            actual: xi.len(),
        });
    }
    Ok(model
        .hidden
        .iter()
        .map(|w| sign(dot(w.components(), xi)))
        .collect())
}

/// `(1, sigma_1, ..., sigma_H)` as reals.
fn representation(states: &[i8]) -> Vec<f64> {
    std::iter::once(1.0)
        .chain(states.iter().map(|&s| f64::from(s)))
        .collect()
}

/// Output `zeta = sign(sum_h W_h sigma_h)` with `sigma_0 = 1`.
pub fn network_output(model: &NetworkModel, xi: &[f64]) -> Result<i8> {
    let states = hidden_states(model, xi)?;
    Ok(sign(dot(
        model.output.components(),
        &representation(&states),
    )))
}

/// `tau_{h+1} = tau_h * sigma_h`: +1 where unit `h` was right, -1 where
/// it erred.
pub fn internal_targets(prev_targets: &[i8], prev_states: &[i8]) -> Result<Vec<i8>> {
    if prev_targets.len() != prev_states.len() {
        return Err(Error::Dimension {
            expected: prev_targets.len(),
            actual: prev_states.len(),
        });
    }
    Ok(prev_targets
        .iter()
        .zip(prev_states)
        .map(|(t, s)| t * s)
        .collect())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthOptions {
    /// Cap on hidden units; the effective cap is also `P - 1`.
    pub max_hidden: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitRecord {
    /// 1-based hidden unit index.
    pub unit: usize,
    /// Errors of the unit on its own targets.
    pub internal_errors: usize,
    /// Network training errors after retraining the output unit.
    pub network_errors: usize,
    /// Targets the unit was trained on.
    pub targets: Vec<i8>,
    /// The unit's states over the training set.
    pub states: Vec<i8>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthTrace {
    pub units: Vec<UnitRecord>,
}

impl GrowthTrace {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("unit,internal_errors,network_errors\n");
        for u in &self.units {
            s.push_str(&format!(
                "{},{},{}\n",
                u.unit, u.internal_errors, u.network_errors
            ));
        }
        s
    }
}

fn relabel(set: &[LabeledPattern], targets: &[i8]) -> Vec<LabeledPattern> {
    set.iter()
        .zip(targets)
        .map(|(p, &t)| p.with_tau(t))
        .collect()
}

/// Grows a network until it classifies `set` without error.
///
/// If a hidden unit reaches zero internal errors but the output unit still
/// errs, the next unit is trained to flag the network's own errors
/// (`tau * zeta`) and must do so with fewer errors than the network made.
pub fn grow_network(
    set: &[LabeledPattern],
    config: &TrainingConfig,
    options: GrowthOptions,
) -> Result<(NetworkModel, GrowthTrace)> {
    config.validate()?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let p = set.len();
    let limit = options
        .max_hidden
        .unwrap_or(usize::MAX)
        .min(p.saturating_sub(1).max(1));
    let labels: Vec<i8> = set.iter().map(|p| p.tau).collect();

    let mut trace = GrowthTrace::default();
    let mut hidden: Vec<WeightVector> = Vec::new();
    // Per-pattern hidden states, one row per pattern.
    let mut reps: Vec<Vec<i8>> = vec![Vec::new(); p];
    let mut targets = labels.clone();
    let mut to_beat: Option<usize> = None;

    loop {
        let unit = hidden.len() + 1;
        let (w, _) = minimerror_train(&relabel(set, &targets), config)?;
        let states: Vec<i8> = set
            .iter()
            .map(|pat| sign(dot(w.components(), &pat.xi)))
            .collect();
        let internal_errors = states.iter().zip(&targets).filter(|(s, t)| s != t).count();
        hidden.push(w);
        for (r, &s) in reps.iter_mut().zip(&states) {
            r.push(s);
        }

        let out_set: Vec<LabeledPattern> = reps
            .iter()
            .zip(set)
            .map(|(r, pat)| LabeledPattern {
                mu: pat.mu,
                xi: representation(r),
                tau: pat.tau,
            })
            .collect();
        let (output, _) = minimerror_train(&out_set, config)?;
        let zeta: Vec<i8> = out_set
            .iter()
            .map(|q| sign(dot(output.components(), &q.xi)))
            .collect();
        let network_errors = zeta.iter().zip(&labels).filter(|(z, t)| z != t).count();

        trace.units.push(UnitRecord {
            unit,
            internal_errors,
            network_errors,
            targets: targets.clone(),
            states: states.clone(),
        });

        if let Some(previous) = to_beat {
            if internal_errors >= previous {
                return Err(Error::GrowthStall {
                    reason: StallReason::NoProgress {
                        unit,
                        errors: internal_errors,
                        previous,
                    },
                    trace: Box::new(trace),
                });
            }
        }
        if network_errors == 0 {
            let model = NetworkModel::new(hidden, output)?;
            return Ok((model, trace));
        }
        if hidden.len() >= limit {
            return Err(Error::GrowthStall {
                reason: StallReason::Budget {
                    max_hidden: limit,
                    remaining: network_errors,
                },
                trace: Box::new(trace),
            });
        }
        if internal_errors > 0 {
            targets = internal_targets(&targets, &states)?;
            to_beat = Some(internal_errors);
        } else {
            targets = internal_targets(&labels, &zeta)?;
            to_beat = Some(network_errors);
        }
    }
}

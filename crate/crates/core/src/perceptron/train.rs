use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::LabeledPattern;
use crate::error::{Error, Result};

use super::cost::{gradient_from_gammas, term, Temperatures};
use super::{dot, TrainingConfig, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Annealing temperature; 0 for the Rosenblatt rule.
    pub temperature: f64,
    /// Minimerror cost, or the perceptron criterion `sum max(0, -gamma)`
    /// for the Rosenblatt rule.
    pub cost: f64,
    pub errors: usize,
    pub min_stability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HebbianStart {
    Hebbian,
    /// The Hebb vector cancelled; a seeded random direction was used.
    RandomFallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub records: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub start: HebbianStart,
}

impl TrainingTrace {
    pub fn best(&self) -> Option<&EpochRecord> {
        self.records.get(self.best_epoch)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("epoch,temperature,cost,errors,min_stability\n");
        for r in &self.records {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.epoch, r.temperature, r.cost, r.errors, r.min_stability
            ));
        }
        s
    }

    /// Reads the output of [`TrainingTrace::to_csv`]. The best epoch is
    /// recomputed from the records.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "epoch,temperature,cost,errors,min_stability" => {}
            _ => return Err(Error::Artifact("not a training trace".into())),
        }
        let mut records = Vec::new();
        for (idx, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = || Error::Parse {
                line: idx + 2,
                message: format!("malformed trace row {line:?}"),
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(bad());
            }
            records.push(EpochRecord {
                epoch: f[0].parse().map_err(|_| bad())?,
                temperature: f[1].parse().map_err(|_| bad())?,
                cost: f[2].parse().map_err(|_| bad())?,
                errors: f[3].parse().map_err(|_| bad())?,
                min_stability: f[4].parse().map_err(|_| bad())?,
            });
        }
        let best_epoch = best_index(&records);
        Ok(TrainingTrace {
            records,
            best_epoch,
            start: HebbianStart::Hebbian,
        })
    }
}

/// Fewest errors; ties go to the larger minimal stability, then the
/// earlier epoch.
fn better(a: &EpochRecord, b: &EpochRecord) -> bool {
    a.errors < b.errors || (a.errors == b.errors && a.min_stability > b.min_stability)
}

fn best_index(records: &[EpochRecord]) -> usize {
    let mut best = 0;
    for (i, r) in records.iter().enumerate().skip(1) {
        if better(r, &records[best]) {
            best = i;
        }
    }
    best
}

fn check_set(set: &[LabeledPattern]) -> Result<usize> {
    let dim = set.first().ok_or(Error::EmptySet)?.xi.len();
    for p in set {
        if p.xi.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                actual: p.xi.len(),
            });
        }
    }
    Ok(dim)
}

fn random_direction(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if dot(&v, &v) > 1e-6 {
            return v;
        }
    }
}

/// Hebb vector `sum tau xi / P`, rescaled to `|w|^2 = len`.
///
/// When the class-weighted sum cancels (relative to its terms) the start is
/// a random direction drawn from `seed`.
pub fn hebbian_init(set: &[LabeledPattern], seed: u64) -> Result<(WeightVector, HebbianStart)> {
    let dim = check_set(set)?;
    let p = set.len() as f64;
    let mut w = vec![0.0; dim];
    let mut mass = 0.0;
    for pat in set {
        let tau = pat.tau_f64();
        for (wi, x) in w.iter_mut().zip(&pat.xi) {
            *wi += tau * x / p;
        }
        mass += dot(&pat.xi, &pat.xi).sqrt() / p;
    }
    let norm = dot(&w, &w).sqrt();
    if norm <= 1e-12 * mass {
        let w = WeightVector::new(random_direction(dim, seed))?;
        return Ok((w.normalized(), HebbianStart::RandomFallback));
    }
    Ok((WeightVector::new(w)?.normalized(), HebbianStart::Hebbian))
}

fn gammas(w: &WeightVector, set: &[LabeledPattern]) -> Vec<f64> {
    set.iter()
        .map(|p| p.tau_f64() * dot(w.components(), &p.xi) / w.norm())
        .collect()
}

fn errors_and_margin(gammas: &[f64]) -> (usize, f64) {
    let errors = gammas.iter().filter(|&&g| g <= 0.0).count();
    let min = gammas.iter().copied().fold(f64::INFINITY, f64::min);
    (errors, min)
}

/// Annealed gradient descent on the Minimerror cost.
///
/// Each epoch evaluates the current weights at temperature `T`, takes one
/// full-batch gradient step, rescales to `|w|^2 = N+1` and multiplies `T`
/// by `t_decay`. Returns the weights of the best recorded epoch.
pub fn minimerror_train(
    set: &[LabeledPattern],
    config: &TrainingConfig,
) -> Result<(WeightVector, TrainingTrace)> {
    config.validate()?;
    check_set(set)?;
    let (mut w, start) = hebbian_init(set, config.seed)?;
    let mut records = Vec::new();
    let mut best: Option<(EpochRecord, WeightVector)> = None;
    let mut t = config.t_initial;
    let mut epoch = 0;
    while epoch < config.max_epochs && t >= config.t_min {
        let temps = Temperatures::with_ratio(t, config.temp_ratio);
        let gs = gammas(&w, set);
        let (errors, min_stability) = errors_and_margin(&gs);
        let cost: f64 = gs.iter().map(|&g| term(g, &temps)).sum();
        let record = EpochRecord {
            epoch,
            temperature: t,
            cost,
            errors,
            min_stability,
        };
        let diverged = |records: Vec<EpochRecord>| Error::Diverged {
            epoch,
            trace: Box::new(TrainingTrace {
                best_epoch: best_index(&records),
                records,
                start,
            }),
        };
        if !cost.is_finite() || !min_stability.is_finite() {
            return Err(diverged(records));
        }
        records.push(record);
        if best.as_ref().is_none_or(|(b, _)| better(&record, b)) {
            best = Some((record, w.clone()));
        }

        let grad = gradient_from_gammas(&w, set, &gs, &temps);
        let stepped: Vec<f64> = w
            .components()
            .iter()
            .zip(&grad)
            .map(|(wi, g)| wi - config.learning_rate * g)
            .collect();
        w = match WeightVector::new(stepped) {
            Ok(v) => v.normalized(),
            Err(_) => return Err(diverged(records)),
        };
        t *= config.t_decay;
        epoch += 1;
    }
    let (weights, trace) = match best {
        Some((rec, w)) => (
            w,
            TrainingTrace {
                records,
                best_epoch: rec.epoch,
                start,
            },
        ),
        // No epoch ran (max_epochs = 0): the start vector is the answer.
        None => (
            w,
            TrainingTrace {
                records,
                best_epoch: 0,
                start,
            },
        ),
    };
    Ok((weights, trace))
}

/// Fixed-increment perceptron rule with pocket retention of the best
/// end-of-epoch snapshot.
///
/// Starts from a random vector of norm `learning_rate` drawn from the
/// seed, then sweeps the set in order, adding `learning_rate * tau * xi`
/// on every pattern with non-positive stability, until a sweep makes no
/// update or `max_epochs` is reached.
pub fn rosenblatt_train(
    set: &[LabeledPattern],
    config: &TrainingConfig,
) -> Result<(WeightVector, TrainingTrace)> {
    config.validate()?;
    let dim = check_set(set)?;
    let mut w = random_direction(dim, config.seed);
    let scale = config.learning_rate / dot(&w, &w).sqrt();
    w.iter_mut().for_each(|x| *x *= scale);

    let mut records = Vec::new();
    let mut best: Option<(EpochRecord, WeightVector)> = None;
    for epoch in 0..config.max_epochs {
        let mut updated = false;
        for p in set {
            let tau = p.tau_f64();
            if tau * dot(&w, &p.xi) <= 0.0 {
                for (wi, x) in w.iter_mut().zip(&p.xi) {
                    *wi += config.learning_rate * tau * x;
                }
                updated = true;
            }
        }
        // An exactly zero vector classifies nothing; treat as all wrong.
        let (errors, min_stability, cost, snapshot) = match WeightVector::new(w.clone()) {
            Ok(v) => {
                let gs = gammas(&v, set);
                let (e, m) = errors_and_margin(&gs);
                let c: f64 = gs.iter().map(|g| (-g).max(0.0)).sum();
                (e, m, c, Some(v))
            }
            Err(_) => (set.len(), 0.0, 0.0, None),
        };
        let record = EpochRecord {
            epoch,
            temperature: 0.0,
            cost,
            errors,
            min_stability,
        };
        records.push(record);
        if let Some(v) = snapshot {
            if best.as_ref().is_none_or(|(b, _)| better(&record, b)) {
                best = Some((record, v));
            }
        }
        if !updated {
            break;
        }
    }
    match best {
        Some((rec, v)) => Ok((
            v,
            TrainingTrace {
                records,
                best_epoch: rec.epoch,
                start: HebbianStart::RandomFallback,
            },
        )),
        None => Ok((
            WeightVector::new(random_direction(dim, config.seed))?,
            TrainingTrace {
                records,
                best_epoch: 0,
                start: HebbianStart::RandomFallback,
            },
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perceptron::{count_errors, stability};

    fn two_point() -> Vec<LabeledPattern> {
        vec![
            LabeledPattern::new(1, &[1.0], 1),
            LabeledPattern::new(2, &[-1.0], -1),
        ]
    }

    fn xor() -> Vec<LabeledPattern> {
        vec![
            LabeledPattern::new(1, &[0.0, 0.0], -1),
            LabeledPattern::new(2, &[1.0, 1.0], -1),
            LabeledPattern::new(3, &[0.0, 1.0], 1),
            LabeledPattern::new(4, &[1.0, 0.0], 1),
        ]
    }

    fn quick() -> TrainingConfig {
        TrainingConfig {
            t_initial: 1.0,
            t_min: 1e-2,
            t_decay: 0.99,
            max_epochs: 2000,
            ..Default::default()
        }
    }

    #[test]
    fn single_pattern_hebb_separates() {
        let set = vec![LabeledPattern::new(1, &[0.4, -1.3, 2.0], 1)];
        let (w, start) = hebbian_init(&set, 0).unwrap();
        assert_eq!(start, HebbianStart::Hebbian);
        assert!(stability(&w, &set[0]).unwrap() > 0.0);
        assert!((w.norm() * w.norm() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cancelled_hebb_falls_back_to_seeded_direction() {
        let mut set = vec![
            LabeledPattern::new(1, &[0.3, -0.7], 1),
            LabeledPattern::new(2, &[1.1, 0.2], -1),
            LabeledPattern::new(3, &[0.1, 0.9], 1),
        ];
        let flipped: Vec<_> = set.iter().map(|p| p.with_tau(-p.tau)).collect();
        set.extend(flipped);
        let (a, start) = hebbian_init(&set, 5).unwrap();
        assert_eq!(start, HebbianStart::RandomFallback);
        let (b, _) = hebbian_init(&set, 5).unwrap();
        assert_eq!(a, b);
        let (c, _) = hebbian_init(&set, 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn minimerror_separates_two_points() {
        let (w, trace) = minimerror_train(&two_point(), &quick()).unwrap();
        assert_eq!(count_errors(&w, &two_point()).unwrap().total, 0);
        assert_eq!(trace.best().unwrap().errors, 0);
    }

    #[test]
    fn best_epoch_is_never_beaten() {
        let (w, trace) = minimerror_train(&xor(), &quick()).unwrap();
        let best = trace.best().unwrap();
        assert!(trace.records.iter().all(|r| r.errors >= best.errors));
        assert_eq!(count_errors(&w, &xor()).unwrap().total, best.errors);
        assert!(best.errors >= 1);
        assert!(trace.records.len() <= quick().max_epochs);
    }

    #[test]
    fn training_is_bit_reproducible() {
        let a = minimerror_train(&xor(), &quick()).unwrap();
        let b = minimerror_train(&xor(), &quick()).unwrap();
        assert_eq!(a, b);
        let c = rosenblatt_train(&xor(), &quick()).unwrap();
        let d = rosenblatt_train(&xor(), &quick()).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn rosenblatt_two_points_within_two_epochs() {
        let cfg = TrainingConfig {
            learning_rate: 1.0,
            ..quick()
        };
        let (w, trace) = rosenblatt_train(&two_point(), &cfg).unwrap();
        assert_eq!(count_errors(&w, &two_point()).unwrap().total, 0);
        assert!(trace.records.len() <= 2, "{}", trace.records.len());
    }

    #[test]
    fn rosenblatt_keeps_best_snapshot_on_xor() {
        let cfg = TrainingConfig {
            max_epochs: 50,
            ..quick()
        };
        let (w, trace) = rosenblatt_train(&xor(), &cfg).unwrap();
        assert_eq!(trace.records.len(), 50);
        let errs = count_errors(&w, &xor()).unwrap().total;
        assert!(errs >= 1);
        assert!(trace.records.iter().all(|r| r.errors >= errs));
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(
            minimerror_train(&[], &quick()),
            Err(Error::EmptySet)
        ));
        let bad = TrainingConfig {
            t_decay: 1.0,
            ..quick()
        };
        assert!(matches!(
            minimerror_train(&xor(), &bad),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            rosenblatt_train(&xor(), &bad),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn trace_csv_round_trip() {
        let (_, trace) = minimerror_train(&xor(), &quick()).unwrap();
        let back = TrainingTrace::from_csv(&trace.to_csv()).unwrap();
        assert_eq!(back.records, trace.records);
        assert_eq!(back.best_epoch, trace.best_epoch);
        assert!(TrainingTrace::from_csv("a,b\n").is_err());
    }
}

//! Checks the published separators against a dataset under every
//! plausible standardization mode.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{
    compute_stats, standardize, LabelConvention, LabeledPattern, RawPattern, ScaleMode,
};
use crate::error::Result;
use crate::perceptron::{count_errors, stabilities, ErrorCounts, WeightVector};

use super::published::{published, reference_rows, Part, PublishedName, REFERENCE_COSINES};
use super::{cosine, evaluate_against, CosineMode, EvaluationReport};

/// Which patterns the standardization statistics are computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatsSource {
    /// The set the separator was trained on.
    LearningSet,
    /// All patterns, Train and Test together.
    AllPatterns,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeSpec {
    pub scale: ScaleMode,
    pub stats: StatsSource,
}

impl ModeSpec {
    pub const ALL: [ModeSpec; 4] = [
        ModeSpec {
            scale: ScaleMode::Std,
            stats: StatsSource::LearningSet,
        },
        ModeSpec {
            scale: ScaleMode::Std,
            stats: StatsSource::AllPatterns,
        },
        ModeSpec {
            scale: ScaleMode::Variance,
            stats: StatsSource::LearningSet,
        },
        ModeSpec {
            scale: ScaleMode::Variance,
            stats: StatsSource::AllPatterns,
        },
    ];
}

impl fmt::Display for ModeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stats = match self.stats {
            StatsSource::LearningSet => "learning-set",
            StatsSource::AllPatterns => "all-patterns",
        };
        write!(f, "scale={} stats={}", self.scale, stats)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuSetDiff {
    pub expected: Vec<usize>,
    pub found: Vec<usize>,
    /// Expected but not found.
    pub missing: Vec<usize>,
    /// Found but not expected.
    pub extra: Vec<usize>,
}

impl MuSetDiff {
    fn new(mut expected: Vec<usize>, mut found: Vec<usize>) -> Self {
        expected.sort_unstable();
        found.sort_unstable();
        let missing = expected
            .iter()
            .copied()
            .filter(|m| !found.contains(m))
            .collect();
        let extra = found
            .iter()
            .copied()
            .filter(|m| !expected.contains(m))
            .collect();
        MuSetDiff {
            expected,
            found,
            missing,
            extra,
        }
    }

    pub fn exact(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }

    pub fn distance(&self) -> usize {
        self.missing.len() + self.extra.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaCheck {
    pub mu: usize,
    pub expected: f64,
    /// `None` when the dataset has no pattern with this index.
    pub actual: Option<f64>,
}

impl GammaCheck {
    pub fn abs_error(&self) -> f64 {
        self.actual
            .map_or(f64::INFINITY, |a| (a - self.expected).abs())
    }
}

/// Error counts reachable by perturbing the weights within the rounding
/// of the printed four decimals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub step: f64,
    pub baseline: usize,
    /// Range over all single-component `+-step` moves.
    pub single_min: usize,
    pub single_max: usize,
    /// Range over random moves inside the `+-step` box.
    pub box_min: usize,
    pub box_max: usize,
    pub box_samples: usize,
}

impl Perturbation {
    pub fn changes_count(&self) -> bool {
        self.single_min != self.baseline
            || self.single_max != self.baseline
            || self.box_min != self.baseline
            || self.box_max != self.baseline
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeOutcome {
    pub mode: ModeSpec,
    /// W_Train on the Test part, reference W_Sonar.
    pub train_on_test: EvaluationReport,
    /// W_Test on the Train part, reference W_Sonar.
    pub test_on_train: EvaluationReport,
    /// W_Sonar on all patterns.
    pub sonar_counts: ErrorCounts,
    pub sonar_min_stability: f64,
    pub test_diff: MuSetDiff,
    pub train_diff: MuSetDiff,
    /// Largest `|field - published field|` over rows found in both.
    pub field_max_abs_diff: Option<f64>,
    pub gamma_checks: Vec<GammaCheck>,
    pub perturb_train_on_test: Perturbation,
    pub perturb_test_on_train: Perturbation,
}

impl ModeOutcome {
    pub fn reproduces_tables(&self) -> bool {
        self.test_diff.exact() && self.train_diff.exact()
    }

    pub fn distance(&self) -> usize {
        self.test_diff.distance() + self.train_diff.distance()
    }

    pub fn gamma_max_abs_error(&self) -> f64 {
        self.gamma_checks
            .iter()
            .map(GammaCheck::abs_error)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineCheck {
    pub a: PublishedName,
    pub b: PublishedName,
    pub reference: f64,
    pub tolerance: f64,
    pub true_cosine: f64,
    pub raw_eq8: f64,
}

impl CosineCheck {
    pub fn matches(&self, mode: CosineMode) -> bool {
        let v = match mode {
            CosineMode::True => self.true_cosine,
            CosineMode::RawEq8 => self.raw_eq8,
        };
        (v - self.reference).abs() <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub modes: Vec<ModeOutcome>,
    /// Index of the first mode reproducing both misclassified sets.
    pub canonical: Option<usize>,
    /// Index of the mode with the smallest set difference.
    pub closest: usize,
    pub cosines: Vec<CosineCheck>,
    /// Cosine convention reproducing all three published values, if any.
    pub cosine_mode: Option<CosineMode>,
    /// `|w|^2` of each published vector.
    pub norms_squared: Vec<(PublishedName, f64)>,
}

impl Verification {
    pub fn success(&self) -> bool {
        self.canonical.is_some()
    }

    /// The canonical mode, or the closest one.
    pub fn selected(&self) -> &ModeOutcome {
        &self.modes[self.canonical.unwrap_or(self.closest)]
    }
}

const PERTURB_STEP: f64 = 5e-5;
const PERTURB_SAMPLES: usize = 256;

fn perturbation(w: &WeightVector, set: &[LabeledPattern], seed: u64) -> Result<Perturbation> {
    let baseline = count_errors(w, set)?.total;
    let base = w.components();
    let (mut single_min, mut single_max) = (baseline, baseline);
    for i in 0..base.len() {
        for delta in [PERTURB_STEP, -PERTURB_STEP] {
            let mut v = base.to_vec();
            v[i] += delta;
            let e = count_errors(&WeightVector::new(v)?, set)?.total;
            single_min = single_min.min(e);
            single_max = single_max.max(e);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut box_min, mut box_max) = (baseline, baseline);
    for _ in 0..PERTURB_SAMPLES {
        let v: Vec<f64> = base
            .iter()
            .map(|x| x + rng.gen_range(-PERTURB_STEP..=PERTURB_STEP))
            .collect();
        let e = count_errors(&WeightVector::new(v)?, set)?.total;
        box_min = box_min.min(e);
        box_max = box_max.max(e);
    }
    Ok(Perturbation {
        step: PERTURB_STEP,
        baseline,
        single_min,
        single_max,
        box_min,
        box_max,
        box_samples: PERTURB_SAMPLES,
    })
}

fn run_mode(
    mode: ModeSpec,
    train: &[RawPattern],
    test: &[RawPattern],
    labels: LabelConvention,
) -> Result<ModeOutcome> {
    let all: Vec<RawPattern> = train.iter().chain(test).cloned().collect();
    let all_stats = compute_stats(&all, mode.scale)?;
    let (train_stats, test_stats) = match mode.stats {
        StatsSource::LearningSet => (
            compute_stats(train, mode.scale)?,
            compute_stats(test, mode.scale)?,
        ),
        StatsSource::AllPatterns => (all_stats.clone(), all_stats.clone()),
    };
    let w_train = published(PublishedName::Train).w;
    let w_test = published(PublishedName::Test).w;
    let w_sonar = published(PublishedName::Sonar).w;

    let all_std = standardize(&all, &all_stats, labels)?;
    // W_Train sees Test through Train statistics, and vice versa.
    let test_for_train_w = standardize(test, &train_stats, labels)?;
    let train_for_test_w = standardize(train, &test_stats, labels)?;

    let train_on_test = evaluate_against(&w_train, &test_for_train_w, Some((&w_sonar, &all_std)))?;
    let test_on_train = evaluate_against(&w_test, &train_for_test_w, Some((&w_sonar, &all_std)))?;

    let rows = reference_rows();
    let expected = |part: Part| -> Vec<usize> {
        rows.iter()
            .filter(|r| r.part == part)
            .map(|r| r.mu)
            .collect()
    };
    let test_diff = MuSetDiff::new(expected(Part::Test), train_on_test.mus());
    let train_diff = MuSetDiff::new(expected(Part::Train), test_on_train.mus());

    let field_max_abs_diff = rows
        .iter()
        .filter_map(|row| {
            let report = match row.part {
                Part::Test => &train_on_test,
                Part::Train => &test_on_train,
            };
            report
                .records
                .iter()
                .find(|r| r.mu == row.mu)
                .map(|r| (r.field - row.field).abs())
        })
        .reduce(f64::max);

    let sonar_gammas = stabilities(&w_sonar, &all_std)?;
    let gamma_checks = rows
        .iter()
        .map(|row| GammaCheck {
            mu: row.mu,
            expected: row.gamma_reference,
            actual: all_std
                .iter()
                .position(|p| p.mu == row.mu)
                .map(|k| sonar_gammas[k]),
        })
        .collect();

    Ok(ModeOutcome {
        mode,
        sonar_counts: count_errors(&w_sonar, &all_std)?,
        sonar_min_stability: sonar_gammas.iter().copied().fold(f64::INFINITY, f64::min),
        perturb_train_on_test: perturbation(&w_train, &test_for_train_w, 1)?,
        perturb_test_on_train: perturbation(&w_test, &train_for_test_w, 2)?,
        train_on_test,
        test_on_train,
        test_diff,
        train_diff,
        field_max_abs_diff,
        gamma_checks,
    })
}

/// Cosines between the published vectors under both conventions.
pub fn published_cosines() -> Result<Vec<CosineCheck>> {
    REFERENCE_COSINES
        .iter()
        .map(|&(a, b, reference, tolerance)| {
            let wa = published(a).w;
            let wb = published(b).w;
            Ok(CosineCheck {
                a,
                b,
                reference,
                tolerance,
                true_cosine: cosine(&wa, &wb, CosineMode::True)?,
                raw_eq8: cosine(&wa, &wb, CosineMode::RawEq8)?,
            })
        })
        .collect()
}

/// Runs every standardization mode. `train` and `test` must carry the
/// absolute numbering of the published tables (Train first). With
/// `jobs > 1` modes are evaluated on separate threads; the result does not
/// depend on `jobs`.
pub fn verify(
    train: &[RawPattern],
    test: &[RawPattern],
    labels: LabelConvention,
    jobs: usize,
) -> Result<Verification> {
    let modes: Vec<ModeOutcome> = if jobs > 1 {
        std::thread::scope(|s| {
            let handles: Vec<_> = ModeSpec::ALL
                .iter()
                .map(|&m| s.spawn(move || run_mode(m, train, test, labels)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("verification thread panicked"))
                .collect::<Result<Vec<_>>>()
        })?
    } else {
        ModeSpec::ALL
            .iter()
            .map(|&m| run_mode(m, train, test, labels))
            .collect::<Result<Vec<_>>>()?
    };
    let canonical = modes.iter().position(ModeOutcome::reproduces_tables);
    let closest = modes
        .iter()
        .enumerate()
        .min_by_key(|(_, m)| m.distance())
        .map(|(i, _)| i)
        .unwrap_or(0);
    let cosines = published_cosines()?;
    let cosine_mode = [CosineMode::True, CosineMode::RawEq8]
        .into_iter()
        .find(|&mode| cosines.iter().all(|c| c.matches(mode)));
    let norms_squared = PublishedName::ALL
        .iter()
        .map(|&n| {
            let w = published(n).w;
            (n, w.norm() * w.norm())
        })
        .collect();
    Ok(Verification {
        modes,
        canonical,
        closest,
        cosines,
        cosine_mode,
        norms_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_diff() {
        let d = MuSetDiff::new(vec![3, 1, 2], vec![2, 4, 1]);
        assert_eq!(d.missing, vec![3]);
        assert_eq!(d.extra, vec![4]);
        assert_eq!(d.distance(), 2);
        assert!(!d.exact());
        assert!(MuSetDiff::new(vec![1, 2], vec![2, 1]).exact());
    }

    #[test]
    fn published_vectors_have_dimension_norm() {
        for n in PublishedName::ALL {
            let w = published(n).w;
            let sq = w.norm() * w.norm();
            assert!((sq - 61.0).abs() < 2e-3, "{n}: {sq}");
        }
    }

    #[test]
    fn cosines_are_computed_for_each_pair() {
        let c = published_cosines().unwrap();
        assert_eq!(c.len(), 3);
        for check in &c {
            assert!(check.true_cosine.abs() <= 1.0);
            // |w|^2 = 61 for all three, so the raw form is the true cosine
            // shrunk by 61.
            assert!((check.raw_eq8 * 61.0 - check.true_cosine).abs() < 1e-4);
        }
    }
}

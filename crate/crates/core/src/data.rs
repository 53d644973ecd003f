//! Sonar dataset ingestion: CSV parsing, Train/Test splitting by absolute
//! pattern index, and per-feature standardization.
//!
//! Patterns are numbered `mu = 1..n` in file order. Standardization
//! statistics are always computed on a learning set and then applied
//! unchanged to any other set.

use std::collections::BTreeSet;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of spectral features in a sonar pattern.
pub const SONAR_FEATURES: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Class {
    Rock,
    Mine,
}

impl Class {
    fn from_token(token: &str) -> Option<Class> {
        match token.trim() {
            "R" | "r" => Some(Class::Rock),
            "M" | "m" => Some(Class::Mine),
            _ => None,
        }
    }
}

/// Which class is mapped to `tau = +1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelConvention {
    /// rock = +1, mine = -1.
    #[default]
    RockPositive,
    /// mine = +1, rock = -1.
    MinePositive,
}

impl LabelConvention {
    pub fn from_flip(flip: bool) -> Self {
        if flip {
            LabelConvention::MinePositive
        } else {
            LabelConvention::RockPositive
        }
    }

    pub fn tau(self, class: Class) -> i8 {
        match (self, class) {
            (LabelConvention::RockPositive, Class::Rock)
            | (LabelConvention::MinePositive, Class::Mine) => 1,
            _ => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawPattern {
    pub mu: usize,
    pub features: Vec<f64>,
    pub class: Class,
}

/// A pattern ready for a perceptron: `xi[0] == 1` is the bias coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPattern {
    pub mu: usize,
    pub xi: Vec<f64>,
    pub tau: i8,
}

impl LabeledPattern {
    /// Builds a pattern from its features, prepending the bias coordinate.
    pub fn new(mu: usize, features: &[f64], tau: i8) -> Self {
        debug_assert!(tau == 1 || tau == -1);
        let mut xi = Vec::with_capacity(features.len() + 1);
        xi.push(1.0);
        xi.extend_from_slice(features);
        LabeledPattern { mu, xi, tau }
    }

    pub fn tau_f64(&self) -> f64 {
        f64::from(self.tau)
    }

    /// Same input, different target.
    pub fn with_tau(&self, tau: i8) -> Self {
        LabeledPattern {
            mu: self.mu,
            xi: self.xi.clone(),
            tau,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    /// Required feature count per line; `None` takes it from the first line.
    pub features: Option<usize>,
    /// Accept feature values outside `[0, 1]`.
    pub allow_out_of_range: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            features: Some(SONAR_FEATURES),
            allow_out_of_range: false,
        }
    }
}

impl ParseOptions {
    /// Options for small hand-made fixtures of any width.
    pub fn any_width() -> Self {
        ParseOptions {
            features: None,
            ..Default::default()
        }
    }
}

/// Parses `v1,...,vN,LABEL` lines. Blank lines are skipped; `mu` counts
/// patterns, not lines.
pub fn parse_sonar<R: BufRead>(reader: R, opts: ParseOptions) -> Result<Vec<RawPattern>> {
    let mut width = opts.features;
    let mut patterns = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split(',').collect();
        let n = tokens.len() - 1;
        let expected = *width.get_or_insert(n);
        if n != expected || n == 0 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {expected} values and a label, found {n} values"),
            });
        }
        let class = Class::from_token(tokens[n]).ok_or_else(|| Error::Parse {
            line: lineno,
            message: format!("unknown label {:?}", tokens[n].trim()),
        })?;
        let mut features = Vec::with_capacity(n);
        for (i, tok) in tokens[..n].iter().enumerate() {
            let value = f64::from_str(tok.trim()).map_err(|_| Error::Parse {
                line: lineno,
                message: format!("feature {}: cannot parse {:?}", i + 1, tok.trim()),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("feature {}: non-finite value", i + 1),
                });
            }
            if !opts.allow_out_of_range && !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfRange {
                    line: lineno,
                    feature: i + 1,
                    value,
                });
            }
            features.push(value);
        }
        patterns.push(RawPattern {
            mu: patterns.len() + 1,
            features,
            class,
        });
    }
    Ok(patterns)
}

pub fn parse_sonar_str(text: &str, opts: ParseOptions) -> Result<Vec<RawPattern>> {
    parse_sonar(text.as_bytes(), opts)
}

/// `(rock, mine)` counts.
pub fn class_counts(patterns: &[RawPattern]) -> (usize, usize) {
    let rocks = patterns.iter().filter(|p| p.class == Class::Rock).count();
    (rocks, patterns.len() - rocks)
}

/// Absolute indices assigned to each part, in output order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitSpec {
    /// First half to train, second half to test: `1..=104` / `105..=208`
    /// on the full benchmark.
    pub fn halves(n: usize) -> Self {
        let cut = n / 2;
        SplitSpec {
            train: (1..=cut).collect(),
            test: (cut + 1..=n).collect(),
        }
    }

    /// Parses the `[train]` / `[test]` section format, one index per line.
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut train = Vec::new();
        let mut test = Vec::new();
        let mut section: Option<&mut Vec<usize>> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.to_ascii_lowercase().as_str() {
                "[train]" => section = Some(&mut train),
                "[test]" => section = Some(&mut test),
                _ => {
                    let mu: usize = line.parse().map_err(|_| Error::Parse {
                        line: idx + 1,
                        message: format!("expected a pattern index, found {line:?}"),
                    })?;
                    match section.as_deref_mut() {
                        Some(part) => part.push(mu),
                        None => {
                            return Err(Error::Parse {
                                line: idx + 1,
                                message: "index before any [train]/[test] header".into(),
                            })
                        }
                    }
                }
            }
        }
        Ok(SplitSpec { train, test })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("[train]\n");
        for mu in &self.train {
            s.push_str(&format!("{mu}\n"));
        }
        s.push_str("[test]\n");
        for mu in &self.test {
            s.push_str(&format!("{mu}\n"));
        }
        s
    }
}

/// Splits `patterns` into `(train, test)` following `spec`. Each part keeps
/// the order given by the spec.
pub fn split(
    patterns: &[RawPattern],
    spec: &SplitSpec,
) -> Result<(Vec<RawPattern>, Vec<RawPattern>)> {
    let n = patterns.len();
    let unknown: Vec<usize> = spec
        .train
        .iter()
        .chain(&spec.test)
        .copied()
        .filter(|&mu| mu == 0 || mu > n)
        .collect();
    if !unknown.is_empty() {
        return Err(Error::UnknownIndices(unknown));
    }
    let mut seen = BTreeSet::new();
    for &mu in spec.train.iter().chain(&spec.test) {
        if !seen.insert(mu) {
            return Err(Error::InvalidSplit(format!("index {mu} listed twice")));
        }
    }
    if seen.len() != n {
        let missing: Vec<usize> = (1..=n).filter(|mu| !seen.contains(mu)).collect();
        return Err(Error::InvalidSplit(format!(
            "indices not assigned to any part: {missing:?}"
        )));
    }
    // mu is 1-based file order, so it indexes straight into the slice.
    let pick = |ids: &[usize]| ids.iter().map(|&mu| patterns[mu - 1].clone()).collect();
    Ok((pick(&spec.train), pick(&spec.test)))
}

/// Renumbers `train ++ test` as `1..=n` in that order, the absolute
/// numbering reports use.
pub fn renumber(train: &mut [RawPattern], test: &mut [RawPattern]) {
    for (k, p) in train.iter_mut().chain(test.iter_mut()).enumerate() {
        p.mu = k + 1;
    }
}

/// How `scale[i]` is derived from the centered second moment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleMode {
    /// Population standard deviation (divisor `P`).
    #[default]
    Std,
    /// Mean squared deviation, no square root.
    Variance,
}

impl FromStr for ScaleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "std" => Ok(ScaleMode::Std),
            "variance" => Ok(ScaleMode::Variance),
            other => Err(Error::Config(format!("unknown scale mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for ScaleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScaleMode::Std => "std",
            ScaleMode::Variance => "variance",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    pub mode: ScaleMode,
}

impl StandardizationStats {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

pub fn compute_stats(patterns: &[RawPattern], mode: ScaleMode) -> Result<StandardizationStats> {
    let first = patterns.first().ok_or(Error::EmptySet)?;
    let dim = first.features.len();
    let p = patterns.len() as f64;
    let mut mean = vec![0.0; dim];
    for pat in patterns {
        if pat.features.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                actual: pat.features.len(),
            });
        }
        for (m, x) in mean.iter_mut().zip(&pat.features) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= p;
    }
    let mut second = vec![0.0; dim];
    for pat in patterns {
        for ((s, x), m) in second.iter_mut().zip(&pat.features).zip(&mean) {
            let d = x - m;
            *s += d * d;
        }
    }
    let mut scale = Vec::with_capacity(dim);
    for (i, s) in second.into_iter().enumerate() {
        let var = s / p;
        if var <= 0.0 {
            return Err(Error::ConstantFeature(i + 1));
        }
        scale.push(match mode {
            ScaleMode::Std => var.sqrt(),
            ScaleMode::Variance => var,
        });
    }
    Ok(StandardizationStats { mean, scale, mode })
}

pub fn standardize(
    patterns: &[RawPattern],
    stats: &StandardizationStats,
    labels: LabelConvention,
) -> Result<Vec<LabeledPattern>> {
    patterns
        .iter()
        .map(|p| {
            if p.features.len() != stats.dim() {
                return Err(Error::Dimension {
                    expected: stats.dim(),
                    actual: p.features.len(),
                });
            }
            let z: Vec<f64> = p
                .features
                .iter()
                .zip(stats.mean.iter().zip(&stats.scale))
                .map(|(x, (m, s))| (x - m) / s)
                .collect();
            Ok(LabeledPattern::new(p.mu, &z, labels.tau(p.class)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pat(mu: usize, features: &[f64], class: Class) -> RawPattern {
        RawPattern {
            mu,
            features: features.to_vec(),
            class,
        }
    }

    fn sonar_line(value: f64, label: &str) -> String {
        let mut s = vec![format!("{value}"); SONAR_FEATURES].join(",");
        s.push(',');
        s.push_str(label);
        s
    }

    #[test]
    fn empty_input_gives_no_patterns() {
        assert!(parse_sonar_str("", ParseOptions::default())
            .unwrap()
            .is_empty());
        assert!(parse_sonar_str("\n\n", ParseOptions::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn labels_are_case_insensitive_and_mu_follows_file_order() {
        let text = format!(
            "{}\n\n{}\n{}",
            sonar_line(0.5, "R"),
            sonar_line(0.1, "m"),
            sonar_line(0.2, "r")
        );
        let pats = parse_sonar_str(&text, ParseOptions::default()).unwrap();
        assert_eq!(pats.iter().map(|p| p.mu).collect::<Vec<_>>(), [1, 2, 3]);
        assert_eq!(class_counts(&pats), (2, 1));
    }

    #[test]
    fn short_line_names_its_line_number() {
        let mut bad = vec!["0.5"; 59].join(",");
        bad.push_str(",R");
        let text = format!("{}\n{}\n", sonar_line(0.5, "R"), bad);
        match parse_sonar_str(&text, ParseOptions::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_label_and_bad_number() {
        let err = parse_sonar_str(&sonar_line(0.5, "X"), ParseOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let mut text = sonar_line(0.5, "R");
        text = text.replacen("0.5", "abc", 1);
        let err = parse_sonar_str(&text, ParseOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn range_check_can_be_overridden() {
        let text = sonar_line(1.5, "M");
        assert!(matches!(
            parse_sonar_str(&text, ParseOptions::default()),
            Err(Error::OutOfRange {
                line: 1,
                feature: 1,
                ..
            })
        ));
        let opts = ParseOptions {
            allow_out_of_range: true,
            ..Default::default()
        };
        assert_eq!(parse_sonar_str(&text, opts).unwrap().len(), 1);
    }

    #[test]
    fn any_width_fixes_width_from_first_line() {
        let pats = parse_sonar_str("0,1,R\n1,0,M\n", ParseOptions::any_width()).unwrap();
        assert_eq!(pats[1].features, vec![1.0, 0.0]);
        assert!(parse_sonar_str("0,1,R\n1,M\n", ParseOptions::any_width()).is_err());
    }

    #[test]
    fn split_degenerate_and_out_of_range() {
        let pats: Vec<_> = (1..=4)
            .map(|mu| pat(mu, &[mu as f64], Class::Rock))
            .collect();
        let all_train = SplitSpec {
            train: vec![1, 2, 3, 4],
            test: vec![],
        };
        let (tr, te) = split(&pats, &all_train).unwrap();
        assert_eq!(tr.len(), 4);
        assert!(te.is_empty());

        let bad = SplitSpec {
            train: vec![1, 2, 300],
            test: vec![3, 4],
        };
        match split(&pats, &bad) {
            Err(Error::UnknownIndices(ids)) => assert_eq!(ids, vec![300]),
            other => panic!("unexpected {other:?}"),
        }
        let overlap = SplitSpec {
            train: vec![1, 2, 3],
            test: vec![3, 4],
        };
        assert!(matches!(
            split(&pats, &overlap),
            Err(Error::InvalidSplit(_))
        ));
        let gap = SplitSpec {
            train: vec![1],
            test: vec![4],
        };
        assert!(matches!(split(&pats, &gap), Err(Error::InvalidSplit(_))));
    }

    #[test]
    fn split_keeps_listed_order_and_renumber_is_sequential() {
        let pats: Vec<_> = (1..=4)
            .map(|mu| pat(mu, &[mu as f64], Class::Mine))
            .collect();
        let spec = SplitSpec {
            train: vec![3, 1],
            test: vec![4, 2],
        };
        let (mut tr, mut te) = split(&pats, &spec).unwrap();
        assert_eq!(tr[0].features, vec![3.0]);
        assert_eq!(te[1].features, vec![2.0]);
        renumber(&mut tr, &mut te);
        assert_eq!(tr[1].mu, 2);
        assert_eq!(te[0].mu, 3);
    }

    #[test]
    fn split_file_round_trip() {
        let spec = SplitSpec {
            train: vec![5, 1, 2],
            test: vec![3, 4],
        };
        assert_eq!(SplitSpec::parse(&spec.to_text()).unwrap(), spec);
        let parsed = SplitSpec::parse("# c\n[TRAIN]\n2 # two\n1\n[test]\n3\n").unwrap();
        assert_eq!(parsed.train, vec![2, 1]);
        assert!(SplitSpec::parse("3\n[train]\n").is_err());
    }

    #[test]
    fn halves_matches_benchmark_layout() {
        let spec = SplitSpec::halves(208);
        assert_eq!(spec.train.first(), Some(&1));
        assert_eq!(spec.train.last(), Some(&104));
        assert_eq!(spec.test.first(), Some(&105));
        assert_eq!(spec.test.len(), 104);
    }

    #[test]
    fn two_point_stats() {
        let pats = vec![
            pat(1, &[0.0, 0.2], Class::Rock),
            pat(2, &[1.0, 0.6], Class::Mine),
        ];
        let stats = compute_stats(&pats, ScaleMode::Std).unwrap();
        assert_abs_diff_eq!(stats.mean[0], 0.5);
        assert_abs_diff_eq!(stats.scale[0], 0.5);
        let var = compute_stats(&pats, ScaleMode::Variance).unwrap();
        assert_abs_diff_eq!(var.scale[0], 0.25);
    }

    #[test]
    fn degenerate_stats_are_errors() {
        assert!(matches!(
            compute_stats(&[], ScaleMode::Std),
            Err(Error::EmptySet)
        ));
        let one = vec![pat(1, &[0.3, 0.4], Class::Rock)];
        assert!(matches!(
            compute_stats(&one, ScaleMode::Std),
            Err(Error::ConstantFeature(1))
        ));
        let second_const = vec![
            pat(1, &[0.1, 0.4], Class::Rock),
            pat(2, &[0.3, 0.4], Class::Rock),
        ];
        assert!(matches!(
            compute_stats(&second_const, ScaleMode::Std),
            Err(Error::ConstantFeature(2))
        ));
    }

    #[test]
    fn standardize_centers_and_labels() {
        let pats = vec![
            pat(1, &[0.0, 0.2], Class::Rock),
            pat(2, &[1.0, 0.6], Class::Mine),
            pat(3, &[0.5, 0.3], Class::Mine),
        ];
        let stats = compute_stats(&pats, ScaleMode::Std).unwrap();
        let out = standardize(&pats, &stats, LabelConvention::RockPositive).unwrap();
        assert!(out.iter().all(|p| p.xi[0] == 1.0));
        assert_eq!(out[0].tau, 1);
        assert_eq!(out[1].tau, -1);
        // feature 1 of pattern 3 equals its mean
        assert_abs_diff_eq!(out[2].xi[1], 0.0, epsilon = 1e-15);
        let flipped = standardize(&pats, &stats, LabelConvention::MinePositive).unwrap();
        assert_eq!(flipped[0].tau, -1);

        let wrong = vec![pat(4, &[0.1], Class::Rock)];
        assert!(matches!(
            standardize(&wrong, &stats, LabelConvention::RockPositive),
            Err(Error::Dimension {
                expected: 2,
                actual: 1
            })
        ));
    }
}

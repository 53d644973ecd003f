//! Binary perceptron machinery: weight vectors, stabilities, the annealed
//! Minimerror cost and its gradient, and the two trainers.

mod config;
mod cost;
mod train;

use serde::{Deserialize, Serialize};

use crate::data::LabeledPattern;
use crate::error::{Error, Result};

pub use config::TrainingConfig;
pub use cost::{cost, cost_gradient, cost_gradient_with, cost_with, Temperatures};
pub use train::{
    hebbian_init, minimerror_train, rosenblatt_train, EpochRecord, HebbianStart, TrainingTrace,
};

/// Perceptron weights, component 0 being the bias.
///
/// Always finite with a nonzero norm; the norm is cached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector {
    w: Vec<f64>,
    norm: f64,
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(w: Vec<f64>) -> Result<Self> {
        WeightVector::new(w)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.w
    }
}

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = dot(&w, &w).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(WeightVector { w, norm })
    }

    pub fn components(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        WeightVector::new(self.w.iter().map(|x| x * c).collect())
    }

    /// Rescaled so that `|w|^2 == len`.
    pub fn normalized(&self) -> Self {
        let target = (self.w.len() as f64).sqrt();
        let c = target / self.norm;
        let w: Vec<f64> = self.w.iter().map(|x| x * c).collect();
        let norm = dot(&w, &w).sqrt();
        WeightVector { w, norm }
    }

    pub fn negated(&self) -> Self {
        WeightVector {
            w: self.w.iter().map(|x| -x).collect(),
            norm: self.norm,
        }
    }

    fn check_dim(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.w.len() {
            return Err(Error::Dimension {
                expected: self.w.len(),
                actual: xi.len(),
            });
        }
        Ok(())
    }

    /// Parses one value per line, or the comma/whitespace separated layout
    /// of the published tables. Braces and a leading `name =` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            let line = match line.find('=') {
                Some(pos) => &line[pos + 1..],
                None => line,
            };
            for tok in line
                .split(|c: char| c == ',' || c == '{' || c == '}' || c.is_whitespace())
                .filter(|t| !t.is_empty())
            {
                let v: f64 = tok.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("cannot parse weight {tok:?}"),
                })?;
                values.push(v);
            }
        }
        if values.is_empty() {
            return Err(Error::Artifact("weight file holds no values".into()));
        }
        WeightVector::new(values)
    }

    /// One value per line, shortest round-trip representation.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.w.len() * 24);
        for x in &self.w {
            s.push_str(&format!("{x}\n"));
        }
        s
    }

    /// Rows of `per_row` values to four decimals, like the published tables.
    pub fn to_table(&self, per_row: usize) -> String {
        self.w
            .chunks(per_row.max(1))
            .map(|row| {
                row.iter()
                    .map(|x| format!("{x:8.4}"))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join(",\n")
            + "\n"
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Signed distance of `xi` to the hyperplane normal to `w`.
pub fn field(w: &WeightVector, xi: &[f64]) -> Result<f64> {
    w.check_dim(xi)?;
    Ok(dot(&w.w, xi) / w.norm)
}

/// `tau * field`: positive iff the pattern is well classified.
pub fn stability(w: &WeightVector, p: &LabeledPattern) -> Result<f64> {
    Ok(p.tau_f64() * field(w, &p.xi)?)
}

pub fn stabilities(w: &WeightVector, set: &[LabeledPattern]) -> Result<Vec<f64>> {
    set.iter().map(|p| stability(w, p)).collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorCounts {
    pub total: usize,
    /// Label -1 classified +1.
    pub false_pos: usize,
    /// Label +1 classified -1.
    pub false_neg: usize,
}

/// A pattern with zero field is classified +1 (sign(0) = +1) and is
/// counted as an error whatever its label, since its stability is not
/// positive.
pub fn count_errors(w: &WeightVector, set: &[LabeledPattern]) -> Result<ErrorCounts> {
    let mut counts = ErrorCounts::default();
    for p in set {
        let h = field(w, &p.xi)?;
        if p.tau < 0 && h >= 0.0 {
            counts.false_pos += 1;
        } else if p.tau > 0 && h <= 0.0 {
            counts.false_neg += 1;
        }
    }
    counts.total = counts.false_pos + counts.false_neg;
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit0(n: usize) -> WeightVector {
        let mut w = vec![0.0; n];
        w[0] = 1.0;
        WeightVector::new(w).unwrap()
    }

    #[test]
    fn zero_and_nan_vectors_are_rejected() {
        assert!(matches!(
            WeightVector::new(vec![0.0; 3]),
            Err(Error::ZeroNorm)
        ));
        assert!(matches!(
            WeightVector::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn bias_only_projection() {
        let p = LabeledPattern::new(1, &[0.3, -2.0], 1);
        assert_eq!(field(&unit0(3), &p.xi).unwrap(), 1.0);
    }

    #[test]
    fn on_hyperplane_pattern_has_zero_stability() {
        let w = WeightVector::new(vec![0.0, 1.0, 0.0]).unwrap();
        let p = LabeledPattern::new(1, &[0.0, 5.0], 1);
        assert_eq!(stability(&w, &p).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let p = LabeledPattern::new(1, &[0.0], 1);
        assert!(matches!(
            field(&unit0(3), &p.xi),
            Err(Error::Dimension {
                expected: 3,
                actual: 2
            })
        ));
    }

    #[test]
    fn error_counts_split_by_label() {
        let w = WeightVector::new(vec![0.0, 1.0]).unwrap();
        let set = vec![
            LabeledPattern::new(1, &[1.0], 1),
            LabeledPattern::new(2, &[-1.0], 1),
            LabeledPattern::new(3, &[1.0], -1),
            LabeledPattern::new(4, &[0.0], -1),
            LabeledPattern::new(5, &[0.0], 1),
            LabeledPattern::new(6, &[-2.0], -1),
        ];
        let c = count_errors(&w, &set).unwrap();
        assert_eq!(
            c,
            ErrorCounts {
                total: 4,
                false_pos: 2,
                false_neg: 2
            }
        );
        assert_eq!(count_errors(&w, &[]).unwrap(), ErrorCounts::default());
    }

    #[test]
    fn parse_accepts_table_layout_and_lines() {
        let table = "W = {\n -0.0692, -1.5031 -0.2835,\n 0.0015 \n}";
        let w = WeightVector::parse(table).unwrap();
        assert_eq!(w.components(), &[-0.0692, -1.5031, -0.2835, 0.0015]);
        let again = WeightVector::parse(&w.to_text()).unwrap();
        assert_eq!(again, w);
        assert!(WeightVector::parse("1.0\nfoo\n").is_err());
        assert!(WeightVector::parse("\n").is_err());
    }

    #[test]
    fn table_rows_hold_eight_values() {
        let w = WeightVector::new((1..=10).map(f64::from).collect()).unwrap();
        let t = w.to_table(8);
        assert_eq!(t.lines().count(), 2);
        assert_eq!(
            t.lines()
                .next()
                .unwrap()
                .split(',')
                .filter(|s| !s.is_empty())
                .count(),
            8
        );
    }

    #[test]
    fn normalized_has_dimension_norm() {
        let w = WeightVector::new(vec![3.0, 4.0, 0.0, 0.0])
            .unwrap()
            .normalized();
        assert_relative_eq!(w.norm() * w.norm(), 4.0, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn stability_is_scale_invariant(
            w in proptest::collection::vec(-5.0f64..5.0, 4),
            x in proptest::collection::vec(-3.0f64..3.0, 3),
            c in 1e-3f64..1e3,
        ) {
            prop_assume!(w.iter().any(|v| v.abs() > 1e-3));
            let w = WeightVector::new(w).unwrap();
            let p = LabeledPattern::new(1, &x, -1);
            let a = stability(&w, &p).unwrap();
            let b = stability(&w.scaled(c).unwrap(), &p).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-12) + 1e-15);
        }
    }
}

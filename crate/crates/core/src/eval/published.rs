//! The three published separators and the misclassified-pattern tables
//! they were reported with, embedded as data assets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perceptron::WeightVector;

pub(crate) const W_TRAIN_ASSET: &str = include_str!("../../assets/w_train.txt");
pub(crate) const W_TEST_ASSET: &str = include_str!("../../assets/w_test.txt");
pub(crate) const W_SONAR_ASSET: &str = include_str!("../../assets/w_sonar.txt");
pub(crate) const MISCLASSIFIED_ASSET: &str = include_str!("../../assets/misclassified.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PublishedName {
    #[serde(rename = "W_Train")]
    Train,
    #[serde(rename = "W_Test")]
    Test,
    #[serde(rename = "W_Sonar")]
    Sonar,
}

impl PublishedName {
    pub const ALL: [PublishedName; 3] = [
        PublishedName::Train,
        PublishedName::Test,
        PublishedName::Sonar,
    ];

    fn asset(self) -> &'static str {
        match self {
            PublishedName::Train => W_TRAIN_ASSET,
            PublishedName::Test => W_TEST_ASSET,
            PublishedName::Sonar => W_SONAR_ASSET,
        }
    }
}

impl fmt::Display for PublishedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PublishedName::Train => "W_Train",
            PublishedName::Test => "W_Test",
            PublishedName::Sonar => "W_Sonar",
        })
    }
}

impl FromStr for PublishedName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().trim_start_matches("w_") {
            "train" => Ok(PublishedName::Train),
            "test" => Ok(PublishedName::Test),
            "sonar" => Ok(PublishedName::Sonar),
            _ => Err(Error::UnknownWeights(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedWeights {
    pub name: PublishedName,
    pub w: WeightVector,
}

/// Accepts `W_Train`, `train`, ... case-insensitively.
pub fn load_published_weights(name: &str) -> Result<PublishedWeights> {
    let name: PublishedName = name.parse()?;
    Ok(published(name))
}

pub fn published(name: PublishedName) -> PublishedWeights {
    let w = WeightVector::parse(name.asset()).expect("embedded weight asset is well formed");
    PublishedWeights { name, w }
}

/// Which half a reference row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Train,
    Test,
}

/// One published misclassified pattern: the Test rows are W_Train's
/// errors, the Train rows W_Test's. `gamma_reference` is the stability
/// under W_Sonar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub part: Part,
    pub i: usize,
    pub mu: usize,
    pub field: f64,
    pub gamma_reference: f64,
    pub tau: i8,
}

pub fn reference_rows() -> Vec<ReferenceRow> {
    MISCLASSIFIED_ASSET
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            ReferenceRow {
                part: if f[0] == "test" {
                    Part::Test
                } else {
                    Part::Train
                },
                i: f[1].parse().expect("row counter"),
                mu: f[2].parse().expect("pattern index"),
                field: f[3].parse().expect("field"),
                gamma_reference: f[4].parse().expect("stability"),
                tau: f[5].parse().expect("label"),
            }
        })
        .collect()
}

/// Published cosines between the three separators, in the order
/// `(Sonar, Train)`, `(Sonar, Test)`, `(Train, Test)`, with the tolerance
/// each is printed to.
pub const REFERENCE_COSINES: [(PublishedName, PublishedName, f64, f64); 3] = [
    (PublishedName::Sonar, PublishedName::Train, 0.51615, 0.01),
    (PublishedName::Sonar, PublishedName::Test, 0.34238, 0.01),
    (PublishedName::Train, PublishedName::Test, 0.4, 0.05),
];

/// Published generalization errors: W_Train on Test and W_Test on Train,
/// as `(percent, false_pos, false_neg)`.
pub const REFERENCE_TRAIN_ON_TEST: (f64, usize, usize) = (19.2, 15, 5);
pub const REFERENCE_TEST_ON_TRAIN: (f64, usize, usize) = (23.1, 5, 19);

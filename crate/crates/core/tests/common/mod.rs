#![allow(dead_code)]

use std::fs;

use monoplane::data::{parse_sonar_str, renumber, split, ParseOptions, RawPattern, SplitSpec};
use monoplane::perceptron::TrainingConfig;

pub fn workspace_file(rel: &str) -> String {
    format!("{}/../../{rel}", env!("CARGO_MANIFEST_DIR"))
}

pub fn read(rel: &str) -> String {
    fs::read_to_string(workspace_file(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn sonar() -> Vec<RawPattern> {
    parse_sonar_str(&read("data/sonar.all-data"), ParseOptions::default()).unwrap()
}

/// Train and Test of the bundled split, renumbered with Train first.
pub fn sonar_halves() -> (Vec<RawPattern>, Vec<RawPattern>) {
    let spec = SplitSpec::parse(&read("data/sonar.surrogate.split")).unwrap();
    let (mut train, mut test) = split(&sonar(), &spec).unwrap();
    renumber(&mut train, &mut test);
    (train, test)
}

pub fn config(rel: &str) -> TrainingConfig {
    TrainingConfig::parse(&read(rel)).unwrap()
}

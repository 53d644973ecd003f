//! Text, CSV and JSON renderings of evaluation and verification results.
//! Output is a pure function of the input, byte for byte.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{CosineMode, EvaluationReport, ModeOutcome, Verification};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    #[default]
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Text => "txt",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

/// `1.19697e-01` style: five mantissa decimals, signed two-digit exponent.
pub fn sci(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.5e}");
    }
    let s = format!("{x:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

pub fn evaluation_csv(report: &EvaluationReport) -> String {
    let mut s = String::from("i,mu,field,gamma_reference,tau\n");
    for r in &report.records {
        let gamma = r.gamma_reference.map(|g| g.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{},{}", r.i, r.mu, r.field, gamma, r.tau);
    }
    s
}

/// Misclassified-pattern table with columns `i, mu, Field, gamma(ref), tau`.
pub fn evaluation_text(report: &EvaluationReport, title: &str, reference: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{title}");
    let _ = writeln!(
        s,
        "eps_g = {} ({} F+ {} F-), {} of {} patterns",
        report.error_percent_display(),
        report.counts.false_pos,
        report.counts.false_neg,
        report.counts.total,
        report.set_size
    );
    let _ = writeln!(
        s,
        "{:>4} {:>5} {:>13} {:>13} {:>4}",
        "i",
        "mu",
        "Field",
        format!("gamma({reference})"),
        "tau"
    );
    for r in &report.records {
        let gamma = r.gamma_reference.map(sci).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "{:>4} {:>5} {:>13} {:>13} {:>4}",
            r.i,
            r.mu,
            sci(r.field),
            gamma,
            r.tau
        );
    }
    for c in &report.cosines {
        let _ = writeln!(s, "cos({}) = {:.5}", c.name, c.value);
    }
    s
}

pub fn render_evaluation(
    report: &EvaluationReport,
    format: Format,
    title: &str,
    reference: &str,
) -> String {
    match format {
        Format::Text => evaluation_text(report, title, reference),
        Format::Csv => evaluation_csv(report),
        Format::Json => json(report),
    }
}

fn mode_text(s: &mut String, m: &ModeOutcome) {
    let _ = writeln!(s, "== mode {} ==", m.mode);
    let _ = writeln!(
        s,
        "W_Train on Test: {} errors ({} F+ {} F-), eps_g = {}; table match: {} (missing {:?}, extra {:?})",
        m.train_on_test.counts.total,
        m.train_on_test.counts.false_pos,
        m.train_on_test.counts.false_neg,
        m.train_on_test.error_percent_display(),
        m.test_diff.exact(),
        m.test_diff.missing,
        m.test_diff.extra
    );
    let _ = writeln!(
        s,
        "W_Test on Train: {} errors ({} F+ {} F-), eps_g = {}; table match: {} (missing {:?}, extra {:?})",
        m.test_on_train.counts.total,
        m.test_on_train.counts.false_pos,
        m.test_on_train.counts.false_neg,
        m.test_on_train.error_percent_display(),
        m.train_diff.exact(),
        m.train_diff.missing,
        m.train_diff.extra
    );
    let _ = writeln!(
        s,
        "W_Sonar on all: {} errors, min stability {}; max |gamma - published| over {} rows: {}",
        m.sonar_counts.total,
        sci(m.sonar_min_stability),
        m.gamma_checks.len(),
        sci(m.gamma_max_abs_error())
    );
    if let Some(d) = m.field_max_abs_diff {
        let _ = writeln!(s, "max |Field - published| over matched rows: {}", sci(d));
    }
    for (name, p) in [
        ("W_Train on Test", &m.perturb_train_on_test),
        ("W_Test on Train", &m.perturb_test_on_train),
    ] {
        let _ = writeln!(
            s,
            "perturbation +-{:e} of {name}: baseline {}, single-component [{}, {}], box [{}, {}] over {} samples",
            p.step, p.baseline, p.single_min, p.single_max, p.box_min, p.box_max, p.box_samples
        );
    }
}

/// Human-readable verification report. The misclassified tables are shown
/// for the canonical (or closest) mode.
pub fn verification_text(v: &Verification, raw_eq8: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "published weight verification");
    for (name, sq) in &v.norms_squared {
        let _ = writeln!(s, "|{name}|^2 = {sq:.4}");
    }
    let _ = writeln!(s);
    for m in &v.modes {
        mode_text(&mut s, m);
        let _ = writeln!(s);
    }
    let selected = v.selected();
    match v.canonical {
        Some(_) => {
            let _ = writeln!(s, "canonical mode: {}", selected.mode);
        }
        None => {
            let _ = writeln!(
                s,
                "no mode reproduces the published misclassified sets; closest: {} (set distance {})",
                selected.mode,
                selected.distance()
            );
        }
    }
    let _ = writeln!(s);
    s.push_str(&evaluation_text(
        &selected.train_on_test,
        "Test set misclassified by W_Train",
        "W_Sonar",
    ));
    let _ = writeln!(s);
    s.push_str(&evaluation_text(
        &selected.test_on_train,
        "Train set misclassified by W_Test",
        "W_Sonar",
    ));
    let _ = writeln!(s);
    let _ = writeln!(s, "cosines (published / true / raw a.b/(N+1)^2)");
    for c in &v.cosines {
        let shown = if raw_eq8 { c.raw_eq8 } else { c.true_cosine };
        let _ = writeln!(
            s,
            "({}, {}): {} / {:.5} / {:.5}  [{}: {:.5}]",
            c.a,
            c.b,
            c.reference,
            c.true_cosine,
            c.raw_eq8,
            if raw_eq8 { "raw-eq8" } else { "true" },
            shown
        );
    }
    let _ = writeln!(
        s,
        "cosine mode reproducing the published values: {}",
        match v.cosine_mode {
            Some(CosineMode::True) => "true",
            Some(CosineMode::RawEq8) => "raw-eq8",
            None => "none",
        }
    );
    s
}

/// One row per mode.
pub fn verification_csv(v: &Verification) -> String {
    let mut s = String::from(
        "scale,stats,train_on_test_errors,train_on_test_fp,train_on_test_fn,test_on_train_errors,test_on_train_fp,test_on_train_fn,test_set_distance,train_set_distance,sonar_errors,gamma_max_abs_error\n",
    );
    for m in &v.modes {
        let stats = serde_json::to_value(m.mode.stats).expect("serializable");
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            m.mode.scale,
            stats.as_str().unwrap_or_default(),
            m.train_on_test.counts.total,
            m.train_on_test.counts.false_pos,
            m.train_on_test.counts.false_neg,
            m.test_on_train.counts.total,
            m.test_on_train.counts.false_pos,
            m.test_on_train.counts.false_neg,
            m.test_diff.distance(),
            m.train_diff.distance(),
            m.sonar_counts.total,
            m.gamma_max_abs_error()
        );
    }
    s
}

pub fn render_verification(v: &Verification, format: Format, raw_eq8: bool) -> String {
    match format {
        Format::Text => verification_text(v, raw_eq8),
        Format::Csv => verification_csv(v),
        Format::Json => json(v),
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Annealing schedule and step size shared by both trainers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    pub t_initial: f64,
    pub t_min: f64,
    /// Multiplicative temperature factor applied after every epoch.
    pub t_decay: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub seed: u64,
    /// Window width of well classified patterns relative to misclassified
    /// ones. 1 is the single-temperature cost.
    pub temp_ratio: f64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            t_initial: 10.0,
            t_min: 1e-3,
            t_decay: 0.999,
            learning_rate: 0.02,
            max_epochs: 100_000,
            seed: 0,
            temp_ratio: 1.0,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_string()));
        if !self.t_min.is_finite() || self.t_min <= 0.0 {
            return fail("t_min must be positive");
        }
        if !self.t_initial.is_finite() || self.t_initial < self.t_min {
            return fail("t_initial must be at least t_min");
        }
        if !(self.t_decay > 0.0 && self.t_decay < 1.0) {
            return fail("t_decay must lie in (0, 1)");
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return fail("learning_rate must be positive");
        }
        if !self.temp_ratio.is_finite() || self.temp_ratio <= 0.0 {
            return fail("temp_ratio must be positive");
        }
        Ok(())
    }

    /// Reads `key = value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = TrainingConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Parse {
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key = value, found {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let float = || {
                value
                    .parse::<f64>()
                    .map_err(|_| bad(format!("{key}: cannot parse {value:?}")))
            };
            let int = || {
                value
                    .parse::<u64>()
                    .map_err(|_| bad(format!("{key}: cannot parse {value:?}")))
            };
            match key {
                "t_initial" => cfg.t_initial = float()?,
                "t_min" => cfg.t_min = float()?,
                "t_decay" => cfg.t_decay = float()?,
                "learning_rate" => cfg.learning_rate = float()?,
                "temp_ratio" => cfg.temp_ratio = float()?,
                "max_epochs" => cfg.max_epochs = int()? as usize,
                "seed" => cfg.seed = int()?,
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        format!(
            "t_initial = {}\nt_min = {}\nt_decay = {}\nlearning_rate = {}\nmax_epochs = {}\nseed = {}\ntemp_ratio = {}\n",
            self.t_initial,
            self.t_min,
            self.t_decay,
            self.learning_rate,
            self.max_epochs,
            self.seed,
            self.temp_ratio
        )
    }
}

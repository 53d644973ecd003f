use crate::data::LabeledPattern;
use crate::error::{Error, Result};

use super::{dot, WeightVector};

/// Window widths for the cost. `negative` applies to patterns with
/// `gamma <= 0`, `positive` to well classified ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Temperatures {
    pub negative: f64,
    pub positive: f64,
}

impl Temperatures {
    pub fn symmetric(t: f64) -> Self {
        Temperatures {
            negative: t,
            positive: t,
        }
    }

    /// `positive = ratio * t`, `negative = t`.
    pub fn with_ratio(t: f64, ratio: f64) -> Self {
        Temperatures {
            negative: t,
            positive: ratio * t,
        }
    }

    fn validate(&self) -> Result<()> {
        for t in [self.negative, self.positive] {
            if !t.is_finite() || t <= 0.0 {
                return Err(Error::Temperature(t));
            }
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn for_gamma(&self, gamma: f64) -> f64 {
        if gamma > 0.0 {
            self.positive
        } else {
            self.negative
        }
    }
}

/// `1 - tanh(x)` without cancellation for large positive `x`.
#[inline]
pub(crate) fn one_minus_tanh(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    if x >= 0.0 {
        2.0 * e / (1.0 + e)
    } else {
        2.0 / (1.0 + e)
    }
}

/// `sech(x)^2`, underflowing cleanly to zero.
#[inline]
pub(crate) fn sech2(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// Pattern contribution `1/2 (1 - tanh(gamma / 2T))`.
#[inline]
pub(crate) fn term(gamma: f64, temps: &Temperatures) -> f64 {
    0.5 * one_minus_tanh(gamma / (2.0 * temps.for_gamma(gamma)))
}

/// `-dE/dgamma` for one pattern.
#[inline]
pub(crate) fn weight(gamma: f64, temps: &Temperatures) -> f64 {
    let t = temps.for_gamma(gamma);
    sech2(gamma / (2.0 * t)) / (4.0 * t)
}

fn check(w: &WeightVector, set: &[LabeledPattern]) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    for p in set {
        if p.xi.len() != w.len() {
            return Err(Error::Dimension {
                expected: w.len(),
                actual: p.xi.len(),
            });
        }
    }
    Ok(())
}

/// Minimerror cost `E = 1/2 sum_mu [1 - tanh(gamma_mu / 2T)]`.
pub fn cost(w: &WeightVector, set: &[LabeledPattern], t: f64) -> Result<f64> {
    cost_with(w, set, Temperatures::symmetric(t))
}

pub fn cost_with(w: &WeightVector, set: &[LabeledPattern], temps: Temperatures) -> Result<f64> {
    temps.validate()?;
    check(w, set)?;
    Ok(set
        .iter()
        .map(|p| term(p.tau_f64() * dot(w.components(), &p.xi) / w.norm(), &temps))
        .sum())
}

pub fn cost_gradient(w: &WeightVector, set: &[LabeledPattern], t: f64) -> Result<Vec<f64>> {
    cost_gradient_with(w, set, Temperatures::symmetric(t))
}

/// Gradient of the cost with respect to the raw (unnormalized) weights.
///
/// With `u = w/|w|`, `d gamma / dw = (tau xi - gamma u) / |w|`, so the
/// gradient has no component along `w`.
pub fn cost_gradient_with(
    w: &WeightVector,
    set: &[LabeledPattern],
    temps: Temperatures,
) -> Result<Vec<f64>> {
    temps.validate()?;
    check(w, set)?;
    let gammas: Vec<f64> = set
        .iter()
        .map(|p| p.tau_f64() * dot(w.components(), &p.xi) / w.norm())
        .collect();
    Ok(gradient_from_gammas(w, set, &gammas, &temps))
}

pub(crate) fn gradient_from_gammas(
    w: &WeightVector,
    set: &[LabeledPattern],
    gammas: &[f64],
    temps: &Temperatures,
) -> Vec<f64> {
    let n = w.len();
    let norm = w.norm();
    let mut acc = vec![0.0; n];
    let mut radial = 0.0;
    for (p, &g) in set.iter().zip(gammas) {
        let c = weight(g, temps);
        if c == 0.0 {
            continue;
        }
        let ct = c * p.tau_f64();
        for (a, x) in acc.iter_mut().zip(&p.xi) {
            *a += ct * x;
        }
        radial += c * g;
    }
    w.components()
        .iter()
        .zip(acc)
        .map(|(wi, a)| -(a - radial * wi / norm) / norm)
        .collect()
}

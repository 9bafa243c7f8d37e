use serde::{Deserialize, Serialize};

use super::{kappa_and_prefactor, ModelExponents};
use crate::error::{Error, Result};

/// Iterated-power ladder `f_n = f_{n-1}^(ratio - epsilon)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSequence {
    pub f: Vec<f64>,
    pub epsilon: f64,
    pub d: usize,
    pub kappa: usize,
    /// `min(d - kappa, kappa)`.
    pub kappa_width: usize,
    pub alpha_kappa: f64,
    pub alpha_1: f64,
}

impl ThresholdSequence {
    pub fn exponent(&self) -> f64 {
        self.kappa_width as f64 / (self.alpha_kappa - self.kappa as f64) - self.epsilon
    }

    /// Number of steps available (`f_0..f_n` gives `n`).
    pub fn steps(&self) -> usize {
        self.f.len() - 1
    }

    /// `2^(2(d-1) + epsilon)`, the constant in the diameter bounds.
    pub fn diameter_factor(&self) -> f64 {
        2f64.powf(2.0 * (self.d as f64 - 1.0) + self.epsilon)
    }
}

/// Thresholds `f_0..f_n` for the exponents' kappa.
pub fn threshold_sequence(
    f0: f64,
    exp: &ModelExponents,
    epsilon: f64,
    n: usize,
) -> Result<ThresholdSequence> {
    if !(f0 > 1.0 && f0.is_finite()) {
        return Err(Error::invalid("f0 must exceed 1"));
    }
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(Error::invalid("epsilon must lie in (0, 1/4)"));
    }
    let (kappa, _) =
        kappa_and_prefactor(exp).ok_or_else(|| Error::invalid("the set M is empty"))?;
    let seq = ThresholdSequence {
        f: vec![f0],
        epsilon,
        d: exp.d(),
        kappa,
        kappa_width: (exp.d() - kappa).min(kappa),
        alpha_kappa: exp.alpha_k(kappa),
        alpha_1: exp.alpha_k(1),
    };
    let e = seq.exponent();
    if e <= 1.0 {
        return Err(Error::NotIncreasing(e));
    }
    let mut f = seq.f;
    for _ in 0..n {
        let next = f[f.len() - 1].powf(e);
        if !next.is_finite() {
            return Err(Error::invalid(format!("threshold overflows after {} steps", f.len() - 1)));
        }
        f.push(next);
    }
    Ok(ThresholdSequence { f, ..seq })
}

use rand::Rng;
use rand_distr::Open01;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Law of a size parameter: a pure Pareto tail or a point mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum TailLaw {
    /// `P(X >= x) = (x / x_min)^(-alpha)` for `x >= x_min`.
    Pareto { alpha: f64, x_min: f64 },
    Degenerate { value: f64 },
}

impl TailLaw {
    pub fn pareto(alpha: f64, x_min: f64) -> Result<Self> {
        let law = TailLaw::Pareto { alpha, x_min };
        law.validate()?;
        Ok(law)
    }

    pub fn degenerate(value: f64) -> Result<Self> {
        let law = TailLaw::Degenerate { value };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TailLaw::Pareto { alpha, x_min } => {
                if !(alpha > 0.0) || alpha.is_nan() {
                    return Err(Error::invalid(format!("tail index must be positive, got {alpha}")));
                }
                if !(x_min > 0.0 && x_min.is_finite()) {
                    return Err(Error::invalid("x_min must be positive and finite"));
                }
            }
            TailLaw::Degenerate { value } => {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(Error::invalid("degenerate value must be positive and finite"));
                }
            }
        }
        Ok(())
    }

    /// Tail index; a point mass has index `+inf`.
    pub fn alpha(&self) -> f64 {
        match *self {
            TailLaw::Pareto { alpha, .. } => alpha,
            TailLaw::Degenerate { .. } => f64::INFINITY,
        }
    }

    pub fn minimum(&self) -> f64 {
        match *self {
            TailLaw::Pareto { x_min, .. } => x_min,
            TailLaw::Degenerate { value } => value,
        }
    }

    /// The value with upper-tail probability `u`, i.e. the inverse transform
    /// `x_min * u^(-1/alpha)`. Decreasing in `u`.
    #[inline]
    pub fn upper_quantile(&self, u: f64) -> f64 {
        match *self {
            TailLaw::Pareto { alpha, x_min } => x_min * u.powf(-1.0 / alpha),
            TailLaw::Degenerate { value } => value,
        }
    }

    /// `P(X > t)`.
    pub fn survival(&self, t: f64) -> f64 {
        match *self {
            TailLaw::Pareto { alpha, x_min } => {
                if t <= x_min {
                    1.0
                } else {
                    (t / x_min).powf(-alpha)
                }
            }
            TailLaw::Degenerate { value } => {
                if t < value {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Density (Pareto only; zero for a point mass).
    pub fn density(&self, t: f64) -> f64 {
        match *self {
            TailLaw::Pareto { alpha, x_min } if t >= x_min => alpha / x_min * (t / x_min).powf(-alpha - 1.0),
            _ => 0.0,
        }
    }

    /// Whether `E[X^p]` is finite.
    pub fn has_moment(&self, p: f64) -> bool {
        p < self.alpha()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        self.upper_quantile(u)
    }
}

/// Draws one value from `law`.
pub fn sample_tail<R: Rng + ?Sized>(law: &TailLaw, rng: &mut R) -> Result<f64> {
    law.validate()?;
    Ok(law.sample(rng))
}

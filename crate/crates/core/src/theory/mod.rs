//! Closed-form quantities of the distance law and the path-event machinery.

pub mod paths;
pub mod thresholds;

pub use paths::{
    b_star, check_path_event, default_phi, in_o_i, planted_configuration, revalidate,
    PathVariant, PathWitness, PlantedScenario, StepRecord,
};
pub use thresholds::{threshold_sequence, ThresholdSequence};

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tail indices `alpha_1 <= ... <= alpha_d` of the diameter sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelExponents {
    d: usize,
    alpha: Vec<f64>,
}

impl ModelExponents {
    pub fn new(d: usize, alpha: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::invalid("dimension must be at least 2"));
        }
        if alpha.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: alpha.len(),
            });
        }
        if alpha.iter().any(|&a| !(a > 0.0) || a.is_nan()) {
            return Err(Error::invalid("tail indices must be positive"));
        }
        if alpha.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("tail indices must be nondecreasing"));
        }
        Ok(ModelExponents { d, alpha })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// `alpha_k` with 1-based `k`.
    pub fn alpha_k(&self, k: usize) -> f64 {
        self.alpha[k - 1]
    }

    /// `min(d - s, s) / (alpha_s - s)`.
    pub fn ratio(&self, s: usize) -> f64 {
        (self.d - s).min(s) as f64 / (self.alpha_k(s) - s as f64)
    }
}

/// Indices `k` in `1..d` with `k < alpha_k < min(2k, d)`.
pub fn robust_set_m(exp: &ModelExponents) -> Vec<usize> {
    (1..exp.d())
        .filter(|&k| {
            let a = exp.alpha_k(k);
            a > k as f64 && a < (2 * k).min(exp.d()) as f64
        })
        .collect()
}

/// `(kappa, prefactor)` where kappa maximizes the ratio over M (smallest index on
/// ties) and the prefactor is `2 / ln(ratio)`; `None` when M is empty.
pub fn kappa_and_prefactor(exp: &ModelExponents) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for s in robust_set_m(exp) {
        let r = exp.ratio(s);
        if best.is_none_or(|(_, b)| r > b) {
            best = Some((s, r));
        }
    }
    best.map(|(k, r)| {
        assert!(r > 1.0, "ratio {r} at kappa {k} must exceed 1 for members of M");
        (k, 2.0 / r.ln())
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Ultrasmall,
    FasterThanLoglog,
    SlowerThanLoglog,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Robustness {
    Robust,
    PossiblyNonRobust,
    /// Neither sufficient condition applies.
    Undetermined,
}

fn alpha_as_json<S: Serializer>(alpha: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(alpha.len()))?;
    for a in alpha {
        if a.is_infinite() {
            seq.serialize_element("inf")?;
        } else {
            seq.serialize_element(a)?;
        }
    }
    seq.end()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeReport {
    pub d: usize,
    #[serde(serialize_with = "alpha_as_json")]
    pub alpha: Vec<f64>,
    #[serde(rename = "M")]
    pub m: Vec<usize>,
    pub kappa: Option<usize>,
    pub prefactor: Option<f64>,
    pub regime: Regime,
    pub robust: Robustness,
    pub dense: bool,
}

impl RegimeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Regime and robustness verdict from the tail indices and caller-supplied moment
/// flags: `vol_l1`/`vol_l2` for integrability of the grain volume and its square,
/// `d1_ld` for `E[(D^(1))^d] < inf`.
pub fn classify_regime(
    exp: &ModelExponents,
    vol_l1: bool,
    vol_l2: bool,
    d1_ld: bool,
) -> Result<RegimeReport> {
    if vol_l2 && !vol_l1 {
        return Err(Error::invalid("volume cannot be square-integrable without being integrable"));
    }
    let d = exp.d();
    let ks = 1..=d;
    let m = robust_set_m(exp);
    let kp = kappa_and_prefactor(exp);
    let regime = if ks.clone().any(|k| exp.alpha_k(k) <= k as f64) {
        Regime::FasterThanLoglog
    } else if !m.is_empty() {
        Regime::Ultrasmall
    } else {
        Regime::SlowerThanLoglog
    };
    let robust = if ks.clone().any(|k| exp.alpha_k(k) < (2 * k).min(d) as f64) {
        Robustness::Robust
    } else if (ks.clone().all(|k| exp.alpha_k(k) > (2 * k) as f64) && vol_l2) || d1_ld {
        Robustness::PossiblyNonRobust
    } else {
        Robustness::Undetermined
    };
    Ok(RegimeReport {
        d,
        alpha: exp.alpha().to_vec(),
        m,
        kappa: kp.map(|x| x.0),
        prefactor: kp.map(|x| x.1),
        regime,
        robust,
        dense: !vol_l1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(d: usize, a: &[f64]) -> ModelExponents {
        ModelExponents::new(d, a.to_vec()).unwrap()
    }

    const INF: f64 = f64::INFINITY;

    #[test]
    fn m_examples() {
        assert_eq!(robust_set_m(&e(2, &[1.5, INF])), vec![1]);
        assert_eq!(robust_set_m(&e(4, &[2.5, 2.5, INF, INF])), vec![2]);
        assert_eq!(robust_set_m(&e(3, &[1.2, 2.5, 3.9])), vec![1, 2]);
    }

    #[test]
    fn kappa_examples() {
        let (k, p) = kappa_and_prefactor(&e(2, &[1.5, INF])).unwrap();
        assert_eq!(k, 1);
        assert!((p - 2.0 / 2f64.ln()).abs() < 1e-12);
        let (k, p) = kappa_and_prefactor(&e(3, &[1.2, 2.5, 3.9])).unwrap();
        assert_eq!(k, 1);
        assert!((p - 2.0 / 5f64.ln()).abs() < 1e-12);
        let (k, p) = kappa_and_prefactor(&e(4, &[2.5, 2.5, INF, INF])).unwrap();
        assert_eq!(k, 2);
        assert!((p - 2.0 / 4f64.ln()).abs() < 1e-12);
        assert!(kappa_and_prefactor(&e(2, &[5.0, 6.0])).is_none());
    }

    #[test]
    fn regimes() {
        let r = classify_regime(&e(2, &[1.5, INF]), true, false, false).unwrap();
        assert_eq!((r.regime, r.robust, r.kappa), (Regime::Ultrasmall, Robustness::Robust, Some(1)));
        let r = classify_regime(&e(2, &[0.8, INF]), true, false, false).unwrap();
        assert_eq!(r.regime, Regime::FasterThanLoglog);
        let r = classify_regime(&e(2, &[5.0, 6.0]), true, true, false).unwrap();
        assert_eq!(r.regime, Regime::SlowerThanLoglog);
        assert_eq!(r.robust, Robustness::PossiblyNonRobust);
        assert!(classify_regime(&e(2, &[5.0, 6.0]), false, true, false).is_err());
    }

    #[test]
    fn report_json_keys() {
        let r = classify_regime(&e(2, &[1.5, INF]), true, false, false).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["d", "alpha", "M", "kappa", "prefactor", "regime", "robust", "dense"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["alpha"][1], "inf");
        assert_eq!(v["regime"], "ultrasmall");
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(ModelExponents::new(2, vec![2.0, 1.0]).is_err());
        assert!(ModelExponents::new(2, vec![0.0, 1.0]).is_err());
        assert!(ModelExponents::new(3, vec![1.0, 1.0]).is_err());
    }
}

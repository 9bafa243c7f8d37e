//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use convex_boolean::grains::{FamilyKind, GrainFamily, TailLaw};
use convex_boolean::process::TruncationPolicy;
use sha2::{Digest, Sha256};

use crate::{CliError, Result};

/// Every accepted key with its default. `None` means unset unless given.
const KEYS: &[(&str, Option<&str>)] = &[
    ("family", Some("long_short")),
    ("d", Some("2")),
    ("m", Some("1")),
    ("alpha", Some("1.5")),
    ("alphas", None),
    ("betas", None),
    ("beta", Some("0.5")),
    ("k", Some("1")),
    ("thin", Some("0.1")),
    ("x_min", Some("1")),
    ("eps_interior", Some("0.05")),
    ("u", Some("1")),
    ("u_grid", Some("0.2,0.4,0.6,0.8,1")),
    ("window", Some("200")),
    ("separations", Some("10,20,40")),
    ("replicas", Some("20")),
    ("min_connected", Some("0")),
    ("max_replicas", Some("100000")),
    ("seed", Some("0")),
    ("cap", None),
    ("cap_quantile", None),
    ("truncation", Some("clamp")),
    ("epsilon", Some("0.1")),
    ("phi", Some("default")),
    ("engine", Some("window")),
    ("node_budget", Some("20000000")),
];

/// Quantile of the first diameter used as the cap when neither `cap` nor
/// `cap_quantile` is given.
pub const DEFAULT_CAP_QUANTILE: f64 = 1.0 - 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Materialize the window and build the whole graph.
    Window,
    /// Realize grains on demand around the search; needs a cap.
    Lazy,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Window => "window",
            Engine::Lazy => "lazy",
        }
    }
}

/// Raw key/value pairs after file parsing and overrides.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("line {}: expected key = value", n + 1)))?;
            raw.set(k.trim(), v.trim())?;
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(CliError::usage(format!("unknown config key '{key}'")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("override '{pair}' is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str).or_else(|| {
            KEYS.iter().find(|(k, _)| *k == key).and_then(|(_, d)| *d)
        })
    }

    fn is_set(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn resolve(&self) -> Result<ExperimentConfig> {
        ExperimentConfig::from_raw(self)
    }
}

fn bad(key: &str, value: &str) -> CliError {
    CliError::usage(format!("invalid value '{value}' for '{key}'"))
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    let x: f64 = s.trim().parse().map_err(|_| bad(key, s))?;
    if x.is_nan() {
        return Err(bad(key, s));
    }
    Ok(x)
}

fn parse_list(key: &str, s: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s.split(',').map(|x| parse_f64(key, x)).collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(CliError::usage(format!("'{key}' is empty")));
    }
    Ok(v)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Fully resolved configuration.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub family: GrainFamily,
    pub u: f64,
    pub u_grid: Vec<f64>,
    pub window: f64,
    pub separations: Vec<f64>,
    pub replicas: usize,
    pub min_connected: usize,
    pub max_replicas: usize,
    pub seed: u64,
    pub trunc: TruncationPolicy,
    pub epsilon: f64,
    pub phi: Option<f64>,
    pub engine: Engine,
    pub node_budget: usize,
    canonical: BTreeMap<&'static str, String>,
}

impl ExperimentConfig {
    fn from_raw(raw: &RawConfig) -> Result<Self> {
        let mut canon: BTreeMap<&'static str, String> = BTreeMap::new();
        let val = |k: &str| raw.get(k).ok_or_else(|| CliError::usage(format!("'{k}' is required")));
        let num = |k: &str| -> Result<f64> { parse_f64(k, val(k)?) };
        let int = |k: &str| -> Result<usize> {
            let s = val(k)?;
            s.trim().parse().map_err(|_| bad(k, s))
        };

        let family_name = val("family")?.to_string();
        let d = int("d")?;
        let eps = num("eps_interior")?;
        let law = |canon: &mut BTreeMap<&'static str, String>| -> Result<TailLaw> {
            let (a, x) = (num("alpha")?, num("x_min")?);
            canon.insert("alpha", a.to_string());
            canon.insert("x_min", x.to_string());
            Ok(TailLaw::pareto(a, x)?)
        };
        let kind = match family_name.as_str() {
            "long_short" => {
                let m = int("m")?;
                canon.insert("m", m.to_string());
                FamilyKind::EllipsoidLongShort { d, m, law: law(&mut canon)? }
            }
            "independent" => {
                let alphas = parse_list("alphas", val("alphas")?)?;
                let x = num("x_min")?;
                canon.insert("alphas", fmt_list(&alphas));
                canon.insert("x_min", x.to_string());
                let laws = alphas
                    .iter()
                    .map(|&a| TailLaw::pareto(a, x))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                FamilyKind::EllipsoidIndependent { d, laws }
            }
            "dependent" => {
                let betas = parse_list("betas", val("betas")?)?;
                canon.insert("betas", fmt_list(&betas));
                FamilyKind::EllipsoidDependent { d, betas }
            }
            "triangle" => {
                if d != 2 {
                    return Err(CliError::usage("the triangle family is planar (d = 2)"));
                }
                let beta = num("beta")?;
                canon.insert("beta", beta.to_string());
                FamilyKind::RightTriangle { law: law(&mut canon)?, beta }
            }
            "box" => {
                let (k, thin) = (int("k")?, num("thin")?);
                canon.insert("k", k.to_string());
                canon.insert("thin", thin.to_string());
                FamilyKind::Box { d, k, law: law(&mut canon)?, thin }
            }
            other => return Err(bad("family", other)),
        };
        let family = GrainFamily::new(kind, eps)?;
        canon.insert("family", family_name);
        canon.insert("d", d.to_string());
        canon.insert("eps_interior", eps.to_string());

        let u = num("u")?;
        let u_grid = parse_list("u_grid", val("u_grid")?)?;
        if !(u >= 0.0 && u.is_finite()) {
            return Err(bad("u", val("u")?));
        }
        if u_grid.iter().any(|&x| !(x >= 0.0 && x.is_finite())) || u_grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(CliError::usage("u_grid must be nonnegative and nondecreasing"));
        }
        let window = num("window")?;
        if !(window > 0.0 && window.is_finite()) {
            return Err(bad("window", val("window")?));
        }
        let separations = parse_list("separations", val("separations")?)?;
        if separations.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(CliError::usage("separations must be positive"));
        }
        let replicas = int("replicas")?;
        if replicas == 0 {
            return Err(CliError::usage("replicas must be at least 1"));
        }
        let min_connected = int("min_connected")?;
        let max_replicas = int("max_replicas")?;
        let seed: u64 = val("seed")?.parse().map_err(|_| bad("seed", val("seed").unwrap()))?;

        let resample = match val("truncation")? {
            "clamp" => false,
            "resample" => true,
            other => return Err(bad("truncation", other)),
        };
        if raw.is_set("cap") && raw.is_set("cap_quantile") {
            return Err(CliError::usage("give at most one of 'cap' and 'cap_quantile'"));
        }
        let cap = match raw.get("cap") {
            Some("none") => None,
            Some(s) => Some(parse_f64("cap", s)?),
            None => {
                let q = match raw.get("cap_quantile") {
                    Some(s) => parse_f64("cap_quantile", s)?,
                    None => DEFAULT_CAP_QUANTILE,
                };
                if !(q > 0.0 && q < 1.0) {
                    return Err(bad("cap_quantile", &q.to_string()));
                }
                canon.insert("cap_quantile", q.to_string());
                Some(family.first_diameter_quantile(q))
            }
        };
        let trunc = TruncationPolicy { cap, resample };
        trunc.validate(&family)?;
        canon.insert("cap", cap.map_or("none".to_string(), |c| c.to_string()));
        canon.insert("truncation", val("truncation")?.to_string());

        let epsilon = num("epsilon")?;
        let phi = match val("phi")? {
            "default" => None,
            s => Some(parse_f64("phi", s)?),
        };
        let engine = match val("engine")? {
            "window" => Engine::Window,
            "lazy" => Engine::Lazy,
            other => return Err(bad("engine", other)),
        };
        if engine == Engine::Lazy && cap.is_none() {
            return Err(CliError::usage("the lazy engine needs a cap"));
        }
        let node_budget = int("node_budget")?;

        canon.insert("u", u.to_string());
        canon.insert("u_grid", fmt_list(&u_grid));
        canon.insert("window", window.to_string());
        canon.insert("separations", fmt_list(&separations));
        canon.insert("replicas", replicas.to_string());
        canon.insert("min_connected", min_connected.to_string());
        canon.insert("max_replicas", max_replicas.to_string());
        canon.insert("seed", seed.to_string());
        canon.insert("epsilon", epsilon.to_string());
        canon.insert("phi", phi.map_or("default".to_string(), |p| p.to_string()));
        canon.insert("engine", engine.name().to_string());
        canon.insert("node_budget", node_budget.to_string());

        Ok(ExperimentConfig {
            family,
            u,
            u_grid,
            window,
            separations,
            replicas,
            min_connected,
            max_replicas,
            seed,
            trunc,
            epsilon,
            phi,
            engine,
            node_budget,
            canonical: canon,
        })
    }

    /// Sorted `key = value` lines of every field that affects results. Keys that the
    /// chosen family ignores are left out.
    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.canonical {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_text().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str) -> Result<ExperimentConfig> {
        RawConfig::parse(text)?.resolve()
    }

    #[test]
    fn defaults_resolve() {
        let c = resolve("").unwrap();
        assert_eq!(c.family.dim(), 2);
        assert_eq!(c.engine, Engine::Window);
        let cap = c.trunc.cap.unwrap();
        assert!((cap - c.family.first_diameter_quantile(DEFAULT_CAP_QUANTILE)).abs() < 1e-9);
    }

    #[test]
    fn comments_and_unknown_keys() {
        assert!(resolve("# nothing\nu = 0.5 # trailing\n").is_ok());
        assert!(resolve("colour = red").is_err());
        assert!(resolve("u").is_err());
        assert!(resolve("cap = 10\ncap_quantile = 0.9").is_err());
        assert!(resolve("engine = lazy\ncap = none").is_err());
    }

    #[test]
    fn hash_tracks_semantic_fields() {
        let base = resolve("").unwrap().hash();
        assert_eq!(base, resolve("u = 1.0\nbetas = 0.1,0.2").unwrap().hash());
        assert_eq!(base, resolve("separations = 1e1,2e1,4e1").unwrap().hash());
        assert_ne!(base, resolve("u = 0.9").unwrap().hash());
        assert_ne!(base, resolve("seed = 1").unwrap().hash());
        assert_ne!(base, resolve("cap = 50").unwrap().hash());
        assert_ne!(base, resolve("alpha = 1.6").unwrap().hash());
    }

    #[test]
    fn families() {
        assert!(resolve("family = independent\nalphas = 1.2,1.3").is_ok());
        assert!(resolve("family = independent").is_err());
        assert!(resolve("family = dependent\nbetas = 0.5,0.8").is_ok());
        assert!(resolve("family = triangle\nbeta = 0.5").is_ok());
        assert!(resolve("family = triangle\nd = 3").is_err());
        assert!(resolve("family = box\nd = 3\nk = 2").is_ok());
        assert!(resolve("family = sphere").is_err());
    }
}

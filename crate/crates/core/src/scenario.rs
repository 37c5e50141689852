//! Flat `key = value` scenario files.
//!
//! Keys use dotted namespaces, lists are comma-separated floats and `#`
//! starts a comment. Every key is validated at load time; unknown or
//! duplicated keys are rejected.
//!
//! ```text
//! learning.family = rational     # or exponential
//! learning.param  = 1.0
//! model.q = 0.5, 0.3, 0.2
//! model.u = 0.3, 0.35, 0.35
//! model.p = 0.5
//! model.theta_fraction = 0.5     # or model.theta = <absolute value>
//! model.v = 10
//! gov.eta = 0.5
//! gov.c0 = 0.125
//! gov.tau = 0.2
//! gov.lambda0 = 1
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::knowledge::{CivicParams, SimplexVector};
use crate::learning::LearningTech;
use crate::politics::GovernanceTech;
use crate::production::OracleGrid;

/// Profiles further than this from unit mass are renormalized with a warning.
pub const RENORMALIZE_WARN: f64 = 1e-9;

const KNOWN_KEYS: &[&str] = &[
    "learning.family",
    "learning.param",
    "model.k",
    "model.q",
    "model.u",
    "model.p",
    "model.theta",
    "model.theta_fraction",
    "model.v",
    "gov.eta",
    "gov.c0",
    "gov.tau",
    "gov.lambda0",
    "sweep.b",
    "sweep.alpha",
    "sweep.theta_fraction",
    "oracle.resolution",
    "oracle.max_atoms",
    "oracle.budget",
    "oracle.seed",
    "oracle.samples",
];

/// Grids for the three comparative-statics sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub b: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Points of the `theta` sweep as fractions of the cutoff.
    pub theta_fraction: Vec<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            b: (0..=20).map(|i| i as f64 / 20.0).collect(),
            alpha: (0..=10).map(|i| i as f64 / 10.0).collect(),
            theta_fraction: (1..=50).map(|i| i as f64 / 51.0).collect(),
        }
    }
}

/// Budgets and seed for the oracle suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleSpec {
    pub grid: OracleGrid,
    pub seed: u64,
    /// Random draws per sampled property.
    pub samples: usize,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self {
            grid: OracleGrid::default(),
            seed: 0,
            samples: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub econ: Economy,
    pub sweep: SweepSpec,
    pub oracle: OracleSpec,
}

struct Entry {
    line: usize,
    value: String,
}

struct Table(BTreeMap<String, Entry>);

impl Table {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected `key = value`, found `{body}`"),
            })?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::Config {
                    line,
                    message: format!("unknown key `{key}`"),
                });
            }
            let entry = Entry {
                line,
                value: value.trim().to_string(),
            };
            if let Some(prev) = map.insert(key.to_string(), entry) {
                return Err(Error::Config {
                    line,
                    message: format!("key `{key}` already set on line {}", prev.line),
                });
            }
        }
        Ok(Self(map))
    }

    fn raw(&self, key: &'static str) -> Result<&Entry> {
        self.0.get(key).ok_or(Error::MissingKey(key))
    }

    fn float_at(entry: &Entry, text: &str) -> Result<f64> {
        text.trim().parse::<f64>().map_err(|_| Error::Config {
            line: entry.line,
            message: format!("`{}` is not a number", text.trim()),
        })
    }

    fn float(&self, key: &'static str) -> Result<f64> {
        let e = self.raw(key)?;
        Self::float_at(e, &e.value)
    }

    fn opt_float(&self, key: &'static str) -> Result<Option<f64>> {
        self.0.get(key).map(|e| Self::float_at(e, &e.value)).transpose()
    }

    fn list_of(entry: &Entry) -> Result<Vec<f64>> {
        entry.value.split(',').map(|t| Self::float_at(entry, t)).collect()
    }

    fn list(&self, key: &'static str) -> Result<Vec<f64>> {
        Self::list_of(self.raw(key)?)
    }

    fn opt_list(&self, key: &'static str) -> Result<Option<Vec<f64>>> {
        self.0.get(key).map(Self::list_of).transpose()
    }

    fn opt_uint(&self, key: &'static str) -> Result<Option<u64>> {
        self.0
            .get(key)
            .map(|e| {
                e.value.parse::<u64>().map_err(|_| Error::Config {
                    line: e.line,
                    message: format!("`{}` is not a nonnegative integer", e.value),
                })
            })
            .transpose()
    }

    fn line(&self, key: &str) -> usize {
        self.0.get(key).map_or(0, |e| e.line)
    }
}

fn profile(table: &Table, key: &'static str) -> Result<SimplexVector> {
    let entries = table.list(key)?;
    let defect = SimplexVector::mass_defect(&entries);
    let v = SimplexVector::new(entries).map_err(at(table, key))?;
    if defect > RENORMALIZE_WARN {
        log::warn!("{key} sums to {} and was renormalized", 1.0 + defect);
    }
    Ok(v)
}

fn unit_grid(table: &Table, key: &'static str, open: bool) -> Result<Option<Vec<f64>>> {
    let Some(values) = table.opt_list(key)? else {
        return Ok(None);
    };
    let ok = |v: f64| if open { v > 0.0 && v < 1.0 } else { (0.0..=1.0).contains(&v) };
    if let Some(bad) = values.iter().find(|v| !ok(**v)) {
        return Err(Error::Config {
            line: table.line(key),
            message: format!(
                "{key} entries must lie in {}, found {bad}",
                if open { "(0, 1)" } else { "[0, 1]" }
            ),
        });
    }
    Ok(Some(values))
}

/// Converts a validation error into a config error pointing at `key`.
fn at<'a>(table: &'a Table, key: &'a str) -> impl Fn(Error) -> Error + 'a {
    move |e| Error::Config {
        line: table.line(key),
        message: format!("{key}: {e}"),
    }
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let t = Table::parse(text)?;

        let family = t.raw("learning.family")?;
        let param = t.float("learning.param")?;
        let tech = match family.value.as_str() {
            "rational" => LearningTech::rational(param),
            "exponential" => LearningTech::exponential(param),
            other => {
                return Err(Error::Config {
                    line: family.line,
                    message: format!("learning.family must be rational or exponential, got `{other}`"),
                })
            }
        }
        .map_err(at(&t, "learning.param"))?;

        let q = profile(&t, "model.q")?;
        let u = profile(&t, "model.u")?;
        if let Some(k) = t.opt_uint("model.k")? {
            for (key, dim) in [("model.q", q.dim()), ("model.u", u.dim())] {
                if dim as u64 != k {
                    return Err(Error::Config {
                        line: t.line(key),
                        message: format!("{key} has {dim} entries but model.k = {k}"),
                    });
                }
            }
        }
        let p = t.float("model.p")?;
        let civ = CivicParams::new(u, p).map_err(at(&t, "model.u"))?;

        let gov = GovernanceTech::new(
            t.float("gov.eta")?,
            t.float("gov.c0")?,
            t.float("gov.tau")?,
            t.float("gov.lambda0")?,
        )
        .map_err(|e| Error::Config {
            line: ["gov.eta", "gov.c0", "gov.tau", "gov.lambda0"]
                .iter()
                .map(|k| t.line(k))
                .min()
                .unwrap_or(0),
            message: e.to_string(),
        })?;

        let v = t.float("model.v")?;
        let base = Economy::new(tech, q, civ, 0.0, v, gov).map_err(at(&t, "model.v"))?;
        let theta = match (t.opt_float("model.theta")?, t.opt_float("model.theta_fraction")?) {
            (Some(theta), None) => theta,
            (None, Some(frac)) => frac * base.theta_bar(),
            (None, None) => return Err(Error::MissingKey("model.theta")),
            (Some(_), Some(_)) => {
                return Err(Error::Config {
                    line: t.line("model.theta_fraction"),
                    message: "set either model.theta or model.theta_fraction, not both".into(),
                })
            }
        };
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::Config {
                line: t.line("model.theta").max(t.line("model.theta_fraction")),
                message: format!("theta must be nonnegative, got {theta}"),
            });
        }
        let econ = base.with_theta(theta);

        let defaults = SweepSpec::default();
        let sweep = SweepSpec {
            b: unit_grid(&t, "sweep.b", false)?.unwrap_or(defaults.b),
            alpha: unit_grid(&t, "sweep.alpha", false)?.unwrap_or(defaults.alpha),
            theta_fraction: unit_grid(&t, "sweep.theta_fraction", true)?
                .unwrap_or(defaults.theta_fraction),
        };

        let d = OracleSpec::default();
        let positive = |key: &'static str, v: Option<u64>, fallback: u64| -> Result<u64> {
            match v {
                Some(0) => Err(Error::Config {
                    line: t.line(key),
                    message: format!("{key} must be positive"),
                }),
                Some(n) => Ok(n),
                None => Ok(fallback),
            }
        };
        let oracle = OracleSpec {
            grid: OracleGrid {
                resolution: positive(
                    "oracle.resolution",
                    t.opt_uint("oracle.resolution")?,
                    d.grid.resolution as u64,
                )? as usize,
                max_atoms: positive(
                    "oracle.max_atoms",
                    t.opt_uint("oracle.max_atoms")?,
                    d.grid.max_atoms as u64,
                )? as usize,
                budget: positive("oracle.budget", t.opt_uint("oracle.budget")?, d.grid.budget as u64)?
                    as u128,
            },
            seed: t.opt_uint("oracle.seed")?.unwrap_or(d.seed),
            samples: positive("oracle.samples", t.opt_uint("oracle.samples")?, d.samples as u64)?
                as usize,
        };

        Ok(Self {
            econ,
            sweep,
            oracle,
        })
    }

    /// Absolute `theta` values of the sweep grid.
    pub fn theta_grid(&self) -> Vec<f64> {
        self.sweep
            .theta_fraction
            .iter()
            .map(|f| f * self.econ.theta_bar())
            .collect()
    }
}

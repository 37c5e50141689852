//! Learning-cost technologies and the objects derived from them: the
//! feasible-scale frontier `H`, the inefficiency index `lambda`, the
//! coordination index `Gamma` and the regularity constants.

use crate::error::{Error, Result};
use crate::knowledge::{fragmentation, simplex_grid};
use crate::numerics::bisect;

/// Slack allowed above one when evaluating `l` on user input.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// Widening of the `[1/l_bar, 1]` bracket used for `H`.
const FRONTIER_BRACKET_PAD: f64 = 1e-9;

/// Parametric family of the learning cost `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LearningFamily {
    /// `l(s) = (1 + c) s / (1 + c s)`.
    Rational { c: f64 },
    /// `l(s) = (1 - exp(-lambda s)) / (1 - exp(-lambda))`.
    Exponential { lambda: f64 },
}

/// A strictly increasing, strictly concave learning cost normalized so that
/// `l(0) = 0` and `l(1) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningTech {
    family: LearningFamily,
}

/// Regularity constants of a learning technology.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningConstants {
    /// `l'(0)`.
    pub ell_bar: f64,
    /// `l'(1)`.
    pub ell_under: f64,
    /// Grid minimum of `(l(s) - s) / (s (1 - s))`, a lower bound on the
    /// concavity index `kappa`.
    pub c_ell: f64,
    /// Lipschitz constant of `Gamma`.
    pub l_gamma: f64,
    /// Coordination cutoff `min(c_ell / L_Gamma, 1 / (2 L_Gamma))`.
    pub theta_bar: f64,
}

impl LearningConstants {
    /// Lipschitz constant of `H` in the l1 norm.
    pub fn frontier_lipschitz(&self) -> f64 {
        self.ell_bar / self.ell_under
    }
}

impl LearningTech {
    pub fn new(family: LearningFamily) -> Result<Self> {
        let (name, value) = match family {
            LearningFamily::Rational { c } => ("rational parameter c", c),
            LearningFamily::Exponential { lambda } => ("exponential parameter lambda", lambda),
        };
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be a positive finite number, got {value}"
            )));
        }
        Ok(Self { family })
    }

    pub fn rational(c: f64) -> Result<Self> {
        Self::new(LearningFamily::Rational { c })
    }

    pub fn exponential(lambda: f64) -> Result<Self> {
        Self::new(LearningFamily::Exponential { lambda })
    }

    pub fn family(&self) -> LearningFamily {
        self.family
    }

    /// Evaluates `l(s)` without a domain check. Exact at `s = 0` and `s = 1`.
    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        if s == 1.0 {
            return 1.0;
        }
        match self.family {
            LearningFamily::Rational { c } => (1.0 + c) * s / (1.0 + c * s),
            LearningFamily::Exponential { lambda } => (-lambda * s).exp_m1() / (-lambda).exp_m1(),
        }
    }

    /// Evaluates `l(s)` for `s` in `[0, 1]` (with a round-off slack of
    /// [`DOMAIN_SLACK`] above one).
    pub fn ell(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0 + DOMAIN_SLACK).contains(&s) {
            return Err(Error::Domain {
                what: "s",
                value: s,
                domain: "[0, 1]",
            });
        }
        Ok(self.eval(s.min(1.0)))
    }

    /// `l'(s)`.
    pub fn derivative(&self, s: f64) -> f64 {
        match self.family {
            LearningFamily::Rational { c } => (1.0 + c) / (1.0 + c * s).powi(2),
            LearningFamily::Exponential { lambda } => {
                lambda * (-lambda * s).exp() / -(-lambda).exp_m1()
            }
        }
    }

    pub fn ell_bar(&self) -> f64 {
        self.derivative(0.0)
    }

    pub fn ell_under(&self) -> f64 {
        self.derivative(1.0)
    }

    /// Solves `l(s) = y` on `[0, 1]` by bisection.
    pub fn ell_inverse(&self, y: f64) -> Result<f64> {
        if !(0.0..=1.0 + DOMAIN_SLACK).contains(&y) {
            return Err(Error::Domain {
                what: "y",
                value: y,
                domain: "[0, 1]",
            });
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if y >= 1.0 {
            return Ok(1.0);
        }
        bisect(|s| self.eval(s) - y, 0.0, 1.0, 0.0, 1e-15)
    }

    /// Maximal feasible scale `H(pi)`: the root of `sum_k l(H pi_k) = 1`.
    ///
    /// Returns exactly one when `pi` has a single positive entry.
    pub fn max_scale(&self, pi: &[f64]) -> f64 {
        if pi.iter().filter(|x| **x > 0.0).count() <= 1 {
            return 1.0;
        }
        let lo = 1.0 / self.ell_bar() - FRONTIER_BRACKET_PAD;
        let hi = 1.0 + FRONTIER_BRACKET_PAD;
        let budget = |h: f64| pi.iter().map(|p| self.eval(h * p)).sum::<f64>() - 1.0;
        bisect(budget, lo, hi, 0.0, 1e-15).unwrap_or_else(|_| {
            // Round-off can leave both ends of the padded bracket on one side
            // only for near-corner directions.
            if budget(hi) < 0.0 {
                hi
            } else {
                lo
            }
        })
    }

    /// Relative inefficiency index `lambda(pi) = 1 / H(pi)`.
    pub fn lambda_index(&self, pi: &[f64]) -> f64 {
        1.0 / self.max_scale(pi)
    }

    /// Coordination index `Gamma(z) = ||z||_1 lambda(z / ||z||_1)`, with
    /// `Gamma(0) = 0`.
    pub fn gamma_index(&self, z: &[f64]) -> f64 {
        let mass: f64 = z.iter().sum();
        if mass <= 0.0 {
            return 0.0;
        }
        let dir: Vec<f64> = z.iter().map(|v| v / mass).collect();
        mass * self.lambda_index(&dir)
    }

    /// Curvature ratio `(l(s) - s) / (s (1 - s))` with its endpoint limits.
    pub fn phi(&self, s: f64) -> f64 {
        if s <= 0.0 {
            self.ell_bar() - 1.0
        } else if s >= 1.0 {
            1.0 - self.ell_under()
        } else {
            (self.eval(s) - s) / (s * (1.0 - s))
        }
    }

    /// Assembles the regularity constants, minimizing `phi` on a uniform grid
    /// of `grid_size` cells plus both endpoints.
    pub fn constants(&self, grid_size: usize) -> Result<LearningConstants> {
        if grid_size < 1000 {
            return Err(Error::InvalidParameter(format!(
                "grid size for the concavity bound must be at least 1000, got {grid_size}"
            )));
        }
        let c_ell = (0..=grid_size)
            .map(|i| self.phi(i as f64 / grid_size as f64))
            .fold(f64::INFINITY, f64::min);
        if !(c_ell > 0.0) {
            return Err(Error::NotStrictlyConcave { c_ell });
        }
        let ell_bar = self.ell_bar();
        let ell_under = self.ell_under();
        let l_gamma = ell_bar + 2.0 * ell_bar.powi(3) / ell_under;
        Ok(LearningConstants {
            ell_bar,
            ell_under,
            c_ell,
            l_gamma,
            theta_bar: (c_ell / l_gamma).min(0.5 / l_gamma),
        })
    }

    /// Grid estimate of the concavity index `inf (lambda(pi) - 1) / D(pi)`
    /// over non-corner points of the `K`-simplex at the given resolution.
    ///
    /// This is an upper estimate of the infimum and is reported alongside
    /// `c_ell`, never in its place.
    pub fn kappa_estimate(&self, k: usize, resolution: usize) -> f64 {
        simplex_grid(k, resolution)
            .iter()
            .filter(|pi| !pi.is_corner())
            .map(|pi| (self.lambda_index(pi) - 1.0) / fragmentation(pi))
            .fold(f64::INFINITY, f64::min)
    }
}

impl std::fmt::Display for LearningTech {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.family {
            LearningFamily::Rational { c } => write!(f, "rational(c={c})"),
            LearningFamily::Exponential { lambda } => write!(f, "exponential(lambda={lambda})"),
        }
    }
}

//! Governance technology, the governance first-order condition, the
//! closed-form political equilibrium and the vote-share best-response game
//! used to re-derive it.

use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::knowledge::system_knowledge;
use crate::numerics::{bisect, central_difference, golden_section_max};
use crate::production::{output_of, Allocation};

const NEWTON_MAX_ITER: usize = 200;

/// Second derivatives entering the implicit-function step:
/// `d2 log G / de2`, `d2 log G / de dY` and `c''(e)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curvature {
    pub d2log_dee: f64,
    pub d2log_dey: f64,
    pub cost_second: f64,
}

/// Effective-resource map `G(e, Y)` and governance cost `c(e)`.
///
/// Implementors must keep `log G` strictly concave in `e` with Inada limits
/// and `c` strictly convex with `c'(0) = 0`.
pub trait Governance {
    fn resources(&self, e: f64, y: f64) -> f64;
    fn dlog_de(&self, e: f64, y: f64) -> f64;
    fn dlog_dy(&self, e: f64, y: f64) -> f64;
    fn cost(&self, e: f64) -> f64;
    fn marginal_cost(&self, e: f64) -> f64;

    /// Analytic second derivatives, if available. Finite differences are used
    /// otherwise.
    fn curvature(&self, _e: f64, _y: f64) -> Option<Curvature> {
        None
    }

    /// Closed-form maximizer of `B log G(e, Y) - 4 Lambda0 c(e)`, if known.
    fn closed_form_effort(&self, _y: f64, _b: f64, _lambda0: f64) -> Option<f64> {
        None
    }

    /// An effort level whose cost exceeds any attainable vote gain.
    fn effort_cap(&self) -> f64 {
        let mut e = 1.0;
        while self.cost(e) <= 1.0 && e < 1e12 {
            e *= 2.0;
        }
        e
    }
}

/// Shipped governance pair: `G(e, Y) = tau Y e^eta`, `c(e) = c0 e^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GovernanceTech {
    pub eta: f64,
    pub c0: f64,
    pub tau: f64,
    pub lambda0: f64,
}

impl GovernanceTech {
    pub fn new(eta: f64, c0: f64, tau: f64, lambda0: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "governance elasticity eta must lie in (0, 1), got {eta}"
            )));
        }
        if !(c0.is_finite() && c0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "governance cost level c0 must be positive, got {c0}"
            )));
        }
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tax rate tau must lie in (0, 1) so that public resources are positive, got {tau}"
            )));
        }
        if !(lambda0.is_finite() && lambda0 >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "noise scale lambda0 must be at least 1, got {lambda0}"
            )));
        }
        Ok(Self {
            eta,
            c0,
            tau,
            lambda0,
        })
    }
}

impl Governance for GovernanceTech {
    fn resources(&self, e: f64, y: f64) -> f64 {
        self.tau * y * e.powf(self.eta)
    }
    fn dlog_de(&self, e: f64, _y: f64) -> f64 {
        self.eta / e
    }
    fn dlog_dy(&self, _e: f64, y: f64) -> f64 {
        1.0 / y
    }
    fn cost(&self, e: f64) -> f64 {
        0.5 * self.c0 * e * e
    }
    fn marginal_cost(&self, e: f64) -> f64 {
        self.c0 * e
    }
    fn curvature(&self, e: f64, _y: f64) -> Option<Curvature> {
        Some(Curvature {
            d2log_dee: -self.eta / (e * e),
            d2log_dey: 0.0,
            cost_second: self.c0,
        })
    }
    fn closed_form_effort(&self, _y: f64, b: f64, lambda0: f64) -> Option<f64> {
        Some((self.eta * b / (4.0 * lambda0 * self.c0)).sqrt())
    }
    fn effort_cap(&self) -> f64 {
        (2.0 / self.c0).sqrt()
    }
}

fn curvature_of<G: Governance + ?Sized>(gov: &G, e: f64, y: f64) -> Curvature {
    gov.curvature(e, y).unwrap_or_else(|| {
        let he = 1e-5 * e.max(1e-3);
        let hy = 1e-5 * y.max(1e-3);
        Curvature {
            d2log_dee: central_difference(|t| gov.dlog_de(t, y), e, he),
            d2log_dey: central_difference(|t| gov.dlog_de(e, t), y, hy),
            cost_second: central_difference(|t| gov.marginal_cost(t), e, he),
        }
    })
}

/// Maximizer of `B log G(e, Y) - 4 Lambda0 c(e)` by safeguarded Newton on the
/// first-order condition.
pub fn governance_star<G: Governance + ?Sized>(
    gov: &G,
    y: f64,
    b: f64,
    lambda0: f64,
) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain {
            what: "Y",
            value: y,
            domain: "(0, inf)",
        });
    }
    if !(b > 0.0) {
        return Err(Error::Domain {
            what: "B",
            value: b,
            domain: "(0, inf)",
        });
    }
    let foc = |e: f64| b * gov.dlog_de(e, y) - 4.0 * lambda0 * gov.marginal_cost(e);
    let mut lo = 0.0;
    let mut hi = 1.0;
    while foc(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e15 {
            return Err(Error::NonConvergence {
                routine: "governance bracket search",
                iterations: 50,
                residual: foc(hi),
            });
        }
    }
    let mut e = 0.5 * (lo + hi);
    let mut residual = f64::INFINITY;
    for iter in 0..NEWTON_MAX_ITER {
        let f = foc(e);
        residual = f.abs();
        if f > 0.0 {
            lo = e;
        } else {
            hi = e;
        }
        let scale = (b * gov.dlog_de(e, y)).abs().max(1.0);
        if residual <= 1e-14 * scale || hi - lo <= 4.0 * f64::EPSILON * hi {
            return cross_check(gov, y, b, lambda0, e);
        }
        let k = curvature_of(gov, e, y);
        let slope = b * k.d2log_dee - 4.0 * lambda0 * k.cost_second;
        let mut next = e - f / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        log::trace!("governance newton step {iter}: e = {next}, residual {residual:e}");
        e = next;
    }
    Err(Error::NonConvergence {
        routine: "governance first-order condition",
        iterations: NEWTON_MAX_ITER,
        residual,
    })
}

fn cross_check<G: Governance + ?Sized>(
    gov: &G,
    y: f64,
    b: f64,
    lambda0: f64,
    e: f64,
) -> Result<f64> {
    if let Some(closed) = gov.closed_form_effort(y, b, lambda0) {
        let gap = (closed - e).abs();
        if gap > 1e-9 * closed.max(1.0) {
            return Err(Error::NonConvergence {
                routine: "governance Newton solve (disagrees with closed form)",
                iterations: NEWTON_MAX_ITER,
                residual: gap,
            });
        }
    }
    Ok(e)
}

/// Effective resources and their sensitivities at `e*(Y, B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceSensitivity {
    pub e: f64,
    pub r: f64,
    pub e_b: f64,
    pub e_y: f64,
    pub r_b: f64,
    pub r_y: f64,
}

impl ResourceSensitivity {
    pub fn r_b_over_r(&self) -> f64 {
        self.r_b / self.r
    }
    pub fn r_y_over_r(&self) -> f64 {
        self.r_y / self.r
    }
}

/// `R(Y, B) = G(e*(Y, B), Y)` with `R_B` and `R_Y` from the implicit-function
/// theorem applied to the governance first-order condition.
pub fn resource_sensitivity<G: Governance + ?Sized>(
    gov: &G,
    y: f64,
    b: f64,
    lambda0: f64,
) -> Result<ResourceSensitivity> {
    let e = governance_star(gov, y, b, lambda0)?;
    let r = gov.resources(e, y);
    let k = curvature_of(gov, e, y);
    let dlog_de = gov.dlog_de(e, y);
    let f_e = b * k.d2log_dee - 4.0 * lambda0 * k.cost_second;
    let e_b = -dlog_de / f_e;
    let e_y = -(b * k.d2log_dey) / f_e;
    Ok(ResourceSensitivity {
        e,
        r,
        e_b,
        e_y,
        r_b: r * dlog_de * e_b,
        r_y: r * (dlog_de * e_y + gov.dlog_dy(e, y)),
    })
}

/// Average system knowledge of specialists and of integrators.
pub fn group_knowledge(alloc: &Allocation, econ: &Economy) -> (f64, f64) {
    let tech = &econ.tech;
    let shares = alloc.design.population_shares(tech);
    let b_s = alloc
        .design
        .atoms()
        .iter()
        .zip(&shares)
        .map(|(a, mu)| {
            let sigma = a.scale(tech);
            let s: Vec<f64> = a.direction.iter().map(|p| sigma * p).collect();
            mu * system_knowledge(&s, &econ.civ)
        })
        .sum();
    let b_m = system_knowledge(&alloc.integrator_profile, &econ.civ);
    (b_s, b_m)
}

/// The symmetric political equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoliticalOutcome {
    pub e_pol: f64,
    pub z_pol: f64,
    pub t_s: f64,
    pub t_m: f64,
    pub r: f64,
    pub b_s: f64,
    pub b_m: f64,
    pub b_soc: f64,
    pub m: f64,
    pub y: f64,
}

/// Closed-form equilibrium from output, integrator mass and group knowledge.
pub fn equilibrium_from_parts<G: Governance + ?Sized>(
    gov: &G,
    lambda0: f64,
    y: f64,
    m: f64,
    b_s: f64,
    b_m: f64,
) -> Result<PoliticalOutcome> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::DegenerateGroups { m });
    }
    if !(b_s > 0.0 && b_m > 0.0) {
        return Err(Error::Hypothesis(format!(
            "group system knowledge must be positive (B_S = {b_s}, B_M = {b_m})"
        )));
    }
    let b_soc = (1.0 - m) * b_s + m * b_m;
    let e_pol = governance_star(gov, y, b_soc, lambda0)?;
    let r = gov.resources(e_pol, y);
    Ok(PoliticalOutcome {
        e_pol,
        z_pol: m * b_m / b_soc,
        t_s: b_s / b_soc * r,
        t_m: b_m / b_soc * r,
        r,
        b_s,
        b_m,
        b_soc,
        m,
        y,
    })
}

/// Political equilibrium induced by a feasible allocation.
pub fn political_equilibrium(econ: &Economy, alloc: &Allocation) -> Result<PoliticalOutcome> {
    if !(alloc.m > 0.0 && alloc.m < 1.0) {
        return Err(Error::DegenerateGroups { m: alloc.m });
    }
    let y = output_of(alloc, econ)?;
    let (b_s, b_m) = group_knowledge(alloc, econ);
    equilibrium_from_parts(&econ.gov, econ.gov.lambda0, y, alloc.m, b_s, b_m)
}

/// Probability that a group member votes for the candidate offering `t`
/// against an opponent offering `t_bar`.
pub fn vote_share(t: f64, t_bar: f64, beta: f64) -> f64 {
    if t == 0.0 {
        return if t_bar > 0.0 { 0.0 } else { 0.5 };
    }
    let a = t.powf(beta);
    a / (a + t_bar.powf(beta))
}

/// `d vote_share / dt`.
pub fn vote_share_slope(t: f64, t_bar: f64, beta: f64) -> f64 {
    let a = t.powf(beta);
    let c = t_bar.powf(beta);
    beta * c * t.powf(beta - 1.0) / ((a + c) * (a + c))
}

/// Equilibrium residuals: the two service conditions
/// `Psi'_g(t_g; t_g) - B_soc / (4 Lambda0 R)` and the governance condition
/// `B_soc d log G / de - 4 Lambda0 c'(e)`.
pub fn kkt_residuals<G: Governance + ?Sized>(
    gov: &G,
    lambda0: f64,
    out: &PoliticalOutcome,
) -> [f64; 3] {
    let target = out.b_soc / (4.0 * lambda0 * out.r);
    [
        vote_share_slope(out.t_s, out.t_s, out.b_s / lambda0) - target,
        vote_share_slope(out.t_m, out.t_m, out.b_m / lambda0) - target,
        out.b_soc * gov.dlog_de(out.e_pol, out.y) - 4.0 * lambda0 * gov.marginal_cost(out.e_pol),
    ]
}

/// A candidate platform: governance effort and integrator spending share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Platform {
    pub e: f64,
    pub z: f64,
}

/// The two-candidate vote-share game at a fixed allocation.
#[derive(Debug, Clone, Copy)]
pub struct ServiceGame<'a, G: Governance + ?Sized> {
    pub gov: &'a G,
    pub y: f64,
    pub m: f64,
    pub beta_s: f64,
    pub beta_m: f64,
}

impl<'a, G: Governance + ?Sized> ServiceGame<'a, G> {
    pub fn new(gov: &'a G, lambda0: f64, y: f64, m: f64, b_s: f64, b_m: f64) -> Result<Self> {
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::DegenerateGroups { m });
        }
        Ok(Self {
            gov,
            y,
            m,
            beta_s: b_s / lambda0,
            beta_m: b_m / lambda0,
        })
    }

    pub fn from_outcome(gov: &'a G, lambda0: f64, out: &PoliticalOutcome) -> Result<Self> {
        Self::new(gov, lambda0, out.y, out.m, out.b_s, out.b_m)
    }

    /// Per-capita services `(t_S, t_M)` delivered by a platform.
    pub fn services(&self, p: Platform) -> (f64, f64) {
        let r = self.gov.resources(p.e, self.y);
        ((1.0 - p.z) * r / (1.0 - self.m), p.z * r / self.m)
    }

    /// Expected vote share minus governance cost.
    pub fn payoff(&self, p: Platform, opponent: Platform) -> f64 {
        let (t_s, t_m) = self.services(p);
        let (u_s, u_m) = self.services(opponent);
        (1.0 - self.m) * vote_share(t_s, u_s, self.beta_s)
            + self.m * vote_share(t_m, u_m, self.beta_m)
            - self.gov.cost(p.e)
    }

    /// Optimal split of resources `r` against opponent services: the
    /// integrator share `z` equating the two marginal vote shares.
    fn inner_split(&self, r: f64, u_s: f64, u_m: f64) -> Result<f64> {
        let m = self.m;
        let gap = |z: f64| {
            let t_s = (1.0 - z) * r / (1.0 - m);
            let t_m = z * r / m;
            vote_share_slope(t_s, u_s, self.beta_s) - vote_share_slope(t_m, u_m, self.beta_m)
        };
        bisect(gap, 0.0, 1.0, 1e-15, 0.0)
    }

    fn value_at(&self, e: f64, u_s: f64, u_m: f64) -> (f64, f64) {
        let r = self.gov.resources(e, self.y);
        if !(r > 0.0) {
            return (-self.gov.cost(e), 0.5);
        }
        let z = self.inner_split(r, u_s, u_m).unwrap_or(0.5);
        let t_s = (1.0 - z) * r / (1.0 - self.m);
        let t_m = z * r / self.m;
        let v = (1.0 - self.m) * vote_share(t_s, u_s, self.beta_s)
            + self.m * vote_share(t_m, u_m, self.beta_m)
            - self.gov.cost(e);
        (v, z)
    }

    /// Envelope derivative of the best-response value in `e`.
    fn value_slope(&self, e: f64, u_s: f64, u_m: f64) -> f64 {
        let r = self.gov.resources(e, self.y);
        let (_, z) = self.value_at(e, u_s, u_m);
        let t_s = (1.0 - z) * r / (1.0 - self.m);
        let mu = vote_share_slope(t_s, u_s, self.beta_s);
        mu * r * self.gov.dlog_de(e, self.y) - self.gov.marginal_cost(e)
    }

    /// Exact best response: golden-section search over `e`, with the resource
    /// split solved by bisection at each trial `e`, then polished on the
    /// envelope condition.
    pub fn best_response(&self, opponent: Platform) -> Result<Platform> {
        let (u_s, u_m) = self.services(opponent);
        if !(u_s > 0.0 && u_m > 0.0) {
            return Err(Error::NonPositiveService { t_s: u_s, t_m: u_m });
        }
        let cap = self.gov.effort_cap();
        let (mut e, _) = golden_section_max(|e| self.value_at(e, u_s, u_m).0, 0.0, cap, 1e-10);
        let width = 1e-6 * e.max(1.0);
        let (lo, hi) = ((e - width).max(f64::MIN_POSITIVE), (e + width).min(cap));
        if let Ok(polished) = bisect(|t| self.value_slope(t, u_s, u_m), lo, hi, 0.0, 0.0) {
            e = polished;
        }
        let (_, z) = self.value_at(e, u_s, u_m);
        Ok(Platform { e, z })
    }

    /// Iterates `p <- (1 - damping) p + damping BR(p)` until successive
    /// platforms differ by at most `tol` in both coordinates.
    pub fn iterate(
        &self,
        start: Platform,
        damping: f64,
        tol: f64,
        max_iter: usize,
    ) -> Result<(Platform, usize)> {
        let mut p = start;
        let mut step = f64::INFINITY;
        for it in 1..=max_iter {
            let br = self.best_response(p)?;
            let next = Platform {
                e: (1.0 - damping) * p.e + damping * br.e,
                z: (1.0 - damping) * p.z + damping * br.z,
            };
            step = (next.e - p.e).abs().max((next.z - p.z).abs());
            p = next;
            if step <= tol {
                return Ok((p, it));
            }
        }
        Err(Error::NonConvergence {
            routine: "best-response iteration",
            iterations: max_iter,
            residual: step,
        })
    }
}

/// Best response to `opponent` at allocation `alloc`.
pub fn best_response(econ: &Economy, alloc: &Allocation, opponent: Platform) -> Result<Platform> {
    let y = output_of(alloc, econ)?;
    let (b_s, b_m) = group_knowledge(alloc, econ);
    ServiceGame::new(&econ.gov, econ.gov.lambda0, y, alloc.m, b_s, b_m)?.best_response(opponent)
}

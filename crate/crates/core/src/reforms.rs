//! Policy families: broadening routine specialists, shifting the civic
//! profile toward interfaces, and varying integration efficiency.

use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::knowledge::{dot, overlap, SimplexVector};
use crate::numerics::{bisect, central_difference};
use crate::politics::{equilibrium_from_parts, group_knowledge};
use crate::production::{
    minimal_allocation, productive_optimum, Allocation, DesignAtom, ProductiveOptimum,
    SpecialistDesign,
};
use crate::welfare::{decompose_along, total_welfare, welfare_of, Decomposition, WelfareReport, FAMILY_STEP};

/// Where a marginal broadening reform raises aggregate system knowledge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BroadeningCutoff {
    /// Positive exactly for `theta` below the cutoff.
    PositiveBelow(f64),
    /// Positive exactly for `theta` above the cutoff (integrators know less
    /// than the average corner specialist).
    PositiveAbove(f64),
    AlwaysPositive,
    NeverPositive,
}

impl BroadeningCutoff {
    pub fn is_positive_at(&self, theta: f64) -> bool {
        match *self {
            BroadeningCutoff::PositiveBelow(c) => theta < c,
            BroadeningCutoff::PositiveAbove(c) => theta > c,
            BroadeningCutoff::AlwaysPositive => true,
            BroadeningCutoff::NeverPositive => false,
        }
    }

    pub fn threshold(&self) -> Option<f64> {
        match *self {
            BroadeningCutoff::PositiveBelow(c) | BroadeningCutoff::PositiveAbove(c) => Some(c),
            _ => None,
        }
    }
}

/// The family `A(b)`: a share `b` of specialists hold the broad profile
/// `H(q) q`, the rest are corner experts in proportions `q`.
#[derive(Debug, Clone)]
pub struct BroadeningFamily {
    pub econ: Economy,
    pub optimum: ProductiveOptimum,
    /// `H(q)`.
    pub h_q: f64,
    /// System knowledge of a broadened specialist, `H(q)^p C(q, u)`.
    pub broad_knowledge: f64,
    /// Average corner-specialist knowledge `q . u`.
    pub corner_knowledge: f64,
    /// Integrator knowledge `H(h*)^p C(h*, u)`.
    pub b_m: f64,
}

impl BroadeningFamily {
    pub fn new(econ: &Economy) -> Result<Self> {
        let (optimum, _) = productive_optimum(econ)?;
        let q = &econ.q;
        let civ = &econ.civ;
        let h_q = econ.tech.max_scale(q);
        Ok(Self {
            broad_knowledge: h_q.powf(civ.p) * overlap(q, &civ.u),
            corner_knowledge: dot(q, &civ.u),
            b_m: optimum.h_hstar.powf(civ.p) * overlap(&optimum.h_star, &civ.u),
            h_q,
            optimum,
            econ: econ.clone(),
        })
    }

    /// The allocation `A(b)` with its minimal integrator layer.
    pub fn allocation(&self, b: f64) -> Result<Allocation> {
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::Domain {
                what: "b",
                value: b,
                domain: "[0, 1]",
            });
        }
        let q = &self.econ.q;
        let k = q.dim();
        let z = (1.0 - b) + b * self.h_q;
        let mut atoms: Vec<DesignAtom> = q
            .iter()
            .enumerate()
            .map(|(i, qk)| DesignAtom::new(SimplexVector::corner(i, k), (1.0 - b) * qk / z))
            .collect();
        atoms.push(DesignAtom::new(q.clone(), b * self.h_q / z));
        let mut alloc = minimal_allocation(SpecialistDesign::new(atoms)?, &self.econ);
        alloc.b = b;
        Ok(alloc)
    }

    /// `theta (1 - b) D / (H* + theta (1 - b) D)`.
    pub fn m(&self, b: f64) -> f64 {
        let t = self.econ.theta * (1.0 - b) * self.optimum.d_q;
        t / (self.optimum.h_hstar + t)
    }

    /// Closed-form aggregate system knowledge along the family.
    pub fn b_soc(&self, b: f64) -> f64 {
        let m = self.m(b);
        (1.0 - m) * ((1.0 - b) * self.corner_knowledge + b * self.broad_knowledge) + m * self.b_m
    }

    /// Closed-form output `V (1 - m(b)) ((1 - b) + b H(q))`.
    pub fn output(&self, b: f64) -> f64 {
        self.econ.v * (1.0 - self.m(b)) * ((1.0 - b) + b * self.h_q)
    }

    pub fn welfare(&self, b: f64) -> Result<WelfareReport> {
        total_welfare(&self.econ, &self.allocation(b)?)
    }

    /// `dB_soc/db` at `b = 0`: `(1 - m) (H(q)^p C(q, u) - B_soc(0))`.
    pub fn derivative_at_zero(&self) -> f64 {
        (1.0 - self.m(0.0)) * (self.broad_knowledge - self.b_soc(0.0))
    }

    /// `dY/db` at `b = 0`: `V (1 - m) (m - (1 - H(q)))`.
    pub fn output_slope_at_zero(&self) -> f64 {
        let m = self.m(0.0);
        self.econ.v * (1.0 - m) * (m - (1.0 - self.h_q))
    }

    /// Classifies the sign of the derivative as a function of `theta`.
    pub fn cutoff(&self) -> BroadeningCutoff {
        let (a, qu, bm) = (self.broad_knowledge, self.corner_knowledge, self.b_m);
        let theta_at = || self.optimum.h_hstar * (a - qu) / (self.optimum.d_q * (bm - a));
        if bm > qu {
            if a <= qu {
                BroadeningCutoff::NeverPositive
            } else if a >= bm {
                BroadeningCutoff::AlwaysPositive
            } else {
                BroadeningCutoff::PositiveBelow(theta_at())
            }
        } else if bm < qu {
            if a > qu {
                BroadeningCutoff::AlwaysPositive
            } else if a <= bm {
                BroadeningCutoff::NeverPositive
            } else {
                BroadeningCutoff::PositiveAbove(theta_at())
            }
        } else if a > qu {
            BroadeningCutoff::AlwaysPositive
        } else {
            BroadeningCutoff::NeverPositive
        }
    }

    /// Breadth-penalty bound `log(C(q, u) / (q . u)) / (-log H(q))` below
    /// which a broadened specialist out-knows the average corner specialist.
    pub fn p_bar(&self) -> f64 {
        (overlap(&self.econ.q, &self.econ.civ.u) / self.corner_knowledge).ln() / -self.h_q.ln()
    }
}

/// Locates the sign change of `theta -> dB_soc/db|_0` by bisection on a
/// finite-difference derivative, searching `[lo, hi]`.
pub fn bisect_broadening_flip(econ: &Economy, lo: f64, hi: f64) -> Result<f64> {
    let slope = |theta: f64| {
        let fam = BroadeningFamily::new(&econ.with_theta(theta))
            .expect("theta inside the search range stays below the cutoff");
        crate::numerics::forward_difference(|b| fam.b_soc(b), 0.0, FAMILY_STEP)
    };
    bisect(slope, lo, hi, 1e-13, 0.0)
}

/// Outcome of the excess-specialization analysis at `b = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcessReport {
    pub p_bar: f64,
    /// `H(q)^p C(q, u) > q . u`.
    pub small_p_holds: bool,
    pub d_b_soc: f64,
    pub cutoff: BroadeningCutoff,
    pub decomposition: Decomposition,
    pub w_prime_positive: bool,
    /// `R_B / R` that would make `W'(0)` vanish, when `dB_soc/db > 0`.
    pub ratio_needed: Option<f64>,
    pub ratio_current: f64,
    /// Governance elasticity giving `ratio_needed` for the shipped form
    /// (`R_B / R = eta / (2 B_soc)`).
    pub eta_needed: Option<f64>,
    /// `(b, W(b))` over the evaluated grid, skipping degenerate points.
    pub curve: Vec<(f64, f64)>,
    pub argmax_b: Option<f64>,
}

pub fn excess_specialization(econ: &Economy, b_grid: &[f64]) -> Result<ExcessReport> {
    let fam = BroadeningFamily::new(econ)?;
    let decomposition = decompose_along(
        &econ.gov,
        econ.gov.lambda0,
        econ.gov.tau,
        |b| fam.welfare(b),
        0.0,
        FAMILY_STEP,
        (0.0, 1.0),
    )?;
    let d_b_soc = fam.derivative_at_zero();
    let at0 = fam.welfare(0.0)?;
    let ratio_current = decomposition.governance / decomposition.d_b_soc;
    let others = decomposition.productive + decomposition.targeting;
    let ratio_needed = (d_b_soc > 0.0).then(|| -others / decomposition.d_b_soc);
    let eta_needed = ratio_needed.map(|r| 2.0 * at0.outcome.b_soc * r);
    let curve: Vec<(f64, f64)> = b_grid
        .iter()
        .filter_map(|b| fam.welfare(*b).ok().map(|w| (*b, w.total)))
        .collect();
    let argmax_b = curve
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(b, _)| *b);
    Ok(ExcessReport {
        p_bar: fam.p_bar(),
        small_p_holds: fam.broad_knowledge > fam.corner_knowledge,
        d_b_soc,
        cutoff: fam.cutoff(),
        w_prime_positive: decomposition.dw > 0.0,
        decomposition,
        ratio_needed,
        ratio_current,
        eta_needed,
        curve,
        argmax_b,
    })
}

/// The civic-profile family `u_alpha = (1 - alpha) q + alpha h*(q)` at the
/// productive allocation.
#[derive(Debug, Clone)]
pub struct InterfaceFamily {
    pub econ: Economy,
    pub optimum: ProductiveOptimum,
    pub allocation: Allocation,
}

impl InterfaceFamily {
    pub fn new(econ: &Economy) -> Result<Self> {
        let (optimum, allocation) = productive_optimum(econ)?;
        Ok(Self {
            econ: econ.clone(),
            optimum,
            allocation,
        })
    }

    pub fn profile(&self, alpha: f64) -> Result<SimplexVector> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain {
                what: "alpha",
                value: alpha,
                domain: "[0, 1]",
            });
        }
        self.econ.q.mix(&self.optimum.h_star, alpha)
    }

    pub fn economy(&self, alpha: f64) -> Result<Economy> {
        self.econ.with_civic_profile(self.profile(alpha)?)
    }

    /// `(B_S(alpha), B_M(alpha))`, computed from the allocation.
    pub fn group_knowledge(&self, alpha: f64) -> Result<(f64, f64)> {
        Ok(group_knowledge(&self.allocation, &self.economy(alpha)?))
    }

    pub fn welfare(&self, alpha: f64) -> Result<WelfareReport> {
        let (b_s, b_m) = self.group_knowledge(alpha)?;
        let out = equilibrium_from_parts(
            &self.econ.gov,
            self.econ.gov.lambda0,
            self.optimum.y_star,
            self.optimum.m_star,
            b_s,
            b_m,
        )?;
        welfare_of(out, self.econ.gov.tau)
    }

    /// `[(sum q^2)^2 - sum q^3] / D(q)`.
    pub fn b_s_slope(&self) -> f64 {
        let q = &self.econ.q;
        let s2: f64 = q.iter().map(|v| v * v).sum();
        let s3: f64 = q.iter().map(|v| v * v * v).sum();
        (s2 * s2 - s3) / self.optimum.d_q
    }

    /// `H(h*)^p [1 - C(h*, q)]`.
    pub fn b_m_slope(&self) -> f64 {
        self.optimum.h_hstar.powf(self.econ.civ.p)
            * (1.0 - overlap(&self.optimum.h_star, &self.econ.q))
    }

    /// `(1 - m) B_S' + m B_M'`, constant in `alpha`.
    pub fn b_soc_slope(&self) -> f64 {
        let m = self.optimum.m_star;
        (1.0 - m) * self.b_s_slope() + m * self.b_m_slope()
    }

    /// Closed-form `dD/dalpha`.
    pub fn dispersion_slope(&self, alpha: f64) -> Result<f64> {
        let (b_s, b_m) = self.group_knowledge(alpha)?;
        let m = self.optimum.m_star;
        let b_soc = (1.0 - m) * b_s + m * b_m;
        Ok(m * (1.0 - m) * (b_m - b_s) / b_soc
            * (self.b_m_slope() / b_m - self.b_s_slope() / b_s))
    }

    /// Welfare decomposition in `alpha`.
    pub fn decompose(&self, alpha: f64) -> Result<Decomposition> {
        decompose_along(
            &self.econ.gov,
            self.econ.gov.lambda0,
            self.econ.gov.tau,
            |a| self.welfare(a),
            alpha,
            FAMILY_STEP,
            (0.0, 1.0),
        )
    }
}

/// One grid point of an `alpha` sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceRow {
    pub alpha: f64,
    pub b_s: f64,
    pub b_m: f64,
    pub b_soc: f64,
    pub w: f64,
    pub d_b_soc: f64,
    pub d_w: f64,
}

pub fn interface_statics(econ: &Economy, alphas: &[f64]) -> Result<Vec<InterfaceRow>> {
    let fam = InterfaceFamily::new(econ)?;
    alphas
        .iter()
        .map(|&alpha| {
            let w = fam.welfare(alpha)?;
            let d = fam.decompose(alpha)?;
            Ok(InterfaceRow {
                alpha,
                b_s: w.outcome.b_s,
                b_m: w.outcome.b_m,
                b_soc: w.outcome.b_soc,
                w: w.total,
                d_b_soc: d.d_b_soc,
                d_w: d.dw,
            })
        })
        .collect()
}

/// True when both `dB_soc/dalpha` and `dW/dalpha` are negative on the grid.
pub fn interface_harms(econ: &Economy, alphas: &[f64]) -> Result<bool> {
    Ok(interface_statics(econ, alphas)?
        .iter()
        .all(|r| r.d_b_soc < 0.0 && r.d_w < 0.0))
}

/// Largest `theta` (to `rel_tol` relative precision) below which a rise in
/// `alpha` lowers both aggregate knowledge and welfare on the grid. `None`
/// when even the smallest probe fails.
pub fn interface_threshold(econ: &Economy, alphas: &[f64], rel_tol: f64) -> Result<Option<f64>> {
    let top = econ.theta_bar() * (1.0 - 1e-9);
    let probe = |t: f64| interface_harms(&econ.with_theta(t), alphas);
    if probe(top)? {
        return Ok(Some(top));
    }
    let mut lo = top * 1e-6;
    if !probe(lo)? {
        return Ok(None);
    }
    let mut hi = top;
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if probe(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

/// Productive-optimum curves at one `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaRow {
    pub theta: f64,
    pub m: f64,
    pub y: f64,
    pub b_soc: f64,
    pub w: f64,
    /// Closed-form `dm/dtheta = D H* / (H* + theta D)^2`.
    pub dm_closed: f64,
    pub dm_fd: f64,
}

/// Default grid `theta_bar * i / (n + 1)`, `i = 1..=n`.
pub fn default_theta_grid(econ: &Economy, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| econ.theta_bar() * i as f64 / (n + 1) as f64)
        .collect()
}

pub fn theta_statics(econ: &Economy, thetas: &[f64]) -> Result<Vec<ThetaRow>> {
    thetas
        .iter()
        .map(|&theta| {
            let e = econ.with_theta(theta);
            let (opt, alloc) = productive_optimum(&e)?;
            let w = total_welfare(&e, &alloc)?;
            let denom = opt.h_hstar + theta * opt.d_q;
            let m_of = |t: f64| {
                productive_optimum(&econ.with_theta(t))
                    .map(|(o, _)| o.m_star)
                    .unwrap_or(f64::NAN)
            };
            let h = 1e-6 * theta.max(1e-6);
            Ok(ThetaRow {
                theta,
                m: opt.m_star,
                y: opt.y_star,
                b_soc: w.outcome.b_soc,
                w: w.total,
                dm_closed: opt.d_q * opt.h_hstar / (denom * denom),
                dm_fd: central_difference(m_of, theta, h),
            })
        })
        .collect()
}

/// Smallest step-to-step changes `(min dm, min -dY, min dB_soc)` along a
/// theta sweep; all positive means strict monotonicity.
pub fn monotonicity_margins(rows: &[ThetaRow]) -> (f64, f64, f64) {
    rows.windows(2).fold(
        (f64::INFINITY, f64::INFINITY, f64::INFINITY),
        |(a, b, c), w| {
            (
                a.min(w[1].m - w[0].m),
                b.min(w[0].y - w[1].y),
                c.min(w[1].b_soc - w[0].b_soc),
            )
        },
    )
}

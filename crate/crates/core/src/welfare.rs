//! Service welfare, the dispersion penalty, total welfare, its three-channel
//! decomposition along a family of allocations, and the civic benchmark.

use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::knowledge::{overlap, simplex_grid, CivicParams};
use crate::learning::LearningTech;
use crate::numerics::{derivative_in, Stencil};
use crate::politics::{political_equilibrium, resource_sensitivity, Governance, PoliticalOutcome};
use crate::production::Allocation;

/// Default finite-difference step along allocation families.
pub const FAMILY_STEP: f64 = 1e-5;

/// Residual above which a decomposition is flagged.
pub const DECOMPOSITION_TOL: f64 = 1e-4;

/// Welfare at one allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelfareReport {
    pub y: f64,
    pub service_welfare: f64,
    pub dispersion: f64,
    pub total: f64,
    pub outcome: PoliticalOutcome,
}

/// `log B_soc - [(1 - m) log B_S + m log B_M]`, nonnegative by concavity.
pub fn dispersion(b_s: f64, b_m: f64, m: f64) -> f64 {
    let x = (b_m - b_s) / b_s;
    let d = (m * x).ln_1p() - m * x.ln_1p();
    // Rounding can leave a tiny negative residue near x = 0.
    d.max(0.0)
}

/// `(1 - m) log t_S + m log t_M`.
pub fn service_welfare(out: &PoliticalOutcome) -> Result<f64> {
    if !(out.t_s > 0.0 && out.t_m > 0.0) {
        return Err(Error::NonPositiveService {
            t_s: out.t_s,
            t_m: out.t_m,
        });
    }
    Ok((1.0 - out.m) * out.t_s.ln() + out.m * out.t_m.ln())
}

/// Assembles a report from an equilibrium and the tax rate.
pub fn welfare_of(out: PoliticalOutcome, tau: f64) -> Result<WelfareReport> {
    let service = service_welfare(&out)?;
    Ok(WelfareReport {
        y: out.y,
        service_welfare: service,
        dispersion: dispersion(out.b_s, out.b_m, out.m),
        total: (1.0 - tau) * out.y + service,
        outcome: out,
    })
}

/// Output, political equilibrium and welfare at a feasible allocation.
pub fn total_welfare(econ: &Economy, alloc: &Allocation) -> Result<WelfareReport> {
    welfare_of(political_equilibrium(econ, alloc)?, econ.gov.tau)
}

/// Productive, governance and targeting channels of `dW/db`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    /// `[(1 - tau) + R_Y / R] Y'`.
    pub productive: f64,
    /// `(R_B / R) B_soc'`.
    pub governance: f64,
    /// `-D'`.
    pub targeting: f64,
    /// Finite-difference derivative of total welfare.
    pub dw: f64,
    /// `|productive + governance + targeting - dw|`.
    pub residual: f64,
    pub d_y: f64,
    pub d_b_soc: f64,
    pub d_dispersion: f64,
    pub stencil: Stencil,
}

impl Decomposition {
    pub fn sum(&self) -> f64 {
        self.productive + self.governance + self.targeting
    }
}

/// Decomposes `dW/db` for a family `b -> WelfareReport` defined on
/// `[lower, upper]`, using the widest finite-difference stencil that stays
/// inside the domain.
pub fn decompose_along<G, F>(
    gov: &G,
    lambda0: f64,
    tau: f64,
    family: F,
    b: f64,
    step: f64,
    (lower, upper): (f64, f64),
) -> Result<Decomposition>
where
    G: Governance + ?Sized,
    F: Fn(f64) -> Result<WelfareReport>,
{
    let at = family(b)?;
    let mut cache = Vec::with_capacity(4);
    let mut failure = None;
    let mut eval = |t: f64| -> Option<WelfareReport> {
        if let Some((_, r)) = cache.iter().find(|(s, _)| *s == t) {
            return Some(*r);
        }
        match family(t) {
            Ok(r) => {
                cache.push((t, r));
                Some(r)
            }
            Err(e) => {
                failure.get_or_insert(e);
                None
            }
        }
    };
    let mut component = |pick: fn(&WelfareReport) -> f64| {
        derivative_in(
            |t| eval(t).map(|r| pick(&r)).unwrap_or(f64::NAN),
            b,
            step,
            lower,
            upper,
        )
    };
    let (d_y, stencil) = component(|r| r.y);
    let (d_b_soc, _) = component(|r| r.outcome.b_soc);
    let (d_dispersion, _) = component(|r| r.dispersion);
    let (dw, _) = component(|r| r.total);
    if let Some(e) = failure {
        return Err(e);
    }
    let sens = resource_sensitivity(gov, at.y, at.outcome.b_soc, lambda0)?;
    let productive = ((1.0 - tau) + sens.r_y_over_r()) * d_y;
    let governance = sens.r_b_over_r() * d_b_soc;
    let targeting = -d_dispersion;
    let residual = (productive + governance + targeting - dw).abs();
    if residual > DECOMPOSITION_TOL {
        log::warn!("decomposition residual {residual:e} at b = {b}; consider a smaller step");
    }
    Ok(Decomposition {
        productive,
        governance,
        targeting,
        dw,
        residual,
        d_y,
        d_b_soc,
        d_dispersion,
        stencil,
    })
}

/// Best attainable system knowledge for a full-budget citizen.
#[derive(Debug, Clone, PartialEq)]
pub struct CivicBenchmark {
    pub b_max: f64,
    pub argmax: Vec<f64>,
}

fn frontier_knowledge(pi: &[f64], civ: &CivicParams, tech: &LearningTech) -> f64 {
    tech.max_scale(pi).powf(civ.p) * overlap(pi, &civ.u)
}

/// Grid maximum of `H(pi)^p C(pi, u)`, refined by pairwise mass transfers
/// with a shrinking step.
pub fn civic_benchmark(civ: &CivicParams, tech: &LearningTech, resolution: usize) -> CivicBenchmark {
    let k = civ.u.dim();
    let (mut best, mut val) = simplex_grid(k, resolution)
        .into_iter()
        .map(|pi| {
            let v = frontier_knowledge(&pi, civ, tech);
            (pi.into_vec(), v)
        })
        .fold((Vec::new(), f64::NEG_INFINITY), |acc, cand| {
            if cand.1 > acc.1 {
                cand
            } else {
                acc
            }
        });
    let mut delta = 0.5 / resolution as f64;
    while delta > 1e-12 {
        let mut improved = false;
        for i in 0..k {
            for j in 0..k {
                if i == j || best[i] < delta {
                    continue;
                }
                let mut trial = best.clone();
                trial[i] -= delta;
                trial[j] += delta;
                let v = frontier_knowledge(&trial, civ, tech);
                if v > val {
                    best = trial;
                    val = v;
                    improved = true;
                }
            }
        }
        if !improved {
            delta *= 0.5;
        }
    }
    CivicBenchmark {
        b_max: val,
        argmax: best,
    }
}

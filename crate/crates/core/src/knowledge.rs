//! Knowledge profiles on `K` domains: simplex directions, coverage, system
//! knowledge and the diffuseness condition on the civic profile.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::learning::LearningTech;

/// Mass tolerance for simplex vectors.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Slack on the learning budget when checking feasibility of a bundle.
pub const FEASIBILITY_TOL: f64 = 1e-10;

/// A point of the unit simplex in `K >= 2` dimensions.
///
/// Construction renormalizes, so the entries always sum to one up to
/// rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidSimplex(format!(
                "need at least two domains, got {}",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidSimplex(format!(
                "entries must be finite and nonnegative, found {bad}"
            )));
        }
        let total: f64 = entries.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidSimplex("entries sum to zero".into()));
        }
        Ok(Self(entries.into_iter().map(|x| x / total).collect()))
    }

    /// Distance of `entries` from unit mass, before renormalization.
    pub fn mass_defect(entries: &[f64]) -> f64 {
        (entries.iter().sum::<f64>() - 1.0).abs()
    }

    pub fn corner(k: usize, dim: usize) -> Self {
        assert!(k < dim && dim >= 2, "corner {k} out of range for K = {dim}");
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        Self(v)
    }

    pub fn uniform(dim: usize) -> Self {
        assert!(dim >= 2);
        Self(vec![1.0 / dim as f64; dim])
    }

    /// Builds from entries already known to be a probability vector.
    pub(crate) fn from_normalized(entries: Vec<f64>) -> Self {
        debug_assert!(SimplexVector::mass_defect(&entries) < 1e-9);
        Self(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// True when all mass sits on one domain.
    pub fn is_corner(&self) -> bool {
        self.0.iter().filter(|x| **x > 0.0).count() == 1
    }

    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|x| *x > 0.0)
    }

    /// Coordinates in ascending order (stable for ties).
    pub fn order_statistics(&self) -> Vec<f64> {
        let mut v = self.0.clone();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    /// Convex combination `(1 - w) * self + w * other`.
    pub fn mix(&self, other: &SimplexVector, w: f64) -> Result<SimplexVector> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        SimplexVector::new(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (1.0 - w) * a + w * b)
                .collect(),
        )
    }
}

impl Deref for SimplexVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for SimplexVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Nonnegative domain knowledge stocks `s = (s_1, ..., s_K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBundle(Vec<f64>);

impl KnowledgeBundle {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "knowledge stocks must be finite and nonnegative, found {bad}"
            )));
        }
        Ok(Self(entries))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// `scale * direction`.
    pub fn along(direction: &SimplexVector, scale: f64) -> Self {
        Self(direction.iter().map(|x| scale * x).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn l1(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `s / ||s||_1`, or `None` for the zero bundle.
    pub fn direction(&self) -> Option<SimplexVector> {
        let mass = self.l1();
        (mass > 0.0 && self.dim() >= 2)
            .then(|| SimplexVector::from_normalized(self.0.iter().map(|x| x / mass).collect()))
    }

    /// Total learning cost `sum_k l(s_k)`.
    pub fn learning_cost(&self, tech: &LearningTech) -> f64 {
        self.0.iter().map(|s| tech.eval(*s)).sum()
    }

    pub fn is_feasible(&self, tech: &LearningTech) -> bool {
        self.learning_cost(tech) <= 1.0 + FEASIBILITY_TOL
    }
}

impl Deref for KnowledgeBundle {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for KnowledgeBundle {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Civic profile `u` and breadth exponent `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CivicParams {
    pub u: SimplexVector,
    pub p: f64,
}

impl CivicParams {
    pub fn new(u: SimplexVector, p: f64) -> Result<Self> {
        if !u.is_interior() {
            return Err(Error::InvalidParameter(
                "civic profile u must be strictly interior".into(),
            ));
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "breadth exponent p must be positive, got {p}"
            )));
        }
        Ok(Self { u, p })
    }

    pub fn with_profile(&self, u: SimplexVector) -> Result<Self> {
        Self::new(u, self.p)
    }
}

/// All points of the `K`-simplex with coordinates in multiples of
/// `1 / resolution`, in lexicographic order of their numerators.
pub fn simplex_grid(k: usize, resolution: usize) -> Vec<SimplexVector> {
    assert!(k >= 2 && resolution >= 1);
    let mut out = Vec::new();
    let mut counts = vec![0usize; k];
    fill_compositions(&mut counts, 0, resolution, &mut |c| {
        out.push(SimplexVector::from_normalized(
            c.iter().map(|n| *n as f64 / resolution as f64).collect(),
        ));
    });
    out
}

/// Visits every way of writing `remaining` as an ordered sum of
/// `counts.len() - pos` nonnegative integers.
pub(crate) fn fill_compositions(
    counts: &mut [usize],
    pos: usize,
    remaining: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if pos + 1 == counts.len() {
        counts[pos] = remaining;
        visit(counts);
        return;
    }
    for n in 0..=remaining {
        counts[pos] = n;
        fill_compositions(counts, pos + 1, remaining - n, visit);
    }
}

/// Number of grid points on the `K`-simplex at the given resolution,
/// `binom(resolution + K - 1, K - 1)`.
pub fn simplex_grid_len(k: usize, resolution: usize) -> u128 {
    binomial((resolution + k - 1) as u128, (k - 1) as u128)
}

pub(crate) fn binomial(n: u128, r: u128) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Coverage `C(a, b) = sum_k min(a_k, b_k)`.
pub fn coverage(a: impl AsRef<[f64]>, b: impl AsRef<[f64]>) -> Result<f64> {
    let (a, b) = (a.as_ref(), b.as_ref());
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(overlap(a, b))
}

/// Unchecked coverage for internal callers that already share a dimension.
#[inline]
pub(crate) fn overlap(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.min(*y)).sum()
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// System knowledge `||s||^p * C(s / ||s||, u)`, zero for the empty bundle.
pub fn system_knowledge(s: impl AsRef<[f64]>, civ: &CivicParams) -> f64 {
    let s = s.as_ref();
    let mass: f64 = s.iter().sum();
    if mass <= 0.0 {
        return 0.0;
    }
    let cov: f64 = s.iter().zip(civ.u.iter()).map(|(x, u)| (x / mass).min(*u)).sum();
    mass.powf(civ.p) * cov
}

/// Fragmentation `D(pi) = 1 - sum_k pi_k^2`.
pub fn fragmentation(pi: &[f64]) -> f64 {
    1.0 - pi.iter().map(|x| x * x).sum::<f64>()
}

/// Outcome of the diffuse-civic-relevance test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffuseCheck {
    pub holds: bool,
    /// Upper bound on `p`; nonpositive when no `p > 0` can pass.
    pub p_bound: f64,
    /// `p_bound - p`.
    pub margin: f64,
}

/// Checks `0 < p < log((u_(1) + u_(2)) / u_(K)) / (-log(K l^{-1}(1/K)))`.
pub fn check_diffuse(civ: &CivicParams, tech: &LearningTech) -> Result<DiffuseCheck> {
    let k = civ.u.dim();
    if k == 2 {
        return Err(Error::TwoDomains);
    }
    let sorted = civ.u.order_statistics();
    let numerator = ((sorted[0] + sorted[1]) / sorted[k - 1]).ln();
    let scale = k as f64 * tech.ell_inverse(1.0 / k as f64)?;
    let p_bound = numerator / (-scale.ln());
    Ok(DiffuseCheck {
        holds: civ.p > 0.0 && civ.p < p_bound,
        p_bound,
        margin: p_bound - civ.p,
    })
}

//! Specialist designs, coordination gaps, integrator capacity, the reduced
//! form of the organization problem, the productive optimum and the
//! exhaustive design oracle.

use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::knowledge::{
    binomial, fill_compositions, fragmentation, overlap, simplex_grid, simplex_grid_len,
    KnowledgeBundle, SimplexVector, FEASIBILITY_TOL,
};
use crate::learning::LearningTech;

/// Tolerance on the integration constraint `m J >= theta g`.
pub const COORDINATION_TOL: f64 = 1e-10;

/// One point mass of a specialist design.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignAtom {
    pub direction: SimplexVector,
    /// Mastery weight: share of specialist knowledge mass on this direction.
    pub weight: f64,
    /// Knowledge scale of these specialists; `None` means full scale `H(pi)`.
    pub scale: Option<f64>,
}

impl DesignAtom {
    pub fn new(direction: SimplexVector, weight: f64) -> Self {
        Self {
            direction,
            weight,
            scale: None,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = Some(scale);
        self
    }

    pub fn scale(&self, tech: &LearningTech) -> f64 {
        self.scale.unwrap_or_else(|| tech.max_scale(&self.direction))
    }
}

/// Mastery-weighted distribution of specialist directions, held as a finite
/// list of atoms with positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecialistDesign {
    atoms: Vec<DesignAtom>,
    mean: SimplexVector,
}

impl SpecialistDesign {
    /// Validates the atoms, drops zero-weight ones and computes the mean mix.
    pub fn new(atoms: Vec<DesignAtom>) -> Result<Self> {
        let Some(first) = atoms.first() else {
            return Err(Error::InvalidParameter("a design needs at least one atom".into()));
        };
        let k = first.direction.dim();
        let mut total = 0.0;
        for a in &atoms {
            if a.direction.dim() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: a.direction.dim(),
                });
            }
            if !(a.weight.is_finite() && a.weight >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "atom weights must be nonnegative, got {}",
                    a.weight
                )));
            }
            if let Some(s) = a.scale {
                if !(s.is_finite() && s > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "atom scale overrides must be positive, got {s}"
                    )));
                }
            }
            total += a.weight;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "atom weights must sum to one, got {total}"
            )));
        }
        let atoms: Vec<DesignAtom> = atoms.into_iter().filter(|a| a.weight > 0.0).collect();
        let mut mean = vec![0.0; k];
        for a in &atoms {
            for (m, p) in mean.iter_mut().zip(a.direction.iter()) {
                *m += a.weight * p;
            }
        }
        Ok(Self {
            atoms,
            mean: SimplexVector::new(mean)?,
        })
    }

    /// Corner specialists with mastery weights equal to `x`.
    pub fn corners(x: &SimplexVector) -> Self {
        let k = x.dim();
        let atoms = x
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(i, w)| DesignAtom::new(SimplexVector::corner(i, k), *w))
            .collect();
        Self {
            atoms,
            mean: x.clone(),
        }
    }

    pub fn atoms(&self) -> &[DesignAtom] {
        &self.atoms
    }

    /// Mean specialist mix `x`.
    pub fn mean(&self) -> &SimplexVector {
        &self.mean
    }

    pub fn dim(&self) -> usize {
        self.mean.dim()
    }

    pub fn is_corner_design(&self) -> bool {
        self.atoms.iter().all(|a| a.direction.is_corner())
    }

    /// `E_nu[1 / scale]`, which equals `E_nu[lambda]` at full scale.
    pub fn mean_inverse_scale(&self, tech: &LearningTech) -> f64 {
        self.atoms.iter().map(|a| a.weight / a.scale(tech)).sum()
    }

    /// Population shares of the atoms among specialists.
    pub fn population_shares(&self, tech: &LearningTech) -> Vec<f64> {
        let norm = self.mean_inverse_scale(tech);
        self.atoms
            .iter()
            .map(|a| a.weight / a.scale(tech) / norm)
            .collect()
    }

    /// Scale-free gap profile `z_nu(x) = E_nu[(x - pi)^+]`.
    pub fn gap_profile(&self, x: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; x.len()];
        for a in &self.atoms {
            for ((zk, xk), pk) in z.iter_mut().zip(x).zip(a.direction.iter()) {
                *zk += a.weight * (xk - pk).max(0.0);
            }
        }
        z
    }

    /// `E_nu[D(pi)]`.
    pub fn expected_fragmentation(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * fragmentation(&a.direction))
            .sum()
    }

    /// The corner design with the same mean mix.
    pub fn cornerize(&self) -> Self {
        Self::corners(&self.mean)
    }
}

/// Normalized composition of aggregate coordination needs.
#[derive(Debug, Clone, PartialEq)]
pub enum InterfaceProfile {
    Interface(SimplexVector),
    /// No specialist lacks anything: there is nothing to integrate.
    NoInterface,
}

impl InterfaceProfile {
    pub fn from_gaps(g: &[f64]) -> Self {
        let total: f64 = g.iter().sum();
        if total > 0.0 && g.len() >= 2 {
            InterfaceProfile::Interface(SimplexVector::from_normalized(
                g.iter().map(|v| v / total).collect(),
            ))
        } else {
            InterfaceProfile::NoInterface
        }
    }

    pub fn as_option(&self) -> Option<&SimplexVector> {
        match self {
            InterfaceProfile::Interface(h) => Some(h),
            InterfaceProfile::NoInterface => None,
        }
    }
}

/// Occupational structure: specialist design, integrator mass and profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub m: f64,
    pub design: SpecialistDesign,
    pub integrator_profile: KnowledgeBundle,
    /// Broadening index; zero except for members of the broadening family.
    pub b: f64,
}

impl Allocation {
    pub fn new(
        m: f64,
        design: SpecialistDesign,
        integrator_profile: KnowledgeBundle,
        b: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::Domain {
                what: "m",
                value: m,
                domain: "[0, 1]",
            });
        }
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::Domain {
                what: "b",
                value: b,
                domain: "[0, 1]",
            });
        }
        if integrator_profile.dim() != design.dim() {
            return Err(Error::DimensionMismatch {
                expected: design.dim(),
                found: integrator_profile.dim(),
            });
        }
        Ok(Self {
            m,
            design,
            integrator_profile,
            b,
        })
    }

    /// Aggregate specialist scale `H^S = (1 - m) / E_nu[1 / scale]`.
    pub fn specialist_scale(&self, tech: &LearningTech) -> f64 {
        (1.0 - self.m) / self.design.mean_inverse_scale(tech)
    }

    /// Aggregate specialist knowledge `S = H^S x`.
    pub fn specialist_knowledge(&self, tech: &LearningTech) -> Vec<f64> {
        let hs = self.specialist_scale(tech);
        self.design.mean().iter().map(|x| hs * x).collect()
    }
}

/// Coordination requirement of one worker, `(||s||_1 mix - s)^+`.
pub fn gap_vector(s: &KnowledgeBundle, mix: &SimplexVector) -> Result<KnowledgeBundle> {
    if s.dim() != mix.dim() {
        return Err(Error::DimensionMismatch {
            expected: mix.dim(),
            found: s.dim(),
        });
    }
    let mass = s.l1();
    KnowledgeBundle::new(
        s.iter()
            .zip(mix.iter())
            .map(|(sk, xk)| (mass * xk - sk).max(0.0))
            .collect(),
    )
}

/// Aggregate gap vector `G`, its mass `g` and composition `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapSummary {
    pub gaps: KnowledgeBundle,
    pub g: f64,
    pub profile: InterfaceProfile,
}

pub fn aggregate_gaps(alloc: &Allocation, tech: &LearningTech) -> GapSummary {
    let hs = alloc.specialist_scale(tech);
    let z = alloc.design.gap_profile(alloc.design.mean());
    let gaps: Vec<f64> = z.iter().map(|v| hs * v).collect();
    let g = gaps.iter().sum();
    let profile = InterfaceProfile::from_gaps(&gaps);
    GapSummary {
        gaps: KnowledgeBundle::new(gaps).expect("gap entries are nonnegative"),
        g,
        profile,
    }
}

/// Number of standardized coordination bundles `min_{h_k > 0} s_k / h_k`.
pub fn integrator_capacity(s: &KnowledgeBundle, h: &SimplexVector) -> Result<f64> {
    if s.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: s.dim(),
        });
    }
    Ok(s.iter()
        .zip(h.iter())
        .filter(|(_, hk)| **hk > 0.0)
        .map(|(sk, hk)| sk / hk)
        .fold(f64::INFINITY, f64::min))
}

/// `m J - theta g`: nonnegative exactly when integration is feasible.
pub fn coordination_slack(alloc: &Allocation, econ: &Economy) -> Result<f64> {
    let gaps = aggregate_gaps(alloc, &econ.tech);
    match gaps.profile {
        InterfaceProfile::NoInterface => Ok(0.0),
        InterfaceProfile::Interface(h) => {
            let j = integrator_capacity(&alloc.integrator_profile, &h)?;
            Ok(alloc.m * j - econ.theta * gaps.g)
        }
    }
}

/// The smallest feasible integrator layer for `design`, staffed with the
/// capacity-maximizing profile `H(h) h`.
pub fn minimal_allocation(design: SpecialistDesign, econ: &Economy) -> Allocation {
    let tech = &econ.tech;
    let z = design.gap_profile(design.mean());
    let gamma = tech.gamma_index(&z);
    let e_lambda = design.mean_inverse_scale(tech);
    let m = econ.theta * gamma / (e_lambda + econ.theta * gamma);
    let profile = match InterfaceProfile::from_gaps(&z) {
        InterfaceProfile::Interface(h) => KnowledgeBundle::along(&h, tech.max_scale(&h)),
        InterfaceProfile::NoInterface => KnowledgeBundle::zeros(design.dim()),
    };
    Allocation {
        m,
        design,
        integrator_profile: profile,
        b: 0.0,
    }
}

/// Output `V C(x, q) / (E_nu[lambda] + theta Gamma(z_nu(x)))` of a design
/// staffed by its minimal integrator layer.
pub fn design_output(design: &SpecialistDesign, econ: &Economy) -> f64 {
    let z = design.gap_profile(design.mean());
    let denom = design.mean_inverse_scale(&econ.tech) + econ.theta * econ.tech.gamma_index(&z);
    econ.v * overlap(design.mean(), &econ.q) / denom
}

/// Output `V C(S, H^S q) = V H^S C(x, q)` of a feasible allocation.
pub fn output_of(alloc: &Allocation, econ: &Economy) -> Result<f64> {
    let tech = &econ.tech;
    if !alloc.integrator_profile.is_feasible(tech) {
        return Err(Error::Infeasible(format!(
            "integrator profile costs {} > 1",
            alloc.integrator_profile.learning_cost(tech)
        )));
    }
    for a in alloc.design.atoms() {
        if let Some(s) = a.scale {
            let cap = tech.max_scale(&a.direction);
            if s > cap + FEASIBILITY_TOL {
                return Err(Error::Infeasible(format!(
                    "specialist scale {s} exceeds the frontier {cap}"
                )));
            }
        }
    }
    let slack = coordination_slack(alloc, econ)?;
    if slack < -COORDINATION_TOL {
        return Err(Error::Infeasible(format!(
            "integration constraint violated by {:e}",
            -slack
        )));
    }
    Ok(econ.v * alloc.specialist_scale(tech) * overlap(alloc.design.mean(), &econ.q))
}

/// Reduced-form objects at a corner design with mix `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedForm {
    pub y: f64,
    pub m: f64,
    /// `Gamma(x (1 - x))`.
    pub gamma: f64,
    pub gaps: Vec<f64>,
    pub h: InterfaceProfile,
}

pub fn reduced_form(x: &SimplexVector, econ: &Economy) -> Result<ReducedForm> {
    if x.dim() != econ.k() {
        return Err(Error::DimensionMismatch {
            expected: econ.k(),
            found: x.dim(),
        });
    }
    if econ.require_below_cutoff().is_err() {
        log::warn!(
            "theta = {} is not below the coordination cutoff {}; the reduced form is computed anyway",
            econ.theta,
            econ.theta_bar()
        );
    }
    let z: Vec<f64> = x.iter().map(|v| v * (1.0 - v)).collect();
    let gamma = econ.tech.gamma_index(&z);
    let tg = econ.theta * gamma;
    let m = tg / (1.0 + tg);
    Ok(ReducedForm {
        y: econ.v * overlap(x, &econ.q) / (1.0 + tg),
        m,
        gamma,
        gaps: z.iter().map(|v| (1.0 - m) * v).collect(),
        h: InterfaceProfile::from_gaps(&z),
    })
}

/// Closed-form productive optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductiveOptimum {
    /// Integrator profile direction `q (1 - q) / D(q)`.
    pub h_star: SimplexVector,
    pub m_star: f64,
    pub y_star: f64,
    /// `H(h*)`.
    pub h_hstar: f64,
    /// `D(q)`.
    pub d_q: f64,
}

/// Corner specialists in proportions `q`, plus the minimal integrator layer
/// with profile `H(h*) h*`.
pub fn productive_optimum(econ: &Economy) -> Result<(ProductiveOptimum, Allocation)> {
    econ.require_below_cutoff()?;
    let q = &econ.q;
    let d_q = fragmentation(q);
    let h_star =
        SimplexVector::from_normalized(q.iter().map(|v| v * (1.0 - v) / d_q).collect());
    let h_hstar = econ.tech.max_scale(&h_star);
    let denom = h_hstar + econ.theta * d_q;
    let opt = ProductiveOptimum {
        m_star: econ.theta * d_q / denom,
        y_star: econ.v * h_hstar / denom,
        h_hstar,
        d_q,
        h_star: h_star.clone(),
    };
    let alloc = Allocation {
        m: opt.m_star,
        design: SpecialistDesign::corners(q),
        integrator_profile: KnowledgeBundle::along(&h_star, h_hstar),
        b: 0.0,
    };
    Ok((opt, alloc))
}

/// Bounds for the exhaustive design search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleGrid {
    /// Directions and weights live on the `1 / resolution` lattice.
    pub resolution: usize,
    pub max_atoms: usize,
    /// Largest number of designs the search may visit.
    pub budget: u128,
}

impl Default for OracleGrid {
    fn default() -> Self {
        Self {
            resolution: 8,
            max_atoms: 3,
            budget: 2_000_000,
        }
    }
}

impl OracleGrid {
    /// `sum_a binom(#directions, a) binom(n - 1, a - 1)`.
    pub fn design_count(&self, k: usize) -> u128 {
        let dirs = simplex_grid_len(k, self.resolution);
        let n = self.resolution as u128;
        (1..=self.max_atoms as u128)
            .map(|a| binomial(dirs, a) * binomial(n - 1, a - 1))
            .sum()
    }
}

/// A design on the oracle lattice: atom directions indexed into a shared
/// direction list, with integer weights summing to the resolution.
#[derive(Debug, Clone, Copy)]
pub struct GridDesign<'a> {
    pub directions: &'a [SimplexVector],
    pub atoms: &'a [(usize, usize)],
    pub resolution: usize,
}

impl GridDesign<'_> {
    pub fn weight(&self, i: usize) -> f64 {
        self.atoms[i].1 as f64 / self.resolution as f64
    }

    pub fn mean(&self) -> Vec<f64> {
        let k = self.directions[0].dim();
        let mut x = vec![0.0; k];
        for (i, (d, _)) in self.atoms.iter().enumerate() {
            let w = self.weight(i);
            for (xk, pk) in x.iter_mut().zip(self.directions[*d].iter()) {
                *xk += w * pk;
            }
        }
        x
    }

    pub fn to_design(&self) -> SpecialistDesign {
        SpecialistDesign::new(
            self.atoms
                .iter()
                .enumerate()
                .map(|(i, (d, _))| DesignAtom::new(self.directions[*d].clone(), self.weight(i)))
                .collect(),
        )
        .expect("lattice designs are valid")
    }
}

/// Visits every lattice design with up to `max_atoms` distinct directions.
/// Returns the direction list and the number of designs visited.
pub fn for_each_grid_design(
    k: usize,
    grid: &OracleGrid,
    mut visit: impl FnMut(&GridDesign<'_>),
) -> Result<(Vec<SimplexVector>, u128)> {
    let required = grid.design_count(k);
    if required > grid.budget {
        return Err(Error::BudgetExceeded {
            required,
            budget: grid.budget,
        });
    }
    let directions = simplex_grid(k, grid.resolution);
    let n = grid.resolution;
    let mut visited = 0u128;
    for a in 1..=grid.max_atoms.min(directions.len()).min(n) {
        let mut combo: Vec<usize> = (0..a).collect();
        let mut parts = vec![0usize; a];
        let mut atoms = vec![(0usize, 0usize); a];
        loop {
            // Positive compositions of n into a parts, via compositions of
            // n - a into nonnegative parts.
            fill_compositions(&mut parts, 0, n - a, &mut |c| {
                for (slot, (d, extra)) in atoms.iter_mut().zip(combo.iter().zip(c)) {
                    *slot = (*d, extra + 1);
                }
                visit(&GridDesign {
                    directions: &directions,
                    atoms: &atoms,
                    resolution: n,
                });
                visited += 1;
            });
            if !next_combination(&mut combo, directions.len()) {
                break;
            }
        }
    }
    Ok((directions, visited))
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let a = combo.len();
    for i in (0..a).rev() {
        if combo[i] < n - a + i {
            combo[i] += 1;
            for j in i + 1..a {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Winner of the exhaustive design search.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignOptimum {
    pub x: SimplexVector,
    pub design: SpecialistDesign,
    pub y: f64,
    pub evaluated: u128,
}

/// Maximizes minimal-integrator output over all lattice designs. Ties go to
/// the lexicographically smallest mix.
pub fn brute_force_design(econ: &Economy, grid: &OracleGrid) -> Result<DesignOptimum> {
    let tech = &econ.tech;
    let k = econ.k();
    let lambdas: Vec<f64> = simplex_grid(k, grid.resolution)
        .iter()
        .map(|d| tech.lambda_index(d))
        .collect();
    let mut best: Option<(f64, Vec<f64>, Vec<(usize, usize)>)> = None;
    let mut z = vec![0.0; k];
    let (directions, evaluated) = for_each_grid_design(k, grid, |gd| {
        let x = gd.mean();
        z.iter_mut().for_each(|v| *v = 0.0);
        let mut e_lambda = 0.0;
        for (i, (d, _)) in gd.atoms.iter().enumerate() {
            let w = gd.weight(i);
            e_lambda += w * lambdas[*d];
            for ((zk, xk), pk) in z.iter_mut().zip(&x).zip(gd.directions[*d].iter()) {
                *zk += w * (xk - pk).max(0.0);
            }
        }
        let y = econ.v * overlap(&x, &econ.q) / (e_lambda + econ.theta * tech.gamma_index(&z));
        let better = match &best {
            None => true,
            Some((by, bx, _)) => y > *by || (y == *by && lex_less(&x, bx)),
        };
        if better {
            best = Some((y, x, gd.atoms.to_vec()));
        }
    })?;
    let (y, x, atoms) = best.expect("the lattice always has at least one design");
    let design = GridDesign {
        directions: &directions,
        atoms: &atoms,
        resolution: grid.resolution,
    }
    .to_design();
    Ok(DesignOptimum {
        x: SimplexVector::new(x)?,
        design,
        y,
        evaluated,
    })
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

/// Lattice point closest to `q` in the l1 norm (first in lattice order on ties).
pub fn nearest_grid_point(q: &SimplexVector, resolution: usize) -> SimplexVector {
    simplex_grid(q.dim(), resolution)
        .into_iter()
        .min_by(|a, b| {
            crate::knowledge::l1_distance(a, q).total_cmp(&crate::knowledge::l1_distance(b, q))
        })
        .expect("nonempty lattice")
}

/// Admissible gap between the lattice optimum and `Y*`:
/// `V (1/2 + theta L_Gamma) (K - 1) / n`.
pub fn grid_tolerance(econ: &Economy, resolution: usize) -> f64 {
    econ.v * (0.5 + econ.theta * econ.constants.l_gamma) * (econ.k() as f64 - 1.0)
        / resolution as f64
}

//! Seeded random primitives for property checks and the oracle suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::economy::Economy;
use crate::knowledge::{CivicParams, KnowledgeBundle, SimplexVector};
use crate::learning::LearningTech;
use crate::politics::GovernanceTech;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from the simplex (flat Dirichlet).
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, k: usize) -> SimplexVector {
    let draws: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    SimplexVector::new(draws).expect("exponential draws are positive")
}

/// Simplex draw with every entry at least `floor`.
pub fn random_interior<R: Rng + ?Sized>(rng: &mut R, k: usize, floor: f64) -> SimplexVector {
    let base = random_simplex(rng, k);
    let keep = 1.0 - k as f64 * floor;
    SimplexVector::new(base.iter().map(|v| keep * v + floor).collect())
        .expect("mixture with the uniform vector stays on the simplex")
}

/// A nonnegative bundle with total mass `mass`.
pub fn random_bundle<R: Rng + ?Sized>(rng: &mut R, k: usize, mass: f64) -> KnowledgeBundle {
    let dir = random_simplex(rng, k);
    KnowledgeBundle::along(&dir, mass)
}

/// Rational or exponential technology with curvature in `[0.25, 4]`.
pub fn random_tech<R: Rng + ?Sized>(rng: &mut R) -> LearningTech {
    let param = rng.gen_range(0.25..4.0);
    if rng.gen_bool(0.5) {
        LearningTech::rational(param).expect("positive curvature")
    } else {
        LearningTech::exponential(param).expect("positive curvature")
    }
}

pub fn random_gov<R: Rng + ?Sized>(rng: &mut R) -> GovernanceTech {
    GovernanceTech::new(
        rng.gen_range(0.2..0.8),
        rng.gen_range(0.05..1.0),
        rng.gen_range(0.1..0.4),
        rng.gen_range(1.0..3.0),
    )
    .expect("draws lie inside the admissible ranges")
}

/// A random economy with `theta` uniform on `[0.05, 0.95]` times its cutoff.
pub fn random_economy<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Economy {
    let tech = random_tech(rng);
    let q = random_interior(rng, k, 0.02);
    let civ = CivicParams::new(random_interior(rng, k, 0.02), rng.gen_range(0.05..2.0))
        .expect("interior civic profile and positive p");
    let v = rng.gen_range(1.0..20.0);
    let econ = Economy::new(tech, q, civ, 0.0, v, random_gov(rng))
        .expect("random primitives satisfy the constructor checks");
    let frac = rng.gen_range(0.05..0.95);
    econ.with_theta(frac * econ.theta_bar())
}

/// Two nonnegative vectors with the same total mass.
pub fn equal_mass_pair<R: Rng + ?Sized>(rng: &mut R, k: usize) -> (Vec<f64>, Vec<f64>) {
    let mass = rng.gen_range(0.1..5.0);
    (
        random_bundle(rng, k, mass).into_vec(),
        random_bundle(rng, k, mass).into_vec(),
    )
}

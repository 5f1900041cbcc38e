use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use super::pairs::{self, LabeledPair};
use super::RealLinearMap;
use crate::algebra::linalg::{c, outer, CMat};
use crate::algebra::random::{self, rng_for};
use crate::algebra::Element;
use crate::bj::{dist_to_right_ideal, mutual_strong_bj};
use crate::error::Result;
use crate::tol;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Skip the surjectivity gate (for non-surjective gallery maps).
    pub skip_surjectivity: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { trials: 1000, seed: 0, tol: tol::DECISION, skip_surjectivity: false }
    }
}

/// A mutually orthogonal pair whose images are not mutually orthogonal.
#[derive(Debug, Clone, Serialize)]
pub struct ViolationWitness {
    pub family: String,
    pub a: Element,
    pub b: Element,
    pub image_a: Element,
    pub image_b: Element,
    pub norm_a: f64,
    pub norm_b: f64,
    pub dist_ab: f64,
    pub dist_ba: f64,
    pub image_norm_a: f64,
    pub image_norm_b: f64,
    pub image_dist_ab: f64,
    pub image_dist_ba: f64,
}

#[derive(Debug, Clone)]
pub enum MutualVerdict {
    Pass { pairs_checked: usize },
    Violation(Box<ViolationWitness>),
}

impl MutualVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, MutualVerdict::Pass { .. })
    }

    pub fn violation(&self) -> Option<&ViolationWitness> {
        match self {
            MutualVerdict::Violation(w) => Some(w),
            MutualVerdict::Pass { .. } => None,
        }
    }
}

enum PairOutcome {
    Skipped,
    Preserved,
    Violated(Box<ViolationWitness>),
}

fn check_pair(m: &RealLinearMap, family: &str, a: &Element, b: &Element, tol: f64) -> Result<PairOutcome> {
    if !mutual_strong_bj(a, b, tol)? {
        return Ok(PairOutcome::Skipped);
    }
    let image_a = m.apply(a)?;
    let image_b = m.apply(b)?;
    if mutual_strong_bj(&image_a, &image_b, tol)? {
        return Ok(PairOutcome::Preserved);
    }
    Ok(PairOutcome::Violated(Box::new(ViolationWitness {
        family: family.to_string(),
        norm_a: a.op_norm(),
        norm_b: b.op_norm(),
        dist_ab: dist_to_right_ideal(a, b)?,
        dist_ba: dist_to_right_ideal(b, a)?,
        image_norm_a: image_a.op_norm(),
        image_norm_b: image_b.op_norm(),
        image_dist_ab: dist_to_right_ideal(&image_a, &image_b)?,
        image_dist_ba: dist_to_right_ideal(&image_b, &image_a)?,
        a: a.clone(),
        b: b.clone(),
        image_a,
        image_b,
    })))
}

/// Checks the given pairs in order. Pairs that are not mutually orthogonal
/// are ignored; `pairs_checked` counts the orthogonal ones.
pub fn check_pairs<'a>(
    m: &RealLinearMap,
    pairs: impl IntoIterator<Item = (&'a Element, &'a Element)>,
    tol: f64,
) -> Result<MutualVerdict> {
    let mut checked = 0;
    for (a, b) in pairs {
        match check_pair(m, "given", a, b, tol)? {
            PairOutcome::Skipped => {}
            PairOutcome::Preserved => checked += 1,
            PairOutcome::Violated(w) => return Ok(MutualVerdict::Violation(w)),
        }
    }
    Ok(MutualVerdict::Pass { pairs_checked: checked })
}

pub fn verify_mutual_preserver(m: &RealLinearMap, trials: usize, seed: u64) -> Result<MutualVerdict> {
    verify_mutual_preserver_with(m, &VerifyConfig { trials, seed, ..VerifyConfig::default() })
}

/// Checks that images of mutually orthogonal pairs stay mutually orthogonal.
///
/// The fixed pairs of [`pairs::fixed_pairs`] are tried first, then `trials`
/// random pairs cycling through [`pairs::FAMILIES`]; trial `t` draws from the
/// stream `(seed, t)`. The first violation (by trial index) is returned.
/// A pass is evidence, not proof.
pub fn verify_mutual_preserver_with(m: &RealLinearMap, config: &VerifyConfig) -> Result<MutualVerdict> {
    if !config.skip_surjectivity {
        m.ensure_surjective()?;
    }
    let shape = m.shape();
    let mut checked = 0;
    for p in pairs::fixed_pairs(shape) {
        match check_pair(m, p.family, &p.a, &p.b, config.tol)? {
            PairOutcome::Skipped => {}
            PairOutcome::Preserved => checked += 1,
            PairOutcome::Violated(w) => return Ok(MutualVerdict::Violation(w)),
        }
    }
    const CHUNK: usize = 256;
    let mut start = 0;
    while start < config.trials {
        let end = (start + CHUNK).min(config.trials);
        let outcomes = (start..end)
            .into_par_iter()
            .map(|t| {
                let pair = sample_trial(shape, config.seed, t);
                check_pair(m, pair.family, &pair.a, &pair.b, config.tol)
            })
            .collect::<Vec<_>>();
        for outcome in outcomes {
            match outcome? {
                PairOutcome::Skipped => {}
                PairOutcome::Preserved => checked += 1,
                PairOutcome::Violated(w) => return Ok(MutualVerdict::Violation(w)),
            }
        }
        start = end;
    }
    Ok(MutualVerdict::Pass { pairs_checked: checked })
}

fn sample_trial(shape: &crate::algebra::Shape, seed: u64, t: usize) -> LabeledPair {
    let mut rng = rng_for(seed, t as u64);
    let families = pairs::FAMILIES.len();
    (0..families)
        .find_map(|offset| pairs::sample(shape, t + offset, &mut rng))
        .expect("disjoint_diagonal applies to every shape")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityViolation {
    /// A singular element mapped to an invertible one.
    SingularToInvertible,
    /// A rank-one element mapped to rank at least two.
    RankOneToHigherRank,
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularityWitness {
    pub kind: SingularityViolation,
    pub element: Element,
    pub image: Element,
    pub image_rank: usize,
}

#[derive(Debug, Clone)]
pub enum SingularityVerdict {
    Pass { elements_checked: usize },
    Violation(Box<SingularityWitness>),
}

impl SingularityVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, SingularityVerdict::Pass { .. })
    }

    pub fn violation(&self) -> Option<&SingularityWitness> {
        match self {
            SingularityVerdict::Violation(w) => Some(w),
            SingularityVerdict::Pass { .. } => None,
        }
    }
}

fn structured_singular(shape: &crate::algebra::Shape) -> Vec<Element> {
    let k = shape.num_blocks();
    let mut out = Vec::new();
    // identity with one block removed
    for i in 0..k {
        let mut e = Element::identity(shape);
        let n = shape.block_dim(i);
        *e.block_mut(i) = CMat::zeros(n, n);
        out.push(e);
    }
    for i in 0..k {
        for r in 0..shape.block_dim(i) {
            for s in 0..shape.block_dim(i) {
                out.push(Element::matrix_unit(shape, i, r, s).expect("indices in range"));
            }
        }
    }
    out
}

/// Random element with the smallest singular value of one block set to zero.
fn random_singular(shape: &crate::algebra::Shape, seed: u64, t: usize) -> Element {
    let mut rng = rng_for(seed, t as u64);
    let mut a = Element::random(shape, rng.random());
    let i = rng.random_range(0..shape.num_blocks());
    let svd = a.svd_block(i).expect("index in range");
    let n = shape.block_dim(i);
    let mut sigma = CMat::zeros(n, n);
    for j in 0..n - 1 {
        sigma[(j, j)] = c(svd.singular_values[j], 0.0);
    }
    *a.block_mut(i) = &svd.u * sigma * svd.v.adjoint();
    a
}

fn random_rank_one(shape: &crate::algebra::Shape, seed: u64, t: usize) -> Element {
    let mut rng = rng_for(seed ^ 0x5EED_0001, t as u64);
    let i = rng.random_range(0..shape.num_blocks());
    let n = shape.block_dim(i);
    let x = random::gaussian_vector(n, &mut rng);
    let y = random::gaussian_vector(n, &mut rng);
    Element::from_block(shape, i, outer(&x, &y)).expect("index in range")
}

/// Checks that singular elements map to singular elements, and that rank-one
/// elements map to rank at most one (tried on `10·D` random rank-ones).
pub fn verify_singularity_preserver(m: &RealLinearMap, trials: usize, seed: u64) -> Result<SingularityVerdict> {
    let shape = m.shape();
    let mut checked = 0;
    let structured = structured_singular(shape);
    let random = (0..trials).map(|t| random_singular(shape, seed, t));
    for a in structured.into_iter().chain(random) {
        if a.is_invertible() {
            continue;
        }
        let image = m.apply(&a)?;
        checked += 1;
        if image.is_invertible() {
            let image_rank = image.rank();
            return Ok(SingularityVerdict::Violation(Box::new(SingularityWitness {
                kind: SingularityViolation::SingularToInvertible,
                element: a,
                image,
                image_rank,
            })));
        }
    }
    for t in 0..10 * shape.real_dim() {
        let a = random_rank_one(shape, seed, t);
        let image = m.apply(&a)?;
        checked += 1;
        let image_rank = image.rank();
        if image_rank > 1 {
            return Ok(SingularityVerdict::Violation(Box::new(SingularityWitness {
                kind: SingularityViolation::RankOneToHigherRank,
                element: a,
                image,
                image_rank,
            })));
        }
    }
    Ok(SingularityVerdict::Pass { elements_checked: checked })
}

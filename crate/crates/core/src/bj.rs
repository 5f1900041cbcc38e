//! Strong and mutual strong Birkhoff-James orthogonality.
//!
//! `a ⊥ b` (strongly) when `‖a + bc‖ >= ‖a‖` for every `c` in the algebra.
//! Two independent deciders are provided:
//!
//! - [`strong_bj`] evaluates `inf_c ‖a + bc‖` in closed form. In block `i` the
//!   infimum is `‖(I - P_i) A_i‖` with `P_i` the orthogonal projection onto the
//!   column space of `B_i`, attained at `C_i = -B_i⁺ A_i`; the algebra norm is the
//!   maximum over blocks.
//! - [`strong_bj_witness`] searches for a unit vector `x` in a block of maximal
//!   norm with `‖A_i x‖ = ‖a‖` and `B_i* A_i x = 0`.

use serde::Serialize;

use crate::algebra::linalg::{self, c, CMat, CVec};
use crate::algebra::random::{self, rng_for};
use crate::algebra::{Element, Shape};
use crate::error::{Error, Result};
use crate::json::{vector_to_wire, ComplexWire};
use crate::tol;

/// Norm-attaining vector certifying `a ⊥ b`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthWitness {
    pub block: usize,
    pub x: CVec,
    /// `|‖A_i x‖ - ‖a‖|`
    pub r1: f64,
    /// `‖B_i* A_i x‖`
    pub r2: f64,
}

#[derive(Serialize)]
struct WitnessWire {
    block: usize,
    x: Vec<ComplexWire>,
    r1: f64,
    r2: f64,
}

impl Serialize for OrthWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WitnessWire { block: self.block, x: vector_to_wire(&self.x), r1: self.r1, r2: self.r2 }
            .serialize(s)
    }
}

/// `‖(I - P) A‖` for a single block.
fn block_residual_norm(a: &CMat, b: &CMat, b_scale: f64, dim: usize) -> f64 {
    let svd = linalg::svd(b);
    let rank = linalg::rank_from_values(&svd.singular_values, b_scale, dim);
    if rank == 0 {
        return linalg::spectral_norm(a);
    }
    let basis = svd.u.columns(0, rank);
    let projected = &basis * (basis.adjoint() * a);
    linalg::spectral_norm(&(a - projected))
}

/// `min_c ‖a + bc‖`.
pub fn dist_to_right_ideal(a: &Element, b: &Element) -> Result<f64> {
    a.shape().ensure_same(b.shape())?;
    let b_scale = b.op_norm();
    let dim = a.shape().embedding_dim();
    Ok(a.blocks()
        .iter()
        .zip(b.blocks())
        .map(|(ab, bb)| block_residual_norm(ab, bb, b_scale, dim))
        .fold(0.0, f64::max))
}

/// `a ⊥ b` decided by the distance formula: `dist(a, b𝔄) >= ‖a‖·(1 - tol)`.
/// True whenever `a = 0`.
pub fn strong_bj(a: &Element, b: &Element, tol: f64) -> Result<bool> {
    a.shape().ensure_same(b.shape())?;
    let norm = a.op_norm();
    if norm == 0.0 {
        return Ok(true);
    }
    Ok(dist_to_right_ideal(a, b)? >= norm * (1.0 - tol))
}

/// `a ⊥ b` decided by searching for a norm-attaining witness vector.
pub fn strong_bj_witness(a: &Element, b: &Element, tol: f64) -> Result<Option<OrthWitness>> {
    a.shape().ensure_same(b.shape())?;
    let norms = a.block_norms();
    let norm = norms.iter().copied().fold(0.0, f64::max);
    if norm == 0.0 {
        return Err(Error::WitnessUndefinedForZero);
    }
    let b_norm = b.op_norm();
    let accept = tol * norm * b_norm;
    let mut best: Option<OrthWitness> = None;
    for (i, &ni) in norms.iter().enumerate() {
        if ni < norm * (1.0 - tol::CLUSTER) {
            continue;
        }
        let subspace = a.max_singular_subspace(i, tol::CLUSTER)?;
        let ai = a.block(i);
        let restricted = b.block(i).adjoint() * ai * &subspace;
        let svd = linalg::svd(&restricted);
        let last = svd.singular_values.len() - 1;
        let smallest = svd.singular_values[last];
        if smallest > accept {
            continue;
        }
        let z = svd.v.column(last).into_owned();
        let x = &subspace * z;
        let x = &x / c(x.norm(), 0.0);
        let ax = ai * &x;
        let r1 = (ax.norm() - norm).abs();
        let r2 = (b.block(i).adjoint() * ax).norm();
        let candidate = OrthWitness { block: i, x, r1, r2 };
        if best.as_ref().is_none_or(|w| candidate.r2 < w.r2) {
            best = Some(candidate);
        }
    }
    Ok(best)
}

/// `a ⊥ b` and `b ⊥ a`.
pub fn mutual_strong_bj(a: &Element, b: &Element, tol: f64) -> Result<bool> {
    Ok(strong_bj(a, b, tol)? && strong_bj(b, a, tol)?)
}

/// Both directions, distances and a witness for `a ⊥ b`.
#[derive(Debug, Clone, Serialize)]
pub struct Decision {
    pub strong_ab: bool,
    pub strong_ba: bool,
    pub mutual: bool,
    pub dist_ab: f64,
    pub witness: Option<OrthWitness>,
}

pub fn decide(a: &Element, b: &Element, tol: f64) -> Result<Decision> {
    let strong_ab = strong_bj(a, b, tol)?;
    let strong_ba = strong_bj(b, a, tol)?;
    let witness = if a.op_norm() == 0.0 { None } else { strong_bj_witness(a, b, tol)? };
    Ok(Decision {
        strong_ab,
        strong_ba,
        mutual: strong_ab && strong_ba,
        dist_ab: dist_to_right_ideal(a, b)?,
        witness,
    })
}

/// Random mutually orthogonal pair `a = U D₁ V*`, `b = U D₂ V*` with
/// nonnegative diagonals of disjoint support in every block, so `b*a = 0`.
pub fn gen_mutual_pair(shape: &Shape, seed: u64) -> (Element, Element) {
    let mut a_blocks = Vec::with_capacity(shape.num_blocks());
    let mut b_blocks = Vec::with_capacity(shape.num_blocks());
    for (i, &n) in shape.dims().iter().enumerate() {
        let mut rng = rng_for(seed, i as u64);
        let u = random::haar_unitary(n, &mut rng);
        let v = random::haar_unitary(n, &mut rng);
        let mut d1 = CVec::zeros(n);
        let mut d2 = CVec::zeros(n);
        for j in 0..n {
            let value = rand::Rng::random_range(&mut rng, 0.1..1.0);
            // slot j goes to a, to b, or stays empty
            match rand::Rng::random_range(&mut rng, 0..3u8) {
                0 => d1[j] = c(value, 0.0),
                1 => d2[j] = c(value, 0.0),
                _ => {}
            }
        }
        let vt = v.adjoint();
        a_blocks.push(&u * CMat::from_diagonal(&d1) * &vt);
        b_blocks.push(&u * CMat::from_diagonal(&d2) * &vt);
    }
    (
        Element::new(shape.clone(), a_blocks).expect("block sizes follow shape"),
        Element::new(shape.clone(), b_blocks).expect("block sizes follow shape"),
    )
}

/// Random pair for comparing the two deciders, drawn from a mix of sources
/// selected by `seed`:
///
/// - `"generator"`: [`gen_mutual_pair`] with `a ≠ 0`, orthogonal in both directions;
/// - `"generic"`: independent Ginibre elements (almost never orthogonal);
/// - `"low_rank"`: Ginibre `a` and a `b` whose blocks have random rank, some zero;
/// - `"witness"`: `a` attains its norm on a one- or two-dimensional subspace of
///   one block and `b` is built so that `B_i* A_i x = 0` for some `x` there;
/// - `"near_miss"`: the same construction with `b` pushed off by `0.1`, which
///   leaves the pair clearly non-orthogonal.
pub fn sample_decision_pair(shape: &Shape, seed: u64) -> (&'static str, Element, Element) {
    let mut rng = rng_for(seed, 0xB1);
    match rand::Rng::random_range(&mut rng, 0..5u8) {
        0 => {
            let (a, b) = (0..)
                .map(|k| gen_mutual_pair(shape, random::derive_seed(seed, k)))
                .find(|(a, _)| !a.is_zero())
                .expect("some slot eventually goes to a");
            ("generator", a, b)
        }
        1 => {
            let a = Element::random(shape, rand::Rng::random(&mut rng));
            let b = Element::random(shape, rand::Rng::random(&mut rng));
            ("generic", a, b)
        }
        2 => {
            let a = Element::random(shape, rand::Rng::random(&mut rng));
            let blocks = shape
                .dims()
                .iter()
                .map(|&n| {
                    let r = rand::Rng::random_range(&mut rng, 0..=n);
                    random::ginibre(n, r, &mut rng) * random::ginibre(r, n, &mut rng)
                })
                .collect();
            ("low_rank", a, Element::new(shape.clone(), blocks).expect("block sizes follow shape"))
        }
        3 => {
            let (a, b) = norm_attaining_case(shape, &mut rng, 0.0);
            ("witness", a, b)
        }
        _ => {
            let (a, b) = norm_attaining_case(shape, &mut rng, 0.1);
            ("near_miss", a, b)
        }
    }
}

fn norm_attaining_case(shape: &Shape, rng: &mut random::Rng, eps: f64) -> (Element, Element) {
    let target = rand::Rng::random_range(rng, 0..shape.num_blocks());
    let mut a_blocks = Vec::with_capacity(shape.num_blocks());
    let mut b_blocks = Vec::with_capacity(shape.num_blocks());
    for (i, &n) in shape.dims().iter().enumerate() {
        let u = random::haar_unitary(n, rng);
        let v = random::haar_unitary(n, rng);
        let top = if i == target { rand::Rng::random_range(rng, 1..=n.min(2)) } else { 0 };
        let d = CVec::from_fn(n, |j, _| {
            if j < top {
                c(1.0, 0.0)
            } else {
                c(rand::Rng::random_range(rng, 0.0..0.9), 0.0)
            }
        });
        a_blocks.push(&u * CMat::from_diagonal(&d) * v.adjoint());
        let g = random::ginibre(n, n, rng);
        if i == target {
            let coeffs = random::unit_vector(top, rng);
            let y = u.columns(0, top) * coeffs;
            let g2 = random::gaussian_vector(n, rng);
            let b = (CMat::identity(n, n) - linalg::outer(&y, &y)) * g + linalg::outer(&y, &g2) * c(eps, 0.0);
            b_blocks.push(b);
        } else if rand::Rng::random_bool(rng, 0.3) {
            b_blocks.push(CMat::zeros(n, n));
        } else {
            b_blocks.push(g);
        }
    }
    (
        Element::new(shape.clone(), a_blocks).expect("block sizes follow shape"),
        Element::new(shape.clone(), b_blocks).expect("block sizes follow shape"),
    )
}

/// Result of [`bj_numeric`].
#[derive(Debug, Clone, Copy)]
pub struct NumericProbe {
    pub lambda: crate::algebra::C64,
    pub value: f64,
}

/// Numeric probe of plain BJ orthogonality: approximately minimizes
/// `‖a + λb‖` over `λ ∈ ℂ` by a coarse grid followed by pattern search.
/// The returned value is an upper bound for the true minimum.
pub fn bj_numeric(a: &Element, b: &Element) -> Result<NumericProbe> {
    a.shape().ensure_same(b.shape())?;
    let a_norm = a.op_norm();
    let b_norm = b.op_norm();
    let eval = |re: f64, im: f64| (a + &b.scale(c(re, im))).op_norm();
    let mut best = NumericProbe { lambda: c(0.0, 0.0), value: a_norm };
    if b_norm == 0.0 || a_norm == 0.0 {
        return Ok(best);
    }
    // |λ| >= 2‖a‖/‖b‖ gives ‖a + λb‖ >= ‖a‖
    let radius = 2.0 * a_norm / b_norm;
    let steps = 24;
    for i in 0..=steps {
        for j in 0..=steps {
            let re = -radius + 2.0 * radius * i as f64 / steps as f64;
            let im = -radius + 2.0 * radius * j as f64 / steps as f64;
            let value = eval(re, im);
            if value < best.value {
                best = NumericProbe { lambda: c(re, im), value };
            }
        }
    }
    let mut step = radius / steps as f64;
    while step > radius * 1e-10 {
        let mut moved = false;
        for (dr, di) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let re = best.lambda.re + dr * step;
            let im = best.lambda.im + di * step;
            let value = eval(re, im);
            if value < best.value {
                best = NumericProbe { lambda: c(re, im), value };
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok(best)
}

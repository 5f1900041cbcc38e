//! Named maps: the low-dimensional counterexamples and the standard
//! non-preservers used in tests, benches and the CLI gallery.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use super::RealLinearMap;
use crate::algebra::linalg::{c, CMat};
use crate::algebra::random::{self, rng_for};
use crate::algebra::{Element, Shape};

fn shape_of(dims: &[usize]) -> Shape {
    Shape::new(dims.to_vec()).expect("fixture shapes are valid")
}

/// Blockwise transpose `A ↦ Aᵀ`.
pub fn transpose_map(shape: &Shape) -> RealLinearMap {
    RealLinearMap::from_fn(shape, Element::transpose)
}

/// `(λ, μ) ↦ λ·(1, 1)` on `ℂ⊕ℂ`.
pub fn two_point_embedding() -> RealLinearMap {
    let s = shape_of(&[1, 1]);
    RealLinearMap::from_fn(&s, |a| {
        let l = a.block(0)[(0, 0)];
        Element::from_scalars(a.shape(), &[l, l]).expect("two blocks")
    })
}

/// `(λ, μ) ↦ (λ, 2μ)` on `ℂ⊕ℂ`.
pub fn c2_scaling() -> RealLinearMap {
    block_scaling(&shape_of(&[1, 1]), &[1.0, 2.0])
}

/// `A_i ↦ γ_i A_i` blockwise.
pub fn block_scaling(shape: &Shape, gammas: &[f64]) -> RealLinearMap {
    assert_eq!(gammas.len(), shape.num_blocks());
    RealLinearMap::from_fn(shape, |a| {
        let blocks = a.blocks().iter().zip(gammas).map(|(b, &g)| b * c(g, 0.0)).collect();
        Element::new(a.shape().clone(), blocks).expect("same shape")
    })
}

/// `A ↦ P A Q` on block `i`, identity on the other blocks.
pub fn left_right_map(shape: &Shape, i: usize, p: &CMat, q: &CMat) -> RealLinearMap {
    RealLinearMap::from_fn(shape, |a| {
        let mut out = a.clone();
        *out.block_mut(i) = p * a.block(i) * q;
        out
    })
}

/// `A ↦ Aᵀ Q` on block `i`, identity on the other blocks.
pub fn transpose_right_map(shape: &Shape, i: usize, q: &CMat) -> RealLinearMap {
    RealLinearMap::from_fn(shape, |a| {
        let mut out = a.clone();
        *out.block_mut(i) = a.block(i).transpose() * q;
        out
    })
}

/// Random real-linear map on `ℂ` (a real 2×2 matrix).
pub fn random_additive_on_c(seed: u64) -> RealLinearMap {
    let mut rng = rng_for(seed, 0);
    let m = DMatrix::from_fn(2, 2, |_, _| {
        let z: f64 = StandardNormal.sample(&mut rng);
        z
    });
    RealLinearMap::new(shape_of(&[1]), m).expect("2x2 map on ℂ")
}

/// `U · diag(cond, 1, …, 1) · V` with Haar `U, V`: condition number `cond`.
pub fn conditioned_matrix(n: usize, cond: f64, seed: u64) -> CMat {
    let mut rng = rng_for(seed, 0);
    let u = random::haar_unitary(n, &mut rng);
    let v = random::haar_unitary(n, &mut rng);
    let mut d = CMat::identity(n, n);
    d[(0, 0)] = c(cond, 0.0);
    u * d * v
}

/// Random invertible matrix (Ginibre, shifted away from singularity).
pub fn random_invertible(n: usize, seed: u64) -> CMat {
    let mut rng = rng_for(seed, 1);
    random::ginibre(n, n, &mut rng) + CMat::identity(n, n) * c(2.0, 0.0)
}

/// Every `(λ, μ) ∈ ℂ⊕ℂ` with `λ, μ ∈ {0, ±1, ±i, 1+i}`.
pub fn characterization_grid() -> Vec<Element> {
    let s = shape_of(&[1, 1]);
    let values = [c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 1.0)];
    values
        .iter()
        .flat_map(|&l| values.iter().map(move |&m| (l, m)))
        .map(|(l, m)| Element::from_scalars(&s, &[l, m]).expect("two blocks"))
        .collect()
}

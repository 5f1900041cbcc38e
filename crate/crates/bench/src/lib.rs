//! Inputs shared by the benchmarks, built once per parameter.

use bjorth_core::preservers::RealLinearMap;
use bjorth_core::{gen_mutual_pair, CanonicalForm, Element, SemilinearFactorization, Shape};

pub fn shape(dims: &[usize]) -> Shape {
    Shape::new(dims.to_vec()).expect("benchmark shapes are valid")
}

/// Shapes swept by the size-scaling groups, labelled by their tag.
pub fn size_sweep() -> Vec<Shape> {
    [&[2][..], &[4], &[8], &[2, 3], &[4, 4], &[1, 2, 3, 4]].iter().map(|d| shape(d)).collect()
}

/// `n` mutually orthogonal pairs with `a ≠ 0`, followed by `n` generic pairs.
pub fn decision_pairs(s: &Shape, n: usize) -> Vec<(Element, Element)> {
    let mut out: Vec<_> = (0..).map(|k| gen_mutual_pair(s, k)).filter(|(a, _)| !a.is_zero()).take(n).collect();
    out.extend((0..n as u64).map(|k| (Element::random(s, 2 * k), Element::random(s, 2 * k + 1))));
    out
}

pub fn canonical_map(s: &Shape, seed: u64) -> RealLinearMap {
    CanonicalForm::random(s, seed).to_map().expect("random forms are valid")
}

pub fn semilinear_map(s: &Shape, seed: u64) -> RealLinearMap {
    SemilinearFactorization::random(s, seed).to_map().expect("random factorizations are valid")
}

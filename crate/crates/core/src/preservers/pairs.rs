//! Families of mutually orthogonal pairs used by the preserver verifier.
//!
//! Every family is orthogonal by construction: `a` attains its norm at a
//! vector `x` in some block with `B* A x = 0`, and symmetrically for `b`.

use rand::Rng as _;

use crate::algebra::linalg::{self, c, outer, CMat, CVec};
use crate::algebra::random::{self, Rng};
use crate::algebra::{Element, Shape};

#[derive(Debug, Clone)]
pub struct LabeledPair {
    pub family: &'static str,
    pub a: Element,
    pub b: Element,
}

impl LabeledPair {
    fn new(family: &'static str, a: Element, b: Element) -> Self {
        Self { family, a, b }
    }
}

/// Randomized families, cycled in this order by the verifier.
pub const FAMILIES: &[&str] = &[
    "disjoint_diagonal",
    "rank_one",
    "shared_tail",
    "overlapping_diagonal",
    "zero_slot",
    "norm_versus_identity",
    "staircase",
];

fn block_element(shape: &Shape, i: usize, m: CMat) -> Element {
    Element::from_block(shape, i, m).expect("block index in range")
}

fn with_blocks(shape: &Shape, blocks: Vec<CMat>) -> Element {
    Element::new(shape.clone(), blocks).expect("block sizes follow shape")
}

fn e(n: usize, i: usize) -> CVec {
    linalg::basis_vector(n, i)
}

/// Deterministic pairs checked before any random family.
pub fn fixed_pairs(shape: &Shape) -> Vec<LabeledPair> {
    let mut out = Vec::new();
    for (s, &n) in shape.dims().iter().enumerate() {
        if n < 2 {
            continue;
        }
        // e₁⊗e₁ and e₂⊗(e₁+e₂): orthogonal ranges, transposes are not
        out.push(LabeledPair::new(
            "transpose_probe",
            block_element(shape, s, outer(&e(n, 0), &e(n, 0))),
            block_element(shape, s, outer(&e(n, 1), &(e(n, 0) + e(n, 1)))),
        ));
        // (e₁ + λe₂)⊗e₁ and (λ̄e₁ - e₂)⊗e₁
        for lambda in [c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)] {
            let x = e(n, 0) + e(n, 1) * lambda;
            let y = e(n, 0) * lambda.conj() - e(n, 1);
            out.push(LabeledPair::new(
                "orthogonal_ranges",
                block_element(shape, s, outer(&x, &e(n, 0))),
                block_element(shape, s, outer(&y, &e(n, 0))),
            ));
        }
        // rational projection E and I - E
        let w = (e(n, 0) + e(n, 1)) * c(0.5f64.sqrt(), 0.0);
        let proj = outer(&w, &w);
        out.push(LabeledPair::new(
            "projection_complement",
            block_element(shape, s, proj.clone()),
            block_element(shape, s, CMat::identity(n, n) - proj),
        ));
    }
    let k = shape.num_blocks();
    for i in 0..k {
        for j in (i + 1)..k {
            let ni = shape.block_dim(i);
            let nj = shape.block_dim(j);
            out.push(LabeledPair::new(
                "block_indicators",
                block_element(shape, i, CMat::identity(ni, ni)),
                block_element(shape, j, CMat::identity(nj, nj)),
            ));
        }
    }
    out
}

/// Samples family `index` (modulo the family count); `None` when the family
/// does not apply to `shape`.
pub fn sample(shape: &Shape, index: usize, rng: &mut Rng) -> Option<LabeledPair> {
    let family = FAMILIES[index % FAMILIES.len()];
    let pair = match family {
        "disjoint_diagonal" => Some(disjoint_diagonal(shape, rng)),
        "rank_one" => rank_one(shape, rng),
        "shared_tail" => shared_tail(shape, rng),
        "overlapping_diagonal" => overlapping_diagonal(shape, rng),
        "zero_slot" => zero_slot(shape, rng),
        "norm_versus_identity" => norm_versus_identity(shape, rng),
        "staircase" => staircase(shape, rng),
        _ => unreachable!("unknown family {family}"),
    }?;
    Some(LabeledPair { family, ..pair })
}

fn pick(rng: &mut Rng, candidates: &[usize]) -> Option<usize> {
    if candidates.is_empty() {
        None
    } else {
        Some(candidates[rng.random_range(0..candidates.len())])
    }
}

fn big_blocks(shape: &Shape, min: usize) -> Vec<usize> {
    (0..shape.num_blocks()).filter(|&i| shape.block_dim(i) >= min).collect()
}

/// Random matrix with operator norm exactly `norm`.
fn scaled(n: usize, norm: f64, rng: &mut Rng) -> CMat {
    let g = random::ginibre(n, n, rng);
    let s = linalg::spectral_norm(&g);
    g * c(norm / s, 0.0)
}

/// Contraction whose norm is 1 half of the time and uniform in `[0, 1)` otherwise.
fn contraction(n: usize, rng: &mut Rng) -> CMat {
    let norm = if rng.random_bool(0.5) { 1.0 } else { rng.random_range(0.0..1.0) };
    scaled(n, norm, rng)
}

fn unit_perp(x: &CVec, rng: &mut Rng) -> CVec {
    let g = random::gaussian_vector(x.len(), rng);
    let w = &g - x * x.dotc(&g);
    let n = w.norm();
    w / c(n, 0.0)
}

fn disjoint_diagonal(shape: &Shape, rng: &mut Rng) -> LabeledPair {
    let (a, b) = crate::bj::gen_mutual_pair(shape, rng.random());
    LabeledPair::new("disjoint_diagonal", a, b)
}

fn rank_one(shape: &Shape, rng: &mut Rng) -> Option<LabeledPair> {
    let k = shape.num_blocks();
    let big = big_blocks(shape, 2);
    let same_block = !big.is_empty() && (k == 1 || rng.random_bool(0.7));
    if same_block {
        let s = pick(rng, &big)?;
        let n = shape.block_dim(s);
        let x = random::unit_vector(n, rng);
        let xp = unit_perp(&x, rng);
        let y = random::gaussian_vector(n, rng);
        let z = random::gaussian_vector(n, rng);
        Some(LabeledPair::new(
            "rank_one",
            block_element(shape, s, outer(&x, &y)),
            block_element(shape, s, outer(&xp, &z)),
        ))
    } else if k >= 2 {
        let s = rng.random_range(0..k);
        let t = (s + rng.random_range(1..k)) % k;
        let (ns, nt) = (shape.block_dim(s), shape.block_dim(t));
        let a = outer(&random::gaussian_vector(ns, rng), &random::gaussian_vector(ns, rng));
        let b = outer(&random::gaussian_vector(nt, rng), &random::gaussian_vector(nt, rng));
        Some(LabeledPair::new("rank_one", block_element(shape, s, a), block_element(shape, t, b)))
    } else {
        None
    }
}

fn shared_tail(shape: &Shape, rng: &mut Rng) -> Option<LabeledPair> {
    let s = pick(rng, &big_blocks(shape, 2))?;
    let n = shape.block_dim(s);
    let x = random::unit_vector(n, rng);
    let xp = unit_perp(&x, rng);
    let w = random::unit_vector(n, rng);
    let wp = random::unit_vector(n, rng);
    let mut a_blocks = Vec::new();
    let mut b_blocks = Vec::new();
    for (r, &nr) in shape.dims().iter().enumerate() {
        if r == s {
            a_blocks.push(outer(&x, &w));
            b_blocks.push(outer(&xp, &wp));
        } else {
            let tail = contraction(nr, rng);
            a_blocks.push(tail.clone());
            b_blocks.push(tail);
        }
    }
    Some(LabeledPair::new("shared_tail", with_blocks(shape, a_blocks), with_blocks(shape, b_blocks)))
}

fn overlapping_diagonal(shape: &Shape, rng: &mut Rng) -> Option<LabeledPair> {
    let s = pick(rng, &big_blocks(shape, 2))?;
    let n = shape.block_dim(s);
    let p = rng.random_range(0..n);
    let q = (p + rng.random_range(1..n)) % n;
    let mut d1 = CVec::zeros(n);
    let mut d2 = CVec::zeros(n);
    for j in 0..n {
        if j == p {
            d1[j] = c(1.0, 0.0);
        } else if j == q {
            d2[j] = c(1.0, 0.0);
        } else {
            d1[j] = c(rng.random_range(0.0..0.9), 0.0);
            d2[j] = c(rng.random_range(0.0..0.9), 0.0);
        }
    }
    let u = random::haar_unitary(n, rng);
    let v = random::haar_unitary(n, rng).adjoint();
    let mut a_blocks = Vec::new();
    let mut b_blocks = Vec::new();
    for (r, &nr) in shape.dims().iter().enumerate() {
        if r == s {
            a_blocks.push(&u * CMat::from_diagonal(&d1) * &v);
            b_blocks.push(&u * CMat::from_diagonal(&d2) * &v);
        } else {
            a_blocks.push(contraction(nr, rng));
            b_blocks.push(contraction(nr, rng));
        }
    }
    Some(LabeledPair::new(
        "overlapping_diagonal",
        with_blocks(shape, a_blocks),
        with_blocks(shape, b_blocks),
    ))
}

/// `(w, …, 0_i, …, w)` against `(w, …, 0_j, …, w)` with unitary `w` blocks.
fn zero_slot(shape: &Shape, rng: &mut Rng) -> Option<LabeledPair> {
    let k = shape.num_blocks();
    if k < 2 {
        return None;
    }
    let i = rng.random_range(0..k);
    let j = (i + rng.random_range(1..k)) % k;
    let shared = rng.random_bool(0.5);
    let mut a_blocks = Vec::new();
    let mut b_blocks = Vec::new();
    for (r, &nr) in shape.dims().iter().enumerate() {
        let wa = random::haar_unitary(nr, rng) * random::unit_phase(rng);
        let wb = if shared { wa.clone() } else { contraction(nr, rng) };
        a_blocks.push(if r == i { CMat::zeros(nr, nr) } else { wa.clone() });
        b_blocks.push(if r == j {
            CMat::zeros(nr, nr)
        } else if r == i {
            random::haar_unitary(nr, rng)
        } else {
            wb
        });
    }
    Some(LabeledPair::new("zero_slot", with_blocks(shape, a_blocks), with_blocks(shape, b_blocks)))
}

/// `(T, x⊗x)` against `(0, I)` with `‖T‖ = 1`.
fn norm_versus_identity(shape: &Shape, rng: &mut Rng) -> Option<LabeledPair> {
    let k = shape.num_blocks();
    let s = pick(rng, &big_blocks(shape, 2))?;
    if k < 2 {
        return None;
    }
    let t = (s + rng.random_range(1..k)) % k;
    let n = shape.block_dim(s);
    let x = random::unit_vector(n, rng);
    let mut a_blocks = Vec::new();
    let mut b_blocks = Vec::new();
    for (r, &nr) in shape.dims().iter().enumerate() {
        if r == s {
            a_blocks.push(outer(&x, &x));
            b_blocks.push(CMat::identity(nr, nr) * random::unit_phase(rng));
        } else if r == t {
            a_blocks.push(scaled(nr, 1.0, rng));
            b_blocks.push(CMat::zeros(nr, nr));
        } else {
            a_blocks.push(contraction(nr, rng));
            b_blocks.push(contraction(nr, rng));
        }
    }
    Some(LabeledPair::new(
        "norm_versus_identity",
        with_blocks(shape, a_blocks),
        with_blocks(shape, b_blocks),
    ))
}

/// `(L, M, 0, …)` against `(0, M, N, …)` with `‖L‖ >= ‖M‖ = ‖N‖`.
fn staircase(shape: &Shape, rng: &mut Rng) -> Option<LabeledPair> {
    let k = shape.num_blocks();
    if k < 3 {
        return None;
    }
    let i = rng.random_range(0..k);
    let j = (i + rng.random_range(1..k)) % k;
    let l = (0..k).find(|&r| r != i && r != j).expect("k >= 3");
    let rho = 1.0;
    let big = if rng.random_bool(0.5) { rho } else { rng.random_range(rho..2.0 * rho) };
    let mut a_blocks = Vec::new();
    let mut b_blocks = Vec::new();
    for (r, &nr) in shape.dims().iter().enumerate() {
        if r == i {
            a_blocks.push(random::haar_unitary(nr, rng) * c(big, 0.0));
            b_blocks.push(CMat::zeros(nr, nr));
        } else if r == j {
            let m = random::haar_unitary(nr, rng) * random::unit_phase(rng);
            a_blocks.push(m.clone());
            b_blocks.push(m);
        } else if r == l {
            a_blocks.push(CMat::zeros(nr, nr));
            b_blocks.push(random::haar_unitary(nr, rng));
        } else {
            a_blocks.push(CMat::zeros(nr, nr));
            b_blocks.push(contraction(nr, rng));
        }
    }
    Some(LabeledPair::new("staircase", with_blocks(shape, a_blocks), with_blocks(shape, b_blocks)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random::rng_for;
    use crate::bj::mutual_strong_bj;
    use crate::tol;

    #[test]
    fn every_family_is_mutually_orthogonal() {
        for dims in [vec![3], vec![1, 3], vec![2, 3], vec![2, 2, 2], vec![1, 1, 1], vec![1, 2, 3]] {
            let shape = Shape::new(dims).unwrap();
            for p in fixed_pairs(&shape) {
                assert!(mutual_strong_bj(&p.a, &p.b, tol::DECISION).unwrap(), "{} on {shape}", p.family);
            }
            for t in 0..FAMILIES.len() * 30 {
                let mut rng = rng_for(99, t as u64);
                if let Some(p) = sample(&shape, t, &mut rng) {
                    assert!(
                        mutual_strong_bj(&p.a, &p.b, tol::DECISION).unwrap(),
                        "{} on {shape}, trial {t}",
                        p.family
                    );
                }
            }
        }
    }
}

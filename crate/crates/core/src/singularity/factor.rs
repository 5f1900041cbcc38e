//! Recovery of `A_i ↦ P_j·(A_i or A_iᵀ)^σ·Q_j` from a realified map.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::linalg::{self, c, CMat, C64};
use crate::algebra::random::{ginibre, rng_for, unit_phase, Rng};
use crate::algebra::{Element, Shape};
use crate::error::{Error, Result};
use crate::json::{complex_from_wire, complex_to_wire, matrix_from_wire, matrix_to_wire, ComplexWire, MatrixWire};
use crate::preservers::{block_images, RealLinearMap, StepFailure};
use crate::tol;

/// Per-output-block factor.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockFactor {
    Matrix { p: CMat, q: CMat, conjugate: bool, transpose: bool },
    Scalar { multiplier: C64, conjugate: bool },
}

impl BlockFactor {
    pub fn conjugate(&self) -> bool {
        match self {
            BlockFactor::Matrix { conjugate, .. } | BlockFactor::Scalar { conjugate, .. } => *conjugate,
        }
    }

    fn apply(&self, a: &CMat) -> CMat {
        match self {
            BlockFactor::Matrix { p, q, conjugate, transpose } => {
                let mut op = if *transpose { a.transpose() } else { a.clone() };
                if *conjugate {
                    op = op.conjugate();
                }
                p * op * q
            }
            BlockFactor::Scalar { multiplier, conjugate } => {
                let z = a[(0, 0)];
                CMat::from_element(1, 1, multiplier * if *conjugate { z.conj() } else { z })
            }
        }
    }

    /// Rescales `(P, Q) ↦ (λP, Q/λ)` so that `‖P‖_F = ‖Q‖_F` and the first
    /// entry of the first column of `P` with modulus above `1e-8` is real positive.
    fn normalized(self) -> Self {
        match self {
            BlockFactor::Matrix { p, q, conjugate, transpose } => {
                let mut lambda = c((q.norm() / p.norm()).sqrt(), 0.0);
                if let Some(z) = p.column(0).iter().copied().find(|z| z.norm() > 1e-8) {
                    lambda *= z.conj() / z.norm();
                }
                BlockFactor::Matrix { p: p * lambda, q: q / lambda, conjugate, transpose }
            }
            other => other,
        }
    }
}

/// Additive surjection `a ↦ ⊕_j P_j·op_j(a_{π[j]})·Q_j` where `op_j` is an
/// optional transpose followed by an optional conjugation.
#[derive(Debug, Clone, PartialEq)]
pub struct SemilinearFactorization {
    pub shape: Shape,
    /// Output block `j` reads input block `pi[j]`.
    pub pi: Vec<usize>,
    pub blocks: Vec<BlockFactor>,
}

impl SemilinearFactorization {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidFactorization(msg));
        let k = self.shape.num_blocks();
        if self.pi.len() != k || self.blocks.len() != k {
            return bad(format!("expected {k} blocks"));
        }
        let mut seen = vec![false; k];
        for (j, &src) in self.pi.iter().enumerate() {
            if src >= k || seen[src] {
                return bad(format!("pi {:?} is not a permutation", self.pi));
            }
            seen[src] = true;
            if self.shape.block_dim(src) != self.shape.block_dim(j) {
                return bad(format!("pi sends a block of size {} to size {}", self.shape.block_dim(src), self.shape.block_dim(j)));
            }
        }
        for (j, factor) in self.blocks.iter().enumerate() {
            let n = self.shape.block_dim(j);
            match factor {
                BlockFactor::Matrix { p, q, .. } => {
                    if n < 2 || p.shape() != (n, n) || q.shape() != (n, n) {
                        return bad(format!("block {j} needs {n}x{n} factors"));
                    }
                    for (name, m) in [("P", p), ("Q", q)] {
                        let sv = linalg::singular_values(m);
                        if !(sv[n - 1] > tol::RANK * sv[0] * n as f64) {
                            return bad(format!("{name} of block {j} is singular"));
                        }
                    }
                }
                BlockFactor::Scalar { multiplier, .. } => {
                    if n != 1 {
                        return bad(format!("block {j} of size {n} has a scalar factor"));
                    }
                    if !(multiplier.norm() > 0.0) {
                        return bad(format!("block {j} has a zero multiplier"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, a: &Element) -> Result<Element> {
        self.shape.ensure_same(a.shape())?;
        let blocks = self.blocks.iter().zip(&self.pi).map(|(f, &src)| f.apply(a.block(src))).collect();
        Element::new(self.shape.clone(), blocks)
    }

    pub fn to_map(&self) -> Result<RealLinearMap> {
        self.validate()?;
        Ok(RealLinearMap::from_fn(&self.shape, |a| self.apply(a).expect("shape checked")))
    }

    /// Random factorization with independent flags per block.
    pub fn random(shape: &Shape, seed: u64) -> Self {
        let mut rng = rng_for(seed, u64::MAX);
        let flags: Vec<(bool, bool)> = (0..shape.num_blocks()).map(|_| (rng.random_bool(0.5), rng.random_bool(0.5))).collect();
        Self::random_inner(shape, seed, |j| flags[j])
    }

    /// Random factorization with the same `(conjugate, transpose)` on every block.
    pub fn random_with_flags(shape: &Shape, seed: u64, conjugate: bool, transpose: bool) -> Self {
        Self::random_inner(shape, seed, |_| (conjugate, transpose))
    }

    fn random_inner(shape: &Shape, seed: u64, flags: impl Fn(usize) -> (bool, bool)) -> Self {
        let mut rng = rng_for(seed, u64::MAX - 1);
        let pi = size_respecting_permutation(shape, &mut rng);
        let blocks = (0..shape.num_blocks())
            .map(|j| {
                let n = shape.block_dim(j);
                let (conjugate, transpose) = flags(j);
                if n == 1 {
                    let multiplier = unit_phase(&mut rng) * rng.random_range(0.5..2.0);
                    return BlockFactor::Scalar { multiplier, conjugate };
                }
                let shift = CMat::identity(n, n) * c(2.0, 0.0);
                let p = ginibre(n, n, &mut rng) + &shift;
                let q = ginibre(n, n, &mut rng) + &shift;
                BlockFactor::Matrix { p, q, conjugate, transpose }.normalized()
            })
            .collect();
        Self { shape: shape.clone(), pi, blocks }
    }
}

fn size_respecting_permutation(shape: &Shape, rng: &mut Rng) -> Vec<usize> {
    let k = shape.num_blocks();
    let mut pi: Vec<usize> = (0..k).collect();
    let mut sizes = shape.dims().to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    for size in sizes {
        let slots: Vec<usize> = (0..k).filter(|&j| shape.block_dim(j) == size).collect();
        let mut shuffled = slots.clone();
        shuffled.shuffle(rng);
        for (&slot, &src) in slots.iter().zip(&shuffled) {
            pi[slot] = src;
        }
    }
    pi
}

#[derive(Debug, Clone, Error)]
pub enum FactorError {
    #[error("map is not surjective (numerical rank {rank} < {dim})")]
    NotSurjective { rank: usize, dim: usize },

    #[error("step {}: {}", .0.step, .0.reason)]
    Step(StepFailure),
}

impl From<StepFailure> for FactorError {
    fn from(f: StepFailure) -> Self {
        FactorError::Step(f)
    }
}

fn rank_one(m: &CMat, tol: f64) -> bool {
    let sv = linalg::singular_values(m);
    sv[0] > 0.0 && sv.get(1).is_none_or(|&s| s <= tol * sv[0])
}

/// Factors an additive singularity preserver into its semilinear normal form.
pub fn factor_singularity_preserver(m: &RealLinearMap, tol: f64) -> std::result::Result<SemilinearFactorization, FactorError> {
    let shape = m.shape().clone();
    let rank = m.numerical_rank(tol::RANK);
    if rank < shape.real_dim() {
        return Err(FactorError::NotSurjective { rank, dim: shape.real_dim() });
    }
    let m_norm = m.operator_norm();
    let target = block_images(m, tol)?;
    let k = shape.num_blocks();
    let mut pi = vec![0; k];
    for (i, &j) in target.iter().enumerate() {
        pi[j] = i;
    }

    let mut blocks = Vec::with_capacity(k);
    for j in 0..k {
        let i = pi[j];
        let n = shape.block_dim(j);
        let conjugate = !crate::preservers::linearity_type(m, i, j, tol, m_norm)?;
        let image = |r: usize, s: usize| -> CMat {
            let e = Element::matrix_unit(&shape, i, r, s).expect("indices in range");
            m.apply(&e).expect("shape matches").block(j).clone()
        };
        let unit = |r: usize, s: usize| Element::matrix_unit(&shape, i, r, s).ok();
        if n == 1 {
            blocks.push(BlockFactor::Scalar { multiplier: image(0, 0)[(0, 0)], conjugate });
            continue;
        }

        // step 3
        let m11 = image(0, 0);
        let m12 = image(0, 1);
        let m21 = image(1, 0);
        if !rank_one(&m11, tol) {
            return Err(StepFailure::new(3, format!("image of E_11 in block {i} is not rank one"), unit(0, 0)).into());
        }
        let shared_columns = |x: &CMat, y: &CMat| rank_one(&CMat::from_fn(n, 2 * n, |r, s| if s < n { x[(r, s)] } else { y[(r, s - n)] }), tol);
        let shared_rows = |x: &CMat, y: &CMat| rank_one(&CMat::from_fn(2 * n, n, |r, s| if r < n { x[(r, s)] } else { y[(r - n, s)] }), tol);
        let transpose = match (shared_columns(&m11, &m12), shared_rows(&m11, &m12)) {
            (true, false) if shared_rows(&m11, &m21) => false,
            (false, true) if shared_columns(&m11, &m21) => true,
            _ => {
                return Err(StepFailure::new(
                    3,
                    format!("images of E_11, E_12, E_21 in block {i} share neither a column nor a row space consistently"),
                    unit(0, 1),
                )
                .into())
            }
        };

        // step 4
        let oriented = |r: usize, s: usize| if transpose { image(s, r) } else { image(r, s) };
        let svd = linalg::svd(&m11);
        let s1 = svd.singular_values[0];
        let p1 = svd.u.column(0) * c(s1, 0.0);
        let w = svd.v.column(0).into_owned();
        let p1_sq = p1.norm_squared();
        let mut p = CMat::zeros(n, n);
        let mut q = CMat::zeros(n, n);
        for r in 0..n {
            p.set_column(r, &(oriented(r, 0) * &w));
            q.set_row(r, &((p1.adjoint() * oriented(0, r)) / c(p1_sq, 0.0)));
        }
        for (name, f) in [("P", &p), ("Q", &q)] {
            let sv = linalg::singular_values(f);
            if !(sv[n - 1] > tol::RANK * sv[0] * n as f64) {
                return Err(StepFailure::new(4, format!("assembled {name} for block {i} is singular"), unit(0, 0)).into());
            }
        }
        blocks.push(BlockFactor::Matrix { p, q, conjugate, transpose }.normalized());
    }

    // step 5
    let factorization = SemilinearFactorization { shape: shape.clone(), pi, blocks };
    let rebuilt = RealLinearMap::from_fn(&shape, |a| factorization.apply(a).expect("shape matches"));
    let diff = rebuilt.matrix() - m.matrix();
    let svd = linalg::svd_of(&diff);
    let err = svd.singular_values[0];
    if err > tol * m_norm {
        let direction = svd.v.column(0).into_owned();
        return Err(StepFailure::new(
            5,
            format!("assembled factorization does not reproduce the map (relative error {:.3e})", err / m_norm),
            Element::from_realified(&shape, direction.as_slice()).ok(),
        )
        .into());
    }
    Ok(factorization)
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum BlockWire {
    Matrix {
        #[serde(rename = "P")]
        p: MatrixWire,
        #[serde(rename = "Q")]
        q: MatrixWire,
        conjugate: bool,
        transpose: bool,
    },
    Scalar {
        multiplier: ComplexWire,
        conjugate: bool,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorizationWire {
    shape: Shape,
    pi: Vec<usize>,
    blocks: Vec<BlockWire>,
}

impl Serialize for SemilinearFactorization {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| match b {
                BlockFactor::Matrix { p, q, conjugate, transpose } => BlockWire::Matrix {
                    p: matrix_to_wire(p),
                    q: matrix_to_wire(q),
                    conjugate: *conjugate,
                    transpose: *transpose,
                },
                BlockFactor::Scalar { multiplier, conjugate } => {
                    BlockWire::Scalar { multiplier: complex_to_wire(*multiplier), conjugate: *conjugate }
                }
            })
            .collect();
        FactorizationWire { shape: self.shape.clone(), pi: self.pi.clone(), blocks }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SemilinearFactorization {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = FactorizationWire::deserialize(deserializer)?;
        let blocks = wire
            .blocks
            .into_iter()
            .map(|b| match b {
                BlockWire::Matrix { p, q, conjugate, transpose } => Ok(BlockFactor::Matrix {
                    p: matrix_from_wire(&p)?,
                    q: matrix_from_wire(&q)?,
                    conjugate,
                    transpose,
                }),
                BlockWire::Scalar { multiplier, conjugate } => {
                    Ok(BlockFactor::Scalar { multiplier: complex_from_wire(multiplier), conjugate })
                }
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let out = SemilinearFactorization { shape: wire.shape, pi: wire.pi, blocks };
        out.validate().map_err(D::Error::custom)?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preservers::{fixtures, verify_singularity_preserver};

    fn shape(d: &[usize]) -> Shape {
        Shape::new(d.to_vec()).unwrap()
    }

    #[test]
    fn round_trip_every_flag_combination() {
        for dims in [vec![3], vec![2, 2], vec![1, 3], vec![4]] {
            for (seed, (conjugate, transpose)) in [(false, false), (true, false), (false, true), (true, true)].into_iter().enumerate() {
                let f = SemilinearFactorization::random_with_flags(&shape(&dims), seed as u64 + 7, conjugate, transpose);
                let m = f.to_map().unwrap();
                let g = factor_singularity_preserver(&m, 1e-8).unwrap();
                assert!(g.to_map().unwrap().distance(&m).unwrap() <= 1e-8 * m.operator_norm());
                assert_eq!(g.pi, f.pi);
                for (x, y) in g.blocks.iter().zip(&f.blocks) {
                    assert_eq!(x.conjugate(), y.conjugate());
                    if let (BlockFactor::Matrix { p: p1, q: q1, transpose: t1, .. }, BlockFactor::Matrix { p: p2, q: q2, transpose: t2, .. }) = (x, y) {
                        assert_eq!(t1, t2);
                        assert!((p1 - p2).norm() < 1e-8 * p2.norm());
                        assert!((q1 - q2).norm() < 1e-8 * q2.norm());
                    }
                }
            }
        }
    }

    #[test]
    fn transpose_on_m3_is_exact() {
        let g = factor_singularity_preserver(&fixtures::transpose_map(&shape(&[3])), 1e-8).unwrap();
        let BlockFactor::Matrix { p, q, conjugate, transpose } = &g.blocks[0] else { panic!("matrix block") };
        assert!(*transpose && !*conjugate);
        let id = CMat::identity(3, 3);
        assert!((p - &id).norm() < 1e-12 && (q - &id).norm() < 1e-12);
    }

    #[test]
    fn two_point_embedding_is_rejected() {
        assert!(matches!(
            factor_singularity_preserver(&fixtures::two_point_embedding(), 1e-8),
            Err(FactorError::NotSurjective { .. })
        ));
    }

    #[test]
    fn realized_maps_preserve_singularity() {
        for seed in 0..4 {
            let m = SemilinearFactorization::random(&shape(&[1, 3]), seed).to_map().unwrap();
            assert!(verify_singularity_preserver(&m, 50, seed).unwrap().is_pass());
        }
    }

    #[test]
    fn json_round_trip() {
        let f = SemilinearFactorization::random(&shape(&[1, 2]), 5);
        let text = crate::json::to_string(&f).unwrap();
        assert!(text.contains("\"kind\":\"scalar\"") && text.contains("\"P\""));
        let back: SemilinearFactorization = crate::json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }
}

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::RealLinearMap;
use crate::algebra::linalg::{c, unitarity_defect};
use crate::algebra::random::rng_for;
use crate::algebra::{Element, Shape};
use crate::error::{Error, Result};
use crate::tol;

/// Canonical preserver `a ↦ γ·u·π(a)†·v`.
///
/// `π(a)` has block `j` equal to `a_{pi[j]}` (indices are 0-based), and `†`
/// acts on block `j` of `π(a)` as the identity when `j ∈ linear_blocks` and as
/// entrywise conjugation otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalForm {
    pub gamma: f64,
    pub u: Element,
    pub v: Element,
    pub pi: Vec<usize>,
    #[serde(rename = "J")]
    pub linear_blocks: Vec<usize>,
}

impl CanonicalForm {
    pub fn shape(&self) -> &Shape {
        self.u.shape()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidCanonicalForm(msg));
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return bad(format!("gamma must be positive, got {}", self.gamma));
        }
        let shape = self.u.shape();
        if self.v.shape() != shape {
            return bad("u and v have different shapes".into());
        }
        for (name, w) in [("u", &self.u), ("v", &self.v)] {
            for (i, b) in w.blocks().iter().enumerate() {
                let defect = unitarity_defect(b);
                if !(defect <= tol::UNITARY) {
                    return bad(format!("{name} block {i} is not unitary (defect {defect:.3e})"));
                }
            }
        }
        let k = shape.num_blocks();
        let mut seen = vec![false; k];
        if self.pi.len() != k {
            return bad(format!("pi must have {k} entries"));
        }
        for (j, &src) in self.pi.iter().enumerate() {
            if src >= k || seen[src] {
                return bad(format!("pi {:?} is not a permutation", self.pi));
            }
            seen[src] = true;
            if shape.block_dim(src) != shape.block_dim(j) {
                return bad(format!("pi sends block {src} of size {} to size {}", shape.block_dim(src), shape.block_dim(j)));
            }
        }
        if self.linear_blocks.iter().any(|&j| j >= k) {
            return bad("J refers to a missing block".into());
        }
        Ok(())
    }

    pub fn is_linear_on(&self, j: usize) -> bool {
        self.linear_blocks.contains(&j)
    }

    pub fn apply(&self, a: &Element) -> Result<Element> {
        self.shape().ensure_same(a.shape())?;
        let blocks = (0..self.shape().num_blocks())
            .map(|j| {
                let src = a.block(self.pi[j]);
                let dag = if self.is_linear_on(j) { src.clone() } else { src.conjugate() };
                self.u.block(j) * dag * self.v.block(j) * c(self.gamma, 0.0)
            })
            .collect();
        Element::new(self.shape().clone(), blocks)
    }

    /// Random canonical form: `γ ∈ [0.5, 2)`, Haar `u, v`, a random
    /// size-respecting permutation and a random `J`.
    pub fn random(shape: &Shape, seed: u64) -> Self {
        let mut rng = rng_for(seed, u64::MAX);
        let gamma = rng.random_range(0.5..2.0);
        let k = shape.num_blocks();
        let mut pi: Vec<usize> = (0..k).collect();
        let mut sizes: Vec<usize> = shape.dims().to_vec();
        sizes.sort_unstable();
        sizes.dedup();
        for size in sizes {
            let slots: Vec<usize> = (0..k).filter(|&j| shape.block_dim(j) == size).collect();
            let mut shuffled = slots.clone();
            shuffled.shuffle(&mut rng);
            for (&slot, &src) in slots.iter().zip(&shuffled) {
                pi[slot] = src;
            }
        }
        let linear_blocks = (0..k).filter(|_| rng.random_bool(0.5)).collect();
        Self {
            gamma,
            u: Element::random_unitary(shape, seed.wrapping_mul(2).wrapping_add(1)),
            v: Element::random_unitary(shape, seed.wrapping_mul(2).wrapping_add(2)),
            pi,
            linear_blocks,
        }
    }

    /// Applies the phase gauge `(u_j, v_j) ↦ (e^{iθ}u_j, e^{-iθ}v_j)` that makes
    /// the first entry of `v_j` (in row-major order) with modulus above `1e-8`
    /// real and positive.
    pub fn gauge_fixed(&self) -> Self {
        let mut out = self.clone();
        for j in 0..self.shape().num_blocks() {
            let vb = self.v.block(j);
            let pivot = vb.transpose().iter().copied().find(|z| z.norm() > 1e-8);
            if let Some(z) = pivot {
                let phase = z / z.norm();
                *out.v.block_mut(j) = vb * phase.conj();
                *out.u.block_mut(j) = self.u.block(j) * phase;
            }
        }
        out
    }

    pub fn to_map(&self) -> Result<RealLinearMap> {
        from_canonical(self)
    }
}

/// Realified matrix of `a ↦ γ·u·π(a)†·v`.
pub fn from_canonical(form: &CanonicalForm) -> Result<RealLinearMap> {
    form.validate()?;
    Ok(RealLinearMap::from_fn(form.shape(), |a| form.apply(a).expect("shape checked")))
}

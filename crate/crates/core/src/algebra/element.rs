use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DVector;

use super::linalg::{self, c, CMat, CVec, Svd, C64};
use super::random::{self, rng_for};
use super::shape::Shape;
use crate::error::{Error, Result};

/// An element `a = A_1 ⊕ ... ⊕ A_k` of the block algebra.
///
/// The binary operators (`+`, `-`, `*`) panic on mismatched shapes; use the
/// `checked_*` methods when the shapes come from untrusted input.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    shape: Shape,
    blocks: Vec<CMat>,
}

/// Rank-one element `x ⊗ y = x·y*` supported on a single block.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneSpec {
    pub block: usize,
    pub x: CVec,
    pub y: CVec,
}

/// Sorted SVD of one block.
pub type BlockSvd = Svd;

impl Element {
    pub fn new(shape: Shape, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len() != shape.num_blocks() {
            return Err(Error::Malformed(format!(
                "shape {shape} has {} blocks, got {}",
                shape.num_blocks(),
                blocks.len()
            )));
        }
        for (i, (b, &n)) in blocks.iter().zip(shape.dims()).enumerate() {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::Malformed(format!(
                    "block {i} is {}x{}, expected {n}x{n}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self { shape, blocks })
    }

    pub fn zeros(shape: &Shape) -> Self {
        let blocks = shape.dims().iter().map(|&n| CMat::zeros(n, n)).collect();
        Self { shape: shape.clone(), blocks }
    }

    pub fn identity(shape: &Shape) -> Self {
        let blocks = shape.dims().iter().map(|&n| CMat::identity(n, n)).collect();
        Self { shape: shape.clone(), blocks }
    }

    /// Element equal to `m` in block `i` and zero elsewhere.
    pub fn from_block(shape: &Shape, i: usize, m: CMat) -> Result<Self> {
        shape.check_block(i)?;
        let mut e = Self::zeros(shape);
        let n = shape.block_dim(i);
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Malformed(format!("block {i} must be {n}x{n}")));
        }
        e.blocks[i] = m;
        Ok(e)
    }

    /// Element with scalar entries `λ_i · I_{n_i}`.
    pub fn from_scalars(shape: &Shape, scalars: &[C64]) -> Result<Self> {
        if scalars.len() != shape.num_blocks() {
            return Err(Error::Malformed("one scalar per block is required".into()));
        }
        let blocks = shape
            .dims()
            .iter()
            .zip(scalars)
            .map(|(&n, &s)| CMat::identity(n, n) * s)
            .collect();
        Ok(Self { shape: shape.clone(), blocks })
    }

    /// Matrix unit `E_{rs}` in block `i`.
    pub fn matrix_unit(shape: &Shape, i: usize, r: usize, s: usize) -> Result<Self> {
        shape.check_block(i)?;
        let n = shape.block_dim(i);
        if r >= n || s >= n {
            return Err(Error::Malformed(format!("matrix unit ({r},{s}) outside {n}x{n} block")));
        }
        let mut m = CMat::zeros(n, n);
        m[(r, s)] = c(1.0, 0.0);
        Self::from_block(shape, i, m)
    }

    pub fn rank_one(shape: &Shape, spec: &RankOneSpec) -> Result<Self> {
        shape.check_block(spec.block)?;
        let n = shape.block_dim(spec.block);
        if spec.x.len() != n || spec.y.len() != n {
            return Err(Error::Malformed(format!("rank-one vectors must have length {n}")));
        }
        Self::from_block(shape, spec.block, linalg::outer(&spec.x, &spec.y))
    }

    /// Unit vector of the realified coordinate system.
    pub fn real_basis(shape: &Shape, index: usize) -> Self {
        let (b, r, s, imag) = shape.locate_real(index);
        let mut e = Self::zeros(shape);
        e.blocks[b][(r, s)] = if imag { c(0.0, 1.0) } else { c(1.0, 0.0) };
        e
    }

    /// Independent standard complex Gaussian entries; block `i` draws from
    /// the stream `(seed, i)`.
    pub fn random(shape: &Shape, seed: u64) -> Self {
        let blocks = shape
            .dims()
            .iter()
            .enumerate()
            .map(|(i, &n)| random::ginibre(n, n, &mut rng_for(seed, i as u64)))
            .collect();
        Self { shape: shape.clone(), blocks }
    }

    /// Blockwise Haar unitary.
    pub fn random_unitary(shape: &Shape, seed: u64) -> Self {
        let blocks = shape
            .dims()
            .iter()
            .enumerate()
            .map(|(i, &n)| random::haar_unitary(n, &mut rng_for(seed, i as u64)))
            .collect();
        Self { shape: shape.clone(), blocks }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMat {
        &self.blocks[i]
    }

    pub fn block_mut(&mut self, i: usize) -> &mut CMat {
        &mut self.blocks[i]
    }

    pub fn into_blocks(self) -> Vec<CMat> {
        self.blocks
    }

    /// Block-diagonal `N×N` matrix.
    pub fn embed(&self) -> CMat {
        let n = self.shape.embedding_dim();
        let mut out = CMat::zeros(n, n);
        let mut offset = 0;
        for b in &self.blocks {
            let k = b.nrows();
            out.view_mut((offset, offset), (k, k)).copy_from(b);
            offset += k;
        }
        out
    }

    pub fn block_norms(&self) -> Vec<f64> {
        self.blocks.iter().map(linalg::spectral_norm).collect()
    }

    /// Operator norm `max_i σ_max(A_i)`.
    pub fn op_norm(&self) -> f64 {
        self.block_norms().into_iter().fold(0.0, f64::max)
    }

    /// Sum of numerical block ranks. Singular values below
    /// `RANK · ‖a‖ · N` are treated as zero, the same rule applied to `embed(a)`.
    pub fn rank(&self) -> usize {
        let values: Vec<Vec<f64>> = self.blocks.iter().map(linalg::singular_values).collect();
        let scale = values.iter().filter_map(|s| s.first().copied()).fold(0.0, f64::max);
        let n = self.shape.embedding_dim();
        values.iter().map(|s| linalg::rank_from_values(s, scale, n)).sum()
    }

    pub fn block_ranks(&self) -> Vec<usize> {
        let values: Vec<Vec<f64>> = self.blocks.iter().map(linalg::singular_values).collect();
        let scale = values.iter().filter_map(|s| s.first().copied()).fold(0.0, f64::max);
        let n = self.shape.embedding_dim();
        values.iter().map(|s| linalg::rank_from_values(s, scale, n)).collect()
    }

    pub fn is_invertible(&self) -> bool {
        self.block_ranks().iter().zip(self.shape.dims()).all(|(r, n)| r == n)
    }

    pub fn is_singular(&self) -> bool {
        !self.is_invertible()
    }

    pub fn svd_block(&self, i: usize) -> Result<BlockSvd> {
        self.shape.check_block(i)?;
        Ok(linalg::svd(&self.blocks[i]))
    }

    /// Orthonormal basis (as columns) of the right singular subspace for
    /// `σ_max(A_i)`: every right singular vector with `σ_j >= σ_max·(1 - cluster_tol)`.
    pub fn max_singular_subspace(&self, i: usize, cluster_tol: f64) -> Result<CMat> {
        let svd = self.svd_block(i)?;
        let top = svd.singular_values[0];
        if top == 0.0 {
            return Err(Error::NoNormAttainingDirection { block: i });
        }
        let cut = top * (1.0 - cluster_tol);
        let count = svd.singular_values.iter().take_while(|&&s| s >= cut).count();
        Ok(svd.v.columns(0, count).into_owned())
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(|b| b.adjoint())
    }

    /// Entrywise complex conjugation in the standard basis.
    pub fn conj(&self) -> Self {
        self.map_blocks(|b| b.conjugate())
    }

    /// Blockwise transpose.
    pub fn transpose(&self) -> Self {
        self.map_blocks(|b| b.transpose())
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map_blocks(|b| b * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn map_blocks(&self, f: impl Fn(&CMat) -> CMat) -> Self {
        Self { shape: self.shape.clone(), blocks: self.blocks.iter().map(f).collect() }
    }

    fn zip_blocks(&self, other: &Self, f: impl Fn(&CMat, &CMat) -> CMat) -> Result<Self> {
        self.shape.ensure_same(&other.shape)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        Ok(Self { shape: self.shape.clone(), blocks })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a - b)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a * b)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|z| *z == c(0.0, 0.0)))
    }

    /// Largest entrywise modulus difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.shape.ensure_same(&other.shape)?;
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max))
    }

    /// Realified coordinates: block-major, then row-major, real part before
    /// imaginary part.
    pub fn realify(&self) -> DVector<f64> {
        let mut out = Vec::with_capacity(self.shape.real_dim());
        for b in &self.blocks {
            for r in 0..b.nrows() {
                for s in 0..b.ncols() {
                    out.push(b[(r, s)].re);
                    out.push(b[(r, s)].im);
                }
            }
        }
        DVector::from_vec(out)
    }

    pub fn from_realified(shape: &Shape, coords: &[f64]) -> Result<Self> {
        if coords.len() != shape.real_dim() {
            return Err(Error::Malformed(format!(
                "expected {} realified coordinates, got {}",
                shape.real_dim(),
                coords.len()
            )));
        }
        let mut it = coords.chunks_exact(2);
        let blocks = shape
            .dims()
            .iter()
            .map(|&n| {
                let mut m = CMat::zeros(n, n);
                for r in 0..n {
                    for s in 0..n {
                        let pair = it.next().expect("length checked");
                        m[(r, s)] = c(pair[0], pair[1]);
                    }
                }
                m
            })
            .collect();
        Ok(Self { shape: shape.clone(), blocks })
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.checked_add(rhs).expect("shape mismatch in Element + Element")
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.checked_sub(rhs).expect("shape mismatch in Element - Element")
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.checked_mul(rhs).expect("shape mismatch in Element * Element")
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale_real(-1.0)
    }
}

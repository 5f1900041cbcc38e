//! Dense complex linear algebra helpers shared by the algebra types.

use nalgebra::{Complex, ComplexField, DMatrix, DVector, Scalar};

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Singular value decomposition with singular values sorted descending.
///
/// `u` and `v` hold the left and right singular vectors as columns, so that
/// `m = u · diag(σ) · v*`.
#[derive(Debug, Clone)]
pub struct Svd<T: Scalar = C64> {
    pub singular_values: Vec<f64>,
    pub u: DMatrix<T>,
    pub v: DMatrix<T>,
}

pub fn svd(m: &CMat) -> Svd {
    svd_of(m)
}

/// SVD through LAPACK's `?gesvd`.
///
/// nalgebra 0.35's own SVD returns wrong complex factorizations for some exactly
/// rank-deficient inputs (a rank-one 3×3 residual came back with backward
/// error 0.13), and rank-deficient blocks are the normal case here.
pub fn svd_of<T>(m: &DMatrix<T>) -> Svd<T>
where
    T: ComplexField<RealField = f64> + ndarray_linalg::Lapack + ndarray_linalg::Scalar<Real = f64>,
{
    use ndarray_linalg::SVD;

    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Svd { singular_values: Vec::new(), u: DMatrix::zeros(rows, 0), v: DMatrix::zeros(cols, 0) };
    }
    let array = ndarray::Array2::from_shape_fn((rows, cols), |(r, s)| m[(r, s)]);
    let (u, values, vt) = array.svd(true, true).expect("LAPACK gesvd on a finite matrix");
    let u = u.expect("left singular vectors requested");
    let vt = vt.expect("right singular vectors requested");
    Svd {
        singular_values: values.to_vec(),
        u: DMatrix::from_fn(rows, k, |r, s| u[(r, s)]),
        v: DMatrix::from_fn(cols, k, |r, s| vt[(s, r)].conjugate()),
    }
}

/// Singular values only, descending.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    svd_of(m).singular_values
}

pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Number of singular values above `RANK · scale · dim`.
pub fn rank_from_values(values: &[f64], scale: f64, dim: usize) -> usize {
    let threshold = tol::RANK * scale * dim as f64;
    values.iter().filter(|&&s| s > threshold).count()
}

/// Numerical rank of a single matrix relative to its own largest singular value.
pub fn numerical_rank(m: &CMat) -> usize {
    let s = singular_values(m);
    let scale = s.first().copied().unwrap_or(0.0);
    rank_from_values(&s, scale, m.nrows().max(m.ncols()))
}

/// `max |(U*U - I)_{ij}|`.
pub fn unitarity_defect(m: &CMat) -> f64 {
    let n = m.ncols();
    let gram = m.adjoint() * m;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - c(target, 0.0)).norm());
        }
    }
    worst
}

/// Rank-one matrix `x ⊗ y = x·y*`, mapping `z ↦ ⟨z, y⟩ x`.
pub fn outer(x: &CVec, y: &CVec) -> CMat {
    x * y.adjoint()
}

pub fn basis_vector(n: usize, i: usize) -> CVec {
    let mut e = CVec::zeros(n);
    e[i] = c(1.0, 0.0);
    e
}

/// Unit vector perpendicular to `x`.
///
/// `x/‖x‖` is completed with the standard basis vector at the coordinate where
/// `|x_p|` is smallest (first such index on ties) and orthonormalized; the second
/// Gram-Schmidt vector is returned.
pub fn perp_unit(x: &CVec) -> Result<CVec> {
    let n = x.len();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let norm = x.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let unit = x / c(norm, 0.0);
    let pivot = (0..n)
        .min_by(|&i, &j| unit[i].norm().total_cmp(&unit[j].norm()))
        .expect("n >= 2");
    let e = basis_vector(n, pivot);
    let mut w = &e - &unit * unit.dotc(&e);
    // one re-orthogonalization pass
    w -= &unit * unit.dotc(&w);
    let wn = w.norm();
    Ok(w / c(wn, 0.0))
}

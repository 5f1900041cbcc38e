use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::algebra::linalg;
use crate::algebra::random::rng_for;
use crate::algebra::{Element, Shape};
use crate::error::{Error, Result};
use crate::tol;

/// Real-linear map on the realified coordinates of an algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct RealLinearMap {
    shape: Shape,
    matrix: DMatrix<f64>,
}

impl RealLinearMap {
    pub fn new(shape: Shape, matrix: DMatrix<f64>) -> Result<Self> {
        let d = shape.real_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Malformed(format!(
                "map matrix for shape {shape} must be {d}x{d}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { shape, matrix })
    }

    pub fn identity(shape: &Shape) -> Self {
        let d = shape.real_dim();
        Self { shape: shape.clone(), matrix: DMatrix::identity(d, d) }
    }

    /// Tabulates a real-linear `f` on the realified basis.
    pub fn from_fn(shape: &Shape, f: impl Fn(&Element) -> Element) -> Self {
        let d = shape.real_dim();
        let mut matrix = DMatrix::zeros(d, d);
        for j in 0..d {
            let image = f(&Element::real_basis(shape, j));
            assert_eq!(image.shape(), shape, "map must preserve the shape");
            matrix.set_column(j, &image.realify());
        }
        Self { shape: shape.clone(), matrix }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, a: &Element) -> Result<Element> {
        self.shape.ensure_same(a.shape())?;
        let image: DVector<f64> = &self.matrix * a.realify();
        Element::from_realified(&self.shape, image.as_slice())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &RealLinearMap) -> Result<Self> {
        self.shape.ensure_same(&inner.shape)?;
        Ok(Self { shape: self.shape.clone(), matrix: &self.matrix * &inner.matrix })
    }

    pub fn singular_values(&self) -> Vec<f64> {
        linalg::svd_of(&self.matrix).singular_values
    }

    pub fn numerical_rank(&self, tol: f64) -> usize {
        let s = self.singular_values();
        let top = s.first().copied().unwrap_or(0.0);
        let threshold = tol * top * self.shape.real_dim() as f64;
        s.iter().filter(|&&v| v > threshold).count()
    }

    /// Surjective iff the realified matrix has full numerical rank.
    pub fn is_surjection(&self, tol: f64) -> bool {
        self.numerical_rank(tol) == self.shape.real_dim()
    }

    pub(crate) fn ensure_surjective(&self) -> Result<()> {
        let rank = self.numerical_rank(tol::RANK);
        let dim = self.shape.real_dim();
        if rank == dim {
            Ok(())
        } else {
            Err(Error::NotSurjective { rank, dim })
        }
    }

    /// Spectral norm of the realified matrix.
    pub fn operator_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// Spectral norm of the realified difference.
    pub fn distance(&self, other: &RealLinearMap) -> Result<f64> {
        self.shape.ensure_same(&other.shape)?;
        let diff = &self.matrix - &other.matrix;
        Ok(linalg::svd_of(&diff).singular_values.first().copied().unwrap_or(0.0))
    }

    /// Adds i.i.d. Gaussian noise of standard deviation `scale` to every entry.
    pub fn perturbed(&self, scale: f64, seed: u64) -> Self {
        let mut rng = rng_for(seed, 0);
        let noise = DMatrix::from_fn(self.matrix.nrows(), self.matrix.ncols(), |_, _| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * scale
        });
        Self { shape: self.shape.clone(), matrix: &self.matrix + noise }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapWire {
    shape: Shape,
    matrix: Vec<Vec<f64>>,
}

impl Serialize for RealLinearMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = (0..self.matrix.nrows())
            .map(|r| self.matrix.row(r).iter().copied().collect())
            .collect();
        MapWire { shape: self.shape.clone(), matrix: rows }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RealLinearMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = MapWire::deserialize(d)?;
        let n = wire.matrix.len();
        if wire.matrix.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("map matrix must be square"));
        }
        let flat: Vec<f64> = wire.matrix.into_iter().flatten().collect();
        let matrix = DMatrix::from_row_slice(n, n, &flat);
        RealLinearMap::new(wire.shape, matrix).map_err(serde::de::Error::custom)
    }
}

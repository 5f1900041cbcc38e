use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::linalg::{c, CMat, C64};
use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::json::{complex_to_wire, ComplexWire};

/// Largest interpolation degree accepted. The Vandermonde system on
/// `0, 1, …, d` loses roughly `d` decimal digits, so beyond 12 the
/// coefficients stop being trustworthy.
pub const MAX_DEGREE: usize = 12;

/// Relative size below which a top coefficient is treated as zero.
const DEGREE_TOL: f64 = 1e-9;

/// `p ↦ det(pF + T)` as a polynomial, coefficients from low to high degree.
#[derive(Debug, Clone)]
pub struct ShiftPolynomial {
    pub coefficients: Vec<C64>,
}

#[derive(Serialize)]
struct PolynomialWire {
    coefficients: Vec<ComplexWire>,
    degree: Option<usize>,
}

impl Serialize for ShiftPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialWire {
            coefficients: self.coefficients.iter().map(|&z| complex_to_wire(z)).collect(),
            degree: self.degree(),
        }
        .serialize(s)
    }
}

impl ShiftPolynomial {
    /// Index of the highest coefficient above `DEGREE_TOL` relative to the largest one.
    pub fn degree(&self) -> Option<usize> {
        let top = self.coefficients.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if top == 0.0 {
            return None;
        }
        self.coefficients.iter().rposition(|z| z.norm() > DEGREE_TOL * top)
    }

    pub fn leading_coefficient(&self) -> Option<C64> {
        self.degree().map(|d| self.coefficients[d])
    }

    pub fn eval(&self, p: f64) -> C64 {
        self.coefficients.iter().rev().fold(c(0.0, 0.0), |acc, &k| acc * p + k)
    }

    /// Nonnegative integers `p` with `q(p) = 0`, up to the Cauchy root bound.
    ///
    /// A value counts as a root when `|q(p)|` is below `tol` times the sum of the
    /// absolute terms `|c_k| p^k`.
    pub fn nonnegative_integer_roots(&self, tol: f64) -> Vec<u64> {
        let Some(d) = self.degree() else {
            return Vec::new();
        };
        let lead = self.coefficients[d].norm();
        let bound = 1.0 + self.coefficients[..d].iter().map(|z| z.norm() / lead).fold(0.0, f64::max);
        let limit = bound.min(1e6).floor() as u64;
        (0..=limit)
            .filter(|&p| {
                let x = p as f64;
                let value = self.eval(x).norm();
                let size: f64 = self.coefficients.iter().enumerate().map(|(k, z)| z.norm() * x.powi(k as i32)).sum();
                value <= tol * size
            })
            .collect()
    }
}

/// Coefficients of `p ↦ det(embed(pF + T))`.
///
/// The determinant is evaluated at `p = 0, 1, …, degree_bound` and the
/// Vandermonde system is solved by LU with partial pivoting, so
/// `degree_bound` must be at least `rank(F)`, which bounds the true degree.
pub fn det_shift_polynomial(t: &Element, f: &Element, degree_bound: usize) -> Result<ShiftPolynomial> {
    t.shape().ensure_same(f.shape())?;
    if degree_bound > MAX_DEGREE {
        return Err(Error::DegreeTooLarge(degree_bound));
    }
    let rank = f.rank();
    if degree_bound < rank {
        return Err(Error::DegreeBelowRank { bound: degree_bound, rank });
    }
    let te = t.embed();
    let fe = f.embed();
    let points = degree_bound + 1;
    let values: Vec<C64> = (0..points).map(|p| (&fe * c(p as f64, 0.0) + &te).determinant()).collect();
    let vandermonde = DMatrix::from_fn(points, points, |r, k| c((r as f64).powi(k as i32), 0.0));
    let rhs = CMat::from_column_slice(points, 1, &values);
    let solution = vandermonde.lu().solve(&rhs).expect("Vandermonde on distinct nodes is invertible");
    Ok(ShiftPolynomial { coefficients: solution.iter().copied().collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random::{ginibre, rng_for};
    use crate::algebra::Shape;

    fn single(n: usize, m: CMat) -> Element {
        let s = Shape::new(vec![n]).unwrap();
        Element::from_block(&s, 0, m).unwrap()
    }

    fn corner_projection(n: usize, m1: usize) -> Element {
        single(n, CMat::from_fn(n, n, |r, s| if r == s && r < m1 { c(1.0, 0.0) } else { c(0.0, 0.0) }))
    }

    #[test]
    fn pure_identity_gives_p_squared() {
        let poly = det_shift_polynomial(&single(2, CMat::zeros(2, 2)), &corner_projection(2, 2), 4).unwrap();
        assert_eq!(poly.degree(), Some(2));
        assert!((poly.leading_coefficient().unwrap() - c(1.0, 0.0)).norm() < 1e-10);
        assert_eq!(poly.nonnegative_integer_roots(1e-9), vec![0]);
    }

    #[test]
    fn two_by_two_cofactor_expansion() {
        let (a, b, cc, d) = (c(1.5, -0.5), c(2.0, 1.0), c(-0.7, 0.2), c(0.3, 0.9));
        let t = single(2, CMat::from_row_slice(2, 2, &[a, b, cc, d]));
        let poly = det_shift_polynomial(&t, &corner_projection(2, 1), 2).unwrap();
        assert_eq!(poly.degree(), Some(1));
        assert!((poly.coefficients[1] - d).norm() < 1e-12);
        assert!((poly.coefficients[0] - (a * d - b * cc)).norm() < 1e-12);
    }

    #[test]
    fn leading_coefficient_is_the_complementary_determinant() {
        let mut rng = rng_for(11, 0);
        let t = ginibre(4, 4, &mut rng);
        let a22 = t.view((2, 2), (2, 2)).into_owned().determinant();
        let poly = det_shift_polynomial(&single(4, t), &corner_projection(4, 2), 4).unwrap();
        assert_eq!(poly.degree(), Some(2));
        let lead = poly.leading_coefficient().unwrap();
        assert!((lead - a22).norm() <= 1e-8 * a22.norm());
    }

    #[test]
    fn bounds_are_enforced() {
        let t = single(3, CMat::zeros(3, 3));
        let f = corner_projection(3, 3);
        assert!(matches!(det_shift_polynomial(&t, &f, 2), Err(Error::DegreeBelowRank { bound: 2, rank: 3 })));
        assert!(matches!(det_shift_polynomial(&t, &f, 13), Err(Error::DegreeTooLarge(13))));
    }
}

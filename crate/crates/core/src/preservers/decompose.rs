//! Recovery of `a ↦ γ·u·π(a)†·v` from a realified map.
//!
//! The steps:
//!
//! 1. every matrix unit of source block `i` must land in one target block `j`
//!    of equal size; this gives `π`;
//! 2. comparing `Φ(iE₁₁)` with `±iΦ(E₁₁)` decides linear versus conjugate-linear;
//! 3. on real matrices `Ψ(A) = Φ(A)` is linear; with `W = Ψ(I)` the map
//!    `L(A) = Ψ(A)·W⁻¹` must equal `U A U*`, so each `L(E_rr)` is a rank-one
//!    orthogonal projection `u_r u_r*` and `L(E_{r,r+1}) = u_r u_{r+1}*` links
//!    the phases;
//! 4. `γ_j = ‖W‖`, `V = U*·W/γ_j` must be unitary;
//! 5. one-dimensional blocks read `γ_j` and the phase off `Φ(1)`;
//! 6. all `γ_j` must agree; the phase gauge is fixed on `v`;
//! 7. the assembled form must reproduce the map.

use nalgebra::SymmetricEigen;
use serde::Serialize;
use thiserror::Error;

use super::{CanonicalForm, RealLinearMap};
use crate::algebra::linalg::{self, c, unitarity_defect, CMat};
use crate::algebra::{Element, Shape};
use crate::tol;

/// A failed decomposition step together with an input element exhibiting it.
#[derive(Debug, Clone, Serialize)]
pub struct StepFailure {
    pub step: u8,
    pub reason: String,
    pub witness: Option<Element>,
}

impl StepFailure {
    pub(crate) fn new(step: u8, reason: impl Into<String>, witness: Option<Element>) -> Self {
        Self { step, reason: reason.into(), witness }
    }
}

#[derive(Debug, Clone, Error)]
pub enum DecomposeError {
    #[error("shape {0} is exceptional (ℂ, ℂ⊕ℂ or M₂): it admits non-canonical preservers")]
    ExceptionalShape(Shape),

    #[error("map is not surjective (numerical rank {rank} < {dim})")]
    NotSurjective { rank: usize, dim: usize },

    #[error("step {}: {}", .0.step, .0.reason)]
    Step(StepFailure),
}

impl From<StepFailure> for DecomposeError {
    fn from(f: StepFailure) -> Self {
        DecomposeError::Step(f)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DecomposeOptions {
    pub tol: f64,
    /// Run the steps on `ℂ`, `ℂ⊕ℂ` and `M₂` instead of rejecting them.
    pub allow_exceptional: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self { tol: tol::RECONSTRUCTION, allow_exceptional: false }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub form: CanonicalForm,
    /// `‖from_canonical(form) - m‖ / ‖m‖` in the realified spectral norm.
    pub reconstruction_error: f64,
}

pub fn decompose(m: &RealLinearMap, tol: f64) -> Result<Decomposition, DecomposeError> {
    decompose_with(m, DecomposeOptions { tol, ..DecomposeOptions::default() })
}

pub fn decompose_with(m: &RealLinearMap, opts: DecomposeOptions) -> Result<Decomposition, DecomposeError> {
    let shape = m.shape().clone();
    if shape.is_exceptional() && !opts.allow_exceptional {
        return Err(DecomposeError::ExceptionalShape(shape));
    }
    let rank = m.numerical_rank(tol::RANK);
    if rank < shape.real_dim() {
        return Err(DecomposeError::NotSurjective { rank, dim: shape.real_dim() });
    }
    let tol = opts.tol;
    let m_norm = m.operator_norm();

    // step 1
    let target = block_images(m, tol)?;
    let k = shape.num_blocks();
    let mut pi = vec![0; k];
    for (i, &j) in target.iter().enumerate() {
        pi[j] = i;
    }

    let mut gammas = Vec::with_capacity(k);
    let mut u_blocks = Vec::with_capacity(k);
    let mut v_blocks = Vec::with_capacity(k);
    let mut linear_blocks = Vec::new();
    for j in 0..k {
        let i = pi[j];
        let n = shape.block_dim(j);
        // step 2
        if linearity_type(m, i, j, tol, m_norm)? {
            linear_blocks.push(j);
        }
        let image = |r: usize, s: usize| -> CMat {
            let e = Element::matrix_unit(&shape, i, r, s).expect("indices in range");
            m.apply(&e).expect("shape matches").block(j).clone()
        };
        let identity_witness = || Element::from_block(&shape, i, CMat::identity(n, n)).ok();
        if n == 1 {
            // step 5
            let phi1 = image(0, 0)[(0, 0)];
            let gamma = phi1.norm();
            if gamma <= tol * m_norm {
                return Err(StepFailure::new(5, format!("block {i} maps 1 to 0"), identity_witness()).into());
            }
            gammas.push(gamma);
            u_blocks.push(CMat::from_element(1, 1, phi1 / gamma));
            v_blocks.push(CMat::identity(1, 1));
            continue;
        }
        // step 3
        let w = (0..n).fold(CMat::zeros(n, n), |acc, r| acc + image(r, r));
        let w_values = linalg::singular_values(&w);
        if w_values[n - 1] <= tol::RANK * w_values[0] * n as f64 {
            return Err(StepFailure::new(
                3,
                format!("image of the identity of block {i} is singular"),
                identity_witness(),
            )
            .into());
        }
        let w_inv = w.clone().try_inverse().expect("numerically invertible");
        let mut columns = Vec::with_capacity(n);
        for r in 0..n {
            let l = image(r, r) * &w_inv;
            let herm_defect = (&l - l.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            let eig = SymmetricEigen::new((&l + l.adjoint()) * c(0.5, 0.0));
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            let top = eig.eigenvalues[order[0]];
            let rest_ok = order[1..].iter().all(|&q| eig.eigenvalues[q].abs() <= tol::PROJECTION);
            if herm_defect > tol::PROJECTION || (top - 1.0).abs() > tol::PROJECTION || !rest_ok {
                let witness = Element::matrix_unit(&shape, i, r, r).ok();
                return Err(StepFailure::new(
                    3,
                    format!(
                        "normalized image of E_{r}{r} in block {i} is not a rank-one orthogonal projection \
                         (hermitian defect {herm_defect:.3e}, top eigenvalue {top:.6})"
                    ),
                    witness,
                )
                .into());
            }
            let mut ur = eig.eigenvectors.column(order[0]).into_owned();
            if r > 0 {
                let link = (image(r - 1, r) * &w_inv).adjoint() * &columns[r - 1];
                let overlap = ur.dotc(&link);
                // a weak link leaves the phase unresolved; step 7 rejects it
                if overlap.norm() > 0.5 {
                    ur *= overlap / overlap.norm();
                }
            }
            columns.push(ur);
        }
        let u = CMat::from_columns(&columns);
        // step 4
        let u_defect = unitarity_defect(&u);
        if u_defect > tol {
            return Err(StepFailure::new(
                4,
                format!("recovered left factor of block {i} is not unitary (defect {u_defect:.3e})"),
                identity_witness(),
            )
            .into());
        }
        let gamma = w_values[0];
        let v = u.adjoint() * &w * c(1.0 / gamma, 0.0);
        let v_defect = unitarity_defect(&v);
        if v_defect > tol {
            return Err(StepFailure::new(
                4,
                format!("recovered right factor of block {i} is not unitary (defect {v_defect:.3e})"),
                identity_witness(),
            )
            .into());
        }
        gammas.push(gamma);
        u_blocks.push(u);
        v_blocks.push(v);
    }

    // step 6
    let g0 = gammas[0];
    let spread = gammas.iter().map(|g| (g - g0).abs()).fold(0.0, f64::max);
    if spread > tol * g0 {
        return Err(StepFailure::new(
            6,
            format!("block scales differ: {gammas:?}"),
            Some(Element::identity(&shape)),
        )
        .into());
    }
    let gamma = gammas.iter().sum::<f64>() / k as f64;
    for (j, g) in gammas.iter().enumerate() {
        // absorb the (tiny) per-block deviation into u
        u_blocks[j] *= c(g / gamma, 0.0);
    }
    let form = CanonicalForm {
        gamma,
        u: Element::new(shape.clone(), u_blocks).expect("block sizes follow shape"),
        v: Element::new(shape.clone(), v_blocks).expect("block sizes follow shape"),
        pi,
        linear_blocks,
    }
    .gauge_fixed();

    // step 7
    let rebuilt = RealLinearMap::from_fn(&shape, |a| form.apply(a).expect("shape matches"));
    let diff = rebuilt.matrix() - m.matrix();
    let svd = linalg::svd_of(&diff);
    let err = svd.singular_values[0];
    let relative = err / m_norm;
    if relative > tol {
        let direction = svd.v.column(0).into_owned();
        let witness = Element::from_realified(&shape, direction.as_slice()).ok();
        return Err(StepFailure::new(
            7,
            format!("assembled canonical form does not reproduce the map (relative error {relative:.3e})"),
            witness,
        )
        .into());
    }
    Ok(Decomposition { form, reconstruction_error: relative })
}

/// For every source block, the single target block that receives its image.
pub fn block_images(m: &RealLinearMap, tol: f64) -> Result<Vec<usize>, StepFailure> {
    let shape = m.shape();
    let k = shape.num_blocks();
    let threshold = tol * m.operator_norm();
    let mut target = Vec::with_capacity(k);
    for i in 0..k {
        let n = shape.block_dim(i);
        let offset = shape.real_offset(i);
        let mut found: Option<usize> = None;
        for idx in offset..offset + 2 * n * n {
            let basis = Element::real_basis(shape, idx);
            let image = m.apply(&basis).expect("shape matches");
            let hit: Vec<usize> = image
                .blocks()
                .iter()
                .enumerate()
                .filter(|(_, b)| b.norm() > threshold)
                .map(|(j, _)| j)
                .collect();
            let scatter = match (hit.as_slice(), found) {
                ([], _) => false,
                ([j], None) => {
                    found = Some(*j);
                    false
                }
                ([j], Some(f)) => *j != f,
                _ => true,
            };
            if scatter {
                return Err(StepFailure::new(
                    1,
                    format!("block {i} is not mapped into a single block (image blocks {hit:?})"),
                    Some(basis),
                ));
            }
        }
        let Some(j) = found else {
            return Err(StepFailure::new(1, format!("block {i} is annihilated"), Some(Element::identity(shape))));
        };
        if shape.block_dim(j) != n {
            return Err(StepFailure::new(
                1,
                format!("block {i} of size {n} is mapped into block {j} of size {}", shape.block_dim(j)),
                Element::matrix_unit(shape, i, 0, 0).ok(),
            ));
        }
        target.push(j);
    }
    let mut seen = vec![false; k];
    for &j in &target {
        if seen[j] {
            return Err(StepFailure::new(1, format!("two blocks are mapped into block {j}"), None));
        }
        seen[j] = true;
    }
    Ok(target)
}

/// `true` when block `i → j` is complex-linear, `false` when conjugate-linear.
pub(crate) fn linearity_type(
    m: &RealLinearMap,
    i: usize,
    j: usize,
    tol: f64,
    m_norm: f64,
) -> Result<bool, StepFailure> {
    let shape = m.shape();
    let e = Element::matrix_unit(shape, i, 0, 0).expect("block exists");
    let ie = e.scale(c(0.0, 1.0));
    let p = m.apply(&e).expect("shape matches").block(j).clone();
    let q = m.apply(&ie).expect("shape matches").block(j).clone();
    let scale = p.norm() + q.norm();
    if scale <= tol * m_norm {
        return Err(StepFailure::new(2, format!("E_11 of block {i} is annihilated"), Some(e)));
    }
    let plus = (&q - &p * c(0.0, 1.0)).norm();
    let minus = (&q + &p * c(0.0, 1.0)).norm();
    if plus <= tol * scale {
        Ok(true)
    } else if minus <= tol * scale {
        Ok(false)
    } else {
        Err(StepFailure::new(
            2,
            format!("block {i} is neither linear nor conjugate-linear (residuals {plus:.3e}, {minus:.3e})"),
            Some(ie),
        ))
    }
}

//! The low-dimensional counterexamples, each run as a list of expectations.

use clap::ValueEnum;
use serde_json::{json, Value};

use bjorth_core::algebra::random::{haar_unitary, rng_for};
use bjorth_core::preservers::{
    check_pairs, decompose_with, fixtures, verify_mutual_preserver_with, DecomposeError, DecomposeOptions,
    RealLinearMap, VerifyConfig,
};
use bjorth_core::singularity::BlockFactor;
use bjorth_core::{factor_singularity_preserver, tol, verify_singularity_preserver, Element, Result, Shape, C64};

use crate::commands::{mutual_report, singularity_report};
use crate::outcome::{Exit, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    /// Additive maps on ℂ.
    C,
    /// (λ, μ) ↦ (λ, 2μ) on ℂ⊕ℂ.
    C2Scale,
    /// (λ, μ) ↦ (λ, λ) on ℂ⊕ℂ.
    C2Embed,
    /// A ↦ PAQ on M₂ with Q only invertible.
    M2General,
    /// A ↦ Aᵀ on M₃.
    Transpose,
}

impl Fixture {
    fn name(self) -> &'static str {
        match self {
            Fixture::C => "c",
            Fixture::C2Scale => "c2-scale",
            Fixture::C2Embed => "c2-embed",
            Fixture::M2General => "m2-general",
            Fixture::Transpose => "transpose",
        }
    }
}

struct Report {
    checks: Vec<Value>,
}

impl Report {
    fn check(&mut self, name: &str, pass: bool, detail: Value) {
        self.checks.push(json!({ "check": name, "pass": pass, "detail": detail }));
    }

    fn finish(self, fixture: Fixture) -> Outcome {
        let pass = self.checks.iter().all(|c| c["pass"] == json!(true));
        let doc = json!({ "fixture": fixture.name(), "pass": pass, "checks": self.checks });
        Outcome::json(if pass { Exit::Ok } else { Exit::Failure }, &doc)
    }
}

pub fn run(fixture: Fixture, trials: usize, seed: u64) -> Result<Outcome> {
    let config = VerifyConfig { trials, seed, ..VerifyConfig::default() };
    let mut report = Report { checks: Vec::new() };
    match fixture {
        Fixture::C => {
            for k in 0..3 {
                let m = fixtures::random_additive_on_c(seed.wrapping_add(k));
                let verdict = verify_mutual_preserver_with(&m, &config)?;
                report.check(&format!("random_additive_{k}_preserves"), verdict.is_pass(), mutual_report(&verdict));
            }
            let m = fixtures::random_additive_on_c(seed);
            expect_exceptional(&mut report, &m);
        }
        Fixture::C2Scale => {
            let m = fixtures::c2_scaling();
            let verdict = verify_mutual_preserver_with(&m, &config)?;
            report.check("preserves", verdict.is_pass(), mutual_report(&verdict));
            expect_exceptional(&mut report, &m);
            expect_forced_failure(&mut report, &m, Some(6));
        }
        Fixture::C2Embed => {
            let m = fixtures::two_point_embedding();
            let skip = VerifyConfig { skip_surjectivity: true, ..config.clone() };
            let verdict = verify_mutual_preserver_with(&m, &skip)?;
            report.check("preserves_random_pairs", verdict.is_pass(), mutual_report(&verdict));
            let grid = fixtures::characterization_grid();
            let grid_verdict =
                check_pairs(&m, grid.iter().flat_map(|a| grid.iter().map(move |b| (a, b))), tol::DECISION)?;
            report.check("preserves_grid_pairs", grid_verdict.is_pass(), mutual_report(&grid_verdict));
            report.check(
                "not_surjective",
                !m.is_surjection(tol::RANK),
                json!({ "rank": m.numerical_rank(tol::RANK), "dim": m.shape().real_dim() }),
            );
            let one = C64::new(1.0, 0.0);
            let zero = C64::new(0.0, 0.0);
            let expected_a = Element::from_scalars(m.shape(), &[one, zero])?;
            let expected_image = Element::from_scalars(m.shape(), &[one, one])?;
            let singular = verify_singularity_preserver(&m, trials, seed)?;
            let pass = singular
                .violation()
                .is_some_and(|w| w.element == expected_a && w.image == expected_image);
            report.check("breaks_singularity", pass, singularity_report(&singular));
        }
        Fixture::M2General => {
            let shape = Shape::new(vec![2])?;
            let mut rng = rng_for(seed, 41);
            let p = haar_unitary(2, &mut rng) * C64::new(1.5, 0.0);
            let q = fixtures::random_invertible(2, seed);
            let m = fixtures::left_right_map(&shape, 0, &p, &q);
            let verdict = verify_mutual_preserver_with(&m, &config)?;
            report.check("preserves", verdict.is_pass(), mutual_report(&verdict));
            let singular = verify_singularity_preserver(&m, trials, seed)?;
            report.check("preserves_singularity", singular.is_pass(), singularity_report(&singular));
            expect_exceptional(&mut report, &m);
            expect_forced_failure(&mut report, &m, None);
        }
        Fixture::Transpose => {
            let shape = Shape::new(vec![3])?;
            let m = fixtures::transpose_map(&shape);
            let verdict = verify_mutual_preserver_with(&m, &config)?;
            report.check("violates", !verdict.is_pass(), mutual_report(&verdict));
            match decompose_with(&m, DecomposeOptions::default()) {
                Err(DecomposeError::Step(f)) => {
                    report.check("decompose_refutes", f.step == 7, json!({ "step": f.step, "reason": f.reason }))
                }
                other => report.check("decompose_refutes", false, json!(format!("{other:?}"))),
            }
            match factor_singularity_preserver(&m, tol::RECONSTRUCTION) {
                Ok(f) => {
                    let transposed = f.blocks.iter().all(|b| matches!(b, BlockFactor::Matrix { transpose: true, .. }));
                    report.check("factors_as_transpose", transposed, json!(f));
                }
                Err(e) => report.check("factors_as_transpose", false, json!(e.to_string())),
            }
        }
    }
    Ok(report.finish(fixture))
}

fn expect_exceptional(report: &mut Report, m: &RealLinearMap) {
    let result = decompose_with(m, DecomposeOptions::default());
    let pass = matches!(result, Err(DecomposeError::ExceptionalShape(_)));
    report.check("decompose_exceptional", pass, json!({ "exit": Exit::Exceptional as u8 }));
}

/// Decomposition with the exceptional-shape guard lifted must fail, at
/// `step` when given.
fn expect_forced_failure(report: &mut Report, m: &RealLinearMap, step: Option<u8>) {
    let opts = DecomposeOptions { allow_exceptional: true, ..DecomposeOptions::default() };
    match decompose_with(m, opts) {
        Err(DecomposeError::Step(f)) => {
            let pass = step.is_none_or(|s| s == f.step);
            report.check("forced_decompose_fails", pass, json!({ "step": f.step, "reason": f.reason }));
        }
        other => report.check("forced_decompose_fails", false, json!(format!("{other:?}"))),
    }
}

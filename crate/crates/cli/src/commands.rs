use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use bjorth_core::bj::{decide, dist_to_right_ideal};
use bjorth_core::orthograph::build_orthograph;
use bjorth_core::preservers::{
    decompose_with, fixtures, verify_mutual_preserver_with, DecomposeError, DecomposeOptions,
    MutualVerdict, VerifyConfig,
};
use bjorth_core::singularity::FactorError;
use bjorth_core::{
    factor_singularity_preserver, gen_mutual_pair, tol, verify_singularity_preserver,
    CanonicalForm, Element, Error, RealLinearMap, SemilinearFactorization, SingularityVerdict,
};

use crate::outcome::{Exit, Outcome};
use crate::{gallery, Command, GenKind};

pub fn run(command: Command) -> Outcome {
    match execute(command) {
        Ok(outcome) | Err(outcome) => outcome,
    }
}

type Step<T> = Result<T, Outcome>;

fn execute(command: Command) -> Step<Outcome> {
    Ok(match command {
        Command::Check { a, b, tol } => {
            let (a, b) = read_pair(&a, &b)?;
            Outcome::ok(&decide(&a, &b, tol.unwrap_or(tol::DECISION)).map_err(Outcome::from)?)
        }
        Command::Dist { a, b } => {
            let (a, b) = read_pair(&a, &b)?;
            Outcome::ok(&json!({
                "dist_ab": dist_to_right_ideal(&a, &b).map_err(Outcome::from)?,
                "dist_ba": dist_to_right_ideal(&b, &a).map_err(Outcome::from)?,
                "norm_a": a.op_norm(),
                "norm_b": b.op_norm(),
            }))
        }
        Command::Decompose { map, tol, trials, seed } => {
            let m: RealLinearMap = read_json(&map)?;
            cmd_decompose(&m, tol.unwrap_or(tol::RECONSTRUCTION), trials, seed)
        }
        Command::Factor { map, tol } => {
            let m: RealLinearMap = read_json(&map)?;
            cmd_factor(&m, tol.unwrap_or(tol::RECONSTRUCTION))
        }
        Command::Verify { map, trials, seed, tol, skip_surjectivity } => {
            let m: RealLinearMap = read_json(&map)?;
            let config = VerifyConfig { trials, seed, tol: tol.unwrap_or(tol::DECISION), skip_surjectivity };
            cmd_verify(&m, &config)?
        }
        Command::Gen { kind, shape, seed, out } => cmd_gen(kind, &shape, seed, out.as_deref())?,
        Command::Gallery { name, trials, seed } => gallery::run(name, trials, seed).map_err(Outcome::from)?,
        Command::Orthograph { shape, seed, samples, structured, tol, out } => {
            let mut g = build_orthograph(&shape, samples, seed, structured);
            if let Some(t) = tol {
                let labelled = g.vertices.iter().map(|v| (v.label.clone(), v.element.clone())).collect();
                let rebuilt = bjorth_core::orthograph::from_vertices(&shape, labelled, t);
                g = bjorth_core::orthograph::OrthographSample { seed, structured, ..rebuilt };
            }
            let stem = g.file_stem();
            let dot = out.join(format!("{stem}.dot"));
            let json_path = out.join(format!("{stem}.json"));
            write_text(&dot, &g.to_dot())?;
            write_text(&json_path, &g.to_json().map_err(Outcome::from)?)?;
            Outcome::ok(&json!({
                "dot": dot.display().to_string(),
                "json": json_path.display().to_string(),
                "vertices": g.vertices.len(),
                "edges": g.edges.len(),
                "components": g.components().len(),
                "sampled_diameter_largest_component": g.sampled_diameter_largest_component(),
            }))
        }
    })
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Step<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Outcome::error(Exit::Parse, format!("cannot read {}: {e}", path.display())))?;
    bjorth_core::json::from_str(&text)
        .map_err(|e| Outcome::error(Exit::Parse, format!("cannot parse {}: {e}", path.display())))
}

fn read_pair(a: &Path, b: &Path) -> Step<(Element, Element)> {
    let a: Element = read_json(a)?;
    let b: Element = read_json(b)?;
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch { left: a.shape().clone(), right: b.shape().clone() }.into());
    }
    Ok((a, b))
}

fn write_text(path: &Path, text: &str) -> Step<()> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    fs::write(path, body).map_err(|e| Outcome::error(Exit::Parse, format!("cannot write {}: {e}", path.display())))
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("core types serialize to JSON")
}

pub fn cmd_decompose(m: &RealLinearMap, tol: f64, trials: usize, seed: u64) -> Outcome {
    match decompose_with(m, DecomposeOptions { tol, ..DecomposeOptions::default() }) {
        Ok(d) => Outcome::ok(&d),
        Err(DecomposeError::ExceptionalShape(shape)) => Outcome::json(
            Exit::Exceptional,
            &json!({
                "error": "exceptional_shape",
                "shape": to_value(&shape),
                "reason": DecomposeError::ExceptionalShape(shape.clone()).to_string(),
            }),
        ),
        Err(DecomposeError::NotSurjective { rank, dim }) => Outcome::json(
            Exit::Failure,
            &json!({ "error": "not_surjective", "rank": rank, "dim": dim }),
        ),
        Err(DecomposeError::Step(failure)) => {
            let config = VerifyConfig { trials, seed, ..VerifyConfig::default() };
            let violation = match verify_mutual_preserver_with(m, &config) {
                Ok(MutualVerdict::Violation(w)) => to_value(&w),
                _ => Value::Null,
            };
            Outcome::json(
                Exit::Failure,
                &json!({
                    "error": "not_canonical",
                    "step": failure.step,
                    "reason": failure.reason,
                    "witness": to_value(&failure.witness),
                    "violation": violation,
                }),
            )
        }
    }
}

fn cmd_factor(m: &RealLinearMap, tol: f64) -> Outcome {
    match factor_singularity_preserver(m, tol) {
        Ok(f) => Outcome::ok(&f),
        Err(FactorError::NotSurjective { rank, dim }) => Outcome::json(
            Exit::Failure,
            &json!({ "error": "not_surjective", "rank": rank, "dim": dim }),
        ),
        Err(FactorError::Step(failure)) => Outcome::json(
            Exit::Failure,
            &json!({
                "error": "not_factorable",
                "step": failure.step,
                "reason": failure.reason,
                "witness": to_value(&failure.witness),
            }),
        ),
    }
}

fn cmd_verify(m: &RealLinearMap, config: &VerifyConfig) -> Step<Outcome> {
    let mutual = match verify_mutual_preserver_with(m, config) {
        Ok(v) => v,
        Err(Error::NotSurjective { rank, dim }) => {
            return Ok(Outcome::json(
                Exit::Failure,
                &json!({
                    "error": "not_surjective",
                    "rank": rank,
                    "dim": dim,
                    "hint": "pass --skip-surjectivity to test a non-surjective map",
                }),
            ))
        }
        Err(e) => return Err(e.into()),
    };
    let singularity = verify_singularity_preserver(m, config.trials, config.seed).map_err(Outcome::from)?;
    let pass = mutual.is_pass() && singularity.is_pass();
    let report = json!({
        "mutual": mutual_report(&mutual),
        "singularity": singularity_report(&singularity),
    });
    Ok(Outcome::json(if pass { Exit::Ok } else { Exit::Failure }, &report))
}

pub fn mutual_report(v: &MutualVerdict) -> Value {
    match v {
        MutualVerdict::Pass { pairs_checked } => json!({ "pass": true, "pairs_checked": pairs_checked }),
        MutualVerdict::Violation(w) => json!({ "pass": false, "violation": to_value(w) }),
    }
}

pub fn singularity_report(v: &SingularityVerdict) -> Value {
    match v {
        SingularityVerdict::Pass { elements_checked } => {
            json!({ "pass": true, "elements_checked": elements_checked })
        }
        SingularityVerdict::Violation(w) => json!({ "pass": false, "violation": to_value(w) }),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

/// Prints `value` or writes it to `out`.
fn emit_one(value: Value, out: Option<&Path>) -> Step<Outcome> {
    match out {
        None => Ok(Outcome::ok(&value)),
        Some(path) => {
            write_text(path, &bjorth_core::json::to_string(&value).map_err(Outcome::from)?)?;
            Ok(Outcome::ok(&json!({ "written": [path.display().to_string()] })))
        }
    }
}

/// Prints `{first.0: .., second.0: ..}` or writes `PREFIX.<name>.json` files.
fn emit_two(first: (&str, Value), second: (&str, Value), out: Option<&Path>) -> Step<Outcome> {
    match out {
        None => Ok(Outcome::ok(&json!({ first.0: first.1, second.0: second.1 }))),
        Some(prefix) => {
            let mut written = Vec::new();
            for (name, value) in [first, second] {
                let path = with_suffix(prefix, &format!(".{name}.json"));
                write_text(&path, &bjorth_core::json::to_string(&value).map_err(Outcome::from)?)?;
                written.push(path.display().to_string());
            }
            Ok(Outcome::ok(&json!({ "written": written })))
        }
    }
}

fn cmd_gen(kind: GenKind, shape: &bjorth_core::Shape, seed: u64, out: Option<&Path>) -> Step<Outcome> {
    match kind {
        GenKind::Element => emit_one(to_value(&Element::random(shape, seed)), out),
        GenKind::Unitary => emit_one(to_value(&Element::random_unitary(shape, seed)), out),
        GenKind::Transpose => emit_one(to_value(&fixtures::transpose_map(shape)), out),
        GenKind::Pair => {
            let (a, b) = gen_mutual_pair(shape, seed);
            emit_two(("a", to_value(&a)), ("b", to_value(&b)), out)
        }
        GenKind::Canonical => {
            let form = CanonicalForm::random(shape, seed);
            let map = form.to_map().map_err(Outcome::from)?;
            emit_two(("form", to_value(&form)), ("map", to_value(&map)), out)
        }
        GenKind::Factorization => {
            let f = SemilinearFactorization::random(shape, seed);
            let map = f.to_map().map_err(Outcome::from)?;
            emit_two(("factorization", to_value(&f)), ("map", to_value(&map)), out)
        }
    }
}

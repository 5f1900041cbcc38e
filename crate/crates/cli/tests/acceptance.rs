//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Built with `harness = false` so the lines are printed even when
//! everything passes.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use bjorth_core::algebra::linalg::{basis_vector, c, outer, CMat};
use bjorth_core::algebra::random::{derive_seed, ginibre, haar_unitary, rng_for};
use bjorth_core::preservers::{
    check_pairs, decompose, fixtures, verify_mutual_preserver, verify_mutual_preserver_with,
    CanonicalForm, MutualVerdict, RealLinearMap, SingularityViolation, VerifyConfig,
};
use bjorth_core::{
    det_shift_polynomial, dist_to_right_ideal, factor_singularity_preserver, mutual_strong_bj,
    sample_decision_pair, strong_bj, strong_bj_witness, tol, verify_singularity_preserver, Element,
    SemilinearFactorization, Shape,
};

type Outcome = Result<String, String>;

fn shape(d: &[usize]) -> Shape {
    Shape::new(d.to_vec()).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let shapes = [&[2][..], &[3], &[4], &[1, 2], &[2, 2], &[2, 3], &[1, 1, 1]];
    let start = Instant::now();
    let mut orthogonal = 0usize;
    let mut total = 0usize;
    for d in shapes {
        let s = shape(d);
        for t in 0..10_000u64 {
            let (kind, a, b) = sample_decision_pair(&s, derive_seed(t, d.len() as u64 * 10 + d[0] as u64));
            let by_distance = strong_bj(&a, &b, tol::DECISION).map_err(|e| e.to_string())?;
            let by_witness = strong_bj_witness(&a, &b, tol::DECISION).map_err(|e| e.to_string())?.is_some();
            ensure(by_distance == by_witness, || {
                format!("shape {s}, pair {t} ({kind}): distance says {by_distance}, witness says {by_witness}")
            })?;
            orthogonal += by_distance as usize;
            total += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 60.0, || format!("took {elapsed:.1}s"))?;
    Ok(format!("{total} pairs, {orthogonal} orthogonal, 0 disagreements, {elapsed:.1}s"))
}

fn criterion_2() -> Outcome {
    let m = fixtures::two_point_embedding();
    let grid = fixtures::characterization_grid();
    let verdict = check_pairs(&m, grid.iter().flat_map(|a| grid.iter().map(move |b| (a, b))), tol::DECISION)
        .map_err(|e| e.to_string())?;
    let checked = match verdict {
        MutualVerdict::Pass { pairs_checked } => pairs_checked,
        MutualVerdict::Violation(w) => return Err(format!("grid pair violated: {:?} / {:?}", w.a, w.b)),
    };
    let singular = verify_singularity_preserver(&m, 100, 0).map_err(|e| e.to_string())?;
    let w = singular.violation().ok_or("no singularity violation found")?;
    let s = m.shape();
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    ensure(w.kind == SingularityViolation::SingularToInvertible, || format!("kind {:?}", w.kind))?;
    ensure(w.element == Element::from_scalars(s, &[one, zero]).unwrap(), || format!("element {:?}", w.element))?;
    ensure(w.image == Element::from_scalars(s, &[one, one]).unwrap(), || format!("image {:?}", w.image))?;
    Ok(format!("{} grid pairs, {checked} orthogonal and preserved; (1,0) -> (1,1)", grid.len() * grid.len()))
}

const CANONICAL_SHAPES: [&[usize]; 4] = [&[3], &[1, 3], &[2, 3], &[2, 2, 2]];

fn canonical_forms() -> Vec<(Shape, CanonicalForm)> {
    (0..200u64)
        .map(|k| {
            let s = shape(CANONICAL_SHAPES[(k % 4) as usize]);
            let form = CanonicalForm::random(&s, derive_seed(k, 3));
            (s, form)
        })
        .collect()
}

fn criterion_3() -> Outcome {
    let mut worst_err: f64 = 0.0;
    let mut worst_gamma: f64 = 0.0;
    for (k, (s, form)) in canonical_forms().into_iter().enumerate() {
        let m = form.to_map().map_err(|e| e.to_string())?;
        let d = decompose(&m, tol::RECONSTRUCTION).map_err(|e| format!("form {k} on {s}: {e}"))?;
        let gamma_err = (d.form.gamma - form.gamma).abs() / form.gamma;
        ensure(d.reconstruction_error <= 1e-8, || format!("form {k}: error {:e}", d.reconstruction_error))?;
        ensure(gamma_err <= 1e-9, || format!("form {k}: γ relative error {gamma_err:e}"))?;
        ensure(d.form.pi == form.pi, || format!("form {k}: π {:?} vs {:?}", d.form.pi, form.pi))?;
        ensure(d.form.linear_blocks == form.linear_blocks, || {
            format!("form {k}: J {:?} vs {:?}", d.form.linear_blocks, form.linear_blocks)
        })?;
        worst_err = worst_err.max(d.reconstruction_error);
        worst_gamma = worst_gamma.max(gamma_err);
    }
    Ok(format!("200 forms, max reconstruction error {worst_err:.1e}, max γ error {worst_gamma:.1e}"))
}

fn bad_maps(s: &Shape, seed: u64) -> Vec<(&'static str, RealLinearMap)> {
    let i = (0..s.num_blocks()).max_by_key(|&j| (s.block_dim(j), std::cmp::Reverse(j))).unwrap();
    let n = s.block_dim(i);
    let q = haar_unitary(n, &mut rng_for(seed, 99));
    let mut out = Vec::new();
    if n >= 2 {
        let p = fixtures::conditioned_matrix(n, 2.0, seed);
        out.push(("non_unitary_left", fixtures::left_right_map(s, i, &p, &q)));
        out.push(("transpose_right", fixtures::transpose_right_map(s, i, &q)));
    }
    if s.num_blocks() > 1 {
        let gammas: Vec<f64> = (0..s.num_blocks()).map(|j| if j == i { 1.5 } else { 1.0 }).collect();
        out.push(("unequal_scales", fixtures::block_scaling(s, &gammas)));
    }
    out
}

fn criterion_4() -> Outcome {
    let forms = canonical_forms();
    for (k, (s, form)) in forms.iter().enumerate() {
        let m = form.to_map().map_err(|e| e.to_string())?;
        let verdict = verify_mutual_preserver(&m, 1000, k as u64).map_err(|e| e.to_string())?;
        ensure(verdict.is_pass(), || format!("canonical map {k} on {s} refuted"))?;
    }
    let mut refuted = 0;
    for d in CANONICAL_SHAPES {
        let s = shape(d);
        for seed in 0..3 {
            for (name, m) in bad_maps(&s, seed) {
                ensure(decompose(&m, tol::RECONSTRUCTION).is_err(), || format!("{name} on {s} decomposed"))?;
                let config = VerifyConfig { trials: 10_000, seed, ..VerifyConfig::default() };
                let verdict = verify_mutual_preserver_with(&m, &config).map_err(|e| e.to_string())?;
                ensure(!verdict.is_pass(), || format!("{name} on {s} (seed {seed}) not refuted"))?;
                refuted += 1;
            }
        }
    }
    Ok(format!("{} canonical maps pass 10^3 pairs; {refuted} non-canonical maps refuted twice", forms.len()))
}

fn criterion_5() -> Outcome {
    for n in [2, 3] {
        let s = shape(&[n]);
        let m = fixtures::transpose_map(&s);
        let e1 = basis_vector(n, 0);
        let e2 = basis_vector(n, 1);
        let a = Element::from_block(&s, 0, outer(&e1, &e1)).unwrap();
        let b = Element::from_block(&s, 0, outer(&e2, &(&e1 + &e2))).unwrap();
        let (ta, tb) = (m.apply(&a).unwrap(), m.apply(&b).unwrap());
        let both = |x: &Element, y: &Element| -> Result<(bool, bool), String> {
            let d = strong_bj(x, y, tol::DECISION).map_err(|e| e.to_string())?;
            let w = strong_bj_witness(x, y, tol::DECISION).map_err(|e| e.to_string())?.is_some();
            ensure(d == w, || format!("deciders disagree on M{n}"))?;
            Ok((d, w))
        };
        let pre = (both(&a, &b)?.0, both(&b, &a)?.0);
        let post = (both(&ta, &tb)?.0, both(&tb, &ta)?.0);
        ensure(pre == (true, true), || format!("M{n}: pre-image not mutual {pre:?}"))?;
        ensure(!(post.0 && post.1), || format!("M{n}: image still mutual"))?;
    }
    Ok("M2 and M3: mutual before, not after, both deciders agree".into())
}

fn corner(n: usize, m1: usize) -> CMat {
    CMat::from_fn(n, n, |r, s| if r == s && r < m1 { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut planted_found = 0;
    for k in 0..100u64 {
        let m1 = 1 + (k % 4) as usize;
        let m2 = 1 + ((k / 4) % 4) as usize;
        let n = m1 + m2;
        let s = shape(&[n]);
        let planted = k % 2 == 1;
        let (t, a22) = (0..)
            .map(|r| {
                let mut t = ginibre(n, n, &mut rng_for(derive_seed(k, r), 6));
                if planted {
                    // block upper triangular with T11 = upper triangular, diagonal -r_j,
                    // so det(pF + T) = det(T22)·Π(p - r_j) with r_j = j + k mod 3
                    for i in 0..n {
                        for j in 0..m1.min(i) {
                            t[(i, j)] = c(0.0, 0.0);
                        }
                    }
                    for j in 0..m1 {
                        t[(j, j)] = c(-((j as u64 + k % 3) as f64), 0.0);
                    }
                }
                let a22 = t.view((m1, m1), (m2, m2)).into_owned().determinant();
                (t, a22)
            })
            .find(|(_, d)| d.norm() > 1e-3)
            .unwrap();
        let te = Element::from_block(&s, 0, t).unwrap();
        let fe = Element::from_block(&s, 0, corner(n, m1)).unwrap();
        let poly = det_shift_polynomial(&te, &fe, n).map_err(|e| e.to_string())?;
        ensure(poly.degree() == Some(m1), || format!("instance {k}: degree {:?}, m1 {m1}", poly.degree()))?;
        let lead = poly.leading_coefficient().unwrap();
        let rel = (lead - a22).norm() / a22.norm();
        ensure(rel <= 1e-8, || format!("instance {k}: leading coefficient off by {rel:e}"))?;
        let roots = poly.nonnegative_integer_roots(1e-9).len();
        ensure(roots <= m1, || format!("instance {k}: {roots} integer roots > {m1}"))?;
        ensure(!planted || roots == m1, || format!("instance {k}: found {roots} of {m1} planted roots"))?;
        worst = worst.max(rel);
        planted_found += if planted { roots } else { 0 };
    }
    Ok(format!("100 instances, max leading error {worst:.1e}, {planted_found} planted integer roots recovered"))
}

fn criterion_7() -> Outcome {
    let shapes = [&[3][..], &[2, 2], &[1, 3]];
    let mut worst: f64 = 0.0;
    for k in 0..200u64 {
        let s = shape(shapes[(k % 3) as usize]);
        let conjugate = (k / 3) % 2 == 1;
        let transpose = (k / 6) % 2 == 1;
        let f = SemilinearFactorization::random_with_flags(&s, derive_seed(k, 7), conjugate, transpose);
        let m = f.to_map().map_err(|e| e.to_string())?;
        let g = factor_singularity_preserver(&m, tol::RECONSTRUCTION).map_err(|e| format!("instance {k} on {s}: {e}"))?;
        let err = g.to_map().unwrap().distance(&m).unwrap() / m.operator_norm();
        ensure(err <= 1e-8, || format!("instance {k}: relative error {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("200 factorizations, max relative reconstruction error {worst:.1e}"))
}

fn criterion_8() -> Outcome {
    let shapes = [&[2][..], &[3], &[4], &[1, 2], &[2, 2], &[2, 3], &[1, 1, 1]];
    let mut worst: f64 = 0.0;
    for d in shapes {
        let s = shape(d);
        for t in 0..1000u64 {
            let a = Element::random(&s, derive_seed(t, 80));
            ensure(a.is_invertible(), || format!("sample {t} on {s} not invertible"))?;
            let mut b = Element::random(&s, derive_seed(t, 81));
            // every other b is supported on a single block
            if t % 2 == 1 {
                let i = (t / 2) as usize % s.num_blocks();
                b = Element::from_block(&s, i, b.block(i).clone()).unwrap();
            }
            ensure(!mutual_strong_bj(&a, &b, tol::DECISION).unwrap(), || format!("sample {t} on {s} orthogonal"))?;
            let dist = dist_to_right_ideal(&b, &a).unwrap();
            ensure(dist <= 1e-10, || format!("sample {t} on {s}: dist(b, a𝔄) = {dist:e}"))?;
            worst = worst.max(dist);
        }
    }
    Ok(format!("7000 pairs, none orthogonal, max dist(b, a𝔄) {worst:.1e}"))
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_bjorth"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    Ok(out.stdout)
}

fn snapshot(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .map(|entry| {
            let path = entry.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&path).unwrap())
        })
        .collect();
    files.sort();
    Ok(files)
}

fn criterion_9() -> Outcome {
    let script: &[&[&str]] = &[
        &["gen", "element", "--shape", "2,3", "--seed", "5", "--out", "e.json"],
        &["gen", "pair", "--shape", "1,2", "--seed", "5", "--out", "p"],
        &["gen", "canonical", "--shape", "2,3", "--seed", "5", "--out", "c"],
        &["gen", "factorization", "--shape", "1,3", "--seed", "5", "--out", "f"],
        &["gen", "transpose", "--shape", "3", "--out", "t.json"],
        &["check", "p.a.json", "p.b.json"],
        &["dist", "p.a.json", "p.b.json"],
        &["decompose", "c.map.json"],
        &["decompose", "t.json", "--trials", "2000", "--seed", "3"],
        &["factor", "f.map.json"],
        &["verify", "c.map.json", "--trials", "300", "--seed", "9"],
        &["gallery", "c2-embed", "--trials", "200", "--seed", "1"],
        &["orthograph", "--shape", "2,2", "--seed", "11", "--samples", "16", "--structured"],
    ];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut stdout = Vec::new();
        for args in script {
            stdout.push(run_cli(dir.path(), args)?);
        }
        runs.push((stdout, snapshot(dir.path())?));
    }
    let (first, second) = (&runs[0], &runs[1]);
    for (k, (x, y)) in first.0.iter().zip(&second.0).enumerate() {
        ensure(!x.is_empty(), || format!("`{}` printed nothing", script[k].join(" ")))?;
        ensure(x == y, || format!("`{}` stdout differs", script[k].join(" ")))?;
    }
    ensure(first.1 == second.1, || "written files differ".into())?;
    ensure(first.1.iter().any(|(n, _)| n.ends_with(".dot")), || "no DOT file written".into())?;
    Ok(format!("{} commands, {} files byte-identical across two runs", script.len(), first.1.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence", criterion_1),
        ("two-point embedding", criterion_2),
        ("canonical round trip", criterion_3),
        ("preserver characterization", criterion_4),
        ("transpose probe pair", criterion_5),
        ("det-shift polynomial", criterion_6),
        ("semilinear round trip", criterion_7),
        ("isolated invertibles", criterion_8),
        ("CLI determinism", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

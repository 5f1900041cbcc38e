use bjorth_core::algebra::random::{haar_unitary, rng_for};
use bjorth_core::preservers::{fixtures, MutualVerdict};
use bjorth_core::{
    decompose, gen_mutual_pair, mutual_strong_bj, tol, verify_mutual_preserver,
    verify_singularity_preserver, CanonicalForm, DecomposeError, Element, RealLinearMap, Shape,
};
use proptest::prelude::*;

fn shape(d: &[usize]) -> Shape {
    Shape::new(d.to_vec()).unwrap()
}

fn shapes() -> impl Strategy<Value = Shape> {
    prop::sample::select(vec![vec![3], vec![1, 3], vec![2, 3], vec![2, 2, 2], vec![1, 1, 1], vec![4]])
        .prop_map(|d| Shape::new(d).unwrap())
}

fn largest_block(s: &Shape) -> usize {
    (0..s.num_blocks()).max_by_key(|&i| (s.block_dim(i), usize::MAX - i)).unwrap()
}

/// The three standard non-canonical families on `s`, skipping the ones that
/// do not exist there.
fn bad_maps(s: &Shape, seed: u64) -> Vec<(&'static str, RealLinearMap)> {
    let i = largest_block(s);
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

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(24) })]

    #[test]
    fn canonical_round_trip(s in shapes(), seed in any::<u64>()) {
        prop_assume!(!s.is_exceptional());
        let form = CanonicalForm::random(&s, seed);
        let m = form.to_map().unwrap();
        let d = decompose(&m, tol::RECONSTRUCTION).unwrap();
        prop_assert!(d.reconstruction_error <= 1e-8);
        prop_assert!((d.form.gamma - form.gamma).abs() <= 1e-9 * form.gamma);
        prop_assert_eq!(&d.form.pi, &form.pi);
        prop_assert_eq!(&d.form.linear_blocks, &form.linear_blocks);
    }

    #[test]
    fn canonical_maps_preserve_pairs_and_singularity(s in shapes(), seed in any::<u64>()) {
        let m = CanonicalForm::random(&s, seed).to_map().unwrap();
        prop_assert!(verify_mutual_preserver(&m, 200, seed).unwrap().is_pass());
        prop_assert!(verify_singularity_preserver(&m, 50, seed).unwrap().is_pass());
        let (a, b) = gen_mutual_pair(&s, seed);
        prop_assert!(mutual_strong_bj(&m.apply(&a).unwrap(), &m.apply(&b).unwrap(), tol::DECISION).unwrap());
    }

    #[test]
    fn canonical_forms_compose(s in shapes(), seed in any::<u64>()) {
        prop_assume!(!s.is_exceptional());
        let f = CanonicalForm::random(&s, seed).to_map().unwrap();
        let g = CanonicalForm::random(&s, seed ^ 0xABCD).to_map().unwrap();
        let d = decompose(&f.compose(&g).unwrap(), tol::RECONSTRUCTION).unwrap();
        prop_assert!(d.reconstruction_error <= 1e-8);
    }

    #[test]
    fn noise_is_refuted(s in shapes(), seed in any::<u64>()) {
        prop_assume!(!s.is_exceptional());
        let m = CanonicalForm::random(&s, seed).to_map().unwrap().perturbed(1e-4, seed);
        prop_assert!(decompose(&m, tol::RECONSTRUCTION).is_err());
    }

    #[test]
    fn json_round_trip(s in shapes(), seed in any::<u64>()) {
        let form = CanonicalForm::random(&s, seed);
        let text = bjorth_core::json::to_string(&form).unwrap();
        let back: CanonicalForm = bjorth_core::json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &form);
        let m = form.to_map().unwrap();
        let text = bjorth_core::json::to_string(&m).unwrap();
        let back: RealLinearMap = bjorth_core::json::from_str(&text).unwrap();
        prop_assert_eq!(back, m);
    }
}

#[test]
fn non_canonical_maps_are_refuted_twice() {
    for dims in [vec![3], vec![1, 3], vec![2, 3], vec![2, 2, 2]] {
        let s = shape(&dims);
        for seed in 0..3 {
            for (name, m) in bad_maps(&s, seed) {
                assert!(matches!(decompose(&m, tol::RECONSTRUCTION), Err(DecomposeError::Step(_))), "{name} {dims:?}");
                let verdict = verify_mutual_preserver(&m, 10_000, seed).unwrap();
                assert!(!verdict.is_pass(), "{name} {dims:?} seed {seed}");
                if let MutualVerdict::Violation(w) = verdict {
                    assert!(mutual_strong_bj(&w.a, &w.b, tol::DECISION).unwrap());
                    assert!(!mutual_strong_bj(&w.image_a, &w.image_b, tol::DECISION).unwrap());
                }
            }
        }
    }
}

#[test]
fn transpose_probe_pair() {
    for n in [2, 3] {
        let s = shape(&[n]);
        let m = fixtures::transpose_map(&s);
        let e1 = bjorth_core::algebra::linalg::basis_vector(n, 0);
        let e2 = bjorth_core::algebra::linalg::basis_vector(n, 1);
        let a = Element::from_block(&s, 0, bjorth_core::algebra::linalg::outer(&e1, &e1)).unwrap();
        let b = Element::from_block(&s, 0, bjorth_core::algebra::linalg::outer(&e2, &(&e1 + &e2))).unwrap();
        assert!(mutual_strong_bj(&a, &b, tol::DECISION).unwrap());
        let (ta, tb) = (m.apply(&a).unwrap(), m.apply(&b).unwrap());
        assert!(!mutual_strong_bj(&ta, &tb, tol::DECISION).unwrap());
        assert!(bjorth_core::strong_bj_witness(&tb, &ta, tol::DECISION).unwrap().is_none()
            || bjorth_core::strong_bj_witness(&ta, &tb, tol::DECISION).unwrap().is_none());
    }
}

#[test]
fn m2_left_right_maps_pass_with_any_invertible_right_factor() {
    let s = shape(&[2]);
    let p = haar_unitary(2, &mut rng_for(5, 0));
    let q = fixtures::random_invertible(2, 5);
    let m = fixtures::left_right_map(&s, 0, &p, &q);
    assert!(verify_mutual_preserver(&m, 2000, 5).unwrap().is_pass());
    assert!(matches!(decompose(&m, 1e-8), Err(DecomposeError::ExceptionalShape(_))));
}

use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kcomplete_core::addlaws::{
    check_law, combine, bosma_lenstra_law, validate_law, AdditionLaw, ScanMode,
};
use kcomplete_core::complete::{
    certify_k_complete, exceptional_difference_set, exceptional_pairs, Verdict,
};
use kcomplete_core::construct_ec::{
    build_k_complete_law, find_norm_kernel_point, kernel_count, orbit_chord_line,
};
use kcomplete_core::hyperplane::build_family;
use kcomplete_core::lawspace::{discover, discover_descended, random_law, LawSpaceBasis};
use kcomplete_core::models::{CurveModel, ModelKind, Point};
use kcomplete_core::{Fe, Field};

fn curve(s: &str) -> CurveModel {
    CurveModel::parse(s).unwrap()
}

fn basis_1009() -> &'static LawSpaceBasis {
    static B: OnceLock<LawSpaceBasis> = OnceLock::new();
    B.get_or_init(|| discover(&curve("weierstrass:1009:0,0,0,3,7"), (2, 2), None, 1).unwrap())
}

/// `(P, Q)` exceptional implies `(P + R, Q + R)` exceptional, for every `R`.
fn assert_difference_invariant(law: &AdditionLaw) {
    let m = law.model();
    let exc: BTreeSet<(Point, Point)> = exceptional_pairs(law).unwrap().into_iter().collect();
    let pts = m.enumerate_points().unwrap();
    for (p, q) in &exc {
        for r in &pts {
            assert!(exc.contains(&(m.add(p, r), m.add(q, r))), "{m}");
        }
    }
    let diffs = exceptional_difference_set(law).unwrap();
    assert_eq!(exc.len(), diffs.len() * pts.len());
}

#[test]
fn exceptional_sets_are_unions_of_difference_fibers() {
    // split cubic: three nontrivial 2-torsion differences
    let c = curve("weierstrass:13:0,0,0,12,0");
    let CurveModel::Weierstrass(w) = &c else {
        unreachable!()
    };
    let [_, _, _, a, b] = w.coefficients();
    let law = bosma_lenstra_law(c.field(), a, b).unwrap();
    assert_eq!(exceptional_difference_set(&law).unwrap().len(), 3);
    assert_difference_invariant(&law);

    let c7 = curve("weierstrass:7:1,0,1,2,3");
    let basis = discover_descended(&c7, (2, 2), 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        assert_difference_invariant(&random_law(&basis, &mut rng).unwrap());
    }
}

#[test]
fn adding_laws_never_shrinks_coverage() {
    let c = curve("weierstrass:11:0,0,0,1,0");
    let basis = discover_descended(&c, (2, 2), 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut laws = Vec::new();
    let mut last = u64::MAX;
    for _ in 0..4 {
        let mut l = random_law(&basis, &mut rng).unwrap();
        validate_law(&mut l, ScanMode::Exhaustive).unwrap();
        laws.push(l);
        let cert = certify_k_complete(&c, &laws).unwrap();
        let n = cert.uncovered.len() as u64;
        assert!(n <= last);
        last = n;
    }
}

#[test]
fn certificates_depend_only_on_inputs() {
    let c = curve("weierstrass:13:0,0,0,1,6");
    let CurveModel::Weierstrass(w) = &c else {
        unreachable!()
    };
    let [_, _, _, a, b] = w.coefficients();
    let mut law = bosma_lenstra_law(c.field(), a, b).unwrap();
    validate_law(&mut law, ScanMode::Exhaustive).unwrap();
    let x = certify_k_complete(&c, &[law.clone()]).unwrap();
    let y = certify_k_complete(&c, &[law.clone()]).unwrap();
    assert_eq!(x, y);
    assert_eq!(x.to_json(&c), y.to_json(&c));
    let back = AdditionLaw::from_json(&law.to_json()).unwrap();
    assert_eq!(back.coefficient_vector(), law.coefficient_vector());
}

#[test]
fn orbit_certificates_and_constructed_laws() {
    for s in [
        "weierstrass:11:0,0,0,1,1",
        "weierstrass:13:1,0,0,2,5",
        "weierstrass:5^2:0,0,0,t,1",
    ] {
        let c = curve(s);
        let orbit = find_norm_kernel_point(&c, 2).unwrap();
        assert!(orbit.valid(), "{s}");
        let [p, q, r] = orbit.conjugates;
        assert!(p != q && q != r && p != r);
        let cubic = &orbit.cubic;
        assert_eq!(cubic.add(&cubic.add(&p, &q), &r), cubic.identity());
        let line = orbit_chord_line(&orbit).unwrap();
        assert!(line.contains_orbit);
        assert_eq!(line.rational_points_on_line, 0);
        let built = build_k_complete_law(&c, 2).unwrap();
        assert_eq!(built.law.field(), c.field());
        assert_eq!(built.certificate.verdict, Verdict::KComplete, "{s}");
    }
}

#[test]
fn norm_kernel_is_large_and_its_rational_part_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for q in [5u64, 7, 8, 9] {
        let k = Field::of_order(q).unwrap();
        let (_, e) = k.extension(3).unwrap();
        for _ in 0..6 {
            let c = CurveModel::random(ModelKind::Weierstrass, &k, &mut rng).unwrap();
            let kc = kernel_count(&c, &e).unwrap();
            assert!(kc.rational_kernel <= 9, "{c}");
            assert!(kc.kernel > 9, "{c}");
        }
    }
}

#[test]
fn hyperplane_families_are_galois_stable() {
    for (q, d, r0) in [
        (3u64, 2u32, 1usize),
        (4, 3, 1),
        (5, 4, 2),
        (9, 3, 2),
        (11, 2, 1),
    ] {
        let f = build_family(q, d, r0).unwrap();
        let rep = f.check_empty().unwrap();
        assert!(rep.empty() && rep.frobenius_permutes, "({q},{d},{r0})");
        for &c in f.product.values() {
            let y = f.embedding.embed(c);
            assert_eq!(f.ext.frobenius(y, q).unwrap(), y);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn combine_is_linear(seed in any::<u64>()) {
        let basis = basis_1009();
        let m = &basis.model;
        let k = m.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<Fe> = (0..basis.dim()).map(|_| k.random(&mut rng)).collect();
        let law = combine(&basis.laws, &coeffs).unwrap();
        let (p, q) = (m.random_point(&mut rng), m.random_point(&mut rng));
        let parts: Vec<Vec<Fe>> = basis.laws.iter().map(|l| l.values(&p, &q)).collect();
        let expect: Vec<Fe> = (0..=m.ambient_dim())
            .map(|j| parts.iter().zip(&coeffs).fold(k.zero(), |acc, (v, &c)| k.add(acc, k.mul(c, v[j]))))
            .collect();
        prop_assert_eq!(law.values(&p, &q), expect);
    }

    #[test]
    fn span_members_agree_with_the_group_law(seed in any::<u64>()) {
        let basis = basis_1009();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let law = random_law(basis, &mut rng).unwrap();
        let rep = check_law(&law, ScanMode::Sampled { pairs: 100, seed }).unwrap();
        prop_assert!(rep.agrees());
    }
}

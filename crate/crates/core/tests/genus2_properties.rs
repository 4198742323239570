use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kcomplete_core::genus2::{
    build_theta_classes, find_orbit4_point, random_curve, theta_translate, HyperellipticCurve,
    Mumford,
};
use kcomplete_core::{Fe, Field};

fn curve(s: &str) -> HyperellipticCurve {
    HyperellipticCurve::parse(s).unwrap()
}

/// A class built from two random affine points.
fn random_class(c: &HyperellipticCurve, pts: &[(Fe, Fe)], rng: &mut ChaCha8Rng) -> Mumford {
    let (x1, y1) = pts[rng.gen_range(0..pts.len())];
    let (x2, y2) = pts[rng.gen_range(0..pts.len())];
    let a = c.point_divisor(x1, y1).unwrap();
    let b = c.point_divisor(x2, y2).unwrap();
    c.cantor_add(&a, &b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cantor_group_laws_on_random_classes(seed in any::<u64>()) {
        let c = curve("hyper:101:3,0,7,1,0,2");
        let k = c.field().clone();
        let pts = c.affine_points().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [a, b, d] = [0; 3].map(|_| random_class(&c, &pts, &mut rng));
        prop_assert!(c.is_valid(&a));
        let ab = c.cantor_add(&a, &b).unwrap();
        prop_assert_eq!(&ab, &c.cantor_add(&b, &a).unwrap());
        prop_assert_eq!(
            c.cantor_add(&ab, &d).unwrap(),
            c.cantor_add(&a, &c.cantor_add(&b, &d).unwrap()).unwrap()
        );
        prop_assert!(c.cantor_add(&a, &a.neg(&k)).unwrap().is_identity());
        prop_assert_eq!(c.cantor_sub(&ab, &b).unwrap(), a.clone());
        let aa = c.cantor_add(&a, &a).unwrap();
        prop_assert_eq!(c.mul(3, &a).unwrap(), c.cantor_add(&aa, &a).unwrap());
    }
}

#[test]
fn theta_is_stable_under_negation() {
    for s in [
        "hyper:3^2:t,1,0,0,2,1",
        "hyper:11:1,0,3,0,0,1",
        "hyper:5:2,1,0,1,0,3",
    ] {
        let c = curve(s);
        let k = c.field().clone();
        for d in c.enumerate_jacobian().unwrap() {
            assert_eq!(d.weight() <= 1, d.neg(&k).weight() <= 1, "{s}");
        }
        let theta = theta_translate(&c, &Mumford::identity()).unwrap();
        assert_eq!(theta.len(), c.affine_points().unwrap().len() + 1);
        assert!(theta.iter().all(|d| d.weight() <= 1));
    }
}

#[test]
fn frobenius_fixes_exactly_the_rational_classes() {
    let c = curve("hyper:5:2,1,0,1,0,3");
    let k = c.field();
    let (_, e) = k.extension(2).unwrap();
    let c2 = c.base_change(&e).unwrap();
    let k2 = c2.field().clone();
    let rational = c.enumerate_jacobian().unwrap().len();
    let fixed = c2
        .enumerate_jacobian()
        .unwrap()
        .into_iter()
        .filter(|d| d.frobenius(&k2, 5) == *d)
        .count();
    assert_eq!(fixed, rational);
}

#[test]
fn theta_reports_on_further_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for q in [5u64, 13] {
        let k = Field::of_order(q).unwrap();
        let c = random_curve(&k, 5, &mut rng).unwrap();
        let Some(orbit) = find_orbit4_point(&c).unwrap() else {
            continue;
        };
        let rep = build_theta_classes(&c, &orbit).unwrap();
        assert!(rep.passed(), "{c}");
        assert!(rep.frobenius_cycles, "{c}");
    }
}

use std::collections::BTreeSet;

use moricone::delpezzo::{build, LatticeError};
use moricone::ratcone::rational::int;
use moricone::ratcone::{cones_equal, ClassVector};
use proptest::prelude::*;

mod common;
use common::brute_force;

const COUNTS: [usize; 8] = [1, 3, 6, 10, 16, 27, 56, 240];

fn as_ints(v: &ClassVector) -> Vec<i64> {
    v.coords()
        .iter()
        .map(|q| i64::try_from(q.to_integer()).unwrap())
        .collect()
}

#[test]
fn minus_one_counts_agree_with_brute_force() {
    for r in 1..=8 {
        let l = build(r).unwrap();
        let found: BTreeSet<Vec<i64>> = l.minus_one_classes().iter().map(as_ints).collect();
        assert_eq!(found.len(), COUNTS[r - 1], "r = {r}");
        assert_eq!(
            l.minus_one_classes().len(),
            found.len(),
            "duplicates at r = {r}"
        );
        assert_eq!(found, brute_force(r), "r = {r}");
    }
}

#[test]
fn minus_one_classes_are_exceptional() {
    for r in 1..=8 {
        let l = build(r).unwrap();
        let k = l.canonical();
        for d in l.minus_one_classes() {
            assert_eq!(l.intersect(&d, &d), int(-1), "{d}");
            assert_eq!(l.intersect(&d, &k), int(-1), "{d}");
        }
    }
}

#[test]
fn degree_bound_covers_every_class() {
    let l = build(8).unwrap();
    let max_degree = l
        .minus_one_classes()
        .iter()
        .map(|c| as_ints(c)[0])
        .max()
        .unwrap();
    assert_eq!(max_degree, 6);
    assert!(l.degree_bound() >= max_degree);
}

#[test]
fn small_cases_by_hand() {
    assert!(build(0).unwrap().minus_one_classes().is_empty());
    let l1 = build(1).unwrap();
    assert_eq!(
        l1.minus_one_classes(),
        vec![ClassVector::from_ints(&[0, 1])]
    );
    // E_1 and the fiber class H - E_1.
    let ne: BTreeSet<Vec<i64>> = l1.ne_generators().iter().map(as_ints).collect();
    assert_eq!(ne, [vec![0, 1], vec![1, -1]].into_iter().collect());
    let l2 = build(2).unwrap();
    let expected: BTreeSet<Vec<i64>> = [vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, -1]]
        .into_iter()
        .collect();
    assert_eq!(
        l2.minus_one_classes()
            .iter()
            .map(as_ints)
            .collect::<BTreeSet<_>>(),
        expected
    );
    // r = 0: the line class.
    assert_eq!(
        build(0).unwrap().ne_generators(),
        vec![ClassVector::from_ints(&[1])]
    );
}

#[test]
fn out_of_range_point_count() {
    assert_eq!(build(9).unwrap_err(), LatticeError::PointCount(9));
}

#[test]
fn hyperplane_nef_and_anticanonical_ample() {
    for r in 0..=8 {
        let l = build(r).unwrap();
        assert!(l.is_nef(&l.hyperplane()).unwrap(), "r = {r}");
        let minus_k = -&l.canonical();
        assert!(l.is_ample(&minus_k).unwrap(), "r = {r}");
        for c in l.ne_generators() {
            if r >= 2 {
                assert_eq!(l.intersect(&minus_k, &c), int(1));
            }
        }
    }
    let l1 = build(1).unwrap();
    assert!(!l1.is_nef(&l1.exceptional(1)).unwrap());
}

#[test]
fn nef_and_ne_are_mutually_dual() {
    for r in 0..=6 {
        let l = build(r).unwrap();
        let nef = l.nef_cone().unwrap();
        let ne = l.ne_cone().unwrap();
        // NE lives in curve coordinates; compare through the intersection form.
        let ne_as_functionals: Vec<ClassVector> = ne.rays().iter().map(|c| l.pairing(c)).collect();
        let back = moricone::ratcone::cone_from_rays(l.rank(), &ne_as_functionals).unwrap();
        assert!(
            cones_equal(&back.dual().unwrap(), &nef).unwrap().is_equal(),
            "r = {r}"
        );
        assert!(
            cones_equal(&nef.dual().unwrap(), &back).unwrap().is_equal(),
            "r = {r}"
        );
    }
}

#[test]
fn nef_ray_counts() {
    // Known sizes of the nef cones of del Pezzo surfaces of degree 9 - r.
    let expected = [1, 2, 3, 5, 10, 26, 99, 702];
    for (r, &count) in expected.iter().enumerate() {
        assert_eq!(
            build(r).unwrap().nef_cone().unwrap().rays().len(),
            count,
            "r = {r}"
        );
    }
}

proptest! {
    #[test]
    fn minus_one_set_closed_under_permutations(r in 2usize..=7, seed in any::<u64>()) {
        let l = build(r).unwrap();
        let set: BTreeSet<Vec<i64>> = l.minus_one_classes().iter().map(as_ints).collect();
        let mut perm: Vec<usize> = (0..r).collect();
        let mut s = seed;
        for i in (1..r).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        for c in &set {
            let mut p = vec![c[0]];
            p.extend(perm.iter().map(|&j| c[1 + j]));
            prop_assert!(set.contains(&p), "{:?} maps to {:?}", c, p);
        }
    }

    #[test]
    fn ample_implies_nef(r in 0usize..=6, coeffs in proptest::collection::vec(-4i64..=6, 7)) {
        let l = build(r).unwrap();
        let d = ClassVector::from_ints(&coeffs[..l.rank()]);
        if l.is_ample(&d).unwrap() {
            prop_assert!(l.is_nef(&d).unwrap());
        }
        let pairs_ok = l.ne_generators().iter().all(|c| l.intersect(&d, c) >= int(0));
        prop_assert_eq!(l.is_nef(&d).unwrap(), pairs_ok);
    }
}

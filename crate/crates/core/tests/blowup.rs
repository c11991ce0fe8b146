use moricone::blowup::{
    admissible_components, classify, conormal_fiber, conormal_linear, conormal_restricted,
    fiber_structure, k_degree, minus_ef_nef_on_fiber, relative_cones, relative_curves,
    relative_pairing, ConstructionParams, ContractionKind, DegreeMultiset, Modification,
    ParamError,
};
use moricone::ratcone::rational::int;
use moricone::ratcone::ClassVector;
use proptest::prelude::*;

fn params(a: u32, b: u32, c: &[u32], a_in_b: bool) -> ConstructionParams {
    ConstructionParams::new(a, b, c.to_vec(), a_in_b).unwrap()
}

#[test]
fn pairing_table() {
    let m = relative_pairing();
    let rows: Vec<Vec<_>> = (0..2).map(|i| m.row(i).to_vec()).collect();
    assert_eq!(rows, vec![vec![int(-1), int(0)], vec![int(1), int(-1)]]);
    let [e, f] = relative_curves();
    let (big_e, big_f) = (
        ClassVector::from_ints(&[1, 0]),
        ClassVector::from_ints(&[0, 1]),
    );
    assert_eq!(big_e.dot(&e), int(-1));
    assert_eq!(big_e.dot(&f), int(0));
    assert_eq!(big_f.dot(&e), int(1));
    assert_eq!(big_f.dot(&f), int(-1));
}

#[test]
fn relative_cones_are_mutually_dual() {
    let cones = relative_cones().unwrap();
    assert!(cones.verified());
    let mut rays = cones.nef.rays().to_vec();
    rays.sort();
    assert_eq!(
        rays,
        vec![
            ClassVector::from_ints(&[-1, -1]),
            ClassVector::from_ints(&[-1, 0])
        ]
    );
}

#[test]
fn canonical_degrees() {
    assert_eq!(k_degree(&params(3, 2, &[1], false)).unwrap(), (-1, -1));
    assert_eq!(k_degree(&params(2, 2, &[1], false)).unwrap().0, 0);
    assert_eq!(k_degree(&params(2, 3, &[1], false)).unwrap().0, 1);
}

#[test]
fn contraction_examples() {
    let r = classify(&params(3, 2, &[1], false)).unwrap();
    assert!(r.is_small && r.is_k_extremal);
    assert_eq!(r.birational_modification, Modification::Flip);
    assert_eq!(r.exceptional_component_codims, vec![2]);

    let r = classify(&params(2, 2, &[1], false)).unwrap();
    assert!(r.is_small && !r.is_k_extremal);
    assert_eq!(r.birational_modification, Modification::Flop);

    // c = b: the first center sits inside the second and the contraction is divisorial.
    let r = classify(&params(4, 3, &[3], true)).unwrap();
    assert_eq!(r.kind, ContractionKind::Divisorial);
    assert_eq!(r.exceptional_component_codims, vec![1]);
    assert_eq!(r.birational_modification, Modification::None);
}

#[test]
fn invalid_parameters() {
    assert!(matches!(
        ConstructionParams::new(1, 3, vec![1], false),
        Err(ParamError::Codimension { .. })
    ));
    assert_eq!(
        ConstructionParams::new(3, 3, vec![], false).unwrap_err(),
        ParamError::NoComponents
    );
    assert_eq!(
        ConstructionParams::new(2, 3, vec![3], true).unwrap_err(),
        ParamError::Defect { c: 3, max: 2 }
    );
    assert!(matches!(
        ConstructionParams::new(4, 3, vec![3], false),
        Err(ParamError::ContainmentFlag { .. })
    ));
    assert!(matches!(
        ConstructionParams::new(4, 3, vec![1], true),
        Err(ParamError::ContainmentFlag { .. })
    ));
    // Defect a means a component of codimension b, i.e. B inside A.
    assert_eq!(
        ConstructionParams::new(2, 3, vec![2], false).unwrap_err(),
        ParamError::SecondInFirst
    );
    let mut p = params(3, 2, &[1], false);
    p.b_subset_a = true;
    assert_eq!(p.validate().unwrap_err(), ParamError::SecondInFirst);
}

#[test]
fn contraction_grid() {
    for a in 2..=6u32 {
        for b in 2..=6u32 {
            for c in admissible_components(a, b, 3) {
                let a_in_b = c.contains(&b);
                let p = params(a, b, &c, a_in_b);
                let r = classify(&p).unwrap();
                let max = *c.iter().max().unwrap();
                // K = (a-1)E + (b-1)F on contracted curves, against the literal pairing table.
                let k_e = -(a as i64 - 1) + (b as i64 - 1);
                let k_f = -(b as i64 - 1);
                assert_eq!((r.k_dot_e, r.k_dot_f), (k_e, k_f));
                assert_eq!(r.k_dot_e, b as i64 - a as i64);
                assert_eq!(r.is_small, max < b, "{a} {b} {c:?}");
                assert_eq!(r.is_k_extremal, a > b);
                let expected = match (r.is_small, a.cmp(&b)) {
                    (true, std::cmp::Ordering::Greater) => Modification::Flip,
                    (true, std::cmp::Ordering::Equal) => Modification::Flop,
                    _ => Modification::None,
                };
                assert_eq!(r.birational_modification, expected);
                assert_eq!(
                    r.exceptional_component_codims.iter().all(|&k| k >= 2),
                    r.is_small
                );
            }
        }
    }
}

#[test]
fn conormal_examples() {
    assert_eq!(
        conormal_linear(5, 2).unwrap(),
        DegreeMultiset::from_pairs(&[(-1, 2)])
    );
    assert!(conormal_linear(2, 3).is_err());
    assert_eq!(
        conormal_fiber(3),
        DegreeMultiset::from_pairs(&[(1, 1), (0, 3)])
    );
    assert_eq!(
        conormal_restricted(4, 3, 2).unwrap(),
        DegreeMultiset::from_pairs(&[(0, 1), (-1, 2)])
    );
    let (nef, twisted) = minus_ef_nef_on_fiber(4, 3, 2).unwrap();
    assert!(nef);
    assert_eq!(twisted, DegreeMultiset::from_pairs(&[(1, 1), (0, 2)]));
}

#[test]
fn fiber_examples() {
    let s = fiber_structure(3, 2, 1).unwrap();
    assert_eq!(s.component_count, 2);
    assert_eq!((s.w.ambient_dim, s.w.center_codim), (2, 1));
    assert_eq!((s.f.fiber_dim, s.f.base_dim), (1, 1));
    assert_eq!(fiber_structure(4, 3, 3).unwrap().component_count, 1);
    assert!(fiber_structure(3, 3, 3).is_err());
}

#[test]
fn minus_ef_nef_for_all_small_parameters() {
    for a in 2..=8 {
        for b in 2..=8 {
            for c in 1..=(a - 1).min(b) {
                let (nef, twisted) = minus_ef_nef_on_fiber(a, b, c).unwrap();
                assert!(nef, "{a} {b} {c}");
                assert_eq!(twisted.total(), b);
            }
        }
    }
}

proptest! {
    #[test]
    fn conormal_total_is_codimension(a in 2u32..=12, b in 2u32..=12, c in 1u32..=12) {
        prop_assume!(c < a && c <= b);
        prop_assert_eq!(conormal_restricted(a, b, c).unwrap().total(), b);
        prop_assert_eq!(conormal_linear(a + b, c).unwrap().total(), c);
        let s = fiber_structure(a, b, c).unwrap();
        prop_assert_eq!(s.component_count == 1, b == c);
    }

    #[test]
    fn classify_sees_only_the_largest_defect(a in 2u32..=7, b in 2u32..=7, seed in any::<u64>()) {
        let sets = admissible_components(a, b, 3);
        let c = &sets[(seed % sets.len() as u64) as usize];
        let a_in_b = c.contains(&b);
        let r = classify(&params(a, b, c, a_in_b)).unwrap();
        let mut reversed = c.clone();
        reversed.reverse();
        let mut single = vec![*c.iter().max().unwrap()];
        if a_in_b && single[0] != b {
            single.push(b);
        }
        let r_rev = classify(&params(a, b, &reversed, a_in_b)).unwrap();
        let r_max = classify(&params(a, b, &single, a_in_b)).unwrap();
        prop_assert_eq!(r.is_small, r_rev.is_small);
        prop_assert_eq!(r.is_small, r_max.is_small);
        prop_assert_eq!(r.birational_modification, r_max.birational_modification);
    }
}

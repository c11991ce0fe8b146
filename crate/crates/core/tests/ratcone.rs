use std::collections::BTreeSet;
use std::time::Duration;

use moricone::ratcone::rational::{format_rational, frac, int, parse_rational};
use moricone::ratcone::{
    cone_from_inequalities, cone_from_rays, cones_equal, lp_feasible, Budget, ClassVector,
    ConeError, Constraint, Equality, Feasibility, LinearProgram, Membership, PolyCone, Relation,
};
use proptest::prelude::*;

// Independent integer helpers. Nothing here goes through the crate's elimination code.

fn det(m: &[Vec<i128>]) -> i128 {
    // Bareiss elimination; exact for integer matrices.
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a = m.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Generalized cross product: the vector `n` with `n . x = det(rows; x)`.
fn normal(rows: &[Vec<i128>], dim: usize) -> Vec<i128> {
    (0..dim)
        .map(|c| {
            let minor: Vec<Vec<i128>> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != c)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let s = if (rows.len() + c).is_multiple_of(2) {
                1
            } else {
                -1
            };
            s * det(&minor)
        })
        .collect()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn primitive(v: &[i128]) -> Vec<i128> {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    v.iter().map(|&x| x / g).collect()
}

fn dot(a: &[i128], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn to_class(v: &[i128]) -> ClassVector {
    ClassVector::from_ints(&v.iter().map(|&x| x as i64).collect::<Vec<_>>())
}

fn to_ints(v: &ClassVector) -> Vec<i128> {
    v.coords()
        .iter()
        .map(|q| {
            assert!(q.is_integer(), "non-integral ray {v}");
            i128::try_from(q.to_integer()).unwrap()
        })
        .collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Facet normals of a full-dimensional cone by brute force over `(dim - 1)`-subsets.
fn facets_by_enumeration(gens: &[Vec<i128>], dim: usize) -> BTreeSet<Vec<i128>> {
    let mut out = BTreeSet::new();
    for s in subsets(gens.len(), dim - 1) {
        let rows: Vec<Vec<i128>> = s.iter().map(|&i| gens[i].clone()).collect();
        let n = normal(&rows, dim);
        if n.iter().all(|&x| x == 0) {
            continue;
        }
        let n = primitive(&n);
        let vals: Vec<i128> = gens.iter().map(|g| dot(&n, g)).collect();
        if vals.iter().all(|&v| v >= 0) {
            out.insert(n);
        } else if vals.iter().all(|&v| v <= 0) {
            out.insert(n.iter().map(|x| -x).collect());
        }
    }
    out
}

fn ray_set(c: &PolyCone) -> BTreeSet<Vec<i128>> {
    c.rays().iter().map(to_ints).collect()
}

fn full_rank(gens: &[Vec<i128>], dim: usize) -> bool {
    subsets(gens.len(), dim)
        .iter()
        .any(|s| det(&s.iter().map(|&i| gens[i].clone()).collect::<Vec<_>>()) != 0)
}

/// Pointed, since every generator has a positive last coordinate.
fn pointed_cone() -> impl Strategy<Value = (usize, Vec<Vec<i128>>)> {
    (2usize..=6).prop_flat_map(|dim| {
        let gen = (proptest::collection::vec(-3i128..=3, dim - 1), 1i128..=3).prop_map(
            |(mut v, last)| {
                v.push(last);
                v
            },
        );
        (Just(dim), proptest::collection::vec(gen, dim..=dim + 4))
    })
}

#[test]
fn simplicial_dual_matches_adjugate() {
    let cases: [&[&[i64]]; 3] = [
        &[&[1, 0], &[1, 2]],
        &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]],
        &[&[2, 1, 0, 1], &[0, 1, 0, 0], &[1, 0, 3, 1], &[0, 0, 1, 2]],
    ];
    for rows in cases {
        let dim = rows.len();
        let b: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| i128::from(x)).collect())
            .collect();
        // The dual rays of a simplicial cone are the columns of B^{-1}, i.e. the normals of
        // the facets spanned by all but one generator, signed to be positive on that one.
        let expected: BTreeSet<Vec<i128>> = (0..dim)
            .map(|skip| {
                let others: Vec<Vec<i128>> = (0..dim)
                    .filter(|&i| i != skip)
                    .map(|i| b[i].clone())
                    .collect();
                let n = primitive(&normal(&others, dim));
                if dot(&n, &b[skip]) > 0 {
                    n
                } else {
                    n.iter().map(|x| -x).collect()
                }
            })
            .collect();
        let gens: Vec<ClassVector> = b.iter().map(|r| to_class(r)).collect();
        let dual = cone_from_rays(dim, &gens).unwrap().dual().unwrap();
        assert_eq!(ray_set(&dual), expected, "rows {rows:?}");
    }
}

#[test]
fn square_pyramid_dual() {
    let gens: Vec<ClassVector> = [[1, 1, 1], [1, -1, 1], [-1, 1, 1], [-1, -1, 1]]
        .iter()
        .map(|r| ClassVector::from_ints(r))
        .collect();
    let dual = cone_from_rays(3, &gens).unwrap().dual().unwrap();
    let expected: BTreeSet<Vec<i128>> = [[1, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1]]
        .iter()
        .map(|r| r.to_vec())
        .collect();
    assert_eq!(ray_set(&dual), expected);
}

#[test]
fn orthant_is_self_dual() {
    let units: Vec<ClassVector> = (0..4).map(|i| ClassVector::unit(4, i)).collect();
    let c = cone_from_rays(4, &units).unwrap();
    assert!(cones_equal(&c.dual().unwrap(), &c).unwrap().is_equal());
    assert_eq!(c.rays().len(), 4);
    assert_eq!(c.facets().len(), 4);
}

#[test]
fn redundant_generators_are_dropped() {
    let gens: Vec<ClassVector> = [[1, 0], [0, 1], [1, 1], [2, 2], [0, 0], [3, 1]]
        .iter()
        .map(|r| ClassVector::from_ints(r))
        .collect();
    let c = cone_from_rays(2, &gens).unwrap();
    let expected: BTreeSet<Vec<i128>> = [vec![1, 0], vec![0, 1]].into_iter().collect();
    assert_eq!(ray_set(&c), expected);
}

#[test]
fn lower_dimensional_cone_has_equations_and_no_dual() {
    let gens = [
        ClassVector::from_ints(&[1, 0, 0]),
        ClassVector::from_ints(&[0, 1, 0]),
    ];
    let c = cone_from_rays(3, &gens).unwrap();
    assert!(!c.is_full_dimensional());
    assert_eq!(c.equations(), &[ClassVector::from_ints(&[0, 0, 1])]);
    assert!(matches!(c.dual(), Err(ConeError::Lineality { dim: 1 })));
    match c.contains(&ClassVector::from_ints(&[1, 1, 1])).unwrap() {
        Membership::NonMember { separator } => {
            assert!(separator.dot(&ClassVector::from_ints(&[1, 1, 1])) < int(0));
            assert!(gens.iter().all(|g| separator.dot(g) >= int(0)));
        }
        m => panic!("expected a separator, got {m:?}"),
    }
}

#[test]
fn non_pointed_inequalities_are_rejected() {
    // x >= 0 alone in the plane: the solution cone contains a line.
    let r = cone_from_inequalities(2, &[ClassVector::from_ints(&[1, 0])], &Budget::UNLIMITED);
    assert!(matches!(r, Err(ConeError::Lineality { .. })));
}

#[test]
fn dimension_mismatch_is_an_error() {
    let r = cone_from_rays(3, &[ClassVector::from_ints(&[1, 0])]);
    assert_eq!(
        r.unwrap_err(),
        ConeError::DimensionMismatch {
            expected: 3,
            found: 2
        }
    );
}

#[test]
fn budget_exceeded_is_distinct() {
    let gens: Vec<ClassVector> = (0..40)
        .map(|i: i64| ClassVector::from_ints(&[1, i, i * i, i * i * i, i * i * i * i, 1 + i % 3]))
        .collect();
    let r = PolyCone::generated_by(6, &gens, &Budget::rays(5));
    assert!(matches!(r, Err(ConeError::BudgetExceeded { .. })), "{r:?}");
    let r = PolyCone::generated_by(6, &gens, &Budget::time(Duration::ZERO));
    assert!(matches!(r, Err(ConeError::BudgetExceeded { .. })), "{r:?}");
    assert!(PolyCone::generated_by(6, &gens, &Budget::UNLIMITED).is_ok());
}

#[test]
fn large_entries_fall_back_to_big_integers() {
    let big = 1i64 << 40;
    let gens: Vec<ClassVector> = [[big, 1, 0], [0, big, 1], [1, 0, big], [big, big, big - 1]]
        .iter()
        .map(|r| ClassVector::from_ints(r))
        .collect();
    let c = cone_from_rays(3, &gens).unwrap();
    let ints: Vec<Vec<i128>> = gens.iter().map(to_ints).collect();
    let facets: BTreeSet<Vec<i128>> = c.facets().iter().map(to_ints).collect();
    assert_eq!(facets, facets_by_enumeration(&ints, 3));
}

#[test]
fn rationals_round_trip_as_strings() {
    for (q, s) in [
        (frac(3, 4), "3/4"),
        (frac(-6, 4), "-3/2"),
        (int(5), "5"),
        (int(0), "0"),
    ] {
        assert_eq!(format_rational(&q), s);
        assert_eq!(parse_rational(s).unwrap(), q);
    }
    assert_eq!(parse_rational("10/-4").unwrap(), frac(-5, 2));
    assert!(parse_rational("1/0").is_err());
    assert!(parse_rational("x").is_err());
    let v = ClassVector::new(vec![frac(1, 2), int(-3)]);
    let json = serde_json::to_string(&v).unwrap();
    assert_eq!(json, r#"["1/2","-3"]"#);
    assert_eq!(serde_json::from_str::<ClassVector>(&json).unwrap(), v);
}

#[test]
fn strict_lp_refutation_and_feasible_point() {
    // x > 0, y > 0, x + y < 0.
    let lp = LinearProgram {
        vars: 2,
        constraints: vec![
            Constraint::new(ClassVector::from_ints(&[1, 0]), Relation::Gt, int(0)),
            Constraint::new(ClassVector::from_ints(&[0, 1]), Relation::Gt, int(0)),
            Constraint::lt(ClassVector::from_ints(&[1, 1]), int(0)),
        ],
    };
    match lp_feasible(&lp).unwrap() {
        Feasibility::Infeasible(cert) => {
            assert!(cert.check(&lp));
            assert_eq!(cert.combine(&lp).render(), "0 > 0");
        }
        f => panic!("expected infeasible, got {f:?}"),
    }
    // x + y <= 0 alone in place of the strict row is still infeasible; dropping strictness
    // everywhere is not.
    let relaxed = LinearProgram {
        vars: 2,
        constraints: vec![
            Constraint::new(ClassVector::from_ints(&[1, 0]), Relation::Ge, int(0)),
            Constraint::new(ClassVector::from_ints(&[0, 1]), Relation::Ge, int(0)),
            Constraint::le(ClassVector::from_ints(&[1, 1]), int(0)),
        ],
    };
    match lp_feasible(&relaxed).unwrap() {
        Feasibility::Feasible { point } => {
            assert!(relaxed.constraints.iter().all(|c| c.holds_at(&point)))
        }
        f => panic!("expected feasible, got {f:?}"),
    }
}

#[test]
fn equality_rows_take_signed_multipliers() {
    // x = 1, x = 2.
    let lp = LinearProgram {
        vars: 1,
        constraints: vec![
            Constraint::new(ClassVector::from_ints(&[1]), Relation::Eq, int(1)),
            Constraint::new(ClassVector::from_ints(&[1]), Relation::Eq, int(2)),
        ],
    };
    let Feasibility::Infeasible(cert) = lp_feasible(&lp).unwrap() else {
        panic!("x = 1 = 2 is infeasible")
    };
    assert!(cert.check(&lp));
}

#[test]
fn malformed_lp_is_rejected() {
    let lp = LinearProgram {
        vars: 2,
        constraints: vec![Constraint::new(
            ClassVector::from_ints(&[1]),
            Relation::Ge,
            int(0),
        )],
    };
    assert!(lp_feasible(&lp).is_err());
}

fn classes(gens: &[Vec<i128>]) -> Vec<ClassVector> {
    gens.iter().map(|g| to_class(g)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn double_dual_is_identity((dim, gens) in pointed_cone()) {
        prop_assume!(full_rank(&gens, dim));
        let c = cone_from_rays(dim, &classes(&gens)).unwrap();
        let dd = c.dual().unwrap().dual().unwrap();
        prop_assert_eq!(dd.rays(), c.rays());
        prop_assert!(cones_equal(&dd, &c).unwrap().is_equal());
    }

    #[test]
    fn facets_match_enumeration((dim, gens) in pointed_cone()) {
        prop_assume!(full_rank(&gens, dim));
        let c = cone_from_rays(dim, &classes(&gens)).unwrap();
        let facets: BTreeSet<Vec<i128>> = c.facets().iter().map(to_ints).collect();
        prop_assert_eq!(facets, facets_by_enumeration(&gens, dim));
        // Extremal rays are generators on which the tight facets have rank dim - 1.
        for r in c.rays() {
            prop_assert!(gens.iter().any(|g| primitive(g) == to_ints(r)));
        }
    }

    #[test]
    fn membership_agrees_with_dual(
        (dim, gens) in pointed_cone(),
        probe in proptest::collection::vec(-4i128..=4, 6),
    ) {
        prop_assume!(full_rank(&gens, dim));
        let c = cone_from_rays(dim, &classes(&gens)).unwrap();
        let v = to_class(&probe[..dim]);
        let by_dual = c.dual().unwrap().rays().iter().all(|w| w.dot(&v) >= int(0));
        match c.contains(&v).unwrap() {
            Membership::Member { coefficients } => {
                prop_assert!(by_dual);
                prop_assert!(coefficients.coords().iter().all(|x| *x >= int(0)));
                let mut sum = ClassVector::zeros(dim);
                for (t, r) in coefficients.coords().iter().zip(c.rays()) {
                    sum = &sum + &r.scale(t);
                }
                prop_assert_eq!(sum, v);
            }
            Membership::NonMember { separator } => {
                prop_assert!(!by_dual);
                prop_assert!(separator.dot(&v) < int(0));
                prop_assert!(c.rays().iter().all(|r| separator.dot(r) >= int(0)));
            }
        }
    }

    #[test]
    fn coordinate_permutation_commutes_with_dual(
        (dim, gens) in pointed_cone(),
        seed in any::<u64>(),
    ) {
        prop_assume!(full_rank(&gens, dim));
        let mut perm: Vec<usize> = (0..dim).collect();
        let mut s = seed;
        for i in (1..dim).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let permute = |v: &[i128]| -> Vec<i128> { perm.iter().map(|&p| v[p]).collect() };
        let dual = cone_from_rays(dim, &classes(&gens)).unwrap().dual().unwrap();
        let permuted: Vec<Vec<i128>> = gens.iter().map(|g| permute(g)).collect();
        let dual_of_permuted = cone_from_rays(dim, &classes(&permuted)).unwrap().dual().unwrap();
        let expected: BTreeSet<Vec<i128>> = dual.rays().iter().map(|r| permute(&to_ints(r))).collect();
        prop_assert_eq!(ray_set(&dual_of_permuted), expected);
    }

    #[test]
    fn lp_answers_carry_valid_evidence(
        rows in proptest::collection::vec(
            (proptest::collection::vec(-3i64..=3, 3), -3i64..=3, 0u8..3),
            1..7,
        ),
    ) {
        let lp = LinearProgram {
            vars: 3,
            constraints: rows
                .iter()
                .map(|(a, b, rel)| {
                    let relation = [Relation::Ge, Relation::Gt, Relation::Eq][usize::from(*rel)];
                    Constraint::new(ClassVector::from_ints(a), relation, int(*b))
                })
                .collect(),
        };
        match lp_feasible(&lp).unwrap() {
            Feasibility::Feasible { point } => prop_assert!(lp.constraints.iter().all(|c| c.holds_at(&point))),
            Feasibility::Infeasible(cert) => {
                prop_assert!(cert.check(&lp));
                prop_assert!(cert.combine(&lp).is_contradiction());
            }
        }
    }

    #[test]
    fn equals_generated_matches_cones_equal(
        (dim, gens) in pointed_cone(),
        drop in 0usize..10,
    ) {
        prop_assume!(full_rank(&gens, dim));
        let c = cone_from_rays(dim, &classes(&gens)).unwrap();
        let mut sub = gens.clone();
        sub.remove(drop % sub.len());
        prop_assume!(full_rank(&sub, dim));
        let d = cone_from_rays(dim, &classes(&sub)).unwrap();
        let direct = c.equals_generated(&classes(&sub)).unwrap().is_equal();
        prop_assert_eq!(direct, cones_equal(&c, &d).unwrap().is_equal());
        if let Equality::NotEqual(diff) = c.equals_generated(&classes(&sub)).unwrap() {
            prop_assert!(c.contains(&diff.generator).unwrap().is_member());
        }
    }
}

use std::path::PathBuf;

use moricone::delpezzo;
use moricone::nefcert::{
    hypersurface_chain, linear_chain, product_e_certificate, tsukioka_certificates, verify_chain,
    verify_he_hypotheses, CertError, Certificate, ChainCertificate, ChainStep, HeSelectors,
    Stratum, CLAIM_CHAIN, CLAIM_E, CLAIM_EF,
};
use moricone::ratcone::rational::int;
use moricone::ratcone::{ClassVector, Matrix};
use proptest::prelude::*;

const TSUKIOKA: [(u32, u32, u32); 3] = [(2, 2, 2), (3, 2, 2), (2, 3, 3)];

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

/// `Bl_p P^2 > C`, optionally continuing to a point, with `C` a smooth curve of class `curve`.
fn surface_chain(divisor: &[i64], curve: &[i64], to_point: bool) -> ChainCertificate {
    let l = delpezzo::build(1).unwrap();
    let c = ClassVector::from_ints(curve);
    let mut steps = vec![
        ChainStep {
            stratum: Stratum::new("X", 2, l.ne_pairing_vectors()),
            restriction: Matrix::identity(2),
            next_class: Some(c.clone()),
        },
        ChainStep {
            stratum: Stratum::curve("C"),
            restriction: Matrix::row_vector(&l.pairing(&c)),
            next_class: to_point.then(|| ClassVector::from_ints(&[1])),
        },
    ];
    if to_point {
        steps.push(ChainStep {
            stratum: Stratum::point("pt"),
            restriction: Matrix::zeros(0, 1),
            next_class: None,
        });
    }
    ChainCertificate {
        root_rank: 2,
        steps,
        divisor: ClassVector::from_ints(divisor),
    }
}

#[test]
fn linear_chain_certifies_positive_multiples() {
    for n in 1..=4 {
        let v = verify_chain(&linear_chain(n, 1).unwrap()).unwrap();
        assert!(v.passed);
        assert_eq!(v.certified.as_deref(), Some(CLAIM_CHAIN));
        // One difference per codimension-one step, plus the final check on the point.
        assert_eq!(v.checks.len(), n as usize + 1);
        let v = verify_chain(&linear_chain(n, 0).unwrap()).unwrap();
        assert!(!v.passed);
        assert_eq!(v.first_failure.as_deref(), Some("step 0"));
        assert!(v.certified.is_none());
    }
}

#[test]
fn surface_chain_examples() {
    // H on a line: H - L = 0 on X, H.L = 1 on L, then 1 - 1 = 0 at the point.
    assert!(
        verify_chain(&surface_chain(&[1, 0], &[1, 0], true))
            .unwrap()
            .passed
    );
    // H - E stopping at a fiber H - E: the difference is zero and (H - E)^2 = 0.
    assert!(
        verify_chain(&surface_chain(&[1, -1], &[1, -1], false))
            .unwrap()
            .passed
    );
    // Continuing to a point asks for (H - E)^2 >= 1, which fails on the curve.
    let v = verify_chain(&surface_chain(&[1, -1], &[1, -1], true)).unwrap();
    assert_eq!(v.first_failure.as_deref(), Some("step 1"));
    // E is not nef, and the difference E - (H - E) is negative on E.
    let v = verify_chain(&surface_chain(&[0, 1], &[1, -1], false)).unwrap();
    assert!(!v.passed);
    let failing = v.checks.iter().find(|c| !c.passed).unwrap();
    assert!(failing.witness.is_some());
}

#[test]
fn shape_errors() {
    let mut cert = surface_chain(&[1, 0], &[1, 0], true);
    cert.steps[1].restriction = Matrix::identity(2);
    assert!(matches!(verify_chain(&cert), Err(CertError::Shape { .. })));
    let empty = ChainCertificate {
        root_rank: 1,
        steps: vec![],
        divisor: ClassVector::from_ints(&[1]),
    };
    assert_eq!(verify_chain(&empty).unwrap_err(), CertError::Empty);
    let mut cert = linear_chain(2, 1).unwrap();
    cert.divisor = ClassVector::from_ints(&[1, 0]);
    assert!(matches!(verify_chain(&cert), Err(CertError::Shape { .. })));
}

#[test]
fn product_needs_a_selector() {
    let first = linear_chain(2, 1).unwrap();
    let second = hypersurface_chain(2, 2, 2, false).unwrap();
    let none = HeSelectors::default();
    assert!(matches!(
        product_e_certificate(&first, &second, none),
        Err(CertError::NoSelector(_))
    ));
    let both = HeSelectors {
        first_nef: true,
        second_nef: true,
    };
    let cert = product_e_certificate(&first, &second, both).unwrap();
    assert_eq!(
        verify_he_hypotheses(&cert).unwrap().certified.as_deref(),
        Some(CLAIM_E)
    );
}

#[test]
fn selected_factor_condition_must_hold() {
    // -H on the first factor is not nef, so selecting it alone fails.
    let first = linear_chain(2, -1).unwrap();
    let second = hypersurface_chain(2, 2, 2, false).unwrap();
    let sel = HeSelectors {
        first_nef: true,
        second_nef: false,
    };
    assert!(matches!(
        product_e_certificate(&first, &second, sel),
        Err(CertError::FactorCondition { .. })
    ));
}

#[test]
fn tsukioka_certificates_verify() {
    for (n1, n2, d) in TSUKIOKA {
        let (e, ef) = tsukioka_certificates(n1, n2, d).unwrap();
        // H_1 + d H_2 on P^{n1} x P^{n2}.
        assert_eq!(e.divisor, ClassVector::from_ints(&[1, i64::from(d)]));
        let ve = Certificate::BlowupE(e).verify().unwrap();
        let vef = Certificate::BlowupEf(ef).verify().unwrap();
        assert!(ve.passed, "{n1} {n2} {d}: {:?}", ve.first_failure);
        assert!(vef.passed, "{n1} {n2} {d}: {:?}", vef.first_failure);
        assert_eq!(vef.certified.as_deref(), Some(CLAIM_EF));
        // The last curve of the hypersurface chain carries d H_2 - point, of degree d^2 - 1.
        let last = i64::from(d * d) - 1;
        assert!(
            vef.checks
                .iter()
                .any(|c| c.stratum.contains(&format!("L_{d}"))
                    && c.tested.coords().contains(&int(last))),
            "no degree {last} check for ({n1}, {n2}, {d})"
        );
    }
}

#[test]
fn shipped_fixtures_match_builders() {
    for (n1, n2, d) in TSUKIOKA {
        let (e, ef) = tsukioka_certificates(n1, n2, d).unwrap();
        for (tag, built) in [
            ("e", Certificate::BlowupE(e)),
            ("ef", Certificate::BlowupEf(ef)),
        ] {
            let path = fixture(&format!("tsukioka_{n1}_{n2}_{d}_{tag}.json"));
            let text = std::fs::read_to_string(&path).unwrap();
            let loaded = Certificate::from_json(&text).unwrap();
            assert!(loaded.verify().unwrap().passed, "{}", path.display());
            assert_eq!(loaded, built, "{}", path.display());
            assert_eq!(text.trim_end(), built.to_json());
        }
    }
}

#[test]
fn json_round_trip() {
    let certs = [
        Certificate::Chain(linear_chain(3, 2).unwrap()),
        Certificate::Chain(surface_chain(&[1, -1], &[1, -1], false)),
        Certificate::BlowupE(tsukioka_certificates(2, 2, 2).unwrap().0),
        Certificate::BlowupEf(tsukioka_certificates(3, 3, 2).unwrap().1),
    ];
    for c in certs {
        let back = Certificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }
}

#[test]
fn minimal_chain_json() {
    // The documented plain chain format, with no kind field and no ids.
    let text = r#"{
        "root_rank": 1,
        "steps": [
            {"rank": 1, "restriction": [["1"]], "next_class": ["1"], "oracle_curves": [["1"]]},
            {"rank": 1, "restriction": [["1"]], "next_class": ["1"], "oracle_curves": [["1"]]},
            {"rank": 0, "restriction": []}
        ],
        "divisor": ["3/2"]
    }"#;
    let cert = Certificate::from_json(text).unwrap();
    let v = cert.verify().unwrap();
    assert!(v.passed);
    assert_eq!(v.checks.len(), 3);
}

#[test]
fn malformed_json_is_rejected() {
    let cases = [
        "not json",
        r#"{"root_rank": 1, "steps": [], "divisor": ["1"], "extra": 0}"#,
        // Restriction width must match the parent rank.
        r#"{"root_rank": 2, "steps": [{"rank": 1, "restriction": [["1"]]}], "divisor": ["1", "0"]}"#,
        r#"{"root_rank": 1, "steps": [{"rank": 1, "restriction": [["x"]]}], "divisor": ["1"]}"#,
        r#"{"kind": "blowup_ef", "root_rank": 1, "steps": [{"rank": 1, "restriction": [["1"]]}], "divisor": ["1"]}"#,
        r#"{"kind": "chain", "root_rank": 1, "outer": [{"rank": 1, "restriction": [["1"]]}], "divisor": ["1"]}"#,
    ];
    for text in cases {
        assert!(
            matches!(Certificate::from_json(text), Err(CertError::Json(_))),
            "{text}"
        );
    }
    let empty =
        Certificate::from_json(r#"{"root_rank": 1, "steps": [], "divisor": ["1"]}"#).unwrap();
    assert_eq!(empty.verify().unwrap_err(), CertError::Empty);
}

#[test]
fn tampered_fixture_fails() {
    let text = std::fs::read_to_string(fixture("tsukioka_2_2_2_ef.json")).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    // Ask for 0 H_1 + 2 H_2 - E - F: the first factor loses its positivity.
    value["divisor"][0] = "0".into();
    let cert = Certificate::from_json(&value.to_string()).unwrap();
    let v = cert.verify().unwrap();
    assert!(!v.passed);
    assert!(v.checks.iter().any(|c| !c.passed && c.witness.is_some()));
}

proptest! {
    #[test]
    fn adding_a_nef_multiple_keeps_chains_valid(n in 1u32..=5, m in -3i64..=5, t in 0i64..=4) {
        let base = verify_chain(&linear_chain(n, m).unwrap()).unwrap();
        prop_assert_eq!(base.passed, m >= 1);
        let more = verify_chain(&linear_chain(n, m + t).unwrap()).unwrap();
        if base.passed {
            prop_assert!(more.passed);
        }
    }

    #[test]
    fn hypersurface_chains_pass_for_large_multiples(n in 2u32..=5, d in 1u32..=4, extra in 0i64..=3) {
        let m = i64::from(d) + extra;
        let v = verify_chain(&hypersurface_chain(n, d, m, true).unwrap()).unwrap();
        prop_assert!(v.passed);
        if d >= 2 {
            let v = verify_chain(&hypersurface_chain(n, d, i64::from(d) - 1, true).unwrap()).unwrap();
            prop_assert!(!v.passed);
        }
    }
}

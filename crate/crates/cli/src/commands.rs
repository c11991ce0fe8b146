use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use moricone::blowup::{
    self, ConstructionParams, ContractionReport, DegreeMultiset, FiberStructure, ParamError,
};
use moricone::delpezzo::{self, LatticeError};
use moricone::nefcert::{tsukioka_certificates, CertError, Certificate, Check, Verdict};
use moricone::ratcone::rational::format_rational;
use moricone::ratcone::{Budget, ClassVector, Equality, Matrix};
use moricone::scenario::{
    build_scenario, class_label, classify, classify_all, curve_identities, t_certificates,
    verify_theorem, ClassificationResult, ContainmentFailure, EqualityStatus, Refutation, Scenario,
    ScenarioError, Witness,
};
use serde::Serialize;
use serde_json::Value;

use crate::report::{to_value, Outcome, Status};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Cert(#[from] CertError),
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn status_of(ok: bool) -> Status {
    if ok {
        Status::Verified
    } else {
        Status::Refuted
    }
}

fn matrix_strings(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(format_rational).collect())
        .collect()
}

#[derive(Serialize)]
struct NamedClass {
    name: String,
    vector: ClassVector,
}

// ---- cones relative

#[derive(Serialize)]
struct PairingTable {
    rows: [&'static str; 2],
    cols: [&'static str; 2],
    entries: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct RelativeBody {
    pairing: PairingTable,
    ne_generators: Vec<NamedClass>,
    nef_generators: Vec<NamedClass>,
    nef_is_dual_of_ne: bool,
    ne_is_dual_of_nef: bool,
}

pub fn cones_relative() -> Result<Outcome, CliError> {
    let cones = blowup::relative_cones()?;
    let table = blowup::relative_pairing();
    let [e, f] = blowup::relative_curves();
    let [me, mef] = blowup::relative_nef_generators();
    let body = RelativeBody {
        pairing: PairingTable {
            rows: ["E", "F"],
            cols: ["e", "f"],
            entries: matrix_strings(&table),
        },
        ne_generators: vec![
            NamedClass {
                name: "e".into(),
                vector: e,
            },
            NamedClass {
                name: "f".into(),
                vector: f,
            },
        ],
        nef_generators: vec![
            NamedClass {
                name: "-E".into(),
                vector: me,
            },
            NamedClass {
                name: "-E-F".into(),
                vector: mef,
            },
        ],
        nef_is_dual_of_ne: cones.nef_is_dual_of_ne.is_equal(),
        ne_is_dual_of_nef: cones.ne_is_dual_of_nef.is_equal(),
    };
    let mut text = String::from("intersection table\n      e    f\n");
    for (name, row) in body.pairing.rows.iter().zip(&body.pairing.entries) {
        writeln!(text, "{name}  {:>3}  {:>3}", row[0], row[1]).unwrap();
    }
    writeln!(
        text,
        "Nef = cone(-E, -E-F) is dual to NE = cone(e, f): {}",
        body.nef_is_dual_of_ne
    )
    .unwrap();
    writeln!(text, "NE is dual to Nef: {}", body.ne_is_dual_of_nef).unwrap();
    writeln!(text, "verdict: {}", status_of(cones.verified()).label()).unwrap();
    let mut out = Outcome::new(status_of(cones.verified()), text, body);
    for eq in [&cones.nef_is_dual_of_ne, &cones.ne_is_dual_of_nef] {
        if let Equality::NotEqual(diff) = eq {
            out = out.witness(diff);
        }
    }
    Ok(out)
}

// ---- classify construction

#[derive(Serialize)]
struct FiberCheck {
    c: u32,
    structure: FiberStructure,
    description: String,
    twisted_conormal: DegreeMultiset,
    minus_ef_nef_on_fiber: bool,
}

#[derive(Serialize)]
struct ConstructionBody {
    params: ConstructionParams,
    contraction: ContractionReport,
    fibers: Vec<FiberCheck>,
}

pub fn classify_construction(
    a: u32,
    b: u32,
    components: Vec<u32>,
    a_in_b: bool,
) -> Result<Outcome, CliError> {
    let params = ConstructionParams::new(a, b, components, a_in_b)?;
    let contraction = blowup::classify(&params)?;
    let mut fibers = Vec::new();
    for &c in &params.components {
        let structure = blowup::fiber_structure(a, b, c)?;
        let (nef, twisted) = blowup::minus_ef_nef_on_fiber(a, b, c)?;
        fibers.push(FiberCheck {
            c,
            description: structure.describe(),
            structure,
            twisted_conormal: twisted,
            minus_ef_nef_on_fiber: nef,
        });
    }
    let mut text = String::new();
    writeln!(
        text,
        "a = {a}, b = {b}, defects {:?}, A in B: {a_in_b}",
        params.components
    )
    .unwrap();
    writeln!(
        text,
        "K.e = {}, K.f = {}",
        contraction.k_dot_e, contraction.k_dot_f
    )
    .unwrap();
    writeln!(
        text,
        "contraction of f: {:?}, K-negative: {}, modification: {:?}",
        contraction.kind, contraction.is_k_extremal, contraction.birational_modification
    )
    .unwrap();
    writeln!(
        text,
        "exceptional codimensions: {:?}",
        contraction.exceptional_component_codims
    )
    .unwrap();
    writeln!(text, "target: {}", contraction.target_description).unwrap();
    for f in &fibers {
        writeln!(
            text,
            "c = {}: {}; -E-F nef on fiber lines: {}",
            f.c, f.description, f.minus_ef_nef_on_fiber
        )
        .unwrap();
    }
    let witnesses: Vec<Value> = fibers
        .iter()
        .filter(|f| !f.minus_ef_nef_on_fiber)
        .map(|f| serde_json::json!({ "c": f.c, "twisted_conormal": f.twisted_conormal }))
        .collect();
    let mut out = Outcome::new(
        status_of(witnesses.is_empty()),
        text,
        ConstructionBody {
            params,
            contraction,
            fibers,
        },
    );
    out.witnesses = witnesses;
    Ok(out)
}

// ---- dp scenario

#[derive(Serialize, Default)]
struct ScenarioVerdicts {
    curve_identities: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    containment: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equality: Option<EqualityStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_certificates: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fano: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weak_fano: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fano_type: Option<bool>,
}

#[derive(Serialize, Default)]
struct ScenarioWitnesses {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    failed_identities: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    containment: Option<ContainmentFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equality: Option<EqualityStatus>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    failed_certificates: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    not_ample: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    not_nef: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    boundary_failure: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    not_fano_type: Option<Refutation>,
}

#[derive(Serialize)]
struct ScenarioBody {
    r1: usize,
    r2: usize,
    rho: usize,
    basis: Vec<String>,
    ne_generators: Vec<NamedClass>,
    nef_generators: Vec<NamedClass>,
    verdicts: ScenarioVerdicts,
    witnesses: ScenarioWitnesses,
    #[serde(skip_serializing_if = "Option::is_none")]
    anticanonical_degrees: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

/// Lists longer than this are summarized in text output.
const TEXT_LIST_LIMIT: usize = 40;

fn write_list(text: &mut String, title: &str, items: &[NamedClass]) {
    writeln!(text, "{title} ({}):", items.len()).unwrap();
    if items.len() > TEXT_LIST_LIMIT {
        writeln!(text, "  (use --json for the full list)").unwrap();
        return;
    }
    for c in items {
        writeln!(text, "  {}", c.name).unwrap();
    }
}

fn certificate_failures(s: &Scenario) -> Result<Vec<Check>, CliError> {
    let mut failures = Vec::new();
    for t in t_certificates(s)? {
        for verdict in [
            Certificate::BlowupE(t.e_certificate).verify()?,
            Certificate::BlowupEf(t.ef_certificate).verify()?,
        ] {
            failures.extend(verdict.checks.into_iter().filter(|c| !c.passed));
        }
    }
    Ok(failures)
}

pub fn dp_scenario(
    r1: usize,
    r2: usize,
    verify_cones: bool,
    with_classify: bool,
    budget: &Budget,
) -> Result<Outcome, CliError> {
    let s = build_scenario(r1, r2)?;
    let claimed = s.claimed_nef_generators_within(budget)?;
    let ne_generators: Vec<NamedClass> = s
        .curves()
        .iter()
        .map(|c| NamedClass {
            name: c.name.clone(),
            vector: c.vector.clone(),
        })
        .collect();
    let nef_generators: Vec<NamedClass> = claimed
        .iter()
        .map(|d| NamedClass {
            name: s.divisor_label(d),
            vector: d.clone(),
        })
        .collect();

    let identities = curve_identities(&s);
    let mut verdicts = ScenarioVerdicts {
        curve_identities: identities.iter().all(|i| i.holds),
        ..Default::default()
    };
    let mut witnesses = ScenarioWitnesses {
        failed_identities: identities
            .iter()
            .filter(|i| !i.holds)
            .map(|i| i.statement.clone())
            .collect(),
        ..Default::default()
    };
    let mut status = status_of(verdicts.curve_identities);
    let mut notes = Vec::new();
    let mut anticanonical_degrees = None;

    if verify_cones {
        let report = verify_theorem(&s, budget)?;
        verdicts.containment = Some(report.containment);
        witnesses.containment = report.containment_failure.clone();
        if matches!(report.equality, EqualityStatus::NotEqual { .. }) {
            witnesses.equality = Some(report.equality.clone());
        }
        status = status.worst(if report.refuted() {
            Status::Refuted
        } else if report.verified() {
            Status::Verified
        } else {
            Status::Incomplete
        });
        verdicts.equality = Some(report.equality);
        let failures = certificate_failures(&s)?;
        verdicts.t_certificates = Some(failures.is_empty());
        status = status.worst(status_of(failures.is_empty()));
        witnesses.failed_certificates = failures;
    }
    if with_classify {
        let c: ClassificationResult = classify(&s)?;
        verdicts.fano = Some(c.fano);
        verdicts.weak_fano = Some(c.weak_fano);
        verdicts.fano_type = Some(c.fano_type);
        status = status.worst(status_of(c.has_witnesses()));
        anticanonical_degrees = Some(to_value(&c.anticanonical_degrees));
        if r1 == 0 || r2 == 0 {
            notes.push("-K.l_i evaluates to 1 on the intersection table, not 3".to_string());
        }
        witnesses.not_ample = c.not_ample;
        witnesses.not_nef = c.not_nef;
        witnesses.boundary_failure = c.boundary_failure;
        witnesses.not_fano_type = c.refutation;
    }

    let mut text = String::new();
    writeln!(
        text,
        "scenario r1 = {r1}, r2 = {r2}, Picard rank {}",
        s.rank()
    )
    .unwrap();
    writeln!(text, "basis: {}", s.basis_names().join(", ")).unwrap();
    write_list(&mut text, "cone of curves generators", &ne_generators);
    write_list(&mut text, "claimed nef generators", &nef_generators);
    writeln!(text, "curve identities: {}", verdicts.curve_identities).unwrap();
    if let (Some(containment), Some(eq)) = (verdicts.containment, &verdicts.equality) {
        writeln!(text, "claimed generators are nef: {containment}").unwrap();
        if let Some(w) = &witnesses.containment {
            writeln!(
                text,
                "  {} . {} = {}",
                s.divisor_label(&w.divisor),
                w.curve,
                format_rational(&w.pairing)
            )
            .unwrap();
        }
        let eq_text = match eq {
            EqualityStatus::Equal { nef_rays } => format!("equal ({nef_rays} extremal rays)"),
            EqualityStatus::NotEqual {
                generator,
                missing_from_claim,
                ..
            } => format!(
                "not equal: {} {}",
                s.divisor_label(generator),
                if *missing_from_claim {
                    "is nef but not in the claimed cone"
                } else {
                    "is claimed but not nef"
                }
            ),
            EqualityStatus::BudgetExceeded { rays, elapsed_ms } => {
                format!("budget exceeded ({rays} rays after {elapsed_ms} ms)")
            }
        };
        writeln!(text, "claimed cone equals the nef cone: {eq_text}").unwrap();
        writeln!(
            text,
            "T certificates: {}",
            verdicts.t_certificates.unwrap_or(false)
        )
        .unwrap();
    }
    if let (Some(fano), Some(weak), Some(ft)) =
        (verdicts.fano, verdicts.weak_fano, verdicts.fano_type)
    {
        writeln!(text, "Fano: {fano}, weak Fano: {weak}, Fano type: {ft}").unwrap();
        for (label, w) in [
            ("not ample", &witnesses.not_ample),
            ("not nef", &witnesses.not_nef),
            ("boundary fails", &witnesses.boundary_failure),
        ] {
            if let Some(w) = w {
                writeln!(
                    text,
                    "  {label}: {} . {} = {}",
                    w.divisor,
                    w.curve,
                    format_rational(&w.value)
                )
                .unwrap();
            }
        }
        if let Some(r) = &witnesses.not_fano_type {
            writeln!(text, "  no klt boundary: {}", r.combination).unwrap();
        }
    }
    for n in &notes {
        writeln!(text, "note: {n}").unwrap();
    }
    writeln!(text, "verdict: {}", status.label()).unwrap();

    let mut top = Vec::new();
    if status == Status::Refuted {
        top.extend(witnesses.failed_identities.iter().map(to_value));
        top.extend(witnesses.containment.iter().map(to_value));
        top.extend(witnesses.equality.iter().map(to_value));
        top.extend(witnesses.failed_certificates.iter().map(to_value));
        if top.is_empty() {
            top.push(serde_json::json!({ "scenario": [r1, r2], "missing": "witness for a negative classification" }));
        }
    }
    let body = ScenarioBody {
        r1,
        r2,
        rho: s.rank(),
        basis: s.basis_names(),
        ne_generators,
        nef_generators,
        verdicts,
        witnesses,
        anticanonical_degrees,
        notes,
    };
    let mut out = Outcome::new(status, text, body);
    out.witnesses = top;
    Ok(out)
}

// ---- dp classify-all

#[derive(Serialize)]
struct GridCell {
    r1: usize,
    r2: usize,
    fano: bool,
    weak_fano: bool,
    fano_type: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    not_ample: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    not_nef: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    boundary_failure: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    no_klt_boundary: Option<String>,
    matches_expected: bool,
}

/// Fano only at `(0, 0)`; weak Fano and Fano type exactly when `r2 <= 1`.
fn expected(r1: usize, r2: usize) -> (bool, bool, bool) {
    ((r1, r2) == (0, 0), r2 <= 1, r2 <= 1)
}

fn cell_word(c: &GridCell) -> &'static str {
    match (c.fano, c.weak_fano, c.fano_type) {
        (true, _, _) => "Fano",
        (false, true, _) => "weak Fano",
        (false, false, true) => "Fano type",
        _ => "none",
    }
}

pub fn dp_classify_all() -> Result<Outcome, CliError> {
    let cells: Vec<GridCell> = classify_all()?
        .into_iter()
        .map(|c| GridCell {
            matches_expected: (c.fano, c.weak_fano, c.fano_type) == expected(c.r1, c.r2)
                && c.has_witnesses(),
            r1: c.r1,
            r2: c.r2,
            fano: c.fano,
            weak_fano: c.weak_fano,
            fano_type: c.fano_type,
            not_ample: c.not_ample,
            not_nef: c.not_nef,
            boundary_failure: c.boundary_failure,
            no_klt_boundary: c.refutation.map(|r| r.combination),
        })
        .collect();
    let max_r2 = cells.iter().map(|c| c.r2).max().unwrap_or(0);
    let mut text = String::from("| r1 \\ r2 |");
    for r2 in 0..=max_r2 {
        write!(text, " {r2} |").unwrap();
    }
    text.push_str("\n|---|");
    text.push_str(&"---|".repeat(max_r2 + 1));
    text.push('\n');
    for row in cells.chunks(max_r2 + 1) {
        write!(text, "| {} |", row[0].r1).unwrap();
        for c in row {
            write!(text, " {} |", cell_word(c)).unwrap();
        }
        text.push('\n');
    }
    let mismatches: Vec<Value> = cells
        .iter()
        .filter(|c| !c.matches_expected)
        .map(to_value)
        .collect();
    let mut out = Outcome::new(
        status_of(mismatches.is_empty()),
        text,
        serde_json::json!({ "cells": cells }),
    );
    out.witnesses = mismatches;
    Ok(out)
}

// ---- dp minus-one

#[derive(Serialize)]
struct MinusOneClass {
    name: String,
    vector: ClassVector,
    self_intersection: String,
    canonical_degree: String,
}

pub fn dp_minus_one(r: usize) -> Result<Outcome, CliError> {
    let l = delpezzo::build(r)?;
    let k = l.canonical();
    let classes: Vec<MinusOneClass> = l
        .minus_one_classes()
        .into_iter()
        .map(|c| MinusOneClass {
            name: class_label(&c),
            self_intersection: format_rational(&l.intersect(&c, &c)),
            canonical_degree: format_rational(&l.intersect(&c, &k)),
            vector: c,
        })
        .collect();
    let bad: Vec<Value> = classes
        .iter()
        .filter(|c| c.self_intersection != "-1" || c.canonical_degree != "-1")
        .map(to_value)
        .collect();
    let mut text = format!(
        "(-1)-classes on the plane blown up at {r} points: {}\n",
        classes.len()
    );
    for c in &classes {
        writeln!(text, "  {}", c.name).unwrap();
    }
    let body = serde_json::json!({ "r": r, "count": classes.len(), "classes": classes });
    let mut out = Outcome::new(status_of(bad.is_empty()), text, body);
    out.witnesses = bad;
    Ok(out)
}

// ---- cert

fn verdict_text(name: &str, v: &Verdict) -> String {
    let mut text = format!("{name}: {} checks, passed: {}\n", v.checks.len(), v.passed);
    if let Some(claim) = &v.certified {
        writeln!(text, "  certifies: {claim}").unwrap();
    }
    if let Some(loc) = &v.first_failure {
        writeln!(text, "  first failure at {loc}").unwrap();
    }
    text
}

fn failing_checks(v: &Verdict) -> Vec<Value> {
    v.checks
        .iter()
        .filter(|c| !c.passed)
        .map(to_value)
        .collect()
}

pub fn cert_verify(path: &Path) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    let cert = Certificate::from_json(&text)?;
    let verdict = cert.verify()?;
    let mut out = Outcome::new(
        status_of(verdict.passed),
        verdict_text(&path.display().to_string(), &verdict),
        serde_json::json!({ "file": path.display().to_string(), "verdict": verdict }),
    );
    out.witnesses = failing_checks(&verdict);
    Ok(out)
}

pub fn cert_example_tsukioka(
    n1: u32,
    n2: u32,
    d: u32,
    write: Option<&Path>,
) -> Result<Outcome, CliError> {
    if n1 == 0 || n2 < 2 || d == 0 {
        return Err(CliError::Input(format!(
            "need n1 >= 1, n2 >= 2, d >= 1; got n1 = {n1}, n2 = {n2}, d = {d}"
        )));
    }
    let (e, ef) = tsukioka_certificates(n1, n2, d)?;
    let certs = [
        ("e", Certificate::BlowupE(e)),
        ("ef", Certificate::BlowupEf(ef)),
    ];
    let mut text = format!("P^{n1} x P^{n2}, hypersurface degree {d}\n");
    let mut entries = Vec::new();
    let mut witnesses = Vec::new();
    let mut passed = true;
    for (tag, cert) in &certs {
        let verdict = cert.verify()?;
        text.push_str(&verdict_text(tag, &verdict));
        passed &= verdict.passed;
        witnesses.extend(failing_checks(&verdict));
        let json = cert.to_json();
        let file = match write {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(io_error(dir))?;
                let path = dir.join(format!("tsukioka_{n1}_{n2}_{d}_{tag}.json"));
                fs::write(&path, format!("{json}\n")).map_err(io_error(&path))?;
                writeln!(text, "  wrote {}", path.display()).unwrap();
                Some(path.display().to_string())
            }
            None => None,
        };
        let certificate: Value = serde_json::from_str(&json).expect("certificate JSON round-trips");
        entries.push(serde_json::json!({
            "name": tag,
            "verdict": verdict,
            "file": file,
            "certificate": certificate,
        }));
    }
    let body = serde_json::json!({ "n1": n1, "n2": n2, "d": d, "certificates": entries });
    let mut out = Outcome::new(status_of(passed), text, body);
    out.witnesses = witnesses;
    Ok(out)
}

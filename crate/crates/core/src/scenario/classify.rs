use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{build_scenario, Scenario, ScenarioError, MAX_FIRST, MAX_SECOND};
use crate::ratcone::rational::int;
use crate::ratcone::{
    lp_feasible, ClassVector, Constraint, Feasibility, InfeasibilityCertificate, LinearProgram,
    Rational, Relation,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveValue {
    pub curve: String,
    #[serde(with = "crate::ratcone::rational::serde_rational")]
    pub value: Rational,
}

/// A curve on which some divisor fails a sign condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub divisor: String,
    pub curve: String,
    #[serde(with = "crate::ratcone::rational::serde_rational")]
    pub value: Rational,
}

/// The linear system ruling out a klt boundary, with its infeasibility certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Refutation {
    pub variables: Vec<String>,
    pub system: LinearProgram,
    pub certificate: InfeasibilityCertificate,
    pub combination: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationResult {
    pub r1: usize,
    pub r2: usize,
    pub fano: bool,
    pub weak_fano: bool,
    pub fano_type: bool,
    /// `-K . c` on every generator of the cone of curves.
    pub anticanonical_degrees: Vec<CurveValue>,
    /// `-(K + Delta) . c` on every generator, when `-K` is nef.
    pub boundary_degrees: Option<Vec<CurveValue>>,
    pub not_ample: Option<Witness>,
    pub not_nef: Option<Witness>,
    pub boundary_failure: Option<Witness>,
    pub refutation: Option<Refutation>,
}

impl ClassificationResult {
    /// Every negative verdict carries a witness curve or a certificate.
    pub fn has_witnesses(&self) -> bool {
        (self.fano || self.not_ample.is_some())
            && (self.weak_fano || self.not_nef.is_some() || self.boundary_failure.is_some())
            && (self.fano_type || self.refutation.is_some())
    }
}

fn values(s: &Scenario, d: &ClassVector) -> Vec<CurveValue> {
    s.pairings(d)
        .into_iter()
        .map(|(curve, value)| CurveValue { curve, value })
        .collect()
}

fn first_where(
    vals: &[CurveValue],
    divisor: &str,
    bad: impl Fn(&Rational) -> bool,
) -> Option<Witness> {
    vals.iter().find(|v| bad(&v.value)).map(|v| Witness {
        divisor: divisor.into(),
        curve: v.curve.clone(),
        value: v.value.clone(),
    })
}

pub fn classify(s: &Scenario) -> Result<ClassificationResult, ScenarioError> {
    let minus_k = s.anticanonical();
    let degrees = values(s, &minus_k);
    let not_ample = first_where(&degrees, "-K", |v| !v.is_positive());
    let not_nef = first_where(&degrees, "-K", Rational::is_negative);
    let boundary_degrees = not_nef
        .is_none()
        .then(|| values(s, &(&minus_k - &s.delta())));
    let boundary_failure = boundary_degrees
        .as_ref()
        .and_then(|vals| first_where(vals, "-(K+Delta)", |v| !v.is_positive()));
    let weak_fano = not_nef.is_none() && boundary_failure.is_none();
    let refutation = if s.r2() >= 2 {
        Some(not_fano_type_refutation(s)?)
    } else {
        None
    };
    Ok(ClassificationResult {
        r1: s.r1(),
        r2: s.r2(),
        fano: not_ample.is_none(),
        weak_fano,
        // Weak Fano varieties are of Fano type; the converse direction is the refutation.
        fano_type: weak_fano && refutation.is_none(),
        anticanonical_degrees: degrees,
        boundary_degrees,
        not_ample,
        not_nef,
        boundary_failure,
        refutation,
    })
}

/// All 36 scenarios, row-major in `(r1, r2)`.
pub fn classify_all() -> Result<Vec<ClassificationResult>, ScenarioError> {
    let cells: Vec<(usize, usize)> = (0..=MAX_FIRST)
        .flat_map(|r1| (0..=MAX_SECOND).map(move |r2| (r1, r2)))
        .collect();
    cells
        .into_par_iter()
        .map(|(r1, r2)| classify(&build_scenario(r1, r2)?))
        .collect()
}

pub const FANO_TYPE_VARIABLES: [&str; 4] = ["alpha_2", "beta_2,1", "beta_2,2", "gamma"];

/// Constraints on a boundary `alpha_2 H_2 + beta_{2,1} E_{2,1} + beta_{2,2} E_{2,2} + gamma E`:
/// effectivity of the pushforward on the second factor, and positivity of `-(K + Delta)` on
/// the two curves over `E_{2,1}` and `H - E_{2,1} - E_{2,2}`. `relaxed` makes the strict
/// rows non-strict.
pub fn fano_type_system(relaxed: bool) -> LinearProgram {
    let v = |c: [i64; 4]| ClassVector::from_ints(&c);
    let strict = if relaxed { Relation::Ge } else { Relation::Gt };
    let mut rows = vec![
        Constraint::new(v([1, 1, 0, 0]), Relation::Ge, Rational::zero()),
        Constraint::new(v([1, 0, 1, 0]), Relation::Ge, Rational::zero()),
        // 1 + beta_{2,1} + gamma > 0
        Constraint::new(v([0, 1, 0, 1]), strict, int(-1)),
    ];
    // 1 + alpha_2 + beta_{2,1} + beta_{2,2} + gamma < 0
    rows.push(if relaxed {
        Constraint::le(v([1, 1, 1, 1]), int(-1))
    } else {
        Constraint::lt(v([1, 1, 1, 1]), int(-1))
    });
    LinearProgram {
        vars: 4,
        constraints: rows,
    }
}

pub fn not_fano_type_refutation(s: &Scenario) -> Result<Refutation, ScenarioError> {
    if s.r2() < 2 {
        return Err(ScenarioError::TooFewPoints(s.r2()));
    }
    let system = fano_type_system(false);
    let Feasibility::Infeasible(certificate) = lp_feasible(&system).expect("system is well formed")
    else {
        unreachable!("the strict system has no solution")
    };
    debug_assert!(certificate.check(&system));
    Ok(Refutation {
        variables: FANO_TYPE_VARIABLES.iter().map(|s| s.to_string()).collect(),
        combination: certificate.combine(&system).render(),
        system,
        certificate,
    })
}

//! Verification of nefness certificates built from chains and grids of strata.
//!
//! A stratum carries a class lattice of some rank and a nef oracle: a list of curve
//! functionals, a class being nef iff it pairs nonnegatively with all of them. Restriction
//! maps between strata are explicit matrices, child rank by parent rank.

mod json;
mod product;
mod projective;

use num_traits::Signed;
use serde::Serialize;

use crate::ratcone::linalg::MatrixError;
use crate::ratcone::{ClassVector, Matrix};

pub use json::Certificate;
pub use product::{
    product_e_certificate, product_ef_certificate, simple_product_ef_certificate, HeSelectors,
    HefSelectors,
};
pub use projective::{hypersurface_chain, linear_chain, tsukioka_certificates};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertError {
    #[error("{location}: {detail}")]
    Shape { location: String, detail: String },
    #[error("certificate has no strata")]
    Empty,
    #[error("malformed certificate: {0}")]
    Json(String),
    #[error("no case selector given for {0}")]
    NoSelector(&'static str),
    #[error("selected case fails: {condition} (stratum {stratum}, curve {curve})")]
    FactorCondition {
        condition: String,
        stratum: String,
        curve: ClassVector,
    },
}

fn shape(location: impl Into<String>, detail: impl Into<String>) -> CertError {
    CertError::Shape {
        location: location.into(),
        detail: detail.into(),
    }
}

fn matrix_err(location: &str, e: MatrixError) -> CertError {
    shape(location, e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stratum {
    pub id: String,
    pub rank: usize,
    pub oracle: Vec<ClassVector>,
}

impl Stratum {
    pub fn new(id: impl Into<String>, rank: usize, oracle: Vec<ClassVector>) -> Self {
        Stratum {
            id: id.into(),
            rank,
            oracle,
        }
    }

    /// Rank-one stratum whose oracle is the single functional "degree".
    pub fn curve(id: impl Into<String>) -> Self {
        Stratum::new(id, 1, vec![ClassVector::from_ints(&[1])])
    }

    pub fn point(id: impl Into<String>) -> Self {
        Stratum::new(id, 0, Vec::new())
    }

    /// `S x T` with lattice the direct sum and oracle the curves of either factor.
    pub fn product(s: &Stratum, t: &Stratum) -> Self {
        let zs = ClassVector::zeros(s.rank);
        let zt = ClassVector::zeros(t.rank);
        let oracle = s
            .oracle
            .iter()
            .map(|c| c.concat(&zt))
            .chain(t.oracle.iter().map(|c| zs.concat(c)))
            .collect();
        Stratum {
            id: format!("{} x {}", s.id, t.id),
            rank: s.rank + t.rank,
            oracle,
        }
    }

    fn validate(&self, location: &str) -> Result<(), CertError> {
        match self.oracle.iter().find(|c| c.dim() != self.rank) {
            Some(c) => Err(shape(
                location,
                format!("oracle curve {c} does not have rank {}", self.rank),
            )),
            None => Ok(()),
        }
    }

    /// Pairings with the oracle and the first curve pairing negatively.
    pub fn test(&self, class: &ClassVector) -> (Vec<crate::ratcone::Rational>, Option<usize>) {
        let pairings: Vec<_> = self.oracle.iter().map(|c| class.dot(c)).collect();
        let bad = pairings.iter().position(|p| p.is_negative());
        (pairings, bad)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    pub stratum: Stratum,
    /// From the previous stratum (or the root lattice for the first step).
    pub restriction: Matrix,
    /// The next stratum as a divisor class on this one; absent on the last step.
    pub next_class: Option<ClassVector>,
}

/// A chain `X_0 > X_1 > ... > X_m`; the first step is `X_0` itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainCertificate {
    pub root_rank: usize,
    pub steps: Vec<ChainStep>,
    pub divisor: ClassVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridCell {
    pub stratum: Stratum,
    /// From the cell to the left in the same row, else from the cell above, else from the
    /// last outer stratum.
    pub restriction: Matrix,
    /// Optional second route from the cell above, checked for agreement.
    pub alt_restriction: Option<Matrix>,
    /// The cell below, as a divisor class here.
    pub next_a: Option<ClassVector>,
    /// The cell to the right, as a divisor class here.
    pub next_b: Option<ClassVector>,
}

/// Outer chain `X_0 > ... > X_{c-1}` followed by a grid whose corner is `X_c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridCertificate {
    pub root_rank: usize,
    pub outer: Vec<ChainStep>,
    pub grid: Vec<Vec<GridCell>>,
    pub divisor: ClassVector,
}

/// One nefness test on one stratum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub location: String,
    pub stratum: String,
    pub tested: ClassVector,
    pub pairings: ClassVector,
    pub passed: bool,
    pub witness: Option<ClassVector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub passed: bool,
    pub checks: Vec<Check>,
    pub first_failure: Option<String>,
    pub certified: Option<String>,
}

impl Verdict {
    fn from_checks(checks: Vec<Check>, claim: &str) -> Self {
        let first = checks
            .iter()
            .find(|c| !c.passed)
            .map(|c| c.location.clone());
        Verdict {
            passed: first.is_none(),
            first_failure: first.clone(),
            certified: first.is_none().then(|| claim.to_string()),
            checks,
        }
    }
}

pub const CLAIM_CHAIN: &str = "D is nef (chain criterion)";
pub const CLAIM_E: &str = "pullback of H minus E is nef on the blowup";
pub const CLAIM_EF: &str = "pullback of H minus E minus F is nef on the blowup";

fn run_check(location: String, stratum: &Stratum, tested: ClassVector) -> Check {
    let (pairings, bad) = stratum.test(&tested);
    Check {
        location,
        stratum: stratum.id.clone(),
        tested,
        pairings: ClassVector::new(pairings),
        passed: bad.is_none(),
        witness: bad.map(|i| stratum.oracle[i].clone()),
    }
}

fn restrict(
    m: &Matrix,
    parent_rank: usize,
    child: &Stratum,
    d: &ClassVector,
    location: &str,
) -> Result<ClassVector, CertError> {
    if m.cols() != parent_rank || m.rows() != child.rank {
        return Err(shape(
            location,
            format!(
                "restriction is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                child.rank,
                parent_rank
            ),
        ));
    }
    m.apply(d).map_err(|e| matrix_err(location, e))
}

fn check_class(
    c: &Option<ClassVector>,
    rank: usize,
    location: &str,
    what: &str,
) -> Result<(), CertError> {
    match c {
        Some(v) if v.dim() != rank => Err(shape(
            location,
            format!("{what} {v} does not have rank {rank}"),
        )),
        _ => Ok(()),
    }
}

fn require<'a>(
    c: &'a Option<ClassVector>,
    location: &str,
    what: &str,
) -> Result<&'a ClassVector, CertError> {
    c.as_ref()
        .ok_or_else(|| shape(location, format!("missing {what}")))
}

/// Restrictions of `divisor` along a chain, validating shapes.
fn chain_classes(
    root_rank: usize,
    divisor: &ClassVector,
    steps: &[ChainStep],
) -> Result<Vec<ClassVector>, CertError> {
    if divisor.dim() != root_rank {
        return Err(shape(
            "divisor",
            format!("rank {} differs from root rank {root_rank}", divisor.dim()),
        ));
    }
    let mut out: Vec<ClassVector> = Vec::with_capacity(steps.len());
    let mut parent_rank = root_rank;
    for (i, s) in steps.iter().enumerate() {
        let loc = format!("step {i}");
        s.stratum.validate(&loc)?;
        check_class(&s.next_class, s.stratum.rank, &loc, "next class")?;
        let d = restrict(
            &s.restriction,
            parent_rank,
            &s.stratum,
            out.last().unwrap_or(divisor),
            &loc,
        )?;
        out.push(d);
        parent_rank = s.stratum.rank;
    }
    Ok(out)
}

fn difference_checks(
    steps: &[ChainStep],
    classes: &[ClassVector],
    prefix: &str,
) -> Result<Vec<Check>, CertError> {
    let m = steps.len();
    let mut checks = Vec::new();
    for (i, (s, d)) in steps.iter().zip(classes).enumerate() {
        let loc = format!("{prefix}{i}");
        if i + 1 < m {
            let next = require(&s.next_class, &loc, "next class")?;
            checks.push(run_check(loc, &s.stratum, d - next));
        }
    }
    Ok(checks)
}

/// Chain criterion: `D|X_i - X_{i+1}` nef for `i < m` and `D|X_m` nef.
pub fn verify_chain(cert: &ChainCertificate) -> Result<Verdict, CertError> {
    let (last, _) = cert.steps.split_last().ok_or(CertError::Empty)?;
    if last.next_class.is_some() {
        return Err(shape(
            format!("step {}", cert.steps.len() - 1),
            "final step carries a next class",
        ));
    }
    let classes = chain_classes(cert.root_rank, &cert.divisor, &cert.steps)?;
    let mut checks = difference_checks(&cert.steps, &classes, "step ")?;
    let m = cert.steps.len() - 1;
    checks.push(run_check(
        format!("step {m} (final)"),
        &last.stratum,
        classes[m].clone(),
    ));
    Ok(Verdict::from_checks(checks, CLAIM_CHAIN))
}

/// Hypotheses for `H - E` along a chain ending at the center: only the differences.
pub fn verify_he_hypotheses(cert: &ChainCertificate) -> Result<Verdict, CertError> {
    let (last, _) = cert.steps.split_last().ok_or(CertError::Empty)?;
    if last.next_class.is_some() {
        return Err(shape(
            format!("step {}", cert.steps.len() - 1),
            "final step carries a next class",
        ));
    }
    let classes = chain_classes(cert.root_rank, &cert.divisor, &cert.steps)?;
    let checks = difference_checks(&cert.steps, &classes, "step ")?;
    Ok(Verdict::from_checks(checks, CLAIM_E))
}

/// Restricted classes on the outer chain and on every grid cell.
pub(crate) fn grid_classes(
    cert: &GridCertificate,
) -> Result<(Vec<ClassVector>, Vec<Vec<ClassVector>>), CertError> {
    let outer = chain_classes(cert.root_rank, &cert.divisor, &cert.outer)?;
    let rows = cert.grid.len();
    let cols = cert.grid.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(shape("grid", "grid has no cells"));
    }
    if let Some(i) = cert.grid.iter().position(|r| r.len() != cols) {
        return Err(shape(format!("grid row {i}"), "grid is not rectangular"));
    }
    let (corner_parent, corner_rank) = match (outer.last(), cert.outer.last()) {
        (Some(d), Some(s)) => (d.clone(), s.stratum.rank),
        _ => (cert.divisor.clone(), cert.root_rank),
    };
    let mut classes: Vec<Vec<ClassVector>> = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut row: Vec<ClassVector> = Vec::with_capacity(cols);
        for j in 0..cols {
            let cell = &cert.grid[i][j];
            let loc = format!("cell ({i},{j})");
            cell.stratum.validate(&loc)?;
            check_class(&cell.next_a, cell.stratum.rank, &loc, "next_a")?;
            check_class(&cell.next_b, cell.stratum.rank, &loc, "next_b")?;
            let (parent, parent_rank) = if j > 0 {
                (&row[j - 1], cert.grid[i][j - 1].stratum.rank)
            } else if i > 0 {
                (&classes[i - 1][0], cert.grid[i - 1][0].stratum.rank)
            } else {
                (&corner_parent, corner_rank)
            };
            let d = restrict(&cell.restriction, parent_rank, &cell.stratum, parent, &loc)?;
            if let Some(alt) = &cell.alt_restriction {
                if i == 0 || j == 0 {
                    return Err(shape(&loc, "second restriction given on a boundary cell"));
                }
                let via_above = restrict(
                    alt,
                    cert.grid[i - 1][j].stratum.rank,
                    &cell.stratum,
                    &classes[i - 1][j],
                    &loc,
                )?;
                if via_above != d {
                    return Err(shape(
                        &loc,
                        format!("restrictions disagree: {d} versus {via_above}"),
                    ));
                }
            }
            row.push(d);
        }
        classes.push(row);
    }
    Ok((outer, classes))
}

/// Hypotheses for `H - E - F`: outer differences and `H|Z_ij - Z_{i+1,j} - Z_{i,j+1}` on the grid.
pub fn verify_hef_hypotheses(cert: &GridCertificate) -> Result<Verdict, CertError> {
    let (outer, grid) = grid_classes(cert)?;
    let mut checks = Vec::new();
    for (i, (s, d)) in cert.outer.iter().zip(&outer).enumerate() {
        let loc = format!("outer {i}");
        let next = require(&s.next_class, &loc, "next class")?;
        checks.push(run_check(loc, &s.stratum, d - next));
    }
    let rows = cert.grid.len();
    let cols = cert.grid[0].len();
    for (i, (cells, classes)) in cert
        .grid
        .iter()
        .zip(&grid)
        .take(rows.saturating_sub(1))
        .enumerate()
    {
        for (j, (cell, d)) in cells
            .iter()
            .zip(classes)
            .take(cols.saturating_sub(1))
            .enumerate()
        {
            let loc = format!("cell ({i},{j})");
            let na = require(&cell.next_a, &loc, "next_a")?;
            let nb = require(&cell.next_b, &loc, "next_b")?;
            checks.push(run_check(loc, &cell.stratum, &(d - na) - nb));
        }
    }
    Ok(Verdict::from_checks(checks, CLAIM_EF))
}

//! Relative classes of the two-step blowup along `A` then the strict transform of `B`.
//!
//! Divisor basis `(E, F)`: exceptional divisors over `A` and over the strict transform of
//! `B`. Curve basis `(e, f)`: a line in a fiber of `E` not meeting the second center, and a
//! line in a fiber of `F`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ratcone::{
    cone_from_rays, cones_equal, ClassVector, ConeError, Equality, Matrix, PolyCone,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("codimension {name} = {value} must be at least 2")]
    Codimension { name: &'static str, value: u32 },
    #[error("no intersection components given")]
    NoComponents,
    #[error("component defect {c} outside 1..={max}")]
    Defect { c: u32, max: u32 },
    #[error("the second center may not be contained in the first")]
    SecondInFirst,
    #[error("containment flag disagrees with the components: flag {flag}, some defect equals b: {has_full}")]
    ContainmentFlag { flag: bool, has_full: bool },
    #[error("codimension {c} exceeds ambient dimension {n}")]
    LinearCodim { n: u32, c: u32 },
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// Codimensions of the two centers and of the components of their intersection.
///
/// A component with defect `c` has codimension `a + b - c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstructionParams {
    pub a: u32,
    pub b: u32,
    pub components: Vec<u32>,
    pub a_subset_b: bool,
    pub b_subset_a: bool,
}

impl ConstructionParams {
    pub fn new(a: u32, b: u32, components: Vec<u32>, a_subset_b: bool) -> Result<Self, ParamError> {
        let p = ConstructionParams {
            a,
            b,
            components,
            a_subset_b,
            b_subset_a: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if self.a < 2 {
            return Err(ParamError::Codimension {
                name: "a",
                value: self.a,
            });
        }
        if self.b < 2 {
            return Err(ParamError::Codimension {
                name: "b",
                value: self.b,
            });
        }
        if self.components.is_empty() {
            return Err(ParamError::NoComponents);
        }
        let max = self.a.min(self.b);
        if let Some(&c) = self.components.iter().find(|&&c| c < 1 || c > max) {
            return Err(ParamError::Defect { c, max });
        }
        // A component with defect `a` has the codimension of B'', so it is B''.
        if self.b_subset_a || self.components.contains(&self.a) {
            return Err(ParamError::SecondInFirst);
        }
        let has_full = self.components.contains(&self.b);
        if has_full != self.a_subset_b {
            return Err(ParamError::ContainmentFlag {
                flag: self.a_subset_b,
                has_full,
            });
        }
        Ok(())
    }

    fn max_defect(&self) -> u32 {
        *self.components.iter().max().expect("validated nonempty")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Modification {
    Flip,
    Flop,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractionKind {
    Small,
    Divisorial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractionReport {
    pub kind: ContractionKind,
    pub is_small: bool,
    pub is_k_extremal: bool,
    pub k_dot_e: i64,
    pub k_dot_f: i64,
    pub exceptional_component_codims: Vec<u32>,
    pub target_description: String,
    pub birational_modification: Modification,
}

pub const TARGET_DESCRIPTION: &str = "blowup of X'' along A'' union B''";

/// Rows `E, F`, columns `e, f`.
pub fn relative_pairing() -> Matrix {
    Matrix::from_int_rows(&[vec![-1, 0], vec![1, -1]], 2).expect("2x2 literal")
}

/// Curves as pairing vectors over the divisor basis `(E, F)`.
pub fn relative_curves() -> [ClassVector; 2] {
    let t = relative_pairing().transpose();
    [
        ClassVector::new(t.row(0).to_vec()),
        ClassVector::new(t.row(1).to_vec()),
    ]
}

/// The expected nef generators `-E` and `-E-F`.
pub fn relative_nef_generators() -> [ClassVector; 2] {
    [
        ClassVector::from_ints(&[-1, 0]),
        ClassVector::from_ints(&[-1, -1]),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelativeCones {
    pub nef: PolyCone,
    pub ne: PolyCone,
    /// `dual(ne)` against the expected nef cone.
    pub nef_is_dual_of_ne: Equality,
    /// `dual(nef)` against `ne`.
    pub ne_is_dual_of_nef: Equality,
}

impl RelativeCones {
    pub fn verified(&self) -> bool {
        self.nef_is_dual_of_ne.is_equal() && self.ne_is_dual_of_nef.is_equal()
    }
}

pub fn relative_cones() -> Result<RelativeCones, ParamError> {
    let ne = cone_from_rays(2, &relative_curves())?;
    let nef = cone_from_rays(2, &relative_nef_generators())?;
    let nef_is_dual_of_ne = cones_equal(&ne.dual()?, &nef)?;
    let ne_is_dual_of_nef = cones_equal(&nef.dual()?, &ne)?;
    Ok(RelativeCones {
        nef,
        ne,
        nef_is_dual_of_ne,
        ne_is_dual_of_nef,
    })
}

/// `(K.e, K.f)` from `K = pullback + (a-1) E + (b-1) F`; the pullback part is zero on
/// contracted curves.
pub fn k_degree(p: &ConstructionParams) -> Result<(i64, i64), ParamError> {
    p.validate()?;
    let k = ClassVector::from_ints(&[i64::from(p.a) - 1, i64::from(p.b) - 1]);
    let [e, f] = relative_curves();
    let to_int = |q: crate::ratcone::Rational| -> i64 {
        i64::try_from(q.to_integer()).expect("small integer pairing")
    };
    Ok((to_int(k.dot(&e)), to_int(k.dot(&f))))
}

pub fn classify(p: &ConstructionParams) -> Result<ContractionReport, ParamError> {
    let (k_dot_e, k_dot_f) = k_degree(p)?;
    let is_small = p.max_defect() < p.b;
    let is_k_extremal = k_dot_e < 0;
    let birational_modification = match (is_small, k_dot_e.signum()) {
        (true, -1) => Modification::Flip,
        (true, 0) => Modification::Flop,
        _ => Modification::None,
    };
    Ok(ContractionReport {
        kind: if is_small {
            ContractionKind::Small
        } else {
            ContractionKind::Divisorial
        },
        is_small,
        is_k_extremal,
        k_dot_e,
        k_dot_f,
        exceptional_component_codims: p.components.iter().map(|c| p.b - c + 1).collect(),
        target_description: TARGET_DESCRIPTION.to_string(),
        birational_modification,
    })
}

/// Splitting type of a vector bundle on a projective space: degree to multiplicity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct DegreeMultiset(BTreeMap<i64, u32>);

impl DegreeMultiset {
    pub fn from_pairs(pairs: &[(i64, u32)]) -> Self {
        let mut m = DegreeMultiset::default();
        for &(d, k) in pairs {
            m.add(d, k);
        }
        m
    }

    fn add(&mut self, degree: i64, mult: u32) {
        if mult > 0 {
            *self.0.entry(degree).or_default() += mult;
        }
    }

    pub fn multiplicity(&self, degree: i64) -> u32 {
        self.0.get(&degree).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn degrees(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.0.iter().map(|(&d, &m)| (d, m))
    }

    /// Tensoring with `O(t)`.
    pub fn twist(&self, t: i64) -> DegreeMultiset {
        DegreeMultiset(self.0.iter().map(|(&d, &m)| (d + t, m)).collect())
    }

    pub fn is_nef(&self) -> bool {
        self.0.keys().all(|&d| d >= 0)
    }
}

/// Conormal bundle of a codimension-`c` linear subspace of `P^n`.
pub fn conormal_linear(n: u32, c: u32) -> Result<DegreeMultiset, ParamError> {
    if c > n {
        return Err(ParamError::LinearCodim { n, c });
    }
    Ok(DegreeMultiset::from_pairs(&[(-1, c)]))
}

/// Conormal bundle of a fiber of a blowup, over a center of dimension `dim_center`.
pub fn conormal_fiber(dim_center: u32) -> DegreeMultiset {
    DegreeMultiset::from_pairs(&[(1, 1), (0, dim_center)])
}

fn check_abc(a: u32, b: u32, c: u32) -> Result<(), ParamError> {
    let max = a.min(b);
    if !(1..=max).contains(&c) {
        return Err(ParamError::Defect { c, max });
    }
    if c == a {
        return Err(ParamError::SecondInFirst);
    }
    Ok(())
}

/// Conormal bundle of the strict transform of `B` restricted to a fiber line.
pub fn conormal_restricted(a: u32, b: u32, c: u32) -> Result<DegreeMultiset, ParamError> {
    check_abc(a, b, c)?;
    Ok(DegreeMultiset::from_pairs(&[(0, b - c), (-1, c)]))
}

/// A projective space of dimension `ambient` blown up along a linear subspace of codimension
/// `center_codim` (an isomorphism when the codimension is 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearBlowup {
    pub ambient_dim: u32,
    pub center_dim: u32,
    pub center_codim: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectiveBundle {
    pub fiber_dim: u32,
    pub base_dim: u32,
}

/// Fiber of the composite blowup over a point of the intersection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberStructure {
    pub w: LinearBlowup,
    pub f: ProjectiveBundle,
    pub component_count: u32,
}

impl FiberStructure {
    pub fn describe(&self) -> String {
        let w = format!(
            "W = blowup of P^{} along a linear P^{} (codim {})",
            self.w.ambient_dim, self.w.center_dim, self.w.center_codim
        );
        let f = format!(
            "F = P^{}-bundle over P^{}",
            self.f.fiber_dim, self.f.base_dim
        );
        if self.component_count == 1 {
            format!("{w}; single component")
        } else {
            format!("{w}; {f}")
        }
    }
}

pub fn fiber_structure(a: u32, b: u32, c: u32) -> Result<FiberStructure, ParamError> {
    check_abc(a, b, c)?;
    Ok(FiberStructure {
        w: LinearBlowup {
            ambient_dim: a - 1,
            center_dim: a - 1 - c,
            center_codim: c,
        },
        f: ProjectiveBundle {
            fiber_dim: b - 1,
            base_dim: a - 1 - c,
        },
        component_count: if b == c { 1 } else { 2 },
    })
}

/// Whether `-E-F` restricted to a fiber line is nef, via the twisted restricted conormal.
pub fn minus_ef_nef_on_fiber(a: u32, b: u32, c: u32) -> Result<(bool, DegreeMultiset), ParamError> {
    let twisted = conormal_restricted(a, b, c)?.twist(1);
    Ok((twisted.is_nef(), twisted))
}

/// All component multisets with defects in `1..=min(a - 1, b)` of size `1..=max_len`.
pub fn admissible_components(a: u32, b: u32, max_len: usize) -> Vec<Vec<u32>> {
    let max = (a - 1).min(b);
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(lo: u32, max: u32, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for c in lo..=max {
            cur.push(c);
            rec(c, max, left - 1, cur, out);
            cur.pop();
        }
    }
    rec(1, max, max_len, &mut cur, &mut out);
    out
}

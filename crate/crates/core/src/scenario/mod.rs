//! Two-step blowup of a product `X_1 x X_2` of del Pezzo surfaces.
//!
//! `X_i` is the plane blown up at `r_i` points. The first center is `{a_1} x A_2` with
//! `A_2` a line class, the second the strict transform of `X_1 x {b_2}` with `b_2` on `A_2`.
//! Divisors use the basis `(H_1, E_{1,j}.., H_2, E_{2,j}.., E, F)`; curves are stored as
//! their intersection vectors against that basis.

mod certificates;
mod classify;

use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::delpezzo::{self, DelPezzoLattice, LatticeError};
use crate::nefcert::CertError;
use crate::ratcone::rational::{format_rational, frac, int};
use crate::ratcone::{
    Budget, ClassVector, ConeDifference, ConeError, Equality, PolyCone, Rational,
};

pub use certificates::{cross_validate, t_certificates, CrossCheck, TCertificates};
pub use classify::{
    classify, classify_all, fano_type_system, not_fano_type_refutation, ClassificationResult,
    CurveValue, Refutation, Witness,
};

pub const MAX_FIRST: usize = 3;
pub const MAX_SECOND: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("scenario ({r1}, {r2}) outside 0..=3 x 0..=8")]
    Range { r1: usize, r2: usize },
    #[error("this check needs at least two points on the second factor, got {0}")]
    TooFewPoints(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Certificate(#[from] CertError),
}

/// A named curve with its intersection vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Curve {
    pub name: String,
    pub vector: ClassVector,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    first: DelPezzoLattice,
    second: DelPezzoLattice,
    curves: Vec<Curve>,
}

pub fn build_scenario(r1: usize, r2: usize) -> Result<Scenario, ScenarioError> {
    if r1 > MAX_FIRST || r2 > MAX_SECOND {
        return Err(ScenarioError::Range { r1, r2 });
    }
    let mut s = Scenario {
        first: delpezzo::build(r1)?,
        second: delpezzo::build(r2)?,
        curves: Vec::new(),
    };
    s.curves = s.catalog();
    Ok(s)
}

impl Scenario {
    pub fn r1(&self) -> usize {
        self.first.points()
    }

    pub fn r2(&self) -> usize {
        self.second.points()
    }

    pub fn first(&self) -> &DelPezzoLattice {
        &self.first
    }

    pub fn second(&self) -> &DelPezzoLattice {
        &self.second
    }

    /// Picard number.
    pub fn rank(&self) -> usize {
        4 + self.r1() + self.r2()
    }

    /// A divisor written in [`Scenario::basis_names`].
    pub fn divisor_label(&self, d: &ClassVector) -> String {
        label_with(d, &self.basis_names())
    }

    pub fn basis_names(&self) -> Vec<String> {
        let mut names = vec!["H1".to_string()];
        names.extend((1..=self.r1()).map(|j| format!("E1_{j}")));
        names.push("H2".into());
        names.extend((1..=self.r2()).map(|j| format!("E2_{j}")));
        names.extend(["E".to_string(), "F".to_string()]);
        names
    }

    fn second_offset(&self) -> usize {
        self.r1() + 1
    }

    fn e_index(&self) -> usize {
        self.rank() - 2
    }

    fn f_index(&self) -> usize {
        self.rank() - 1
    }

    fn embed(&self, offset: usize, block: &ClassVector) -> ClassVector {
        let mut v = ClassVector::zeros(self.rank()).into_coords();
        for (i, c) in block.coords().iter().enumerate() {
            v[offset + i] = c.clone();
        }
        ClassVector::new(v)
    }

    /// Pullback of a class on `X_1`.
    pub fn first_divisor(&self, class: &ClassVector) -> ClassVector {
        self.embed(0, class)
    }

    /// Pullback of a class on `X_2`.
    pub fn second_divisor(&self, class: &ClassVector) -> ClassVector {
        self.embed(self.second_offset(), class)
    }

    /// Unit vector of the exceptional divisor over the first center.
    pub fn big_e(&self) -> ClassVector {
        ClassVector::unit(self.rank(), self.e_index())
    }

    pub fn big_f(&self) -> ClassVector {
        ClassVector::unit(self.rank(), self.f_index())
    }

    fn curve_vector(
        &self,
        offset: usize,
        pairing: &ClassVector,
        e_degree: Rational,
    ) -> ClassVector {
        let mut v = self.embed(offset, pairing).into_coords();
        v[self.e_index()] = e_degree;
        ClassVector::new(v)
    }

    /// Strict transform of `curve x {x_2}`; it meets the first center iff it passes `a_1`.
    pub fn first_curve(&self, class: &ClassVector, through_point: bool) -> ClassVector {
        let e_degree = if through_point {
            Rational::one()
        } else {
            Rational::zero()
        };
        self.curve_vector(0, &self.first.pairing(class), e_degree)
    }

    /// Strict transform of `{a_1} x curve`; it meets the first center in `H . curve` points.
    pub fn second_curve(&self, class: &ClassVector) -> ClassVector {
        self.curve_vector(
            self.second_offset(),
            &self.second.pairing(class),
            class[0].clone(),
        )
    }

    pub fn curve_e(&self) -> ClassVector {
        &self.big_f() - &self.big_e()
    }

    pub fn curve_f(&self) -> ClassVector {
        -&self.big_f()
    }

    /// `l_i`: a line class on factor `i` (through `a_1` on the first factor).
    pub fn line(&self, i: usize) -> ClassVector {
        match i {
            1 => self.first_curve(&self.first.hyperplane(), true),
            2 => self.second_curve(&self.second.hyperplane()),
            _ => panic!("factor index must be 1 or 2"),
        }
    }

    /// `l_{i,j}`: the class `H - E_j` on factor `i`.
    pub fn line_through(&self, i: usize, j: usize) -> ClassVector {
        match i {
            1 => self.first_curve(
                &(&self.first.hyperplane() - &self.first.exceptional(j)),
                true,
            ),
            2 => self.second_curve(&(&self.second.hyperplane() - &self.second.exceptional(j))),
            _ => panic!("factor index must be 1 or 2"),
        }
    }

    /// `e_{i,j}`: the exceptional curve `E_j` on factor `i`.
    pub fn exceptional_curve(&self, i: usize, j: usize) -> ClassVector {
        match i {
            1 => self.first_curve(&self.first.exceptional(j), false),
            2 => self.second_curve(&self.second.exceptional(j)),
            _ => panic!("factor index must be 1 or 2"),
        }
    }

    /// `e_{1,j1,j2}`: the class `H - E_j1 - E_j2` on the first factor.
    pub fn first_conic_line(&self, j1: usize, j2: usize) -> ClassVector {
        let c =
            &(&self.first.hyperplane() - &self.first.exceptional(j1)) - &self.first.exceptional(j2);
        self.first_curve(&c, false)
    }

    fn catalog(&self) -> Vec<Curve> {
        let named = |name: String, vector: ClassVector| Curve { name, vector };
        let mut out = vec![
            named("e".into(), self.curve_e()),
            named("f".into(), self.curve_f()),
        ];
        let (r1, r2) = (self.r1(), self.r2());
        if r1 == 0 {
            out.push(named("l_1".into(), self.line(1)));
        } else {
            for j in 1..=r1 {
                out.push(named(format!("l_1,{j}"), self.line_through(1, j)));
                out.push(named(format!("e_1,{j}"), self.exceptional_curve(1, j)));
            }
            for j1 in 1..=r1 {
                for j2 in j1 + 1..=r1 {
                    out.push(named(
                        format!("e_1,{j1},{j2}"),
                        self.first_conic_line(j1, j2),
                    ));
                }
            }
        }
        match r2 {
            0 => out.push(named("l_2".into(), self.line(2))),
            1 => {
                out.push(named("l_2,1".into(), self.line_through(2, 1)));
                out.push(named("e_2,1".into(), self.exceptional_curve(2, 1)));
            }
            _ => {
                for (k, c) in self.second.minus_one_classes().iter().enumerate() {
                    out.push(named(
                        format!("e_2,{}[{}]", k + 1, class_label(c)),
                        self.second_curve(c),
                    ));
                }
            }
        }
        out
    }

    /// Generators of the cone of curves: `e`, `f` and the two factor sets.
    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn ne_vectors(&self) -> Vec<ClassVector> {
        self.curves.iter().map(|c| c.vector.clone()).collect()
    }

    /// The cone of curves, in intersection-vector coordinates.
    pub fn ne_cone(&self, budget: &Budget) -> Result<PolyCone, ScenarioError> {
        Ok(PolyCone::generated_by(
            self.rank(),
            &self.ne_vectors(),
            budget,
        )?)
    }

    /// `T_1` as classes on `X_1`.
    pub fn first_t_classes(&self) -> Vec<ClassVector> {
        let l = &self.first;
        let h = l.hyperplane();
        let mut out = vec![h.clone()];
        match self.r1() {
            2 => out.push(l.class(2, &[1, 1])),
            3 => {
                for (j1, j2) in [(1, 2), (1, 3), (2, 3)] {
                    let mut m = [0; 3];
                    m[j1 - 1] = 1;
                    m[j2 - 1] = 1;
                    out.push(l.class(2, &m));
                }
                out.push(l.class(2, &[1, 1, 1]));
            }
            _ => {}
        }
        out
    }

    /// `N_1 + H_2 - E` and `N_1 + H_2 - E - F` for `N_1` in `T_1`.
    pub fn t_divisors(&self) -> Vec<ClassVector> {
        let h2 = self.second_divisor(&self.second.hyperplane());
        self.first_t_classes()
            .iter()
            .flat_map(|n| {
                let he = &(&self.first_divisor(n) + &h2) - &self.big_e();
                let hef = &he - &self.big_f();
                [he, hef]
            })
            .collect()
    }

    /// Pulled-back nef generators of both factors followed by `T`.
    pub fn claimed_nef_generators(&self) -> Result<Vec<ClassVector>, ScenarioError> {
        self.claimed_nef_generators_within(&Budget::UNLIMITED)
    }

    /// As [`Scenario::claimed_nef_generators`], with `budget` applied to each factor dualization.
    pub fn claimed_nef_generators_within(
        &self,
        budget: &Budget,
    ) -> Result<Vec<ClassVector>, ScenarioError> {
        let mut out: Vec<ClassVector> = factor_nef_rays(self.r1(), budget)?
            .iter()
            .map(|c| self.first_divisor(c))
            .collect();
        out.extend(
            factor_nef_rays(self.r2(), budget)?
                .iter()
                .map(|c| self.second_divisor(c)),
        );
        out.extend(self.t_divisors());
        Ok(out)
    }

    pub fn claimed_nef_cone(&self, budget: &Budget) -> Result<PolyCone, ScenarioError> {
        Ok(PolyCone::generated_by(
            self.rank(),
            &self.claimed_nef_generators_within(budget)?,
            budget,
        )?)
    }

    /// `-K = sum (3 H_i - sum E_{i,j}) - 2E - F`.
    pub fn anticanonical(&self) -> ClassVector {
        let minus = |l: &DelPezzoLattice| -&l.canonical();
        let k =
            &self.first_divisor(&minus(&self.first)) + &self.second_divisor(&minus(&self.second));
        &(&k - &self.big_e().scale(&int(2))) - &self.big_f()
    }

    /// The boundary `((H_1 - E) + (H_2 - E - F)) / 3`.
    pub fn delta(&self) -> ClassVector {
        let h1 = self.first_divisor(&self.first.hyperplane());
        let h2 = self.second_divisor(&self.second.hyperplane());
        let sum = &(&(&h1 - &self.big_e()) + &h2) - &(&self.big_e() + &self.big_f());
        sum.scale(&frac(1, 3))
    }

    /// Values of `d` on every generator of the cone of curves.
    pub fn pairings(&self, d: &ClassVector) -> Vec<(String, Rational)> {
        self.curves
            .iter()
            .map(|c| (c.name.clone(), d.dot(&c.vector)))
            .collect()
    }
}

/// `dH - sum m_j E_j` rendered as `H-E1-E2`, `2H-E1-E2-E3` and so on.
pub fn class_label(c: &ClassVector) -> String {
    let names: Vec<String> = (0..c.dim())
        .map(|i| {
            if i == 0 {
                "H".to_string()
            } else {
                format!("E{i}")
            }
        })
        .collect();
    label_with(c, &names)
}

/// Integer combination of named basis vectors, `0` for the zero vector.
pub fn label_with(c: &ClassVector, names: &[String]) -> String {
    let mut s = String::new();
    for (x, name) in c.coords().iter().zip(names) {
        if x.is_zero() {
            continue;
        }
        let sign = if x.is_negative() {
            "-"
        } else if s.is_empty() {
            ""
        } else {
            "+"
        };
        let mag = format_rational(&x.abs());
        let mag = if mag == "1" { String::new() } else { mag };
        s.push_str(&format!("{sign}{mag}{name}"));
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// Extremal rays of the nef cone of the plane blown up at `r` points. Successful results are
/// cached; a run that hits `budget` is not.
pub fn factor_nef_rays(r: usize, budget: &Budget) -> Result<&'static [ClassVector], ScenarioError> {
    static CACHE: [OnceLock<Vec<ClassVector>>; MAX_SECOND + 1] =
        [const { OnceLock::new() }; MAX_SECOND + 1];
    let slot = CACHE.get(r).ok_or(LatticeError::PointCount(r))?;
    if let Some(rays) = slot.get() {
        return Ok(rays);
    }
    let rays = delpezzo::build(r)?
        .nef_cone_with_budget(budget)?
        .rays()
        .to_vec();
    Ok(slot.get_or_init(|| rays))
}

/// Outcome of the equality half of the cone theorem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum EqualityStatus {
    Equal {
        nef_rays: usize,
    },
    NotEqual {
        generator: ClassVector,
        missing_from_claim: bool,
        separator: Option<ClassVector>,
    },
    BudgetExceeded {
        rays: usize,
        elapsed_ms: u128,
    },
}

/// A claimed nef generator pairing negatively with a curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContainmentFailure {
    pub divisor: ClassVector,
    pub curve: String,
    #[serde(with = "crate::ratcone::rational::serde_rational")]
    pub pairing: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub r1: usize,
    pub r2: usize,
    pub claimed_generators: usize,
    pub curves: usize,
    pub containment: bool,
    pub containment_failure: Option<ContainmentFailure>,
    pub equality: EqualityStatus,
}

impl TheoremReport {
    /// Containment held and equality was either shown or not attempted to completion.
    pub fn refuted(&self) -> bool {
        !self.containment || matches!(self.equality, EqualityStatus::NotEqual { .. })
    }

    pub fn verified(&self) -> bool {
        self.containment && matches!(self.equality, EqualityStatus::Equal { .. })
    }
}

/// Checks that the claimed generators span exactly the dual of the cone of curves.
pub fn verify_theorem(s: &Scenario, budget: &Budget) -> Result<TheoremReport, ScenarioError> {
    verify_claim(s, &s.claimed_nef_generators_within(budget)?, budget)
}

/// As [`verify_theorem`] for an arbitrary list of claimed nef generators.
pub fn verify_claim(
    s: &Scenario,
    claimed: &[ClassVector],
    budget: &Budget,
) -> Result<TheoremReport, ScenarioError> {
    let containment_failure = claimed.iter().find_map(|d| {
        s.curves.iter().find_map(|c| {
            let p = d.dot(&c.vector);
            p.is_negative().then(|| ContainmentFailure {
                divisor: d.clone(),
                curve: c.name.clone(),
                pairing: p,
            })
        })
    });
    let equality = match s.ne_cone(budget) {
        Ok(ne) => match ne.dual()?.equals_generated(claimed)? {
            Equality::Equal => EqualityStatus::Equal {
                nef_rays: ne.facets().len(),
            },
            Equality::NotEqual(ConeDifference {
                generator,
                from,
                separator,
            }) => EqualityStatus::NotEqual {
                generator,
                missing_from_claim: from == crate::ratcone::Side::First,
                separator,
            },
        },
        Err(ScenarioError::Cone(ConeError::BudgetExceeded { rays, elapsed })) => {
            EqualityStatus::BudgetExceeded {
                rays,
                elapsed_ms: elapsed.as_millis(),
            }
        }
        Err(e) => return Err(e),
    };
    Ok(TheoremReport {
        r1: s.r1(),
        r2: s.r2(),
        claimed_generators: claimed.len(),
        curves: s.curves.len(),
        containment: containment_failure.is_none(),
        containment_failure,
        equality,
    })
}

/// One checked identity between curve classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Identity {
    pub statement: String,
    pub holds: bool,
}

/// `l_i = l_{i,j} + e_{i,j}` and `l_{2,j} = e(E_{2,j'}) + e(H - E_{2,j} - E_{2,j'})`.
pub fn curve_identities(s: &Scenario) -> Vec<Identity> {
    let mut out = Vec::new();
    for (i, r) in [(1, s.r1()), (2, s.r2())] {
        for j in 1..=r {
            out.push(Identity {
                statement: format!("l_{i} = l_{i},{j} + e_{i},{j}"),
                holds: s.line(i) == &s.line_through(i, j) + &s.exceptional_curve(i, j),
            });
        }
    }
    let l2 = &s.second;
    for j in 1..=s.r2() {
        for k in (1..=s.r2()).filter(|&k| k != j) {
            let conic = &(&l2.hyperplane() - &l2.exceptional(j)) - &l2.exceptional(k);
            out.push(Identity {
                statement: format!("l_2,{j} = e_2[E{k}] + e_2[{}]", class_label(&conic)),
                holds: s.line_through(2, j)
                    == &s.second_curve(&l2.exceptional(k)) + &s.second_curve(&conic),
            });
        }
    }
    out
}

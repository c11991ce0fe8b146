//! Product certificates for the divisors in `T`, and their agreement with cone membership.

use num_traits::Zero;
use serde::Serialize;

use super::{Scenario, ScenarioError};
use crate::delpezzo::DelPezzoLattice;
use crate::nefcert::{
    product_e_certificate, simple_product_ef_certificate, verify_he_hypotheses,
    verify_hef_hypotheses, ChainCertificate, ChainStep, GridCertificate, HeSelectors, Stratum,
};
use crate::ratcone::rational::int;
use crate::ratcone::{Budget, ClassVector, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TCertificates {
    /// `N_1` on the first factor.
    pub first_class: ClassVector,
    pub minus_e: ClassVector,
    pub minus_ef: ClassVector,
    pub e_certificate: ChainCertificate,
    pub ef_certificate: GridCertificate,
}

fn surface_stratum(l: &DelPezzoLattice, id: &str) -> Stratum {
    Stratum::new(id, l.rank(), l.ne_pairing_vectors())
}

/// `X > C > point` where `C` is a smooth curve of the given class and the point is on `C`.
/// The restriction to `C` is intersection with `C`.
fn surface_chain(
    l: &DelPezzoLattice,
    id: &str,
    divisor: ClassVector,
    curve: &ClassVector,
    full: bool,
) -> ChainCertificate {
    let mut steps = vec![ChainStep {
        stratum: surface_stratum(l, id),
        restriction: Matrix::identity(l.rank()),
        next_class: Some(curve.clone()),
    }];
    steps.push(ChainStep {
        stratum: Stratum::curve(format!("C[{}]", super::class_label(curve))),
        restriction: Matrix::row_vector(&l.pairing(curve)),
        next_class: full.then(|| ClassVector::from_ints(&[1])),
    });
    if full {
        steps.push(ChainStep {
            stratum: Stratum::point("pt"),
            restriction: Matrix::zeros(0, 1),
            next_class: None,
        });
    }
    ChainCertificate {
        root_rank: l.rank(),
        steps,
        divisor,
    }
}

/// A smooth curve through `a_1` with `N - C` nef and `N . C >= 1`.
fn curve_for(l: &DelPezzoLattice, n: &ClassVector) -> ClassVector {
    let h = l.hyperplane();
    let rest = n - &h.scale(&int(2));
    let marked: Vec<usize> = (1..=l.points()).filter(|&j| !rest[j].is_zero()).collect();
    match marked.as_slice() {
        // N = H, or N = 2H - E_1 - E_2 - E_3: C = N.
        [] | [_, _, _] => n.clone(),
        // N = 2H - E_j1 - E_j2: C = H - E_j1, leaving H - E_j2.
        [j1, _] => &h - &l.exceptional(*j1),
        _ => panic!("not a class of T_1: {n}"),
    }
}

/// Certificates for `N_1 + H_2 - E` and `N_1 + H_2 - E - F` with `N_1` in `T_1`.
pub fn t_certificates(s: &Scenario) -> Result<Vec<TCertificates>, ScenarioError> {
    let (l1, l2) = (s.first(), s.second());
    let h2 = l2.hyperplane();
    let divisors = s.t_divisors();
    s.first_t_classes()
        .into_iter()
        .zip(divisors.chunks(2))
        .map(|(n, pair)| {
            let c = curve_for(l1, &n);
            let first = surface_chain(l1, "X_1", n.clone(), &c, true);
            // A_2 is a line class; b_2 a point on it.
            let second_to_a = surface_chain(l2, "X_2", h2.clone(), &h2, false);
            let second_full = surface_chain(l2, "X_2", h2.clone(), &h2, true);
            let both = HeSelectors {
                first_nef: true,
                second_nef: true,
            };
            Ok(TCertificates {
                e_certificate: product_e_certificate(&first, &second_to_a, both)?,
                ef_certificate: simple_product_ef_certificate(&first, 0, &second_full, 1, both)?,
                first_class: n,
                minus_e: pair[0].clone(),
                minus_ef: pair[1].clone(),
            })
        })
        .collect()
}

/// Nefness of one divisor of `T` by certificate and by membership in the dual of the cone of curves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub divisor: ClassVector,
    pub by_certificate: bool,
    pub by_membership: bool,
}

impl CrossCheck {
    pub fn agrees(&self) -> bool {
        self.by_certificate == self.by_membership
    }
}

pub fn cross_validate(s: &Scenario, budget: &Budget) -> Result<Vec<CrossCheck>, ScenarioError> {
    let nef = s.ne_cone(budget)?.dual()?;
    let mut out = Vec::new();
    for t in t_certificates(s)? {
        for (divisor, passed) in [
            (&t.minus_e, verify_he_hypotheses(&t.e_certificate)?.passed),
            (
                &t.minus_ef,
                verify_hef_hypotheses(&t.ef_certificate)?.passed,
            ),
        ] {
            out.push(CrossCheck {
                divisor: divisor.clone(),
                by_certificate: passed,
                by_membership: nef.contains(divisor)?.is_member(),
            });
        }
    }
    Ok(out)
}

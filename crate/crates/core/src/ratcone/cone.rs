use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::linalg::stack;
use super::rational::{ClassVector, Rational};
use super::{dd, int};
use super::{Budget, ConeError};

/// A pointed polyhedral cone held in canonical form.
///
/// Rays are primitive integer extremal generators sorted lexicographically. Facets are
/// primitive integer normals `w` with `w . x >= 0` on the cone, and `equations` span the
/// orthogonal complement of the linear span.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolyCone {
    dim: usize,
    rays: Vec<ClassVector>,
    facets: Vec<ClassVector>,
    equations: Vec<ClassVector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "result")]
pub enum Membership {
    /// Nonnegative coefficients, one per ray of the cone.
    Member { coefficients: ClassVector },
    /// A functional nonnegative on the cone and negative on the vector.
    NonMember { separator: ClassVector },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    First,
    Second,
}

/// A generator of one cone lying outside the other.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeDifference {
    pub generator: ClassVector,
    /// Which cone the generator belongs to.
    pub from: Side,
    pub separator: Option<ClassVector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "result")]
pub enum Equality {
    Equal,
    NotEqual(ConeDifference),
}

impl Equality {
    pub fn is_equal(&self) -> bool {
        matches!(self, Equality::Equal)
    }
}

fn check_dims<'a>(
    dim: usize,
    vs: impl IntoIterator<Item = &'a ClassVector>,
) -> Result<(), ConeError> {
    for v in vs {
        if v.dim() != dim {
            return Err(ConeError::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
    }
    Ok(())
}

/// Canonical cone generated by `rays` (zero vectors and duplicates allowed).
pub fn cone_from_rays(dim: usize, rays: &[ClassVector]) -> Result<PolyCone, ConeError> {
    PolyCone::generated_by(dim, rays, &Budget::UNLIMITED)
}

/// Canonical cone `{x : a . x >= 0 for all a}`; fails if that cone is not pointed.
pub fn cone_from_inequalities(
    dim: usize,
    ineqs: &[ClassVector],
    budget: &Budget,
) -> Result<PolyCone, ConeError> {
    PolyCone::generated_by(dim, ineqs, budget)?.dual()
}

pub fn cones_equal(a: &PolyCone, b: &PolyCone) -> Result<Equality, ConeError> {
    if a.dim != b.dim {
        return Err(ConeError::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    for (from, x, y) in [(Side::First, a, b), (Side::Second, b, a)] {
        for r in &x.rays {
            if let Membership::NonMember { separator } = y.contains(r)? {
                return Ok(Equality::NotEqual(ConeDifference {
                    generator: r.clone(),
                    from,
                    separator: Some(separator),
                }));
            }
        }
    }
    Ok(Equality::Equal)
}

fn to_class(v: &[BigInt]) -> ClassVector {
    ClassVector::from_bigints(v)
}

/// The rows in `i128` when every entry fits in `i32`, so that dot products cannot overflow.
fn to_small(rows: &[Vec<BigInt>]) -> Option<Vec<Vec<i128>>> {
    rows.iter()
        .map(|r| r.iter().map(|x| x.to_i32().map(i128::from)).collect())
        .collect()
}

fn dot_big(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn int_rank(rows: &[&[BigInt]], cols: usize) -> usize {
    super::int::rank(rows, cols).expect("big integers do not overflow")
}

impl PolyCone {
    pub fn generated_by(
        dim: usize,
        rays: &[ClassVector],
        budget: &Budget,
    ) -> Result<PolyCone, ConeError> {
        check_dims(dim, rays)?;
        let mut gens: Vec<Vec<BigInt>> = rays.iter().filter_map(ClassVector::primitive).collect();
        gens.sort();
        gens.dedup();
        if gens.is_empty() {
            return Ok(PolyCone {
                dim,
                rays: Vec::new(),
                facets: Vec::new(),
                equations: (0..dim).map(|i| ClassVector::unit(dim, i)).collect(),
            });
        }

        let span = stack(&gens.iter().map(|g| to_class(g)).collect::<Vec<_>>(), dim);
        let (_, pivots) = span.rref();
        let k = pivots.len();
        let mut equations: Vec<ClassVector> = span
            .kernel()
            .iter()
            .map(|v| to_class(&v.primitive().expect("kernel basis vectors are nonzero")))
            .collect();
        equations.sort();

        let project =
            |g: &[BigInt]| -> Vec<BigInt> { pivots.iter().map(|&p| g[p].clone()).collect() };
        let mut projected: Vec<Vec<BigInt>> = gens.iter().map(|g| project(g)).collect();
        projected.sort();
        let normals = dd::extreme_rays(&projected, k, &budget.start())?;
        let normal_refs: Vec<&[BigInt]> = normals.iter().map(Vec::as_slice).collect();
        let r = int_rank(&normal_refs, k);
        if r < k {
            return Err(ConeError::Lineality { dim: k - r });
        }

        let mut facets: Vec<ClassVector> = normals
            .iter()
            .map(|u| {
                let mut w = vec![BigInt::zero(); dim];
                for (t, &p) in pivots.iter().enumerate() {
                    w[p] = u[t].clone();
                }
                to_class(&w)
            })
            .collect();
        facets.sort();

        // A generator is extremal when the facets through it cut out a line.
        let clock = budget.start();
        let small_normals = to_small(&normals);
        let extremal: Vec<ClassVector> = gens
            .par_iter()
            .map(|g| {
                clock.check(normals.len())?;
                let gp = project(g);
                let is_extremal = match (&small_normals, to_small(std::slice::from_ref(&gp))) {
                    (Some(small), Some(gs)) => {
                        let tight: Vec<&[i128]> = small
                            .iter()
                            .filter(|u| u.iter().zip(&gs[0]).map(|(a, b)| a * b).sum::<i128>() == 0)
                            .map(Vec::as_slice)
                            .collect();
                        tight.len() + 1 >= k
                            && match int::rank(&tight, k) {
                                Some(r) => r + 1 == k,
                                None => {
                                    let big: Vec<Vec<BigInt>> = tight
                                        .iter()
                                        .map(|u| u.iter().map(|&x| BigInt::from(x)).collect())
                                        .collect();
                                    let refs: Vec<&[BigInt]> =
                                        big.iter().map(Vec::as_slice).collect();
                                    int_rank(&refs, k) + 1 == k
                                }
                            }
                    }
                    _ => {
                        let tight: Vec<&[BigInt]> = normals
                            .iter()
                            .filter(|u| dot_big(u, &gp).is_zero())
                            .map(Vec::as_slice)
                            .collect();
                        tight.len() + 1 >= k && int_rank(&tight, k) + 1 == k
                    }
                };
                Ok(is_extremal.then(|| to_class(g)))
            })
            .collect::<Result<Vec<_>, ConeError>>()?
            .into_iter()
            .flatten()
            .collect();

        Ok(PolyCone {
            dim,
            rays: extremal,
            facets,
            equations,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Extremal rays, primitive and sorted.
    pub fn rays(&self) -> &[ClassVector] {
        &self.rays
    }

    /// Facet normals, primitive and sorted.
    pub fn facets(&self) -> &[ClassVector] {
        &self.facets
    }

    /// Basis of the orthogonal complement of the span.
    pub fn equations(&self) -> &[ClassVector] {
        &self.equations
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.equations.is_empty()
    }

    /// The dual cone. Only defined (as a pointed cone) for full-dimensional cones.
    pub fn dual(&self) -> Result<PolyCone, ConeError> {
        if !self.equations.is_empty() {
            return Err(ConeError::Lineality {
                dim: self.equations.len(),
            });
        }
        Ok(PolyCone {
            dim: self.dim,
            rays: self.facets.clone(),
            facets: self.rays.clone(),
            equations: Vec::new(),
        })
    }

    /// Membership with a certificate either way.
    pub fn contains(&self, v: &ClassVector) -> Result<Membership, ConeError> {
        check_dims(self.dim, [v])?;
        if let Some(separator) = self.separator(v) {
            return Ok(Membership::NonMember { separator });
        }
        Ok(Membership::Member {
            coefficients: self.decompose(v),
        })
    }

    /// Writes a member as a nonnegative combination of the rays by descending through faces.
    fn decompose(&self, v: &ClassVector) -> ClassVector {
        let pair: Vec<Vec<Rational>> = self
            .rays
            .iter()
            .map(|r| self.facets.iter().map(|w| w.dot(r)).collect())
            .collect();
        let mut coeffs = vec![Rational::zero(); self.rays.len()];
        let mut rem = v.clone();
        for _ in 0..=self.facets.len() + 1 {
            if rem.is_zero() {
                break;
            }
            let slack: Vec<Rational> = self.facets.iter().map(|w| w.dot(&rem)).collect();
            let r = (0..self.rays.len())
                .find(|&r| {
                    slack
                        .iter()
                        .zip(&pair[r])
                        .all(|(s, p)| !s.is_zero() || p.is_zero())
                })
                .expect("the minimal face of a nonzero member has a ray");
            let t = slack
                .iter()
                .zip(&pair[r])
                .filter(|(_, p)| p.is_positive())
                .map(|(s, p)| s / p)
                .min()
                .expect("a nonzero ray of a pointed cone is off some facet");
            rem = &rem - &self.rays[r].scale(&t);
            coeffs[r] += t;
        }
        debug_assert!(rem.is_zero());
        ClassVector::new(coeffs)
    }

    /// Whether this cone equals the cone generated by `gens`, without dualizing `gens`.
    ///
    /// Uses that an extremal ray of a cone lies in a subcone only if the subcone has a
    /// generator on that ray.
    pub fn equals_generated(&self, gens: &[ClassVector]) -> Result<Equality, ConeError> {
        check_dims(self.dim, gens)?;
        for g in gens {
            if let Some(separator) = self.separator(g) {
                return Ok(Equality::NotEqual(ConeDifference {
                    generator: g.clone(),
                    from: Side::Second,
                    separator: Some(separator),
                }));
            }
        }
        let mut prims: Vec<ClassVector> = gens
            .iter()
            .filter_map(|g| g.primitive())
            .map(|g| to_class(&g))
            .collect();
        prims.sort();
        for r in &self.rays {
            if prims.binary_search(r).is_err() {
                return Ok(Equality::NotEqual(ConeDifference {
                    generator: r.clone(),
                    from: Side::First,
                    separator: None,
                }));
            }
        }
        Ok(Equality::Equal)
    }

    /// A functional nonnegative on the cone and negative on `v`, if `v` lies outside.
    pub fn separator(&self, v: &ClassVector) -> Option<ClassVector> {
        for e in &self.equations {
            let s = e.dot(v);
            if !s.is_zero() {
                return Some(if s.is_positive() { -e } else { e.clone() });
            }
        }
        self.facets.iter().find(|w| w.dot(v).is_negative()).cloned()
    }
}

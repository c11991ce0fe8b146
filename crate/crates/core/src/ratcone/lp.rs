//! Exact feasibility of small systems of linear constraints, including strict ones.
//!
//! Strict rows `a . x > b` become `a . x - eps >= b` and the system is feasible iff some
//! `eps > 0` survives elimination of all variables. Every derived row carries its
//! multipliers over the original constraints, so refutations come with a certificate.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::rational::{format_rational, ClassVector, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Eq => "=",
        }
    }
}

/// `coeffs . x  (relation)  bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub coeffs: ClassVector,
    pub relation: Relation,
    #[serde(with = "super::rational::serde_rational")]
    pub bound: Rational,
}

impl Constraint {
    pub fn new(coeffs: ClassVector, relation: Relation, bound: Rational) -> Self {
        Constraint {
            coeffs,
            relation,
            bound,
        }
    }

    /// `coeffs . x <= bound`, stored as `-coeffs . x >= -bound`.
    pub fn le(coeffs: ClassVector, bound: Rational) -> Self {
        Constraint {
            coeffs: -&coeffs,
            relation: Relation::Ge,
            bound: -bound,
        }
    }

    /// `coeffs . x < bound`, stored as `-coeffs . x > -bound`.
    pub fn lt(coeffs: ClassVector, bound: Rational) -> Self {
        Constraint {
            coeffs: -&coeffs,
            relation: Relation::Gt,
            bound: -bound,
        }
    }

    pub fn holds_at(&self, x: &ClassVector) -> bool {
        let lhs = self.coeffs.dot(x);
        match self.relation {
            Relation::Ge => lhs >= self.bound,
            Relation::Gt => lhs > self.bound,
            Relation::Eq => lhs == self.bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearProgram {
    pub vars: usize,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("constraint {index} has {found} coefficients, expected {expected}")]
    Malformed {
        index: usize,
        expected: usize,
        found: usize,
    },
}

/// Multipliers combining the constraints into `0 >= positive` or `0 > nonnegative`.
///
/// Multipliers on inequalities are nonnegative; those on equations may have any sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InfeasibilityCertificate {
    pub multipliers: ClassVector,
}

/// The combined row a certificate produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combination {
    pub coeffs: ClassVector,
    pub strict: bool,
    pub bound: Rational,
}

impl Combination {
    /// True iff the row reads `0 >= b` with `b > 0`, or `0 > b` with `b >= 0`.
    pub fn is_contradiction(&self) -> bool {
        self.coeffs.is_zero()
            && (self.bound.is_positive() || (self.strict && !self.bound.is_negative()))
    }

    pub fn render(&self) -> String {
        format!(
            "0 {} {}",
            if self.strict { ">" } else { ">=" },
            format_rational(&self.bound)
        )
    }
}

impl InfeasibilityCertificate {
    pub fn combine(&self, lp: &LinearProgram) -> Combination {
        let mut coeffs = ClassVector::zeros(lp.vars);
        let mut bound = Rational::zero();
        let mut strict = false;
        for (c, l) in lp.constraints.iter().zip(self.multipliers.coords()) {
            coeffs = &coeffs + &c.coeffs.scale(l);
            bound += &c.bound * l;
            strict |= c.relation == Relation::Gt && l.is_positive();
        }
        Combination {
            coeffs,
            strict,
            bound,
        }
    }

    /// Sign conditions on the multipliers plus the contradiction itself.
    pub fn check(&self, lp: &LinearProgram) -> bool {
        self.multipliers.dim() == lp.constraints.len()
            && lp
                .constraints
                .iter()
                .zip(self.multipliers.coords())
                .all(|(c, l)| c.relation == Relation::Eq || !l.is_negative())
            && self.combine(lp).is_contradiction()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "result")]
pub enum Feasibility {
    Feasible { point: ClassVector },
    Infeasible(InfeasibilityCertificate),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }
}

impl std::fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        for c in &self.constraints {
            writeln!(
                f,
                "{} . x {} {}",
                c.coeffs,
                c.relation.symbol(),
                format_rational(&c.bound)
            )?;
        }
        Ok(())
    }
}

/// Row `coeffs . (x, eps) >= rhs` with its provenance.
#[derive(Clone)]
struct Row {
    coeffs: Vec<Rational>,
    rhs: Rational,
    mult: Vec<Rational>,
}

impl Row {
    fn combine(p: &Row, cp: &Rational, n: &Row, cn: &Rational) -> Row {
        // cp > 0, cn < 0: (-cn) * p + cp * n cancels the column.
        let a = -cn;
        let lin = |x: &Rational, y: &Rational| &a * x + cp * y;
        let mut r = Row {
            coeffs: p
                .coeffs
                .iter()
                .zip(&n.coeffs)
                .map(|(x, y)| lin(x, y))
                .collect(),
            rhs: lin(&p.rhs, &n.rhs),
            mult: p.mult.iter().zip(&n.mult).map(|(x, y)| lin(x, y)).collect(),
        };
        r.normalize();
        r
    }

    fn normalize(&mut self) {
        if let Some(s) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            if !s.is_one() {
                for c in self.coeffs.iter_mut().chain(self.mult.iter_mut()) {
                    *c /= &s;
                }
                self.rhs /= &s;
            }
        }
    }
}

pub fn lp_feasible(lp: &LinearProgram) -> Result<Feasibility, LpError> {
    let n = lp.vars;
    let m = lp.constraints.len();
    for (index, c) in lp.constraints.iter().enumerate() {
        if c.coeffs.dim() != n {
            return Err(LpError::Malformed {
                index,
                expected: n,
                found: c.coeffs.dim(),
            });
        }
    }
    let eps = n;
    let mut rows = Vec::new();
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut unit = vec![Rational::zero(); m];
        unit[i] = Rational::one();
        let mut coeffs = c.coeffs.coords().to_vec();
        coeffs.push(if c.relation == Relation::Gt {
            -Rational::one()
        } else {
            Rational::zero()
        });
        rows.push(Row {
            coeffs: coeffs.clone(),
            rhs: c.bound.clone(),
            mult: unit.clone(),
        });
        if c.relation == Relation::Eq {
            unit[i] = -Rational::one();
            rows.push(Row {
                coeffs: coeffs.iter().map(|x| -x).collect(),
                rhs: -c.bound.clone(),
                mult: unit,
            });
        }
    }

    let mut levels: Vec<Vec<Row>> = Vec::with_capacity(n);
    for v in 0..n {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in &rows {
            if r.coeffs[v].is_positive() {
                pos.push(r);
            } else if r.coeffs[v].is_negative() {
                neg.push(r);
            } else {
                rest.push(r.clone());
            }
        }
        for p in &pos {
            for q in &neg {
                rest.push(Row::combine(p, &p.coeffs[v], q, &q.coeffs[v]));
            }
        }
        dedup(&mut rest);
        levels.push(rows);
        rows = rest;
    }

    // Only the eps column is left, and its coefficients are all <= 0.
    let mut eps_value: Option<Rational> = None;
    for r in &rows {
        let c = &r.coeffs[eps];
        let refuted = if c.is_zero() {
            r.rhs.is_positive()
        } else {
            !r.rhs.is_negative()
        };
        if refuted {
            return Ok(Feasibility::Infeasible(InfeasibilityCertificate {
                multipliers: ClassVector::new(r.mult.clone()),
            }));
        }
        if !c.is_zero() {
            let cap = &r.rhs / c;
            eps_value = Some(match eps_value {
                Some(e) if e <= cap => e,
                _ => cap,
            });
        }
    }
    let eps_value = match eps_value {
        Some(e) if e < Rational::one() => e,
        _ => Rational::one(),
    };

    let mut x = vec![Rational::zero(); n + 1];
    x[eps] = eps_value;
    for v in (0..n).rev() {
        let (mut lo, mut hi): (Option<Rational>, Option<Rational>) = (None, None);
        for r in &levels[v] {
            let c = &r.coeffs[v];
            if c.is_zero() {
                continue;
            }
            let rest: Rational = r
                .coeffs
                .iter()
                .zip(&x)
                .enumerate()
                .filter(|&(j, _)| j != v)
                .map(|(_, (a, b))| a * b)
                .sum();
            let t = (&r.rhs - rest) / c;
            if c.is_positive() {
                lo = Some(lo.map_or(t.clone(), |l| l.max(t)));
            } else {
                hi = Some(hi.map_or(t.clone(), |h| h.min(t)));
            }
        }
        x[v] = lo.or(hi).unwrap_or_else(Rational::zero);
    }
    x.truncate(n);
    let point = ClassVector::new(x);
    debug_assert!(lp.constraints.iter().all(|c| c.holds_at(&point)));
    Ok(Feasibility::Feasible { point })
}

fn dedup(rows: &mut Vec<Row>) {
    let mut seen = std::collections::HashSet::new();
    rows.retain(|r| seen.insert((r.coeffs.clone(), r.rhs.clone())));
}

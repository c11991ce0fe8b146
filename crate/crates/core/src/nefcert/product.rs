//! Product certificates on `X_1 x X_2` assembled from certificates on the factors.
//!
//! Product strata have lattice the direct sum of the factor lattices, so every class is a
//! concatenation and every restriction is block diagonal with one factor moving at a time.

use super::{
    chain_classes, grid_classes, run_check, shape, CertError, ChainCertificate, ChainStep, Check,
    GridCell, GridCertificate, Stratum,
};
use crate::ratcone::{ClassVector, Matrix};

/// Which factor divisor may be assumed globally nef for the `H - E` product.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HeSelectors {
    pub first_nef: bool,
    pub second_nef: bool,
}

/// The six alternatives for the `H - E - F` product: global nefness of either factor
/// divisor, and step conditions along either factor's `A`- and `B`-chains.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HefSelectors {
    pub first_nef: bool,
    pub second_nef: bool,
    pub first_a_steps: bool,
    pub second_a_steps: bool,
    pub first_b_steps: bool,
    pub second_b_steps: bool,
}

impl HefSelectors {
    pub fn all() -> Self {
        HefSelectors {
            first_nef: true,
            second_nef: true,
            first_a_steps: true,
            second_a_steps: true,
            first_b_steps: true,
            second_b_steps: true,
        }
    }
}

/// Visiting order of two index ranges: all of the first factor, then all of the second.
fn interleave(len1: usize, len2: usize, first_leads: bool) -> Vec<(usize, usize)> {
    let mut out = vec![(0, 0)];
    let (mut p, mut q) = (0, 0);
    let mut advance = |first: bool, out: &mut Vec<(usize, usize)>| {
        if first {
            p += 1;
        } else {
            q += 1;
        }
        out.push((p, q));
    };
    let (a, b) = if first_leads {
        (true, false)
    } else {
        (false, true)
    };
    let (la, lb) = if first_leads {
        (len1, len2)
    } else {
        (len2, len1)
    };
    for _ in 0..la {
        advance(a, &mut out);
    }
    for _ in 0..lb {
        advance(b, &mut out);
    }
    out
}

fn lift(which: usize, m: &Matrix, other_rank: usize) -> Matrix {
    let id = Matrix::identity(other_rank);
    if which == 0 {
        Matrix::block_diag(m, &id)
    } else {
        Matrix::block_diag(&id, m)
    }
}

fn lift_class(which: usize, c: &ClassVector, other_rank: usize) -> ClassVector {
    let z = ClassVector::zeros(other_rank);
    if which == 0 {
        c.concat(&z)
    } else {
        z.concat(c)
    }
}

fn condition_error(condition: &str, check: &Check) -> CertError {
    CertError::FactorCondition {
        condition: condition.to_string(),
        stratum: check.stratum.clone(),
        curve: check
            .witness
            .clone()
            .expect("failed checks carry a witness"),
    }
}

/// Picks the first flagged alternative whose condition holds.
fn select(what: &'static str, options: [(bool, &str, Vec<Check>); 2]) -> Result<usize, CertError> {
    if options.iter().all(|(flag, _, _)| !flag) {
        return Err(CertError::NoSelector(what));
    }
    let mut first_failure = None;
    for (i, (flag, name, checks)) in options.iter().enumerate() {
        if !flag {
            continue;
        }
        match checks.iter().find(|c| !c.passed) {
            None => return Ok(i),
            Some(c) => {
                first_failure.get_or_insert_with(|| condition_error(name, c));
            }
        }
    }
    Err(first_failure.expect("some flagged option failed"))
}

/// `H_1 + H_2 - E` on the blowup of `X_1 x X_2` along `A_1 x A_2`, from chains
/// `X_i = X_{i,0} > ... > X_{i,a_i} = A_i` carrying the divisors `H_i`.
pub fn product_e_certificate(
    f1: &ChainCertificate,
    f2: &ChainCertificate,
    sel: HeSelectors,
) -> Result<ChainCertificate, CertError> {
    let (s1, s2) = (&f1.steps, &f2.steps);
    if s1.is_empty() || s2.is_empty() {
        return Err(CertError::Empty);
    }
    let c1 = chain_classes(f1.root_rank, &f1.divisor, s1)?;
    let c2 = chain_classes(f2.root_rank, &f2.divisor, s2)?;
    let nef1 = vec![run_check(
        "factor 1 root".into(),
        &s1[0].stratum,
        c1[0].clone(),
    )];
    let nef2 = vec![run_check(
        "factor 2 root".into(),
        &s2[0].stratum,
        c2[0].clone(),
    )];
    // A globally nef first factor lets the second factor's chain run first.
    let choice = select(
        "the globally nef factor",
        [
            (sel.first_nef, "H_1 nef", nef1),
            (sel.second_nef, "H_2 nef", nef2),
        ],
    )?;
    let order = interleave(s1.len() - 1, s2.len() - 1, choice == 1);

    let mut steps = Vec::with_capacity(order.len());
    for (t, &(p, q)) in order.iter().enumerate() {
        let stratum = Stratum::product(&s1[p].stratum, &s2[q].stratum);
        let restriction = if t == 0 {
            Matrix::block_diag(&s1[0].restriction, &s2[0].restriction)
        } else {
            let (pp, _) = order[t - 1];
            if p != pp {
                lift(0, &s1[p].restriction, s2[q].stratum.rank)
            } else {
                lift(1, &s2[q].restriction, s1[p].stratum.rank)
            }
        };
        let next_class = match order.get(t + 1) {
            None => None,
            Some(&(np, _)) if np != p => {
                let c = s1[p]
                    .next_class
                    .as_ref()
                    .ok_or_else(|| shape(format!("factor 1 step {p}"), "missing next class"))?;
                Some(lift_class(0, c, s2[q].stratum.rank))
            }
            Some(_) => {
                let c = s2[q]
                    .next_class
                    .as_ref()
                    .ok_or_else(|| shape(format!("factor 2 step {q}"), "missing next class"))?;
                Some(lift_class(1, c, s1[p].stratum.rank))
            }
        };
        steps.push(ChainStep {
            stratum,
            restriction,
            next_class,
        });
    }
    Ok(ChainCertificate {
        root_rank: f1.root_rank + f2.root_rank,
        steps,
        divisor: f1.divisor.concat(&f2.divisor),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Loc {
    Outer(usize),
    Cell(usize, usize),
}

/// Read access to one factor's grid certificate by location.
struct Factor<'a> {
    g: &'a GridCertificate,
    outer: Vec<ClassVector>,
    cells: Vec<Vec<ClassVector>>,
}

impl<'a> Factor<'a> {
    fn new(g: &'a GridCertificate) -> Result<Self, CertError> {
        let (outer, cells) = grid_classes(g)?;
        Ok(Factor { g, outer, cells })
    }

    fn c(&self) -> usize {
        self.g.outer.len()
    }

    fn ra(&self) -> usize {
        self.g.grid.len() - 1
    }

    fn rb(&self) -> usize {
        self.g.grid[0].len() - 1
    }

    /// `X_{i,p}` for `p <= c`.
    fn x(&self, p: usize) -> Loc {
        if p < self.c() {
            Loc::Outer(p)
        } else {
            Loc::Cell(0, 0)
        }
    }

    fn stratum(&self, l: Loc) -> &Stratum {
        match l {
            Loc::Outer(p) => &self.g.outer[p].stratum,
            Loc::Cell(j, k) => &self.g.grid[j][k].stratum,
        }
    }

    fn rank(&self, l: Loc) -> usize {
        self.stratum(l).rank
    }

    fn restriction(&self, l: Loc) -> &Matrix {
        match l {
            Loc::Outer(p) => &self.g.outer[p].restriction,
            Loc::Cell(j, k) => &self.g.grid[j][k].restriction,
        }
    }

    fn class(&self, l: Loc) -> &ClassVector {
        match l {
            Loc::Outer(p) => &self.outer[p],
            Loc::Cell(j, k) => &self.cells[j][k],
        }
    }

    fn cell(&self, j: usize, k: usize) -> &GridCell {
        &self.g.grid[j][k]
    }

    fn root_check(&self, name: &str) -> Vec<Check> {
        let l = self.x(0);
        vec![run_check(
            name.into(),
            self.stratum(l),
            self.class(l).clone(),
        )]
    }

    fn a_step_checks(&self, name: &str) -> Result<Vec<Check>, CertError> {
        (0..self.ra())
            .map(|j| {
                let na = self
                    .cell(j, 0)
                    .next_a
                    .as_ref()
                    .ok_or_else(|| shape(format!("{name} cell ({j},0)"), "missing next_a"))?;
                Ok(run_check(
                    format!("{name} cell ({j},0)"),
                    &self.cell(j, 0).stratum,
                    &self.cells[j][0] - na,
                ))
            })
            .collect()
    }

    fn b_step_checks(&self, name: &str) -> Result<Vec<Check>, CertError> {
        (0..self.rb())
            .map(|k| {
                let nb = self
                    .cell(0, k)
                    .next_b
                    .as_ref()
                    .ok_or_else(|| shape(format!("{name} cell (0,{k})"), "missing next_b"))?;
                Ok(run_check(
                    format!("{name} cell (0,{k})"),
                    &self.cell(0, k).stratum,
                    &self.cells[0][k] - nb,
                ))
            })
            .collect()
    }
}

/// Splits a product index into factor indices, filling the leading factor first.
fn split(t: usize, len1: usize, len2: usize, first_leads: bool) -> (usize, usize) {
    if first_leads {
        (t.min(len1), t.saturating_sub(len1))
    } else {
        (t.saturating_sub(len2), t.min(len2))
    }
}

/// `H_1 + H_2 - E - F` on the two-step blowup of `X_1 x X_2` along `A_1 x A_2` then the
/// strict transform of `B_1 x B_2`, from grid certificates on each factor carrying `H_i`.
pub fn product_ef_certificate(
    g1: &GridCertificate,
    g2: &GridCertificate,
    sel: HefSelectors,
) -> Result<GridCertificate, CertError> {
    let f = [Factor::new(g1)?, Factor::new(g2)?];

    // Alternatives pair up: global nefness of one factor lets the other factor's outer
    // chain run first; A-steps (B-steps) of one factor let the other factor's B-chain
    // (A-chain) run first.
    let outer_first_leads = 1
        == select(
            "the globally nef factor",
            [
                (sel.first_nef, "H_1 nef", f[0].root_check("factor 1 root")),
                (sel.second_nef, "H_2 nef", f[1].root_check("factor 2 root")),
            ],
        )?;
    let a_first_leads = 0
        == select(
            "the A-chain order",
            [
                (
                    sel.second_b_steps,
                    "B-steps of factor 2",
                    f[1].b_step_checks("factor 2")?,
                ),
                (
                    sel.first_b_steps,
                    "B-steps of factor 1",
                    f[0].b_step_checks("factor 1")?,
                ),
            ],
        )?;
    let b_first_leads = 0
        == select(
            "the B-chain order",
            [
                (
                    sel.second_a_steps,
                    "A-steps of factor 2",
                    f[1].a_step_checks("factor 2")?,
                ),
                (
                    sel.first_a_steps,
                    "A-steps of factor 1",
                    f[0].a_step_checks("factor 1")?,
                ),
            ],
        )?;

    let (c1, c2) = (f[0].c(), f[1].c());
    let order = interleave(c1, c2, outer_first_leads);
    let locs: Vec<[Loc; 2]> = order.iter().map(|&(p, q)| [f[0].x(p), f[1].x(q)]).collect();

    let product = |l: [Loc; 2]| Stratum::product(f[0].stratum(l[0]), f[1].stratum(l[1]));
    // Restriction and next class when exactly one factor moves from `from` to `to`.
    let moving = |from: [Loc; 2], to: [Loc; 2]| -> usize { usize::from(from[0] == to[0]) };
    let restriction_into = |from: Option<[Loc; 2]>, to: [Loc; 2]| -> Matrix {
        match from {
            None => Matrix::block_diag(f[0].restriction(to[0]), f[1].restriction(to[1])),
            Some(from) => {
                let w = moving(from, to);
                lift(w, f[w].restriction(to[w]), f[1 - w].rank(to[1 - w]))
            }
        }
    };

    let mut outer = Vec::with_capacity(c1 + c2);
    for t in 0..c1 + c2 {
        let (from, to) = (locs[t], locs[t + 1]);
        let w = moving(from, to);
        let Loc::Outer(p) = from[w] else {
            unreachable!("outer steps move along outer chains")
        };
        let next = f[w].g.outer[p]
            .next_class
            .as_ref()
            .ok_or_else(|| shape(format!("factor {} outer {p}", w + 1), "missing next class"))?;
        outer.push(ChainStep {
            stratum: product(from),
            restriction: restriction_into(t.checked_sub(1).map(|s| locs[s]), from),
            next_class: Some(lift_class(w, next, f[1 - w].rank(from[1 - w]))),
        });
    }

    let (ra, rb) = (f[0].ra() + f[1].ra(), f[0].rb() + f[1].rb());
    let cell_locs = |jj: usize, kk: usize| -> [Loc; 2] {
        let (a1, a2) = split(jj, f[0].ra(), f[1].ra(), a_first_leads);
        let (b1, b2) = split(kk, f[0].rb(), f[1].rb(), b_first_leads);
        [Loc::Cell(a1, b1), Loc::Cell(a2, b2)]
    };
    let corner_parent = (c1 + c2).checked_sub(1).map(|s| locs[s]);

    let mut grid = Vec::with_capacity(ra + 1);
    for jj in 0..=ra {
        let mut row = Vec::with_capacity(rb + 1);
        for kk in 0..=rb {
            let here = cell_locs(jj, kk);
            let restriction = if kk > 0 {
                restriction_into(Some(cell_locs(jj, kk - 1)), here)
            } else if jj > 0 {
                restriction_into(Some(cell_locs(jj - 1, 0)), here)
            } else {
                restriction_into(corner_parent, here)
            };
            let alt_restriction = if jj > 0 && kk > 0 {
                let above = cell_locs(jj - 1, kk);
                let w = moving(above, here);
                let Loc::Cell(a, b) = here[w] else {
                    unreachable!()
                };
                let m = if b == 0 {
                    Some(&f[w].cell(a, b).restriction)
                } else {
                    f[w].cell(a, b).alt_restriction.as_ref()
                };
                m.map(|m| lift(w, m, f[1 - w].rank(here[1 - w])))
            } else {
                None
            };
            let next_along = |other: [Loc; 2],
                              pick: fn(&GridCell) -> &Option<ClassVector>|
             -> Option<ClassVector> {
                let w = moving(here, other);
                let Loc::Cell(a, b) = here[w] else {
                    unreachable!()
                };
                pick(f[w].cell(a, b))
                    .as_ref()
                    .map(|c| lift_class(w, c, f[1 - w].rank(here[1 - w])))
            };
            let next_a = (jj < ra)
                .then(|| next_along(cell_locs(jj + 1, kk), |c| &c.next_a))
                .flatten();
            let next_b = (kk < rb)
                .then(|| next_along(cell_locs(jj, kk + 1), |c| &c.next_b))
                .flatten();
            row.push(GridCell {
                stratum: product(here),
                restriction,
                alt_restriction,
                next_a,
                next_b,
            });
        }
        grid.push(row);
    }

    Ok(GridCertificate {
        root_rank: g1.root_rank + g2.root_rank,
        outer,
        grid,
        divisor: g1.divisor.concat(&g2.divisor),
    })
}

/// Grid data for the configuration `A_1 < B_1` and `A_2 > B_2`.
///
/// `chain1` runs `X_1 > ... > B_1 > ... > A_1` with `B_1` at index `b1`; `chain2` runs
/// `X_2 > ... > A_2 > ... > B_2` with `A_2` at index `a2`. Each chain carries its `H_i`.
pub fn simple_product_ef_certificate(
    chain1: &ChainCertificate,
    b1: usize,
    chain2: &ChainCertificate,
    a2: usize,
    sel: HeSelectors,
) -> Result<GridCertificate, CertError> {
    let g1 = chain_to_grid(chain1, b1, true)?;
    let g2 = chain_to_grid(chain2, a2, false)?;
    let sel = HefSelectors {
        first_nef: sel.first_nef,
        second_nef: sel.second_nef,
        ..HefSelectors::all()
    };
    product_ef_certificate(&g1, &g2, sel)
}

/// Splits a chain at `at` into an outer part and a single grid column (or row).
fn chain_to_grid(
    chain: &ChainCertificate,
    at: usize,
    column: bool,
) -> Result<GridCertificate, CertError> {
    if at >= chain.steps.len() {
        return Err(shape(
            format!("split index {at}"),
            "past the end of the chain",
        ));
    }
    let (outer, rest) = chain.steps.split_at(at);
    let cells: Vec<GridCell> = rest
        .iter()
        .map(|s| GridCell {
            stratum: s.stratum.clone(),
            restriction: s.restriction.clone(),
            alt_restriction: None,
            next_a: if column { s.next_class.clone() } else { None },
            next_b: if column { None } else { s.next_class.clone() },
        })
        .collect();
    let grid = if column {
        cells.into_iter().map(|c| vec![c]).collect()
    } else {
        vec![cells]
    };
    Ok(GridCertificate {
        root_rank: chain.root_rank,
        outer: outer.to_vec(),
        grid,
        divisor: chain.divisor.clone(),
    })
}

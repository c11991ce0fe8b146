//! Double description: extreme rays of `{x : a_i . x >= 0}` for a full-rank system.

use std::cmp::Ordering;

use num_bigint::BigInt;
use rayon::prelude::*;

use super::int::{self, RayInt};
use super::linalg::Matrix;
use super::rational::ClassVector;
use super::{BudgetClock, ConeError};

enum Fail {
    Overflow,
    Cone(ConeError),
}

impl From<ConeError> for Fail {
    fn from(e: ConeError) -> Self {
        Fail::Cone(e)
    }
}

struct Ray<I> {
    v: Vec<I>,
    zeros: Vec<u64>,
}

/// Extreme rays (primitive, sorted) of the cone cut out by `constraints` in dimension `dim`.
///
/// Constraints are inserted in the order given. Fails with `Lineality` if they do not
/// have full rank.
pub(crate) fn extreme_rays(
    constraints: &[Vec<BigInt>],
    dim: usize,
    clock: &BudgetClock,
) -> Result<Vec<Vec<BigInt>>, ConeError> {
    match run::<i128>(constraints, dim, clock) {
        Ok(r) => Ok(r),
        Err(Fail::Cone(e)) => Err(e),
        Err(Fail::Overflow) => match run::<BigInt>(constraints, dim, clock) {
            Ok(r) => Ok(r),
            Err(Fail::Cone(e)) => Err(e),
            Err(Fail::Overflow) => unreachable!("big integers do not overflow"),
        },
    }
}

fn run<I: RayInt>(
    constraints: &[Vec<BigInt>],
    dim: usize,
    clock: &BudgetClock,
) -> Result<Vec<Vec<BigInt>>, Fail> {
    let m = constraints.len();
    let words = m.div_ceil(64).max(1);
    let rows: Vec<Vec<I>> = constraints
        .iter()
        .map(|r| r.iter().map(I::from_big).collect::<Option<Vec<I>>>())
        .collect::<Option<_>>()
        .ok_or(Fail::Overflow)?;

    let basis = greedy_basis(constraints, dim);
    if basis.len() < dim {
        return Err(ConeError::Lineality {
            dim: dim - basis.len(),
        }
        .into());
    }

    // Initial simplicial cone: columns of the inverse of the basis rows.
    let b = Matrix::from_rows(
        basis
            .iter()
            .map(|&i| ClassVector::from_bigints(&constraints[i]).into_coords())
            .collect(),
        dim,
    )
    .expect("rows share the ambient rank");
    let inv = b.inverse().expect("basis rows are independent");
    let mut rays: Vec<Ray<I>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let col = ClassVector::new((0..dim).map(|i| inv.get(i, j).clone()).collect());
        let v = col
            .primitive()
            .expect("inverse has no zero column")
            .iter()
            .map(I::from_big)
            .collect::<Option<Vec<I>>>()
            .ok_or(Fail::Overflow)?;
        let mut zeros = vec![0u64; words];
        for (t, &i) in basis.iter().enumerate() {
            if t != j {
                set_bit(&mut zeros, i);
            }
        }
        rays.push(Ray { v, zeros });
    }

    let need = dim.saturating_sub(2);
    let mut in_basis = vec![false; m];
    for &i in &basis {
        in_basis[i] = true;
    }

    for (idx, a) in rows.iter().enumerate() {
        if in_basis[idx] {
            continue;
        }
        clock.check(rays.len())?;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut vals = Vec::with_capacity(rays.len());
        for (r, ray) in rays.iter().enumerate() {
            let s = int::dot(a, &ray.v).ok_or(Fail::Overflow)?;
            match s.sign() {
                Ordering::Greater => pos.push(r),
                Ordering::Less => neg.push(r),
                Ordering::Equal => {}
            }
            vals.push(s);
        }
        if neg.is_empty() {
            for (r, ray) in rays.iter_mut().enumerate() {
                if vals[r].is_zero() {
                    set_bit(&mut ray.zeros, idx);
                }
            }
            continue;
        }

        let fresh: Vec<Vec<Ray<I>>> = pos
            .par_iter()
            .map(|&p| -> Result<Vec<Ray<I>>, Fail> {
                clock.check(rays.len())?;
                let mut out = Vec::new();
                for &n in &neg {
                    let (rp, rn) = (&rays[p], &rays[n]);
                    let common: usize = rp
                        .zeros
                        .iter()
                        .zip(&rn.zeros)
                        .map(|(x, y)| (x & y).count_ones() as usize)
                        .sum();
                    if common < need {
                        continue;
                    }
                    let inter: Vec<u64> =
                        rp.zeros.iter().zip(&rn.zeros).map(|(x, y)| x & y).collect();
                    if !has_rank(&rows, &inter, dim, need) {
                        continue;
                    }
                    let (sp, sn) = (&vals[p], &vals[n]);
                    let mut v =
                        rn.v.iter()
                            .zip(&rp.v)
                            .map(|(x, y)| x.mul(sp)?.sub(&y.mul(sn)?))
                            .collect::<Option<Vec<I>>>()
                            .ok_or(Fail::Overflow)?;
                    int::make_primitive(&mut v);
                    let mut zeros = inter;
                    set_bit(&mut zeros, idx);
                    out.push(Ray { v, zeros });
                }
                Ok(out)
            })
            .collect::<Result<_, _>>()?;

        let mut next: Vec<Ray<I>> = Vec::with_capacity(rays.len());
        for (r, mut ray) in rays.into_iter().enumerate() {
            match vals[r].sign() {
                Ordering::Less => {}
                Ordering::Equal => {
                    set_bit(&mut ray.zeros, idx);
                    next.push(ray);
                }
                Ordering::Greater => next.push(ray),
            }
        }
        next.extend(fresh.into_iter().flatten());
        rays = next;
        clock.check(rays.len())?;
    }

    let mut out: Vec<Vec<BigInt>> = rays
        .into_iter()
        .map(|r| r.v.iter().map(I::to_big).collect())
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// First `dim` linearly independent rows, scanning in order.
fn greedy_basis(constraints: &[Vec<BigInt>], dim: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for (i, _) in constraints.iter().enumerate() {
        if chosen.len() == dim {
            break;
        }
        let rows: Vec<&[BigInt]> = chosen
            .iter()
            .chain([&i])
            .map(|&j| constraints[j].as_slice())
            .collect();
        if int::rank(&rows, dim).expect("big integers do not overflow") == rows.len() {
            chosen.push(i);
        }
    }
    chosen
}

fn has_rank<I: RayInt>(rows: &[Vec<I>], set: &[u64], dim: usize, need: usize) -> bool {
    let picked: Vec<&[I]> = bits(set).map(|i| rows[i].as_slice()).collect();
    match int::rank(&picked, dim) {
        Some(r) => r >= need,
        None => {
            let big: Vec<Vec<BigInt>> = picked
                .iter()
                .map(|r| r.iter().map(I::to_big).collect())
                .collect();
            let refs: Vec<&[BigInt]> = big.iter().map(Vec::as_slice).collect();
            int::rank(&refs, dim).expect("big integers do not overflow") >= need
        }
    }
}

fn set_bit(words: &mut [u64], i: usize) {
    words[i / 64] |= 1 << (i % 64);
}

fn bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(w, &x)| {
        (0..64)
            .filter(move |b| x >> b & 1 == 1)
            .map(move |b| w * 64 + b)
    })
}

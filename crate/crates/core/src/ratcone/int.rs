//! Integer backends for the ray arithmetic: checked `i128` first, `BigInt` on overflow.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

pub(crate) trait RayInt: Clone + Ord + Debug + Send + Sync {
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn sign(&self) -> Ordering;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    /// Non-negative gcd.
    fn gcd(&self, o: &Self) -> Self;
    fn div_exact(&self, o: &Self) -> Self;
}

impl RayInt for i128 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn sign(&self) -> Ordering {
        self.cmp(&0)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
}

impl RayInt for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sign(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
}

pub(crate) fn dot<I: RayInt>(a: &[I], b: &[I]) -> Option<I> {
    a.iter()
        .zip(b)
        .try_fold(I::zero(), |acc, (x, y)| acc.add(&x.mul(y)?))
}

/// Divides by the gcd of the entries (no-op on zero vectors).
pub(crate) fn make_primitive<I: RayInt>(v: &mut [I]) {
    let g = v.iter().fold(I::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() {
        for c in v.iter_mut() {
            *c = c.div_exact(&g);
        }
    }
}

/// Rank of the given rows by fraction-free elimination. `None` on overflow.
pub(crate) fn rank<I: RayInt>(rows: &[&[I]], cols: usize) -> Option<usize> {
    let mut m: Vec<Vec<I>> = rows.iter().map(|r| r.to_vec()).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let (head, tail) = m.split_at_mut(rank + 1);
        let piv = &head[rank];
        for row in tail.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in c..cols {
                row[j] = row[j].mul(&piv[c])?.sub(&f.mul(&piv[j])?)?;
            }
            make_primitive(&mut row[c..]);
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    Some(rank)
}

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Integer pairing without allocation when every entry is a machine-size integer.
fn small_dot(a: &[Rational], b: &[Rational]) -> Option<i128> {
    let mut acc: i128 = 0;
    for (x, y) in a.iter().zip(b) {
        if !x.is_integer() || !y.is_integer() {
            return None;
        }
        let (x, y) = (x.numer().to_i64()?, y.numer().to_i64()?);
        acc = acc.checked_add(i128::from(x) * i128::from(y))?;
    }
    Some(acc)
}

/// Exact rational number backed by arbitrary-precision integers.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational literal {0:?}")]
pub struct ParseRationalError(pub String);

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(p, q))
        }
        None => BigInt::from_str(t)
            .map(Rational::from_integer)
            .map_err(|_| err()),
    }
}

/// Formats as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serde adapter for a single rational stored as a string.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        d.deserialize_any(RationalVisitor)
    }
}

struct RationalVisitor;

impl<'de> Visitor<'de> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational as \"p/q\" or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
        parse_rational(v).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
        Ok(int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
        Ok(Rational::from_integer(BigInt::from(v)))
    }
}

/// A class in a finite-rank lattice, stored by exact rational coordinates.
///
/// Ordering is lexicographic on coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassVector(Vec<Rational>);

impl ClassVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        ClassVector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        ClassVector(vec![Rational::zero(); dim])
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        ClassVector(coords.iter().map(|&c| int(c)).collect())
    }

    pub fn from_bigints(coords: &[BigInt]) -> Self {
        ClassVector(coords.iter().cloned().map(Rational::from_integer).collect())
    }

    /// The `i`-th standard basis vector.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Standard pairing. Panics on a dimension mismatch.
    pub fn dot(&self, other: &ClassVector) -> Rational {
        assert_eq!(
            self.dim(),
            other.dim(),
            "pairing of classes with different ranks"
        );
        if let Some(v) = small_dot(&self.0, &other.0) {
            return Rational::from_integer(v.into());
        }
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn scale(&self, t: &Rational) -> ClassVector {
        ClassVector(self.0.iter().map(|c| c * t).collect())
    }

    /// Concatenation, used for direct sums of lattices.
    pub fn concat(&self, other: &ClassVector) -> ClassVector {
        ClassVector(self.0.iter().chain(&other.0).cloned().collect())
    }

    /// The unique primitive integer vector on the same ray, or `None` for zero.
    pub fn primitive(&self) -> Option<Vec<BigInt>> {
        if self.is_zero() {
            return None;
        }
        let lcm = self
            .0
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|c| (c * &lcm).to_integer()).collect();
        Some(primitive_ints(ints))
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.denom().is_one())
    }
}

/// Divides an integer vector by the gcd of its entries.
pub(crate) fn primitive_ints(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for c in v.iter_mut() {
            *c = &*c / &g;
        }
    }
    v
}

impl Index<usize> for ClassVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl From<Vec<Rational>> for ClassVector {
    fn from(v: Vec<Rational>) -> Self {
        ClassVector(v)
    }
}

fn zip_with(
    a: &ClassVector,
    b: &ClassVector,
    f: impl Fn(&Rational, &Rational) -> Rational,
) -> ClassVector {
    assert_eq!(
        a.dim(),
        b.dim(),
        "arithmetic on classes with different ranks"
    );
    ClassVector(a.0.iter().zip(&b.0).map(|(x, y)| f(x, y)).collect())
}

impl Add for &ClassVector {
    type Output = ClassVector;
    fn add(self, rhs: &ClassVector) -> ClassVector {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &ClassVector {
    type Output = ClassVector;
    fn sub(self, rhs: &ClassVector) -> ClassVector {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Neg for &ClassVector {
    type Output = ClassVector;
    fn neg(self) -> ClassVector {
        ClassVector(self.0.iter().map(|c| -c).collect())
    }
}

impl Mul<&ClassVector> for &Rational {
    type Output = ClassVector;
    fn mul(self, rhs: &ClassVector) -> ClassVector {
        rhs.scale(self)
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&format_rational(c))?;
        }
        f.write_str(")")
    }
}

impl Serialize for ClassVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(format_rational))
    }
}

impl<'de> Deserialize<'de> for ClassVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Entry(#[serde(with = "serde_rational")] Rational);
        let v: Vec<Entry> = Vec::deserialize(d)?;
        Ok(ClassVector(v.into_iter().map(|e| e.0).collect()))
    }
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign(q: &Rational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

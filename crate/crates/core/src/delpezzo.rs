//! Numerical model of the plane blown up at `r <= 8` general points.
//!
//! Classes are coefficient vectors in the basis `(H, E_1, ..., E_r)` with the diagonal
//! form `(1, -1, ..., -1)`.

use num_traits::Signed;

use crate::ratcone::{cone_from_rays, Budget, ClassVector, ConeError, PolyCone};

pub const MAX_POINTS: usize = 8;
/// Safety cap on the degree scanned when deriving the enumeration bound.
const DEGREE_CAP: i64 = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("point count {0} is outside 0..=8")]
    PointCount(usize),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelPezzoLattice {
    points: usize,
}

pub fn build(r: usize) -> Result<DelPezzoLattice, LatticeError> {
    if r > MAX_POINTS {
        return Err(LatticeError::PointCount(r));
    }
    Ok(DelPezzoLattice { points: r })
}

impl DelPezzoLattice {
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn rank(&self) -> usize {
        1 + self.points
    }

    pub fn basis_names(&self) -> Vec<String> {
        std::iter::once("H".to_string())
            .chain((1..=self.points).map(|j| format!("E{j}")))
            .collect()
    }

    pub fn hyperplane(&self) -> ClassVector {
        ClassVector::unit(self.rank(), 0)
    }

    /// Exceptional class over the `j`-th point, 1-based.
    pub fn exceptional(&self, j: usize) -> ClassVector {
        assert!(
            (1..=self.points).contains(&j),
            "exceptional index out of range"
        );
        ClassVector::unit(self.rank(), j)
    }

    /// `d H - sum m_j E_j`.
    pub fn class(&self, degree: i64, mults: &[i64]) -> ClassVector {
        assert_eq!(mults.len(), self.points);
        let mut c = vec![degree];
        c.extend(mults.iter().map(|m| -m));
        ClassVector::from_ints(&c)
    }

    pub fn canonical(&self) -> ClassVector {
        let mut c = vec![-3];
        c.extend(std::iter::repeat_n(1, self.points));
        ClassVector::from_ints(&c)
    }

    /// Image of a class under the intersection form, so that `a . b = a.dot(pairing(b))`.
    pub fn pairing(&self, class: &ClassVector) -> ClassVector {
        assert_eq!(class.dim(), self.rank(), "class of the wrong rank");
        ClassVector::new(
            class
                .coords()
                .iter()
                .enumerate()
                .map(|(i, c)| if i == 0 { c.clone() } else { -c })
                .collect(),
        )
    }

    pub fn intersect(&self, a: &ClassVector, b: &ClassVector) -> crate::ratcone::Rational {
        a.dot(&self.pairing(b))
    }

    /// Degrees `d` allowed by `(3d - 1)^2 <= r (d^2 + 1)`.
    pub fn degree_bound(&self) -> i64 {
        let r = self.points as i64;
        (0..=DEGREE_CAP)
            .filter(|d| (3 * d - 1).pow(2) <= r * (d * d + 1))
            .max()
            .unwrap_or(-1)
    }

    /// All classes with self-intersection -1 and canonical degree -1, sorted.
    pub fn minus_one_classes(&self) -> Vec<ClassVector> {
        let r = self.points;
        let mut out = Vec::new();
        let mut mults = vec![0i64; r];
        for d in 0..=self.degree_bound() {
            fill(&mut mults, 0, d, 3 * d - 1, d * d + 1, &mut |m| {
                out.push(self.class(d, m))
            });
        }
        out.sort();
        out
    }

    /// Generators of the cone of curves.
    pub fn ne_generators(&self) -> Vec<ClassVector> {
        match self.points {
            0 => vec![self.hyperplane()],
            1 => vec![
                self.exceptional(1),
                &self.hyperplane() - &self.exceptional(1),
            ],
            _ => self.minus_one_classes(),
        }
    }

    /// The cone of curves in pairing coordinates: dual to divisor coefficient vectors.
    pub fn ne_pairing_vectors(&self) -> Vec<ClassVector> {
        self.ne_generators()
            .iter()
            .map(|c| self.pairing(c))
            .collect()
    }

    pub fn nef_cone(&self) -> Result<PolyCone, LatticeError> {
        self.nef_cone_with_budget(&Budget::UNLIMITED)
    }

    pub fn nef_cone_with_budget(&self, budget: &Budget) -> Result<PolyCone, LatticeError> {
        Ok(PolyCone::generated_by(self.rank(), &self.ne_pairing_vectors(), budget)?.dual()?)
    }

    /// The cone of curves in class coordinates.
    pub fn ne_cone(&self) -> Result<PolyCone, LatticeError> {
        Ok(cone_from_rays(self.rank(), &self.ne_generators())?)
    }

    fn check_rank(&self, d: &ClassVector) -> Result<(), LatticeError> {
        if d.dim() != self.rank() {
            return Err(ConeError::DimensionMismatch {
                expected: self.rank(),
                found: d.dim(),
            }
            .into());
        }
        Ok(())
    }

    pub fn is_nef(&self, d: &ClassVector) -> Result<bool, LatticeError> {
        self.check_rank(d)?;
        Ok(self
            .ne_generators()
            .iter()
            .all(|c| !self.intersect(d, c).is_negative()))
    }

    pub fn is_ample(&self, d: &ClassVector) -> Result<bool, LatticeError> {
        self.check_rank(d)?;
        Ok(self
            .ne_generators()
            .iter()
            .all(|c| self.intersect(d, c).is_positive()))
    }
}

/// Enumerates `m[j..]` in `[-1, d]` with the given remaining sum and sum of squares.
fn fill(m: &mut [i64], j: usize, d: i64, sum: i64, squares: i64, emit: &mut impl FnMut(&[i64])) {
    let left = (m.len() - j) as i64;
    if left == 0 {
        if sum == 0 && squares == 0 {
            emit(m);
        }
        return;
    }
    if squares < 0 || sum * sum > left * squares || sum < -left || sum > left * d {
        return;
    }
    for v in -1..=d {
        if v * v > squares {
            continue;
        }
        m[j] = v;
        fill(m, j + 1, d, sum - v, squares - v * v, emit);
    }
    m[j] = 0;
}

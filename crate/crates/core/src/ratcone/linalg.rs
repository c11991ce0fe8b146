use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{ClassVector, Rational};

/// Dense rational matrix acting on column vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix is {rows}x{cols}, cannot apply to a vector of rank {found}")]
    Shape {
        rows: usize,
        cols: usize,
        found: usize,
    },
    #[error("matrix is singular")]
    Singular,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed for the zero-row case.
    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Result<Self, MatrixError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(MatrixError::Ragged {
                    row: i,
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r);
        }
        Ok(Matrix {
            rows: n,
            cols,
            data,
        })
    }

    pub fn from_int_rows(rows: &[Vec<i64>], cols: usize) -> Result<Self, MatrixError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&c| super::rational::int(c)).collect())
                .collect(),
            cols,
        )
    }

    /// Single-row matrix.
    pub fn row_vector(v: &ClassVector) -> Self {
        Matrix {
            rows: 1,
            cols: v.dim(),
            data: v.coords().to_vec(),
        }
    }

    /// Block-diagonal sum.
    pub fn block_diag(a: &Matrix, b: &Matrix) -> Self {
        let mut m = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                m.set(i, j, a.get(i, j).clone());
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                m.set(a.rows + i, a.cols + j, b.get(i, j).clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn apply(&self, v: &ClassVector) -> Result<ClassVector, MatrixError> {
        if v.dim() != self.cols {
            return Err(MatrixError::Shape {
                rows: self.rows,
                cols: self.cols,
                found: v.dim(),
            });
        }
        Ok(ClassVector::new(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(v.coords())
                        .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
                })
                .collect(),
        ))
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::Shape {
                rows: self.rows,
                cols: self.cols,
                found: other.rows,
            });
        }
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(k, j);
                }
                m.set(i, j, acc);
            }
        }
        Ok(m)
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip();
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = m.get(i, c).clone();
                    for j in 0..m.cols {
                        let v = m.get(i, j) - &f * m.get(r, j);
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn kernel(&self) -> Vec<ClassVector> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = ClassVector::zeros(self.cols).into_coords();
                v[f] = Rational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f).clone();
                }
                ClassVector::new(v)
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<Matrix, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::Singular);
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Self::zeros(0, 0));
        }
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rational::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(MatrixError::Singular);
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }
}

/// Matrix whose rows are the given vectors.
pub fn stack(vectors: &[ClassVector], cols: usize) -> Matrix {
    Matrix::from_rows(vectors.iter().map(|v| v.coords().to_vec()).collect(), cols)
        .expect("stacked vectors share a rank")
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq((0..self.rows).map(|i| ClassVector::new(self.row(i).to_vec())))
    }
}

/// Deserialized rows; the column count is checked by the caller, who knows the parent rank.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixRows(pub Vec<ClassVector>);

impl From<&Matrix> for MatrixRows {
    fn from(m: &Matrix) -> Self {
        MatrixRows(
            (0..m.rows)
                .map(|i| ClassVector::new(m.row(i).to_vec()))
                .collect(),
        )
    }
}

impl MatrixRows {
    pub fn into_matrix(self, cols: usize) -> Result<Matrix, MatrixError> {
        Matrix::from_rows(
            self.0.into_iter().map(ClassVector::into_coords).collect(),
            cols,
        )
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = MatrixRows::deserialize(d)?;
        let cols = rows.0.first().map_or(0, ClassVector::dim);
        rows.into_matrix(cols).map_err(serde::de::Error::custom)
    }
}

use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::scalar::{Carrier, Eps, TimeValue};
use super::MaxPlusError;

/// Dense rectangular matrix over the max-plus semiring, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<T = i64> {
    rows: usize,
    cols: usize,
    entries: Vec<TimeValue<T>>,
}

impl<T: Carrier> Matrix<T> {
    /// The null matrix ℰ: every entry ε.
    pub fn null(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![Eps; rows * cols],
        }
    }

    /// The identity matrix E: `e` on the diagonal, ε elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::null(n, n);
        for i in 0..n {
            m.set(i, i, TimeValue::e());
        }
        m
    }

    /// Diagonal matrix with `diag` on the diagonal and ε elsewhere.
    pub fn diagonal(diag: &[TimeValue<T>]) -> Self {
        let mut m = Self::null(diag.len(), diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<TimeValue<T>>>) -> Result<Self, MaxPlusError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_cols {
                return Err(MaxPlusError::RaggedRows {
                    row: i,
                    expected: n_cols,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Matrix {
            rows: n_rows,
            cols: n_cols,
            entries,
        })
    }

    /// An `n × 1` column matrix.
    pub fn column(v: &[TimeValue<T>]) -> Self {
        Matrix {
            rows: v.len(),
            cols: 1,
            entries: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> TimeValue<T> {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: TimeValue<T>) {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        self.entries[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[TimeValue<T>] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[TimeValue<T>] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<TimeValue<T>>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// True when every entry is ε.
    pub fn is_null(&self) -> bool {
        self.entries.iter().all(|x| x.is_eps())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::null(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Entrywise `⊕`.
    pub fn oplus(&self, other: &Self) -> Result<Self, MaxPlusError> {
        if self.shape() != other.shape() {
            return Err(MaxPlusError::ShapeMismatch {
                op: "add",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&x, &y)| x.oplus(y))
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Max-plus product: `(X ⊗ Y)_ij = ⊕_k x_ik ⊗ y_kj`.
    pub fn otimes(&self, other: &Self) -> Result<Self, MaxPlusError> {
        if self.cols != other.rows {
            return Err(MaxPlusError::ShapeMismatch {
                op: "multiply",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::null(self.rows, other.cols);
        for i in 0..self.rows {
            for (k, &x) in self.row(i).iter().enumerate() {
                // ε rows of the left factor contribute nothing
                if x.is_eps() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.entries[idx] = out.entries[idx].oplus(x.otimes(other.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `X ⊗ v`.
    pub fn apply(&self, v: &[TimeValue<T>]) -> Result<Vec<TimeValue<T>>, MaxPlusError> {
        if self.cols != v.len() {
            return Err(MaxPlusError::ShapeMismatch {
                op: "apply",
                left: self.shape(),
                right: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Eps, |acc, (&x, &y)| acc.oplus(x.otimes(y)))
            })
            .collect())
    }

    /// `X^q`, with `X^0 = E`. Uses binary exponentiation, which agrees with
    /// repeated multiplication by associativity of `⊗`.
    pub fn pow(&self, q: u32) -> Result<Self, MaxPlusError> {
        if !self.is_square() {
            return Err(MaxPlusError::NotSquare {
                shape: self.shape(),
            });
        }
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        let mut q = q;
        while q > 0 {
            if q & 1 == 1 {
                result = result.otimes(&base)?;
            }
            q >>= 1;
            if q > 0 {
                base = base.otimes(&base)?;
            }
        }
        Ok(result)
    }
}

pub fn mat_add<T: Carrier>(x: &Matrix<T>, y: &Matrix<T>) -> Result<Matrix<T>, MaxPlusError> {
    x.oplus(y)
}

pub fn mat_mul<T: Carrier>(x: &Matrix<T>, y: &Matrix<T>) -> Result<Matrix<T>, MaxPlusError> {
    x.otimes(y)
}

pub fn mat_power<T: Carrier>(x: &Matrix<T>, q: u32) -> Result<Matrix<T>, MaxPlusError> {
    x.pow(q)
}

/// `⊕` of two vectors of equal length.
pub fn vec_oplus<T: Carrier>(x: &[TimeValue<T>], y: &[TimeValue<T>]) -> Vec<TimeValue<T>> {
    assert_eq!(x.len(), y.len(), "vector length mismatch");
    x.iter().zip(y).map(|(&a, &b)| a.oplus(b)).collect()
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                self.entries[i * self.cols + j].fmt(f)?;
            }
            f.write_str("]\n")?;
        }
        Ok(())
    }
}

// Serialized as a JSON array of rows.
impl<T: Serialize> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(&self.entries[i * self.cols..(i + 1) * self.cols])?;
        }
        seq.end()
    }
}

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::AlgebraError;

/// Dense real symmetric matrix. Entries `(i, j)` and `(j, i)` are stored
/// bit-identically.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    data: DMatrix<f64>,
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        SymMatrix {
            data: DMatrix::zeros(order, order),
        }
    }

    pub fn identity(order: usize) -> Self {
        SymMatrix {
            data: DMatrix::identity(order, order),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        SymMatrix {
            data: DMatrix::from_diagonal(&DVector::from_column_slice(values)),
        }
    }

    /// Build from a function evaluated on the upper triangle `i <= j`.
    pub fn from_upper(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = DMatrix::zeros(order, order);
        for i in 0..order {
            for j in i..order {
                let v = f(i, j);
                data[(i, j)] = v;
                data[(j, i)] = v;
            }
        }
        SymMatrix { data }
    }

    /// Symmetrize an arbitrary square matrix as `(M + Mᵀ) / 2`.
    pub fn symmetrize(m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_upper(m.nrows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    /// From row-major rows; fails unless the rows are exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, AlgebraError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(AlgebraError::NotSquare);
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(AlgebraError::NotSymmetric);
                }
            }
        }
        Ok(SymMatrix {
            data: DMatrix::from_fn(n, n, |i, j| rows[i][j]),
        })
    }

    pub fn order(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[(i, j)] = v;
        self.data[(j, i)] = v;
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        self.data.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        SymMatrix {
            data: &self.data * s,
        }
    }

    pub fn add(&self, other: &SymMatrix) -> Self {
        SymMatrix {
            data: &self.data + &other.data,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        self.data
            .row_iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.order())
            .map(|i| (0..self.order()).map(|j| self.data[(i, j)]).collect())
            .collect()
    }

    /// Frobenius inner product.
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        self.data.dot(&other.data)
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        SymMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Eigen-decomposition with eigenvalues sorted in descending order and the
/// matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SymEigen {
    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::INFINITY)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NEG_INFINITY)
    }
}

pub fn sym_eig(m: &SymMatrix) -> Result<SymEigen, AlgebraError> {
    if !m.is_finite() {
        return Err(AlgebraError::NonFinite);
    }
    let n = m.order();
    if n == 0 {
        return Ok(SymEigen {
            eigenvalues: Vec::new(),
            eigenvectors: DMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::new(m.data.clone());
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
    Ok(SymEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Smallest eigenvalue, `+∞` for an empty matrix.
pub fn min_eigenvalue(m: &SymMatrix) -> Result<f64, AlgebraError> {
    Ok(sym_eig(m)?.min())
}

pub fn max_eigenvalue(m: &SymMatrix) -> Result<f64, AlgebraError> {
    Ok(sym_eig(m)?.max())
}

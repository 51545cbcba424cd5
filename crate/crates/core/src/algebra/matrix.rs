use std::fmt;

use nalgebra::DMatrix;

use super::poly::SparsePoly;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Largest matrix handled by exact cofactor expansion.
pub const MAX_EXACT_DET: usize = 6;

/// Dense row-major matrix over ℚ(√5).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ScalarMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl ScalarMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ScalarMatrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Usage("ragged matrix rows".into()));
        }
        Ok(ScalarMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    /// Matrix product; skips zero entries, which dominate the signed
    /// permutation matrices of the classical groups.
    pub fn mul(&self, rhs: &ScalarMatrix) -> Result<ScalarMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Usage(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    out.data[i * rhs.cols + j] += &prod;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_f64())
    }

    /// Exact rank by Gaussian elimination over the field.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<Scalar>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let inv = m[rank][col].inverse().expect("nonzero pivot");
            for r in 0..self.rows {
                if r == rank || m[r][col].is_zero() {
                    continue;
                }
                let f = &m[r][col] * &inv;
                for c in col..self.cols {
                    let sub = &f * &m[rank][c];
                    m[r][c] -= &sub;
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// Exact determinant by elimination; `None` unless square.
    pub fn det(&self) -> Option<Scalar> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut m: Vec<Vec<Scalar>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut det = Scalar::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return Some(Scalar::zero());
            };
            if p != col {
                m.swap(col, p);
                det = -det;
            }
            det *= &m[col][col];
            let inv = m[col][col].inverse().expect("nonzero pivot");
            for r in col + 1..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let f = &m[r][col] * &inv;
                for c in col..n {
                    let sub = &f * &m[col][c];
                    m[r][c] -= &sub;
                }
            }
        }
        Some(det)
    }
}

impl fmt::Debug for ScalarMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[Scalar]> = (0..self.rows).map(|i| self.row(i)).collect();
        f.debug_list().entries(rows).finish()
    }
}

/// Rectangular matrix of polynomials sharing one variable count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    entries: Vec<SparsePoly>,
}

impl PolyMatrix {
    pub fn from_rows(rows: Vec<Vec<SparsePoly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Usage("ragged polynomial matrix".into()));
        }
        let nvars = rows
            .first()
            .and_then(|row| row.first())
            .map_or(0, SparsePoly::nvars);
        if rows.iter().flatten().any(|p| p.nvars() != nvars) {
            return Err(Error::Usage(
                "polynomial matrix entries with different variable counts".into(),
            ));
        }
        Ok(PolyMatrix {
            rows: r,
            cols: c,
            nvars,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            SparsePoly::one(nvars)
                        } else {
                            SparsePoly::zero(nvars)
                        }
                    })
                    .collect()
            })
            .collect();
        PolyMatrix::from_rows(rows).expect("square identity")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: usize) -> &SparsePoly {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[SparsePoly] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Submatrix on the given row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<PolyMatrix> {
        if rows.iter().any(|&r| r >= self.rows) || cols.iter().any(|&c| c >= self.cols) {
            return Err(Error::Usage("submatrix index out of range".into()));
        }
        PolyMatrix::from_rows(
            rows.iter()
                .map(|&r| cols.iter().map(|&c| self.get(r, c).clone()).collect())
                .collect(),
        )
        .map(|mut m| {
            m.nvars = self.nvars;
            m
        })
    }

    /// Exact determinant by cofactor expansion, organised as a dynamic
    /// program over the set of columns already used.
    pub fn det(&self) -> Result<SparsePoly> {
        if self.rows != self.cols {
            return Err(Error::Usage(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n > MAX_EXACT_DET {
            return Err(Error::Capability(format!(
                "exact determinant limited to size {MAX_EXACT_DET}, got {n}; use the numeric rank path"
            )));
        }
        if n == 0 {
            return Ok(SparsePoly::one(self.nvars));
        }
        // partial[mask] = signed sum of products over the first popcount(mask)
        // rows using exactly the columns in mask.
        let full = (1usize << n) - 1;
        let mut partial: Vec<Option<SparsePoly>> = vec![None; 1 << n];
        partial[0] = Some(SparsePoly::one(self.nvars));
        for mask in 0..full {
            let Some(acc) = partial[mask].take() else {
                continue;
            };
            if acc.is_zero() {
                continue;
            }
            let row = mask.count_ones() as usize;
            for col in 0..n {
                if mask & (1 << col) != 0 {
                    continue;
                }
                let entry = self.get(row, col);
                if entry.is_zero() {
                    continue;
                }
                // Each already-used column to the right of `col` is one inversion.
                let inversions = (mask >> (col + 1)).count_ones();
                let mut term = &acc * entry;
                if inversions % 2 == 1 {
                    term = -&term;
                }
                let next = mask | (1 << col);
                partial[next] = Some(match partial[next].take() {
                    Some(prev) => &prev + &term,
                    None => term,
                });
            }
        }
        Ok(partial[full]
            .take()
            .unwrap_or_else(|| SparsePoly::zero(self.nvars)))
    }

    /// Numeric value of every entry at `x`.
    pub fn eval_f64(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let vals: Result<Vec<f64>> = self.entries.iter().map(|p| p.eval_f64(x)).collect();
        let vals = vals?;
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &vals))
    }
}

/// Determinant of a `PolyMatrix`; see [`PolyMatrix::det`].
pub fn poly_det(m: &PolyMatrix) -> Result<SparsePoly> {
    m.det()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> SparsePoly {
        SparsePoly::var(2, i)
    }

    fn c(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn identity_det_is_one() {
        for n in 1..=6 {
            assert_eq!(PolyMatrix::identity(n, 3).det().unwrap(), SparsePoly::one(3));
        }
    }

    #[test]
    fn b2_jacobian_det_by_hand() {
        // [[2x1, 2x2], [2x1x2², 2x1²x2]] → 4x1³x2 − 4x1x2³
        let m = PolyMatrix::from_rows(vec![
            vec![x(0).scale(&c(2)), x(1).scale(&c(2))],
            vec![
                (&x(0) * &x(1).pow(2)).scale(&c(2)),
                (&x(0).pow(2) * &x(1)).scale(&c(2)),
            ],
        ])
        .unwrap();
        let expected = &(&x(0).pow(3) * &x(1)).scale(&c(4)) - &(&x(0) * &x(1).pow(3)).scale(&c(4));
        assert_eq!(m.det().unwrap(), expected);
    }

    #[test]
    fn size_limits_and_shape_errors() {
        let big = PolyMatrix::identity(7, 1);
        assert!(matches!(big.det(), Err(Error::Capability(_))));
        let rect = PolyMatrix::from_rows(vec![vec![SparsePoly::one(1), SparsePoly::one(1)]]).unwrap();
        assert!(matches!(rect.det(), Err(Error::Usage(_))));
    }

    #[test]
    fn permutation_sign() {
        // Anti-diagonal 3x3 has determinant −1.
        let z = SparsePoly::zero(1);
        let o = SparsePoly::one(1);
        let m = PolyMatrix::from_rows(vec![
            vec![z.clone(), z.clone(), o.clone()],
            vec![z.clone(), o.clone(), z.clone()],
            vec![o.clone(), z.clone(), z.clone()],
        ])
        .unwrap();
        assert_eq!(m.det().unwrap(), SparsePoly::constant(1, c(-1)));
    }

    #[test]
    fn exact_rank() {
        let m = ScalarMatrix::from_rows(vec![
            vec![c(1), c(2), c(3)],
            vec![c(2), c(4), c(6)],
            vec![Scalar::sqrt5(), c(0), c(1)],
        ])
        .unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(ScalarMatrix::identity(4).rank(), 4);
    }
}

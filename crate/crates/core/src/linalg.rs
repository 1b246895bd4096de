//! Small dense matrices over a [`Field`] and exact rank by Gaussian
//! elimination.

use crate::field::{Elem, Field};

/// Row-major matrix of field element indices. Carries no field handle;
/// every operation takes the field explicitly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![Elem::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Elem::ONE);
        }
        m
    }

    /// Panics unless every row has the same length.
    pub fn from_rows(rows: Vec<Vec<Elem>>) -> Matrix {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    /// Applies a^(p^i) to every entry.
    pub fn frobenius_twist(&self, field: &Field, i: u64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| field.frobenius(a, i)).collect(),
        }
    }

    pub fn mul(&self, field: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = field.add(out.get(i, j), field.mul(a, other.get(t, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn rank(&self, field: &Field) -> usize {
        let mut work = self.data.clone();
        rank_in_place(field, &mut work, self.rows, self.cols)
    }
}

/// Row-reduces `data` (row-major, rows x cols) and returns its rank.
pub(crate) fn rank_in_place(field: &Field, data: &mut [Elem], rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !data[r * cols + col].is_zero()) else {
            continue;
        };
        if pivot != rank {
            for j in col..cols {
                data.swap(pivot * cols + j, rank * cols + j);
            }
        }
        let inv = field
            .inv(data[rank * cols + col])
            .expect("pivot is nonzero");
        for r in rank + 1..rows {
            let factor = data[r * cols + col];
            if factor.is_zero() {
                continue;
            }
            let factor = field.mul(factor, inv);
            for j in col..cols {
                let v = field.sub(data[r * cols + j], field.mul(factor, data[rank * cols + j]));
                data[r * cols + j] = v;
            }
        }
        rank += 1;
    }
    rank
}

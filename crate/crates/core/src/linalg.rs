//! Dense exact linear algebra over the rationals.
//!
//! Elimination is Gauss-Jordan over `Rat`; pivots are chosen as the first
//! nonzero entry in column order, so every result is deterministic.

use num_traits::{One, Zero};

use crate::algebra::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Vec<Rat>>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![vec![Rat::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix { rows: rows.len(), cols, data: rows }
    }

    /// Builds a `rows x columns.len()` matrix from column vectors.
    pub fn from_columns(columns: &[Vec<Rat>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, v) in c.iter().enumerate() {
                m.data[i][j] = v.clone();
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i]
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        self.data.iter().map(|r| r[j].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rat>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|r| r.iter().zip(v).fold(Rat::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows);
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = &self.data[i][k] * &o.data[k][j];
                    out.data[i][j] += v;
                }
            }
        }
        out
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.rows, o.rows);
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.iter().chain(b).cloned().collect())
            .collect();
        Matrix { rows: self.rows, cols: self.cols + o.cols, data }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.data[i][c].is_zero()) else {
                continue;
            };
            m.data.swap(r, p);
            let inv = Rat::one() / &m.data[r][c];
            for v in m.data[r].iter_mut() {
                *v *= &inv;
            }
            let pivot_row = m.data[r].clone();
            for i in 0..m.rows {
                if i == r || m.data[i][c].is_zero() {
                    continue;
                }
                let f = m.data[i][c].clone();
                for (v, pv) in m.data[i].iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, one vector per free column (that entry set to 1).
    pub fn nullspace(&self) -> Vec<Vec<Rat>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.cols];
                v[f] = Rat::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.data[i][f].clone();
                }
                v
            })
            .collect()
    }

    /// A solution of `self * v = b` with free variables zero, if consistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows);
        let aug = self.hcat(&Matrix::from_columns(&[b.to_vec()], self.rows));
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut v = vec![Rat::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = r.data[i][self.cols].clone();
        }
        Some(v)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(|v| v.is_zero()))
    }
}

/// Incrementally built echelon basis, used for span membership and greedy complements.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    dim: usize,
    /// Rows normalized with a leading 1 at `pivots[i]`.
    rows: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current rows.
    pub fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.dim);
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (wi, ri) in w.iter_mut().zip(row) {
                if !ri.is_zero() {
                    *wi -= &f * ri;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Adds `v` if independent; returns whether it was added.
    pub fn insert(&mut self, v: &[Rat]) -> bool {
        let mut w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = Rat::one() / &w[p];
        for x in w.iter_mut() {
            *x *= &inv;
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (ri, wi) in row.iter_mut().zip(&w) {
                if !wi.is_zero() {
                    *ri -= &f * wi;
                }
            }
        }
        self.rows.push(w);
        self.pivots.push(p);
        true
    }
}

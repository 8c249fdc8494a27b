//! Exact linear algebra over Q by reduced row echelon form.

use num::Zero;

use crate::error::{LiraError, Result};
use crate::ring::{rat, Rat};

#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Rat>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> QMatrix {
        QMatrix {
            rows,
            cols,
            entries: vec![rat(0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> QMatrix {
        let mut m = QMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, rat(1));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<QMatrix> {
        let nrows = rows.len();
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(LiraError::DimensionMismatch("ragged rows".into()));
        }
        Ok(QMatrix {
            rows: nrows,
            cols: ncols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.cols {
            return Err(LiraError::DimensionMismatch(
                "vector length differs from column count".into(),
            ));
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * &v[j])
                    .fold(rat(0), |a, b| a + b)
            })
            .collect())
    }
}

#[derive(Clone, Debug)]
pub struct QSolve {
    pub rank: usize,
    /// Particular solution per right-hand side, `None` when inconsistent.
    pub solutions: Vec<Option<Vec<Rat>>>,
    /// Basis of the kernel of the coefficient matrix.
    pub kernel: Vec<Vec<Rat>>,
}

/// Exact reduced row echelon solve for several right-hand sides at once.
pub fn qsolve(m: &QMatrix, rhs: &[Vec<Rat>]) -> Result<QSolve> {
    for b in rhs {
        if b.len() != m.rows {
            return Err(LiraError::DimensionMismatch(
                "right-hand side length differs from row count".into(),
            ));
        }
    }
    let nrhs = rhs.len();
    let width = m.cols + nrhs;
    // augmented matrix [M | b1 .. bk]
    let mut a: Vec<Vec<Rat>> = (0..m.rows)
        .map(|i| {
            let mut row: Vec<Rat> = (0..m.cols).map(|j| m.get(i, j).clone()).collect();
            for b in rhs {
                row.push(b[i].clone());
            }
            row
        })
        .collect();

    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].clone();
        for v in a[r].iter_mut() {
            *v = &*v / &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..width {
                    let sub = &f * &a[r][j];
                    a[i][j] = &a[i][j] - &sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let rank = pivots.len();

    let mut solutions = Vec::with_capacity(nrhs);
    for k in 0..nrhs {
        let col = m.cols + k;
        let inconsistent = (rank..a.len()).any(|i| !a[i][col].is_zero());
        if inconsistent {
            solutions.push(None);
        } else {
            let mut x = vec![rat(0); m.cols];
            for (row, &pc) in pivots.iter().enumerate() {
                x[pc] = a[row][col].clone();
            }
            solutions.push(Some(x));
        }
    }

    let mut kernel = Vec::new();
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    for free in (0..m.cols).filter(|c| !pivot_set.contains(c)) {
        let mut v = vec![rat(0); m.cols];
        v[free] = rat(1);
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[row][free].clone();
        }
        kernel.push(v);
    }

    Ok(QSolve {
        rank,
        solutions,
        kernel,
    })
}

//! Dense matrices with ring-element entries.

use std::sync::Arc;

use crate::error::{LiraError, Result};
use crate::ring::{BaseRing, Derivation, Poly};

#[derive(Clone, Debug, PartialEq)]
pub struct PMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Poly>,
}

impl PMatrix {
    pub fn zero(ring: &Arc<BaseRing>, rows: usize, cols: usize) -> PMatrix {
        PMatrix {
            rows,
            cols,
            entries: vec![Poly::zero(ring); rows * cols],
        }
    }

    pub fn identity(ring: &Arc<BaseRing>, n: usize) -> PMatrix {
        let mut m = PMatrix::zero(ring, n, n);
        for i in 0..n {
            m.entries[i * n + i] = Poly::one(ring);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<PMatrix> {
        let nrows = rows.len();
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(LiraError::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(PMatrix {
            rows: nrows,
            cols: ncols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn add(&self, other: &PMatrix) -> PMatrix {
        PMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &PMatrix) -> PMatrix {
        PMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> PMatrix {
        PMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn scale(&self, p: &Poly) -> PMatrix {
        PMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a.mul(p)).collect(),
        }
    }

    pub fn mul(&self, other: &PMatrix) -> Result<PMatrix> {
        if self.cols != other.rows {
            return Err(LiraError::DimensionMismatch("matrix product shapes".into()));
        }
        let ring = self.entries[0].ring.clone();
        let mut out = PMatrix::zero(&ring, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Poly::zero(&ring);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Poly]) -> Result<Vec<Poly>> {
        if v.len() != self.cols {
            return Err(LiraError::DimensionMismatch("matrix-vector shapes".into()));
        }
        let ring = self.entries[0].ring.clone();
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Poly::zero(&ring), |acc, j| {
                    acc.add(&self.get(i, j).mul(&v[j]))
                })
            })
            .collect())
    }

    /// Derivation applied entrywise.
    pub fn applied(&self, d: &Derivation) -> PMatrix {
        PMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|p| d.apply(p)).collect(),
        }
    }

    pub fn commutator(&self, other: &PMatrix) -> Result<PMatrix> {
        Ok(self.mul(other)?.sub(&other.mul(self)?))
    }

    pub fn trace(&self) -> Poly {
        let ring = self.entries[0].ring.clone();
        (0..self.rows.min(self.cols)).fold(Poly::zero(&ring), |acc, i| acc.add(self.get(i, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn kron(&self, other: &PMatrix) -> PMatrix {
        let ring = self.entries[0].ring.clone();
        let mut out = PMatrix::zero(
            &ring,
            self.rows * other.rows,
            self.cols * other.cols,
        );
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(
                            i * other.rows + k,
                            j * other.cols + l,
                            self.get(i, j).mul(other.get(k, l)),
                        );
                    }
                }
            }
        }
        out
    }
}

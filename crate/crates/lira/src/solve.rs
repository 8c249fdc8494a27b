//! Degree-window-truncated linear solving over the base ring B.
//!
//! Unknowns are ring elements supported on a finite monomial window; the
//! system is expanded into an exact linear problem over Q and handed to
//! `qsolve`. A negative answer only asserts nonexistence within the window.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::Zero;

use crate::error::{LiraError, Result};
use crate::linalg::{qsolve, QMatrix};
use crate::ring::{rat, BaseRing, Derivation, Mono, Poly, Rat};

/// Degree bound for window monomials: exponents in [0, D], or [-D, D] for
/// Laurent variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationWindow {
    pub degree: i64,
}

impl TruncationWindow {
    pub fn new(degree: i64) -> Result<TruncationWindow> {
        if degree < 0 {
            return Err(LiraError::Domain("window degree must be >= 0".into()));
        }
        Ok(TruncationWindow { degree })
    }

    /// All admissible monomials, in relation normal form when the ring has a
    /// defining relation.
    pub fn monomials(&self, ring: &Arc<BaseRing>) -> Vec<Mono> {
        let n = ring.nvars();
        let mut out = vec![Mono::unit(n)];
        for i in 0..n {
            let lo = if ring.is_laurent(i) { -self.degree } else { 0 };
            let mut next = Vec::new();
            for m in &out {
                for e in lo..=self.degree {
                    let mut exp = m.0.clone();
                    exp[i] = e;
                    next.push(Mono(exp));
                }
            }
            out = next;
        }
        out.retain(|m| {
            // keep only monomials already in normal form
            Poly::monomial(ring, m.clone(), rat(1))
                .map(|p| p.terms.len() == 1 && p.terms.contains_key(m))
                .unwrap_or(false)
        });
        out.sort();
        out
    }
}

/// One summand of a B-linear equation: `pre * deriv(u_k)`, or `pre * u_k`
/// when no derivation is attached.
#[derive(Clone, Debug)]
pub struct LinTerm {
    pub unknown: usize,
    pub pre: Poly,
    pub deriv: Option<Derivation>,
}

impl LinTerm {
    pub fn mul(unknown: usize, pre: Poly) -> LinTerm {
        LinTerm {
            unknown,
            pre,
            deriv: None,
        }
    }

    pub fn deriv(unknown: usize, pre: Poly, d: Derivation) -> LinTerm {
        LinTerm {
            unknown,
            pre,
            deriv: Some(d),
        }
    }

    fn apply(&self, u: &Poly) -> Poly {
        match &self.deriv {
            Some(d) => self.pre.mul(&d.apply(u)),
            None => self.pre.mul(u),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinEquation {
    pub terms: Vec<LinTerm>,
    pub rhs: Poly,
}

#[derive(Clone, Debug)]
pub struct TruncatedSolution {
    pub witness: Vec<Poly>,
    /// Basis of window-supported solutions of the homogeneous system.
    pub kernel: Vec<Vec<Poly>>,
}

/// Expands the unknowns over the window monomial basis, matches coefficients
/// of every monomial arising in the equations, and solves exactly. A returned
/// witness satisfies the system exactly; `None` means no solution exists with
/// all unknowns supported on the window.
pub fn truncated_solve(
    ring: &Arc<BaseRing>,
    num_unknowns: usize,
    equations: &[LinEquation],
    window: TruncationWindow,
) -> Result<Option<TruncatedSolution>> {
    let basis = window.monomials(ring);
    let ncols = num_unknowns * basis.len();

    // image of each (unknown, basis monomial) pair under each equation
    let mut row_index: BTreeMap<(usize, Mono), usize> = BTreeMap::new();
    let mut columns: Vec<Vec<(usize, Rat)>> = vec![Vec::new(); ncols];
    let mut rhs_entries: Vec<(usize, Rat)> = Vec::new();

    let row_of = |row_index: &mut BTreeMap<(usize, Mono), usize>, key: (usize, Mono)| {
        let next = row_index.len();
        *row_index.entry(key).or_insert(next)
    };

    for (eq_no, eq) in equations.iter().enumerate() {
        for term in &eq.terms {
            if term.unknown >= num_unknowns {
                return Err(LiraError::DimensionMismatch(
                    "equation references an unknown out of range".into(),
                ));
            }
            for (bi, m) in basis.iter().enumerate() {
                let u = Poly::monomial(ring, m.clone(), rat(1))?;
                let img = term.apply(&u);
                let col = term.unknown * basis.len() + bi;
                for (mono, c) in &img.terms {
                    let row = row_of(&mut row_index, (eq_no, mono.clone()));
                    columns[col].push((row, c.clone()));
                }
            }
        }
        for (mono, c) in &eq.rhs.terms {
            let row = row_of(&mut row_index, (eq_no, mono.clone()));
            rhs_entries.push((row, c.clone()));
        }
    }

    let nrows = row_index.len();
    let mut m = QMatrix::zero(nrows, ncols);
    for (col, entries) in columns.iter().enumerate() {
        for (row, c) in entries {
            let cur = m.get(*row, col).clone();
            m.set(*row, col, cur + c.clone());
        }
    }
    let mut rhs = vec![rat(0); nrows];
    for (row, c) in rhs_entries {
        rhs[row] = &rhs[row] + &c;
    }

    let out = qsolve(&m, &[rhs])?;
    let Some(x) = &out.solutions[0] else {
        return Ok(None);
    };

    let collect = |coords: &[Rat]| -> Vec<Poly> {
        (0..num_unknowns)
            .map(|k| {
                let mut terms = BTreeMap::new();
                for (bi, mono) in basis.iter().enumerate() {
                    let c = &coords[k * basis.len() + bi];
                    if !c.is_zero() {
                        terms.insert(mono.clone(), c.clone());
                    }
                }
                Poly::from_terms(ring, terms)
            })
            .collect()
    };

    let witness = collect(x);
    // verify by exact substitution
    for eq in equations {
        let mut lhs = Poly::zero(ring);
        for term in &eq.terms {
            lhs = lhs.add(&term.apply(&witness[term.unknown]));
        }
        debug_assert_eq!(lhs, eq.rhs);
        if lhs != eq.rhs {
            return Err(LiraError::Domain(
                "internal: truncated witness failed substitution check".into(),
            ));
        }
    }

    let kernel = out.kernel.iter().map(|v| collect(v)).collect();
    Ok(Some(TruncatedSolution { witness, kernel }))
}

//! Shuffle powers of 2-cochains, traces of curvature powers, the truncated
//! Chern character and the exponential map on 2-classes.
//!
//! Conventions: the k-th shuffle power sums over (2,...,2)-shuffles with
//! increasing blocks AND increasing block leaders (each pairing counted
//! once), so f^1 = f and f^2(e1,e2,e3,e4) picks each perfect matching once.
//! With that normalization the graded product must carry divided-power
//! weights a!b!/(a+b)! for exp to be a homomorphism; see `GradedClass::mul`.

use std::sync::Arc;

use crate::cochain::{curvature, increasing_tuples, is_cocycle, Cochain, Connection};
use crate::error::{LiraError, Result};
use crate::lie::LieRinehart;
use crate::pmatrix::PMatrix;
use crate::ring::{rat, Poly, Rat};

/// All pairings of {0..2k-1} as ordered blocks (s_1 < t_1, s_2 < t_2, ...,
/// s_1 < s_2 < ...) together with the permutation sign.
fn pairings(k: usize) -> Vec<(Vec<(usize, usize)>, i32)> {
    fn rec(
        remaining: &mut Vec<usize>,
        acc: &mut Vec<(usize, usize)>,
        sign: i32,
        out: &mut Vec<(Vec<(usize, usize)>, i32)>,
    ) {
        if remaining.is_empty() {
            out.push((acc.clone(), sign));
            return;
        }
        let s = remaining.remove(0);
        for pos in 0..remaining.len() {
            let t = remaining.remove(pos);
            // sign contribution: t jumps over the `pos` smaller remaining
            // elements to sit next to s
            let extra = if pos % 2 == 0 { 1 } else { -1 };
            acc.push((s, t));
            rec(remaining, acc, sign * extra, out);
            acc.pop();
            remaining.insert(pos, t);
        }
        remaining.insert(0, s);
    }
    let mut out = Vec::new();
    let mut rem: Vec<usize> = (0..2 * k).collect();
    rec(&mut rem, &mut Vec::new(), 1, &mut out);
    out
}

/// f^k over (2,...,2)-shuffles; the result is a 2k-cochain (k = 0 gives the
/// constant 1 in degree zero).
pub fn shuffle_power(lr: &Arc<LieRinehart>, f: &Cochain, k: usize) -> Cochain {
    assert_eq!(f.p, 2);
    assert_eq!(f.rank, 1);
    let mut out = Cochain::zero(lr, 2 * k, 1);
    if k == 0 {
        out.set(vec![], vec![Poly::one(&lr.ring)]).expect("degree 0");
        return out;
    }
    if 2 * k > lr.rank {
        return out;
    }
    let pairing_list = pairings(k);
    for tuple in increasing_tuples(lr.rank, 2 * k) {
        let mut value = Poly::zero(&lr.ring);
        for (pairs, sign) in &pairing_list {
            let mut prod = Poly::one(&lr.ring);
            for &(s, t) in pairs {
                prod = prod.mul(&f.scalar(tuple[s], tuple[t]));
                if prod.is_zero() {
                    break;
                }
            }
            if prod.is_zero() {
                continue;
            }
            value = if *sign > 0 {
                value.add(&prod)
            } else {
                value.sub(&prod)
            };
        }
        out.set(tuple, vec![value]).expect("valid tuple");
    }
    out
}

/// tr(R^k) as a 2k-cochain with the same shuffle composition, trace taken
/// after the matrix product.
fn trace_power(conn: &Connection, k: usize) -> Cochain {
    let lr = &conn.lr;
    let mut out = Cochain::zero(lr, 2 * k, 1);
    if k == 0 {
        out.set(
            vec![],
            vec![Poly::constant(&lr.ring, rat(conn.rank as i64))],
        )
        .expect("degree 0");
        return out;
    }
    if 2 * k > lr.rank {
        return out;
    }
    let rform = curvature(conn);
    let pairing_list = pairings(k);
    for tuple in increasing_tuples(lr.rank, 2 * k) {
        let mut value = Poly::zero(&lr.ring);
        for (pairs, sign) in &pairing_list {
            let mut prod = PMatrix::identity(&lr.ring, conn.rank);
            for &(s, t) in pairs {
                prod = prod
                    .mul(&rform.eval_basis(tuple[s], tuple[t]))
                    .expect("square matrices");
            }
            let tr = prod.trace();
            value = if *sign > 0 {
                value.add(&tr)
            } else {
                value.sub(&tr)
            };
        }
        out.set(tuple, vec![value]).expect("valid tuple");
    }
    out
}

/// Even-graded class truncated at degree 2*kmax; component k is a 2k-cochain.
#[derive(Clone, Debug)]
pub struct GradedClass {
    pub lr: Arc<LieRinehart>,
    pub kmax: usize,
    pub components: Vec<Cochain>,
}

impl PartialEq for GradedClass {
    fn eq(&self, other: &GradedClass) -> bool {
        self.kmax == other.kmax && self.components == other.components
    }
}

fn factorial(n: usize) -> Rat {
    let mut acc = rat(1);
    for i in 2..=n {
        acc *= rat(i as i64);
    }
    acc
}

/// The standard (p, q)-shuffle wedge of rank-one cochains.
pub fn wedge(lr: &Arc<LieRinehart>, a: &Cochain, b: &Cochain) -> Cochain {
    let (p, q) = (a.p, b.p);
    let mut out = Cochain::zero(lr, p + q, 1);
    if p + q > lr.rank {
        return out;
    }
    let subsets = increasing_tuples(p + q, p);
    for tuple in increasing_tuples(lr.rank, p + q) {
        let mut value = Poly::zero(&lr.ring);
        for s in &subsets {
            let mut in_s = vec![false; p + q];
            for &pos in s {
                in_s[pos] = true;
            }
            // sign of the shuffle moving S to the front
            let inversions: usize = s.iter().enumerate().map(|(i, &pos)| pos - i).sum();
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            let left: Vec<usize> = s.iter().map(|&pos| tuple[pos]).collect();
            let right: Vec<usize> = (0..p + q)
                .filter(|&pos| !in_s[pos])
                .map(|pos| tuple[pos])
                .collect();
            let prod = a.eval_basis(&left)[0].mul(&b.eval_basis(&right)[0]);
            if prod.is_zero() {
                continue;
            }
            value = if sign > 0 {
                value.add(&prod)
            } else {
                value.sub(&prod)
            };
        }
        out.set(tuple, vec![value]).expect("valid tuple");
    }
    out
}

impl GradedClass {
    pub fn zero(lr: &Arc<LieRinehart>, kmax: usize) -> GradedClass {
        let components = (0..=kmax).map(|k| Cochain::zero(lr, 2 * k, 1)).collect();
        GradedClass {
            lr: lr.clone(),
            kmax,
            components,
        }
    }

    /// The unit class: 1 in degree 0.
    pub fn one(lr: &Arc<LieRinehart>, kmax: usize) -> GradedClass {
        let mut out = GradedClass::zero(lr, kmax);
        out.components[0]
            .set(vec![], vec![Poly::one(&lr.ring)])
            .expect("degree 0");
        out
    }

    pub fn add(&self, other: &GradedClass) -> GradedClass {
        let kmax = self.kmax.max(other.kmax);
        let mut out = GradedClass::zero(&self.lr, kmax);
        for k in 0..=kmax {
            let mut c = Cochain::zero(&self.lr, 2 * k, 1);
            if k <= self.kmax {
                c = c.add(&self.components[k]);
            }
            if k <= other.kmax {
                c = c.add(&other.components[k]);
            }
            out.components[k] = c;
        }
        out
    }

    /// Shuffle-wedge product with divided-power weights: component k of the
    /// product is sum over a+b=k of (a! b! / k!) A_a wedge B_b, matching the
    /// block-ordered shuffle powers so that exp is multiplicative.
    pub fn mul(&self, other: &GradedClass) -> GradedClass {
        let kmax = self.kmax.max(other.kmax);
        let mut out = GradedClass::zero(&self.lr, kmax);
        for k in 0..=kmax {
            let mut c = Cochain::zero(&self.lr, 2 * k, 1);
            for a in 0..=k {
                let b = k - a;
                if a > self.kmax || b > other.kmax {
                    continue;
                }
                let term = wedge(&self.lr, &self.components[a], &other.components[b]);
                let weight = factorial(a) * factorial(b) / factorial(k);
                c = c.add(&term.scale_rat(&weight));
            }
            out.components[k] = c;
        }
        out
    }

    /// Degree-2 component (the first Chern representative for trace classes).
    pub fn degree2(&self) -> &Cochain {
        &self.components[1]
    }
}

/// Components tr(R^k) for k = 0..=kmax (kmax is clamped to floor(l/2); the
/// higher components vanish by alternation).
pub fn trace_curvature_powers(conn: &Connection, kmax: usize) -> GradedClass {
    let lr = &conn.lr;
    let kmax = kmax.min(lr.rank / 2).max(0);
    let components = (0..=kmax).map(|k| trace_power(conn, k)).collect();
    GradedClass {
        lr: lr.clone(),
        kmax,
        components,
    }
}

/// Ch = sum tr(R^k)/k!, truncated.
pub fn chern_character(conn: &Connection, kmax: usize) -> GradedClass {
    let mut out = trace_curvature_powers(conn, kmax);
    for (k, c) in out.components.iter_mut().enumerate() {
        let inv = rat(1) / factorial(k);
        *c = c.scale_rat(&inv);
    }
    out
}

/// exp(f) = sum f^k/k!, truncated; requires a cocycle.
pub fn exp_class(lr: &Arc<LieRinehart>, f: &Cochain, kmax: usize) -> Result<GradedClass> {
    let (ok, w) = is_cocycle(lr, f);
    if !ok {
        let ((i, j, k), _) = w.unwrap();
        return Err(LiraError::NotACocycle((i + 1, j + 1, k + 1)));
    }
    let kmax = kmax.min(lr.rank / 2);
    let components = (0..=kmax)
        .map(|k| {
            let inv = rat(1) / factorial(k);
            shuffle_power(lr, f, k).scale_rat(&inv)
        })
        .collect();
    Ok(GradedClass {
        lr: lr.clone(),
        kmax,
        components,
    })
}

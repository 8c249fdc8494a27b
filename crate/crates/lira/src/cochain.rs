//! Connections on free modules, curvature, the Lie-Rinehart complex and its
//! differentials, cocycle/coboundary decisions, and field-case cohomology.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{LiraError, Result};
use crate::lie::{LElem, LieRinehart};
use crate::linalg::{qsolve, QMatrix};
use crate::pmatrix::PMatrix;
use crate::ring::{rat, Poly, Rat};
use crate::solve::{truncated_solve, LinEquation, LinTerm, TruncationWindow};

/// Connection on the free module W = B^r: nabla(e_i)(w) = alpha(e_i)(w)
/// entrywise + Gamma_i w.
#[derive(Clone, Debug)]
pub struct Connection {
    pub lr: Arc<LieRinehart>,
    pub rank: usize,
    pub gamma: Vec<PMatrix>,
}

impl Connection {
    pub fn new(lr: Arc<LieRinehart>, rank: usize, gamma: Vec<PMatrix>) -> Result<Connection> {
        if gamma.len() != lr.rank {
            return Err(LiraError::DimensionMismatch(
                "one Christoffel matrix per basis element required".into(),
            ));
        }
        for g in &gamma {
            if g.rows != rank || g.cols != rank {
                return Err(LiraError::DimensionMismatch(
                    "Christoffel matrices must be r x r".into(),
                ));
            }
        }
        Ok(Connection { lr, rank, gamma })
    }

    /// The anchor action on W = B (rank one, zero Christoffel data).
    pub fn anchor_on_ring(lr: &Arc<LieRinehart>) -> Connection {
        let gamma = (0..lr.rank)
            .map(|_| PMatrix::zero(&lr.ring, 1, 1))
            .collect();
        Connection {
            lr: lr.clone(),
            rank: 1,
            gamma,
        }
    }

    pub fn flat_zero(lr: &Arc<LieRinehart>, rank: usize) -> Connection {
        let gamma = (0..lr.rank)
            .map(|_| PMatrix::zero(&lr.ring, rank, rank))
            .collect();
        Connection {
            lr: lr.clone(),
            rank,
            gamma,
        }
    }

    pub fn apply_basis(&self, i: usize, w: &[Poly]) -> Vec<Poly> {
        let d = &self.lr.anchor[i];
        let mut out = self.gamma[i].mul_vec(w).expect("rank checked");
        for (o, v) in out.iter_mut().zip(w) {
            *o = o.add(&d.apply(v));
        }
        out
    }

    /// B-linear extension in the L slot.
    pub fn apply_elem(&self, u: &LElem, w: &[Poly]) -> Vec<Poly> {
        let mut out = vec![Poly::zero(&self.lr.ring); self.rank];
        for (i, a) in u.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let part = self.apply_basis(i, w);
            for (o, v) in out.iter_mut().zip(&part) {
                *o = o.add(&v.mul(a));
            }
        }
        out
    }
}

/// Alternating multilinear p-cochain with values in B^r, stored on strictly
/// increasing basis index tuples.
#[derive(Clone, Debug)]
pub struct Cochain {
    pub lr: Arc<LieRinehart>,
    pub p: usize,
    pub rank: usize,
    pub values: BTreeMap<Vec<usize>, Vec<Poly>>,
}

impl PartialEq for Cochain {
    fn eq(&self, other: &Cochain) -> bool {
        self.p == other.p && self.rank == other.rank && self.values == other.values
    }
}

pub fn increasing_tuples(l: usize, p: usize) -> Vec<Vec<usize>> {
    if p > l {
        return Vec::new();
    }
    if p == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..p).collect();
    loop {
        out.push(idx.clone());
        // next combination
        let mut i = p;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + l - p {
                break;
            }
        }
        if idx[i] == i + l - p {
            return out;
        }
        idx[i] += 1;
        for j in (i + 1)..p {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Sorts indices, returning the permutation sign; `None` on a repeat.
pub fn sort_with_sign(indices: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = indices.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((v, sign))
}

impl Cochain {
    pub fn zero(lr: &Arc<LieRinehart>, p: usize, rank: usize) -> Cochain {
        Cochain {
            lr: lr.clone(),
            p,
            rank,
            values: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, key: Vec<usize>, value: Vec<Poly>) -> Result<()> {
        if key.len() != self.p || value.len() != self.rank {
            return Err(LiraError::DimensionMismatch("cochain entry shape".into()));
        }
        if key.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LiraError::Domain(
                "cochain keys must be strictly increasing".into(),
            ));
        }
        if value.iter().all(|p| p.is_zero()) {
            self.values.remove(&key);
        } else {
            self.values.insert(key, value);
        }
        Ok(())
    }

    /// Value on basis indices in arbitrary order, via alternation.
    pub fn eval_basis(&self, indices: &[usize]) -> Vec<Poly> {
        let zero = vec![Poly::zero(&self.lr.ring); self.rank];
        let Some((sorted, sign)) = sort_with_sign(indices) else {
            return zero;
        };
        match self.values.get(&sorted) {
            Some(v) if sign > 0 => v.clone(),
            Some(v) => v.iter().map(|p| p.neg()).collect(),
            None => zero,
        }
    }

    /// Alternating multilinear extension to general elements.
    pub fn eval_elems(&self, args: &[LElem]) -> Vec<Poly> {
        assert_eq!(args.len(), self.p);
        let mut out = vec![Poly::zero(&self.lr.ring); self.rank];
        let l = self.lr.rank;
        let mut idx = vec![0usize; self.p];
        loop {
            let mut coeff = Poly::one(&self.lr.ring);
            for (slot, &i) in idx.iter().enumerate() {
                coeff = coeff.mul(&args[slot].coords[i]);
                if coeff.is_zero() {
                    break;
                }
            }
            if !coeff.is_zero() {
                let v = self.eval_basis(&idx);
                for (o, p) in out.iter_mut().zip(&v) {
                    *o = o.add(&p.mul(&coeff));
                }
            }
            // advance multi-index
            let mut k = 0;
            loop {
                if k == self.p {
                    return out;
                }
                idx[k] += 1;
                if idx[k] < l {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        let mut out = self.clone();
        for (k, v) in &other.values {
            let cur = out
                .values
                .remove(k)
                .unwrap_or_else(|| vec![Poly::zero(&self.lr.ring); self.rank]);
            let sum: Vec<Poly> = cur.iter().zip(v).map(|(a, b)| a.add(b)).collect();
            if !sum.iter().all(|p| p.is_zero()) {
                out.values.insert(k.clone(), sum);
            }
        }
        out
    }

    pub fn neg(&self) -> Cochain {
        Cochain {
            lr: self.lr.clone(),
            p: self.p,
            rank: self.rank,
            values: self
                .values
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|p| p.neg()).collect()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.add(&other.neg())
    }

    pub fn scale_rat(&self, c: &Rat) -> Cochain {
        Cochain {
            lr: self.lr.clone(),
            p: self.p,
            rank: self.rank,
            values: self
                .values
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|p| p.scale(c)).collect()))
                .filter(|(_, v): &(Vec<usize>, Vec<Poly>)| !v.iter().all(|p| p.is_zero()))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Scalar (rank-one) value on a basis pair, convenience for 2-cochains.
    pub fn scalar(&self, i: usize, j: usize) -> Poly {
        self.eval_basis(&[i, j])
            .into_iter()
            .next()
            .expect("rank >= 1")
    }
}

/// Antisymmetric End(W)-valued 2-form R(e_i, e_j) stored for i < j.
#[derive(Clone, Debug)]
pub struct CurvatureForm {
    pub lr: Arc<LieRinehart>,
    pub rank: usize,
    pub values: BTreeMap<(usize, usize), PMatrix>,
}

impl CurvatureForm {
    pub fn eval_basis(&self, i: usize, j: usize) -> PMatrix {
        if i == j {
            return PMatrix::zero(&self.lr.ring, self.rank, self.rank);
        }
        let (a, b, flip) = if i < j { (i, j, false) } else { (j, i, true) };
        let m = self
            .values
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(|| PMatrix::zero(&self.lr.ring, self.rank, self.rank));
        if flip {
            m.neg()
        } else {
            m
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|m| m.is_zero())
    }

    /// Trace as a rank-one 2-cochain.
    pub fn trace_cochain(&self) -> Cochain {
        let mut out = Cochain::zero(&self.lr, 2, 1);
        for ((i, j), m) in &self.values {
            out.set(vec![*i, *j], vec![m.trace()]).expect("valid key");
        }
        out
    }
}

/// d^p phi on a (p+1)-cochain, matching the usual d^0, d^1, and d^2
/// instances.
pub fn lr_differential(conn: &Connection, phi: &Cochain) -> Result<Cochain> {
    if phi.rank != conn.rank {
        return Err(LiraError::RankMismatch);
    }
    let lr = &conn.lr;
    let p = phi.p;
    let mut out = Cochain::zero(lr, p + 1, phi.rank);
    for tuple in increasing_tuples(lr.rank, p + 1) {
        let mut value = vec![Poly::zero(&lr.ring); phi.rank];
        // sum_k (-1)^{k+1} nabla(x_k) phi(.. x_k-hat ..)
        for (k, &ik) in tuple.iter().enumerate() {
            let rest: Vec<usize> = tuple
                .iter()
                .enumerate()
                .filter(|(a, _)| *a != k)
                .map(|(_, &b)| b)
                .collect();
            let inner = phi.eval_basis(&rest);
            let applied = conn.apply_basis(ik, &inner);
            let sign = if k % 2 == 0 { 1 } else { -1 };
            for (o, v) in value.iter_mut().zip(&applied) {
                *o = if sign > 0 { o.add(v) } else { o.sub(v) };
            }
        }
        // sum_{a<b} (-1)^{a+b} phi([x_a, x_b], .. hats ..)
        for a in 0..tuple.len() {
            for b in (a + 1)..tuple.len() {
                let br = lr.bracket_basis(tuple[a], tuple[b]);
                let rest: Vec<usize> = tuple
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != a && *k != b)
                    .map(|(_, &i)| i)
                    .collect();
                // (-1)^{(a+1)+(b+1)} with 1-based positions = (-1)^{a+b}
                let sign = if (a + b) % 2 == 0 { 1 } else { -1 };
                for (m, c) in br.coords.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let mut args = Vec::with_capacity(p);
                    args.push(m);
                    args.extend_from_slice(&rest);
                    let inner = phi.eval_basis(&args);
                    for (o, v) in value.iter_mut().zip(&inner) {
                        let t = v.mul(c);
                        *o = if sign > 0 { o.add(&t) } else { o.sub(&t) };
                    }
                }
            }
        }
        out.set(tuple, value)?;
    }
    Ok(out)
}

/// R(e_i, e_j) = alpha(e_i)(Gamma_j) - alpha(e_j)(Gamma_i) + [Gamma_i,
/// Gamma_j] - Gamma([e_i, e_j]).
pub fn curvature(conn: &Connection) -> CurvatureForm {
    let lr = &conn.lr;
    let mut values = BTreeMap::new();
    for i in 0..lr.rank {
        for j in (i + 1)..lr.rank {
            let mut m = conn.gamma[j]
                .applied(&lr.anchor[i])
                .sub(&conn.gamma[i].applied(&lr.anchor[j]))
                .add(&conn.gamma[i].commutator(&conn.gamma[j]).expect("square"));
            let br = lr.bracket_basis(i, j);
            for (k, c) in br.coords.iter().enumerate() {
                if !c.is_zero() {
                    m = m.sub(&conn.gamma[k].scale(c));
                }
            }
            if !m.is_zero() {
                values.insert((i, j), m);
            }
        }
    }
    CurvatureForm {
        lr: lr.clone(),
        rank: conn.rank,
        values,
    }
}

/// Does R(e_i, e_j) = f(e_i, e_j) * Id hold exactly?  On failure reports the
/// first violating pair (1-based) and the difference R - f*Id there.
pub fn has_curvature_type(
    conn: &Connection,
    f: &Cochain,
) -> (bool, Option<((usize, usize), PMatrix)>) {
    assert_eq!(f.p, 2);
    assert_eq!(f.rank, 1);
    let lr = &conn.lr;
    let r = curvature(conn);
    for i in 0..lr.rank {
        for j in (i + 1)..lr.rank {
            let scalar = f.scalar(i, j);
            let expected = PMatrix::identity(&lr.ring, conn.rank).scale(&scalar);
            let diff = r.eval_basis(i, j).sub(&expected);
            if !diff.is_zero() {
                return (false, Some(((i + 1, j + 1), diff)));
            }
        }
    }
    (true, None)
}

/// Checks d^2 f = 0 exactly on all basis triples for a B-valued 2-cochain;
/// on failure returns the violating triple and the nonzero ring element.
pub fn is_cocycle(lr: &Arc<LieRinehart>, f: &Cochain) -> (bool, Option<((usize, usize, usize), Poly)>) {
    assert_eq!(f.p, 2);
    assert_eq!(f.rank, 1);
    let conn = Connection::anchor_on_ring(lr);
    let df = lr_differential(&conn, f).expect("rank one");
    for (key, v) in &df.values {
        if !v[0].is_zero() {
            return (false, Some(((key[0], key[1], key[2]), v[0].clone())));
        }
    }
    (true, None)
}

/// Solves d^1 rho = f for a B-valued 1-cochain supported on the window.
pub fn coboundary_solve(
    lr: &Arc<LieRinehart>,
    f: &Cochain,
    window: TruncationWindow,
) -> Result<Option<Cochain>> {
    let (ok, witness) = is_cocycle(lr, f);
    if !ok {
        let ((i, j, k), _) = witness.unwrap();
        return Err(LiraError::NotACocycle((i + 1, j + 1, k + 1)));
    }
    let ring = &lr.ring;
    let mut equations = Vec::new();
    for i in 0..lr.rank {
        for j in (i + 1)..lr.rank {
            let mut terms = vec![
                LinTerm::deriv(j, Poly::one(ring), lr.anchor[i].clone()),
                LinTerm::deriv(i, Poly::one(ring).neg(), lr.anchor[j].clone()),
            ];
            let br = lr.bracket_basis(i, j);
            for (k, c) in br.coords.iter().enumerate() {
                if !c.is_zero() {
                    terms.push(LinTerm::mul(k, c.neg()));
                }
            }
            equations.push(LinEquation {
                terms,
                rhs: f.scalar(i, j),
            });
        }
    }
    let Some(sol) = truncated_solve(ring, lr.rank, &equations, window)? else {
        return Ok(None);
    };
    let mut rho = Cochain::zero(lr, 1, 1);
    for (i, p) in sol.witness.iter().enumerate() {
        rho.set(vec![i], vec![p.clone()])?;
    }
    // re-verify through the differential
    let conn = Connection::anchor_on_ring(lr);
    debug_assert_eq!(lr_differential(&conn, &rho)?, *f);
    Ok(Some(rho))
}

/// Outcome of the Z^1 computation.
#[derive(Clone, Debug)]
pub struct Z1Result {
    /// Window-supported basis of solutions of d^1 h = 0 (exact and complete
    /// in the field case, window-relative over a polynomial base).
    pub basis: Vec<Cochain>,
}

pub fn z1_solve(lr: &Arc<LieRinehart>, window: TruncationWindow) -> Result<Z1Result> {
    let ring = &lr.ring;
    let mut equations = Vec::new();
    for i in 0..lr.rank {
        for j in (i + 1)..lr.rank {
            let mut terms = vec![
                LinTerm::deriv(j, Poly::one(ring), lr.anchor[i].clone()),
                LinTerm::deriv(i, Poly::one(ring).neg(), lr.anchor[j].clone()),
            ];
            let br = lr.bracket_basis(i, j);
            for (k, c) in br.coords.iter().enumerate() {
                if !c.is_zero() {
                    terms.push(LinTerm::mul(k, c.neg()));
                }
            }
            equations.push(LinEquation {
                terms,
                rhs: Poly::zero(ring),
            });
        }
    }
    let sol = truncated_solve(ring, lr.rank, &equations, window)?
        .expect("homogeneous system always has the zero witness");
    let basis = sol
        .kernel
        .iter()
        .map(|vecs| {
            let mut h = Cochain::zero(lr, 1, 1);
            for (i, p) in vecs.iter().enumerate() {
                h.set(vec![i], vec![p.clone()]).expect("shape");
            }
            h
        })
        .collect();
    Ok(Z1Result { basis })
}

/// Exact decision "is h in Z^1(L, B)".
pub fn is_in_z1(lr: &Arc<LieRinehart>, h: &Cochain) -> bool {
    let conn = Connection::anchor_on_ring(lr);
    lr_differential(&conn, h).map(|d| d.is_zero()).unwrap_or(false)
}

/// Chevalley-Eilenberg cohomology dimensions for B = Q and a flat connection.
pub fn field_case_cohomology(conn: &Connection) -> Result<Vec<usize>> {
    let lr = &conn.lr;
    if !lr.ring.is_field() {
        return Err(LiraError::NotFieldCase);
    }
    if !curvature(conn).is_zero() {
        return Err(LiraError::NotFlat);
    }
    let l = lr.rank;
    let r = conn.rank;
    // rank of d^p for p = 0..l (d^l maps into 0)
    let mut ranks = vec![0usize; l + 1];
    for p in 0..l {
        ranks[p] = differential_matrix_rank(conn, p)?;
    }
    let binom = |n: usize, k: usize| -> usize {
        if k > n {
            return 0;
        }
        let mut acc = 1usize;
        for i in 0..k {
            acc = acc * (n - i) / (i + 1);
        }
        acc
    };
    let mut dims = Vec::with_capacity(l + 1);
    for p in 0..=l {
        let dim_cp = binom(l, p) * r;
        let rank_dp = if p < l { ranks[p] } else { 0 };
        let rank_prev = if p > 0 { ranks[p - 1] } else { 0 };
        dims.push(dim_cp - rank_dp - rank_prev);
    }
    Ok(dims)
}

fn differential_matrix_rank(conn: &Connection, p: usize) -> Result<usize> {
    let lr = &conn.lr;
    let l = lr.rank;
    let r = conn.rank;
    let dom = increasing_tuples(l, p);
    let cod = increasing_tuples(l, p + 1);
    let rows = cod.len() * r;
    let cols = dom.len() * r;
    let mut m = QMatrix::zero(rows, cols);
    for (ti, tuple) in dom.iter().enumerate() {
        for comp in 0..r {
            let mut basis_cochain = Cochain::zero(lr, p, r);
            let mut v = vec![Poly::zero(&lr.ring); r];
            v[comp] = Poly::one(&lr.ring);
            basis_cochain.set(tuple.clone(), v)?;
            let image = lr_differential(conn, &basis_cochain)?;
            for (si, target) in cod.iter().enumerate() {
                let value = image.eval_basis(target);
                for (c, poly) in value.iter().enumerate() {
                    let q = poly
                        .constant_value()
                        .ok_or(LiraError::NotFieldCase)?;
                    if q != rat(0) {
                        m.set(si * r + c, ti * r + comp, q);
                    }
                }
            }
        }
    }
    Ok(qsolve(&m, &[])?.rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::parse::poly_parse;

    #[test]
    fn d0_is_connection_application() {
        let lr = Arc::new(fixtures::weyl2());
        let conn = fixtures::weyl2_type_one_connection(&lr);
        let w = vec![poly_parse(&lr.ring, "x*y").unwrap()];
        let mut w0 = Cochain::zero(&lr, 0, 1);
        w0.set(vec![], w.clone()).unwrap();
        let d0 = lr_differential(&conn, &w0).unwrap();
        for i in 0..2 {
            assert_eq!(d0.eval_basis(&[i]), conn.apply_basis(i, &w));
        }
    }

    #[test]
    fn weyl2_curvature_is_one() {
        let lr = Arc::new(fixtures::weyl2());
        let conn = fixtures::weyl2_type_one_connection(&lr);
        let r = curvature(&conn);
        assert_eq!(*r.eval_basis(0, 1).get(0, 0), Poly::one(&lr.ring));
    }

    #[test]
    fn flat_abelian_zero_curvature() {
        let lr = Arc::new(fixtures::weyl2());
        let conn = Connection::flat_zero(&lr, 2);
        assert!(curvature(&conn).is_zero());
    }

    #[test]
    fn d1_of_d0_equals_curvature_action() {
        use rand::Rng;
        use rand::SeedableRng;
        let lr = Arc::new(fixtures::weyl2());
        let conn = fixtures::weyl2_type_one_connection(&lr);
        let rform = curvature(&conn);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let x2 = poly_parse(&lr.ring, "x^2").unwrap();
        let y1 = poly_parse(&lr.ring, "y").unwrap();
        for _ in 0..10 {
            let w = vec![x2
                .scale(&rat(rng.gen_range(-3..4)))
                .add(&y1.scale(&rat(rng.gen_range(-3..4))))
                .add(&Poly::constant(&lr.ring, rat(rng.gen_range(-3..4))))];
            let mut w0 = Cochain::zero(&lr, 0, 1);
            w0.set(vec![], w.clone()).unwrap();
            let dd = lr_differential(&conn, &lr_differential(&conn, &w0).unwrap()).unwrap();
            for i in 0..2 {
                for j in (i + 1)..2 {
                    let lhs = dd.eval_basis(&[i, j]);
                    let rhs = rform.eval_basis(i, j).mul_vec(&w).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn heis3_d1_on_one_cochain() {
        // d^1 phi(e1, e2) = -phi(e3) for the Heisenberg algebra over Q
        let lr = Arc::new(fixtures::heis3());
        let conn = Connection::anchor_on_ring(&lr);
        for comp in 0..3 {
            let mut phi = Cochain::zero(&lr, 1, 1);
            phi.set(vec![comp], vec![Poly::one(&lr.ring)]).unwrap();
            let d = lr_differential(&conn, &phi).unwrap();
            let expected = if comp == 2 {
                Poly::one(&lr.ring).neg()
            } else {
                Poly::zero(&lr.ring)
            };
            assert_eq!(d.eval_basis(&[0, 1])[0], expected);
            assert!(d.eval_basis(&[0, 2])[0].is_zero());
            assert!(d.eval_basis(&[1, 2])[0].is_zero());
        }
    }

    #[test]
    fn d_squared_vanishes_for_flat_connection() {
        use rand::Rng;
        use rand::SeedableRng;
        let lr = Arc::new(fixtures::heis3());
        let conn = Connection::anchor_on_ring(&lr);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for p in 0..=1usize {
            for _ in 0..10 {
                let mut phi = Cochain::zero(&lr, p, 1);
                for tuple in increasing_tuples(3, p) {
                    phi.set(
                        tuple,
                        vec![Poly::constant(&lr.ring, rat(rng.gen_range(-5..6)))],
                    )
                    .unwrap();
                }
                let dd = lr_differential(&conn, &lr_differential(&conn, &phi).unwrap()).unwrap();
                assert!(dd.is_zero());
            }
        }
    }

    #[test]
    fn non_cocycle_witness() {
        // B = Q[x,y,z], abelian with d/dx_i basis; f(d1,d2) = z is not a
        // cocycle: d^2 f(d1,d2,d3) = d/dz (z) = 1
        let lr = Arc::new(fixtures::abelian_poly3());
        let mut f = Cochain::zero(&lr, 2, 1);
        f.set(vec![0, 1], vec![poly_parse(&lr.ring, "z").unwrap()])
            .unwrap();
        let (ok, w) = is_cocycle(&lr, &f);
        assert!(!ok);
        let ((i, j, k), defect) = w.unwrap();
        assert_eq!((i, j, k), (0, 1, 2));
        assert_eq!(defect, Poly::one(&lr.ring));
    }

    #[test]
    fn heis3_cocycle_e1e3() {
        let lr = Arc::new(fixtures::heis3());
        let mut f = Cochain::zero(&lr, 2, 1);
        f.set(vec![0, 2], vec![Poly::one(&lr.ring)]).unwrap();
        let (ok, _) = is_cocycle(&lr, &f);
        assert!(ok);
    }

    #[test]
    fn coboundary_weyl2_constant() {
        let lr = Arc::new(fixtures::weyl2());
        let mut f = Cochain::zero(&lr, 2, 1);
        f.set(vec![0, 1], vec![Poly::one(&lr.ring)]).unwrap();
        let rho = coboundary_solve(&lr, &f, TruncationWindow::new(1).unwrap())
            .unwrap()
            .expect("solvable on the affine plane");
        let conn = Connection::anchor_on_ring(&lr);
        assert_eq!(lr_differential(&conn, &rho).unwrap(), f);
    }

    #[test]
    fn coboundary_torus_constant_fails_all_windows() {
        let lr = Arc::new(fixtures::torus2());
        let mut f = Cochain::zero(&lr, 2, 1);
        f.set(vec![0, 1], vec![Poly::one(&lr.ring)]).unwrap();
        for d in 0..4 {
            let out = coboundary_solve(&lr, &f, TruncationWindow::new(d).unwrap()).unwrap();
            assert!(out.is_none());
        }
    }

    #[test]
    fn coboundary_torus_x_succeeds() {
        let lr = Arc::new(fixtures::torus2());
        let mut f = Cochain::zero(&lr, 2, 1);
        f.set(vec![0, 1], vec![poly_parse(&lr.ring, "x").unwrap()])
            .unwrap();
        let rho = coboundary_solve(&lr, &f, TruncationWindow::new(1).unwrap())
            .unwrap()
            .expect("x d/dx integrates x");
        let conn = Connection::anchor_on_ring(&lr);
        assert_eq!(lr_differential(&conn, &rho).unwrap(), f);
    }

    #[test]
    fn z1_heisenberg() {
        // Z^1 = { phi : phi(e3) = 0 }, dimension 2
        let lr = Arc::new(fixtures::heis3());
        let out = z1_solve(&lr, TruncationWindow::new(0).unwrap()).unwrap();
        assert_eq!(out.basis.len(), 2);
        for h in &out.basis {
            assert!(is_in_z1(&lr, h));
            assert!(h.eval_basis(&[2])[0].is_zero());
        }
    }

    #[test]
    fn z1_membership_weyl2() {
        let lr = Arc::new(fixtures::weyl2());
        let mut h = Cochain::zero(&lr, 1, 1);
        h.set(vec![0], vec![poly_parse(&lr.ring, "y").unwrap()])
            .unwrap();
        assert!(!is_in_z1(&lr, &h));
    }

    #[test]
    fn field_case_dims() {
        let heis = Arc::new(fixtures::heis3());
        let dims = field_case_cohomology(&Connection::anchor_on_ring(&heis)).unwrap();
        assert_eq!(dims, vec![1, 2, 2, 1]);

        let ab2 = Arc::new(fixtures::abelian_q(2));
        let dims = field_case_cohomology(&Connection::anchor_on_ring(&ab2)).unwrap();
        assert_eq!(dims, vec![1, 2, 1]);

        let sl2 = Arc::new(fixtures::sl2());
        let dims = field_case_cohomology(&Connection::anchor_on_ring(&sl2)).unwrap();
        assert_eq!(dims, vec![1, 0, 0, 1]);
    }

    #[test]
    fn euler_characteristic_identity() {
        let lr = Arc::new(fixtures::heis3());
        let dims = field_case_cohomology(&Connection::anchor_on_ring(&lr)).unwrap();
        let chi: i64 = dims
            .iter()
            .enumerate()
            .map(|(p, d)| if p % 2 == 0 { *d as i64 } else { -(*d as i64) })
            .sum();
        // sum (-1)^p C(3, p) = 0
        assert_eq!(chi, 0);
    }

    #[test]
    fn field_case_requires_field_and_flat() {
        let lr = Arc::new(fixtures::weyl2());
        let err = field_case_cohomology(&Connection::anchor_on_ring(&lr));
        assert!(matches!(err, Err(LiraError::NotFieldCase)));
    }
}

//! First-order jet modules, the generalized Atiyah sequence, and the
//! Cartan–Eilenberg chain boundary with its curvature-insertion identity.
//!
//! Sign conventions (fixed by direct expansion, see the tests):
//!   d_p(x_1 ^ ... ^ x_p (x) e) =
//!       sum_i (-1)^{i+1} (... omit x_i ...) (x) D(x_i (x) e)
//!     + sum_{i<j} (-1)^{i+j+1} [x_i,x_j] ^ (... omit i,j ...) (x) e
//! with D(x (x) e) = grad(x)(e).  With K_D(x ^ y (x) e) = ([D_x, D_y] -
//! D_{[x,y]})(e) this gives d_1 d_2 = -K_D and, in general,
//!   d_{p-1} d_p (c) = sum_{i<j} (-1)^{i+j} (... omit i,j ...) (x)
//!                      K_D(x_i ^ x_j (x) e).

use std::sync::Arc;

use crate::cochain::{curvature, increasing_tuples, sort_with_sign, Cochain, Connection};
use crate::error::{LiraError, Result};
use crate::lie::LieRinehart;
use crate::linalg::{qsolve, QMatrix};
use crate::pmatrix::PMatrix;
use crate::ring::{rat, Poly};

/// Chains in Lambda^p L (x) E share the sparse increasing-key representation
/// of cochains; `rank` is the rank of E.
pub type CEChain = Cochain;

/// The (B,B)-bimodule Bz + L: rank 1 + l over B with coordinate 0 the z
/// coefficient.  The left action is multiplication; the right action twists
/// the z coordinate by the anchor: (bz + x) * a = (ba + alpha(x)(a))z + ax.
pub struct BBModule {
    pub lr: Arc<LieRinehart>,
}

impl BBModule {
    pub fn new(lr: &Arc<LieRinehart>) -> BBModule {
        BBModule { lr: lr.clone() }
    }

    pub fn carrier_rank(&self) -> usize {
        1 + self.lr.rank
    }

    pub fn left_act(&self, a: &Poly, w: &[Poly]) -> Vec<Poly> {
        w.iter().map(|c| a.mul(c)).collect()
    }

    pub fn right_act(&self, w: &[Poly], a: &Poly) -> Vec<Poly> {
        let mut out: Vec<Poly> = w.iter().map(|c| c.mul(a)).collect();
        for i in 0..self.lr.rank {
            let anchored = self.lr.anchor[i].apply(a).mul(&w[1 + i]);
            out[0] = out[0].add(&anchored);
        }
        out
    }
}

/// Element of J^1_L(E) = E + (L (x) E) for free E of rank r: `e` has length
/// r, `t` has length l*r with slot i*r + j holding the coefficient of
/// e_i (x) eps_j.
#[derive(Clone, Debug, PartialEq)]
pub struct JetElem {
    pub e: Vec<Poly>,
    pub t: Vec<Poly>,
}

pub struct JetModule {
    pub lr: Arc<LieRinehart>,
    pub rank: usize,
}

impl JetModule {
    pub fn new(lr: &Arc<LieRinehart>, rank: usize) -> JetModule {
        JetModule {
            lr: lr.clone(),
            rank,
        }
    }

    pub fn zero(&self) -> JetElem {
        JetElem {
            e: vec![Poly::zero(&self.lr.ring); self.rank],
            t: vec![Poly::zero(&self.lr.ring); self.lr.rank * self.rank],
        }
    }

    pub fn add(&self, a: &JetElem, b: &JetElem) -> JetElem {
        JetElem {
            e: a.e.iter().zip(&b.e).map(|(x, y)| x.add(y)).collect(),
            t: a.t.iter().zip(&b.t).map(|(x, y)| x.add(y)).collect(),
        }
    }

    pub fn sub(&self, a: &JetElem, b: &JetElem) -> JetElem {
        JetElem {
            e: a.e.iter().zip(&b.e).map(|(x, y)| x.sub(y)).collect(),
            t: a.t.iter().zip(&b.t).map(|(x, y)| x.sub(y)).collect(),
        }
    }

    pub fn left_act(&self, b: &Poly, w: &JetElem) -> JetElem {
        JetElem {
            e: w.e.iter().map(|c| b.mul(c)).collect(),
            t: w.t.iter().map(|c| b.mul(c)).collect(),
        }
    }

    /// (e, x (x) f) * a = (ea + alpha(x)(a) f, x (x) (fa)).
    pub fn right_act(&self, w: &JetElem, a: &Poly) -> JetElem {
        let r = self.rank;
        let mut e: Vec<Poly> = w.e.iter().map(|c| c.mul(a)).collect();
        for i in 0..self.lr.rank {
            let da = self.lr.anchor[i].apply(a);
            for j in 0..r {
                e[j] = e[j].add(&w.t[i * r + j].mul(&da));
            }
        }
        JetElem {
            e,
            t: w.t.iter().map(|c| c.mul(a)).collect(),
        }
    }

    /// Inclusion i: E -> J.
    pub fn include(&self, e: &[Poly]) -> JetElem {
        assert_eq!(e.len(), self.rank);
        let mut out = self.zero();
        out.e = e.to_vec();
        out
    }

    /// Projection j: J -> L (x) E.
    pub fn project(&self, w: &JetElem) -> Vec<Poly> {
        w.t.clone()
    }
}

/// A section of the jet projection determined by Christoffel data `d`:
/// s(e_i (x) f) = (grad(e_i)(f), e_i (x) f).  In E-slot coordinates the
/// plain left and the twisted right B-action coincide on L (x) E while their
/// images under s differ by the anchor twist, so no section can be linear on
/// both sides at once; s is additive, Q-linear, right-B-linear for the
/// twisted action, and B-linear in the L slot, which is the linearity the
/// Atiyah correspondence uses.
pub struct Splitting {
    pub lr: Arc<LieRinehart>,
    pub rank: usize,
    pub d: Vec<PMatrix>,
}

impl Splitting {
    pub fn module(&self) -> JetModule {
        JetModule::new(&self.lr, self.rank)
    }

    /// Apply s to tensor coordinates t (slot i*r + j is the E-slot
    /// coefficient of e_i (x) eps_j): the E component is
    /// sum_i grad(e_i)(f_i) with f_i the i-th E-slot block, so s is additive,
    /// Q-linear, and right-B-linear for the twisted action; see the module
    /// docs for why two-sided B-linearity cannot hold in coordinates.
    pub fn apply(&self, t: &[Poly]) -> JetElem {
        let r = self.rank;
        let l = self.lr.rank;
        assert_eq!(t.len(), l * r);
        let ring = &self.lr.ring;
        let mut e = vec![Poly::zero(ring); r];
        for i in 0..l {
            let fi = &t[i * r..(i + 1) * r];
            for jp in 0..r {
                let mut v = self.lr.anchor[i].apply(&fi[jp]);
                for j in 0..r {
                    v = v.add(&self.d[i].get(jp, j).mul(&fi[j]));
                }
                e[jp] = e[jp].add(&v);
            }
        }
        JetElem { e, t: t.to_vec() }
    }
}

/// The splitting s(x (x) e) = (grad(x)(e), x (x) e) determined by a
/// connection.
pub fn jet_split(conn: &Connection) -> Splitting {
    Splitting {
        lr: conn.lr.clone(),
        rank: conn.rank,
        d: conn.gamma.clone(),
    }
}

/// Recover the connection from a splitting.
pub fn jet_unsplit(s: &Splitting) -> Result<Connection> {
    Connection::new(s.lr.clone(), s.rank, s.d.clone())
}

/// Curvature insertion K_D(e_a ^ e_b (x) v) = R(e_a, e_b) v.
pub fn kd_apply(conn: &Connection, a: usize, b: usize, v: &[Poly]) -> Vec<Poly> {
    let r = curvature(conn).eval_basis(a, b);
    r.mul_vec(v).expect("rank match")
}

fn accumulate(out: &mut CEChain, key: &[usize], sign: i32, v: &[Poly]) {
    let Some((sorted, s2)) = sort_with_sign(key) else {
        return;
    };
    let sign = sign * s2;
    let old = out.eval_basis(&sorted);
    let add: Vec<Poly> = old
        .iter()
        .zip(v)
        .map(|(o, x)| {
            if sign > 0 {
                o.add(x)
            } else {
                o.sub(x)
            }
        })
        .collect();
    out.set(sorted, add).expect("sorted key");
}

/// The Cartan–Eilenberg boundary d_p, p >= 1.
pub fn ce_boundary(conn: &Connection, c: &CEChain) -> Result<CEChain> {
    let lr = &conn.lr;
    if c.p == 0 {
        return Err(LiraError::Domain("boundary needs degree >= 1".into()));
    }
    if c.rank != conn.rank {
        return Err(LiraError::RankMismatch);
    }
    let mut out = CEChain::zero(lr, c.p - 1, c.rank);
    for (tuple, v) in c.values.iter() {
        // derivative terms: (-1)^{i+1} with 1-based i = (-1)^idx 0-based
        for (idx, &bi) in tuple.iter().enumerate() {
            let mut rest = tuple.clone();
            rest.remove(idx);
            let dv = conn.apply_basis(bi, v);
            let sign = if idx % 2 == 0 { 1 } else { -1 };
            accumulate(&mut out, &rest, sign, &dv);
        }
        // bracket terms: (-1)^{i+j+1} with 1-based i<j = -(-1)^{a+b} 0-based
        for a in 0..tuple.len() {
            for b in (a + 1)..tuple.len() {
                let br = lr.bracket_basis(tuple[a], tuple[b]);
                let mut rest: Vec<usize> = Vec::with_capacity(tuple.len() - 1);
                rest.push(0); // placeholder for the bracket slot
                for (idx, &x) in tuple.iter().enumerate() {
                    if idx != a && idx != b {
                        rest.push(x);
                    }
                }
                let base_sign = if (a + b) % 2 == 0 { -1 } else { 1 };
                for (m, cm) in br.coords.iter().enumerate() {
                    if cm.is_zero() {
                        continue;
                    }
                    rest[0] = m;
                    let scaled: Vec<Poly> = v.iter().map(|x| cm.mul(x)).collect();
                    accumulate(&mut out, &rest, base_sign, &scaled);
                }
            }
        }
    }
    Ok(out)
}

/// The curvature-insertion expression for d_{p-1} d_p, computed directly:
/// sum_{i<j} (-1)^{i+j} (... omit i,j ...) (x) K_D(x_i ^ x_j (x) e).
pub fn curvature_insertion(conn: &Connection, c: &CEChain) -> Result<CEChain> {
    let lr = &conn.lr;
    if c.p < 2 {
        return Err(LiraError::Domain("insertion needs degree >= 2".into()));
    }
    let mut out = CEChain::zero(lr, c.p - 2, c.rank);
    for (tuple, v) in c.values.iter() {
        for a in 0..tuple.len() {
            for b in (a + 1)..tuple.len() {
                let mut rest = Vec::with_capacity(tuple.len() - 2);
                for (idx, &x) in tuple.iter().enumerate() {
                    if idx != a && idx != b {
                        rest.push(x);
                    }
                }
                // (-1)^{i+j} with 1-based i,j = (-1)^{a+b} 0-based
                let sign = if (a + b) % 2 == 0 { 1 } else { -1 };
                let kv = kd_apply(conn, tuple[a], tuple[b], v);
                accumulate(&mut out, &rest, sign, &kv);
            }
        }
    }
    Ok(out)
}

/// Homology dimensions of the Cartan–Eilenberg complex in the field case.
pub fn field_case_homology(conn: &Connection) -> Result<Vec<usize>> {
    let lr = &conn.lr;
    if !lr.ring.is_field() {
        return Err(LiraError::NotFieldCase);
    }
    if !curvature(conn).is_zero() {
        return Err(LiraError::NotFlat);
    }
    let l = lr.rank;
    let r = conn.rank;
    // rank of d_p for p = 1..l
    let mut ranks = vec![0usize; l + 1];
    for p in 1..=l {
        ranks[p] = boundary_matrix_rank(conn, p)?;
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
        let rank_into = if p < l { ranks[p + 1] } else { 0 };
        dims.push(dim_cp - ranks[p] - rank_into);
    }
    Ok(dims)
}

fn boundary_matrix_rank(conn: &Connection, p: usize) -> Result<usize> {
    let lr = &conn.lr;
    let l = lr.rank;
    let r = conn.rank;
    let dom = increasing_tuples(l, p);
    let cod = increasing_tuples(l, p - 1);
    let mut m = QMatrix::zero(cod.len() * r, dom.len() * r);
    for (ti, tuple) in dom.iter().enumerate() {
        for comp in 0..r {
            let mut basis_chain = CEChain::zero(lr, p, r);
            let mut v = vec![Poly::zero(&lr.ring); r];
            v[comp] = Poly::one(&lr.ring);
            basis_chain.set(tuple.clone(), v)?;
            let image = ce_boundary(conn, &basis_chain)?;
            for (si, target) in cod.iter().enumerate() {
                for (c, poly) in image.eval_basis(target).iter().enumerate() {
                    let q = poly.constant_value().ok_or(LiraError::NotFieldCase)?;
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
    use rand::Rng;
    use rand::SeedableRng;

    type Rng8 = rand_chacha::ChaCha8Rng;

    fn rand_poly(ring: &Arc<crate::ring::BaseRing>, rng: &mut Rng8) -> Poly {
        let mut p = Poly::constant(ring, rat(rng.gen_range(-2..3)));
        for _ in 0..2 {
            let v = rng.gen_range(0..ring.nvars().max(1));
            if ring.nvars() > 0 {
                let c = rat(rng.gen_range(-2..3));
                p = p.add(&Poly::var(ring, v).scale(&c));
            }
        }
        p
    }

    #[test]
    fn bb_module_axiom() {
        let lr = Arc::new(fixtures::weyl2());
        let m = BBModule::new(&lr);
        let ring = &lr.ring;
        let mut rng = Rng8::seed_from_u64(5);
        for _ in 0..10 {
            let a = rand_poly(ring, &mut rng);
            let b = rand_poly(ring, &mut rng);
            let w: Vec<Poly> = (0..m.carrier_rank())
                .map(|_| rand_poly(ring, &mut rng))
                .collect();
            let lhs = m.left_act(&a, &m.right_act(&w, &b));
            let rhs = m.right_act(&m.left_act(&a, &w), &b);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn jet_bimodule_axiom_and_maps() {
        let lr = Arc::new(fixtures::weyl2());
        let m = JetModule::new(&lr, 2);
        let ring = &lr.ring;
        let mut rng = Rng8::seed_from_u64(7);
        for _ in 0..10 {
            let a = rand_poly(ring, &mut rng);
            let b = rand_poly(ring, &mut rng);
            let w = JetElem {
                e: (0..2).map(|_| rand_poly(ring, &mut rng)).collect(),
                t: (0..4).map(|_| rand_poly(ring, &mut rng)).collect(),
            };
            let lhs = m.left_act(&a, &m.right_act(&w, &b));
            let rhs = m.right_act(&m.left_act(&a, &w), &b);
            assert_eq!(lhs, rhs);
            // j . i = 0 and i, j are two-sided linear
            let e: Vec<Poly> = (0..2).map(|_| rand_poly(ring, &mut rng)).collect();
            let inc = m.include(&e);
            assert!(m.project(&inc).iter().all(|p| p.is_zero()));
            let ia = m.right_act(&inc, &a);
            let ea: Vec<Poly> = e.iter().map(|c| c.mul(&a)).collect();
            assert_eq!(ia, m.include(&ea));
            assert_eq!(m.project(&m.right_act(&w, &a)), {
                let ta: Vec<Poly> = m.project(&w).iter().map(|c| c.mul(&a)).collect();
                ta
            });
        }
    }

    #[test]
    fn split_round_trip_and_right_linearity() {
        let lr = Arc::new(fixtures::weyl2());
        let ring = &lr.ring;
        let mut rng = Rng8::seed_from_u64(11);
        for _ in 0..10 {
            let r = 2usize;
            let gamma: Vec<PMatrix> = (0..2)
                .map(|_| {
                    let mut g = PMatrix::zero(ring, r, r);
                    for a in 0..r {
                        for b in 0..r {
                            g.set(a, b, rand_poly(ring, &mut rng));
                        }
                    }
                    g
                })
                .collect();
            let conn = Connection::new(lr.clone(), r, gamma).unwrap();
            let s = jet_split(&conn);
            let back = jet_unsplit(&s).unwrap();
            assert_eq!(back.gamma, conn.gamma);
            // j . s = id and right-linearity of s
            let m = s.module();
            let t: Vec<Poly> = (0..2 * r).map(|_| rand_poly(ring, &mut rng)).collect();
            let st = s.apply(&t);
            assert_eq!(m.project(&st), t);
            let a = rand_poly(ring, &mut rng);
            let ta = m.project(&m.right_act(&st, &a));
            let lhs = s.apply(&ta);
            let rhs = m.right_act(&st, &a);
            assert_eq!(m.sub(&lhs, &rhs), m.zero());
        }
    }

    #[test]
    fn split_zero_christoffel_is_anchor() {
        let lr = Arc::new(fixtures::weyl2());
        let conn = Connection::flat_zero(&lr, 1);
        let s = jet_split(&conn);
        // s(e_i (x) w) = (0, e_i (x) w) for constant basis sections
        let t = vec![Poly::one(&lr.ring), Poly::zero(&lr.ring)];
        let st = s.apply(&t);
        assert!(st.e[0].is_zero());
        assert_eq!(st.t, t);
    }

    #[test]
    fn d1_is_connection_application() {
        let lr = Arc::new(fixtures::weyl2());
        let conn = fixtures::weyl2_type_one_connection(&lr);
        let w = vec![poly_parse(&lr.ring, "x*y + 3").unwrap()];
        for i in 0..2 {
            let mut c = CEChain::zero(&lr, 1, 1);
            c.set(vec![i], w.clone()).unwrap();
            let d = ce_boundary(&conn, &c).unwrap();
            assert_eq!(d.eval_basis(&[]), conn.apply_basis(i, &w));
        }
    }

    #[test]
    fn flat_connection_gives_complex() {
        let mut rng = Rng8::seed_from_u64(13);
        // sl2 with zero Christoffel data exercises the bracket-bracket
        // (Jacobi) cancellation; heis3 with the 3-dimensional standard
        // representation exercises the derivative-bracket cross terms.
        let sl2 = Arc::new(fixtures::sl2());
        let sl2_conn = Connection::flat_zero(&sl2, 2);
        let heis = Arc::new(fixtures::heis3());
        let ring = &heis.ring;
        // D1 = E_{12}, D2 = E_{23}, D3 = [D1, D2] = E_{13}, [Di, D3] = 0
        let mut g1 = PMatrix::zero(ring, 3, 3);
        g1.set(0, 1, Poly::one(ring));
        let mut g2 = PMatrix::zero(ring, 3, 3);
        g2.set(1, 2, Poly::one(ring));
        let mut g3 = PMatrix::zero(ring, 3, 3);
        g3.set(0, 2, Poly::one(ring));
        let heis_conn = Connection::new(heis.clone(), 3, vec![g1, g2, g3]).unwrap();
        assert!(curvature(&heis_conn).is_zero());
        for conn in [sl2_conn, heis_conn] {
            let lr = &conn.lr;
            for _ in 0..5 {
                for p in 2..=3usize {
                    let mut c = CEChain::zero(lr, p, conn.rank);
                    for t in increasing_tuples(3, p) {
                        let v: Vec<Poly> = (0..conn.rank)
                            .map(|_| Poly::constant(&lr.ring, rat(rng.gen_range(-3..4))))
                            .collect();
                        c.set(t, v).unwrap();
                    }
                    let dd =
                        ce_boundary(&conn, &ce_boundary(&conn, &c).unwrap()).unwrap();
                    assert!(dd.is_zero());
                }
            }
        }
    }

    #[test]
    fn weyl2_d_squared_is_minus_curvature() {
        let lr = Arc::new(fixtures::weyl2());
        let conn = fixtures::weyl2_type_one_connection(&lr);
        let w = vec![poly_parse(&lr.ring, "x^2*y + x + 5").unwrap()];
        let mut c = CEChain::zero(&lr, 2, 1);
        c.set(vec![0, 1], w.clone()).unwrap();
        let dd = ce_boundary(&conn, &ce_boundary(&conn, &c).unwrap()).unwrap();
        // K_D = f = 1 here, so d1 d2 (e1 ^ e2 (x) w) = -w
        assert_eq!(dd.eval_basis(&[])[0], w[0].neg());
    }

    #[test]
    fn d_squared_equals_curvature_insertion() {
        let mut rng = Rng8::seed_from_u64(17);
        // nonabelian over a field (bracket terms) and abelian over Q[x,y,z]
        // (derivation terms), both with curved connections
        let heis = Arc::new(fixtures::heis3());
        let poly3 = Arc::new(fixtures::abelian_poly3());
        for lr in [heis, poly3] {
            let ring = &lr.ring;
            for _ in 0..5 {
                let r = 2usize;
                let gamma: Vec<PMatrix> = (0..3)
                    .map(|_| {
                        let mut g = PMatrix::zero(ring, r, r);
                        for a in 0..r {
                            for b in 0..r {
                                g.set(a, b, rand_poly(ring, &mut rng));
                            }
                        }
                        g
                    })
                    .collect();
                let conn = Connection::new(lr.clone(), r, gamma).unwrap();
                for p in 2..=3usize {
                    let mut c = CEChain::zero(&lr, p, r);
                    for t in increasing_tuples(3, p) {
                        let v: Vec<Poly> =
                            (0..r).map(|_| rand_poly(ring, &mut rng)).collect();
                        c.set(t, v).unwrap();
                    }
                    let dd =
                        ce_boundary(&conn, &ce_boundary(&conn, &c).unwrap()).unwrap();
                    let ins = curvature_insertion(&conn, &c).unwrap();
                    assert_eq!(dd, ins);
                }
            }
        }
    }

    #[test]
    fn field_case_homology_dims() {
        let heis = Arc::new(fixtures::heis3());
        let conn = Connection::flat_zero(&heis, 1);
        assert_eq!(field_case_homology(&conn).unwrap(), vec![1, 2, 2, 1]);

        let sl2 = Arc::new(fixtures::sl2());
        let conn = Connection::flat_zero(&sl2, 1);
        assert_eq!(field_case_homology(&conn).unwrap(), vec![1, 0, 0, 1]);

        let ab = Arc::new(fixtures::abelian_q(2));
        let conn = Connection::flat_zero(&ab, 1);
        assert_eq!(field_case_homology(&conn).unwrap(), vec![1, 2, 1]);
    }

    #[test]
    fn homology_rejects_bad_inputs() {
        let weyl = Arc::new(fixtures::weyl2());
        let conn = Connection::flat_zero(&weyl, 1);
        assert!(matches!(
            field_case_homology(&conn),
            Err(LiraError::NotFieldCase)
        ));

        let heis = Arc::new(fixtures::heis3());
        let ring = &heis.ring;
        // Gamma = (0, 0, 1): R(e1, e2) = -Gamma_3 = -1, not flat
        let gamma = vec![
            PMatrix::zero(ring, 1, 1),
            PMatrix::zero(ring, 1, 1),
            PMatrix::identity(ring, 1),
        ];
        let conn = Connection::new(heis.clone(), 1, gamma).unwrap();
        assert!(matches!(
            field_case_homology(&conn),
            Err(LiraError::NotFlat)
        ));
    }
}

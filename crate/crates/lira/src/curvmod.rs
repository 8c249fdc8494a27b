//! Connections of curvature type f, the idempotent curvature formula,
//! tensor products of connections, and the windowed V^{k,i} carrier with its
//! module-law auditor.

use std::sync::Arc;

use crate::cochain::{curvature, Cochain, Connection};
pub use crate::cochain::has_curvature_type;
use crate::env::{env_mul, EnvElem, TwistedAlgebra};
use crate::error::{LiraError, Result};
use crate::pmatrix::PMatrix;
use crate::ring::{BaseRing, Derivation, Poly};

/// Projective module presented by an idempotent phi, with the connection
/// nabla(x)(w) = phi * x(w) on the column space.
#[derive(Clone, Debug)]
pub struct IdempotentModule {
    pub ring: Arc<BaseRing>,
    pub m: usize,
    pub phi: PMatrix,
}

impl IdempotentModule {
    pub fn new(ring: Arc<BaseRing>, phi: PMatrix) -> Result<IdempotentModule> {
        if phi.rows != phi.cols {
            return Err(LiraError::DimensionMismatch("idempotent must be square".into()));
        }
        if phi.mul(&phi)? != phi {
            return Err(LiraError::NotIdempotent);
        }
        Ok(IdempotentModule {
            ring,
            m: phi.rows,
            phi,
        })
    }
}

/// Outcome of the curvature-formula check R(x, y) = [x(phi), y(phi)] on the
/// image of phi.
#[derive(Clone, Debug)]
pub struct IdempotentReport {
    /// Curvature of phi-compose-derivative, as a matrix composed with phi.
    pub curvature_side: PMatrix,
    /// [x(phi), y(phi)] composed with phi.
    pub commutator_side: PMatrix,
    pub agree: bool,
}

/// Both sides act on columns of phi; they are compared as exact matrix*phi
/// identities.  The curvature side uses R(x,y) = phi x(phi) y(phi) -
/// phi y(phi) x(phi) on the image (the derivative terms cancel there).
pub fn idempotent_curvature_check(
    im: &IdempotentModule,
    x: &Derivation,
    y: &Derivation,
) -> Result<IdempotentReport> {
    let phi = &im.phi;
    let xphi = phi.applied(x);
    let yphi = phi.applied(y);
    let curv = phi
        .mul(&xphi)?
        .mul(&yphi)?
        .sub(&phi.mul(&yphi)?.mul(&xphi)?);
    let comm = xphi.commutator(&yphi)?;
    let lhs = curv.mul(phi)?;
    let rhs = comm.mul(phi)?;
    Ok(IdempotentReport {
        agree: lhs == rhs,
        curvature_side: lhs,
        commutator_side: rhs,
    })
}

/// Gamma_i = Gamma_i^(1) (x) Id + Id (x) Gamma_i^(2); curvature types add.
pub fn tensor_connection(c1: &Connection, c2: &Connection) -> Result<Connection> {
    if !Arc::ptr_eq(&c1.lr, &c2.lr) {
        return Err(LiraError::AlgebraMismatch);
    }
    let ring = &c1.lr.ring;
    let id1 = PMatrix::identity(ring, c1.rank);
    let id2 = PMatrix::identity(ring, c2.rank);
    let gamma = c1
        .gamma
        .iter()
        .zip(&c2.gamma)
        .map(|(g1, g2)| g1.kron(&id2).add(&id1.kron(g2)))
        .collect();
    Connection::new(c1.lr.clone(), c1.rank * c2.rank, gamma)
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// V^{k,i}: the B-span of PBW monomials with k <= |P| < k+i, carrying the
/// multiply-then-truncate left action of the generators.
#[derive(Clone, Debug)]
pub struct VModule {
    pub ta: TwistedAlgebra,
    pub k: u32,
    pub i: u32,
    /// Exponent vectors in graded-lex order (ascending degree, descending
    /// lexicographic within a degree).
    pub basis: Vec<Vec<u32>>,
    /// One r x r Poly matrix per generator.
    pub action: Vec<PMatrix>,
}

fn window_basis(l: usize, k: u32, i: u32) -> Vec<Vec<u32>> {
    fn vectors_of_degree(l: usize, degree: u32) -> Vec<Vec<u32>> {
        fn rec(l: usize, degree: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if acc.len() + 1 == l {
                acc.push(degree);
                out.push(acc.clone());
                acc.pop();
                return;
            }
            for d in (0..=degree).rev() {
                acc.push(d);
                rec(l, degree - d, acc, out);
                acc.pop();
            }
        }
        let mut out = Vec::new();
        if l == 0 {
            return out;
        }
        rec(l, degree, &mut Vec::new(), &mut out);
        out
    }
    let mut out = Vec::new();
    for d in k..(k + i) {
        out.extend(vectors_of_degree(l, d));
    }
    out
}

/// Truncates an enveloping-algebra element to window coordinates.
pub fn window_coords(v: &VModule, u: &EnvElem) -> Vec<Poly> {
    let ring = &v.ta.lr.ring;
    let mut out = vec![Poly::zero(ring); v.basis.len()];
    for (p, b) in &u.terms {
        let deg: u32 = p.iter().sum();
        if deg < v.k || deg >= v.k + v.i {
            continue;
        }
        let pos = v
            .basis
            .iter()
            .position(|q| q == p)
            .expect("window basis is complete for its degrees");
        out[pos] = out[pos].add(b);
    }
    out
}

pub fn vmodule_build(ta: &TwistedAlgebra, k: u32, i: u32) -> Result<VModule> {
    if k < 1 || i < 1 {
        return Err(LiraError::Domain("vmodule needs k, i >= 1".into()));
    }
    let l = ta.lr.rank;
    let ring = &ta.lr.ring;
    let basis = window_basis(l, k, i);
    let expected = binom(l + (k + i) as usize - 1, l) - binom(l + k as usize - 1, l);
    debug_assert_eq!(basis.len(), expected);
    let mut v = VModule {
        ta: ta.clone(),
        k,
        i,
        basis: basis.clone(),
        action: Vec::new(),
    };
    let r = basis.len();
    for j in 0..l {
        let mut a = PMatrix::zero(ring, r, r);
        let ej = EnvElem::gen(ta, j);
        for (col, p) in basis.iter().enumerate() {
            let image = env_mul(ta, &ej, &EnvElem::monomial(ta, p.clone(), Poly::one(ring)))?;
            let coords = window_coords(&v, &image);
            for (row, c) in coords.into_iter().enumerate() {
                if !c.is_zero() {
                    a.set(row, col, c);
                }
            }
        }
        v.action.push(a);
    }
    Ok(v)
}

/// The audit of the V^{k,i} module laws; the report itself (pass or fail)
/// is the deliverable.
#[derive(Clone, Debug)]
pub struct VModuleReport {
    pub rank: usize,
    pub law_passed: bool,
    /// Violating generator pair (j, i), 1-based with j > i, and the operator
    /// defect on the carrier.
    pub law_violation: Option<((usize, usize), PMatrix)>,
    pub semilinear_passed: bool,
    /// Only present when the law audit passed: does the extracted
    /// connection have curvature type f?
    pub curvature_type_f: Option<bool>,
    /// tr R of the extracted connection as a 2-cochain.
    pub trace: Option<Cochain>,
}

pub fn vmodule_audit(v: &VModule) -> Result<VModuleReport> {
    let ta = &v.ta;
    let lr = &ta.lr;
    let ring = &lr.ring;
    let r = v.basis.len();

    // semilinearity: e_j (b e^P) = b (e_j e^P) + alpha(e_j)(b) e^P after
    // truncation, checked on each variable
    let mut semilinear_passed = true;
    'outer: for j in 0..lr.rank {
        for var in 0..ring.nvars() {
            let b = Poly::var(ring, var);
            let ej = EnvElem::gen(ta, j);
            for p in &v.basis {
                let pb = EnvElem::monomial(ta, p.clone(), b.clone());
                let lhs = window_coords(v, &env_mul(ta, &ej, &pb)?);
                let pe = EnvElem::monomial(ta, p.clone(), Poly::one(ring));
                let mut rhs: Vec<Poly> = window_coords(v, &env_mul(ta, &ej, &pe)?)
                    .into_iter()
                    .map(|c| c.mul(&b))
                    .collect();
                let extra = window_coords(v, &EnvElem::monomial(ta, p.clone(), lr.anchor[j].apply(&b)));
                for (o, e) in rhs.iter_mut().zip(&extra) {
                    *o = o.add(e);
                }
                if lhs != rhs {
                    semilinear_passed = false;
                    break 'outer;
                }
            }
        }
    }

    // operator law on generator pairs: with op_j = alpha_j + A_j,
    // [op_j, op_i] = op([e_j, e_i]) + f(e_j, e_i) Id reduces to
    // alpha_j(A_i) - alpha_i(A_j) + [A_j, A_i] = sum c_m A_m + f(e_j,e_i) Id
    let mut law_passed = true;
    let mut law_violation = None;
    'pairs: for j in 0..lr.rank {
        for i in 0..j {
            let aj = &v.action[j];
            let ai = &v.action[i];
            let mut defect = ai
                .applied(&lr.anchor[j])
                .sub(&aj.applied(&lr.anchor[i]))
                .add(&aj.commutator(ai)?);
            let br = lr.bracket_basis(j, i);
            for (m, c) in br.coords.iter().enumerate() {
                if !c.is_zero() {
                    defect = defect.sub(&v.action[m].scale(c));
                }
            }
            let twist = ta.f.eval_basis(&[j, i]).remove(0);
            if !twist.is_zero() {
                defect = defect.sub(&PMatrix::identity(ring, r).scale(&twist));
            }
            if !defect.is_zero() {
                law_passed = false;
                law_violation = Some(((j + 1, i + 1), defect));
                break 'pairs;
            }
        }
    }

    let (curvature_type_f, trace) = if law_passed && semilinear_passed {
        let conn = Connection::new(lr.clone(), r, v.action.clone())?;
        let (is_type_f, _) = has_curvature_type(&conn, &ta.f);
        let rform = curvature(&conn);
        (Some(is_type_f), Some(rform.trace_cochain()))
    } else {
        (None, None)
    };

    Ok(VModuleReport {
        rank: r,
        law_passed,
        law_violation,
        semilinear_passed,
        curvature_type_f,
        trace,
    })
}

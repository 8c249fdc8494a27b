//! The named example algebras used across the test suite and shipped as
//! workspace files.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cochain::Connection;
use crate::lie::LieRinehart;
use crate::parse::poly_parse;
use crate::pmatrix::PMatrix;
use crate::ring::{rat, BaseRing, Derivation, Poly};

/// B = Q, abelian of the given rank (ab2 is `abelian_q(2)`).
pub fn abelian_q(rank: usize) -> LieRinehart {
    let ring = BaseRing::rationals();
    let anchor = vec![Derivation::zero(&ring); rank];
    LieRinehart::abelian(ring, anchor).expect("abelian over Q")
}

/// The Weyl-twist carrier: B = Q, abelian, l = 2.
pub fn ab2() -> LieRinehart {
    abelian_q(2)
}

fn partial_basis(ring: &Arc<BaseRing>) -> Vec<Derivation> {
    let n = ring.nvars();
    (0..n)
        .map(|i| {
            let mut coeffs = vec![Poly::zero(ring); n];
            coeffs[i] = Poly::one(ring);
            Derivation::new(ring, coeffs).expect("partial derivative")
        })
        .collect()
}

/// B = Q[x, y] with the coordinate derivations as basis, abelian.
pub fn weyl2() -> LieRinehart {
    let ring = BaseRing::new(vec!["x".into(), "y".into()], vec![false, false])
        .expect("plain polynomial ring");
    let anchor = partial_basis(&ring);
    LieRinehart::abelian(ring, anchor).expect("free abelian")
}

/// The Heisenberg algebra over Q: [e1, e2] = e3, anchor zero.
pub fn heis3() -> LieRinehart {
    let ring = BaseRing::rationals();
    let anchor = vec![Derivation::zero(&ring); 3];
    let mut structure = BTreeMap::new();
    let mut e3 = vec![Poly::zero(&ring); 3];
    e3[2] = Poly::one(&ring);
    structure.insert((0, 1), e3);
    LieRinehart::new(ring, 3, anchor, structure).expect("heis3 satisfies Jacobi")
}

/// sl2 over Q in the basis (e, f, h): [e,f] = h, [e,h] = -2e, [f,h] = 2f.
pub fn sl2() -> LieRinehart {
    let ring = BaseRing::rationals();
    let anchor = vec![Derivation::zero(&ring); 3];
    let mut structure = BTreeMap::new();
    let mut h = vec![Poly::zero(&ring); 3];
    h[2] = Poly::one(&ring);
    structure.insert((0, 1), h);
    let mut m2e = vec![Poly::zero(&ring); 3];
    m2e[0] = Poly::constant(&ring, rat(-2));
    structure.insert((0, 2), m2e);
    let mut p2f = vec![Poly::zero(&ring); 3];
    p2f[1] = Poly::constant(&ring, rat(2));
    structure.insert((1, 2), p2f);
    LieRinehart::new(ring, 3, anchor, structure).expect("sl2 satisfies Jacobi")
}

/// B = Q[x^{+-1}, y^{+-1}] with the Euler fields x d/dx, y d/dy, abelian.
pub fn torus2() -> LieRinehart {
    let ring =
        BaseRing::new(vec!["x".into(), "y".into()], vec![true, true]).expect("Laurent ring");
    let anchor = (0..2)
        .map(|i| {
            let mut coeffs = vec![Poly::zero(&ring); 2];
            coeffs[i] = Poly::var(&ring, i);
            Derivation::new(&ring, coeffs).expect("Euler field")
        })
        .collect();
    LieRinehart::abelian(ring, anchor).expect("free abelian")
}

/// B = Q[x1..x4] with the coordinate derivations as basis, abelian.
pub fn ab4poly() -> LieRinehart {
    let names = (1..=4).map(|i| format!("x{i}")).collect();
    let ring = BaseRing::new(names, vec![false; 4]).expect("plain polynomial ring");
    let anchor = partial_basis(&ring);
    LieRinehart::abelian(ring, anchor).expect("free abelian")
}

/// B = Q[x, y, z] with the coordinate derivations as basis, abelian.
pub fn abelian_poly3() -> LieRinehart {
    let ring = BaseRing::new(
        vec!["x".into(), "y".into(), "z".into()],
        vec![false; 3],
    )
    .expect("plain polynomial ring");
    let anchor = partial_basis(&ring);
    LieRinehart::abelian(ring, anchor).expect("free abelian")
}

/// The coordinate ring of the unit sphere, Q[x,y,z]/(x^2 + y^2 + z^2 - 1).
pub fn sphere_ring() -> Arc<BaseRing> {
    let plain = BaseRing::new(
        vec!["x".into(), "y".into(), "z".into()],
        vec![false; 3],
    )
    .expect("carrier ring");
    let relation = poly_parse(&plain, "x^2 + y^2 + z^2 - 1").expect("sphere relation");
    plain.with_relation(&relation).expect("sphere ring")
}

/// Tangential derivations delta_i = d/dx_i - x_i * E, E the Euler field.
/// Each preserves the sphere ideal.
pub fn sphere_derivations(ring: &Arc<BaseRing>) -> Vec<Derivation> {
    let vars: Vec<Poly> = (0..3).map(|i| Poly::var(ring, i)).collect();
    (0..3)
        .map(|i| {
            let coeffs: Vec<Poly> = (0..3)
                .map(|j| {
                    let mut c = vars[i].mul(&vars[j]).neg();
                    if i == j {
                        c = c.add(&Poly::one(ring));
                    }
                    c
                })
                .collect();
            Derivation::new(ring, coeffs).expect("tangent to the sphere")
        })
        .collect()
}

/// phi = I3 - v v^T with v = (x, y, z); idempotent modulo the sphere relation.
pub fn sphere_idempotent(ring: &Arc<BaseRing>) -> PMatrix {
    let mut phi = PMatrix::identity(ring, 3);
    let vars: Vec<Poly> = (0..3).map(|i| Poly::var(ring, i)).collect();
    for i in 0..3 {
        for j in 0..3 {
            let e = phi.get(i, j).sub(&vars[i].mul(&vars[j]));
            phi.set(i, j, e);
        }
    }
    phi
}

/// Tangent Lie-Rinehart algebra of the sphere: basis the delta_i, with
/// [e_i, e_j] = x_i e_j - x_j e_i.
pub fn sphere() -> LieRinehart {
    let ring = sphere_ring();
    let anchor = sphere_derivations(&ring);
    let vars: Vec<Poly> = (0..3).map(|i| Poly::var(&ring, i)).collect();
    let mut structure = BTreeMap::new();
    for i in 0..3 {
        for j in (i + 1)..3 {
            let mut v = vec![Poly::zero(&ring); 3];
            v[j] = vars[i].clone();
            v[i] = vars[j].neg();
            structure.insert((i, j), v);
        }
    }
    LieRinehart::new(ring, 3, anchor, structure).expect("sphere tangent algebra")
}

/// The rank-one connection on weyl2 with Gamma = (0, x); its curvature is
/// the constant 2-form 1.
pub fn weyl2_type_one_connection(lr: &Arc<LieRinehart>) -> Connection {
    let ring = &lr.ring;
    let g1 = PMatrix::zero(ring, 1, 1);
    let mut g2 = PMatrix::zero(ring, 1, 1);
    g2.set(0, 0, Poly::var(ring, 0));
    Connection::new(lr.clone(), 1, vec![g1, g2]).expect("rank-one connection")
}

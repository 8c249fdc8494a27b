//! The twisted universal enveloping algebra U(B, L, f): rewriting to PBW
//! normal form, multiplication, the confluence audit behind the PBW theorem,
//! symbols, theta_h morphisms and deformation hom-sets.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::cochain::{coboundary_solve, is_cocycle, lr_differential, z1_solve, Cochain, Connection, Z1Result};
use crate::error::{LiraError, Result};
use crate::lie::LieRinehart;
use crate::ring::{Poly, Rat};
use crate::solve::TruncationWindow;

/// U(B, L, f).  Construction checks the cocycle condition; use `candidate`
/// to study rewriting for arbitrary (possibly non-confluent) twists.
#[derive(Clone, Debug)]
pub struct TwistedAlgebra {
    pub lr: Arc<LieRinehart>,
    pub f: Cochain,
}

impl TwistedAlgebra {
    pub fn new(lr: Arc<LieRinehart>, f: Cochain) -> Result<TwistedAlgebra> {
        if f.p != 2 || f.rank != 1 {
            return Err(LiraError::DimensionMismatch(
                "twist must be a B-valued 2-cochain".into(),
            ));
        }
        let (ok, w) = is_cocycle(&lr, &f);
        if !ok {
            let ((i, j, k), _) = w.unwrap();
            return Err(LiraError::NotACocycle((i + 1, j + 1, k + 1)));
        }
        Ok(TwistedAlgebra { lr, f })
    }

    /// No cocycle check: rewriting is still well-defined and terminating,
    /// only confluence may fail.  Used by the confluence audit.
    pub fn candidate(lr: Arc<LieRinehart>, f: Cochain) -> TwistedAlgebra {
        TwistedAlgebra { lr, f }
    }

    pub fn untwisted(lr: Arc<LieRinehart>) -> TwistedAlgebra {
        let f = Cochain::zero(&lr, 2, 1);
        TwistedAlgebra { lr, f }
    }
}

/// Letter of a word in the free algebra over B and the generators.
#[derive(Clone, Debug)]
pub enum Letter {
    Coef(Poly),
    Gen(usize),
}

/// Element of U(B, L, f) in PBW normal form: left Poly coefficients against
/// increasing generator monomials e_1^{p_1} ... e_l^{p_l}.
#[derive(Clone, Debug)]
pub struct EnvElem {
    pub l: usize,
    pub terms: BTreeMap<Vec<u32>, Poly>,
}

impl PartialEq for EnvElem {
    fn eq(&self, other: &EnvElem) -> bool {
        self.l == other.l && self.terms == other.terms
    }
}

impl EnvElem {
    pub fn zero(ta: &TwistedAlgebra) -> EnvElem {
        EnvElem {
            l: ta.lr.rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_poly(ta: &TwistedAlgebra, b: Poly) -> EnvElem {
        let mut out = EnvElem::zero(ta);
        out.accumulate(vec![0; ta.lr.rank], b);
        out
    }

    pub fn one(ta: &TwistedAlgebra) -> EnvElem {
        EnvElem::from_poly(ta, Poly::one(&ta.lr.ring))
    }

    pub fn gen(ta: &TwistedAlgebra, i: usize) -> EnvElem {
        let mut p = vec![0u32; ta.lr.rank];
        p[i] = 1;
        let mut out = EnvElem::zero(ta);
        out.accumulate(p, Poly::one(&ta.lr.ring));
        out
    }

    pub fn monomial(ta: &TwistedAlgebra, exps: Vec<u32>, b: Poly) -> EnvElem {
        assert_eq!(exps.len(), ta.lr.rank);
        let mut out = EnvElem::zero(ta);
        out.accumulate(exps, b);
        out
    }

    fn accumulate(&mut self, key: Vec<u32>, b: Poly) {
        if b.is_zero() {
            return;
        }
        match self.terms.remove(&key) {
            Some(prev) => {
                let sum = prev.add(&b);
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
            None => {
                self.terms.insert(key, b);
            }
        }
    }

    pub fn add(&self, other: &EnvElem) -> EnvElem {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.accumulate(k.clone(), v.clone());
        }
        out
    }

    pub fn neg(&self) -> EnvElem {
        EnvElem {
            l: self.l,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &EnvElem) -> EnvElem {
        self.add(&other.neg())
    }

    pub fn scale_poly(&self, b: &Poly) -> EnvElem {
        let mut out = EnvElem {
            l: self.l,
            terms: BTreeMap::new(),
        };
        for (k, v) in &self.terms {
            out.accumulate(k.clone(), v.mul(b));
        }
        out
    }

    pub fn scale_rat(&self, c: &Rat) -> EnvElem {
        EnvElem {
            l: self.l,
            terms: self
                .terms
                .iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(k, v)| (k.clone(), v.scale(c)))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Ascending filtration degree: the largest total generator degree.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|p| p.iter().sum()).max()
    }
}

fn mono_label(exps: &[u32]) -> String {
    let mut parts = Vec::new();
    for (i, &p) in exps.iter().enumerate() {
        if p == 1 {
            parts.push(format!("e{}", i + 1));
        } else if p > 1 {
            parts.push(format!("e{}^{}", i + 1, p));
        }
    }
    parts.join("*")
}

impl fmt::Display for EnvElem {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(out, "0");
        }
        // descending by (degree, exponent vector) for a stable, readable order
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        let mut first = true;
        for key in keys {
            let coeff = &self.terms[key];
            if !first {
                write!(out, " + ")?;
            }
            first = false;
            let label = mono_label(key);
            let cs = coeff.to_string();
            if label.is_empty() {
                write!(out, "{cs}")?;
            } else if coeff.is_one() {
                write!(out, "{label}")?;
            } else if cs.contains(" + ") || cs.contains(" - ") {
                write!(out, "({cs})*{label}")?;
            } else {
                write!(out, "{cs}*{label}")?;
            }
        }
        Ok(())
    }
}

/// Which reducible position the rewriting engine picks next; the two must
/// agree exactly when f is a cocycle (confluence).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

fn find_redex(w: &[Letter], strategy: Strategy) -> Option<usize> {
    let reducible = |p: usize| match (&w[p], &w[p + 1]) {
        (Letter::Coef(_), Letter::Coef(_)) => true,
        (Letter::Gen(_), Letter::Coef(_)) => true,
        (Letter::Gen(j), Letter::Gen(i)) => j > i,
        (Letter::Coef(_), Letter::Gen(_)) => false,
    };
    match strategy {
        Strategy::Leftmost => (0..w.len().saturating_sub(1)).find(|&p| reducible(p)),
        Strategy::Rightmost => (0..w.len().saturating_sub(1)).rev().find(|&p| reducible(p)),
    }
}

/// Rewrites a word to PBW normal form with (R1) e_i b -> b e_i + alpha(e_i)(b)
/// and (R2) e_j e_i -> e_i e_j + [e_j, e_i] + f(e_j, e_i) for j > i.
pub fn env_normal_form_with(ta: &TwistedAlgebra, word: &[Letter], strategy: Strategy) -> EnvElem {
    let ring = &ta.lr.ring;
    let mut out = EnvElem::zero(ta);
    let mut stack: Vec<Vec<Letter>> = vec![word.to_vec()];
    while let Some(w) = stack.pop() {
        // drop words with an explicit zero coefficient
        if w.iter().any(|c| matches!(c, Letter::Coef(b) if b.is_zero())) {
            continue;
        }
        let Some(p) = find_redex(&w, strategy) else {
            // terminal: coefficients first, generators weakly increasing
            let mut coeff = Poly::one(ring);
            let mut exps = vec![0u32; ta.lr.rank];
            for letter in &w {
                match letter {
                    Letter::Coef(b) => coeff = coeff.mul(b),
                    Letter::Gen(i) => exps[*i] += 1,
                }
            }
            out.accumulate(exps, coeff);
            continue;
        };
        let prefix = &w[..p];
        let suffix = &w[p + 2..];
        let glue = |mid: Vec<Letter>| {
            let mut nw = Vec::with_capacity(w.len() + mid.len());
            nw.extend_from_slice(prefix);
            nw.extend(mid);
            nw.extend_from_slice(suffix);
            nw
        };
        match (&w[p], &w[p + 1]) {
            (Letter::Coef(a), Letter::Coef(b)) => {
                stack.push(glue(vec![Letter::Coef(a.mul(b))]));
            }
            (Letter::Gen(i), Letter::Coef(b)) => {
                stack.push(glue(vec![Letter::Coef(b.clone()), Letter::Gen(*i)]));
                let db = ta.lr.anchor[*i].apply(b);
                if !db.is_zero() {
                    stack.push(glue(vec![Letter::Coef(db)]));
                }
            }
            (Letter::Gen(j), Letter::Gen(i)) => {
                stack.push(glue(vec![Letter::Gen(*i), Letter::Gen(*j)]));
                let br = ta.lr.bracket_basis(*j, *i);
                for (m, c) in br.coords.iter().enumerate() {
                    if !c.is_zero() {
                        stack.push(glue(vec![Letter::Coef(c.clone()), Letter::Gen(m)]));
                    }
                }
                let twist = ta.f.eval_basis(&[*j, *i]).remove(0);
                if !twist.is_zero() {
                    stack.push(glue(vec![Letter::Coef(twist)]));
                }
            }
            (Letter::Coef(_), Letter::Gen(_)) => unreachable!("not a redex"),
        }
    }
    out
}

pub fn env_normal_form(ta: &TwistedAlgebra, word: &[Letter]) -> EnvElem {
    env_normal_form_with(ta, word, Strategy::Leftmost)
}

fn monomial_word(exps: &[u32], coeff: &Poly) -> Vec<Letter> {
    let mut w = vec![Letter::Coef(coeff.clone())];
    for (i, &p) in exps.iter().enumerate() {
        for _ in 0..p {
            w.push(Letter::Gen(i));
        }
    }
    w
}

pub fn env_mul(ta: &TwistedAlgebra, u: &EnvElem, v: &EnvElem) -> Result<EnvElem> {
    if u.l != ta.lr.rank || v.l != ta.lr.rank {
        return Err(LiraError::AlgebraMismatch);
    }
    let mut out = EnvElem::zero(ta);
    for (pu, bu) in &u.terms {
        for (pv, bv) in &v.terms {
            let mut w = monomial_word(pu, bu);
            w.extend(monomial_word(pv, bv));
            out = out.add(&env_normal_form(ta, &w));
        }
    }
    Ok(out)
}

/// Report of the PBW confluence/associativity audit.
#[derive(Clone, Debug)]
pub struct ConfluenceReport {
    pub passed: bool,
    /// First violating generator triple (1-based, descending) and the
    /// discrepancy element, when the audit fails.
    pub violation: Option<((usize, usize, usize), EnvElem)>,
    /// Normal-form monomial counts per degree 0..=N.
    pub monomial_counts: Vec<usize>,
    pub total_dim: usize,
}

/// All exponent vectors of length `l` with total degree `degree`.
pub fn exponent_vectors(l: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(l: usize, degree: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if acc.len() + 1 == l {
            acc.push(degree);
            out.push(acc.clone());
            acc.pop();
            return;
        }
        for d in 0..=degree {
            acc.push(d);
            rec(l, degree - d, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if l == 0 {
        if degree == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(l, degree, &mut Vec::new(), &mut out);
    out
}

/// Audits the diamond property of the rewriting system: generator triples,
/// generator pairs against coefficient letters, strategy independence, and
/// associativity on PBW monomial triples of total degree <= N.  For a
/// cocycle twist over a valid algebra all checks pass and the monomial
/// counts reproduce dim Sym^k.
pub fn pbw_confluence_check(ta: &TwistedAlgebra, n: u32) -> Result<ConfluenceReport> {
    if n < 3 {
        return Err(LiraError::Domain("confluence audit needs N >= 3".into()));
    }
    let l = ta.lr.rank;
    let ring = &ta.lr.ring;
    let fail = |triple: (usize, usize, usize), diff: EnvElem| ConfluenceReport {
        passed: false,
        violation: Some((triple, diff)),
        monomial_counts: Vec::new(),
        total_dim: 0,
    };

    // generator triples k > j > i as the critical pairs of R2 with itself
    for k in 0..l {
        for j in 0..k {
            for i in 0..j {
                let ek = EnvElem::gen(ta, k);
                let ej = EnvElem::gen(ta, j);
                let ei = EnvElem::gen(ta, i);
                let lhs = env_mul(ta, &env_mul(ta, &ek, &ej)?, &ei)?;
                let rhs = env_mul(ta, &ek, &env_mul(ta, &ej, &ei)?)?;
                let diff = lhs.sub(&rhs);
                if !diff.is_zero() {
                    return Ok(fail((k + 1, j + 1, i + 1), diff));
                }
            }
        }
    }
    // R2 against R1: (e_j e_i) b vs e_j (e_i b) on each variable
    for j in 0..l {
        for i in 0..j {
            for v in 0..ring.nvars() {
                let b = EnvElem::from_poly(ta, Poly::var(ring, v));
                let ej = EnvElem::gen(ta, j);
                let ei = EnvElem::gen(ta, i);
                let lhs = env_mul(ta, &env_mul(ta, &ej, &ei)?, &b)?;
                let rhs = env_mul(ta, &ej, &env_mul(ta, &ei, &b)?)?;
                let diff = lhs.sub(&rhs);
                if !diff.is_zero() {
                    return Ok(fail((j + 1, i + 1, 0), diff));
                }
            }
        }
    }
    // strategy independence on all generator pair words
    for a in 0..l {
        for b in 0..l {
            let w = vec![Letter::Gen(a), Letter::Gen(b)];
            let left = env_normal_form_with(ta, &w, Strategy::Leftmost);
            let right = env_normal_form_with(ta, &w, Strategy::Rightmost);
            if left != right {
                return Ok(fail((a + 1, b + 1, 0), left.sub(&right)));
            }
        }
    }
    // associativity on PBW monomial triples with total degree <= N
    let mut by_degree: Vec<Vec<Vec<u32>>> = Vec::new();
    for d in 0..=n {
        by_degree.push(exponent_vectors(l, d));
    }
    for da in 1..=n {
        for db in 1..=(n - da) {
            for dc in 1..=(n - da - db).max(0) {
                if da + db + dc > n {
                    continue;
                }
                for pa in &by_degree[da as usize] {
                    for pb in &by_degree[db as usize] {
                        for pc in &by_degree[dc as usize] {
                            let a = EnvElem::monomial(ta, pa.clone(), Poly::one(ring));
                            let b = EnvElem::monomial(ta, pb.clone(), Poly::one(ring));
                            let c = EnvElem::monomial(ta, pc.clone(), Poly::one(ring));
                            let lhs = env_mul(ta, &env_mul(ta, &a, &b)?, &c)?;
                            let rhs = env_mul(ta, &a, &env_mul(ta, &b, &c)?)?;
                            let diff = lhs.sub(&rhs);
                            if !diff.is_zero() {
                                return Ok(fail((da as usize, db as usize, dc as usize), diff));
                            }
                        }
                    }
                }
            }
        }
    }
    let monomial_counts: Vec<usize> = (0..=n)
        .map(|d| exponent_vectors(l, d).len())
        .collect();
    let total_dim = monomial_counts.iter().sum();
    Ok(ConfluenceReport {
        passed: true,
        violation: None,
        monomial_counts,
        total_dim,
    })
}

/// Graded polynomial in l commuting symbols s_1..s_l with Poly coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SymElem {
    pub l: usize,
    pub terms: BTreeMap<Vec<u32>, Poly>,
}

impl SymElem {
    pub fn mul(&self, other: &SymElem) -> SymElem {
        let mut terms: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
        for (p, b) in &self.terms {
            for (q, c) in &other.terms {
                let key: Vec<u32> = p.iter().zip(q).map(|(a, b)| a + b).collect();
                let prod = b.mul(c);
                if prod.is_zero() {
                    continue;
                }
                match terms.remove(&key) {
                    Some(prev) => {
                        let s = prev.add(&prod);
                        if !s.is_zero() {
                            terms.insert(key, s);
                        }
                    }
                    None => {
                        terms.insert(key, prod);
                    }
                }
            }
        }
        SymElem { l: self.l, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for SymElem {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(out, "0");
        }
        let mut first = true;
        for (key, coeff) in self.terms.iter().rev() {
            if !first {
                write!(out, " + ")?;
            }
            first = false;
            let mut parts = Vec::new();
            for (i, &p) in key.iter().enumerate() {
                if p == 1 {
                    parts.push(format!("s{}", i + 1));
                } else if p > 1 {
                    parts.push(format!("s{}^{}", i + 1, p));
                }
            }
            let label = parts.join("*");
            let cs = coeff.to_string();
            if label.is_empty() {
                write!(out, "{cs}")?;
            } else if coeff.is_one() {
                write!(out, "{label}")?;
            } else if cs.contains(" + ") || cs.contains(" - ") {
                write!(out, "({cs})*{label}")?;
            } else {
                write!(out, "{cs}*{label}")?;
            }
        }
        Ok(())
    }
}

/// Leading symbol in Gr(U) = Sym*_B(L).
pub fn symbol(u: &EnvElem) -> Result<SymElem> {
    let deg = u.degree().ok_or(LiraError::ZeroElement)?;
    let terms = u
        .terms
        .iter()
        .filter(|(p, _)| p.iter().sum::<u32>() == deg)
        .map(|(p, b)| (p.clone(), b.clone()))
        .collect();
    Ok(SymElem { l: u.l, terms })
}

/// theta_h: U(B,L,f) -> U(B,L,g), e_i -> e_i + h(e_i), requiring
/// d^1 h = f - g.  The relation audit re-verifies the images of the
/// defining relations on every generator pair.
pub struct Theta {
    pub source: TwistedAlgebra,
    pub target: TwistedAlgebra,
    pub h: Cochain,
}

pub fn theta_build(ta_f: &TwistedAlgebra, ta_g: &TwistedAlgebra, h: &Cochain) -> Result<Theta> {
    if !Arc::ptr_eq(&ta_f.lr, &ta_g.lr) {
        return Err(LiraError::AlgebraMismatch);
    }
    if h.p != 1 || h.rank != 1 {
        return Err(LiraError::DimensionMismatch(
            "theta twist must be a B-valued 1-cochain".into(),
        ));
    }
    let lr = &ta_f.lr;
    let conn = Connection::anchor_on_ring(lr);
    let dh = lr_differential(&conn, h)?;
    let diff = ta_f.f.sub(&ta_g.f);
    if dh != diff {
        return Err(LiraError::SignMismatch);
    }
    let theta = Theta {
        source: ta_f.clone(),
        target: ta_g.clone(),
        h: h.clone(),
    };
    theta.relation_audit()?;
    Ok(theta)
}

impl Theta {
    fn image_of_gen(&self, i: usize) -> EnvElem {
        let hi = self.h.eval_basis(&[i]).remove(0);
        EnvElem::gen(&self.target, i).add(&EnvElem::from_poly(&self.target, hi))
    }

    pub fn apply(&self, u: &EnvElem) -> Result<EnvElem> {
        if u.l != self.source.lr.rank {
            return Err(LiraError::AlgebraMismatch);
        }
        let mut out = EnvElem::zero(&self.target);
        for (p, b) in &u.terms {
            let mut acc = EnvElem::from_poly(&self.target, b.clone());
            for (i, &e) in p.iter().enumerate() {
                let gi = self.image_of_gen(i);
                for _ in 0..e {
                    acc = env_mul(&self.target, &acc, &gi)?;
                }
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// Verifies theta([u, b]) and theta applied to the commutation relations
    /// on all generator pairs and generator/variable pairs.
    fn relation_audit(&self) -> Result<()> {
        let lr = &self.source.lr;
        let ring = &lr.ring;
        // e_a e_b - e_b e_a = [e_a, e_b] + f(e_a, e_b) must map to the same
        // identity with g on the target side
        for a in 0..lr.rank {
            for b in 0..lr.rank {
                let ia = self.image_of_gen(a);
                let ib = self.image_of_gen(b);
                let lhs = env_mul(&self.target, &ia, &ib)?
                    .sub(&env_mul(&self.target, &ib, &ia)?);
                let br = lr.bracket_basis(a, b);
                let mut rhs = EnvElem::from_poly(
                    &self.target,
                    self.source.f.eval_basis(&[a, b]).remove(0),
                );
                for (m, c) in br.coords.iter().enumerate() {
                    if !c.is_zero() {
                        rhs = rhs.add(&self.image_of_gen(m).scale_poly(c));
                    }
                }
                // the bracket image under theta also picks up h([e_a, e_b])
                if lhs != rhs {
                    return Err(LiraError::Validation {
                        entity: "theta relation audit".into(),
                        reason: format!("commutation relation fails on (e{}, e{})", a + 1, b + 1),
                    });
                }
            }
        }
        // e_i b - b e_i = alpha(e_i)(b) on variables
        for i in 0..lr.rank {
            for v in 0..ring.nvars() {
                let b = EnvElem::from_poly(&self.target, Poly::var(ring, v));
                let gi = self.image_of_gen(i);
                let lhs = env_mul(&self.target, &gi, &b)?.sub(&env_mul(&self.target, &b, &gi)?);
                let rhs = EnvElem::from_poly(&self.target, lr.anchor[i].apply(&Poly::var(ring, v)));
                if lhs != rhs {
                    return Err(LiraError::Validation {
                        entity: "theta relation audit".into(),
                        reason: format!("anchor relation fails on (e{}, var {})", i + 1, v + 1),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Hom-set in the deformation groupoid: a witness h with d^1 h = f - g plus
/// the torsor description {h + z : z in Z^1(L, B)}.
#[derive(Debug)]
pub struct AdefHom {
    pub witness: Cochain,
    pub z1: Z1Result,
}

pub fn adef_hom(
    ta_f: &TwistedAlgebra,
    ta_g: &TwistedAlgebra,
    window: TruncationWindow,
) -> Result<Option<AdefHom>> {
    if !Arc::ptr_eq(&ta_f.lr, &ta_g.lr) {
        return Err(LiraError::AlgebraMismatch);
    }
    let lr = &ta_f.lr;
    let diff = ta_f.f.sub(&ta_g.f);
    let Some(witness) = coboundary_solve(lr, &diff, window)? else {
        return Ok(None);
    };
    let z1 = z1_solve(lr, window)?;
    Ok(Some(AdefHom { witness, z1 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::parse::poly_parse;
    use crate::ring::rat;

    fn ab2_weyl() -> TwistedAlgebra {
        let lr = Arc::new(fixtures::ab2());
        let mut f = Cochain::zero(&lr, 2, 1);
        f.set(vec![0, 1], vec![Poly::one(&lr.ring)]).unwrap();
        TwistedAlgebra::new(lr, f).unwrap()
    }

    fn weyl2_twisted(constant: i64) -> TwistedAlgebra {
        let lr = Arc::new(fixtures::weyl2());
        let mut f = Cochain::zero(&lr, 2, 1);
        f.set(
            vec![0, 1],
            vec![Poly::constant(&lr.ring, rat(constant))],
        )
        .unwrap();
        TwistedAlgebra::new(lr, f).unwrap()
    }

    #[test]
    fn weyl_relation_e2_e1() {
        let ta = ab2_weyl();
        let nf = env_normal_form(&ta, &[Letter::Gen(1), Letter::Gen(0)]);
        let expected = EnvElem::monomial(&ta, vec![1, 1], Poly::one(&ta.lr.ring))
            .add(&EnvElem::from_poly(&ta, Poly::one(&ta.lr.ring).neg()));
        assert_eq!(nf, expected);
        assert_eq!(nf.to_string(), "e1*e2 + -1");
    }

    #[test]
    fn r1_moves_coefficients_left() {
        let ta = weyl2_twisted(1);
        let x = poly_parse(&ta.lr.ring, "x").unwrap();
        let nf = env_normal_form(
            &ta,
            &[Letter::Gen(0), Letter::Coef(x.clone()), Letter::Gen(1)],
        );
        // e1 x e2 = x e1 e2 + e2
        let expected = EnvElem::monomial(&ta, vec![1, 1], x)
            .add(&EnvElem::monomial(&ta, vec![0, 1], Poly::one(&ta.lr.ring)));
        assert_eq!(nf, expected);
    }

    #[test]
    fn coefficient_only_word() {
        let ta = ab2_weyl();
        let b = Poly::constant(&ta.lr.ring, rat(7));
        let nf = env_normal_form(&ta, &[Letter::Coef(b.clone())]);
        assert_eq!(nf, EnvElem::from_poly(&ta, b));
    }

    #[test]
    fn weyl_commutator() {
        let ta = ab2_weyl();
        let e1 = EnvElem::gen(&ta, 0);
        let e2 = EnvElem::gen(&ta, 1);
        let comm = env_mul(&ta, &e2, &e1)
            .unwrap()
            .sub(&env_mul(&ta, &e1, &e2).unwrap());
        assert_eq!(comm, EnvElem::from_poly(&ta, Poly::one(&ta.lr.ring).neg()));
    }

    #[test]
    fn unital() {
        let ta = ab2_weyl();
        let one = EnvElem::one(&ta);
        let u = EnvElem::monomial(&ta, vec![2, 3], Poly::constant(&ta.lr.ring, rat(5)));
        assert_eq!(env_mul(&ta, &one, &u).unwrap(), u);
        assert_eq!(env_mul(&ta, &u, &one).unwrap(), u);
    }

    #[test]
    fn confluence_ab2_n6() {
        let ta = ab2_weyl();
        let report = pbw_confluence_check(&ta, 6).unwrap();
        assert!(report.passed);
        let expected: Vec<usize> = (0..=6).map(|k| k + 1).collect();
        assert_eq!(report.monomial_counts, expected);
        assert_eq!(report.total_dim, 28);
    }

    #[test]
    fn confluence_heis3_untwisted() {
        let ta = TwistedAlgebra::untwisted(Arc::new(fixtures::heis3()));
        let report = pbw_confluence_check(&ta, 4).unwrap();
        assert!(report.passed);
    }

    #[test]
    fn non_cocycle_breaks_confluence_on_triple() {
        let lr = Arc::new(fixtures::abelian_poly3());
        let mut f = Cochain::zero(&lr, 2, 1);
        f.set(vec![0, 1], vec![poly_parse(&lr.ring, "z").unwrap()])
            .unwrap();
        let ta = TwistedAlgebra::candidate(lr, f);
        let report = pbw_confluence_check(&ta, 3).unwrap();
        assert!(!report.passed);
        let ((k, j, i), diff) = report.violation.unwrap();
        assert_eq!((k, j, i), (3, 2, 1));
        // discrepancy is the constant d^2 f(e1,e2,e3) = +-1
        let c = diff.terms.get(&vec![0, 0, 0]).expect("constant defect");
        assert!(c.is_constant());
        assert_eq!(diff.terms.len(), 1);
    }

    #[test]
    fn confluence_verdict_matches_cocycle_randomized() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..8 {
            let lr = Arc::new(fixtures::abelian_poly3());
            let mut f = Cochain::zero(&lr, 2, 1);
            for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
                let v = rng.gen_range(0..4);
                let p = if v < 3 {
                    Poly::var(&lr.ring, v)
                } else {
                    Poly::constant(&lr.ring, rat(rng.gen_range(-2..3)))
                };
                f.set(vec![i, j], vec![p]).unwrap();
            }
            let (cocycle, _) = is_cocycle(&lr, &f);
            let ta = TwistedAlgebra::candidate(lr, f);
            let report = pbw_confluence_check(&ta, 3).unwrap();
            assert_eq!(cocycle, report.passed);
        }
    }

    #[test]
    fn strategy_independence_random_words() {
        use rand::Rng;
        use rand::SeedableRng;
        let ta = weyl2_twisted(1);
        let ring = &ta.lr.ring;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..30 {
            let len = rng.gen_range(1..=6);
            let word: Vec<Letter> = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        let v = rng.gen_range(0..2);
                        Letter::Coef(Poly::var(ring, v))
                    } else {
                        Letter::Gen(rng.gen_range(0..2))
                    }
                })
                .collect();
            let left = env_normal_form_with(&ta, &word, Strategy::Leftmost);
            let right = env_normal_form_with(&ta, &word, Strategy::Rightmost);
            assert_eq!(left, right);
        }
    }

    #[test]
    fn associativity_random_elements() {
        use rand::Rng;
        use rand::SeedableRng;
        let ta = ab2_weyl();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let rand_elem = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut u = EnvElem::zero(&ta);
            for _ in 0..2 {
                let p = vec![rng.gen_range(0..3u32), rng.gen_range(0..2u32)];
                u = u.add(&EnvElem::monomial(
                    &ta,
                    p,
                    Poly::constant(&ta.lr.ring, rat(rng.gen_range(-3..4))),
                ));
            }
            u
        };
        for _ in 0..10 {
            let a = rand_elem(&mut rng);
            let b = rand_elem(&mut rng);
            let c = rand_elem(&mut rng);
            let lhs = env_mul(&ta, &env_mul(&ta, &a, &b).unwrap(), &c).unwrap();
            let rhs = env_mul(&ta, &a, &env_mul(&ta, &b, &c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn filtration_degree_subadditive() {
        let ta = ab2_weyl();
        let u = EnvElem::monomial(&ta, vec![2, 1], Poly::one(&ta.lr.ring));
        let v = EnvElem::monomial(&ta, vec![0, 2], Poly::one(&ta.lr.ring));
        let prod = env_mul(&ta, &u, &v).unwrap();
        assert!(prod.degree().unwrap() <= 5);
        assert_eq!(prod.degree().unwrap(), 5);
    }

    #[test]
    fn symbol_examples() {
        let ta = weyl2_twisted(1);
        let x = poly_parse(&ta.lr.ring, "x").unwrap();
        let u = EnvElem::monomial(&ta, vec![1, 1], x.clone())
            .add(&EnvElem::monomial(&ta, vec![0, 1], Poly::one(&ta.lr.ring)));
        let s = symbol(&u).unwrap();
        assert_eq!(s.terms.len(), 1);
        assert_eq!(s.terms.get(&vec![1, 1]).unwrap(), &x);
        assert_eq!(s.to_string(), "x*s1*s2");

        let one = symbol(&EnvElem::one(&ta)).unwrap();
        assert_eq!(one.terms.get(&vec![0, 0]).unwrap(), &Poly::one(&ta.lr.ring));

        assert!(matches!(
            symbol(&EnvElem::zero(&ta)),
            Err(LiraError::ZeroElement)
        ));
    }

    #[test]
    fn symbol_multiplicative_on_weyl_product() {
        let ta = ab2_weyl();
        let e1 = EnvElem::gen(&ta, 0);
        let e2 = EnvElem::gen(&ta, 1);
        let prod = env_mul(&ta, &e2, &e1).unwrap();
        let s = symbol(&prod).unwrap();
        assert_eq!(s, symbol(&e1).unwrap().mul(&symbol(&e2).unwrap()));
    }

    #[test]
    fn theta_identity_when_h_zero() {
        let ta = ab2_weyl();
        let h = Cochain::zero(&ta.lr, 1, 1);
        let theta = theta_build(&ta, &ta, &h).unwrap();
        let u = EnvElem::monomial(&ta, vec![2, 1], Poly::constant(&ta.lr.ring, rat(3)));
        assert_eq!(theta.apply(&u).unwrap(), u);
    }

    #[test]
    fn theta_constant_shift_on_weyl() {
        // f = g, h constant: theta(e1 e2) = e1e2 + h2 e1 + h1 e2 + h1 h2
        let ta = ab2_weyl();
        let ring = &ta.lr.ring;
        let mut h = Cochain::zero(&ta.lr, 1, 1);
        let h1 = Poly::constant(ring, rat(2));
        let h2 = Poly::constant(ring, rat(5));
        h.set(vec![0], vec![h1.clone()]).unwrap();
        h.set(vec![1], vec![h2.clone()]).unwrap();
        let theta = theta_build(&ta, &ta, &h).unwrap();
        let u = EnvElem::monomial(&ta, vec![1, 1], Poly::one(ring));
        let image = theta.apply(&u).unwrap();
        let expected = EnvElem::monomial(&ta, vec![1, 1], Poly::one(ring))
            .add(&EnvElem::monomial(&ta, vec![1, 0], h2.clone()))
            .add(&EnvElem::monomial(&ta, vec![0, 1], h1.clone()))
            .add(&EnvElem::from_poly(&ta, h1.mul(&h2)));
        assert_eq!(image, expected);
    }

    #[test]
    fn theta_weyl2_one_to_zero() {
        let ta_f = weyl2_twisted(1);
        let ta_g = TwistedAlgebra {
            lr: ta_f.lr.clone(),
            f: Cochain::zero(&ta_f.lr, 2, 1),
        };
        let mut h = Cochain::zero(&ta_f.lr, 1, 1);
        h.set(vec![1], vec![poly_parse(&ta_f.lr.ring, "x").unwrap()])
            .unwrap();
        let theta = theta_build(&ta_f, &ta_g, &h).unwrap();
        let e2 = EnvElem::gen(&ta_f, 1);
        let image = theta.apply(&e2).unwrap();
        let expected = EnvElem::gen(&ta_g, 1).add(&EnvElem::from_poly(
            &ta_g,
            poly_parse(&ta_g.lr.ring, "x").unwrap(),
        ));
        assert_eq!(image, expected);
    }

    #[test]
    fn theta_wrong_sign_rejected() {
        let ta_f = weyl2_twisted(1);
        let ta_g = TwistedAlgebra {
            lr: ta_f.lr.clone(),
            f: Cochain::zero(&ta_f.lr, 2, 1),
        };
        // d^1 (0, -x) = -1 = g - f, not f - g
        let mut h = Cochain::zero(&ta_f.lr, 1, 1);
        h.set(
            vec![1],
            vec![poly_parse(&ta_f.lr.ring, "x").unwrap().neg()],
        )
        .unwrap();
        assert!(matches!(
            theta_build(&ta_f, &ta_g, &h),
            Err(LiraError::SignMismatch)
        ));
    }

    #[test]
    fn theta_inverse_on_monomials_up_to_degree_4() {
        let ta_f = weyl2_twisted(1);
        let ta_g = TwistedAlgebra {
            lr: ta_f.lr.clone(),
            f: Cochain::zero(&ta_f.lr, 2, 1),
        };
        let x = poly_parse(&ta_f.lr.ring, "x").unwrap();
        let mut h = Cochain::zero(&ta_f.lr, 1, 1);
        h.set(vec![1], vec![x.clone()]).unwrap();
        let mut hneg = Cochain::zero(&ta_f.lr, 1, 1);
        hneg.set(vec![1], vec![x.neg()]).unwrap();
        let fwd = theta_build(&ta_f, &ta_g, &h).unwrap();
        let bwd = theta_build(&ta_g, &ta_f, &hneg).unwrap();
        for d in 0..=4u32 {
            for p in exponent_vectors(2, d) {
                let u = EnvElem::monomial(&ta_f, p, Poly::one(&ta_f.lr.ring));
                let round = bwd.apply(&fwd.apply(&u).unwrap()).unwrap();
                assert_eq!(round, u);
            }
        }
    }

    #[test]
    fn adef_hom_weyl2() {
        let ta_f = weyl2_twisted(1);
        let ta_g = TwistedAlgebra {
            lr: ta_f.lr.clone(),
            f: Cochain::zero(&ta_f.lr, 2, 1),
        };
        let out = adef_hom(&ta_f, &ta_g, TruncationWindow::new(1).unwrap())
            .unwrap()
            .expect("affine plane has trivial H^2");
        let conn = Connection::anchor_on_ring(&ta_f.lr);
        assert_eq!(
            lr_differential(&conn, &out.witness).unwrap(),
            ta_f.f.sub(&ta_g.f)
        );
        // the witness must build a valid theta
        theta_build(&ta_f, &ta_g, &out.witness).unwrap();
    }

    #[test]
    fn adef_hom_identity_case() {
        let ta = ab2_weyl();
        let out = adef_hom(&ta, &ta, TruncationWindow::new(1).unwrap())
            .unwrap()
            .expect("h = 0 works");
        assert!(out.witness.is_zero());
        // hom-set is the full Z^1 = C^1 over Q with zero anchor: dim 2
        assert_eq!(out.z1.basis.len(), 2);
    }

    #[test]
    fn adef_hom_torus_empty_window() {
        let lr = Arc::new(fixtures::torus2());
        let mut f = Cochain::zero(&lr, 2, 1);
        f.set(vec![0, 1], vec![Poly::one(&lr.ring)]).unwrap();
        let ta_f = TwistedAlgebra::new(lr.clone(), f).unwrap();
        let ta_g = TwistedAlgebra {
            lr: lr.clone(),
            f: Cochain::zero(&lr, 2, 1),
        };
        for d in 0..3 {
            let out = adef_hom(&ta_f, &ta_g, TruncationWindow::new(d).unwrap()).unwrap();
            assert!(out.is_none());
        }
    }
}

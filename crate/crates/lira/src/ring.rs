//! Exact rational coefficient rings: Q[x1..xn] with optional per-variable
//! Laurent exponents and an optional single defining relation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{LiraError, Result};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent vector ordered graded-lexicographically: compare total degree
/// first, then exponents left to right.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub Vec<i64>);

impl Mono {
    pub fn unit(n: usize) -> Self {
        Mono(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Mono(e)
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise quotient when `other` divides `self` on the non-negative
    /// exponents of `other`.
    pub fn checked_div(&self, other: &Mono) -> Option<Mono> {
        let mut q = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if *b > 0 && a < b {
                return None;
            }
            q.push(a - b);
        }
        Some(Mono(q))
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|e| *e == 0)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => self.0.cmp(&other.0),
            ord => ord,
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub type Terms = BTreeMap<Mono, Rat>;

/// B = Q[x1..xn], per-variable Laurent flags, at most one defining relation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BaseRing {
    names: Vec<String>,
    laurent: Vec<bool>,
    relation: Option<Terms>,
}

impl BaseRing {
    pub fn new(names: Vec<String>, laurent: Vec<bool>) -> Result<Arc<BaseRing>> {
        if names.len() != laurent.len() {
            return Err(LiraError::Domain(
                "laurent flag count differs from variable count".into(),
            ));
        }
        for (i, a) in names.iter().enumerate() {
            for b in names.iter().skip(i + 1) {
                if a == b {
                    return Err(LiraError::Domain(format!("duplicate variable `{a}`")));
                }
            }
        }
        Ok(Arc::new(BaseRing {
            names,
            laurent,
            relation: None,
        }))
    }

    /// Q as the zero-variable polynomial ring.
    pub fn rationals() -> Arc<BaseRing> {
        Arc::new(BaseRing {
            names: vec![],
            laurent: vec![],
            relation: None,
        })
    }

    /// Attach the single defining relation g, so elements live in Q[x]/(g).
    pub fn with_relation(self: &Arc<BaseRing>, g: &Poly) -> Result<Arc<BaseRing>> {
        if g.terms.is_empty() {
            return Err(LiraError::Domain("relation must be nonzero".into()));
        }
        let lead = g.terms.keys().next_back().unwrap();
        for (i, e) in lead.0.iter().enumerate() {
            if *e != 0 && self.laurent[i] {
                return Err(LiraError::Domain(
                    "leading monomial of the relation involves a Laurent variable".into(),
                ));
            }
        }
        Ok(Arc::new(BaseRing {
            names: self.names.clone(),
            laurent: self.laurent.clone(),
            relation: Some(g.terms.clone()),
        }))
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_laurent(&self, i: usize) -> bool {
        self.laurent[i]
    }

    pub fn has_relation(&self) -> bool {
        self.relation.is_some()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_field(&self) -> bool {
        self.names.is_empty()
    }

    fn check_mono(&self, m: &Mono) -> Result<()> {
        if m.0.len() != self.nvars() {
            return Err(LiraError::DimensionMismatch(
                "exponent vector length differs from variable count".into(),
            ));
        }
        for (i, e) in m.0.iter().enumerate() {
            if *e < 0 && !self.laurent[i] {
                return Err(LiraError::Domain(format!(
                    "negative exponent on non-Laurent variable `{}`",
                    self.names[i]
                )));
            }
        }
        Ok(())
    }
}

/// Element of the base ring in normal form: no zero coefficients, fully
/// reduced by the relation when one is present.
#[derive(Clone, Debug)]
pub struct Poly {
    pub ring: Arc<BaseRing>,
    pub terms: Terms,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(ring: &Arc<BaseRing>) -> Poly {
        Poly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Arc<BaseRing>) -> Poly {
        Poly::constant(ring, rat(1))
    }

    pub fn constant(ring: &Arc<BaseRing>, c: Rat) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::unit(ring.nvars()), c);
        }
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn var(ring: &Arc<BaseRing>, i: usize) -> Poly {
        let mut terms = BTreeMap::new();
        terms.insert(Mono::var(ring.nvars(), i), rat(1));
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn monomial(ring: &Arc<BaseRing>, m: Mono, c: Rat) -> Result<Poly> {
        ring.check_mono(&m)?;
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Ok(Poly {
            ring: ring.clone(),
            terms,
        }
        .reduced())
    }

    pub fn from_terms(ring: &Arc<BaseRing>, terms: Terms) -> Poly {
        Poly {
            ring: ring.clone(),
            terms: terms.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
        .reduced()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_unit() && c.is_one())
                .unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_unit())
    }

    /// Rational value of a constant polynomial.
    pub fn constant_value(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(rat(0));
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    pub fn leading(&self) -> Option<(&Mono, &Rat)> {
        self.terms.iter().next_back()
    }

    fn reduced(mut self) -> Poly {
        if let Some(g) = self.ring.relation.clone() {
            reduce_by_relation(&mut self.terms, &g);
        }
        self
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        Poly {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut terms: Terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                add_term(&mut terms, m1.mul(m2), c1 * c2);
            }
        }
        Poly {
            ring: self.ring.clone(),
            terms,
        }
        .reduced()
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(&self.ring);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative with respect to variable i, reduced mod relation.
    pub fn partial(&self, i: usize) -> Poly {
        let mut terms: Terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exp = m.0.clone();
            exp[i] -= 1;
            add_term(&mut terms, Mono(exp), c * rat(e));
        }
        Poly {
            ring: self.ring.clone(),
            terms,
        }
        .reduced()
    }
}

fn add_term(terms: &mut Terms, m: Mono, c: Rat) {
    if c.is_zero() {
        return;
    }
    match terms.get_mut(&m) {
        Some(acc) => {
            *acc += c;
            if acc.is_zero() {
                terms.remove(&m);
            }
        }
        None => {
            terms.insert(m, c);
        }
    }
}

/// Single-divisor division by the relation g: repeatedly cancels the largest
/// term divisible by lead(g). A singleton generating set is a Groebner basis
/// of a principal ideal, so the remainder is canonical.
fn reduce_by_relation(terms: &mut Terms, g: &Terms) {
    let (glead, gc) = g.iter().next_back().expect("relation is nonzero");
    loop {
        let hit = terms
            .iter()
            .rev()
            .find_map(|(m, c)| m.checked_div(glead).map(|q| (m.clone(), c.clone(), q)));
        let Some((m, c, q)) = hit else { break };
        let factor = &c / gc;
        terms.remove(&m);
        for (gm, gk) in g.iter() {
            if gm == glead {
                continue;
            }
            add_term(terms, gm.mul(&q), -(&factor * gk));
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(out, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    write!(out, "-")?;
                }
            } else if neg {
                write!(out, " - ")?;
            } else {
                write!(out, " + ")?;
            }
            write_term(out, &self.ring, m, &abs)?;
        }
        Ok(())
    }
}

fn write_term(
    out: &mut fmt::Formatter<'_>,
    ring: &BaseRing,
    m: &Mono,
    abs: &Rat,
) -> fmt::Result {
    let mut wrote = false;
    if !abs.is_one() || m.is_unit() {
        write!(out, "{}", format_rat(abs))?;
        wrote = true;
    }
    for (i, e) in m.0.iter().enumerate() {
        if *e == 0 {
            continue;
        }
        if wrote {
            write!(out, "*")?;
        }
        wrote = true;
        if *e == 1 {
            write!(out, "{}", ring.names[i])?;
        } else {
            write!(out, "{}^{}", ring.names[i], e)?;
        }
    }
    Ok(())
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A-linear derivation of B given by its coefficients against d/dx_i.
#[derive(Clone, PartialEq, Debug)]
pub struct Derivation {
    pub ring: Arc<BaseRing>,
    pub coeffs: Vec<Poly>,
}

impl Derivation {
    /// Checks that the derivation preserves the relation ideal, so it
    /// descends to the quotient ring.
    pub fn new(ring: &Arc<BaseRing>, coeffs: Vec<Poly>) -> Result<Derivation> {
        if coeffs.len() != ring.nvars() {
            return Err(LiraError::DimensionMismatch(
                "derivation needs one coefficient per variable".into(),
            ));
        }
        let d = Derivation {
            ring: ring.clone(),
            coeffs,
        };
        if let Some(g) = &ring.relation {
            let g_poly = Poly {
                ring: Arc::new(BaseRing {
                    names: ring.names().to_vec(),
                    laurent: (0..ring.nvars()).map(|i| ring.is_laurent(i)).collect(),
                    relation: None,
                }),
                terms: g.clone(),
            };
            let mut img = Poly::zero(ring);
            for i in 0..ring.nvars() {
                let dg = Poly {
                    ring: ring.clone(),
                    terms: g_poly.partial(i).terms,
                }
                .reduced();
                img = img.add(&d.coeffs[i].mul(&dg));
            }
            if !img.is_zero() {
                return Err(LiraError::Domain(
                    "derivation does not preserve the relation ideal".into(),
                ));
            }
        }
        Ok(d)
    }

    pub fn zero(ring: &Arc<BaseRing>) -> Derivation {
        Derivation {
            ring: ring.clone(),
            coeffs: vec![Poly::zero(ring); ring.nvars()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn apply(&self, b: &Poly) -> Poly {
        let mut out = Poly::zero(&self.ring);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&c.mul(&b.partial(i)));
            }
        }
        out
    }

    pub fn add(&self, other: &Derivation) -> Derivation {
        Derivation {
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale_poly(&self, p: &Poly) -> Derivation {
        Derivation {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| c.mul(p)).collect(),
        }
    }

    /// Commutator of derivations, again a derivation.
    pub fn commutator(&self, other: &Derivation) -> Derivation {
        let coeffs = (0..self.ring.nvars())
            .map(|k| {
                self.apply(&other.coeffs[k])
                    .sub(&other.apply(&self.coeffs[k]))
            })
            .collect();
        Derivation {
            ring: self.ring.clone(),
            coeffs,
        }
    }
}

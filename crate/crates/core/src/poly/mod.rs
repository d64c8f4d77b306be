//! Sparse multivariate polynomials over a cyclotomic field.

mod jet;
mod parse;

pub use jet::Jet;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::cyclo::{CycloElem, CycloField};
use crate::error::{Error, Result};

/// Polynomial ring `Q(ζ_m)[vars]`.
#[derive(Clone)]
pub struct Ring {
    field: CycloField,
    vars: Arc<Vec<String>>,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && (Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars)
    }
}

impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[{}]", self.field, self.vars.join(", "))
    }
}

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Ring {
    pub fn new<S: AsRef<str>>(field: CycloField, vars: &[S]) -> Result<Ring> {
        let mut seen = BTreeSet::new();
        let mut names = Vec::with_capacity(vars.len());
        for v in vars {
            let v = v.as_ref();
            if !valid_ident(v) {
                return Err(Error::InvalidVariables(format!("`{v}` is not an identifier")));
            }
            if v == "zeta" {
                return Err(Error::InvalidVariables(
                    "`zeta` is reserved for the root of unity".into(),
                ));
            }
            if !seen.insert(v.to_string()) {
                return Err(Error::InvalidVariables(format!("`{v}` declared twice")));
            }
            names.push(v.to_string());
        }
        Ok(Ring {
            field,
            vars: Arc::new(names),
        })
    }

    pub fn field(&self) -> &CycloField {
        &self.field
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Symbol standing for `ζ_m` in text: `z`, or `zeta` when `z` is taken
    /// by a variable.
    pub fn root_symbol(&self) -> &'static str {
        if self.var_index("z").is_some() {
            "zeta"
        } else {
            "z"
        }
    }

    pub fn var(&self, name: &str) -> Result<Polynomial> {
        let i = self
            .var_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(self.var_at(i))
    }

    pub fn var_at(&self, i: usize) -> Polynomial {
        let mut e = vec![0; self.nvars()];
        e[i] = 1;
        Polynomial::monomial(self, Monomial(e), self.field.one())
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial {
            ring: self.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> Polynomial {
        self.constant(self.field.one())
    }

    pub fn from_int(&self, n: i64) -> Polynomial {
        self.constant(self.field.from_int(n))
    }

    pub fn constant(&self, c: CycloElem) -> Polynomial {
        Polynomial::monomial(self, Monomial::one(self.nvars()), c)
    }

    pub fn parse(&self, text: &str) -> Result<Polynomial> {
        parse::parse(text, self)
    }

    /// The same variables over `Q(ζ_{m2})`.
    pub fn with_field(&self, field: CycloField) -> Ring {
        Ring {
            field,
            vars: self.vars.clone(),
        }
    }

    /// Variable indices for a list of names.
    pub fn indices<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                self.var_index(n.as_ref())
                    .ok_or_else(|| Error::UnknownVariable(n.as_ref().to_string()))
            })
            .collect()
    }
}

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial; zero coefficients are never stored.
#[derive(Clone)]
pub struct Polynomial {
    ring: Ring,
    terms: BTreeMap<Monomial, CycloElem>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl Hash for Polynomial {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for (m, c) in &self.terms {
            m.hash(state);
            c.hash(state);
        }
    }
}

impl Polynomial {
    pub fn monomial(ring: &Ring, m: Monomial, c: CycloElem) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CycloElem)> {
        self.terms.iter().rev()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_term(&self) -> CycloElem {
        self.terms
            .get(&Monomial::one(self.ring.nvars()))
            .cloned()
            .unwrap_or_else(|| self.ring.field.zero())
    }

    pub fn coeff(&self, m: &Monomial) -> CycloElem {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| self.ring.field.zero())
    }

    fn check(&self, other: &Polynomial) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    fn add_term(terms: &mut BTreeMap<Monomial, CycloElem>, m: Monomial, c: CycloElem) {
        use std::collections::btree_map::Entry;
        match terms.entry(m) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::add_term(&mut terms, m.clone(), c.clone());
        }
        Ok(Polynomial {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check(other)?;
        Ok(self.mul_bounded(other, None))
    }

    /// Product keeping only terms of total degree `< n`.
    pub fn mul_trunc(&self, other: &Polynomial, n: u32) -> Result<Polynomial> {
        self.check(other)?;
        Ok(self.mul_bounded(other, Some(n)))
    }

    fn mul_bounded(&self, other: &Polynomial, bound: Option<u32>) -> Polynomial {
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some(n) = bound {
                    if m1.degree() + m2.degree() >= n {
                        continue;
                    }
                }
                Self::add_term(&mut terms, m1.mul(m2), c1 * c2);
            }
        }
        Polynomial {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn scale(&self, c: &CycloElem) -> Polynomial {
        if c.is_zero() {
            return self.ring.zero();
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = self.ring.one();
        for _ in 0..e {
            acc = acc.mul_bounded(self, None);
        }
        acc
    }

    /// Drop every term of total degree `>= n`.
    pub fn truncate(&self, n: u32) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() < n)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Minimal total degree of a term.
    pub fn order(&self) -> Result<u32> {
        self.terms
            .keys()
            .next()
            .map(Monomial::degree)
            .ok_or(Error::ZeroPolynomial)
    }

    /// Maximal total degree of a term, `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Set the named variables to zero.
    pub fn reduce_mod_vars<S: AsRef<str>>(&self, kill: &[S]) -> Result<Polynomial> {
        let idx = self.ring.indices(kill)?;
        Ok(self.reduce_mod_indices(&idx))
    }

    pub fn reduce_mod_indices(&self, kill: &[usize]) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| kill.iter().all(|&i| m.0[i] == 0))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Indices of the variables that occur.
    pub fn support(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(|m| m.support()).collect()
    }

    /// A single nonzero term.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn as_monomial(&self) -> Option<(&Monomial, &CycloElem)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn evaluate(&self, point: &[CycloElem]) -> Result<CycloElem> {
        if point.len() != self.ring.nvars() {
            return Err(Error::Shape(format!(
                "point has {} coordinates, ring has {} variables",
                point.len(),
                self.ring.nvars()
            )));
        }
        let mut acc = self.ring.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = t.try_mul(&x.pow(e as i64)?)?;
                }
            }
            acc = acc.try_add(&t)?;
        }
        Ok(acc)
    }

    /// Coefficientwise embedding into a ring over a larger cyclotomic field
    /// with the same variables.
    pub fn embed(&self, target: &Ring) -> Result<Polynomial> {
        if target.vars != self.ring.vars {
            return Err(Error::RingMismatch);
        }
        let m = self.ring.field.conductor();
        let m2 = target.field.conductor();
        if !m2.is_multiple_of(m) {
            return Err(Error::NotDivisible { from: m, to: m2 });
        }
        Ok(Polynomial {
            ring: target.clone(),
            terms: self
                .terms
                .iter()
                .map(|(mo, c)| (mo.clone(), c.embed_into(&target.field)))
                .collect(),
        })
    }

    /// Homogeneous component of degree `k`.
    pub fn homogeneous_part(&self, k: u32) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }
}

fn format_monomial(m: &Monomial, vars: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(vars[i].clone()),
            _ => parts.push(format!("{}^{}", vars[i], e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let sym = self.ring.root_symbol();
        for (idx, (m, c)) in self.terms().enumerate() {
            let mono = format_monomial(m, &self.ring.vars);
            let (neg, coef) = if c.term_count() == 1 {
                let s = c.format_with(sym);
                match s.strip_prefix('-') {
                    Some(rest) => (true, rest.to_string()),
                    None => (false, s),
                }
            } else {
                (false, format!("({})", c.format_with(sym)))
            };
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if mono.is_empty() {
                write!(f, "{coef}")?;
            } else if coef == "1" {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{coef}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        self.try_add(rhs).expect("ring mismatch")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("ring mismatch")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("ring mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Pairwise coprimality of monomials.
///
/// Only single-term inputs are accepted; anything else is refused since
/// general gcd computations are not attempted.
pub fn monomial_coprime(list: &[Polynomial]) -> Result<bool> {
    let mut supports = Vec::with_capacity(list.len());
    for p in list {
        if !p.is_monomial() {
            return Err(Error::NotMonomial(p.to_string()));
        }
        supports.push(p.support());
    }
    for i in 0..supports.len() {
        for j in i + 1..supports.len() {
            if !supports[i].is_disjoint(&supports[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A split of the variables into two disjoint sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSplit {
    pub left: BTreeSet<usize>,
    pub right: BTreeSet<usize>,
}

impl VarSplit {
    pub fn new(left: BTreeSet<usize>, right: BTreeSet<usize>) -> Result<VarSplit> {
        if let Some(i) = left.intersection(&right).next() {
            return Err(Error::Hypothesis(format!(
                "variable #{i} appears on both sides of the split"
            )));
        }
        Ok(VarSplit { left, right })
    }

    /// Split given by the supports of two families of polynomials.
    pub fn from_supports<'a, I, J>(left: I, right: J) -> Result<VarSplit>
    where
        I: IntoIterator<Item = &'a Polynomial>,
        J: IntoIterator<Item = &'a Polynomial>,
    {
        let l = left.into_iter().flat_map(|p| p.support()).collect();
        let r = right.into_iter().flat_map(|p| p.support()).collect();
        VarSplit::new(l, r)
    }

    pub fn names(&self, ring: &Ring) -> (Vec<String>, Vec<String>) {
        let f = |s: &BTreeSet<usize>| s.iter().map(|&i| ring.vars()[i].clone()).collect();
        (f(&self.left), f(&self.right))
    }
}

//! Morphisms of matrix factorizations, jet-level hom spaces and idempotent
//! splitting.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cyclo::CycloElem;
use crate::error::{Error, Result};
use crate::linsolve::{SparseRow, SparseSystem};
use crate::matfac::{min_precision, MatFac};
use crate::matrix::{FieldMatrix, PolyMatrix};
use crate::poly::{Monomial, Polynomial, Ring};

/// `α = (α_0, ..., α_{d-1})` with `α_{k-1} φ_k = φ'_k α_k` for every `k`.
///
/// `α_k` maps the degree-`k` piece of the source to that of the target,
/// so it has shape `rank(target) × rank(source)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    source: MatFac,
    target: MatFac,
    comps: Vec<PolyMatrix>,
    precision: Option<u32>,
}

fn trunc(m: &PolyMatrix, p: Option<u32>) -> PolyMatrix {
    match p {
        Some(n) => m.truncate(n),
        None => m.clone(),
    }
}

fn mul_at(a: &PolyMatrix, b: &PolyMatrix, p: Option<u32>) -> Result<PolyMatrix> {
    match p {
        Some(n) => a.mul_trunc(b, n),
        None => a.mul(b),
    }
}

/// Whether two factorizations carry the same data up to the coarser of
/// their precisions.
pub(crate) fn same_factorization(a: &MatFac, b: &MatFac) -> bool {
    let p = min_precision(a.precision(), b.precision());
    a.ring() == b.ring()
        && a.d() == b.d()
        && a.rank() == b.rank()
        && a.f() == b.f()
        && a
            .mats()
            .iter()
            .zip(b.mats())
            .all(|(x, y)| trunc(x, p) == trunc(y, p))
}

impl Morphism {
    pub fn new(source: MatFac, target: MatFac, comps: Vec<PolyMatrix>) -> Result<Morphism> {
        if source.ring() != target.ring() {
            return Err(Error::RingMismatch);
        }
        if source.d() != target.d() {
            return Err(Error::Incompatible(format!(
                "d = {} vs {}",
                source.d(),
                target.d()
            )));
        }
        if source.f() != target.f() {
            return Err(Error::Incompatible(format!(
                "f = {} vs {}",
                source.f(),
                target.f()
            )));
        }
        if comps.len() != source.d() {
            return Err(Error::Shape(format!(
                "need {} components, got {}",
                source.d(),
                comps.len()
            )));
        }
        for (k, c) in comps.iter().enumerate() {
            if c.ring() != source.ring() {
                return Err(Error::RingMismatch);
            }
            if c.rows() != target.rank() || c.cols() != source.rank() {
                return Err(Error::Shape(format!(
                    "component {k} is {}x{}, expected {}x{}",
                    c.rows(),
                    c.cols(),
                    target.rank(),
                    source.rank()
                )));
            }
        }
        let precision = min_precision(source.precision(), target.precision());
        Ok(Morphism {
            source,
            target,
            comps,
            precision,
        })
    }

    pub fn identity(x: &MatFac) -> Morphism {
        let comps = vec![PolyMatrix::identity(x.ring(), x.rank()); x.d()];
        Morphism::new(x.clone(), x.clone(), comps).expect("identity shapes")
    }

    pub fn zero(source: &MatFac, target: &MatFac) -> Result<Morphism> {
        let comps = vec![PolyMatrix::zeros(source.ring(), target.rank(), source.rank()); source.d()];
        Morphism::new(source.clone(), target.clone(), comps)
    }

    /// Mark the morphism as meaningful only modulo degree `n`.
    pub fn with_precision(mut self, n: Option<u32>) -> Morphism {
        self.precision = min_precision(self.precision, n);
        if let Some(n) = self.precision {
            self.comps = self.comps.iter().map(|c| c.truncate(n)).collect();
        }
        self
    }

    pub fn source(&self) -> &MatFac {
        &self.source
    }

    pub fn target(&self) -> &MatFac {
        &self.target
    }

    pub fn comps(&self) -> &[PolyMatrix] {
        &self.comps
    }

    pub fn precision(&self) -> Option<u32> {
        self.precision
    }

    /// `α_k`, index modulo `d`.
    pub fn comp(&self, k: i64) -> &PolyMatrix {
        &self.comps[k.rem_euclid(self.comps.len() as i64) as usize]
    }

    /// Indices `k` at which `α_{k-1} φ_k = φ'_k α_k` fails.
    pub fn intertwining_failures(&self) -> Result<Vec<usize>> {
        let p = self.precision;
        let mut bad = Vec::new();
        for k in 0..self.source.d() as i64 {
            let lhs = mul_at(self.comp(k - 1), self.source.phi(k), p)?;
            let rhs = mul_at(self.target.phi(k), self.comp(k), p)?;
            if trunc(&lhs, p) != trunc(&rhs, p) {
                bad.push(k as usize);
            }
        }
        Ok(bad)
    }

    pub fn is_morphism(&self) -> Result<bool> {
        Ok(self.intertwining_failures()?.is_empty())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Morphism) -> Result<Morphism> {
        if !same_factorization(&other.target, &self.source) {
            return Err(Error::Incompatible(
                "target of the inner morphism is not the source of the outer one".into(),
            ));
        }
        let p = min_precision(self.precision, other.precision);
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| mul_at(a, b, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Morphism::new(other.source.clone(), self.target.clone(), comps)?.with_precision(p))
    }

    pub fn add(&self, other: &Morphism) -> Result<Morphism> {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Morphism::new(self.source.clone(), self.target.clone(), comps)?
            .with_precision(min_precision(self.precision, other.precision)))
    }

    pub fn scale(&self, c: &CycloElem) -> Morphism {
        let mut out = self.clone();
        out.comps = self.comps.iter().map(|m| m.scale(c)).collect();
        out
    }

    /// Block-diagonal morphism `X ⊕ X2 → Y ⊕ Y2`.
    pub fn direct_sum(&self, other: &Morphism) -> Result<Morphism> {
        let ring = self.source.ring();
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| PolyMatrix::block_diag(ring, &[a, b]))
            .collect::<Result<Vec<_>>>()?;
        let source = self.source.direct_sum(&other.source)?;
        let target = self.target.direct_sum(&other.target)?;
        Ok(Morphism::new(source, target, comps)?
            .with_precision(min_precision(self.precision, other.precision)))
    }

    /// Components equal as data, up to the morphism precision.
    pub fn same_comps(&self, other: &Morphism) -> bool {
        let p = min_precision(self.precision, other.precision);
        self.comps.len() == other.comps.len()
            && self
                .comps
                .iter()
                .zip(&other.comps)
                .all(|(a, b)| trunc(a, p) == trunc(b, p))
    }

    /// Every component square with a determinant that is a unit at the
    /// origin.
    pub fn is_isomorphism(&self) -> bool {
        self.source.rank() == self.target.rank()
            && self.comps.iter().all(|c| {
                c.constant_part()
                    .det()
                    .map(|d| !d.is_zero())
                    .unwrap_or(false)
            })
    }

    /// Inverse morphism. Exact when every component is a constant matrix,
    /// otherwise computed modulo degree `n`.
    pub fn inverse(&self, n: u32) -> Result<Morphism> {
        if !self.is_isomorphism() {
            return Err(Error::NotUnit("morphism is not invertible at the origin".into()));
        }
        let constant = self.comps.iter().all(|c| c.entries().all(Polynomial::is_constant));
        let comps = if constant {
            self.comps
                .iter()
                .map(|c| Ok(PolyMatrix::from_field(c.ring(), &c.constant_part().inverse()?)))
                .collect::<Result<Vec<_>>>()?
        } else {
            self.comps
                .iter()
                .map(|c| c.jet_inverse(n))
                .collect::<Result<Vec<_>>>()?
        };
        let out = Morphism::new(self.target.clone(), self.source.clone(), comps)?;
        Ok(if constant {
            out.with_precision(self.precision)
        } else {
            out.with_precision(Some(n))
        })
    }

    /// Replace `α_k` by `A α_k B`, adjusting source and target so that the
    /// result is again a morphism:
    /// the source gets `φ_k B, B^{-1} φ_{k+1}` and the target
    /// `φ'_k A^{-1}, A φ'_{k+1}`.
    ///
    /// Inverses are exact for constant `A`, `B`; otherwise they are taken
    /// modulo degree `n` and the outputs carry that precision.
    pub fn conjugate_component(
        &self,
        k: i64,
        a: &PolyMatrix,
        b: &PolyMatrix,
        n: u32,
    ) -> Result<(Morphism, MatFac, MatFac)> {
        let d = self.source.d() as i64;
        let k = k.rem_euclid(d);
        let inv = |m: &PolyMatrix| -> Result<(PolyMatrix, bool)> {
            let c = m.constant_part();
            if c.rows() != c.cols() || c.det()?.is_zero() {
                return Err(Error::NotUnit("conjugating matrix is not invertible".into()));
            }
            if m.entries().all(Polynomial::is_constant) {
                Ok((PolyMatrix::from_field(m.ring(), &c.inverse()?), true))
            } else {
                Ok((m.jet_inverse(n)?, false))
            }
        };
        let (ainv, a_exact) = inv(a)?;
        let (binv, b_exact) = inv(b)?;
        let p = if a_exact && b_exact {
            self.precision
        } else {
            min_precision(self.precision, Some(n))
        };
        let src = &self.source;
        let tgt = &self.target;
        let mut smats = src.mats().to_vec();
        smats[(k - 1).rem_euclid(d) as usize] = mul_at(src.phi(k), b, p)?;
        smats[k as usize] = mul_at(&binv, src.phi(k + 1), p)?;
        let mut tmats = tgt.mats().to_vec();
        tmats[(k - 1).rem_euclid(d) as usize] = mul_at(tgt.phi(k), &ainv, p)?;
        tmats[k as usize] = mul_at(a, tgt.phi(k + 1), p)?;
        let new_src = src.with_mats(smats)?.with_precision(p);
        let new_tgt = tgt.with_mats(tmats)?.with_precision(p);
        let mut comps = self.comps.clone();
        comps[k as usize] = mul_at(&mul_at(a, &self.comps[k as usize], p)?, b, p)?;
        let beta = Morphism::new(new_src.clone(), new_tgt.clone(), comps)?.with_precision(p);
        Ok((beta, new_src, new_tgt))
    }
}

/// Index layout of unknown matrix blocks whose entries are jets.
pub(crate) struct Layout {
    shapes: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    monos: Vec<Monomial>,
    mono_index: BTreeMap<Monomial, usize>,
    pub(crate) nvars: usize,
}

/// All exponent vectors supported on `vars` with total degree `< n`.
pub(crate) fn monomials_below(nvars: usize, vars: &[usize], n: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one(nvars)];
    let mut frontier = out.clone();
    for _ in 1..n {
        let mut next = BTreeSet::new();
        for m in &frontier {
            for &v in vars {
                let mut e = m.0.clone();
                e[v] += 1;
                next.insert(Monomial(e));
            }
        }
        frontier = next.into_iter().collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

impl Layout {
    pub(crate) fn new(shapes: Vec<(usize, usize)>, monos: Vec<Monomial>) -> Layout {
        let mut offsets = Vec::with_capacity(shapes.len());
        let mut acc = 0;
        for &(r, c) in &shapes {
            offsets.push(acc);
            acc += r * c * monos.len();
        }
        let mono_index = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Layout {
            shapes,
            offsets,
            nvars: acc,
            monos,
            mono_index,
        }
    }

    fn index(&self, block: usize, r: usize, c: usize, mono: usize) -> usize {
        let cols = self.shapes[block].1;
        self.offsets[block] + (r * cols + c) * self.monos.len() + mono
    }

    /// Assemble the blocks described by a solution vector.
    pub(crate) fn blocks(&self, ring: &Ring, x: &[CycloElem]) -> Vec<PolyMatrix> {
        self.shapes
            .iter()
            .enumerate()
            .map(|(b, &(rows, cols))| {
                let mut m = PolyMatrix::zeros(ring, rows, cols);
                for r in 0..rows {
                    for c in 0..cols {
                        let mut p = ring.zero();
                        for (mi, mono) in self.monos.iter().enumerate() {
                            let v = &x[self.index(b, r, c, mi)];
                            if !v.is_zero() {
                                p = &p + &Polynomial::monomial(ring, mono.clone(), v.clone());
                            }
                        }
                        m.set(r, c, p);
                    }
                }
                m
            })
            .collect()
    }

    /// Coordinates of concrete blocks, or `None` if a term falls outside
    /// the layout.
    pub(crate) fn coords(&self, field: &crate::cyclo::CycloField, blocks: &[PolyMatrix]) -> Option<Vec<CycloElem>> {
        let mut x = vec![field.zero(); self.nvars];
        for (b, m) in blocks.iter().enumerate() {
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    for (mono, v) in m.get(r, c).terms() {
                        let mi = *self.mono_index.get(mono)?;
                        x[self.index(b, r, c, mi)] = v.clone();
                    }
                }
            }
        }
        Some(x)
    }
}

/// One summand `coeff · L · U_block · R` of a matrix equation.
pub(crate) struct LinearTerm<'a> {
    pub left: Option<&'a PolyMatrix>,
    pub block: usize,
    pub right: Option<&'a PolyMatrix>,
    pub negate: bool,
}

/// Impose `Σ terms = 0` coefficientwise in every degree `< bound`.
pub(crate) fn add_matrix_equation(
    sys: &mut SparseSystem,
    layout: &Layout,
    ring: &Ring,
    terms: &[LinearTerm<'_>],
    out_rows: usize,
    out_cols: usize,
    bound: u32,
) {
    let one = ring.one();
    let mut eqs: BTreeMap<(usize, usize, Monomial), SparseRow> = BTreeMap::new();
    for t in terms {
        let (rows, cols) = layout.shapes[t.block];
        for r in 0..rows {
            for c in 0..cols {
                for a in 0..out_rows {
                    let l = match t.left {
                        Some(m) => m.get(a, r),
                        None if a == r => &one,
                        None => continue,
                    };
                    if l.is_zero() {
                        continue;
                    }
                    for b in 0..out_cols {
                        let rr = match t.right {
                            Some(m) => m.get(c, b),
                            None if b == c => &one,
                            None => continue,
                        };
                        if rr.is_zero() {
                            continue;
                        }
                        let lr = l * rr;
                        for (mi, mono) in layout.monos.iter().enumerate() {
                            let var = layout.index(t.block, r, c, mi);
                            for (m2, v) in lr.terms() {
                                let deg = mono.degree() + m2.degree();
                                if deg >= bound {
                                    continue;
                                }
                                let key = Monomial(mono.0.iter().zip(&m2.0).map(|(x, y)| x + y).collect());
                                let v = if t.negate { -v } else { v.clone() };
                                let row = eqs.entry((a, b, key)).or_default();
                                let e = row.entry(var).or_insert_with(|| ring.field().zero());
                                *e = &*e + &v;
                            }
                        }
                    }
                }
            }
        }
    }
    for (_, row) in eqs {
        sys.add_equation(row);
    }
}

/// Spanning set of the jet-level solutions of the intertwining equations.
#[derive(Debug)]
pub struct JetHomBasis {
    pub precision: u32,
    /// Degree below which the equations are imposed.
    pub equation_precision: u32,
    pub source: MatFac,
    pub target: MatFac,
    pub basis: Vec<Vec<PolyMatrix>>,
    layout_vars: Vec<usize>,
    system: SparseSystem,
}

impl JetHomBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis elements as morphisms at the basis precision.
    pub fn morphisms(&self) -> Result<Vec<Morphism>> {
        self.basis
            .iter()
            .map(|comps| {
                Ok(Morphism::new(self.source.clone(), self.target.clone(), comps.clone())?
                    .with_precision(Some(self.precision)))
            })
            .collect()
    }

    fn layout(&self) -> Layout {
        let (n, m) = (self.source.rank(), self.target.rank());
        let monos = monomials_below(self.source.ring().nvars(), &self.layout_vars, self.precision);
        Layout::new(vec![(m, n); self.source.d()], monos)
    }

    /// Whether the truncation of `alpha` lies in the span of the basis.
    pub fn contains(&self, alpha: &Morphism) -> bool {
        let comps: Vec<PolyMatrix> = alpha.comps().iter().map(|c| c.truncate(self.precision)).collect();
        match self.layout().coords(self.source.ring().field(), &comps) {
            Some(x) => self.system.satisfied_by(&x),
            None => false,
        }
    }
}

/// Solve the intertwining equations for jets of degree `< n`.
///
/// Unknowns are the coefficients of every entry of every `α_k` in the
/// variables occurring in `X` or `X2`. The equations are imposed in all
/// degrees `< n + ν`, where `ν` is the least order of a nonzero entry of
/// the `φ`'s; the truncation of any genuine morphism satisfies them.
pub fn hom_space_jets(x: &MatFac, x2: &MatFac, n: u32) -> Result<JetHomBasis> {
    if x.ring() != x2.ring() {
        return Err(Error::RingMismatch);
    }
    if x.d() != x2.d() || x.f() != x2.f() {
        return Err(Error::Incompatible("factorizations of different data".into()));
    }
    let ring = x.ring();
    let d = x.d();
    let vars: Vec<usize> = x.support().union(&x2.support()).copied().collect();
    let monos = monomials_below(ring.nvars(), &vars, n);
    let layout = Layout::new(vec![(x2.rank(), x.rank()); d], monos);
    let nu = x.min_entry_order().min(x2.min_entry_order());
    let bound = n + nu;
    let mut sys = SparseSystem::new(ring.field(), layout.nvars);
    for k in 0..d as i64 {
        let km1 = (k - 1).rem_euclid(d as i64) as usize;
        let terms = [
            LinearTerm {
                left: None,
                block: km1,
                right: Some(x.phi(k)),
                negate: false,
            },
            LinearTerm {
                left: Some(x2.phi(k)),
                block: k as usize,
                right: None,
                negate: true,
            },
        ];
        add_matrix_equation(&mut sys, &layout, ring, &terms, x2.rank(), x.rank(), bound);
    }
    let basis = sys
        .nullspace()
        .iter()
        .map(|v| layout.blocks(ring, v))
        .collect();
    Ok(JetHomBasis {
        precision: n,
        equation_precision: bound,
        source: x.clone(),
        target: x2.clone(),
        basis,
        layout_vars: vars,
        system: sys,
    })
}

/// Outcome of the jet-level isomorphism search.
#[derive(Clone, Debug)]
pub enum IsoSearch {
    /// No jet solution is invertible at the origin, so no isomorphism
    /// exists. `component` is a degree whose constant part is singular for
    /// every solution.
    Refuted { precision: u32, component: Option<usize> },
    /// A jet solution invertible at the origin was found. It need not lift
    /// to a genuine morphism.
    Candidate { precision: u32, witness: Box<Morphism> },
    Undetermined { precision: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsoVerdict {
    pub verdict: String,
    pub precision: u32,
}

impl IsoSearch {
    pub fn is_refuted(&self) -> bool {
        matches!(self, IsoSearch::Refuted { .. })
    }

    pub fn summary(&self) -> IsoVerdict {
        let (verdict, precision) = match self {
            IsoSearch::Refuted { precision, .. } => ("refuted", *precision),
            IsoSearch::Candidate { precision, .. } => ("candidate iso", *precision),
            IsoSearch::Undetermined { precision } => ("undetermined", *precision),
        };
        IsoVerdict {
            verdict: format!("{verdict} at precision {precision}"),
            precision,
        }
    }
}

const RANDOM_TRIALS: usize = 24;

/// Decide at the level of constant terms whether an isomorphism `X → X2`
/// could exist.
///
/// A random combination of the jet basis invertible at the origin is a
/// candidate. Failing that, for each degree `k` the determinant of the
/// generic combination of constant parts is expanded symbolically; if it
/// vanishes identically no isomorphism exists.
pub fn refute_iso(x: &MatFac, x2: &MatFac, n: u32) -> Result<IsoSearch> {
    if x.rank() != x2.rank() {
        return Ok(IsoSearch::Refuted {
            precision: n,
            component: None,
        });
    }
    let hom = hom_space_jets(x, x2, n)?;
    let field = x.ring().field().clone();
    let d = x.d();
    if x.rank() == 0 {
        let w = Morphism::zero(x, x2)?;
        return Ok(IsoSearch::Candidate {
            precision: n,
            witness: Box::new(w),
        });
    }
    if hom.basis.is_empty() {
        return Ok(IsoSearch::Refuted {
            precision: n,
            component: Some(0),
        });
    }
    let consts: Vec<Vec<FieldMatrix>> = hom
        .basis
        .iter()
        .map(|b| b.iter().map(PolyMatrix::constant_part).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d61_7466);
    for _ in 0..RANDOM_TRIALS {
        let t: Vec<CycloElem> = (0..hom.basis.len())
            .map(|_| field.from_int(rng.gen_range(-40..=40)))
            .collect();
        let ok = (0..d).all(|k| {
            let mut m = FieldMatrix::zeros(&field, x2.rank(), x.rank());
            for (tb, cb) in t.iter().zip(&consts) {
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        let v = m.get(i, j) + &(tb * cb[k].get(i, j));
                        m.set(i, j, v);
                    }
                }
            }
            m.det().map(|v| !v.is_zero()).unwrap_or(false)
        });
        if ok {
            let mut comps = vec![PolyMatrix::zeros(x.ring(), x2.rank(), x.rank()); d];
            for (tb, b) in t.iter().zip(&hom.basis) {
                for k in 0..d {
                    comps[k] = comps[k].add(&b[k].scale(tb))?;
                }
            }
            let witness = Morphism::new(x.clone(), x2.clone(), comps)?.with_precision(Some(n));
            return Ok(IsoSearch::Candidate {
                precision: n,
                witness: Box::new(witness),
            });
        }
    }
    // symbolic determinant in fresh parameters
    let names: Vec<String> = (0..hom.basis.len()).map(|i| format!("t{i}")).collect();
    let tring = Ring::new(field.clone(), &names)?;
    for k in 0..d {
        let mut m = PolyMatrix::zeros(&tring, x2.rank(), x.rank());
        for (b, cb) in consts.iter().enumerate() {
            let tv = tring.var_at(b);
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let c = cb[k].get(i, j);
                    if !c.is_zero() {
                        let v = m.get(i, j) + &tv.scale(c);
                        m.set(i, j, v);
                    }
                }
            }
        }
        if m.det()?.is_zero() {
            return Ok(IsoSearch::Refuted {
                precision: n,
                component: Some(k),
            });
        }
    }
    Ok(IsoSearch::Undetermined { precision: n })
}

/// Result of splitting an idempotent endomorphism.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub rank: usize,
    pub precision: u32,
    /// `e(X)` modulo degree `precision`.
    pub image: MatFac,
    /// `(1-e)(X)` modulo degree `precision`.
    pub complement: MatFac,
    /// Isomorphism `image ⊕ complement → X` with components `P_k`.
    pub witness: Morphism,
    /// Whether the conjugated matrices are block diagonal modulo the
    /// precision.
    pub block_diagonal: bool,
}

/// Split `X` along an idempotent `e`.
///
/// For each `k` the columns of `e_k` and of `1 - e_k` that are pivots of
/// their constant parts (leftmost first) form `P_k`, invertible at the
/// origin. Conjugating gives `P_{k-1}^{-1} φ_k P_k` block diagonal; the
/// diagonal blocks are the two summands.
pub fn split_idempotent(x: &MatFac, e: &Morphism, n: u32) -> Result<Splitting> {
    if !same_factorization(e.source(), x) || !same_factorization(e.target(), x) {
        return Err(Error::Incompatible("e is not an endomorphism of X".into()));
    }
    if !e.is_morphism()? {
        return Err(Error::Hypothesis("e does not intertwine".into()));
    }
    if !e.compose(e)?.same_comps(e) {
        return Err(Error::Hypothesis("e is not idempotent".into()));
    }
    let ring = x.ring();
    let dim = x.rank();
    let d = x.d();
    let id = PolyMatrix::identity(ring, dim);
    let mut ranks = Vec::with_capacity(d);
    let mut ps = Vec::with_capacity(d);
    for k in 0..d {
        let ek = &e.comps()[k];
        let fk = id.sub(ek)?;
        let (_, piv_e) = ek.constant_part().rref();
        let (_, piv_f) = fk.constant_part().rref();
        ranks.push(piv_e.len());
        let all: Vec<usize> = (0..dim).collect();
        let p = ek.select(&all, &piv_e).hcat(&fk.select(&all, &piv_f))?;
        if p.cols() != dim {
            return Err(Error::Hypothesis(format!(
                "component {k} does not split at the origin"
            )));
        }
        ps.push(p);
    }
    let r = ranks[0];
    if ranks.iter().any(|&rk| rk != r) {
        return Err(Error::Hypothesis(format!(
            "idempotent components have different ranks at the origin: {ranks:?}"
        )));
    }
    let pinv = ps
        .iter()
        .map(|p| p.jet_inverse(n))
        .collect::<Result<Vec<_>>>()?;
    let mut conj = Vec::with_capacity(d);
    // stored in tuple order: mats[p] = φ_{p+1}
    for slot in 0..d {
        let k = (slot + 1) % d;
        let km1 = (k + d - 1) % d;
        let c = pinv[km1]
            .mul_trunc(x.phi(k as i64), n)?
            .mul_trunc(&ps[k], n)?;
        conj.push(c);
    }
    let block_diagonal = conj.iter().all(|c| {
        c.block(0, r, r, dim - r).is_zero() && c.block(r, 0, dim - r, r).is_zero()
    });
    let img: Vec<PolyMatrix> = conj.iter().map(|c| c.block(0, 0, r, r)).collect();
    let cmp: Vec<PolyMatrix> = conj.iter().map(|c| c.block(r, r, dim - r, dim - r)).collect();
    let image = MatFac::new(x.f().clone(), img)?.with_precision(Some(n));
    let complement = MatFac::new(x.f().clone(), cmp)?.with_precision(Some(n));
    let sum = image.direct_sum(&complement)?;
    let witness = Morphism::new(sum, x.clone().with_precision(Some(n)), ps)?.with_precision(Some(n));
    Ok(Splitting {
        rank: r,
        precision: n,
        image,
        complement,
        witness,
        block_diagonal,
    })
}

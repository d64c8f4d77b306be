//! d-fold matrix factorizations.

use serde::Serialize;

use crate::cyclo::CycloElem;
use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::morphism::Morphism;
use crate::poly::{Polynomial, Ring};

/// A cyclic tuple `(φ_1, ..., φ_{d-1}, φ_0)` of `n×n` matrices with every
/// cyclic product of all `d` factors equal to `f·I`.
///
/// Matrices are stored in tuple order, so `mats[p]` is `φ_{(p+1) mod d}`.
/// When `precision` is set the data is only meaningful modulo monomials of
/// that total degree, and so are the identities it satisfies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatFac {
    ring: Ring,
    d: usize,
    n: usize,
    f: Polynomial,
    mats: Vec<PolyMatrix>,
    precision: Option<u32>,
}

/// Outcome of checking one cyclic product `φ_i φ_{i+1} ··· φ_{i-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub index: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub precision: Option<u32>,
    /// In tuple order `1, 2, ..., d-1, 0`.
    pub checks: Vec<IdentityCheck>,
}

impl ValidationReport {
    pub fn failing(&self) -> Vec<usize> {
        self.checks.iter().filter(|c| !c.holds).map(|c| c.index).collect()
    }
}

/// A square matrix presenting a module over `Q/(f)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationMatrix {
    pub matrix: PolyMatrix,
    pub f: Polynomial,
}

impl PresentationMatrix {
    /// If `det = ±f^s`, returns `(sign, s)`.
    pub fn det_as_power_of_f(&self) -> Result<Option<(i8, u32)>> {
        let det = self.matrix.det()?;
        Ok(signed_power_of(&det, &self.f))
    }
}

/// Decide whether `p = ±q^s` for some `s ≥ 0`.
pub fn signed_power_of(p: &Polynomial, q: &Polynomial) -> Option<(i8, u32)> {
    if p.is_zero() || q.is_zero() {
        return None;
    }
    let (Some(dp), Some(dq)) = (p.total_degree(), q.total_degree()) else {
        return None;
    };
    let s = match dq {
        0 => 0,
        _ if dp % dq != 0 => return None,
        _ => dp / dq,
    };
    let qs = q.pow(s);
    if &qs == p {
        Some((1, s))
    } else if &(-&qs) == p {
        Some((-1, s))
    } else {
        None
    }
}

impl MatFac {
    /// Build from matrices in tuple order `(φ_1, ..., φ_{d-1}, φ_0)`.
    ///
    /// Shapes are checked here; the defining identity is checked by
    /// [`MatFac::validate`].
    pub fn new(f: Polynomial, mats: Vec<PolyMatrix>) -> Result<MatFac> {
        let d = mats.len();
        if d < 2 {
            return Err(Error::Shape(format!("need at least two matrices, got {d}")));
        }
        let ring = f.ring().clone();
        let n = mats[0].rows();
        for (p, m) in mats.iter().enumerate() {
            if m.ring() != &ring {
                return Err(Error::RingMismatch);
            }
            if m.rows() != n || m.cols() != n {
                return Err(Error::Shape(format!(
                    "matrix #{} is {}x{}, expected {n}x{n}",
                    p + 1,
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(MatFac {
            ring,
            d,
            n,
            f,
            mats,
            precision: None,
        })
    }

    /// Parse matrices given as row-major expression strings.
    pub fn parse<S: AsRef<str>>(ring: &Ring, f: &str, mats: &[Vec<Vec<S>>]) -> Result<MatFac> {
        let f = ring.parse(f)?;
        let mats = mats
            .iter()
            .map(|m| PolyMatrix::parse(ring, m))
            .collect::<Result<Vec<_>>>()?;
        MatFac::new(f, mats)
    }

    /// Rank-one factorization from a list of entries `(f_1, ..., f_{d-1}, f_0)`
    /// with `f` their product.
    pub fn rank_one(entries: &[Polynomial]) -> Result<MatFac> {
        let first = entries
            .first()
            .ok_or_else(|| Error::Shape("no entries".into()))?;
        let ring = first.ring().clone();
        let mut f = ring.one();
        for e in entries {
            f = f.try_mul(e)?;
        }
        let mats = entries
            .iter()
            .map(|e| PolyMatrix::scalar(&ring, 1, e))
            .collect();
        MatFac::new(f, mats)
    }

    /// Attach a jet precision.
    pub fn with_precision(mut self, n: Option<u32>) -> MatFac {
        if let Some(n) = n {
            self.mats = self.mats.iter().map(|m| m.truncate(n)).collect();
        }
        self.precision = n;
        self
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> &Polynomial {
        &self.f
    }

    pub fn precision(&self) -> Option<u32> {
        self.precision
    }

    /// Matrices in tuple order.
    pub fn mats(&self) -> &[PolyMatrix] {
        &self.mats
    }

    /// `φ_k`, index taken modulo `d`.
    pub fn phi(&self, k: i64) -> &PolyMatrix {
        let d = self.d as i64;
        &self.mats[(k - 1).rem_euclid(d) as usize]
    }

    /// `φ_i φ_{i+1} ··· φ_{i-1}`.
    pub fn cyclic_product(&self, i: i64) -> Result<PolyMatrix> {
        let mut acc = self.phi(i).clone();
        for s in 1..self.d as i64 {
            acc = match self.precision {
                Some(n) => acc.mul_trunc(self.phi(i + s), n)?,
                None => acc.mul(self.phi(i + s))?,
            };
        }
        Ok(acc)
    }

    fn target_scalar(&self) -> Polynomial {
        match self.precision {
            Some(n) => self.f.truncate(n),
            None => self.f.clone(),
        }
    }

    /// Check all `d` cyclic products against `f·I`.
    pub fn validate(&self) -> ValidationReport {
        let target = self.target_scalar();
        let checks: Vec<IdentityCheck> = (1..=self.d)
            .map(|p| {
                let i = p % self.d;
                let holds = self
                    .cyclic_product(i as i64)
                    .map(|m| m.is_scalar(&target))
                    .unwrap_or(false);
                IdentityCheck { index: i, holds }
            })
            .collect();
        ValidationReport {
            passed: checks.iter().all(|c| c.holds),
            precision: self.precision,
            checks,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().passed
    }

    /// `T^i X`; `T(φ_1, ..., φ_0) = (φ_2, ..., φ_0, φ_1)`.
    pub fn shift(&self, i: i64) -> MatFac {
        let mut out = self.clone();
        out.mats.rotate_left(i.rem_euclid(self.d as i64) as usize);
        out
    }

    /// Whether `TX = X` as data.
    pub fn is_shift_symmetric(&self) -> bool {
        self.mats.windows(2).all(|w| w[0] == w[1])
    }

    pub fn direct_sum(&self, other: &MatFac) -> Result<MatFac> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        if self.d != other.d {
            return Err(Error::Incompatible(format!("d = {} vs {}", self.d, other.d)));
        }
        if self.f != other.f {
            return Err(Error::Incompatible(format!(
                "f = {} vs {}",
                self.f, other.f
            )));
        }
        let mats = self
            .mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| PolyMatrix::block_diag(&self.ring, &[a, b]))
            .collect::<Result<Vec<_>>>()?;
        Ok(MatFac {
            ring: self.ring.clone(),
            d: self.d,
            n: self.n + other.n,
            f: self.f.clone(),
            mats,
            precision: min_precision(self.precision, other.precision),
        })
    }

    /// Direct sum of a nonempty list.
    pub fn direct_sum_all(parts: &[MatFac]) -> Result<MatFac> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| Error::Shape("empty direct sum".into()))?;
        rest.iter().try_fold(first.clone(), |acc, p| acc.direct_sum(p))
    }

    /// The rank-zero factorization of `f`.
    pub fn zero_rank(ring: &Ring, d: usize, f: &Polynomial) -> MatFac {
        MatFac {
            ring: ring.clone(),
            d,
            n: 0,
            f: f.clone(),
            mats: vec![PolyMatrix::zeros(ring, 0, 0); d],
            precision: None,
        }
    }

    /// `(c_1 φ_1, ..., c_0 φ_0)` together with the isomorphism to `X` whose
    /// components are `γ_k = c_1 c_2 ··· c_k`.
    ///
    /// `c` is given in tuple order and must multiply to one.
    pub fn scale_by_units(&self, c: &[CycloElem]) -> Result<(MatFac, Morphism)> {
        if c.len() != self.d {
            return Err(Error::Shape(format!("need {} scalars", self.d)));
        }
        let field = self.ring.field();
        let mut prod = field.one();
        for ci in c {
            prod = prod.try_mul(ci)?;
        }
        if !prod.is_one() {
            return Err(Error::Hypothesis(format!(
                "scalars multiply to {prod}, not 1"
            )));
        }
        let mut scaled = self.clone();
        for (m, ci) in scaled.mats.iter_mut().zip(c) {
            *m = m.scale(ci);
        }
        let mut gammas = vec![field.one()];
        for ci in &c[..self.d - 1] {
            let next = gammas.last().unwrap() * ci;
            gammas.push(next);
        }
        let comps = gammas
            .iter()
            .map(|g| PolyMatrix::scalar(&self.ring, self.n, &self.ring.constant(g.clone())))
            .collect();
        let witness = Morphism::new(scaled.clone(), self.clone(), comps)?;
        Ok((scaled, witness))
    }

    /// Every entry in the maximal ideal.
    pub fn is_reduced(&self) -> bool {
        self.mats.iter().all(PolyMatrix::is_reduced)
    }

    /// `𝒫_i = T^i(f, 1, ..., 1)`.
    pub fn projective(ring: &Ring, d: usize, f: &Polynomial, i: i64) -> Result<MatFac> {
        if d < 2 {
            return Err(Error::Shape("d must be at least 2".into()));
        }
        let mut entries = vec![ring.one(); d];
        entries[0] = f.clone();
        let mats = entries.iter().map(|e| PolyMatrix::scalar(ring, 1, e)).collect();
        Ok(MatFac::new(f.clone(), mats)?.shift(i))
    }

    /// `φ_k φ_{k+1} ··· φ_{k+ℓ-1}` as a presentation matrix.
    pub fn cokernel_presentation(&self, k: i64, l: usize) -> Result<PresentationMatrix> {
        if l == 0 || l > self.d {
            return Err(Error::OutOfRange(format!("ℓ = {l} not in 1..={}", self.d)));
        }
        let matrix = PolyMatrix::product((0..l as i64).map(|s| self.phi(k + s)))?;
        Ok(PresentationMatrix {
            matrix,
            f: self.f.clone(),
        })
    }

    /// Set the named variables to zero in every entry and in `f`.
    pub fn reduce_mod_vars<S: AsRef<str>>(&self, kill: &[S]) -> Result<MatFac> {
        let idx = self.ring.indices(kill)?;
        Ok(self.reduce_mod_indices(&idx))
    }

    pub fn reduce_mod_indices(&self, kill: &[usize]) -> MatFac {
        MatFac {
            ring: self.ring.clone(),
            d: self.d,
            n: self.n,
            f: self.f.reduce_mod_indices(kill),
            mats: self.mats.iter().map(|m| m.reduce_mod_indices(kill)).collect(),
            precision: self.precision,
        }
    }

    /// `1 + ` the largest total degree of an entry.
    pub fn default_precision(&self) -> u32 {
        1 + self.mats.iter().map(PolyMatrix::max_degree).max().unwrap_or(0)
    }

    /// Least order of a nonzero entry, `0` when some entry is a unit or
    /// everything vanishes.
    pub fn min_entry_order(&self) -> u32 {
        self.mats
            .iter()
            .filter_map(PolyMatrix::min_order)
            .min()
            .unwrap_or(0)
    }

    /// Variables occurring in `f` or an entry.
    pub fn support(&self) -> std::collections::BTreeSet<usize> {
        let mut s = self.f.support();
        for m in &self.mats {
            for p in m.entries() {
                s.extend(p.support());
            }
        }
        s
    }

    pub fn embed(&self, target: &Ring) -> Result<MatFac> {
        Ok(MatFac {
            ring: target.clone(),
            d: self.d,
            n: self.n,
            f: self.f.embed(target)?,
            mats: self
                .mats
                .iter()
                .map(|m| m.embed(target))
                .collect::<Result<Vec<_>>>()?,
            precision: self.precision,
        })
    }

    /// Replace the matrices, keeping everything else.
    pub(crate) fn with_mats(&self, mats: Vec<PolyMatrix>) -> Result<MatFac> {
        let mut out = MatFac::new(self.f.clone(), mats)?;
        out.precision = self.precision;
        Ok(out)
    }

    pub fn to_strings(&self) -> Vec<Vec<Vec<String>>> {
        self.mats.iter().map(PolyMatrix::to_strings).collect()
    }
}

pub(crate) fn min_precision(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

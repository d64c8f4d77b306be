//! Block diagonalization of tensors of shift-symmetric factorizations by
//! circulant root-of-unity base changes.
//!
//! Everything here is exact: the base changes are constant matrices, so
//! their inverses are computed over the field.

use serde::Serialize;

use crate::cyclo::{CycloElem, CycloField};
use crate::error::{Error, Result};
use crate::matfac::MatFac;
use crate::matrix::{FieldMatrix, PolyMatrix};
use crate::morphism::Morphism;
use crate::tensor::tensor;

/// A primitive `2d`-th root `ω`, with `ζ = ω²` and `1/d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaContext {
    pub d: usize,
    pub omega: CycloElem,
    pub zeta: CycloElem,
    pub inv_d: CycloElem,
    powers: Vec<CycloElem>,
}

/// `𝔭(m) = -m² + dm`.
pub fn frak_p(d: usize, m: i64) -> i64 {
    -m * m + d as i64 * m
}

impl OmegaContext {
    /// From an explicit primitive `2d`-th root of unity.
    pub fn from_omega(omega: &CycloElem, d: usize) -> Result<OmegaContext> {
        if d < 2 {
            return Err(Error::Hypothesis(format!("d = {d} < 2")));
        }
        if !omega.is_primitive_root(2 * d as u32) {
            return Err(Error::NotPrimitiveRoot(omega.to_string(), 2 * d as u32));
        }
        let field = omega.field();
        let mut powers = Vec::with_capacity(2 * d);
        let mut acc = field.one();
        for _ in 0..2 * d {
            powers.push(acc.clone());
            acc = &acc * omega;
        }
        Ok(OmegaContext {
            d,
            omega: omega.clone(),
            zeta: omega * omega,
            inv_d: field.from_int(d as i64).inverse()?,
            powers,
        })
    }

    /// Odd `d` only: `ω = -ζ`, so the tensor root is `ω² = ζ²`.
    pub fn from_zeta(zeta: &CycloElem, d: usize) -> Result<OmegaContext> {
        if d.is_multiple_of(2) {
            return Err(Error::Hypothesis(format!(
                "d = {d} is even; a primitive {}-th root must be supplied",
                2 * d
            )));
        }
        if !zeta.is_primitive_root(d as u32) {
            return Err(Error::NotPrimitiveRoot(zeta.to_string(), d as u32));
        }
        OmegaContext::from_omega(&-zeta, d)
    }

    /// `ω = ζ_m^{m/2d}` for even `d`, `ω = -ζ_m^{m/d}` for odd `d`.
    pub fn canonical(field: &CycloField, d: usize) -> Result<OmegaContext> {
        if d.is_multiple_of(2) {
            OmegaContext::from_omega(&field.primitive_root(2 * d as u32)?, d)
        } else {
            OmegaContext::from_zeta(&field.primitive_root(d as u32)?, d)
        }
    }

    pub fn field(&self) -> &CycloField {
        self.omega.field()
    }

    /// `ω^e` for any integer `e`.
    pub fn pow(&self, e: i64) -> &CycloElem {
        &self.powers[e.rem_euclid(2 * self.d as i64) as usize]
    }

    /// The same context with `ω` replaced by `ω^{-1}`.
    pub fn inverted(&self) -> OmegaContext {
        OmegaContext::from_omega(self.pow(-1), self.d).expect("inverse of a primitive root")
    }
}

fn sum_of_powers(ctx: &OmegaContext, exps: impl Iterator<Item = i64>) -> CycloElem {
    exps.fold(ctx.field().zero(), |acc, e| &acc + ctx.pow(e))
}

/// `Σ_{j ∈ Z_d} ω^{-j² + tj}` and its partner `Σ_l ω^{l² - tl}`.
pub fn root_sum_pair(ctx: &OmegaContext, t: i64) -> Result<(CycloElem, CycloElem)> {
    let d = ctx.d as i64;
    if (t + d).rem_euclid(2) != 0 {
        return Err(Error::Hypothesis(format!("t + d = {} is odd", t + d)));
    }
    let s = sum_of_powers(ctx, (0..d).map(|j| -j * j + t * j));
    let c = sum_of_powers(ctx, (0..d).map(|l| l * l - t * l));
    Ok((s, c))
}

/// `Σ_{j ∈ Z_d} ω^{-j² + tj}`; requires `t + d` even.
///
/// The product with the partner sum is checked to equal `d`, which shows
/// the value is a unit.
pub fn root_sum(ctx: &OmegaContext, t: i64) -> Result<CycloElem> {
    let (s, c) = root_sum_pair(ctx, t)?;
    if &s * &c != ctx.field().from_int(ctx.d as i64) {
        return Err(Error::Hypothesis(format!(
            "root sum identity failed for d = {}, t = {t}",
            ctx.d
        )));
    }
    Ok(s)
}

/// The circulant matrix `α_k(i,j) = ω^{𝔭(j-i-k)}`.
pub fn alpha_matrix(ctx: &OmegaContext, k: i64) -> FieldMatrix {
    let d = ctx.d;
    let mut a = FieldMatrix::zeros(ctx.field(), d, d);
    for i in 0..d {
        for j in 0..d {
            let m = j as i64 - i as i64 - k;
            a.set(i, j, ctx.pow(frak_p(d, m)).clone());
        }
    }
    a
}

/// Invertibility evidence for `α_k`.
#[derive(Clone, Debug)]
pub struct AlphaReport {
    pub k: i64,
    pub matrix: FieldMatrix,
    /// `Σ_j ω^{𝔭(j-1-k) + 2s(j-1)}` for `s = 1, ..., d`.
    pub factors: Vec<CycloElem>,
    pub det: CycloElem,
    /// Each factor is `ω^{-k²-dk}` times a root sum with `t = 2k + 2s + d`,
    /// and the product of factors equals the determinant.
    pub factors_match: bool,
    pub invertible: bool,
}

pub fn alpha_report(ctx: &OmegaContext, k: i64) -> Result<AlphaReport> {
    let d = ctx.d as i64;
    let matrix = alpha_matrix(ctx, k);
    let mut factors = Vec::with_capacity(ctx.d);
    let mut factors_match = true;
    let mut prod = ctx.field().one();
    for s in 1..=d {
        let fac = sum_of_powers(ctx, (1..=d).map(|j| frak_p(ctx.d, j - 1 - k) + 2 * s * (j - 1)));
        let via_lemma = ctx.pow(-k * k - d * k) * &root_sum(ctx, 2 * k + 2 * s + d)?;
        factors_match &= via_lemma == fac;
        prod = &prod * &fac;
        factors.push(fac);
    }
    let det = matrix.det()?;
    factors_match &= det == prod;
    let invertible = factors.iter().all(|f| !f.is_zero()) && !det.is_zero();
    Ok(AlphaReport {
        k,
        matrix,
        factors,
        det,
        factors_match,
        invertible,
    })
}

/// Output of [`block_diagonalize`].
#[derive(Clone, Debug)]
pub struct BlockDiagonalization {
    /// The `d×d` block matrix with `ω^{2(i-1)} B` on the diagonal and `A`
    /// on the cyclic superdiagonal.
    pub phi: PolyMatrix,
    /// `α_k ⊗ 1`, for `k = 0, ..., d-1`.
    pub alphas: Vec<PolyMatrix>,
    /// `diag_blocks[k][i-1] = A - ω^{2k+2(i-1)-1} B`.
    pub diag_blocks: Vec<Vec<PolyMatrix>>,
    /// `k` for which `α_{k-1} Φ = Φ'_k α_k` holds.
    pub verified: Vec<bool>,
}

impl BlockDiagonalization {
    pub fn passed(&self) -> bool {
        self.verified.iter().all(|&b| b)
    }

    /// `Φ'_k` as one block diagonal matrix.
    pub fn diagonal(&self, k: usize) -> Result<PolyMatrix> {
        let ring = self.phi.ring();
        PolyMatrix::block_diag(ring, &self.diag_blocks[k].iter().collect::<Vec<_>>())
    }
}

/// Conjugate the block matrix built from commuting `A`, `B` into block
/// diagonal form.
pub fn block_diagonalize(ctx: &OmegaContext, a: &PolyMatrix, b: &PolyMatrix) -> Result<BlockDiagonalization> {
    if a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows() {
        return Err(Error::Shape("A and B must be square of the same size".into()));
    }
    if a.mul(b)? != b.mul(a)? {
        return Err(Error::Hypothesis("A and B do not commute".into()));
    }
    let ring = a.ring();
    let d = ctx.d;
    let r = a.rows();
    let mut phi = PolyMatrix::zeros(ring, d * r, d * r);
    for i in 0..d {
        phi.set_block(i * r, i * r, &b.scale(ctx.pow(2 * i as i64)));
        phi.set_block(i * r, ((i + 1) % d) * r, a);
    }
    let id = PolyMatrix::identity(ring, r);
    let alphas = (0..d as i64)
        .map(|k| PolyMatrix::from_field(ring, &alpha_matrix(ctx, k)).kron(&id))
        .collect::<Result<Vec<_>>>()?;
    let diag_blocks = (0..d as i64)
        .map(|k| {
            (1..=d as i64)
                .map(|i| a.sub(&b.scale(ctx.pow(2 * k + 2 * (i - 1) - 1))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = BlockDiagonalization {
        phi,
        alphas,
        diag_blocks,
        verified: Vec::new(),
    };
    for k in 0..d {
        let lhs = out.alphas[(k + d - 1) % d].mul(&out.phi)?;
        let rhs = out.diagonal(k)?.mul(&out.alphas[k])?;
        out.verified.push(lhs == rhs);
    }
    Ok(out)
}

/// Output of [`decompose_symmetric`].
#[derive(Clone, Debug)]
pub struct KnorrerDecomposition {
    pub ctx: OmegaContext,
    /// `X ⊗_{ω²} Y`.
    pub tensor: MatFac,
    /// `Z = (A - ωB, A - ω³B, ..., A - ω^{2d-1}B)`.
    pub z: MatFac,
    /// `Z ⊕ TZ ⊕ ... ⊕ T^{d-1}Z`.
    pub sum: MatFac,
    /// `X ⊗ Y → ⊕ T^i Z` with components `α_k ⊗ 1`.
    pub witness: Morphism,
    /// `⊕ T^i Z → X ⊗ Y`.
    pub inverse: Morphism,
    pub report: KnorrerReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KnorrerReport {
    pub z_valid: bool,
    pub sum_valid: bool,
    pub tensor_valid: bool,
    pub witness_is_morphism: bool,
    pub witness_is_isomorphism: bool,
    pub inverse_is_morphism: bool,
    pub round_trip_identity: bool,
    pub conjugation_identities: Vec<bool>,
}

impl KnorrerReport {
    pub fn passed(&self) -> bool {
        self.z_valid
            && self.sum_valid
            && self.tensor_valid
            && self.witness_is_morphism
            && self.witness_is_isomorphism
            && self.inverse_is_morphism
            && self.round_trip_identity
            && self.conjugation_identities.iter().all(|&b| b)
    }
}

/// `X ⊗_{ω²} Y ≅ ⊕_{i ∈ Z_d} T^i Z` for `X = (φ, ..., φ)` and
/// `Y = (ψ, ..., ψ)`.
pub fn decompose_symmetric(x: &MatFac, y: &MatFac, ctx: &OmegaContext) -> Result<KnorrerDecomposition> {
    if x.d() != ctx.d || y.d() != ctx.d {
        return Err(Error::Incompatible(format!(
            "factorizations have d = {}, {} but the context has d = {}",
            x.d(),
            y.d(),
            ctx.d
        )));
    }
    if x.ring().field() != ctx.field() {
        return Err(Error::FieldMismatch(
            x.ring().field().conductor(),
            ctx.field().conductor(),
        ));
    }
    if !x.is_shift_symmetric() {
        return Err(Error::Hypothesis("TX = X fails as data".into()));
    }
    if !y.is_shift_symmetric() {
        return Err(Error::Hypothesis("TY = Y fails as data".into()));
    }
    let ring = x.ring();
    let d = ctx.d;
    let t = tensor(x, y, &ctx.zeta)?;
    let a = x.phi(1).kron(&PolyMatrix::identity(ring, y.rank()))?;
    let b = PolyMatrix::identity(ring, x.rank()).kron(y.phi(1))?;
    let bd = block_diagonalize(ctx, &a, &b)?;
    let zmats = (1..=d as i64)
        .map(|k| a.sub(&b.scale(ctx.pow(2 * k - 1))))
        .collect::<Result<Vec<_>>>()?;
    let z = MatFac::new(t.f().clone(), zmats)?;
    let shifts: Vec<MatFac> = (0..d as i64).map(|i| z.shift(i)).collect();
    let sum = MatFac::direct_sum_all(&shifts)?;
    let witness = Morphism::new(t.clone(), sum.clone(), bd.alphas.clone())?;
    let inverse = witness.inverse(0)?;
    let round_trip_identity = inverse.compose(&witness)? == Morphism::identity(&t)
        && witness.compose(&inverse)? == Morphism::identity(&sum);
    let report = KnorrerReport {
        z_valid: z.is_valid(),
        sum_valid: sum.is_valid(),
        tensor_valid: t.is_valid(),
        witness_is_morphism: witness.is_morphism()?,
        witness_is_isomorphism: witness.is_isomorphism(),
        inverse_is_morphism: inverse.is_morphism()?,
        round_trip_identity,
        conjugation_identities: bd.verified.clone(),
    };
    Ok(KnorrerDecomposition {
        ctx: ctx.clone(),
        tensor: t,
        z,
        sum,
        witness,
        inverse,
        report,
    })
}

impl KnorrerDecomposition {
    /// The idempotent of `X ⊗ Y` projecting onto summand `T^s Z`:
    /// `e_k = α_k^{-1} D_s α_k` with `D_s` the identity on block `s`.
    pub fn projection(&self, s: usize) -> Result<Morphism> {
        let d = self.ctx.d;
        if s >= d {
            return Err(Error::OutOfRange(format!("summand {s} of {d}")));
        }
        let ring = self.tensor.ring();
        let r = self.z.rank();
        let mut dmat = PolyMatrix::zeros(ring, d * r, d * r);
        dmat.set_block(s * r, s * r, &PolyMatrix::identity(ring, r));
        let comps = (0..d)
            .map(|k| {
                self.inverse.comps()[k]
                    .mul(&dmat)?
                    .mul(&self.witness.comps()[k])
            })
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(self.tensor.clone(), self.tensor.clone(), comps)
    }
}

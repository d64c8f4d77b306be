//! MCM and Ulrich modules over `Q/(f)` from factorizations of sums of
//! products.

use num_integer::Integer;
use serde::Serialize;

use crate::claims::{self, Claim};
use crate::error::{Error, Result};
use crate::matfac::{MatFac, PresentationMatrix};
use crate::poly::{Polynomial, Ring, VarSplit};
use crate::structure::{
    coprime_rank_one_cert, propagate_strong_ind, strong_ind_consequences, Certification, SiConsequences,
    StrongIndCert,
};
use crate::tensor::tensor;

/// `f = Σ_i f_{i1} ··· f_{id}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumOfProducts {
    ring: Ring,
    factors: Vec<Vec<Polynomial>>,
    f: Polynomial,
    partition: Option<Vec<Vec<usize>>>,
}

impl SumOfProducts {
    /// Rows of factors; `f` is their sum of products.
    pub fn new(factors: Vec<Vec<Polynomial>>) -> Result<SumOfProducts> {
        let first = factors
            .first()
            .and_then(|r| r.first())
            .ok_or_else(|| Error::Shape("no factors".into()))?;
        let ring = first.ring().clone();
        if factors.len() < 2 {
            return Err(Error::Hypothesis(format!("need at least two terms, got {}", factors.len())));
        }
        let d = factors[0].len();
        if d < 2 {
            return Err(Error::Hypothesis("need at least two factors per term".into()));
        }
        if factors.iter().any(|r| r.len() != d) {
            return Err(Error::Shape("terms have different numbers of factors".into()));
        }
        let mut f = ring.zero();
        for row in &factors {
            let mut p = ring.one();
            for q in row {
                if q.ring() != &ring {
                    return Err(Error::RingMismatch);
                }
                p = p.try_mul(q)?;
            }
            f = f.try_add(&p)?;
        }
        Ok(SumOfProducts {
            ring,
            factors,
            f,
            partition: None,
        })
    }

    /// Parse each factor in `ring`.
    pub fn parse<S: AsRef<str>>(ring: &Ring, rows: &[Vec<S>]) -> Result<SumOfProducts> {
        let factors = rows
            .iter()
            .map(|r| r.iter().map(|s| ring.parse(s.as_ref())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        SumOfProducts::new(factors)
    }

    /// Also check the sum against a declared `f`.
    pub fn with_target(self, f: &Polynomial) -> Result<SumOfProducts> {
        if f != &self.f {
            return Err(Error::Hypothesis(format!("sum of products is {}, not {f}", self.f)));
        }
        Ok(self)
    }

    /// Group the `d` factors of every term into `k` products. Each group
    /// lists factor indices; together they must cover `0..d` exactly once.
    pub fn with_partition(mut self, groups: Vec<Vec<usize>>) -> Result<SumOfProducts> {
        let d = self.d();
        let mut seen = vec![false; d];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::Hypothesis("empty group in partition".into()));
            }
            for &j in g {
                if j >= d || seen[j] {
                    return Err(Error::Hypothesis(format!("partition uses factor {j} twice or out of range")));
                }
                seen[j] = true;
            }
        }
        if seen.iter().any(|s| !s) || groups.len() < 2 {
            return Err(Error::Hypothesis("partition must cover every factor with at least two groups".into()));
        }
        self.partition = Some(groups);
        Ok(self)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn f(&self) -> &Polynomial {
        &self.f
    }

    pub fn terms(&self) -> usize {
        self.factors.len()
    }

    pub fn d(&self) -> usize {
        self.factors[0].len()
    }

    pub fn factors(&self) -> &[Vec<Polynomial>] {
        &self.factors
    }

    /// Number of factors of each regrouped term.
    pub fn k(&self) -> usize {
        self.partition.as_ref().map_or(self.d(), Vec::len)
    }

    /// The rows after applying the partition.
    pub fn grouped_rows(&self) -> Result<Vec<Vec<Polynomial>>> {
        let Some(groups) = &self.partition else {
            return Ok(self.factors.clone());
        };
        self.factors
            .iter()
            .map(|row| {
                groups
                    .iter()
                    .map(|g| g.iter().try_fold(self.ring.one(), |acc, &j| acc.try_mul(&row[j])))
                    .collect()
            })
            .collect()
    }

    /// Whether distinct terms use disjoint variables.
    pub fn terms_disjoint(&self) -> bool {
        let supports: Vec<_> = self
            .factors
            .iter()
            .map(|r| r.iter().flat_map(Polynomial::support).collect::<std::collections::BTreeSet<_>>())
            .collect();
        (0..supports.len()).all(|i| (i + 1..supports.len()).all(|j| supports[i].is_disjoint(&supports[j])))
    }
}

/// Checks performed by [`build_from_sum`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SumReport {
    pub terms: usize,
    pub k: usize,
    pub rank: usize,
    pub expected_rank: usize,
    /// `s` with `det φ_j = ±f^s`, per position `j = 1, ..., k-1, 0`.
    pub det_exponents: Vec<Option<u32>>,
    pub expected_exponent: u32,
    pub valid: bool,
    pub passed: bool,
    pub source: &'static str,
}

/// The tensor product of the rank-one rows, as a `k`-fold factorization
/// of `f` of rank `k^{N-1}` with `det φ_j = ±f^{k^{N-2}}`.
///
/// The tensor uses `primitive_root(k)` of the ring's field.
pub fn build_from_sum(sop: &SumOfProducts) -> Result<(MatFac, SumReport)> {
    let rows = sop.grouped_rows()?;
    if let Some(p) = rows.iter().flatten().find(|p| !p.constant_term().is_zero()) {
        return Err(Error::Hypothesis(format!("factor {p} is a unit")));
    }
    let k = sop.k();
    let zeta = sop.ring.field().primitive_root(k as u32)?;
    let mut facs = rows.iter().map(|r| MatFac::rank_one(r));
    let first = facs.next().expect("at least two terms")?;
    let x = facs.try_fold(first, |acc, y| tensor(&acc, &y?, &zeta))?;
    let n = sop.terms() as u32;
    let expected_rank = k.pow(n - 1);
    let expected_exponent = (k as u32).pow(n - 2);
    let det_exponents = x
        .mats()
        .iter()
        .map(|m| {
            let p = PresentationMatrix {
                matrix: m.clone(),
                f: x.f().clone(),
            };
            Ok(p.det_as_power_of_f()?.map(|(_, s)| s))
        })
        .collect::<Result<Vec<_>>>()?;
    let valid = x.is_valid() && x.f() == sop.f();
    let passed = valid
        && x.rank() == expected_rank
        && x.is_reduced()
        && det_exponents.iter().all(|s| *s == Some(expected_exponent));
    let report = SumReport {
        terms: sop.terms(),
        k,
        rank: x.rank(),
        expected_rank,
        det_exponents,
        expected_exponent,
        valid,
        passed,
        source: claims::SUM_OF_PRODUCTS,
    };
    Ok((x, report))
}

/// Numerical invariants of `cok(φ_j ··· φ_{j+ℓ-1})` over `R = Q/(f)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleStats {
    pub start: i64,
    pub ell: usize,
    pub mu: usize,
    pub rank_r: u64,
    pub e_r: u64,
    pub ord_f: u32,
    pub ulrich: bool,
    pub irreducible_asserted: bool,
    /// `μ/e` in lowest terms.
    pub ratio: (u64, u64),
}

impl ModuleStats {
    pub fn ratio_string(&self) -> String {
        format!("{}/{}", self.ratio.0, self.ratio.1)
    }
}

/// [`mcm_stats_at`] starting from `φ_1`.
pub fn mcm_stats(x: &MatFac, ell: usize, irreducible: bool) -> Result<ModuleStats> {
    mcm_stats_at(x, 1, ell, irreducible)
}

/// Statistics of `M = cok(φ_j ··· φ_{j+ℓ-1})`.
///
/// `μ = rank X` needs `X` reduced. The rank over `R` is the exponent `s`
/// in `det = ±f^s`, which is only meaningful for irreducible `f`; that is
/// the caller's assertion. Then `e_R = ord(f) · rank_R`.
pub fn mcm_stats_at(x: &MatFac, start: i64, ell: usize, irreducible: bool) -> Result<ModuleStats> {
    if !irreducible {
        return Err(Error::Hypothesis("irreducibility of f must be asserted".into()));
    }
    if ell == 0 || ell >= x.d() {
        return Err(Error::OutOfRange(format!("ℓ = {ell} not in 1..{}", x.d())));
    }
    if !x.is_valid() {
        return Err(Error::Hypothesis("not a matrix factorization".into()));
    }
    if !x.is_reduced() {
        return Err(Error::Hypothesis("X is not reduced, so rank X need not be minimal".into()));
    }
    let p = x.cokernel_presentation(start, ell)?;
    let (_, s) = p
        .det_as_power_of_f()?
        .ok_or_else(|| Error::Hypothesis("determinant is not ±f^s".into()))?;
    let ord_f = x.f().order()?;
    let mu = x.rank();
    let rank_r = u64::from(s);
    let e_r = u64::from(ord_f) * rank_r;
    let g = (mu as u64).gcd(&e_r).max(1);
    Ok(ModuleStats {
        start,
        ell,
        mu,
        rank_r,
        e_r,
        ord_f,
        ulrich: mu as u64 == e_r,
        irreducible_asserted: irreducible,
        ratio: (mu as u64 / g, e_r / g),
    })
}

/// Output of [`build_ulrich`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UlrichBuild {
    #[serde(skip)]
    pub factorization: MatFac,
    #[serde(skip)]
    pub presentation: PresentationMatrix,
    pub report: SumReport,
    pub stats: ModuleStats,
    /// False when `d ≠ ord(f)`; the stats are still exact but the Ulrich
    /// conclusion is not claimed.
    pub guaranteed: bool,
    pub claims: Vec<Claim>,
}

/// `cok φ_1` of the sum-of-products factorization with `k = d = ord(f)`,
/// `ℓ = 1`.
pub fn build_ulrich(sop: &SumOfProducts, irreducible: bool) -> Result<UlrichBuild> {
    if sop.partition.is_some() {
        return Err(Error::Hypothesis("Ulrich build uses every factor separately".into()));
    }
    let (x, report) = build_from_sum(sop)?;
    if !report.passed {
        return Err(Error::Hypothesis("sum-of-products factorization failed its checks".into()));
    }
    let stats = mcm_stats(&x, 1, irreducible)?;
    let guaranteed = sop.d() as u32 == stats.ord_f;
    let claims = if guaranteed {
        vec![Claim::new("cok φ_1 is an Ulrich R-module", claims::ULRICH_EXISTENCE)]
    } else {
        vec![Claim::new(
            format!("d = {} differs from ord(f) = {}; cok φ_1 is MCM with the stats shown", sop.d(), stats.ord_f),
            claims::MCM_STATISTICS,
        )]
    };
    Ok(UlrichBuild {
        presentation: x.cokernel_presentation(1, 1)?,
        factorization: x,
        report,
        stats,
        guaranteed,
        claims,
    })
}

/// Exact identities behind `0 → cok φ_{k+1} → cok(φ_k φ_{k+1}) → cok φ_k → 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SesIdentities {
    /// `φ_k · φ_{k+1} = (φ_k φ_{k+1}) · 1`: the square commutes.
    pub square_commutes: bool,
    /// `det φ_k ≠ 0`, so `cok φ_{k+1} → M` is injective.
    pub left_injective: bool,
    /// `φ_{k+1} ··· φ_{k-1} φ_k = f`, so `Im φ_k φ_{k+1} ⊇ f X_{k-1}`.
    pub cyclic_identity: bool,
}

impl SesIdentities {
    pub fn all(&self) -> bool {
        self.square_commutes && self.left_injective && self.cyclic_identity
    }
}

/// The short exact sequence built from two consecutive maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionSes {
    pub k: i64,
    #[serde(skip)]
    pub l: PresentationMatrix,
    #[serde(skip)]
    pub m: PresentationMatrix,
    #[serde(skip)]
    pub n: PresentationMatrix,
    pub stats_l: ModuleStats,
    pub stats_m: ModuleStats,
    pub stats_n: ModuleStats,
    pub identities: SesIdentities,
    /// `L` and `N` Ulrich while `M` is not.
    pub not_extension_closed: bool,
    pub claim: Claim,
}

/// `L = cok φ_{k+1}`, `M = cok φ_k φ_{k+1}`, `N = cok φ_k`.
///
/// Needs `d ≥ 3` so that `M` is a proper composite.
pub fn extension_ses(x: &MatFac, k: i64, irreducible: bool) -> Result<ExtensionSes> {
    if x.d() < 3 {
        return Err(Error::Hypothesis("two consecutive maps give a proper composite only for d ≥ 3".into()));
    }
    if x.f().order()? < 2 {
        return Err(Error::Hypothesis("ord(f) must be at least two".into()));
    }
    let stats_n = mcm_stats_at(x, k, 1, irreducible)?;
    let stats_l = mcm_stats_at(x, k + 1, 1, irreducible)?;
    let stats_m = mcm_stats_at(x, k, 2, irreducible)?;
    let (pk, pk1) = (x.phi(k), x.phi(k + 1));
    let prod = pk.mul(pk1)?;
    let square_commutes = prod == x.cokernel_presentation(k, 2)?.matrix;
    let left_injective = !pk.det()?.is_zero();
    let cyclic_identity = x.cyclic_product(k + 1)? == crate::matrix::PolyMatrix::scalar(x.ring(), x.rank(), x.f());
    let identities = SesIdentities {
        square_commutes,
        left_injective,
        cyclic_identity,
    };
    let not_extension_closed = identities.all() && stats_l.ulrich && stats_n.ulrich && !stats_m.ulrich;
    Ok(ExtensionSes {
        k,
        l: x.cokernel_presentation(k + 1, 1)?,
        m: x.cokernel_presentation(k, 2)?,
        n: x.cokernel_presentation(k, 1)?,
        stats_l,
        stats_m,
        stats_n,
        identities,
        not_extension_closed,
        claim: Claim::new("Ulrich R-modules are not closed under extensions", claims::EXTENSION_CLOSURE),
    })
}

/// Output of [`indecomposable_ulrich`].
#[derive(Clone, Debug)]
pub struct IndecomposableUlrich {
    pub factorization: MatFac,
    /// `cok Φ_j` for `j = 1, ..., d-1, 0`.
    pub presentations: Vec<PresentationMatrix>,
    pub cert: StrongIndCert,
    pub consequences: SiConsequences,
    pub stats: Vec<ModuleStats>,
    /// `rank_R = d^{N-2}`, `μ = d^{N-1}`, `e_R = ord(f) d^{N-2}` for every `j`.
    pub formulas_match: bool,
    pub ulrich: bool,
    /// `uc(f) ≤ d^{N-2}`.
    pub uc_upper_bound: u64,
    pub claims: Vec<Claim>,
}

/// Serializable view of [`IndecomposableUlrich`].
#[derive(Clone, Debug, Serialize)]
pub struct IndecomposableUlrichSummary {
    pub rank: usize,
    pub stats: Vec<ModuleStats>,
    pub formulas_match: bool,
    pub ulrich: bool,
    pub uc_upper_bound: u64,
    pub claims: Vec<Claim>,
}

impl IndecomposableUlrich {
    pub fn summary(&self) -> IndecomposableUlrichSummary {
        IndecomposableUlrichSummary {
            rank: self.factorization.rank(),
            stats: self.stats.clone(),
            formulas_match: self.formulas_match,
            ulrich: self.ulrich,
            uc_upper_bound: self.uc_upper_bound,
            claims: self.claims.clone(),
        }
    }
}

/// Strongly indecomposable tensor of coprime monomial rows in disjoint
/// variables, with the statistics of its cokernels.
pub fn indecomposable_ulrich(sop: &SumOfProducts, irreducible: bool) -> Result<IndecomposableUlrich> {
    if sop.partition.is_some() {
        return Err(Error::Hypothesis("rows must be used unpartitioned".into()));
    }
    if !sop.terms_disjoint() {
        return Err(Error::Hypothesis("terms share variables".into()));
    }
    let (x, report) = build_from_sum(sop)?;
    if !report.passed {
        return Err(Error::Hypothesis("sum-of-products factorization failed its checks".into()));
    }
    let zeta = sop.ring.field().primitive_root(sop.d() as u32)?;
    let mut certs = Vec::with_capacity(sop.terms());
    for row in sop.factors() {
        match coprime_rank_one_cert(&MatFac::rank_one(row)?)? {
            Certification::Certified(c) => certs.push(c),
            Certification::Refused(why) => return Err(Error::Hypothesis(format!("row not certified: {why}"))),
        }
    }
    let mut it = certs.into_iter();
    let first = it.next().expect("two terms");
    let cert = it.try_fold(first, |acc, c| propagate_strong_ind(&acc, &c, &zeta))?;
    if cert.subject() != &x || !cert.verify()? {
        return Err(Error::Hypothesis("certificate does not cover the built factorization".into()));
    }
    let consequences = strong_ind_consequences(&cert);
    let d = sop.d() as u64;
    let n = sop.terms() as u32;
    let stats = (0..sop.d() as i64)
        .map(|j| mcm_stats_at(&x, if j == 0 { sop.d() as i64 } else { j }, 1, irreducible))
        .collect::<Result<Vec<_>>>()?;
    let ord = u64::from(x.f().order()?);
    let formulas_match = stats
        .iter()
        .all(|s| s.rank_r == d.pow(n - 2) && s.mu as u64 == d.pow(n - 1) && s.e_r == ord * d.pow(n - 2));
    let ulrich = d == ord && stats.iter().all(|s| s.ulrich);
    let presentations = (1..=sop.d() as i64)
        .map(|j| x.cokernel_presentation(j, 1))
        .collect::<Result<Vec<_>>>()?;
    let mut claims = vec![Claim::new(
        "each cok Φ_j is an indecomposable MCM R-module",
        claims::INDECOMPOSABLE_ULRICH,
    )];
    if ulrich {
        claims.push(Claim::new("each cok Φ_j is an indecomposable Ulrich R-module", claims::INDECOMPOSABLE_ULRICH));
    }
    claims.push(Claim::new(
        format!("uc(f) ≤ {}; improving on this would need a construction other than the tensor product", d.pow(n - 2)),
        claims::ULRICH_COMPLEXITY_BOUND,
    ));
    Ok(IndecomposableUlrich {
        factorization: x,
        presentations,
        cert,
        consequences,
        stats,
        formulas_match,
        ulrich,
        uc_upper_bound: d.pow(n - 2),
        claims,
    })
}

/// Generic sum `Σ_{i=1}^N x_{i1}^a ··· x_{id}^a` in variables `x{i}{j}`
/// over `ℚ(ζ_d)`, 1-based indices.
pub fn generic_sum(n: usize, d: usize, a: u32) -> Result<SumOfProducts> {
    let names: Vec<String> = (1..=n).flat_map(|i| (1..=d).map(move |j| format!("x{i}{j}"))).collect();
    let field = crate::cyclo::CycloField::new(d as u32);
    let ring = Ring::new(field, &names)?;
    let rows = (0..n)
        .map(|i| (0..d).map(|j| ring.var_at(i * d + j).pow(a)).collect())
        .collect();
    SumOfProducts::new(rows)
}

/// Variable split between the first `t` terms and the rest.
pub fn term_split(sop: &SumOfProducts, t: usize) -> Result<VarSplit> {
    let sup = |rows: &[Vec<Polynomial>]| rows.iter().flatten().flat_map(Polynomial::support).collect();
    VarSplit::new(sup(&sop.factors[..t]), sup(&sop.factors[t..]))
}

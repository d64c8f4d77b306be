//! The ζ-twisted tensor product of d-fold factorizations.
//!
//! `(X ⊗ Y)_k` is spanned by `x ⊗ y` with `|x| + |y| ≡ k`, and
//! `Φ(x ⊗ y) = φ(x) ⊗ y + ζ^{|x|} x ⊗ ψ(y)`. In degree `k` the basis is
//! grouped by the X-degree `p = 0, ..., d-1` of `x` (block `j = p + 1`);
//! inside a block the X index varies slower than the Y index.

use serde::Serialize;

use crate::cyclo::CycloElem;
use crate::error::{Error, Result};
use crate::matfac::{min_precision, MatFac};
use crate::matrix::PolyMatrix;
use crate::morphism::{split_idempotent, Morphism};
use crate::poly::{Jet, Polynomial};

/// Canonical basis of the graded pieces of `X ⊗ Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorBasis {
    pub d: usize,
    pub n: usize,
    pub m: usize,
}

/// Label of one basis vector of `(X ⊗ Y)_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisLabel {
    pub xdeg: usize,
    pub ydeg: usize,
    pub a: usize,
    pub b: usize,
}

impl TensorBasis {
    pub fn rank(&self) -> usize {
        self.d * self.n * self.m
    }

    pub fn index(&self, xdeg: usize, a: usize, b: usize) -> usize {
        xdeg * self.n * self.m + a * self.m + b
    }

    /// Labels of `(X ⊗ Y)_k` in basis order.
    pub fn labels(&self, k: i64) -> Vec<BasisLabel> {
        let d = self.d as i64;
        let mut out = Vec::with_capacity(self.rank());
        for xdeg in 0..self.d {
            let ydeg = (k - xdeg as i64).rem_euclid(d) as usize;
            for a in 0..self.n {
                for b in 0..self.m {
                    out.push(BasisLabel { xdeg, ydeg, a, b });
                }
            }
        }
        out
    }
}

fn check_pair(x: &MatFac, y: &MatFac) -> Result<()> {
    if x.ring() != y.ring() {
        return Err(Error::RingMismatch);
    }
    if x.d() != y.d() {
        return Err(Error::Incompatible(format!("d = {} vs {}", x.d(), y.d())));
    }
    Ok(())
}

fn check_root(zeta: &CycloElem, x: &MatFac) -> Result<()> {
    if zeta.field() != x.ring().field() {
        return Err(Error::FieldMismatch(
            zeta.field().conductor(),
            x.ring().field().conductor(),
        ));
    }
    if !zeta.is_primitive_root(x.d() as u32) {
        return Err(Error::NotPrimitiveRoot(zeta.to_string(), x.d() as u32));
    }
    Ok(())
}

/// `X ⊗_ζ Y`, a factorization of `f + g` of rank `d·n·m`.
///
/// `Φ_k(i,i) = ζ^{i-1} 1 ⊗ ψ_{k+1-i}`, `Φ_k(i,i+1) = φ_i ⊗ 1`.
pub fn tensor(x: &MatFac, y: &MatFac, zeta: &CycloElem) -> Result<MatFac> {
    check_pair(x, y)?;
    check_root(zeta, x)?;
    let ring = x.ring();
    let d = x.d();
    let (n, m) = (x.rank(), y.rank());
    let nm = n * m;
    let id_n = PolyMatrix::identity(ring, n);
    let id_m = PolyMatrix::identity(ring, m);
    let mut mats = Vec::with_capacity(d);
    for slot in 0..d {
        let k = ((slot + 1) % d) as i64;
        let mut phi = PolyMatrix::zeros(ring, d * nm, d * nm);
        for i in 1..=d {
            let diag = id_n
                .kron(y.phi(k + 1 - i as i64))?
                .scale(&zeta.pow(i as i64 - 1)?);
            phi.set_block((i - 1) * nm, (i - 1) * nm, &diag);
            let sup = x.phi(i as i64).kron(&id_m)?;
            phi.set_block((i - 1) * nm, (i % d) * nm, &sup);
        }
        mats.push(phi);
    }
    let f = x.f().try_add(y.f())?;
    Ok(MatFac::new(f, mats)?.with_precision(min_precision(x.precision(), y.precision())))
}

/// Morphism whose components send basis vector `i` of each graded piece to
/// `coeff · e_{target}`; `entries[k]` lists `(target, coeff)` per source
/// index.
pub(crate) fn monomial_morphism(
    source: MatFac,
    target: MatFac,
    entries: Vec<Vec<(usize, CycloElem)>>,
) -> Result<Morphism> {
    let ring = source.ring().clone();
    let comps = entries
        .into_iter()
        .map(|col| {
            let mut c = PolyMatrix::zeros(&ring, target.rank(), source.rank());
            for (src, (tgt, coeff)) in col.into_iter().enumerate() {
                c.set(tgt, src, ring.constant(coeff));
            }
            c
        })
        .collect();
    Morphism::new(source, target, comps)
}

/// `X ⊗_ζ Y → Y ⊗_{ζ^{-1}} X`, `x ⊗ y ↦ ζ^{|x||y|} y ⊗ x`.
pub fn swap_witness(x: &MatFac, y: &MatFac, zeta: &CycloElem) -> Result<Morphism> {
    let src = tensor(x, y, zeta)?;
    let tgt = tensor(y, x, &zeta.inverse()?)?;
    let bx = TensorBasis { d: x.d(), n: x.rank(), m: y.rank() };
    let by = TensorBasis { d: x.d(), n: y.rank(), m: x.rank() };
    let entries = (0..x.d() as i64)
        .map(|k| {
            bx.labels(k)
                .into_iter()
                .map(|l| {
                    let coeff = zeta.pow((l.xdeg * l.ydeg) as i64)?;
                    Ok((by.index(l.ydeg, l.b, l.a), coeff))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    monomial_morphism(src, tgt, entries)
}

/// `TX ⊗ Y → T(X ⊗ Y)`, `x ⊗ y ↦ ζ^{-|y|} x ⊗ y`.
pub fn shift_witness(x: &MatFac, y: &MatFac, zeta: &CycloElem) -> Result<Morphism> {
    let src = tensor(&x.shift(1), y, zeta)?;
    let tgt = tensor(x, y, zeta)?.shift(1);
    let d = x.d();
    let b = TensorBasis { d, n: x.rank(), m: y.rank() };
    let entries = (0..d as i64)
        .map(|k| {
            b.labels(k)
                .into_iter()
                .map(|l| {
                    let coeff = zeta.pow(-(l.ydeg as i64))?;
                    Ok((b.index((l.xdeg + 1) % d, l.a, l.b), coeff))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    monomial_morphism(src, tgt, entries)
}

/// Whether `T(X ⊗ Y)` and `X ⊗ TY` agree as data.
pub fn shift_equality(x: &MatFac, y: &MatFac, zeta: &CycloElem) -> Result<bool> {
    Ok(tensor(x, y, zeta)?.shift(1) == tensor(x, &y.shift(1), zeta)?)
}

/// `(X ⊕ X2) ⊗ Y → (X ⊗ Y) ⊕ (X2 ⊗ Y)`, a permutation in each degree.
pub fn distribute_witness(x: &MatFac, x2: &MatFac, y: &MatFac, zeta: &CycloElem) -> Result<Morphism> {
    let src = tensor(&x.direct_sum(x2)?, y, zeta)?;
    let tgt = tensor(x, y, zeta)?.direct_sum(&tensor(x2, y, zeta)?)?;
    let d = x.d();
    let (n, n2, m) = (x.rank(), x2.rank(), y.rank());
    let bs = TensorBasis { d, n: n + n2, m };
    let b1 = TensorBasis { d, n, m };
    let b2 = TensorBasis { d, n: n2, m };
    let one = x.ring().field().one();
    let entries = (0..d as i64)
        .map(|k| {
            bs.labels(k)
                .into_iter()
                .map(|l| {
                    let t = if l.a < n {
                        b1.index(l.xdeg, l.a, l.b)
                    } else {
                        b1.rank() + b2.index(l.xdeg, l.a - n, l.b)
                    };
                    (t, one.clone())
                })
                .collect()
        })
        .collect();
    monomial_morphism(src, tgt, entries)
}

/// Outcome of comparing `(X ⊗ Y) ⊗ Z` with `X ⊗ (Y ⊗ Z)`.
#[derive(Clone, Debug)]
pub struct AssocCheck {
    pub agrees: bool,
    /// Per degree, the position in `X ⊗ (Y ⊗ Z)` of each basis vector of
    /// `(X ⊗ Y) ⊗ Z`.
    pub permutations: Vec<Vec<usize>>,
    pub witness: Morphism,
}

/// Compare both bracketings after regrouping basis triples; the twists
/// agree degreewise so no scalars are needed.
pub fn assoc_check(x: &MatFac, y: &MatFac, z: &MatFac, zeta: &CycloElem) -> Result<AssocCheck> {
    let left = tensor(&tensor(x, y, zeta)?, z, zeta)?;
    let right = tensor(x, &tensor(y, z, zeta)?, zeta)?;
    let d = x.d();
    let (n, m, l) = (x.rank(), y.rank(), z.rank());
    let xy = TensorBasis { d, n, m };
    let outer_left = TensorBasis { d, n: xy.rank(), m: l };
    let yz = TensorBasis { d, n: m, m: l };
    let outer_right = TensorBasis { d, n, m: yz.rank() };
    let one = x.ring().field().one();
    let mut perms = Vec::with_capacity(d);
    let mut entries = Vec::with_capacity(d);
    for k in 0..d as i64 {
        let mut perm = Vec::with_capacity(outer_left.rank());
        for lab in outer_left.labels(k) {
            // lab.xdeg is the (X⊗Y)-degree, lab.a an index of (X⊗Y)_p
            let inner = xy.labels(lab.xdeg as i64)[lab.a];
            let xdeg = inner.xdeg;
            let ydeg = inner.ydeg;
            let q = (ydeg + lab.ydeg) % d;
            let yz_index = yz.index(ydeg, inner.b, lab.b);
            debug_assert_eq!((xdeg + q) % d, k.rem_euclid(d as i64) as usize);
            perm.push(outer_right.index(xdeg, inner.a, yz_index));
        }
        entries.push(perm.iter().map(|&t| (t, one.clone())).collect());
        perms.push(perm);
    }
    let witness = monomial_morphism(left, right, entries)?;
    let agrees = witness.is_morphism()?;
    Ok(AssocCheck {
        agrees,
        permutations: perms,
        witness,
    })
}

/// `α ⊗ 1_Y : X ⊗ Y → X' ⊗ Y`; block `p` of degree `k` is `α_p ⊗ 1`.
pub fn tensor_morphism_left(alpha: &Morphism, y: &MatFac, zeta: &CycloElem) -> Result<Morphism> {
    let src = tensor(alpha.source(), y, zeta)?;
    let tgt = tensor(alpha.target(), y, zeta)?;
    let ring = y.ring();
    let d = y.d();
    let id_m = PolyMatrix::identity(ring, y.rank());
    let comps = (0..d)
        .map(|_| {
            let blocks = (0..d)
                .map(|p| alpha.comp(p as i64).kron(&id_m))
                .collect::<Result<Vec<_>>>()?;
            PolyMatrix::block_diag(ring, &blocks.iter().collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Morphism::new(src, tgt, comps)?.with_precision(alpha.precision()))
}

/// `1_X ⊗ β : X ⊗ Y → X ⊗ Y'`; block `p` of degree `k` is `1 ⊗ β_{k-p}`.
pub fn tensor_morphism_right(x: &MatFac, beta: &Morphism, zeta: &CycloElem) -> Result<Morphism> {
    let src = tensor(x, beta.source(), zeta)?;
    let tgt = tensor(x, beta.target(), zeta)?;
    let ring = x.ring();
    let d = x.d();
    let id_n = PolyMatrix::identity(ring, x.rank());
    let comps = (0..d as i64)
        .map(|k| {
            let blocks = (0..d as i64)
                .map(|p| id_n.kron(beta.comp(k - p)))
                .collect::<Result<Vec<_>>>()?;
            PolyMatrix::block_diag(ring, &blocks.iter().collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Morphism::new(src, tgt, comps)?.with_precision(beta.precision()))
}

/// Per-degree comparison of `det Φ_k` with `(-1)^{nm(d+1)} (f+g)^{nm}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DetReport {
    pub expected: String,
    /// `(k, holds)` for `k = 0, ..., d-1`.
    pub checks: Vec<(usize, bool)>,
    pub passed: bool,
}

pub fn expected_tensor_det(x: &MatFac, y: &MatFac) -> Result<Polynomial> {
    let (n, m, d) = (x.rank() as u32, y.rank() as u32, x.d() as u32);
    let nm = n * m;
    let h = x.f().try_add(y.f())?.pow(nm);
    Ok(if (nm * (d + 1)) % 2 == 1 { -h } else { h })
}

pub fn det_check(x: &MatFac, y: &MatFac, zeta: &CycloElem) -> Result<DetReport> {
    let t = tensor(x, y, zeta)?;
    let expected = expected_tensor_det(x, y)?;
    let checks = (0..x.d())
        .map(|k| Ok((k, t.phi(k as i64).det()? == expected)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DetReport {
        expected: expected.to_string(),
        passed: checks.iter().all(|c| c.1),
        checks,
    })
}

/// Shifts `i` of the summands `𝒫_i` if `P` is, as data, a block diagonal
/// sum of them.
pub fn projective_shifts(p: &MatFac) -> Option<Vec<i64>> {
    let d = p.d();
    let f = p.f();
    let mut out = Vec::with_capacity(p.rank());
    for r in 0..p.rank() {
        for m in p.mats() {
            for c in 0..p.rank() {
                if c != r && !m.get(r, c).is_zero() {
                    return None;
                }
            }
        }
        let mut slot = None;
        for (idx, m) in p.mats().iter().enumerate() {
            let e = m.get(r, r);
            if e == f && slot.is_none() {
                slot = Some(idx);
            } else if !e.is_one() {
                return None;
            }
        }
        // 𝒫_i carries f at φ_{1-i}, which sits at tuple position -i mod d
        let idx = slot? as i64;
        out.push((-idx).rem_euclid(d as i64));
    }
    Some(out)
}

/// Result of decomposing `P ⊗ Y` into shifted projectives.
#[derive(Clone, Debug)]
pub struct ProjectiveReport {
    pub precision: u32,
    /// Shifts of the summands in the order they were split off.
    pub shifts: Vec<i64>,
    /// `s_i` read off from the ranks at the origin: `n - rank φ_{1-i}(0)`.
    pub counts_from_ranks: Vec<usize>,
    /// Isomorphism `P ⊗ Y → ⊕ 𝒫_{shifts}` modulo the precision.
    pub witness: Option<Morphism>,
    pub verified: bool,
}

/// Split a factorization that should be projective into shifted copies
/// of `(f, 1, ..., 1)`, working modulo degree `n`.
pub fn decompose_projective(w: &MatFac, n: u32) -> Result<ProjectiveReport> {
    let d = w.d();
    let ring = w.ring().clone();
    let mut counts = vec![0usize; d];
    for (i, c) in counts.iter_mut().enumerate() {
        let rk = w.phi(1 - i as i64).constant_part().rank();
        *c = w.rank() - rk;
    }
    let mut shifts = Vec::new();
    let mut pieces: Vec<Morphism> = Vec::new();
    let mut splits = Vec::new();
    let mut cur = w.clone().with_precision(Some(n));
    let mut ok = true;
    while cur.rank() > 0 {
        let Some((e, s)) = rank_one_projective_idempotent(&cur, n)? else {
            ok = false;
            break;
        };
        let sp = split_idempotent(&cur, &e, n)?;
        if sp.rank != 1 || !sp.block_diagonal {
            ok = false;
            break;
        }
        // normalize the rank-one image onto 𝒫 with f at slot s
        let i = (1 - s).rem_euclid(d as i64);
        let target = MatFac::projective(&ring, d, w.f(), i)?;
        let u: Vec<Polynomial> = (0..d as i64).map(|k| sp.image.phi(k).get(0, 0).clone()).collect();
        let mut gamma = vec![ring.zero(); d];
        gamma[s.rem_euclid(d as i64) as usize] = ring.one();
        for step in 1..d as i64 {
            let k = s + step;
            let prev = gamma[(k - 1).rem_euclid(d as i64) as usize].clone();
            let uk = &u[k.rem_euclid(d as i64) as usize];
            let tk = target.phi(k).get(0, 0);
            let tinv = Jet::new(tk, n).inverse()?;
            let g = prev.mul_trunc(uk, n)?.mul_trunc(tinv.poly(), n)?;
            gamma[k.rem_euclid(d as i64) as usize] = g;
        }
        let comps = gamma.iter().map(|g| PolyMatrix::scalar(&ring, 1, g)).collect();
        let norm = Morphism::new(sp.image.clone(), target, comps)?.with_precision(Some(n));
        if !norm.is_morphism()? || !norm.is_isomorphism() {
            ok = false;
            break;
        }
        shifts.push(i);
        pieces.push(norm);
        splits.push(sp.witness.inverse(n)?);
        cur = sp.complement;
    }
    let mut witness = None;
    if ok {
        // assemble from the innermost piece outwards
        let mut acc: Option<Morphism> = None;
        for (norm, inv) in pieces.iter().zip(&splits).rev() {
            let rest = match acc.take() {
                Some(r) => norm.direct_sum(&r)?,
                None => {
                    let zero = MatFac::zero_rank(&ring, d, w.f()).with_precision(Some(n));
                    norm.direct_sum(&Morphism::identity(&zero))?
                }
            };
            acc = Some(rest.compose(inv)?);
        }
        witness = acc;
    }
    let mut sorted = shifts.clone();
    sorted.sort_unstable();
    let mut from_counts = Vec::new();
    for (i, &c) in counts.iter().enumerate() {
        from_counts.extend(std::iter::repeat_n(i as i64, c));
    }
    let verified = ok
        && sorted == from_counts
        && match &witness {
            Some(wt) => wt.is_morphism()? && wt.is_isomorphism(),
            None => w.rank() == 0,
        };
    Ok(ProjectiveReport {
        precision: n,
        shifts,
        counts_from_ranks: counts,
        witness,
        verified,
    })
}

/// A rank-one idempotent whose image is a shifted projective, built from
/// a chain of vectors through a slot where the complementary product is
/// nonzero at the origin. Returns the idempotent and the slot carrying `f`.
fn rank_one_projective_idempotent(x: &MatFac, n: u32) -> Result<Option<(Morphism, i64)>> {
    let d = x.d() as i64;
    let ring = x.ring();
    for s in 1..=d {
        // R = φ_{s+1} ··· φ_{s-1}
        let mut r = x.phi(s + 1).clone();
        for t in 2..d {
            r = r.mul_trunc(x.phi(s + t), n)?;
        }
        let r0 = r.constant_part();
        let Some(col) = (0..x.rank()).find(|&c| (0..x.rank()).any(|i| !r0.get(i, c).is_zero())) else {
            continue;
        };
        let dim = x.rank();
        let mut u = PolyMatrix::zeros(ring, dim, 1);
        u.set(col, 0, ring.one());
        // v_{s-1} = u, v_{j-1} = φ_j v_j down to v_s
        let mut v: Vec<PolyMatrix> = vec![PolyMatrix::zeros(ring, dim, 1); d as usize];
        let idx = |k: i64| k.rem_euclid(d) as usize;
        v[idx(s - 1)] = u;
        for step in 0..d - 1 {
            let j = s - 1 - step;
            v[idx(j - 1)] = x.phi(j).mul_trunc(&v[idx(j)], n)?;
        }
        let vs = &v[idx(s)];
        let Some(a) = (0..dim).find(|&i| !vs.get(i, 0).constant_term().is_zero()) else {
            continue;
        };
        let inv = Jet::new(vs.get(a, 0), n).inverse()?;
        let mut lam: Vec<PolyMatrix> = vec![PolyMatrix::zeros(ring, 1, dim); d as usize];
        let mut ls = PolyMatrix::zeros(ring, 1, dim);
        ls.set(0, a, inv.poly().clone());
        lam[idx(s)] = ls;
        for step in 1..d {
            let j = s + step;
            lam[idx(j)] = lam[idx(j - 1)].mul_trunc(x.phi(j), n)?;
        }
        let comps = (0..d as usize)
            .map(|k| v[k].mul_trunc(&lam[k], n))
            .collect::<Result<Vec<_>>>()?;
        let e = Morphism::new(x.clone(), x.clone(), comps)?.with_precision(Some(n));
        return Ok(Some((e, s.rem_euclid(d))));
    }
    Ok(None)
}

/// Check that `P ⊗ Y` is projective by splitting it explicitly.
///
/// `P` must be, as data, a direct sum of shifted `(f, 1, ..., 1)`.
pub fn is_projective_tensor(p: &MatFac, y: &MatFac, zeta: &CycloElem, n: Option<u32>) -> Result<ProjectiveReport> {
    if projective_shifts(p).is_none() {
        return Err(Error::Hypothesis(
            "P is not a direct sum of shifted (f, 1, ..., 1)".into(),
        ));
    }
    let w = tensor(p, y, zeta)?;
    let n = n.unwrap_or_else(|| w.default_precision());
    decompose_projective(&w, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::CycloField;
    use crate::poly::Ring;

    fn ring3() -> Ring {
        Ring::new(
            CycloField::new(3),
            &["x0", "x1", "x2", "y0", "y1", "y2", "z0", "z1", "z2", "x", "y", "u", "v", "w"],
        )
        .unwrap()
    }

    fn rank_one(r: &Ring, e: &[&str]) -> MatFac {
        let ps: Vec<Polynomial> = e.iter().map(|s| r.parse(s).unwrap()).collect();
        MatFac::rank_one(&ps).unwrap()
    }

    #[test]
    fn worked_example_first_tensor() {
        let r = ring3();
        let z = r.field().zeta();
        let t = tensor(
            &rank_one(&r, &["x1", "x2", "x0"]),
            &rank_one(&r, &["y1", "y2", "y0"]),
            &z,
        )
        .unwrap();
        let a1 = PolyMatrix::parse(
            &r,
            &[
                vec!["y1", "x1", "0"],
                vec!["0", "z*y0", "x2"],
                vec!["x0", "0", "z^2*y2"],
            ],
        )
        .unwrap();
        assert_eq!(t.phi(1), &a1);
        assert!(t.validate().passed);
        assert_eq!(t.f(), &r.parse("x1*x2*x0 + y1*y2*y0").unwrap());
    }

    #[test]
    fn rejects_non_primitive_roots() {
        let r = ring3();
        let x = rank_one(&r, &["x", "y", "w"]);
        assert!(tensor(&x, &x, &r.field().one()).is_err());
        assert!(tensor(&x, &x, &r.field().from_int(2)).is_err());
    }

    #[test]
    fn knorrer_block_form_for_d2() {
        let r = Ring::new(CycloField::new(2), &["a", "b", "z"]).unwrap();
        let phi = PolyMatrix::parse(&r, &[vec!["a", "b"], vec!["0", "a"]]).unwrap();
        let psi = PolyMatrix::parse(&r, &[vec!["a", "-b"], vec!["0", "a"]]).unwrap();
        let x = MatFac::new(r.parse("a^2").unwrap(), vec![phi.clone(), psi.clone()]).unwrap();
        assert!(x.validate().passed);
        let zz = rank_one(&r, &["z", "z"]);
        let t = tensor(&x, &zz, &r.field().from_int(-1)).unwrap();
        // [[z I, φ], [ψ, -z I]]
        let zi = PolyMatrix::scalar(&r, 2, &r.parse("z").unwrap());
        let mut expect = PolyMatrix::zeros(&r, 4, 4);
        expect.set_block(0, 0, &zi);
        expect.set_block(0, 2, &phi);
        expect.set_block(2, 0, &psi);
        expect.set_block(2, 2, &zi.neg());
        assert_eq!(t.phi(1), &expect);
        assert!(t.validate().passed);
    }

    #[test]
    fn swap_witness_examples() {
        let r = ring3();
        let z = r.field().zeta();
        let x = rank_one(&r, &["x", "y", "w"]);
        let y = rank_one(&r, &["u", "v", "z0"]);
        let s = swap_witness(&x, &y, &z).unwrap();
        assert!(s.is_morphism().unwrap());
        assert!(s.is_isomorphism());
        for k in 0..3i64 {
            for (col, l) in (TensorBasis { d: 3, n: 1, m: 1 }).labels(k).iter().enumerate() {
                let c = s.comp(k);
                let row = (0..3).find(|&i| !c.get(i, col).is_zero()).unwrap();
                assert_eq!(
                    c.get(row, col).constant_term(),
                    z.pow((l.xdeg * l.ydeg) as i64).unwrap()
                );
            }
        }
        let back = swap_witness(&y, &x, &z.inverse().unwrap()).unwrap();
        let round = back.compose(&s).unwrap();
        assert_eq!(round, Morphism::identity(&tensor(&x, &y, &z).unwrap()));
    }

    #[test]
    fn swap_for_d2_rank_one() {
        let r = Ring::new(CycloField::new(2), &["x", "y"]).unwrap();
        let m1 = -r.field().one();
        let x = rank_one(&r, &["x", "x"]);
        let y = rank_one(&r, &["y", "y"]);
        let s = swap_witness(&x, &y, &m1).unwrap();
        assert!(s.is_morphism().unwrap() && s.is_isomorphism());
    }

    #[test]
    fn shift_witness_examples() {
        let r = ring3();
        let z = r.field().zeta();
        let x = rank_one(&r, &["x", "y", "w"]);
        let y = rank_one(&r, &["u", "v", "z0"]);
        let s = shift_witness(&x, &y, &z).unwrap();
        assert!(s.is_morphism().unwrap() && s.is_isomorphism());
        assert!(shift_equality(&x, &y, &z).unwrap());
        let p = MatFac::projective(&r, 3, y.f(), 0).unwrap();
        let sp = shift_witness(&x, &p, &z).unwrap();
        assert!(sp.is_morphism().unwrap() && sp.is_isomorphism());
        // composing d shift witnesses TX^{i+1} ⊗ Y → T(T^i X ⊗ Y) shifted back
        for k in 0..3i64 {
            for (col, l) in (TensorBasis { d: 3, n: 1, m: 1 }).labels(k).iter().enumerate() {
                let c = s.comp(k);
                let row = (0..3).find(|&i| !c.get(i, col).is_zero()).unwrap();
                assert_eq!(c.get(row, col).constant_term(), z.pow(-(l.ydeg as i64)).unwrap());
            }
        }
    }

    #[test]
    fn distribute_and_naturality() {
        let r = ring3();
        let z = r.field().zeta();
        let x = rank_one(&r, &["x", "y", "w"]);
        let x2 = x.shift(1);
        let y = rank_one(&r, &["u", "v", "z0"]);
        let w = distribute_witness(&x, &x2, &y, &z).unwrap();
        assert!(w.is_morphism().unwrap() && w.is_isomorphism());
        let zero = MatFac::zero_rank(&r, 3, x.f());
        let w0 = distribute_witness(&x, &zero, &y, &z).unwrap();
        assert!(w0.comps().iter().all(|c| c.is_scalar(&r.one())));
    }

    #[test]
    fn associativity() {
        let r = ring3();
        let z = r.field().zeta();
        let x = rank_one(&r, &["x1", "x2", "x0"]);
        let y = rank_one(&r, &["y1", "y2", "y0"]);
        let zz = rank_one(&r, &["z1", "z2", "z0"]);
        assert!(assoc_check(&x, &y, &zz, &z).unwrap().agrees);
        let p = MatFac::projective(&r, 3, zz.f(), 1).unwrap();
        assert!(assoc_check(&x, &y, &p, &z).unwrap().agrees);
        let r2 = Ring::new(CycloField::new(2), &["x", "y", "z"]).unwrap();
        let m1 = -r2.field().one();
        let a = rank_one(&r2, &["x", "x"]);
        let b = rank_one(&r2, &["y", "y"]);
        let c = rank_one(&r2, &["z", "z"]);
        assert!(assoc_check(&a, &b, &c, &m1).unwrap().agrees);
    }

    #[test]
    fn determinant_examples() {
        let r = ring3();
        let z = r.field().zeta();
        let x = rank_one(&r, &["x", "x", "x"]);
        let y = rank_one(&r, &["y", "y", "y"]);
        let rep = det_check(&x, &y, &z).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.expected, "x^3 + y^3");
        let r2 = Ring::new(CycloField::new(2), &["x", "y"]).unwrap();
        let rep = det_check(
            &rank_one(&r2, &["x", "x"]),
            &rank_one(&r2, &["y", "y"]),
            &-r2.field().one(),
        )
        .unwrap();
        assert!(rep.passed);
        assert_eq!(rep.expected, "-x^2 - y^2");
    }

    #[test]
    fn morphism_functoriality() {
        let r = ring3();
        let z = r.field().zeta();
        let x = rank_one(&r, &["x", "y", "w"]);
        let y = rank_one(&r, &["u", "v", "z0"]);
        let id = Morphism::identity(&x);
        let t = tensor_morphism_left(&id, &y, &z).unwrap();
        assert_eq!(t, Morphism::identity(&tensor(&x, &y, &z).unwrap()));
        let (_, sc) = x.scale_by_units(&[z.clone(), z.clone(), z.clone()]).unwrap();
        let a = tensor_morphism_left(&sc, &y, &z).unwrap();
        assert!(a.is_morphism().unwrap());
        // 1 ⊗ β with β_k = ζ^k: block p of degree k is ζ^{k-p}
        let (_, beta) = y.scale_by_units(&[z.clone(), z.clone(), z.clone()]).unwrap();
        let b = tensor_morphism_right(&x, &beta, &z).unwrap();
        assert!(b.is_morphism().unwrap());
        for k in 0..3i64 {
            for p in 0..3usize {
                let e = b.comp(k).get(p, p).constant_term();
                assert_eq!(e, z.pow(k - p as i64).unwrap());
            }
        }
    }

    #[test]
    fn projective_tensors() {
        let r = Ring::new(CycloField::new(2), &["x", "y"]).unwrap();
        let m1 = -r.field().one();
        let fx = r.parse("x^2").unwrap();
        let p0 = MatFac::projective(&r, 2, &fx, 0).unwrap();
        let y = rank_one(&r, &["y", "y"]);
        let rep = is_projective_tensor(&p0, &y, &m1, None).unwrap();
        assert!(rep.verified);
        assert_eq!(rep.shifts.len(), 2);
        let fy = r.parse("y^2").unwrap();
        let q0 = MatFac::projective(&r, 2, &fy, 0).unwrap();
        let rep = is_projective_tensor(&p0, &q0, &m1, None).unwrap();
        assert!(rep.verified);
        assert_eq!(rep.shifts.len(), 2);
        let zero = MatFac::zero_rank(&r, 2, &fx);
        let rep = is_projective_tensor(&zero, &y, &m1, None).unwrap();
        assert!(rep.verified && rep.shifts.is_empty());
        assert!(is_projective_tensor(&rank_one(&r, &["x", "x"]), &y, &m1, None).is_err());
    }

    #[test]
    fn projective_tensors_d3() {
        let r = ring3();
        let z = r.field().zeta();
        let fx = r.parse("x*y*w").unwrap();
        let p = MatFac::projective(&r, 3, &fx, 0).unwrap();
        let q = MatFac::projective(&r, 3, &r.parse("u*v").unwrap(), 0).unwrap();
        let rep = is_projective_tensor(&p, &q, &z, None).unwrap();
        assert!(rep.verified);
        assert_eq!(rep.shifts.len(), 3);
        let p1 = p.direct_sum(&MatFac::projective(&r, 3, &fx, 2).unwrap()).unwrap();
        let y = rank_one(&r, &["u", "v", "z0"]);
        let rep = is_projective_tensor(&p1, &y, &z, None).unwrap();
        assert!(rep.verified);
        assert_eq!(rep.shifts.len(), 6);
    }
}

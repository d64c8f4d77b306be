//! Exact arithmetic in cyclotomic fields `Q(ζ_m)`.
//!
//! An element is stored as its unique reduced representative
//! `c_0 + c_1 ζ + ... + c_{φ(m)-1} ζ^{φ(m)-1}` with rational coefficients,
//! where `ζ = ζ_m` is a root of the `m`-th cyclotomic polynomial.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// The `m`-th cyclotomic polynomial, coefficients listed from the constant
/// term upwards.
///
/// Computed by dividing `x^m - 1` exactly by `Φ_k` for every proper divisor
/// `k` of `m`.
pub fn cyclotomic_polynomial(m: u32) -> Vec<BigInt> {
    assert!(m >= 1, "cyclotomic polynomial needs m >= 1");
    let mut poly: Vec<BigInt> = vec![BigInt::zero(); m as usize + 1];
    poly[0] = BigInt::from(-1);
    poly[m as usize] = BigInt::one();
    for k in 1..m {
        if m.is_multiple_of(k) {
            let divisor = cyclotomic_polynomial(k);
            poly = exact_div_monic(&poly, &divisor);
        }
    }
    poly
}

/// Quotient of `num` by the monic integer polynomial `den`; the division
/// must be exact.
fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    debug_assert!(den[dn].is_one());
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dc) in den.iter().enumerate() {
            rem[i + j] -= &c * dc;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "division was not exact");
    quot
}

/// Euler's totient.
pub fn euler_phi(m: u32) -> u32 {
    (1..=m).filter(|k| k.gcd(&m) == 1).count() as u32
}

/// The field `Q(ζ_m)`.
#[derive(Clone)]
pub struct CycloField {
    m: u32,
    modulus: Arc<Vec<BigInt>>,
}

impl PartialEq for CycloField {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
    }
}

impl Eq for CycloField {}

impl Hash for CycloField {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.m.hash(state);
    }
}

impl fmt::Debug for CycloField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(zeta_{})", self.m)
    }
}

impl CycloField {
    pub fn new(m: u32) -> Self {
        assert!(m >= 1, "conductor must be positive");
        CycloField {
            m,
            modulus: Arc::new(cyclotomic_polynomial(m)),
        }
    }

    pub fn conductor(&self) -> u32 {
        self.m
    }

    /// Degree of the field over `Q`, i.e. `φ(m)`.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.modulus
    }

    pub fn zero(&self) -> CycloElem {
        CycloElem {
            field: self.clone(),
            coeffs: vec![BigRational::zero(); self.degree()],
        }
    }

    pub fn one(&self) -> CycloElem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> CycloElem {
        self.from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(&self, q: BigRational) -> CycloElem {
        let mut e = self.zero();
        e.coeffs[0] = q;
        e
    }

    /// The generator `ζ_m`.
    pub fn zeta(&self) -> CycloElem {
        self.root_power(1)
    }

    /// `ζ_m^k` for any integer `k`.
    pub fn root_power(&self, k: i64) -> CycloElem {
        let k = k.rem_euclid(self.m as i64) as usize;
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = BigRational::one();
        CycloElem {
            field: self.clone(),
            coeffs: self.reduce(coeffs),
        }
    }

    /// The canonical primitive `d`-th root of unity `ζ_m^{m/d}`.
    pub fn primitive_root(&self, d: u32) -> Result<CycloElem> {
        if d == 0 || !self.m.is_multiple_of(d) {
            return Err(Error::NotDivisible { from: d, to: self.m });
        }
        Ok(self.root_power((self.m / d) as i64))
    }

    /// Build an element from an arbitrary-length coefficient vector in `ζ`.
    pub fn from_coeffs(&self, coeffs: Vec<BigRational>) -> CycloElem {
        CycloElem {
            field: self.clone(),
            coeffs: self.reduce(coeffs),
        }
    }

    fn reduce(&self, mut coeffs: Vec<BigRational>) -> Vec<BigRational> {
        let deg = self.degree();
        if coeffs.len() > deg {
            for i in (deg..coeffs.len()).rev() {
                let c = std::mem::replace(&mut coeffs[i], BigRational::zero());
                if c.is_zero() {
                    continue;
                }
                // x^i = x^{i-deg} * x^deg and x^deg = -(lower terms of modulus)
                for (j, mc) in self.modulus[..deg].iter().enumerate() {
                    if !mc.is_zero() {
                        coeffs[i - deg + j] -= &c * BigRational::from_integer(mc.clone());
                    }
                }
            }
        }
        coeffs.resize(deg, BigRational::zero());
        coeffs
    }
}

/// An element of `Q(ζ_m)`.
#[derive(Clone, PartialEq, Eq)]
pub struct CycloElem {
    field: CycloField,
    coeffs: Vec<BigRational>,
}

impl Hash for CycloElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.hash(state);
        self.coeffs.hash(state);
    }
}

impl CycloElem {
    pub fn field(&self) -> &CycloField {
        &self.field
    }

    /// Reduced coefficients with respect to `1, ζ, ..., ζ^{φ(m)-1}`.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Every nonzero element of a field is a unit.
    pub fn is_unit(&self) -> bool {
        !self.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check(&self, other: &CycloElem) -> Result<()> {
        if self.field != other.field {
            Err(Error::FieldMismatch(self.field.m, other.field.m))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &CycloElem) -> Result<CycloElem> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &CycloElem) -> Result<CycloElem> {
        self.check(other)?;
        Ok(self.add_unchecked(&-other))
    }

    pub fn try_mul(&self, other: &CycloElem) -> Result<CycloElem> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &CycloElem) -> CycloElem {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CycloElem {
            field: self.field.clone(),
            coeffs,
        }
    }

    fn mul_unchecked(&self, other: &CycloElem) -> CycloElem {
        if let Some(q) = self.as_rational() {
            return other.scale(q);
        }
        if let Some(q) = other.as_rational() {
            return self.scale(q);
        }
        let n = self.coeffs.len();
        let mut prod = vec![BigRational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        CycloElem {
            field: self.field.clone(),
            coeffs: self.field.reduce(prod),
        }
    }

    /// Multiply by a rational scalar.
    pub fn scale(&self, q: &BigRational) -> CycloElem {
        CycloElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// the cyclotomic modulus.
    pub fn inverse(&self) -> Result<CycloElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(self.field.from_rational(q.recip()));
        }
        let modulus: Vec<BigRational> = self
            .field
            .modulus
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let (g, s) = qpoly::ext_gcd(&self.coeffs, &modulus);
        // g is a nonzero constant because the modulus is irreducible
        debug_assert_eq!(g.len(), 1);
        let ginv = g[0].recip();
        let s: Vec<BigRational> = s.iter().map(|c| c * &ginv).collect();
        Ok(self.field.from_coeffs(s))
    }

    pub fn try_div(&self, other: &CycloElem) -> Result<CycloElem> {
        self.check(other)?;
        Ok(self.mul_unchecked(&other.inverse()?))
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<CycloElem> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.field.one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_unchecked(&sq);
            }
        }
        Ok(acc)
    }

    /// Multiplicative order if the element is a root of unity of order at
    /// most `bound`.
    pub fn root_order(&self, bound: u32) -> Option<u32> {
        let one = self.field.one();
        let mut acc = self.clone();
        for k in 1..=bound {
            if acc == one {
                return Some(k);
            }
            acc = acc.mul_unchecked(self);
        }
        None
    }

    /// Whether this element is a primitive `d`-th root of unity.
    pub fn is_primitive_root(&self, d: u32) -> bool {
        self.root_order(d) == Some(d)
    }

    /// Image under `Q(ζ_m) → Q(ζ_{m2})`, `ζ_m ↦ ζ_{m2}^{m2/m}`.
    pub fn embed(&self, m2: u32) -> Result<CycloElem> {
        let m = self.field.m;
        if m2 == 0 || !m2.is_multiple_of(m) {
            return Err(Error::NotDivisible { from: m, to: m2 });
        }
        let target = CycloField::new(m2);
        Ok(self.embed_into(&target))
    }

    /// As [`CycloElem::embed`] with an already constructed target field.
    pub fn embed_into(&self, target: &CycloField) -> CycloElem {
        assert_eq!(target.m % self.field.m, 0);
        let step = (target.m / self.field.m) as usize;
        let mut coeffs = vec![BigRational::zero(); step * self.coeffs.len().max(1)];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * step] = c.clone();
        }
        target.from_coeffs(coeffs)
    }

    /// Render with the given symbol for `ζ`. Sums of several powers come
    /// back without surrounding parentheses.
    pub fn format_with(&self, symbol: &str) -> String {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            let body = match i {
                0 => format_rational(&a),
                _ => {
                    let pw = if i == 1 {
                        symbol.to_string()
                    } else {
                        format!("{symbol}^{i}")
                    };
                    if a.is_one() {
                        pw
                    } else {
                        format!("{}*{}", format_rational(&a), pw)
                    }
                }
            };
            parts.push((neg, body));
        }
        if parts.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (neg, body)) in parts.iter().enumerate() {
            if idx == 0 {
                if *neg {
                    out.push('-');
                }
            } else {
                out.push_str(if *neg { " - " } else { " + " });
            }
            out.push_str(body);
        }
        out
    }

    /// Number of nonzero coefficients in the power basis.
    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

pub(crate) fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Debug for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_with("z"))
    }
}

impl fmt::Display for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_with("z"))
    }
}

// Operator impls panic on mixed fields; use the `try_*` methods when the
// operands come from untrusted input.
impl<'a> Add<&'a CycloElem> for &'a CycloElem {
    type Output = CycloElem;
    fn add(self, rhs: &'a CycloElem) -> CycloElem {
        self.try_add(rhs).expect("field mismatch")
    }
}

impl<'a> Sub<&'a CycloElem> for &'a CycloElem {
    type Output = CycloElem;
    fn sub(self, rhs: &'a CycloElem) -> CycloElem {
        self.try_sub(rhs).expect("field mismatch")
    }
}

impl<'a> Mul<&'a CycloElem> for &'a CycloElem {
    type Output = CycloElem;
    fn mul(self, rhs: &'a CycloElem) -> CycloElem {
        self.try_mul(rhs).expect("field mismatch")
    }
}

impl Neg for &CycloElem {
    type Output = CycloElem;
    fn neg(self) -> CycloElem {
        CycloElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycloElem {
    type Output = CycloElem;
    fn neg(self) -> CycloElem {
        -&self
    }
}

impl Add for CycloElem {
    type Output = CycloElem;
    fn add(self, rhs: CycloElem) -> CycloElem {
        &self + &rhs
    }
}

impl Sub for CycloElem {
    type Output = CycloElem;
    fn sub(self, rhs: CycloElem) -> CycloElem {
        &self - &rhs
    }
}

impl Mul for CycloElem {
    type Output = CycloElem;
    fn mul(self, rhs: CycloElem) -> CycloElem {
        &self * &rhs
    }
}

/// Dense univariate polynomials over `Q`, just enough for the inverse.
mod qpoly {
    use num_rational::BigRational;
    use num_traits::Zero;

    fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
        while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
        if p.is_empty() {
            p.push(BigRational::zero());
        }
        p
    }

    fn is_zero(p: &[BigRational]) -> bool {
        p.iter().all(Zero::is_zero)
    }

    fn divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        let b = trim(b.to_vec());
        let mut r = trim(a.to_vec());
        let db = b.len() - 1;
        let lead = b[db].clone();
        if r.len() < b.len() {
            return (vec![BigRational::zero()], r);
        }
        let mut q = vec![BigRational::zero(); r.len() - db];
        while !is_zero(&r) && r.len() > db {
            let shift = r.len() - 1 - db;
            let c = r.last().unwrap() / &lead;
            for (j, bc) in b.iter().enumerate() {
                r[shift + j] -= &c * bc;
            }
            q[shift] = c;
            r.pop();
            r = trim(r);
        }
        (trim(q), r)
    }

    fn sub_mul(a: &[BigRational], q: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); a.len().max(q.len() + b.len() - 1)];
        for (i, c) in a.iter().enumerate() {
            out[i] += c;
        }
        for (i, x) in q.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] -= x * y;
            }
        }
        trim(out)
    }

    /// Returns `(g, s)` with `s*a ≡ g (mod m)` and `g = gcd(a, m)`.
    pub fn ext_gcd(a: &[BigRational], m: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        let mut r0 = trim(m.to_vec());
        let mut r1 = trim(a.to_vec());
        let mut s0 = vec![BigRational::zero()];
        let mut s1 = vec![num_traits::One::one()];
        while !is_zero(&r1) {
            let (q, r) = divrem(&r0, &r1);
            let s = sub_mul(&s0, &q, &s1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        (r0, s0)
    }
}

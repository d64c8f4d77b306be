//! Polynomials truncated at a total-degree precision.

use super::{Polynomial, Ring};
use crate::error::{Error, Result};

/// A polynomial modulo all monomials of total degree `>= precision`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet {
    poly: Polynomial,
    precision: u32,
}

impl Jet {
    pub fn new(poly: &Polynomial, precision: u32) -> Jet {
        Jet {
            poly: poly.truncate(precision),
            precision,
        }
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn ring(&self) -> &Ring {
        self.poly.ring()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    fn check(&self, other: &Jet) -> Result<()> {
        if self.precision != other.precision {
            return Err(Error::Incompatible(format!(
                "jet precisions {} and {}",
                self.precision, other.precision
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.check(other)?;
        Ok(Jet {
            poly: self.poly.try_add(&other.poly)?,
            precision: self.precision,
        })
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.check(other)?;
        Ok(Jet {
            poly: self.poly.try_sub(&other.poly)?,
            precision: self.precision,
        })
    }

    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.check(other)?;
        Ok(Jet {
            poly: self.poly.mul_trunc(&other.poly, self.precision)?,
            precision: self.precision,
        })
    }

    /// Inverse of a jet with nonzero constant term.
    pub fn inverse(&self) -> Result<Jet> {
        let c = self.poly.constant_term();
        if c.is_zero() {
            return Err(Error::NotUnit(self.poly.to_string()));
        }
        let cinv = c.inverse()?;
        // a = c(1 + u) with u in the maximal ideal
        let u = (&self.poly.scale(&cinv) - &self.ring().one()).truncate(self.precision);
        let neg_u = -&u;
        let mut term = self.ring().one();
        let mut sum = self.ring().zero();
        for _ in 0..self.precision {
            sum = &sum + &term;
            term = term.mul_trunc(&neg_u, self.precision)?;
            if term.is_zero() {
                break;
            }
        }
        Ok(Jet {
            poly: sum.scale(&cinv).truncate(self.precision),
            precision: self.precision,
        })
    }
}

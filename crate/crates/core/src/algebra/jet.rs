use std::fmt;

use super::poly::{Monomial, Poly, Ring};
use crate::error::{Error, Result};

/// A power series at the origin known up to total degree `prec`
/// (`None` means the stored polynomial is exact).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Jet {
    poly: Poly,
    prec: Option<i64>,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

fn bound_of(prec: Option<i64>) -> Option<u32> {
    prec.map(|p| p.max(-1)).map(|p| if p < 0 { 0 } else { p as u32 })
}

impl Jet {
    pub fn exact(poly: Poly) -> Jet {
        Jet { poly, prec: None }
    }

    /// Truncates `poly` at total degree `prec`.
    pub fn with_prec(poly: Poly, prec: i64) -> Jet {
        let poly = if prec < 0 {
            Poly::zero(poly.ring())
        } else {
            poly.truncate(prec as u32)
        };
        Jet { poly, prec: Some(prec) }
    }

    pub fn with_prec_opt(poly: Poly, prec: Option<i64>) -> Jet {
        match prec {
            None => Jet::exact(poly),
            Some(p) => Jet::with_prec(poly, p),
        }
    }

    pub fn truncated(&self, prec: Option<i64>) -> Jet {
        match min_prec(self.prec, prec) {
            None => self.clone(),
            Some(p) => Jet::with_prec(self.poly.clone(), p),
        }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn into_poly(self) -> Poly {
        self.poly
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    pub fn ring(&self) -> &Ring {
        self.poly.ring()
    }

    /// True when no term is known to be nonzero.
    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Zero and certified to be zero.
    pub fn is_certainly_zero(&self) -> bool {
        self.poly.is_zero() && self.prec.is_none()
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet {
            poly: self.poly.add(&o.poly),
            prec: min_prec(self.prec, o.prec),
        }
        .normalized()
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Jet {
        Jet {
            poly: self.poly.neg(),
            prec: self.prec,
        }
    }

    pub fn scale(&self, c: &super::coeff::Coeff) -> Jet {
        Jet {
            poly: self.poly.scale(c),
            prec: self.prec,
        }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let prec = min_prec(self.prec, o.prec);
        Jet {
            poly: self.poly.mul_trunc(&o.poly, bound_of(prec)),
            prec,
        }
        .normalized()
    }

    pub fn pow(&self, e: u32) -> Jet {
        Jet {
            poly: self.poly.pow_trunc(e, bound_of(self.prec)),
            prec: self.prec,
        }
    }

    fn normalized(self) -> Jet {
        match self.prec {
            Some(p) => Jet::with_prec(self.poly, p),
            None => self,
        }
    }

    pub fn derivative(&self, alpha: &Monomial) -> Jet {
        let prec = self.prec.map(|p| p - alpha.degree() as i64);
        Jet {
            poly: self.poly.derivative(alpha),
            prec,
        }
        .normalized()
    }

    pub fn restrict(&self, vanished: &[usize]) -> Jet {
        Jet {
            poly: self.poly.restrict(vanished),
            prec: self.prec,
        }
    }

    /// Order at the origin when it is determined by the known terms;
    /// `Ok(None)` for the exact zero series.
    pub fn ord(&self) -> Result<Option<u32>> {
        match (self.poly.ord(), self.prec) {
            (Some(d), _) => Ok(Some(d)),
            (None, None) => Ok(None),
            (None, Some(p)) => Err(Error::PrecisionExhausted(format!(
                "series vanishes through degree {p}; order not certified"
            ))),
        }
    }

    /// Lower bound on the order: the true order when known, `prec + 1` otherwise.
    pub fn ord_lower_bound(&self) -> Option<u32> {
        match (self.poly.ord(), self.prec) {
            (Some(d), _) => Some(d),
            (None, None) => None,
            (None, Some(p)) => Some((p + 1).max(0) as u32),
        }
    }

    /// `f(images)` where the images have no constant term when inexact.
    pub fn compose(&self, images: &[Jet], target: &Ring) -> Jet {
        // an image error only matters through variables of the known part;
        // through the tail it lands beyond `self.prec`
        let mut used = vec![false; images.len()];
        for (m, _) in self.poly.terms() {
            for (u, &e) in used.iter_mut().zip(&m.0) {
                *u |= e > 0;
            }
        }
        let mut prec = self.prec;
        for (im, u) in images.iter().zip(used) {
            if im.prec.is_some() {
                debug_assert!(im.poly.constant_term().is_zero());
            }
            if u {
                prec = min_prec(prec, im.prec);
            }
        }
        let polys: Vec<Poly> = images.iter().map(|j| j.poly.clone()).collect();
        let poly = self.poly.compose(&polys, target, bound_of(prec));
        Jet { poly, prec }.normalized()
    }

    pub fn with_ring(&self, ring: &Ring) -> Jet {
        Jet {
            poly: self.poly.with_ring(ring),
            prec: self.prec,
        }
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.prec {
            None => write!(f, "{}", self.poly),
            Some(p) => write!(f, "{} + O({})", self.poly, p + 1),
        }
    }
}

/// Order of a polynomial at the origin, certified against a precision bound.
/// Returns `Ok(None)` for zero.
pub fn order_at_origin(f: &Jet) -> Result<Option<u32>> {
    f.ord()
}

use super::coeff::Coeff;
use super::jet::Jet;
use super::linalg;
use super::poly::{Poly, Ring};
use crate::error::{Error, Result};

/// An automorphism of the completed local ring at the origin.
///
/// `forward[j]` expresses new coordinate `j` in the old variables and
/// `inverse[i]` expresses old variable `i` in the new coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateChange {
    source: Ring,
    target: Ring,
    forward: Vec<Jet>,
    inverse: Vec<Jet>,
}

impl CoordinateChange {
    pub fn identity(ring: &Ring) -> CoordinateChange {
        let v: Vec<Jet> = ring.vars().into_iter().map(Jet::exact).collect();
        CoordinateChange {
            source: ring.clone(),
            target: ring.clone(),
            forward: v.clone(),
            inverse: v,
        }
    }

    /// Builds the change from the new coordinates and computes the inverse to `precision`.
    pub fn new(source: &Ring, target: &Ring, forward: Vec<Jet>, precision: u32) -> Result<CoordinateChange> {
        if forward.len() != source.nvars() || target.nvars() != source.nvars() {
            return Err(Error::RingMismatch("coordinate count differs".into()));
        }
        for f in &forward {
            if !f.poly().constant_term().is_zero() {
                return Err(Error::Invalid(format!("coordinate {f} does not vanish at the origin")));
            }
        }
        let inverse = formal_inverse(source, target, &forward, precision)?;
        Ok(CoordinateChange {
            source: source.clone(),
            target: target.clone(),
            forward,
            inverse,
        })
    }

    /// Replaces the listed coordinates by new expressions, keeping the others.
    /// `names` renames the new coordinate system (defaults to the old names).
    pub fn replacing(
        source: &Ring,
        replacements: &[(usize, Jet)],
        names: Option<&[String]>,
        precision: u32,
    ) -> Result<CoordinateChange> {
        let mut forward: Vec<Jet> = source.vars().into_iter().map(Jet::exact).collect();
        for (i, g) in replacements {
            forward[*i] = g.clone();
        }
        let target = match names {
            Some(n) => source.renamed(n),
            None => source.clone(),
        };
        CoordinateChange::new(source, &target, forward, precision)
    }

    pub fn source(&self) -> &Ring {
        &self.source
    }

    pub fn target(&self) -> &Ring {
        &self.target
    }

    pub fn forward(&self) -> &[Jet] {
        &self.forward
    }

    pub fn inverse(&self) -> &[Jet] {
        &self.inverse
    }

    /// Both directions are exact polynomial maps.
    pub fn is_exact(&self) -> bool {
        self.forward.iter().chain(&self.inverse).all(Jet::is_exact)
    }

    pub fn is_identity(&self) -> bool {
        self.forward
            .iter()
            .enumerate()
            .all(|(i, f)| f.is_exact() && *f.poly() == self.source.var(i))
    }

    /// Rewrites a series in the old variables in terms of the new coordinates.
    pub fn substitute(&self, f: &Jet) -> Jet {
        let g = f.with_ring(&self.source).compose(&self.inverse, &self.target);
        if g.is_exact() || !f.is_exact() || !self.forward.iter().all(Jet::is_exact) {
            return g;
        }
        // a polynomial answer is certified by mapping it back
        let fwd: Vec<Poly> = self.forward.iter().map(|j| j.poly().clone()).collect();
        if g.poly().compose(&fwd, &self.source, None) == f.poly().with_ring(&self.source) {
            Jet::exact(g.into_poly())
        } else {
            g
        }
    }

    /// Rewrites a series in the new coordinates in terms of the old variables.
    pub fn pull_back(&self, g: &Jet) -> Jet {
        g.with_ring(&self.target).compose(&self.forward, &self.source)
    }

    pub fn inverted(&self) -> CoordinateChange {
        CoordinateChange {
            source: self.target.clone(),
            target: self.source.clone(),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &CoordinateChange) -> CoordinateChange {
        let forward = next.forward.iter().map(|g| self.pull_back(g)).collect();
        let inverse = self.inverse.iter().map(|f| next.substitute(f)).collect();
        CoordinateChange {
            source: self.source.clone(),
            target: next.target.clone(),
            forward,
            inverse,
        }
    }
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

/// Fixed-point iteration `x <- L^{-1}(y - h(x))`, where `L` is the linear part
/// and `h` the higher-order part of the forward map. Each pass fixes one more degree.
fn formal_inverse(source: &Ring, target: &Ring, forward: &[Jet], precision: u32) -> Result<Vec<Jet>> {
    let n = source.nvars();
    let field = source.field();
    let lin: Vec<Vec<Coeff>> = forward.iter().map(|f| f.poly().linear_part()).collect();
    let linv = linalg::invert(field, &lin).ok_or(Error::NonInvertibleLinearPart)?;
    let higher: Vec<Poly> = forward
        .iter()
        .zip(&lin)
        .map(|(f, l)| {
            let mut p = f.poly().clone();
            for (i, c) in l.iter().enumerate() {
                p.add_term(super::poly::Monomial::var(n, i), c.neg());
            }
            p
        })
        .collect();
    let fprec = forward.iter().fold(None, |acc, f| min_prec(acc, f.prec()));
    let ys = target.vars();
    let apply_linv = |rhs: &[Poly]| -> Vec<Poly> {
        (0..n)
            .map(|i| {
                let mut acc = target.zero();
                for (j, r) in rhs.iter().enumerate() {
                    if !linv[i][j].is_zero() {
                        acc = acc.add(&r.scale(&linv[i][j]));
                    }
                }
                acc
            })
            .collect()
    };
    let mut psi = apply_linv(&ys);
    // after the pass with bound k, psi is correct through degree k
    let mut k = 2.min(precision);
    loop {
        let bound = Some(k);
        let rhs: Vec<Poly> = (0..n)
            .map(|j| ys[j].sub(&higher[j].with_ring(source).compose(&psi, target, bound)))
            .collect();
        let next = apply_linv(&rhs);
        let settled = next == psi;
        psi = next;
        if k == precision && settled {
            break;
        }
        k = (k + 1).min(precision);
    }
    let terminated = psi.iter().all(|p| p.degree().is_none_or(|d| d < precision));
    let exact = fprec.is_none() && terminated && {
        let fwd: Vec<Poly> = forward.iter().map(|f| f.poly().clone()).collect();
        fwd.iter()
            .enumerate()
            .all(|(j, f)| f.compose(&psi, target, None) == ys[j])
    };
    Ok(psi
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            // an untouched coordinate inverts to itself
            let kept = forward[i].is_exact() && *forward[i].poly() == source.var(i);
            if exact || kept {
                Jet::exact(p)
            } else {
                let prec = min_prec(Some(precision as i64), fprec).unwrap();
                Jet::with_prec(p, prec)
            }
        })
        .collect())
}

/// Recomputes the inverse direction to `precision` and returns it as a change.
pub fn invert_change(change: &CoordinateChange, precision: u32) -> Result<CoordinateChange> {
    let fresh = CoordinateChange::new(&change.source, &change.target, change.forward.clone(), precision)?;
    Ok(fresh.inverted())
}

/// `f` expressed in the new coordinates, truncated at `precision` unless exact.
pub fn substitute(f: &Poly, change: &CoordinateChange, precision: u32) -> Jet {
    change
        .substitute(&Jet::exact(f.clone()))
        .truncated(if change.is_exact() {
            None
        } else {
            Some(precision as i64)
        })
}

/// Sets the listed variables to zero.
pub fn restrict(f: &Jet, vanished: &[usize]) -> Jet {
    f.restrict(vanished)
}

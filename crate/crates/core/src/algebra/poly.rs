use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;

use super::coeff::{binomial, Coeff, Field};

/// Exponent vector, ordered graded-lexicographically: lower total degree
/// first, and within a degree the larger exponent on the earlier variable first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Monomial {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Monomial {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        if o.divides(self) {
            Some(Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect()))
        } else {
            None
        }
    }

    pub fn weighted_degree(&self, w: &[i64]) -> i64 {
        self.0.iter().zip(w).map(|(e, w)| *e as i64 * w).sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(&o.0) {
                if a != b {
                    return b.cmp(a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct RingInner {
    field: Field,
    names: Vec<String>,
}

/// A coefficient field together with an ordered list of variable names.
#[derive(Debug, Clone)]
pub struct Ring(Arc<RingInner>);

impl PartialEq for Ring {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || self.0 == o.0
    }
}

impl Eq for Ring {}

impl Ring {
    pub fn new<S: AsRef<str>>(field: Field, names: &[S]) -> Ring {
        Ring(Arc::new(RingInner {
            field,
            names: names.iter().map(|s| s.as_ref().to_string()).collect(),
        }))
    }

    pub fn field(&self) -> Field {
        self.0.field
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn nvars(&self) -> usize {
        self.0.names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.names.iter().position(|n| n == name)
    }

    pub fn var(&self, i: usize) -> Poly {
        Poly::monomial(self, Monomial::var(self.nvars(), i), self.field().one())
    }

    pub fn vars(&self) -> Vec<Poly> {
        (0..self.nvars()).map(|i| self.var(i)).collect()
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(self)
    }

    pub fn one(&self) -> Poly {
        Poly::constant(self, self.field().one())
    }

    pub fn constant(&self, c: Coeff) -> Poly {
        Poly::constant(self, c)
    }

    pub fn int(&self, v: i64) -> Poly {
        Poly::constant(self, self.field().from_i64(v))
    }

    /// Same field, new variable names (same count).
    pub fn renamed<S: AsRef<str>>(&self, names: &[S]) -> Ring {
        assert_eq!(names.len(), self.nvars());
        Ring::new(self.field(), names)
    }
}

/// Sparse multivariate polynomial with no stored zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    ring: Ring,
    terms: BTreeMap<Monomial, Coeff>,
}

impl Poly {
    pub fn zero(ring: &Ring) -> Poly {
        Poly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Ring, c: Coeff) -> Poly {
        Poly::monomial(ring, Monomial::one(ring.nvars()), c)
    }

    pub fn monomial(ring: &Ring, m: Monomial, c: Coeff) -> Poly {
        assert_eq!(m.len(), ring.nvars());
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn from_terms(ring: &Ring, it: impl IntoIterator<Item = (Monomial, Coeff)>) -> Poly {
        let mut p = Poly::zero(ring);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn field(&self) -> Field {
        self.ring.field()
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> + '_ {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Coeff> {
        self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field().zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_term(&self) -> Coeff {
        self.coeff(&Monomial::one(self.nvars()))
    }

    /// First term in the canonical order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next()
    }

    /// Maximal total degree (`None` for zero).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Minimal total degree of a term (`None` for zero).
    pub fn ord(&self) -> Option<u32> {
        self.terms.keys().next().map(|m| m.degree())
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_ring(&self, o: &Poly) {
        assert!(self.ring == o.ring, "polynomials live in different rings");
    }

    pub fn add(&self, o: &Poly) -> Poly {
        self.check_ring(o);
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &Coeff) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.mul(c))).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Coeff) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.mul(c))).collect(),
        }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        self.mul_trunc(o, None)
    }

    /// Product keeping only terms of total degree `<= bound`.
    pub fn mul_trunc(&self, o: &Poly, bound: Option<u32>) -> Poly {
        self.check_ring(o);
        let mut r = Poly::zero(&self.ring);
        for (m1, c1) in &self.terms {
            let d1 = m1.degree();
            if let Some(b) = bound {
                if d1 > b {
                    break;
                }
            }
            for (m2, c2) in &o.terms {
                if let Some(b) = bound {
                    if d1 + m2.degree() > b {
                        break;
                    }
                }
                r.add_term(m1.mul(m2), c1.mul(c2));
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> Poly {
        self.pow_trunc(e, None)
    }

    pub fn pow_trunc(&self, e: u32, bound: Option<u32>) -> Poly {
        let mut acc = self.ring.one().truncate_opt(bound);
        let mut base = self.truncate_opt(bound);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_trunc(&base, bound);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_trunc(&base, bound);
            }
        }
        acc
    }

    pub fn truncate(&self, bound: u32) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= bound)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn truncate_opt(&self, bound: Option<u32>) -> Poly {
        match bound {
            Some(b) => self.truncate(b),
            None => self.clone(),
        }
    }

    /// Divided-power derivative: `D_{x^alpha}(x^m) = prod C(m_i, alpha_i) x^{m - alpha}`.
    pub fn derivative(&self, alpha: &Monomial) -> Poly {
        let field = self.field();
        let mut r = Poly::zero(&self.ring);
        for (m, c) in &self.terms {
            if let Some(q) = m.div(alpha) {
                let mut b = num_bigint::BigUint::from(1u32);
                for (e, a) in m.0.iter().zip(&alpha.0) {
                    if *a > 0 {
                        b *= binomial(*e, *a);
                    }
                }
                r.add_term(q, c.mul(&field.from_biguint(&b)));
            }
        }
        r
    }

    /// First-order derivative in variable `i`.
    pub fn diff(&self, i: usize) -> Poly {
        self.derivative(&Monomial::var(self.nvars(), i))
    }

    /// Evaluates at a point given by field elements.
    pub fn eval(&self, point: &[Coeff]) -> Coeff {
        let mut acc = self.field().zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (e, v) in m.0.iter().zip(point) {
                if *e > 0 {
                    t = t.mul(&v.pow(*e));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// `f(images)`: substitutes `images[i]` for variable `i`; the images live in
    /// their own ring. Terms of degree above `bound` are dropped along the way.
    pub fn compose(&self, images: &[Poly], target: &Ring, bound: Option<u32>) -> Poly {
        assert_eq!(images.len(), self.nvars());
        let mut cache: Vec<Vec<Poly>> = vec![vec![target.one()]; images.len()];
        let mut r = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = target.constant(c.clone());
            for (i, e) in m.0.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                while cache[i].len() <= *e as usize {
                    let next = cache[i].last().unwrap().mul_trunc(&images[i], bound);
                    cache[i].push(next);
                }
                let factor = &cache[i][*e as usize];
                t = match factor.terms.len() {
                    1 => {
                        let (fm, fc) = factor.terms.iter().next().unwrap();
                        t.mul_monomial(fm, fc).truncate_opt(bound)
                    }
                    _ => t.mul_trunc(factor, bound),
                };
                if t.is_zero() {
                    break;
                }
            }
            for (mm, cc) in t.terms {
                r.add_term(mm, cc);
            }
        }
        r
    }

    /// `f(x + p)` for a point `p`.
    pub fn translate(&self, point: &[Coeff]) -> Poly {
        let images: Vec<Poly> = (0..self.nvars())
            .map(|i| self.ring.var(i).add(&self.ring.constant(point[i].clone())))
            .collect();
        self.compose(&images, &self.ring, None)
    }

    /// Drops every term containing a variable from `vanished`.
    pub fn restrict(&self, vanished: &[usize]) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| vanished.iter().all(|&i| m.0[i] == 0))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Coefficients of the degree-one part, one per variable.
    pub fn linear_part(&self) -> Vec<Coeff> {
        (0..self.nvars())
            .map(|i| self.coeff(&Monomial::var(self.nvars(), i)))
            .collect()
    }

    /// Terms whose total degree equals `d`.
    pub fn homogeneous_part(&self, d: u32) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Same terms, read in another ring with the same number of variables.
    pub fn with_ring(&self, ring: &Ring) -> Poly {
        assert_eq!(ring.nvars(), self.nvars());
        assert_eq!(ring.field(), self.field());
        Poly {
            ring: ring.clone(),
            terms: self.terms.clone(),
        }
    }

    /// Re-indexes variables: variable `i` of `self` becomes variable `map[i]` of `target`.
    pub fn remap(&self, target: &Ring, map: &[usize]) -> Poly {
        assert_eq!(map.len(), self.nvars());
        let n = target.nvars();
        Poly::from_terms(
            target,
            self.terms.iter().map(|(m, c)| {
                let mut e = vec![0; n];
                for (i, x) in m.0.iter().enumerate() {
                    e[map[i]] += x;
                }
                (Monomial(e), c.clone())
            }),
        )
    }

    /// Makes the first term (canonical order) have coefficient one.
    pub fn monic(&self) -> Poly {
        match self.leading_term() {
            Some((_, c)) => self.scale(&c.inv()),
            None => self.clone(),
        }
    }

    /// Variables that occur in some term.
    pub fn support(&self) -> Vec<usize> {
        let mut s = vec![false; self.nvars()];
        for m in self.terms.keys() {
            for (i, e) in m.0.iter().enumerate() {
                if *e > 0 {
                    s[i] = true;
                }
            }
        }
        (0..self.nvars()).filter(|&i| s[i]).collect()
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let n = self.nvars();
        let mut g: Option<Vec<u32>> = None;
        for m in self.terms.keys() {
            g = Some(match g {
                None => m.0.clone(),
                Some(v) => v.iter().zip(&m.0).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        Monomial(g.unwrap_or_else(|| vec![0; n]))
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<Poly> {
        let mut r = Poly::zero(&self.ring);
        for (k, c) in &self.terms {
            r.terms.insert(k.div(m)?, c.clone());
        }
        Some(r)
    }

    /// Exact quotient `self / h` when `h` divides `self`.
    pub fn div_exact(&self, h: &Poly) -> Option<Poly> {
        self.check_ring(h);
        let (lm, lc) = h.terms.iter().next_back()?;
        let lc_inv = lc.inv();
        let mut rem = self.clone();
        let mut q = Poly::zero(&self.ring);
        while let Some((m, c)) = rem.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            let t = m.div(lm)?;
            let k = c.mul(&lc_inv);
            rem = rem.sub(&h.mul_monomial(&t, &k));
            q.add_term(t, k);
        }
        Some(q)
    }

    /// Splits by the weighted degree of terms.
    pub fn weighted_components(&self, w: &[i64]) -> BTreeMap<i64, Poly> {
        let mut out: BTreeMap<i64, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.weighted_degree(w))
                .or_insert_with(|| Poly::zero(&self.ring))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Rational coefficient view; only meaningful over `Q`.
    pub fn rational_coeffs(&self) -> Vec<(Monomial, BigRational)> {
        self.terms.iter().map(|(m, c)| (m.clone(), c.to_rational())).collect()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push(if neg { '-' } else { '+' });
            }
            let a = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || m.degree() == 0 {
                factors.push(a.to_string());
            }
            for (i, e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with(self.ring.names()))
    }
}

/// All exponent vectors in `n` variables with total degree exactly `d`,
/// each bounded componentwise by `cap` when given.
pub fn exponents_of_degree(n: usize, d: u32, cap: Option<&[u32]>) -> Vec<Monomial> {
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, cap: Option<&[u32]>, out: &mut Vec<Monomial>) {
        let n = cur.len();
        if i == n - 1 {
            if cap.is_none_or(|c| left <= c[i]) {
                cur[i] = left;
                out.push(Monomial(cur.clone()));
                cur[i] = 0;
            }
            return;
        }
        let top = cap.map_or(left, |c| left.min(c[i]));
        for e in (0..=top).rev() {
            cur[i] = e;
            rec(i + 1, left - e, cur, cap, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Monomial(vec![]));
        }
        return out;
    }
    rec(0, d, &mut vec![0; n], cap, &mut out);
    out
}

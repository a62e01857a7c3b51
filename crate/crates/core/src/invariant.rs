//! The resolution invariant and the maximal admissible center (milling).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::coeff::{fmt_rational, parse_rational, Coeff};
use crate::algebra::linalg;
use crate::algebra::poly::exponents_of_degree;
use crate::algebra::{CoordinateChange, Jet, Monomial, Poly, Ring};
use crate::error::{Error, Result};
use crate::rees::{Center, CenterEntry, GradedElement, ReesAlgebra};

/// A rational with an optional `+`: `a < a+ < b` whenever `a < b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QPlus {
    pub value: BigRational,
    pub plus: bool,
}

impl QPlus {
    pub fn new(value: BigRational, plus: bool) -> QPlus {
        QPlus { value, plus }
    }

    /// Scalar multiplication by a positive rational.
    pub fn scale(&self, c: &BigRational) -> QPlus {
        QPlus {
            value: &self.value * c,
            plus: self.plus,
        }
    }
}

impl fmt::Display for QPlus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", fmt_rational(&self.value), if self.plus { "+" } else { "" })
    }
}

impl FromStr for QPlus {
    type Err = Error;
    fn from_str(s: &str) -> Result<QPlus> {
        let t = s.trim();
        match t.strip_suffix('+') {
            Some(v) => Ok(QPlus::new(parse_rational(v)?, true)),
            None => Ok(QPlus::new(parse_rational(t)?, false)),
        }
    }
}

/// Lexicographically ordered tuple, shorter tuples padded with infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct InvTuple(pub Vec<QPlus>);

impl InvTuple {
    pub fn entries(&self) -> &[QPlus] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parse(items: &[&str]) -> Result<InvTuple> {
        items
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<_>>>()
            .map(InvTuple)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(|q| q.to_string()).collect()
    }
}

impl Ord for InvTuple {
    fn cmp(&self, o: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&o.0) {
            match a.cmp(b) {
                Ordering::Equal => {}
                r => return r,
            }
        }
        // a missing entry is infinity
        o.0.len().cmp(&self.0.len())
    }
}

impl PartialOrd for InvTuple {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for InvTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(","))
    }
}

impl Serialize for InvTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for InvTuple {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<InvTuple, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        let refs: Vec<&str> = v.iter().map(String::as_str).collect();
        InvTuple::parse(&refs).map_err(serde::de::Error::custom)
    }
}

fn int(v: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn ratio_of(g: &GradedElement) -> Result<Option<BigRational>> {
    Ok(g.jet.ord()?.map(|d| int(d) / &g.grade))
}

/// `min_j ord(f_j) / b_j` at the origin; `None` when every generator is zero.
pub fn ord_rees(r: &ReesAlgebra) -> Result<Option<BigRational>> {
    let mut best: Option<BigRational> = None;
    for g in r.gens() {
        if let Some(v) = ratio_of(g)? {
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
    }
    Ok(best)
}

/// The three cotangent ideals of a Rees algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cotangent {
    /// `T^{1/a}`: derivatives of order exactly `b a - 1`.
    Exact,
    /// `T^{<=1/a}`: derivatives of order `< b a`.
    AtMost,
    /// `T^{<1/a}`: derivatives of order `<= b a`.
    Below,
}

/// Generators of the chosen cotangent ideal, made monic and deduplicated.
pub fn cotangent_ideal(r: &ReesAlgebra, a1: &BigRational, variant: Cotangent) -> Vec<Jet> {
    let n = r.ring().nvars();
    let mut out: Vec<Jet> = Vec::new();
    for g in r.gens() {
        let ba = &g.grade * a1;
        let orders: Vec<u32> = match variant {
            Cotangent::Exact => {
                if !ba.is_integer() || ba < BigRational::one() {
                    continue;
                }
                vec![int_of(&(ba - BigRational::one()))]
            }
            Cotangent::AtMost => (0..=int_of(&ceil_minus_one(&ba))).collect(),
            Cotangent::Below => (0..=int_of(&ba.floor())).collect(),
        };
        for k in orders {
            for alpha in exponents_of_degree(n, k, None) {
                let d = g.jet.derivative(&alpha);
                if d.is_zero() {
                    continue;
                }
                let m = Jet::with_prec_opt(d.poly().monic(), d.prec());
                if !out.contains(&m) {
                    out.push(m);
                }
            }
        }
    }
    let keep: Vec<bool> = out
        .iter()
        .map(|g| {
            !g.is_exact()
                || !out
                    .iter()
                    .any(|h| h != g && h.is_exact() && g.poly().div_exact(h.poly()).is_some())
        })
        .collect();
    out.into_iter().zip(keep).filter(|(_, k)| *k).map(|(g, _)| g).collect()
}

fn ceil_minus_one(x: &BigRational) -> BigRational {
    if x <= &BigRational::zero() {
        return -BigRational::one();
    }
    x.ceil() - BigRational::one()
}

fn int_of(x: &BigRational) -> u32 {
    if x < &BigRational::zero() {
        return 0;
    }
    u32::try_from(x.to_integer()).unwrap_or(u32::MAX)
}

/// A maximal contact: free parameters in their slots, then divisorial coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalContact {
    pub a: BigRational,
    pub free: Vec<(usize, Jet)>,
    pub divisorial: Vec<usize>,
}

impl MaximalContact {
    /// `a_1 * (1, ..., 1, 1+, ..., 1+)`.
    pub fn inv1(&self) -> Vec<QPlus> {
        let mut v: Vec<QPlus> = self.free.iter().map(|_| QPlus::new(self.a.clone(), false)).collect();
        v.extend(self.divisorial.iter().map(|_| QPlus::new(self.a.clone(), true)));
        v
    }

    pub fn slots(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.free.iter().map(|(i, _)| *i).collect();
        s.extend(&self.divisorial);
        s
    }

    pub fn params(&self, ring: &Ring) -> Vec<(usize, Jet, bool)> {
        let mut v: Vec<(usize, Jet, bool)> = self.free.iter().map(|(i, j)| (*i, j.clone(), false)).collect();
        v.extend(self.divisorial.iter().map(|&i| (i, Jet::exact(ring.var(i)), true)));
        v
    }
}

/// Torus weights of each variable (one row per torus factor).
pub type Grading = Vec<Vec<i64>>;

fn weight_of(grading: &Grading, m: &Monomial) -> Vec<i64> {
    grading.iter().map(|row| m.weighted_degree(row)).collect()
}

fn homogeneous_component(j: &Jet, grading: &Grading, w: &[i64]) -> Jet {
    let p = Poly::from_terms(
        j.ring(),
        j.poly()
            .terms()
            .filter(|(m, _)| weight_of(grading, m) == w)
            .map(|(m, c)| (m.clone(), c.clone())),
    );
    Jet::with_prec_opt(p, j.prec())
}

/// Elements of `T^{1/a}` that can have a nonzero linear part: `D_{m - e_i}(f)`
/// for terms `m` of the lowest degree `b a` of generators of order exactly `b a`.
fn tangent_elements(gens: &[GradedElement], a: &BigRational) -> Result<Vec<Jet>> {
    let mut out: Vec<Jet> = Vec::new();
    let mut seen: Vec<(usize, Monomial)> = Vec::new();
    for (k, g) in gens.iter().enumerate() {
        let Some(d) = g.jet.ord()? else { continue };
        if int(d) != &g.grade * a || d == 0 {
            continue;
        }
        for (m, _) in g.jet.poly().terms() {
            if m.degree() != d {
                break;
            }
            for i in 0..m.len() {
                if m.0[i] == 0 {
                    continue;
                }
                let mut alpha = m.clone();
                alpha.0[i] -= 1;
                if seen.contains(&(k, alpha.clone())) {
                    continue;
                }
                seen.push((k, alpha.clone()));
                let t = g.jet.derivative(&alpha);
                if t.prec().is_some_and(|p| p < 1) {
                    return Err(Error::PrecisionExhausted("linear part of a cotangent element".into()));
                }
                if t.poly().linear_part().iter().any(|c| !c.is_zero()) {
                    out.push(t);
                }
            }
        }
    }
    Ok(out)
}

fn maximal_contact_inner(
    gens: &[GradedElement],
    a: &BigRational,
    divisors: &[bool],
    vanished: &[usize],
    grading: Option<&Grading>,
) -> Result<MaximalContact> {
    let tel = tangent_elements(gens, a)?;
    let ring = match gens.first() {
        Some(g) => g.jet.ring().clone(),
        None => return Err(Error::Invalid("empty algebra".into())),
    };
    let n = ring.nvars();
    let field = ring.field();
    let lin: Vec<Vec<Coeff>> = tel.iter().map(|t| t.poly().linear_part()).collect();
    let free_cols: Vec<usize> = (0..n).filter(|i| !divisors[*i] && !vanished.contains(i)).collect();
    let div_cols: Vec<usize> = (0..n).filter(|i| divisors[*i] && !vanished.contains(i)).collect();

    // free part: reduced echelon form of the free projections, tracking combinations
    let m = tel.len();
    let aug: Vec<Vec<Coeff>> = lin
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let mut r: Vec<Coeff> = free_cols.iter().map(|&c| row[c].clone()).collect();
            r.extend((0..m).map(|j| if j == k { field.one() } else { field.zero() }));
            r
        })
        .collect();
    let (red, piv) = linalg::rref(&aug);
    let mut free = Vec::new();
    for (row, p) in red.iter().zip(&piv) {
        if *p >= free_cols.len() {
            break;
        }
        let slot = free_cols[*p];
        let mut acc: Option<Jet> = None;
        for (k, mu) in row[free_cols.len()..].iter().enumerate() {
            if mu.is_zero() {
                continue;
            }
            let term = tel[k].scale(mu);
            acc = Some(match acc {
                None => term,
                Some(s) => s.add(&term),
            });
        }
        let mut contact = acc.expect("pivot row has a combination");
        if let Some(gr) = grading {
            let w = weight_of(gr, &Monomial::var(n, slot));
            contact = homogeneous_component(&contact, gr, &w);
        }
        // x_slot * unit cuts out the same hypersurface and needs no series inverse
        if contact.is_exact() && is_var_times_unit(contact.poly(), slot) {
            contact = Jet::exact(contact.ring().var(slot));
        }
        free.push((slot, contact));
    }

    // divisorial part: support of (linear span) ∩ (span of divisorial coordinates)
    let order: Vec<usize> = free_cols.iter().chain(&div_cols).copied().collect();
    let permuted: Vec<Vec<Coeff>> = lin
        .iter()
        .map(|row| order.iter().map(|&c| row[c].clone()).collect())
        .collect();
    let (red2, piv2) = linalg::rref(&permuted);
    let mut divisorial: Vec<usize> = Vec::new();
    for (row, p) in red2.iter().zip(&piv2) {
        if *p < free_cols.len() {
            continue;
        }
        for (j, c) in row.iter().enumerate().skip(free_cols.len()) {
            if !c.is_zero() && !divisorial.contains(&order[j]) {
                divisorial.push(order[j]);
            }
        }
    }
    divisorial.sort_unstable();
    if free.is_empty() && divisorial.is_empty() {
        return Err(Error::NoContact {
            ord: "?".into(),
            a1: fmt_rational(a),
        });
    }
    Ok(MaximalContact {
        a: a.clone(),
        free,
        divisorial,
    })
}

/// Maximal contact of `R` at the origin for `a1 = ord(R)`.
pub fn maximal_contact(
    r: &ReesAlgebra,
    a1: &BigRational,
    divisors: &[bool],
    grading: Option<&Grading>,
) -> Result<MaximalContact> {
    let ord = ord_rees(r)?;
    if ord.as_ref() != Some(a1) {
        return Err(Error::NoContact {
            ord: ord.map_or("inf".into(), |o| fmt_rational(&o)),
            a1: fmt_rational(a1),
        });
    }
    maximal_contact_inner(r.gens(), a1, divisors, &[], grading)
}

/// Nested milling state: fixed contact blocks plus residual generators on `H`.
#[derive(Debug, Clone)]
pub struct MillingState {
    pub ring: Ring,
    pub residual: Vec<GradedElement>,
    /// Lower bound on `ord/b` for generators that vanish to the working precision.
    pub tail: Option<BigRational>,
    /// Fixed contacts in current coordinates: `(slot, parameter, a, divisorial)`.
    pub fixed: Vec<(usize, Jet, BigRational, bool)>,
    pub vanished: Vec<usize>,
    /// The current coordinates written in the input variables.
    pub forward: Vec<Jet>,
    pub divisors: Vec<bool>,
}

impl MillingState {
    pub fn new(r: &ReesAlgebra, divisors: &[bool]) -> MillingState {
        let mut st = MillingState {
            ring: r.ring().clone(),
            residual: Vec::new(),
            tail: None,
            fixed: Vec::new(),
            vanished: Vec::new(),
            forward: r.ring().vars().into_iter().map(Jet::exact).collect(),
            divisors: divisors.to_vec(),
        };
        for g in r.gens() {
            st.push(g.clone());
        }
        st
    }

    fn push(&mut self, g: GradedElement) {
        if !g.jet.is_zero() {
            self.residual.push(g);
        } else if let Some(lb) = g.jet.ord_lower_bound() {
            let v = int(lb) / &g.grade;
            if self.tail.as_ref().is_none_or(|t| v < *t) {
                self.tail = Some(v);
            }
        }
    }

    pub fn residual_algebra(&self) -> ReesAlgebra {
        ReesAlgebra::new(&self.ring, self.residual.clone())
    }
}

fn is_var_times_unit(p: &Poly, slot: usize) -> bool {
    let lin = Monomial::var(p.nvars(), slot);
    p.terms().all(|(m, _)| m.0[slot] > 0) && p.terms().any(|(m, _)| *m == lin)
}

/// Fixes the contact block and replaces the residual by its graded coefficients
/// `c_alpha t^{b - |alpha|/a}`, `|alpha| < b a`, restricted to `V(contact)`.
pub fn coefficient_ideal(state: &MillingState, contact: &MaximalContact, precision: u32) -> Result<MillingState> {
    let reps: Vec<(usize, Jet)> = contact.free.clone();
    let step = if reps.is_empty() {
        CoordinateChange::identity(&state.ring)
    } else {
        CoordinateChange::replacing(&state.ring, &reps, None, precision)?
    };
    let slots = contact.slots();
    let a = &contact.a;
    let mut forward = state.forward.clone();
    for (slot, c) in &reps {
        forward[*slot] = c.compose(&state.forward, &state.ring);
    }
    let mut next = MillingState {
        ring: state.ring.clone(),
        residual: Vec::new(),
        tail: state.tail.clone(),
        fixed: state.fixed.clone(),
        vanished: state.vanished.clone(),
        forward,
        divisors: state.divisors.clone(),
    };
    for (slot, p, d) in contact.params(&state.ring) {
        next.fixed.push((slot, p, a.clone(), d));
    }
    next.vanished.extend(&slots);
    for g in &state.residual {
        let h = step.substitute(&g.jet);
        let ba = &g.grade * a;
        let mut coeffs: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
        for (m, c) in h.poly().terms() {
            let alpha: Vec<u32> = slots.iter().map(|&s| m.0[s]).collect();
            let k: u32 = alpha.iter().sum();
            if int(k) >= ba {
                continue;
            }
            let mut rest = m.clone();
            for &s in &slots {
                rest.0[s] = 0;
            }
            coeffs
                .entry(alpha)
                .or_insert_with(|| Poly::zero(&state.ring))
                .add_term(rest, c.clone());
        }
        // every alpha below the bound is a generator, including vanishing ones
        let top = int_of(&ceil_minus_one(&ba));
        for k in 0..=top {
            for alpha in exponents_of_degree(slots.len(), k, None) {
                let grade = &g.grade - int(k) / a;
                let poly = coeffs.remove(&alpha.0).unwrap_or_else(|| Poly::zero(&state.ring));
                let jet = Jet::with_prec_opt(poly, h.prec().map(|p| p - k as i64));
                next.push(GradedElement::new(jet, grade));
            }
        }
    }
    Ok(next)
}

/// One milling step as recorded in the result.
#[derive(Debug, Clone)]
pub struct MillingStep {
    pub a: BigRational,
    /// Parameters in the coordinates current at this step: `(slot, parameter, divisorial)`.
    pub contact: Vec<(usize, Jet, bool)>,
    pub residual_before: Vec<GradedElement>,
    pub residual_after: Vec<GradedElement>,
}

#[derive(Debug, Clone)]
pub struct Milling {
    pub inv: InvTuple,
    pub center: Center,
    pub steps: Vec<MillingStep>,
    /// Variable whose slot each center entry occupies.
    pub slots: Vec<usize>,
    pub precision: u32,
}

#[derive(Debug, Clone, Default)]
pub struct MillingOptions {
    /// Working precision; defaults to twice the largest generator degree.
    pub precision: Option<u32>,
    /// Torus weights; contacts are then chosen homogeneous.
    pub grading: Option<Grading>,
    /// Doublings allowed when results at `N` and `2N` disagree.
    pub budget: u32,
}

pub fn default_precision(r: &ReesAlgebra) -> u32 {
    let d = r.gens().iter().filter_map(|g| g.jet.poly().degree()).max().unwrap_or(1);
    (2 * d).max(4)
}

/// Milling at the origin with a fixed precision.
pub fn mill_at(r: &ReesAlgebra, divisors: &[bool], precision: u32, grading: Option<&Grading>) -> Result<Milling> {
    if r.ring().field().characteristic() != 0 {
        return Err(Error::NotCharZero);
    }
    let ring = r.ring().clone();
    let mut st = MillingState::new(r, divisors);
    let mut inv = Vec::new();
    let mut steps = Vec::new();
    let mut prev: Option<BigRational> = None;
    loop {
        let Some(a) = ord_rees(&st.residual_algebra())? else {
            break;
        };
        if prev.is_none() && a.is_zero() {
            return Err(Error::UnitIdeal);
        }
        if st.tail.as_ref().is_some_and(|t| *t <= a) {
            return Err(Error::PrecisionExhausted(format!(
                "a coefficient vanishing to precision {precision} may reach order {}",
                fmt_rational(&a)
            )));
        }
        if prev.as_ref().is_some_and(|p| a <= *p) {
            return Err(Error::Invalid(format!(
                "milling orders did not increase at {}",
                fmt_rational(&a)
            )));
        }
        let contact = maximal_contact_inner(&st.residual, &a, divisors, &st.vanished, grading)?;
        inv.extend(contact.inv1());
        let next = coefficient_ideal(&st, &contact, precision)?;
        steps.push(MillingStep {
            a: a.clone(),
            contact: contact.params(&ring),
            residual_before: st.residual.clone(),
            residual_after: next.residual.clone(),
        });
        st = next;
        prev = Some(a);
    }
    let mut entries = Vec::new();
    let mut slots = Vec::new();
    for (slot, _, a, d) in &st.fixed {
        let param = st.forward[*slot].clone();
        entries.push(CenterEntry {
            param,
            a: a.clone(),
            divisorial: *d,
        });
        slots.push(*slot);
    }
    let center = Center::new(&ring, entries)?;
    Ok(Milling {
        inv: InvTuple(inv),
        center,
        steps,
        slots,
        precision,
    })
}

/// Milling at `point`, certified by agreement at `N` and `2N`.
///
/// Generators are translated so that the point is the origin; the returned
/// center is written in those local coordinates. Divisors not passing through
/// the point are ignored.
pub fn milling(gens: &[Poly], point: &[Coeff], divisors: &[bool], opts: &MillingOptions) -> Result<Milling> {
    let ring = gens
        .first()
        .map(|g| g.ring().clone())
        .ok_or_else(|| Error::Invalid("no generators".into()))?;
    if ring.field().characteristic() != 0 {
        return Err(Error::NotCharZero);
    }
    let local: Vec<Poly> = gens.iter().map(|g| g.translate(point)).collect();
    let divs: Vec<bool> = divisors.iter().zip(point).map(|(d, p)| *d && p.is_zero()).collect();
    let r = ReesAlgebra::of_ideal(&ring, &local);
    mill_certified(&r, &divs, opts)
}

/// Runs milling at `N` and `2N`, doubling until the invariant and center agree.
pub fn mill_certified(r: &ReesAlgebra, divisors: &[bool], opts: &MillingOptions) -> Result<Milling> {
    let mut n = opts.precision.unwrap_or_else(|| default_precision(r));
    let grading = opts.grading.as_ref();
    let mut last_err = None;
    for _ in 0..=opts.budget.max(2) {
        let lo = mill_at(r, divisors, n, grading);
        let hi = mill_at(r, divisors, 2 * n, grading);
        match (lo, hi) {
            (Ok(a), Ok(b)) if a.inv == b.inv && a.center.normal_form() == b.center.normal_form() => return Ok(a),
            (Err(e @ (Error::UnitIdeal | Error::NotCharZero | Error::Invalid(_) | Error::NoContact { .. })), _) => {
                return Err(e)
            }
            (Err(e), _) | (_, Err(e)) => last_err = Some(e),
            _ => {
                last_err = Some(Error::PrecisionExhausted(format!(
                    "results at {n} and {} differ",
                    2 * n
                )))
            }
        }
        n *= 2;
    }
    Err(last_err.unwrap_or_else(|| Error::PrecisionExhausted("budget exhausted".into())))
}

/// Generators of `supp ord(R, >= a1)` and of `supp inv^1(R, b_1)`.
pub fn support_ideals(r: &ReesAlgebra, a1: &BigRational, contact: &MaximalContact) -> (Vec<Jet>, Vec<Jet>) {
    let ord_locus = cotangent_ideal(r, a1, Cotangent::AtMost);
    let mut inv_locus = ord_locus.clone();
    let ring = r.ring();
    for (_, p, _) in contact.params(ring) {
        let m = Jet::with_prec_opt(p.poly().monic(), p.prec());
        if !inv_locus.contains(&m) {
            inv_locus.push(m);
        }
    }
    let slots = contact.slots();
    let others: Vec<usize> = (0..ring.nvars()).filter(|i| !slots.contains(i)).collect();
    for t in cotangent_ideal(r, a1, Cotangent::Exact) {
        for &j in &others {
            let d = t.derivative(&Monomial::var(ring.nvars(), j));
            if d.is_zero() {
                continue;
            }
            let m = Jet::with_prec_opt(d.poly().monic(), d.prec());
            if !inv_locus.contains(&m) {
                inv_locus.push(m);
            }
        }
    }
    (ord_locus, inv_locus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::coeff::{rat, rat_int};
    use crate::algebra::{parse_polynomial, Field};

    fn ring(names: &[&str]) -> Ring {
        Ring::new(Field::Q, names)
    }

    fn alg(r: &Ring, gens: &[(&str, BigRational)]) -> ReesAlgebra {
        ReesAlgebra::new(
            r,
            gens.iter()
                .map(|(s, b)| GradedElement::exact(parse_polynomial(s, r).unwrap(), b.clone()))
                .collect(),
        )
    }

    fn strings(v: &[Jet]) -> Vec<String> {
        v.iter().map(|j| j.poly().to_string()).collect()
    }

    #[test]
    fn qplus_order() {
        let a = QPlus::new(rat_int(2), false);
        let ap = QPlus::new(rat_int(2), true);
        let b = QPlus::new(rat(5, 2), false);
        assert!(a < ap && ap < b);
        assert_eq!("7/2+".parse::<QPlus>().unwrap(), QPlus::new(rat(7, 2), true));
    }

    #[test]
    fn padding_with_infinity() {
        let t = |s: &[&str]| InvTuple::parse(s).unwrap();
        assert!(t(&["1", "1"]) < t(&["1"]));
        assert!(t(&["2", "7"]) < t(&["2+", "4+", "7"]));
        assert!(t(&["2+", "4+", "7"]) < t(&[]));
        assert_eq!(
            serde_json::to_string(&t(&["2+", "4+", "7"])).unwrap(),
            r#"["2+","4+","7"]"#
        );
    }

    #[test]
    fn orders() {
        let r = ring(&["x", "y", "z"]);
        assert_eq!(
            ord_rees(&alg(&r, &[("x^3+y^4+z^5", rat_int(1))])).unwrap(),
            Some(rat_int(3))
        );
        assert_eq!(
            ord_rees(&alg(&r, &[("y^2+x*z^2", rat(2, 3))])).unwrap(),
            Some(rat_int(3))
        );
        assert_eq!(ord_rees(&alg(&r, &[("1", rat_int(1))])).unwrap(), Some(rat_int(0)));
    }

    #[test]
    fn cotangent_examples() {
        let r = ring(&["x", "y", "z"]);
        let t = cotangent_ideal(&alg(&r, &[("x^3+y^4+z^5", rat_int(1))]), &rat_int(3), Cotangent::Exact);
        assert_eq!(strings(&t), vec!["x", "y^2", "z^3"]);
        let r3 = ring(&["x1", "x2", "x3"]);
        let t = cotangent_ideal(
            &alg(&r3, &[("(x1+x2^2)^2+x3^7", rat_int(1))]),
            &rat_int(2),
            Cotangent::Exact,
        );
        assert_eq!(strings(&t), vec!["x1+x2^2", "x3^6"]);
        let r5 = ring(&["x", "y", "z", "v", "w"]);
        let t = cotangent_ideal(
            &alg(&r5, &[("x^3+y^5+z^7", rat_int(1)), ("v^4*w^2", rat_int(2))]),
            &rat_int(3),
            Cotangent::Exact,
        );
        let mut s = strings(&t);
        s.sort();
        assert_eq!(s, vec!["v", "w", "x", "y^3", "z^5"]);
    }

    #[test]
    fn contact_examples() {
        let r3 = ring(&["x1", "x2", "x3"]);
        let c = maximal_contact(
            &alg(&r3, &[("(x1+x2^2)^2+x3^7", rat_int(1))]),
            &rat_int(2),
            &[true, true, false],
            None,
        )
        .unwrap();
        assert!(c.free.is_empty());
        assert_eq!(c.divisorial, vec![0]);
        assert_eq!(c.inv1(), vec![QPlus::new(rat_int(2), true)]);
        let r6 = ring(&["x1", "x2", "x3", "x4", "x5", "x6"]);
        let c = maximal_contact(
            &alg(&r6, &[("x1*x2*x3+x4^4+x5^2*x6^2", rat_int(1))]),
            &rat_int(3),
            &[false; 6],
            None,
        )
        .unwrap();
        let slots: Vec<usize> = c.free.iter().map(|(s, _)| *s).collect();
        assert_eq!(slots, vec![0, 1, 2]);
        let r2 = ring(&["x", "y"]);
        let c = maximal_contact(&alg(&r2, &[("x^2+y^3", rat_int(1))]), &rat_int(2), &[false; 2], None).unwrap();
        assert_eq!(c.free.len(), 1);
        assert_eq!(c.free[0].0, 0);
        assert_eq!(c.free[0].1.poly().to_string(), "x");
    }

    #[test]
    fn split_form_coefficients() {
        let r = ring(&["x", "y", "w", "z"]);
        let a = alg(&r, &[("x^3+x^2*y*w+z^5", rat_int(1))]);
        let st = MillingState::new(&a, &[false; 4]);
        let c = MaximalContact {
            a: rat_int(3),
            free: vec![(0, Jet::exact(r.var(0)))],
            divisorial: vec![],
        };
        let next = coefficient_ideal(&st, &c, 20).unwrap();
        let got: Vec<(String, String)> = next
            .residual
            .iter()
            .map(|g| (g.jet.poly().to_string(), fmt_rational(&g.grade)))
            .collect();
        assert_eq!(
            got,
            vec![
                ("z^5".to_string(), "1".to_string()),
                ("y*w".to_string(), "1/3".to_string())
            ]
        );
    }

    #[test]
    fn snc_cusp_coefficients() {
        let r = ring(&["x1", "x2", "x3"]);
        let a = alg(&r, &[("(x1+x2^2)^2+x3^7", rat_int(1))]);
        let st = MillingState::new(&a, &[true, true, false]);
        let c = maximal_contact(&a, &rat_int(2), &[true, true, false], None).unwrap();
        let next = coefficient_ideal(&st, &c, 28).unwrap();
        let got: Vec<(String, String)> = next
            .residual
            .iter()
            .map(|g| (g.jet.poly().to_string(), fmt_rational(&g.grade)))
            .collect();
        assert_eq!(
            got,
            vec![
                ("x2^4+x3^7".to_string(), "1".to_string()),
                ("2*x2^2".to_string(), "1/2".to_string())
            ]
        );
    }

    fn mill(r: &Ring, f: &str, divs: &[bool]) -> Milling {
        let f = parse_polynomial(f, r).unwrap();
        let zero = vec![r.field().zero(); r.nvars()];
        milling(&[f], &zero, divs, &MillingOptions::default()).unwrap()
    }

    #[test]
    fn milling_examples() {
        let r3 = ring(&["x1", "x2", "x3"]);
        let m = mill(&r3, "(x1+x2^2)^2+x3^7", &[true, true, false]);
        assert_eq!(m.inv.to_string(), "(2+,4+,7)");
        assert_eq!(m.center.normal_form().text, vec!["x1:2+", "x2:4+", "x3:7"]);
        let r6 = ring(&["x1", "x2", "x3", "x4", "x5", "x6"]);
        let m = mill(&r6, "x1*x2*x3+x4^4+x5^2*x6^2", &[false; 6]);
        assert_eq!(m.inv.to_string(), "(3,3,3,4,4,4)");
        assert_eq!(
            m.center.normal_form().text,
            vec!["x1:3", "x2:3", "x3:3", "x4:4", "x5:4", "x6:4"]
        );
        let r2 = ring(&["x", "y"]);
        assert_eq!(mill(&r2, "x^2+y^3", &[false; 2]).inv.to_string(), "(2,3)");
        assert_eq!(mill(&r2, "x^2", &[false; 2]).inv.to_string(), "(2)");
        assert_eq!(mill(&r2, "(x+y^2)^2+y^5", &[false; 2]).inv.to_string(), "(2,5)");
        assert_eq!(mill(&r2, "x^2+x*y^3", &[false; 2]).inv.to_string(), "(2,6)");
    }

    #[test]
    fn unit_rescaling_is_invisible() {
        let r2 = ring(&["x", "y"]);
        let a = mill(&r2, "x^2+y^3", &[false; 2]);
        let b = mill(&r2, "(1+x)*(x^2+y^3)", &[false; 2]);
        assert_eq!(a.inv, b.inv);
        assert_eq!(a.center.normal_form(), b.center.normal_form());
        let c = mill(&r2, "(3+y)*x^2", &[false; 2]);
        assert_eq!(c.inv.to_string(), "(2)");
    }

    #[test]
    fn degenerate_inputs() {
        let r = ring(&["x"]);
        let zero = vec![r.field().zero()];
        assert_eq!(
            milling(
                &[parse_polynomial("1+x", &r).unwrap()],
                &zero,
                &[false],
                &MillingOptions::default()
            )
            .unwrap_err(),
            Error::UnitIdeal
        );
        assert!(milling(&[r.zero()], &zero, &[false], &MillingOptions::default())
            .unwrap()
            .inv
            .is_empty());
        let f2 = Ring::new(Field::Fp(2), &["x"]);
        assert_eq!(
            milling(&[f2.var(0)], &[f2.field().zero()], &[false], &MillingOptions::default()).unwrap_err(),
            Error::NotCharZero
        );
    }

    #[test]
    fn supports() {
        let r = ring(&["x", "y"]);
        let a = alg(&r, &[("x^2+y^3", rat_int(1))]);
        let c = maximal_contact(&a, &rat_int(2), &[false; 2], None).unwrap();
        let (ord_locus, _) = support_ideals(&a, &rat_int(2), &c);
        assert_eq!(strings(&ord_locus), vec!["x^2+y^3", "x", "y^2"]);
    }
}

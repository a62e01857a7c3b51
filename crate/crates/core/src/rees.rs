//! Rational Rees algebras and weighted centers with their monomial valuations.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::coeff::{fmt_rational, parse_rational, rational_lcm, Coeff};
use crate::algebra::linalg;
use crate::algebra::{parse_polynomial, CoordinateChange, Jet, Monomial, Poly, Ring};
use crate::error::{Error, Result};

/// `f * t^grade`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedElement {
    pub jet: Jet,
    pub grade: BigRational,
}

impl GradedElement {
    pub fn new(jet: Jet, grade: BigRational) -> GradedElement {
        assert!(grade > BigRational::zero(), "grades are positive");
        GradedElement { jet, grade }
    }

    pub fn exact(poly: Poly, grade: BigRational) -> GradedElement {
        GradedElement::new(Jet::exact(poly), grade)
    }
}

/// `O_X[f_j t^{b_j}]` given by finitely many generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReesAlgebra {
    ring: Ring,
    gens: Vec<GradedElement>,
}

impl ReesAlgebra {
    pub fn new(ring: &Ring, gens: Vec<GradedElement>) -> ReesAlgebra {
        ReesAlgebra {
            ring: ring.clone(),
            gens,
        }
    }

    pub fn trivial(ring: &Ring) -> ReesAlgebra {
        ReesAlgebra::new(ring, Vec::new())
    }

    /// `O_X[I t]` for an ideal given by generators.
    pub fn of_ideal(ring: &Ring, generators: &[Poly]) -> ReesAlgebra {
        let gens = generators
            .iter()
            .map(|f| GradedElement::exact(f.clone(), BigRational::one()))
            .collect();
        ReesAlgebra::new(ring, gens)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn gens(&self) -> &[GradedElement] {
        &self.gens
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.iter().all(|g| g.jet.is_certainly_zero())
    }

    /// Smallest positive rational `w` with every grade in `(1/w)Z`.
    pub fn grading_denominator(&self) -> BigRational {
        let inv: Vec<BigRational> = self.gens.iter().map(|g| g.grade.recip()).collect();
        rational_lcm(&inv)
    }

    /// The `t -> t^{w0}` rescaling.
    pub fn rescale(&self, w0: &BigRational) -> ReesAlgebra {
        assert!(*w0 > BigRational::zero());
        let gens = self
            .gens
            .iter()
            .map(|g| GradedElement::new(g.jet.clone(), &g.grade * w0))
            .collect();
        ReesAlgebra::new(&self.ring, gens)
    }
}

pub fn rescale(r: &ReesAlgebra, w0: &BigRational) -> ReesAlgebra {
    r.rescale(w0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterEntry {
    pub param: Jet,
    pub a: BigRational,
    pub divisorial: bool,
}

/// A weighted partial coordinate system `{(x_i, a_i)}` standing for
/// `O_X[x_1 t^{1/a_1}, ..., x_k t^{1/a_k}]^int`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Center {
    ring: Ring,
    entries: Vec<CenterEntry>,
}

/// Canonical form of a center used to decide equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub entries: Vec<(BigRational, bool, Vec<Coeff>)>,
    pub text: Vec<String>,
}

impl Center {
    /// Entries are sorted by `a` (free before divisorial on ties, stable otherwise).
    pub fn new(ring: &Ring, mut entries: Vec<CenterEntry>) -> Result<Center> {
        if entries.iter().any(|e| e.a <= BigRational::zero()) {
            return Err(Error::Invalid("center weights must be positive".into()));
        }
        entries.sort_by(|x, y| x.a.cmp(&y.a).then(x.divisorial.cmp(&y.divisorial)));
        let lin: Vec<Vec<Coeff>> = entries.iter().map(|e| e.param.poly().linear_part()).collect();
        if linalg::rank(&lin) != entries.len() {
            return Err(Error::Invalid("center parameters have dependent linear parts".into()));
        }
        if entries.iter().any(|e| !e.param.poly().constant_term().is_zero()) {
            return Err(Error::Invalid("center parameters must vanish at the point".into()));
        }
        Ok(Center {
            ring: ring.clone(),
            entries,
        })
    }

    pub fn empty(ring: &Ring) -> Center {
        Center {
            ring: ring.clone(),
            entries: Vec::new(),
        }
    }

    /// Center on plain coordinate variables given as `(index, a, divisorial)`.
    pub fn from_vars(ring: &Ring, items: &[(usize, BigRational, bool)]) -> Result<Center> {
        let entries = items
            .iter()
            .map(|(i, a, d)| CenterEntry {
                param: Jet::exact(ring.var(*i)),
                a: a.clone(),
                divisorial: *d,
            })
            .collect();
        Center::new(ring, entries)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn entries(&self) -> &[CenterEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `w_A`: the smallest positive rational making every `w_A / a_i` integral.
    pub fn w_a(&self) -> BigRational {
        let a: Vec<BigRational> = self.entries.iter().map(|e| e.a.clone()).collect();
        rational_lcm(&a)
    }

    /// Integer blow-up weights `w_A / a_i`.
    pub fn weights(&self) -> Result<Vec<BigInt>> {
        let w = self.w_a();
        self.entries
            .iter()
            .map(|e| {
                let q = &w / &e.a;
                if q.is_integer() && q > BigRational::zero() {
                    Ok(q.to_integer())
                } else {
                    Err(Error::NonIntegralWeights(format!("w_A/a = {}", fmt_rational(&q))))
                }
            })
            .collect()
    }

    /// For each entry, the variable whose slot it takes in the completed
    /// coordinate system (lowest-index pivots of the linear parts).
    pub fn slots(&self) -> Vec<usize> {
        let mut basis: Vec<Vec<Coeff>> = Vec::new();
        let mut piv: Vec<usize> = Vec::new();
        let mut out = Vec::new();
        for e in &self.entries {
            let v = linalg::reduce(&e.param.poly().linear_part(), &basis, &piv);
            let p = v.iter().position(|c| !c.is_zero()).expect("independent parameters");
            let inv = v[p].inv();
            let row: Vec<Coeff> = v.iter().map(|c| c.mul(&inv)).collect();
            for b in basis.iter_mut() {
                if !b[p].is_zero() {
                    let f = b[p].clone();
                    for (x, y) in b.iter_mut().zip(&row) {
                        *x = x.sub(&f.mul(y));
                    }
                }
            }
            basis.push(row);
            piv.push(p);
            out.push(p);
        }
        out
    }

    /// Completes the parameters to a coordinate system: each parameter replaces
    /// the variable in its slot.
    pub fn completion(&self, precision: u32) -> Result<CoordinateChange> {
        let slots = self.slots();
        let reps: Vec<(usize, Jet)> = slots
            .iter()
            .zip(&self.entries)
            .map(|(s, e)| (*s, e.param.clone()))
            .collect();
        CoordinateChange::replacing(&self.ring, &reps, None, precision)
    }

    /// Per-variable valuation weights `1/a_i` in the completed coordinates.
    pub fn valuation_weights(&self) -> Vec<BigRational> {
        let mut w = vec![BigRational::zero(); self.ring.nvars()];
        for (s, e) in self.slots().into_iter().zip(&self.entries) {
            w[s] = e.a.recip();
        }
        w
    }

    /// Canonical form: per level `a`, free parameters are reduced modulo lower
    /// levels and same-level divisorial coordinates, then put in reduced echelon
    /// form. Only linear parts at the point enter.
    pub fn normal_form(&self) -> NormalForm {
        let mut levels: Vec<BigRational> = self.entries.iter().map(|e| e.a.clone()).collect();
        levels.dedup();
        let mut lower: Vec<Vec<Coeff>> = Vec::new();
        let mut out: Vec<(BigRational, bool, Vec<Coeff>)> = Vec::new();
        for a in levels {
            let here: Vec<&CenterEntry> = self.entries.iter().filter(|e| e.a == a).collect();
            let divs: Vec<Vec<Coeff>> = here
                .iter()
                .filter(|e| e.divisorial)
                .map(|e| e.param.poly().linear_part())
                .collect();
            let free: Vec<Vec<Coeff>> = here
                .iter()
                .filter(|e| !e.divisorial)
                .map(|e| e.param.poly().linear_part())
                .collect();
            let mut ctx = lower.clone();
            ctx.extend(divs.iter().cloned());
            let (cb, cp) = linalg::rref(&ctx);
            let reduced: Vec<Vec<Coeff>> = free.iter().map(|v| linalg::reduce(v, &cb, &cp)).collect();
            let (rows, _) = linalg::rref(&reduced);
            let mut level: Vec<(BigRational, bool, Vec<Coeff>)> = rows
                .into_iter()
                .map(|r| (a.clone(), false, r))
                .chain(divs.iter().map(|d| (a.clone(), true, d.clone())))
                .collect();
            level.sort_by(|x, y| x.1.cmp(&y.1).then_with(|| cmp_linear(&x.2, &y.2)));
            lower.extend(free);
            lower.extend(divs);
            out.extend(level);
        }
        let text = out
            .iter()
            .map(|(a, d, v)| {
                let p = Poly::from_terms(
                    &self.ring,
                    v.iter()
                        .enumerate()
                        .map(|(i, c)| (Monomial::var(v.len(), i), c.clone())),
                );
                format!("{}:{}{}", p, fmt_rational(a), if *d { "+" } else { "" })
            })
            .collect();
        NormalForm { entries: out, text }
    }

    /// Reads the parameters in another ring, matching variables by name.
    pub fn remap(&self, target: &Ring) -> Result<Center> {
        let map: Vec<usize> = self
            .ring
            .names()
            .iter()
            .map(|n| target.index_of(n).ok_or_else(|| Error::UnknownVariable(n.clone())))
            .collect::<Result<_>>()?;
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let p = e.param.poly().remap(target, &map);
                let param = match e.param.prec() {
                    None => Jet::exact(p),
                    Some(n) => Jet::with_prec(p, n),
                };
                CenterEntry {
                    param,
                    a: e.a.clone(),
                    divisorial: e.divisorial,
                }
            })
            .collect();
        Center::new(target, entries)
    }

    pub fn to_json(&self) -> CenterJson {
        CenterJson {
            entries: self
                .entries
                .iter()
                .map(|e| EntryJson {
                    param: e.param.poly().to_string(),
                    a: fmt_rational(&e.a),
                    divisorial: e.divisorial,
                    precision: e.param.prec(),
                })
                .collect(),
        }
    }

    pub fn from_json(ring: &Ring, j: &CenterJson) -> Result<Center> {
        let entries = j
            .entries
            .iter()
            .map(|e| {
                let p = parse_polynomial(&e.param, ring)?;
                let param = match e.precision {
                    None => Jet::exact(p),
                    Some(n) => Jet::with_prec(p, n),
                };
                Ok(CenterEntry {
                    param,
                    a: parse_rational(&e.a)?,
                    divisorial: e.divisorial,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Center::new(ring, entries)
    }

    /// The center viewed as the algebra generated by `x_i t^{1/a_i}`.
    pub fn as_algebra(&self) -> ReesAlgebra {
        let gens = self
            .entries
            .iter()
            .map(|e| GradedElement::new(e.param.clone(), e.a.recip()))
            .collect();
        ReesAlgebra::new(&self.ring, gens)
    }
}

fn cmp_linear(a: &[Coeff], b: &[Coeff]) -> Ordering {
    let lead = |v: &[Coeff]| v.iter().position(|c| !c.is_zero()).unwrap_or(usize::MAX);
    lead(a).cmp(&lead(b))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub param: String,
    pub a: String,
    pub divisorial: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterJson {
    pub entries: Vec<EntryJson>,
}

/// Non-negative valuation, or `None` for infinity.
pub type Valuation = Option<BigRational>;

/// `min` over the terms of `f` of the weighted degree.
pub fn monomial_valuation(f: &Jet, weights: &[BigRational]) -> Result<Valuation> {
    if f.is_zero() {
        if f.is_exact() {
            return Ok(None);
        }
        return Err(Error::PrecisionExhausted(
            "valuation of a series vanishing to precision".into(),
        ));
    }
    let v = f
        .poly()
        .terms()
        .map(|(m, _)| {
            m.0.iter().zip(weights).fold(BigRational::zero(), |acc, (e, w)| {
                acc + w * BigRational::from_integer(BigInt::from(*e))
            })
        })
        .min()
        .unwrap();
    Ok(Some(v))
}

/// `nu_A(f)`, computed after rewriting `f` in the center's completed coordinates.
pub fn valuation_of(f: &Jet, center: &Center, precision: u32) -> Result<Valuation> {
    let change = center.completion(precision)?;
    let g = change.substitute(f);
    monomial_valuation(&g, &center.valuation_weights())
}

/// Minimal monomials (in the center's coordinates, degree `<= bound`) with valuation `>= a`.
pub fn gradation_generators(center: &Center, a: &BigRational, bound: u32) -> Vec<Monomial> {
    let k = center.len();
    let w: Vec<BigRational> = center.entries.iter().map(|e| e.a.recip()).collect();
    let mut found: Vec<Monomial> = Vec::new();
    for d in 0..=bound {
        for m in crate::algebra::poly::exponents_of_degree(k, d, None) {
            let v = m.0.iter().zip(&w).fold(BigRational::zero(), |acc, (e, w)| {
                acc + w * BigRational::from_integer(BigInt::from(*e))
            });
            if v >= *a && !found.iter().any(|g| g.divides(&m)) {
                found.push(m);
            }
        }
    }
    found
}

/// The product of center parameters with the given exponents.
pub fn realize(center: &Center, m: &Monomial) -> Poly {
    let mut p = center.ring.one();
    for (e, x) in m.0.iter().zip(&center.entries) {
        p = p.mul(&x.param.poly().pow(*e));
    }
    p
}

/// `R t ⊂ A^int`: every generator has valuation at least its grade.
pub fn is_admissible(r: &ReesAlgebra, center: &Center, precision: u32) -> Result<bool> {
    let change = center.completion(precision)?;
    let w = center.valuation_weights();
    for g in r.gens() {
        let f = change.substitute(&g.jet.with_ring(&center.ring));
        match monomial_valuation(&f, &w)? {
            None => {}
            Some(v) if v >= g.grade => {}
            Some(_) => return Ok(false),
        }
    }
    Ok(true)
}

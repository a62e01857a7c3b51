//! Cobordant blow-up charts, transforms and divisor bookkeeping.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::algebra::{Coeff, Jet, Monomial, Poly, Ring};
use crate::error::{Error, Result};
use crate::rees::{Center, GradedElement, ReesAlgebra};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivisorKind {
    Original,
    Exceptional,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorComponent {
    pub name: String,
    pub kind: DivisorKind,
    /// Index of the coordinate cutting the component.
    pub var: usize,
}

/// SNC divisor whose components are coordinate hyperplanes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DivisorSet {
    pub components: Vec<DivisorComponent>,
}

impl DivisorSet {
    pub fn original(ring: &Ring, vars: &[usize]) -> DivisorSet {
        DivisorSet {
            components: vars
                .iter()
                .map(|&v| DivisorComponent {
                    name: ring.names()[v].clone(),
                    kind: DivisorKind::Original,
                    var: v,
                })
                .collect(),
        }
    }

    /// Per-variable flags.
    pub fn flags(&self, nvars: usize) -> Vec<bool> {
        let mut f = vec![false; nvars];
        for c in &self.components {
            f[c.var] = true;
        }
        f
    }

    /// Flags of the components through a point.
    pub fn flags_at(&self, point: &[Coeff]) -> Vec<bool> {
        let mut f = vec![false; point.len()];
        for c in &self.components {
            if point[c.var].is_zero() {
                f[c.var] = true;
            }
        }
        f
    }
}

/// Whether prior divisor components are followed by total or strict transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivisorPolicy {
    #[default]
    Total,
    Strict,
}

/// The single affine chart `Spec O_X[s, x_1 t^{w_1}, ..., x_k t^{w_k}]` with `s = t^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupChart {
    source: Ring,
    ring: Ring,
    w_a: BigInt,
    /// Per source variable: `w_i` on center coordinates, 0 elsewhere.
    weights: Vec<i64>,
    center_slots: Vec<usize>,
    torus: Vec<Vec<i64>>,
    divisors: DivisorSet,
}

/// `s^{s_power} * poly` with `poly` not divisible by `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullTransform {
    pub poly: Poly,
    pub s_power: i64,
}

pub fn primed(name: &str) -> String {
    format!("{name}'")
}

/// Builds the chart of the cobordant blow-up of `center`, whose parameters must be
/// coordinate variables of `ambient`. `torus` holds prior weight rows over `ambient`.
pub fn build_chart(
    center: &Center,
    ambient: &Ring,
    divisors: &DivisorSet,
    torus: &[Vec<i64>],
    exceptional_name: &str,
    policy: DivisorPolicy,
) -> Result<BlowupChart> {
    let n = ambient.nvars();
    let w_a_q = center.w_a();
    if !w_a_q.is_integer() {
        return Err(Error::NonIntegralWeights(format!("w_A = {w_a_q}")));
    }
    let w_a = w_a_q.to_integer();
    let ws = center.weights()?;
    let mut weights = vec![0i64; n];
    let mut slots = Vec::new();
    for (e, w) in center.entries().iter().zip(&ws) {
        let slot = variable_of(&e.param)
            .ok_or_else(|| Error::Invalid(format!("center parameter {} is not a coordinate", e.param.poly())))?;
        weights[slot] = w.to_i64().ok_or_else(|| Error::NonIntegralWeights(w.to_string()))?;
        slots.push(slot);
    }
    let mut names = vec![exceptional_name.to_string()];
    for (i, nm) in ambient.names().iter().enumerate() {
        names.push(if weights[i] > 0 { primed(nm) } else { nm.clone() });
    }
    let ring = Ring::new(ambient.field(), &names);
    let mut rows: Vec<Vec<i64>> = torus
        .iter()
        .map(|r| {
            let mut v = vec![0];
            v.extend(r.iter().copied());
            v
        })
        .collect();
    let mut new_row = vec![-1];
    new_row.extend(weights.iter().copied());
    rows.push(new_row);
    let mut comps: Vec<DivisorComponent> = divisors
        .components
        .iter()
        .map(|c| DivisorComponent {
            name: c.name.clone(),
            kind: c.kind,
            var: c.var + 1,
        })
        .collect();
    if policy == DivisorPolicy::Total {
        comps.push(DivisorComponent {
            name: exceptional_name.to_string(),
            kind: DivisorKind::Exceptional,
            var: 0,
        });
    }
    Ok(BlowupChart {
        source: ambient.clone(),
        ring,
        w_a,
        weights,
        center_slots: slots,
        torus: rows,
        divisors: DivisorSet { components: comps },
    })
}

fn variable_of(j: &Jet) -> Option<usize> {
    let p = j.poly();
    if !p.is_monomial() {
        return None;
    }
    let (m, c) = p.leading_term()?;
    if m.degree() != 1 || !c.is_one() {
        return None;
    }
    m.0.iter().position(|e| *e == 1)
}

impl BlowupChart {
    pub fn source(&self) -> &Ring {
        &self.source
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn w_a(&self) -> &BigInt {
        &self.w_a
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// Blow-up weights of the center entries in order.
    pub fn center_weights(&self) -> Vec<i64> {
        self.center_slots.iter().map(|&s| self.weights[s]).collect()
    }

    pub fn center_slots(&self) -> &[usize] {
        &self.center_slots
    }

    pub fn torus(&self) -> &[Vec<i64>] {
        &self.torus
    }

    pub fn divisors(&self) -> &DivisorSet {
        &self.divisors
    }

    pub fn exceptional_name(&self) -> &str {
        &self.ring.names()[0]
    }

    /// Chart index of source variable `i`.
    pub fn chart_var(&self, i: usize) -> usize {
        i + 1
    }

    /// The vertex ideal `(x'_1, ..., x'_k)`.
    pub fn vertex(&self) -> Vec<Poly> {
        self.center_slots.iter().map(|&i| self.ring.var(i + 1)).collect()
    }

    /// Returns a copy with the weight of one center entry replaced (for negative controls).
    pub fn with_weight(&self, entry: usize, w: i64) -> BlowupChart {
        let mut c = self.clone();
        let slot = c.center_slots[entry];
        c.weights[slot] = w;
        if let Some(last) = c.torus.last_mut() {
            last[slot + 1] = w;
        }
        c
    }

    /// `x_i = s^{w_i} x'_i`.
    pub fn full_transform(&self, f: &Poly) -> FullTransform {
        let n = self.source.nvars();
        let mapped = Poly::from_terms(
            &self.ring,
            f.terms().map(|(m, c)| {
                let mut e = vec![0u32; n + 1];
                let mut s = 0i64;
                for (i, x) in m.0.iter().enumerate() {
                    e[i + 1] = *x;
                    s += self.weights[i] * *x as i64;
                }
                e[0] = s as u32;
                (Monomial(e), c.clone())
            }),
        );
        let k = mapped.terms().map(|(m, _)| m.0[0]).min().unwrap_or(0);
        let mut d = vec![0u32; n + 1];
        d[0] = k;
        let poly = mapped.div_monomial(&Monomial(d)).expect("common power of s");
        FullTransform {
            poly,
            s_power: k as i64,
        }
    }

    /// `s^{-w_A b} * full_transform(f)`; fails when a negative power of `s` remains.
    pub fn controlled_transform_graded(&self, f: &Poly, grade: &BigRational) -> Result<Poly> {
        let twist = BigRational::from_integer(self.w_a.clone()) * grade;
        if !twist.is_integer() {
            return Err(Error::NonAdmissible(format!(
                "grade {grade} is not compatible with w_A = {}",
                self.w_a
            )));
        }
        let twist = twist.to_integer().to_i64().unwrap();
        let ft = self.full_transform(f);
        if ft.poly.is_zero() {
            return Ok(ft.poly);
        }
        if ft.s_power < twist {
            return Err(Error::NonAdmissible(format!(
                "{f} acquires s^{} after twisting by s^-{twist}",
                ft.s_power - twist
            )));
        }
        let mut m = vec![0u32; self.ring.nvars()];
        m[0] = (ft.s_power - twist) as u32;
        Ok(ft.poly.mul_monomial(&Monomial(m), &self.ring.field().one()))
    }

    pub fn controlled_transform(&self, f: &Poly) -> Result<Poly> {
        self.controlled_transform_graded(f, &BigRational::from_integer(1.into()))
    }

    /// Full transform with the maximal power of `s` removed, and that power.
    pub fn strict_transform(&self, f: &Poly) -> (Poly, i64) {
        let ft = self.full_transform(f);
        (ft.poly, ft.s_power)
    }

    /// Controlled transform of every generator at its grade.
    pub fn transform_algebra(&self, r: &ReesAlgebra) -> Result<ReesAlgebra> {
        let gens = r
            .gens()
            .iter()
            .map(|g| {
                if !g.jet.is_exact() {
                    return Err(Error::Invalid("transform of an inexact generator".into()));
                }
                let p = self.controlled_transform_graded(&g.jet.poly().with_ring(&self.source), &g.grade)?;
                Ok(GradedElement::exact(p, g.grade.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ReesAlgebra::new(&self.ring, gens))
    }

    /// Points of `B_+` where one vertex coordinate is 1 and the rest of the chart is at 0.
    pub fn localization_origins(&self) -> Vec<(usize, Vec<Coeff>)> {
        let field = self.ring.field();
        self.center_slots
            .iter()
            .map(|&i| {
                let mut p = vec![field.zero(); self.ring.nvars()];
                p[i + 1] = field.one();
                (i + 1, p)
            })
            .collect()
    }

    pub fn to_json(&self) -> ChartJson {
        let last = self.torus.last().cloned().unwrap_or_default();
        ChartJson {
            exceptional: self.exceptional_name().to_string(),
            vars: self.ring.names()[1..]
                .iter()
                .enumerate()
                .map(|(i, n)| ChartVar {
                    name: n.clone(),
                    weight: last.get(i + 1).copied().unwrap_or(0),
                })
                .collect(),
            torus: self.torus.clone(),
            divisors: self
                .divisors
                .components
                .iter()
                .map(|c| DivisorJson {
                    name: c.name.clone(),
                    kind: c.kind,
                    var: self.ring.names()[c.var].clone(),
                })
                .collect(),
        }
    }
}

pub fn full_transform(f: &Poly, chart: &BlowupChart) -> FullTransform {
    chart.full_transform(f)
}

pub fn controlled_transform(f: &Poly, chart: &BlowupChart) -> Result<Poly> {
    chart.controlled_transform(f)
}

pub fn strict_transform(f: &Poly, chart: &BlowupChart) -> (Poly, i64) {
    chart.strict_transform(f)
}

pub fn transform_algebra(r: &ReesAlgebra, chart: &BlowupChart) -> Result<ReesAlgebra> {
    chart.transform_algebra(r)
}

/// On each `B_{x'_i}` the center coordinate `x_i` pulls back to `s^{w_i}` times the
/// unit `x'_i`, so the exceptional divisor is principal, generated by `s`.
pub fn exceptional_principality_check(center: &Center, chart: &BlowupChart) -> bool {
    if center.len() != chart.center_slots.len() {
        return false;
    }
    let Ok(ws) = center.weights() else { return false };
    chart.center_slots.iter().zip(&ws).all(|(&i, w)| {
        let ft = chart.full_transform(&chart.source.var(i));
        let w = w.to_i64().unwrap_or(0);
        w > 0 && ft.s_power == w && ft.poly == chart.ring.var(i + 1)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartVar {
    pub name: String,
    pub weight: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorJson {
    pub name: String,
    pub kind: DivisorKind,
    pub var: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartJson {
    pub exceptional: String,
    pub vars: Vec<ChartVar>,
    pub torus: Vec<Vec<i64>>,
    pub divisors: Vec<DivisorJson>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::coeff::rat_int;
    use crate::algebra::{parse_polynomial, Field};

    fn ring(names: &[&str]) -> Ring {
        Ring::new(Field::Q, names)
    }

    fn p(r: &Ring, s: &str) -> Poly {
        parse_polynomial(s, r).unwrap()
    }

    fn snc_cusp_chart() -> (Ring, Center, BlowupChart) {
        let r = ring(&["x1", "x2", "x3"]);
        let c = Center::from_vars(
            &r,
            &[(0, rat_int(2), true), (1, rat_int(4), true), (2, rat_int(7), false)],
        )
        .unwrap();
        let d = DivisorSet::original(&r, &[0, 1]);
        let ch = build_chart(&c, &r, &d, &[], "s1", DivisorPolicy::Total).unwrap();
        (r, c, ch)
    }

    #[test]
    fn snc_cusp_chart_and_transforms() {
        let (r, c, ch) = snc_cusp_chart();
        assert_eq!(ch.w_a(), &BigInt::from(28));
        assert_eq!(ch.center_weights(), vec![14, 7, 4]);
        assert_eq!(ch.ring().names(), &["s1", "x1'", "x2'", "x3'"]);
        let f = p(&r, "(x1+x2^2)^2+x3^7");
        assert_eq!(
            ch.controlled_transform(&f).unwrap().to_string(),
            "x1'^2+2*x1'*x2'^2+x2'^4+x3'^7"
        );
        assert_eq!(ch.full_transform(&f).s_power, 28);
        assert!(exceptional_principality_check(&c, &ch));
        assert!(!exceptional_principality_check(&c, &ch.with_weight(1, 0)));
        let j = serde_json::to_string(&ch.to_json()).unwrap();
        assert_eq!(
            j,
            r#"{"exceptional":"s1","vars":[{"name":"x1'","weight":14},{"name":"x2'","weight":7},{"name":"x3'","weight":4}],"torus":[[-1,14,7,4]],"divisors":[{"name":"x1","kind":"original","var":"x1'"},{"name":"x2","kind":"original","var":"x2'"},{"name":"s1","kind":"exceptional","var":"s1"}]}"#
        );
    }

    #[test]
    fn smooth_and_multiple_centers() {
        let r = ring(&["x", "y"]);
        let c = Center::from_vars(&r, &[(0, rat_int(1), false), (1, rat_int(1), false)]).unwrap();
        let ch = build_chart(&c, &r, &DivisorSet::default(), &[], "s", DivisorPolicy::Total).unwrap();
        assert_eq!(ch.center_weights(), vec![1, 1]);
        assert!(exceptional_principality_check(&c, &ch));
        let r6 = ring(&["x1", "x2", "x3", "x4", "x5", "x6"]);
        let items: Vec<(usize, BigRational, bool)> =
            (0..6).map(|i| (i, rat_int(if i < 3 { 3 } else { 4 }), false)).collect();
        let c6 = Center::from_vars(&r6, &items).unwrap();
        let ch6 = build_chart(&c6, &r6, &DivisorSet::default(), &[], "s", DivisorPolicy::Total).unwrap();
        assert_eq!(ch6.w_a(), &BigInt::from(12));
        assert_eq!(ch6.center_weights(), vec![4, 4, 4, 3, 3, 3]);
    }

    #[test]
    fn transform_examples() {
        let r = ring(&["x", "y", "z"]);
        let c = Center::from_vars(&r, &[(0, rat_int(2), false), (1, rat_int(3), false)]).unwrap();
        let ch = build_chart(&c, &r, &DivisorSet::default(), &[], "s", DivisorPolicy::Total).unwrap();
        let (st, e) = ch.strict_transform(&p(&r, "x^2+y^3"));
        assert_eq!((st.to_string(), e), ("x'^2+y'^3".to_string(), 6));
        let (st, e) = ch.strict_transform(&p(&r, "x^2+y^3+y^4"));
        assert_eq!((st.to_string(), e), ("x'^2+y'^3+s^2*y'^4".to_string(), 6));
        let (st, e) = ch.strict_transform(&p(&r, "z"));
        assert_eq!((st.to_string(), e), ("z".to_string(), 0));
        let cx = Center::from_vars(&r, &[(0, rat_int(2), false)]).unwrap();
        let chx = build_chart(&cx, &r, &DivisorSet::default(), &[], "s", DivisorPolicy::Total).unwrap();
        let ft = chx.full_transform(&r.var(0));
        assert_eq!((ft.poly.to_string(), ft.s_power), ("x'".to_string(), 1));
        assert!(matches!(
            chx.controlled_transform(&r.var(0)),
            Err(Error::NonAdmissible(_))
        ));
    }

    #[test]
    fn torus_rows_accumulate() {
        let r = ring(&["x", "y"]);
        let c = Center::from_vars(&r, &[(0, rat_int(2), false), (1, rat_int(3), false)]).unwrap();
        let ch = build_chart(
            &c,
            &r,
            &DivisorSet::default(),
            &[vec![5, 7]],
            "s2",
            DivisorPolicy::Strict,
        )
        .unwrap();
        assert_eq!(ch.torus(), &[vec![0, 5, 7], vec![-1, 3, 2]]);
        assert!(ch.divisors().components.is_empty());
    }

    #[test]
    fn center_transforms_to_vertex() {
        let (_, c, ch) = snc_cusp_chart();
        let t = ch.transform_algebra(&c.as_algebra()).unwrap();
        let got: Vec<String> = t.gens().iter().map(|g| g.jet.poly().to_string()).collect();
        assert_eq!(got, vec!["x1'", "x2'", "x3'"]);
    }
}

//! Weighted gradings, initial forms, finite-field probes and toric cones.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::coeff::Field;
use crate::algebra::{linalg, Coeff, Monomial, Poly};
use crate::cobordant::{build_chart, DivisorPolicy, DivisorSet};
use crate::error::{Error, Result};
use crate::rees::Center;

/// Nonnegative integer weight per variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGrading {
    pub weights: Vec<i64>,
}

impl WeightedGrading {
    pub fn new(weights: Vec<i64>) -> WeightedGrading {
        assert!(weights.iter().all(|w| *w >= 0));
        WeightedGrading { weights }
    }

    /// Center weights `w_A / a_i` on the center coordinates, 0 elsewhere.
    pub fn of_center(center: &Center) -> Result<WeightedGrading> {
        let ws = center.weights()?;
        let mut weights = vec![0; center.ring().nvars()];
        for (slot, w) in center.slots().into_iter().zip(ws) {
            weights[slot] = w.to_i64().ok_or_else(|| Error::NonIntegralWeights(w.to_string()))?;
        }
        Ok(WeightedGrading { weights })
    }

    pub fn grade(&self, m: &Monomial) -> i64 {
        m.weighted_degree(&self.weights)
    }
}

/// Terms of minimal weighted grade and that grade.
pub fn initial_form(f: &Poly, grading: &WeightedGrading) -> (Poly, i64) {
    assert!(!f.is_zero(), "initial form of zero");
    let comps = f.weighted_components(&grading.weights);
    let (g, p) = comps.into_iter().next().unwrap();
    (p, g)
}

pub fn is_weighted_homogeneous(ideal: &[Poly], grading: &WeightedGrading) -> bool {
    ideal
        .iter()
        .all(|f| f.is_zero() || f.weighted_components(&grading.weights).len() == 1)
}

/// The strict transform of a homogeneous `f` is `f` itself in primed variables,
/// with the full grade split off as a power of `s`.
pub fn homogeneous_transform_check(f: &Poly, center: &Center) -> Result<bool> {
    let grading = WeightedGrading::of_center(center)?;
    if !is_weighted_homogeneous(std::slice::from_ref(f), &grading) {
        return Err(Error::NotHomogeneous);
    }
    let ring = center.ring();
    let chart = build_chart(center, ring, &DivisorSet::default(), &[], "s", DivisorPolicy::Total)?;
    let (st, e) = chart.strict_transform(f);
    let map: Vec<usize> = (0..ring.nvars()).map(|i| chart.chart_var(i)).collect();
    let primed = f.remap(chart.ring(), &map);
    let grade = if f.is_zero() { 0 } else { initial_form(f, &grading).1 };
    Ok(st == primed && e == grade)
}

/// `f` plus the given multiples of its first divided-power derivatives.
pub fn jacobian_combination(f: &Poly, multipliers: &[(usize, Poly)]) -> Poly {
    multipliers.iter().fold(f.clone(), |acc, (i, m)| {
        acc.add(&m.mul(&f.derivative(&Monomial::var(f.nvars(), *i))))
    })
}

/// Points of the box where `f` and all `D_{x_i} f` vanish.
pub fn singular_probe(f: &Poly, box_values: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
    let field = f.field();
    let Field::Fp(_) = field else {
        return Err(Error::BadCharacteristic("probe needs a finite field".into()));
    };
    let n = f.nvars();
    if box_values.len() != n {
        return Err(Error::RingMismatch("box dimension".into()));
    }
    let eqs: Vec<Poly> = std::iter::once(f.clone())
        .chain((0..n).map(|i| f.derivative(&Monomial::var(n, i))))
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    if box_values.iter().any(|b| b.is_empty()) {
        return Ok(out);
    }
    loop {
        let pt: Vec<u64> = idx.iter().zip(box_values).map(|(i, b)| b[*i]).collect();
        let cs: Vec<Coeff> = pt.iter().map(|v| field.from_i64(*v as i64)).collect();
        if eqs.iter().all(|e| e.eval(&cs).is_zero()) {
            out.push(pt);
        }
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < box_values[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, x| g.gcd(x));
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

fn to_q(rows: &[Vec<i64>]) -> Vec<Vec<Coeff>> {
    rows.iter()
        .map(|r| r.iter().map(|x| Field::Q.from_i64(*x)).collect())
        .collect()
}

/// Coordinates of `p` in terms of independent rays, if `p` lies in their span.
fn span_coords(rays: &[Vec<i64>], p: &[i64]) -> Option<Vec<BigRational>> {
    let m = rays.len();
    // columns: rays, then p
    let rows: Vec<Vec<i64>> = (0..p.len())
        .map(|d| rays.iter().map(|r| r[d]).chain(std::iter::once(p[d])).collect())
        .collect();
    let (red, piv) = linalg::rref(&to_q(&rows));
    if piv.contains(&m) {
        return None;
    }
    let mut c = vec![BigRational::zero(); m];
    for (row, &pc) in red.iter().zip(&piv) {
        c[pc] = row[m].to_rational();
    }
    Some(c)
}

/// Simplicial cone given by primitive integer rays.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cone {
    rays: Vec<Vec<i64>>,
}

impl Cone {
    pub fn new(rays: Vec<Vec<i64>>) -> Result<Cone> {
        let dim = rays.first().map_or(0, |r| r.len());
        if rays.iter().any(|r| r.len() != dim || r.iter().all(|x| *x == 0)) {
            return Err(Error::Invalid("rays must be nonzero vectors of equal length".into()));
        }
        if linalg::rank(&to_q(&rays)) != rays.len() {
            return Err(Error::Invalid("only simplicial cones are supported".into()));
        }
        Ok(Cone {
            rays: rays.iter().map(|r| primitive(r)).collect(),
        })
    }

    /// `<e_i : i in idx>` in `Z^n`.
    pub fn standard(n: usize, idx: &[usize]) -> Cone {
        let rays = idx
            .iter()
            .map(|&i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        Cone::new(rays).unwrap()
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn dim(&self) -> usize {
        self.rays.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.rays.first().map_or(0, |r| r.len())
    }

    /// Coefficients of `v` in the rays when `v` lies in the cone.
    pub fn coords(&self, v: &[i64]) -> Option<Vec<BigRational>> {
        span_coords(&self.rays, v).filter(|c| c.iter().all(|x| !x.is_negative()))
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.coords(v).is_some()
    }

    pub fn contains_in_interior(&self, v: &[i64]) -> bool {
        self.coords(v).is_some_and(|c| c.iter().all(|x| x.is_positive()))
    }

    pub fn ray_set(&self) -> BTreeSet<Vec<i64>> {
        self.rays.iter().cloned().collect()
    }

    /// Absolute lattice index of a full-dimensional cone.
    pub fn multiplicity(&self) -> Option<i64> {
        if self.dim() != self.ambient_dim() {
            return None;
        }
        Some(det(&self.rays).abs())
    }
}

fn det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer((*x).into())).collect())
        .collect();
    let mut d = BigRational::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return 0;
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c].clone();
        for r in c + 1..n {
            let f = a[r][c].clone() / a[c][c].clone();
            for k in c..n {
                let v = a[c][k].clone() * f.clone();
                a[r][k] -= v;
            }
        }
    }
    d.to_integer().to_i64().unwrap()
}

/// Maximal cones of a simplicial fan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    cones: Vec<Cone>,
}

impl Fan {
    pub fn new(dim: usize, cones: Vec<Cone>) -> Result<Fan> {
        if cones.iter().any(|c| c.ambient_dim() != dim) {
            return Err(Error::Invalid("cone dimension differs from the fan".into()));
        }
        let f = Fan { dim, cones };
        if !f.check_axioms() {
            return Err(Error::Invalid("cones do not meet along common faces".into()));
        }
        Ok(f)
    }

    pub fn of_cone(c: Cone) -> Fan {
        Fan {
            dim: c.ambient_dim(),
            cones: vec![c],
        }
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cones compared as sets of ray sets.
    pub fn canonical(&self) -> BTreeSet<BTreeSet<Vec<i64>>> {
        self.cones.iter().map(Cone::ray_set).collect()
    }

    /// Pairwise check: the sum of the rays of one cone lies in no other cone unless
    /// the other cone contains the first, and full-dimensional cones sharing a facet
    /// lie on opposite sides of it.
    pub fn check_axioms(&self) -> bool {
        for (i, a) in self.cones.iter().enumerate() {
            let center: Vec<i64> = (0..self.dim).map(|d| a.rays.iter().map(|r| r[d]).sum()).collect();
            for (j, b) in self.cones.iter().enumerate() {
                if i == j {
                    continue;
                }
                if b.contains(&center) && !a.rays.iter().all(|r| b.contains(r)) {
                    return false;
                }
                if a.dim() == self.dim && b.dim() == self.dim {
                    let common: Vec<&Vec<i64>> = a.rays.iter().filter(|r| b.rays.contains(r)).collect();
                    if common.len() + 1 == self.dim {
                        let ra = a.rays.iter().find(|r| !b.rays.contains(r)).unwrap();
                        let rb = b.rays.iter().find(|r| !a.rays.contains(r)).unwrap();
                        let side = |x: &Vec<i64>| {
                            let mut m: Vec<Vec<i64>> = common.iter().map(|c| (*c).clone()).collect();
                            m.push(x.clone());
                            det(&m).signum()
                        };
                        if side(ra) * side(rb) >= 0 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> FanJson {
        let mut rays: Vec<Vec<i64>> = Vec::new();
        let mut index: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
        let cones = self
            .cones
            .iter()
            .map(|c| {
                c.rays
                    .iter()
                    .map(|r| {
                        *index.entry(r.clone()).or_insert_with(|| {
                            rays.push(r.clone());
                            rays.len() - 1
                        })
                    })
                    .collect()
            })
            .collect();
        FanJson {
            dim: self.dim,
            cones,
            rays,
        }
    }

    pub fn from_json(j: &FanJson) -> Result<Fan> {
        let cones = j
            .cones
            .iter()
            .map(|c| {
                let rays = c
                    .iter()
                    .map(|&i| {
                        j.rays
                            .get(i)
                            .cloned()
                            .ok_or_else(|| Error::Invalid(format!("ray index {i}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Cone::new(rays)
            })
            .collect::<Result<Vec<_>>>()?;
        Fan::new(j.dim, cones)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanJson {
    pub dim: usize,
    pub cones: Vec<Vec<usize>>,
    pub rays: Vec<Vec<i64>>,
}

/// Star subdivision at `v`: every cone containing `v` is replaced by the cones
/// obtained by swapping one ray with a positive coefficient for `v`.
pub fn star_subdivision(fan: &Fan, v: &[i64]) -> Result<Fan> {
    if v.len() != fan.dim || v.iter().all(|x| *x == 0) {
        return Err(Error::VNotInSupport);
    }
    let v = primitive(v);
    let mut hit = false;
    let mut cones = Vec::new();
    for c in &fan.cones {
        let Some(coef) = c.coords(&v) else {
            cones.push(c.clone());
            continue;
        };
        hit = true;
        let support: Vec<usize> = (0..c.dim()).filter(|&i| coef[i].is_positive()).collect();
        if support.len() == 1 {
            // v spans an existing ray
            cones.push(c.clone());
            continue;
        }
        for &i in &support {
            let mut rays = c.rays.clone();
            rays[i] = v.clone();
            cones.push(Cone::new(rays)?);
        }
    }
    if !hit {
        return Err(Error::VNotInSupport);
    }
    let out = Fan { dim: fan.dim, cones };
    if !out.check_axioms() {
        return Err(Error::Invalid("star subdivision violates the fan axioms".into()));
    }
    Ok(out)
}

/// `tau = <rays of sigma, v + e_{n+1}>` with projection along `e_{n+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CobordismCone {
    pub tau: Cone,
    pub upper: Vec<Cone>,
    pub lower: Cone,
}

pub fn cobordism_cone(sigma: &Cone, v: &[i64]) -> Result<CobordismCone> {
    if v.len() != sigma.ambient_dim() || !sigma.contains_in_interior(v) {
        return Err(Error::VNotInterior);
    }
    let lift = |r: &Vec<i64>, h: i64| {
        let mut x = r.clone();
        x.push(h);
        x
    };
    let top = lift(&v.to_vec(), 1);
    let mut rays: Vec<Vec<i64>> = sigma.rays.iter().map(|r| lift(r, 0)).collect();
    rays.push(top.clone());
    let tau = Cone::new(rays)?;
    let upper = (0..sigma.dim())
        .map(|i| {
            let mut rs: Vec<Vec<i64>> = (0..sigma.dim())
                .filter(|&j| j != i)
                .map(|j| lift(&sigma.rays[j], 0))
                .collect();
            rs.push(top.clone());
            Cone::new(rs)
        })
        .collect::<Result<Vec<_>>>()?;
    let lower = Cone::new(sigma.rays.iter().map(|r| lift(r, 0)).collect())?;
    Ok(CobordismCone { tau, upper, lower })
}

impl CobordismCone {
    /// Image of the upper boundary under the projection dropping the last coordinate.
    pub fn projected_upper(&self) -> Result<Fan> {
        let cones = self
            .upper
            .iter()
            .map(|c| Cone::new(c.rays.iter().map(|r| r[..r.len() - 1].to_vec()).collect()))
            .collect::<Result<Vec<_>>>()?;
        let dim = self.tau.ambient_dim() - 1;
        Fan::new(dim, cones)
    }
}

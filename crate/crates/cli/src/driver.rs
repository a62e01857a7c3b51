use std::collections::BTreeMap;
use std::time::Instant;

use cobordant::algebra::{parse_polynomial, Coeff, Monomial, Poly, Ring};
use cobordant::cobordant::{build_chart, BlowupChart, ChartJson, DivisorPolicy, DivisorSet};
use cobordant::invariant::{milling, InvTuple, Milling, MillingOptions};
use cobordant::rees::{Center, CenterJson};
use cobordant::Error;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problem::{parse_directive, parse_point, Plan, Problem};

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("maximum number of steps ({0}) exceeded")]
    MaxStepsExceeded(usize, Box<Trace>),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type DriverResult<T> = std::result::Result<T, DriverError>;

/// Ambient chart, current ideal and bookkeeping between blow-ups.
#[derive(Debug, Clone)]
pub struct ChartState {
    pub ring: Ring,
    pub gens: Vec<Poly>,
    /// Full transforms of the original generators.
    pub full: Vec<Poly>,
    pub divisors: DivisorSet,
    pub torus: Vec<Vec<i64>>,
    /// Rows that stopped being meaningful after an inhomogeneous coordinate change.
    pub torus_broken: Vec<bool>,
    pub point: Vec<Coeff>,
}

impl ChartState {
    pub fn initial(p: &Problem) -> ChartState {
        ChartState {
            ring: p.ring.clone(),
            gens: p.generators.clone(),
            full: p.generators.clone(),
            divisors: p.divisors.clone(),
            torus: Vec::new(),
            torus_broken: Vec::new(),
            point: p.point.clone(),
        }
    }

    pub fn divisor_flags(&self) -> Vec<bool> {
        self.divisors.flags_at(&self.point)
    }

    pub fn point_json(&self) -> BTreeMap<String, String> {
        point_json(&self.ring, &self.point)
    }

    /// Torus rows usable at the current point.
    pub fn grading(&self) -> Option<Vec<Vec<i64>>> {
        let rows: Vec<Vec<i64>> = self
            .torus
            .iter()
            .zip(&self.torus_broken)
            .filter(|(r, b)| !**b && r.iter().zip(&self.point).all(|(w, p)| *w == 0 || p.is_zero()))
            .map(|(r, _)| r.clone())
            .collect();
        (!rows.is_empty()).then_some(rows)
    }
}

pub fn point_json(ring: &Ring, point: &[Coeff]) -> BTreeMap<String, String> {
    ring.names()
        .iter()
        .zip(point)
        .filter(|(_, c)| !c.is_zero())
        .map(|(n, c)| (n.clone(), c.to_string()))
        .collect()
}

/// `expr = A * x_slot + h` with `A`, `h` free of `x_slot`.
fn solve_for(expr: &Poly, slot: usize) -> Option<(Poly, Poly)> {
    let ring = expr.ring();
    let mut a = ring.zero();
    let mut h = ring.zero();
    for (m, k) in expr.terms() {
        match m.0[slot] {
            0 => h.add_term(m.clone(), k.clone()),
            1 => {
                let mut rest = m.clone();
                rest.0[slot] = 0;
                a.add_term(rest, k.clone());
            }
            _ => return None,
        }
    }
    (!a.is_zero()).then_some((a, h))
}

/// `A^d g(.., (u - h) / A, ..)` with `d` the degree of `g` in `x_slot`, so the
/// result is a polynomial generating the same ideal wherever `A` is a unit.
fn substitute_cleared(g: &Poly, slot: usize, num: &Poly, den: &Poly, target: &Ring) -> Poly {
    let g = g.with_ring(target);
    let d = g.terms().map(|(m, _)| m.0[slot]).max().unwrap_or(0);
    let mut out = target.zero();
    for (m, c) in g.terms() {
        let e = m.0[slot];
        let mut rest = m.clone();
        rest.0[slot] = 0;
        let t = Poly::from_terms(target, [(rest, c.clone())]);
        out = out.add(&t.mul(&num.pow(e)).mul(&den.pow(d - e)));
    }
    out
}

fn fresh_name(ring: &Ring, base: String) -> String {
    let mut name = base;
    while ring.index_of(&name).is_some() {
        name.push('\'');
    }
    name
}

/// Replaces coordinate `slot` by `expr` under the name `name`. A divisor cut by the
/// old coordinate is dropped. Returns expressions in the new coordinates that must
/// not vanish at the point: the denominator and the dropped divisors.
fn replace_coordinate(st: &mut ChartState, slot: usize, expr: &Poly, name: &str) -> DriverResult<Vec<Poly>> {
    let (a, h) =
        solve_for(expr, slot).ok_or_else(|| Error::Invalid(format!("{expr} is not solvable for a single variable")))?;
    let mut names = st.ring.names().to_vec();
    names[slot] = name.to_string();
    let target = st.ring.renamed(&names);
    let num = target.var(slot).sub(&h.with_ring(&target));
    let den = a.with_ring(&target);
    let sub = |p: &Poly| substitute_cleared(p, slot, &num, &den, &target);
    let new_value = expr.eval(&st.point);
    let mut nonvanishing = Vec::new();
    if den.degree() != Some(0) {
        nonvanishing.push(den.clone());
    }
    if st.divisors.components.iter().any(|d| d.var == slot) {
        st.divisors.components.retain(|d| d.var != slot);
        nonvanishing.push(num.clone());
    }
    for (row, broken) in st.torus.iter_mut().zip(st.torus_broken.iter_mut()) {
        let comps = expr.weighted_components(row);
        match comps.keys().collect::<Vec<_>>().as_slice() {
            [w] => row[slot] = **w,
            _ => *broken = true,
        }
    }
    st.gens = st.gens.iter().map(sub).collect();
    st.full = st.full.iter().map(sub).collect();
    st.point[slot] = new_value;
    st.ring = target;
    Ok(nonvanishing)
}

fn check_dropped(st: &ChartState, nonvanishing: &[Poly]) -> DriverResult<()> {
    match nonvanishing.iter().find(|e| e.eval(&st.point).is_zero()) {
        Some(e) => Err(Error::Invalid(format!("coordinate change needs {e} != 0 at the point")).into()),
        None => Ok(()),
    }
}

fn apply_directive(st: &mut ChartState, directive: &str) -> DriverResult<Vec<Poly>> {
    let (name, rhs) = parse_directive(directive)?;
    let expr = parse_polynomial(&rhs, &st.ring)?;
    let slot = (0..st.ring.nvars())
        .filter(|&j| solve_for(&expr, j).is_some_and(|(_, h)| h.terms().count() < expr.terms().count()))
        .min_by_key(|&j| solve_for(&expr, j).map_or(usize::MAX, |(a, _)| a.terms().count()))
        .ok_or_else(|| Error::Invalid(format!("`{rhs}` is not solvable for a single variable")))?;
    let name = if st.ring.index_of(&name) == Some(slot) {
        name
    } else {
        fresh_name(&st.ring, name)
    };
    replace_coordinate(st, slot, &expr, &name)
}

/// The ideal is generated near the point by a monomial in the divisors through it.
pub fn is_exceptional_monomial(gens: &[Poly], point: &[Coeff], divisors: &[bool]) -> bool {
    let local: Vec<Poly> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| g.translate(point))
        .collect();
    if local.is_empty() {
        return false;
    }
    local.iter().any(|g| {
        let m = g.monomial_content();
        let only_divisors = m.0.iter().zip(divisors).all(|(e, d)| *e == 0 || *d);
        let unit = g.div_monomial(&m).is_some_and(|u| !u.constant_term().is_zero());
        only_divisors && unit && local.iter().all(|h| m.divides(&h.monomial_content()))
    })
}

pub fn mill_state(st: &ChartState, precision: Option<u32>) -> cobordant::Result<Milling> {
    let opts = MillingOptions {
        precision,
        grading: st.grading(),
        budget: 3,
    };
    milling(&st.gens, &st.point, &st.divisor_flags(), &opts)
}

/// Outcome of analysing one candidate point.
#[derive(Debug, Clone)]
pub enum PointStatus {
    /// Ideal is a unit or a divisor monomial there.
    Done,
    /// Not on the subscheme (embedded mode only).
    Off,
    Milled(Box<Milling>),
}

pub fn analyse(st: &ChartState, precision: Option<u32>, embedded: bool) -> cobordant::Result<PointStatus> {
    if embedded {
        if st.gens.iter().any(|g| !g.eval(&st.point).is_zero()) {
            return Ok(PointStatus::Off);
        }
    } else if is_exceptional_monomial(&st.gens, &st.point, &st.divisor_flags()) {
        return Ok(PointStatus::Done);
    }
    match mill_state(st, precision) {
        Ok(m) => Ok(PointStatus::Milled(Box::new(m))),
        Err(Error::UnitIdeal) => Ok(PointStatus::Done),
        Err(e) => Err(e),
    }
}

/// Moves the center of a milling result to chart coordinates: each parameter
/// becomes a coordinate, replacing the variable in its slot.
pub fn straighten(st: &mut ChartState, m: &Milling, step: usize) -> DriverResult<(Center, Vec<String>)> {
    let neg: Vec<Coeff> = st.point.iter().map(Coeff::neg).collect();
    let mut params: Vec<Poly> = Vec::new();
    for e in m.center.entries() {
        if !e.param.is_exact() {
            return Err(Error::Invalid(format!(
                "contact {} is only known to finite precision; supply a plan coordinate change",
                e.param
            ))
            .into());
        }
        params.push(e.param.poly().with_ring(&st.ring).translate(&neg));
    }
    let mut changes = Vec::new();
    let mut count = 0;
    for k in 0..params.len() {
        let slot = m.slots[k];
        if params[k] == st.ring.var(slot) {
            continue;
        }
        count += 1;
        let name = fresh_name(&st.ring, format!("u{step}_{count}"));
        let old_ring = st.ring.clone();
        changes.push(format!("{name} := {}", params[k]));
        let nonvanishing = replace_coordinate(st, slot, &params[k], &name)?;
        check_dropped(st, &nonvanishing)?;
        // rewrite the remaining parameters in the new coordinates
        let (a, h) = solve_for(&params[k].with_ring(&old_ring), slot).unwrap();
        let num = st.ring.var(slot).sub(&h.with_ring(&st.ring));
        let den = a.with_ring(&st.ring);
        for p in params.iter_mut().skip(k + 1) {
            *p = substitute_cleared(p, slot, &num, &den, &st.ring);
        }
        params[k] = st.ring.var(slot);
    }
    let items: Vec<(usize, BigRational, bool)> = m
        .center
        .entries()
        .iter()
        .zip(&m.slots)
        .map(|(e, s)| (*s, e.a.clone(), e.divisorial))
        .collect();
    Ok((Center::from_vars(&st.ring, &items)?, changes))
}

/// Blows up `center` and moves the state to the chart.
pub fn blow_up(
    st: &ChartState,
    center: &Center,
    step: usize,
    policy: DivisorPolicy,
    embedded: bool,
) -> DriverResult<(ChartState, BlowupChart)> {
    let chart = build_chart(center, &st.ring, &st.divisors, &st.torus, &format!("s{step}"), policy)?;
    let gens = st
        .gens
        .iter()
        .map(|g| {
            if embedded {
                Ok(chart.strict_transform(g).0)
            } else {
                chart
                    .controlled_transform(g)
                    .map_err(|e| DriverError::Internal(format!("controlled transform failed: {e}")))
            }
        })
        .collect::<DriverResult<Vec<_>>>()?;
    let full = st
        .full
        .iter()
        .map(|f| {
            let ft = chart.full_transform(f);
            let mut e = Monomial::one(chart.ring().nvars());
            e.0[0] = ft.s_power as u32;
            ft.poly.mul_monomial(&e, &chart.ring().field().one())
        })
        .collect();
    let field = st.ring.field();
    let mut point = vec![field.zero()];
    for (i, p) in st.point.iter().enumerate() {
        point.push(if chart.weights()[i] > 0 {
            field.zero()
        } else {
            p.clone()
        });
    }
    let mut broken = vec![false];
    broken.splice(0..0, st.torus_broken.iter().copied());
    let next = ChartState {
        ring: chart.ring().clone(),
        gens,
        full,
        divisors: chart.divisors().clone(),
        torus: chart.torus().to_vec(),
        torus_broken: broken,
        point,
    };
    Ok((next, chart))
}

/// Points of `B_+` lying over the blown-up point.
pub fn candidates(st: &ChartState, chart: &BlowupChart, embedded: bool) -> Vec<Vec<Coeff>> {
    let field = st.ring.field();
    let slots: Vec<usize> = chart.center_slots().iter().map(|s| s + 1).collect();
    let mut out: Vec<Vec<Coeff>> = Vec::new();
    for &i in &slots {
        let mut p = st.point.clone();
        p[i] = field.one();
        out.push(p);
    }
    if embedded {
        let k = slots.len();
        let total = 3usize.pow(k as u32);
        for code in 1..total {
            let mut p = st.point.clone();
            let mut c = code;
            for &i in &slots {
                p[i] = field.from_i64((c % 3) as i64 - 1);
                c /= 3;
            }
            if slots.iter().all(|&i| p[i].is_zero()) || out.contains(&p) {
                continue;
            }
            out.push(p);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub point: BTreeMap<String, String>,
    /// `None` where the ideal is trivial or the point is off the subscheme.
    pub inv: Option<InvTuple>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub change: Vec<String>,
    pub point: BTreeMap<String, String>,
    pub inv: InvTuple,
    pub center: CenterJson,
    pub normal_form: Vec<String>,
    pub chart: ChartJson,
    pub generators: Vec<String>,
    pub torus_homogeneous: bool,
    pub candidates: Vec<CandidateRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalRecord {
    pub vars: Vec<String>,
    pub point: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inv: Option<InvTuple>,
    pub generators: Vec<String>,
    pub full_transform: Vec<String>,
    pub divisors: Vec<String>,
    /// Principalization only: every full transform is a divisor monomial times a unit at the final point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_transform_monomial: Option<bool>,
    pub candidates: Vec<CandidateRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub mode: String,
    pub steps: Vec<StepRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last: Option<FinalRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assertions: Vec<String>,
}

impl Trace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn invs(&self) -> Vec<InvTuple> {
        self.steps.iter().map(|s| s.inv.clone()).collect()
    }

    /// Strict lexicographic decrease step over step.
    pub fn is_monotone(&self) -> bool {
        self.steps.windows(2).all(|w| w[1].inv < w[0].inv)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub timing: bool,
}

fn torus_homogeneous(st: &ChartState) -> bool {
    st.torus.iter().zip(&st.torus_broken).all(|(row, broken)| {
        !broken
            && st
                .gens
                .iter()
                .all(|g| g.is_zero() || g.weighted_components(row).len() == 1)
    })
}

/// `points` are where the full transform is checked; the current point when empty.
fn final_record(
    st: &ChartState,
    inv: Option<InvTuple>,
    embedded: bool,
    candidates: Vec<CandidateRecord>,
    points: &[Vec<Coeff>],
) -> FinalRecord {
    let here = [st.point.clone()];
    let points = if points.is_empty() { &here[..] } else { points };
    FinalRecord {
        vars: st.ring.names().to_vec(),
        point: st.point_json(),
        inv,
        generators: st.gens.iter().map(|g| g.to_string()).collect(),
        full_transform: st.full.iter().map(|g| g.to_string()).collect(),
        divisors: st
            .divisors
            .components
            .iter()
            .map(|d| st.ring.names()[d.var].clone())
            .collect(),
        full_transform_monomial: (!embedded).then(|| {
            points.iter().all(|p| {
                let flags = st.divisors.flags_at(p);
                st.full
                    .iter()
                    .all(|f| is_exceptional_monomial(std::slice::from_ref(f), p, &flags))
            })
        }),
        candidates,
    }
}

fn is_smooth_inv(inv: &InvTuple, codim: usize) -> bool {
    let one = BigRational::from_integer(1.into());
    inv.len() == codim && inv.entries().iter().all(|q| !q.plus && q.value == one)
}

fn run(problem: &Problem, plan: &Plan, embedded: bool, opts: RunOptions) -> DriverResult<Trace> {
    if problem.ring.field().characteristic() != 0 {
        return Err(Error::NotCharZero.into());
    }
    if problem.generators.is_empty() {
        return Err(Error::Invalid("no generators".into()).into());
    }
    let mut trace = Trace {
        mode: if embedded { "embedded" } else { "principalize" }.into(),
        steps: Vec::new(),
        last: None,
        assertions: plan.assertions.clone(),
    };
    let mut st = ChartState::initial(problem);
    let mut last_chart: Option<BlowupChart> = None;
    for step in 1.. {
        let started = Instant::now();
        let mut change = Vec::new();
        let mut dropped = Vec::new();
        let plan_step = plan.step(step);
        if let Some(ps) = plan_step {
            for d in &ps.change {
                dropped.extend(apply_directive(&mut st, d)?);
                change.push(d.clone());
            }
        }
        let mut records = Vec::new();
        let mut probed = Vec::new();
        let status = match (plan_step.and_then(|ps| ps.point.as_ref()), &last_chart) {
            (Some(pt), _) => {
                st.point = parse_point(&st.ring, pt)?;
                check_dropped(&st, &dropped)?;
                analyse(&st, problem.precision, embedded)?
            }
            (None, Some(chart)) => {
                let mut best: Option<(Vec<Coeff>, Box<Milling>)> = None;
                for p in candidates(&st, chart, embedded) {
                    let probe = ChartState {
                        point: p.clone(),
                        ..st.clone()
                    };
                    let inv = match analyse(&probe, problem.precision, embedded)? {
                        PointStatus::Milled(m) => {
                            let inv = m.inv.clone();
                            if best.as_ref().is_none_or(|(_, b)| inv > b.inv) {
                                best = Some((p.clone(), m));
                            }
                            Some(inv)
                        }
                        PointStatus::Off => continue,
                        PointStatus::Done => None,
                    };
                    records.push(CandidateRecord {
                        point: point_json(&st.ring, &p),
                        inv,
                    });
                    probed.push(p);
                }
                match best {
                    Some((p, m)) => {
                        st.point = p;
                        check_dropped(&st, &dropped)?;
                        PointStatus::Milled(m)
                    }
                    None => PointStatus::Done,
                }
            }
            (None, None) => analyse(&st, problem.precision, embedded)?,
        };
        let m = match status {
            PointStatus::Milled(m) => m,
            PointStatus::Done | PointStatus::Off => {
                trace.last = Some(final_record(&st, None, embedded, records, &probed));
                return Ok(trace);
            }
        };
        if embedded && is_smooth_inv(&m.inv, st.gens.len()) {
            trace.last = Some(final_record(&st, Some(m.inv.clone()), embedded, records, &[]));
            return Ok(trace);
        }
        if let Some(prev) = trace.steps.last() {
            if m.inv >= prev.inv {
                return Err(DriverError::Internal(format!(
                    "invariant {} did not drop below {}",
                    m.inv, prev.inv
                )));
            }
        }
        if step > problem.max_steps {
            trace.last = Some(final_record(&st, Some(m.inv.clone()), embedded, records, &[]));
            return Err(DriverError::MaxStepsExceeded(problem.max_steps, Box::new(trace)));
        }
        let point = st.point_json();
        let (center, auto) = straighten(&mut st, &m, step)?;
        change.extend(auto);
        let (next, chart) = blow_up(&st, &center, step, problem.policy, embedded)?;
        st = next;
        trace.steps.push(StepRecord {
            step,
            change,
            point,
            inv: m.inv.clone(),
            center: center.to_json(),
            normal_form: center.normal_form().text,
            chart: chart.to_json(),
            generators: st.gens.iter().map(|g| g.to_string()).collect(),
            torus_homogeneous: torus_homogeneous(&st),
            candidates: records,
            timing_ms: opts.timing.then(|| started.elapsed().as_millis()),
        });
        last_chart = Some(chart);
    }
    unreachable!()
}

pub fn run_principalize(problem: &Problem, plan: &Plan) -> DriverResult<Trace> {
    run(problem, plan, false, RunOptions::default())
}

pub fn run_embedded(problem: &Problem, plan: &Plan) -> DriverResult<Trace> {
    run(problem, plan, true, RunOptions::default())
}

pub fn run_with(problem: &Problem, plan: &Plan, embedded: bool, opts: RunOptions) -> DriverResult<Trace> {
    run(problem, plan, embedded, opts)
}

/// Milling at the marked point of the problem.
pub fn invariant_at(problem: &Problem) -> cobordant::Result<Milling> {
    mill_state(&ChartState::initial(problem), problem.precision)
}

/// One blow-up at the marked point: the straightened center, the chart and the
/// controlled and strict transforms.
pub struct SingleBlowup {
    pub milling: Milling,
    pub change: Vec<String>,
    pub center: Center,
    pub chart: BlowupChart,
    pub controlled: Vec<Poly>,
    pub strict: Vec<(Poly, i64)>,
}

pub fn blowup_once(problem: &Problem) -> DriverResult<SingleBlowup> {
    let mut st = ChartState::initial(problem);
    let m = mill_state(&st, problem.precision)?;
    let (center, change) = straighten(&mut st, &m, 1)?;
    let chart = build_chart(&center, &st.ring, &st.divisors, &[], "s1", problem.policy)?;
    let controlled = st
        .gens
        .iter()
        .map(|g| chart.controlled_transform(g))
        .collect::<cobordant::Result<Vec<_>>>()?;
    let strict = st.gens.iter().map(|g| chart.strict_transform(g)).collect();
    Ok(SingleBlowup {
        milling: m,
        change,
        center,
        chart,
        controlled,
        strict,
    })
}

/// Center straightened into coordinates, with the generators rewritten accordingly.
pub fn straightened(problem: &Problem) -> DriverResult<(ChartState, Milling, Center)> {
    let mut st = ChartState::initial(problem);
    let m = mill_state(&st, problem.precision)?;
    let (center, _) = straighten(&mut st, &m, 1)?;
    Ok((st, m, center))
}

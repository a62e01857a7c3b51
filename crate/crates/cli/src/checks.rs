//! Cross-module property checks run by `verify` and by the acceptance suite.

use std::collections::{BTreeMap, BTreeSet};

use cobordant::algebra::coeff::fmt_rational;
use cobordant::algebra::{Monomial, Poly, Ring};
use cobordant::cobordant::DivisorSet;
use cobordant::invariant::InvTuple;
use cobordant::rees::{is_admissible, Center, CenterEntry, ReesAlgebra};
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::driver::{
    analyse, blow_up, candidates, invariant_at, mill_state, point_json, run_principalize, straightened, ChartState,
    DriverResult, PointStatus,
};
use crate::problem::{parse_point, Plan, Problem, ProblemJson};

pub struct CorpusItem {
    pub name: &'static str,
    pub problem: &'static str,
    pub plan: &'static str,
    /// Extra points of the first chart for the invariant-drop check.
    pub samples: &'static [&'static [(&'static str, &'static str)]],
}

pub const CORPUS: &[CorpusItem] = &[
    CorpusItem {
        name: "snc-cusp",
        problem: r#"{"vars":["x1","x2","x3"],"divisors":["x1","x2"],"generators":["(x1+x2^2)^2+x3^7"]}"#,
        plan: r#"{"steps":[{"step":2,"change":["u := x1' + x2'^2"],"point":{"x2'":"1"}}]}"#,
        samples: &[&[("x1'", "-1"), ("x2'", "1")]],
    },
    CorpusItem {
        name: "triple_product",
        problem: r#"{"vars":["x1","x2","x3","x4","x5","x6"],"generators":["x1*x2*x3+x4^4+x5^2*x6^2"]}"#,
        plan: "{}",
        samples: &[],
    },
    CorpusItem {
        name: "cusp",
        problem: r#"{"vars":["x","y"],"generators":["x^2+y^3"]}"#,
        plan: "{}",
        samples: &[&[("x'", "1"), ("y'", "-1")]],
    },
    CorpusItem {
        name: "diagonal",
        problem: r#"{"vars":["x","y","z"],"generators":["x^2+y^3+z^5"]}"#,
        plan: "{}",
        samples: &[],
    },
    CorpusItem {
        name: "cusp-tail",
        problem: r#"{"vars":["x","y"],"generators":["x^2+y^3+y^4"]}"#,
        plan: "{}",
        samples: &[],
    },
    CorpusItem {
        name: "tangent",
        problem: r#"{"vars":["x","y"],"generators":["(x+y^2)^2+y^5"]}"#,
        plan: "{}",
        samples: &[],
    },
    CorpusItem {
        name: "tacnode",
        problem: r#"{"vars":["x","y"],"generators":["x^2+x*y^3"]}"#,
        plan: "{}",
        samples: &[],
    },
    CorpusItem {
        name: "divisorial-cusp",
        problem: r#"{"vars":["x","y"],"divisors":["y"],"generators":["x^2+y^3"]}"#,
        plan: "{}",
        samples: &[],
    },
];

impl CorpusItem {
    pub fn load(&self) -> (Problem, Plan) {
        (
            Problem::parse(self.problem).expect("corpus problem"),
            Plan::parse(self.plan).expect("corpus plan"),
        )
    }

    pub fn json(&self) -> ProblemJson {
        serde_json::from_str(self.problem).expect("corpus problem")
    }
}

/// Reorders the variables: new position `j` holds old variable `perm[j]`.
pub fn permute(p: &Problem, perm: &[usize]) -> Problem {
    let n = p.ring.nvars();
    let names: Vec<String> = perm.iter().map(|&i| p.ring.names()[i].clone()).collect();
    let ring = Ring::new(p.ring.field(), &names);
    let mut map = vec![0; n];
    for (j, &i) in perm.iter().enumerate() {
        map[i] = j;
    }
    let divs: Vec<usize> = p.divisors.components.iter().map(|c| map[c.var]).collect();
    Problem {
        generators: p.generators.iter().map(|g| g.remap(&ring, &map)).collect(),
        point: perm.iter().map(|&i| p.point[i].clone()).collect(),
        divisors: DivisorSet::original(&ring, &divs),
        ring,
        ..p.clone()
    }
}

/// Multiplies every generator by a unit `c (1 + x_k)` at the origin.
pub fn rescale_units(p: &Problem, rng: &mut ChaCha8Rng) -> Problem {
    let field = p.ring.field();
    let generators = p
        .generators
        .iter()
        .map(|g| {
            let c = field.from_i64(*[1i64, 2, -3, 5].choose(rng).unwrap());
            let k = rng.gen_range(0..p.ring.nvars());
            let shifted = p.point[k].clone();
            // 1 + (x_k - p_k) is a unit at the marked point
            let u = p.ring.one().add(&p.ring.var(k)).sub(&p.ring.constant(shifted));
            g.mul(&u).scale(&c)
        })
        .collect();
    Problem {
        generators,
        ..p.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    pub inv: InvTuple,
    pub normal_form: Vec<String>,
}

pub fn fingerprint(p: &Problem) -> DriverResult<Fingerprint> {
    fingerprint_in(p, &p.ring)
}

/// Fingerprint with the center read in `reference`, matching variables by name,
/// so reordered problems compare equal.
pub fn fingerprint_in(p: &Problem, reference: &Ring) -> DriverResult<Fingerprint> {
    let m = invariant_at(p)?;
    Ok(Fingerprint {
        inv: m.inv,
        normal_form: m.center.remap(reference)?.normal_form().text,
    })
}

/// Milling is unchanged under `trials` random permutations and unit rescalings.
pub fn choice_independence(p: &Problem, trials: usize, rng: &mut ChaCha8Rng) -> DriverResult<Result<(), String>> {
    let base = fingerprint(p)?;
    let n = p.ring.nvars();
    for t in 0..trials {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let q = rescale_units(&permute(p, &perm), rng);
        let f = fingerprint_in(&q, &p.ring)?;
        if f != base {
            return Ok(Err(format!(
                "trial {t} (order {:?}): {} {:?} versus {} {:?}",
                q.ring.names(),
                f.inv,
                f.normal_form,
                base.inv,
                base.normal_form
            )));
        }
    }
    Ok(Ok(()))
}

/// Generators `x_i t^{1/a1}` of the block together with the coefficients
/// `c_alpha t^{b - |alpha|/a1}` of each `f t^b`, `|alpha| < b a1`.
pub fn coefficient_generators(
    ring: &Ring,
    gens: &[(Poly, BigRational)],
    block: &[usize],
    a1: &BigRational,
) -> Vec<(Poly, BigRational)> {
    let mut out: Vec<(Poly, BigRational)> = block.iter().map(|&i| (ring.var(i), a1.recip())).collect();
    for (f, b) in gens {
        let mut by_alpha: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
        for (m, c) in f.terms() {
            let alpha: Vec<u32> = block.iter().map(|&i| m.0[i]).collect();
            let mut rest = m.0.clone();
            for &i in block {
                rest[i] = 0;
            }
            by_alpha
                .entry(alpha)
                .or_insert_with(|| ring.zero())
                .add_term(Monomial(rest), c.clone());
        }
        for (alpha, c) in by_alpha {
            let k: u32 = alpha.iter().sum();
            let grade = b - BigRational::from_integer(k.into()) / a1;
            if grade > BigRational::from_integer(0.into()) && !c.is_zero() {
                out.push((c, grade));
            }
        }
    }
    out
}

pub fn normalized(gens: &[(Poly, BigRational)]) -> BTreeSet<(String, String)> {
    gens.iter()
        .filter(|(p, _)| !p.is_zero())
        .map(|(p, g)| (p.monic().to_string(), fmt_rational(g)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct Commutation {
    pub transformed_coefficients: BTreeSet<(String, String)>,
    pub coefficients_of_transform: BTreeSet<(String, String)>,
}

impl Commutation {
    pub fn holds(&self) -> bool {
        self.transformed_coefficients == self.coefficients_of_transform
    }
}

/// Both sides of `sigma^c(C(R)) = C(sigma^c(R))` for the first block of the center.
pub fn commutation(p: &Problem) -> DriverResult<Commutation> {
    let (st, _m, center) = straightened(p)?;
    let (_, chart) = blow_up(&st, &center, 1, p.policy, false)?;
    let a1 = center.entries()[0].a.clone();
    let slots = chart.center_slots();
    let block: Vec<usize> = center
        .entries()
        .iter()
        .zip(slots)
        .filter(|(e, _)| e.a == a1)
        .map(|(_, s)| *s)
        .collect();
    let one = BigRational::from_integer(1.into());
    let r: Vec<(Poly, BigRational)> = st.gens.iter().map(|g| (g.clone(), one.clone())).collect();
    let left: Vec<(Poly, BigRational)> = coefficient_generators(&st.ring, &r, &block, &a1)
        .into_iter()
        .map(|(f, b)| Ok((chart.controlled_transform_graded(&f, &b)?, b)))
        .collect::<cobordant::Result<_>>()?;
    let transformed: Vec<(Poly, BigRational)> = r
        .iter()
        .map(|(f, b)| Ok((chart.controlled_transform_graded(f, b)?, b.clone())))
        .collect::<cobordant::Result<_>>()?;
    let primed: Vec<usize> = block.iter().map(|&s| chart.chart_var(s)).collect();
    let right = coefficient_generators(chart.ring(), &transformed, &primed, &a1);
    Ok(Commutation {
        transformed_coefficients: normalized(&left),
        coefficients_of_transform: normalized(&right),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DropReport {
    pub source: InvTuple,
    pub vertex: InvTuple,
    /// Sampled points of `B_+` with their invariant (`None` where the ideal is trivial).
    pub sampled: Vec<(BTreeMap<String, String>, Option<InvTuple>)>,
}

impl DropReport {
    pub fn holds(&self) -> bool {
        self.vertex == self.source
            && self
                .sampled
                .iter()
                .all(|(_, i)| i.as_ref().is_none_or(|i| *i < self.source))
    }
}

/// Invariant at the vertex origin and at sampled points of `B_+` after one blow-up.
pub fn invariant_drop(p: &Problem, extra: &[BTreeMap<String, String>]) -> DriverResult<DropReport> {
    let (st, m, center) = straightened(p)?;
    let (next, chart) = blow_up(&st, &center, 1, p.policy, false)?;
    let vertex = mill_state(&next, p.precision)?.inv;
    let mut points = candidates(&next, &chart, false);
    for e in extra {
        points.push(parse_point(&next.ring, e)?);
    }
    let mut sampled = Vec::new();
    for q in points {
        let probe = ChartState {
            point: q.clone(),
            ..next.clone()
        };
        let inv = match analyse(&probe, p.precision, false)? {
            PointStatus::Milled(m) => Some(m.inv),
            _ => None,
        };
        sampled.push((point_json(&next.ring, &q), inv));
    }
    Ok(DropReport {
        source: m.inv,
        vertex,
        sampled,
    })
}

/// The last center entry with a larger `a` is no longer admissible.
pub fn mutated_center_rejected(p: &Problem) -> DriverResult<bool> {
    let (st, _, center) = straightened(p)?;
    let mut entries: Vec<CenterEntry> = center.entries().to_vec();
    let last = entries.last_mut().expect("nonempty center");
    last.a += BigRational::from_integer(1.into());
    let mutated = Center::new(&st.ring, entries)?;
    let r = ReesAlgebra::of_ideal(&st.ring, &st.gens);
    let n = p.precision.unwrap_or(16);
    Ok(is_admissible(&r, &center, n)? && !is_admissible(&r, &mutated, n)?)
}

/// Every row of the weight matrix after step `i` has `i` entries and each
/// transformed generator is homogeneous for all rows.
pub fn torus_bookkeeping(p: &Problem, plan: &Plan) -> DriverResult<bool> {
    let t = run_principalize(p, plan)?;
    Ok(t.steps
        .iter()
        .enumerate()
        .all(|(i, s)| s.chart.torus.len() == i + 1 && s.torus_homogeneous))
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub property: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

fn outcome(property: &str, r: DriverResult<Result<(), String>>) -> Outcome {
    let (passed, detail) = match r {
        Ok(Ok(())) => (true, String::new()),
        Ok(Err(d)) => (false, d),
        Err(e) => (false, e.to_string()),
    };
    Outcome {
        property: property.into(),
        passed,
        detail,
    }
}

pub fn sample_points(item: &CorpusItem) -> Vec<BTreeMap<String, String>> {
    item.samples
        .iter()
        .map(|s| s.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect())
        .collect()
}

/// Runs every cross-module property on one problem.
pub fn verify_problem(
    name: &str,
    p: &Problem,
    plan: &Plan,
    extra: &[BTreeMap<String, String>],
    rng: &mut ChaCha8Rng,
) -> Vec<Outcome> {
    let mut out = Vec::new();
    out.push(outcome(
        &format!("{name}: choice independence"),
        choice_independence(p, 20, rng),
    ));
    out.push(outcome(
        &format!("{name}: maximality negative control"),
        mutated_center_rejected(p).map(|ok| {
            if ok {
                Ok(())
            } else {
                Err("mutated center still admissible".into())
            }
        }),
    ));
    out.push(outcome(
        &format!("{name}: transform commutes with coefficient ideals"),
        commutation(p).map(|c| {
            if c.holds() {
                Ok(())
            } else {
                Err(format!(
                    "{:?} versus {:?}",
                    c.transformed_coefficients, c.coefficients_of_transform
                ))
            }
        }),
    ));
    out.push(outcome(
        &format!("{name}: invariant drop"),
        invariant_drop(p, extra).map(|d| {
            if d.holds() {
                Ok(())
            } else {
                Err(serde_json::to_string(&d).unwrap())
            }
        }),
    ));
    let runs = (run_principalize(p, plan), run_principalize(p, plan));
    out.push(outcome(
        &format!("{name}: trace monotone and deterministic"),
        match runs {
            (Ok(a), Ok(b)) => Ok(if !a.is_monotone() {
                Err("invariants do not decrease".into())
            } else if a.to_json() != b.to_json() {
                Err("traces differ between runs".into())
            } else {
                Ok(())
            }),
            (Err(e), _) | (_, Err(e)) => Err(e),
        },
    ));
    out.push(outcome(
        &format!("{name}: torus bookkeeping"),
        torus_bookkeeping(p, plan).map(|ok| {
            if ok {
                Ok(())
            } else {
                Err("inhomogeneous transform".into())
            }
        }),
    ));
    out
}

/// Runs the corpus, one thread per item; item `i` samples with seed `seed + i`.
pub fn verify_corpus(seed: u64) -> Vec<Outcome> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = CORPUS
            .iter()
            .enumerate()
            .map(|(i, item)| {
                scope.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
                    let (p, plan) = item.load();
                    verify_problem(item.name, &p, &plan, &sample_points(item), &mut rng)
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("verify thread"))
            .collect()
    })
}

/// `COBORDANT_SEED`, defaulting to 0.
pub fn seed_from_env() -> u64 {
    std::env::var("COBORDANT_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(0)
}

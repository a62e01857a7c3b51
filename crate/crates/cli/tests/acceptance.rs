use std::collections::BTreeSet;
use std::process::ExitCode;

use cobordant::algebra::coeff::{rat, rat_int};
use cobordant::algebra::{parse_polynomial, Field, Jet, Monomial, Poly, Ring};
use cobordant::graded::{
    cobordism_cone, homogeneous_transform_check, initial_form, jacobian_combination, star_subdivision, Cone, Fan,
    WeightedGrading,
};
use cobordant::invariant::{default_precision, InvTuple};
use cobordant::rees::{gradation_generators, valuation_of, Center, ReesAlgebra};
use cobordant_cli::checks::{
    choice_independence, commutation, fingerprint, invariant_drop, sample_points, seed_from_env, CORPUS,
};
use cobordant_cli::driver::{blowup_once, run_principalize};
use cobordant_cli::problem::Problem;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<Vec<String>, String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Working precision `scale` times the default for the problem.
fn scaled(mut p: Problem, scale: u32) -> Problem {
    let n = default_precision(&ReesAlgebra::of_ideal(&p.ring, &p.generators));
    p.precision = Some(scale * n);
    p
}

fn inv(s: &[&str]) -> InvTuple {
    InvTuple::parse(s).unwrap()
}

fn snc_cusp(scale: u32) -> Check {
    let item = &CORPUS[0];
    let (p, plan) = item.load();
    let p = scaled(p, scale);
    let b = blowup_once(&p).map_err(err)?;
    ensure(b.milling.inv == inv(&["2+", "4+", "7"]), || {
        format!("inv {}", b.milling.inv)
    })?;
    let nf = b.center.normal_form().text;
    ensure(nf == ["x1:2+", "x2:4+", "x3:7"], || format!("center {nf:?}"))?;
    ensure(*b.chart.w_a() == 28.into(), || format!("w_A {}", b.chart.w_a()))?;
    ensure(b.chart.weights() == [14, 7, 4], || {
        format!("weights {:?}", b.chart.weights())
    })?;
    let expected = parse_polynomial("(x1'+x2'^2)^2+x3'^7", b.chart.ring()).map_err(err)?;
    ensure(b.controlled[0] == expected, || {
        format!("controlled {}", b.controlled[0])
    })?;
    let t = run_principalize(&p, &plan).map_err(err)?;
    let invs = t.invs();
    ensure(
        invs.len() >= 2 && invs[1] == inv(&["2", "7"]) && invs[1] < invs[0],
        || format!("trace {invs:?}"),
    )?;
    Ok(vec![
        b.milling.inv.to_string(),
        nf.join(","),
        b.controlled[0].to_string(),
        t.to_json(),
    ])
}

fn triple_product(scale: u32) -> Check {
    let (p, _) = CORPUS[1].load();
    let b = blowup_once(&scaled(p, scale)).map_err(err)?;
    ensure(b.milling.inv == inv(&["3", "3", "3", "4", "4", "4"]), || {
        format!("inv {}", b.milling.inv)
    })?;
    let nf = b.center.normal_form().text;
    ensure(nf == ["x1:3", "x2:3", "x3:3", "x4:4", "x5:4", "x6:4"], || {
        format!("center {nf:?}")
    })?;
    ensure(b.chart.weights() == [4, 4, 4, 3, 3, 3], || {
        format!("weights {:?}", b.chart.weights())
    })?;
    Ok(vec![
        b.milling.inv.to_string(),
        nf.join(","),
        b.controlled[0].to_string(),
    ])
}

fn diagonal_family(seed: u64, scale: u32) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..25 {
        let n = rng.gen_range(1..=5);
        let mut c: Vec<u32> = (0..n).map(|_| rng.gen_range(2..=9)).collect();
        c.sort();
        let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let f: Vec<String> = vars.iter().zip(&c).map(|(v, e)| format!("{v}^{e}")).collect();
        let src = serde_json::json!({ "vars": vars, "generators": [f.join("+")] }).to_string();
        let p = scaled(Problem::parse(&src).map_err(err)?, scale);
        let b = blowup_once(&p).map_err(err)?;
        let expected = InvTuple::parse(
            &c.iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .iter()
                .map(String::as_str)
                .collect::<Vec<_>>(),
        )
        .unwrap();
        ensure(b.milling.inv == expected, || {
            format!("c = {c:?}: inv {}", b.milling.inv)
        })?;
        let primed = f.join("+").replace('^', "'^");
        ensure(b.controlled[0].to_string() == primed, || {
            format!("c = {c:?}: controlled {}", b.controlled[0])
        })?;
        // on the chart where x_i' is invertible, d/dx_i' of the strict transform is c_i x_i'^(c_i - 1)
        let strict = &b.strict[0].0;
        for (i, e) in c.iter().enumerate() {
            let v = b.chart.chart_var(i);
            let d = strict.diff(v);
            let unit = d.terms().count() == 1
                && d.terms()
                    .all(|(m, k)| !k.is_zero() && m.0.iter().enumerate().all(|(j, x)| j == v || *x == 0))
                && d.terms().all(|(m, _)| m.0[v] == e - 1);
            ensure(unit, || format!("c = {c:?}: derivative {d} on chart {i}"))?;
        }
        out.push(format!("{c:?} {} {}", b.milling.inv, b.controlled[0]));
    }
    Ok(out)
}

fn lcm(a: u64, b: u64) -> u64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

/// Whether `target` dominates some product of `m` generators `x_i^{a_i}`.
fn power_member(target: &[u64], a: &[u64], m: u64) -> bool {
    fn go(target: &[u64], a: &[u64], m: u64, i: usize) -> bool {
        if m == 0 {
            return true;
        }
        if i == a.len() {
            return false;
        }
        let most = (target[i] / a[i]).min(m);
        (0..=most).rev().any(|k| go(target, a, m - k, i + 1))
    }
    go(target, a, m, 0)
}

/// `nu(x^c) = max { m/n : (x^c)^n in (x_1^{a_1}, ..)^m }` with `n = lcm(a)`.
fn oracle_valuation(c: &[u64], a: &[u64]) -> BigRational {
    let n = a.iter().fold(1, |acc, x| lcm(acc, *x));
    let target: Vec<u64> = c.iter().map(|e| e * n).collect();
    let mut m = 0;
    while power_member(&target, a, m + 1) {
        m += 1;
    }
    rat(m as i64, n as i64)
}

fn valuation_oracle(seed: u64, precision: u32) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..40 {
        let nvars = rng.gen_range(1..=4);
        let names: Vec<String> = (0..nvars).map(|i| format!("x{i}")).collect();
        let ring = Ring::new(Field::Q, &names);
        let k = rng.gen_range(1..=nvars);
        let a: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=5)).collect();
        let items: Vec<(usize, BigRational, bool)> = a
            .iter()
            .enumerate()
            .map(|(i, x)| (i, rat_int(*x as i64), false))
            .collect();
        let center = Center::from_vars(&ring, &items).map_err(err)?;
        let slots = center.slots();
        let a_by_entry: Vec<u64> = center
            .entries()
            .iter()
            .map(|e| e.a.to_integer().try_into().unwrap())
            .collect();
        for _ in 0..10 {
            let deg = rng.gen_range(0..=8);
            let mut e = vec![0u32; nvars];
            for _ in 0..deg {
                e[rng.gen_range(0..nvars)] += 1;
            }
            let mono = Poly::from_terms(&ring, [(Monomial(e.clone()), Field::Q.one())]);
            let got = valuation_of(&Jet::exact(mono.clone()), &center, precision).map_err(err)?;
            let c: Vec<u64> = slots.iter().map(|&s| e[s] as u64).collect();
            let want = oracle_valuation(&c, &a_by_entry);
            ensure(got.as_ref() == Some(&want), || {
                format!("{mono} against {a:?}: {got:?} versus {want}")
            })?;
            out.push(format!("{mono}:{want}"));
        }
        let grade = rat(rng.gen_range(1..=12), rng.gen_range(1..=3));
        let bound = 8;
        let listed: BTreeSet<Vec<u32>> = gradation_generators(&center, &grade, bound)
            .into_iter()
            .map(|m| m.0)
            .collect();
        let mut members = Vec::new();
        let mut stack = vec![vec![0u32; k]];
        let mut seen = BTreeSet::new();
        while let Some(c) = stack.pop() {
            if !seen.insert(c.clone()) {
                continue;
            }
            let c64: Vec<u64> = c.iter().map(|x| *x as u64).collect();
            if oracle_valuation(&c64, &a_by_entry) >= grade {
                members.push(c.clone());
            }
            if c.iter().sum::<u32>() < bound {
                for i in 0..k {
                    let mut d = c.clone();
                    d[i] += 1;
                    stack.push(d);
                }
            }
        }
        let divides = |x: &Vec<u32>, y: &Vec<u32>| x.iter().zip(y).all(|(p, q)| p <= q);
        let minimal: BTreeSet<Vec<u32>> = members
            .iter()
            .filter(|m| !members.iter().any(|o| o != *m && divides(o, m)))
            .cloned()
            .collect();
        ensure(listed == minimal, || {
            format!("grade {grade} against {a:?}: {listed:?} versus {minimal:?}")
        })?;
    }
    Ok(out)
}

fn corpus_commutation(scale: u32) -> Check {
    let mut out = Vec::new();
    for item in CORPUS {
        let c = commutation(&scaled(item.load().0, scale)).map_err(err)?;
        ensure(c.holds(), || {
            format!(
                "{}: {:?} versus {:?}",
                item.name, c.transformed_coefficients, c.coefficients_of_transform
            )
        })?;
        out.push(format!("{}: {:?}", item.name, c.transformed_coefficients));
    }
    Ok(out)
}

fn corpus_drop(scale: u32) -> Check {
    let mut out = Vec::new();
    for item in CORPUS {
        let d = invariant_drop(&scaled(item.load().0, scale), &sample_points(item)).map_err(err)?;
        let dump = serde_json::to_string(&d).unwrap();
        ensure(d.holds(), || format!("{}: {dump}", item.name))?;
        out.push(format!("{}: {dump}", item.name));
    }
    Ok(out)
}

fn corpus_choice(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for item in CORPUS {
        choice_independence(&item.load().0, 20, &mut rng)
            .map_err(err)?
            .map_err(|e| format!("{}: {e}", item.name))?;
    }
    Ok(Vec::new())
}

fn corpus_fingerprints(scale: u32) -> Check {
    CORPUS
        .iter()
        .map(|item| {
            let f = fingerprint(&scaled(item.load().0, scale)).map_err(err)?;
            Ok(format!("{}: {} {:?}", item.name, f.inv, f.normal_form))
        })
        .collect()
}

fn toric(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..25 {
        let n = rng.gen_range(2..=4);
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
        let sigma = Cone::standard(n, &(0..n).collect::<Vec<_>>());
        let star = star_subdivision(&Fan::of_cone(sigma.clone()), &v).map_err(err)?;
        let upper = cobordism_cone(&sigma, &v)
            .and_then(|c| c.projected_upper())
            .map_err(err)?;
        ensure(star.canonical() == upper.canonical(), || format!("v = {v:?}"))?;
        ensure(star.check_axioms(), || format!("v = {v:?}: not a fan"))?;
    }
    Ok(Vec::new())
}

fn char2_hypersurface() -> Check {
    let r = Ring::new(Field::Fp(2), &["x", "y", "z", "w"]);
    let p = |s: &str| parse_polynomial(s, &r).unwrap();
    let f = p("x^2+y*z^3+z*w^3+y^7*w");
    let items: Vec<(usize, BigRational, bool)> = [32, 7, 19, 15]
        .iter()
        .enumerate()
        .map(|(i, w)| (i, rat(64, *w), false))
        .collect();
    let center = Center::from_vars(&r, &items).map_err(err)?;
    let g = WeightedGrading::new(vec![32, 7, 19, 15]);
    ensure(initial_form(&f, &g) == (f.clone(), 64), || {
        "f is not homogeneous of grade 64".into()
    })?;
    let d = |i| f.diff(i);
    ensure(d(1) == p("z^3+y^6*w"), || format!("Y = {}", d(1)))?;
    ensure(d(2) == p("y*z^2+w^3"), || format!("Z = {}", d(2)))?;
    ensure(d(3) == p("z*w^2+y^7"), || format!("W = {}", d(3)))?;
    let big_f = jacobian_combination(&f, &[(1, r.var(1)), (2, r.var(2))]);
    ensure(big_f == p("x^2+y*z^3"), || format!("F = {big_f}"))?;
    ensure(homogeneous_transform_check(&f, &center).map_err(err)?, || {
        "transform changed the expression".into()
    })?;
    Ok(vec![big_f.to_string()])
}

fn stabilization(seed: u64) -> Check {
    let runs: [(&str, &dyn Fn(u32) -> Check); 7] = [
        ("snc_cusp", &snc_cusp),
        ("x1*x2*x3+x4^4+x5^2*x6^2", &triple_product),
        ("diagonal family", &|s| diagonal_family(seed, s)),
        ("valuations", &|s| valuation_oracle(seed, 8 * s)),
        ("commutation", &corpus_commutation),
        ("invariant drop", &corpus_drop),
        ("fingerprints", &corpus_fingerprints),
    ];
    for (name, run) in runs {
        let (lo, hi) = (run(1)?, run(2)?);
        ensure(lo == hi, || format!("{name} differs between N and 2N"))?;
    }
    Ok(Vec::new())
}

fn main() -> ExitCode {
    let seed = seed_from_env();
    let criteria: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("snc_cusp regression", Box::new(|| snc_cusp(1))),
        ("x1*x2*x3+x4^4+x5^2*x6^2 regression", Box::new(|| triple_product(1))),
        ("diagonal family", Box::new(move || diagonal_family(seed, 1))),
        ("valuation oracle", Box::new(move || valuation_oracle(seed, 8))),
        ("commutation", Box::new(|| corpus_commutation(1))),
        ("invariant drop", Box::new(|| corpus_drop(1))),
        ("choice independence", Box::new(move || corpus_choice(seed))),
        ("toric consistency", Box::new(move || toric(seed))),
        ("characteristic 2 hypersurface", Box::new(char2_hypersurface)),
        ("precision stabilization", Box::new(move || stabilization(seed))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(_) => println!("PASS {} {name}", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {} {name}: {e}", i + 1);
            }
        }
    }
    println!("seed {seed}");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use cobordant::algebra::coeff::binomial;
use cobordant::algebra::{parse_polynomial, Coeff, CoordinateChange, Field, Jet, Monomial, Poly, Ring};
use cobordant::cobordant::{build_chart, exceptional_principality_check, DivisorPolicy, DivisorSet};
use cobordant::graded::{
    cobordism_cone, homogeneous_transform_check, initial_form, star_subdivision, Cone, Fan, WeightedGrading,
};
use cobordant::invariant::{InvTuple, QPlus};
use cobordant::rees::{is_admissible, monomial_valuation, valuation_of, Center, ReesAlgebra};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

const NAMES: [&str; 3] = ["x", "y", "z"];

fn field() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Q), Just(Field::Fp(5)), Just(Field::Fp(2))]
}

type Terms = Vec<(Vec<u32>, i64)>;

fn terms(n: usize, max_exp: u32) -> impl Strategy<Value = Terms> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, n), -6i64..=6), 0..6)
}

fn poly(r: &Ring, t: &Terms) -> Poly {
    Poly::from_terms(r, t.iter().map(|(e, c)| (Monomial(e.clone()), r.field().from_i64(*c))))
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn ring(f: Field, n: usize) -> Ring {
    Ring::new(f, &NAMES[..n])
}

proptest! {
    #[test]
    fn ring_axioms(f in field(), a in terms(3, 3), b in terms(3, 3), c in terms(3, 3)) {
        let r = ring(f, 3);
        let (a, b, c) = (poly(&r, &a), poly(&r, &b), poly(&r, &c));
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.mul(&r.one()), a.clone());
    }

    #[test]
    fn leibniz(f in field(), a in terms(3, 4), b in terms(3, 4), i in 0usize..3) {
        let r = ring(f, 3);
        let (a, b) = (poly(&r, &a), poly(&r, &b));
        prop_assert_eq!(a.mul(&b).diff(i), a.diff(i).mul(&b).add(&a.mul(&b.diff(i))));
    }

    // D_alpha D_beta = C(alpha + beta, alpha) D_{alpha + beta}, also in positive characteristic
    #[test]
    fn divided_powers_compose(f in field(), a in terms(2, 6), al in prop::collection::vec(0u32..3, 2), be in prop::collection::vec(0u32..3, 2)) {
        let r = ring(f, 2);
        let a = poly(&r, &a);
        let (al, be) = (Monomial(al), Monomial(be));
        let sum = al.mul(&be);
        let mut c = num_bigint::BigUint::from(1u32);
        for (s, x) in sum.0.iter().zip(&al.0) {
            c *= binomial(*s, *x);
        }
        let lhs = a.derivative(&be).derivative(&al);
        prop_assert_eq!(lhs, a.derivative(&sum).scale(&f.from_biguint(&c)));
    }

    #[test]
    fn order_is_additive(a in terms(3, 4), b in terms(3, 4)) {
        let r = ring(Field::Q, 3);
        let (a, b) = (poly(&r, &a), poly(&r, &b));
        prop_assume!(!a.is_zero() && !b.is_zero());
        prop_assert_eq!(a.mul(&b).ord(), Some(a.ord().unwrap() + b.ord().unwrap()));
    }

    #[test]
    fn printing_round_trips(f in field(), a in terms(3, 5)) {
        let r = ring(f, 3);
        let a = poly(&r, &a);
        prop_assert_eq!(parse_polynomial(&a.to_string(), &r).unwrap(), a);
    }

    #[test]
    fn inverse_undoes_forward(h in terms(2, 3), n in 3u32..7) {
        let r = ring(Field::Q, 2);
        let tail: Terms = h.into_iter().filter(|(e, _)| e.iter().sum::<u32>() >= 2).collect();
        let fwd = vec![Jet::exact(r.var(0).add(&poly(&r, &tail))), Jet::exact(r.var(1))];
        let c = CoordinateChange::new(&r, &r, fwd, n).unwrap();
        let back = c.forward()[0].compose(c.inverse(), c.target());
        prop_assert_eq!(back.poly().truncate(n), r.var(0));
    }

    #[test]
    fn substitution_is_multiplicative(h in terms(2, 3), a in terms(2, 3), b in terms(2, 3)) {
        let r = ring(Field::Q, 2);
        let tail: Terms = h.into_iter().filter(|(e, _)| e.iter().sum::<u32>() >= 2).collect();
        let fwd = vec![Jet::exact(r.var(0).add(&poly(&r, &tail))), Jet::exact(r.var(1))];
        let c = CoordinateChange::new(&r, &r, fwd, 6).unwrap();
        let (a, b) = (Jet::exact(poly(&r, &a)), Jet::exact(poly(&r, &b)));
        let lhs = c.substitute(&a.mul(&b));
        let rhs = c.substitute(&a).mul(&c.substitute(&b));
        prop_assert_eq!(lhs.poly().truncate(6), rhs.poly().truncate(6));
    }

    #[test]
    fn monomial_valuation_axioms(a in terms(3, 4), b in terms(3, 4), w in prop::collection::vec(1i64..6, 3)) {
        let r = ring(Field::Q, 3);
        let w: Vec<BigRational> = w.into_iter().map(|x| q(1) / q(x)).collect();
        let (a, b) = (Jet::exact(poly(&r, &a)), Jet::exact(poly(&r, &b)));
        prop_assume!(!a.is_zero() && !b.is_zero());
        let va = monomial_valuation(&a, &w).unwrap().unwrap();
        let vb = monomial_valuation(&b, &w).unwrap().unwrap();
        prop_assert_eq!(monomial_valuation(&a.mul(&b), &w).unwrap(), Some(&va + &vb));
        if let Some(v) = monomial_valuation(&a.add(&b), &w).unwrap() {
            prop_assert!(v >= va.clone().min(vb.clone()));
        }
    }

    // rescaling grades by c while dividing the center exponents by c changes nothing
    #[test]
    fn admissibility_under_rescaling(a in terms(3, 5), ex in prop::collection::vec(1i64..5, 3), c in 1i64..4) {
        let r = ring(Field::Q, 3);
        let f = poly(&r, &a);
        prop_assume!(!f.is_zero());
        let items: Vec<_> = ex.iter().enumerate().map(|(i, e)| (i, q(*e), false)).collect();
        let scaled: Vec<_> = ex.iter().enumerate().map(|(i, e)| (i, q(*e) / q(c), false)).collect();
        let alg = ReesAlgebra::of_ideal(&r, &[f]);
        let lhs = is_admissible(&alg, &Center::from_vars(&r, &items).unwrap(), 12).unwrap();
        let rhs = is_admissible(&alg.rescale(&q(c)), &Center::from_vars(&r, &scaled).unwrap(), 12).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn admissibility_under_permutation(a in terms(3, 5), ex in prop::collection::vec(1i64..5, 3), perm in Just(vec![0usize, 1, 2]).prop_shuffle()) {
        let r = ring(Field::Q, 3);
        let f = poly(&r, &a);
        prop_assume!(!f.is_zero());
        let items: Vec<_> = ex.iter().enumerate().map(|(i, e)| (i, q(*e), false)).collect();
        let moved: Vec<_> = ex.iter().enumerate().map(|(i, e)| (perm[i], q(*e), false)).collect();
        let lhs = is_admissible(&ReesAlgebra::of_ideal(&r, std::slice::from_ref(&f)), &Center::from_vars(&r, &items).unwrap(), 12).unwrap();
        let g = f.remap(&r, &perm);
        let rhs = is_admissible(&ReesAlgebra::of_ideal(&r, &[g]), &Center::from_vars(&r, &moved).unwrap(), 12).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn qplus_is_a_total_order(a in 0i64..20, b in 0i64..20, pa: bool, pb: bool) {
        let x = QPlus::new(q(a) / q(4), pa);
        let y = QPlus::new(q(b) / q(4), pb);
        prop_assert_eq!(x.cmp(&y), y.cmp(&x).reverse());
        prop_assert_eq!(x == y, a == b && pa == pb);
        if a < b {
            prop_assert!(x < y);
            prop_assert!(QPlus::new(q(a) / q(4), true) < y);
        }
    }

    #[test]
    fn inv_tuples_pad_with_infinity(xs in prop::collection::vec((0i64..8, any::<bool>()), 0..5), extra in (0i64..8, any::<bool>())) {
        let t = InvTuple(xs.iter().map(|(v, p)| QPlus::new(q(*v), *p)).collect());
        let mut longer = t.clone();
        longer.0.push(QPlus::new(q(extra.0), extra.1));
        prop_assert!(longer < t);
        prop_assert!(t < InvTuple::default() || t.is_empty());
    }

    #[test]
    fn initial_forms_multiply(a in terms(2, 5), b in terms(2, 5), w in prop::collection::vec(1i64..5, 2)) {
        let r = ring(Field::Q, 2);
        let (a, b) = (poly(&r, &a), poly(&r, &b));
        prop_assume!(!a.is_zero() && !b.is_zero());
        let g = WeightedGrading::new(w);
        let (fa, da) = initial_form(&a, &g);
        let (fb, db) = initial_form(&b, &g);
        prop_assert_eq!(initial_form(&a.mul(&b), &g), (fa.mul(&fb), da + db));
    }

    #[test]
    fn exceptional_divisor_is_principal(ex in prop::collection::vec(1i64..5, 1..4)) {
        let r = ring(Field::Q, 3);
        let items: Vec<_> = ex.iter().enumerate().map(|(i, e)| (i, q(*e), false)).collect();
        let c = Center::from_vars(&r, &items).unwrap();
        let chart = build_chart(&c, &r, &DivisorSet::default(), &[], "s", DivisorPolicy::Total).unwrap();
        prop_assert!(exceptional_principality_check(&c, &chart));
    }

    // the power of s split off by the chart is w_A times the valuation
    #[test]
    fn chart_and_valuation_gradings_agree(a in terms(3, 4), ex in prop::collection::vec(1i64..5, 3)) {
        let r = ring(Field::Q, 3);
        let f = poly(&r, &a);
        prop_assume!(!f.is_zero());
        let items: Vec<_> = ex.iter().enumerate().map(|(i, e)| (i, q(*e), false)).collect();
        let c = Center::from_vars(&r, &items).unwrap();
        let chart = build_chart(&c, &r, &DivisorSet::default(), &[], "s", DivisorPolicy::Total).unwrap();
        let v = valuation_of(&Jet::exact(f.clone()), &c, 12).unwrap().unwrap();
        let (_, e) = chart.strict_transform(&f);
        prop_assert_eq!(q(e), v.clone() * c.w_a());
        let admissible = is_admissible(&ReesAlgebra::of_ideal(&r, std::slice::from_ref(&f)), &c, 12).unwrap();
        prop_assert_eq!(admissible, chart.controlled_transform(&f).is_ok());
    }

    #[test]
    fn homogeneous_inputs_transform_to_themselves(ex in prop::collection::vec(1i64..4, 2), coeffs in prop::collection::vec(-3i64..=3, 12)) {
        let r = ring(Field::Q, 2);
        let items: Vec<_> = ex.iter().enumerate().map(|(i, e)| (i, q(*e), false)).collect();
        let c = Center::from_vars(&r, &items).unwrap();
        let g = WeightedGrading::of_center(&c).unwrap();
        let d = c.w_a().to_integer().try_into().unwrap_or(1i64);
        let f = Poly::from_terms(
            &r,
            (0..=3u32)
                .flat_map(|i| (0..=3u32).map(move |j| Monomial(vec![i, j])))
                .filter(|m| g.grade(m) == d)
                .zip(&coeffs)
                .map(|(m, k)| (m, Field::Q.from_i64(*k))),
        );
        prop_assert!(homogeneous_transform_check(&f, &c).unwrap());
    }

    #[test]
    fn star_subdivision_matches_cobordism(v in prop::collection::vec(1i64..7, 2..5)) {
        let n = v.len();
        let s = Cone::standard(n, &(0..n).collect::<Vec<_>>());
        let star = star_subdivision(&Fan::of_cone(s.clone()), &v).unwrap();
        let upper = cobordism_cone(&s, &v).unwrap().projected_upper().unwrap();
        prop_assert_eq!(star.canonical(), upper.canonical());
        prop_assert!(star.check_axioms());
        let g = v.iter().fold(0i64, |g, x| num_integer::gcd(g, *x));
        let mut mults: Vec<i64> = star.cones().iter().map(|c| c.multiplicity().unwrap()).collect();
        let mut want: Vec<i64> = v.iter().map(|x| x / g).collect();
        mults.sort();
        want.sort();
        prop_assert_eq!(mults, want);
    }
}

#[test]
fn coefficient_arithmetic_in_characteristic_p() {
    let f = Field::Fp(7);
    let three: Coeff = f.from_i64(3);
    assert!(three.mul(&three.inv()).is_one());
    assert!(f.from_i64(7).is_zero());
}

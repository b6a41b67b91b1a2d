use hdx_core::builders::{complete_complex, complete_partite};
use hdx_core::cones::{auto_cone, cone_decode, Budget};
use hdx_core::cochain::{delta, distance, is_coboundary, is_cocycle, weight, Cochain, TwoComplex};
use hdx_core::gk::{smoothness, Distribution};
use hdx_core::group::{Elem, FiniteGroup};
use hdx_core::rational::{format_rational, parse_rational, Rational};
use hdx_core::rng::substream;
use hdx_core::ug::{strong_satisfiability, Action, UgInstance};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn complexes() -> Vec<(&'static str, TwoComplex)> {
    let two = |x| TwoComplex::from_complex(&x).unwrap();
    vec![
        ("triangle", two(complete_complex(3, 2).unwrap())),
        ("delta4", two(complete_complex(4, 2).unwrap())),
        ("delta5", two(complete_complex(5, 2).unwrap())),
        ("k222", two(complete_partite(&[2, 2, 2]).unwrap())),
    ]
}

fn groups() -> Vec<FiniteGroup> {
    ["z2", "z:3", "z:4", "sym:3"].iter().map(|g| FiniteGroup::parse(g).unwrap()).collect()
}

/// `f^g(uv) = g(u) f(uv) g(v)^{-1}` on the stored orientation of each edge.
fn gauge(x: &TwoComplex, group: &FiniteGroup, f: &Cochain, g: &Cochain) -> Cochain {
    let values = x
        .edges()
        .iter()
        .zip(&f.values)
        .map(|(e, &fe)| {
            let (u, v) = e.ends;
            group.mul(group.mul(g.values[u], fe), group.inv(g.values[v]))
        })
        .collect();
    Cochain::new(x, 1, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn delta_delta_is_trivial(seed in any::<u64>(), cx in 0usize..4, gi in 0usize..4) {
        let (_, x) = &complexes()[cx];
        let group = &groups()[gi];
        let mut rng = substream(seed, "dd");
        for degree in [-1i8, 0] {
            let h = Cochain::random(x, group, degree, &mut rng);
            let dd = delta(x, group, &delta(x, group, &h).unwrap()).unwrap();
            prop_assert!(dd.values.iter().all(|&v| v == group.identity()));
        }
    }

    #[test]
    fn gauge_preserves_weight_and_coboundary_status(seed in any::<u64>(), cx in 0usize..4, gi in 0usize..4) {
        let (_, x) = &complexes()[cx];
        let group = &groups()[gi];
        let mut rng = substream(seed, "gauge");
        let f = Cochain::random(x, group, 1, &mut rng);
        let g = Cochain::random(x, group, 0, &mut rng);
        let fg = gauge(x, group, &f, &g);
        prop_assert_eq!(weight(x, &delta(x, group, &f).unwrap()), weight(x, &delta(x, group, &fg).unwrap()));
        prop_assert_eq!(is_cocycle(x, group, &f).unwrap(), is_cocycle(x, group, &fg).unwrap());
        prop_assert_eq!(is_coboundary(x, group, &f).unwrap(), is_coboundary(x, group, &fg).unwrap());
    }

    #[test]
    fn coboundaries_are_cocycles(seed in any::<u64>(), cx in 0usize..4, gi in 0usize..4) {
        let (_, x) = &complexes()[cx];
        let group = &groups()[gi];
        let g = Cochain::random(x, group, 0, &mut substream(seed, "cob"));
        let f = delta(x, group, &g).unwrap();
        prop_assert!(is_cocycle(x, group, &f).unwrap());
        prop_assert!(is_coboundary(x, group, &f).unwrap());
    }

    #[test]
    fn cone_decoding_inverts_coboundaries(seed in any::<u64>(), cx in 1usize..3, v0 in 0usize..4) {
        let (_, x) = &complexes()[cx];
        let sym3 = FiniteGroup::symmetric(3).unwrap();
        let cone = auto_cone(x, v0, Budget::default()).unwrap().cone.unwrap();
        let f = delta(x, &sym3, &Cochain::random(x, &sym3, 0, &mut substream(seed, "cone"))).unwrap();
        let g = cone_decode(x, &sym3, &cone, &f).unwrap();
        prop_assert_eq!(g.values[v0], sym3.identity());
        prop_assert_eq!(delta(x, &sym3, &g).unwrap(), f);
    }

    #[test]
    fn distance_is_a_metric(seed in any::<u64>(), cx in 0usize..4) {
        let (_, x) = &complexes()[cx];
        let group = FiniteGroup::parse("z:3").unwrap();
        let mut rng = substream(seed, "metric");
        let [a, b, c] = [0, 1, 2].map(|_| Cochain::random(x, &group, 1, &mut rng));
        let d = |p: &Cochain, q: &Cochain| distance(x, p, q).unwrap();
        prop_assert!(d(&a, &a).is_zero());
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        prop_assert!(d(&a, &b) <= Rational::one());
    }

    #[test]
    fn strongly_satisfiable_iff_coboundary(seed in any::<u64>(), cx in 0usize..3) {
        let (_, x) = &complexes()[cx];
        let sym3 = FiniteGroup::symmetric(3).unwrap();
        let f = Cochain::random(x, &sym3, 1, &mut substream(seed, "ug"));
        let u = UgInstance::from_cochain(x, &f, &Action::natural(&sym3)).unwrap();
        let report = strong_satisfiability(&u).unwrap();
        prop_assert_eq!(report.satisfiable, is_coboundary(x, &sym3, &f).unwrap());
        for h in report.family.iter().flatten() {
            prop_assert_eq!(u.value(h).unwrap(), Rational::one());
        }
    }

    #[test]
    fn ug_cochain_round_trip(seed in any::<u64>()) {
        let (_, x) = &complexes()[1];
        let sym3 = FiniteGroup::symmetric(3).unwrap();
        let f = Cochain::random(x, &sym3, 1, &mut substream(seed, "round"));
        let u = UgInstance::from_cochain(x, &f, &Action::natural(&sym3)).unwrap();
        let (sym, back) = u.cochain_on(x).unwrap();
        let perms = |g: &FiniteGroup, c: &Cochain| c.values.iter().map(|&e| g.permutation(e).to_vec()).collect::<Vec<_>>();
        prop_assert_eq!(perms(&sym3, &f), perms(&sym, &back));
    }

    #[test]
    fn smoothness_is_scale_free(ws in prop::collection::vec(1i128..20, 1..6), k in 1i128..5) {
        let p: Distribution = ws.iter().enumerate().map(|(i, &w)| (vec![i], Rational::from_integer(w))).collect();
        let q: Distribution = p.iter().map(|(key, w)| (key.clone(), *w * Rational::from_integer(k))).collect();
        prop_assert_eq!(smoothness(&p, &p, None), Some(Rational::one()));
        prop_assert_eq!(smoothness(&p, &q, None), Some(Rational::from_integer(k)));
        prop_assert_eq!(smoothness(&p, &q, Some(&|_: &[usize]| false)), None);
    }

    #[test]
    fn rationals_print_and_parse(n in -10_000i128..10_000, d in 1i128..10_000) {
        let r = Rational::new(n, d);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
}

#[test]
fn identity_cochain_has_no_violations() {
    for (name, x) in complexes() {
        for group in groups() {
            let f = Cochain::identity(&x, 1);
            assert!(weight(&x, &delta(&x, &group, &f).unwrap()).is_zero(), "{name} over {}", group.name());
            assert!(f.values.iter().all(|&v| v == Elem(0)));
        }
    }
}

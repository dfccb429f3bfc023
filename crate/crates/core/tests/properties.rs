use std::collections::BTreeSet;

use morass_core::balg::{
    nice_property, norm_with, stone_points, Backend, Budget, ElementAlgebra, Presentation, SimpleFunction,
};
use morass_core::cohen::{demanded_bit, density_check, pigeonhole_guess, CohenCondition, Decision};
use morass_core::lmodel::{construct, minimal_alpha, plan_stages, Variant};
use morass_core::morass::{build_prefix, SplitRule};
use morass_core::plam::{color_compat, compatible, delta_system, split_extensions, stronger, PCondition};
use morass_core::Rational;
use num_traits::Signed;
use proptest::prelude::*;

fn rule() -> impl Strategy<Value = SplitRule> {
    prop_oneof![
        Just(SplitRule::Zero),
        Just(SplitRule::Top),
        Just(SplitRule::Half),
        (0usize..6).prop_map(SplitRule::Fixed),
    ]
}

fn presentation(max_gens: usize) -> impl Strategy<Value = Presentation> {
    (1..=max_gens).prop_flat_map(|n| {
        let pair = (0..n, 0..n, any::<bool>());
        proptest::collection::vec(pair, 0..=2 * n).prop_map(move |rels| {
            let mut p = Presentation::free(n);
            for (x, y, leq) in rels {
                if leq {
                    p.add_leq(x, y);
                } else if x != y {
                    p.add_dis(x, y);
                }
            }
            p
        })
    })
}

fn function(gens: usize) -> impl Strategy<Value = SimpleFunction> {
    proptest::collection::vec((-6i64..=6, 1i64..=4, 0..gens), 0..=gens + 2).prop_map(|terms| {
        SimpleFunction::new(
            terms
                .into_iter()
                .map(|(n, d, g)| (Rational::new(n.into(), d.into()), g))
                .collect(),
        )
    })
}

fn with_function(max_gens: usize) -> impl Strategy<Value = (Presentation, SimpleFunction, SimpleFunction)> {
    presentation(max_gens).prop_flat_map(|p| {
        let n = p.gens();
        (Just(p), function(n), function(n))
    })
}

fn norm(p: &Presentation, f: &SimpleFunction) -> Rational {
    norm_with(p, f, Backend::Propagation, &Budget::default()).unwrap()
}

fn cohen(max: usize) -> impl Strategy<Value = CohenCondition> {
    proptest::collection::btree_map(0..max, any::<bool>(), 0..max).prop_map(CohenCondition)
}

fn condition(w: Vec<usize>, rels: Vec<(usize, usize, bool)>) -> PCondition {
    let mut p = PCondition::free(w.iter().copied());
    for (i, j, leq) in rels {
        let (a, b) = (w[i % w.len()], w[j % w.len()]);
        if a == b {
            continue;
        }
        if leq {
            p.add_leq(a, b).unwrap();
        } else {
            p.add_dis(a, b).unwrap();
        }
    }
    p
}

fn pcondition() -> impl Strategy<Value = PCondition> {
    (
        proptest::collection::btree_set(0usize..6, 1..=4),
        proptest::collection::vec((0usize..4, 0usize..4, any::<bool>()), 0..4),
    )
        .prop_map(|(w, rels)| condition(w.into_iter().collect(), rels))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn maps_are_increasing_and_compose(rule in rule(), n in 1usize..=5) {
        let p = build_prefix(n, &rule).unwrap();
        for gamma in 0..=n {
            for beta in 0..=gamma {
                let into_gamma: BTreeSet<Vec<usize>> =
                    p.family(beta, gamma).unwrap().into_iter().map(|f| f.values).collect();
                prop_assert!(into_gamma.iter().all(|v| v.windows(2).all(|w| w[0] < w[1])));
                prop_assert!(p.fresh_points(beta, gamma).unwrap().len() >= gamma - beta);
                for alpha in 0..=beta {
                    let direct: BTreeSet<Vec<usize>> =
                        p.family(alpha, gamma).unwrap().into_iter().map(|f| f.values).collect();
                    for f in p.family(alpha, beta).unwrap() {
                        for g in p.family(beta, gamma).unwrap() {
                            prop_assert!(direct.contains(&f.then(&g).values));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn backends_agree((p, f, _) in with_function(16)) {
        let budget = Budget::with_enumeration_limit(16);
        let e = stone_points(&p, Backend::Enumeration, &budget).unwrap();
        let g = stone_points(&p, Backend::Propagation, &budget).unwrap();
        prop_assert_eq!(e, g);
        prop_assert_eq!(
            norm_with(&p, &f, Backend::Enumeration, &budget).unwrap(),
            norm_with(&p, &f, Backend::Propagation, &budget).unwrap()
        );
    }

    #[test]
    fn norm_is_a_seminorm((p, f, g) in with_function(10), c in -5i64..=5) {
        let c = Rational::from_integer(c.into());
        prop_assert_eq!(norm(&p, &f.scale(&c)), c.abs() * norm(&p, &f));
        prop_assert!(norm(&p, &f.plus(&g)) <= norm(&p, &f) + norm(&p, &g));
        prop_assert!(norm(&p, &f) >= Rational::from_integer(0.into()));
    }

    #[test]
    fn relations_do_not_raise_norms((p, f, _) in with_function(10), x in 0usize..10, y in 0usize..10, leq: bool) {
        let n = p.gens();
        let mut stronger_p = p.clone();
        if leq {
            stronger_p.add_leq(x % n, y % n);
        } else {
            stronger_p.add_dis(x % n, y % n);
        }
        prop_assert!(norm(&stronger_p, &f) <= norm(&p, &f));
    }

    #[test]
    fn nice_property_matches_element_algebra(p in presentation(10), family in proptest::collection::vec(0usize..10, 0..4)) {
        let family: Vec<usize> = family.into_iter().map(|g| g % p.gens()).collect();
        let algebra = ElementAlgebra::new(&p, Backend::Enumeration, &Budget::default()).unwrap();
        let elements: Vec<_> = family.iter().map(|&g| algebra.generator(g)).collect();
        let fast = nice_property(&p, &family);
        prop_assert_eq!(fast.is_some(), algebra.nice_property(&elements).is_some());
        if let Some(w) = fast {
            prop_assert!(w.assignment.satisfies(&p));
            prop_assert!(family.iter().all(|&g| !w.assignment.get(g)));
        }
    }

    #[test]
    fn cohen_order_laws(p in cohen(8), q in cohen(8)) {
        prop_assert!(p.extended_by(&p));
        match p.compatible(&q) {
            Some(r) => prop_assert!(p.extended_by(&r) && q.extended_by(&r)),
            None => prop_assert!(p.domain().any(|n| q.get(n).is_some_and(|b| Some(b) != p.get(n)))),
        }
        prop_assert_eq!(p.compatible(&q), q.compatible(&p));
    }

    #[test]
    fn density_extends_and_decides(p in cohen(20), n_star in 2u64..=4, norms in proptest::collection::vec(0i64..8, 40)) {
        let oracle = |n: usize| Rational::from_integer(norms[n % norms.len()].into());
        let d = density_check(&p, n_star, oracle);
        prop_assert!(p.extended_by(&d.q));
        prop_assert!(d.witness as u64 >= n_star * n_star);
        prop_assert_eq!(d.q.get(d.witness), Some(demanded_bit(n_star, &oracle(d.witness))));
    }

    #[test]
    fn pigeonhole_is_large_and_consistent(picks in proptest::collection::vec((0usize..8, 0u64..5), 1..200)) {
        let universe: Vec<CohenCondition> = (0..8).map(|i| CohenCondition::from_pairs([(i, true)])).collect();
        let decisions: Vec<Decision> = picks
            .iter()
            .enumerate()
            .map(|(index, &(c, value))| Decision { index, condition: universe[c].clone(), value })
            .collect();
        let g = pigeonhole_guess(&decisions, &universe).unwrap();
        prop_assert!(g.indices.len() * universe.len() >= decisions.len());
        for d in &decisions {
            prop_assert_eq!(d.condition == g.condition, g.indices.contains(&d.index));
        }
    }

    #[test]
    fn stronger_is_a_preorder(p in pcondition(), q in pcondition(), r in pcondition(), fresh in 10usize..14) {
        prop_assert!(stronger(&p, &p).unwrap());
        if stronger(&p, &q).unwrap() && stronger(&q, &r).unwrap() {
            prop_assert!(stronger(&p, &r).unwrap());
        }
        let mut wider = p.clone();
        wider.add_index(fresh);
        prop_assert!(stronger(&p, &wider).unwrap());
        if let Some(a) = compatible(&p, &q).unwrap() {
            prop_assert!(stronger(&p, &a).unwrap() && stronger(&q, &a).unwrap());
        }
    }

    #[test]
    fn same_color_is_compatible(root in 0usize..3, tail in 1usize..4, rels in proptest::collection::vec((0usize..6, 0usize..6, any::<bool>()), 0..5)) {
        let w_p: Vec<usize> = (0..root + tail).collect();
        let w_q: Vec<usize> = (0..root).chain(10..10 + tail).collect();
        let p = condition(w_p, rels.clone());
        let q = condition(w_q, rels);
        prop_assert!(color_compat(&p, &q));
        prop_assert!(compatible(&p, &q).unwrap().is_some());
    }

    #[test]
    fn split_norms(k in 1usize..=6) {
        let fresh: Vec<usize> = (0..=k).collect();
        let base: Vec<PCondition> = fresh.iter().map(|&a| PCondition::free([a])).collect();
        let s = split_extensions(&base, &fresh).unwrap();
        prop_assert_eq!(s.chain_norm, Rational::from_integer((k as i64 + 1).into()));
        prop_assert_eq!(s.antichain_norm, Rational::from_integer(1.into()));
        prop_assert!(compatible(&s.chain, &s.antichain).unwrap().is_none());
        for b in &base {
            prop_assert!(stronger(b, &s.chain).unwrap() && stronger(b, &s.antichain).unwrap());
        }
    }

    #[test]
    fn delta_system_matches_brute_force(family in proptest::collection::vec(proptest::collection::btree_set(0usize..8, 1..=3), 1..=7), k in 2usize..=4) {
        let brute = (0u32..1 << family.len()).filter(|m| m.count_ones() as usize == k).any(|m| {
            let chosen: Vec<&BTreeSet<usize>> = (0..family.len()).filter(|i| m >> i & 1 == 1).map(|i| &family[i]).collect();
            let root: BTreeSet<usize> = chosen[0].intersection(chosen[1]).copied().collect();
            chosen.iter().enumerate().all(|(i, a)| {
                chosen[i + 1..].iter().all(|b| a.intersection(b).copied().collect::<BTreeSet<_>>() == root)
            })
        });
        let found = delta_system(&family, k);
        prop_assert_eq!(found.is_some(), brute);
        if let Some((idx, root)) = found {
            prop_assert_eq!(idx.len(), k);
            for (i, &a) in idx.iter().enumerate() {
                for &b in &idx[i + 1..] {
                    prop_assert_eq!(&family[a].intersection(&family[b]).copied().collect::<BTreeSet<_>>(), &root);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn construction_is_deterministic(bits in proptest::collection::vec(any::<bool>(), 1..=3), c_variant: bool) {
        let variant = if c_variant { Variant::C } else { Variant::Plain };
        let rule = if c_variant { SplitRule::Top } else { SplitRule::Zero };
        let levels = minimal_alpha(bits.len(), variant)[bits.len()].max(1);
        let prefix = build_prefix(levels, &rule).unwrap();
        let plan = plan_stages(&prefix, bits.len(), variant).unwrap();
        let a = construct(&prefix, &plan, &bits).unwrap();
        let b = construct(&prefix, &plan, &bits).unwrap();
        let text = |c: &morass_core::lmodel::Construction| c.models.iter().map(|m| m.to_text()).collect::<Vec<_>>();
        prop_assert_eq!(text(&a), text(&b));
    }
}

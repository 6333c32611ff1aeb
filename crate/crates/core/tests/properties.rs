use modsurf::domain::{canonical_piece, is_reduced};
use modsurf::*;
use proptest::prelude::*;

fn element() -> impl Strategy<Value = ModularElement> {
    prop::collection::vec(0usize..3, 0..12).prop_map(|word| {
        word.into_iter().fold(ModularElement::IDENTITY, |g, i| {
            g.compose(&ModularElement::GENERATORS[i]).unwrap()
        })
    })
}

fn exact_point() -> impl Strategy<Value = UHPoint> {
    (-300i64..300, 1i64..400).prop_map(|(x, y)| UHPoint::ratio(x, 100, y, 100))
}

fn subgroup() -> impl Strategy<Value = SubgroupSpec> {
    prop_oneof![
        Just(SubgroupSpec::full()),
        Just(SubgroupSpec::principal(2).unwrap()),
        Just(SubgroupSpec::principal(3).unwrap()),
        Just(SubgroupSpec::gamma0(5).unwrap()),
        Just(SubgroupSpec::gamma1(4).unwrap()),
    ]
}

/// `g·αᵢ⁻¹` for the coset `Γαᵢ` of `g`, which lies in `Γ`.
fn member(spec: &SubgroupSpec, g: &ModularElement) -> ModularElement {
    g.compose(&spec.coset_representatives()[spec.coset_of(g)].inverse())
        .unwrap()
}

fn key(p: &UHPoint, q: &UHPoint) -> DistanceKey {
    cosh_distance(p, q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plane_distance_is_isometry_invariant(p in exact_point(), q in exact_point(), g in element()) {
        prop_assert_eq!(key(&g.apply(&p), &g.apply(&q)), key(&p, &q));
        prop_assert_eq!(key(&p, &q), key(&q, &p));
    }

    #[test]
    fn plane_triangle_inequality(p in exact_point(), q in exact_point(), r in exact_point()) {
        let (a, b, c) = (hyperbolic::distance(&p, &q), hyperbolic::distance(&q, &r), hyperbolic::distance(&p, &r));
        prop_assert!(c <= a + b + 1e-9 * (1.0 + c));
    }

    #[test]
    fn group_axioms(g in element(), h in element(), k in element()) {
        let left = g.compose(&h).unwrap().compose(&k).unwrap();
        let right = g.compose(&h.compose(&k).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert!(g.compose(&g.inverse()).unwrap().is_identity());
        prop_assert_eq!(g.compose(&ModularElement::IDENTITY).unwrap(), g);
    }

    #[test]
    fn action_is_compatible_with_composition(g in element(), h in element(), p in exact_point()) {
        prop_assert_eq!(g.compose(&h).unwrap().apply(&p), g.apply(&h.apply(&p)));
    }

    #[test]
    fn membership_is_closed(spec in subgroup(), g in element(), h in element()) {
        let (g, h) = (member(&spec, &g), member(&spec, &h));
        prop_assert!(spec.is_member(&g) && spec.is_member(&h));
        prop_assert!(spec.is_member(&g.compose(&h).unwrap()));
        prop_assert!(spec.is_member(&g.inverse()));
        prop_assert!(spec.is_member(&ModularElement::IDENTITY));
    }

    #[test]
    fn cosets_are_sound(spec in subgroup(), g in element()) {
        let reps = spec.coset_representatives();
        let i = spec.coset_of(&g);
        prop_assert!(spec.is_member(&g.compose(&reps[i].inverse()).unwrap()));
        for (j, r) in reps.iter().enumerate() {
            prop_assert_eq!(spec.is_member(&g.compose(&r.inverse()).unwrap()), i == j);
        }
    }

    #[test]
    fn reduction_is_idempotent_and_orbit_invariant(p in exact_point(), g in element()) {
        let (z, delta) = reduce_to_f(&p).unwrap();
        prop_assert!(is_reduced(&z));
        prop_assert_eq!(delta.apply(&p), z.clone());
        let (z2, d2) = reduce_to_f(&z).unwrap();
        prop_assert_eq!(&z2, &z);
        prop_assert!(d2.is_identity());
        prop_assert_eq!(reduce_to_f(&g.apply(&p)).unwrap().0, z);
    }

    #[test]
    fn pieces_are_subgroup_invariant(spec in subgroup(), p in exact_point(), g in element()) {
        let (z, piece, _) = reduce_to_subgroup_domain(&p, &spec).unwrap();
        let g = member(&spec, &g);
        let (z2, piece2, _) = reduce_to_subgroup_domain(&g.apply(&p), &spec).unwrap();
        prop_assert_eq!(z2, z.clone());
        prop_assert_eq!(piece2, piece);
        let (_, delta) = reduce_to_f(&p).unwrap();
        prop_assert_eq!(canonical_piece(&z, &delta, &spec).unwrap(), piece);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn surface_distance_is_a_pseudometric(
        spec in subgroup(), p in exact_point(), q in exact_point(), r in exact_point(), g in element()
    ) {
        let d = |a: &UHPoint, b: &UHPoint| surface_distance_oracle(a, b, &spec).unwrap();
        let pq = d(&p, &q);
        prop_assert_eq!(&pq, &d(&q, &p));
        prop_assert!(d(&p, &p).is_zero());
        let (a, b, c) = (pq.distance(), d(&q, &r).distance(), d(&p, &r).distance());
        prop_assert!(c <= a + b + 1e-9 * (1.0 + c));
        prop_assert!(pq <= key(&p, &q));
        prop_assert_eq!(d(&member(&spec, &g).apply(&p), &q), pq);
    }

    #[test]
    fn subgroup_distance_dominates_full(p in exact_point(), q in exact_point()) {
        let full = surface_distance_oracle(&p, &q, &SubgroupSpec::full()).unwrap();
        let g2 = surface_distance_oracle(&p, &q, &SubgroupSpec::principal(2).unwrap()).unwrap();
        let g4 = surface_distance_oracle(&p, &q, &SubgroupSpec::principal(4).unwrap()).unwrap();
        prop_assert!(full <= g2);
        prop_assert!(g2 <= g4);
    }

    #[test]
    fn ball_grows_and_filters(spec in subgroup(), p in exact_point(), q in exact_point(), h in 1.0f64..6.0) {
        let small = enumerate_ball(&BallQuery::new(spec.clone(), p.clone(), q.clone(), h)).unwrap();
        let large = enumerate_ball(&BallQuery::new(spec.clone(), p.clone(), q.clone(), 2.0 * h)).unwrap();
        prop_assert!(small.iter().all(|g| large.binary_search_by_key(&g.sort_key(), |x| x.sort_key()).is_ok()));
        let all = enumerate_ball(&BallQuery::new(SubgroupSpec::full(), p, q, h)).unwrap();
        let filtered: Vec<_> = all.into_iter().filter(|g| spec.is_member(g)).collect();
        prop_assert_eq!(small, filtered);
    }

    #[test]
    fn stats_satisfy_cauchy_schwarz(seed in any::<u64>(), n in 2usize..40) {
        let spec = SubgroupSpec::principal(2).unwrap();
        let pts = sample_points(&spec, n, &SamplerConfig::default(), seed).unwrap();
        let s = distance_stats(&pts, &spec).unwrap();
        let m = s.n as u64;
        prop_assert_eq!(s.ordered_pairs, m * m - m);
        prop_assert!(s.cauchy_schwarz_holds());
        prop_assert_eq!(s.n + s.duplicates, n);
    }
}

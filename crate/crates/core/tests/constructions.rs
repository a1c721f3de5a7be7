use progset::analysis::window_profile;
use progset::constructions::elim::ElimSchedule;
use progset::constructions::{
    bradford_set, countable_elim_set, density_monster, equidistribute_set, symmetric_cantor, ApKillChecker, CantorSpec,
    ConstructionManifest, DeltaSource, DensityTarget, GlueOptions, RationalOrder, SequenceSpec, Theorem13,
};
use progset::{Interval, IntervalSet, Rational};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::frac(n, d)
}

fn unit() -> Interval {
    Interval::closed(q(0, 1), q(1, 1)).unwrap()
}

#[test]
fn equidistribute_windows_are_exact() {
    let c = equidistribute_set(&q(1, 4)).unwrap();
    let grid: Vec<Rational> = (0..=64).map(|i| q(i, 8)).collect();
    for p in window_profile(&c, 12, &grid).unwrap() {
        assert_eq!(p.measure, q(3, 4), "t = {}", p.t);
    }
}

#[test]
fn elim_intervals_are_spread_and_cover_pairs() {
    let sched = ElimSchedule::new(DeltaSource::List(vec![q(1, 1), q(1, 2), q(2, 3)]), q(1, 5)).unwrap();
    let (_, generator) = countable_elim_set(sched).unwrap();
    let ivs: Vec<_> = (1..=64).map(|n| generator.get(n).unwrap()).collect();
    for w in ivs.windows(2) {
        assert!(w[1].lo > &w[0].hi + &q(1, 1));
    }
    for iv in &ivs {
        assert_eq!(&iv.hi - &iv.lo, q(1, 5));
        assert!(iv.anchor >= 1);
        // I_n sits on the shifted copy of J_j
        let half = q(1, 10);
        assert_eq!(&iv.lo - &(&iv.delta * &Rational::int(iv.anchor as i64)), &half * &Rational::int(iv.phi2 as i64 - 1));
    }
    for i in 1..=4 {
        for j in 1..=4 {
            assert!(ivs.iter().any(|iv| iv.phi1 == i && iv.phi2 == j), "pair ({i}, {j}) missing");
        }
    }
}

#[test]
fn bradford_window_and_kills() {
    let eps = q(1, 10);
    let deltas = RationalOrder::SternBrocot.prefix(20);
    let (c, b) = bradford_set(&eps, DeltaSource::List(deltas.clone())).unwrap();
    let grid: Vec<Rational> = (0..=160).map(|i| q(i, 8)).collect();
    for p in window_profile(&c, 30, &grid).unwrap() {
        assert!(p.measure >= q(9, 10), "t = {}: {}", p.t, p.measure);
    }
    // b = 0 is only caught once some kΔ lands in a later J_j, far out
    let checker = ApKillChecker::new(&b, &q(100_000, 1)).unwrap();
    for d in deltas.iter().take(5) {
        for i in 0..16 {
            let start = d * &q(i, 16);
            let hit = checker.first_hit(d, &start).unwrap_or_else(|| panic!("Δ = {d}, b = {start} survives"));
            assert!(hit.lo < hit.term && hit.term < hit.hi);
            assert_eq!(hit.term, &start + &(d * &Rational::int(hit.k as i64)));
        }
    }
}

#[test]
fn monster_total_measure_and_windows() {
    let (c, m) = density_monster(&q(1, 2), DensityTarget::Stepwise, 3, 1 << 12, 128).unwrap();
    let g = m.materialize().unwrap();
    assert!(g.measure().unwrap() <= q(1, 2));
    let (batches, _) = c.removed.take(2).unwrap();
    assert_eq!(batches, g);
    let floor = m.floor_scale().enclose(128).hi;
    for i in 1..20 {
        let p = q(i, 40);
        let t = q(1, 4).max(floor.clone());
        let w = m.check_window(&g, &p, &t, 128).unwrap();
        assert_ne!(w.holds, progset::Truth::No, "p = {p}");
    }
}

fn middle_a_measure(a: &Rational, k: u32) -> Rational {
    // 1 - a (1 - (2a)^k) / (1 - 2a)
    let x = a.mul_pow2(1);
    let one = Rational::one();
    &one - &(a * &(&one - &x.pow(k))).checked_div(&(&one - &x)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn cantor_levels(num in 1i64..32, k in 0usize..8) {
        let a = q(num, 100);
        let spec = CantorSpec::middle_a(a.clone()).unwrap();
        let (levels, c) = symmetric_cantor(&spec, k + 1).unwrap();
        prop_assert_eq!(levels[k].measure().unwrap(), middle_a_measure(&a, k as u32));
        prop_assert_eq!(levels[k].len(), 1 << k);
        prop_assert!(levels[k + 1].difference(&levels[k]).is_empty());
        prop_assert_eq!(levels[k].affine_map(&q(-1, 1), &q(1, 1)).unwrap(), levels[k].clone());
        if k > 0 {
            let (g, _) = c.removed.take(k as i64 - 1).unwrap();
            prop_assert_eq!(IntervalSet::from_interval(unit()).difference(&g), levels[k].clone());
        }
    }
}

#[test]
fn glued_construction_replays_from_certificates() {
    let t = Theorem13::build(1, &SequenceSpec::identity(), &GlueOptions::default()).unwrap();
    for c in &t.certificates {
        c.replay().unwrap();
    }
    let again = Theorem13::from_certificates(t.certificates.clone()).unwrap();
    assert_eq!(again.removed().unwrap(), t.removed().unwrap());
    let m = ConstructionManifest::build(&t.construction(), 1, vec![]).unwrap();
    let text = serde_json::to_string(&m).unwrap();
    assert_eq!(serde_json::from_str::<ConstructionManifest>(&text).unwrap(), m);
    assert!(m.complete_on.is_some());
}

#[test]
fn kept_on_refuses_incomplete_regions() {
    let m = ConstructionManifest::build(&equidistribute_set(&q(1, 2)).unwrap(), 4, vec![]).unwrap();
    assert_eq!(m.kept_on(&Interval::closed(q(0, 1), q(4, 1)).unwrap()).unwrap().measure().unwrap(), q(2, 1));
    assert!(m.kept_on(&Interval::closed(q(0, 1), q(5, 1)).unwrap()).is_err());
}

#[test]
fn bad_parameters() {
    assert!(equidistribute_set(&q(0, 1)).is_err());
    assert!(equidistribute_set(&q(1, 1)).is_err());
    assert!(CantorSpec::middle_a(q(1, 2)).is_err());
    let spec = CantorSpec::generic(vec![q(1, 2), q(1, 2)], None, None).unwrap();
    assert!(spec.validate(2).is_err());
}

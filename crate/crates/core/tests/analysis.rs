use progset::analysis::quadrature::{adaptive_simpson, root_density};
use progset::analysis::series::{cantor_ratio_bound, lemma42_conditions, prop31_term};
use progset::analysis::{
    cor44_check, default_nus, density_profile, lemma26_chain, lemma26_chain_stream, prop31_series,
    window_fractions, Cor44Verdict,
};
use progset::constructions::{equidistribute_set, symmetric_cantor, CantorSpec};
use progset::transforms::EnclosedSet;
use progset::{Interval, IntervalSet, Label, Rational, Truth};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::frac(n, d)
}

fn f64_of(r: &Rational) -> f64 {
    let s = r.to_decimal(30);
    s.parse().unwrap()
}

fn open(a: Rational, b: Rational) -> IntervalSet {
    IntervalSet::from_interval(Interval::open(a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn prop31_closed_form_matches_quadrature(u in 1i64..900, w in 1i64..100, n in 1u32..12) {
        let (a, b) = (q(u, 1000), q(u + w, 1000));
        let term = prop31_term(&open(a.clone(), b.clone()), &q(1, 1), n, 128).unwrap();
        let num = adaptive_simpson(root_density(n), f64_of(&a), f64_of(&b), 1e-13);
        let (lo, hi) = (f64_of(&term.lo), f64_of(&term.hi));
        prop_assert!(lo - 1e-9 <= num && num <= hi + 1e-9, "[{}, {}] vs {}", lo, hi, num);
    }

    #[test]
    fn lemma26_on_random_removed(parts in prop::collection::vec((0i64..40, 1i64..6), 0..6), mu in 0i64..8, k in 1u32..6) {
        let g = IntervalSet::normalize(parts.iter().map(|&(a, w)| Interval::open(q(a, 4), q(a + w, 4)).unwrap()).collect());
        let r = lemma26_chain(&g, &q(mu, 1), k, 96, 1024).unwrap();
        prop_assert_eq!(r.holds_middle, Truth::Yes);
        prop_assert_eq!(r.holds_corrected, Truth::Yes);
        prop_assert!(r.rhs_middle.hi <= r.rhs_corrected.hi);
    }
}

#[test]
fn prop31_clips_to_shrinking_windows() {
    // S = (1/2, 1), r0 = 1: term n is 1 - (1/2)^{1/n}
    let rows = prop31_series(&open(q(1, 2), q(1, 1)), &q(1, 1), 5, 128).unwrap();
    for r in &rows {
        let exact = 1.0 - 0.5f64.powf(1.0 / r.n as f64);
        assert!(f64_of(&r.term.lo) <= exact + 1e-15 && exact - 1e-15 <= f64_of(&r.term.hi));
    }
    // with r0 = 1/2 every window [0, 2^-n] misses S
    let rows = prop31_series(&open(q(1, 2), q(1, 1)), &q(1, 2), 5, 128).unwrap();
    assert!(rows.iter().all(|r| r.term.hi.is_zero()));
    assert!(prop31_series(&IntervalSet::empty(), &q(3, 2), 3, 64).is_err());
}

#[test]
fn cor44_verdicts() {
    let r = cor44_check(&CantorSpec::middle_a(q(1, 4)).unwrap()).unwrap();
    assert_eq!((r.mass, r.weighted), (Some(q(1, 2)), Some(q(1, 2))));
    assert_eq!(r.verdict, Cor44Verdict::Pass);
    assert_eq!(r.label, Label::ProvedExact);
    let r = cor44_check(&CantorSpec::middle_a(q(1, 3)).unwrap()).unwrap();
    assert_eq!(r.mass, Some(q(1, 1)));
    assert_eq!(r.verdict, Cor44Verdict::Fail);
    // listed lengths alone cannot decide
    let r = cor44_check(&CantorSpec::generic(vec![q(1, 8), q(1, 32)], None, None).unwrap()).unwrap();
    assert_eq!(r.verdict, Cor44Verdict::Inconclusive);
    let r = cor44_check(&CantorSpec::generic(vec![q(1, 8), q(1, 32)], Some(q(1, 16)), Some(q(1, 4))).unwrap()).unwrap();
    assert_eq!(r.verdict, Cor44Verdict::Pass);
    assert_eq!(r.label, Label::CertifiedWithTail);
}

#[test]
fn cantor_ratios_below_their_bound() {
    let spec = CantorSpec::middle_a(q(1, 4)).unwrap();
    let (levels, c) = symmetric_cantor(&spec, 9).unwrap();
    let (g, _) = c.removed.take(8).unwrap();
    let r = lemma42_conditions(&g, 96).unwrap();
    assert_eq!(r.count, 511);
    let m = levels[9].measure().unwrap();
    assert!(r.sum_ratio <= cantor_ratio_bound(&spec, 9, &m).unwrap());
    assert_ne!(r.stepping_stone, Truth::No);
}

#[test]
fn density_examples() {
    let full = EnclosedSet::exact(open(q(-1, 1), q(1, 1)));
    let d = density_profile(&full, &[q(1, 2)], &q(0, 1), false).unwrap();
    assert_eq!((d[0].lower.clone(), d[0].upper.clone()), (q(1, 1), q(1, 1)));
    let holed = EnclosedSet::exact(open(q(0, 1), q(1, 1)).difference(&open(q(1, 4), q(1, 2))));
    let d = density_profile(&holed, &[q(1, 2)], &q(0, 1), true).unwrap();
    assert_eq!(d[0].lower, q(1, 2));
    assert!(density_profile(&holed, &[q(0, 1)], &q(0, 1), true).is_err());
}

#[test]
fn lemma26_on_equidistribute_removed() {
    let c = equidistribute_set(&q(1, 4)).unwrap();
    let r = lemma26_chain_stream(&c, 12, &q(0, 1), 5, 128, 1024).unwrap();
    assert_eq!(r.holds_literal, Truth::Yes);
    assert_eq!(r.holds_middle, Truth::Yes);
}

#[test]
fn window_fractions_of_periodic_set() {
    let c = equidistribute_set(&q(1, 4)).unwrap();
    let (g, _) = c.removed.take(20).unwrap();
    let mus: Vec<Rational> = (0..8).map(|i| q(i, 1)).collect();
    for f in window_fractions(&g, &mus, &default_nus()).unwrap() {
        if f.nu >= q(1, 1) {
            assert_eq!(f.removed_fraction, q(1, 4));
        }
    }
}

use progset::sets::directed::{escalate, exp, exp_neg, log, neg_log, root};
use progset::transforms::{exp_neg_image, gp_to_ap, neg_log_image};
use progset::{Bracket, Error, Interval, IntervalSet, Rational, Truth};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::frac(n, d)
}

fn f64_of(r: &Rational) -> f64 {
    r.to_string().split_once('/').map(|(n, d)| n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap()).unwrap()
}

/// The f64 value, allowing for its own rounding, lies in the bracket.
fn near(b: &Bracket, v: f64) -> bool {
    let slack = 1e-12 * v.abs().max(1.0);
    f64_of(&b.lo) <= v + slack && v - slack <= f64_of(&b.hi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exp_log_agree_with_floats(n in -4000i64..4000, d in 1i64..500) {
        let x = q(n, d);
        let e = exp(&x, 96);
        prop_assert!(e.lo <= e.hi && e.lo.is_positive());
        if (n / d).abs() < 600 {
            prop_assert!(near(&e, (n as f64 / d as f64).exp()));
        }
        if n > 0 {
            let l = log(&x, 96).unwrap();
            prop_assert!(near(&l, (n as f64 / d as f64).ln()));
            prop_assert_eq!(neg_log(&x, 96).unwrap(), l.neg());
        }
    }

    #[test]
    fn log_inverts_exp(n in -300i64..300, d in 1i64..50) {
        let x = q(n, d);
        let e = exp(&x, 128);
        prop_assert!(log(&e.lo, 128).unwrap().lo <= x);
        prop_assert!(x <= log(&e.hi, 128).unwrap().hi);
    }

    #[test]
    fn roots_of_exact_powers(n in 1i64..200, d in 1i64..200, k in 1u32..8) {
        let x = q(n, d);
        let r = root(&x.pow(k), k, 128).unwrap();
        prop_assert!(r.contains(&x), "{:?} misses {}", r, x);
    }

    #[test]
    fn brackets_tighten_with_precision(n in 1i64..1000, d in 1i64..100) {
        let x = q(n, d);
        let lo = exp_neg(&x, 64);
        let hi = exp_neg(&x, 256);
        prop_assert!(lo.lo <= hi.lo && hi.hi <= lo.hi);
        prop_assert!(hi.width() <= lo.width());
    }

    #[test]
    fn exp_is_additive(a in -50i64..50, b in -50i64..50, d in 1i64..20) {
        let (x, y) = (q(a, d), q(b, d));
        let prod = exp(&x, 128).mul(&exp(&y, 128));
        prop_assert!(prod.overlaps(&exp(&(&x + &y), 128)));
    }

    #[test]
    fn image_enclosures_nest(parts in prop::collection::vec((1i64..200, 1i64..40), 1..5)) {
        // inside (0, 1), so that the image lies in [0, inf)
        let s = IntervalSet::normalize(parts.iter().map(|&(a, w)| Interval::open(q(a, 256), q(a + w, 256)).unwrap()).collect());
        let img = neg_log_image(&s, 96).unwrap();
        prop_assert!(img.is_consistent());
        prop_assert!(img.inner.difference(&img.outer).is_empty());
        for p in s.parts() {
            let (u, v) = p.bounds().unwrap();
            let mid = (u + v) * q(1, 2);
            let l = neg_log(&mid, 96).unwrap();
            prop_assert!(img.outer.contains(&l.lo) && img.outer.contains(&l.hi));
        }
        // back through exp(-x): the outer image of the outer image covers the start
        let back = exp_neg_image(&img.outer, 96).unwrap();
        prop_assert!(s.difference(&back.outer).is_empty());
    }
}

#[test]
fn geometric_term_inside_its_bracket() {
    // 2 * (1/3)^3 = 2/27
    let (delta, x0) = gp_to_ap(&q(1, 3), &q(2, 1), 128).unwrap();
    let s = x0.add(&delta.mul_rational(&q(3, 1)));
    let back = Bracket::new(exp_neg(&s.hi, 128).lo, exp_neg(&s.lo, 128).hi);
    assert!(back.contains(&q(2, 27)));
    assert!(back.width() < q(1, 1 << 30));
}

#[test]
fn comparisons_are_three_valued() {
    let b = Bracket::new(q(1, 3), q(1, 2));
    assert_eq!(b.lt(&q(1, 1)), Truth::Yes);
    assert_eq!(b.lt(&q(1, 4)), Truth::No);
    assert_eq!(b.lt(&q(2, 5)), Truth::Unknown);
    assert_eq!(b.ge(&q(1, 3)), Truth::Yes);
}

#[test]
fn escalation_stops_at_cap() {
    let mut seen = Vec::new();
    let r: Result<(), Error> = escalate(16, 128, "never resolves", |b| {
        seen.push(b);
        Ok(None)
    });
    assert!(matches!(r, Err(Error::Inconclusive { cap: 128, .. })));
    assert_eq!(seen, vec![16, 32, 64, 128]);
}

#[test]
fn log_domain() {
    assert!(log(&q(0, 1), 64).is_err());
    assert!(log(&q(-1, 2), 64).is_err());
    assert!(neg_log_image(&IntervalSet::from_interval(Interval::open(q(0, 1), q(1, 1)).unwrap()), 64).is_err());
}

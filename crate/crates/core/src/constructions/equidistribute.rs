use serde_json::json;

use super::Construction;
use crate::error::{Error, Result};
use crate::sets::{Endpoint, Interval, IntervalSet, LazyIntervalStream, Rational, TailBound};

/// Kept set `∪_{n>=0} [n, n+1-ε]`; the removed stream holds the blocks
/// `(n+1-ε, n+1)`, one per depth.
pub fn equidistribute_set(epsilon: &Rational) -> Result<Construction> {
    if !epsilon.is_positive() || *epsilon >= Rational::one() {
        return Err(Error::param("epsilon", format!("must lie in (0, 1), got {epsilon}")));
    }
    let eps = epsilon.clone();
    let removed = LazyIntervalStream::new(
        move |d| {
            let right = Rational::int(d + 1);
            Ok(IntervalSet::from_interval(Interval::open(&right - &eps, right)?))
        },
        |_| Ok(TailBound::Unbounded),
    )
    .with_frontier(|d| Interval::new(Endpoint::NegInf, Rational::int(d + 1).into(), false, true).ok());
    Ok(Construction {
        kind: "equidistribute".into(),
        params: json!({ "epsilon": epsilon }),
        domain: Interval::closed_ray(Rational::zero()),
        removed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn kept_measure_on_three_windows() {
        let c = equidistribute_set(&q(1, 4)).unwrap();
        let kept = c.kept_on(&Interval::closed(q(0, 1), q(3, 1)).unwrap(), 3).unwrap();
        assert_eq!(kept.measure().unwrap(), q(9, 4));
        let w = c.kept_on(&Interval::closed(q(1, 3), q(4, 3)).unwrap(), 3).unwrap();
        assert_eq!(w.measure().unwrap(), q(3, 4));
        assert!(!kept.contains(&q(7, 8)));
    }

    #[test]
    fn rejects_bad_epsilon() {
        assert!(equidistribute_set(&q(0, 1)).is_err());
        assert!(equidistribute_set(&q(1, 1)).is_err());
    }

    #[test]
    fn horizon_shortfall() {
        let c = equidistribute_set(&q(1, 4)).unwrap();
        assert!(matches!(
            c.kept_on(&Interval::closed(q(0, 1), q(5, 1)).unwrap(), 2),
            Err(Error::HorizonShortfall(_))
        ));
    }
}

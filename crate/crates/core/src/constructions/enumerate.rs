//! Enumerations of the positive rationals.

use num_integer::{Integer, Roots};
use serde::{Deserialize, Serialize};

use crate::sets::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RationalOrder {
    /// Breadth-first order of the Stern–Brocot tree: 1, 1/2, 2, 1/3, 2/3, 3/2, 3, ...
    #[default]
    SternBrocot,
    /// By height `max(p, q)`, then by value: 1, 1/2, 2, 1/3, 2/3, 3/2, 3, 1/4, ...
    Height,
}

impl RationalOrder {
    pub fn prefix(self, count: usize) -> Vec<Rational> {
        match self {
            RationalOrder::SternBrocot => stern_brocot_prefix(count),
            RationalOrder::Height => height_prefix(count),
        }
    }
}

pub fn stern_brocot_prefix(count: usize) -> Vec<Rational> {
    // Current row of the tree including the sentinels 0/1 and 1/0.
    let mut row: Vec<(u64, u64)> = vec![(0, 1), (1, 0)];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut next = Vec::with_capacity(row.len() * 2);
        for w in row.windows(2) {
            let (a, b) = (w[0], w[1]);
            next.push(a);
            let m = (a.0 + b.0, a.1 + b.1);
            next.push(m);
            if out.len() < count {
                out.push(Rational::new(m.0, m.1).expect("positive denominator"));
            }
        }
        next.push(*row.last().unwrap());
        row = next;
    }
    out
}

pub fn height_prefix(count: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(count);
    let mut h: u64 = 1;
    while out.len() < count {
        let mut level: Vec<Rational> = Vec::new();
        for other in 1..=h {
            if other.gcd(&h) != 1 {
                continue;
            }
            level.push(Rational::new(other, h).unwrap());
            if other != h {
                level.push(Rational::new(h, other).unwrap());
            }
        }
        level.sort();
        out.extend(level.into_iter().take(count - out.len()));
        h += 1;
    }
    out
}

/// Bijection between positive integers and pairs of positive integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// `(i, j) -> s(s+1)/2 + j` with `s = i + j - 2`.
    #[default]
    Cantor,
}

impl Pairing {
    pub fn pair(self, i: u64, j: u64) -> u64 {
        assert!(i >= 1 && j >= 1, "pairing is defined on positive integers");
        match self {
            Pairing::Cantor => {
                let s = i + j - 2;
                s * (s + 1) / 2 + j
            }
        }
    }

    pub fn unpair(self, n: u64) -> (u64, u64) {
        assert!(n >= 1, "pairing is defined on positive integers");
        match self {
            Pairing::Cantor => {
                // Largest s with s(s+1)/2 < n.
                let m = n - 1;
                let mut s = ((8 * m + 1).sqrt() - 1) / 2;
                while s * (s + 1) / 2 > m {
                    s -= 1;
                }
                while (s + 1) * (s + 2) / 2 <= m {
                    s += 1;
                }
                let j = n - s * (s + 1) / 2;
                let i = s + 2 - j;
                (i, j)
            }
        }
    }

    /// Checks that every `(i, j)` with `i, j <= d` appears among the first
    /// `(2d)^2` indices.
    pub fn covers_prefix(self, d: u64) -> bool {
        let limit = (2 * d) * (2 * d);
        let mut seen = vec![false; (d * d) as usize];
        for n in 1..=limit {
            let (i, j) = self.unpair(n);
            if i <= d && j <= d {
                seen[((i - 1) * d + (j - 1)) as usize] = true;
            }
        }
        seen.into_iter().all(|b| b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn stern_brocot_start() {
        let p = stern_brocot_prefix(7);
        assert_eq!(p, vec![q(1, 1), q(1, 2), q(2, 1), q(1, 3), q(2, 3), q(3, 2), q(3, 1)]);
        assert_eq!(stern_brocot_prefix(20).len(), 20);
    }

    #[test]
    fn height_start() {
        let p = height_prefix(8);
        assert_eq!(p, vec![q(1, 1), q(1, 2), q(2, 1), q(1, 3), q(2, 3), q(3, 2), q(3, 1), q(1, 4)]);
    }

    #[test]
    fn prefixes_have_no_duplicates() {
        for order in [RationalOrder::SternBrocot, RationalOrder::Height] {
            let mut p = order.prefix(500);
            p.sort();
            p.dedup();
            assert_eq!(p.len(), 500);
        }
    }

    #[test]
    fn cantor_pairing_round_trip() {
        let p = Pairing::Cantor;
        assert_eq!(p.unpair(1), (1, 1));
        assert_eq!(p.unpair(2), (2, 1));
        assert_eq!(p.unpair(3), (1, 2));
        for n in 1..5000 {
            let (i, j) = p.unpair(n);
            assert_eq!(p.pair(i, j), n);
        }
        assert!(p.covers_prefix(12));
    }
}

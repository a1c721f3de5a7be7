//! Deterministic real sequences `a_1, a_2, ...` given by a small closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceSpec {
    /// `a_n = start + step (n - 1)`.
    Linear { start: Rational, step: Rational },
    /// `a_n = scale * ratio^n`.
    Geometric { scale: Rational, ratio: Rational },
    /// `a_n = scale * n^exponent`.
    Power { scale: Rational, exponent: u32 },
    /// `a_n = values[n - 1]`.
    Explicit { values: Vec<Rational> },
}

#[allow(clippy::len_without_is_empty)]
impl SequenceSpec {
    /// `a_n = n`.
    pub fn identity() -> Self {
        SequenceSpec::Linear { start: Rational::one(), step: Rational::one() }
    }

    pub fn term(&self, n: u64) -> Result<Rational> {
        if n == 0 {
            return Err(Error::param("n", "sequences are indexed from 1"));
        }
        Ok(match self {
            SequenceSpec::Linear { start, step } => start + step * Rational::int(n - 1),
            SequenceSpec::Geometric { scale, ratio } => {
                let e = u32::try_from(n).map_err(|_| Error::param("n", "index too large for a geometric term"))?;
                scale * &ratio.pow(e)
            }
            SequenceSpec::Power { scale, exponent } => scale * &Rational::int(n).pow(*exponent),
            SequenceSpec::Explicit { values } => values
                .get((n - 1) as usize)
                .cloned()
                .ok_or_else(|| Error::param("n", format!("explicit sequence has only {} terms", values.len())))?,
        })
    }

    /// Number of available terms, `None` when unlimited.
    pub fn len(&self) -> Option<u64> {
        match self {
            SequenceSpec::Explicit { values } => Some(values.len() as u64),
            _ => None,
        }
    }
}

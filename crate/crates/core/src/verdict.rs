use std::fmt;

use serde::{Deserialize, Serialize};

/// How much a verdict about an infinitary statement actually establishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    /// Decided by exact arithmetic or a closed form; nothing is left out.
    ProvedExact,
    /// Finite computation plus a rigorous bound on everything not computed.
    CertifiedWithTail,
    /// Finite-prefix data only; suggestive, not a proof.
    EvidenceOnly,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::ProvedExact => "proved-exact",
            Label::CertifiedWithTail => "certified-with-tail",
            Label::EvidenceOnly => "evidence-only",
        })
    }
}

//! Outcome type shared by every verification entry point.

use crate::polyring::Polynomial;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Failed,
    /// The check ran out of its search budget without deciding either way.
    Indeterminate,
}

/// Result of checking one claim at one size, with enough material to audit
/// the outcome: quotients or residuals as polynomials, exponent lists where
/// the claim is about a factorization, and a free-form note.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    pub n: usize,
    pub status: Status,
    /// Witness polynomials: quotients for divisibility claims, residuals for
    /// failed identities, empty when the bare status tells the whole story.
    pub witness: Vec<Polynomial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<(usize, u32)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub timing_ms: u64,
}

impl VerificationReport {
    pub fn new(claim: impl Into<String>, n: usize, status: Status) -> VerificationReport {
        VerificationReport {
            claim: claim.into(),
            n,
            status,
            witness: Vec::new(),
            exponents: None,
            note: None,
            timing_ms: 0,
        }
    }

    pub fn with_witness(mut self, witness: Vec<Polynomial>) -> VerificationReport {
        self.witness = witness;
        self
    }

    pub fn with_exponents(mut self, exponents: Vec<(usize, u32)>) -> VerificationReport {
        self.exponents = Some(exponents);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> VerificationReport {
        self.note = Some(note.into());
        self
    }

    pub fn is_verified(&self) -> bool {
        self.status == Status::Verified
    }
}

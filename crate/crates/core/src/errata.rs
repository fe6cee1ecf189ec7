//! Records of printed closed forms that fail a structural identity, kept
//! next to the corrected value that the verifier actually checks against.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Erratum {
    pub claim: String,
    /// Printed values keyed by character or weight (as decimal strings).
    pub printed: BTreeMap<String, i64>,
    pub corrected: BTreeMap<String, i64>,
    pub failed_checks: Vec<String>,
}

/// `base^e` for `e ≥ 0`.
pub fn pow_i(base: i128, e: i64) -> i128 {
    assert!(e >= 0, "negative exponent {e}");
    base.pow(e as u32)
}

//! `𝔎(n)`: the least `k` for which the length-`kn` prefix is not a
//! k-antipower.

use serde::{Deserialize, Serialize};

use crate::antipower;
use crate::error::{Error, Result};

/// Default number of block ordinals a [`kappa`] search visits before giving up.
pub const DEFAULT_CAP: u64 = 1 << 24;

/// `𝔎(n)` together with the repeated pair `(c, c')`, `c' = kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaRecord {
    pub n: u64,
    pub kappa: u64,
    pub witness: (u64, u64),
}

/// `1 + 2^(1 + ⌊log2(n/3)⌋)` for odd `n ≥ 3`; 3 for `n = 1`.
pub fn lower_bound(n: u64) -> Result<u64> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenBlockLength(n));
    }
    if n == 1 {
        return Ok(3);
    }
    // Largest e with 3·2^e ≤ n.
    let mut e = 0u32;
    while e < 62 && 3u64 << (e + 1) <= n {
        e += 1;
    }
    Ok(1 + (1u64 << (e + 1)))
}

/// Computes `𝔎(n)` for odd `n`, scanning at most `cap` blocks
/// ([`DEFAULT_CAP`] when `None`).
pub fn kappa(n: u64, cap: Option<u64>) -> Result<KappaRecord> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenBlockLength(n));
    }
    let cap = cap.unwrap_or(DEFAULT_CAP);
    match antipower::first_repeat(n, cap, true)? {
        Some((c, later)) => Ok(KappaRecord {
            n,
            kappa: later,
            witness: (c, later),
        }),
        None => Err(Error::CapExceeded {
            n,
            cap,
            scanned: cap,
        }),
    }
}

/// `Some(record)` if `𝔎(n) ≤ bound`, `None` if the first `bound` blocks are
/// pairwise distinct.
pub fn kappa_within(n: u64, bound: u64) -> Result<Option<KappaRecord>> {
    match kappa(n, Some(bound)) {
        Ok(record) => Ok(Some(record)),
        Err(Error::CapExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

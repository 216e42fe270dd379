//! `γ(k)` and `Γ(k)`, and the finite set of odd `n` outside `F(k)`.
//!
//! Since `𝔎(n) ≥ lower_bound(n)` and the lower bound is nondecreasing, every
//! odd `n` at or above the smallest odd `N` with `lower_bound(N) > k` lies in
//! `F(k)`. Scanning the odd `n < N` therefore enumerates the whole complement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kappa;
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalRecord {
    pub k: u64,
    pub gamma: u64,
    /// Absent when every odd `n` is in `F(k)`.
    pub big_gamma: Option<u64>,
    /// Odd `n` whose length-`kn` prefix is not a k-antipower, ascending.
    pub complement: Vec<u64>,
    /// Every odd `n ≥ cap_used` has `lower_bound(n) > k`.
    pub cap_used: u64,
}

/// Smallest odd `N` with `lower_bound(N) > k`.
pub fn certified_cap(k: u64) -> u64 {
    if k <= 2 {
        return 1;
    }
    // lower_bound(N) = 1 + 2^(e+1) with e the largest exponent having
    // 3·2^e ≤ N; it exceeds k once e + 1 ≥ ⌈log2 k⌉.
    let ceil_log2 = 64 - (k - 1).leading_zeros();
    3 * (1u64 << (ceil_log2 - 1)) + 1
}

fn check_k(k: u64) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    // Keeps 3·2^⌈log2 k⌉ and the prefix lengths k·n well inside u64.
    if k > 1 << 40 {
        return Err(Error::ResourceLimit {
            what: "k",
            requested: k,
            limit: 1 << 40,
        });
    }
    Ok(())
}

/// `𝔎(n)` for every odd `n < below`, with values above `bound` collapsed to
/// `None`. Enough to decide `n ∈ F(k)` for all `k ≤ bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaTable {
    bound: u64,
    values: Vec<Option<u64>>,
}

impl KappaTable {
    pub fn build(below: u64, bound: u64) -> Result<Self> {
        let odds: Vec<u64> = (1..below).step_by(2).collect();
        let values = par::try_map(&odds, |&n| {
            kappa::kappa_within(n, bound).map(|r| r.map(|r| r.kappa))
        })?;
        Ok(KappaTable { bound, values })
    }

    /// Exclusive upper end of the odd `n` covered.
    pub fn covers_below(&self) -> u64 {
        2 * self.values.len() as u64 + 1
    }

    /// `𝔎(n)` if it is at most the table bound.
    pub fn get(&self, n: u64) -> Option<u64> {
        self.values.get((n / 2) as usize).copied().flatten()
    }

    /// The record for `k`. Requires `k ≤ bound` and the table to reach
    /// `certified_cap(k)`.
    pub fn record(&self, k: u64) -> Result<ExtremalRecord> {
        check_k(k)?;
        let cap_used = certified_cap(k);
        if k > self.bound || cap_used > self.covers_below() {
            return Err(Error::InvalidArgument(format!(
                "kappa table (bound {}, n < {}) does not cover k = {k}",
                self.bound,
                self.covers_below()
            )));
        }
        let in_complement = |n: u64| self.get(n).is_some_and(|v| v <= k);
        let complement: Vec<u64> = (1..cap_used)
            .step_by(2)
            .filter(|&n| in_complement(n))
            .collect();
        let gamma = (1..cap_used)
            .step_by(2)
            .find(|&n| !in_complement(n))
            .unwrap_or(cap_used);
        Ok(ExtremalRecord {
            k,
            gamma,
            big_gamma: complement.last().copied(),
            complement,
            cap_used,
        })
    }
}

/// Full record for one `k`.
pub fn extremal(k: u64) -> Result<ExtremalRecord> {
    check_k(k)?;
    KappaTable::build(certified_cap(k), k)?.record(k)
}

/// Least odd `n` whose length-`kn` prefix is a k-antipower.
pub fn gamma(k: u64) -> Result<u64> {
    extremal(k).map(|r| r.gamma)
}

/// Greatest odd `n` whose length-`kn` prefix is not a k-antipower.
pub fn big_gamma(k: u64) -> Result<Option<u64>> {
    extremal(k).map(|r| r.big_gamma)
}

pub fn complement_set(k: u64) -> Result<Vec<u64>> {
    extremal(k).map(|r| r.complement)
}

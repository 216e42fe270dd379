//! Blocks of the Thue-Morse word and k-antipower tests.
//!
//! Block ordinals are 1-indexed: block `c` of length `n` is
//! `t_{(c-1)n} .. t_{cn-1}`.
//!
//! Two facts about odd block lengths drive the prefix search:
//!
//! * Blocks `c+1` and `c+1+2^i` are equal iff `x ≡_t x+n` for every `x` in
//!   `[⌊cn/2^i⌋, ⌊((c+1)n-1)/2^i⌋]`, a range of about `n/2^i + 1` indices
//!   ([`blocks_equal_shift`]).
//! * If `3·2^(i-1) < n`, equal blocks have ordinals congruent mod `2^i`
//!   ([`pruning_exponent`]).
//!
//! With `p` the pruning exponent, every candidate pair with second ordinal at
//! most `3·2^p` differs by `2^p` or `2^(p+1)`, so the search settles those with
//! a handful of letter comparisons each. Past that point it falls back to
//! fingerprinting whole blocks within each residue class.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thue_morse::{self, read_packed, FiniteWord};

/// Most block ordinals a single prefix scan will visit.
pub const MAX_SCAN_BLOCKS: u64 = 1 << 32;

/// The `ordinal`-th block of length `len` of the Thue-Morse word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockRef {
    len: u64,
    ordinal: u64,
}

impl BlockRef {
    /// `len` must be odd and `ordinal` at least 1.
    pub fn new(len: u64, ordinal: u64) -> Result<Self> {
        if len.is_multiple_of(2) {
            return Err(Error::EvenBlockLength(len));
        }
        if ordinal == 0 {
            return Err(Error::ZeroOrdinal);
        }
        (ordinal - 1)
            .checked_mul(len)
            .and_then(|s| s.checked_add(len - 1))
            .ok_or(Error::IndexOverflow {
                context: "block end",
            })?;
        Ok(BlockRef { len, ordinal })
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn ordinal(&self) -> u64 {
        self.ordinal
    }

    /// Index of the first letter.
    pub fn start(&self) -> u64 {
        (self.ordinal - 1) * self.len
    }

    pub fn word(&self) -> Result<FiniteWord> {
        thue_morse::factor(self.start(), self.len)
    }
}

/// Compares blocks `c+1` and `c+1+2^exponent` of odd length `len` through the
/// shift criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftQuery {
    pub len: u64,
    pub c: u64,
    pub exponent: u32,
}

impl ShiftQuery {
    /// The two block ordinals the query compares.
    pub fn ordinals(&self) -> (u64, u64) {
        (self.c + 1, self.c + 1 + (1u64 << self.exponent))
    }
}

/// Outcome of a k-antipower test. `witness` is the first repeated pair
/// `(c, c')`, `c < c'`, ordered by `c'` and then by `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntipowerVerdict {
    pub is_antipower: bool,
    pub witness: Option<(u64, u64)>,
}

impl AntipowerVerdict {
    pub fn from_witness(witness: Option<(u64, u64)>) -> Self {
        AntipowerVerdict {
            is_antipower: witness.is_none(),
            witness,
        }
    }
}

/// Whether `word` splits into `k` pairwise distinct blocks.
pub fn is_antipower_word(word: &FiniteWord, k: u64) -> Result<AntipowerVerdict> {
    if k == 0 || !word.len().is_multiple_of(k) {
        return Err(Error::NotDivisible { len: word.len(), k });
    }
    let n = word.len() / k;
    let mut first_seen: HashMap<FiniteWord, u64> = HashMap::new();
    for c in 1..=k {
        let block = word.subword((c - 1) * n, n).expect("block inside word");
        if let Some(&earlier) = first_seen.get(&block) {
            return Ok(AntipowerVerdict::from_witness(Some((earlier, c))));
        }
        first_seen.insert(block, c);
    }
    Ok(AntipowerVerdict::from_witness(None))
}

/// Letter-by-letter comparison of two blocks of the infinite word.
pub fn blocks_equal_direct(a: BlockRef, b: BlockRef) -> Result<bool> {
    if a.len != b.len {
        return Err(Error::MismatchedBlockLength {
            left: a.len,
            right: b.len,
        });
    }
    let (mut left, mut right) = (Vec::new(), Vec::new());
    read_packed(a.start(), a.len, &mut left);
    read_packed(b.start(), b.len, &mut right);
    Ok(left == right)
}

fn shift_range(len: u64, c: u64, exponent: u32) -> Result<(u64, u64)> {
    let n = len as u128;
    let c = c as u128;
    let lo = (c * n) >> exponent;
    let hi = ((c + 1) * n - 1) >> exponent;
    // The right-hand index x + n must also stay addressable.
    if hi + n > u64::MAX as u128 {
        return Err(Error::IndexOverflow {
            context: "shift criterion range",
        });
    }
    Ok((lo as u64, hi as u64))
}

#[inline]
fn shift_holds(len: u64, c: u64, exponent: u32) -> Result<bool> {
    let (lo, hi) = shift_range(len, c, exponent)?;
    Ok((lo..=hi).all(|x| thue_morse::equivalent(x, x + len)))
}

/// Evaluates the shift criterion for blocks `c+1` and `c+1+2^i`.
pub fn blocks_equal_shift(query: ShiftQuery) -> Result<bool> {
    if query.len.is_multiple_of(2) {
        return Err(Error::EvenBlockLength(query.len));
    }
    if query.exponent >= 63 {
        return Err(Error::IndexOverflow {
            context: "ordinal shift 2^i",
        });
    }
    let (_, later) = query.ordinals();
    BlockRef::new(query.len, later)?;
    shift_holds(query.len, query.c, query.exponent)
}

/// Largest `i` with `3·2^(i-1) < n`, or 0 when there is none.
pub fn pruning_exponent(n: u64) -> u32 {
    let mut i = 0u32;
    while i < 62 && 3u64 << i < n {
        i += 1;
    }
    i
}

/// Checks the congruence `a.c ≡ b.c (mod 2^i)`, `i = pruning_exponent(n)`,
/// that equal blocks must satisfy. Unequal blocks satisfy it vacuously.
pub fn matching_pair_congruence_check(a: BlockRef, b: BlockRef) -> Result<bool> {
    if !blocks_equal_direct(a, b)? {
        return Ok(true);
    }
    let modulus = 1u64 << pruning_exponent(a.len);
    Ok(a.ordinal % modulus == b.ordinal % modulus)
}

fn check_scan(n: u64, limit: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "block length must be positive".into(),
        ));
    }
    if limit > MAX_SCAN_BLOCKS {
        return Err(Error::ResourceLimit {
            what: "blocks",
            requested: limit,
            limit: MAX_SCAN_BLOCKS,
        });
    }
    limit.checked_mul(n).ok_or(Error::IndexOverflow {
        context: "prefix length k·n",
    })?;
    Ok(())
}

fn fingerprint(words: &[u64]) -> u64 {
    const SEED: u64 = 0x517c_c1b7_2722_0a95;
    let mut h = words.len() as u64;
    for &w in words {
        h = (h.rotate_left(5) ^ w).wrapping_mul(SEED);
    }
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    h ^ (h >> 33)
}

/// Scans blocks `1..=limit` of length `n` and returns the first repeated pair
/// `(c, c')`, smallest `c'` first.
///
/// With `pruned` set (odd `n` only) candidates are restricted to the residue
/// class of `c'` modulo `2^pruning_exponent(n)`.
pub(crate) fn first_repeat(n: u64, limit: u64, pruned: bool) -> Result<Option<(u64, u64)>> {
    check_scan(n, limit)?;
    debug_assert!(!pruned || n % 2 == 1);
    let exponent = if pruned { pruning_exponent(n) } else { 0 };
    let step = 1u64 << exponent;

    let shift_phase_end = if pruned {
        step.saturating_mul(3).min(limit)
    } else {
        0
    };
    for later in 2..=shift_phase_end {
        // Partner 2^(p+1) back is the smaller ordinal, so it wins ties.
        for (gap, gap_exponent) in [(2 * step, exponent + 1), (step, exponent)] {
            if later > gap && shift_holds(n, later - gap - 1, gap_exponent)? {
                return Ok(Some((later - gap, later)));
            }
        }
    }
    if limit <= shift_phase_end {
        return Ok(None);
    }

    let residue_mask = step - 1;
    let mut seen: HashMap<(u64, u64), u64> = HashMap::new();
    let mut collisions: Vec<((u64, u64), u64)> = Vec::new();
    let mut block = Vec::new();
    let mut other = Vec::new();
    for c in 1..=limit {
        read_packed((c - 1) * n, n, &mut block);
        let key = (c & residue_mask, fingerprint(&block));
        if c > shift_phase_end {
            let mut candidates: Vec<u64> = seen.get(&key).copied().into_iter().collect();
            candidates.extend(
                collisions
                    .iter()
                    .filter(|(k, _)| *k == key)
                    .map(|&(_, o)| o),
            );
            candidates.sort_unstable();
            for earlier in candidates {
                let gap = c - earlier;
                let equal = if n % 2 == 1 && gap.is_power_of_two() {
                    shift_holds(n, earlier - 1, gap.trailing_zeros())?
                } else {
                    read_packed((earlier - 1) * n, n, &mut other);
                    other == block
                };
                if equal {
                    return Ok(Some((earlier, c)));
                }
            }
        }
        match seen.entry(key) {
            std::collections::hash_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::hash_map::Entry::Occupied(_) => collisions.push((key, c)),
        }
    }
    Ok(None)
}

/// k-antipower test for the length-`kn` prefix, odd `n`, using congruence
/// pruning.
pub fn prefix_is_antipower(n: u64, k: u64) -> Result<AntipowerVerdict> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenBlockLength(n));
    }
    first_repeat(n, k, true).map(AntipowerVerdict::from_witness)
}

/// The same test without congruence pruning: every earlier block is a
/// candidate. Accepts any positive `n`.
pub fn prefix_is_antipower_unpruned(n: u64, k: u64) -> Result<AntipowerVerdict> {
    first_repeat(n, k, false).map(AntipowerVerdict::from_witness)
}

/// Verdict for `n ∈ AP(t, k)` with any positive `n`. Odd lengths use the
/// pruned search; even lengths the unpruned one.
pub fn ap_verdict(n: u64, k: u64) -> Result<AntipowerVerdict> {
    if n % 2 == 1 {
        prefix_is_antipower(n, k)
    } else {
        prefix_is_antipower_unpruned(n, k)
    }
}

/// `n ∈ AP(t, k)`: the length-`kn` prefix is a k-antipower.
pub fn ap_membership(n: u64, k: u64) -> Result<bool> {
    ap_verdict(n, k).map(|v| v.is_antipower)
}

//! Materialized-word brute force shared by the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

/// Doubling construction, one byte per letter.
pub fn doubled(len: usize) -> Vec<u8> {
    let mut word = vec![0u8];
    while word.len() < len {
        let complement: Vec<u8> = word.iter().map(|b| 1 - b).collect();
        word.extend(complement);
    }
    word.truncate(len);
    word
}

/// First `(c, c')` with block `c'` equal to an earlier block `c`, all pairs
/// compared byte by byte.
pub fn brute_first_repeat(word: &[u8], n: usize, k: usize) -> Option<(u64, u64)> {
    let blocks: Vec<&[u8]> = word[..n * k].chunks(n).collect();
    for later in 1..k {
        for c in 0..later {
            if blocks[c] == blocks[later] {
                return Some((c as u64 + 1, later as u64 + 1));
            }
        }
    }
    None
}

/// `(𝔎(n), c)` for the first repeated block `c' = 𝔎(n)` and its earlier copy `c`.
pub fn brute_kappa(word: &[u8], n: usize) -> (u64, u64) {
    let mut seen: HashMap<&[u8], usize> = HashMap::new();
    for (ordinal, block) in word.chunks_exact(n).enumerate() {
        if let Some(&first) = seen.get(block) {
            return (ordinal as u64 + 1, first as u64 + 1);
        }
        seen.insert(block, ordinal);
    }
    panic!("word too short for n = {n}");
}

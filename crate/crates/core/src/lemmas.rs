//! Finite-range verifiers for the block-equality facts and the bounds on `𝔎`.
//!
//! Each verifier walks a parameter grid and produces a [`LemmaReport`] with
//! exactly one verdict per grid point, in grid order. A failed upper bound
//! always carries the computed [`KappaRecord`] that exceeds it.
//!
//! Bounds of the form `𝔎(n) ≤ B` are decided with [`kappa::kappa_within`],
//! which for the `n` in these families stays inside the shift-criterion phase
//! of the block search, so even `n` around `2^21` is cheap.

use std::collections::HashMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::antipower::{self, BlockRef, ShiftQuery};
use crate::error::{Error, Result};
use crate::kappa::{self, KappaRecord};
use crate::par;
use crate::thue_morse::{self, equivalent, FiniteWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaId {
    DigitSum,
    DigitTables,
    ShiftCriterion,
    Congruence,
    Doubling,
    WordHygiene,
    #[serde(rename = "8x-family")]
    EightX,
    #[serde(rename = "32x-family")]
    ThirtyTwoX,
    CloseToHigh,
    PowerOffset,
    ExactFamilies,
    #[serde(rename = "window-17-6")]
    Window17Over6,
}

impl LemmaId {
    pub const ALL: [LemmaId; 12] = [
        LemmaId::DigitSum,
        LemmaId::DigitTables,
        LemmaId::ShiftCriterion,
        LemmaId::Congruence,
        LemmaId::Doubling,
        LemmaId::WordHygiene,
        LemmaId::EightX,
        LemmaId::ThirtyTwoX,
        LemmaId::CloseToHigh,
        LemmaId::PowerOffset,
        LemmaId::ExactFamilies,
        LemmaId::Window17Over6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::DigitSum => "digit-sum",
            LemmaId::DigitTables => "digit-tables",
            LemmaId::ShiftCriterion => "shift-criterion",
            LemmaId::Congruence => "congruence",
            LemmaId::Doubling => "doubling",
            LemmaId::WordHygiene => "word-hygiene",
            LemmaId::EightX => "8x-family",
            LemmaId::ThirtyTwoX => "32x-family",
            LemmaId::CloseToHigh => "close-to-high",
            LemmaId::PowerOffset => "power-offset",
            LemmaId::ExactFamilies => "exact-families",
            LemmaId::Window17Over6 => "window-17-6",
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = LemmaId::ALL.iter().map(|id| id.as_str()).collect();
                Error::InvalidArgument(format!(
                    "unknown lemma {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub value: i64,
}

fn param(name: &str, value: impl TryInto<i64>) -> Param {
    Param {
        name: name.to_owned(),
        value: value.try_into().unwrap_or(i64::MAX),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub detail: String,
    /// The computed record when the claim is about `𝔎(n)`. `None` only when
    /// the claim is not about `𝔎` or the search hit its cap.
    pub kappa: Option<KappaRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPoint {
    pub params: Vec<Param>,
    pub verdict: Verdict,
    pub observed: Vec<Param>,
    pub counterexample: Option<Counterexample>,
}

impl GridPoint {
    pub fn param(&self, name: &str) -> Option<i64> {
        self.params.iter().find(|p| p.name == name).map(|p| p.value)
    }

    pub fn observed(&self, name: &str) -> Option<i64> {
        self.observed
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub entries: Vec<GridPoint>,
    pub notes: Vec<String>,
}

impl LemmaReport {
    fn new(lemma: LemmaId, entries: Vec<GridPoint>) -> Self {
        LemmaReport {
            lemma,
            entries,
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.verdict == Verdict::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &GridPoint> {
        self.entries.iter().filter(|e| e.verdict == Verdict::Fail)
    }

    /// Appends another report for the same lemma, keeping grid order.
    pub fn merge(&mut self, other: LemmaReport) {
        debug_assert_eq!(self.lemma, other.lemma);
        self.entries.extend(other.entries);
        for note in other.notes {
            if !self.notes.contains(&note) {
                self.notes.push(note);
            }
        }
    }

    /// Least value `v` of `name` such that every entry with `name ≥ v`
    /// passes. `None` when the largest tested value fails.
    pub fn holds_from(&self, name: &str) -> Option<i64> {
        let mut values: Vec<i64> = self.entries.iter().filter_map(|e| e.param(name)).collect();
        values.sort_unstable();
        values.dedup();
        let failing = |v: i64| {
            self.entries
                .iter()
                .any(|e| e.param(name) == Some(v) && e.verdict == Verdict::Fail)
        };
        let mut answer = None;
        for &v in values.iter().rev() {
            if failing(v) {
                break;
            }
            answer = Some(v);
        }
        answer
    }

    /// One line per grid point, then `#`-prefixed notes.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(self.lemma.as_str());
            for p in &e.params {
                out.push_str(&format!(" {}={}", p.name, p.value));
            }
            out.push_str(match e.verdict {
                Verdict::Pass => " verdict=pass",
                Verdict::Fail => " verdict=fail",
            });
            for p in &e.observed {
                out.push_str(&format!(" {}={}", p.name, p.value));
            }
            if let Some(cx) = &e.counterexample {
                out.push_str(&format!(" counterexample=\"{}\"", cx.detail));
                if let Some(k) = &cx.kappa {
                    out.push_str(&format!(
                        " kappa_record={}:{}:({},{})",
                        k.n, k.kappa, k.witness.0, k.witness.1
                    ));
                }
            }
            out.push('\n');
        }
        for note in &self.notes {
            out.push_str(&format!("# {note}\n"));
        }
        out
    }
}

/// Which residue table a decomposition offset is looked up in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Phi,
    Psi,
}

/// `φ(d)`: offsets into a length-32 window where `x + s` and `x + n + s`,
/// `s = 0, 1, 2`, compare the same way for every `y` in `x = 32y + φ(d)`.
pub const PHI: [(i64, u64); 10] = [
    (3, 15),
    (11, 15),
    (-5, 15),
    (-13, 15),
    (5, 10),
    (1, 2),
    (13, 2),
    (-1, 3),
    (-3, 18),
    (-11, 26),
];

/// `ψ(d)` for `n = 2^i + d`: the block ordinal offset whose shift range is
/// `ψ(d), ψ(d) + 1`.
pub const PSI: [(i64, u64); 4] = [(1, 2), (5, 3), (11, 0), (13, 3)];

pub fn phi(d: i64) -> Option<u64> {
    PHI.iter().find(|&&(k, _)| k == d).map(|&(_, v)| v)
}

pub fn psi(d: i64) -> Option<u64> {
    PSI.iter().find(|&&(k, _)| k == d).map(|&(_, v)| v)
}

/// Offsets for which `d + φ(d) + s ≡_t φ(d) + s` for `s = 0, 1, 2`.
pub const PHI_EQUIVALENT: [i64; 4] = [3, -3, 5, -5];
/// Offsets for which `d + φ(d) + s ≢_t φ(d) + s` for `s = 0, 1, 2`.
pub const PHI_INEQUIVALENT: [i64; 6] = [1, -1, 11, 13, -11, -13];

const OFFSETS_8X: [i64; 2] = [1, -1];
const OFFSETS_32X: [i64; 8] = [3, -3, 5, -5, 11, -11, 13, -13];
const OFFSETS_CLOSE: [i64; 10] = [1, -1, 3, -3, 5, -5, 11, -11, 13, -13];
const OFFSETS_POWER: [i64; 5] = [1, 3, 5, 11, 13];

/// `n = a·2^j + d` with `a` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDecomposition {
    pub n: u64,
    pub a: u64,
    pub j: u32,
    pub d: i64,
}

impl FamilyDecomposition {
    /// `a·2^(j - shift)`, the quotient the family proofs work with.
    pub fn m(&self, shift: u32) -> Option<u64> {
        self.j
            .checked_sub(shift)
            .and_then(|e| self.a.checked_mul(1u64 << e))
    }
}

/// Every decomposition `n = a·2^j + d`, `a` odd, `j ≥ j_min`, with `d` drawn
/// from `offsets`. For each `d` the odd part of `n - d` fixes `a` and `j`.
pub fn decompositions(n: u64, offsets: &[i64], j_min: u32) -> Vec<FamilyDecomposition> {
    offsets
        .iter()
        .filter_map(|&d| {
            let x = n as i128 - d as i128;
            if x <= 0 {
                return None;
            }
            let x = x as u64;
            let j = x.trailing_zeros();
            (j >= j_min).then_some(FamilyDecomposition { n, a: x >> j, j, d })
        })
        .collect()
}

/// Odd `n` with `2^i < n < 3·2^(i-1)`.
fn low_window(i: u32) -> Result<Vec<u64>> {
    if !(2..=40).contains(&i) {
        return Err(Error::InvalidArgument(format!(
            "exponent i = {i} outside the supported range 2..=40"
        )));
    }
    Ok(((1u64 << i) + 1..3u64 << (i - 1)).step_by(2).collect())
}

fn bound_point(
    params: Vec<Param>,
    n: u64,
    bound: u64,
    mut observed: Vec<Param>,
) -> Result<GridPoint> {
    match kappa::kappa_within(n, bound)? {
        Some(record) => {
            observed.push(param("kappa", record.kappa));
            observed.push(param("witness_c", record.witness.0));
            observed.push(param("witness_cprime", record.witness.1));
            Ok(GridPoint {
                params,
                verdict: Verdict::Pass,
                observed,
                counterexample: None,
            })
        }
        None => {
            let record = match kappa::kappa(n, None) {
                Ok(r) => Some(r),
                Err(Error::CapExceeded { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(GridPoint {
                params,
                verdict: Verdict::Fail,
                observed,
                counterexample: Some(Counterexample {
                    detail: format!("kappa({n}) exceeds {bound}"),
                    kappa: record,
                }),
            })
        }
    }
}

/// Letters from popcount parity against the doubling construction
/// `A_0 = 0, A_m = A_{m-1} · complement(A_{m-1})`, for every `m ≤ max_exp`.
pub fn verify_digit_sum_prop(max_exp: u32) -> Result<LemmaReport> {
    if max_exp > 26 {
        return Err(Error::ResourceLimit {
            what: "doubling steps",
            requested: max_exp as u64,
            limit: 26,
        });
    }
    let mut built: Vec<u8> = vec![0];
    let mut entries = Vec::new();
    for m in 0..=max_exp {
        if m > 0 {
            let complement: Vec<u8> = built.iter().map(|b| 1 - b).collect();
            built.extend(complement);
        }
        let mismatch = built
            .iter()
            .enumerate()
            .find(|&(n, &b)| thue_morse::letter(n as u64).value() != b)
            .map(|(n, _)| n);
        entries.push(GridPoint {
            params: vec![param("m", m), param("letters", built.len())],
            verdict: Verdict::from_bool(mismatch.is_none()),
            observed: Vec::new(),
            counterexample: mismatch.map(|n| Counterexample {
                detail: format!("letter {n} differs from the doubling construction"),
                kappa: None,
            }),
        });
    }
    Ok(LemmaReport::new(LemmaId::DigitSum, entries))
}

/// The `φ` and `ψ` residue claims, exhaustively over their offsets.
///
/// `ψ` claims are checked for every `i` in `psi_exponents`; once
/// `d + ψ(d) + 1 < 2^i` the outcome no longer depends on `i`.
pub fn verify_digit_tables(psi_exponents: RangeInclusive<u32>) -> Result<LemmaReport> {
    if *psi_exponents.end() > 62 {
        return Err(Error::InvalidArgument(
            "psi exponents must be at most 62".into(),
        ));
    }
    let mut entries = Vec::new();
    for (expected_equiv, offsets) in [(true, &PHI_EQUIVALENT[..]), (false, &PHI_INEQUIVALENT[..])] {
        for &d in offsets {
            let f = phi(d).expect("offset in table");
            for s in 0..3u64 {
                let left = f + s;
                let right = (d + f as i64 + s as i64) as u64;
                let ok = equivalent(left, right) == expected_equiv;
                entries.push(GridPoint {
                    params: vec![
                        param("table", 0),
                        param("d", d),
                        param("s", s),
                        param("expect_equivalent", expected_equiv as i64),
                    ],
                    verdict: Verdict::from_bool(ok),
                    observed: vec![param("left", left), param("right", right)],
                    counterexample: (!ok).then(|| Counterexample {
                        detail: format!("t_{left} vs t_{right} contradicts the phi table"),
                        kappa: None,
                    }),
                });
            }
        }
    }
    for &(d, value) in &PSI {
        for i in psi_exponents.clone() {
            for s in 0..2u64 {
                let left = value + s;
                let right = (1u64 << i) + d as u64 + value + s;
                let ok = equivalent(left, right);
                entries.push(GridPoint {
                    params: vec![
                        param("table", 1),
                        param("d", d),
                        param("i", i),
                        param("s", s),
                    ],
                    verdict: Verdict::from_bool(ok),
                    observed: vec![param("left", left), param("right", right)],
                    counterexample: (!ok).then(|| Counterexample {
                        detail: format!("t_{left} != t_{right}"),
                        kappa: None,
                    }),
                });
            }
        }
    }
    // The d = 3 case of the 2^i + d bound compares x + 2^i against x + 2^(i+1) + 3.
    for x in 11..=13u64 {
        for i in psi_exponents.clone().filter(|&i| i < 62) {
            let left = (1u64 << i) + x;
            let right = (1u64 << (i + 1)) + x + 3;
            let ok = equivalent(left, right);
            entries.push(GridPoint {
                params: vec![param("table", 2), param("x", x), param("i", i)],
                verdict: Verdict::from_bool(ok),
                observed: vec![param("left", left), param("right", right)],
                counterexample: (!ok).then(|| Counterexample {
                    detail: format!("t_{left} != t_{right}"),
                    kappa: None,
                }),
            });
        }
    }
    let mut report = LemmaReport::new(LemmaId::DigitTables, entries);
    report
        .notes
        .push("table=0: phi claims; table=1: psi claims; table=2: the d=3 shifted triple".into());
    Ok(report)
}

/// Shift criterion against direct comparison for every odd `n ≤ n_max`,
/// exponent `≤ i_max` and `c ≤ c_max`. One grid point per `n`.
pub fn verify_shift_criterion(n_max: u64, i_max: u32, c_max: u64) -> Result<LemmaReport> {
    let ns: Vec<u64> = (1..=n_max).step_by(2).collect();
    let entries = par::try_map(&ns, |&n| -> Result<GridPoint> {
        let mut equal_pairs = 0u64;
        let mut first_disagreement = None;
        for i in 0..=i_max {
            for c in 0..=c_max {
                let query = ShiftQuery {
                    len: n,
                    c,
                    exponent: i,
                };
                let (a, b) = query.ordinals();
                let direct =
                    antipower::blocks_equal_direct(BlockRef::new(n, a)?, BlockRef::new(n, b)?)?;
                let shifted = antipower::blocks_equal_shift(query)?;
                equal_pairs += direct as u64;
                if direct != shifted && first_disagreement.is_none() {
                    first_disagreement = Some((i, c, direct));
                }
            }
        }
        Ok(GridPoint {
            params: vec![param("n", n), param("i_max", i_max), param("c_max", c_max)],
            verdict: Verdict::from_bool(first_disagreement.is_none()),
            observed: vec![param("equal_pairs", equal_pairs)],
            counterexample: first_disagreement.map(|(i, c, direct)| Counterexample {
                detail: format!(
                    "i={i} c={c}: direct comparison says {direct}, shift criterion disagrees"
                ),
                kappa: None,
            }),
        })
    })?;
    Ok(LemmaReport::new(LemmaId::ShiftCriterion, entries))
}

/// Every pair of equal blocks among ordinals `1..=max_ordinal`, for each odd
/// `n ≤ n_max`, checked for congruence mod `2^pruning_exponent(n)`.
pub fn verify_congruence(n_max: u64, max_ordinal: u64) -> Result<LemmaReport> {
    let ns: Vec<u64> = (1..=n_max).step_by(2).collect();
    let entries = par::try_map(&ns, |&n| -> Result<GridPoint> {
        let mut classes: HashMap<FiniteWord, Vec<u64>> = HashMap::new();
        for c in 1..=max_ordinal {
            classes
                .entry(BlockRef::new(n, c)?.word()?)
                .or_default()
                .push(c);
        }
        let mut groups: Vec<Vec<u64>> = classes.into_values().filter(|g| g.len() > 1).collect();
        groups.sort_unstable();
        let mut pairs = 0u64;
        let mut violation = None;
        for group in &groups {
            for (x, &c) in group.iter().enumerate() {
                for &later in &group[x + 1..] {
                    pairs += 1;
                    let ok = antipower::matching_pair_congruence_check(
                        BlockRef::new(n, c)?,
                        BlockRef::new(n, later)?,
                    )?;
                    if !ok && violation.is_none() {
                        violation = Some((c, later));
                    }
                }
            }
        }
        Ok(GridPoint {
            params: vec![param("n", n), param("max_ordinal", max_ordinal)],
            verdict: Verdict::from_bool(violation.is_none()),
            observed: vec![
                param("modulus_exp", antipower::pruning_exponent(n)),
                param("equal_pairs", pairs),
            ],
            counterexample: violation.map(|(c, later)| Counterexample {
                detail: format!("blocks {c} and {later} are equal but not congruent"),
                kappa: None,
            }),
        })
    })?;
    Ok(LemmaReport::new(LemmaId::Congruence, entries))
}

/// `n ∈ AP(t, k) ⇔ 2n ∈ AP(t, k)` for `1 ≤ n ≤ n_max`, `1 ≤ k ≤ k_max`.
/// One grid point per `n`.
pub fn verify_doubling(n_max: u64, k_max: u64) -> Result<LemmaReport> {
    let ns: Vec<u64> = (1..=n_max).collect();
    let entries = par::try_map(&ns, |&n| -> Result<GridPoint> {
        let mut mismatch = None;
        for k in 1..=k_max {
            let single = antipower::ap_membership(n, k)?;
            let double = antipower::ap_membership(2 * n, k)?;
            if single != double {
                mismatch = Some((k, single));
                break;
            }
        }
        Ok(GridPoint {
            params: vec![param("n", n), param("k_max", k_max)],
            verdict: Verdict::from_bool(mismatch.is_none()),
            observed: Vec::new(),
            counterexample: mismatch.map(|(k, single)| Counterexample {
                detail: format!("k={k}: n in AP is {single}, 2n in AP is {}", !single),
                kappa: None,
            }),
        })
    })?;
    Ok(LemmaReport::new(LemmaId::Doubling, entries))
}

/// Factors that never occur in the word: cubes of a letter and `ababa`.
pub const FORBIDDEN_FACTORS: [&str; 4] = ["000", "111", "01010", "10101"];

/// Scans the length-`2^exp` prefix for [`FORBIDDEN_FACTORS`].
pub fn verify_word_hygiene(exp: u32) -> Result<LemmaReport> {
    let word = thue_morse::prefix(1u64 << exp)?;
    let bytes: Vec<u8> = word.iter().map(|b| b'0' + b.value()).collect();
    let entries = FORBIDDEN_FACTORS
        .iter()
        .map(|pattern| {
            let position = bytes
                .windows(pattern.len())
                .position(|w| w == pattern.as_bytes());
            GridPoint {
                params: vec![
                    param("exp", exp),
                    param("pattern", i64::from_str_radix(pattern, 2).unwrap_or(0)),
                    param("pattern_len", pattern.len()),
                ],
                verdict: Verdict::from_bool(position.is_none()),
                observed: Vec::new(),
                counterexample: position.map(|p| Counterexample {
                    detail: format!("{pattern} occurs at {p}"),
                    kappa: None,
                }),
            }
        })
        .collect();
    let mut report = LemmaReport::new(LemmaId::WordHygiene, entries);
    report
        .notes
        .push("pattern is the factor read as a binary number; pattern_len disambiguates".into());
    Ok(report)
}

fn family_report(
    lemma: LemmaId,
    i: u32,
    offsets: &[i64],
    j_min: u32,
    m_shift: u32,
    bound: impl Fn(&FamilyDecomposition) -> u64 + Sync + Send,
) -> Result<LemmaReport> {
    let points: Vec<FamilyDecomposition> = low_window(i)?
        .into_iter()
        .flat_map(|n| decompositions(n, offsets, j_min))
        .collect();
    let entries = par::try_map(&points, |dec| {
        let b = bound(dec);
        bound_point(
            vec![
                param("i", i),
                param("n", dec.n),
                param("a", dec.a),
                param("j", dec.j),
                param("d", dec.d),
                param("m", dec.m(m_shift).unwrap_or(0)),
                param("bound", b),
            ],
            dec.n,
            b,
            Vec::new(),
        )
    })?;
    Ok(LemmaReport::new(lemma, entries))
}

/// `𝔎(n) ≤ 2^i + 3·2^j + 5` for odd `n = a·2^j ± 1`, `j ≥ 3`, in
/// `(2^i, 3·2^(i-1))`.
pub fn verify_8x_family(i: u32) -> Result<LemmaReport> {
    family_report(LemmaId::EightX, i, &OFFSETS_8X, 3, 3, |dec| {
        (1u64 << i) + 3 * (1u64 << dec.j) + 5
    })
}

/// `𝔎(n) ≤ 2^i + 3·2^j + 28` for odd `n = a·2^j + d`, `j ≥ 5`,
/// `d ∈ {±3, ±5, ±11, ±13}`, in `(2^i, 3·2^(i-1))`.
pub fn verify_32x_family(i: u32) -> Result<LemmaReport> {
    family_report(LemmaId::ThirtyTwoX, i, &OFFSETS_32X, 5, 5, |dec| {
        (1u64 << i) + 3 * (1u64 << dec.j) + 28
    })
}

/// `𝔎(2^i + d) ≤ 2^i + 5` for `d ∈ {1, 3, 5, 11, 13}`.
pub fn verify_power_offset(i: u32) -> Result<LemmaReport> {
    if !(5..=40).contains(&i) {
        return Err(Error::InvalidArgument(format!(
            "exponent i = {i} outside the supported range 5..=40"
        )));
    }
    let entries = par::try_map(&OFFSETS_POWER, |&d| {
        let n = (1u64 << i) + d as u64;
        bound_point(
            vec![
                param("i", i),
                param("d", d),
                param("n", n),
                param("bound", (1u64 << i) + 5),
            ],
            n,
            (1u64 << i) + 5,
            Vec::new(),
        )
    })?;
    Ok(LemmaReport::new(LemmaId::PowerOffset, entries))
}

/// Result of searching for the block offset `c` in the close-to-high bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionSearchTrace {
    pub n: u64,
    pub i: u32,
    pub k_shift: u32,
    pub j: u32,
    /// First `c ≤ 2^(i-1) + 6` meeting all three conditions.
    pub found_c: Option<u64>,
    pub p: Option<u8>,
    /// Conditions (1)–(3) at `found_c`; all false when nothing was found.
    pub conditions: [bool; 3],
    pub scanned: u64,
}

/// Evaluates conditions (1)–(3) at one `c`. Returns the conditions and the
/// `p` used for condition (3).
pub fn close_to_high_conditions(
    dec: &FamilyDecomposition,
    i: u32,
    c: u64,
) -> Result<([bool; 3], Option<u8>)> {
    let f = phi(dec.d)
        .ok_or_else(|| Error::InvalidArgument(format!("no phi value for d = {}", dec.d)))?;
    let shift = i - 1;
    let floor_at = |c: u64| ((dec.n as u128 * c as u128) >> shift) as u64;
    let here = floor_at(c);
    let gap_is_two = floor_at(c + 1) - here == 2;
    let residue_ok = here % 32 == f;
    let table_equivalent = equivalent(f, (dec.d + f as i64) as u64);
    let span = 1u64 << dec.j;
    let p = [1u8, 2].into_iter().find(|&p| {
        let p64 = p as u64;
        p64 * span < here
            && here < (p64 + 1) * span
            && table_equivalent == equivalent(dec.a + p64, p64)
    });
    Ok(([gap_is_two, residue_ok, p.is_some()], p))
}

/// Searches `c = 1 ..= 2^(i-1) + 6` for the first offset meeting
/// conditions (1)–(3).
pub fn find_c_conditions(dec: &FamilyDecomposition, i: u32) -> Result<ConditionSearchTrace> {
    if !(2..=62).contains(&i) || dec.j >= i {
        return Err(Error::InvalidArgument(format!(
            "need 2 <= i <= 62 and j < i, got i = {i}, j = {}",
            dec.j
        )));
    }
    let limit = (1u64 << (i - 1)) + 6;
    let mut trace = ConditionSearchTrace {
        n: dec.n,
        i,
        k_shift: i - dec.j,
        j: dec.j,
        found_c: None,
        p: None,
        conditions: [false; 3],
        scanned: 0,
    };
    for c in 1..=limit {
        trace.scanned = c;
        let (conditions, p) = close_to_high_conditions(dec, i, c)?;
        if conditions.iter().all(|&x| x) {
            trace.found_c = Some(c);
            trace.p = p;
            trace.conditions = conditions;
            break;
        }
    }
    Ok(trace)
}

/// Odd `n = a·2^j + d`, `a` odd, `j = i - k_shift`,
/// `d ∈ {±1, ±3, ±5, ±11, ±13}`, with `2^i < n < 3·2^(i-1)`.
pub fn close_to_high_candidates(i: u32, k_shift: u32) -> Result<Vec<FamilyDecomposition>> {
    if k_shift < 2 || k_shift >= i || i > 40 {
        return Err(Error::InvalidArgument(format!(
            "need 2 <= k_shift < i <= 40, got i = {i}, k_shift = {k_shift}"
        )));
    }
    let j = i - k_shift;
    let required = (3 * i + 11).div_ceil(4);
    if j < required {
        return Err(Error::Infeasible(format!(
            "j = {j} is below ceil((3i+11)/4) = {required} at i = {i}"
        )));
    }
    let lo = 1u64 << i;
    let hi = 3u64 << (i - 1);
    let mut out = Vec::new();
    let mut a = 1u64;
    while (a << j) < hi + 13 {
        for &d in &OFFSETS_CLOSE {
            let n = ((a << j) as i64 + d) as u64;
            if lo < n && n < hi {
                out.push(FamilyDecomposition { n, a, j, d });
            }
        }
        a += 2;
    }
    out.sort_by_key(|dec| dec.n);
    Ok(out)
}

/// `𝔎(n) ≤ 2^i + 7` for every candidate of [`close_to_high_candidates`],
/// with the condition search recorded alongside.
pub fn verify_close_to_high(i: u32, k_shift: u32) -> Result<LemmaReport> {
    let candidates = close_to_high_candidates(i, k_shift)?;
    let bound = (1u64 << i) + 7;
    let entries = par::try_map(&candidates, |dec| -> Result<GridPoint> {
        let trace = find_c_conditions(dec, i)?;
        let mut observed = vec![
            param("internal_condition", (dec.j >= 3 * k_shift + 11) as i64),
            param("found_c", trace.found_c.map_or(-1, |c| c as i64)),
            param("p", trace.p.map_or(-1, i64::from)),
        ];
        if let Some(c) = trace.found_c {
            let later = c + 1 + (1u64 << (i - 1));
            let matched = antipower::blocks_equal_direct(
                BlockRef::new(dec.n, c + 1)?,
                BlockRef::new(dec.n, later)?,
            )?;
            observed.push(param("found_blocks_match", matched as i64));
        }
        bound_point(
            vec![
                param("i", i),
                param("k_shift", k_shift),
                param("n", dec.n),
                param("a", dec.a),
                param("j", dec.j),
                param("d", dec.d),
                param("bound", bound),
            ],
            dec.n,
            bound,
            observed,
        )
    })?;
    let mut report = LemmaReport::new(LemmaId::CloseToHigh, entries);
    report.notes.push(
        "eligibility uses j >= (3i+11)/4; internal_condition records j >= 3k+11 from the proof"
            .into(),
    );
    Ok(report)
}

fn exact_point(
    family: i64,
    i: u32,
    n: u64,
    expected: u64,
    expected_witness: (u64, u64),
) -> Result<GridPoint> {
    let params = vec![
        param("family", family),
        param("i", i),
        param("n", n),
        param("expected", expected),
    ];
    let record = match kappa::kappa(n, Some(expected.saturating_mul(2).max(kappa::DEFAULT_CAP))) {
        Ok(r) => r,
        Err(Error::CapExceeded { cap, .. }) => {
            return Ok(GridPoint {
                params,
                verdict: Verdict::Fail,
                observed: Vec::new(),
                counterexample: Some(Counterexample {
                    detail: format!("kappa({n}) exceeds the search cap {cap}"),
                    kappa: None,
                }),
            })
        }
        Err(e) => return Err(e),
    };
    let ok = record.kappa == expected && record.witness == expected_witness;
    Ok(GridPoint {
        params,
        verdict: Verdict::from_bool(ok),
        observed: vec![
            param("kappa", record.kappa),
            param("witness_c", record.witness.0),
            param("witness_cprime", record.witness.1),
            param(
                "witness_matches_proof",
                (record.witness == expected_witness) as i64,
            ),
        ],
        counterexample: (!ok).then(|| Counterexample {
            detail: format!(
                "expected kappa {expected} with witness ({}, {})",
                expected_witness.0, expected_witness.1
            ),
            kappa: Some(record),
        }),
    })
}

fn check_exponents(range: &RangeInclusive<u32>, min: u32, max: u32) -> Result<()> {
    if *range.start() < min || *range.end() > max {
        return Err(Error::InvalidArgument(format!(
            "exponent range {}..={} must lie within {min}..={max}",
            range.start(),
            range.end()
        )));
    }
    Ok(())
}

/// `𝔎(2^i + 1) = 2^(i-1) + 2`, witness `(2, 2^(i-1) + 2)`.
pub fn verify_power_plus_one(range: RangeInclusive<u32>) -> Result<LemmaReport> {
    check_exponents(&range, 2, 40)?;
    let is: Vec<u32> = range.collect();
    let entries = par::try_map(&is, |&i| {
        let half = 1u64 << (i - 1);
        exact_point(1, i, (1u64 << i) + 1, half + 2, (2, half + 2))
    })?;
    let mut report = LemmaReport::new(LemmaId::ExactFamilies, entries);
    report.notes.push(
        "family=1: checked as 2^i+1; a closing proof step stated for 2^i-1 is read as a typo for 2^i+1"
            .into(),
    );
    Ok(report)
}

/// `𝔎(2^i + 3) = 2^i + 5`, witness `(2^(i-1) + 5, 2^i + 5)`.
pub fn verify_power_plus_three(range: RangeInclusive<u32>) -> Result<LemmaReport> {
    check_exponents(&range, 2, 40)?;
    let is: Vec<u32> = range.collect();
    let entries = par::try_map(&is, |&i| {
        let full = 1u64 << i;
        exact_point(3, i, full + 3, full + 5, (full / 2 + 5, full + 5))
    })?;
    Ok(LemmaReport::new(LemmaId::ExactFamilies, entries))
}

/// `𝔎(2^(2i) - 3) = 2^(2i) + 10`, witness `(2^(2i-1) + 10, 2^(2i) + 10)`.
pub fn verify_square_power_minus_three(range: RangeInclusive<u32>) -> Result<LemmaReport> {
    check_exponents(&range, 1, 20)?;
    let is: Vec<u32> = range.collect();
    let entries = par::try_map(&is, |&i| {
        let full = 1u64 << (2 * i);
        exact_point(-3, i, full - 3, full + 10, (full / 2 + 10, full + 10))
    })?;
    Ok(LemmaReport::new(LemmaId::ExactFamilies, entries))
}

/// The three exact families over the same exponent range (the third uses
/// `2^(2i)`).
pub fn verify_exact_families(range: RangeInclusive<u32>) -> Result<LemmaReport> {
    let mut report = verify_power_plus_one(range.clone())?;
    report.merge(verify_power_plus_three(range.clone())?);
    report.merge(verify_square_power_minus_three(range)?);
    Ok(report)
}

/// Odd `n` with `17·2^i/6 - 96 < n < 17·2^i/6`.
pub fn window_17_6_candidates(i: u32) -> Vec<u64> {
    let scaled = 17u128 << i;
    (1..)
        .step_by(2)
        .map(|n: u64| n)
        .skip_while(|&n| 6 * (n as u128 + 96) <= scaled)
        .take_while(|&n| 6 * (n as u128) < scaled)
        .collect()
}

/// There is an odd `n` in the window `(17·2^i/6 - 96, 17·2^i/6)` with
/// `𝔎(n) ≤ 2^i + 6`. One grid point per `i`; all qualifying `n` are counted.
pub fn verify_window_17_6(i: u32) -> Result<LemmaReport> {
    if i > 40 {
        return Err(Error::InvalidArgument(format!("exponent i = {i} above 40")));
    }
    let bound = (1u64 << i) + 6;
    let candidates = window_17_6_candidates(i);
    let results = par::try_map(&candidates, |&n| kappa::kappa_within(n, bound))?;
    let hits: Vec<KappaRecord> = results.into_iter().flatten().collect();
    let first = hits.first();
    let mut observed = vec![
        param("candidates", candidates.len()),
        param("hits", hits.len()),
        param(
            "hits_1_mod_32",
            hits.iter().filter(|r| r.n % 32 == 1).count(),
        ),
    ];
    if let Some(r) = first {
        observed.push(param("witness_n", r.n));
        observed.push(param("kappa", r.kappa));
        observed.push(param("witness_c", r.witness.0));
        observed.push(param("witness_cprime", r.witness.1));
    }
    let mut report = LemmaReport::new(
        LemmaId::Window17Over6,
        vec![GridPoint {
            params: vec![param("i", i), param("bound", bound)],
            verdict: Verdict::from_bool(first.is_some()),
            observed,
            counterexample: first.is_none().then(|| Counterexample {
                detail: if candidates.is_empty() {
                    "empty window".to_owned()
                } else {
                    format!("no odd n in the window has kappa <= {bound}")
                },
                kappa: None,
            }),
        }],
    );
    if candidates.is_empty() {
        report.notes.push(format!("i={i}: empty window"));
    }
    Ok(report)
}

/// Runs `verify` for each exponent and merges the reports in order.
pub fn over_exponents(
    range: RangeInclusive<u32>,
    verify: impl Fn(u32) -> Result<LemmaReport>,
) -> Result<Option<LemmaReport>> {
    let mut merged: Option<LemmaReport> = None;
    for i in range {
        let report = verify(i)?;
        match merged.as_mut() {
            Some(m) => m.merge(report),
            None => merged = Some(report),
        }
    }
    Ok(merged)
}

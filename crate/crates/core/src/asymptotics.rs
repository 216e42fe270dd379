//! Ratio sweeps over `𝔎(n)/n` and `γ(k)/k`, `Γ(k)/k`, `(Γ(k) - γ(k))/k`,
//! plus the scan comparing `𝔎(n)` to `𝔎(3·2^i + 1)`.
//!
//! Every ratio is an exact [`Ratio`]; decimals appear only in CSV output.
//! Sample order is the index order regardless of thread count.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::{certified_cap, KappaTable};
use crate::kappa::{self, KappaRecord};
use crate::par;
use crate::ratio::Ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioSample {
    pub index: u64,
    pub value: u64,
    /// `value / index`, reduced.
    pub ratio: Ratio,
}

impl RatioSample {
    pub fn new(index: u64, value: u64) -> Result<Self> {
        if index == 0 {
            return Err(Error::InvalidArgument(
                "ratio index must be positive".into(),
            ));
        }
        let value_signed = i64::try_from(value).map_err(|_| Error::IndexOverflow {
            context: "ratio numerator",
        })?;
        Ok(RatioSample {
            index,
            value,
            ratio: Ratio::new(value_signed, index),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaSample {
    pub record: KappaRecord,
    pub sample: RatioSample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalSample {
    pub k: u64,
    pub gamma: RatioSample,
    pub big_gamma: Option<RatioSample>,
    /// `(Γ(k) - γ(k)) / k`.
    pub spread: Option<Ratio>,
}

fn odd_range(lo: u64, hi: u64) -> Result<Vec<u64>> {
    if lo.is_multiple_of(2) || hi.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "sweep bounds must be odd, got [{lo}, {hi}]"
        )));
    }
    Ok((lo..=hi).step_by(2).collect())
}

/// `𝔎(n)` for every odd `n` in `[lo, hi]`. Empty when `lo > hi`.
pub fn sweep_kappa(lo: u64, hi: u64) -> Result<Vec<KappaSample>> {
    let ns = odd_range(lo, hi)?;
    par::try_map(&ns, |&n| {
        let record = kappa::kappa(n, None)?;
        Ok(KappaSample {
            record,
            sample: RatioSample::new(n, record.kappa)?,
        })
    })
}

/// `γ(k)` and `Γ(k)` for every `k` in `[lo, hi]`, from one shared table of
/// `𝔎` values. Empty when `lo > hi`.
pub fn sweep_extremal(lo: u64, hi: u64) -> Result<Vec<ExtremalSample>> {
    if lo == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if lo > hi {
        return Ok(Vec::new());
    }
    let table = KappaTable::build(certified_cap(hi), hi)?;
    let ks: Vec<u64> = (lo..=hi).collect();
    par::try_map(&ks, |&k| {
        let record = table.record(k)?;
        let gamma = RatioSample::new(k, record.gamma)?;
        let big_gamma = record
            .big_gamma
            .map(|g| RatioSample::new(k, g))
            .transpose()?;
        Ok(ExtremalSample {
            k,
            gamma,
            big_gamma,
            spread: record
                .big_gamma
                .map(|g| Ratio::new(g as i64 - record.gamma as i64, k)),
        })
    })
}

/// Extremes of a ratio over indices in `[2^exp, 2^(exp+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicWindow {
    pub exp: u32,
    pub min: Ratio,
    pub argmin: u64,
    pub max: Ratio,
    pub argmax: u64,
    pub count: u64,
}

/// One window per dyadic block touched by `samples`, ascending. Ties keep the
/// smallest index.
pub fn dyadic_windows(samples: &[(u64, Ratio)]) -> Vec<DyadicWindow> {
    let mut windows: Vec<DyadicWindow> = Vec::new();
    for &(index, ratio) in samples {
        if index == 0 {
            continue;
        }
        let exp = 63 - index.leading_zeros();
        match windows.iter_mut().find(|w| w.exp == exp) {
            Some(w) => {
                w.count += 1;
                if ratio < w.min || (ratio == w.min && index < w.argmin) {
                    w.min = ratio;
                    w.argmin = index;
                }
                if ratio > w.max || (ratio == w.max && index < w.argmax) {
                    w.max = ratio;
                    w.argmax = index;
                }
            }
            None => windows.push(DyadicWindow {
                exp,
                min: ratio,
                argmin: index,
                max: ratio,
                argmax: index,
                count: 1,
            }),
        }
    }
    windows.sort_by_key(|w| w.exp);
    windows
}

/// Largest observed `γ(k) - 3k/2` and `Γ(k) - 3k` over a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandExcess {
    pub gamma: Ratio,
    pub big_gamma: Option<Ratio>,
}

pub fn band_excess(samples: &[ExtremalSample]) -> Option<BandExcess> {
    let gamma = samples
        .iter()
        .map(|s| Ratio::new(2 * s.gamma.value as i64 - 3 * s.k as i64, 2))
        .max()?;
    let big_gamma = samples
        .iter()
        .filter_map(|s| {
            s.big_gamma
                .map(|g| Ratio::new(g.value as i64 - 3 * s.k as i64, 1))
        })
        .max();
    Some(BandExcess { gamma, big_gamma })
}

/// Odd `n` in `(3·2^i, 2^(i+2)·(1 - margin))` compared against
/// `𝔎(3·2^i + 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureScanRecord {
    pub i: u32,
    pub margin: Ratio,
    pub reference: KappaRecord,
    /// Exclusive bounds of the window.
    pub window: (u64, u64),
    pub candidates: u64,
    /// `n` in the window with `𝔎(n) > reference`, ascending.
    pub violations: Vec<u64>,
}

impl ConjectureScanRecord {
    pub fn is_empty_window(&self) -> bool {
        self.candidates == 0
    }

    /// `violations / candidates`; zero for an empty window.
    pub fn violation_fraction(&self) -> Ratio {
        Ratio::new(self.violations.len() as i64, self.candidates.max(1))
    }
}

pub fn conjecture_scan(i: u32, margin: Ratio) -> Result<ConjectureScanRecord> {
    if !(1..=30).contains(&i) {
        return Err(Error::InvalidArgument(format!(
            "exponent i = {i} outside the supported range 1..=30"
        )));
    }
    if margin.num < 0 || margin.num as u64 >= margin.den {
        return Err(Error::InvalidArgument(format!(
            "margin must lie in [0, 1), got {margin}"
        )));
    }
    let lo = 3u64 << i;
    // ⌈2^(i+2)·(1 - margin)⌉, exclusive.
    let scaled = (1u128 << (i + 2)) * (margin.den - margin.num as u64) as u128;
    let hi = scaled.div_ceil(margin.den as u128) as u64;
    let reference = kappa::kappa(lo + 1, None)?;
    let ns: Vec<u64> = (lo + 1..hi).step_by(2).collect();
    // A violation is exactly a window n whose first `reference.kappa` blocks
    // are pairwise distinct.
    let within = par::try_map(&ns, |&n| kappa::kappa_within(n, reference.kappa))?;
    let violations = ns
        .iter()
        .zip(within)
        .filter(|(_, r)| r.is_none())
        .map(|(&n, _)| n)
        .collect();
    Ok(ConjectureScanRecord {
        i,
        margin,
        reference,
        window: (lo, hi.max(lo)),
        candidates: ns.len() as u64,
        violations,
    })
}

fn output_error(e: impl std::fmt::Display) -> Error {
    Error::Output(e.to_string())
}

/// Columns `n,kappa,witness_c,witness_cprime,ratio_num,ratio_den,ratio`.
pub fn write_kappa_csv<W: Write>(samples: &[KappaSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "kappa",
        "witness_c",
        "witness_cprime",
        "ratio_num",
        "ratio_den",
        "ratio",
    ])
    .map_err(output_error)?;
    for s in samples {
        let r = s.sample.ratio;
        w.write_record([
            s.record.n.to_string(),
            s.record.kappa.to_string(),
            s.record.witness.0.to_string(),
            s.record.witness.1.to_string(),
            r.num.to_string(),
            r.den.to_string(),
            r.to_decimal(),
        ])
        .map_err(output_error)?;
    }
    w.flush().map_err(output_error)
}

fn ratio_cells(r: Option<Ratio>) -> [String; 3] {
    match r {
        Some(r) => [r.num.to_string(), r.den.to_string(), r.to_decimal()],
        None => [String::new(), String::new(), String::new()],
    }
}

/// One row per `k`; `Γ` columns are empty when `Γ(k)` is absent.
pub fn write_extremal_csv<W: Write>(samples: &[ExtremalSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "index",
        "value_gamma",
        "value_Gamma",
        "ratio_gamma_num",
        "ratio_gamma_den",
        "ratio_gamma",
        "ratio_Gamma_num",
        "ratio_Gamma_den",
        "ratio_Gamma",
        "ratio_spread_num",
        "ratio_spread_den",
        "ratio_spread",
    ])
    .map_err(output_error)?;
    for s in samples {
        let mut row = vec![
            s.k.to_string(),
            s.gamma.value.to_string(),
            s.big_gamma.map(|g| g.value.to_string()).unwrap_or_default(),
        ];
        row.extend(ratio_cells(Some(s.gamma.ratio)));
        row.extend(ratio_cells(s.big_gamma.map(|g| g.ratio)));
        row.extend(ratio_cells(s.spread));
        w.write_record(&row).map_err(output_error)?;
    }
    w.flush().map_err(output_error)
}

/// Columns `series,exp,count,min_num,min_den,min,argmin,max_num,max_den,max,argmax`.
pub fn write_windows_csv<W: Write>(series: &[(&str, Vec<DyadicWindow>)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "series", "exp", "count", "min_num", "min_den", "min", "argmin", "max_num", "max_den",
        "max", "argmax",
    ])
    .map_err(output_error)?;
    for (name, windows) in series {
        for win in windows {
            let mut row = vec![name.to_string(), win.exp.to_string(), win.count.to_string()];
            row.extend(ratio_cells(Some(win.min)));
            row.push(win.argmin.to_string());
            row.extend(ratio_cells(Some(win.max)));
            row.push(win.argmax.to_string());
            w.write_record(&row).map_err(output_error)?;
        }
    }
    w.flush().map_err(output_error)
}

/// Ratio series of an extremal sweep keyed for [`dyadic_windows`].
pub fn extremal_series(samples: &[ExtremalSample]) -> Vec<(&'static str, Vec<DyadicWindow>)> {
    let gamma: Vec<(u64, Ratio)> = samples.iter().map(|s| (s.k, s.gamma.ratio)).collect();
    let big: Vec<(u64, Ratio)> = samples
        .iter()
        .filter_map(|s| s.big_gamma.map(|g| (s.k, g.ratio)))
        .collect();
    let spread: Vec<(u64, Ratio)> = samples
        .iter()
        .filter_map(|s| s.spread.map(|r| (s.k, r)))
        .collect();
    vec![
        ("gamma", dyadic_windows(&gamma)),
        ("Gamma", dyadic_windows(&big)),
        ("spread", dyadic_windows(&spread)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_sweep_values() {
        let values: Vec<u64> = sweep_kappa(1, 9)
            .unwrap()
            .iter()
            .map(|s| s.record.kappa)
            .collect();
        assert_eq!(values, vec![3, 3, 7, 7, 6]);
        let values: Vec<u64> = sweep_kappa(33, 35)
            .unwrap()
            .iter()
            .map(|s| s.record.kappa)
            .collect();
        assert_eq!(values, vec![18, 37]);
        assert!(sweep_kappa(11, 9).unwrap().is_empty());
        assert!(sweep_kappa(2, 9).is_err());
    }

    #[test]
    fn ratios_are_exact() {
        for s in sweep_kappa(1, 201).unwrap() {
            assert_eq!(
                s.sample.ratio.times(s.sample.index),
                Some(s.sample.value as i64)
            );
        }
    }

    #[test]
    fn extremal_sweep_small() {
        let samples = sweep_extremal(2, 3).unwrap();
        assert_eq!(samples[0].gamma.value, 1);
        assert!(samples[0].big_gamma.is_none());
        assert_eq!(samples[1].gamma.value, 5);
        assert_eq!(samples[1].big_gamma.map(|g| g.value), Some(3));
        assert_eq!(samples[1].spread, Some(Ratio::new(-2, 3)));
        assert!(sweep_extremal(5, 4).unwrap().is_empty());
        assert!(sweep_extremal(0, 4).is_err());
    }

    #[test]
    fn windows_track_extremes() {
        let data = [
            (4, Ratio::new(1, 2)),
            (5, Ratio::new(1, 3)),
            (7, Ratio::new(1, 3)),
            (8, Ratio::new(2, 1)),
        ];
        let w = dyadic_windows(&data);
        assert_eq!(w.len(), 2);
        assert_eq!(
            (w[0].exp, w[0].argmin, w[0].argmax, w[0].count),
            (2, 5, 4, 3)
        );
        assert_eq!(
            (w[1].exp, w[1].min, w[1].max),
            (3, Ratio::new(2, 1), Ratio::new(2, 1))
        );
    }

    #[test]
    fn conjecture_windows() {
        let r = conjecture_scan(6, Ratio::new(0, 1)).unwrap();
        assert_eq!(r.window, (192, 256));
        assert_eq!(r.candidates, 32);
        assert_eq!(r.reference.n, 193);
        assert!(r.violations.iter().all(|&n| 192 < n && n < 256));
        let r = conjecture_scan(6, Ratio::new(1, 16)).unwrap();
        assert_eq!(r.window, (192, 240));
        let r = conjecture_scan(1, Ratio::new(1, 2)).unwrap();
        assert!(r.is_empty_window());
        assert_eq!(r.violation_fraction(), Ratio::new(0, 1));
        assert!(conjecture_scan(6, Ratio::new(1, 1)).is_err());
    }

    #[test]
    fn csv_is_stable() {
        let samples = sweep_kappa(1, 5).unwrap();
        let mut a = Vec::new();
        write_kappa_csv(&samples, &mut a).unwrap();
        assert_eq!(
            String::from_utf8(a).unwrap(),
            "n,kappa,witness_c,witness_cprime,ratio_num,ratio_den,ratio\n\
             1,3,2,3,3,1,3.000000\n\
             3,3,1,3,1,1,1.000000\n\
             5,7,5,7,7,5,1.400000\n"
        );
        let ex = sweep_extremal(2, 3).unwrap();
        let mut b = Vec::new();
        write_extremal_csv(&ex, &mut b).unwrap();
        let text = String::from_utf8(b).unwrap();
        assert_eq!(text.lines().nth(1), Some("2,1,,1,2,0.500000,,,,,,"));
    }
}

//! Acceptance suite: one line per criterion with its runtime and limit.
//! Exits nonzero if any criterion fails or runs over its limit.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{brute_first_repeat, doubled};
use tm_antipower::antipower;
use tm_antipower::asymptotics::{self, DyadicWindow};
use tm_antipower::extremal;
use tm_antipower::kappa;
use tm_antipower::lemmas::{self, LemmaReport};
use tm_antipower::thue_morse;
use tm_antipower::Ratio;

type Outcome = Result<(), String>;

/// Name, time limit in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn passed(report: &LemmaReport) -> Outcome {
    ensure(report.passed(), || {
        let first = report.failures().next().expect("a failing entry");
        format!(
            "{} fails at {:?}: {:?}",
            report.lemma, first.params, first.counterexample
        )
    })
}

fn small_values() -> Outcome {
    let word = doubled(1 << 10);
    for (n, expected, witness) in [(1u64, 3u64, (2u64, 3u64)), (3, 3, (1, 3)), (5, 7, (5, 7))] {
        let r = kappa::kappa(n, None).map_err(|e| e.to_string())?;
        ensure(r.kappa == expected && r.witness == witness, || {
            format!("pruned: {r:?}")
        })?;
        let unpruned =
            antipower::prefix_is_antipower_unpruned(n, expected).map_err(|e| e.to_string())?;
        ensure(unpruned.witness == Some(witness), || {
            format!("unpruned n={n}: {unpruned:?}")
        })?;
        let brute = brute_first_repeat(&word, n as usize, expected as usize);
        ensure(brute == Some(witness), || {
            format!("brute force n={n}: {brute:?}")
        })?;
        ensure(
            brute_first_repeat(&word, n as usize, expected as usize - 1).is_none(),
            || format!("brute force n={n} repeats before {expected}"),
        )?;
    }
    Ok(())
}

fn exact_power_families() -> Outcome {
    passed(&lemmas::verify_power_plus_one(5..=14).map_err(|e| e.to_string())?)?;
    passed(&lemmas::verify_power_plus_three(5..=13).map_err(|e| e.to_string())?)
}

fn exact_square_family() -> Outcome {
    passed(&lemmas::verify_square_power_minus_three(3..=6).map_err(|e| e.to_string())?)
}

fn window_lemma() -> Outcome {
    for i in 10..=14 {
        passed(&lemmas::verify_window_17_6(i).map_err(|e| e.to_string())?)?;
    }
    Ok(())
}

fn digit_tables() -> Outcome {
    passed(&lemmas::verify_digit_tables(5..=62).map_err(|e| e.to_string())?)
}

fn shift_criterion() -> Outcome {
    passed(&lemmas::verify_shift_criterion(63, 6, 256).map_err(|e| e.to_string())?)
}

fn congruence() -> Outcome {
    passed(&lemmas::verify_congruence(99, 1 << 12).map_err(|e| e.to_string())?)
}

fn extremal_consistency() -> Outcome {
    let word = doubled(1 << 16);
    for k in 1..=64usize {
        let r = extremal::extremal(k as u64).map_err(|e| e.to_string())?;
        // Direct definition over odd n well past any possible member.
        let outside: Vec<u64> = (1..8 * k + 8)
            .step_by(2)
            .filter(|&n| brute_first_repeat(&word, n, k).is_some())
            .map(|n| n as u64)
            .collect();
        let gamma = (1..)
            .step_by(2)
            .find(|n| !outside.contains(n))
            .expect("unbounded");
        ensure(r.complement == outside, || {
            format!("k={k}: complement {:?} vs {outside:?}", r.complement)
        })?;
        ensure(r.gamma == gamma, || {
            format!("k={k}: gamma {} vs {gamma}", r.gamma)
        })?;
        ensure(r.big_gamma == outside.last().copied(), || {
            format!("k={k}: Gamma {:?}", r.big_gamma)
        })?;
    }
    let r3 = extremal::extremal(3).map_err(|e| e.to_string())?;
    ensure((r3.gamma, r3.big_gamma) == (5, Some(3)), || {
        format!("k=3: {r3:?}")
    })?;
    let r2 = extremal::extremal(2).map_err(|e| e.to_string())?;
    ensure(r2.big_gamma.is_none(), || format!("k=2: {r2:?}"))
}

fn doubling() -> Outcome {
    passed(&lemmas::verify_doubling(512, 32).map_err(|e| e.to_string())?)
}

fn word_hygiene() -> Outcome {
    let word = thue_morse::prefix(1 << 20).map_err(|e| e.to_string())?;
    for pattern in lemmas::FORBIDDEN_FACTORS {
        let needle: thue_morse::FiniteWord = pattern
            .parse()
            .map_err(|e: tm_antipower::Error| e.to_string())?;
        ensure(!word.contains_factor(&needle), || {
            format!("{pattern} occurs")
        })?;
    }
    passed(&lemmas::verify_word_hygiene(20).map_err(|e| e.to_string())?)
}

/// Largest `γ(k) - 3k/2` and `Γ(k) - 3k` over `k ∈ [1024, 4096]`.
const FROZEN_GAMMA_EXCESS: Ratio = Ratio { num: -22, den: 1 };
const FROZEN_BIG_GAMMA_EXCESS: Ratio = Ratio { num: -120, den: 1 };

/// `(series, exp, min, argmin, max, argmax)` over `k ∈ [1024, 4096]`.
type FrozenWindow = (&'static str, u32, (i64, u64), u64, (i64, u64), u64);

const FROZEN_WINDOWS: [FrozenWindow; 6] = [
    ("gamma", 10, (1537, 1708), 1708, (1535, 1038), 1038),
    ("gamma", 11, (3073, 3415), 3415, (3071, 2073), 2073),
    ("gamma", 12, (4033, 4096), 4096, (4033, 4096), 4096),
    ("Gamma", 10, (1529, 1024), 1024, (2991, 1037), 1037),
    ("Gamma", 11, (409, 273), 4095, (6065, 2074), 2074),
    ("Gamma", 12, (6135, 4096), 4096, (6135, 4096), 4096),
];

fn regression_bands() -> Outcome {
    let samples = asymptotics::sweep_extremal(1024, 4096).map_err(|e| e.to_string())?;
    ensure(samples.len() == 3073, || {
        format!("{} samples", samples.len())
    })?;
    for s in &samples {
        ensure(
            s.gamma.ratio.times(s.k) == Some(s.gamma.value as i64),
            || format!("k={}: gamma ratio", s.k),
        )?;
        ensure(s.gamma.value < extremal::certified_cap(s.k), || {
            format!("k={}: gamma above cap", s.k)
        })?;
        let big = s
            .big_gamma
            .ok_or_else(|| format!("k={}: Gamma absent", s.k))?;
        ensure(big.ratio.times(s.k) == Some(big.value as i64), || {
            format!("k={}: Gamma ratio", s.k)
        })?;
        ensure(big.value < 3 * s.k, || {
            format!("k={}: Gamma = {} not below 3k", s.k, big.value)
        })?;
    }
    let excess = asymptotics::band_excess(&samples).ok_or("empty sweep")?;
    ensure(excess.gamma <= FROZEN_GAMMA_EXCESS, || {
        format!("gamma band exceeded: {}", excess.gamma)
    })?;
    ensure(
        excess
            .big_gamma
            .is_some_and(|g| g <= FROZEN_BIG_GAMMA_EXCESS),
        || format!("Gamma band exceeded: {:?}", excess.big_gamma),
    )?;
    let series = asymptotics::extremal_series(&samples);
    let lookup = |name: &str, exp: u32| -> Option<DyadicWindow> {
        series
            .iter()
            .find(|(n, _)| *n == name)
            .and_then(|(_, ws)| ws.iter().find(|w| w.exp == exp).copied())
    };
    for (name, exp, min, argmin, max, argmax) in FROZEN_WINDOWS {
        let w = lookup(name, exp).ok_or_else(|| format!("no {name} window at 2^{exp}"))?;
        ensure(
            w.min == Ratio::new(min.0, min.1)
                && w.argmin == argmin
                && w.max == Ratio::new(max.0, max.1)
                && w.argmax == argmax,
            || format!("{name} window 2^{exp} changed: {w:?}"),
        )?;
    }
    Ok(())
}

fn render_all() -> Result<Vec<u8>, String> {
    let mut out = Vec::new();
    let kappas = asymptotics::sweep_kappa(1, 999).map_err(|e| e.to_string())?;
    asymptotics::write_kappa_csv(&kappas, &mut out).map_err(|e| e.to_string())?;
    let ext = asymptotics::sweep_extremal(1, 512).map_err(|e| e.to_string())?;
    asymptotics::write_extremal_csv(&ext, &mut out).map_err(|e| e.to_string())?;
    asymptotics::write_windows_csv(&asymptotics::extremal_series(&ext), &mut out)
        .map_err(|e| e.to_string())?;
    for report in [
        lemmas::verify_window_17_6(10),
        lemmas::verify_8x_family(9),
        lemmas::verify_congruence(31, 256),
    ] {
        let report = report.map_err(|e| e.to_string())?;
        out.extend(serde_json::to_vec(&report).map_err(|e| e.to_string())?);
        out.extend(report.to_text().into_bytes());
    }
    let scan = asymptotics::conjecture_scan(7, Ratio::new(1, 32)).map_err(|e| e.to_string())?;
    out.extend(serde_json::to_vec(&scan).map_err(|e| e.to_string())?);
    Ok(out)
}

fn determinism() -> Outcome {
    let first = render_all()?;
    ensure(first == render_all()?, || "repeated run differs".into())?;
    #[cfg(feature = "parallel")]
    {
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| e.to_string())?
            .install(render_all)?;
        ensure(first == single, || "single-threaded run differs".into())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("exact small values, pruned vs unpruned", 1, small_values),
        (
            "exact families 2^i+1 (i=5..14), 2^i+3 (i=5..13)",
            60,
            exact_power_families,
        ),
        ("exact family 2^(2i)-3 (i=3..6)", 60, exact_square_family),
        ("17/6 window lemma (i=10..14)", 300, window_lemma),
        ("digit tables", 1, digit_tables),
        (
            "shift criterion vs direct (n<=63, i<=6, c<=256)",
            30,
            shift_criterion,
        ),
        (
            "congruence of equal blocks (n<=99, ordinals<=4096)",
            120,
            congruence,
        ),
        (
            "extremal vs direct definition (k<=64)",
            60,
            extremal_consistency,
        ),
        ("doubling (n<=512, k<=32)", 60, doubling),
        ("word hygiene on 2^20 letters", 5, word_hygiene),
        ("regression bands (k=1024..4096)", 600, regression_bands),
        ("determinism of CSV/JSON output", 600, determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (idx, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome =
            panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            ensure(elapsed <= Duration::from_secs(limit), || {
                format!("over the {limit} s limit")
            })
        });
        let status = if outcome.is_ok() { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2}: {status} {name} ({:.3} s, limit {limit} s)",
            idx + 1,
            elapsed.as_secs_f64()
        );
        if let Err(reason) = outcome {
            println!("              {reason}");
            failures += 1;
        }
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use proptest::prelude::*;

use tm_antipower::antipower::{self, BlockRef, ShiftQuery};
use tm_antipower::asymptotics::{self, RatioSample};
use tm_antipower::kappa;
use tm_antipower::thue_morse::{self, FiniteWord};
use tm_antipower::Ratio;

fn odd(max: u64) -> impl Strategy<Value = u64> {
    (0..max / 2).prop_map(|h| 2 * h + 1)
}

proptest! {
    #[test]
    fn letter_recurrence(n in 0u64..u64::MAX / 2) {
        prop_assert_eq!(thue_morse::letter(2 * n), thue_morse::letter(n));
        prop_assert_eq!(thue_morse::letter(2 * n + 1), thue_morse::letter(n).complement());
    }

    #[test]
    fn factor_matches_letters(start in 0u64..1 << 40, len in 0u64..300) {
        let w = thue_morse::factor(start, len).unwrap();
        prop_assert_eq!(w.len(), len);
        for i in 0..len {
            prop_assert_eq!(w.get(i), Some(thue_morse::letter(start + i)));
        }
    }

    #[test]
    fn word_text_round_trip(start in 0u64..1 << 20, len in 0u64..200) {
        let w = thue_morse::factor(start, len).unwrap();
        let text = w.to_string();
        prop_assert_eq!(&text.parse::<FiniteWord>().unwrap(), &w);
        let json = serde_json::to_string(&w).unwrap();
        prop_assert_eq!(serde_json::from_str::<FiniteWord>(&json).unwrap(), w);
    }

    #[test]
    fn shift_criterion_agrees_with_direct(n in odd(400), c in 0u64..2000, exponent in 0u32..11) {
        let q = ShiftQuery { len: n, c, exponent };
        let (a, b) = q.ordinals();
        let direct = antipower::blocks_equal_direct(
            BlockRef::new(n, a).unwrap(),
            BlockRef::new(n, b).unwrap(),
        ).unwrap();
        prop_assert_eq!(antipower::blocks_equal_shift(q).unwrap(), direct);
    }

    #[test]
    fn kappa_witness_is_sound(n in odd(3000)) {
        let r = kappa::kappa(n, None).unwrap();
        let (c, later) = r.witness;
        prop_assert_eq!(later, r.kappa);
        prop_assert!(c < later);
        prop_assert!(r.kappa >= kappa::lower_bound(n).unwrap());
        let (x, y) = (BlockRef::new(n, c).unwrap(), BlockRef::new(n, later).unwrap());
        prop_assert!(antipower::blocks_equal_direct(x, y).unwrap());
        prop_assert!(antipower::matching_pair_congruence_check(x, y).unwrap());
        // Nothing earlier repeats.
        prop_assert!(antipower::ap_membership(n, r.kappa - 1).unwrap());
        prop_assert!(!antipower::ap_membership(n, r.kappa).unwrap());
    }

    #[test]
    fn membership_is_monotone_in_k(n in 1u64..300, k in 1u64..60) {
        if !antipower::ap_membership(n, k).unwrap() {
            prop_assert!(!antipower::ap_membership(n, k + 1).unwrap());
        }
    }

    #[test]
    fn doubling_preserves_membership(n in 1u64..2000, k in 1u64..40) {
        prop_assert_eq!(
            antipower::ap_membership(n, k).unwrap(),
            antipower::ap_membership(2 * n, k).unwrap()
        );
    }

    #[test]
    fn ratio_exactness(index in 1u64..1 << 40, value in 0u64..1 << 40) {
        let s = RatioSample::new(index, value).unwrap();
        prop_assert_eq!(s.ratio.times(index), Some(value as i64));
        let approx: f64 = s.ratio.to_decimal().parse().unwrap();
        prop_assert!((approx - value as f64 / index as f64).abs() <= 5e-7);
    }

    #[test]
    fn ratio_order_matches_cross_product(a in -1000i64..1000, b in 1u64..1000, c in -1000i64..1000, d in 1u64..1000) {
        let (x, y) = (Ratio::new(a, b), Ratio::new(c, d));
        prop_assert_eq!(x.cmp(&y), (a * d as i64).cmp(&(c * b as i64)));
    }

    #[test]
    fn sweep_is_deterministic(lo in odd(200), len in 0u64..40) {
        let hi = lo + 2 * len;
        let a = asymptotics::sweep_kappa(lo, hi).unwrap();
        let b = asymptotics::sweep_kappa(lo, hi).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.len() as u64, len + 1);
        prop_assert!(a.windows(2).all(|w| w[0].record.n + 2 == w[1].record.n));
    }
}

//! Mood index and the big-seller / big-buyer excess demand curves.
//!
//! The mood index is the log of the latest price over its `n`-day mean. The
//! big seller only trades into rallies (`x > 0`) and the big buyer only into
//! declines (`x < 0`), so at most one of the two curves is nonzero for any `x`.
//!
//! ```text
//!   ed7                                    ed6
//!   0.4 ___                                 0 ________
//!          \                                          \
//!           \_                                         \_
//!             \___ 0                             -0.4     \___
//!      -3w -2w  0                                 0  2w 3w
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest magnitude either trader class can contribute.
pub const SATURATION: f64 = 0.4;

/// Averaging window and membership width of the price model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    n: usize,
    w: f64,
}

impl ModelParams {
    pub const DEFAULT_WINDOW: usize = 3;
    pub const DEFAULT_WIDTH: f64 = 0.01;

    pub fn new(n: usize, w: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Contract("averaging window n must be >= 1".into()));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::Domain(format!(
                "membership width w must be finite and > 0, got {w}"
            )));
        }
        Ok(Self { n, w })
    }

    /// Averaging window length in trading days.
    pub fn window(&self) -> usize {
        self.n
    }

    /// Membership width in log-price units.
    pub fn width(&self) -> f64 {
        self.w
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            n: Self::DEFAULT_WINDOW,
            w: Self::DEFAULT_WIDTH,
        }
    }
}

/// Log deviation of the latest price from its recent mean.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct MoodIndex(f64);

impl MoodIndex {
    pub fn new(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("mood index must be finite, got {x}")));
        }
        Ok(Self(x))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Excess demand of the big seller (`ed6`) and the big buyer (`ed7`).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ExcessDemandPair {
    pub ed6: f64,
    pub ed7: f64,
}

impl ExcessDemandPair {
    pub fn at(x: MoodIndex, w: f64) -> Self {
        Self {
            ed6: ed6(x, w),
            ed7: ed7(x, w),
        }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.ed6, self.ed7]
    }

    pub fn is_zero(&self) -> bool {
        self.ed6 == 0.0 && self.ed7 == 0.0
    }
}

/// `ln(p_t / mean(window))` where `window` holds the `n` most recent closes
/// ending with `p_t`.
pub fn mood_index(window: &[f64], params: &ModelParams) -> Result<MoodIndex> {
    if window.len() != params.window() {
        return Err(Error::Contract(format!(
            "mood index window must hold exactly {} prices, got {}",
            params.window(),
            window.len()
        )));
    }
    if let Some(bad) = window.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::Domain(format!("price must be finite and > 0, got {bad}")));
    }
    let last = window[window.len() - 1];
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    MoodIndex::new((last / mean).ln())
}

/// Big-seller excess demand: zero while the price sits at or below its mean,
/// then falling linearly (slope `-0.1/w`, then `-0.2/w`) to `-0.4` at `x = 3w`.
pub fn ed6(x: MoodIndex, w: f64) -> f64 {
    debug_assert!(w > 0.0);
    let x = x.value();
    if x <= 0.0 {
        0.0
    } else if x < 2.0 * w {
        -0.1 * x / w
    } else if x < 3.0 * w {
        -0.2 * x / w + 0.2
    } else {
        -SATURATION
    }
}

/// Big-buyer excess demand, the mirror image of [`ed6`] on the negative side.
pub fn ed7(x: MoodIndex, w: f64) -> f64 {
    debug_assert!(w > 0.0);
    let x = x.value();
    if x < -3.0 * w {
        SATURATION
    } else if x < -2.0 * w {
        -0.2 * x / w - 0.2
    } else if x < 0.0 {
        -0.1 * x / w
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn mi(x: f64) -> MoodIndex {
        MoodIndex::new(x).unwrap()
    }

    #[test]
    fn paper_defaults_are_exact() {
        let p = ModelParams::default();
        assert_eq!(p.window(), 3);
        assert_eq!(p.width(), 0.01);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(matches!(ModelParams::new(0, 0.01), Err(Error::Contract(_))));
        assert!(matches!(ModelParams::new(3, 0.0), Err(Error::Domain(_))));
        assert!(matches!(ModelParams::new(3, f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn mood_index_examples() {
        let p = ModelParams::default();
        assert_eq!(mood_index(&[10.0, 10.0, 10.0], &p).unwrap().value(), 0.0);
        let one = ModelParams::new(1, 0.01).unwrap();
        assert_eq!(mood_index(&[42.5], &one).unwrap().value(), 0.0);
        let x = mood_index(&[10.0, 10.0, 10.3], &p).unwrap().value();
        assert_abs_diff_eq!(x, (10.3f64 / 10.1).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(x, 0.0196078, epsilon = 1e-6);
    }

    #[test]
    fn mood_index_errors() {
        let p = ModelParams::default();
        assert!(matches!(mood_index(&[10.0, 0.0, 10.0], &p), Err(Error::Domain(_))));
        assert!(matches!(mood_index(&[10.0, -1.0, 10.0], &p), Err(Error::Domain(_))));
        assert!(matches!(mood_index(&[10.0, 10.0], &p), Err(Error::Contract(_))));
    }

    #[test]
    fn ed6_examples() {
        assert_eq!(ed6(mi(-0.02), 0.01), 0.0);
        assert_abs_diff_eq!(ed6(mi(0.03), 0.01), -0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(ed6(mi(0.01), 0.01), -0.1, epsilon = 1e-15);
        assert_eq!(ed6(mi(1.0), 0.01), -0.4);
    }

    #[test]
    fn ed7_examples() {
        assert_eq!(ed7(mi(-0.05), 0.01), 0.4);
        assert_eq!(ed7(mi(0.02), 0.01), 0.0);
        assert_abs_diff_eq!(ed7(mi(-0.01), 0.01), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn zero_mood_has_no_excess_demand() {
        let pair = ExcessDemandPair::at(mi(0.0), 0.01);
        assert!(pair.is_zero());
        assert!(pair.ed6.is_sign_positive() && pair.ed7.is_sign_positive());
    }

    proptest! {
        #[test]
        fn complementary_and_bounded(x in -1.0f64..1.0, w in 1e-4f64..0.5) {
            let (a, b) = (ed6(mi(x), w), ed7(mi(x), w));
            prop_assert_eq!(a * b, 0.0);
            prop_assert!((-0.4..=0.0).contains(&a));
            prop_assert!((0.0..=0.4).contains(&b));
        }

        #[test]
        fn nonincreasing(x in -1.0f64..1.0, dx in 0.0f64..0.1, w in 1e-4f64..0.5) {
            prop_assert!(ed6(mi(x + dx), w) <= ed6(mi(x), w));
            prop_assert!(ed7(mi(x + dx), w) <= ed7(mi(x), w));
        }

        #[test]
        fn depends_only_on_ratio(x in -0.1f64..0.1, w in 1e-3f64..0.1, c in 0.01f64..100.0) {
            prop_assert!((ed6(mi(x), w) - ed6(mi(c * x), c * w)).abs() <= 1e-12);
            prop_assert!((ed7(mi(x), w) - ed7(mi(c * x), c * w)).abs() <= 1e-12);
        }
    }
}

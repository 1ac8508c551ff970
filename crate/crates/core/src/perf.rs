//! Two-class performances, importances and the ranking-score family.
//!
//! A [`Performance`] is a probability mass over the four outcomes of a
//! two-class classification. An [`Importance`] weights those outcomes, and
//! the ranking score is the importance-weighted share of correct outcomes:
//!
//! ```text
//! R_I(P) = (I(tn) P(tn) + I(tp) P(tp)) / (I(tn) P(tn) + I(fp) P(fp) + I(fn) P(fn) + I(tp) P(tp))
//! ```
//!
//! Every importance reduces to a point `(a, b)` of the unit square (the
//! Tile), and importances sharing the same point induce the same ordering of
//! performances.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a performance or distribution.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Sums closer to 1 than this are kept as-is instead of being rescaled.
const EXACT_MASS: f64 = 1e-12;

/// Outcome of a two-class classification, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Tn,
    Fp,
    Fn,
    Tp,
}

impl Outcome {
    /// Canonical order `(tn, fp, fn, tp)`.
    pub const ALL: [Outcome; 4] = [Outcome::Tn, Outcome::Fp, Outcome::Fn, Outcome::Tp];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_correct(self) -> bool {
        matches!(self, Outcome::Tn | Outcome::Tp)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Outcome::Tn => "tn",
            Outcome::Fp => "fp",
            Outcome::Fn => "fn",
            Outcome::Tp => "tp",
        };
        f.write_str(name)
    }
}

/// Validates a non-negative mass vector and rescales it to total 1.
///
/// Components may undershoot 0 by at most the tolerance (clamped to 0). Sums
/// within [`MASS_TOLERANCE`] of 1 are accepted; sums that are already within
/// rounding of 1 are left untouched so that serialized values reload to the
/// same bits.
pub(crate) fn normalize_mass(values: &mut [f64]) -> std::result::Result<(), String> {
    for (k, v) in values.iter_mut().enumerate() {
        if !v.is_finite() {
            return Err(format!("component {k} is not finite"));
        }
        if *v < -MASS_TOLERANCE || *v > 1.0 + MASS_TOLERANCE {
            return Err(format!("component {k} = {v} outside [0, 1]"));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = values.iter().sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(format!("components sum to {total}, expected 1"));
    }
    if (total - 1.0).abs() > EXACT_MASS {
        for v in values.iter_mut() {
            *v /= total;
        }
    }
    Ok(())
}

/// Probability mass over `(tn, fp, fn, tp)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Performance([f64; 4]);

impl Performance {
    pub fn new(tn: f64, fp: f64, fn_: f64, tp: f64) -> Result<Self> {
        Self::from_array([tn, fp, fn_, tp])
    }

    /// Builds a performance from components in canonical order.
    pub fn from_array(mut p: [f64; 4]) -> Result<Self> {
        normalize_mass(&mut p).map_err(Error::InvalidPerformance)?;
        Ok(Performance(p))
    }

    pub fn get(&self, outcome: Outcome) -> f64 {
        self.0[outcome.index()]
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.0
    }

    pub fn tn(&self) -> f64 {
        self.0[0]
    }
    pub fn fp(&self) -> f64 {
        self.0[1]
    }
    pub fn fn_(&self) -> f64 {
        self.0[2]
    }
    pub fn tp(&self) -> f64 {
        self.0[3]
    }

    /// Ranking score of this performance under `importance`.
    pub fn score(&self, importance: &Importance) -> Result<f64> {
        ranking_score(self, importance)
    }
}

/// Non-negative outcome weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Importance([f64; 4]);

impl Importance {
    pub fn new(tn: f64, fp: f64, fn_: f64, tp: f64) -> Result<Self> {
        Self::from_array([tn, fp, fn_, tp])
    }

    pub fn from_array(w: [f64; 4]) -> Result<Self> {
        if let Some(v) = w.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidImportance(format!(
                "weight {v} is not a finite non-negative number"
            )));
        }
        if w[0] + w[3] <= 0.0 {
            return Err(Error::InvalidImportance(
                "I(tn) + I(tp) must be positive".into(),
            ));
        }
        if w[1] + w[2] <= 0.0 {
            return Err(Error::InvalidImportance(
                "I(fp) + I(fn) must be positive".into(),
            ));
        }
        Ok(Importance(w))
    }

    /// Uniform importance, whose ranking score is the accuracy.
    pub fn uniform() -> Self {
        Importance([1.0; 4])
    }

    pub fn get(&self, outcome: Outcome) -> f64 {
        self.0[outcome.index()]
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.0
    }

    pub fn tile_coord(&self) -> TileCoord {
        tile_coords(self)
    }
}

/// A point `(a, b)` of the Tile.
///
/// `a` balances true positives against true negatives, `b` balances false
/// negatives against false positives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TileCoord {
    pub a: f64,
    pub b: f64,
}

impl TileCoord {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
            return Err(Error::InvalidCoord { a, b });
        }
        Ok(TileCoord { a, b })
    }

    pub fn importance(&self) -> Importance {
        canonical_importance(*self)
    }
}

impl fmt::Display for TileCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a, self.b)
    }
}

impl std::str::FromStr for TileCoord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected `a,b`, got `{s}`")))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad coordinate `{x}`: {e}")))
        };
        TileCoord::new(parse(a)?, parse(b)?)
    }
}

/// Importance-weighted share of correct outcomes.
pub fn ranking_score(perf: &Performance, imp: &Importance) -> Result<f64> {
    let p = perf.0;
    let w = imp.0;
    let correct = w[0] * p[0] + w[3] * p[3];
    let total = correct + w[1] * p[1] + w[2] * p[2];
    if total <= 0.0 {
        return Err(Error::UndefinedScore);
    }
    Ok((correct / total).clamp(0.0, 1.0))
}

/// Tile point of an importance: `a = I(tp) / (I(tn) + I(tp))`,
/// `b = I(fn) / (I(fp) + I(fn))`.
pub fn tile_coords(imp: &Importance) -> TileCoord {
    let w = imp.0;
    TileCoord {
        a: w[3] / (w[0] + w[3]),
        b: w[2] / (w[1] + w[2]),
    }
}

/// Canonical importance `(1 - a, 1 - b, b, a)` of a Tile point.
pub fn canonical_importance(coord: TileCoord) -> Importance {
    Importance([1.0 - coord.a, 1.0 - coord.b, coord.b, coord.a])
}

/// Maps `v` in `[lower, upper]` to the performance with
/// `P(tn) = P(tp) = ½ (v - l) / (u - l)` and `P(fp) = P(fn) = ½ (u - v) / (u - l)`.
///
/// Every ranking score of the result is strictly increasing in `v`.
pub fn value_to_performance(v: f64, lower: f64, upper: f64) -> Result<Performance> {
    if lower >= upper || !lower.is_finite() || !upper.is_finite() {
        return Err(Error::InvalidRange { lower, upper });
    }
    if !(lower..=upper).contains(&v) {
        return Err(Error::OutOfRange {
            value: v,
            lower,
            upper,
        });
    }
    let good = 0.5 * (v - lower) / (upper - lower);
    let bad = 0.5 * (upper - v) / (upper - lower);
    Performance::new(good, bad, bad, good)
}

/// Convex combination of performances; weights are normalized to sum 1.
pub fn mix_performances<'a, I>(items: I) -> Result<Performance>
where
    I: IntoIterator<Item = (&'a Performance, f64)>,
{
    let mut acc = [0.0; 4];
    let mut total = 0.0;
    for (perf, w) in items {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidWeight(w));
        }
        if w == 0.0 {
            continue;
        }
        for (slot, p) in acc.iter_mut().zip(perf.0) {
            *slot += w * p;
        }
        total += w;
    }
    if total <= 0.0 {
        return Err(Error::AllZeroWeights);
    }
    for slot in acc.iter_mut() {
        *slot /= total;
    }
    Performance::from_array(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn perf(p: [f64; 4]) -> Performance {
        Performance::from_array(p).unwrap()
    }

    #[test]
    fn uniform_importance_gives_accuracy() {
        let p = perf([0.4, 0.1, 0.1, 0.4]);
        assert_abs_diff_eq!(ranking_score(&p, &Importance::uniform()).unwrap(), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn only_rewarded_outcome() {
        let p = perf([0.0, 0.0, 0.0, 1.0]);
        for imp in [[1.0, 1.0, 1.0, 1.0], [0.0, 0.3, 0.0, 2.0], [5.0, 0.0, 1.0, 0.1]] {
            let imp = Importance::from_array(imp).unwrap();
            assert_eq!(ranking_score(&p, &imp).unwrap(), 1.0);
        }
    }

    #[test]
    fn f1_importance() {
        let p = perf([0.5, 0.1, 0.1, 0.3]);
        let imp = Importance::new(0.0, 0.5, 0.5, 1.0).unwrap();
        let f1 = p.tp() / (p.tp() + 0.5 * (p.fp() + p.fn_()));
        assert_abs_diff_eq!(f1, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(ranking_score(&p, &imp).unwrap(), f1, epsilon = 1e-15);
    }

    #[test]
    fn undefined_score_is_an_error() {
        let p = perf([1.0, 0.0, 0.0, 0.0]);
        let imp = Importance::new(0.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(ranking_score(&p, &imp), Err(Error::UndefinedScore));
    }

    #[test]
    fn performance_construction() {
        assert!(Performance::new(0.3, 0.3, 0.3, 0.3).is_err());
        assert!(Performance::new(-0.1, 0.5, 0.3, 0.3).is_err());
        assert!(Performance::new(f64::NAN, 0.5, 0.3, 0.2).is_err());
        let p = Performance::new(0.25, 0.25, 0.25, 0.25 + 5e-10).unwrap();
        assert_abs_diff_eq!(p.as_array().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn importance_invariants() {
        assert!(Importance::new(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(Importance::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(Importance::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(Importance::new(0.0, 0.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn tile_coords_examples() {
        assert_eq!(tile_coords(&Importance::uniform()), TileCoord { a: 0.5, b: 0.5 });
        let f1 = Importance::new(0.0, 0.5, 0.5, 1.0).unwrap();
        assert_eq!(tile_coords(&f1), TileCoord { a: 1.0, b: 0.5 });
        let tpr = Importance::new(0.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(tile_coords(&tpr), TileCoord { a: 1.0, b: 1.0 });
    }

    #[test]
    fn canonical_importance_examples() {
        let c = |a, b| canonical_importance(TileCoord::new(a, b).unwrap()).as_array();
        assert_eq!(c(0.5, 0.5), [0.5; 4]);
        assert_eq!(c(1.0, 0.5), [0.0, 0.5, 0.5, 1.0]);
        assert_eq!(c(0.0, 0.0), [1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn canonical_round_trip_on_lattice() {
        for i in 0..=100 {
            for j in 0..=100 {
                let coord = TileCoord::new(i as f64 / 100.0, j as f64 / 100.0).unwrap();
                let back = tile_coords(&canonical_importance(coord));
                assert!((back.a - coord.a).abs() <= 1e-12 && (back.b - coord.b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn value_conversion_endpoints() {
        assert_eq!(value_to_performance(2.0, 2.0, 6.0).unwrap().as_array(), [0.0, 0.5, 0.5, 0.0]);
        assert_eq!(value_to_performance(6.0, 2.0, 6.0).unwrap().as_array(), [0.5, 0.0, 0.0, 0.5]);
        assert_eq!(value_to_performance(4.0, 2.0, 6.0).unwrap().as_array(), [0.25; 4]);
        assert!(matches!(value_to_performance(1.0, 2.0, 2.0), Err(Error::InvalidRange { .. })));
        assert!(matches!(value_to_performance(7.0, 2.0, 6.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn mixing_examples() {
        let a = perf([0.4, 0.1, 0.1, 0.4]);
        assert_eq!(mix_performances([(&a, 3.7)]).unwrap(), a);

        let tn = perf([1.0, 0.0, 0.0, 0.0]);
        let tp = perf([0.0, 0.0, 0.0, 1.0]);
        assert_eq!(mix_performances([(&tn, 1.0), (&tp, 1.0)]).unwrap().as_array(), [0.5, 0.0, 0.0, 0.5]);

        let b = perf([0.2, 0.2, 0.2, 0.4]);
        let mixed = mix_performances([(&a, 1.0), (&b, 3.0)]).unwrap().as_array();
        for (got, want) in mixed.iter().zip([0.25, 0.175, 0.175, 0.4]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }

        assert_eq!(mix_performances([(&a, 0.0)]), Err(Error::AllZeroWeights));
        assert_eq!(mix_performances(std::iter::empty()), Err(Error::AllZeroWeights));
    }

    #[test]
    fn coord_parsing() {
        assert_eq!("0.5,0.3".parse::<TileCoord>().unwrap(), TileCoord { a: 0.5, b: 0.3 });
        assert!("1.5,0".parse::<TileCoord>().is_err());
        assert!("0.5".parse::<TileCoord>().is_err());
    }

    fn arb_perf() -> impl Strategy<Value = Performance> {
        prop::array::uniform4(0.001f64..1.0).prop_map(|raw| {
            let total: f64 = raw.iter().sum();
            Performance::from_array(raw.map(|v| v / total)).unwrap()
        })
    }

    fn arb_importance() -> impl Strategy<Value = Importance> {
        prop::array::uniform4(0.0f64..1.0)
            .prop_filter("pairs positive", |w| w[0] + w[3] > 1e-6 && w[1] + w[2] > 1e-6)
            .prop_map(|w| Importance::from_array(w).unwrap())
    }

    proptest! {
        #[test]
        fn score_in_unit_interval(p in arb_perf(), imp in arb_importance()) {
            let s = ranking_score(&p, &imp).unwrap();
            prop_assert!((0.0..=1.0).contains(&s));
        }

        #[test]
        fn mixture_score_between_item_scores(
            items in prop::collection::vec((arb_perf(), 0.01f64..5.0), 1..6),
            imp in arb_importance(),
        ) {
            let mixed = mix_performances(items.iter().map(|(p, w)| (p, *w))).unwrap();
            let s = ranking_score(&mixed, &imp).unwrap();
            let scores: Vec<f64> = items.iter().map(|(p, _)| ranking_score(p, &imp).unwrap()).collect();
            let lo = scores.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(s >= lo - 1e-12 && s <= hi + 1e-12);
        }

        #[test]
        fn conversion_is_increasing(imp in arb_importance(), lo in -5.0f64..5.0, width in 0.1f64..10.0) {
            let hi = lo + width;
            let mut prev = f64::NEG_INFINITY;
            for k in 0..=50 {
                let v = lo + width * k as f64 / 50.0;
                let v = v.min(hi);
                let s = ranking_score(&value_to_performance(v, lo, hi).unwrap(), &imp).unwrap();
                prop_assert!(s > prev);
                prev = s;
            }
        }
    }
}

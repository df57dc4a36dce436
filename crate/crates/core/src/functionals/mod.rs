//! Statistics that collapse frame series into utterance-level features, and
//! the named feature sets built from them.

mod sets;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::acoustic::FrameSeries;

pub use sets::{
    gemaps_core, gemaps_feature_names, spectral_feature_names, spectral_set, AcousticConfig, FrameAnalysis,
    GEMAPS_LLDS, GEMAPS_SCALARS, SPECTRAL_LLDS,
};

/// One summary statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stat {
    Mean,
    /// Population standard deviation (divides by n).
    Stddev,
    Min,
    Max,
    Median,
    /// Linear-interpolated percentile, `p` in (0, 100).
    Percentile(f64),
    Range,
    /// OLS slope of value against frame index.
    Slope,
    /// Mean absolute difference of adjacent defined frames.
    DeltaMeanAbs,
}

impl Stat {
    pub fn label(&self) -> String {
        match self {
            Stat::Mean => "mean".into(),
            Stat::Stddev => "stddev".into(),
            Stat::Min => "min".into(),
            Stat::Max => "max".into(),
            Stat::Median => "median".into(),
            Stat::Percentile(p) => format!("p{p}"),
            Stat::Range => "range".into(),
            Stat::Slope => "slope".into(),
            Stat::DeltaMeanAbs => "delta_mean_abs".into(),
        }
    }

    /// Whether the statistic depends on frame order.
    pub fn is_order_sensitive(&self) -> bool {
        matches!(self, Stat::Slope | Stat::DeltaMeanAbs)
    }
}

impl fmt::Display for Stat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Stat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "mean" => Stat::Mean,
            "stddev" | "std" => Stat::Stddev,
            "min" => Stat::Min,
            "max" => Stat::Max,
            "median" => Stat::Median,
            "range" => Stat::Range,
            "slope" => Stat::Slope,
            "delta_mean_abs" => Stat::DeltaMeanAbs,
            other => {
                let p = other
                    .strip_prefix('p')
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| format!("unknown statistic '{other}'"))?;
                if !(p > 0.0 && p < 100.0) {
                    return Err(format!("percentile {p} outside (0, 100)"));
                }
                Stat::Percentile(p)
            }
        })
    }
}

/// Ordered, non-empty set of statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalBank {
    stats: Vec<Stat>,
}

impl FunctionalBank {
    pub fn new(stats: Vec<Stat>) -> Result<Self, String> {
        if stats.is_empty() {
            return Err("functional bank must not be empty".into());
        }
        let mut seen = HashSet::new();
        for s in &stats {
            if let Stat::Percentile(p) = s {
                if !(*p > 0.0 && *p < 100.0) {
                    return Err(format!("percentile {p} outside (0, 100)"));
                }
            }
            if !seen.insert(s.label()) {
                return Err(format!("duplicate statistic '{s}'"));
            }
        }
        Ok(Self { stats })
    }

    pub fn parse(names: &[impl AsRef<str>]) -> Result<Self, String> {
        Self::new(
            names
                .iter()
                .map(|n| n.as_ref().parse())
                .collect::<Result<_, _>>()?,
        )
    }

    pub fn stats(&self) -> &[Stat] {
        &self.stats
    }

    /// {mean, stddev}
    pub fn mean_stddev() -> Self {
        Self {
            stats: vec![Stat::Mean, Stat::Stddev],
        }
    }

    /// {mean, stddev, min, max, median}
    pub fn summary() -> Self {
        Self {
            stats: vec![Stat::Mean, Stat::Stddev, Stat::Min, Stat::Max, Stat::Median],
        }
    }

    /// Larger bank in the spirit of functionals-over-LLD parameter sets.
    pub fn extended() -> Self {
        Self {
            stats: vec![
                Stat::Mean,
                Stat::Stddev,
                Stat::Min,
                Stat::Max,
                Stat::Median,
                Stat::Percentile(1.0),
                Stat::Percentile(10.0),
                Stat::Percentile(90.0),
                Stat::Percentile(99.0),
                Stat::Range,
                Stat::Slope,
                Stat::DeltaMeanAbs,
            ],
        }
    }

    /// Feature names this bank produces for a series called `series`.
    pub fn names(&self, series: &str) -> Vec<String> {
        self.stats.iter().map(|s| format!("{series}_{s}")).collect()
    }
}

/// Named utterance-level features. NaN values are kept as-is.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureVector {
    names: Vec<String>,
    values: Vec<f64>,
    source_id: String,
}

impl FeatureVector {
    pub fn new(source_id: impl Into<String>) -> Self {
        Self {
            names: Vec::new(),
            values: Vec::new(),
            source_id: source_id.into(),
        }
    }

    /// A vector with every listed feature set to NaN.
    pub fn nan_filled(source_id: impl Into<String>, names: &[String]) -> Self {
        let mut fv = Self::new(source_id);
        for n in names {
            fv.push(n.clone(), f64::NAN);
        }
        fv
    }

    /// Appends one feature.
    ///
    /// # Panics
    /// If `name` is already present; feature names are fixed by code and
    /// a duplicate is a programming error.
    pub fn push(&mut self, name: impl Into<String>, value: f64) {
        let name = name.into();
        assert!(
            !self.names.contains(&name),
            "duplicate feature name '{name}'"
        );
        self.names.push(name);
        self.values.push(value);
    }

    pub fn extend(&mut self, other: FeatureVector) {
        for (n, v) in other.names.into_iter().zip(other.values) {
            self.push(n, v);
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.names.iter().map(String::as_str).zip(self.values.iter().copied())
    }
}

/// One feature per statistic, named `<series>_<stat>`. NaN frames are
/// skipped; an all-NaN or empty series yields NaN for every statistic.
pub fn apply_bank(series: &FrameSeries, bank: &FunctionalBank) -> FeatureVector {
    let mut fv = FeatureVector::new("");
    for (stat, value) in bank.stats.iter().zip(compute_stats(&series.values, bank.stats())) {
        fv.push(format!("{}_{}", series.name, stat), value);
    }
    fv
}

/// Values of `stats` over `values`, skipping NaN entries.
pub fn compute_stats(values: &[f64], stats: &[Stat]) -> Vec<f64> {
    let defined: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    if defined.is_empty() {
        return vec![f64::NAN; stats.len()];
    }
    let mut sorted: Option<Vec<f64>> = None;
    let mut sorted_values = || -> Vec<f64> {
        sorted
            .get_or_insert_with(|| {
                let mut s = defined.clone();
                s.sort_by(f64::total_cmp);
                s
            })
            .clone()
    };
    stats
        .iter()
        .map(|stat| match stat {
            Stat::Mean => mean(&defined),
            Stat::Stddev => population_stddev(&defined),
            Stat::Min => defined.iter().copied().fold(f64::INFINITY, f64::min),
            Stat::Max => defined.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Stat::Median => percentile_sorted(&sorted_values(), 50.0),
            Stat::Percentile(p) => percentile_sorted(&sorted_values(), *p),
            Stat::Range => {
                let s = sorted_values();
                s[s.len() - 1] - s[0]
            }
            Stat::Slope => index_slope(values),
            Stat::DeltaMeanAbs => delta_mean_abs(values),
        })
        .collect()
}

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn population_stddev(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

/// Linear interpolation between closest ranks on sorted data.
pub fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

/// OLS slope against frame index over defined frames; NaN with fewer than 2.
fn index_slope(values: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .map(|(i, v)| (i as f64, *v))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Mean |v[t] - v[t-1]| over adjacent pairs where both frames are defined.
fn delta_mean_abs(values: &[f64]) -> f64 {
    let diffs: Vec<f64> = values
        .windows(2)
        .filter(|w| !w[0].is_nan() && !w[1].is_nan())
        .map(|w| (w[1] - w[0]).abs())
        .collect();
    mean(&diffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(values: Vec<f64>) -> FrameSeries {
        FrameSeries::new("x", values, 0.01)
    }

    #[test]
    fn constant_series() {
        let bank = FunctionalBank::parse(&["mean", "stddev", "min", "max"]).unwrap();
        let fv = apply_bank(&series(vec![5.0, 5.0, 5.0]), &bank);
        assert_eq!(fv.names(), &["x_mean", "x_stddev", "x_min", "x_max"]);
        assert_eq!(fv.values(), &[5.0, 0.0, 5.0, 5.0]);
    }

    #[test]
    fn slope_of_line() {
        let bank = FunctionalBank::new(vec![Stat::Slope]).unwrap();
        let fv = apply_bank(&series(vec![1.0, 2.0, 3.0]), &bank);
        assert_eq!(fv.get("x_slope"), Some(1.0));
    }

    #[test]
    fn nan_frames_are_skipped() {
        let bank = FunctionalBank::new(vec![Stat::Mean]).unwrap();
        let fv = apply_bank(&series(vec![1.0, f64::NAN, 3.0]), &bank);
        assert_eq!(fv.get("x_mean"), Some(2.0));
    }

    #[test]
    fn all_nan_gives_nan_everywhere() {
        let fv = apply_bank(&series(vec![f64::NAN; 4]), &FunctionalBank::extended());
        assert!(fv.values().iter().all(|v| v.is_nan()));
        let fv = apply_bank(&series(vec![]), &FunctionalBank::extended());
        assert!(fv.values().iter().all(|v| v.is_nan()));
    }

    #[test]
    fn single_value_stddev_is_zero() {
        let fv = apply_bank(&series(vec![4.0]), &FunctionalBank::mean_stddev());
        assert_eq!(fv.values(), &[4.0, 0.0]);
    }

    #[test]
    fn delta_skips_gaps() {
        let bank = FunctionalBank::new(vec![Stat::DeltaMeanAbs]).unwrap();
        let fv = apply_bank(&series(vec![1.0, 3.0, f64::NAN, 10.0, 9.0]), &bank);
        assert_eq!(fv.values(), &[1.5]);
    }

    #[test]
    fn percentile_interpolates() {
        assert_eq!(percentile_sorted(&[1.0, 2.0, 3.0, 4.0], 50.0), 2.5);
        assert!((percentile_sorted(&[0.0, 10.0], 10.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bank_parsing() {
        assert!(FunctionalBank::parse(&["p10", "median"]).is_ok());
        assert!(FunctionalBank::parse(&["p100"]).is_err());
        assert!(FunctionalBank::parse(&["mean", "mean"]).is_err());
        assert!(FunctionalBank::parse(&["avg"]).is_err());
        assert!(FunctionalBank::new(vec![]).is_err());
        assert_eq!(Stat::Percentile(2.5).label(), "p2.5");
    }

    #[test]
    #[should_panic(expected = "duplicate feature name")]
    fn duplicate_names_panic() {
        let mut fv = FeatureVector::new("a");
        fv.push("x", 1.0);
        fv.push("x", 2.0);
    }

    proptest! {
        #[test]
        fn order_free_stats_are_permutation_invariant(
            mut v in proptest::collection::vec(-1e3f64..1e3, 1..60),
            seed in any::<u64>(),
        ) {
            let bank = FunctionalBank::parse(&["mean", "min", "max", "median", "p10", "range"]).unwrap();
            let a = compute_stats(&v, bank.stats());
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            v.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let b = compute_stats(&v, bank.stats());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
            }
        }

        #[test]
        fn percentiles_are_ordered(v in proptest::collection::vec(-1e3f64..1e3, 1..60)) {
            let s = compute_stats(&v, &[Stat::Min, Stat::Percentile(10.0), Stat::Median, Stat::Max]);
            prop_assert!(s[0] <= s[1] && s[1] <= s[2] && s[2] <= s[3]);
        }
    }
}

use crate::error::{Error, Result};

/// Finite union of closed intervals in `[0, ∞)`. The last interval may be
/// unbounded (`hi = +∞`), which is how tails `[τ, ∞)` are expressed.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurableSubset {
    intervals: Vec<(f64, f64)>,
    total_measure: f64,
}

impl MeasurableSubset {
    /// Intervals may be given in any order; they must have positive length
    /// and must not overlap (shared endpoints are allowed, they have measure 0).
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(lo, hi) in &intervals {
            if !(lo >= 0.0) || !lo.is_finite() || hi.is_nan() || !(hi > lo) {
                return Err(Error::Input(format!("malformed interval [{lo}, {hi}]")));
            }
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in intervals.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(Error::Input(format!(
                    "overlapping intervals [{}, {}] and [{}, {}]",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        let total_measure = intervals.iter().map(|(lo, hi)| hi - lo).sum();
        Ok(Self {
            intervals,
            total_measure,
        })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, hi)])
    }

    /// `[τ, ∞)`.
    pub fn tail(tau: f64) -> Result<Self> {
        Self::new(vec![(tau, f64::INFINITY)])
    }

    /// `[0, ∞)`.
    pub fn half_line() -> Self {
        Self::tail(0.0).expect("[0, inf) is well formed")
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        Self::new(all)
    }

    /// Image under an increasing map sending `[0, ∞)` into itself.
    pub fn image<F: Fn(f64) -> f64>(&self, map: F) -> Result<Self> {
        let mapped = self
            .intervals
            .iter()
            .map(|&(lo, hi)| {
                let hi = if hi.is_infinite() { f64::INFINITY } else { map(hi) };
                (map(lo), hi)
            })
            .collect();
        Self::new(mapped)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_is_sum_of_lengths() {
        let s = MeasurableSubset::new(vec![(3.0, 4.5), (0.0, 1.0)]).unwrap();
        assert_eq!(s.total_measure(), 2.5);
        assert_eq!(s.intervals()[0], (0.0, 1.0));
    }

    #[test]
    fn overlap_and_degenerate_intervals_are_rejected() {
        assert!(MeasurableSubset::new(vec![(0.0, 2.0), (1.0, 3.0)]).is_err());
        assert!(MeasurableSubset::new(vec![(1.0, 1.0)]).is_err());
        assert!(MeasurableSubset::new(vec![(-1.0, 1.0)]).is_err());
        // touching endpoints are fine
        assert!(MeasurableSubset::new(vec![(0.0, 1.0), (1.0, 2.0)]).is_ok());
    }

    #[test]
    fn image_under_dilation() {
        let s = MeasurableSubset::interval(1.0, 2.0).unwrap();
        let im = s.image(|t| 2.0 * t).unwrap();
        assert_eq!(im.intervals(), &[(2.0, 4.0)]);
        assert!(MeasurableSubset::tail(3.0).unwrap().total_measure().is_infinite());
    }
}

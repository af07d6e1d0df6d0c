use serde::Serialize;

use crate::error::{Error, Result};

/// Values `h(k/N)` for `k = 0..=N`, in units of `N·log d`.
///
/// Arbitrary functions on the grid are representable; [`in_gamma`] checks
/// the properties every realized entropy profile has.
///
/// [`in_gamma`]: EntropyProfile::in_gamma
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyProfile {
    values: Vec<f64>,
}

impl EntropyProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("a profile needs at least the value at 0".into()));
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self {
            values: vec![value; n + 1],
        }
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `h(k/N)`.
    pub fn at(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// `h(1)`, the normalized total entropy.
    pub fn total(&self) -> f64 {
        self.values[self.n()]
    }

    /// Zero at the origin, nondecreasing, with increments at most `1/N`.
    pub fn in_gamma(&self, tol: f64) -> bool {
        let step = 1.0 / self.n().max(1) as f64;
        self.values[0].abs() <= tol
            && self.values.windows(2).all(|w| {
                let inc = w[1] - w[0];
                inc >= -tol && inc <= step + tol
            })
    }

    /// `max_k |h(k/N) − g(k/N)|`.
    pub fn sup_distance(&self, other: &EntropyProfile) -> Result<f64> {
        check_same_n(self.n(), other.n())?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

pub(crate) fn check_same_n(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::SizeMismatch { expected, found })
    }
}

/// Monte Carlo estimate of selected profile points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledProfile {
    pub n: usize,
    pub points: Vec<SampledPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledPoint {
    pub k: usize,
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl SampledProfile {
    /// The point estimates as a full profile, when every size `0..=N` was
    /// sampled.
    pub fn to_profile(&self) -> Option<EntropyProfile> {
        let mut values = vec![f64::NAN; self.n + 1];
        for p in &self.points {
            values[p.k] = p.mean;
        }
        values
            .iter()
            .all(|v| v.is_finite())
            .then_some(EntropyProfile { values })
    }
}

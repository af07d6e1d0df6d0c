//! Sparse random systems: the empirical law of `d^M` independent uniform
//! draws from `{0,…,d−1}^N`, and the exact expected subset entropies of
//! that construction.

use std::collections::HashMap;

use serde::Serialize;

use crate::coeffs::{ln_binomial, Family};
use crate::error::{Error, Result};
use crate::info::{profile_from_table, Limits, SupportTable};
use crate::intricacy::{deficit_from_profile, DeficitReport};
use crate::law::{Configuration, SystemLaw};
use crate::profile::EntropyProfile;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConstructionSpec {
    pub d: u32,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
}

/// `⌊xN⌋`, tolerant of representation error in `x·N`.
pub fn floor_fraction(x: f64, n: usize) -> usize {
    (x * n as f64 + 1e-9).floor().max(0.0) as usize
}

impl ConstructionSpec {
    pub fn new(d: u32, n: usize, m: usize, seed: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("d = {d} must be at least 2")));
        }
        if n == 0 {
            return Err(Error::Domain("N must be at least 1".into()));
        }
        if m > n {
            return Err(Error::Domain(format!("M = {m} must not exceed N = {n}")));
        }
        Ok(Self { d, n, m, seed })
    }

    /// Spec with `M = ⌊xN⌋`.
    pub fn from_fraction(d: u32, n: usize, x: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} must lie in [0,1]")));
        }
        Self::new(d, n, floor_fraction(x, n), seed)
    }

    /// `d^M`, the number of draws.
    pub fn draws(&self) -> Option<u64> {
        (self.d as u64).checked_pow(self.m as u32)
    }
}

/// Draws `d^M` configurations with one [`SplitMix64`] stream seeded by
/// `spec.seed`, symbol by symbol in coordinate order, and returns their
/// empirical law. Colliding draws accumulate weight.
pub fn sample_sparse_system(spec: &ConstructionSpec, limits: &Limits) -> Result<SystemLaw> {
    let draws = spec
        .draws()
        .filter(|&n| n <= limits.support_cap)
        .ok_or(Error::Cap {
            what: "number of draws d^M",
            value: spec.draws().unwrap_or(u64::MAX),
            cap: limits.support_cap,
            hint: "lower M or raise the support cap",
        })?;
    let mut rng = SplitMix64::new(spec.seed);
    let mut tally: HashMap<Vec<u32>, u64> = HashMap::new();
    for _ in 0..draws {
        let config: Vec<u32> = (0..spec.n).map(|_| rng.below(spec.d as u64) as u32).collect();
        *tally.entry(config).or_insert(0) += 1;
    }
    let entries = tally
        .into_iter()
        .map(|(c, count)| (Configuration(c), count as f64 / draws as f64))
        .collect();
    SystemLaw::sparse(spec.d, spec.n, entries)
}

/// Expected entropy of `k` coordinates of the construction, in units of
/// `log d`, with the probability mass left out by range truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectedEntropy {
    pub value: f64,
    pub truncated_mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationOptions {
    /// Largest `d^M` summed over its full binomial range.
    pub exact_cap: u64,
    /// Above the cap, sum over mean ± 12 standard deviations instead of
    /// failing.
    pub allow_truncation: bool,
}

impl Default for ExpectationOptions {
    fn default() -> Self {
        Self {
            exact_cap: 1_000_000,
            allow_truncation: true,
        }
    }
}

fn phi(y: f64, ln_d: f64) -> f64 {
    if y > 0.0 {
        -y * y.ln() / ln_d
    } else {
        0.0
    }
}

/// `h_k = E[H(X_{1..k})] / log d` where `d^M ν(y) ~ Binomial(d^M, d^{−k})`.
///
/// Uses `k + E φ(B d^{k−M})` for `k ≤ M` and `M + d^{k−M} E φ(B)` above.
pub fn expected_subset_entropy(
    d: u32,
    n: usize,
    m: usize,
    k: usize,
    options: &ExpectationOptions,
) -> Result<ExpectedEntropy> {
    if k > n {
        return Err(Error::Index { index: k, n });
    }
    if m > n {
        return Err(Error::Domain(format!("M = {m} must not exceed N = {n}")));
    }
    if k == 0 {
        return Ok(ExpectedEntropy {
            value: 0.0,
            truncated_mass: 0.0,
        });
    }
    let draws = (d as u64)
        .checked_pow(m as u32)
        .filter(|&v| v < 1 << 53)
        .ok_or_else(|| Error::Domain(format!("d^M = {d}^{m} is too large to sum")))?;
    let ln_d = (d as f64).ln();
    let q = (d as f64).powi(-(k as i32));
    let nd = draws as f64;
    let (lo, hi) = if draws <= options.exact_cap {
        (0, draws)
    } else if options.allow_truncation {
        let mean = nd * q;
        let sd = (nd * q * (1.0 - q)).sqrt();
        let lo = (mean - 12.0 * sd).floor().max(0.0) as u64;
        let hi = ((mean + 12.0 * sd).ceil() as u64).min(draws);
        (lo, hi)
    } else {
        return Err(Error::Cap {
            what: "number of draws d^M",
            value: draws,
            cap: options.exact_cap,
            hint: "enable truncated summation",
        });
    };
    let (ln_q, ln_1mq) = (q.ln(), (-q).ln_1p());
    let mut mass = 0.0;
    let mut expect = 0.0;
    let scale = (d as f64).powi(k as i32 - m as i32);
    for j in lo..=hi {
        let pmf = (ln_binomial(draws, j) + j as f64 * ln_q + (draws - j) as f64 * ln_1mq).exp();
        mass += pmf;
        let phi_j = if k <= m {
            phi(j as f64 * scale, ln_d)
        } else {
            phi(j as f64, ln_d)
        };
        expect += pmf * phi_j;
    }
    let value = if k <= m {
        k as f64 + expect
    } else {
        m as f64 + scale * expect
    };
    Ok(ExpectedEntropy {
        value,
        truncated_mass: if draws <= options.exact_cap {
            0.0
        } else {
            (1.0 - mass).max(0.0)
        },
    })
}

/// Bounds on `h_k` in units of `log d`: `[k − 2d^{(k−M)/2}, k]` for
/// `k ≤ M` and `[M − d^{M−k}, M]` above.
pub fn flora_envelope(d: u32, m: usize, k: usize) -> (f64, f64) {
    let d = d as f64;
    let (k, m) = (k as f64, m as f64);
    if k <= m {
        (k - 2.0 * d.powf((k - m) / 2.0), k)
    } else {
        (m - d.powf(m - k), m)
    }
}

/// One sampled system with its exact profile and per-family reports.
#[derive(Debug, Clone)]
pub struct Realization {
    pub spec: ConstructionSpec,
    pub law: SystemLaw,
    pub profile: EntropyProfile,
    pub reports: Vec<(Family, DeficitReport)>,
}

impl Realization {
    /// Normalized entropy `H/(N log d)`.
    pub fn x(&self) -> f64 {
        self.profile.total()
    }
}

pub fn realized_profile(spec: &ConstructionSpec, families: &[Family], limits: &Limits) -> Result<Realization> {
    limits.check_subsets(spec.n)?;
    let law = sample_sparse_system(spec, limits)?;
    let entropies = SupportTable::new(&law).all_subsets(limits.exec);
    let profile = profile_from_table(&entropies, spec.n, spec.d);
    let reports = families
        .iter()
        .map(|f| Ok((*f, deficit_from_profile(&profile, &*f.table(spec.n)?, spec.d)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Realization {
        spec: *spec,
        law,
        profile,
        reports,
    })
}

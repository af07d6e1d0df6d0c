//! Mixing measures and the intricacy coefficients they generate.
//!
//! A weakly additive, exchangeable intricacy is determined by a law on
//! `[0,1]` symmetric under `w ↦ 1−w`; its size-`N` coefficients are the
//! mixed moments `c_k = E[W^k (1−W)^(N−k)]`. Supported measures are finite
//! atom sets plus a multiple of Lebesgue measure, which covers every named
//! family in closed form.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Tolerance for measure normalization and symmetry.
pub const MEASURE_TOLERANCE: f64 = 1e-12;

/// Tolerance used by [`validate_coefficients`].
pub const COEFFICIENT_TOLERANCE: f64 = 1e-12;

/// Largest `N` for which binomials are computed in exact integer
/// arithmetic.
const EXACT_BINOMIAL_MAX: usize = 50;

/// `C(n, k)` as a float: exact products up to `n = 50`, log-gamma above.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= EXACT_BINOMIAL_MAX {
        crate::info::binomial_u128(n, k) as f64
    } else {
        let ln = ln_gamma(n as f64 + 1.0) - (ln_gamma(k as f64 + 1.0) + ln_gamma((n - k) as f64 + 1.0));
        ln.exp()
    }
}

/// `ln C(n, k)`, exact for small `n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if n as usize <= EXACT_BINOMIAL_MAX {
        (crate::info::binomial_u128(n as usize, k as usize) as f64).ln()
    } else {
        ln_gamma(n as f64 + 1.0) - (ln_gamma(k as f64 + 1.0) + ln_gamma((n - k) as f64 + 1.0))
    }
}

/// Symmetric law on `[0,1]`: finite atoms plus a uniform-density part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixingMeasure {
    atoms: Vec<(f64, f64)>,
    lebesgue: f64,
}

impl MixingMeasure {
    /// Parses `{"atoms": [[w, mass], ...], "lebesgue": m}` and validates it.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: MixingMeasure = serde_json::from_str(s)?;
        Self::new(raw.atoms, raw.lebesgue)
    }

    /// Validates and builds a measure. Atoms are stored sorted by location.
    pub fn new(mut atoms: Vec<(f64, f64)>, lebesgue: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lebesgue) {
            return Err(Error::InvalidMeasure(format!(
                "Lebesgue mass {lebesgue} is outside [0,1]"
            )));
        }
        for &(w, m) in &atoms {
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::InvalidMeasure(format!("atom location {w} is outside [0,1]")));
            }
            if m.is_nan() || m <= 0.0 || m.is_infinite() {
                return Err(Error::InvalidMeasure(format!("atom mass {m} is not positive")));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum::<f64>() + lebesgue;
        if (total - 1.0).abs() > MEASURE_TOLERANCE {
            return Err(Error::InvalidMeasure(format!("total mass {total} is not 1")));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(w, m) in &atoms {
            let mirrored = atoms.iter().any(|&(w2, m2)| {
                (w2 - (1.0 - w)).abs() <= MEASURE_TOLERANCE && (m2 - m).abs() <= MEASURE_TOLERANCE
            });
            if !mirrored {
                return Err(Error::InvalidMeasure(format!(
                    "atom ({w}, {m}) has no mirror image of equal mass at {}",
                    1.0 - w
                )));
            }
        }
        Ok(Self { atoms, lebesgue })
    }

    /// Lebesgue measure: the neural complexity of Edelman, Sporns and Tononi.
    pub fn est() -> Self {
        Self {
            atoms: Vec::new(),
            lebesgue: 1.0,
        }
    }

    /// Dirac mass at 1/2.
    pub fn uniform() -> Self {
        Self {
            atoms: vec![(0.5, 1.0)],
            lebesgue: 0.0,
        }
    }

    /// Equal atoms at `p` and `1−p`; collapses to [`uniform`] at `p = 1/2`.
    ///
    /// [`uniform`]: MixingMeasure::uniform
    pub fn p_symmetric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("p = {p} must lie in (0,1)")));
        }
        if p == 0.5 {
            return Ok(Self::uniform());
        }
        Self::new(vec![(p, 0.5), (1.0 - p, 0.5)], 0.0)
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn lebesgue(&self) -> f64 {
        self.lebesgue
    }

    /// Whether `x` lies in the closed support: an atom location, or anywhere
    /// in `[0,1]` when the density part is present.
    pub fn support_contains(&self, x: f64) -> bool {
        (self.lebesgue > 0.0 && (0.0..=1.0).contains(&x))
            || self.atoms.iter().any(|&(w, _)| (w - x).abs() <= MEASURE_TOLERANCE)
    }

    fn cache_key(&self) -> (Vec<(u64, u64)>, u64) {
        (
            self.atoms.iter().map(|(w, m)| (w.to_bits(), m.to_bits())).collect(),
            self.lebesgue.to_bits(),
        )
    }
}

/// Coefficients `c_k`, `k = 0..=N`, of an intricacy at size `N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable {
    n: usize,
    c: Vec<f64>,
}

impl CoefficientTable {
    /// Wraps raw values without checking them; see [`validate_coefficients`].
    pub fn from_values(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidTable("a table needs N + 1 ≥ 1 values".into()));
        }
        Ok(Self { n: c.len() - 1, c })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.c
    }

    pub fn at(&self, k: usize) -> f64 {
        self.c[k]
    }
}

/// `c_k = ∫ w^k (1−w)^(N−k) λ(dw)` in closed form.
pub fn coefficient_table(measure: &MixingMeasure, n: usize) -> Result<CoefficientTable> {
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    let mut c = vec![0.0; n + 1];
    for k in 0..=n / 2 {
        let mut value = 0.0;
        for &(w, m) in measure.atoms() {
            if (w - 0.5).abs() <= MEASURE_TOLERANCE {
                value += m * 0.5f64.powi(n as i32);
            } else if w < 0.5 {
                let (u, v) = (w, 1.0 - w);
                let (a, b) = (k as i32, (n - k) as i32);
                value += m * (u.powi(a) * v.powi(b) + v.powi(a) * u.powi(b));
            }
        }
        if measure.lebesgue() > 0.0 {
            // Beta integral k!(N−k)!/(N+1)!.
            value += measure.lebesgue() / ((n + 1) as f64 * binomial(n, k));
        }
        c[k] = value;
        c[n - k] = value;
    }
    Ok(CoefficientTable { n, c })
}

/// Bit patterns of a measure's atoms and Lebesgue mass, with `N`.
type CacheKey = ((Vec<(u64, u64)>, u64), usize);

/// Process-wide cache of coefficient tables keyed by `(measure, N)`.
#[derive(Debug, Default)]
pub struct CoefficientCache {
    tables: RwLock<HashMap<CacheKey, Arc<CoefficientTable>>>,
}

impl CoefficientCache {
    pub fn get(&self, measure: &MixingMeasure, n: usize) -> Result<Arc<CoefficientTable>> {
        let key = (measure.cache_key(), n);
        if let Some(t) = self.tables.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(coefficient_table(measure, n)?);
        let mut guard = self.tables.write().expect("cache lock");
        Ok(Arc::clone(guard.entry(key).or_insert(table)))
    }

    pub fn len(&self) -> usize {
        self.tables.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Table from the shared process-wide cache.
pub fn cached_table(measure: &MixingMeasure, n: usize) -> Result<Arc<CoefficientTable>> {
    static CACHE: OnceLock<CoefficientCache> = OnceLock::new();
    CACHE.get_or_init(CoefficientCache::default).get(measure, n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Largest violation observed (0 when none).
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "N={} {:<12} {} (worst {:e})",
                self.n,
                c.name,
                if c.passed { "ok" } else { "FAIL" },
                c.worst
            )?;
        }
        Ok(())
    }
}

/// Checks nonnegativity, strict positivity, symmetry, unit mass and (given the size-`N−1`
/// table) Pascal consistency `c^{N−1}_k = c^N_k + c^N_{k+1}`.
pub fn validate_coefficients(
    table: &CoefficientTable,
    predecessor: Option<&CoefficientTable>,
) -> ValidationReport {
    let n = table.n;
    let c = &table.c;
    let tol = COEFFICIENT_TOLERANCE;
    let mut checks = Vec::new();

    let neg = c.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max);
    let nonfinite = c.iter().any(|v| !v.is_finite());
    checks.push(Check {
        name: "nonnegative",
        passed: neg == 0.0 && !nonfinite,
        worst: neg,
    });

    // Non-null intricacies have every coefficient strictly positive.
    let null = c.iter().all(|&v| v > 0.0);
    checks.push(Check {
        name: "non_null",
        passed: null,
        worst: c.iter().copied().fold(f64::INFINITY, f64::min).min(0.0).abs(),
    });

    let asym = (0..=n).map(|k| (c[k] - c[n - k]).abs()).fold(0.0, f64::max);
    checks.push(Check {
        name: "symmetric",
        passed: asym == 0.0,
        worst: asym,
    });

    let mass: f64 = (0..=n).map(|k| binomial(n, k) * c[k]).sum();
    checks.push(Check {
        name: "unit_mass",
        passed: (mass - 1.0).abs() <= tol,
        worst: (mass - 1.0).abs(),
    });

    if let Some(prev) = predecessor {
        let (passed, worst) = if prev.n + 1 != n {
            (false, f64::INFINITY)
        } else {
            let worst = (0..n)
                .map(|k| (prev.c[k] - (c[k] + c[k + 1])).abs())
                .fold(0.0, f64::max);
            (worst <= tol, worst)
        };
        checks.push(Check {
            name: "pascal",
            passed,
            worst,
        });
    }
    ValidationReport { n, checks }
}

/// Law of `D_N`: `P(D_N = k) = C(N,k) c_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DnLaw {
    n: usize,
    p: Vec<f64>,
}

impl DnLaw {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    /// `E[g(D_N)]`.
    pub fn expect(&self, g: impl Fn(usize) -> f64) -> f64 {
        self.p.iter().enumerate().map(|(k, &p)| p * g(k)).sum()
    }

    /// `E[f(β_N)]` with `β_N = D_N / N`.
    pub fn expect_fraction(&self, f: impl Fn(f64) -> f64) -> f64 {
        let n = self.n as f64;
        self.expect(|k| f(k as f64 / n))
    }
}

pub fn dn_law(table: &CoefficientTable) -> Result<DnLaw> {
    let report = validate_coefficients(table, None);
    if !report.passed() {
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        return Err(Error::InvalidTable(format!("failed checks: {}", failed.join(", "))));
    }
    let n = table.n;
    Ok(DnLaw {
        n,
        p: (0..=n).map(|k| binomial(n, k) * table.c[k]).collect(),
    })
}

/// Named intricacy families, written `est`, `uniform` or `p-sym:<p>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Est,
    Uniform,
    PSymmetric(f64),
}

impl Family {
    pub fn measure(&self) -> MixingMeasure {
        match *self {
            Family::Est => MixingMeasure::est(),
            Family::Uniform => MixingMeasure::uniform(),
            Family::PSymmetric(p) => {
                MixingMeasure::p_symmetric(p).expect("p validated at construction")
            }
        }
    }

    pub fn table(&self, n: usize) -> Result<Arc<CoefficientTable>> {
        cached_table(&self.measure(), n)
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Est => f.write_str("est"),
            Family::Uniform => f.write_str("uniform"),
            Family::PSymmetric(p) => write!(f, "p-sym:{p}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "est" => Ok(Family::Est),
            "uniform" => Ok(Family::Uniform),
            other => {
                let p = other
                    .strip_prefix("p-sym:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::Domain(format!(
                            "unknown family {other:?}; expected est, uniform or p-sym:<p>"
                        ))
                    })?;
                MixingMeasure::p_symmetric(p)?;
                Ok(Family::PSymmetric(p))
            }
        }
    }
}

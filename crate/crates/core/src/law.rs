//! Configurations, coordinate subsets and probability laws on `{0,…,d−1}^N`.
//!
//! Configurations are indexed in mixed-radix order with coordinate 1 (index
//! 0 here) as the most significant base-`d` digit. Bit `i` of a
//! [`SubsetMask`] selects coordinate index `i`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on total mass; laws within it are renormalized.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Largest dense table accepted (`d^N` entries).
pub const MAX_DENSE_LEN: u64 = 1 << 26;

/// One joint value of the system.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration(pub Vec<u32>);

impl Configuration {
    pub fn new(symbols: Vec<u32>, d: u32) -> Result<Self> {
        if let Some(s) = symbols.iter().find(|&&s| s >= d) {
            return Err(Error::InvalidLaw(format!(
                "symbol {s} is not below the alphabet size {d}"
            )));
        }
        Ok(Self(symbols))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.0
    }

    /// Mixed-radix index, first coordinate most significant.
    pub fn index(&self, d: u32) -> u64 {
        self.0
            .iter()
            .fold(0u64, |acc, &s| acc * d as u64 + s as u64)
    }

    pub fn from_index(d: u32, n: usize, mut index: u64) -> Self {
        let mut symbols = vec![0u32; n];
        for slot in symbols.iter_mut().rev() {
            *slot = (index % d as u64) as u32;
            index /= d as u64;
        }
        Self(symbols)
    }

    /// Restriction to the coordinates in `mask`, in increasing order.
    pub fn project(&self, mask: SubsetMask) -> Configuration {
        Configuration(mask.iter().map(|i| self.0[i]).collect())
    }
}

/// A subset of coordinate indices stored as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SubsetMask(u64);

impl SubsetMask {
    pub const MAX_COORDS: usize = 64;

    pub fn from_bits(bits: u64) -> Self {
        Self(bits)
    }

    pub fn empty() -> Self {
        Self(0)
    }

    pub fn full(n: usize) -> Self {
        assert!(n <= Self::MAX_COORDS);
        if n == 64 {
            Self(u64::MAX)
        } else {
            Self((1u64 << n) - 1)
        }
    }

    pub fn from_coords(coords: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &c in coords {
            if c >= Self::MAX_COORDS {
                return Err(Error::Index {
                    index: c,
                    n: Self::MAX_COORDS,
                });
            }
            bits |= 1 << c;
        }
        Ok(Self(bits))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn size(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, coord: usize) -> bool {
        coord < 64 && self.0 >> coord & 1 == 1
    }

    pub fn complement(self, n: usize) -> Self {
        Self(!self.0 & Self::full(n).0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Checks that the mask only references coordinates below `n`.
    pub fn check(self, n: usize) -> Result<()> {
        if n >= 64 || self.0 >> n == 0 {
            Ok(())
        } else {
            let index = 63 - self.0.leading_zeros() as usize;
            Err(Error::Index { index, n })
        }
    }

    /// Coordinate indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords: Vec<String> = self.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", coords.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Dense(Vec<f64>),
    Sparse(Vec<(Configuration, f64)>),
}

/// A probability measure on `{0,…,d−1}^N`, immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemLaw {
    d: u32,
    n: usize,
    repr: Repr,
}

fn dense_len(d: u32, n: usize) -> Result<u64> {
    let mut len = 1u64;
    for _ in 0..n {
        len = len.checked_mul(d as u64).filter(|&l| l <= MAX_DENSE_LEN).ok_or(
            Error::Cap {
                what: "dense table length d^N",
                value: u64::MAX,
                cap: MAX_DENSE_LEN,
                hint: "use a sparse support list instead",
            },
        )?;
    }
    Ok(len)
}

fn check_shape(d: u32, n: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidLaw(format!("alphabet size d = {d} must be at least 2")));
    }
    if n > SubsetMask::MAX_COORDS {
        return Err(Error::InvalidLaw(format!(
            "system size N = {n} exceeds {}",
            SubsetMask::MAX_COORDS
        )));
    }
    Ok(())
}

/// Validates masses and returns the renormalization factor.
fn check_masses<'a>(probs: impl Iterator<Item = &'a f64>) -> Result<f64> {
    let mut total = 0.0;
    for &p in probs {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidLaw(format!(
                "probability {p} is negative or not finite"
            )));
        }
        total += p;
    }
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidLaw(format!(
            "total mass {total} differs from 1 by more than {MASS_TOLERANCE:e}"
        )));
    }
    Ok(total)
}

impl SystemLaw {
    /// Dense law from `d^N` probabilities in mixed-radix order.
    pub fn dense(d: u32, n: usize, mut probs: Vec<f64>) -> Result<Self> {
        check_shape(d, n)?;
        let len = dense_len(d, n)?;
        if probs.len() as u64 != len {
            return Err(Error::InvalidLaw(format!(
                "dense table has {} entries, expected d^N = {len}",
                probs.len()
            )));
        }
        let total = check_masses(probs.iter())?;
        if total != 1.0 {
            probs.iter_mut().for_each(|p| *p /= total);
        }
        Ok(Self {
            d,
            n,
            repr: Repr::Dense(probs),
        })
    }

    /// Sparse law from weighted configurations. Entries are stored sorted
    /// by configuration.
    pub fn sparse(d: u32, n: usize, mut entries: Vec<(Configuration, f64)>) -> Result<Self> {
        check_shape(d, n)?;
        for (c, _) in &entries {
            if c.len() != n {
                return Err(Error::InvalidLaw(format!(
                    "configuration of length {} in a system of size N = {n}",
                    c.len()
                )));
            }
            Configuration::new(c.0.clone(), d)?;
        }
        // Sorted first so the renormalizing sum does not depend on input order.
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let total = check_masses(entries.iter().map(|(_, p)| p))?;
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidLaw(format!(
                "configuration {:?} appears more than once in the support",
                w[0].0 .0
            )));
        }
        if total != 1.0 {
            entries.iter_mut().for_each(|(_, p)| *p /= total);
        }
        Ok(Self {
            d,
            n,
            repr: Repr::Sparse(entries),
        })
    }

    /// Independent uniform coordinates.
    pub fn uniform(d: u32, n: usize) -> Result<Self> {
        let len = {
            check_shape(d, n)?;
            dense_len(d, n)?
        };
        Self::dense(d, n, vec![1.0 / len as f64; len as usize])
    }

    /// All mass on one configuration.
    pub fn point_mass(d: u32, config: Configuration) -> Result<Self> {
        let n = config.len();
        Self::sparse(d, n, vec![(config, 1.0)])
    }

    /// Uniform on the `d` constant configurations: every coordinate is a
    /// copy of one uniform symbol.
    pub fn diagonal(d: u32, n: usize) -> Result<Self> {
        let entries = (0..d)
            .map(|s| (Configuration(vec![s; n]), 1.0 / d as f64))
            .collect();
        Self::sparse(d, n, entries)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    /// Dense probability table, if the law is stored densely.
    pub fn dense_probs(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Dense(p) => Some(p),
            Repr::Sparse(_) => None,
        }
    }

    /// Number of configurations carrying positive mass.
    pub fn support_size(&self) -> usize {
        match &self.repr {
            Repr::Dense(p) => p.iter().filter(|&&x| x > 0.0).count(),
            Repr::Sparse(e) => e.iter().filter(|(_, p)| *p > 0.0).count(),
        }
    }

    /// Configurations with positive mass, in mixed-radix order.
    pub fn support(&self) -> Vec<(Configuration, f64)> {
        match &self.repr {
            Repr::Dense(probs) => probs
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(i, &p)| (Configuration::from_index(self.d, self.n, i as u64), p))
                .collect(),
            Repr::Sparse(entries) => entries.iter().filter(|(_, p)| *p > 0.0).cloned().collect(),
        }
    }

    /// Pushforward under projection onto the coordinates of `mask`.
    ///
    /// Dense laws are reduced by summing out one axis at a time; sparse laws
    /// tally projected support points.
    pub fn marginal(&self, mask: SubsetMask) -> Result<SystemLaw> {
        mask.check(self.n)?;
        let k = mask.size();
        match &self.repr {
            Repr::Dense(probs) => {
                let mut table = probs.clone();
                let d = self.d as usize;
                // Sum out axes from the last coordinate backwards so that the
                // remaining axes keep their positions.
                let mut dims = self.n;
                for axis in (0..self.n).rev() {
                    if mask.contains(axis) {
                        continue;
                    }
                    let inner = d.pow((dims - axis - 1) as u32);
                    let outer = table.len() / (inner * d);
                    let mut next = vec![0.0; outer * inner];
                    for a in 0..outer {
                        for s in 0..d {
                            let src = &table[(a * d + s) * inner..(a * d + s + 1) * inner];
                            let dst = &mut next[a * inner..(a + 1) * inner];
                            dst.iter_mut().zip(src).for_each(|(t, &v)| *t += v);
                        }
                    }
                    table = next;
                    dims -= 1;
                }
                Ok(SystemLaw {
                    d: self.d,
                    n: k,
                    repr: Repr::Dense(table),
                })
            }
            Repr::Sparse(entries) => {
                let mut tally: BTreeMap<Configuration, f64> = BTreeMap::new();
                for (c, p) in entries {
                    *tally.entry(c.project(mask)).or_insert(0.0) += p;
                }
                Ok(SystemLaw {
                    d: self.d,
                    n: k,
                    repr: Repr::Sparse(tally.into_iter().collect()),
                })
            }
        }
    }

    /// Probability of a configuration.
    pub fn prob(&self, config: &Configuration) -> f64 {
        match &self.repr {
            Repr::Dense(p) => p[config.index(self.d) as usize],
            Repr::Sparse(e) => e
                .binary_search_by(|(c, _)| c.cmp(config))
                .map(|i| e[i].1)
                .unwrap_or(0.0),
        }
    }

    /// Law of `(X_{perm[0]}, …, X_{perm[N−1]})`.
    pub fn permute_coordinates(&self, perm: &[usize]) -> Result<SystemLaw> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n || perm.iter().any(|&p| p >= self.n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Domain(format!("{perm:?} is not a permutation of 0..{}", self.n)));
        }
        self.map_configs(|c| Configuration(perm.iter().map(|&p| c.0[p]).collect()))
    }

    /// Applies the symbol bijection `relabel[i]` to coordinate `i`.
    pub fn relabel_symbols(&self, relabel: &[Vec<u32>]) -> Result<SystemLaw> {
        if relabel.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: relabel.len(),
            });
        }
        for r in relabel {
            let mut sorted = r.clone();
            sorted.sort_unstable();
            if sorted != (0..self.d).collect::<Vec<_>>() {
                return Err(Error::Domain(format!("{r:?} is not a permutation of the alphabet")));
            }
        }
        self.map_configs(|c| {
            Configuration(c.0.iter().enumerate().map(|(i, &s)| relabel[i][s as usize]).collect())
        })
    }

    fn map_configs(&self, f: impl Fn(&Configuration) -> Configuration) -> Result<SystemLaw> {
        match &self.repr {
            Repr::Dense(probs) => {
                let mut out = vec![0.0; probs.len()];
                for (i, &p) in probs.iter().enumerate() {
                    let c = Configuration::from_index(self.d, self.n, i as u64);
                    out[f(&c).index(self.d) as usize] = p;
                }
                Ok(SystemLaw {
                    d: self.d,
                    n: self.n,
                    repr: Repr::Dense(out),
                })
            }
            Repr::Sparse(entries) => {
                let mapped = entries.iter().map(|(c, p)| (f(c), *p)).collect();
                SystemLaw::sparse(self.d, self.n, mapped)
            }
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: LawFile = serde_json::from_str(s)?;
        file.into_law()
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&LawFile::from(self)).expect("law serializes")
    }
}

/// On-disk form of a [`SystemLaw`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawFile {
    pub d: u32,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<SupportEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dense: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportEntry {
    pub config: Vec<u32>,
    pub p: f64,
}

impl LawFile {
    pub fn into_law(self) -> Result<SystemLaw> {
        if self.n == 0 {
            return Err(Error::InvalidLaw("system size N must be at least 1".into()));
        }
        match (self.support, self.dense) {
            (Some(support), None) => SystemLaw::sparse(
                self.d,
                self.n,
                support
                    .into_iter()
                    .map(|e| (Configuration(e.config), e.p))
                    .collect(),
            ),
            (None, Some(dense)) => SystemLaw::dense(self.d, self.n, dense),
            _ => Err(Error::InvalidLaw(
                "exactly one of \"support\" or \"dense\" must be given".into(),
            )),
        }
    }
}

impl From<&SystemLaw> for LawFile {
    fn from(law: &SystemLaw) -> Self {
        let (support, dense) = match &law.repr {
            Repr::Dense(p) => (None, Some(p.clone())),
            Repr::Sparse(e) => (
                Some(
                    e.iter()
                        .map(|(c, p)| SupportEntry {
                            config: c.0.clone(),
                            p: *p,
                        })
                        .collect(),
                ),
                None,
            ),
        };
        LawFile {
            d: law.d,
            n: law.n,
            support,
            dense,
        }
    }
}

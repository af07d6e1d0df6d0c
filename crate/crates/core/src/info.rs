//! Exact entropies, mutual informations and entropy profiles.
//!
//! All raw quantities are in nats. Subset entropies are computed by
//! partition refinement over the support: the partition of support points
//! induced by `X_S` is refined one coordinate at a time, so a whole
//! enumeration of `2^N` subsets costs `O(2^N · |support|)`.

use serde::Serialize;

use crate::exec::{map_indexed, Exec};
use crate::law::{SubsetMask, SystemLaw};
use crate::profile::{EntropyProfile, SampledPoint, SampledProfile};
use crate::rng::{derive_seed, SplitMix64};
use crate::error::{Error, Result};

/// Default largest `N` for which all `2^N` subsets are enumerated.
pub const DEFAULT_SUBSET_CAP: usize = 22;

/// Default largest support drawn by the sparse construction (`d^M`).
pub const DEFAULT_SUPPORT_CAP: u64 = 1 << 20;

/// Caps and execution strategy shared by the enumeration-heavy operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub subset_cap: usize,
    pub support_cap: u64,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            subset_cap: DEFAULT_SUBSET_CAP,
            support_cap: DEFAULT_SUPPORT_CAP,
            exec: Exec::default(),
        }
    }
}

impl Limits {
    pub fn sequential() -> Self {
        Self {
            exec: Exec::Sequential,
            ..Self::default()
        }
    }

    pub fn check_subsets(&self, n: usize) -> Result<()> {
        if n > self.subset_cap {
            Err(Error::Cap {
                what: "system size N",
                value: n as u64,
                cap: self.subset_cap as u64,
                hint: "use the sampled profile instead of exhaustive enumeration",
            })
        } else {
            Ok(())
        }
    }
}

/// `−Σ p log p` over a mass vector, skipping zero entries.
pub fn entropy_of_masses<'a>(masses: impl IntoIterator<Item = &'a f64>) -> f64 {
    masses
        .into_iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

pub fn entropy(law: &SystemLaw) -> f64 {
    match law.dense_probs() {
        Some(p) => entropy_of_masses(p),
        None => entropy_of_masses(law.support().iter().map(|(_, p)| p)),
    }
}

/// Normalized entropy `H(X)/(N log d)`.
pub fn normalized_entropy(law: &SystemLaw) -> f64 {
    entropy(law) / (law.n() as f64 * (law.d() as f64).ln())
}

pub fn marginal(law: &SystemLaw, mask: SubsetMask) -> Result<SystemLaw> {
    law.marginal(mask)
}

/// `H(X_S)`.
pub fn subset_entropy(law: &SystemLaw, mask: SubsetMask) -> Result<f64> {
    mask.check(law.n())?;
    Ok(SupportTable::new(law).entropy(mask))
}

/// `MI(X_S, X_{S^c}) = H(X_S) + H(X_{S^c}) − H(X)`, zero for `S ∈ {∅, I}`.
pub fn mutual_information(law: &SystemLaw, mask: SubsetMask) -> Result<f64> {
    mask.check(law.n())?;
    let full = SubsetMask::full(law.n());
    if mask.is_empty() || mask == full {
        return Ok(0.0);
    }
    let table = SupportTable::new(law);
    Ok(table.entropy(mask) + table.entropy(mask.complement(law.n())) - table.entropy(full))
}

/// `H(X | X_S) = H(X) − H(X_S)`.
pub fn conditional_entropy(law: &SystemLaw, mask: SubsetMask) -> Result<f64> {
    mask.check(law.n())?;
    let full = SubsetMask::full(law.n());
    if mask == full {
        return Ok(0.0);
    }
    let table = SupportTable::new(law);
    Ok(table.entropy(full) - table.entropy(mask))
}

/// The support of a law laid out column by column for fast refinement.
#[derive(Debug, Clone)]
pub struct SupportTable {
    d: usize,
    n: usize,
    columns: Vec<Vec<u32>>,
    weights: Vec<f64>,
}

/// Number of leading coordinates whose inclusion pattern defines one
/// enumeration task. Fixed, so the split never depends on thread count.
const TASK_PREFIX: usize = 6;

impl SupportTable {
    pub fn new(law: &SystemLaw) -> Self {
        let support = law.support();
        let n = law.n();
        let mut columns = vec![Vec::with_capacity(support.len()); n];
        let mut weights = Vec::with_capacity(support.len());
        for (c, p) in &support {
            for (col, &s) in columns.iter_mut().zip(c.symbols()) {
                col.push(s);
            }
            weights.push(*p);
        }
        Self {
            d: law.d() as usize,
            n,
            columns,
            weights,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    /// `H(X_S)` in nats. The mask must lie within `0..N`.
    pub fn entropy(&self, mask: SubsetMask) -> f64 {
        let mut r = Refiner::new(self);
        let mut labels = vec![0u32; self.weights.len()];
        let mut next = labels.clone();
        let mut classes = 1usize.min(self.weights.len());
        for coord in mask.iter() {
            classes = r.refine(&labels, classes, coord, &mut next);
            std::mem::swap(&mut labels, &mut next);
        }
        r.entropy(&labels, classes)
    }

    /// `H(X_S)` for every mask `S`, indexed by the mask bits.
    pub fn all_subsets(&self, exec: Exec) -> Vec<f64> {
        let n = self.n;
        let prefix = n.min(TASK_PREFIX);
        let prefix_masks = 1usize << prefix;
        let chunks: Vec<Vec<(u64, f64)>> = map_indexed(exec, prefix_masks, |p| {
            let mut out = Vec::with_capacity(1 << (n - prefix));
            self.enumerate_from(p as u64, prefix, &mut out);
            out
        });
        let mut table = vec![0.0; 1usize << n];
        for (mask, h) in chunks.into_iter().flatten() {
            table[mask as usize] = h;
        }
        table
    }

    /// Visits every mask whose restriction to the first `prefix`
    /// coordinates is `prefix_bits`.
    fn enumerate_from(&self, prefix_bits: u64, prefix: usize, out: &mut Vec<(u64, f64)>) {
        let m = self.weights.len();
        let mut r = Refiner::new(self);
        let mut levels = vec![vec![0u32; m]; self.n - prefix + 2];
        let mut classes = 1usize.min(m);
        {
            let (first, rest) = levels.split_at_mut(1);
            let (cur, tmp) = (&mut first[0], &mut rest[0]);
            for coord in SubsetMask::from_bits(prefix_bits).iter() {
                classes = r.refine(cur, classes, coord, tmp);
                std::mem::swap(cur, tmp);
            }
        }
        self.visit(&mut r, &mut levels, classes, prefix_bits, prefix, out);
    }

    fn visit(
        &self,
        r: &mut Refiner<'_>,
        levels: &mut [Vec<u32>],
        classes: usize,
        mask: u64,
        start: usize,
        out: &mut Vec<(u64, f64)>,
    ) {
        let (cur, rest) = levels.split_first_mut().expect("level available");
        let cur = &*cur;
        let h = r.entropy(cur, classes);
        if classes == self.weights.len() {
            // Singleton partition: every superset has the same entropy.
            let free = (self.n - start) as u32;
            for t in 0..(1u64 << free) {
                out.push((mask | t << start, h));
            }
            return;
        }
        out.push((mask, h));
        for coord in start..self.n {
            let c = r.refine(cur, classes, coord, &mut rest[0]);
            self.visit(r, rest, c, mask | 1 << coord, coord + 1, out);
        }
    }
}

/// Scratch buffers for refining label arrays.
struct Refiner<'a> {
    table: &'a SupportTable,
    remap: Vec<u32>,
    acc: Vec<f64>,
}

impl<'a> Refiner<'a> {
    fn new(table: &'a SupportTable) -> Self {
        let m = table.weights.len();
        Self {
            table,
            remap: vec![u32::MAX; m.max(1) * table.d],
            acc: vec![0.0; m.max(1)],
        }
    }

    /// Refines `labels` by coordinate `coord` into `out`; labels are
    /// assigned in order of first appearance, so the result is canonical.
    fn refine(&mut self, labels: &[u32], classes: usize, coord: usize, out: &mut [u32]) -> usize {
        let d = self.table.d;
        let col = &self.table.columns[coord];
        let mut next = 0u32;
        for ((o, &l), &s) in out.iter_mut().zip(labels).zip(col) {
            let key = l as usize * d + s as usize;
            let slot = &mut self.remap[key];
            if *slot == u32::MAX {
                *slot = next;
                next += 1;
            }
            *o = *slot;
        }
        for (&l, &s) in labels.iter().zip(col) {
            self.remap[l as usize * d + s as usize] = u32::MAX;
        }
        debug_assert!(classes * d <= self.remap.len());
        next as usize
    }

    fn entropy(&mut self, labels: &[u32], classes: usize) -> f64 {
        let acc = &mut self.acc[..classes];
        acc.iter_mut().for_each(|a| *a = 0.0);
        for (&l, &w) in labels.iter().zip(&self.table.weights) {
            acc[l as usize] += w;
        }
        entropy_of_masses(acc.iter())
    }
}

/// `H(X_S)` for all `2^N` masks, indexed by mask bits.
pub fn subset_entropy_table(law: &SystemLaw, limits: &Limits) -> Result<Vec<f64>> {
    limits.check_subsets(law.n())?;
    Ok(SupportTable::new(law).all_subsets(limits.exec))
}

/// Averages a subset-entropy table by subset size and normalizes by
/// `N log d`.
pub fn profile_from_table(table: &[f64], n: usize, d: u32) -> EntropyProfile {
    let mut sums = vec![0.0; n + 1];
    let mut counts = vec![0u64; n + 1];
    for (mask, &h) in table.iter().enumerate() {
        let k = (mask as u64).count_ones() as usize;
        sums[k] += h;
        counts[k] += 1;
    }
    let scale = n as f64 * (d as f64).ln();
    let mut values: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64 / scale)
        .collect();
    values[0] = 0.0;
    EntropyProfile::new(values).expect("nonempty")
}

/// Exact profile by enumerating all `2^N` subsets.
pub fn entropy_profile_exact(law: &SystemLaw, limits: &Limits) -> Result<EntropyProfile> {
    let table = subset_entropy_table(law, limits)?;
    Ok(profile_from_table(&table, law.n(), law.d()))
}

/// Uniform random `k`-subset of `0..n` by partial shuffle.
pub fn sample_subset(rng: &mut SplitMix64, n: usize, k: usize) -> SubsetMask {
    let mut idx: Vec<usize> = (0..n).collect();
    rng.partial_shuffle(&mut idx, k);
    SubsetMask::from_coords(&idx[..k]).expect("coordinates below 64")
}

/// All `k`-subsets of `0..n` in increasing bit order.
pub fn all_subsets_of_size(n: usize, k: usize) -> Vec<SubsetMask> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![SubsetMask::empty()];
    }
    let limit = if n == 64 { u64::MAX } else { 1u64 << n };
    let mut out = Vec::new();
    let mut v = (1u64 << k) - 1;
    loop {
        out.push(SubsetMask::from_bits(v));
        // Gosper's hack.
        let c = v & v.wrapping_neg();
        let r = v.wrapping_add(c);
        if r == 0 || r >= limit && n < 64 {
            break;
        }
        v = (((r ^ v) >> 2) / c) | r;
        if n < 64 && v >= limit {
            break;
        }
    }
    out
}

pub(crate) fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Options for [`entropy_profile_sampled`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingOptions {
    pub samples_per_size: usize,
    pub seed: u64,
    /// Enumerate all `C(N,k)` subsets when that is no more than the sample
    /// budget.
    pub exhaustive: bool,
    pub exec: Exec,
}

/// Monte Carlo profile: for each requested size `k`, averages normalized
/// `H(X_S)` over uniform `k`-subsets drawn with replacement. Size `k`
/// draws from the sub-stream `derive_seed(seed, k)`.
pub fn entropy_profile_sampled(
    law: &SystemLaw,
    sizes: &[usize],
    options: &SamplingOptions,
) -> Result<SampledProfile> {
    let n = law.n();
    if options.samples_per_size < 2 {
        return Err(Error::Domain("at least two samples per size are required".into()));
    }
    if let Some(&k) = sizes.iter().find(|&&k| k > n) {
        return Err(Error::Index { index: k, n });
    }
    let table = SupportTable::new(law);
    let scale = n as f64 * (law.d() as f64).ln();
    let mut points = Vec::with_capacity(sizes.len());
    for &k in sizes {
        let exhaustive =
            options.exhaustive && binomial_u128(n, k) <= options.samples_per_size as u128;
        let masks = if exhaustive {
            all_subsets_of_size(n, k)
        } else {
            let mut rng = SplitMix64::new(derive_seed(options.seed, k as u64));
            (0..options.samples_per_size)
                .map(|_| sample_subset(&mut rng, n, k))
                .collect()
        };
        let values = map_indexed(options.exec, masks.len(), |i| table.entropy(masks[i]) / scale);
        let (mean, se) = mean_and_se(&values);
        points.push(SampledPoint {
            k,
            mean: if k == 0 { 0.0 } else { mean },
            std_error: if exhaustive { 0.0 } else { se },
            samples: values.len(),
        });
    }
    Ok(SampledProfile { n, points })
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let len = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / len;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (len - 1.0);
    (mean, (var / len).sqrt())
}

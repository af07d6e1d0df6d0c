//! Seeded experiments over the sparse construction: convergence sweeps,
//! profile convergence, the subset-size threshold census, simultaneity
//! across intricacy families, and a small-N maximizer search.

use serde::Serialize;

use crate::coeffs::{binomial, CoefficientTable, Family};
use crate::construction::{realized_profile, ConstructionSpec, floor_fraction};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Exec};
use crate::info::{all_subsets_of_size, entropy_of_masses, mean_and_se, sample_subset, Limits, SupportTable};
use crate::intricacy::{ic_limit, ic_n, ideal_profile};
use crate::law::{Configuration, SubsetMask, SystemLaw};
use crate::profile::EntropyProfile;
use crate::rng::{derive_seed, SplitMix64};

/// One (family, N, seed) cell of a sweep. Field names follow the CSV
/// header `family,d,N,M,seed,x_N,I_N,icn_at_xN,deficit,sup_profile_gap`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub family: String,
    pub d: u32,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    #[serde(rename = "x_N")]
    pub normalized_entropy: f64,
    #[serde(rename = "I_N")]
    pub normalized_intricacy: f64,
    #[serde(rename = "icn_at_xN")]
    pub icn_at_x: f64,
    pub deficit: f64,
    /// `max_k |h_X(k/N) − h*_x(k/N)|` against the target `x`.
    pub sup_profile_gap: f64,
}

/// Sampled systems of one sweep together with their records.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub x: f64,
    pub records: Vec<ExperimentRecord>,
    /// `(N, seed, profile)` for every sampled system.
    pub profiles: Vec<(usize, u64, EntropyProfile)>,
}

/// For each `N`, samples `μ^{N,⌊xN⌋}` for every seed and records every
/// family on the same law. Records are sorted by (family position, N, seed).
pub fn convergence_sweep(
    families: &[Family],
    d: u32,
    x: f64,
    ns: &[usize],
    seeds: &[u64],
    limits: &Limits,
) -> Result<Sweep> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} must lie in [0,1]")));
    }
    let cells: Vec<(usize, u64)> = ns
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| (n, s)))
        .collect();
    let inner = Limits {
        exec: Exec::Sequential,
        ..*limits
    };
    let results = map_indexed(limits.exec, cells.len(), |i| {
        let (n, seed) = cells[i];
        let spec = ConstructionSpec::new(d, n, floor_fraction(x, n), seed)?;
        realized_profile(&spec, families, &inner)
    });
    let mut records = Vec::with_capacity(cells.len() * families.len());
    let mut profiles = Vec::with_capacity(cells.len());
    for r in results {
        let r = r?;
        let ideal = ideal_profile(x, r.spec.n)?;
        let gap = r.profile.sup_distance(&ideal)?;
        for (family, rep) in &r.reports {
            records.push(ExperimentRecord {
                family: family.name(),
                d,
                n: r.spec.n,
                m: r.spec.m,
                seed: r.spec.seed,
                normalized_entropy: rep.x,
                normalized_intricacy: rep.normalized_intricacy,
                icn_at_x: rep.icn_x,
                deficit: rep.deficit,
                sup_profile_gap: gap,
            });
        }
        profiles.push((r.spec.n, r.spec.seed, r.profile));
    }
    let order = |name: &str| families.iter().position(|f| f.name() == name);
    records.sort_by(|a, b| {
        (order(&a.family), a.n, a.seed).cmp(&(order(&b.family), b.n, b.seed))
    });
    Ok(Sweep { x, records, profiles })
}

/// Seed statistics of one family at one `N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendRow {
    pub family: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub seeds: usize,
    pub mean_x: f64,
    pub se_x: f64,
    pub mean_intricacy: f64,
    pub se_intricacy: f64,
    pub mean_gap: f64,
    pub se_gap: f64,
}

/// Seed means per (family, N), in record order.
pub fn seed_means(records: &[ExperimentRecord]) -> Vec<TrendRow> {
    let mut keys: Vec<(String, usize)> = Vec::new();
    for r in records {
        let key = (r.family.clone(), r.n);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(family, n)| {
            let rows: Vec<_> = records.iter().filter(|r| r.family == family && r.n == n).collect();
            let col = |f: fn(&ExperimentRecord) -> f64| -> Vec<f64> { rows.iter().map(|r| f(r)).collect() };
            let (mean_x, se_x) = mean_and_se(&col(|r| r.normalized_entropy));
            let (mean_intricacy, se_intricacy) = mean_and_se(&col(|r| r.normalized_intricacy));
            let (mean_gap, se_gap) = mean_and_se(&col(|r| r.sup_profile_gap));
            TrendRow {
                family,
                n,
                seeds: rows.len(),
                mean_x,
                se_x,
                mean_intricacy,
                se_intricacy,
                mean_gap,
                se_gap,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub count: usize,
    pub mean_gap: f64,
    pub se_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileConvergence {
    pub x: f64,
    pub rows: Vec<GapRow>,
    /// Mean gap strictly decreases from each `N` to the next.
    pub strictly_decreasing: bool,
}

/// Seed-mean sup distance to `h*_x`, grouped by `N` in increasing order.
pub fn profile_convergence(profiles: &[EntropyProfile], x: f64) -> Result<ProfileConvergence> {
    let mut ns: Vec<usize> = profiles.iter().map(|p| p.n()).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::with_capacity(ns.len());
    for n in ns {
        let ideal = ideal_profile(x, n)?;
        let gaps = profiles
            .iter()
            .filter(|p| p.n() == n)
            .map(|p| p.sup_distance(&ideal))
            .collect::<Result<Vec<_>>>()?;
        let (mean_gap, se_gap) = mean_and_se(&gaps);
        rows.push(GapRow {
            n,
            count: gaps.len(),
            mean_gap,
            se_gap: if gaps.len() < 2 { 0.0 } else { se_gap },
        });
    }
    let strictly_decreasing = rows.windows(2).all(|w| w[1].mean_gap < w[0].mean_gap);
    Ok(ProfileConvergence {
        x,
        rows,
        strictly_decreasing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CensusReport {
    pub y: f64,
    pub k: usize,
    pub epsilon: f64,
    pub samples: usize,
    /// Share of subsets with `H(X_S) > (1−ε)|S| log d`.
    pub fraction_near_uniform: f64,
    pub se_uniform: f64,
    /// Share of subsets with `H(X | X_S) < ε x N log d`.
    pub fraction_determining: f64,
    pub se_determining: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensusOptions {
    pub x: f64,
    pub y: f64,
    pub epsilon: f64,
    pub samples: usize,
    pub seed: u64,
    /// Enumerate every `⌊yN⌋`-subset instead of sampling (N ≤ 20 only).
    pub exhaustive: bool,
    pub exec: Exec,
}

/// Largest `N` for which the census may enumerate all subsets.
pub const CENSUS_EXHAUSTIVE_MAX_N: usize = 20;

/// Classifies uniform random `⌊yN⌋`-subsets (drawn with replacement) as
/// nearly uniform and/or nearly determining the whole system.
pub fn threshold_census(law: &SystemLaw, opts: &CensusOptions) -> Result<CensusReport> {
    let n = law.n();
    if !(opts.y > 0.0 && opts.y < 1.0) {
        return Err(Error::Domain(format!("y = {} must lie in (0,1)", opts.y)));
    }
    if !(opts.epsilon > 0.0 && opts.epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon = {} must lie in (0,1)", opts.epsilon)));
    }
    if !(0.0..=1.0).contains(&opts.x) {
        return Err(Error::Domain(format!("x = {} must lie in [0,1]", opts.x)));
    }
    let k = floor_fraction(opts.y, n);
    if k == 0 {
        return Err(Error::Domain(format!("⌊yN⌋ = 0 for y = {} and N = {n}", opts.y)));
    }
    let masks: Vec<SubsetMask> = if opts.exhaustive {
        if n > CENSUS_EXHAUSTIVE_MAX_N {
            return Err(Error::Cap {
                what: "system size N",
                value: n as u64,
                cap: CENSUS_EXHAUSTIVE_MAX_N as u64,
                hint: "sample subsets instead of enumerating them",
            });
        }
        all_subsets_of_size(n, k)
    } else {
        if opts.samples == 0 {
            return Err(Error::Domain("at least one sample is required".into()));
        }
        let mut rng = SplitMix64::new(opts.seed);
        (0..opts.samples).map(|_| sample_subset(&mut rng, n, k)).collect()
    };
    let table = SupportTable::new(law);
    let h_full = table.entropy(SubsetMask::full(n));
    let ln_d = (law.d() as f64).ln();
    let uniform_floor = (1.0 - opts.epsilon) * k as f64 * ln_d;
    let determining_ceiling = opts.epsilon * opts.x * n as f64 * ln_d;
    let flags = map_indexed(opts.exec, masks.len(), |i| {
        let h = table.entropy(masks[i]);
        (h > uniform_floor, h_full - h < determining_ceiling)
    });
    let total = flags.len() as f64;
    let fu = flags.iter().filter(|f| f.0).count() as f64 / total;
    let fd = flags.iter().filter(|f| f.1).count() as f64 / total;
    let se = |f: f64| if opts.exhaustive { 0.0 } else { (f * (1.0 - f) / total).sqrt() };
    Ok(CensusReport {
        y: opts.y,
        k,
        epsilon: opts.epsilon,
        samples: flags.len(),
        fraction_near_uniform: fu,
        se_uniform: se(fu),
        fraction_determining: fd,
        se_determining: se(fd),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyTrend {
    pub family: String,
    /// `i^c(x)`, the limit the seed means should approach.
    pub target: f64,
    pub rows: Vec<TrendRow>,
    /// `|mean I_N − i^c(x)|` decreases strictly with `N`.
    pub gap_decreasing: bool,
    /// Mean `I_N` increases strictly with `N`.
    pub mean_increasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimultaneityReport {
    pub x: f64,
    pub families: Vec<FamilyTrend>,
    pub warnings: Vec<String>,
}

/// Checks that each family's seed-mean intricacy on one shared sequence of
/// sampled laws approaches its own `i^c(x)`.
pub fn simultaneity_check(sweep: &Sweep, families: &[Family]) -> Result<SimultaneityReport> {
    let x = sweep.x;
    let mut warnings = Vec::new();
    for f in families {
        if !f.measure().support_contains(x) {
            let msg = format!("x = {x} is outside the support of the mixing measure of {f}");
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }
    let means = seed_means(&sweep.records);
    let mut out = Vec::with_capacity(families.len());
    for f in families {
        let name = f.name();
        let target = ic_limit(x, &f.measure())?;
        let rows: Vec<TrendRow> = means.iter().filter(|r| r.family == name).cloned().collect();
        if rows.is_empty() {
            return Err(Error::Domain(format!("the sweep has no records for {name}")));
        }
        let gap_decreasing = rows
            .windows(2)
            .all(|w| (w[1].mean_intricacy - target).abs() < (w[0].mean_intricacy - target).abs());
        let mean_increasing = rows.windows(2).all(|w| w[1].mean_intricacy > w[0].mean_intricacy);
        out.push(FamilyTrend {
            family: name,
            target,
            rows,
            gap_decreasing,
            mean_increasing,
        });
    }
    Ok(SimultaneityReport {
        x,
        families: out,
        warnings,
    })
}

/// Soft entropy constraint for [`maximizer_search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyTarget {
    pub x: f64,
    /// Initial penalty weight; doubled at each of five escalation phases.
    pub penalty: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    pub target: Option<EntropyTarget>,
    pub step: f64,
    pub max_n: usize,
    pub max_d: u32,
    pub exec: Exec,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            iterations: 1500,
            seed: 0,
            target: None,
            step: 1.0,
            max_n: 6,
            max_d: 3,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestartOutcome {
    pub restart: usize,
    pub seed: u64,
    /// Intricacy in nats.
    pub intricacy: f64,
    pub normalized_intricacy: f64,
    pub x: f64,
    pub objective: f64,
    /// `i^c_N(x) − I/(N log d)`; nonnegative up to rounding.
    pub certificate: f64,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub law: SystemLaw,
    pub best: RestartOutcome,
    pub restarts: Vec<RestartOutcome>,
}

/// Marginal index of every configuration under every mask.
struct Projections {
    d: usize,
    n: usize,
    size: usize,
    /// `index[mask * size + i]`.
    index: Vec<u32>,
}

impl Projections {
    fn new(d: usize, n: usize) -> Self {
        let size = d.pow(n as u32);
        let mut index = vec![0u32; (1 << n) * size];
        for mask in 0..(1usize << n) {
            for i in 0..size {
                let c = Configuration::from_index(d as u32, n, i as u64);
                let p = c.project(SubsetMask::from_bits(mask as u64)).index(d as u32);
                index[mask * size + i] = p as u32;
            }
        }
        Self { d, n, size, index }
    }

    fn marginal(&self, p: &[f64], mask: usize, out: &mut Vec<f64>) {
        let len = self.d.pow((mask as u64).count_ones());
        out.clear();
        out.resize(len, 0.0);
        let idx = &self.index[mask * self.size..(mask + 1) * self.size];
        for (&j, &w) in idx.iter().zip(p) {
            out[j as usize] += w;
        }
    }
}

struct Evaluation {
    intricacy: f64,
    entropy: f64,
    gradient: Vec<f64>,
}

/// Intricacy `2 Σ_S c_{|S|} H(X_S) − H(X)` and its gradient in `p`.
fn evaluate(proj: &Projections, weights: &[f64], p: &[f64], scratch: &mut Vec<f64>, with_gradient: bool) -> Evaluation {
    let full = (1usize << proj.n) - 1;
    let mut intricacy = 0.0;
    let mut entropy = 0.0;
    let mut gradient = vec![0.0; if with_gradient { proj.size } else { 0 }];
    for (mask, &weight) in weights.iter().enumerate().take(full + 1) {
        proj.marginal(p, mask, scratch);
        let h = entropy_of_masses(scratch.iter());
        let w = 2.0 * weight - if mask == full { 1.0 } else { 0.0 };
        intricacy += w * h;
        if mask == full {
            entropy = h;
        }
        if with_gradient && w != 0.0 {
            let idx = &proj.index[mask * proj.size..(mask + 1) * proj.size];
            for (g, &j) in gradient.iter_mut().zip(idx) {
                *g -= w * (scratch[j as usize].max(1e-300).ln() + 1.0);
            }
        }
    }
    Evaluation {
        intricacy,
        entropy,
        gradient,
    }
}

/// Stochastic exponentiated-gradient ascent of the intricacy over the
/// simplex of laws on `d^N` points, with independent restarts.
///
/// Restart `r` draws from the stream `derive_seed(seed, r)`. With an
/// entropy target the objective is `I/(N log d) − w (x − x*)²` with `w`
/// doubling over five phases; otherwise it is the normalized intricacy.
pub fn maximizer_search(d: u32, n: usize, table: &CoefficientTable, opts: &SearchOptions) -> Result<SearchResult> {
    if n > opts.max_n || d > opts.max_d {
        return Err(Error::Cap {
            what: "dense search size",
            value: (d as u64).pow(n as u32),
            cap: (opts.max_d as u64).pow(opts.max_n as u32),
            hint: "dense search is limited to small N and d",
        });
    }
    if d < 2 || n == 0 {
        return Err(Error::Domain("need d ≥ 2 and N ≥ 1".into()));
    }
    if table.n() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: table.n(),
        });
    }
    if opts.restarts == 0 {
        return Err(Error::Domain("at least one restart is required".into()));
    }
    let proj = Projections::new(d as usize, n);
    let weights: Vec<f64> = (0..1usize << n)
        .map(|m| table.at((m as u64).count_ones() as usize))
        .collect();
    let scale = n as f64 * (d as f64).ln();
    let objective = |ev: &Evaluation, penalty: f64| -> f64 {
        let base = ev.intricacy / scale;
        match opts.target {
            Some(t) => base - penalty * (ev.entropy / scale - t.x).powi(2),
            None => base,
        }
    };

    let runs = map_indexed(opts.exec, opts.restarts, |r| -> Result<(RestartOutcome, Vec<f64>)> {
        let seed = derive_seed(opts.seed, r as u64);
        let mut rng = SplitMix64::new(seed);
        let mut p: Vec<f64> = (0..proj.size).map(|_| -(1.0 - rng.next_f64()).ln() + 1e-12).collect();
        normalize(&mut p);
        let mut scratch = Vec::new();
        let phases = 5;
        let per_phase = (opts.iterations / phases).max(1);
        let mut best_p = p.clone();
        let mut best_obj = f64::NEG_INFINITY;
        for t in 0..opts.iterations {
            let penalty = opts.target.map_or(0.0, |tg| tg.penalty * 2f64.powi((t / per_phase).min(phases - 1) as i32));
            let ev = evaluate(&proj, &weights, &p, &mut scratch, true);
            let obj = objective(&ev, penalty);
            if obj > best_obj {
                best_obj = obj;
                best_p.clone_from(&p);
            }
            let mut g: Vec<f64> = ev.gradient.iter().map(|g| g / scale).collect();
            if let Some(tg) = opts.target {
                // ∂x/∂p_i = −(ln p_i + 1)/(N log d).
                let x = ev.entropy / scale;
                for (gi, &pi) in g.iter_mut().zip(&p) {
                    *gi -= penalty * 2.0 * (x - tg.x) * (-(pi.max(1e-300).ln() + 1.0) / scale);
                }
            }
            let mean: f64 = g.iter().zip(&p).map(|(a, b)| a * b).sum();
            let eta = opts.step / (1.0 + t as f64 / 100.0).sqrt();
            let noise = 0.1 / (1.0 + t as f64);
            for (pi, gi) in p.iter_mut().zip(&g) {
                let jitter = noise * (2.0 * rng.next_f64() - 1.0);
                *pi *= (eta * (gi - mean + jitter)).clamp(-30.0, 30.0).exp();
            }
            normalize(&mut p);
        }
        let final_penalty = opts.target.map_or(0.0, |tg| tg.penalty * 2f64.powi(phases as i32 - 1));
        let ev = evaluate(&proj, &weights, &p, &mut scratch, false);
        if objective(&ev, final_penalty) >= best_obj {
            best_p.clone_from(&p);
        }
        let ev = evaluate(&proj, &weights, &best_p, &mut scratch, false);
        let x = (ev.entropy / scale).clamp(0.0, 1.0);
        let normalized = ev.intricacy / scale;
        Ok((
            RestartOutcome {
                restart: r,
                seed,
                intricacy: ev.intricacy,
                normalized_intricacy: normalized,
                x,
                objective: objective(&ev, final_penalty),
                certificate: ic_n(x, table)? - normalized,
            },
            best_p,
        ))
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let best_idx = runs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.objective.total_cmp(&b.1 .0.objective).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let law = SystemLaw::dense(d, n, runs[best_idx].1.clone())?;
    Ok(SearchResult {
        law,
        best: runs[best_idx].0,
        restarts: runs.into_iter().map(|r| r.0).collect(),
    })
}

fn normalize(p: &mut [f64]) {
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
}

/// Probability that `D_N = k`, exposed for experiment summaries.
pub fn dn_weight(table: &CoefficientTable, k: usize) -> f64 {
    binomial(table.n(), k) * table.at(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{coefficient_table, MixingMeasure};
    use crate::intricacy::intricacy_defn;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn gradient_matches_finite_differences() {
        let proj = Projections::new(2, 3);
        let table = coefficient_table(&MixingMeasure::est(), 3).unwrap();
        let weights: Vec<f64> = (0..8usize).map(|m| table.at(m.count_ones() as usize)).collect();
        let p: Vec<f64> = (1..=8).map(|i| i as f64 / 36.0).collect();
        let mut s = Vec::new();
        let ev = evaluate(&proj, &weights, &p, &mut s, true);
        let h = 1e-6;
        for i in 0..8 {
            let mut up = p.clone();
            up[i] += h;
            let mut dn = p.clone();
            dn[i] -= h;
            let fd = (evaluate(&proj, &weights, &up, &mut s, false).intricacy
                - evaluate(&proj, &weights, &dn, &mut s, false).intricacy)
                / (2.0 * h);
            assert!((fd - ev.gradient[i]).abs() < 1e-6, "coordinate {i}: {fd} vs {}", ev.gradient[i]);
        }
        let law = SystemLaw::dense(2, 3, p).unwrap();
        let direct = intricacy_defn(&law, &table, &Limits::default()).unwrap();
        assert!((direct - ev.intricacy).abs() < 1e-12);
    }

    #[test]
    fn single_coordinate_search_is_zero() {
        let table = coefficient_table(&MixingMeasure::est(), 1).unwrap();
        let opts = SearchOptions {
            restarts: 3,
            iterations: 50,
            ..SearchOptions::default()
        };
        let r = maximizer_search(2, 1, &table, &opts).unwrap();
        assert!(r.restarts.iter().all(|o| o.intricacy.abs() < 1e-15));
    }

    #[test]
    fn two_bit_search_finds_diagonal_value() {
        let table = coefficient_table(&MixingMeasure::est(), 2).unwrap();
        let opts = SearchOptions {
            restarts: 8,
            iterations: 400,
            seed: 3,
            ..SearchOptions::default()
        };
        let r = maximizer_search(2, 2, &table, &opts).unwrap();
        assert!(r.best.intricacy >= LN2 / 3.0 - 1e-6, "{:?}", r.best);
        assert!(r.restarts.iter().all(|o| o.certificate >= -1e-9));
    }

    #[test]
    fn search_caps_and_determinism() {
        let table = coefficient_table(&MixingMeasure::est(), 7).unwrap();
        assert!(matches!(
            maximizer_search(2, 7, &table, &SearchOptions::default()),
            Err(Error::Cap { .. })
        ));
        let t3 = coefficient_table(&MixingMeasure::uniform(), 3).unwrap();
        let opts = SearchOptions {
            restarts: 4,
            iterations: 100,
            seed: 9,
            ..SearchOptions::default()
        };
        let a = maximizer_search(2, 3, &t3, &opts).unwrap();
        let b = maximizer_search(2, 3, &t3, &SearchOptions { exec: Exec::Sequential, ..opts }).unwrap();
        assert_eq!(a.restarts, b.restarts);
        assert_eq!(a.law, b.law);
    }

    #[test]
    fn census_on_named_laws() {
        let opts = CensusOptions {
            x: 1.0,
            y: 0.5,
            epsilon: 0.01,
            samples: 50,
            seed: 1,
            exhaustive: false,
            exec: Exec::default(),
        };
        let product = SystemLaw::uniform(2, 8).unwrap();
        let r = threshold_census(&product, &opts).unwrap();
        assert_eq!(r.fraction_near_uniform, 1.0);
        assert_eq!(r.k, 4);

        let diag = SystemLaw::diagonal(2, 8).unwrap();
        let r = threshold_census(&diag, &CensusOptions { x: 1.0 / 8.0, y: 0.3, ..opts }).unwrap();
        assert_eq!(r.fraction_determining, 1.0);

        assert!(threshold_census(&diag, &CensusOptions { y: 0.05, ..opts }).is_err());
        assert!(threshold_census(&diag, &CensusOptions { epsilon: 1.0, ..opts }).is_err());
    }

    #[test]
    fn exhaustive_census_has_zero_standard_error() {
        let law = SystemLaw::diagonal(3, 6).unwrap();
        let opts = CensusOptions {
            x: 1.0 / 6.0,
            y: 0.5,
            epsilon: 0.2,
            samples: 0,
            seed: 0,
            exhaustive: true,
            exec: Exec::Sequential,
        };
        let r = threshold_census(&law, &opts).unwrap();
        assert_eq!(r.samples, 20);
        assert_eq!((r.se_uniform, r.se_determining), (0.0, 0.0));
    }

    #[test]
    fn sweep_with_m_zero_has_zero_intricacy() {
        let sweep = convergence_sweep(&[Family::Est], 2, 0.0, &[4, 6], &[1, 2, 3], &Limits::default()).unwrap();
        assert_eq!(sweep.records.len(), 6);
        assert!(sweep.records.iter().all(|r| r.normalized_intricacy == 0.0 && r.m == 0));
    }

    #[test]
    fn profile_convergence_of_exact_ideals() {
        let profiles: Vec<_> = [4, 8, 8].iter().map(|&n| ideal_profile(1.0, n).unwrap()).collect();
        let pc = profile_convergence(&profiles, 1.0).unwrap();
        assert_eq!(pc.rows.len(), 2);
        assert!(pc.rows.iter().all(|r| r.mean_gap == 0.0));
        let zeros: Vec<_> = [3, 5].iter().map(|&n| EntropyProfile::constant(n, 0.0)).collect();
        let pc = profile_convergence(&zeros, 0.0).unwrap();
        assert!(pc.rows.iter().all(|r| r.mean_gap == 0.0));
    }

    #[test]
    fn simultaneity_warns_outside_support() {
        let sweep = convergence_sweep(
            &[Family::Est, Family::PSymmetric(0.4)],
            2,
            0.3,
            &[6, 8],
            &[0, 1],
            &Limits::default(),
        )
        .unwrap();
        let r = simultaneity_check(&sweep, &[Family::Est, Family::PSymmetric(0.4)]).unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert!(r.warnings[0].contains("p-sym:0.4"));
        let single = simultaneity_check(&sweep, &[Family::Est]).unwrap();
        assert!(single.warnings.is_empty());
        assert_eq!(single.families.len(), 1);
    }
}

//! Naive reference implementations that enumerate every configuration,
//! independent of the partition-refinement routes under test.

#![allow(dead_code)]

use std::collections::HashMap;

use intricacy::rng::SplitMix64;
use intricacy::SystemLaw;

pub fn decode(d: usize, n: usize, mut idx: usize) -> Vec<usize> {
    let mut c = vec![0; n];
    for slot in c.iter_mut().rev() {
        *slot = idx % d;
        idx /= d;
    }
    c
}

pub fn naive_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum()
}

/// Marginal masses of the coordinates in `mask`, keyed by projected tuple.
pub fn naive_marginal(p: &[f64], d: usize, n: usize, mask: u64) -> HashMap<Vec<usize>, f64> {
    let mut out = HashMap::new();
    for (i, &w) in p.iter().enumerate() {
        let c = decode(d, n, i);
        let key: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| c[j]).collect();
        *out.entry(key).or_insert(0.0) += w;
    }
    out
}

pub fn naive_subset_entropy(p: &[f64], d: usize, n: usize, mask: u64) -> f64 {
    naive_entropy(&naive_marginal(p, d, n, mask).into_values().collect::<Vec<_>>())
}

pub fn naive_mi(p: &[f64], d: usize, n: usize, mask: u64) -> f64 {
    let full = (1u64 << n) - 1;
    if mask == 0 || mask == full {
        return 0.0;
    }
    naive_subset_entropy(p, d, n, mask) + naive_subset_entropy(p, d, n, full ^ mask) - naive_entropy(p)
}

/// `Σ_S c_{|S|} MI(X_S, X_{S^c})` with `c` given per subset size.
pub fn naive_intricacy(p: &[f64], d: usize, n: usize, c: &[f64]) -> f64 {
    (0..1u64 << n)
        .map(|m| c[m.count_ones() as usize] * naive_mi(p, d, n, m))
        .sum()
}

pub fn naive_profile(p: &[f64], d: usize, n: usize) -> Vec<f64> {
    let mut sums = vec![0.0; n + 1];
    let mut counts = vec![0.0; n + 1];
    for m in 0..1u64 << n {
        let k = m.count_ones() as usize;
        sums[k] += naive_subset_entropy(p, d, n, m);
        counts[k] += 1.0;
    }
    let scale = n as f64 * (d as f64).ln();
    sums.iter().zip(&counts).map(|(s, c)| s / c / scale).collect()
}

/// Dense law with skewed weights and roughly a fifth of the entries zero.
pub fn random_dense(rng: &mut SplitMix64, d: u32, n: usize) -> Vec<f64> {
    let len = (d as usize).pow(n as u32);
    loop {
        let mut w: Vec<f64> = (0..len)
            .map(|_| {
                let u = rng.next_f64();
                if u < 0.2 {
                    0.0
                } else {
                    u.powi(3)
                }
            })
            .collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            w.iter_mut().for_each(|v| *v /= total);
            return w;
        }
    }
}

pub fn random_law(rng: &mut SplitMix64, d: u32, n: usize) -> SystemLaw {
    SystemLaw::dense(d, n, random_dense(rng, d, n)).expect("valid random law")
}

/// Composite Simpson rule on `[0,1]`.
pub fn simpson(f: impl Fn(f64) -> f64, intervals: usize) -> f64 {
    let h = 1.0 / intervals as f64;
    let mut s = f(0.0) + f(1.0);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(i as f64 * h);
    }
    s * h / 3.0
}

//! Library routes checked against brute-force enumeration and the
//! entropy inequalities every law satisfies.

mod common;

use common::*;
use intricacy::coeffs::binomial;
use intricacy::info::{subset_entropy_table, SupportTable};
use intricacy::rng::SplitMix64;
use intricacy::{
    coefficient_table, conditional_entropy, entropy, entropy_profile_exact, intricacy_defn, intricacy_from_profile,
    marginal, mutual_information, subset_entropy, Exec, Family, Limits, MixingMeasure, SubsetMask, SystemLaw,
};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn arb_law(max_n: usize) -> impl Strategy<Value = SystemLaw> {
    (2u32..=3, 1..=max_n, any::<u64>()).prop_map(|(d, n, seed)| {
        let mut rng = SplitMix64::new(seed);
        random_law(&mut rng, d, n)
    })
}

fn arb_sparse_law() -> impl Strategy<Value = SystemLaw> {
    (2u32..=4, 2usize..=7, 1usize..40, any::<u64>()).prop_map(|(d, n, draws, seed)| {
        let mut rng = SplitMix64::new(seed);
        let mut entries = std::collections::BTreeMap::new();
        for _ in 0..draws {
            let c: Vec<u32> = (0..n).map(|_| rng.below(d as u64) as u32).collect();
            *entries.entry(c).or_insert(0.0) += 1.0 / draws as f64;
        }
        SystemLaw::sparse(
            d,
            n,
            entries.into_iter().map(|(c, p)| (intricacy::Configuration(c), p)).collect(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn all_operations_match_brute_force(law in arb_law(4)) {
        let (d, n) = (law.d() as usize, law.n());
        let p = law.dense_probs().unwrap().to_vec();
        prop_assert!((entropy(&law) - naive_entropy(&p)).abs() < 1e-12);
        for bits in 0..1u64 << n {
            let m = SubsetMask::from_bits(bits);
            let naive_h = naive_subset_entropy(&p, d, n, bits);
            prop_assert!((subset_entropy(&law, m).unwrap() - naive_h).abs() < 1e-12);
            prop_assert!((entropy(&marginal(&law, m).unwrap()) - naive_h).abs() < 1e-12);
            prop_assert!((mutual_information(&law, m).unwrap() - naive_mi(&p, d, n, bits)).abs() < 1e-12);
            let cond = naive_entropy(&p) - naive_h;
            prop_assert!((conditional_entropy(&law, m).unwrap() - cond).abs() < 1e-12);
        }
        let exact = entropy_profile_exact(&law, &Limits::default()).unwrap();
        for (a, b) in exact.values().iter().zip(naive_profile(&p, d, n)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        for family in [Family::Est, Family::Uniform, Family::PSymmetric(0.3)] {
            let t = family.table(n).unwrap();
            let naive = naive_intricacy(&p, d, n, t.values());
            prop_assert!((intricacy_defn(&law, &t, &Limits::default()).unwrap() - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn marginal_pushforward_matches_brute_force(law in arb_law(4), bits in any::<u64>()) {
        let (d, n) = (law.d() as usize, law.n());
        let bits = bits & ((1 << n) - 1);
        let p = law.dense_probs().unwrap().to_vec();
        let naive = naive_marginal(&p, d, n, bits);
        let m = marginal(&law, SubsetMask::from_bits(bits)).unwrap();
        prop_assert_eq!(m.n(), bits.count_ones() as usize);
        let mass: f64 = m.dense_probs().unwrap().iter().sum();
        prop_assert!((mass - 1.0).abs() < 1e-12);
        for (c, w) in m.support() {
            let key: Vec<usize> = c.symbols().iter().map(|&s| s as usize).collect();
            prop_assert!((naive[&key] - w).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_inequalities(law in prop_oneof![arb_law(5), arb_sparse_law()]) {
        let n = law.n();
        let ln_d = (law.d() as f64).ln();
        let h = subset_entropy_table(&law, &Limits::default()).unwrap();
        for s in 0..1usize << n {
            let size = s.count_ones() as f64;
            prop_assert!(h[s] >= -TOL && h[s] <= size * ln_d + TOL);
            for t in 0..1usize << n {
                if s & t == s {
                    prop_assert!(h[s] <= h[t] + TOL, "monotone");
                }
                if s & t == 0 {
                    prop_assert!(h[s | t] <= h[s] + h[t] + TOL, "subadditive");
                }
            }
            let mi = mutual_information(&law, SubsetMask::from_bits(s as u64)).unwrap();
            let mi_c = mutual_information(&law, SubsetMask::from_bits(s as u64).complement(n)).unwrap();
            prop_assert!(mi >= -TOL);
            prop_assert_eq!(mi, mi_c);
            let cond = conditional_entropy(&law, SubsetMask::from_bits(s as u64)).unwrap();
            prop_assert!(cond >= -TOL);
        }
    }

    #[test]
    fn exact_profiles_lie_in_gamma_with_concave_averages(law in prop_oneof![arb_law(6), arb_sparse_law()]) {
        let n = law.n();
        let profile = entropy_profile_exact(&law, &Limits::default()).unwrap();
        prop_assert!(profile.in_gamma(TOL));
        let scale = n as f64 * (law.d() as f64).ln();
        let hk: Vec<f64> = profile.values().iter().map(|v| v * scale).collect();
        for l in 0..=n {
            for j in 0..=n {
                for k in j..=n {
                    if k + l <= n {
                        prop_assert!(hk[k + l] - hk[k] <= hk[j + l] - hk[j] + 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn sequential_and_parallel_enumeration_agree(law in prop_oneof![arb_law(6), arb_sparse_law()]) {
        let t = SupportTable::new(&law);
        prop_assert_eq!(t.all_subsets(Exec::Sequential), t.all_subsets(Exec::Parallel));
    }

    #[test]
    fn route_equivalence_and_upper_bound(law in arb_law(6)) {
        let n = law.n();
        let ln_d = (law.d() as f64).ln();
        let profile = entropy_profile_exact(&law, &Limits::default()).unwrap();
        let x = (entropy(&law) / (n as f64 * ln_d)).clamp(0.0, 1.0);
        for family in [Family::Est, Family::Uniform, Family::PSymmetric(0.3)] {
            let t = family.table(n).unwrap();
            let defn = intricacy_defn(&law, &t, &Limits::default()).unwrap();
            let via_profile = intricacy_from_profile(&profile, &t, law.d()).unwrap();
            prop_assert!((defn - via_profile).abs() <= 1e-9);
            prop_assert!(defn >= -TOL);
            prop_assert!(defn / (n as f64 * ln_d) <= intricacy::ic_n(x, &t).unwrap() + TOL);
        }
    }

    #[test]
    fn intricacy_invariant_under_group_actions(law in arb_law(5), seed in any::<u64>()) {
        let (d, n) = (law.d(), law.n());
        let mut rng = SplitMix64::new(seed);
        let mut perm: Vec<usize> = (0..n).collect();
        rng.partial_shuffle(&mut perm, n);
        let relabel: Vec<Vec<u32>> = (0..n)
            .map(|_| {
                let mut s: Vec<u32> = (0..d).collect();
                rng.partial_shuffle(&mut s, d as usize);
                s
            })
            .collect();
        let t = Family::Est.table(n).unwrap();
        let lim = Limits::default();
        let base = intricacy_defn(&law, &t, &lim).unwrap();
        let permuted = intricacy_defn(&law.permute_coordinates(&perm).unwrap(), &t, &lim).unwrap();
        let relabeled = intricacy_defn(&law.relabel_symbols(&relabel).unwrap(), &t, &lim).unwrap();
        prop_assert!((base - permuted).abs() < 1e-9);
        prop_assert!((base - relabeled).abs() < 1e-9);
    }
}

#[test]
fn est_coefficients_match_beta_quadrature() {
    for n in 1..=10usize {
        let t = coefficient_table(&MixingMeasure::est(), n).unwrap();
        for k in 0..=n {
            let q = simpson(|w| w.powi(k as i32) * (1.0 - w).powi((n - k) as i32), 2000);
            assert!((t.at(k) - q).abs() < 1e-12, "n={n} k={k}");
        }
    }
}

#[test]
fn p_symmetric_coefficients_match_direct_formula() {
    let p: f64 = 0.3;
    for n in 1..=30usize {
        let t = coefficient_table(&MixingMeasure::p_symmetric(p).unwrap(), n).unwrap();
        for k in 0..=n {
            let (a, b) = (k as i32, (n - k) as i32);
            let direct = 0.5 * (p.powi(a) * (1.0 - p).powi(b) + (1.0 - p).powi(a) * p.powi(b));
            assert!((t.at(k) - direct).abs() <= 1e-15 * direct.max(1e-300));
        }
    }
}

#[test]
fn ic_n_matches_min_identity() {
    for family in [Family::Est, Family::Uniform, Family::PSymmetric(0.3)] {
        for n in 1..=40usize {
            let t = family.table(n).unwrap();
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                let via_min: f64 = (0..=n)
                    .map(|k| {
                        let b = k as f64 / n as f64;
                        binomial(n, k) * t.at(k) * x.min(1.0 - x).min(b).min(1.0 - b)
                    })
                    .sum();
                assert!((intricacy::ic_n(x, &t).unwrap() - via_min).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn ic_limit_shape() {
    let grid: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
    let measures = [
        MixingMeasure::est(),
        MixingMeasure::uniform(),
        MixingMeasure::p_symmetric(0.3).unwrap(),
        MixingMeasure::new(vec![(0.1, 0.2), (0.9, 0.2)], 0.6).unwrap(),
    ];
    for m in &measures {
        let i = |x: f64| intricacy::ic_limit(x, m).unwrap();
        let peak = i(0.5);
        for &x in &grid {
            for &y in &grid {
                assert!((i(x) - i(y)).abs() <= (x - y).abs() + 1e-12, "Lipschitz");
                assert!(i((x + y) / 2.0) >= (i(x) + i(y)) / 2.0 - 1e-12, "concave");
            }
            assert!((i(x) - i(1.0 - x)).abs() < 1e-12, "symmetric");
            assert!(i(x) <= peak + 1e-12, "peak at 1/2");
        }
    }
}

#[test]
fn ic_n_converges_within_half_root_bound() {
    for family in [Family::Est, Family::Uniform, Family::PSymmetric(0.3)] {
        let m = family.measure();
        for n in 1..=64usize {
            let t = family.table(n).unwrap();
            let bound = 0.5 / (n as f64).sqrt();
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                let gap = (intricacy::ic_n(x, &t).unwrap() - intricacy::ic_limit(x, &m).unwrap()).abs();
                assert!(gap <= bound, "{family} N={n} x={x}: {gap} > {bound}");
            }
        }
    }
}

#[test]
fn named_families_validate_up_to_64() {
    for family in [Family::Est, Family::Uniform, Family::PSymmetric(0.3)] {
        let mut prev = None;
        for n in 1..=64usize {
            let t = family.table(n).unwrap();
            let report = intricacy::validate_coefficients(&t, prev.as_deref());
            assert!(report.passed(), "{family}\n{report}");
            let dn = intricacy::dn_law(&t).unwrap();
            for k in 0..=n {
                assert_eq!(dn.probs()[k], dn.probs()[n - k]);
            }
            prev = Some(t);
        }
    }
}

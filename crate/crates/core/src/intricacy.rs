//! Intricacy of a system, the ceilings `i^c_N` and `i^c`, and the deficit
//! identity relating them through the entropy profile.

use serde::Serialize;

use crate::coeffs::{binomial, dn_law, CoefficientTable, MixingMeasure};
use crate::error::{Error, Result};
use crate::info::{profile_from_table, subset_entropy_table, Limits};
use crate::law::SystemLaw;
use crate::profile::{check_same_n, EntropyProfile};

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("x = {x} must lie in [0,1]")))
    }
}

/// `Σ_S c_{|S|} MI(X_S, X_{S^c})` in nats, summed over all `2^N` masks.
pub fn intricacy_defn(law: &SystemLaw, table: &CoefficientTable, limits: &Limits) -> Result<f64> {
    check_same_n(law.n(), table.n())?;
    let entropies = subset_entropy_table(law, limits)?;
    Ok(intricacy_from_entropies(&entropies, table))
}

/// Bipartition sum over a precomputed subset-entropy table.
pub fn intricacy_from_entropies(entropies: &[f64], table: &CoefficientTable) -> f64 {
    let full = entropies.len() - 1;
    let h_full = entropies[full];
    entropies
        .iter()
        .enumerate()
        .skip(1)
        .take(full.saturating_sub(1))
        .map(|(mask, &h)| {
            let k = mask.count_ones() as usize;
            table.at(k) * (h + entropies[full ^ mask] - h_full)
        })
        .sum()
}

/// `G^c_N(h) = 2 Σ_k c_k C(N,k) h(k/N) − h(1)`.
pub fn g_functional(profile: &EntropyProfile, table: &CoefficientTable) -> Result<f64> {
    check_same_n(table.n(), profile.n())?;
    let n = table.n();
    let weighted: f64 = (0..=n)
        .map(|k| table.at(k) * binomial(n, k) * profile.at(k))
        .sum();
    Ok(2.0 * weighted - profile.total())
}

/// Intricacy in nats recovered from a profile: `N log d · G^c_N(h)`.
pub fn intricacy_from_profile(profile: &EntropyProfile, table: &CoefficientTable, d: u32) -> Result<f64> {
    Ok(table.n() as f64 * (d as f64).ln() * g_functional(profile, table)?)
}

/// `h*_x(k/N) = min(k/N, x)`.
pub fn ideal_profile(x: f64, n: usize) -> Result<EntropyProfile> {
    check_unit(x)?;
    EntropyProfile::new((0..=n).map(|k| (k as f64 / n as f64).min(x)).collect())
}

/// `i^c_N(x) = 2 E[min(x, β_N)] − x`.
pub fn ic_n(x: f64, table: &CoefficientTable) -> Result<f64> {
    check_unit(x)?;
    let dn = dn_law(table)?;
    Ok(2.0 * dn.expect_fraction(|b| b.min(x)) - x)
}

/// `i^c(x) = 2 ∫ min(t, x) λ(dt) − x` in closed form.
pub fn ic_limit(x: f64, measure: &MixingMeasure) -> Result<f64> {
    check_unit(x)?;
    let atoms: f64 = measure.atoms().iter().map(|&(w, m)| m * w.min(x)).sum();
    // ∫_0^1 min(t, x) dt = x − x²/2.
    let density = measure.lebesgue() * (x - x * x / 2.0);
    Ok(2.0 * (atoms + density) - x)
}

/// `‖h − g‖_{c,N} = E|h(β_N) − g(β_N)|`.
pub fn profile_norm(h: &EntropyProfile, g: &EntropyProfile, table: &CoefficientTable) -> Result<f64> {
    check_same_n(table.n(), h.n())?;
    check_same_n(table.n(), g.n())?;
    let n = table.n();
    Ok((0..=n)
        .map(|k| table.at(k) * binomial(n, k) * (h.at(k) - g.at(k)).abs())
        .sum())
}

/// Normalized intricacy split into its ceiling and the shortfall of the
/// profile against the ideal one.
///
/// `deficit = G(h*_x) − G(h_X) = 2‖h_X − h*_x‖_{c,N}`, so that
/// `normalized_intricacy = icn_x − deficit` holds exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeficitReport {
    pub d: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub x: f64,
    pub icn_x: f64,
    pub deficit: f64,
    pub normalized_intricacy: f64,
}

/// Builds the report from an exact profile of a system with alphabet `d`.
pub fn deficit_from_profile(profile: &EntropyProfile, table: &CoefficientTable, d: u32) -> Result<DeficitReport> {
    let x = profile.total().clamp(0.0, 1.0);
    let ideal = ideal_profile(x, profile.n())?;
    Ok(DeficitReport {
        d,
        n: profile.n(),
        x,
        icn_x: ic_n(x, table)?,
        deficit: 2.0 * profile_norm(profile, &ideal, table)?,
        normalized_intricacy: g_functional(profile, table)?,
    })
}

pub fn deficit_report(law: &SystemLaw, table: &CoefficientTable, limits: &Limits) -> Result<DeficitReport> {
    check_same_n(law.n(), table.n())?;
    let entropies = subset_entropy_table(law, limits)?;
    let profile = profile_from_table(&entropies, law.n(), law.d());
    deficit_from_profile(&profile, table, law.d())
}

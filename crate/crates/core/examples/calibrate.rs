//! Regenerates `tests/fixtures/calibration.json`:
//!
//! cargo run --release -p intricacy --example calibrate > crates/core/tests/fixtures/calibration.json

use intricacy::experiments::{seed_means, CensusOptions};
use intricacy::{
    convergence_sweep, profile_convergence, sample_sparse_system, threshold_census, ConstructionSpec, Exec,
    Family, Limits,
};
use serde_json::json;

fn main() -> intricacy::Result<()> {
    let families = [Family::Est, Family::Uniform, Family::PSymmetric(0.3)];
    let seeds: Vec<u64> = (0..50).collect();
    let sweep = convergence_sweep(&families, 2, 0.5, &[8, 12, 16], &seeds, &Limits::default())?;
    let profiles: Vec<_> = sweep.profiles.iter().map(|p| p.2.clone()).collect();
    let convergence = profile_convergence(&profiles, 0.5)?;

    let law = sample_sparse_system(&ConstructionSpec::new(2, 14, 7, 0)?, &Limits::default())?;
    let census = [0.25, 0.75]
        .into_iter()
        .map(|y| {
            let opts = CensusOptions {
                x: 0.5,
                y,
                epsilon: 0.1,
                samples: 1000,
                seed: 1,
                exhaustive: false,
                exec: Exec::default(),
            };
            threshold_census(&law, &opts)
        })
        .collect::<intricacy::Result<Vec<_>>>()?;

    let out = json!({
        "sweep": { "d": 2, "x": 0.5, "N": [8, 12, 16], "seeds": 50, "means": seed_means(&sweep.records) },
        "profile_gap": convergence.rows,
        "census": { "d": 2, "N": 14, "M": 7, "law_seed": 0, "census_seed": 1, "reports": census },
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

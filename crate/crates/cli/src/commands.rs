use std::path::Path;

use anyhow::{bail, Context};
use intricacy::coeffs::{binomial, coefficient_table, CoefficientTable};
use intricacy::experiments::{seed_means, CensusOptions, EntropyTarget, SearchOptions};
use intricacy::info::{self, SamplingOptions};
use intricacy::{
    convergence_sweep, deficit_report, dn_law, entropy_profile_exact, entropy_profile_sampled, maximizer_search,
    sample_sparse_system, threshold_census, validate_coefficients, ConstructionSpec, EntropyProfile, Exec,
    ExperimentRecord, Family, Limits, MixingMeasure, SystemLaw,
};
use serde::Serialize;

use crate::output::{num, Format, Sink};
use crate::{Cli, Command, ConstructArgs, Sampling};

pub fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        if !intricacy::exec::set_threads(t) {
            log::warn!("--threads {t} ignored: the worker pool is unavailable");
        }
    }
    let limits = Limits {
        subset_cap: cli.cap_subsets,
        support_cap: cli.cap_support,
        exec: Exec::Parallel,
    };
    let mut sink = Sink::open(cli.out.as_deref(), cli.format)
        .with_context(|| format!("cannot open {}", cli.out.as_deref().unwrap_or(Path::new("stdout")).display()))?;
    match cli.command {
        Command::Entropy { law } => entropy(&mut sink, &load(&law, &limits)?),
        Command::Profile { law, sampling, sizes } => profile(&mut sink, &load(&law, &limits)?, &sampling, sizes, &limits),
        Command::Intricacy { law, family, sampling } => {
            intricacy(&mut sink, &load(&law, &limits)?, &family, &sampling, &limits)
        }
        Command::Coeffs { family, measure, n } => coeffs(&mut sink, family, measure.as_deref(), n),
        Command::Construct { spec } => construct(&mut sink, &spec, &limits),
        Command::Sweep { family, d, x, n, seeds } => sweep(&mut sink, &family, d, x, &n.0, &seeds.0, &limits),
        Command::Census {
            spec,
            family,
            y,
            epsilon,
            samples,
            census_seed,
            exhaustive,
        } => {
            let opts = CensusOptions {
                x: 0.0,
                y: 0.0,
                epsilon,
                samples,
                seed: census_seed,
                exhaustive,
                exec: limits.exec,
            };
            census(&mut sink, &spec, family, &y, opts, &limits)
        }
        Command::Maximize {
            d,
            n,
            family,
            restarts,
            iterations,
            seed,
            x,
            penalty,
            step,
            save_law,
        } => {
            let opts = SearchOptions {
                restarts,
                iterations,
                seed,
                target: x.map(|x| EntropyTarget { x, penalty }),
                step,
                exec: limits.exec,
                ..SearchOptions::default()
            };
            maximize(&mut sink, d, n, family, &opts, save_law.as_deref())
        }
    }
}

fn load(path: &Path, limits: &Limits) -> anyhow::Result<SystemLaw> {
    let law = SystemLaw::from_json_file(path).with_context(|| format!("invalid law file {}", path.display()))?;
    if law.support_size() as u64 > limits.support_cap {
        return Err(intricacy::Error::Cap {
            what: "support size",
            value: law.support_size() as u64,
            cap: limits.support_cap,
            hint: "raise --cap-support",
        }
        .into());
    }
    Ok(law)
}

fn entropy(sink: &mut Sink, law: &SystemLaw) -> anyhow::Result<()> {
    let h = info::entropy(law);
    let x = info::normalized_entropy(law);
    match sink.format() {
        Format::Csv => sink.line(&format!("entropy_nats={}, x={}", num(h), num(x)))?,
        Format::Json => sink.json(&serde_json::json!({ "entropy_nats": h + 0.0, "x": x + 0.0 }))?,
    }
    Ok(())
}

#[derive(Serialize)]
struct ProfileRow {
    k: usize,
    t: f64,
    h: f64,
    std_error: f64,
    samples: u64,
}

fn sampled(law: &SystemLaw, sampling: &Sampling, sizes: &[usize], exec: Exec) -> anyhow::Result<Vec<ProfileRow>> {
    let opts = SamplingOptions {
        samples_per_size: sampling.samples,
        seed: sampling.seed.context("--sampled needs --seed")?,
        exhaustive: true,
        exec,
    };
    let n = law.n() as f64;
    Ok(entropy_profile_sampled(law, sizes, &opts)?
        .points
        .into_iter()
        .map(|p| ProfileRow {
            k: p.k,
            t: p.k as f64 / n,
            h: p.mean,
            std_error: p.std_error,
            samples: p.samples as u64,
        })
        .collect())
}

fn exact_rows(profile: &EntropyProfile) -> Vec<ProfileRow> {
    let n = profile.n();
    profile
        .values()
        .iter()
        .enumerate()
        .map(|(k, &h)| ProfileRow {
            k,
            t: k as f64 / n as f64,
            h,
            std_error: 0.0,
            samples: binomial(n, k).round() as u64,
        })
        .collect()
}

fn profile(
    sink: &mut Sink,
    law: &SystemLaw,
    sampling: &Sampling,
    sizes: Option<Vec<usize>>,
    limits: &Limits,
) -> anyhow::Result<()> {
    let rows = if sampling.sampled {
        let sizes = sizes.unwrap_or_else(|| (0..=law.n()).collect());
        sampled(law, sampling, &sizes, limits.exec)?
    } else {
        exact_rows(&entropy_profile_exact(law, limits)?)
    };
    sink.rows(&rows)
}

#[derive(Serialize)]
struct IntricacyRow {
    family: String,
    d: u32,
    #[serde(rename = "N")]
    n: usize,
    x: f64,
    icn_x: f64,
    deficit: f64,
    normalized_intricacy: f64,
}

fn intricacy(
    sink: &mut Sink,
    law: &SystemLaw,
    families: &[Family],
    sampling: &Sampling,
    limits: &Limits,
) -> anyhow::Result<()> {
    let estimate = if sampling.sampled {
        let rows = sampled(law, sampling, &(0..=law.n()).collect::<Vec<_>>(), limits.exec)?;
        Some(EntropyProfile::new(rows.iter().map(|r| r.h).collect())?)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(families.len());
    for f in families {
        let table = f.table(law.n())?;
        let r = match &estimate {
            Some(p) => intricacy::intricacy::deficit_from_profile(p, &table, law.d())?,
            None => deficit_report(law, &table, limits)?,
        };
        rows.push(IntricacyRow {
            family: f.name(),
            d: r.d,
            n: r.n,
            x: r.x,
            icn_x: r.icn_x,
            deficit: r.deficit,
            normalized_intricacy: r.normalized_intricacy,
        });
    }
    sink.rows(&rows)
}

#[derive(Serialize)]
struct CoeffRow {
    k: usize,
    c: f64,
    binomial: f64,
    dn: f64,
}

fn coeffs(sink: &mut Sink, family: Option<Family>, measure: Option<&Path>, n: usize) -> anyhow::Result<()> {
    let (name, table, prev): (String, CoefficientTable, Option<CoefficientTable>) = match (family, measure) {
        (Some(f), _) => {
            let prev = if n > 1 { Some((*f.table(n - 1)?).clone()) } else { None };
            (f.name(), (*f.table(n)?).clone(), prev)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let m = MixingMeasure::from_json_str(&text)?;
            let prev = if n > 1 { Some(coefficient_table(&m, n - 1)?) } else { None };
            ("custom".to_string(), coefficient_table(&m, n)?, prev)
        }
        (None, None) => bail!("either --family or --measure is required"),
    };
    let report = validate_coefficients(&table, prev.as_ref());
    eprintln!("{name} N={n}\n{report}");
    if !report.passed() {
        return Err(intricacy::Error::InvalidTable(format!("coefficients of {name} at N = {n} fail validation")).into());
    }
    let dn = dn_law(&table)?;
    let rows: Vec<CoeffRow> = (0..=n)
        .map(|k| CoeffRow {
            k,
            c: table.at(k),
            binomial: binomial(n, k),
            dn: dn.probs()[k],
        })
        .collect();
    sink.rows(&rows)
}

fn construction_spec(args: &ConstructArgs) -> anyhow::Result<ConstructionSpec> {
    Ok(match (args.m, args.x) {
        (Some(m), None) => ConstructionSpec::new(args.d, args.n, m, args.seed)?,
        (None, Some(x)) => ConstructionSpec::from_fraction(args.d, args.n, x, args.seed)?,
        _ => bail!("exactly one of --M and --x is required"),
    })
}

fn construct(sink: &mut Sink, args: &ConstructArgs, limits: &Limits) -> anyhow::Result<()> {
    let spec = construction_spec(args)?;
    let law = sample_sparse_system(&spec, limits)?;
    sink.line(&law.to_json_string())?;
    eprintln!(
        "d={} N={} M={} seed={} support={} x_N={}",
        spec.d,
        spec.n,
        spec.m,
        spec.seed,
        law.support_size(),
        num(info::normalized_entropy(&law))
    );
    Ok(())
}

fn sweep(
    sink: &mut Sink,
    families: &[Family],
    d: u32,
    x: f64,
    ns: &[usize],
    seeds: &[u64],
    limits: &Limits,
) -> anyhow::Result<()> {
    if ns.is_empty() || seeds.is_empty() {
        bail!("--N and --seeds must be nonempty");
    }
    // One N at a time so that completed sizes survive a later failure.
    let mut records: Vec<ExperimentRecord> = Vec::new();
    let mut failure = None;
    for &n in ns {
        match convergence_sweep(families, d, x, &[n], seeds, limits) {
            Ok(s) => records.extend(s.records),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let position = |name: &str| families.iter().position(|f| f.name() == name);
    records.sort_by_key(|r| (position(&r.family), r.n, r.seed));
    sink.rows(&records)?;
    for row in seed_means(&records) {
        eprintln!(
            "summary family={} N={} seeds={} mean_x_N={} mean_I_N={} se_I_N={} mean_sup_profile_gap={}",
            row.family,
            row.n,
            row.seeds,
            num(row.mean_x),
            num(row.mean_intricacy),
            num(row.se_intricacy),
            num(row.mean_gap)
        );
    }
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct CensusRow {
    family: String,
    d: u32,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    seed: u64,
    y: f64,
    k: usize,
    epsilon: f64,
    samples: usize,
    frac_uniform: f64,
    se_uniform: f64,
    frac_determining: f64,
    se_determining: f64,
}

fn census(
    sink: &mut Sink,
    args: &ConstructArgs,
    family: Family,
    ys: &[f64],
    mut opts: CensusOptions,
    limits: &Limits,
) -> anyhow::Result<()> {
    let spec = construction_spec(args)?;
    let law = sample_sparse_system(&spec, limits)?;
    opts.x = spec.m as f64 / spec.n as f64;
    let mut rows = Vec::with_capacity(ys.len());
    let mut failure = None;
    for &y in ys {
        match threshold_census(&law, &CensusOptions { y, ..opts }) {
            Ok(r) => rows.push(CensusRow {
                family: family.name(),
                d: spec.d,
                n: spec.n,
                m: spec.m,
                seed: spec.seed,
                y,
                k: r.k,
                epsilon: r.epsilon,
                samples: r.samples,
                frac_uniform: r.fraction_near_uniform,
                se_uniform: r.se_uniform,
                frac_determining: r.fraction_determining,
                se_determining: r.se_determining,
            }),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    sink.rows(&rows)?;
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct RestartRow {
    family: String,
    d: u32,
    #[serde(rename = "N")]
    n: usize,
    restart: usize,
    seed: u64,
    intricacy: f64,
    normalized_intricacy: f64,
    x: f64,
    objective: f64,
    certificate: f64,
}

fn maximize(
    sink: &mut Sink,
    d: u32,
    n: usize,
    family: Family,
    opts: &SearchOptions,
    save_law: Option<&Path>,
) -> anyhow::Result<()> {
    let table = family.table(n)?;
    let result = maximizer_search(d, n, &table, opts)?;
    let rows: Vec<RestartRow> = result
        .restarts
        .iter()
        .map(|o| RestartRow {
            family: family.name(),
            d,
            n,
            restart: o.restart,
            seed: o.seed,
            intricacy: o.intricacy,
            normalized_intricacy: o.normalized_intricacy,
            x: o.x,
            objective: o.objective,
            certificate: o.certificate,
        })
        .collect();
    sink.rows(&rows)?;
    if let Some(path) = save_law {
        std::fs::write(path, result.law.to_json_string() + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    let b = &result.best;
    eprintln!(
        "best restart={} intricacy_nats={} normalized_intricacy={} x={} certificate={}",
        b.restart,
        num(b.intricacy),
        num(b.normalized_intricacy),
        num(b.x),
        num(b.certificate)
    );
    Ok(())
}

//! The five subcommands. Each writes its data files plus a
//! `<command>.meta.json` sidecar holding the config echo and wall time.

use std::path::{Path, PathBuf};
use std::time::Instant;

use decohere::analysis::fit::{REGION_III_Q, REGION_I_DESK_Q};
use decohere::analysis::{
    classify_regions, fit_exp_region, fit_log_region, fit_volume_log, run_sweep, FitResult, FitWindow, SweepConfig,
    SweepTable,
};
use decohere::dense::cross_check_with;
use decohere::perm::factorial;
use decohere::statmech::{
    partition_function, renyi_from_partition, symmetry_audit, Boundary, Engine, HoneycombPatch, SymmetryReport,
};
use decohere::{run_trajectory, BondWeights, Exact, ProtocolParams, Real, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{config_hash, FitKind, NumericMode, RunConfig, StatmechSection};
use crate::error::CliError;
use crate::output::{
    ensure_dir, read_sweep, sweep_rows, write_csv, write_json, CsvMeta, REGIONS_HEADER, REGIONS_SCHEMA, SWEEP_HEADER,
    SWEEP_SCHEMA, TRAJECTORY_HEADER, TRAJECTORY_SCHEMA,
};

pub const CODE_VERSION: &str = concat!("decohere ", env!("CARGO_PKG_VERSION"));

/// Largest `(Q!)²` pair count for which the relabeling audit runs.
const AUDIT_LIMIT: usize = 1_000_000;

pub struct Context {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub fit_input: Option<PathBuf>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    schema: String,
    command: &'a str,
    code_version: &'a str,
    master_seed: u64,
    config_hash: &'a str,
    config: &'a RunConfig,
    outputs: Vec<String>,
    wall_time_seconds: f64,
}

impl Context {
    fn finish(&self, command: &str, seed: u64, hash: &str, outputs: &[&str], start: Instant) -> Result<(), CliError> {
        let meta = Sidecar {
            schema: format!("decohere.{command}.meta/1"),
            command,
            code_version: CODE_VERSION,
            master_seed: seed,
            config_hash: hash,
            config: &self.config,
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            wall_time_seconds: start.elapsed().as_secs_f64(),
        };
        write_json(&self.out_dir.join(format!("{command}.meta.json")), &meta)
    }
}

pub fn simulate(ctx: &Context) -> Result<String, CliError> {
    let start = Instant::now();
    let sec = &ctx.config.simulate;
    sec.validate()?;
    let seed = ctx.config.master_seed;
    let mut params = ProtocolParams::new(sec.l, sec.p, sec.q, seed)?;
    params.initial_state = sec.initial_state;
    if let Some(t) = sec.t_total {
        params.t_total = t;
    }
    if let Some(t) = sec.t_burn_in {
        params.t_burn_in = t;
    }
    if let Some(s) = sec.sample_stride {
        params.sample_stride = s;
    }
    params
        .validate()
        .map_err(|e| CliError::Config(format!("simulate: {e}")))?;
    let record = run_trajectory(&params)?;

    let hash = config_hash("simulate", seed, sec);
    let rows: Vec<Vec<String>> = record
        .samples
        .iter()
        .map(|(t, r)| {
            vec![
                t.to_string(),
                r.s_a.to_string(),
                r.s_b.to_string(),
                r.s_ab.to_string(),
                r.i_ab.to_string(),
                r.rank_k.to_string(),
            ]
        })
        .collect();
    ensure_dir(&ctx.out_dir)?;
    let meta = CsvMeta {
        schema: TRAJECTORY_SCHEMA.into(),
        seed,
        config_hash: hash.clone(),
    };
    write_csv(&ctx.out_dir.join("trajectory.csv"), &meta, &TRAJECTORY_HEADER, &rows)?;
    ctx.finish("simulate", seed, &hash, &["trajectory.csv"], start)?;
    let mean = record.mean();
    Ok(format!(
        "simulate: L={} p={} q={}: {} samples, mean S_A={:.4} I_AB={:.4}, final rank {}",
        params.l,
        params.p,
        params.q,
        rows.len(),
        mean.s_a,
        mean.i_ab,
        record.final_rank
    ))
}

pub fn sweep(ctx: &Context) -> Result<String, CliError> {
    let start = Instant::now();
    let sec = &ctx.config.sweep;
    sec.validate()?;
    let seed = ctx.config.master_seed;
    let mut cfg = SweepConfig::new(
        SweepConfig::product_grid(&sec.l, &sec.p, &sec.q),
        sec.realizations,
        seed,
    );
    cfg.schedule = sec.schedule;
    cfg.initial_state = sec.initial_state;
    // The CLI installs the global pool, so the sweep uses it directly.
    let table = run_sweep(&cfg, 0)?;

    let hash = config_hash("sweep", seed, sec);
    let meta = |schema: &str| CsvMeta {
        schema: schema.into(),
        seed,
        config_hash: hash.clone(),
    };
    ensure_dir(&ctx.out_dir)?;
    write_csv(
        &ctx.out_dir.join("sweep.csv"),
        &meta(SWEEP_SCHEMA),
        &SWEEP_HEADER,
        &sweep_rows(&table),
    )?;
    let mut outputs = vec!["sweep.csv"];
    let mut note = String::new();
    match classify_regions(&table, &sec.regions) {
        Ok(labels) => {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let rows: Vec<Vec<String>> = labels
                .iter()
                .map(|r| {
                    let regime = serde_json::to_value(r.regime).expect("regime serializes");
                    vec![
                        r.l.to_string(),
                        r.p.to_string(),
                        r.q.to_string(),
                        regime.as_str().unwrap_or_default().to_string(),
                        r.dev_zero.to_string(),
                        opt(r.dev_log),
                        opt(r.dev_exp),
                    ]
                })
                .collect();
            write_csv(
                &ctx.out_dir.join("regions.csv"),
                &meta(REGIONS_SCHEMA),
                &REGIONS_HEADER,
                &rows,
            )?;
            outputs.push("regions.csv");
        }
        Err(decohere::Error::MissingBaseline { l, p }) => {
            eprintln!("warning: no q=0 point for L={l}, p={p}; region map skipped");
            note = ", region map skipped".into();
        }
        Err(e) => return Err(e.into()),
    }
    ctx.finish("sweep", seed, &hash, &outputs, start)?;
    Ok(format!(
        "sweep: {} points x {} realizations{note}",
        table.rows.len(),
        sec.realizations
    ))
}

#[derive(Serialize)]
struct FitRecord {
    #[serde(rename = "L")]
    l: Option<usize>,
    p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<FitResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct FitReport<'a> {
    schema: &'static str,
    input: String,
    input_config_hash: &'a str,
    model: FitKind,
    window: [f64; 2],
    weighted: bool,
    records: Vec<FitRecord>,
}

fn restrict_sizes(table: &SweepTable, sizes: &[usize]) -> SweepTable {
    SweepTable {
        rows: table.rows.iter().filter(|r| sizes.contains(&r.l)).cloned().collect(),
        master_seed: table.master_seed,
        param_hash: table.param_hash,
    }
}

pub fn fit(ctx: &Context) -> Result<String, CliError> {
    let start = Instant::now();
    let sec = &ctx.config.fit;
    sec.validate()?;
    let input: PathBuf = ctx
        .fit_input
        .clone()
        .or_else(|| sec.input.clone())
        .unwrap_or_else(|| ctx.out_dir.join("sweep.csv"));
    let (meta, table) = read_sweep(&input)?;
    let sizes = if sec.l.is_empty() { table.sizes() } else { sec.l.clone() };
    let ps = if sec.p.is_empty() { table.ps() } else { sec.p.clone() };
    let window = match (sec.window, sec.model) {
        (Some([lo, hi]), _) => FitWindow::new(lo, hi),
        (None, FitKind::Log) => FitWindow::covering(&REGION_I_DESK_Q),
        (None, FitKind::Exp) => FitWindow::covering(&REGION_III_Q),
        (None, FitKind::Volume) => FitWindow::new(0.0, f64::INFINITY),
    };

    let record = |l: Option<usize>, p: f64, r: decohere::Result<FitResult>| match r {
        Ok(f) => FitRecord {
            l,
            p,
            fit: Some(f),
            error: None,
        },
        Err(e) => FitRecord {
            l,
            p,
            fit: None,
            error: Some(e.to_string()),
        },
    };
    let mut records = Vec::new();
    match sec.model {
        FitKind::Log | FitKind::Exp => {
            for &l in &sizes {
                for &p in &ps {
                    if table.rows_at(l, p).is_empty() {
                        continue;
                    }
                    let r = if sec.model == FitKind::Log {
                        fit_log_region(&table, l, p, &window, sec.weighted)
                    } else {
                        fit_exp_region(&table, l, p, &window, sec.weighted)
                    };
                    records.push(record(Some(l), p, r));
                }
            }
        }
        FitKind::Volume => {
            let chosen: Vec<usize> = sizes.iter().copied().filter(|&l| window.contains(l as f64)).collect();
            let sub = restrict_sizes(&table, &chosen);
            for &p in &ps {
                records.push(record(None, p, fit_volume_log(&sub, p, sec.weighted)));
            }
        }
    }
    let ok = records.iter().filter(|r| r.fit.is_some()).count();
    if ok == 0 {
        let why = records
            .first()
            .and_then(|r| r.error.clone())
            .unwrap_or_else(|| "no (L, p) points match the selection".into());
        return Err(CliError::Config(format!("fit: nothing to fit: {why}")));
    }

    let seed = meta.seed;
    let mut section = sec.clone();
    section.input = None;
    let hash = config_hash(
        "fit",
        seed,
        &serde_json::json!({ "fit": section, "input_config_hash": meta.config_hash }),
    );
    let report = FitReport {
        schema: "decohere.fit/1",
        input: input.display().to_string(),
        input_config_hash: &meta.config_hash,
        model: sec.model,
        window: [window.lo, window.hi],
        weighted: sec.weighted,
        records,
    };
    let total = report.records.len();
    ensure_dir(&ctx.out_dir)?;
    write_json(&ctx.out_dir.join("fit.json"), &report)?;
    ctx.finish("fit", seed, &hash, &["fit.json"], start)?;
    Ok(format!("fit: {ok} of {total} fits succeeded"))
}

#[derive(Serialize)]
struct Value {
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
}

impl Value {
    fn of<T: Scalar + std::fmt::Display>(x: &T) -> Self {
        Value {
            value: x.to_f64(),
            exact: T::EXACT.then(|| x.to_string()),
        }
    }
}

#[derive(Serialize)]
struct EngineResult {
    engine: Engine,
    z_a: Value,
    z_empty: Value,
}

#[derive(Serialize)]
struct StatmechReport {
    schema: &'static str,
    q_order: usize,
    numeric: &'static str,
    sites: usize,
    engines: Vec<EngineResult>,
    engines_agree: bool,
    z_a_equals_z_empty: bool,
    renyi: Value,
    audit: Option<SymmetryReport>,
}

fn statmech_with<T: Scalar + std::fmt::Display>(sec: &StatmechSection) -> Result<StatmechReport, CliError> {
    let q_order = sec.q_order();
    let patch = HoneycombPatch::new(sec.width, sec.depth, sec.region_len, sec.attachment)?;
    let weights = BondWeights::<T>::new(q_order, sec.d, sec.p, sec.q)?;
    let region = Boundary::RegionA { n: sec.n, k: sec.k };
    let mut zs = Vec::new();
    for engine in sec.engines.engines() {
        let za = partition_function(&patch, &weights, &region, engine)?;
        let z0 = partition_function(&patch, &weights, &Boundary::Homogeneous, engine)?;
        zs.push((engine, za, z0));
    }
    let tol = 1e-12;
    let (_, za, z0) = &zs[0];
    let engines_agree = zs.iter().all(|(_, a, b)| a.close_to(za, tol) && b.close_to(z0, tol));
    let renyi = renyi_from_partition(za, z0, sec.n, sec.k)?;
    let z_a_equals_z_empty = za == z0;
    let audit = (factorial(q_order).pow(2) <= AUDIT_LIMIT).then(|| symmetry_audit(&weights));
    Ok(StatmechReport {
        schema: "decohere.statmech/1",
        q_order,
        numeric: if T::EXACT { "exact" } else { "float" },
        sites: patch.num_sites(),
        renyi: Value::of(&renyi),
        z_a_equals_z_empty,
        engines_agree,
        engines: zs
            .iter()
            .map(|(engine, a, b)| EngineResult {
                engine: *engine,
                z_a: Value::of(a),
                z_empty: Value::of(b),
            })
            .collect(),
        audit,
    })
}

pub fn statmech(ctx: &Context) -> Result<String, CliError> {
    let start = Instant::now();
    let sec = &ctx.config.statmech;
    sec.validate()?;
    let exact = match sec.numeric {
        NumericMode::Exact => true,
        NumericMode::Float => false,
        NumericMode::Auto => sec.q_order() <= 3,
    };
    let report = if exact {
        statmech_with::<Exact>(sec)?
    } else {
        statmech_with::<Real>(sec)?
    };
    let seed = ctx.config.master_seed;
    let hash = config_hash("statmech", seed, sec);
    ensure_dir(&ctx.out_dir)?;
    write_json(&ctx.out_dir.join("statmech.json"), &report)?;
    ctx.finish("statmech", seed, &hash, &["statmech.json"], start)?;

    let verdict = report
        .audit
        .as_ref()
        .map(|a| serde_json::to_value(a.verdict).expect("verdict serializes"))
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_else(|| "skipped".into());
    let summary = format!(
        "statmech: Q={} Z_A={:e} Z_0={:e} renyi={} audit={verdict}",
        report.q_order, report.engines[0].z_a.value, report.engines[0].z_empty.value, report.renyi.value
    );
    if !report.engines_agree {
        return Err(CliError::CheckFailed(format!("partition engines disagree; {summary}")));
    }
    Ok(summary)
}

#[derive(Serialize)]
struct OracleOutput {
    schema: &'static str,
    circuits: usize,
    comparisons: usize,
    max_discrepancy: f64,
    tolerance: f64,
    passed: bool,
}

pub fn oracle_check(ctx: &Context) -> Result<String, CliError> {
    let start = Instant::now();
    let sec = &ctx.config.oracle;
    sec.validate()?;
    let seed = ctx.config.master_seed;
    if sec.circuits == 0 {
        eprintln!("warning: oracle check with 0 circuits passes vacuously");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = cross_check_with(sec.circuits, sec.max_sites, sec.p, sec.q, &mut rng)?;
    let passed = report.max_discrepancy < sec.tolerance;
    let out = OracleOutput {
        schema: "decohere.oracle/1",
        circuits: report.circuits,
        comparisons: report.comparisons,
        max_discrepancy: report.max_discrepancy,
        tolerance: sec.tolerance,
        passed,
    };
    let hash = config_hash("oracle-check", seed, sec);
    ensure_dir(&ctx.out_dir)?;
    write_json(&ctx.out_dir.join("oracle.json"), &out)?;
    ctx.finish("oracle-check", seed, &hash, &["oracle.json"], start)?;
    let line = format!(
        "oracle-check: {} circuits, {} comparisons, max discrepancy {:e} (tolerance {:e})",
        out.circuits, out.comparisons, out.max_discrepancy, out.tolerance
    );
    if passed {
        Ok(format!("{line}: PASS"))
    } else {
        Err(CliError::CheckFailed(line))
    }
}

pub fn out_dir(config: &RunConfig, flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf).unwrap_or_else(|| config.output_dir.clone())
}

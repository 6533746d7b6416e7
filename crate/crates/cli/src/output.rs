//! Versioned CSV tables and JSON reports.
//!
//! Every CSV starts with a metadata line
//! `# schema=<name>/<version> seed=<u64> config_hash=<hex>` followed by an
//! ordinary header row.

use std::fs;
use std::path::Path;

use decohere::analysis::{SweepRow, SweepTable};
use serde::Serialize;

use crate::error::CliError;

pub const TRAJECTORY_SCHEMA: &str = "decohere.trajectory/1";
pub const SWEEP_SCHEMA: &str = "decohere.sweep/1";
pub const REGIONS_SCHEMA: &str = "decohere.regions/1";

pub const TRAJECTORY_HEADER: [&str; 6] = ["t", "s_a", "s_b", "s_ab", "i_ab", "rank_k"];
pub const SWEEP_HEADER: [&str; 8] = [
    "L",
    "p",
    "q",
    "i_ab_mean",
    "i_ab_stderr",
    "s_a_mean",
    "s_ab_mean",
    "n_realizations",
];
pub const REGIONS_HEADER: [&str; 7] = ["L", "p", "q", "regime", "dev_zero", "dev_log", "dev_exp"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CsvMeta {
    pub schema: String,
    pub seed: u64,
    pub config_hash: String,
}

impl CsvMeta {
    fn line(&self) -> String {
        format!(
            "# schema={} seed={} config_hash={}\n",
            self.schema, self.seed, self.config_hash
        )
    }

    fn parse(line: &str) -> Result<Self, CliError> {
        let bad = || CliError::Schema(format!("missing or malformed metadata line: {line:?}"));
        let body = line.trim_end().strip_prefix("# ").ok_or_else(bad)?;
        let (mut schema, mut seed, mut hash) = (None, None, None);
        for field in body.split_whitespace() {
            let (k, v) = field.split_once('=').ok_or_else(bad)?;
            match k {
                "schema" => schema = Some(v.to_string()),
                "seed" => seed = Some(v.parse::<u64>().map_err(|_| bad())?),
                "config_hash" => hash = Some(v.to_string()),
                _ => {}
            }
        }
        Ok(Self {
            schema: schema.ok_or_else(bad)?,
            seed: seed.ok_or_else(bad)?,
            config_hash: hash.ok_or_else(bad)?,
        })
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_csv(path: &Path, meta: &CsvMeta, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut buf = meta.line().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header).map_err(|e| CliError::io(path, e))?;
        for r in rows {
            w.write_record(r).map_err(|e| CliError::io(path, e))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    fs::write(path, buf).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Reads a CSV written by [`write_csv`], rejecting other schemas and headers.
pub fn read_csv(path: &Path, schema: &str, header: &[&str]) -> Result<(CsvMeta, Vec<csv::StringRecord>), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
    let meta = CsvMeta::parse(first)?;
    if meta.schema != schema {
        return Err(CliError::Schema(format!(
            "{}: unsupported schema {:?} (expected {schema:?})",
            path.display(),
            meta.schema
        )));
    }
    let mut reader = csv::Reader::from_reader(rest.as_bytes());
    let got = reader.headers().map_err(|e| CliError::io(path, e))?.clone();
    if got.iter().ne(header.iter().copied()) {
        return Err(CliError::Schema(format!(
            "{}: header {:?} does not match {header:?}",
            path.display(),
            got.iter().collect::<Vec<_>>()
        )));
    }
    let rows = reader
        .records()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::io(path, e))?;
    Ok((meta, rows))
}

pub fn sweep_rows(table: &SweepTable) -> Vec<Vec<String>> {
    table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.l.to_string(),
                r.p.to_string(),
                r.q.to_string(),
                r.i_ab_mean.to_string(),
                r.i_ab_stderr.to_string(),
                r.s_a_mean.to_string(),
                r.s_ab_mean.to_string(),
                r.n_realizations.to_string(),
            ]
        })
        .collect()
}

/// Sweep table from CSV. Standard errors of `S_A` and `S_AB` are not stored
/// and come back as NaN.
pub fn read_sweep(path: &Path) -> Result<(CsvMeta, SweepTable), CliError> {
    let (meta, records) = read_csv(path, SWEEP_SCHEMA, &SWEEP_HEADER)?;
    let mut rows = Vec::with_capacity(records.len());
    for (i, rec) in records.iter().enumerate() {
        let line = i + 3;
        let f = |k: usize| -> Result<f64, CliError> {
            rec[k].parse::<f64>().map_err(|_| {
                CliError::Schema(format!(
                    "{}:{line}: bad {} {:?}",
                    path.display(),
                    SWEEP_HEADER[k],
                    &rec[k]
                ))
            })
        };
        let u = |k: usize| -> Result<usize, CliError> {
            rec[k].parse::<usize>().map_err(|_| {
                CliError::Schema(format!(
                    "{}:{line}: bad {} {:?}",
                    path.display(),
                    SWEEP_HEADER[k],
                    &rec[k]
                ))
            })
        };
        rows.push(SweepRow {
            l: u(0)?,
            p: f(1)?,
            q: f(2)?,
            i_ab_mean: f(3)?,
            i_ab_stderr: f(4)?,
            s_a_mean: f(5)?,
            s_a_stderr: f64::NAN,
            s_ab_mean: f(6)?,
            s_ab_stderr: f64::NAN,
            n_realizations: u(7)?,
            trajectory_means: Vec::new(),
        });
    }
    let table = SweepTable {
        rows,
        master_seed: meta.seed,
        param_hash: 0,
    };
    Ok((meta, table))
}

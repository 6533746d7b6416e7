//! Parallel sweeps over `(L, p, q)` grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{run_trajectory, trajectory_seed, InitialState, MeanReport, ProtocolParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    #[serde(rename = "L")]
    pub l: usize,
    pub p: f64,
    pub q: f64,
}

impl GridPoint {
    pub fn new(l: usize, p: f64, q: f64) -> Self {
        Self { l, p, q }
    }

    fn key(&self) -> (usize, u64, u64) {
        (self.l, self.p.to_bits(), self.q.to_bits())
    }

    fn cmp_key(&self, other: &Self) -> std::cmp::Ordering {
        self.l
            .cmp(&other.l)
            .then(self.p.total_cmp(&other.p))
            .then(self.q.total_cmp(&other.q))
    }
}

/// Circuit depth and sampling as multiples of `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Schedule {
    pub total_per_site: usize,
    pub burn_in_per_site: usize,
    /// Samples are taken every `L / stride_divisor` steps.
    pub stride_divisor: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            total_per_site: 8,
            burn_in_per_site: 4,
            stride_divisor: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub grid: Vec<GridPoint>,
    pub realizations: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default)]
    pub initial_state: InitialState,
}

impl SweepConfig {
    pub fn new(grid: Vec<GridPoint>, realizations: usize, master_seed: u64) -> Self {
        Self {
            grid,
            realizations,
            master_seed,
            schedule: Schedule::default(),
            initial_state: InitialState::default(),
        }
    }

    /// Cartesian product grid.
    pub fn product_grid(ls: &[usize], ps: &[f64], qs: &[f64]) -> Vec<GridPoint> {
        let mut g = Vec::with_capacity(ls.len() * ps.len() * qs.len());
        for &l in ls {
            for &p in ps {
                for &q in qs {
                    g.push(GridPoint::new(l, p, q));
                }
            }
        }
        g
    }

    /// Protocol parameters of trajectory `index` at `point`.
    pub fn params_for(&self, point: &GridPoint, index: usize) -> Result<ProtocolParams> {
        let l = point.l;
        let params = ProtocolParams {
            l,
            p: point.p,
            q: point.q,
            t_total: self.schedule.total_per_site * l,
            t_burn_in: self.schedule.burn_in_per_site * l,
            sample_stride: (l / self.schedule.stride_divisor.max(1)).max(1),
            initial_state: self.initial_state,
            seed: trajectory_seed(self.master_seed, l, index as u64),
        };
        params.validate()?;
        Ok(params)
    }

    /// Sorted grid without duplicates.
    pub fn normalized_grid(&self) -> Vec<GridPoint> {
        let mut g = self.grid.clone();
        g.sort_by(|a, b| a.cmp_key(b));
        g.dedup_by_key(|p| p.key());
        g
    }

    /// FNV-1a hash of everything except the master seed, over the
    /// normalized grid.
    pub fn param_hash(&self) -> u64 {
        let mut text = String::new();
        for pt in self.normalized_grid() {
            text.push_str(&format!("{}:{:?}:{:?};", pt.l, pt.p, pt.q));
        }
        text.push_str(&format!(
            "R={};{:?};{:?}",
            self.realizations, self.schedule, self.initial_state
        ));
        fnv1a(text.as_bytes())
    }
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "L")]
    pub l: usize,
    pub p: f64,
    pub q: f64,
    pub i_ab_mean: f64,
    pub i_ab_stderr: f64,
    pub s_a_mean: f64,
    pub s_a_stderr: f64,
    pub s_ab_mean: f64,
    pub s_ab_stderr: f64,
    pub n_realizations: usize,
    /// Time-averaged observables of each trajectory, in index order.
    #[serde(skip)]
    pub trajectory_means: Vec<MeanReport>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub master_seed: u64,
    pub param_hash: u64,
}

const MATCH_TOL: f64 = 1e-12;

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= MATCH_TOL * a.abs().max(b.abs()).max(1.0)
}

impl SweepTable {
    pub fn get(&self, l: usize, p: f64, q: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.l == l && same(r.p, p) && same(r.q, q))
    }

    /// Rows at fixed `(L, p)`, ascending in `q`.
    pub fn rows_at(&self, l: usize, p: f64) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.l == l && same(r.p, p)).collect()
    }

    /// Rows at fixed `(p, q)`, ascending in `L`.
    pub fn rows_at_pq(&self, p: f64, q: f64) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| same(r.p, p) && same(r.q, q)).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.rows.iter().map(|r| r.l).collect();
        v.dedup();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn ps(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.rows.iter().map(|r| r.p).collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| same(*a, *b));
        v
    }

    /// Rows of `self` followed by rows of `other`, re-sorted. Rows present
    /// in both keep the version from `self`.
    pub fn merged(&self, other: &SweepTable) -> SweepTable {
        let mut rows = self.rows.clone();
        for r in &other.rows {
            if self.get(r.l, r.p, r.q).is_none() {
                rows.push(r.clone());
            }
        }
        rows.sort_by(|a, b| a.l.cmp(&b.l).then(a.p.total_cmp(&b.p)).then(a.q.total_cmp(&b.q)));
        SweepTable {
            rows,
            master_seed: self.master_seed,
            param_hash: self.param_hash ^ other.param_hash.rotate_left(1),
        }
    }
}

/// Mean and standard error of the mean.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Runs every trajectory of the grid. `threads = 0` uses the global rayon
/// pool.
pub fn run_sweep(config: &SweepConfig, threads: usize) -> Result<SweepTable> {
    if config.realizations == 0 {
        return Err(Error::InvalidParams("realizations must be at least 1".into()));
    }
    let grid = config.normalized_grid();
    if grid.is_empty() {
        return Err(Error::InvalidParams("empty grid".into()));
    }
    let mut jobs = Vec::with_capacity(grid.len() * config.realizations);
    for (gi, pt) in grid.iter().enumerate() {
        for r in 0..config.realizations {
            jobs.push((gi, config.params_for(pt, r)?));
        }
    }
    let run = || -> Result<Vec<(usize, MeanReport)>> {
        jobs.par_iter()
            .map(|(gi, params)| run_trajectory(params).map(|rec| (*gi, rec.mean())))
            .collect()
    };
    let results = if threads == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidParams(e.to_string()))?
            .install(run)?
    };
    let mut per_point: Vec<Vec<MeanReport>> = vec![Vec::new(); grid.len()];
    // `collect` preserves job order, so trajectories stay in index order.
    for (gi, m) in results {
        per_point[gi].push(m);
    }
    let rows = grid
        .iter()
        .zip(per_point)
        .map(|(pt, means)| {
            let col = |f: fn(&MeanReport) -> f64| mean_stderr(&means.iter().map(f).collect::<Vec<_>>());
            let (i_ab_mean, i_ab_stderr) = col(|m| m.i_ab);
            let (s_a_mean, s_a_stderr) = col(|m| m.s_a);
            let (s_ab_mean, s_ab_stderr) = col(|m| m.s_ab);
            SweepRow {
                l: pt.l,
                p: pt.p,
                q: pt.q,
                i_ab_mean,
                i_ab_stderr,
                s_a_mean,
                s_a_stderr,
                s_ab_mean,
                s_ab_stderr,
                n_realizations: means.len(),
                trajectory_means: means,
            }
        })
        .collect();
    Ok(SweepTable {
        rows,
        master_seed: config.master_seed,
        param_hash: config.param_hash(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_matches_trajectory() {
        let cfg = SweepConfig::new(vec![GridPoint::new(8, 0.2, 0.05)], 1, 17);
        let table = run_sweep(&cfg, 0).unwrap();
        let rec = run_trajectory(&cfg.params_for(&cfg.grid[0], 0).unwrap()).unwrap();
        let row = &table.rows[0];
        assert_eq!(row.i_ab_mean, rec.mean().i_ab);
        assert_eq!(row.i_ab_stderr, 0.0);
        assert_eq!(row.n_realizations, 1);
    }

    #[test]
    fn grid_order_irrelevant() {
        let grid = SweepConfig::product_grid(&[4, 8], &[0.1, 0.3], &[0.0, 0.2]);
        let mut shuffled = grid.clone();
        shuffled.reverse();
        shuffled.swap(1, 5);
        let a = run_sweep(&SweepConfig::new(grid, 3, 5), 0).unwrap();
        let b = run_sweep(&SweepConfig::new(shuffled, 3, 5), 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 8);
        assert!(a.rows.iter().all(|r| r.i_ab_stderr >= 0.0 && r.n_realizations == 3));
        assert_eq!(a.sizes(), vec![4, 8]);
    }

    #[test]
    fn invalid_configs() {
        assert!(run_sweep(&SweepConfig::new(vec![], 1, 0), 0).is_err());
        assert!(run_sweep(&SweepConfig::new(vec![GridPoint::new(8, 0.1, 0.0)], 0, 0), 0).is_err());
        assert!(run_sweep(&SweepConfig::new(vec![GridPoint::new(5, 0.1, 0.0)], 1, 0), 0).is_err());
    }

    #[test]
    fn stderr_formula() {
        let (m, se) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        // sample sd = sqrt(5/3), over sqrt(4)
        assert!((se - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
    }
}

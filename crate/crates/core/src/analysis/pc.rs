//! Critical point of the pure (`q = 0`) transition from the sign change of
//! the volume-law coefficient.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::fit::{fit_volume_log_points, FitPoint};
use super::sweep::SweepTable;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcConfig {
    /// Parametric bootstrap replicates; 0 disables the bootstrap.
    pub bootstrap: usize,
    pub seed: u64,
    /// Central coverage of the bootstrap interval.
    pub coverage: f64,
}

impl Default for PcConfig {
    fn default() -> Self {
        Self {
            bootstrap: 400,
            seed: 0x5eed,
            coverage: 0.95,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaPoint {
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcEstimate {
    pub p_low: f64,
    pub p_high: f64,
    /// Linear interpolation of the zero of `α(p)`.
    pub crossing: f64,
    /// Adjacent grid values across which `α` changes sign.
    pub grid_bracket: (f64, f64),
    pub bootstrap_interval: Option<(f64, f64)>,
    /// Replicates without a sign change.
    pub bootstrap_failures: usize,
    pub alpha: Vec<AlphaPoint>,
    pub sizes: Vec<usize>,
}

impl PcEstimate {
    pub fn width(&self) -> f64 {
        self.p_high - self.p_low
    }

    pub fn intersects(&self, lo: f64, hi: f64) -> bool {
        self.p_low <= hi && self.p_high >= lo
    }
}

/// Fitted slopes within this distance of zero count as zero.
const ALPHA_ZERO_TOL: f64 = 1e-9;

/// First `i` with `α_i > 0 ≥ α_{i+1}`, and the interpolated zero.
fn sign_change(ps: &[f64], alphas: &[f64]) -> Option<(usize, f64)> {
    let tol = ALPHA_ZERO_TOL;
    (0..ps.len().saturating_sub(1))
        .find(|&i| alphas[i] > tol && alphas[i + 1] <= tol)
        .map(|i| {
            let t = alphas[i] / (alphas[i] - alphas[i + 1]);
            (i, ps[i] + t * (ps[i + 1] - ps[i]))
        })
}

fn quantile(sorted: &[f64], f: f64) -> f64 {
    let pos = f * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Brackets `p_c` from `q = 0` rows at the given sizes.
///
/// `α(p)` comes from least squares of `S_A` on `(L, log₂ L, 1)`; with three
/// sizes this is an exact interpolation. The bracket is the grid interval of
/// the first sign change, widened to the bootstrap interval of the
/// interpolated zero under Gaussian resampling of each `S_A` mean by its
/// standard error.
pub fn estimate_pc(table: &SweepTable, sizes: &[usize], config: &PcConfig) -> Result<PcEstimate> {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(Error::InvalidParams(format!("{} sizes, need at least 3", sizes.len())));
    }
    let mut ps = Vec::new();
    let mut data: Vec<Vec<FitPoint>> = Vec::new();
    for p in table.ps() {
        let pts: Vec<FitPoint> = sizes
            .iter()
            .filter_map(|&l| table.get(l, p, 0.0))
            .map(|r| FitPoint {
                x: r.l as f64,
                y: r.s_a_mean,
                stderr: r.s_a_stderr,
            })
            .collect();
        if pts.len() == sizes.len() {
            ps.push(p);
            data.push(pts);
        }
    }
    if ps.len() < 2 {
        return Err(Error::InvalidParams("need q = 0 data at two or more p values".into()));
    }
    let fit = |pts: &[FitPoint]| fit_volume_log_points(pts, false, 3);
    let mut alpha = Vec::with_capacity(ps.len());
    for (p, pts) in ps.iter().zip(&data) {
        let f = fit(pts)?;
        alpha.push(AlphaPoint {
            p: *p,
            alpha: f.coef("alpha"),
            beta: f.coef("beta"),
        });
    }
    let alphas: Vec<f64> = alpha.iter().map(|a| a.alpha).collect();
    let (i, crossing) = sign_change(&ps, &alphas).ok_or(Error::NoSignChange)?;
    let grid_bracket = (ps[i], ps[i + 1]);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut zeros = Vec::with_capacity(config.bootstrap);
    let mut failures = 0;
    for _ in 0..config.bootstrap {
        let mut a = Vec::with_capacity(ps.len());
        for pts in &data {
            let resampled: Vec<FitPoint> = pts
                .iter()
                .map(|pt| {
                    let y = match Normal::new(pt.y, pt.stderr) {
                        Ok(n) if pt.stderr > 0.0 => n.sample(&mut rng),
                        _ => pt.y,
                    };
                    FitPoint { y, ..*pt }
                })
                .collect();
            a.push(fit(&resampled)?.coef("alpha"));
        }
        match sign_change(&ps, &a) {
            Some((_, z)) => zeros.push(z),
            None => failures += 1,
        }
    }
    let bootstrap_interval = (!zeros.is_empty()).then(|| {
        zeros.sort_by(f64::total_cmp);
        let tail = (1.0 - config.coverage) / 2.0;
        (quantile(&zeros, tail), quantile(&zeros, 1.0 - tail))
    });
    let (mut p_low, mut p_high) = grid_bracket;
    if let Some((lo, hi)) = bootstrap_interval {
        p_low = p_low.min(lo);
        p_high = p_high.max(hi);
    }
    Ok(PcEstimate {
        p_low,
        p_high,
        crossing,
        grid_bracket,
        bootstrap_interval,
        bootstrap_failures: failures,
        alpha,
        sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::sweep::SweepRow;

    fn synthetic(alpha: impl Fn(f64) -> f64, stderr: f64) -> SweepTable {
        let mut rows = Vec::new();
        for &l in &[16usize, 32, 64, 128] {
            for k in 0..=10 {
                let p = 0.2 + 0.02 * k as f64;
                let lf = l as f64;
                let s = alpha(p) * lf + 1.6 * lf.log2() + 0.5;
                rows.push(SweepRow {
                    l,
                    p,
                    q: 0.0,
                    i_ab_mean: 2.0 * s,
                    i_ab_stderr: 2.0 * stderr,
                    s_a_mean: s,
                    s_a_stderr: stderr,
                    s_ab_mean: 0.0,
                    s_ab_stderr: 0.0,
                    n_realizations: 100,
                    trajectory_means: vec![],
                });
            }
        }
        SweepTable {
            rows,
            master_seed: 0,
            param_hash: 0,
        }
    }

    #[test]
    fn constructed_kink_is_bracketed() {
        let t = synthetic(|p| (0.3 - p).max(0.0), 0.0);
        let est = estimate_pc(&t, &[16, 32, 64, 128], &PcConfig::default()).unwrap();
        assert!(est.p_low <= 0.30 && est.p_high >= 0.30, "{est:?}");
        assert!((est.crossing - 0.30).abs() < 1e-9);
        assert_eq!(est.bootstrap_failures, 0);
    }

    #[test]
    fn noise_widens_bracket() {
        let t = synthetic(|p| 0.3 - p, 0.5);
        let est = estimate_pc(&t, &[16, 32, 64], &PcConfig::default()).unwrap();
        let (lo, hi) = est.bootstrap_interval.unwrap();
        assert!(lo < hi);
        assert!(est.p_low <= est.grid_bracket.0 && est.p_high >= est.grid_bracket.1);
        let more = estimate_pc(&t, &[16, 32, 64, 128], &PcConfig::default()).unwrap();
        assert!(more.width() <= est.width());
    }

    #[test]
    fn errors() {
        let t = synthetic(|p| 1.0 + p, 0.0);
        assert_eq!(
            estimate_pc(&t, &[16, 32, 64], &PcConfig::default()),
            Err(Error::NoSignChange)
        );
        assert!(estimate_pc(&t, &[16, 32], &PcConfig::default()).is_err());
    }
}

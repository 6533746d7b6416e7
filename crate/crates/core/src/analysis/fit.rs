//! Ordinary least-squares fits of the three scaling forms.
//!
//! * `I = b ln(1/q) + c` on a window of small `q`
//! * `I = d exp(−e q)`, fitted as `ln I = ln d − e q` on large `q`
//! * `S_A = α L + β log₂ L + γ` across system sizes at `q = 0`

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::sweep::{SweepRow, SweepTable};
use crate::error::{Error, Result};

/// Reference small-`q` window for the logarithmic region.
pub const REGION_I_REFERENCE_Q: [f64; 4] = [8e-5, 8e-4, 2e-3, 4e-3];
/// Small-`q` window used at desk-scale statistics.
pub const REGION_I_DESK_Q: [f64; 4] = [1e-4, 3e-4, 1e-3, 3e-3];
/// Large-`q` window for the exponential region.
pub const REGION_III_Q: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    LogInvQ,
    ExponentialQ,
    VolumeLog,
}

/// Inclusive range of `q` (or `L`) values admitted to a fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub lo: f64,
    pub hi: f64,
}

impl FitWindow {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    /// Smallest window covering `values`.
    pub fn covering(values: &[f64]) -> Self {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        let tol = 1e-12 * v.abs().max(1e-300);
        v >= self.lo - tol && v <= self.hi + tol
    }
}

/// One observation: abscissa, value and its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitPoint {
    pub x: f64,
    pub y: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub coefficients: BTreeMap<String, f64>,
    pub coefficient_stderr: BTreeMap<String, f64>,
    /// Residual sum of squares in the fitted (transformed) coordinates.
    pub rss: f64,
    pub r_squared: f64,
    /// Abscissae actually used.
    pub window: Vec<f64>,
    pub residuals: Vec<f64>,
    pub weighted: bool,
}

impl FitResult {
    pub fn coef(&self, name: &str) -> f64 {
        self.coefficients[name]
    }

    /// Model prediction in original coordinates.
    pub fn predict(&self, x: f64) -> f64 {
        match self.model {
            FitModel::LogInvQ => self.coef("b") * (1.0 / x).ln() + self.coef("c"),
            FitModel::ExponentialQ => self.coef("d") * (-self.coef("e") * x).exp(),
            FitModel::VolumeLog => self.coef("alpha") * x + self.coef("beta") * x.log2() + self.coef("gamma"),
        }
    }
}

/// Solution of a linear least-squares problem.
#[derive(Clone, Debug)]
pub struct Lsq {
    pub coef: Vec<f64>,
    pub stderr: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    pub r_squared: f64,
}

/// Least squares of `y` on the columns of `design`, optionally with
/// per-row weights. Rejects rank-deficient designs.
pub fn least_squares(design: &DMatrix<f64>, y: &[f64], weights: Option<&[f64]>) -> Result<Lsq> {
    let (n, m) = design.shape();
    if y.len() != n {
        return Err(Error::LengthMismatch(y.len(), n));
    }
    if n < m {
        return Err(Error::DegenerateFit(format!("{n} points for {m} parameters")));
    }
    let w: Vec<f64> = match weights {
        Some(w) => {
            if w.len() != n || w.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::DegenerateFit("weights must be positive and finite".into()));
            }
            w.to_vec()
        }
        None => vec![1.0; n],
    };
    let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let a = DMatrix::from_fn(n, m, |i, j| design[(i, j)] * sw[i]);
    let b = DVector::from_iterator(n, y.iter().zip(&sw).map(|(v, s)| v * s));
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin <= 1e-10 * smax {
        return Err(Error::DegenerateFit("rank-deficient design matrix".into()));
    }
    let coef = svd.solve(&b, 0.0).map_err(|e| Error::DegenerateFit(e.to_string()))?;
    let fitted = design * &coef;
    let residuals: Vec<f64> = y.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().zip(&w).map(|(r, w)| w * r * r).sum();
    let wsum: f64 = w.iter().sum();
    let ybar = y.iter().zip(&w).map(|(v, w)| v * w).sum::<f64>() / wsum;
    let tss: f64 = y.iter().zip(&w).map(|(v, w)| w * (v - ybar).powi(2)).sum();
    let r_squared = if tss > 0.0 {
        (1.0 - rss / tss).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let stderr = if n > m {
        let sigma2 = rss / (n - m) as f64;
        let ata = a.transpose() * &a;
        match ata.try_inverse() {
            Some(inv) => (0..m).map(|i| (sigma2 * inv[(i, i)]).max(0.0).sqrt()).collect(),
            None => vec![f64::NAN; m],
        }
    } else {
        vec![0.0; m]
    };
    Ok(Lsq {
        coef: coef.iter().copied().collect(),
        stderr,
        residuals,
        rss,
        r_squared,
    })
}

fn weights_of(points: &[FitPoint], weighted: bool, transform: impl Fn(&FitPoint) -> f64) -> Result<Option<Vec<f64>>> {
    if !weighted {
        return Ok(None);
    }
    let w: Vec<f64> = points
        .iter()
        .map(|p| {
            let s = transform(p);
            1.0 / (s * s)
        })
        .collect();
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateFit(
            "weighted fit needs nonzero standard errors".into(),
        ));
    }
    Ok(Some(w))
}

fn distinct(xs: &[f64]) -> usize {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

fn result(model: FitModel, names: &[&str], lsq: Lsq, window: Vec<f64>, weighted: bool) -> FitResult {
    FitResult {
        model,
        coefficients: names.iter().map(|s| s.to_string()).zip(lsq.coef).collect(),
        coefficient_stderr: names.iter().map(|s| s.to_string()).zip(lsq.stderr).collect(),
        rss: lsq.rss,
        r_squared: lsq.r_squared,
        window,
        residuals: lsq.residuals,
        weighted,
    }
}

/// `y = b ln(1/q) + c` with `x = q`.
pub fn fit_log_inv_q(points: &[FitPoint], weighted: bool) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "{} points, need at least 3",
            points.len()
        )));
    }
    if points.iter().any(|p| !(p.x > 0.0)) {
        return Err(Error::DegenerateFit("q must be positive".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    if distinct(&xs) < 2 {
        return Err(Error::DegenerateFit("all q equal".into()));
    }
    let design = DMatrix::from_fn(points.len(), 2, |i, j| if j == 0 { (1.0 / xs[i]).ln() } else { 1.0 });
    let y: Vec<f64> = points.iter().map(|p| p.y).collect();
    let w = weights_of(points, weighted, |p| p.stderr)?;
    let lsq = least_squares(&design, &y, w.as_deref())?;
    Ok(result(FitModel::LogInvQ, &["b", "c"], lsq, xs, weighted))
}

/// `y = d exp(−e q)` via `ln y = ln d − e q`.
pub fn fit_exp_q(points: &[FitPoint], weighted: bool) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "{} points, need at least 3",
            points.len()
        )));
    }
    if let Some(p) = points.iter().find(|p| !(p.y > 0.0)) {
        return Err(Error::DegenerateFit(format!(
            "nonpositive value {} at q = {}",
            p.y, p.x
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    if distinct(&xs) < 2 {
        return Err(Error::DegenerateFit("all q equal".into()));
    }
    let design = DMatrix::from_fn(points.len(), 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
    let y: Vec<f64> = points.iter().map(|p| p.y.ln()).collect();
    // δ(ln y) ≈ δy / y
    let w = weights_of(points, weighted, |p| p.stderr / p.y)?;
    let lsq = least_squares(&design, &y, w.as_deref())?;
    let (ln_d, slope) = (lsq.coef[0], lsq.coef[1]);
    let (se_ln_d, se_slope) = (lsq.stderr[0], lsq.stderr[1]);
    let mut r = result(FitModel::ExponentialQ, &["d", "e"], lsq, xs, weighted);
    r.coefficients.insert("d".into(), ln_d.exp());
    r.coefficients.insert("e".into(), -slope);
    r.coefficient_stderr.insert("d".into(), ln_d.exp() * se_ln_d);
    r.coefficient_stderr.insert("e".into(), se_slope);
    Ok(r)
}

/// `y = α L + β log₂ L + γ` with `x = L`. Requires `min_sizes` distinct
/// sizes.
pub fn fit_volume_log_points(points: &[FitPoint], weighted: bool, min_sizes: usize) -> Result<FitResult> {
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let nd = distinct(&xs);
    if nd < min_sizes {
        return Err(Error::DegenerateFit(format!(
            "{nd} distinct sizes, need at least {min_sizes}"
        )));
    }
    if xs.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::DegenerateFit("sizes must be positive".into()));
    }
    let design = DMatrix::from_fn(points.len(), 3, |i, j| match j {
        0 => xs[i],
        1 => xs[i].log2(),
        _ => 1.0,
    });
    let y: Vec<f64> = points.iter().map(|p| p.y).collect();
    let w = weights_of(points, weighted, |p| p.stderr)?;
    let lsq = least_squares(&design, &y, w.as_deref())?;
    Ok(result(
        FitModel::VolumeLog,
        &["alpha", "beta", "gamma"],
        lsq,
        xs,
        weighted,
    ))
}

fn window_points(rows: &[&SweepRow], window: &FitWindow, f: impl Fn(&SweepRow) -> (f64, f64, f64)) -> Vec<FitPoint> {
    rows.iter()
        .map(|r| f(r))
        .filter(|(x, _, _)| window.contains(*x))
        .map(|(x, y, stderr)| FitPoint { x, y, stderr })
        .collect()
}

/// Logarithmic fit of `I_AB(q)` at fixed `(L, p)` over `q` in `window`.
pub fn fit_log_region(table: &SweepTable, l: usize, p: f64, window: &FitWindow, weighted: bool) -> Result<FitResult> {
    let rows = table.rows_at(l, p);
    let pts = window_points(&rows, window, |r| (r.q, r.i_ab_mean, r.i_ab_stderr));
    let pts: Vec<_> = pts.into_iter().filter(|pt| pt.x > 0.0).collect();
    fit_log_inv_q(&pts, weighted)
}

/// Exponential fit of `I_AB(q)` at fixed `(L, p)` over `q` in `window`.
pub fn fit_exp_region(table: &SweepTable, l: usize, p: f64, window: &FitWindow, weighted: bool) -> Result<FitResult> {
    let rows = table.rows_at(l, p);
    let pts = window_points(&rows, window, |r| (r.q, r.i_ab_mean, r.i_ab_stderr));
    fit_exp_q(&pts, weighted)
}

/// Volume-plus-log fit of `S_A(L)` at `q = 0` and fixed `p`.
pub fn fit_volume_log(table: &SweepTable, p: f64, weighted: bool) -> Result<FitResult> {
    let pts: Vec<FitPoint> = table
        .rows_at_pq(p, 0.0)
        .iter()
        .map(|r| FitPoint {
            x: r.l as f64,
            y: r.s_a_mean,
            stderr: r.s_a_stderr,
        })
        .collect();
    fit_volume_log_points(&pts, weighted, 4)
}

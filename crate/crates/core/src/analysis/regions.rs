//! Labelling of `(L, p, q)` points by which scaling form describes them.

use serde::{Deserialize, Serialize};

use super::fit::{fit_exp_region, fit_log_region, FitResult, FitWindow, REGION_III_Q, REGION_I_DESK_Q};
use super::sweep::SweepTable;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `I_AB ∼ log(1/q)`
    #[serde(rename = "I")]
    Logarithmic,
    /// `I_AB ∼ q⁰`
    #[serde(rename = "II")]
    Plateau,
    /// `I_AB ∼ exp(−q)`
    #[serde(rename = "III")]
    Exponential,
    #[serde(rename = "crossover")]
    Crossover,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegionConfig {
    /// Relative deviation from the `q = 0` value below which a point is on
    /// the plateau.
    pub plateau_threshold: f64,
    /// Relative deviation from a fit below which a point follows it.
    pub fit_threshold: f64,
    pub log_window: FitWindow,
    pub exp_window: FitWindow,
}

impl Default for RegionConfig {
    fn default() -> Self {
        Self {
            plateau_threshold: 0.05,
            fit_threshold: 0.05,
            log_window: FitWindow::covering(&REGION_I_DESK_Q),
            exp_window: FitWindow::covering(&REGION_III_Q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionLabel {
    #[serde(rename = "L")]
    pub l: usize,
    pub p: f64,
    pub q: f64,
    pub regime: Regime,
    /// `|I(q) − I(0)| / I(0)`
    pub dev_zero: f64,
    /// `|I(q) − f(q)| / I(q)` for the logarithmic fit, if it exists.
    pub dev_log: Option<f64>,
    pub dev_exp: Option<f64>,
}

fn rel(a: f64, reference: f64) -> f64 {
    if reference.abs() > 0.0 {
        (a - reference).abs() / reference.abs()
    } else if a.abs() == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Labels every `q > 0` point; the `q = 0` rows serve as baselines.
pub fn classify_regions(table: &SweepTable, config: &RegionConfig) -> Result<Vec<RegionLabel>> {
    let mut out = Vec::new();
    let mut groups: Vec<(usize, f64)> = table.rows.iter().map(|r| (r.l, r.p)).collect();
    groups.dedup();
    for (l, p) in groups {
        let rows = table.rows_at(l, p);
        let base = rows
            .iter()
            .find(|r| r.q == 0.0)
            .ok_or(Error::MissingBaseline { l, p })?
            .i_ab_mean;
        let log_fit = fit_log_region(table, l, p, &config.log_window, false).ok();
        let exp_fit = fit_exp_region(table, l, p, &config.exp_window, false).ok();
        for r in rows.iter().filter(|r| r.q > 0.0) {
            let i = r.i_ab_mean;
            let dev_zero = rel(i, base);
            let dev_of = |f: &Option<FitResult>| f.as_ref().map(|f| rel(f.predict(r.q), i));
            let dev_log = dev_of(&log_fit);
            let dev_exp = dev_of(&exp_fit);
            let below = |d: Option<f64>| d.is_some_and(|d| d < config.fit_threshold);
            let regime = if dev_zero < config.plateau_threshold {
                Regime::Plateau
            } else if below(dev_log) {
                Regime::Logarithmic
            } else if r.q >= config.exp_window.lo && below(dev_exp) {
                Regime::Exponential
            } else {
                Regime::Crossover
            };
            out.push(RegionLabel {
                l,
                p,
                q: r.q,
                regime,
                dev_zero,
                dev_log,
                dev_exp,
            });
        }
    }
    Ok(out)
}

/// The `q*` where the logarithmic fit reaches the `q = 0` value `i0`, a
/// proxy for the noise-induced length scale `ξ ∼ 1/q*`.
pub fn crossover_q(log_fit: &FitResult, i0: f64) -> Option<f64> {
    let b = log_fit.coef("b");
    let c = log_fit.coef("c");
    (b > 0.0).then(|| (-(i0 - c) / b).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::sweep::SweepRow;

    fn row(l: usize, p: f64, q: f64, i: f64) -> SweepRow {
        SweepRow {
            l,
            p,
            q,
            i_ab_mean: i,
            i_ab_stderr: 0.1,
            s_a_mean: i / 2.0,
            s_a_stderr: 0.1,
            s_ab_mean: 0.0,
            s_ab_stderr: 0.0,
            n_realizations: 10,
            trajectory_means: vec![],
        }
    }

    fn table(rows: Vec<SweepRow>) -> SweepTable {
        SweepTable {
            rows,
            master_seed: 0,
            param_hash: 0,
        }
    }

    #[test]
    fn synthetic_phase_diagram() {
        let qs: [f64; 12] = [0.0, 1e-5, 1e-4, 3e-4, 1e-3, 3e-3, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
        let mut rows = Vec::new();
        for &q in &qs {
            // small p: logarithmic at small q, exponential at large q
            let i = if q == 0.0 {
                50.0
            } else if q < 0.1 {
                (2.0 * (1.0 / q).ln() + 1.0).min(50.0)
            } else {
                4.0 * (-2.0 * q).exp()
            };
            rows.push(row(64, 0.1, q, i));
            // large p: flat
            rows.push(row(64, 0.4, q, if q < 0.01 { 4.0 } else { 4.0 * (-q).exp() }));
        }
        rows.sort_by(|a, b| a.p.total_cmp(&b.p).then(a.q.total_cmp(&b.q)));
        let labels = classify_regions(&table(rows), &RegionConfig::default()).unwrap();
        let get = |p: f64, q: f64| labels.iter().find(|l| l.p == p && l.q == q).unwrap().regime;
        assert_eq!(get(0.4, 1e-4), Regime::Plateau);
        assert_eq!(get(0.1, 1e-3), Regime::Logarithmic);
        assert_eq!(get(0.1, 0.8), Regime::Exponential);
        assert!(labels.iter().all(|l| l.q > 0.0));
    }

    #[test]
    fn missing_baseline() {
        let t = table(vec![row(8, 0.1, 0.1, 1.0)]);
        assert_eq!(
            classify_regions(&t, &RegionConfig::default()),
            Err(Error::MissingBaseline { l: 8, p: 0.1 })
        );
    }
}

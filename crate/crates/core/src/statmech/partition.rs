//! Partition functions of a honeycomb patch with pinned top boundary.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::patch::{HoneycombPatch, Layer};
use super::weights::BondWeights;
use crate::error::{Error, Result};
use crate::perm::{boundary_permutation, Permutation};
use crate::scalar::{int_pow, Scalar};

/// Largest configuration count the brute-force engine will enumerate.
pub const BRUTE_FORCE_LIMIT: f64 = 1e8;
/// Largest row-state dimension the transfer-matrix engine will allocate.
pub const TRANSFER_DIM_LIMIT: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Every top site biased towards the identity.
    Homogeneous,
    /// Top sites in region A pinned towards `k` disjoint `n`-cycles.
    RegionA { n: usize, k: usize },
    /// Top sites in region A pinned towards an arbitrary permutation.
    Pinned(Permutation),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    BruteForce,
    TransferMatrix,
}

/// Per-site boundary factors, `None` for bulk sites.
fn site_factors<T: Scalar>(
    patch: &HoneycombPatch,
    weights: &BondWeights<T>,
    boundary: &Boundary,
) -> Result<Vec<Option<Vec<T>>>> {
    patch.validate()?;
    let q = weights.q_order;
    let d = weights.d;
    let pin = match boundary {
        Boundary::Homogeneous => None,
        Boundary::RegionA { n, k } => Some(boundary_permutation(*n, *k)?),
        Boundary::Pinned(g) => Some(g.clone()),
    };
    if let Some(g) = &pin {
        if g.len() != q {
            return Err(Error::InvalidParams(format!(
                "boundary permutation acts on {} replicas, weights have Q = {q}",
                g.len()
            )));
        }
    }
    let pin = pin.map(|g| g.inverse());
    let norm = int_pow::<T>(d, q);
    let bottom: Vec<T> = weights
        .perms
        .iter()
        .map(|g| int_pow::<T>(d, g.cycle_count()) / norm.clone())
        .collect();
    let top_b: Vec<T> = weights.perms.iter().map(|g| int_pow(d, g.cycle_count())).collect();
    let top_a: Option<Vec<T>> = pin.as_ref().map(|gbi| {
        weights
            .perms
            .iter()
            .map(|g| int_pow(d, gbi.compose_unchecked(g).cycle_count()))
            .collect()
    });

    let mut out = vec![None; patch.num_sites()];
    for &s in &patch.bottom {
        out[s] = Some(bottom.clone());
    }
    for &s in &patch.top {
        out[s] = Some(top_b.clone());
    }
    if let Some(top_a) = top_a {
        for &s in &patch.region_a {
            out[s] = Some(top_a.clone());
        }
    }
    Ok(out)
}

pub fn partition_function<T: Scalar>(
    patch: &HoneycombPatch,
    weights: &BondWeights<T>,
    boundary: &Boundary,
    engine: Engine,
) -> Result<T> {
    match engine {
        Engine::BruteForce => brute_force(patch, weights, boundary),
        Engine::TransferMatrix => transfer_matrix(patch, weights, boundary),
    }
}

fn brute_force<T: Scalar>(patch: &HoneycombPatch, weights: &BondWeights<T>, boundary: &Boundary) -> Result<T> {
    let factors = site_factors(patch, weights, boundary)?;
    let n = weights.group_order();
    let sites = patch.num_sites();
    let needed = (n as f64).powi(sites as i32);
    if needed > BRUTE_FORCE_LIMIT {
        return Err(Error::Budget {
            engine: "brute force",
            needed,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let prefix = sites.min(2);
    let blocks = n.pow(prefix as u32);
    let partials: Vec<T> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut cfg = vec![0usize; sites];
            let mut b = block;
            for slot in cfg.iter_mut().take(prefix) {
                *slot = b % n;
                b /= n;
            }
            let mut acc = T::zero();
            loop {
                acc = acc + configuration_weight(patch, weights, &factors, &cfg);
                let mut pos = prefix;
                loop {
                    if pos == sites {
                        return acc;
                    }
                    cfg[pos] += 1;
                    if cfg[pos] < n {
                        break;
                    }
                    cfg[pos] = 0;
                    pos += 1;
                }
            }
        })
        .collect();
    Ok(partials.into_iter().fold(T::zero(), |a, b| a + b))
}

fn configuration_weight<T: Scalar>(
    patch: &HoneycombPatch,
    weights: &BondWeights<T>,
    factors: &[Option<Vec<T>>],
    cfg: &[usize],
) -> T {
    let mut w = T::one();
    for &(a, b) in &patch.vertical_edges {
        w = w * weights.vertical(cfg[a], cfg[b]).clone();
    }
    for &(a, b) in &patch.zigzag_edges {
        w = w * weights.zigzag(cfg[a], cfg[b]).clone();
    }
    for (f, &g) in factors.iter().zip(cfg) {
        if let Some(f) = f {
            w = w * f[g].clone();
        }
    }
    w
}

fn transfer_matrix<T: Scalar>(patch: &HoneycombPatch, weights: &BondWeights<T>, boundary: &Boundary) -> Result<T> {
    let factors = site_factors(patch, weights, boundary)?;
    let regenerated = HoneycombPatch::new(patch.width, patch.depth, 0, patch.attachment)?;
    if regenerated.vertical_edges != patch.vertical_edges || regenerated.zigzag_edges != patch.zigzag_edges {
        return Err(Error::InconsistentPatch(
            "transfer matrix needs the generated row layout".into(),
        ));
    }
    let n = weights.group_order();
    let w = patch.width;
    let needed = (n as f64).powi(w as i32);
    if needed > TRANSFER_DIM_LIMIT {
        return Err(Error::Budget {
            engine: "transfer matrix",
            needed,
            limit: TRANSFER_DIM_LIMIT,
        });
    }
    let dim = n.pow(w as u32);
    let strides: Vec<usize> = (0..w).map(|c| n.pow(c as u32)).collect();
    let digit = |s: usize, c: usize| (s / strides[c]) % n;

    let mut v = vec![T::one(); dim];
    apply_row_factors(&mut v, &factors, 0, w, &digit);
    for row in 0..patch.depth - 1 {
        match patch.layer(row) {
            Layer::Vertical => {
                for c in 0..w {
                    v = column_update(&v, n, strides[c], |_, l, u| weights.vertical(l, u).clone());
                }
            }
            Layer::Zigzag { offset } => {
                let cols: Vec<usize> = if offset > 0 {
                    (0..w).rev().collect()
                } else {
                    (0..w).collect()
                };
                for c in cols {
                    let nb = c as isize - offset;
                    let nb = (0..w as isize).contains(&nb).then_some(nb as usize);
                    v = column_update(&v, n, strides[c], |s, l, u| {
                        let mut x = weights.zigzag(l, u).clone();
                        if let Some(nb) = nb {
                            x = x * weights.zigzag(digit(s, nb), u).clone();
                        }
                        x
                    });
                }
            }
        }
        apply_row_factors(&mut v, &factors, row + 1, w, &digit);
    }
    Ok(v.into_iter().fold(T::zero(), |a, b| a + b))
}

fn apply_row_factors<T: Scalar>(
    v: &mut [T],
    factors: &[Option<Vec<T>>],
    row: usize,
    width: usize,
    digit: &impl Fn(usize, usize) -> usize,
) {
    for c in 0..width {
        if let Some(f) = &factors[row * width + c] {
            for (s, x) in v.iter_mut().enumerate() {
                *x = x.clone() * f[digit(s, c)].clone();
            }
        }
    }
}

/// Replaces the digit at `stride` by summing the old value `l` against
/// `kernel(state, l, u)` for each new value `u`.
fn column_update<T: Scalar>(v: &[T], n: usize, stride: usize, kernel: impl Fn(usize, usize, usize) -> T) -> Vec<T> {
    let mut out = vec![T::zero(); v.len()];
    for (s, slot) in out.iter_mut().enumerate() {
        let u = (s / stride) % n;
        let base = s - u * stride;
        let mut acc = T::zero();
        for l in 0..n {
            let src = base + l * stride;
            if !v[src].is_zero() {
                acc = acc + v[src].clone() * kernel(src, l, u);
            }
        }
        *slot = acc;
    }
    out
}

/// `n/(1−n) · (Z_A − Z_∅)/(Q−1)` with `Q = nk + 1`.
pub fn renyi_from_partition<T: Scalar>(z_a: &T, z_empty: &T, n: usize, k: usize) -> Result<T> {
    if n < 2 || k < 1 {
        return Err(Error::InvalidParams(format!(
            "Renyi index needs n >= 2 and k >= 1 (got n={n}, k={k})"
        )));
    }
    let q = (n * k + 1) as i64;
    let n = n as i64;
    Ok(T::from_ratio(n, (1 - n) * (q - 1)) * (z_a.clone() - z_empty.clone()))
}

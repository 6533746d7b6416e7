//! Exhaustive check of the relabeling symmetries of the zigzag weights.

use serde::{Deserialize, Serialize};

use super::weights::BondWeights;
use crate::perm::Permutation;
use crate::scalar::Scalar;

const FLOAT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryVerdict {
    /// Every left/right relabeling is a symmetry.
    Full,
    /// Exactly the simultaneous relabelings `h_L = h_R` survive.
    DiagonalOnly,
    /// Anything else, including a broken diagonal.
    Other,
}

/// A relabeling `(h_L, h_R)` and a pair `(g, g′)` whose weight it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub h_left: Permutation,
    pub h_right: Permutation,
    pub g: Permutation,
    pub g_prime: Permutation,
    pub before: f64,
    pub after: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub q_order: usize,
    pub relabelings_tested: usize,
    pub relabelings_passed: usize,
    pub diagonal_tested: usize,
    pub diagonal_passed: usize,
    pub off_diagonal_passed: usize,
    /// `W(g⁻¹, g′⁻¹) = W(g, g′)` for all pairs.
    pub inversion: bool,
    /// `W(g′, g) = W(g, g′)` for all pairs.
    pub transpose: bool,
    pub verdict: SymmetryVerdict,
    pub witness: Option<Witness>,
}

/// Tests `W(h_L g h_R⁻¹, h_L g′ h_R⁻¹) = W(g, g′)` for every `(h_L, h_R)`.
pub fn symmetry_audit<T: Scalar>(weights: &BondWeights<T>) -> SymmetryReport {
    let perms = &weights.perms;
    let n = perms.len();
    let idx = |g: &Permutation| g.lex_rank();
    let eq = |a: &T, b: &T| a.close_to(b, FLOAT_TOL);

    let mut relabelings_passed = 0;
    let mut diagonal_passed = 0;
    let mut witness = None;
    for hl in perms {
        for hr in perms {
            let hri = hr.inverse();
            let map: Vec<usize> = perms
                .iter()
                .map(|g| idx(&hl.compose_unchecked(g).compose_unchecked(&hri)))
                .collect();
            let mut failure = None;
            'pairs: for i in 0..n {
                for j in 0..n {
                    let before = weights.zigzag(i, j);
                    let after = weights.zigzag(map[i], map[j]);
                    if !eq(before, after) {
                        failure = Some((i, j, before.to_f64(), after.to_f64()));
                        break 'pairs;
                    }
                }
            }
            match failure {
                None => {
                    relabelings_passed += 1;
                    if hl == hr {
                        diagonal_passed += 1;
                    }
                }
                Some((i, j, before, after)) => {
                    if witness.is_none() && hl != hr {
                        witness = Some(Witness {
                            h_left: hl.clone(),
                            h_right: hr.clone(),
                            g: perms[i].clone(),
                            g_prime: perms[j].clone(),
                            before,
                            after,
                        });
                    }
                }
            }
        }
    }

    let inv: Vec<usize> = perms.iter().map(|g| idx(&g.inverse())).collect();
    let inversion = (0..n).all(|i| (0..n).all(|j| eq(weights.zigzag(i, j), weights.zigzag(inv[i], inv[j]))));
    let transpose = (0..n).all(|i| (0..n).all(|j| eq(weights.zigzag(i, j), weights.zigzag(j, i))));

    let off_diagonal_passed = relabelings_passed - diagonal_passed;
    let verdict = if relabelings_passed == n * n {
        SymmetryVerdict::Full
    } else if diagonal_passed == n && off_diagonal_passed == 0 {
        SymmetryVerdict::DiagonalOnly
    } else {
        SymmetryVerdict::Other
    };
    SymmetryReport {
        q_order: weights.q_order,
        relabelings_tested: n * n,
        relabelings_passed,
        diagonal_tested: n,
        diagonal_passed,
        off_diagonal_passed,
        inversion,
        transpose,
        verdict,
        witness,
    }
}

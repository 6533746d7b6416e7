//! Weingarten function of the unitary group at finite dimension, computed
//! as an exact inverse of the permutation Gram matrix.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::perm::{all_permutations, Permutation};
use crate::scalar::{int_pow, Scalar};

/// `W(g)` for every `g` in S_Q, indexed by lexicographic rank.
#[derive(Clone, Debug, PartialEq)]
pub struct WeingartenTable {
    q_order: usize,
    d: usize,
    values: Vec<BigRational>,
}

/// Gram matrix `G[g,h] = d^{|g h⁻¹|}` over S_Q in lexicographic order.
pub fn gram_matrix<T: Scalar>(q_order: usize, d: usize) -> Vec<Vec<T>> {
    let perms = all_permutations(q_order);
    perms
        .iter()
        .map(|g| {
            perms
                .iter()
                .map(|h| int_pow(d, g.compose_unchecked(&h.inverse()).cycle_count()))
                .collect()
        })
        .collect()
}

pub fn weingarten_table(q_order: usize, d: usize) -> Result<WeingartenTable> {
    if d < q_order || d == 0 {
        return Err(Error::SingularGram { q: q_order, d });
    }
    let mut a: Vec<Vec<BigRational>> = gram_matrix(q_order, d);
    let n = a.len();
    let mut rhs = vec![BigRational::zero(); n];
    rhs[0] = BigRational::one();

    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(Error::SingularGram { q: q_order, d })?;
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = a[col][col].recip();
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        rhs[col] = &rhs[col] * &inv;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in col..n {
                let delta = &f * &a[col][c];
                a[r][c] -= delta;
            }
            let delta = &f * &rhs[col];
            rhs[r] -= delta;
        }
    }
    Ok(WeingartenTable {
        q_order,
        d,
        values: rhs,
    })
}

impl WeingartenTable {
    pub fn q_order(&self) -> usize {
        self.q_order
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn get(&self, g: &Permutation) -> &BigRational {
        assert_eq!(g.len(), self.q_order, "permutation size");
        &self.values[g.lex_rank()]
    }

    /// Values in lexicographic order of permutations.
    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn values_as<T: Scalar>(&self) -> Vec<T> {
        self.values.iter().map(T::from_rational).collect()
    }

    /// Largest deviation from `Σ_h G(g,h) W(h⁻¹g′) = δ_{g,g′}`; zero when exact.
    pub fn biorthogonality_defect(&self) -> BigRational {
        let perms = all_permutations(self.q_order);
        let mut worst = BigRational::zero();
        for g in &perms {
            for gp in &perms {
                let mut sum = BigRational::zero();
                for h in &perms {
                    let gram: BigRational = int_pow(self.d, g.compose_unchecked(&h.inverse()).cycle_count());
                    sum += gram * self.get(&h.inverse().compose_unchecked(gp));
                }
                if g == gp {
                    sum -= BigRational::one();
                }
                let dev = if sum < BigRational::zero() { -sum } else { sum };
                if dev > worst {
                    worst = dev;
                }
            }
        }
        worst
    }

    pub fn is_class_function(&self) -> bool {
        let perms = all_permutations(self.q_order);
        perms.iter().all(|g| {
            perms
                .iter()
                .all(|h| self.get(&g.conjugate_by(h).expect("same size")) == self.get(g))
        })
    }
}

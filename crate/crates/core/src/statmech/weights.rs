//! Bond weights of the replica lattice model.

use crate::error::{Error, Result};
use crate::perm::{all_permutations, join_exponent, pair_transposition, Permutation};
use crate::scalar::{int_pow, Scalar};
use crate::weingarten::weingarten_table;

fn check_sizes(g: &Permutation, gp: &Permutation) -> Result<usize> {
    if g.len() != gp.len() {
        return Err(Error::PermSizeMismatch(g.len(), gp.len()));
    }
    Ok(g.len())
}

/// Overlap of two permutation states through the replicated dephasing
/// channel of strength `q`.
///
/// Each subset of replica indices picks up a transposition `h_r` per member,
/// applied in ascending `r` and kept only when it joins two cycles of the
/// running product.
pub fn k_matrix_element<T: Scalar>(g: &Permutation, gp: &Permutation, q: &T, d: usize) -> Result<T> {
    let n = check_sizes(g, gp)?;
    let rel = g.compose_unchecked(&gp.inverse());
    let hs: Vec<Permutation> = (0..n).map(|r| pair_transposition(g, r)).collect();
    let keep = T::one() - q.clone();
    let mut total = T::zero();
    for subset in 0u32..(1 << n) {
        let l = subset.count_ones();
        let coeff = q.powi(l) * keep.powi(n as u32 - l);
        if coeff.is_zero() {
            continue;
        }
        let mut cur = rel.clone();
        for (r, h) in hs.iter().enumerate() {
            if subset >> r & 1 == 1 && join_exponent(&cur, h) == 1 {
                cur = cur.compose_unchecked(h);
            }
        }
        total = total + coeff * int_pow::<T>(d, cur.cycle_count());
    }
    Ok(total)
}

/// Zigzag-bond weight `(1−p)^Q K(g,g′) + p^Q d`.
pub fn w_km<T: Scalar>(g: &Permutation, gp: &Permutation, p: &T, q: &T, d: usize) -> Result<T> {
    let n = check_sizes(g, gp)? as u32;
    let k = k_matrix_element(g, gp, q, d)?;
    Ok((T::one() - p.clone()).powi(n) * k + p.powi(n) * T::from_usize(d))
}

/// Leading large-`d` form `d^Q ((1−p)^Q [(1−q) + q|g′|₁] δ_{g,g′} + p^Q)`.
pub fn large_d_weight<T: Scalar>(g: &Permutation, gp: &Permutation, p: &T, q: &T, d: usize) -> Result<T> {
    let n = check_sizes(g, gp)?;
    let mut inner = p.powi(n as u32);
    if g == gp {
        let fixed = T::from_usize(gp.fixed_points());
        inner = inner + (T::one() - p.clone()).powi(n as u32) * (T::one() - q.clone() + q.clone() * fixed);
    }
    Ok(int_pow::<T>(d, n) * inner)
}

/// Published `d^{Q−1}` term of `(1−p)^Q K(g,g′)`:
/// `([1 + q max(|g|₁,|g′⁻¹|₁)] δ_{|gg′⁻¹|,Q−1} + qQ δ_{g,g′} δ_{|g|₁,0}) d^{Q−1}`.
pub fn large_d_correction<T: Scalar>(g: &Permutation, gp: &Permutation, p: &T, q: &T, d: usize) -> Result<T> {
    let n = check_sizes(g, gp)?;
    let rel = g.compose_unchecked(&gp.inverse());
    let mut c = T::zero();
    if n >= 1 && rel.cycle_count() == n - 1 {
        let m = g.fixed_points().max(gp.inverse().fixed_points());
        c = c + T::one() + q.clone() * T::from_usize(m);
    }
    if g == gp && g.fixed_points() == 0 {
        c = c + q.clone() * T::from_usize(n);
    }
    let lead = (T::one() - p.clone()).powi(n as u32);
    Ok(lead * c * int_pow::<T>(d, n.saturating_sub(1)))
}

/// Complete weight tables over S_Q for one `(Q, d, p, q)`.
#[derive(Clone, Debug)]
pub struct BondWeights<T> {
    pub q_order: usize,
    pub d: usize,
    pub p: T,
    pub q: T,
    /// S_Q in lexicographic order; table indices refer to this list.
    pub perms: Vec<Permutation>,
    /// Vertical weight `W(g_i g_j⁻¹)` at `[i * n + j]`.
    pub w_v: Vec<T>,
    /// Zigzag weight `W_KM(g_i, g_j)` at `[i * n + j]`.
    pub w_zz: Vec<T>,
}

impl<T: Scalar> BondWeights<T> {
    /// Builds tables from `f64` couplings, read exactly for rational scalars.
    pub fn new(q_order: usize, d: usize, p: f64, q: f64) -> Result<Self> {
        Self::from_scalars(q_order, d, T::from_param(p)?, T::from_param(q)?)
    }

    pub fn from_scalars(q_order: usize, d: usize, p: T, q: T) -> Result<Self> {
        let unit = |x: &T| *x >= T::zero() && *x <= T::one();
        if !unit(&p) || !unit(&q) {
            return Err(Error::InvalidParams(format!(
                "p and q must lie in [0,1] (got {}, {})",
                p.to_f64(),
                q.to_f64()
            )));
        }
        if q_order == 0 {
            return Err(Error::InvalidParams("replica number must be at least 1".into()));
        }
        let wg = weingarten_table(q_order, d)?.values_as::<T>();
        let perms = all_permutations(q_order);
        let n = perms.len();
        let mut w_v = Vec::with_capacity(n * n);
        let mut w_zz = Vec::with_capacity(n * n);
        for g in &perms {
            for h in &perms {
                w_v.push(wg[g.compose_unchecked(&h.inverse()).lex_rank()].clone());
                w_zz.push(w_km(g, h, &p, &q, d)?);
            }
        }
        Ok(Self {
            q_order,
            d,
            p,
            q,
            perms,
            w_v,
            w_zz,
        })
    }

    pub fn exact(&self) -> bool {
        T::EXACT
    }

    /// Number of group elements, Q!.
    pub fn group_order(&self) -> usize {
        self.perms.len()
    }

    #[inline]
    pub fn vertical(&self, i: usize, j: usize) -> &T {
        &self.w_v[i * self.perms.len() + j]
    }

    #[inline]
    pub fn zigzag(&self, i: usize, j: usize) -> &T {
        &self.w_zz[i * self.perms.len() + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;

    type Q = BigRational;

    fn r(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_images(v.to_vec()).unwrap()
    }

    // Direct contraction over replica indices: each replica carries an
    // independent dephasing factor and the two permutation states tie the
    // indices together.
    fn tensor_oracle(g: &Permutation, gp: &Permutation, q: &Q, d: usize) -> Q {
        let n = g.len();
        let mut total = Q::zero();
        let mut a = vec![0usize; n];
        loop {
            if (0..n).all(|k| a[g.apply(k)] == a[gp.apply(k)]) {
                let mut term = r(1, 1);
                for k in 0..n {
                    let hit = if a[g.apply(k)] == a[k] { q.clone() } else { Q::zero() };
                    term *= r(1, 1) - q + hit;
                }
                total += term;
            }
            let mut pos = 0;
            loop {
                if pos == n {
                    return total;
                }
                a[pos] += 1;
                if a[pos] < d {
                    break;
                }
                a[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn matches_tensor_contraction() {
        for n in 1..=3 {
            let all = all_permutations(n);
            for d in 1..=4 {
                for q in [r(0, 1), r(1, 3), r(1, 2), r(1, 1)] {
                    for g in &all {
                        for gp in &all {
                            assert_eq!(
                                k_matrix_element(g, gp, &q, d).unwrap(),
                                tensor_oracle(g, gp, &q, d),
                                "g={g} g'={gp} d={d} q={q}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hand_examples() {
        let e = Permutation::identity(2);
        let t = p(&[1, 0]);
        for q in [r(0, 1), r(1, 5), r(1, 1)] {
            assert_eq!(k_matrix_element(&e, &e, &q, 3).unwrap(), r(9, 1));
        }
        // g=e: every h_r is trivial, so all four subsets give d^{|τ|} = 2.
        assert_eq!(k_matrix_element(&e, &t, &r(1, 2), 2).unwrap(), r(2, 1));
        // g=τ, g′=e: rel=τ; subsets containing r join nothing, so again 2.
        assert_eq!(k_matrix_element(&t, &e, &r(1, 2), 2).unwrap(), r(2, 1));
        // g=g′=τ: (1−q)²·4 + (2q(1−q) + q²)·2 at q=1/2 is 1 + 3/2.
        assert_eq!(k_matrix_element(&t, &t, &r(1, 2), 2).unwrap(), r(5, 2));
    }

    // Any insertion order gives the same final cycle count.
    #[test]
    fn insertion_order_is_irrelevant() {
        let all3 = all_permutations(3);
        for g in &all3 {
            for gp in &all3 {
                let rel = g.compose_unchecked(&gp.inverse());
                for subset in 0u32..8 {
                    let members: Vec<usize> = (0..3).filter(|r| subset >> r & 1 == 1).collect();
                    let mut counts = Vec::new();
                    for order in all_permutations(members.len()) {
                        let mut cur = rel.clone();
                        for &i in order.images() {
                            let h = pair_transposition(g, members[i]);
                            if join_exponent(&cur, &h) == 1 {
                                cur = cur.compose_unchecked(&h);
                            }
                        }
                        counts.push(cur.cycle_count());
                    }
                    assert!(counts.windows(2).all(|w| w[0] == w[1]), "g={g} g'={gp} S={subset:b}");
                }
            }
        }
    }

    #[test]
    fn noiseless_reduction_is_exact() {
        for n in 1..=3 {
            let all = all_permutations(n);
            for d in 1..=5 {
                for pv in [r(0, 1), r(3, 10), r(1, 1)] {
                    for g in &all {
                        for gp in &all {
                            let rel = g.compose_unchecked(&gp.inverse()).cycle_count();
                            let want = (r(1, 1) - &pv).powi(n as u32) * int_pow::<Q>(d, rel)
                                + pv.powi(n as u32) * Q::from_usize(d);
                            assert_eq!(w_km(g, gp, &pv, &Q::zero(), d).unwrap(), want);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn endpoints() {
        let all = all_permutations(3);
        for g in &all {
            for gp in &all {
                assert_eq!(w_km(g, gp, &r(1, 1), &r(1, 4), 5).unwrap(), r(5, 1));
            }
        }
        let e = Permutation::identity(3);
        let t = p(&[1, 0, 2]);
        let (pv, qv) = (r(3, 10), r(1, 100));
        let d = 4;
        assert_eq!(
            large_d_weight(&e, &t, &pv, &qv, d).unwrap(),
            Q::from_usize(64) * pv.powi(3)
        );
        assert_eq!(
            large_d_weight(&e, &e, &pv, &qv, d).unwrap(),
            Q::from_usize(64) * ((r(1, 1) - &pv).powi(3) * (r(1, 1) - &qv + &qv * r(3, 1)) + pv.powi(3))
        );
        assert!(matches!(
            w_km(&e, &Permutation::identity(2), &pv, &qv, d),
            Err(Error::PermSizeMismatch(3, 2))
        ));
    }

    // Noise-free check of the next-to-leading term: once the leading and
    // subleading parts are removed, only d^{|gg′⁻¹|} with |gg′⁻¹| ≤ Q−2 remains.
    #[test]
    fn subleading_term_without_noise() {
        let all = all_permutations(3);
        let (pv, qv) = (r(3, 10), Q::zero());
        let lead = (r(1, 1) - &pv).powi(3);
        for d in [4, 9] {
            for g in &all {
                for gp in &all {
                    let k = w_km(g, gp, &pv, &qv, d).unwrap() - pv.powi(3) * Q::from_usize(d);
                    let leading = if g == gp { &lead * int_pow::<Q>(d, 3) } else { Q::zero() };
                    let rest = k - leading - large_d_correction(g, gp, &pv, &qv, d).unwrap();
                    let c = g.compose_unchecked(&gp.inverse()).cycle_count();
                    let want = if c <= 1 { &lead * int_pow::<Q>(d, c) } else { Q::zero() };
                    assert_eq!(rest, want, "g={g} g'={gp}");
                }
            }
        }
    }

    #[test]
    fn swap_and_inversion_symmetries() {
        let all = all_permutations(3);
        let (pv, qv) = (r(1, 5), r(2, 7));
        for g in &all {
            for gp in &all {
                let w = w_km(g, gp, &pv, &qv, 3).unwrap();
                assert_eq!(w, w_km(gp, g, &pv, &qv, 3).unwrap());
                assert_eq!(w, w_km(&g.inverse(), &gp.inverse(), &pv, &qv, 3).unwrap());
            }
        }
    }

    #[test]
    fn tables() {
        let w = BondWeights::<Q>::new(2, 2, 0.3, 0.0).unwrap();
        assert!(w.exact());
        assert_eq!(w.group_order(), 2);
        assert_eq!(w.vertical(0, 0), &r(1, 3));
        assert_eq!(w.vertical(0, 1), &r(-1, 6));
        assert_eq!(w.vertical(1, 1), &r(1, 3));
        let lead = r(7, 10).powi(2);
        assert_eq!(w.zigzag(0, 1), &(&lead * r(2, 1) + r(9, 100) * r(2, 1)));
        let f = BondWeights::<f64>::new(3, 4, 0.3, 0.1).unwrap();
        let e = BondWeights::<Q>::new(3, 4, 0.3, 0.1).unwrap();
        for (a, b) in f.w_zz.iter().zip(&e.w_zz) {
            assert!((a - Scalar::to_f64(b)).abs() < 1e-12 * a.abs().max(1.0));
        }
        assert!(BondWeights::<f64>::new(3, 2, 0.3, 0.1).is_err());
        assert!(BondWeights::<f64>::new(2, 2, 1.3, 0.1).is_err());
    }
}

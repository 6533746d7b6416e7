//! Permutations of replica indices.
//!
//! Composition is functional: `a.compose(&b)` maps `i` to `a(b(i))`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
        }
    }

    pub fn from_images(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &x in &image {
            if x >= n || seen[x] {
                return Err(Error::NotAPermutation(image));
            }
            seen[x] = true;
        }
        Ok(Self { image })
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        assert!(a < n && b < n, "transposition ({a} {b}) out of range for {n}");
        let mut p = Self::identity(n);
        p.image.swap(a, b);
        p
    }

    /// The cycle `elems[0] -> elems[1] -> ... -> elems[0]`.
    pub fn cycle(n: usize, elems: &[usize]) -> Result<Self> {
        let mut image: Vec<usize> = (0..n).collect();
        for (k, &e) in elems.iter().enumerate() {
            if e >= n {
                return Err(Error::NotAPermutation(elems.to_vec()));
            }
            image[e] = elems[(k + 1) % elems.len()];
        }
        Self::from_images(image).map_err(|_| Error::NotAPermutation(elems.to_vec()))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.image.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::PermSizeMismatch(self.len(), other.len()));
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Self) -> Self {
        Self {
            image: other.image.iter().map(|&j| self.image[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.image.iter().enumerate() {
            inv[x] = i;
        }
        Self { image: inv }
    }

    /// Conjugate `h g h⁻¹`.
    pub fn conjugate_by(&self, h: &Self) -> Result<Self> {
        Ok(h.compose(self)?.compose_unchecked(&h.inverse()))
    }

    /// Number of cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut count = 0;
        for start in 0..self.len() {
            if !seen[start] {
                count += 1;
                let mut i = start;
                while !seen[i] {
                    seen[i] = true;
                    i = self.image[i];
                }
            }
        }
        count
    }

    pub fn fixed_points(&self) -> usize {
        self.image.iter().enumerate().filter(|(i, &x)| *i == x).count()
    }

    /// Cycles in order of their smallest element, each starting there.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push(i);
                i = self.image[i];
            }
            out.push(cyc);
        }
        out
    }

    /// Cycle lengths in non-increasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// +1 for even permutations, −1 for odd.
    pub fn sign(&self) -> i8 {
        if (self.len() - self.cycle_count()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Position in the lexicographic order of image arrays.
    pub fn lex_rank(&self) -> usize {
        let n = self.len();
        let mut rank = 0;
        let mut used = vec![false; n];
        for (pos, &x) in self.image.iter().enumerate() {
            let smaller = (0..x).filter(|&y| !used[y]).count();
            rank += smaller * factorial(n - 1 - pos);
            used[x] = true;
        }
        rank
    }

    pub fn from_lex_rank(n: usize, mut rank: usize) -> Result<Self> {
        if rank >= factorial(n) {
            return Err(Error::InvalidParams(format!("rank {rank} out of range for S_{n}")));
        }
        let mut pool: Vec<usize> = (0..n).collect();
        let mut image = Vec::with_capacity(n);
        for pos in 0..n {
            let f = factorial(n - 1 - pos);
            image.push(pool.remove(rank / f));
            rank %= f;
        }
        Ok(Self { image })
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(image: Vec<usize>) -> Result<Self> {
        Self::from_images(image)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.image
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("e");
        }
        for cyc in self.cycles().iter().filter(|c| c.len() > 1) {
            let parts: Vec<String> = cyc.iter().map(ToString::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// All of S_n in lexicographic order, so index equals [`Permutation::lex_rank`].
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::with_capacity(factorial(n));
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation { image: cur.clone() });
        // Standard next-permutation step.
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// `k` disjoint `n`-cycles on consecutive blocks, with the last index fixed.
pub fn boundary_permutation(n: usize, k: usize) -> Result<Permutation> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParams(format!(
            "boundary permutation needs n, k >= 1 (got n={n}, k={k})"
        )));
    }
    let q = n * k + 1;
    let mut image: Vec<usize> = (0..q).collect();
    for b in 0..k {
        for j in 0..n {
            image[b * n + j] = b * n + (j + 1) % n;
        }
    }
    Ok(Permutation { image })
}

/// `h_r = (g⁻¹(r) r)`; the identity when `r` is a fixed point of `g`.
pub fn pair_transposition(g: &Permutation, r: usize) -> Permutation {
    let gi = g.image.iter().position(|&x| x == r).expect("r in range");
    Permutation::transposition(g.len(), gi, r)
}

/// 1 when right-multiplying `rel` by `h` joins two cycles, else 0.
pub fn join_exponent(rel: &Permutation, h: &Permutation) -> u32 {
    u32::from(rel.compose_unchecked(h).cycle_count() < rel.cycle_count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_images(v.to_vec()).unwrap()
    }

    #[test]
    fn cycle_statistics() {
        let e = Permutation::identity(4);
        assert_eq!((e.cycle_count(), e.fixed_points()), (4, 4));
        let t = Permutation::transposition(4, 1, 3);
        assert_eq!((t.cycle_count(), t.fixed_points()), (3, 2));
        let c = Permutation::cycle(4, &[0, 1, 2, 3]).unwrap();
        assert_eq!((c.cycle_count(), c.fixed_points()), (1, 0));
        assert_eq!(c.cycle_type(), vec![4]);
        assert_eq!(c.to_string(), "(0 1 2 3)");
        assert_eq!(e.to_string(), "e");
        assert_eq!(t.inverse(), t);
    }

    #[test]
    fn validation_and_mismatch() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_images(vec![0, 2]).is_err());
        assert!(Permutation::cycle(3, &[0, 1, 0]).is_err());
        assert_eq!(
            Permutation::identity(2).compose(&Permutation::identity(3)),
            Err(Error::PermSizeMismatch(2, 3))
        );
    }

    #[test]
    fn composition_is_functional() {
        let a = p(&[1, 2, 0]);
        let b = p(&[1, 0, 2]);
        let ab = a.compose(&b).unwrap();
        for i in 0..3 {
            assert_eq!(ab.apply(i), a.apply(b.apply(i)));
        }
    }

    #[test]
    fn boundary_permutations() {
        let g = boundary_permutation(2, 1).unwrap();
        assert_eq!(g, p(&[1, 0, 2]));
        assert_eq!((g.cycle_count(), g.fixed_points()), (2, 1));
        assert!(boundary_permutation(1, 4).unwrap().is_identity());
        let g = boundary_permutation(3, 2).unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!((g.cycle_count(), g.fixed_points()), (3, 1));
        for n in 1..=4 {
            for k in 1..=3 {
                let g = boundary_permutation(n, k).unwrap();
                let mut want = vec![n; k];
                want.push(1);
                want.sort_unstable_by(|a, b| b.cmp(a));
                assert_eq!(g.cycle_type(), want, "n={n} k={k}");
            }
        }
        assert!(boundary_permutation(0, 1).is_err());
    }

    #[test]
    fn join_rule_examples() {
        let e = Permutation::identity(3);
        for r in 0..3 {
            let h = pair_transposition(&e, r);
            assert!(h.is_identity());
            assert_eq!(join_exponent(&e, &h), 0);
        }
        let g = p(&[1, 0]);
        let h = pair_transposition(&g, 0);
        assert_eq!(h, p(&[1, 0]));
        assert_eq!(join_exponent(&g, &h), 0);
        assert_eq!(g.compose(&h).unwrap().cycle_count(), 2);
    }

    // Brute force over S_3: the t rule picks whichever of {rel, rel·h} has
    // fewer cycles, so rel·h^t never has more cycles than rel.
    #[test]
    fn join_rule_exhaustive_q3() {
        let all = all_permutations(3);
        for g in &all {
            for gp in &all {
                let rel = g.compose(&gp.inverse()).unwrap();
                for r in 0..3 {
                    let h = pair_transposition(g, r);
                    let t = join_exponent(&rel, &h);
                    let with = rel.compose(&h).unwrap().cycle_count();
                    let chosen = if t == 1 { with } else { rel.cycle_count() };
                    assert_eq!(chosen, with.min(rel.cycle_count()));
                    if !h.is_identity() {
                        assert_eq!(with.abs_diff(rel.cycle_count()), 1);
                    }
                }
            }
        }
    }

    #[test]
    fn lex_order_and_rank() {
        for n in 0..=5 {
            let all = all_permutations(n);
            assert_eq!(all.len(), factorial(n));
            for (i, g) in all.iter().enumerate() {
                assert_eq!(g.lex_rank(), i);
                assert_eq!(&Permutation::from_lex_rank(n, i).unwrap(), g);
            }
            assert!(all.windows(2).all(|w| w[0] < w[1]));
        }
        assert!(Permutation::from_lex_rank(3, 6).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let g = p(&[2, 0, 1]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, "[2,0,1]");
        assert_eq!(serde_json::from_str::<Permutation>(&s).unwrap(), g);
        assert!(serde_json::from_str::<Permutation>("[0,0]").is_err());
    }

    fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
        (0..factorial(n)).prop_map(move |r| Permutation::from_lex_rank(n, r).unwrap())
    }

    proptest! {
        #[test]
        fn group_axioms(a in perm_strategy(5), b in perm_strategy(5), c in perm_strategy(5)) {
            let ab_c = a.compose(&b).unwrap().compose(&c).unwrap();
            let a_bc = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            prop_assert!(a.compose(&a.inverse()).unwrap().is_identity());
            prop_assert!(a.inverse().compose(&a).unwrap().is_identity());
        }

        #[test]
        fn transposition_flips_parity(g in perm_strategy(5), i in 0usize..5, j in 0usize..5) {
            prop_assume!(i != j);
            let t = Permutation::transposition(5, i, j);
            let gt = g.compose(&t).unwrap();
            prop_assert_eq!((g.cycle_count() + gt.cycle_count()) % 2, 1);
            prop_assert_eq!(g.sign(), -gt.sign());
        }

        #[test]
        fn conjugation_preserves_cycle_type(g in perm_strategy(5), h in perm_strategy(5)) {
            prop_assert_eq!(g.conjugate_by(&h).unwrap().cycle_type(), g.cycle_type());
        }
    }
}

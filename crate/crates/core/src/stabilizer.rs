//! Mixed stabilizer states with a variable number of generators.
//!
//! The state on `L` qubits is `ρ = 2^{-L} Π_j (1 + g_j)` for `k ≤ L`
//! independent, commuting, Hermitian generators `g_j`. No destabilizers are
//! kept. Generators live in a flat row-major word matrix (`x` words followed
//! by `z` words per row) with a separate phase column.
//!
//! Single-site Z measurements need to know whether `±Z_s` belongs to the
//! group. To answer that cheaply the state can be brought into a *pivot
//! form*: the rows whose x-part is nonzero each own a designated x-column
//! that no other row touches, and the remaining pure-Z rows each own a
//! designated z-column likewise. Measurement updates preserve the form; gates
//! invalidate it and it is rebuilt lazily, at most once per measurement layer.

use crate::bits::{self, BitVec};
use crate::error::{Error, Result};
use crate::pauli::{product_phase, PauliOperator};

const NONE: u32 = u32::MAX;

/// Bit-sliced form of a two-site Clifford acting on local bits
/// `(x_i, z_i, x_j, z_j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct GateAction {
    /// For each output bit, the mask of input bits XORed into it.
    pub lin: [u8; 4],
    /// Algebraic normal form of the sign flip: bit `m` set means the
    /// monomial `Π_{b ∈ m} input_b` appears.
    pub sign_anf: u16,
}

impl GateAction {
    pub fn from_table(table: &[(u8, u8); 16]) -> Self {
        let mut lin = [0u8; 4];
        for (o, l) in lin.iter_mut().enumerate() {
            for b in 0..4 {
                *l |= ((table[1 << b].0 >> o) & 1) << b;
            }
        }
        let mut anf = [0u8; 16];
        for (a, t) in anf.iter_mut().zip(table) {
            *a = (t.1 >> 1) & 1;
        }
        for b in 0..4 {
            for idx in 0..16 {
                if idx >> b & 1 == 1 {
                    anf[idx] ^= anf[idx ^ (1 << b)];
                }
            }
        }
        let sign_anf = anf.iter().enumerate().fold(0u16, |m, (i, &a)| m | ((a as u16) << i));
        Self { lin, sign_anf }
    }
}

/// In-place transpose of a 64×64 bit block: bit `c` of word `r` moves to
/// bit `r` of word `c`.
pub(crate) fn transpose64(a: &mut [u64; 64]) {
    let mut j = 32;
    let mut m: u64 = 0x0000_0000_ffff_ffff;
    while j != 0 {
        let mut k = 0;
        while k < 64 {
            let t = ((a[k] >> j) ^ a[k + j]) & m;
            a[k + j] ^= t;
            a[k] ^= t << j;
            k = (k + j + 1) & !j;
        }
        j >>= 1;
        m ^= m << j;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct PivotForm {
    /// For every row, its designated column; x-column if the row has x
    /// support, z-column otherwise.
    row_pivot: Vec<u32>,
    x_owner: Vec<u32>,
    z_owner: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct StabilizerState {
    n: usize,
    w: usize,
    rows: Vec<u64>,
    phases: Vec<u8>,
    form: Option<PivotForm>,
}

impl PartialEq for StabilizerState {
    /// Equality of generator lists (order and phase included).
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.rows == other.rows && self.phases == other.phases
    }
}

impl StabilizerState {
    /// `|0…0⟩`: generator `i` is `+Z_i`.
    pub fn new_product_zero(n: usize) -> Result<Self> {
        let mut s = Self::new_maximally_mixed(n)?;
        for i in 0..n {
            s.push_row(&PauliOperator::z(n, i));
        }
        s.debug_check();
        Ok(s)
    }

    /// `I / 2^L`: no generators.
    pub fn new_maximally_mixed(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySystem);
        }
        Ok(Self {
            n,
            w: bits::words_for(n),
            rows: Vec::new(),
            phases: Vec::new(),
            form: None,
        })
    }

    /// Builds a state from an explicit generator list, validating every
    /// invariant.
    pub fn from_generators(n: usize, gens: &[PauliOperator]) -> Result<Self> {
        let mut s = Self::new_maximally_mixed(n)?;
        for g in gens {
            s.insert_generator(g.clone())?;
        }
        Ok(s)
    }

    #[inline]
    pub fn num_sites(&self) -> usize {
        self.n
    }

    /// Number of generators `k`.
    #[inline]
    pub fn rank(&self) -> usize {
        self.phases.len()
    }

    pub fn is_pure(&self) -> bool {
        self.rank() == self.n
    }

    #[inline]
    fn stride(&self) -> usize {
        2 * self.w
    }

    #[inline]
    pub(crate) fn row(&self, r: usize) -> &[u64] {
        let s = self.stride();
        &self.rows[r * s..(r + 1) * s]
    }

    #[inline]
    fn x_bit(&self, r: usize, site: usize) -> bool {
        (self.rows[r * self.stride() + site / 64] >> (site % 64)) & 1 == 1
    }

    #[inline]
    fn z_bit(&self, r: usize, site: usize) -> bool {
        (self.rows[r * self.stride() + self.w + site / 64] >> (site % 64)) & 1 == 1
    }

    pub fn generator(&self, r: usize) -> PauliOperator {
        let row = self.row(r);
        PauliOperator {
            x: BitVec::from_words(row[..self.w].to_vec(), self.n),
            z: BitVec::from_words(row[self.w..].to_vec(), self.n),
            phase: self.phases[r],
        }
    }

    pub fn generators(&self) -> Vec<PauliOperator> {
        (0..self.rank()).map(|r| self.generator(r)).collect()
    }

    fn push_row(&mut self, g: &PauliOperator) {
        self.rows.extend_from_slice(g.x.words());
        self.rows.extend_from_slice(g.z.words());
        self.phases.push(g.phase);
        self.form = None;
    }

    /// `row[dst] ← row[dst] · row[src]`.
    fn row_mul(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let (s, w) = (self.stride(), self.w);
        let (d, sr) = if dst < src {
            let (a, b) = self.rows.split_at_mut(src * s);
            (&mut a[dst * s..(dst + 1) * s], &b[..s])
        } else {
            let (a, b) = self.rows.split_at_mut(dst * s);
            (&mut b[..s], &a[src * s..(src + 1) * s])
        };
        let g = product_phase(&d[..w], &d[w..], &sr[..w], &sr[w..]);
        for (a, b) in d.iter_mut().zip(sr) {
            *a ^= *b;
        }
        self.phases[dst] = ((self.phases[dst] as u32 + self.phases[src] as u32 + g) & 3) as u8;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride();
        for i in 0..s {
            self.rows.swap(a * s + i, b * s + i);
        }
        self.phases.swap(a, b);
    }

    /// Overwrites row `r` with `sign · Z_site`.
    fn set_row_z(&mut self, r: usize, site: usize, negative: bool) {
        let s = self.stride();
        let row = &mut self.rows[r * s..(r + 1) * s];
        row.fill(0);
        row[self.w + site / 64] = 1u64 << (site % 64);
        self.phases[r] = if negative { 2 } else { 0 };
    }

    /// Removes row `r` by moving the last row into its slot.
    fn swap_remove_row(&mut self, r: usize) {
        let last = self.rank() - 1;
        self.swap_rows(r, last);
        let s = self.stride();
        self.rows.truncate(last * s);
        self.phases.truncate(last);
    }

    /// Appends `g` as a new generator.
    ///
    /// `g` must be Hermitian, commute with every generator, and be
    /// independent of them; anything else is rejected.
    pub fn insert_generator(&mut self, g: PauliOperator) -> Result<()> {
        if g.num_sites() != self.n {
            return Err(Error::LengthMismatch(g.num_sites(), self.n));
        }
        if !g.is_hermitian() {
            return Err(Error::NonHermitian(g.phase));
        }
        for r in 0..self.rank() {
            if !self.generator(r).commutes_unchecked(&g) {
                return Err(Error::Anticommuting);
            }
        }
        let mut m: Vec<Vec<u64>> = (0..self.rank()).map(|r| self.row(r).to_vec()).collect();
        let mut v = g.x.words().to_vec();
        v.extend_from_slice(g.z.words());
        m.push(v);
        if bits::rank_of_words(&mut m, self.stride()) != self.rank() + 1 {
            return Err(Error::Dependent);
        }
        self.push_row(&g);
        self.debug_check();
        Ok(())
    }

    /// Rows whose x-part has a one at `site`, i.e. generators that
    /// anticommute with `Z_site`.
    pub(crate) fn rows_anticommuting_with_z(&self, site: usize) -> Vec<usize> {
        (0..self.rank()).filter(|&r| self.x_bit(r, site)).collect()
    }

    /// Conjugates every generator by two-site Cliffords on disjoint pairs.
    ///
    /// The generator matrix is transposed into column bit-vectors so that
    /// each gate updates 64 generators per word operation, then transposed
    /// back.
    pub(crate) fn apply_gate_actions(&mut self, gates: &[(GateAction, usize, usize)]) {
        let k = self.rank();
        if k == 0 || gates.is_empty() {
            return;
        }
        let (n, w, s) = (self.n, self.w, self.stride());
        let kw = k.div_ceil(64);
        let mut cols = vec![0u64; 2 * n * kw];
        let mut sign = vec![0u64; kw];
        let mut block = [0u64; 64];
        for rb in 0..kw {
            for cw in 0..2 * w {
                for (rl, b) in block.iter_mut().enumerate() {
                    let r = rb * 64 + rl;
                    *b = if r < k { self.rows[r * s + cw] } else { 0 };
                }
                transpose64(&mut block);
                let (base, off) = if cw < w { (cw * 64, 0) } else { ((cw - w) * 64, n) };
                for (cl, b) in block.iter().enumerate() {
                    if base + cl < n {
                        cols[(off + base + cl) * kw + rb] = *b;
                    }
                }
            }
        }
        for (r, &ph) in self.phases.iter().enumerate() {
            debug_assert!(ph % 2 == 0);
            sign[r / 64] |= ((ph >> 1) as u64) << (r % 64);
        }
        for (g, i, j) in gates {
            let idx = [*i, n + *i, *j, n + *j];
            for rw in 0..kw {
                let v = idx.map(|c| cols[c * kw + rw]);
                let mut out = [0u64; 4];
                for (o, m) in out.iter_mut().zip(g.lin) {
                    for (b, vb) in v.iter().enumerate() {
                        if m >> b & 1 == 1 {
                            *o ^= vb;
                        }
                    }
                }
                let mut flip = 0u64;
                let mut anf = g.sign_anf;
                while anf != 0 {
                    let mono = anf.trailing_zeros();
                    anf &= anf - 1;
                    let mut term = !0u64;
                    for (b, vb) in v.iter().enumerate() {
                        if mono >> b & 1 == 1 {
                            term &= vb;
                        }
                    }
                    flip ^= term;
                }
                sign[rw] ^= flip;
                for (c, o) in idx.iter().zip(out) {
                    cols[c * kw + rw] = o;
                }
            }
        }
        for rb in 0..kw {
            for cw in 0..2 * w {
                let (base, off) = if cw < w { (cw * 64, 0) } else { ((cw - w) * 64, n) };
                for (cl, b) in block.iter_mut().enumerate() {
                    *b = if base + cl < n {
                        cols[(off + base + cl) * kw + rb]
                    } else {
                        0
                    };
                }
                transpose64(&mut block);
                for (rl, b) in block.iter().enumerate() {
                    let r = rb * 64 + rl;
                    if r < k {
                        self.rows[r * s + cw] = *b;
                    }
                }
            }
        }
        for (r, ph) in self.phases.iter_mut().enumerate() {
            *ph = (((sign[r / 64] >> (r % 64)) & 1) as u8) << 1;
        }
        self.form = None;
        self.debug_check();
    }

    /// Row-by-row lookup-table version of [`Self::apply_gate_actions`].
    #[cfg(test)]
    pub(crate) fn apply_local_tables(&mut self, gates: &[(&[(u8, u8); 16], usize, usize)]) {
        let (s, w) = (self.stride(), self.w);
        for (row, phase) in self.rows.chunks_exact_mut(s).zip(self.phases.iter_mut()) {
            for &(table, i, j) in gates {
                let (wi, bi) = (i / 64, i % 64);
                let (wj, bj) = (j / 64, j % 64);
                let idx = (((row[wi] >> bi) & 1)
                    | (((row[w + wi] >> bi) & 1) << 1)
                    | (((row[wj] >> bj) & 1) << 2)
                    | (((row[w + wj] >> bj) & 1) << 3)) as usize;
                let (out, dphase) = table[idx];
                let out = out as u64;
                row[wi] = (row[wi] & !(1 << bi)) | ((out & 1) << bi);
                row[w + wi] = (row[w + wi] & !(1 << bi)) | (((out >> 1) & 1) << bi);
                row[wj] = (row[wj] & !(1 << bj)) | (((out >> 2) & 1) << bj);
                row[w + wj] = (row[w + wj] & !(1 << bj)) | (((out >> 3) & 1) << bj);
                *phase = (*phase + dphase) & 3;
            }
        }
        self.form = None;
    }

    fn ensure_form(&mut self) {
        if self.form.is_none() {
            self.build_form();
        }
    }

    /// Full elimination into pivot form.
    fn build_form(&mut self) {
        let (n, k) = (self.n, self.rank());
        let mut row_pivot = vec![NONE; k];
        let mut x_owner = vec![NONE; n];
        let mut z_owner = vec![NONE; n];
        let mut next = 0;
        for c in 0..n {
            if next == k {
                break;
            }
            let Some(p) = (next..k).find(|&r| self.x_bit(r, c)) else {
                continue;
            };
            self.swap_rows(next, p);
            for r in 0..k {
                if r != next && self.x_bit(r, c) {
                    self.row_mul(r, next);
                }
            }
            row_pivot[next] = c as u32;
            x_owner[c] = next as u32;
            next += 1;
        }
        let z_start = next;
        for c in 0..n {
            if next == k {
                break;
            }
            let Some(p) = (next..k).find(|&r| self.z_bit(r, c)) else {
                continue;
            };
            self.swap_rows(next, p);
            for r in z_start..k {
                if r != next && self.z_bit(r, c) {
                    self.row_mul(r, next);
                }
            }
            row_pivot[next] = c as u32;
            z_owner[c] = next as u32;
            next += 1;
        }
        debug_assert_eq!(next, k, "generators are not independent");
        self.form = Some(PivotForm {
            row_pivot,
            x_owner,
            z_owner,
        });
    }

    fn z_is_pure(&self, r: usize) -> bool {
        self.row(r)[..self.w].iter().all(|&w| w == 0)
    }

    /// Turns row `r`, which must currently be `±Z_site` with no designated
    /// pivot, into a pure-Z pivot row.
    fn adopt_z_row(&mut self, r: usize, site: usize) {
        let form = self.form.as_ref().expect("pivot form");
        let owner = form.z_owner[site];
        if owner != NONE {
            self.row_mul(r, owner as usize);
        }
        let c = (0..self.n)
            .find(|&c| self.z_bit(r, c))
            .expect("measured Z lies outside the group");
        let k = self.rank();
        for other in 0..k {
            if other == r {
                continue;
            }
            let is_z_pivot_row = {
                let f = self.form.as_ref().unwrap();
                let pc = f.row_pivot[other];
                pc != NONE && f.z_owner[pc as usize] == other as u32
            };
            if is_z_pivot_row && self.z_bit(other, c) {
                self.row_mul(other, r);
            }
        }
        let f = self.form.as_mut().unwrap();
        f.row_pivot[r] = c as u32;
        f.z_owner[c] = r as u32;
    }

    /// Multiplies the first listed row into all the others so that only it
    /// still anticommutes with the measured `Z`. Returns that row.
    fn isolate_anticommuting(&mut self, rows: &[usize]) -> usize {
        let p = rows[0];
        for &r in &rows[1..] {
            self.row_mul(r, p);
        }
        p
    }

    fn release_x_pivot(&mut self, r: usize) {
        if let Some(f) = self.form.as_mut() {
            let c = f.row_pivot[r];
            debug_assert!(c != NONE && f.x_owner[c as usize] == r as u32);
            f.x_owner[c as usize] = NONE;
            f.row_pivot[r] = NONE;
        }
    }

    /// Removes row `r` from the matrix and the pivot bookkeeping.
    fn delete_row(&mut self, r: usize) {
        let last = self.rank() - 1;
        self.swap_remove_row(r);
        if let Some(f) = self.form.as_mut() {
            debug_assert_eq!(f.row_pivot[r], NONE);
            f.row_pivot.swap_remove(r);
            if r != last {
                let c = f.row_pivot[r];
                if c != NONE {
                    let c = c as usize;
                    if f.x_owner[c] == last as u32 {
                        f.x_owner[c] = r as u32;
                    } else {
                        debug_assert_eq!(f.z_owner[c], last as u32);
                        f.z_owner[c] = r as u32;
                    }
                }
            }
        }
    }

    /// Dephasing channel `ρ → (ρ + Z ρ Z)/2` on `site`. Returns the change in
    /// `k` (0 or -1).
    pub(crate) fn dephase(&mut self, site: usize) -> i8 {
        let anti = self.rows_anticommuting_with_z(site);
        if anti.is_empty() {
            return 0;
        }
        let p = self.isolate_anticommuting(&anti);
        self.release_x_pivot(p);
        self.delete_row(p);
        self.debug_check();
        -1
    }

    /// Projective Z measurement on `site`. `coin` supplies a uniform bit when
    /// the outcome is random. Returns `(outcome, Δk)`.
    pub(crate) fn project_z(&mut self, site: usize, coin: impl FnOnce() -> bool) -> (u8, i8) {
        let anti = self.rows_anticommuting_with_z(site);
        if !anti.is_empty() {
            let outcome = coin();
            let p = self.isolate_anticommuting(&anti);
            self.release_x_pivot(p);
            self.set_row_z(p, site, outcome);
            if self.form.is_some() {
                self.adopt_z_row(p, site);
            }
            self.debug_check();
            return (outcome as u8, 0);
        }
        if let Some(sign) = self.z_membership(site) {
            return (sign, 0);
        }
        let outcome = coin();
        let mut g = PauliOperator::z(self.n, site);
        if outcome {
            g = g.negated();
        }
        let form = self.form.take();
        self.push_row(&g);
        self.form = form.map(|mut f| {
            f.row_pivot.push(NONE);
            f
        });
        let r = self.rank() - 1;
        self.adopt_z_row(r, site);
        self.debug_check();
        (outcome as u8, 1)
    }

    /// If `±Z_site` is in the stabilizer group, returns 0 for `+` and 1 for
    /// `-`. Assumes no generator anticommutes with `Z_site`.
    fn z_membership(&mut self, site: usize) -> Option<u8> {
        self.ensure_form();
        let f = self.form.as_ref().unwrap();
        let owner = f.z_owner[site];
        if owner == NONE {
            return None;
        }
        let r = owner as usize;
        let row = self.row(r);
        let only_site = row[..self.w].iter().all(|&w| w == 0)
            && row[self.w..].iter().enumerate().all(|(wi, &w)| {
                if wi == site / 64 {
                    w == 1u64 << (site % 64)
                } else {
                    w == 0
                }
            });
        only_site.then(|| self.phases[r] / 2)
    }

    /// Expectation value of a Hermitian Pauli string: `±1` if `±P` is in the
    /// group, else 0.
    pub fn expectation(&self, p: &PauliOperator) -> Result<i8> {
        if p.num_sites() != self.n {
            return Err(Error::LengthMismatch(p.num_sites(), self.n));
        }
        if p.is_identity_up_to_phase() {
            return Ok(if p.phase == 2 { -1 } else { 1 });
        }
        if (0..self.rank()).any(|r| !self.generator(r).commutes_unchecked(p)) {
            return Ok(0);
        }
        // Gaussian elimination with phase tracking on a scratch copy.
        let mut rows: Vec<PauliOperator> = self.generators();
        let mut target = p.clone();
        let mut acc = PauliOperator::identity(self.n);
        let mut used = vec![false; rows.len()];
        for col in 0..2 * self.n {
            let bit = |q: &PauliOperator| {
                if col < self.n {
                    q.x.get(col)
                } else {
                    q.z.get(col - self.n)
                }
            };
            let Some(piv) = (0..rows.len()).find(|&r| !used[r] && bit(&rows[r])) else {
                continue;
            };
            used[piv] = true;
            let pivot = rows[piv].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != piv && !used[r] && bit(row) {
                    row.mul_assign_right(&pivot);
                }
            }
            if bit(&target) {
                target.mul_assign_right(&pivot);
                acc.mul_assign_right(&pivot);
            }
        }
        if !target.is_identity_up_to_phase() {
            return Ok(0);
        }
        // acc has the same bits as p; compare phases.
        let rel = (acc.phase + 4 - p.phase) & 3;
        Ok(match rel {
            0 => 1,
            2 => -1,
            _ => unreachable!("non-Hermitian group element"),
        })
    }

    /// Rank of the generator matrix restricted to the sites in `mask`.
    pub(crate) fn restricted_rank(&self, mask: &BitVec) -> usize {
        let w = self.w;
        let mw = mask.words();
        let mut m: Vec<Vec<u64>> = (0..self.rank())
            .map(|r| {
                let row = self.row(r);
                let mut v = Vec::with_capacity(2 * w);
                v.extend(row[..w].iter().zip(mw).map(|(a, b)| a & b));
                v.extend(row[w..].iter().zip(mw).map(|(a, b)| a & b));
                v
            })
            .filter(|v| v.iter().any(|&x| x != 0))
            .collect();
        bits::rank_of_words(&mut m, 2 * w)
    }

    /// Checks commutation, independence and Hermiticity of the generators.
    pub fn check_invariants(&self) -> Result<()> {
        let gens = self.generators();
        for g in &gens {
            if !g.is_hermitian() {
                return Err(Error::NonHermitian(g.phase));
            }
        }
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                if !gens[i].commutes_unchecked(&gens[j]) {
                    return Err(Error::Anticommuting);
                }
            }
        }
        let mut m: Vec<Vec<u64>> = (0..self.rank()).map(|r| self.row(r).to_vec()).collect();
        if bits::rank_of_words(&mut m, self.stride()) != self.rank() {
            return Err(Error::Dependent);
        }
        if let Some(f) = &self.form {
            for (r, &c) in f.row_pivot.iter().enumerate() {
                if c == NONE {
                    return Err(Error::InvalidParams(format!("row {r} has no pivot")));
                }
                let c = c as usize;
                let (owner_tab, is_x) = if f.x_owner[c] == r as u32 {
                    (&f.x_owner, true)
                } else {
                    (&f.z_owner, false)
                };
                if owner_tab[c] != r as u32 {
                    return Err(Error::InvalidParams(format!("row {r} pivot table mismatch")));
                }
                for other in 0..self.rank() {
                    if other == r {
                        continue;
                    }
                    let clash = if is_x {
                        self.x_bit(other, c)
                    } else {
                        self.z_is_pure(other) && self.z_bit(other, c)
                    };
                    if clash {
                        return Err(Error::InvalidParams(format!(
                            "row {other} touches pivot column {c} of row {r}"
                        )));
                    }
                }
                if !is_x && !self.z_is_pure(r) {
                    return Err(Error::InvalidParams(format!("z-pivot row {r} has x support")));
                }
            }
        }
        Ok(())
    }

    #[inline]
    fn debug_check(&self) {
        #[cfg(debug_assertions)]
        if self.n <= 12 {
            if let Err(e) = self.check_invariants() {
                panic!("stabilizer invariant violated: {e}\n{:?}", self.generators());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn transpose_matches_naive() {
        let mut x = 0x9e37_79b9_7f4a_7c15u64;
        let mut a = [0u64; 64];
        for v in a.iter_mut() {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            *v = x;
        }
        let orig = a;
        transpose64(&mut a);
        for r in 0..64 {
            for c in 0..64 {
                assert_eq!((a[c] >> r) & 1, (orig[r] >> c) & 1);
            }
        }
    }

    #[test]
    fn constructors() {
        let s = StabilizerState::new_product_zero(1).unwrap();
        assert_eq!(s.generators(), vec![p("Z")]);
        let s = StabilizerState::new_product_zero(4).unwrap();
        assert_eq!(s.rank(), 4);
        assert!(s
            .generators()
            .iter()
            .all(|g| g.weight() == 1 && g.z_bits().count_ones() == 1));
        assert_eq!(StabilizerState::new_maximally_mixed(8).unwrap().rank(), 0);
        assert_eq!(StabilizerState::new_product_zero(0).unwrap_err(), Error::EmptySystem);
        assert_eq!(StabilizerState::new_maximally_mixed(0).unwrap_err(), Error::EmptySystem);
    }

    #[test]
    fn insert_generator_contract() {
        let mut s = StabilizerState::new_maximally_mixed(1).unwrap();
        s.insert_generator(p("Z")).unwrap();
        assert_eq!(s.rank(), 1);
        assert_eq!(s.insert_generator(p("-Z")), Err(Error::Dependent));
        assert_eq!(s.insert_generator(p("X")), Err(Error::Anticommuting));

        let mut s = StabilizerState::from_generators(2, &[p("ZI")]).unwrap();
        s.insert_generator(p("IZ")).unwrap();
        assert_eq!(s.rank(), 2);

        let mut full = StabilizerState::new_product_zero(3).unwrap();
        for g in ["ZZI", "XXX", "IIZ", "YII"] {
            assert!(full.insert_generator(p(g)).is_err());
        }
        let mut s = StabilizerState::new_maximally_mixed(2).unwrap();
        assert_eq!(s.insert_generator(p("iZI")), Err(Error::NonHermitian(1)));
        assert!(s.insert_generator(p("Z")).is_err());
    }

    #[test]
    fn expectation_values() {
        let bell = StabilizerState::from_generators(2, &[p("XX"), p("ZZ")]).unwrap();
        assert_eq!(bell.expectation(&p("XX")).unwrap(), 1);
        assert_eq!(bell.expectation(&p("-YY")).unwrap(), 1);
        assert_eq!(bell.expectation(&p("YY")).unwrap(), -1);
        assert_eq!(bell.expectation(&p("ZI")).unwrap(), 0);
        assert_eq!(bell.expectation(&p("II")).unwrap(), 1);
    }

    #[test]
    fn projection_and_dephasing_preserve_form() {
        let mut s = StabilizerState::from_generators(3, &[p("XXI"), p("ZZI"), p("IIX")]).unwrap();
        let (v, dk) = s.project_z(2, || true);
        assert_eq!((v, dk), (1, 0));
        s.check_invariants().unwrap();
        assert_eq!(s.expectation(&p("IIZ")).unwrap(), -1);

        let mut s = StabilizerState::from_generators(3, &[p("XXX"), p("ZZI"), p("IZZ")]).unwrap();
        assert_eq!(s.dephase(0), -1);
        s.check_invariants().unwrap();
        let (_, dk) = s.project_z(0, || false);
        assert_eq!(dk, 1);
        s.check_invariants().unwrap();
        let before = s.generators();
        let (v, dk) = s.project_z(2, || unreachable!());
        assert_eq!((v, dk), (0, 0));
        assert_eq!(s.generators(), before);
        assert_eq!(s.expectation(&p("IIZ")).unwrap(), 1);
    }
}

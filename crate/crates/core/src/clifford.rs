//! Two-qubit Clifford gates as Pauli image tables.
//!
//! A gate is stored as the images of `X₀, Z₀, X₁, Z₁` (local sites 0 and 1)
//! under conjugation, each a Hermitian two-site Pauli with a sign. From those
//! four images a 16-entry lookup table is derived that maps the local bits of
//! any Pauli string to its image bits and phase increment, which is what the
//! stabilizer engine consumes.

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::PauliOperator;
use crate::stabilizer::{GateAction, StabilizerState};

/// Local 4-bit code of a two-site Pauli: bits `(x₀, z₀, x₁, z₁)` from LSB.
pub type LocalCode = u8;

#[inline]
fn anticommute(a: LocalCode, b: LocalCode) -> bool {
    let (xa, za) = (a & 0b0101, (a >> 1) & 0b0101);
    let (xb, zb) = (b & 0b0101, (b >> 1) & 0b0101);
    ((xa & zb) ^ (za & xb)).count_ones() & 1 == 1
}

fn code_to_pauli(code: LocalCode, negative: bool) -> PauliOperator {
    let mut op = PauliOperator::identity(2);
    op.x.set(0, code & 1 != 0);
    op.z.set(0, code & 2 != 0);
    op.x.set(1, code & 4 != 0);
    op.z.set(1, code & 8 != 0);
    if negative {
        op.negated()
    } else {
        op
    }
}

fn pauli_to_code(p: &PauliOperator) -> LocalCode {
    (p.x.get(0) as u8) | (p.z.get(0) as u8) << 1 | (p.x.get(1) as u8) << 2 | (p.z.get(1) as u8) << 3
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordGate {
    codes: [LocalCode; 4],
    signs: [bool; 4],
    table: [(u8, u8); 16],
    action: GateAction,
}

impl CliffordGate {
    /// Builds a gate from the images of `X₀, Z₀, X₁, Z₁`.
    pub fn from_images(images: [PauliOperator; 4]) -> Result<Self> {
        for img in &images {
            if img.num_sites() != 2 {
                return Err(Error::LengthMismatch(img.num_sites(), 2));
            }
            if !img.is_hermitian() {
                return Err(Error::NonHermitian(img.phase()));
            }
        }
        let codes = images.each_ref().map(pauli_to_code);
        if !is_symplectic(codes) {
            return Err(Error::InvalidParams(
                "images do not preserve the commutation relations".into(),
            ));
        }
        Ok(Self::from_codes(codes, images.each_ref().map(|p| p.phase() == 2)))
    }

    fn from_codes(codes: [LocalCode; 4], signs: [bool; 4]) -> Self {
        let table = build_table(codes, signs);
        Self {
            codes,
            signs,
            table,
            action: GateAction::from_table(&table),
        }
    }

    pub fn identity() -> Self {
        Self::from_codes([0b0001, 0b0010, 0b0100, 0b1000], [false; 4])
    }

    /// CNOT with local site 0 as control.
    pub fn cnot() -> Self {
        // X₀ → X₀X₁, Z₀ → Z₀, X₁ → X₁, Z₁ → Z₀Z₁
        Self::from_codes([0b0101, 0b0010, 0b0100, 0b1010], [false; 4])
    }

    /// Hadamard on local site 0.
    pub fn hadamard0() -> Self {
        Self::from_codes([0b0010, 0b0001, 0b0100, 0b1000], [false; 4])
    }

    /// Phase gate `S` on local site 0: `X → Y`, `Z → Z`.
    pub fn phase0() -> Self {
        Self::from_codes([0b0011, 0b0010, 0b0100, 0b1000], [false; 4])
    }

    pub fn images(&self) -> [PauliOperator; 4] {
        [0, 1, 2, 3].map(|i| code_to_pauli(self.codes[i], self.signs[i]))
    }

    pub(crate) fn action(&self) -> GateAction {
        self.action
    }

    /// Sign-free image codes identifying the symplectic class.
    pub fn symplectic_class(&self) -> [LocalCode; 4] {
        self.codes
    }

    pub fn signs(&self) -> [bool; 4] {
        self.signs
    }

    /// Draws a gate uniformly from the two-qubit Clifford group modulo
    /// global phase.
    ///
    /// The image of `X₀` is uniform over the 15 non-identity Paulis, that of
    /// `Z₀` uniform over the 8 anticommuting with it, then `X₁` over the 3
    /// non-identity elements of the remaining commutant and `Z₁` over the 2
    /// anticommuting with `X₁` there. Four independent signs follow.
    pub fn sample_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let x0 = rng.random_range(1..16u8);
        let z0 = pick(rng, |c| anticommute(x0, c));
        let x1 = pick(rng, |c| {
            !anticommute(x0, c) && !anticommute(z0, c) && c != x0 && c != z0 && c != x0 ^ z0
        });
        let z1 = pick(rng, |c| {
            !anticommute(x0, c) && !anticommute(z0, c) && anticommute(x1, c)
        });
        let signs = [rng.random(), rng.random(), rng.random(), rng.random()];
        Self::from_codes([x0, z0, x1, z1], signs)
    }

    /// Image of a two-site Pauli under conjugation by this gate.
    pub fn conjugate(&self, p: &PauliOperator) -> Result<PauliOperator> {
        if p.num_sites() != 2 {
            return Err(Error::LengthMismatch(p.num_sites(), 2));
        }
        let (bits, dphase) = self.table[pauli_to_code(p) as usize];
        Ok(code_to_pauli(bits, false).with_phase(p.phase() + dphase))
    }

    /// The gate `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &CliffordGate) -> CliffordGate {
        let mut codes = [0; 4];
        let mut signs = [false; 4];
        for k in 0..4 {
            let (bits, dphase) = self.table[first.codes[k] as usize];
            codes[k] = bits;
            signs[k] = (2 * first.signs[k] as u8 + dphase) & 3 == 2;
        }
        Self::from_codes(codes, signs)
    }

    /// Conjugates every generator of `state` on sites `(i, j)`.
    pub fn apply(&self, state: &mut StabilizerState, i: usize, j: usize) -> Result<()> {
        check_pair(state.num_sites(), i, j)?;
        state.apply_gate_actions(&[(self.action, i, j)]);
        Ok(())
    }
}

pub(crate) fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    for s in [i, j] {
        if s >= n {
            return Err(Error::SiteOutOfRange { site: s, len: n });
        }
    }
    if i == j {
        return Err(Error::RepeatedSite(i));
    }
    Ok(())
}

/// Applies gates on disjoint pairs in one pass over the generators.
pub fn apply_layer(state: &mut StabilizerState, gates: &[(CliffordGate, usize, usize)]) -> Result<()> {
    let mut seen = vec![false; state.num_sites()];
    for &(_, i, j) in gates {
        check_pair(state.num_sites(), i, j)?;
        for s in [i, j] {
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::RepeatedSite(s));
            }
        }
    }
    let actions: Vec<_> = gates.iter().map(|(g, i, j)| (g.action(), *i, *j)).collect();
    state.apply_gate_actions(&actions);
    Ok(())
}

fn pick<R: Rng + ?Sized>(rng: &mut R, ok: impl Fn(LocalCode) -> bool) -> LocalCode {
    let mut cands = [0u8; 15];
    let mut n = 0;
    for c in 1..16u8 {
        if ok(c) {
            cands[n] = c;
            n += 1;
        }
    }
    cands[rng.random_range(0..n)]
}

fn is_symplectic(c: [LocalCode; 4]) -> bool {
    // Pairs (0,1) and (2,3) anticommute, every cross pair commutes.
    (0..4).all(|a| {
        (a + 1..4).all(|b| {
            let should = (a, b) == (0, 1) || (a, b) == (2, 3);
            anticommute(c[a], c[b]) == should
        })
    })
}

/// Number of `Y` factors in a local code.
#[inline]
fn y_count(c: LocalCode) -> u8 {
    ((c & (c >> 1)) & 0b0101).count_ones() as u8
}

fn build_table(codes: [LocalCode; 4], signs: [bool; 4]) -> [(u8, u8); 16] {
    // Work in the form i^e X^a Z^b, where σ(x,z) = i^{xz} X^x Z^z per site.
    // Then (i^e X^a Z^b)(i^f X^c Z^d) = i^{e+f+2 b·c} X^{a+c} Z^{b+d}.
    let xz = |c: LocalCode| (c & 0b0101, (c >> 1) & 0b0101);
    let mut table = [(0u8, 0u8); 16];
    for (idx, entry) in table.iter_mut().enumerate() {
        let idx = idx as u8;
        // local operator i^{x₀z₀ + x₁z₁} X₀^x₀ Z₀^z₀ X₁^x₁ Z₁^z₁
        let mut e = y_count(idx);
        let (mut a, mut b) = (0u8, 0u8);
        for k in 0..4 {
            if idx >> k & 1 == 1 {
                let (ca, cb) = xz(codes[k]);
                e += 2 * signs[k] as u8 + y_count(codes[k]);
                e += 2 * (b & ca).count_ones() as u8;
                a ^= ca;
                b ^= cb;
            }
        }
        let out = a | (b << 1);
        let phase = (e + 4 - y_count(out) % 4) & 3;
        debug_assert!(
            phase.is_multiple_of(2),
            "Clifford image of a Hermitian Pauli is Hermitian"
        );
        *entry = (out, phase);
    }
    table
}

/// All 720 sign-free image tables of `Sp(4, 2)`, found by brute force over
/// image tuples that preserve the commutation relations.
pub fn enumerate_symplectic_classes() -> Vec<[LocalCode; 4]> {
    let mut out = Vec::with_capacity(720);
    for x0 in 1..16 {
        for z0 in 1..16 {
            for x1 in 1..16 {
                for z1 in 1..16 {
                    let c = [x0, z0, x1, z1];
                    if is_symplectic(c) {
                        out.push(c);
                    }
                }
            }
        }
    }
    out
}

/// Index of each symplectic class in [`enumerate_symplectic_classes`].
pub fn symplectic_class_index() -> &'static HashMap<[LocalCode; 4], usize> {
    static INDEX: OnceLock<HashMap<[LocalCode; 4], usize>> = OnceLock::new();
    INDEX.get_or_init(|| {
        enumerate_symplectic_classes()
            .into_iter()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    // Table built by multiplying full Pauli operators.
    fn table_via_operators(g: &CliffordGate) -> [(u8, u8); 16] {
        let images = g.images();
        let mut table = [(0u8, 0u8); 16];
        for (idx, entry) in table.iter_mut().enumerate() {
            let bits = [idx & 1, (idx >> 1) & 1, (idx >> 2) & 1, (idx >> 3) & 1];
            let mut acc = PauliOperator::identity(2);
            for (b, img) in bits.iter().zip(&images) {
                if *b == 1 {
                    acc = acc.multiply(img).unwrap();
                }
            }
            let extra = (bits[0] & bits[1]) + (bits[2] & bits[3]);
            *entry = (pauli_to_code(&acc), ((acc.phase() as usize + extra) & 3) as u8);
        }
        table
    }

    #[test]
    fn table_matches_operator_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..2000 {
            let g = CliffordGate::sample_uniform(&mut rng);
            assert_eq!(g.table, table_via_operators(&g));
        }
    }

    #[test]
    fn sliced_application_matches_row_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let n = rng.random_range(2..=140);
            let mut s = StabilizerState::new_product_zero(n).unwrap();
            let mut warm = Vec::new();
            for i in (0..n - 1).step_by(2) {
                warm.push((CliffordGate::sample_uniform(&mut rng), i, i + 1));
            }
            apply_layer(&mut s, &warm).unwrap();
            for _ in 0..rng.random_range(0..n) {
                let site = rng.random_range(0..n);
                s.dephase(site);
            }
            let mut t = s.clone();
            let mut layer = Vec::new();
            for i in (rng.random_range(0..2)..n - 1).step_by(2) {
                layer.push((CliffordGate::sample_uniform(&mut rng), i, i + 1));
            }
            apply_layer(&mut s, &layer).unwrap();
            let tables: Vec<_> = layer.iter().map(|(g, i, j)| (&g.table, *i, *j)).collect();
            t.apply_local_tables(&tables);
            assert_eq!(s, t);
        }
    }

    #[test]
    fn class_enumeration() {
        let classes = enumerate_symplectic_classes();
        assert_eq!(classes.len(), 720);
        let set: HashSet<_> = classes.iter().copied().collect();
        assert_eq!(set.len(), 720);
        assert!(set.contains(&CliffordGate::identity().symplectic_class()));
        // closure under composition, checked on a deterministic subsample
        let gates: Vec<_> = classes
            .iter()
            .map(|&c| CliffordGate::from_codes(c, [false; 4]))
            .collect();
        for a in gates.iter().step_by(7) {
            for b in gates.iter().step_by(11) {
                assert!(set.contains(&a.compose(b).symplectic_class()));
            }
        }
    }

    #[test]
    fn identity_and_cnot_action() {
        let mut s = StabilizerState::new_product_zero(2).unwrap();
        let before = s.clone();
        CliffordGate::identity().apply(&mut s, 0, 1).unwrap();
        assert_eq!(s, before);

        // +Z on the target becomes +Z₀Z₁
        let mut s = StabilizerState::from_generators(2, &[p("IZ")]).unwrap();
        CliffordGate::cnot().apply(&mut s, 0, 1).unwrap();
        assert_eq!(s.generators(), vec![p("ZZ")]);
        let g = CliffordGate::cnot();
        assert_eq!(g.conjugate(&p("XI")).unwrap(), p("XX"));
        assert_eq!(g.conjugate(&p("-YI")).unwrap(), p("-YX"));
    }

    #[test]
    fn apply_errors() {
        let mut s = StabilizerState::new_product_zero(3).unwrap();
        let g = CliffordGate::cnot();
        assert_eq!(g.apply(&mut s, 0, 3), Err(Error::SiteOutOfRange { site: 3, len: 3 }));
        assert_eq!(g.apply(&mut s, 1, 1), Err(Error::RepeatedSite(1)));
        assert!(apply_layer(&mut s, &[(g.clone(), 0, 1), (g, 1, 2)]).is_err());
    }

    #[test]
    fn from_images_validates() {
        assert!(CliffordGate::from_images([p("XI"), p("ZI"), p("IX"), p("IZ")]).is_ok());
        assert!(CliffordGate::from_images([p("XI"), p("XI"), p("IX"), p("IZ")]).is_err());
        assert!(CliffordGate::from_images([p("iXI"), p("ZI"), p("IX"), p("IZ")]).is_err());
    }

    #[test]
    fn sampled_gates_are_valid_and_deterministic() {
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let g = CliffordGate::sample_uniform(&mut a);
            assert!(is_symplectic(g.symplectic_class()));
            assert!(g.images().iter().all(|i| i.is_hermitian()));
            assert_eq!(g, CliffordGate::sample_uniform(&mut b));
        }
    }

    #[test]
    fn uniform_over_symplectic_classes() {
        let index = symplectic_class_index();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000usize;
        let mut counts = vec![0usize; 720];
        for _ in 0..n {
            let g = CliffordGate::sample_uniform(&mut rng);
            counts[index[&g.symplectic_class()]] += 1;
        }
        let expected = n as f64 / 720.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 719 degrees of freedom: mean 719, sd sqrt(2·719)
        let bound = 719.0 + 3.0 * (2.0f64 * 719.0).sqrt();
        assert!(chi2 < bound, "chi2 = {chi2}");
        assert!(counts.iter().all(|&c| c > 0));
    }

    #[test]
    fn sign_bits_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut sign_counts = [0usize; 4];
        for _ in 0..100_000 {
            let g = CliffordGate::sample_uniform(&mut rng);
            for (c, s) in sign_counts.iter_mut().zip(g.signs()) {
                *c += s as usize;
            }
        }
        for c in sign_counts {
            // binomial(1e5, 1/2): sd ≈ 158
            assert!((c as f64 - 50_000.0).abs() < 3.0 * 158.2, "sign counts {sign_counts:?}");
        }
    }

    #[test]
    fn composition_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let g1 = CliffordGate::sample_uniform(&mut rng);
            let g2 = CliffordGate::sample_uniform(&mut rng);
            let mut s = StabilizerState::from_generators(3, &[p("XZI"), p("ZXZ"), p("-IZX")]).unwrap();
            let mut t = s.clone();
            g1.apply(&mut s, 0, 2).unwrap();
            g2.apply(&mut s, 0, 2).unwrap();
            g2.compose(&g1).apply(&mut t, 0, 2).unwrap();
            assert_eq!(s, t);
            s.check_invariants().unwrap();
        }
    }
}

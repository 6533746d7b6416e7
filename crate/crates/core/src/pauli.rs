//! Phase-tracked Pauli strings in the binary-symplectic representation.
//!
//! A [`PauliOperator`] is `i^phase` times a tensor product of single-site
//! operators. Site bits `(x, z)` select `I`, `X`, `Z` or `Y` for
//! `(0,0)`, `(1,0)`, `(0,1)`, `(1,1)`; `Y` is stored as itself rather than as
//! `XZ`, so Hermitian strings are exactly those with `phase ∈ {0, 2}`.

use std::fmt;
use std::str::FromStr;

use crate::bits::BitVec;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Exponent of `i` (mod 4) picked up by the word-parallel product of two
/// Pauli strings. `X·Y = iZ`, `Y·Z = iX`, `Z·X = iY` contribute `+1`; the
/// reversed orders contribute `-1`.
#[inline]
pub(crate) fn product_phase(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> u32 {
    let mut plus = 0u32;
    let mut minus = 0u32;
    for i in 0..x1.len() {
        let (a, b, c, d) = (x1[i], z1[i], x2[i], z2[i]);
        let xa = a & !b;
        let ya = a & b;
        let za = !a & b;
        let xb = c & !d;
        let yb = c & d;
        let zb = !c & d;
        plus += ((xa & yb) | (ya & zb) | (za & xb)).count_ones();
        minus += ((xa & zb) | (ya & xb) | (za & yb)).count_ones();
    }
    (plus + 3 * minus) & 3
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    pub(crate) x: BitVec,
    pub(crate) z: BitVec,
    pub(crate) phase: u8,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
            phase: 0,
        }
    }

    pub fn single(n: usize, site: usize, p: Pauli) -> Self {
        let mut op = Self::identity(n);
        op.set(site, p);
        op
    }

    pub fn x(n: usize, site: usize) -> Self {
        Self::single(n, site, Pauli::X)
    }

    pub fn z(n: usize, site: usize) -> Self {
        Self::single(n, site, Pauli::Z)
    }

    pub fn from_parts(x: BitVec, z: BitVec, phase: u8) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::LengthMismatch(x.len(), z.len()));
        }
        Ok(Self { x, z, phase: phase & 3 })
    }

    #[inline]
    pub fn num_sites(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    #[inline]
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    pub fn negated(mut self) -> Self {
        self.phase = (self.phase + 2) & 3;
        self
    }

    #[inline]
    pub fn get(&self, site: usize) -> Pauli {
        Pauli::from_bits(self.x.get(site), self.z.get(site))
    }

    pub fn set(&mut self, site: usize, p: Pauli) {
        let (x, z) = p.bits();
        self.x.set(site, x);
        self.z.set(site, z);
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    /// True when every site is `I`, regardless of phase.
    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn weight(&self) -> usize {
        self.x
            .words()
            .iter()
            .zip(self.z.words())
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.num_sites() != other.num_sites() {
            return Err(Error::LengthMismatch(self.num_sites(), other.num_sites()));
        }
        Ok(())
    }

    /// Symplectic product is zero.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.commutes_unchecked(other))
    }

    #[inline]
    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        self.x.dot(&other.z) == other.x.dot(&self.z)
    }

    /// The ordered product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let mut out = self.clone();
        out.mul_assign_right(other);
        Ok(out)
    }

    /// `self ← self · other`.
    pub(crate) fn mul_assign_right(&mut self, other: &Self) {
        let g = product_phase(self.x.words(), self.z.words(), other.x.words(), other.z.words());
        self.phase = ((self.phase as u32 + other.phase as u32 + g) & 3) as u8;
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    /// Restriction to a subset of sites, phase dropped.
    pub fn restrict(&self, sites: &[usize]) -> PauliOperator {
        let mut out = PauliOperator::identity(sites.len());
        for (j, &s) in sites.iter().enumerate() {
            out.set(j, self.get(s));
        }
        out
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })?;
        for s in 0..self.num_sites() {
            write!(f, "{}", self.get(s).symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    /// Parses strings like `"XZI"`, `"-YY"`, `"+iZ"`.
    fn from_str(s: &str) -> Result<Self> {
        let (phase, body) = if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else {
            (0, s)
        };
        let mut op = PauliOperator::identity(body.chars().count());
        for (i, c) in body.chars().enumerate() {
            let p = match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(Error::InvalidParams(format!("bad Pauli symbol {c:?}"))),
            };
            op.set(i, p);
        }
        op.phase = phase;
        Ok(op)
    }
}

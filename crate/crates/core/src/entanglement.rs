//! Entropies and mutual information from GF(2) ranks.
//!
//! For a stabilizer state with `k` generators, `S_A = |A| − k + rank(G_B)`
//! where `G_B` is the generator matrix restricted to the complement of `A`.
//! Stabilizer reduced states have flat spectra, so every Rényi entropy equals
//! this von Neumann value. All values are integers in bits.

use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::stabilizer::StabilizerState;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    mask: BitVec,
}

impl Region {
    pub fn empty(n: usize) -> Self {
        Self { mask: BitVec::zeros(n) }
    }

    pub fn full(n: usize) -> Self {
        Self::range(n, 0, n).expect("full range is valid")
    }

    /// Sites `start..end`.
    pub fn range(n: usize, start: usize, end: usize) -> Result<Self> {
        if end > n || start > end {
            return Err(Error::SiteOutOfRange { site: end, len: n });
        }
        let mut mask = BitVec::zeros(n);
        for s in start..end {
            mask.set(s, true);
        }
        Ok(Self { mask })
    }

    pub fn from_sites(n: usize, sites: &[usize]) -> Result<Self> {
        let mut mask = BitVec::zeros(n);
        for &s in sites {
            if s >= n {
                return Err(Error::SiteOutOfRange { site: s, len: n });
            }
            mask.set(s, true);
        }
        Ok(Self { mask })
    }

    /// The two halves `[0, L/2)` and `[L/2, L)`; `L` must be even.
    pub fn halves(n: usize) -> Result<(Self, Self)> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "half-chain cut needs an even length, got {n}"
            )));
        }
        Ok((Self::range(n, 0, n / 2)?, Self::range(n, n / 2, n)?))
    }

    pub fn num_sites(&self) -> usize {
        self.mask.len()
    }

    pub fn size(&self) -> usize {
        self.mask.count_ones()
    }

    pub fn contains(&self, site: usize) -> bool {
        self.mask.get(site)
    }

    pub fn sites(&self) -> Vec<usize> {
        self.mask.iter_ones().collect()
    }

    pub fn mask(&self) -> &BitVec {
        &self.mask
    }

    pub fn complement(&self) -> Self {
        let n = self.mask.len();
        let mut mask = BitVec::zeros(n);
        for s in 0..n {
            mask.set(s, !self.mask.get(s));
        }
        Self { mask }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut mask = self.mask.clone();
        mask.xor_assign(&other.mask);
        mask.xor_assign(&self.mask.and(&other.mask));
        Self { mask }
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.mask.and(&other.mask).is_zero()
    }
}

/// Half-chain observables of one state, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub s_a: u32,
    pub s_b: u32,
    pub s_ab: u32,
    pub i_ab: u32,
    pub rank_k: u32,
}

fn check_len(state: &StabilizerState, region: &Region) -> Result<()> {
    if region.num_sites() != state.num_sites() {
        return Err(Error::LengthMismatch(region.num_sites(), state.num_sites()));
    }
    Ok(())
}

pub fn entropy_of_region(state: &StabilizerState, region: &Region) -> Result<u32> {
    check_len(state, region)?;
    let rank_b = state.restricted_rank(region.complement().mask());
    Ok((region.size() + rank_b - state.rank()) as u32)
}

pub fn mutual_information(state: &StabilizerState, a: &Region, b: &Region) -> Result<u32> {
    if !a.is_disjoint(b) {
        return Err(Error::OverlappingRegions);
    }
    let s_a = entropy_of_region(state, a)?;
    let s_b = entropy_of_region(state, b)?;
    let s_ab = entropy_of_region(state, &a.union(b))?;
    Ok(s_a + s_b - s_ab)
}

/// Observables for the cut of the chain into two equal halves.
pub fn half_chain_report(state: &StabilizerState) -> Result<EntropyReport> {
    let (a, b) = Region::halves(state.num_sites())?;
    let s_a = entropy_of_region(state, &a)?;
    let s_b = entropy_of_region(state, &b)?;
    let s_ab = (state.num_sites() - state.rank()) as u32;
    Ok(EntropyReport {
        s_a,
        s_b,
        s_ab,
        i_ab: s_a + s_b - s_ab,
        rank_k: state.rank() as u32,
    })
}

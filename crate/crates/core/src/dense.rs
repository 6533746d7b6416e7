//! Exact density-matrix reference simulator for small chains.
//!
//! Basis index bit `s` holds the Z eigenvalue of site `s` (0 for `+1`).

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use rand::Rng;

use crate::clifford::{self, CliffordGate};
use crate::entanglement::{entropy_of_region, Region};
use crate::error::{Error, Result};
use crate::pauli::PauliOperator;
use crate::stabilizer::StabilizerState;

pub const MAX_DENSE_SITES: usize = 6;
pub const PSD_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn i_pow(e: u32) -> Complex64 {
    match e & 3 {
        0 => ONE,
        1 => Complex64::new(0.0, 1.0),
        2 => -ONE,
        _ => Complex64::new(0.0, -1.0),
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptySystem);
    }
    if n > MAX_DENSE_SITES {
        return Err(Error::DenseTooLarge {
            max: MAX_DENSE_SITES,
            got: n,
        });
    }
    Ok(())
}

/// Dense matrix of a Pauli string, phase included.
pub fn pauli_matrix(p: &PauliOperator) -> Result<DMatrix<Complex64>> {
    let n = p.num_sites();
    check_size(n)?;
    let dim = 1usize << n;
    let (mut xm, mut zm) = (0usize, 0usize);
    for s in 0..n {
        xm |= (p.x_bits().get(s) as usize) << s;
        zm |= (p.z_bits().get(s) as usize) << s;
    }
    let n_y = (xm & zm).count_ones();
    let base = i_pow(p.phase() as u32 + n_y);
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    for b in 0..dim {
        let sign = if (b & zm).count_ones() % 2 == 1 { -ONE } else { ONE };
        m[(b ^ xm, b)] = base * sign;
    }
    Ok(m)
}

/// The 4×4 unitary realizing a Clifford image table, fixed up to global
/// phase. Local site 0 is the low bit.
pub fn clifford_unitary(gate: &CliffordGate) -> Matrix4<Complex64> {
    let [x0, z0, x1, z1] = gate.images().each_ref().map(|p| pauli_matrix(p).expect("two sites"));
    let id = DMatrix::<Complex64>::identity(4, 4);
    let proj = (&id + &z0) * (&id + &z1) * Complex64::new(0.25, 0.0);
    // rank-one projector: take its largest column as the image of |00⟩
    let col = (0..4)
        .max_by(|&a, &b| proj.column(a).norm().total_cmp(&proj.column(b).norm()))
        .unwrap();
    let psi0 = proj.column(col).into_owned();
    let psi0 = &psi0 / Complex64::new(psi0.norm(), 0.0);
    let mut u = Matrix4::zeros();
    for b in 0..4 {
        let mut v = psi0.clone();
        if b & 1 == 1 {
            v = &x0 * v;
        }
        if b & 2 == 2 {
            v = &x1 * v;
        }
        for r in 0..4 {
            u[(r, b)] = v[r];
        }
    }
    u
}

#[derive(Clone, Debug)]
pub struct DenseState {
    n: usize,
    rho: DMatrix<Complex64>,
}

impl DenseState {
    pub fn from_matrix(n: usize, rho: DMatrix<Complex64>) -> Result<Self> {
        check_size(n)?;
        let dim = 1usize << n;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: rho.nrows(),
            });
        }
        Ok(Self { n, rho })
    }

    pub fn product_zero(n: usize) -> Result<Self> {
        check_size(n)?;
        let dim = 1usize << n;
        let mut rho = DMatrix::from_element(dim, dim, ZERO);
        rho[(0, 0)] = ONE;
        Ok(Self { n, rho })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_size(n)?;
        let dim = 1usize << n;
        let rho = DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
        Ok(Self { n, rho })
    }

    /// `ρ = 2^{-L} Π_j (1 + g_j)`.
    pub fn from_stabilizer(state: &StabilizerState) -> Result<Self> {
        let n = state.num_sites();
        check_size(n)?;
        let dim = 1usize << n;
        let id = DMatrix::<Complex64>::identity(dim, dim);
        let mut rho = id.clone() * Complex64::new(1.0 / dim as f64, 0.0);
        for g in state.generators() {
            rho = (&id + pauli_matrix(&g)?) * rho;
        }
        Ok(Self { n, rho })
    }

    pub fn num_sites(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    /// `tr(ρ P)`.
    pub fn expectation(&self, p: &PauliOperator) -> Result<f64> {
        if p.num_sites() != self.n {
            return Err(Error::LengthMismatch(p.num_sites(), self.n));
        }
        Ok((pauli_matrix(p)? * &self.rho).trace().re)
    }

    fn check_site(&self, s: usize) -> Result<()> {
        if s >= self.n {
            return Err(Error::SiteOutOfRange { site: s, len: self.n });
        }
        Ok(())
    }

    /// `U ρ U†` with `U` acting on sites `(i, j)`; local site 0 is `i`.
    pub fn apply_gate_dense(&mut self, u: &DMatrix<Complex64>, i: usize, j: usize) -> Result<()> {
        if u.nrows() != 4 || u.ncols() != 4 {
            return Err(Error::Dimension {
                expected: 4,
                got: u.nrows(),
            });
        }
        clifford::check_pair(self.n, i, j)?;
        let dim = 1usize << self.n;
        let local = |a: usize| ((a >> i) & 1) | (((a >> j) & 1) << 1);
        let rest = !((1usize << i) | (1usize << j));
        let mut full = DMatrix::from_element(dim, dim, ZERO);
        for a in 0..dim {
            for b in 0..dim {
                if a & rest == b & rest {
                    full[(a, b)] = u[(local(a), local(b))];
                }
            }
        }
        self.rho = &full * &self.rho * full.adjoint();
        Ok(())
    }

    pub fn apply_clifford(&mut self, gate: &CliffordGate, i: usize, j: usize) -> Result<()> {
        let u = clifford_unitary(gate);
        self.apply_gate_dense(&DMatrix::from_iterator(4, 4, u.iter().copied()), i, j)
    }

    /// Probability of reading `outcome` on `site`.
    pub fn outcome_probability(&self, site: usize, outcome: u8) -> Result<f64> {
        self.check_site(site)?;
        let dim = 1usize << self.n;
        Ok((0..dim)
            .filter(|a| ((a >> site) & 1) as u8 == outcome)
            .map(|a| self.rho[(a, a)].re)
            .sum())
    }

    /// Projects onto `outcome` at `site` and renormalizes. Returns the
    /// branch probability.
    pub fn project(&mut self, site: usize, outcome: u8) -> Result<f64> {
        let prob = self.outcome_probability(site, outcome)?;
        if prob <= PSD_TOLERANCE {
            return Err(Error::ZeroProbability(prob));
        }
        let dim = 1usize << self.n;
        let keep = |a: usize| ((a >> site) & 1) as u8 == outcome;
        for a in 0..dim {
            for b in 0..dim {
                self.rho[(a, b)] = if keep(a) && keep(b) {
                    self.rho[(a, b)] / prob
                } else {
                    ZERO
                };
            }
        }
        Ok(prob)
    }

    /// Born-sampled projective measurement.
    pub fn channel_monitored_dense<R: Rng + ?Sized>(&mut self, site: usize, rng: &mut R) -> Result<u8> {
        let p0 = self.outcome_probability(site, 0)?;
        let outcome = if rng.random::<f64>() < p0 { 0 } else { 1 };
        self.project(site, outcome)?;
        Ok(outcome)
    }

    /// `ρ → P₀ρP₀ + P₁ρP₁` on `site`.
    pub fn channel_unmonitored_dense(&mut self, site: usize) -> Result<()> {
        self.check_site(site)?;
        let dim = 1usize << self.n;
        for a in 0..dim {
            for b in 0..dim {
                if ((a ^ b) >> site) & 1 == 1 {
                    self.rho[(a, b)] = ZERO;
                }
            }
        }
        Ok(())
    }

    pub fn partial_trace(&self, region: &Region) -> Result<DMatrix<Complex64>> {
        if region.num_sites() != self.n {
            return Err(Error::LengthMismatch(region.num_sites(), self.n));
        }
        let sites = region.sites();
        let dim = 1usize << self.n;
        let sub = |a: usize| {
            sites
                .iter()
                .enumerate()
                .fold(0usize, |acc, (k, &s)| acc | (((a >> s) & 1) << k))
        };
        let mut amask = 0usize;
        for &s in &sites {
            amask |= 1 << s;
        }
        let da = 1usize << sites.len();
        let mut out = DMatrix::from_element(da, da, ZERO);
        for a in 0..dim {
            for b in 0..dim {
                if a & !amask == b & !amask {
                    out[(sub(a), sub(b))] += self.rho[(a, b)];
                }
            }
        }
        Ok(out)
    }

    /// Von Neumann entropy of the reduced state on `region`, in bits.
    pub fn von_neumann_entropy(&self, region: &Region) -> Result<f64> {
        let red = self.partial_trace(region)?;
        let eig = red.symmetric_eigenvalues();
        let mut s = 0.0;
        for &l in eig.iter() {
            if l < -PSD_TOLERANCE {
                return Err(Error::NotPsd(l));
            }
            if l > 0.0 {
                s -= l * l.log2();
            }
        }
        Ok(s)
    }
}

/// Summary of a randomized cross-check between the tableau engine and the
/// dense simulator.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub circuits: usize,
    pub comparisons: usize,
    pub max_discrepancy: f64,
}

/// Runs `circuits` random circuits on both engines and compares the entropy
/// of every contiguous region after every time step.
///
/// Each circuit draws `L ∈ [2, max_sites]` and `(p, q) ∈ [0,1]²`, then runs
/// `4L` brickwork steps with dephasing and projective layers. Monitored
/// outcomes sampled by the tableau are replayed on the dense state, which
/// errors if the tableau picked a zero-probability branch.
pub fn cross_check<R: Rng + ?Sized>(circuits: usize, max_sites: usize, rng: &mut R) -> Result<OracleReport> {
    cross_check_with(circuits, max_sites, None, None, rng)
}

/// [`cross_check`] with `p` and/or `q` pinned instead of drawn per circuit.
pub fn cross_check_with<R: Rng + ?Sized>(
    circuits: usize,
    max_sites: usize,
    fixed_p: Option<f64>,
    fixed_q: Option<f64>,
    rng: &mut R,
) -> Result<OracleReport> {
    check_size(max_sites)?;
    for v in [fixed_p, fixed_q].into_iter().flatten() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParams(format!("rate {v} outside [0, 1]")));
        }
    }
    if max_sites < 2 {
        return Err(Error::InvalidParams("oracle check needs at least 2 sites".into()));
    }
    let mut report = OracleReport {
        circuits,
        comparisons: 0,
        max_discrepancy: 0.0,
    };
    for _ in 0..circuits {
        let n = rng.random_range(2..=max_sites);
        let p = fixed_p.unwrap_or(rng.random());
        let q = fixed_q.unwrap_or(rng.random());
        let mut tab = if rng.random::<bool>() {
            StabilizerState::new_product_zero(n)?
        } else {
            StabilizerState::new_maximally_mixed(n)?
        };
        let mut dense = DenseState::from_stabilizer(&tab)?;
        for _ in 0..4 * n {
            for start in [0, 1] {
                for i in (start..n.saturating_sub(1)).step_by(2) {
                    let g = CliffordGate::sample_uniform(rng);
                    g.apply(&mut tab, i, i + 1)?;
                    dense.apply_clifford(&g, i, i + 1)?;
                }
            }
            for s in 0..n {
                if rng.random::<f64>() < q {
                    crate::measurement::measure_unmonitored(&mut tab, s)?;
                    dense.channel_unmonitored_dense(s)?;
                }
            }
            for s in 0..n {
                if rng.random::<f64>() < p {
                    let out = crate::measurement::measure_monitored(&mut tab, s, rng)?;
                    dense.project(s, out.value.unwrap_or(0))?;
                }
            }
            for a in 0..n {
                for b in a + 1..=n {
                    let region = Region::range(n, a, b)?;
                    let st = entropy_of_region(&tab, &region)? as f64;
                    let sd = dense.von_neumann_entropy(&region)?;
                    report.max_discrepancy = report.max_discrepancy.max((st - sd).abs());
                    report.comparisons += 1;
                }
            }
        }
    }
    Ok(report)
}

//! Brickwork circuit with dephasing and projective measurement layers.
//!
//! One time step applies gates on pairs `(2r, 2r+1)`, then on `(2r−1, 2r)`,
//! then visits every site with an unmonitored measurement of probability `q`,
//! then every site with a monitored measurement of probability `p`.
//!
//! Randomness comes from three independent ChaCha8 streams derived from the
//! trajectory seed: one for gates, one for the per-site uniforms deciding
//! whether a measurement happens, and one for measurement outcomes. Every
//! site consumes exactly one uniform per layer. The gate stream is therefore
//! identical for all `(p, q)` at a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::CliffordGate;
use crate::entanglement::{half_chain_report, EntropyReport};
use crate::error::{Error, Result};
use crate::stabilizer::StabilizerState;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    #[default]
    ProductZero,
    MaximallyMixed,
}

impl InitialState {
    pub fn build(self, l: usize) -> Result<StabilizerState> {
        match self {
            InitialState::ProductZero => StabilizerState::new_product_zero(l),
            InitialState::MaximallyMixed => StabilizerState::new_maximally_mixed(l),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    #[serde(rename = "L")]
    pub l: usize,
    pub p: f64,
    pub q: f64,
    pub t_total: usize,
    pub t_burn_in: usize,
    pub sample_stride: usize,
    pub initial_state: InitialState,
    pub seed: u64,
}

impl ProtocolParams {
    /// Defaults: `t_total = 8L`, `t_burn_in = 4L`, `sample_stride = L/2`,
    /// product start.
    pub fn new(l: usize, p: f64, q: f64, seed: u64) -> Result<Self> {
        let params = Self {
            l,
            p,
            q,
            t_total: 8 * l,
            t_burn_in: 4 * l,
            sample_stride: (l / 2).max(1),
            initial_state: InitialState::ProductZero,
            seed,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 2 || !self.l.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!("L must be even and ≥ 2, got {}", self.l)));
        }
        for (name, v) in [("p", self.p), ("q", self.q)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParams(format!("{name} = {v} outside [0, 1]")));
            }
        }
        if self.t_burn_in >= self.t_total {
            return Err(Error::InvalidParams(format!(
                "t_burn_in = {} must be below t_total = {}",
                self.t_burn_in, self.t_total
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidParams("sample_stride must be positive".into()));
        }
        Ok(())
    }

    /// Step indices (counted after completion) at which samples are taken.
    pub fn sample_times(&self) -> impl Iterator<Item = usize> + '_ {
        (self.t_burn_in.max(1)..=self.t_total).filter(move |t| (t - self.t_burn_in).is_multiple_of(self.sample_stride))
    }
}

/// The three random streams of one trajectory.
#[derive(Clone, Debug)]
pub struct Streams {
    pub gates: ChaCha8Rng,
    pub sites: ChaCha8Rng,
    pub outcomes: ChaCha8Rng,
}

impl Streams {
    pub fn from_seed(seed: u64) -> Self {
        let make = |stream| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(stream);
            r
        };
        Self {
            gates: make(0),
            sites: make(1),
            outcomes: make(2),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trajectory `index` at system size `l`. Independent of `(p, q)`
/// so that sweeps share gate randomness across rates.
pub fn trajectory_seed(master: u64, l: usize, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ l as u64) ^ index)
}

/// Measurement counts of one step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub unmonitored: usize,
    pub monitored: usize,
    /// Monitored measurements whose outcome was random.
    pub random_outcomes: usize,
}

/// One full time step.
pub fn step(state: &mut StabilizerState, p: f64, q: f64, streams: &mut Streams) -> StepStats {
    let l = state.num_sites();
    for start in [0, 1] {
        let actions: Vec<_> = (start..l.saturating_sub(1))
            .step_by(2)
            .map(|i| (CliffordGate::sample_uniform(&mut streams.gates).action(), i, i + 1))
            .collect();
        state.apply_gate_actions(&actions);
    }
    let mut stats = StepStats::default();
    for s in 0..l {
        if streams.sites.random::<f64>() < q {
            state.dephase(s);
            stats.unmonitored += 1;
        }
    }
    for s in 0..l {
        if streams.sites.random::<f64>() < p {
            let mut drew = false;
            let outcomes = &mut streams.outcomes;
            state.project_z(s, || {
                drew = true;
                outcomes.random::<bool>()
            });
            stats.monitored += 1;
            stats.random_outcomes += drew as usize;
        }
    }
    stats
}

/// Time-averaged half-chain observables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanReport {
    pub s_a: f64,
    pub s_b: f64,
    pub s_ab: f64,
    pub i_ab: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub params: ProtocolParams,
    pub samples: Vec<(usize, EntropyReport)>,
    pub final_rank: usize,
}

impl TrajectoryRecord {
    pub fn mean(&self) -> MeanReport {
        let n = self.samples.len().max(1) as f64;
        let mut m = MeanReport::default();
        for (_, r) in &self.samples {
            m.s_a += r.s_a as f64;
            m.s_b += r.s_b as f64;
            m.s_ab += r.s_ab as f64;
            m.i_ab += r.i_ab as f64;
        }
        m.s_a /= n;
        m.s_b /= n;
        m.s_ab /= n;
        m.i_ab /= n;
        m
    }
}

pub fn run_trajectory(params: &ProtocolParams) -> Result<TrajectoryRecord> {
    params.validate()?;
    let mut state = params.initial_state.build(params.l)?;
    let mut streams = Streams::from_seed(params.seed);
    let mut samples = Vec::new();
    for t in 1..=params.t_total {
        step(&mut state, params.p, params.q, &mut streams);
        if t >= params.t_burn_in && (t - params.t_burn_in).is_multiple_of(params.sample_stride) {
            samples.push((t, half_chain_report(&state)?));
        }
    }
    Ok(TrajectoryRecord {
        params: params.clone(),
        samples,
        final_rank: state.rank(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{entropy_of_region, Region};
    use crate::pauli::PauliOperator;

    #[test]
    fn params_validation() {
        assert!(ProtocolParams::new(7, 0.1, 0.1, 0).is_err());
        assert!(ProtocolParams::new(8, 1.1, 0.1, 0).is_err());
        assert!(ProtocolParams::new(8, 0.1, -0.1, 0).is_err());
        let mut p = ProtocolParams::new(8, 0.1, 0.1, 0).unwrap();
        assert_eq!((p.t_total, p.t_burn_in, p.sample_stride), (64, 32, 4));
        assert_eq!(p.sample_times().count(), 9);
        p.t_burn_in = 64;
        assert!(p.validate().is_err());
    }

    #[test]
    fn gate_only_step_keeps_rank() {
        let mut streams = Streams::from_seed(1);
        let mut s = StabilizerState::new_product_zero(10).unwrap();
        for _ in 0..20 {
            let stats = step(&mut s, 0.0, 0.0, &mut streams);
            assert_eq!(stats, StepStats::default());
            assert_eq!(s.rank(), 10);
        }
        s.check_invariants().unwrap();
        assert!(entropy_of_region(&s, &Region::range(10, 0, 5).unwrap()).unwrap() > 0);
    }

    #[test]
    fn full_projection_step() {
        let mut streams = Streams::from_seed(2);
        let mut s = StabilizerState::new_maximally_mixed(8).unwrap();
        step(&mut s, 1.0, 0.0, &mut streams);
        assert_eq!(s.rank(), 8);
        assert_eq!(half_chain_report(&s).unwrap().s_a, 0);
        for i in 0..8 {
            assert_ne!(s.expectation(&PauliOperator::z(8, i)).unwrap(), 0);
        }
    }

    #[test]
    fn full_dephasing_step() {
        let mut streams = Streams::from_seed(3);
        let mut s = StabilizerState::new_product_zero(8).unwrap();
        for _ in 0..8 {
            step(&mut s, 0.0, 1.0, &mut streams);
        }
        // only Z-strings survive; the gates keep scrambling them into X
        // support, so the state ends maximally mixed with overwhelming odds
        s.check_invariants().unwrap();
        assert_eq!(s.rank(), 0);
    }

    #[test]
    fn deterministic_and_pure_at_q0() {
        let params = ProtocolParams::new(16, 0.2, 0.0, 99).unwrap();
        let a = run_trajectory(&params).unwrap();
        let b = run_trajectory(&params).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.final_rank, 16);
        let times: Vec<usize> = a.samples.iter().map(|(t, _)| *t).collect();
        assert_eq!(times, params.sample_times().collect::<Vec<_>>());
        for (_, r) in &a.samples {
            assert_eq!(r.s_ab, 0);
            assert_eq!(r.i_ab, 2 * r.s_a);
        }
    }

    #[test]
    fn gate_stream_independent_of_rates() {
        let mut a = Streams::from_seed(5);
        let mut b = Streams::from_seed(5);
        let mut sa = StabilizerState::new_product_zero(6).unwrap();
        let mut sb = sa.clone();
        for _ in 0..10 {
            step(&mut sa, 0.3, 0.1, &mut a);
            step(&mut sb, 0.0, 0.6, &mut b);
        }
        assert_eq!(a.gates, b.gates);
        assert_eq!(a.sites, b.sites);
    }

    #[test]
    fn seeds_differ() {
        assert_ne!(trajectory_seed(1, 16, 0), trajectory_seed(1, 16, 1));
        assert_ne!(trajectory_seed(1, 16, 0), trajectory_seed(1, 32, 0));
        assert_ne!(trajectory_seed(1, 16, 0), trajectory_seed(2, 16, 0));
    }
}

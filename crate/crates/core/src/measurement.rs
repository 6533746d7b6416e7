//! Single-site Z-basis measurement channels.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stabilizer::StabilizerState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementKind {
    Monitored,
    Unmonitored,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasurementOutcome {
    pub site: usize,
    pub kind: MeasurementKind,
    /// Recorded bit for monitored measurements, `None` when discarded.
    pub value: Option<u8>,
    pub rank_delta: i8,
}

fn check_site(state: &StabilizerState, site: usize) -> Result<()> {
    if site >= state.num_sites() {
        return Err(Error::SiteOutOfRange {
            site,
            len: state.num_sites(),
        });
    }
    Ok(())
}

/// Projective measurement of `Z_site` with a Born-sampled outcome.
///
/// If some generator anticommutes with `Z_site` the outcome is a fair coin
/// and one generator is replaced by `±Z_site`. If `±Z_site` is already in the
/// group the outcome is fixed and no randomness is drawn. Otherwise `±Z_site`
/// is appended with a fair coin and `k` grows by one.
pub fn measure_monitored<R: Rng + ?Sized>(
    state: &mut StabilizerState,
    site: usize,
    rng: &mut R,
) -> Result<MeasurementOutcome> {
    check_site(state, site)?;
    let (value, rank_delta) = state.project_z(site, || rng.random::<bool>());
    Ok(MeasurementOutcome {
        site,
        kind: MeasurementKind::Monitored,
        value: Some(value),
        rank_delta,
    })
}

/// Like [`measure_monitored`] but with a prescribed outcome for the random
/// cases. Deterministic outcomes ignore `outcome`.
pub fn measure_monitored_with(state: &mut StabilizerState, site: usize, outcome: u8) -> Result<MeasurementOutcome> {
    check_site(state, site)?;
    let (value, rank_delta) = state.project_z(site, || outcome == 1);
    Ok(MeasurementOutcome {
        site,
        kind: MeasurementKind::Monitored,
        value: Some(value),
        rank_delta,
    })
}

/// Z dephasing `ρ → P₀ρP₀ + P₁ρP₁` on `site`; consumes no randomness.
pub fn measure_unmonitored(state: &mut StabilizerState, site: usize) -> Result<MeasurementOutcome> {
    check_site(state, site)?;
    let rank_delta = state.dephase(site);
    Ok(MeasurementOutcome {
        site,
        kind: MeasurementKind::Unmonitored,
        value: None,
        rank_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliOperator;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    fn plus() -> StabilizerState {
        StabilizerState::from_generators(1, &[p("X")]).unwrap()
    }

    #[test]
    fn monitored_on_plus_is_fair() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut ones = 0;
        for _ in 0..4000 {
            let mut s = plus();
            let out = measure_monitored(&mut s, 0, &mut rng).unwrap();
            assert_eq!(out.rank_delta, 0);
            assert_eq!(s.rank(), 1);
            let v = out.value.unwrap();
            let expect = if v == 0 { p("Z") } else { p("-Z") };
            assert_eq!(s.generators(), vec![expect]);
            ones += v as usize;
        }
        // binomial(4000, 1/2), 4 sd ≈ 126
        assert!((ones as i64 - 2000).abs() < 127, "{ones}");
    }

    #[test]
    fn monitored_on_eigenstate_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (gen, expect) in [("Z", 0), ("-Z", 1)] {
            let mut s = StabilizerState::from_generators(1, &[p(gen)]).unwrap();
            let before = s.clone();
            let out = measure_monitored(&mut s, 0, &mut rng).unwrap();
            assert_eq!(out.value, Some(expect));
            assert_eq!(out.rank_delta, 0);
            assert_eq!(s, before);
        }
        // -Z₀Z₁ and +Z₁ imply Z₀ = -1
        let mut s = StabilizerState::from_generators(2, &[p("-ZZ"), p("IZ")]).unwrap();
        assert_eq!(measure_monitored(&mut s, 0, &mut rng).unwrap().value, Some(1));
    }

    #[test]
    fn monitored_purifies_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut s = StabilizerState::new_maximally_mixed(1).unwrap();
        let out = measure_monitored(&mut s, 0, &mut rng).unwrap();
        assert_eq!(out.rank_delta, 1);
        assert_eq!(s.rank(), 1);
        assert!(measure_monitored(&mut s, 1, &mut rng).is_err());
    }

    #[test]
    fn unmonitored_examples() {
        let mut s = plus();
        let out = measure_unmonitored(&mut s, 0).unwrap();
        assert_eq!((out.value, out.rank_delta, s.rank()), (None, -1, 0));

        let mut s = StabilizerState::new_product_zero(1).unwrap();
        let before = s.clone();
        assert_eq!(measure_unmonitored(&mut s, 0).unwrap().rank_delta, 0);
        assert_eq!(s, before);

        let mut bell = StabilizerState::from_generators(2, &[p("XX"), p("ZZ")]).unwrap();
        assert_eq!(measure_unmonitored(&mut bell, 0).unwrap().rank_delta, -1);
        assert_eq!(bell.generators(), vec![p("ZZ")]);
        assert!(measure_unmonitored(&mut bell, 2).is_err());
    }

    #[test]
    fn unmonitored_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let mut s = crate::testutil::random_state(5, &mut rng);
            let site = rng.random_range(0..5);
            measure_unmonitored(&mut s, site).unwrap();
            let once = s.clone();
            assert_eq!(measure_unmonitored(&mut s, site).unwrap().rank_delta, 0);
            assert_eq!(s, once);
        }
    }

    #[test]
    fn rank_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let mut s = crate::testutil::random_state(6, &mut rng);
            for _ in 0..10 {
                let site = rng.random_range(0..6);
                if rng.random::<bool>() {
                    let k = s.rank();
                    measure_unmonitored(&mut s, site).unwrap();
                    assert!(s.rank() <= k);
                } else {
                    let k = s.rank();
                    measure_monitored(&mut s, site, &mut rng).unwrap();
                    assert!(s.rank() >= k);
                }
                s.check_invariants().unwrap();
            }
        }
    }
}

use rand::Rng;

use crate::clifford::CliffordGate;
use crate::stabilizer::StabilizerState;

/// A random mixed stabilizer state reached by gates, projections and
/// dephasing from either canonical start.
pub(crate) fn random_state<R: Rng>(n: usize, rng: &mut R) -> StabilizerState {
    let mut s = if rng.random::<bool>() {
        StabilizerState::new_product_zero(n).unwrap()
    } else {
        StabilizerState::new_maximally_mixed(n).unwrap()
    };
    for _ in 0..3 * n {
        if n >= 2 {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            CliffordGate::sample_uniform(rng).apply(&mut s, i, j).unwrap();
        }
        let site = rng.random_range(0..n);
        match rng.random_range(0..4) {
            0 => {
                s.dephase(site);
            }
            1 => {
                s.project_z(site, || rng.random::<bool>());
            }
            _ => {}
        }
    }
    s
}

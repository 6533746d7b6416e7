use decohere::analysis::fit::REGION_I_DESK_Q;
use decohere::analysis::{fit_log_region, run_sweep, FitWindow, SweepConfig};
use decohere::perm::all_permutations;
use decohere::statmech::{partition_function, renyi_from_partition, BottomAttachment, Boundary, Engine};
use decohere::{
    entropy_of_region, measure_monitored, measure_unmonitored, run_trajectory, weingarten_table, BondWeights,
    CliffordGate, Exact, HoneycombPatch, ProtocolParams, Real, Region, Scalar, StabilizerState,
};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn pure_trajectories_have_twice_the_entropy_as_mutual_information() {
    for (l, p) in [(8, 0.1), (12, 0.3), (16, 0.6)] {
        let rec = run_trajectory(&ProtocolParams::new(l, p, 0.0, 17).unwrap()).unwrap();
        assert!(!rec.samples.is_empty());
        for (_, r) in &rec.samples {
            assert_eq!(r.i_ab, 2 * r.s_a);
            assert_eq!(r.s_ab, 0);
            assert_eq!(r.rank_k as usize, l);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dephasing_never_purifies_and_projection_never_mixes(seed in any::<u64>(), n in 2usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = StabilizerState::new_product_zero(n).unwrap();
        for _ in 0..3 * n {
            let i = rng.random_range(0..n - 1);
            CliffordGate::sample_uniform(&mut rng).apply(&mut state, i, i + 1).unwrap();
            let site = rng.random_range(0..n);
            let before = state.rank();
            if rng.random::<bool>() {
                measure_unmonitored(&mut state, site).unwrap();
                prop_assert!(state.rank() <= before);
            } else {
                measure_monitored(&mut state, site, &mut rng).unwrap();
                prop_assert!(state.rank() >= before);
            }
            state.check_invariants().unwrap();
        }
        let cut = rng.random_range(1..n);
        let a = Region::range(n, 0, cut).unwrap();
        let b = a.complement();
        let sa = entropy_of_region(&state, &a).unwrap();
        let sb = entropy_of_region(&state, &b).unwrap();
        let sab = entropy_of_region(&state, &Region::full(n)).unwrap();
        prop_assert!(sab <= sa + sb);
        prop_assert!(sa <= sb + sab && sb <= sa + sab);
    }
}

#[test]
fn sweep_feeds_the_logarithmic_fit() {
    let mut qs = vec![0.0];
    qs.extend(REGION_I_DESK_Q);
    let mut cfg = SweepConfig::new(SweepConfig::product_grid(&[8], &[0.3], &qs), 6, 3);
    cfg.schedule.total_per_site = 4;
    cfg.schedule.burn_in_per_site = 2;
    let table = run_sweep(&cfg, 2).unwrap();
    assert_eq!(table.rows.len(), qs.len());
    assert!(table.rows.windows(2).all(|w| w[0].q < w[1].q));
    assert_eq!(table, run_sweep(&cfg, 1).unwrap());
    let fit = fit_log_region(&table, 8, 0.3, &FitWindow::covering(&REGION_I_DESK_Q), false).unwrap();
    assert_eq!(fit.window.len(), REGION_I_DESK_Q.len());
    assert!(fit.r_squared.is_finite());
}

#[test]
fn weingarten_inverts_the_gram_matrix() {
    for (q, d) in [(2, 2), (3, 3), (3, 5), (4, 4)] {
        let wg = weingarten_table(q, d).unwrap();
        let perms = all_permutations(q);
        for g in &perms {
            let mut acc = Exact::zero();
            for h in &perms {
                let gram = Exact::from_usize(d).powi(g.compose(&h.inverse()).unwrap().cycle_count() as u32);
                acc += wg.get(h).clone() * gram;
            }
            let expected = if g.is_identity() { Exact::one() } else { Exact::zero() };
            assert_eq!(acc, expected, "Q={q} d={d} g={g}");
        }
    }
}

#[test]
fn partition_engines_and_scalars_agree() {
    for attachment in [BottomAttachment::Vertical, BottomAttachment::Zigzag] {
        let patch = HoneycombPatch::new(2, 3, 1, attachment).unwrap();
        let exact = BondWeights::<Exact>::new(3, 3, 0.25, 0.1).unwrap();
        let float = BondWeights::<Real>::new(3, 3, 0.25, 0.1).unwrap();
        let region = Boundary::RegionA { n: 2, k: 1 };
        let mut zs = Vec::new();
        for engine in [Engine::BruteForce, Engine::TransferMatrix] {
            let za = partition_function(&patch, &exact, &region, engine).unwrap();
            let z0 = partition_function(&patch, &exact, &Boundary::Homogeneous, engine).unwrap();
            let zf = partition_function(&patch, &float, &region, engine).unwrap();
            assert!(zf.close_to(&za.to_f64(), 1e-12), "{attachment:?} {engine:?}");
            zs.push((za, z0));
        }
        assert_eq!(zs[0], zs[1]);
        let (za, z0) = &zs[0];
        let s = renyi_from_partition(za, z0, 2, 1).unwrap();
        assert_eq!(s, Exact::from_ratio(-1, 1) * (za - z0));
    }
}

#[test]
fn empty_region_leaves_the_partition_function_unchanged() {
    let patch = HoneycombPatch::new(3, 3, 0, BottomAttachment::Vertical).unwrap();
    let w = BondWeights::<Real>::new(3, 4, 0.4, 0.2).unwrap();
    for engine in [Engine::BruteForce, Engine::TransferMatrix] {
        let za = partition_function(&patch, &w, &Boundary::RegionA { n: 2, k: 1 }, engine).unwrap();
        let z0 = partition_function(&patch, &w, &Boundary::Homogeneous, engine).unwrap();
        assert_eq!(za.to_bits(), z0.to_bits());
    }
}

mod common;

use std::f64::consts::{FRAC_PI_2, TAU};

use entutil::entanglement::{concurrence_two_kets, concurrence_of_ensemble};
use entutil::optimizer::{optimize_two_sided, optimize_unitary, OptimizerConfig};
use entutil::protocol::{lift, mix_state_weighted, FeedForward, MixWeighting, Mixture, Side};
use entutil::qmat::{eigh, eigvals4_general, kron, CMat, CMat2, CMat4, C64};
use entutil::{
    concurrence, concurrence_spectral, conditional_states, eof, mix_state, realize_unitary, validate_density,
    Concurrence, Coupling, DensityMatrix2Q, UnitaryParams,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::{complex, product_density, pure_concurrence_oracle, random_density, random_ket, random_su2};

fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn random_mat2(r: &mut StdRng) -> CMat2 {
    CMat([[complex(r), complex(r)], [complex(r), complex(r)]])
}

fn random_mat4(r: &mut StdRng) -> CMat4 {
    let mut m = CMat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = complex(r);
        }
    }
    m
}

fn theta() -> impl Strategy<Value = f64> {
    1e-3..=FRAC_PI_2
}

fn params() -> impl Strategy<Value = UnitaryParams> {
    (0.0..FRAC_PI_2, 0.0..TAU, 0.0..TAU).prop_map(|(a, b, g)| UnitaryParams::new(a, b, g))
}

fn side() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::First), Just(Side::Second)]
}

fn weighting() -> impl Strategy<Value = MixWeighting> {
    prop_oneof![Just(MixWeighting::Equal), Just(MixWeighting::Probability)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kron_mixed_product(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let (a, b, c, d) = (random_mat2(r), random_mat2(r), random_mat2(r), random_mat2(r));
        let lhs = kron(&a, &b) * kron(&c, &d);
        let rhs = kron(&(a * c), &(b * d));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn eigenvalues_sum_to_trace_and_survive_similarity(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let m = random_mat4(r);
        let ev = eigvals4_general(&m).unwrap();
        let sum: C64 = ev.iter().sum();
        prop_assert!((sum - m.trace()).norm() <= 1e-10 * (1.0 + m.max_abs()));
        let u = kron(&random_su2(r), &random_su2(r));
        let moved = eigvals4_general(&m.conjugate_by(&u)).unwrap();
        for z in ev {
            let nearest = moved.iter().map(|y| (z - y).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest <= 1e-8, "eigenvalue {} lost, nearest {:e}", z, nearest);
        }
    }

    #[test]
    fn hermitian_eigendecomposition_reconstructs(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let g = random_mat4(r);
        let h = g + g.adjoint();
        let (vals, vecs) = eigh(&h).unwrap();
        prop_assert!(vecs.is_unitary(1e-10));
        let back = CMat::from_real_diag(vals).conjugate_by(&vecs);
        prop_assert!(back.max_abs_diff(&h) <= 1e-10 * (1.0 + h.max_abs()));
        prop_assert!(vals.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn pure_state_concurrence_routes_agree(seed in any::<u64>()) {
        let psi = random_ket(&mut rng(seed));
        let rho = DensityMatrix2Q::from_ket(&psi).unwrap();
        let exact = pure_concurrence_oracle(&psi);
        prop_assert!((concurrence(&rho).unwrap().value() - exact).abs() <= 1e-10);
        prop_assert!((concurrence_spectral(&rho).unwrap().value() - exact).abs() <= 1e-6);
    }

    #[test]
    fn mixed_state_concurrence_routes_agree(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = random_density(&mut rng(seed), rank);
        let a = concurrence(&rho).unwrap().value();
        let b = concurrence_spectral(&rho).unwrap().value();
        prop_assert!((a - b).abs() <= 1e-6, "{} vs {}", a, b);
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(seed in any::<u64>(), rank in 1usize..=4) {
        let r = &mut rng(seed);
        let rho = random_density(r, rank);
        let u = kron(&random_su2(r), &random_su2(r));
        let moved = validate_density(&rho.matrix().conjugate_by(&u), 1e-10).unwrap();
        let d = concurrence(&rho).unwrap().value() - concurrence(&moved).unwrap().value();
        prop_assert!(d.abs() <= 1e-9);
    }

    #[test]
    fn product_states_are_unentangled(seed in any::<u64>()) {
        let rho = product_density(&mut rng(seed));
        prop_assert!(concurrence(&rho).unwrap().value() <= 1e-10);
    }

    #[test]
    fn ket_ensembles_match_their_density(seed in any::<u64>(), k in 1usize..=4) {
        let r = &mut rng(seed);
        let kets: Vec<_> = (0..k).map(|_| random_ket(r).scale_re(0.3 + 0.2 * k as f64)).collect();
        let mut m = CMat4::zeros();
        for v in &kets {
            m = m + v.outer();
        }
        let m = m.scale_re(1.0 / m.trace().re);
        let rho = validate_density(&m, 1e-10).unwrap();
        let direct = concurrence(&rho).unwrap().value();
        prop_assert!((concurrence_of_ensemble(&kets).unwrap().value() - direct).abs() <= 1e-10);
        if k == 2 {
            prop_assert!((concurrence_two_kets(&kets[0], &kets[1]) - direct).abs() <= 1e-10);
        }
    }

    #[test]
    fn mixture_is_a_valid_state(t in theta(), w in 0.0..=1.0f64, p in params(), s in side(), wt in weighting()) {
        let rho = mix_state_weighted(Coupling::new(t).unwrap(), w, p, FeedForward { side: s, weighting: wt }).unwrap();
        let m = rho.matrix();
        prop_assert!(m.max_abs_diff(&m.adjoint()) <= 1e-14);
        prop_assert!((m.trace() - C64::new(1.0, 0.0)).norm() <= 1e-12);
        prop_assert!(validate_density(m, 1e-12).is_ok());
    }

    #[test]
    fn global_phase_leaves_the_mixture_unchanged(t in theta(), w in 0.0..=1.0f64, p in params(), s in side(), phi in 0.0..TAU) {
        let c = Coupling::new(t).unwrap();
        let st = conditional_states(c);
        let succ = st.psi_succ.scale_re(1.0 / st.psi_succ.norm()).outer();
        let fail = st.psi_fail.scale_re(1.0 / st.psi_fail.norm()).outer();
        let l = lift(&realize_unitary(p).scale(C64::from_polar(1.0, phi)), s);
        let by_hand = (succ + fail.conjugate_by(&l).scale_re(w)).scale_re(1.0 / (1.0 + w));
        let rho = mix_state(c, w, p, s).unwrap();
        prop_assert!(rho.matrix().max_abs_diff(&by_hand) <= 1e-12);
    }

    #[test]
    fn canonical_angles_give_the_same_mixture(t in theta(), w in 0.0..=1.0f64, a in -20.0..20.0f64, b in -20.0..20.0f64, g in -20.0..20.0f64, s in side()) {
        let c = Coupling::new(t).unwrap();
        let p = UnitaryParams::new(a, b, g);
        let x = mix_state(c, w, p, s).unwrap();
        let y = mix_state(c, w, p.canonical(), s).unwrap();
        prop_assert!(x.matrix().max_abs_diff(y.matrix()) <= 1e-12);
    }

    #[test]
    fn either_side_gives_the_same_concurrence(t in theta(), w in 0.0..=1.0f64, p in params()) {
        let c = Coupling::new(t).unwrap();
        let first = Mixture::new(c, w, FeedForward::on(Side::First)).unwrap().concurrence(p);
        let second = Mixture::new(c, w, FeedForward::on(Side::Second)).unwrap().concurrence(p);
        prop_assert!((first - second).abs() <= 1e-12);
    }

    #[test]
    fn canonical_angles_are_idempotent(a in -20.0..20.0f64, b in -20.0..20.0f64, g in -20.0..20.0f64) {
        let p = UnitaryParams::new(a, b, g).canonical();
        prop_assert!(p.in_bounds());
        prop_assert_eq!(p.canonical(), p);
    }

    #[test]
    fn eof_is_monotone(x in 0.0..=1.0f64, y in 0.0..=1.0f64) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let e = |c| eof(Concurrence::new(c).unwrap()).value();
        prop_assert!(e(lo) <= e(hi) + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn one_sided_feed_forward_is_enough(t in theta(), w in 0.0..=1.0f64) {
        let mix = Mixture::new(Coupling::new(t).unwrap(), w, FeedForward::default()).unwrap();
        let cfg = OptimizerConfig::default();
        let one = optimize_unitary(&mix, &cfg).c_star.value();
        let two = optimize_two_sided(&mix, &cfg).c_star.value();
        prop_assert!(two <= one + 1e-9, "two-sided {} beats one-sided {}", two, one);
    }

    #[test]
    fn optimum_dominates_random_unitaries(t in theta(), w in 0.0..=1.0f64, ps in prop::collection::vec(params(), 20)) {
        let mix = Mixture::new(Coupling::new(t).unwrap(), w, FeedForward::default()).unwrap();
        let best = optimize_unitary(&mix, &OptimizerConfig::default());
        prop_assert!(best.params.in_bounds());
        for p in ps {
            prop_assert!(mix.concurrence(p) <= best.c_star.value() + 1e-12);
        }
    }
}

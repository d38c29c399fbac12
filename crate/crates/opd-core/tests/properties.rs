//! Property tests for the structural invariants: inner-product positivity,
//! tensor/partial-trace factorization, Schmidt reconstruction and rank
//! invariance, frame reconstruction, decomposition weights, semigroup laws.
//!
//! Structured objects (densities, Hamiltonians, unitaries) are drawn from
//! seeded generators, with proptest supplying the seeds and dimensions.

use proptest::prelude::*;

use opd_core::random::{
    random_bipartite_density, random_density, random_hermitian, random_operator, rng_from_seed,
};
use opd_core::{
    basis_induced_family, cost, decompose, hs_inner, pauli_frame, reconstruct, reduce,
    schmidt_decompose, semigroup_compose_check, tensor, HsOperator, PauliChannelFamily,
    C64,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inner_product_is_positive_definite(seed in any::<u64>(), d in 1usize..=6) {
        let mut rng = rng_from_seed(seed);
        let a = random_operator(d, &mut rng);
        let n = hs_inner(&a, &a).unwrap();
        prop_assert!(n.im.abs() < 1e-12);
        prop_assert!(n.re >= 0.0);
        prop_assert!(n.re > 1e-12 || a.hs_norm() < 1e-6);

        let b = random_operator(d, &mut rng);
        let ab = hs_inner(&a, &b).unwrap();
        let ba = hs_inner(&b, &a).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-10);
    }

    #[test]
    fn partial_trace_factorizes_products(seed in any::<u64>(), ds in 1usize..=6, de in 1usize..=6) {
        let mut rng = rng_from_seed(seed);
        let a = random_operator(ds, &mut rng);
        let b = random_operator(de, &mut rng);
        let joint = tensor(&a, &b);
        let back = joint.partial_trace_e();
        let expect = a.scale(b.trace());
        prop_assert!((&back - &expect).hs_norm() <= 1e-12 * (1.0 + joint.hs_norm()));

        // both partial traces preserve the total trace
        prop_assert!((joint.partial_trace_e().trace() - joint.trace()).norm() < 1e-11);
        prop_assert!((joint.partial_trace_s().trace() - joint.trace()).norm() < 1e-11);
    }

    #[test]
    fn schmidt_reconstruction_within_tolerance(
        seed in any::<u64>(),
        ds in 2usize..=3,
        de in 2usize..=3,
    ) {
        let mut rng = rng_from_seed(seed);
        let h = random_hermitian(ds * de, &mut rng);
        let o = opd_core::BipartiteOperator::new(ds, de, h.matrix().clone()).unwrap();
        let tol = 1e-10;
        let dec = schmidt_decompose(&o, tol).unwrap();
        let residual = (&dec.reconstruct(ds, de) - &o).hs_norm();
        prop_assert!(residual <= 10.0 * tol * o.hs_norm().max(1.0), "residual {residual:.3e}");
        // factors orthonormal
        for j in 0..dec.rank {
            for k in 0..dec.rank {
                let expect = if j == k { 1.0 } else { 0.0 };
                let g = hs_inner(&dec.system_ops[j], &dec.system_ops[k]).unwrap();
                prop_assert!((g - C64::new(expect, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn schmidt_rank_invariant_under_local_rotation(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rho = random_bipartite_density(2, 2, &mut rng);
        let rank = schmidt_decompose(&rho, 1e-8).unwrap().rank;
        let u = opd_core::random::random_unitary(2, &mut rng);
        let lifted = u.kronecker(&opd_core::hs::CMatrix::identity(2, 2));
        let rotated = rho.conjugate_by(&lifted);
        let rank_rot = schmidt_decompose(&rotated, 1e-8).unwrap().rank;
        prop_assert_eq!(rank, rank_rot);
    }

    #[test]
    fn frames_reconstruct_random_operators(seed in any::<u64>(), d in 2usize..=5) {
        let mut rng = rng_from_seed(seed);
        for frame in [pauli_frame(d).unwrap(), basis_induced_family(d).unwrap()] {
            let dual = frame.dual().unwrap();
            let a = random_operator(d, &mut rng);
            let mut acc = HsOperator::zeros(d);
            for (f, du) in frame.elements().iter().zip(dual) {
                acc = &acc + &du.scale(hs_inner(f, &a).unwrap());
            }
            prop_assert!((&acc - &a).hs_norm() <= 1e-10);
        }
    }

    #[test]
    fn decomposition_weights_and_round_trip(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rho = random_bipartite_density(2, 2, &mut rng);
        let frame = pauli_frame(2).unwrap();
        let opd = decompose(&rho, &frame, 1e-10).unwrap();

        // the two weight formulas agree
        let rho_s = rho.partial_trace_e();
        for (term, f) in opd.terms.iter().zip(frame.elements()) {
            let alt = hs_inner(f, &rho_s).unwrap().re;
            prop_assert!((term.weight - alt).abs() <= 1e-12);
        }
        let residual = (&reconstruct(&opd).unwrap() - &rho).hs_norm();
        prop_assert!(residual <= 1e-10);
    }

    #[test]
    fn reduction_agrees_with_schmidt_rank(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rho = random_bipartite_density(2, 2, &mut rng);
        let n = cost(&rho, 1e-8).unwrap();
        prop_assert!((1..=4).contains(&n));

        // reduction certificate keeps duality and the represented state
        let frame = basis_induced_family(2).unwrap();
        let reduced = reduce(&decompose(&rho, &frame, 1e-8).unwrap(), 1e-8).unwrap();
        let cert = reduced.reduction.as_ref().unwrap();
        for norm in &cert.eliminated_weight_norms {
            prop_assert!(*norm <= 1e-9);
        }
        let residual = (&reconstruct(&reduced).unwrap() - &rho).hs_norm();
        prop_assert!(residual <= 1e-7);
    }

    #[test]
    fn semigroup_law_for_random_rates(
        g1 in 0.0..2.0f64,
        g2 in 0.0..2.0f64,
        g3 in 0.0..2.0f64,
        t in 0.0..3.0f64,
        s in 0.0..3.0f64,
    ) {
        let family = PauliChannelFamily::uniform([g1, g2, g3]).unwrap();
        let residual = semigroup_compose_check(&family, 0, t, s).unwrap();
        prop_assert!(residual <= 1e-12, "residual {residual:.3e}");
    }

    #[test]
    fn separable_mixture_cost_bounded_by_terms(seed in any::<u64>(), k in 1usize..=3) {
        let mut rng = rng_from_seed(seed);
        let mut joint = opd_core::BipartiteOperator::zeros(2, 2);
        for _ in 0..k {
            let a = random_density(2, &mut rng);
            let b = random_density(2, &mut rng);
            joint = &joint + &tensor(&a, &b).scale_re(1.0 / k as f64);
        }
        let n = cost(&joint, 1e-8).unwrap();
        prop_assert!(n <= k, "cost {n} exceeds mixture length {k}");
    }
}

//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test -p opd-core --test acceptance -- --nocapture` to see
//! the per-criterion summary.

use opd_core::random::{
    random_bipartite_density, random_density, random_hermitian, random_operator, rng_from_seed,
};
use opd_core::{
    basis_induced_family, classify, cost, decompose, ellipsoid_ball_containment,
    evolved_violation, exact_reduced_evolution, hs_inner, microscopic_map, opd_from_v,
    pauli_frame, pauli_matrices, reconstruct, reduce, semigroup_compose_check, sphere_oracle_max,
    tensor, BipartiteOperator, HsOperator, MicroscopicModel, PauliChannel, PauliChannelFamily,
    TwoMapRates, VerdictKind,
};
use rand::Rng;

fn report(criterion: u32, name: &str) {
    println!("criterion {criterion} ({name}): PASS");
}

fn bell_projector() -> BipartiteOperator {
    let [id, sx, sy, sz] = pauli_matrices();
    let mut acc = tensor(&id, &id);
    acc = &acc + &tensor(&sx, &sx);
    acc = &acc - &tensor(&sy, &sy);
    acc = &acc + &tensor(&sz, &sz);
    acc.scale_re(0.25)
}

#[test]
fn criterion_01_frame_reconstruction() {
    let mut rng = rng_from_seed(101);
    let mut worst: f64 = 0.0;
    for d in 2..=6 {
        for frame in [pauli_frame(d).unwrap(), basis_induced_family(d).unwrap()] {
            let dual = frame.dual().unwrap();
            for trial in 0..100 {
                let a = if trial % 2 == 0 {
                    random_hermitian(d, &mut rng)
                } else {
                    random_operator(d, &mut rng)
                };
                let mut acc = HsOperator::zeros(d);
                for (f, du) in frame.elements().iter().zip(dual) {
                    acc = &acc + &du.scale(hs_inner(f, &a).unwrap());
                }
                worst = worst.max((&acc - &a).hs_norm());
            }
        }
    }
    assert!(worst <= 1e-10, "worst reconstruction residual {worst:.3e}");
    report(1, "frame reconstruction");
}

#[test]
fn criterion_02_frame_positivity_and_biorthogonality() {
    let mut min_eig = f64::INFINITY;
    let mut worst_bio: f64 = 0.0;
    for d in 2..=6 {
        for frame in [pauli_frame(d).unwrap(), basis_induced_family(d).unwrap()] {
            for f in frame.elements() {
                min_eig = min_eig.min(f.min_eigenvalue());
            }
        }
        let frame = pauli_frame(d).unwrap();
        let gram = frame.dual_primal_gram().unwrap();
        for a in 0..frame.len() {
            for b in 0..frame.len() {
                let expect = if a == b { 1.0 } else { 0.0 };
                worst_bio = worst_bio.max((gram[(a, b)] - expect).abs());
            }
        }
    }
    assert!(min_eig >= -1e-12, "min primal eigenvalue {min_eig:.3e}");
    assert!(worst_bio <= 1e-10, "biorthogonality residual {worst_bio:.3e}");
    report(2, "frame positivity and biorthogonality");
}

#[test]
fn criterion_03_divergence_growth_law() {
    for d in 2..=6 {
        let frame = basis_induced_family(d).unwrap();
        let expect = 1.0 + (d * (d - 1)) as f64 / 2.0;
        for k in 0..d {
            let a = HsOperator::basis_projector(d, k);
            let total: f64 = frame
                .elements()
                .iter()
                .map(|p| hs_inner(p, &a).unwrap().norm_sqr())
                .sum();
            assert!(
                (total - expect).abs() <= 1e-12,
                "d={d}, k={k}: sum {total}, expected {expect}"
            );
        }
    }
    report(3, "divergence growth law");
}

#[test]
fn criterion_04_opd_validity() {
    let mut rng = rng_from_seed(104);
    let frame = pauli_frame(2).unwrap();
    for i in 0..100 {
        let rho = random_bipartite_density(2, 2, &mut rng);
        let opd = decompose(&rho, &frame, 1e-10).unwrap();
        for term in &opd.terms {
            assert!(term.weight >= -1e-12, "state {i}: weight {}", term.weight);
            assert!(
                term.env_state.is_density(1e-10),
                "state {i}: env state of {} not a density",
                term.label
            );
        }
        let recon = (&reconstruct(&opd).unwrap() - &rho).hs_norm();
        assert!(recon <= 1e-10, "state {i}: reconstruction residual {recon:.3e}");
        let marginal = (&opd.terms[0].env_state - &rho.partial_trace_s()).hs_norm();
        assert!(marginal <= 1e-10, "state {i}: first env state off by {marginal:.3e}");
    }
    report(4, "decomposition validity");
}

#[test]
fn criterion_05_cost_theorem() {
    let mut rng = rng_from_seed(105);
    let basis = basis_induced_family(2).unwrap();
    for i in 0..100 {
        let rho = random_bipartite_density(2, 2, &mut rng);
        let n = cost(&rho, 1e-8).unwrap_or_else(|e| panic!("state {i}: {e}"));
        let n_basis = reduce(&decompose(&rho, &basis, 1e-8).unwrap(), 1e-8)
            .unwrap()
            .term_count();
        assert_eq!(n, n_basis, "state {i}: frame dependence");
    }

    let rho_s = random_density(2, &mut rng);
    let rho_e = random_density(2, &mut rng);
    assert_eq!(cost(&tensor(&rho_s, &rho_e), 1e-8).unwrap(), 1);
    assert_eq!(cost(&bell_projector(), 1e-8).unwrap(), 4);
    let eta_a = random_density(2, &mut rng);
    let eta_b = random_density(2, &mut rng);
    let cc = &tensor(&HsOperator::basis_projector(2, 0), &eta_a).scale_re(0.5)
        + &tensor(&HsOperator::basis_projector(2, 1), &eta_b).scale_re(0.5);
    assert_eq!(cost(&cc, 1e-8).unwrap(), 2);
    report(5, "cost equals Schmidt rank");
}

#[test]
fn criterion_06_microscopic_identity() {
    let mut rng = rng_from_seed(106);
    let frame = pauli_frame(2).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let h = random_hermitian(4, &mut rng);
        let joint_h = BipartiteOperator::new(2, 2, h.matrix().clone()).unwrap();
        let rho = random_bipartite_density(2, 2, &mut rng);
        let model = MicroscopicModel::new(joint_h, rho.clone(), 1e-9).unwrap();
        let opd = decompose(&rho, &frame, 1e-10).unwrap();
        for k in 0..10 {
            let t = 0.3 * k as f64;
            let mut acc = HsOperator::zeros(2);
            for term in &opd.terms {
                let moved = microscopic_map(&model, &term.env_state, t, &term.system_op).unwrap();
                acc = &acc + &moved.scale_re(term.weight);
            }
            let exact = exact_reduced_evolution(&model, t).unwrap();
            worst = worst.max((&acc - &exact).hs_norm());
        }
    }
    assert!(worst <= 1e-8, "worst propagation residual {worst:.3e}");
    report(6, "microscopic propagation identity");
}

#[test]
fn criterion_07_channel_laws() {
    let mut rng = rng_from_seed(107);
    let sigmas = pauli_matrices();
    for _ in 0..20 {
        let rates = [
            2.0 * rng.random::<f64>(),
            2.0 * rng.random::<f64>(),
            2.0 * rng.random::<f64>(),
        ];
        let ch = PauliChannel::new(rates).unwrap();
        let family = PauliChannelFamily::uniform(rates).unwrap();
        let t = 2.0 * rng.random::<f64>();
        let s = 2.0 * rng.random::<f64>();

        let comp = semigroup_compose_check(&family, 0, t, s).unwrap();
        assert!(comp <= 1e-12, "composition residual {comp:.3e}");

        let p = ch.probabilities(t);
        assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for pj in p {
            assert!(pj >= -1e-12, "negative probability {pj:.3e}");
        }

        let choi_min = ch.choi(t).unwrap().min_eigenvalue();
        assert!(choi_min >= -1e-10, "Choi minimum eigenvalue {choi_min:.3e}");

        let lam = ch.eigenvalues(t);
        for (j, sig) in sigmas.iter().enumerate() {
            let res = (&ch.apply(t, sig).unwrap() - &sig.scale_re(lam[j])).hs_norm();
            assert!(res <= 1e-12, "eigenoperator residual {res:.3e}");
        }
    }
    report(7, "channel laws");
}

#[test]
fn criterion_08_geometry_vs_spectrum() {
    let mut rng = rng_from_seed(108);
    for i in 0..200 {
        let rates = TwoMapRates::new(
            [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()],
            [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()],
        )
        .unwrap();
        let v = [
            2.0 * rng.random::<f64>(),
            2.0 * rng.random::<f64>(),
            2.0 * rng.random::<f64>(),
        ];
        let t = 3.0 * rng.random::<f64>();
        let g = evolved_violation(v, &rates, t).unwrap();
        let evolved = opd_core::evolve_opd(&opd_from_v(v).unwrap(), &rates.family(), t).unwrap();
        if g < 1.0 - 1e-9 {
            assert!(
                evolved.min_eigenvalue >= -1e-12,
                "probe {i}: g={g}, min_eig={}",
                evolved.min_eigenvalue
            );
        } else if g > 1.0 + 1e-9 {
            assert!(
                evolved.min_eigenvalue < 1e-12,
                "probe {i}: g={g}, min_eig={}",
                evolved.min_eigenvalue
            );
        }
    }
    report(8, "geometry matches spectrum");
}

#[test]
fn criterion_09_example_i_reproduction() {
    let gamma = 1.0;
    let rates = TwoMapRates::example_i(gamma).unwrap();

    for (gt, expect_contained) in [(0.1, false), (2.0, true)] {
        let t = gt / gamma;
        let result = ellipsoid_ball_containment(&rates, t).unwrap();
        assert_eq!(
            result.contained, expect_contained,
            "gamma_t={gt}: contained={}, max={}",
            result.contained, result.max_distance_sq
        );
        let oracle = sphere_oracle_max(&rates, t, 4_000_000).unwrap();
        let gap = (result.max_distance_sq - oracle).abs();
        assert!(
            gap <= 1e-6,
            "gamma_t={gt}: secular {} vs oracle {} (gap {gap:.3e})",
            result.max_distance_sq,
            oracle
        );
    }

    // centers and semi-axes decay monotonically
    let mut prev_ball = f64::INFINITY;
    let mut prev_center = f64::INFINITY;
    let mut prev_axis = f64::INFINITY;
    for i in 0..=100 {
        let t = 0.05 * i as f64;
        let lam = rates.lambda(t);
        let lam_t = rates.lambda_tilde(t);
        let ball = lam.iter().map(|x| x * x).sum::<f64>().sqrt();
        let center = lam_t.iter().map(|x| x * x).sum::<f64>().sqrt();
        let axis = lam_t.iter().copied().fold(0.0, f64::max);
        assert!(ball <= prev_ball + 1e-15);
        assert!(center <= prev_center + 1e-15);
        assert!(axis <= prev_axis + 1e-15);
        prev_ball = ball;
        prev_center = center;
        prev_axis = axis;
    }
    report(9, "first example reproduction");
}

#[test]
fn criterion_10_example_ii_reproduction() {
    let rates = TwoMapRates::example_ii(1.0).unwrap();
    let horizon = rates.default_horizon();

    let eternal = classify([1.0, 1.0, 1.5], &rates, horizon, 200).unwrap();
    assert_eq!(eternal.kind, VerdictKind::EternallyNegative);
    let exit = eternal.first_exit_time.expect("finite first exit");
    assert!(exit.is_finite() && exit > 0.0, "exit time {exit}");

    let marginal = classify([1.0, 1.0, 1.0], &rates, horizon, 200).unwrap();
    assert_eq!(marginal.kind, VerdictKind::Marginal);
    assert!((marginal.asymptotic_g - 1.0).abs() <= 1e-12);

    for i in 0..200 {
        let t = horizon * i as f64 / 199.0;
        assert_eq!(rates.lambda_tilde(t)[2], 1.0, "z eigenvalue moved at t={t}");
    }
    report(10, "second example reproduction");
}

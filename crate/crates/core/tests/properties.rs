use std::f64::consts::{FRAC_2_PI, TAU};

use ndarray::Array1;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use raman_cqed::dynamics::{analytic_propagate, block_propagator};
use raman_cqed::hilbert::{
    annihilation, coherent_state, creation, displacement, fock_state, FieldState, JointState, StateVector,
};
use raman_cqed::linalg;
use raman_cqed::postselect::{b_coefficients, condition_on_atom, field_marginal, photon_distribution};
use raman_cqed::protocols::{default_grid, exact_wigner, measure_photon_statistics, reconstruct_wigner, StateDescriptor};
use raman_cqed::raman::{
    detuning_delta_n, effective_block, effective_hamiltonian, eigendoublets, full_hamiltonian, omega_n, pi_time,
    q_factor, rabi_g_n,
};
use raman_cqed::{AtomLevel, RamanParams, SelectionTarget, TruncatedFockSpace};

const G: f64 = TAU * 50e3;

fn params() -> impl Strategy<Value = RamanParams> {
    (1.0f64..200.0, 10.0f64..100.0).prop_map(|(r, ratio)| RamanParams::from_ratio(G, r, ratio).unwrap())
}

fn amplitudes(dim: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
}

fn field(dim: usize, amps: Vec<C64>) -> FieldState {
    FieldState::new(TruncatedFockSpace::new(dim).unwrap(), Array1::from(amps)).unwrap()
}

fn relative_hermiticity(op: &raman_cqed::Operator) -> f64 {
    op.hermiticity_error() / linalg::max_abs(op.matrix()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructors_are_normalized(re in -2.0f64..2.0, im in -2.0f64..2.0, n in 0usize..20, amps in amplitudes(20)) {
        let space = TruncatedFockSpace::new(40).unwrap();
        prop_assert!((coherent_state(space, C64::new(re, im)).unwrap().norm() - 1.0).abs() < 1e-9);
        prop_assert!((fock_state(space, n).unwrap().norm() - 1.0).abs() < 1e-9);
        prop_assert!((field(20, amps).norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hamiltonians_are_hermitian(p in params(), n0 in 0usize..8, t in 0.0f64..2e-3) {
        let space = TruncatedFockSpace::new(14).unwrap();
        let target = SelectionTarget(n0);
        prop_assert!(relative_hermiticity(&effective_hamiltonian(&p, target, space).unwrap()) <= 1e-12);
        prop_assert!(relative_hermiticity(&full_hamiltonian(&p, target, space, t).unwrap()) <= 1e-12);
    }

    #[test]
    fn block_quantities_are_consistent(p in params(), n0 in 0usize..10, n in 0usize..30) {
        let target = SelectionTarget(n0);
        let dn = detuning_delta_n(&p, target, n);
        let expected = p.g() * p.g() / p.delta() * (n as f64 - n0 as f64);
        prop_assert!((dn - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        let block = effective_block(&p, target, n);
        prop_assert!((block[1][1] - block[0][0] - dn).abs() <= 1e-9 * block[0][0].abs().max(dn.abs()).max(1.0));
        let gn = rabi_g_n(&p, n);
        let lhs = (dn / (2.0 * gn)).powi(2) + 1.0;
        prop_assert!((lhs - q_factor(p.r(), n, n0)).abs() <= 1e-9 * lhs);
    }

    #[test]
    fn doublets_diagonalize_blocks(p in params(), n0 in 0usize..10, n in 0usize..30) {
        let target = SelectionTarget(n0);
        let block = effective_block(&p, target, n);
        let d = eigendoublets(&p, target, n);
        let scale = block.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
        prop_assert!(d.residual(&block) / scale <= 1e-10);
        let gap = d.lambda_plus - d.lambda_minus;
        prop_assert!((gap - 2.0 * omega_n(&p, target, n)).abs() <= 1e-10 * gap.abs().max(1.0));
    }

    #[test]
    fn block_propagator_is_unitary(p in params(), n0 in 0usize..10, n in 0usize..30, t in 0.0f64..5e-3) {
        let u = block_propagator(&p, SelectionTarget(n0), n, t);
        let c0 = u[0][0].norm_sqr() + u[1][0].norm_sqr();
        let c1 = u[0][1].norm_sqr() + u[1][1].norm_sqr();
        let cross = u[0][0].conj() * u[0][1] + u[1][0].conj() * u[1][1];
        prop_assert!((c0 - 1.0).abs() <= 1e-12);
        prop_assert!((c1 - 1.0).abs() <= 1e-12);
        prop_assert!(cross.norm() <= 1e-12);
    }

    #[test]
    fn analytic_propagation_composes(p in params(), n0 in 0usize..6, t1 in 0.0f64..2e-3, t2 in 0.0f64..2e-3, amps in amplitudes(12)) {
        let f = field(12, amps);
        let target = SelectionTarget(n0);
        let joint = JointState::product(AtomLevel::G, &f, 2).unwrap();
        let whole = analytic_propagate(&joint, &p, target, t1 + t2).unwrap();
        let first = analytic_propagate(&joint, &p, target, t1).unwrap();
        let split = analytic_propagate(&first.state, &p, target, t2).unwrap();
        prop_assert!(linalg::max_abs_diff(whole.state.amplitudes(), split.state.amplitudes()) <= 1e-10);
        prop_assert!(whole.norm_drift <= 1e-10);
    }

    #[test]
    fn conditioning_reproduces_closed_form(p in params(), n0 in 0usize..6, amps in amplitudes(12)) {
        let f = field(12, amps);
        let target = SelectionTarget(n0);
        prop_assume!(f.amplitude(n0).norm_sqr() > 1e-3);
        let joint = JointState::product(AtomLevel::G, &f, 2).unwrap();
        let after = analytic_propagate(&joint, &p, target, pi_time(&p, target)).unwrap();
        let conditioned = condition_on_atom(&after.state, AtomLevel::E).unwrap();
        let built = b_coefficients(&f, &p, target).unwrap().conditioned_field(f.space()).unwrap();
        prop_assert!(linalg::max_abs_diff(conditioned.state.amplitudes(), built.amplitudes()) <= 1e-10);
    }

    #[test]
    fn sum_rules_hold(p in params(), n0 in 0usize..6, t in 0.0f64..2e-3, amps in amplitudes(12)) {
        let f = field(12, amps);
        let target = SelectionTarget(n0);
        let joint = JointState::product(AtomLevel::G, &f, 2).unwrap();
        let state = analytic_propagate(&joint, &p, target, t).unwrap().state;
        let pg = state.level_population(AtomLevel::G);
        let pe = state.level_population(AtomLevel::E);
        prop_assert!((pg + pe - 1.0).abs() <= 1e-9);
        let marginal = field_marginal(&state);
        let mut recombined = vec![0.0; marginal.len()];
        for (level, weight) in [(AtomLevel::G, pg), (AtomLevel::E, pe)] {
            if weight > 1e-12 {
                let c = condition_on_atom(&state, level).unwrap();
                for (r, q) in recombined.iter_mut().zip(photon_distribution(&c.state)) {
                    *r += c.probability * q;
                }
            }
        }
        let gap = marginal.iter().zip(&recombined).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(gap <= 1e-9);
    }

    #[test]
    fn displacement_inverts(re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let alpha = C64::new(re, im);
        let space = TruncatedFockSpace::new(48).unwrap();
        let d = displacement(space, alpha).unwrap();
        let dinv = displacement(space, -alpha).unwrap();
        let prod = dinv.compose(&d).unwrap();
        // lower block: Fock columns whose displaced image stays inside the basis
        let fits = |n: usize| n as f64 + alpha.norm_sqr() + 6.0 * alpha.norm() * ((n + 1) as f64).sqrt() + 6.0 < 48.0;
        for n in (0..48).filter(|&n| fits(n)) {
            for m in (0..48).filter(|&m| fits(m)) {
                let id = if m == n { 1.0 } else { 0.0 };
                prop_assert!((prod.element(m, n) - id).norm() <= 1e-8, "({m},{n})");
            }
        }
    }

    #[test]
    fn parity_identity_at_origin(amps in amplitudes(10)) {
        let f = field(10, amps);
        let dist = photon_distribution(&f);
        let parity: f64 = dist.iter().enumerate().map(|(n, p)| if n % 2 == 0 { *p } else { -p }).sum();
        let w = exact_wigner(&StateDescriptor::Amplitudes(f.amplitudes().to_vec()), C64::new(0.0, 0.0));
        prop_assert!((w - FRAC_2_PI * parity).abs() <= 1e-10);
    }

    #[test]
    fn photon_statistics_are_probabilities(p in params(), amps in amplitudes(10)) {
        let f = field(10, amps).resized(TruncatedFockSpace::new(20).unwrap()).unwrap();
        let stats = measure_photon_statistics(&f, &p, 15).unwrap();
        prop_assert!(stats.iter().all(|x| (0.0..=1.0).contains(x)));
    }
}

#[test]
fn number_operator_is_diagonal() {
    let space = TruncatedFockSpace::new(16).unwrap();
    let n = creation(space).compose(&annihilation(space)).unwrap();
    for i in 0..16 {
        for j in 0..16 {
            let expected = if i == j { i as f64 } else { 0.0 };
            assert!((n.element(i, j) - expected).norm() < 1e-14);
        }
    }
}

#[test]
fn wigner_integrates_to_one() {
    let step = 0.05;
    let grid = default_grid(4.5, step);
    for state in [StateDescriptor::Fock(6), StateDescriptor::Coherent(C64::new(0.7, -0.4))] {
        let total: f64 = grid.iter().map(|a| exact_wigner(&state, *a)).sum::<f64>() * step * step;
        assert!((total - 1.0).abs() < 0.01, "{total}");
    }
}

fn fock6_error(r: f64) -> f64 {
    let p = RamanParams::from_ratio(G, r, 20.0).unwrap();
    let f = fock_state(TruncatedFockSpace::new(20).unwrap(), 6).unwrap();
    let grid = default_grid(3.5, 0.5);
    reconstruct_wigner(&f, &p, &grid).unwrap().max_abs_error()
}

#[test]
fn reconstruction_improves_with_selectivity() {
    let errs: Vec<f64> = [10.0, 30.0, 100.0].iter().map(|&r| fock6_error(r)).collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn photon_statistics_converge_with_selectivity() {
    let space = TruncatedFockSpace::for_run(5f64.sqrt(), 5);
    let f = coherent_state(space, C64::new(5f64.sqrt(), 0.0)).unwrap();
    let truth = photon_distribution(&f);
    let errs: Vec<f64> = [10.0, 30.0, 100.0]
        .iter()
        .map(|&r| {
            let p = RamanParams::from_ratio(G, r, 20.0).unwrap();
            let stats = measure_photon_statistics(&f, &p, 20).unwrap();
            stats.iter().zip(&truth).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

//! Time evolution of the atom-field system.
//!
//! Two independent routes:
//!
//! * [`analytic_propagate`] applies the closed-form 2x2 propagator of the
//!   effective model to every block `{|g,n>, |e,n+1>}`.
//! * [`numeric_propagate_full`] integrates the explicitly time-dependent
//!   three-level Hamiltonian. It conserves the excitation number, so it is
//!   integrated block by block on `{|g,n>, |h,n>, |e,n+1>}`. Each step is a
//!   fourth-order Magnus exponential; the step grid is aligned with the
//!   drive period `2 pi / delta`, so the one-period propagator is built once
//!   and raised to the number of complete periods.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{AtomLevel, JointState, StateVector};
use crate::linalg::{self, I, ZERO};
use crate::raman::{self, RamanParams, SelectionTarget};

/// State after a propagation, with bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub state: JointState,
    /// `|1 - ||state|| |`.
    pub norm_drift: f64,
    /// Integration steps taken (0 for the closed-form route).
    pub steps: u64,
}

/// `|1 - ||psi|| |` of a propagated state.
pub fn unitarity_probe(result: &PropagationResult) -> f64 {
    (1.0 - result.state.norm()).abs()
}

fn require_levels(state: &JointState, levels: usize) -> Result<()> {
    if state.levels() != levels {
        return Err(Error::DimensionMismatch {
            expected: format!("{levels}-level joint state"),
            found: format!("{}-level joint state", state.levels()),
        });
    }
    Ok(())
}

/// Closed-form propagator of block `n` over time `t`, acting on
/// `[amp(g,n), amp(e,n+1)]`. Energies are measured from `|g,n>`.
pub fn block_propagator(params: &RamanParams, target: SelectionTarget, n: usize, t: f64) -> [[C64; 2]; 2] {
    let gn = raman::rabi_g_n(params, n);
    let dn = raman::detuning_delta_n(params, target, n);
    let on = raman::omega_n(params, target, n);
    let cos = (on * t).cos();
    // sin(Omega t)/Omega, finite as Omega -> 0
    let sinc_t = if on > 0.0 { (on * t).sin() / on } else { t };
    let phase = C64::from_polar(1.0, -dn * t / 2.0);
    let diag = dn / 2.0 * sinc_t;
    let off = phase * (-I * (gn * sinc_t));
    [
        [phase * C64::new(cos, diag), off],
        [off, phase * C64::new(cos, -diag)],
    ]
}

/// Evolves a `{g, e}` joint state under the effective model for time `t`.
///
/// `|e,0>` is left unchanged, as is `|g,dim-1>` whose partner `|e,dim>` lies
/// outside the truncated basis.
pub fn analytic_propagate(
    initial: &JointState,
    params: &RamanParams,
    target: SelectionTarget,
    t: f64,
) -> Result<PropagationResult> {
    require_levels(initial, 2)?;
    let space = initial.space();
    target.check_space(space)?;
    let dim = space.dim();
    let mut out = initial.amplitudes().clone();
    for n in 0..dim - 1 {
        let (gi, ei) = (n, dim + n + 1);
        let (a, b) = (out[gi], out[ei]);
        let u = block_propagator(params, target, n, t);
        out[gi] = u[0][0] * a + u[0][1] * b;
        out[ei] = u[1][0] * a + u[1][1] * b;
    }
    let state = JointState::from_unitary_image(space, 2, out);
    let norm_drift = (1.0 - state.norm()).abs();
    Ok(PropagationResult {
        state,
        norm_drift,
        steps: 0,
    })
}

/// Controls for the full-model integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOptions {
    /// Accept when the largest amplitude change between successive step
    /// halvings falls below this.
    pub tolerance: f64,
    pub max_refinements: usize,
    /// Lower bound on steps per drive period.
    pub min_steps_per_period: usize,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-7,
            max_refinements: 10,
            min_steps_per_period: 40,
        }
    }
}

/// Excitation-number block of the full model: `|g,n>, |h,n>` and, when it
/// fits, `|e,n+1>`.
struct FullBlock {
    indices: Vec<usize>,
    static_part: Array2<C64>,
    /// Coefficient of `exp(-i delta t)`; its adjoint multiplies `exp(+i delta t)`.
    rotating_part: Array2<C64>,
}

impl FullBlock {
    fn hamiltonian(&self, delta: f64, t: f64) -> Array2<C64> {
        let phase = C64::from_polar(1.0, -delta * t);
        let rot = &self.rotating_part * phase;
        let herm = linalg::dagger(&rot);
        &self.static_part + &rot + &herm
    }
}

fn full_blocks(params: &RamanParams, target: SelectionTarget, dim: usize) -> Vec<FullBlock> {
    let comp = raman::compensation_shift(params, target);
    let mut blocks = Vec::with_capacity(dim + 1);
    // |e,0> on its own
    blocks.push(FullBlock {
        indices: vec![dim],
        static_part: Array2::from_elem((1, 1), C64::new(-comp, 0.0)),
        rotating_part: Array2::zeros((1, 1)),
    });
    for n in 0..dim {
        let with_e = n + 1 < dim;
        let size = if with_e { 3 } else { 2 };
        let mut indices = vec![n, 2 * dim + n];
        let mut static_part = Array2::<C64>::zeros((size, size));
        let mut rotating_part = Array2::<C64>::zeros((size, size));
        rotating_part[[1, 0]] = C64::new(params.omega_l(), 0.0);
        if with_e {
            indices.push(dim + n + 1);
            static_part[[2, 2]] = C64::new(-comp, 0.0);
            rotating_part[[1, 2]] = C64::new(params.g() * ((n + 1) as f64).sqrt(), 0.0);
        }
        blocks.push(FullBlock {
            indices,
            static_part,
            rotating_part,
        });
    }
    blocks
}

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // sqrt(3)/6
const MAGNUS_COMMUTATOR: f64 = 0.144_337_567_297_406_43; // sqrt(3)/12

/// Fourth-order Magnus step from `t` to `t + h`.
fn magnus_step(block: &FullBlock, delta: f64, t: f64, h: f64) -> Array2<C64> {
    let a1 = block.hamiltonian(delta, t + h * (0.5 - GAUSS_OFFSET)) * (-I);
    let a2 = block.hamiltonian(delta, t + h * (0.5 + GAUSS_OFFSET)) * (-I);
    let generator = (&a1 + &a2) * C64::new(h / 2.0, 0.0)
        + linalg::commutator(&a2, &a1) * C64::new(MAGNUS_COMMUTATOR * h * h, 0.0);
    linalg::expm(&generator)
}

/// Propagator of one block over `[0, t]` with `m` steps per drive period.
fn block_evolution(block: &FullBlock, delta: f64, t: f64, steps_per_period: usize) -> (Array2<C64>, u64) {
    let size = block.indices.len();
    let period = std::f64::consts::TAU / delta;
    let h = period / steps_per_period as f64;
    let periods = (t / period).floor();
    let remainder = (t - periods * period).max(0.0);
    let whole = (remainder / h).floor() as usize;
    let fraction = remainder - whole as f64 * h;

    let mut one_period = Array2::<C64>::eye(size);
    let mut partial = Array2::<C64>::eye(size);
    for k in 0..steps_per_period {
        let step = magnus_step(block, delta, k as f64 * h, h);
        one_period = step.dot(&one_period);
        if k < whole {
            partial = step.dot(&partial);
        }
    }
    let mut steps = periods as u64 * steps_per_period as u64 + whole as u64;
    if fraction > 0.0 {
        partial = magnus_step(block, delta, whole as f64 * h, fraction).dot(&partial);
        steps += 1;
    }
    let total = partial.dot(&linalg::matrix_power(&one_period, periods as u64));
    (total, steps)
}

fn evolve_blocks(
    initial: &JointState,
    blocks: &[FullBlock],
    delta: f64,
    t: f64,
    steps_per_period: usize,
) -> (Array1<C64>, u64) {
    let mut out = Array1::<C64>::zeros(initial.amplitudes().len());
    let mut steps = 0;
    for block in blocks {
        let local: Array1<C64> = block.indices.iter().map(|&i| initial.amplitudes()[i]).collect();
        if local.iter().all(|z| *z == ZERO) {
            continue;
        }
        let (u, s) = block_evolution(block, delta, t, steps_per_period);
        steps = steps.max(s);
        let evolved = u.dot(&local);
        for (&i, z) in block.indices.iter().zip(evolved.iter()) {
            out[i] = *z;
        }
    }
    (out, steps)
}

/// Integrates the full three-level model from `initial` for time `t`.
pub fn numeric_propagate_full(
    initial: &JointState,
    params: &RamanParams,
    target: SelectionTarget,
    t: f64,
) -> Result<PropagationResult> {
    numeric_propagate_full_with(initial, params, target, t, &NumericOptions::default())
}

pub fn numeric_propagate_full_with(
    initial: &JointState,
    params: &RamanParams,
    target: SelectionTarget,
    t: f64,
    options: &NumericOptions,
) -> Result<PropagationResult> {
    require_levels(initial, 3)?;
    let space = initial.space();
    target.check_space(space)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "interaction time must be finite and non-negative, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(PropagationResult {
            state: initial.clone(),
            norm_drift: (1.0 - initial.norm()).abs(),
            steps: 0,
        });
    }

    let dim = space.dim();
    let delta = params.delta();
    let period = std::f64::consts::TAU / delta;
    let fastest = params.omega_l().max(params.g() * (dim as f64).sqrt());
    let mut steps_per_period = options
        .min_steps_per_period
        .max((period * 50.0 * fastest).ceil() as usize);

    let blocks = full_blocks(params, target, dim);
    let (mut previous, _) = evolve_blocks(initial, &blocks, delta, t, steps_per_period);
    let mut change = f64::INFINITY;
    for _ in 0..options.max_refinements {
        steps_per_period *= 2;
        let (current, steps) = evolve_blocks(initial, &blocks, delta, t, steps_per_period);
        change = linalg::max_abs_diff(&current, &previous);
        if change < options.tolerance {
            let state = JointState::from_unitary_image(space, 3, current);
            let norm_drift = (1.0 - state.norm()).abs();
            return Ok(PropagationResult {
                state,
                norm_drift,
                steps,
            });
        }
        previous = current;
    }
    Err(Error::NonConvergence {
        refinements: options.max_refinements,
        steps_per_period,
        change,
    })
}

/// Outcome of running both models on the same initial field.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelComparison {
    pub time: f64,
    pub excited_full: f64,
    pub excited_effective: f64,
    /// `excited_full - excited_effective`.
    pub difference: f64,
    /// Population left in `h` at the end of the full-model run.
    pub upper_population: f64,
    pub full_norm_drift: f64,
    pub steps: u64,
}

/// Starts the atom in `g` with `field`, evolves both models for `t`, and
/// compares the final `e` populations.
pub fn compare_models(
    field: &crate::hilbert::FieldState,
    params: &RamanParams,
    target: SelectionTarget,
    t: f64,
) -> Result<ModelComparison> {
    let effective_initial = JointState::product(AtomLevel::G, field, 2)?;
    let full_initial = JointState::product(AtomLevel::G, field, 3)?;
    let eff = analytic_propagate(&effective_initial, params, target, t)?;
    let full = numeric_propagate_full(&full_initial, params, target, t)?;
    let excited_full = full.state.level_population(AtomLevel::E);
    let excited_effective = eff.state.level_population(AtomLevel::E);
    Ok(ModelComparison {
        time: t,
        excited_full,
        excited_effective,
        difference: excited_full - excited_effective,
        upper_population: full.state.level_population(AtomLevel::H),
        full_norm_drift: full.norm_drift,
        steps: full.steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{coherent_state, fock_state, FieldState, TruncatedFockSpace};
    use std::f64::consts::TAU;

    fn reference_params() -> RamanParams {
        RamanParams::from_hz(50e3, 50e3 / 30.0, 1e6).unwrap()
    }

    fn ground_with(field: &FieldState, levels: usize) -> JointState {
        JointState::product(AtomLevel::G, field, levels).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let p = reference_params();
        let space = TruncatedFockSpace::new(34).unwrap();
        let field = coherent_state(space, C64::new(5f64.sqrt(), 0.0)).unwrap();
        let psi = ground_with(&field, 2);
        let out = analytic_propagate(&psi, &p, SelectionTarget(5), 0.0).unwrap();
        assert!(linalg::max_abs_diff(out.state.amplitudes(), psi.amplitudes()) < 1e-15);
        assert_eq!(unitarity_probe(&out), out.norm_drift);

        let psi3 = ground_with(&field, 3);
        let out3 = numeric_propagate_full(&psi3, &p, SelectionTarget(5), 0.0).unwrap();
        assert_eq!(out3.state, psi3);
        assert_eq!(unitarity_probe(&out3), (1.0 - psi3.norm()).abs());
        assert!(unitarity_probe(&out3) < 1e-12);
    }

    #[test]
    fn resonant_pi_pulse() {
        let p = reference_params();
        let target = SelectionTarget(5);
        let space = TruncatedFockSpace::new(12).unwrap();
        let psi = ground_with(&fock_state(space, 5).unwrap(), 2);
        let tau = raman::pi_time(&p, target);
        let out = analytic_propagate(&psi, &p, target, tau).unwrap();
        assert!(out.state.amplitude(AtomLevel::G, 5).norm() < 1e-12);
        assert!((out.state.amplitude(AtomLevel::E, 6) - C64::new(0.0, -1.0)).norm() < 1e-12);
        assert!(unitarity_probe(&out) < 1e-12);
    }

    #[test]
    fn dispersive_limit_keeps_ground_state() {
        let target = SelectionTarget(5);
        let space = TruncatedFockSpace::new(12).unwrap();
        let psi = ground_with(&fock_state(space, 3).unwrap(), 2);
        let mut worst = Vec::new();
        for r in [30.0, 300.0, 3000.0] {
            let p = RamanParams::from_ratio(1.0, r, 1e4).unwrap();
            let tau = raman::pi_time(&p, target);
            let mut min_return = 1.0f64;
            for k in 0..200 {
                let t = tau * 5.0 * k as f64 / 200.0;
                let out = analytic_propagate(&psi, &p, target, t).unwrap();
                min_return = min_return.min(out.state.amplitude(AtomLevel::G, 3).norm_sqr());
            }
            worst.push(1.0 - min_return);
        }
        assert!(worst[0] > worst[1] && worst[1] > worst[2]);
        assert!(worst[2] < 1e-5);
    }

    #[test]
    fn analytic_matches_exponential_of_effective_hamiltonian() {
        let p = RamanParams::from_ratio(1.0, 7.0, 20.0).unwrap();
        let target = SelectionTarget(2);
        let space = TruncatedFockSpace::new(8).unwrap();
        let h = raman::effective_hamiltonian(&p, target, space).unwrap();
        let shifted = h.matrix() - &(Array2::<C64>::eye(16) * p.ground_shift());
        let amps: Array1<C64> = (0..16)
            .map(|i| if i == 8 { ZERO } else { C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()) })
            .collect();
        let psi = JointState::new(space, 2, amps).unwrap();
        let t = 3.7 * raman::pi_time(&p, target);
        let u = linalg::expm(&(shifted * (-I * t)));
        let expected = u.dot(psi.amplitudes());
        let out = analytic_propagate(&psi, &p, target, t).unwrap();
        assert!(linalg::max_abs_diff(out.state.amplitudes(), &expected) < 1e-10);
    }

    #[test]
    fn analytic_requires_two_levels() {
        let p = reference_params();
        let space = TruncatedFockSpace::new(12).unwrap();
        let psi = ground_with(&fock_state(space, 5).unwrap(), 3);
        assert!(matches!(
            analytic_propagate(&psi, &p, SelectionTarget(5), 1e-3),
            Err(Error::DimensionMismatch { .. })
        ));
        let psi2 = ground_with(&fock_state(space, 5).unwrap(), 2);
        assert!(matches!(
            numeric_propagate_full(&psi2, &p, SelectionTarget(5), 1e-3),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn uncoupled_full_model_is_trivial() {
        let p = RamanParams::new(0.0, 0.0, 1e6).unwrap();
        let space = TruncatedFockSpace::new(10).unwrap();
        let field = coherent_state(space, C64::new(0.4, 0.2)).unwrap();
        let psi = ground_with(&field, 3);
        for t in [1e-6, 3.3e-4] {
            let out = numeric_propagate_full(&psi, &p, SelectionTarget(2), t).unwrap();
            assert!(linalg::max_abs_diff(out.state.amplitudes(), psi.amplitudes()) < 1e-12);
        }
    }

    /// Independent reference: dense midpoint stepping of the full Hamiltonian.
    fn dense_midpoint(
        psi: &JointState,
        p: &RamanParams,
        target: SelectionTarget,
        t: f64,
        steps: usize,
    ) -> Array1<C64> {
        let h = t / steps as f64;
        let mut state = psi.amplitudes().clone();
        for k in 0..steps {
            let mid = (k as f64 + 0.5) * h;
            let ham = raman::full_hamiltonian(p, target, psi.space(), mid).unwrap();
            let u = linalg::expm(&(ham.matrix() * (-I * h)));
            state = u.dot(&state);
        }
        state
    }

    #[test]
    fn block_integrator_matches_dense_reference() {
        // small strongly-coupled system so the dense reference is cheap
        let p = RamanParams::new(1.0, 0.5, 12.0).unwrap();
        let target = SelectionTarget(1);
        let space = TruncatedFockSpace::new(5).unwrap();
        let amps: Array1<C64> = (0..15).map(|i| C64::new(1.0 / (1.0 + i as f64), 0.1 * i as f64)).collect();
        let psi = JointState::new(space, 3, amps).unwrap();
        let t = 7.3 * TAU / p.delta() + 0.123;
        let out = numeric_propagate_full(&psi, &p, target, t).unwrap();
        let reference = dense_midpoint(&psi, &p, target, t, 40_000);
        let diff = linalg::max_abs_diff(out.state.amplitudes(), &reference);
        assert!(diff < 1e-5, "diff {diff}");
        assert!(unitarity_probe(&out) < 1e-8);
    }

    #[test]
    fn full_model_tracks_effective_model_at_reference_parameters() {
        let p = reference_params();
        let target = SelectionTarget(5);
        let space = TruncatedFockSpace::for_run(5f64.sqrt(), 5);
        let field = coherent_state(space, C64::new(5f64.sqrt(), 0.0)).unwrap();
        let tau = raman::pi_time(&p, target);
        let cmp = compare_models(&field, &p, target, tau).unwrap();
        assert!(cmp.difference.abs() <= 0.05, "{cmp:?}");
        let scale = (p.omega_l() / p.delta()).powi(2) + p.g() * p.g() * space.dim() as f64 / p.delta().powi(2);
        assert!(cmp.upper_population < scale, "{cmp:?}");
        assert!(cmp.full_norm_drift < 1e-8);
        assert!(cmp.steps > 0);
    }

    #[test]
    fn group_property() {
        let p = reference_params();
        let target = SelectionTarget(5);
        let space = TruncatedFockSpace::new(34).unwrap();
        let field = coherent_state(space, C64::new(1.5, 1.5)).unwrap();
        let psi = ground_with(&field, 2);
        let (t1, t2) = (3.1e-4, 7.7e-4);
        let a = analytic_propagate(&psi, &p, target, t1).unwrap();
        let ab = analytic_propagate(&a.state, &p, target, t2).unwrap();
        let direct = analytic_propagate(&psi, &p, target, t1 + t2).unwrap();
        assert!(linalg::max_abs_diff(ab.state.amplitudes(), direct.state.amplitudes()) < 1e-10);
    }
}

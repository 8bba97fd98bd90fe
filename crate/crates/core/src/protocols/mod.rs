//! End-to-end experiments built on the selective interaction.

mod wigner;

pub use wigner::{
    default_grid, displaced_fock_element, exact_wigner, reconstruct_wigner, reconstruct_wigner_with,
    StateDescriptor, WignerGrid, WignerOptions, WignerPoint,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::dynamics::analytic_propagate;
use crate::error::{Error, Result};
use crate::hilbert::{AtomLevel, FieldState, JointState, StateVector};
use crate::postselect::{self, BCoefficients, ConditionedField, DEGENERATE_PROBABILITY};
use crate::raman::{self, RamanParams, SelectionTarget};

/// How the excited-state fraction is read out for each setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementMode {
    /// Exact probabilities from the amplitudes.
    Deterministic,
    /// Binomially sampled fraction out of `atoms_per_setting` detected atoms.
    MonteCarlo { seed: u64, atoms_per_setting: u64 },
}

impl MeasurementMode {
    /// Mode with an independent, reproducible stream for work item `index`.
    pub(crate) fn for_item(&self, index: u64) -> MeasurementMode {
        match *self {
            MeasurementMode::Deterministic => MeasurementMode::Deterministic,
            MeasurementMode::MonteCarlo {
                seed,
                atoms_per_setting,
            } => MeasurementMode::MonteCarlo {
                seed: seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                atoms_per_setting,
            },
        }
    }
}

/// Outcome of one stage of a (possibly sequential) preparation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrepStage {
    pub n0: usize,
    pub excited_probability: f64,
    /// Overlap with `|n0 + 1>` after this stage.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockPrepReport {
    pub conditioned: ConditionedField,
    /// Overlap of the final field with the target Fock state.
    pub fidelity: f64,
    /// `1 - sum |b_n|^2 / |c_N0|^2` for the first atom.
    pub approximate_fidelity: f64,
    /// Product of the probabilities of detecting every atom in `e`.
    pub success_probability: f64,
    pub selectivity_margin: f64,
    /// `selectivity_margin > 1`; informational only.
    pub selectivity_ok: bool,
    pub atoms_used: usize,
    pub target_fock: usize,
    /// Block amplitudes of the first atom.
    pub coefficients: BCoefficients,
    pub stages: Vec<PrepStage>,
}

/// `r / (2 sqrt(N0 + 2))`; values well above 1 mean good selectivity.
pub fn selectivity_margin(params: &RamanParams, n0: usize) -> f64 {
    params.r() / (2.0 * ((n0 + 2) as f64).sqrt())
}

fn check_feasible(field: &FieldState, n0: usize) -> Result<()> {
    if field.amplitude(n0).norm_sqr() <= DEGENERATE_PROBABILITY {
        return Err(Error::InfeasiblePreparation { n0, target: n0 + 1 });
    }
    Ok(())
}

fn single_atom(field: &FieldState, params: &RamanParams, n0: usize) -> Result<(ConditionedField, f64)> {
    let target = SelectionTarget(n0);
    target.check_space(field.space())?;
    check_feasible(field, n0)?;
    let joint = JointState::product(AtomLevel::G, field, 2)?;
    let after = analytic_propagate(&joint, params, target, raman::pi_time(params, target))?;
    let branch = postselect::condition_on_atom(&after.state, AtomLevel::E)?;
    let fidelity = postselect::fidelity(&branch.state, n0 + 1)?;
    Ok((branch, fidelity))
}

/// Sends one atom in `g` through a pi pulse selective on `N0` and keeps the
/// field conditioned on detecting it in `e`.
pub fn prepare_fock(initial_field: &FieldState, params: &RamanParams, n0: usize) -> Result<FockPrepReport> {
    prepare_fock_sequential(initial_field, params, n0, 1)
}

/// Sends `atoms` atoms, the k-th tuned to the block `N0 + k`, keeping only
/// runs where every atom is found in `e`.
pub fn prepare_fock_sequential(
    initial_field: &FieldState,
    params: &RamanParams,
    n0: usize,
    atoms: usize,
) -> Result<FockPrepReport> {
    if atoms == 0 {
        return Err(Error::InvalidParameter("at least one atom is required".into()));
    }
    SelectionTarget(n0).check_space(initial_field.space())?;
    check_feasible(initial_field, n0)?;
    let coefficients = postselect::b_coefficients(initial_field, params, SelectionTarget(n0))?;

    let mut field = initial_field.clone();
    let mut success = 1.0;
    let mut stages = Vec::with_capacity(atoms);
    let mut last = None;
    for k in 0..atoms {
        let stage_n0 = n0 + k;
        let (branch, fidelity) = single_atom(&field, params, stage_n0)?;
        success *= branch.probability;
        stages.push(PrepStage {
            n0: stage_n0,
            excited_probability: branch.probability,
            fidelity,
        });
        field = branch.state.clone();
        last = Some(branch);
    }
    let target_fock = n0 + atoms;
    let last = last.expect("atoms >= 1");
    let fidelity = postselect::fidelity(&last.state, target_fock)?;
    let margin = selectivity_margin(params, n0);
    Ok(FockPrepReport {
        conditioned: ConditionedField {
            state: last.state,
            probability: success,
        },
        fidelity,
        approximate_fidelity: coefficients.approximate_fidelity(),
        success_probability: success,
        selectivity_margin: margin,
        selectivity_ok: margin > 1.0,
        atoms_used: atoms,
        target_fock,
        coefficients,
        stages,
    })
}

/// Estimates `P_N` for `N = 0..=n_max` as the excited fraction after a pi
/// pulse selective on each `N`.
pub fn measure_photon_statistics(field: &FieldState, params: &RamanParams, n_max: usize) -> Result<Vec<f64>> {
    measure_photon_statistics_with(field, params, n_max, &MeasurementMode::Deterministic)
}

pub fn measure_photon_statistics_with(
    field: &FieldState,
    params: &RamanParams,
    n_max: usize,
    mode: &MeasurementMode,
) -> Result<Vec<f64>> {
    let dim = field.space().dim();
    if n_max + 1 >= dim {
        return Err(Error::Truncation {
            dim,
            required: n_max + 2,
            context: format!("photon statistics up to N = {n_max}"),
        });
    }
    let joint = JointState::product(AtomLevel::G, field, 2)?;
    let mut rng = match *mode {
        MeasurementMode::MonteCarlo { seed, .. } => Some(ChaCha8Rng::seed_from_u64(seed)),
        MeasurementMode::Deterministic => None,
    };
    (0..=n_max)
        .map(|n| {
            let target = SelectionTarget(n);
            let after = analytic_propagate(&joint, params, target, raman::pi_time(params, target))?;
            let p = postselect::excited_probability(&after.state).clamp(0.0, 1.0);
            match (mode, rng.as_mut()) {
                (MeasurementMode::MonteCarlo { atoms_per_setting, .. }, Some(rng)) if *atoms_per_setting > 0 => {
                    let dist = Binomial::new(*atoms_per_setting, p)
                        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
                    Ok(dist.sample(rng) as f64 / *atoms_per_setting as f64)
                }
                _ => Ok(p),
            }
        })
        .collect()
}

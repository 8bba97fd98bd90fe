//! Conditioning the cavity field on the detected atomic level.

use std::f64::consts::FRAC_PI_2;

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::dynamics::block_propagator;
use crate::error::{Error, Result};
use crate::hilbert::{AtomLevel, FieldState, JointState, StateVector};
use crate::linalg::{I, ZERO};
use crate::raman::{self, RamanParams, SelectionTarget};

/// Branch probabilities at or below this are treated as impossible outcomes.
pub const DEGENERATE_PROBABILITY: f64 = 1e-20;

/// Field state left behind by one measurement outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionedField {
    pub state: FieldState,
    /// Probability of the outcome that produced `state`.
    pub probability: f64,
}

/// Projects `joint` on `level` and renormalizes the remaining field.
pub fn condition_on_atom(joint: &JointState, level: AtomLevel) -> Result<ConditionedField> {
    let amps = joint.level_amplitudes(level)?;
    let probability: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if !(probability > DEGENERATE_PROBABILITY) {
        return Err(Error::DegenerateOutcome {
            level: level.label(),
        });
    }
    Ok(ConditionedField {
        state: FieldState::new(joint.space(), amps)?,
        probability: probability.min(1.0),
    })
}

/// `P_n = |c_n|^2`.
pub fn photon_distribution(field: &FieldState) -> Vec<f64> {
    field.amplitudes().iter().map(|z| z.norm_sqr()).collect()
}

/// Photon-number distribution of a joint state with the atom traced out.
pub fn field_marginal(joint: &JointState) -> Vec<f64> {
    let dim = joint.space().dim();
    let mut p = vec![0.0; dim];
    for (i, z) in joint.amplitudes().iter().enumerate() {
        p[i % dim] += z.norm_sqr();
    }
    p
}

/// Population of the excited level `e` after the interaction.
pub fn excited_probability(joint_after: &JointState) -> f64 {
    joint_after.level_population(AtomLevel::E)
}

/// `|<k|field>|^2`.
pub fn fidelity(field: &FieldState, target_fock: usize) -> Result<f64> {
    let dim = field.space().dim();
    if target_fock >= dim {
        return Err(Error::OutOfRange { n: target_fock, dim });
    }
    Ok(field.amplitude(target_fock).norm_sqr().min(1.0))
}

/// Amplitude that block `n` sends into `|e,n+1>` during a selective pi pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BCoefficient {
    pub n: usize,
    /// Initial field amplitude `c_n`.
    pub c: C64,
    pub q: f64,
    /// Amplitude from propagating the block for the pi time.
    pub b: C64,
    /// The closed-form expression with sine argument `(pi/2) sqrt(q/(N0+1))`.
    pub b_literal: C64,
    /// `|c_n| G_n / Omega_n` from the propagator.
    pub prefactor_propagated: f64,
    /// `|c_n| / sqrt(q)`.
    pub prefactor_closed_form: f64,
    /// `Omega_n tau` from the propagator.
    pub sine_argument: f64,
    /// `(pi/2) sqrt(q/(N0+1))`.
    pub sine_argument_literal: f64,
    /// `(pi/2) sqrt(q (n+1)/(N0+1))`.
    pub sine_argument_rescaled: f64,
}

/// All block amplitudes `b_n` for one selective pi pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct BCoefficients {
    pub n0: usize,
    pub tau: f64,
    pub entries: Vec<BCoefficient>,
}

impl BCoefficients {
    /// Largest `| |c_n| G_n/Omega_n - |c_n|/sqrt(q) |`.
    pub fn max_prefactor_mismatch(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| (e.prefactor_propagated - e.prefactor_closed_form).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|Omega_n tau - (pi/2) sqrt(q (n+1)/(N0+1))|`.
    pub fn max_rescaled_argument_mismatch(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| (e.sine_argument - e.sine_argument_rescaled).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|b_n - b_literal|`, nonzero whenever the literal sine argument
    /// differs from the propagated one.
    pub fn max_literal_deviation(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| (e.b - e.b_literal).norm())
            .fold(0.0, f64::max)
    }

    /// Normalized field conditioned on `e`: `b_n` placed at `|n+1>`.
    pub fn conditioned_field(&self, field_space: crate::hilbert::TruncatedFockSpace) -> Result<FieldState> {
        let mut amps = Array1::<C64>::zeros(field_space.dim());
        for e in &self.entries {
            if e.n + 1 < field_space.dim() {
                amps[e.n + 1] = e.b;
            }
        }
        FieldState::new(field_space, amps)
    }

    /// `1 - sum_{n != N0} |b_n|^2 / |c_N0|^2`.
    pub fn approximate_fidelity(&self) -> f64 {
        let c0 = self
            .entries
            .iter()
            .find(|e| e.n == self.n0)
            .map(|e| e.c.norm_sqr())
            .unwrap_or(0.0);
        if c0 == 0.0 {
            return 0.0;
        }
        let leak: f64 = self
            .entries
            .iter()
            .filter(|e| e.n != self.n0)
            .map(|e| e.b.norm_sqr())
            .sum();
        1.0 - leak / c0
    }

    /// Plain-text comparison of the propagated amplitudes with the
    /// closed-form expression.
    pub fn diagnostic_report(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# b_n diagnostic: N0 = {}, tau = {:.11e} s\n",
            self.n0, self.tau
        ));
        out.push_str(&format!(
            "# max | |c_n|G_n/Omega_n - |c_n|/sqrt(q) | = {:.3e}\n",
            self.max_prefactor_mismatch()
        ));
        out.push_str(&format!(
            "# max | Omega_n tau - (pi/2)sqrt(q(n+1)/(N0+1)) | = {:.3e}\n",
            self.max_rescaled_argument_mismatch()
        ));
        out.push_str(&format!(
            "# max | b_n - b_n(literal sine argument (pi/2)sqrt(q/(N0+1))) | = {:.3e}\n",
            self.max_literal_deviation()
        ));
        out.push_str("n,abs_c,q,abs_b,abs_b_literal,sine_argument,sine_argument_literal\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}\n",
                e.n,
                e.c.norm(),
                e.q,
                e.b.norm(),
                e.b_literal.norm(),
                e.sine_argument,
                e.sine_argument_literal
            ));
        }
        out
    }
}

/// Amplitudes `b_n` of `|e, n+1>` after a pi pulse on `|g> ⊗ field`,
/// evaluated from the block propagator at `t = pi_time`.
pub fn b_coefficients(
    initial_field: &FieldState,
    params: &RamanParams,
    target: SelectionTarget,
) -> Result<BCoefficients> {
    let space = initial_field.space();
    target.check_space(space)?;
    let n0 = target.n0();
    let tau = raman::pi_time(params, target);
    let r = params.r();
    let entries = (0..space.dim() - 1)
        .map(|n| {
            let c = initial_field.amplitude(n);
            let q = raman::q_factor(r, n, n0);
            let u = block_propagator(params, target, n, tau);
            let b = u[1][0] * c;
            let gn = raman::rabi_g_n(params, n);
            let on = raman::omega_n(params, target, n);
            let dn = raman::detuning_delta_n(params, target, n);
            let literal_arg = FRAC_PI_2 * (q / (n0 + 1) as f64).sqrt();
            let b_literal = if c == ZERO {
                ZERO
            } else {
                c * (-I) * C64::from_polar(1.0, -dn * tau / 2.0) * (literal_arg.sin() / q.sqrt())
            };
            BCoefficient {
                n,
                c,
                q,
                b,
                b_literal,
                prefactor_propagated: c.norm() * gn / on,
                prefactor_closed_form: c.norm() / q.sqrt(),
                sine_argument: on * tau,
                sine_argument_literal: literal_arg,
                sine_argument_rescaled: FRAC_PI_2 * (q * (n + 1) as f64 / (n0 + 1) as f64).sqrt(),
            }
        })
        .collect();
    Ok(BCoefficients { n0, tau, entries })
}

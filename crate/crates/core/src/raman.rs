//! Raman coupling of a three-level lambda atom to a classical field and a
//! cavity mode.
//!
//! Levels `g` and `e` both couple to `h` with the same detuning `delta`.
//! After eliminating `h`, the pair `{|g,n>, |e,n+1>}` forms an isolated
//! two-level block for every `n`. A constant energy offset on `e` (the
//! compensation shift) puts the block `n = N0` on resonance while the other
//! blocks see a photon-number dependent detuning.
//!
//! All frequencies are angular (rad/s). Couplings are stored as real,
//! non-negative magnitudes with the classical field in phase with the
//! cavity coupling.

use std::f64::consts::{FRAC_PI_2, TAU};

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{Operator, TruncatedFockSpace};
use crate::linalg::ZERO;

/// Detuning/coupling ratio below which the parameters are rejected.
pub const ADIABATIC_REJECT_RATIO: f64 = 5.0;
/// Detuning/coupling ratio below which a warning is logged.
pub const ADIABATIC_WARN_RATIO: f64 = 10.0;

/// Converts an ordinary frequency (Hz) to an angular frequency (rad/s).
pub fn hz_to_angular(hz: f64) -> f64 {
    TAU * hz
}

pub fn angular_to_hz(omega: f64) -> f64 {
    omega / TAU
}

/// Coupling constants of the Raman scheme, in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanParams {
    g: f64,
    omega_l: f64,
    delta: f64,
}

impl RamanParams {
    /// `g`: cavity coupling, `omega_l`: classical-field coupling,
    /// `delta`: common detuning from `h`.
    ///
    /// A zero coupling is accepted (it switches that transition off).
    pub fn new(g: f64, omega_l: f64, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "detuning must be positive and finite, got {delta}"
            )));
        }
        for (name, value) in [("g", g), ("omega_l", omega_l)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be non-negative and finite, got {value}"
                )));
            }
            if value > 0.0 {
                let ratio = delta / value;
                if ratio < ADIABATIC_REJECT_RATIO {
                    return Err(Error::Adiabaticity { ratio });
                }
                if ratio < ADIABATIC_WARN_RATIO {
                    log::warn!("delta/{name} = {ratio:.2}: adiabatic elimination is marginal");
                }
            }
        }
        Ok(Self { g, omega_l, delta })
    }

    /// Same as [`RamanParams::new`] with ordinary frequencies in Hz.
    pub fn from_hz(g_hz: f64, omega_l_hz: f64, delta_hz: f64) -> Result<Self> {
        Self::new(
            hz_to_angular(g_hz),
            hz_to_angular(omega_l_hz),
            hz_to_angular(delta_hz),
        )
    }

    /// Parameters with coupling ratio `r = g / omega_l` and `delta = g * detuning_ratio`.
    pub fn from_ratio(g: f64, r: f64, detuning_ratio: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter(format!("r must be positive, got {r}")));
        }
        Self::new(g, g / r, g * detuning_ratio)
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn omega_l(&self) -> f64 {
        self.omega_l
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `r = g / omega_l`; infinite when the classical field is off.
    pub fn r(&self) -> f64 {
        if self.omega_l == 0.0 {
            if self.g == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.g / self.omega_l
        }
    }

    /// Two-photon coupling `g omega_l / delta`.
    pub fn raman_coupling(&self) -> f64 {
        self.g * self.omega_l / self.delta
    }

    /// Light shift of `g` from the classical field, `omega_l^2 / delta`.
    pub fn ground_shift(&self) -> f64 {
        self.omega_l * self.omega_l / self.delta
    }

    /// Light shift per photon of `e`, `g^2 / delta`.
    pub fn excited_shift_per_photon(&self) -> f64 {
        self.g * self.g / self.delta
    }
}

/// The photon number `N0` whose block `{|g,N0>, |e,N0+1>}` is tuned to resonance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SelectionTarget(pub usize);

impl SelectionTarget {
    pub fn n0(&self) -> usize {
        self.0
    }

    /// The block `{|g,N0>, |e,N0+1>}` must fit inside `space`.
    pub fn check_space(&self, space: TruncatedFockSpace) -> Result<()> {
        let required = self.0 + 2;
        if space.dim() < required {
            return Err(Error::Truncation {
                dim: space.dim(),
                required,
                context: format!("selected block N0 = {}", self.0),
            });
        }
        Ok(())
    }
}

/// `Delta_n = (g^2/delta)(n - N0)`: residual detuning of block `n` after compensation.
pub fn detuning_delta_n(params: &RamanParams, target: SelectionTarget, n: usize) -> f64 {
    params.excited_shift_per_photon() * (n as f64 - target.0 as f64)
}

/// `G_n = (g omega_l / delta) sqrt(n + 1)`.
pub fn rabi_g_n(params: &RamanParams, n: usize) -> f64 {
    params.raman_coupling() * ((n + 1) as f64).sqrt()
}

/// `Omega_n = sqrt(Delta_n^2 / 4 + G_n^2)`.
pub fn omega_n(params: &RamanParams, target: SelectionTarget, n: usize) -> f64 {
    detuning_delta_n(params, target, n).hypot(2.0 * rabi_g_n(params, n)) / 2.0
}

/// Bare detuning of block `n` before compensation,
/// `(g^2 (n+1) - omega_l^2) / delta`.
pub fn bare_block_detuning(params: &RamanParams, n: usize) -> f64 {
    params.excited_shift_per_photon() * (n + 1) as f64 - params.ground_shift()
}

/// Energy offset that brings block `N0` to resonance; applied as
/// `-compensation_shift` on level `e`.
pub fn compensation_shift(params: &RamanParams, target: SelectionTarget) -> f64 {
    bare_block_detuning(params, target.0)
}

/// `q = r^2 (n - N0)^2 / (4 (n + 1)) + 1`.
pub fn q_factor(r: f64, n: usize, n0: usize) -> f64 {
    let k = n as f64 - n0 as f64;
    r * r * k * k / (4.0 * (n + 1) as f64) + 1.0
}

/// Interaction time for a complete flip in the resonant block, `pi / (2 G_N0)`.
pub fn pi_time(params: &RamanParams, target: SelectionTarget) -> f64 {
    FRAC_PI_2 / rabi_g_n(params, target.0)
}

/// 2x2 block of the effective Hamiltonian on `{|g,n>, |e,n+1>}`, measured
/// from the `|g,n>` energy: `[[0, G_n], [G_n, Delta_n]]`.
pub fn effective_block(params: &RamanParams, target: SelectionTarget, n: usize) -> [[f64; 2]; 2] {
    let gn = rabi_g_n(params, n);
    [[0.0, gn], [gn, detuning_delta_n(params, target, n)]]
}

fn joint_index(level: usize, n: usize, dim: usize) -> usize {
    level * dim + n
}

/// Effective two-level Hamiltonian (in units of hbar) on the `{g, e}` joint
/// space, including the compensation offset on `e`.
pub fn effective_hamiltonian(
    params: &RamanParams,
    target: SelectionTarget,
    space: TruncatedFockSpace,
) -> Result<Operator> {
    target.check_space(space)?;
    let dim = space.dim();
    let comp = compensation_shift(params, target);
    let mut h = Array2::<C64>::zeros((2 * dim, 2 * dim));
    for n in 0..dim {
        let gi = joint_index(0, n, dim);
        let ei = joint_index(1, n, dim);
        h[[gi, gi]] = C64::new(params.ground_shift(), 0.0);
        h[[ei, ei]] = C64::new(params.excited_shift_per_photon() * n as f64 - comp, 0.0);
        if n + 1 < dim {
            let partner = joint_index(1, n + 1, dim);
            let gn = C64::new(rabi_g_n(params, n), 0.0);
            h[[partner, gi]] = gn;
            h[[gi, partner]] = gn;
        }
    }
    Operator::new(space, 2, h)
}

/// Full three-level interaction-picture Hamiltonian at time `t` (units of
/// hbar), with the same compensation offset on `e` as the effective model.
pub fn full_hamiltonian(
    params: &RamanParams,
    target: SelectionTarget,
    space: TruncatedFockSpace,
    t: f64,
) -> Result<Operator> {
    target.check_space(space)?;
    let dim = space.dim();
    let comp = compensation_shift(params, target);
    let phase = C64::from_polar(1.0, -params.delta * t);
    let mut h = Array2::<C64>::zeros((3 * dim, 3 * dim));
    for n in 0..dim {
        let gi = joint_index(0, n, dim);
        let ei = joint_index(1, n, dim);
        let hi = joint_index(2, n, dim);
        h[[ei, ei]] = C64::new(-comp, 0.0);
        let drive = phase * params.omega_l;
        h[[hi, gi]] = drive;
        h[[gi, hi]] = drive.conj();
        if n + 1 < dim {
            let ej = joint_index(1, n + 1, dim);
            let cavity = phase * (params.g * ((n + 1) as f64).sqrt());
            h[[hi, ej]] = cavity;
            h[[ej, hi]] = cavity.conj();
        }
    }
    Operator::new(space, 3, h)
}

/// Eigenpair of a block `{|g,n>, |e,n+1>}`, eigenvalues measured from the
/// `|g,n>` energy. States are `[amp(g,n), amp(e,n+1)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Doublet {
    pub n: usize,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub state_plus: [C64; 2],
    pub state_minus: [C64; 2],
}

impl Doublet {
    /// `|| H v - lambda v ||` for both eigenpairs against `block`, largest of the two.
    pub fn residual(&self, block: &[[f64; 2]; 2]) -> f64 {
        let res = |lambda: f64, v: &[C64; 2]| {
            let r0 = v[0] * block[0][0] + v[1] * block[0][1] - v[0] * lambda;
            let r1 = v[0] * block[1][0] + v[1] * block[1][1] - v[1] * lambda;
            (r0.norm_sqr() + r1.norm_sqr()).sqrt()
        };
        res(self.lambda_plus, &self.state_plus).max(res(self.lambda_minus, &self.state_minus))
    }
}

/// Dressed states of block `n`:
/// `|±,n> = (G_n |g,n> + lambda_± |e,n+1>) / sqrt(lambda_±^2 + G_n^2)` with
/// `lambda_± = Delta_n / 2 ± Omega_n`.
pub fn eigendoublets(params: &RamanParams, target: SelectionTarget, n: usize) -> Doublet {
    let gn = rabi_g_n(params, n);
    let dn = detuning_delta_n(params, target, n);
    let on = omega_n(params, target, n);

    if gn == 0.0 {
        // uncoupled block: bare states
        let g_state = [C64::new(1.0, 0.0), ZERO];
        let e_state = [ZERO, C64::new(1.0, 0.0)];
        let (plus, minus) = if dn >= 0.0 {
            ((dn, e_state), (0.0, g_state))
        } else {
            ((0.0, g_state), (dn, e_state))
        };
        return Doublet {
            n,
            lambda_plus: plus.0,
            lambda_minus: minus.0,
            state_plus: plus.1,
            state_minus: minus.1,
        };
    }

    // the root of smaller magnitude comes from the product lambda+ lambda- = -G^2
    let (lambda_plus, lambda_minus) = if dn >= 0.0 {
        let lp = dn / 2.0 + on;
        (lp, -gn * gn / lp)
    } else {
        let lm = dn / 2.0 - on;
        (-gn * gn / lm, lm)
    };
    let state = |lambda: f64| {
        let norm = lambda.hypot(gn);
        [C64::new(gn / norm, 0.0), C64::new(lambda / norm, 0.0)]
    };
    Doublet {
        n,
        lambda_plus,
        lambda_minus,
        state_plus: state(lambda_plus),
        state_minus: state(lambda_minus),
    }
}

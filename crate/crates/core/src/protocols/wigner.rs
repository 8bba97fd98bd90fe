//! Wigner function from displaced photon-number parity.
//!
//! `W(-alpha) = (2/pi) sum_n (-1)^n P_n(alpha)`, where `P_n(alpha)` is the
//! photon distribution of the field after a displacement by `alpha`. The
//! reconstruction measures `P_n(alpha)` with the selective pi-pulse scan;
//! the exact values come from closed forms or Laguerre matrix elements of
//! the displacement operator, independent of the matrix exponential used
//! by [`crate::hilbert::displacement`].

use std::f64::consts::FRAC_2_PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{measure_photon_statistics_with, MeasurementMode};
use crate::error::{Error, Result};
use crate::hilbert::{FieldState, StateVector, TruncatedFockSpace, DISPLACEMENT_PADDING};
use crate::postselect::photon_distribution;
use crate::raman::RamanParams;

/// Largest photon-number mass allowed beyond the parity series cutoff.
pub const TAIL_MASS_LIMIT: f64 = 1e-6;

/// One phase-space sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerPoint {
    /// Phase-space location; the field was displaced by `-alpha`.
    pub alpha: C64,
    pub w_reconstructed: f64,
    pub w_exact: Option<f64>,
    /// Truncation used for this point.
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub points: Vec<WignerPoint>,
    /// Number of terms kept in the parity series.
    pub series_cutoff: usize,
}

impl WignerGrid {
    /// Largest `|w_reconstructed - w_exact|` over points with an exact value.
    pub fn max_abs_error(&self) -> f64 {
        self.points
            .iter()
            .filter_map(|p| p.w_exact.map(|w| (p.w_reconstructed - w).abs()))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerOptions {
    /// Truncation for the displaced field; defaults to [`default_dim`].
    pub dim: Option<usize>,
    /// Defaults to `dim - DISPLACEMENT_PADDING`.
    pub series_cutoff: Option<usize>,
    pub mode: MeasurementMode,
    pub with_exact: bool,
}

impl Default for WignerOptions {
    fn default() -> Self {
        Self {
            dim: None,
            series_cutoff: None,
            mode: MeasurementMode::Deterministic,
            with_exact: true,
        }
    }
}

/// Square grid `[-extent, extent]^2` with spacing `step`, real part outermost.
pub fn default_grid(extent: f64, step: f64) -> Vec<C64> {
    let count = (2.0 * extent / step).round() as i64;
    let axis: Vec<f64> = (0..=count).map(|i| -extent + i as f64 * step).collect();
    axis.iter()
        .flat_map(|&re| axis.iter().map(move |&im| C64::new(re, im)))
        .collect()
}

fn highest_occupied(field: &FieldState) -> usize {
    field
        .amplitudes()
        .iter()
        .rposition(|z| z.norm_sqr() > 1e-14)
        .unwrap_or(0)
}

/// Truncation for displacing a state supported up to `|k>` by up to
/// `alpha_max`: the coherent-state rule at `alpha_max + sqrt(k)/2`, plus room
/// for the series cutoff.
pub fn default_dim(alpha_max: f64, k: usize) -> usize {
    TruncatedFockSpace::required_for_amplitude(alpha_max + 0.5 * (k as f64).sqrt()) + DISPLACEMENT_PADDING
}

pub fn reconstruct_wigner(field: &FieldState, params: &RamanParams, grid: &[C64]) -> Result<WignerGrid> {
    reconstruct_wigner_with(field, params, grid, &WignerOptions::default())
}

/// Reconstructs `W` at every grid point through the selective measurement.
/// Points are evaluated in parallel and returned in grid order.
pub fn reconstruct_wigner_with(
    field: &FieldState,
    params: &RamanParams,
    grid: &[C64],
    options: &WignerOptions,
) -> Result<WignerGrid> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty phase-space grid".into()));
    }
    let alpha_max = grid.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let dim = options
        .dim
        .unwrap_or_else(|| default_dim(alpha_max, highest_occupied(field)))
        .max(field.space().dim());
    let space = TruncatedFockSpace::new(dim)?;
    let field = field.resized(space)?;
    let cutoff = options
        .series_cutoff
        .unwrap_or(dim.saturating_sub(DISPLACEMENT_PADDING));
    if cutoff == 0 || cutoff + 1 > dim {
        return Err(Error::InvalidParameter(format!(
            "series cutoff {cutoff} must lie in 1..{dim}"
        )));
    }
    let descriptor = StateDescriptor::Amplitudes(field.amplitudes().to_vec());

    let points = grid
        .par_iter()
        .enumerate()
        .map(|(index, &alpha)| {
            let displaced = field.displaced(-alpha)?;
            let distribution = photon_distribution(&displaced);
            let tail: f64 = distribution[cutoff..].iter().sum();
            if tail > TAIL_MASS_LIMIT {
                return Err(Error::SeriesCutoff { cutoff, tail });
            }
            let mode = options.mode.for_item(index as u64);
            let stats = measure_photon_statistics_with(&displaced, params, cutoff - 1, &mode)?;
            let w_reconstructed = FRAC_2_PI * parity_sum(&stats);
            let w_exact = options.with_exact.then(|| exact_wigner(&descriptor, alpha));
            Ok(WignerPoint {
                alpha,
                w_reconstructed,
                w_exact,
                dim,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WignerGrid {
        points,
        series_cutoff: cutoff,
    })
}

fn parity_sum(p: &[f64]) -> f64 {
    p.iter()
        .enumerate()
        .map(|(n, x)| if n % 2 == 0 { *x } else { -*x })
        .sum()
}

/// State whose exact Wigner function is requested.
#[derive(Debug, Clone, PartialEq)]
pub enum StateDescriptor {
    Fock(usize),
    Coherent(C64),
    /// Fock-basis amplitudes (normalized by the caller).
    Amplitudes(Vec<C64>),
}

/// Generalized Laguerre polynomial `L_n^(a)(x)` by upward recurrence.
fn laguerre(n: usize, a: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `<m|D(alpha)|n>` from the Laguerre closed form.
pub fn displaced_fock_element(m: usize, n: usize, alpha: C64) -> C64 {
    if alpha.norm_sqr() == 0.0 {
        return if m == n { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
    }
    let x = alpha.norm_sqr();
    let (lo, hi, base) = if m >= n { (n, m, alpha) } else { (m, n, -alpha.conj()) };
    let k = hi - lo;
    let log_mag = 0.5 * (ln_factorial(lo) - ln_factorial(hi)) + k as f64 * base.norm().ln() - x / 2.0;
    let phase = C64::from_polar(1.0, k as f64 * base.arg());
    phase * (log_mag.exp() * laguerre(lo, k as f64, x))
}

/// Exact Wigner function at phase-space point `alpha`.
pub fn exact_wigner(state: &StateDescriptor, alpha: C64) -> f64 {
    match state {
        StateDescriptor::Fock(n) => {
            let x = alpha.norm_sqr();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            FRAC_2_PI * sign * (-2.0 * x).exp() * laguerre(*n, 0.0, 4.0 * x)
        }
        StateDescriptor::Coherent(center) => FRAC_2_PI * (-2.0 * (alpha - center).norm_sqr()).exp(),
        StateDescriptor::Amplitudes(amps) => {
            let support: Vec<(usize, C64)> = amps
                .iter()
                .copied()
                .enumerate()
                .filter(|(_, c)| c.norm_sqr() > 1e-30)
                .collect();
            let top = support.last().map(|(n, _)| *n).unwrap_or(0);
            let reach = alpha.norm() + ((top + 1) as f64).sqrt();
            let rows = (reach * reach + 12.0 * reach).ceil() as usize + top + 10;
            let shift = -alpha;
            let parity: f64 = (0..rows)
                .map(|m| {
                    let amp: C64 = support
                        .iter()
                        .map(|&(n, c)| displaced_fock_element(m, n, shift) * c)
                        .sum();
                    if m % 2 == 0 {
                        amp.norm_sqr()
                    } else {
                        -amp.norm_sqr()
                    }
                })
                .sum();
            FRAC_2_PI * parity
        }
    }
}

//! Truncated Fock space: field states, atom-field joint states and dense
//! operators on a single bosonic mode.
//!
//! Joint atom-field amplitudes are stored level-major: the amplitude of
//! `|level, n>` sits at `level.index() * dim + n`.

use ndarray::{s, Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, ONE, ZERO};

/// Extra Fock levels added before exponentiating a displacement generator.
pub const DISPLACEMENT_PADDING: usize = 8;

/// Tolerance on the norm of constructed states.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Largest norm loss accepted when a displacement pushes weight off the top of the basis.
pub const NORM_LEAK_TOLERANCE: f64 = 1e-8;

/// Bosonic mode basis `|0>, ..., |dim - 1>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruncatedFockSpace {
    dim: usize,
}

impl TruncatedFockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "Fock space dimension must be at least 2, got {dim}"
            )));
        }
        Ok(Self { dim })
    }

    /// Default truncation for a run whose largest displacement (or coherent
    /// amplitude) is `alpha_max` and whose highest selected photon number is `n0`:
    /// `ceil(|a|^2 + 6|a|) + n0 + 10`.
    pub fn for_run(alpha_max: f64, n0: usize) -> Self {
        let a = alpha_max.abs();
        let dim = (a * a + 6.0 * a).ceil() as usize + n0 + 10;
        Self { dim: dim.max(2) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Smallest dimension that keeps a coherent state (or a displacement) of
    /// magnitude `alpha` faithfully: `dim > |a|^2 + 6|a| + 6`.
    pub fn required_for_amplitude(alpha: f64) -> usize {
        let a = alpha.abs();
        (a * a + 6.0 * a + 6.0).floor() as usize + 1
    }

    fn check_amplitude(&self, alpha: C64, context: &str) -> Result<()> {
        let required = Self::required_for_amplitude(alpha.norm());
        if self.dim < required {
            return Err(Error::Truncation {
                dim: self.dim,
                required,
                context: format!("{context} with |alpha| = {:.4}", alpha.norm()),
            });
        }
        Ok(())
    }
}

/// Internal atomic level of the three-level atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomLevel {
    /// Lower level driven by the classical field.
    G,
    /// Lower level coupled to the cavity mode.
    E,
    /// Far-detuned upper level, only present in the full model.
    H,
}

impl AtomLevel {
    pub fn index(self) -> usize {
        match self {
            AtomLevel::G => 0,
            AtomLevel::E => 1,
            AtomLevel::H => 2,
        }
    }

    pub fn label(self) -> char {
        match self {
            AtomLevel::G => 'g',
            AtomLevel::E => 'e',
            AtomLevel::H => 'h',
        }
    }
}

/// Anything with a flat amplitude vector over a Fock-space basis.
pub trait StateVector {
    fn space(&self) -> TruncatedFockSpace;
    fn amplitudes(&self) -> &Array1<C64>;
    /// Shape tag compared by [`inner`]: 1 for a bare field, 2 or 3 for joint states.
    fn levels(&self) -> usize;

    fn norm(&self) -> f64 {
        linalg::vector_norm(self.amplitudes().view())
    }
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner<S: StateVector>(a: &S, b: &S) -> Result<C64> {
    if a.space() != b.space() || a.levels() != b.levels() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} levels x dim {}", a.levels(), a.space().dim()),
            found: format!("{} levels x dim {}", b.levels(), b.space().dim()),
        });
    }
    Ok(a
        .amplitudes()
        .iter()
        .zip(b.amplitudes().iter())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

fn normalized(amplitudes: Array1<C64>) -> Result<Array1<C64>> {
    let norm = linalg::vector_norm(amplitudes.view());
    if !norm.is_finite() || norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(amplitudes.mapv(|z| z / norm))
}

/// Normalized pure state of the cavity mode, `sum_n c_n |n>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    space: TruncatedFockSpace,
    amplitudes: Array1<C64>,
}

impl StateVector for FieldState {
    fn space(&self) -> TruncatedFockSpace {
        self.space
    }
    fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }
    fn levels(&self) -> usize {
        1
    }
}

impl FieldState {
    /// Builds a state from arbitrary amplitudes, normalizing them.
    pub fn new(space: TruncatedFockSpace, amplitudes: Array1<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} amplitudes", space.dim()),
                found: format!("{} amplitudes", amplitudes.len()),
            });
        }
        Ok(Self {
            space,
            amplitudes: normalized(amplitudes)?,
        })
    }

    pub fn amplitude(&self, n: usize) -> C64 {
        self.amplitudes.get(n).copied().unwrap_or(ZERO)
    }

    /// Applies `D(alpha)` and renormalizes; fails if more than
    /// [`NORM_LEAK_TOLERANCE`] of the norm leaves the retained basis.
    pub fn displaced(&self, alpha: C64) -> Result<FieldState> {
        self.space.check_amplitude(alpha, "displacement")?;
        let raw = displace_vector(&self.amplitudes, alpha);
        let norm_sqr = raw.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let leak = (1.0 - norm_sqr).abs();
        if leak > NORM_LEAK_TOLERANCE {
            return Err(Error::Truncation {
                dim: self.space.dim(),
                required: self.space.dim() + 1,
                context: format!(
                    "displacement by |alpha| = {:.4} leaks norm {leak:.3e}",
                    alpha.norm()
                ),
            });
        }
        FieldState::new(self.space, raw)
    }

    /// Same amplitudes in a space with a different truncation. Growing pads
    /// with zeros; shrinking fails unless the dropped amplitudes are negligible.
    pub fn resized(&self, space: TruncatedFockSpace) -> Result<FieldState> {
        let dim = space.dim();
        let dropped: f64 = self
            .amplitudes
            .iter()
            .skip(dim)
            .map(|z| z.norm_sqr())
            .sum();
        if dropped > NORM_TOLERANCE {
            return Err(Error::Truncation {
                dim,
                required: self.space.dim(),
                context: format!("resizing drops weight {dropped:.3e}"),
            });
        }
        let mut amps = Array1::<C64>::zeros(dim);
        let keep = dim.min(self.space.dim());
        amps.slice_mut(s![..keep])
            .assign(&self.amplitudes.slice(s![..keep]));
        FieldState::new(space, amps)
    }
}

/// Fock state `|n>`.
pub fn fock_state(space: TruncatedFockSpace, n: usize) -> Result<FieldState> {
    if n >= space.dim() {
        return Err(Error::OutOfRange { n, dim: space.dim() });
    }
    let mut amps = Array1::<C64>::zeros(space.dim());
    amps[n] = ONE;
    Ok(FieldState {
        space,
        amplitudes: amps,
    })
}

/// Coherent state `|alpha>`, renormalized after truncation.
pub fn coherent_state(space: TruncatedFockSpace, alpha: C64) -> Result<FieldState> {
    space.check_amplitude(alpha, "coherent state")?;
    let mut amps = Array1::<C64>::zeros(space.dim());
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    amps[0] = c;
    for n in 1..space.dim() {
        c = c * alpha / (n as f64).sqrt();
        amps[n] = c;
    }
    let raw = amps.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if (1.0 - raw).abs() > NORM_TOLERANCE {
        return Err(Error::Truncation {
            dim: space.dim(),
            required: space.dim() + 1,
            context: format!("coherent tail mass {:.3e}", 1.0 - raw),
        });
    }
    FieldState::new(space, amps)
}

/// Amplitudes of the atom-field system, with 2 levels `{g, e}` (effective
/// model) or 3 levels `{g, e, h}` (full model).
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    space: TruncatedFockSpace,
    levels: usize,
    amplitudes: Array1<C64>,
}

impl StateVector for JointState {
    fn space(&self) -> TruncatedFockSpace {
        self.space
    }
    fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }
    fn levels(&self) -> usize {
        self.levels
    }
}

fn check_levels(levels: usize) -> Result<()> {
    if levels == 2 || levels == 3 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "joint states have 2 or 3 atomic levels, got {levels}"
        )))
    }
}

impl JointState {
    /// Builds a joint state from level-major amplitudes, normalizing them.
    pub fn new(space: TruncatedFockSpace, levels: usize, amplitudes: Array1<C64>) -> Result<Self> {
        check_levels(levels)?;
        if amplitudes.len() != levels * space.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} amplitudes", levels * space.dim()),
                found: format!("{} amplitudes", amplitudes.len()),
            });
        }
        Ok(Self {
            space,
            levels,
            amplitudes: normalized(amplitudes)?,
        })
    }

    /// Wraps amplitudes produced by a unitary map without renormalizing.
    pub(crate) fn from_unitary_image(
        space: TruncatedFockSpace,
        levels: usize,
        amplitudes: Array1<C64>,
    ) -> Self {
        debug_assert_eq!(amplitudes.len(), levels * space.dim());
        Self {
            space,
            levels,
            amplitudes,
        }
    }

    /// `|level> ⊗ field`.
    pub fn product(level: AtomLevel, field: &FieldState, levels: usize) -> Result<Self> {
        check_levels(levels)?;
        if level.index() >= levels {
            return Err(Error::InvalidParameter(format!(
                "level {} is not part of a {levels}-level atom",
                level.label()
            )));
        }
        let dim = field.space.dim();
        let mut amps = Array1::<C64>::zeros(levels * dim);
        let offset = level.index() * dim;
        amps.slice_mut(s![offset..offset + dim])
            .assign(&field.amplitudes);
        Ok(Self {
            space: field.space,
            levels,
            amplitudes: amps,
        })
    }

    pub fn has_level(&self, level: AtomLevel) -> bool {
        level.index() < self.levels
    }

    pub fn amplitude(&self, level: AtomLevel, n: usize) -> C64 {
        if !self.has_level(level) || n >= self.space.dim() {
            return ZERO;
        }
        self.amplitudes[level.index() * self.space.dim() + n]
    }

    /// Field amplitudes attached to one atomic level (unnormalized).
    pub fn level_amplitudes(&self, level: AtomLevel) -> Result<Array1<C64>> {
        if !self.has_level(level) {
            return Err(Error::InvalidParameter(format!(
                "level {} is not part of a {}-level joint state",
                level.label(),
                self.levels
            )));
        }
        let dim = self.space.dim();
        let offset = level.index() * dim;
        Ok(self.amplitudes.slice(s![offset..offset + dim]).to_owned())
    }

    pub fn level_population(&self, level: AtomLevel) -> f64 {
        self.level_amplitudes(level)
            .map(|a| a.iter().map(|z| z.norm_sqr()).sum())
            .unwrap_or(0.0)
    }

    /// Embeds a `{g, e}` state into the three-level space with zero `h` amplitude.
    pub fn to_three_level(&self) -> JointState {
        if self.levels == 3 {
            return self.clone();
        }
        let dim = self.space.dim();
        let mut amps = Array1::<C64>::zeros(3 * dim);
        amps.slice_mut(s![..2 * dim]).assign(&self.amplitudes);
        JointState {
            space: self.space,
            levels: 3,
            amplitudes: amps,
        }
    }
}

/// Dense operator on either the bare mode (`levels == 1`) or a joint
/// atom-field space with level-major ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: TruncatedFockSpace,
    levels: usize,
    matrix: Array2<C64>,
}

impl Operator {
    pub fn new(space: TruncatedFockSpace, levels: usize, matrix: Array2<C64>) -> Result<Self> {
        let n = levels * space.dim();
        if matrix.dim() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: format!("{n}x{n} matrix"),
                found: format!("{}x{} matrix", matrix.nrows(), matrix.ncols()),
            });
        }
        Ok(Self {
            space,
            levels,
            matrix,
        })
    }

    pub fn space(&self) -> TruncatedFockSpace {
        self.space
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn element(&self, row: usize, col: usize) -> C64 {
        self.matrix[[row, col]]
    }

    pub fn dagger(&self) -> Operator {
        Operator {
            space: self.space,
            levels: self.levels,
            matrix: linalg::dagger(&self.matrix),
        }
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        if self.space != other.space || self.levels != other.levels {
            return Err(Error::DimensionMismatch {
                expected: format!("{} levels x dim {}", self.levels, self.space.dim()),
                found: format!("{} levels x dim {}", other.levels, other.space.dim()),
            });
        }
        Ok(Operator {
            space: self.space,
            levels: self.levels,
            matrix: self.matrix.dot(&other.matrix),
        })
    }

    /// Raw matrix-vector product (no renormalization).
    pub fn apply_to(&self, amplitudes: &Array1<C64>) -> Result<Array1<C64>> {
        if amplitudes.len() != self.matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} amplitudes", self.matrix.ncols()),
                found: format!("{} amplitudes", amplitudes.len()),
            });
        }
        Ok(self.matrix.dot(amplitudes))
    }

    pub fn hermiticity_error(&self) -> f64 {
        linalg::hermiticity_error(&self.matrix)
    }
}

fn ladder_matrix(dim: usize) -> Array2<C64> {
    let mut a = Array2::<C64>::zeros((dim, dim));
    for n in 1..dim {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Annihilation operator: `<n-1|a|n> = sqrt(n)`.
pub fn annihilation(space: TruncatedFockSpace) -> Operator {
    Operator {
        space,
        levels: 1,
        matrix: ladder_matrix(space.dim()),
    }
}

/// Creation operator; the transition out of the top level is dropped.
pub fn creation(space: TruncatedFockSpace) -> Operator {
    annihilation(space).dagger()
}

/// `D(alpha) v` on the padded space, cut back to `v.len()`. The generator is
/// applied directly in substeps of norm at most 1, each summed as a Taylor
/// series to machine precision.
fn displace_vector(v: &Array1<C64>, alpha: C64) -> Array1<C64> {
    let dim = v.len();
    if alpha == ZERO {
        return v.clone();
    }
    let padded = dim + DISPLACEMENT_PADDING;
    let roots: Vec<f64> = (0..=padded).map(|n| (n as f64).sqrt()).collect();
    let substeps = (2.0 * alpha.norm() * roots[padded]).ceil().max(1.0) as usize;
    let h = alpha / substeps as f64;
    let hc = h.conj();
    let apply = |x: &[C64], out: &mut [C64]| {
        for m in 0..padded {
            let mut acc = ZERO;
            if m > 0 {
                acc += h * roots[m] * x[m - 1];
            }
            if m + 1 < padded {
                acc -= hc * roots[m + 1] * x[m + 1];
            }
            out[m] = acc;
        }
    };
    let mut state = vec![ZERO; padded];
    state[..dim].copy_from_slice(v.as_slice().expect("contiguous amplitudes"));
    let mut term = vec![ZERO; padded];
    let mut next = vec![ZERO; padded];
    for _ in 0..substeps {
        term.copy_from_slice(&state);
        for k in 1..=40 {
            apply(&term, &mut next);
            let scale = 1.0 / k as f64;
            let mut size = 0.0f64;
            for (t, n) in term.iter_mut().zip(&next) {
                *t = n * scale;
                size = size.max(t.norm());
            }
            for (s, t) in state.iter_mut().zip(&term) {
                *s += t;
            }
            if size < 1e-17 {
                break;
            }
        }
    }
    Array1::from(state[..dim].to_vec())
}

/// Displacement `D(alpha) = exp(alpha a† - alpha* a)`, exponentiated on a
/// space padded by [`DISPLACEMENT_PADDING`] levels and cut back to `dim`.
pub fn displacement(space: TruncatedFockSpace, alpha: C64) -> Result<Operator> {
    space.check_amplitude(alpha, "displacement")?;
    let dim = space.dim();
    if alpha == ZERO {
        return Ok(Operator {
            space,
            levels: 1,
            matrix: Array2::eye(dim),
        });
    }
    let a = ladder_matrix(dim + DISPLACEMENT_PADDING);
    let generator = linalg::dagger(&a) * alpha - a * alpha.conj();
    let full = linalg::expm(&generator);
    Ok(Operator {
        space,
        levels: 1,
        matrix: full.slice(s![..dim, ..dim]).to_owned(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson(mean: f64, n: usize) -> f64 {
        let mut p = (-mean).exp();
        for k in 1..=n {
            p *= mean / k as f64;
        }
        p
    }

    #[test]
    fn vector_displacement_matches_operator() {
        let space = TruncatedFockSpace::new(40).unwrap();
        let amps = Array1::from_iter((0..40).map(|n| if n < 6 { C64::new(1.0 / (n + 1) as f64, 0.3 * n as f64) } else { ZERO }));
        let field = FieldState::new(space, amps).unwrap();
        let alpha = C64::new(0.9, -1.3);
        let dense = displacement(space, alpha).unwrap().apply_to(field.amplitudes()).unwrap();
        let fast = displace_vector(field.amplitudes(), alpha);
        assert!(linalg::max_abs_diff(&dense, &fast) < 1e-12);
    }

    #[test]
    fn space_rejects_trivial_dimension() {
        assert!(TruncatedFockSpace::new(1).is_err());
        assert!(TruncatedFockSpace::new(2).is_ok());
    }

    #[test]
    fn truncation_rule_matches_formula() {
        // |a|^2 = 5: ceil(5 + 6*2.2360679...) = ceil(18.416) = 19
        assert_eq!(TruncatedFockSpace::for_run(5f64.sqrt(), 5).dim(), 19 + 5 + 10);
        assert_eq!(TruncatedFockSpace::for_run(0.0, 0).dim(), 10);
    }

    #[test]
    fn fock_basis_vectors() {
        let space = TruncatedFockSpace::new(10).unwrap();
        let vac = fock_state(space, 0).unwrap();
        assert_eq!(vac.amplitude(0), ONE);
        assert!(vac.amplitudes().iter().skip(1).all(|z| *z == ZERO));
        let six = fock_state(space, 6).unwrap();
        assert_eq!(six.amplitude(6), ONE);
        assert_eq!(six.amplitudes().iter().filter(|z| **z != ZERO).count(), 1);
    }

    #[test]
    fn fock_out_of_range() {
        let space = TruncatedFockSpace::new(5).unwrap();
        assert_eq!(fock_state(space, 7), Err(Error::OutOfRange { n: 7, dim: 5 }));
    }

    #[test]
    fn coherent_vacuum_limit() {
        let space = TruncatedFockSpace::new(10).unwrap();
        let c = coherent_state(space, ZERO).unwrap();
        assert_eq!(c, fock_state(space, 0).unwrap());
    }

    #[test]
    fn coherent_poisson_weight_and_norm() {
        let space = TruncatedFockSpace::new(40).unwrap();
        let c = coherent_state(space, C64::new(5f64.sqrt(), 0.0)).unwrap();
        let expected = poisson(5.0, 5);
        assert!((expected - 0.175_467_369_767_850_7).abs() < 1e-12);
        assert!((c.amplitude(5).norm_sqr() - expected).abs() < 1e-12);
        assert!((c.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn coherent_requires_adequate_truncation() {
        let space = TruncatedFockSpace::new(12).unwrap();
        let err = coherent_state(space, C64::new(2.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Truncation { required: 23, .. }));
    }

    #[test]
    fn ladder_elements() {
        let space = TruncatedFockSpace::new(10).unwrap();
        let a = annihilation(space);
        assert_eq!(a.element(0, 1), ONE);
        assert!((a.element(5, 6).re - 6f64.sqrt()).abs() < 1e-15);
        let vac = fock_state(space, 0).unwrap();
        let out = a.apply_to(vac.amplitudes()).unwrap();
        assert!(out.iter().all(|z| *z == ZERO));
        // top-edge creation is kept from dim-2 to dim-1 only
        let ad = creation(space);
        assert!((ad.element(9, 8).re - 3.0).abs() < 1e-15);
    }

    #[test]
    fn number_operator_is_diagonal() {
        let space = TruncatedFockSpace::new(12).unwrap();
        let n_op = creation(space).compose(&annihilation(space)).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                let expected = if i == j { i as f64 } else { 0.0 };
                assert!((n_op.element(i, j) - C64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn displacement_of_zero_is_identity() {
        let space = TruncatedFockSpace::new(10).unwrap();
        let d = displacement(space, ZERO).unwrap();
        assert_eq!(d.matrix(), &Array2::<C64>::eye(10));
    }

    #[test]
    fn displaced_vacuum_is_coherent() {
        let space = TruncatedFockSpace::new(40).unwrap();
        let alpha = C64::new(1.3, -0.7);
        let d = displacement(space, alpha).unwrap();
        let vac = fock_state(space, 0).unwrap();
        let moved = d.apply_to(vac.amplitudes()).unwrap();
        let coh = coherent_state(space, alpha).unwrap();
        let diff = linalg::vector_norm((&moved - coh.amplitudes()).view());
        assert!(diff < 1e-8, "diff {diff}");
    }

    #[test]
    fn displacement_needs_room() {
        let space = TruncatedFockSpace::new(20).unwrap();
        assert!(matches!(
            displacement(space, C64::new(3.0, 0.0)),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn coherent_overlap_with_vacuum() {
        let space = TruncatedFockSpace::new(40).unwrap();
        let alpha = C64::new(1.1, 0.9);
        let coh = coherent_state(space, alpha).unwrap();
        let vac = fock_state(space, 0).unwrap();
        let ov = inner(&coh, &vac).unwrap();
        assert!((ov - C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn inner_of_basis_states() {
        let space = TruncatedFockSpace::new(8).unwrap();
        let a = fock_state(space, 3).unwrap();
        let b = fock_state(space, 4).unwrap();
        assert_eq!(inner(&a, &a).unwrap(), ONE);
        assert_eq!(inner(&a, &b).unwrap(), ZERO);
        let other = fock_state(TruncatedFockSpace::new(9).unwrap(), 3).unwrap();
        assert!(matches!(inner(&a, &other), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_argument() {
        let space = TruncatedFockSpace::new(4).unwrap();
        let a = FieldState::new(space, Array1::from(vec![C64::new(0.0, 1.0), ONE, ZERO, ZERO])).unwrap();
        let b = fock_state(space, 0).unwrap();
        let ov = inner(&a, &b).unwrap();
        assert!((ov - C64::new(0.0, -1.0 / 2f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn joint_state_layout() {
        let space = TruncatedFockSpace::new(8).unwrap();
        let field = fock_state(space, 7).unwrap();
        let joint = JointState::product(AtomLevel::E, &field, 2).unwrap();
        assert_eq!(joint.amplitude(AtomLevel::E, 7), ONE);
        assert_eq!(joint.amplitudes()[8 + 7], ONE);
        assert!(JointState::product(AtomLevel::H, &field, 2).is_err());
        let three = joint.to_three_level();
        assert_eq!(three.amplitude(AtomLevel::E, 7), ONE);
        assert_eq!(three.level_population(AtomLevel::H), 0.0);
    }

    #[test]
    fn zero_vector_is_rejected() {
        let space = TruncatedFockSpace::new(4).unwrap();
        assert_eq!(FieldState::new(space, Array1::zeros(4)), Err(Error::ZeroNorm));
    }
}

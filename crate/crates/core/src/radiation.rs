//! Radiated coherent-state amplitudes of a branch-difference history.
//!
//! For a dipole history `d(t)` the Larmor spectrum in Planck-Gaussian units is
//! `dE/domega = (2 / 3 pi) |F[d''](omega)|^2` with `F[f](omega) = int f(t)
//! e^{i omega t} dt`; for the principal quadrupole component `Q(t)` of an
//! axisymmetric traceless tensor it is `(2 / 15 pi) |F[Q'''](omega)|^2`.
//! The number spectrum is `dE/domega / omega`. On a basis with quadrature
//! weights `w_i` the mode amplitudes are
//!
//! ```text
//! alpha_i = sqrt(c * w_i / omega_i) * F[h^(k)](omega_i)
//! ```
//!
//! so that `sum |alpha_i|^2` approximates the expected number of emitted
//! quanta. The transform is taken in the distributional sense: jumps of lower
//! derivatives at ramp endpoints contribute `J (-i omega)^m e^{i omega b}`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::quadrature::gauss_legendre_unit;
use crate::scenario::{FieldKind, Scenario};
use crate::worldline::{build_branch_difference, MultipoleHistory, MultipoleOrder, DEFAULT_SAMPLES_PER_RAMP};
use crate::{Error, Result};

/// The basis must reach at least this many inverse ramp durations.
pub const MIN_CUTOFF_RAMP_UNITS: f64 = 8.0;
/// Grid Nyquist frequency must exceed the basis cutoff by this factor.
pub const NYQUIST_MARGIN: f64 = 8.0;
pub const DIPOLE_COEFFICIENT: f64 = 2.0 / (3.0 * PI);
pub const QUADRUPOLE_COEFFICIENT: f64 = 2.0 / (15.0 * PI);

const NODES_PER_PANEL: usize = 8;
const RESYNC_PANELS: usize = 128;

/// Frequency truncation, resolution and normalization knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralSettings {
    pub modes: usize,
    /// `omega_min = omega_min_factor / T_A`.
    pub omega_min_factor: f64,
    /// `omega_max = omega_max_factor / T_A`.
    pub omega_max_factor: f64,
    pub samples_per_ramp: usize,
    pub dipole_coefficient: f64,
    pub quadrupole_coefficient: f64,
}

impl Default for SpectralSettings {
    fn default() -> Self {
        SpectralSettings {
            modes: 1024,
            omega_min_factor: 1e-3,
            omega_max_factor: 64.0,
            samples_per_ramp: DEFAULT_SAMPLES_PER_RAMP,
            dipole_coefficient: DIPOLE_COEFFICIENT,
            quadrupole_coefficient: QUADRUPOLE_COEFFICIENT,
        }
    }
}

impl SpectralSettings {
    pub fn coefficient(&self, kind: FieldKind) -> f64 {
        match kind {
            FieldKind::Electromagnetic => self.dipole_coefficient,
            FieldKind::Gravitational => self.quadrupole_coefficient,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes < 2 {
            return Err(Error::InvalidBasis(format!("need at least 2 modes, got {}", self.modes)));
        }
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.omega_min_factor) || !ok(self.omega_max_factor) || self.omega_min_factor >= self.omega_max_factor {
            return Err(Error::InvalidBasis(format!(
                "need 0 < omega_min_factor < omega_max_factor, got {} and {}",
                self.omega_min_factor, self.omega_max_factor
            )));
        }
        if !ok(self.dipole_coefficient) || !ok(self.quadrupole_coefficient) {
            return Err(Error::InvalidBasis("normalization coefficients must be positive".into()));
        }
        Ok(())
    }
}

/// Truncated positive-frequency mode basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBasis {
    kind: FieldKind,
    frequencies: Vec<f64>,
    weights: Vec<f64>,
}

impl ModeBasis {
    pub fn new(kind: FieldKind, frequencies: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if frequencies.is_empty() || frequencies.len() != weights.len() {
            return Err(Error::InvalidBasis(format!(
                "{} frequencies vs {} weights",
                frequencies.len(),
                weights.len()
            )));
        }
        if frequencies.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidBasis("frequencies must be finite and positive".into()));
        }
        if frequencies.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidBasis("frequencies must be strictly increasing".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidBasis("weights must be finite and positive".into()));
        }
        Ok(ModeBasis {
            kind,
            frequencies,
            weights,
        })
    }

    /// Log-spaced frequencies with trapezoidal weights in `ln omega`.
    pub fn log_spaced(kind: FieldKind, omega_min: f64, omega_max: f64, count: usize) -> Result<Self> {
        if count < 2 || !(omega_min > 0.0 && omega_max > omega_min && omega_max.is_finite()) {
            return Err(Error::InvalidBasis(format!(
                "log basis needs count >= 2 and 0 < omega_min < omega_max, got {count}, {omega_min}, {omega_max}"
            )));
        }
        let (lo, hi) = (libm::log(omega_min), libm::log(omega_max));
        let step = (hi - lo) / (count - 1) as f64;
        let frequencies: Vec<f64> = (0..count)
            .map(|i| match i {
                0 => omega_min,
                i if i == count - 1 => omega_max,
                i => libm::exp(lo + step * i as f64),
            })
            .collect();
        let weights = frequencies
            .iter()
            .enumerate()
            .map(|(i, w)| if i == 0 || i == count - 1 { 0.5 * w * step } else { w * step })
            .collect();
        ModeBasis::new(kind, frequencies, weights)
    }

    /// Default basis for a ramp of duration `t_ramp`.
    pub fn for_ramp(kind: FieldKind, t_ramp: f64, settings: &SpectralSettings) -> Result<Self> {
        settings.validate()?;
        ModeBasis::log_spaced(
            kind,
            settings.omega_min_factor / t_ramp,
            settings.omega_max_factor / t_ramp,
            settings.modes,
        )
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn omega_max(&self) -> f64 {
        self.frequencies[self.frequencies.len() - 1]
    }
}

/// Coherent-state labels of the radiation field on a [`ModeBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudes {
    basis: ModeBasis,
    alpha: Vec<Complex64>,
}

impl ModeAmplitudes {
    pub fn new(basis: ModeBasis, alpha: Vec<Complex64>) -> Result<Self> {
        if alpha.len() != basis.len() {
            return Err(Error::ModeMismatch {
                left: basis.len(),
                right: alpha.len(),
            });
        }
        if alpha.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::NonFinite("mode amplitudes"));
        }
        Ok(ModeAmplitudes { basis, alpha })
    }

    pub fn vacuum(basis: ModeBasis) -> Self {
        let n = basis.len();
        ModeAmplitudes {
            basis,
            alpha: alloc::vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn alpha(&self) -> &[Complex64] {
        &self.alpha
    }

    pub fn scaled(&self, k: f64) -> ModeAmplitudes {
        ModeAmplitudes {
            basis: self.basis.clone(),
            alpha: self.alpha.iter().map(|a| a * k).collect(),
        }
    }

    /// Rows `(omega, |alpha|^2, dE/domega)` for export.
    pub fn spectrum(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.basis
            .frequencies
            .iter()
            .zip(&self.basis.weights)
            .zip(&self.alpha)
            .map(|((&w, &wt), a)| {
                let n = a.norm_sqr();
                (w, n, w * n / wt)
            })
    }
}

/// Expected number of quanta, `sum |alpha_i|^2`.
pub fn photon_number(a: &ModeAmplitudes) -> f64 {
    a.alpha.iter().map(|z| z.norm_sqr()).sum()
}

/// Radiated energy, `sum omega_i |alpha_i|^2`.
pub fn radiated_energy(a: &ModeAmplitudes) -> f64 {
    a.alpha
        .iter()
        .zip(&a.basis.frequencies)
        .map(|(z, w)| w * z.norm_sqr())
        .sum()
}

/// Precomputed Gauss-Legendre sampling of the radiating derivative.
struct SourceQuadrature {
    order: usize,
    offsets: Vec<f64>,
    panels: Vec<PanelRun>,
    jumps: Vec<(usize, f64, f64)>,
}

struct PanelRun {
    start: f64,
    width: f64,
    /// `NODES_PER_PANEL` weighted values per panel.
    values: Vec<f64>,
}

impl SourceQuadrature {
    fn new(h: &MultipoleHistory) -> Self {
        let order = h.order().radiating_derivative();
        let (nodes, weights) = gauss_legendre_unit(NODES_PER_PANEL);
        let mut panels = Vec::new();
        for seg in h.segments().iter().filter(|s| s.window.is_some() && s.from != s.to) {
            let count = libm::ceil(seg.duration / h.dt() - 1e-9).max(1.0) as usize;
            let width = seg.duration / count as f64;
            let mut values = Vec::with_capacity(count * NODES_PER_PANEL);
            for p in 0..count {
                for (x, w) in nodes.iter().zip(&weights) {
                    let u = (p as f64 + x) / count as f64;
                    values.push(w * width * seg.derivative_at_unit(order, u));
                }
            }
            panels.push(PanelRun {
                start: seg.start,
                width,
                values,
            });
        }
        let mut jumps = Vec::new();
        for j in 0..order {
            for (at, jump) in h.jumps(j) {
                jumps.push((order - 1 - j, at, jump));
            }
        }
        SourceQuadrature {
            order,
            offsets: nodes,
            panels,
            jumps,
        }
    }

    fn transform(&self, omega: f64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for run in &self.panels {
            let node_phase: Vec<Complex64> = self
                .offsets
                .iter()
                .map(|x| Complex64::from_polar(1.0, omega * x * run.width))
                .collect();
            let step = Complex64::from_polar(1.0, omega * run.width);
            let mut phase = Complex64::new(0.0, 0.0);
            for (p, vals) in run.values.chunks_exact(NODES_PER_PANEL).enumerate() {
                if p % RESYNC_PANELS == 0 {
                    phase = Complex64::from_polar(1.0, omega * (run.start + p as f64 * run.width));
                }
                let mut inner = Complex64::new(0.0, 0.0);
                for (v, e) in vals.iter().zip(&node_phase) {
                    inner += e * *v;
                }
                total += phase * inner;
                phase *= step;
            }
        }
        let minus_i_omega = Complex64::new(0.0, -omega);
        for &(power, at, jump) in &self.jumps {
            total += minus_i_omega.powu(power as u32) * Complex64::from_polar(jump, omega * at);
        }
        total
    }
}

/// `F[h^(k)](omega)` with `k` the radiating derivative order of `h`.
pub fn source_transform(h: &MultipoleHistory, omega: f64) -> Complex64 {
    SourceQuadrature::new(h).transform(omega)
}

/// Radiating derivative order used for `h`.
pub fn radiating_order(h: &MultipoleHistory) -> usize {
    SourceQuadrature::new(h).order
}

pub fn spectral_amplitudes(h: &MultipoleHistory, basis: &ModeBasis, coefficient: f64) -> Result<ModeAmplitudes> {
    let expected = MultipoleOrder::for_field(basis.kind());
    if h.order() != expected {
        return Err(Error::InvalidBasis(format!(
            "{:?} history on a {} basis",
            h.order(),
            basis.kind().as_str()
        )));
    }
    let required = MIN_CUTOFF_RAMP_UNITS / h.ramp_duration();
    if basis.omega_max() < required * (1.0 - 1e-12) {
        return Err(Error::BasisTooNarrow {
            omega_max: basis.omega_max(),
            required,
        });
    }
    let nyquist = PI / h.dt();
    if nyquist < NYQUIST_MARGIN * basis.omega_max() {
        return Err(Error::Aliasing {
            nyquist,
            omega_max: basis.omega_max(),
            margin: NYQUIST_MARGIN,
        });
    }
    let quad = SourceQuadrature::new(h);
    let alpha = basis
        .frequencies
        .iter()
        .zip(&basis.weights)
        .map(|(&w, &wt)| {
            if quad.panels.is_empty() && quad.jumps.is_empty() {
                Complex64::new(0.0, 0.0)
            } else {
                quad.transform(w) * libm::sqrt(coefficient * wt / w)
            }
        })
        .collect();
    ModeAmplitudes::new(basis.clone(), alpha)
}

/// History, basis and amplitudes of the branch-difference radiation.
pub fn entangling_amplitudes(s: &Scenario, settings: &SpectralSettings) -> Result<ModeAmplitudes> {
    settings.validate()?;
    let h = build_branch_difference(s, settings.samples_per_ramp)?;
    let basis = ModeBasis::for_ramp(s.field, s.t_a, settings)?;
    spectral_amplitudes(&h, &basis, settings.coefficient(s.field))
}

/// Relative change of `<N>` when the infrared cutoff is lowered tenfold,
/// holding the mode density per decade fixed.
pub fn cutoff_sensitivity(s: &Scenario, settings: &SpectralSettings) -> Result<f64> {
    let n = photon_number(&entangling_amplitudes(s, settings)?);
    let decades = libm::log10(settings.omega_max_factor / settings.omega_min_factor);
    let wider = SpectralSettings {
        omega_min_factor: settings.omega_min_factor / 10.0,
        modes: settings.modes + libm::ceil(settings.modes as f64 / decades) as usize,
        ..settings.clone()
    };
    let n_wide = photon_number(&entangling_amplitudes(s, &wider)?);
    Ok(if n > 0.0 { (n_wide - n) / n } else { 0.0 })
}

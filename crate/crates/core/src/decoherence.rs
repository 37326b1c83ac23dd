//! Decoherence functionals `1 - |<.|.>|` for Alice and Bob.

use alloc::vec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::audit::{run_audit, IDENTITY_TOL, MARGIN_TOL};
use crate::gaussian::{overlap, CoherentLabel, GaussianUnitary};
use crate::radiation::{entangling_amplitudes, photon_number, radiated_energy, ModeAmplitudes, SpectralSettings};
use crate::scenario::{RegimeLabel, Scenario};
use crate::{Error, Result};

/// Alice's decoherence from the two branch field states, `1 - exp(-|a1 - a2|^2 / 2)`.
pub fn alice_decoherence(a1: &ModeAmplitudes, a2: &ModeAmplitudes) -> Result<f64> {
    if a1.basis() != a2.basis() {
        return Err(Error::BasisMismatch);
    }
    let d2: f64 = a1.alpha().iter().zip(a2.alpha()).map(|(x, y)| (x - y).norm_sqr()).sum();
    Ok(-libm::expm1(-0.5 * d2))
}

/// Bob's decoherence from his two probe states.
pub fn bob_decoherence(b1: &CoherentLabel, b2: &CoherentLabel) -> Result<f64> {
    let d2: f64 = b1
        .amplitudes()
        .iter()
        .zip(b2.amplitudes())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    // Overlap validates the sectors; the magnitude is taken from d2 for precision.
    overlap(b1, b2)?;
    Ok(-libm::expm1(-0.5 * d2))
}

pub fn whichpath_snr(s: &Scenario) -> f64 {
    s.whichpath_snr()
}

/// Probe decoherence for a given which-path SNR when the probe ends in
/// coherent states separated by `SNR / 2`.
pub fn snr_bridge(snr: f64) -> f64 {
    -libm::expm1(-snr * snr / 8.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceReport {
    pub d_alice: f64,
    pub d_bob: f64,
    pub n_entangling: f64,
    pub snr_whichpath: f64,
    pub regime: RegimeLabel,
    pub audit_pass: bool,
    pub radiated_energy: f64,
    /// `E / N`, zero when nothing is radiated.
    pub mean_frequency: f64,
    /// [`snr_bridge`] of the which-path SNR, before the cap by the radiation.
    pub d_bob_bridge: f64,
    /// Fraction of the compressed field mode routed to the probe.
    pub coupling: f64,
    /// True when the SNR asks for more distinguishability than the field carries.
    pub capped: bool,
    pub identity_residual: f64,
    pub margin: f64,
}

/// Full pipeline for one scenario.
///
/// The field difference is compressed into one mode (amplitude `sqrt(N)` versus
/// vacuum). Bob's probe couples to it through a beam splitter with
/// `sin^2 theta = min(1, (SNR^2/4) / N)` and the result goes through the audit.
pub fn evaluate(s: &Scenario, settings: &SpectralSettings) -> Result<DecoherenceReport> {
    s.validate()?;
    let amps = entangling_amplitudes(s, settings)?;
    let vacuum = ModeAmplitudes::vacuum(amps.basis().clone());
    let n = photon_number(&amps);
    let d_alice = alice_decoherence(&amps, &vacuum)?;
    let energy = radiated_energy(&amps);
    if !(n.is_finite() && energy.is_finite()) {
        return Err(Error::NonFinite("radiated amplitudes"));
    }

    let snr = s.whichpath_snr();
    let demanded = snr * snr / 4.0;
    let (coupling, capped) = if n > 0.0 {
        (if demanded >= n { 1.0 } else { demanded / n }, demanded > n)
    } else {
        (0.0, demanded > 0.0)
    };

    let a1 = CoherentLabel::new(vec![Complex64::new(libm::sqrt(n), 0.0)])?;
    let a2 = CoherentLabel::vacuum(1);
    let theta = libm::asin(libm::sqrt(coupling));
    let u = GaussianUnitary::beam_splitter(2, 0, 1, theta, 0.0)?;
    let audit = run_audit(&a1, &a2, &u, &CoherentLabel::vacuum(1))?;
    let d_bob = bob_decoherence(&audit.probe_states.0, &audit.probe_states.1)?;

    let audit_pass = audit.holds() && d_bob <= d_alice + MARGIN_TOL && audit.identity_residual < IDENTITY_TOL;
    Ok(DecoherenceReport {
        d_alice,
        d_bob,
        n_entangling: n,
        snr_whichpath: snr,
        regime: s.classify_regime(),
        audit_pass,
        radiated_energy: energy,
        mean_frequency: if n > 0.0 { energy / n } else { 0.0 },
        d_bob_bridge: snr_bridge(snr),
        coupling,
        capped,
        identity_residual: audit.identity_residual,
        margin: audit.inequality_margin,
    })
}

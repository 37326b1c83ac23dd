//! Physical parameters of the gedankenexperiment and the order-of-magnitude
//! regime classification.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Electromagnetic,
    Gravitational,
}

impl FieldKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldKind::Electromagnetic => "electromagnetic",
            FieldKind::Gravitational => "gravitational",
        }
    }
}

/// Shape of the split and recombination ramps, as a map `[0, 1] -> [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// Quintic smoothstep `6x^5 - 15x^4 + 10x^3`; C2 at the ends.
    #[default]
    Smoothstep,
    /// Error-function ramp of width `1/12`, renormalized to hit 0 and 1 exactly.
    Gaussian,
    /// `(1 - cos(pi x)) / 2`; C1 at the ends.
    RaisedCosine,
}

impl Window {
    pub fn as_str(self) -> &'static str {
        match self {
            Window::Smoothstep => "smoothstep",
            Window::Gaussian => "gaussian",
            Window::RaisedCosine => "raised_cosine",
        }
    }
}

/// Order-unity constants standing in for the `~` of the scaling estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Bob learns the path when the which-path SNR exceeds this.
    pub which_path: f64,
    /// Alice decoheres when the estimated entangling number exceeds this.
    pub entangling: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            which_path: 1.0,
            entangling: 1.0,
        }
    }
}

/// Full parameter set, in Planck units.
///
/// When deserialized, `field`, `separation`, `distance`, `t_a` and `t_b` are
/// required; charges and masses default to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub field: FieldKind,
    /// Charge of Alice's particle (electromagnetic case).
    #[serde(default = "one")]
    pub q_a: f64,
    /// Mass of Alice's particle.
    #[serde(default = "one")]
    pub m_a: f64,
    /// Branch separation `d`.
    pub separation: f64,
    /// Alice-Bob distance `D`.
    pub distance: f64,
    /// Recombination duration `T_A`.
    pub t_a: f64,
    /// Bob's measurement duration `T_B`.
    pub t_b: f64,
    /// Bob's probe charge.
    #[serde(default = "one")]
    pub q_b: f64,
    /// Bob's probe mass.
    #[serde(default = "one")]
    pub m_b: f64,
    #[serde(default)]
    pub ramp: Window,
    /// Duration of the split ramp in units of `T_A`. The split happens long
    /// before recombination and must be slow.
    #[serde(default = "default_split")]
    pub split_factor: f64,
    #[serde(default)]
    pub thresholds: Thresholds,
}

fn one() -> f64 {
    1.0
}

fn default_split() -> f64 {
    DEFAULT_SPLIT_FACTOR
}

impl Scenario {
    /// Electromagnetic scenario with unit probe and default ramp.
    pub fn electromagnetic(q_a: f64, separation: f64, distance: f64, t_a: f64, t_b: f64) -> Self {
        Scenario {
            field: FieldKind::Electromagnetic,
            q_a,
            m_a: 1.0,
            separation,
            distance,
            t_a,
            t_b,
            q_b: 1.0,
            m_b: 1.0,
            ramp: Window::default(),
            split_factor: DEFAULT_SPLIT_FACTOR,
            thresholds: Thresholds::default(),
        }
    }

    pub fn gravitational(m_a: f64, separation: f64, distance: f64, t_a: f64, t_b: f64) -> Self {
        Scenario {
            field: FieldKind::Gravitational,
            m_a,
            ..Scenario::electromagnetic(0.0, separation, distance, t_a, t_b)
        }
    }

    /// Checks the invariants and returns advisory warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        fn positive(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidScenario {
                    field,
                    reason: format!("must be finite and > 0, got {v}"),
                })
            }
        }
        fn finite(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidScenario {
                    field,
                    reason: format!("must be finite, got {v}"),
                })
            }
        }

        finite("q_a", self.q_a)?;
        finite("q_b", self.q_b)?;
        positive("m_a", self.m_a)?;
        positive("m_b", self.m_b)?;
        positive("distance", self.distance)?;
        positive("t_a", self.t_a)?;
        positive("t_b", self.t_b)?;
        positive("which_path_threshold", self.thresholds.which_path)?;
        positive("entangling_threshold", self.thresholds.entangling)?;
        // d = 0 is the coincident-branch limit, not an error.
        if !(self.separation.is_finite() && self.separation >= 0.0) {
            return Err(Error::InvalidScenario {
                field: "separation",
                reason: format!("must be finite and >= 0, got {}", self.separation),
            });
        }
        if self.separation >= self.distance {
            return Err(Error::InvalidScenario {
                field: "separation",
                reason: format!("must be smaller than distance {}, got {}", self.distance, self.separation),
            });
        }
        if !(self.split_factor.is_finite() && self.split_factor >= 1.0) {
            return Err(Error::InvalidScenario {
                field: "split_factor",
                reason: format!("must be finite and >= 1, got {}", self.split_factor),
            });
        }

        let mut warnings = Vec::new();
        if self.separation > self.distance / 10.0 {
            warnings.push(format!(
                "separation {} exceeds distance/10; the far-field estimates assume d << D",
                self.separation
            ));
        }
        Ok(warnings)
    }

    /// Effective multipole: `q_A d` (dipole) or `m_A d^2` (quadrupole).
    pub fn effective_moment(&self) -> f64 {
        match self.field {
            FieldKind::Electromagnetic => self.q_a * self.separation,
            FieldKind::Gravitational => self.m_a * self.separation * self.separation,
        }
    }

    /// Returns a copy whose charge (EM) or mass (gravity) is rescaled so that
    /// [`Scenario::effective_moment`] equals `moment`.
    pub fn with_moment(&self, moment: f64) -> Result<Scenario> {
        let mut s = self.clone();
        let d = self.separation;
        if !(d > 0.0) {
            return Err(Error::InvalidScenario {
                field: "separation",
                reason: String::from("a moment cannot be imposed at zero separation"),
            });
        }
        match self.field {
            FieldKind::Electromagnetic => s.q_a = moment / d,
            FieldKind::Gravitational => s.m_a = moment / (d * d),
        }
        Ok(s)
    }

    pub fn alice_causal(&self) -> bool {
        self.t_a < self.distance
    }

    pub fn bob_causal(&self) -> bool {
        self.t_b < self.distance
    }

    /// Order-of-magnitude entangling number: `D_A^2 / T_A^2` or `Q_A^2 / T_A^4`.
    pub fn entangling_estimate(&self) -> f64 {
        let m = self.effective_moment();
        let r = match self.field {
            FieldKind::Electromagnetic => m / self.t_a,
            FieldKind::Gravitational => m / (self.t_a * self.t_a),
        };
        r * r
    }

    /// Which-path signal-to-noise `delta_x / Delta_x`.
    ///
    /// EM: `(q_B/m_B)(D_A/D^3)T_B^2` over the vacuum jitter `q_B/m_B`.
    /// Gravity: `(Q_A/D^4)T_B^2` over the Planck length.
    pub fn whichpath_snr(&self) -> f64 {
        let m = self.effective_moment().abs();
        let dist = self.distance;
        let tb2 = self.t_b * self.t_b;
        match self.field {
            FieldKind::Electromagnetic => m / (dist * dist * dist) * tb2,
            FieldKind::Gravitational => m / (dist * dist * dist * dist) * tb2,
        }
    }

    pub fn classify_regime(&self) -> RegimeLabel {
        let bob_can_know = self.whichpath_snr() > self.thresholds.which_path;
        let alice_decoheres = self.entangling_estimate() > self.thresholds.entangling;
        let narrative = if !(self.alice_causal() && self.bob_causal()) {
            Narrative::ProtocolViolated
        } else if bob_can_know {
            Narrative::BobKnowsAliceDecohered
        } else {
            Narrative::BobBlindAliceCoherent
        };
        RegimeLabel {
            bob_can_know,
            alice_decoheres,
            narrative,
        }
    }
}

pub const DEFAULT_SPLIT_FACTOR: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Narrative {
    #[serde(rename = "BobKnows_AliceDecohered")]
    BobKnowsAliceDecohered,
    #[serde(rename = "BobBlind_AliceCoherent")]
    BobBlindAliceCoherent,
    ProtocolViolated,
}

impl Narrative {
    pub fn as_str(self) -> &'static str {
        match self {
            Narrative::BobKnowsAliceDecohered => "BobKnows_AliceDecohered",
            Narrative::BobBlindAliceCoherent => "BobBlind_AliceCoherent",
            Narrative::ProtocolViolated => "ProtocolViolated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeLabel {
    pub bob_can_know: bool,
    pub alice_decoheres: bool,
    pub narrative: Narrative,
}

impl RegimeLabel {
    /// The cell the two-case resolution says is unreachable under protocol.
    pub fn is_paradoxical(&self) -> bool {
        self.bob_can_know && !self.alice_decoheres
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_moment_examples() {
        let em = Scenario::electromagnetic(2.0, 3.0, 100.0, 1.0, 1.0);
        assert_eq!(em.effective_moment(), 6.0);
        let gr = Scenario::gravitational(2.0, 3.0, 100.0, 1.0, 1.0);
        assert_eq!(gr.effective_moment(), 18.0);
        let zero = Scenario::electromagnetic(0.0, 3.0, 100.0, 1.0, 1.0);
        assert_eq!(zero.effective_moment(), 0.0);
    }

    #[test]
    fn moment_scaling() {
        let base = Scenario::electromagnetic(1.5, 2.0, 100.0, 1.0, 1.0);
        for k in [0.5, 2.0, 7.0] {
            let mut s = base.clone();
            s.q_a *= k;
            assert!((s.effective_moment() - k * base.effective_moment()).abs() < 1e-12);
        }
        let g = Scenario::gravitational(1.5, 2.0, 100.0, 1.0, 1.0);
        for k in [0.5, 2.0, 3.0] {
            let mut s = g.clone();
            s.separation *= k;
            assert!((s.effective_moment() - k * k * g.effective_moment()).abs() < 1e-12);
        }
    }

    fn em_with_moment(moment: f64, dist: f64, t: f64) -> Scenario {
        Scenario::electromagnetic(moment, 1.0, dist, t, t)
    }

    #[test]
    fn regime_examples() {
        let dist = 50.0;
        let r = em_with_moment(10.0 * dist, dist, 0.9 * dist).classify_regime();
        assert_eq!(r.narrative, Narrative::BobKnowsAliceDecohered);
        assert!(r.bob_can_know && r.alice_decoheres);

        let r = em_with_moment(0.01 * dist, dist, 0.9 * dist).classify_regime();
        assert_eq!(r.narrative, Narrative::BobBlindAliceCoherent);
        assert!(!r.bob_can_know && !r.alice_decoheres);

        let mut s = em_with_moment(3.0, dist, 0.5 * dist);
        s.t_b = 2.0 * dist;
        assert_eq!(s.classify_regime().narrative, Narrative::ProtocolViolated);
    }

    #[test]
    fn gravitational_boundary() {
        // Q_A = D^2 with T_B = D sits exactly on the boundary.
        let dist = 20.0;
        let s = Scenario::gravitational(dist * dist, 1.0, dist, 1.0, dist);
        assert!((s.whichpath_snr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validation_errors() {
        let ok = Scenario::electromagnetic(1.0, 1.0, 100.0, 1.0, 1.0);
        assert!(ok.validate().unwrap().is_empty());

        let mut s = ok.clone();
        s.t_a = 0.0;
        assert!(matches!(s.validate(), Err(Error::InvalidScenario { field: "t_a", .. })));

        let mut s = ok.clone();
        s.separation = 100.0;
        assert!(matches!(s.validate(), Err(Error::InvalidScenario { field: "separation", .. })));

        let mut s = ok.clone();
        s.separation = 20.0;
        assert_eq!(s.validate().unwrap().len(), 1);

        let mut s = ok.clone();
        s.separation = 0.0;
        assert!(s.validate().is_ok());

        let mut s = ok;
        s.m_b = f64::NAN;
        assert!(s.validate().is_err());
    }

    #[test]
    fn with_moment_roundtrip() {
        let s = Scenario::gravitational(1.0, 2.0, 100.0, 1.0, 1.0).with_moment(36.0).unwrap();
        assert!((s.effective_moment() - 36.0).abs() < 1e-12);
        let s = Scenario::electromagnetic(1.0, 0.0, 100.0, 1.0, 1.0);
        assert!(s.with_moment(1.0).is_err());
    }
}

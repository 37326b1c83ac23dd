//! Randomized check that no Gaussian measurement on the radiation can learn
//! more about the path than the radiation itself carries.
//!
//! With the field in `|Psi_j>` and the probe in a common `|B_0>`, a unitary
//! acting on field ⊕ probe yields `|Psi'_j> ⊗ |B_j>` and unitarity forces
//! `<Psi'_1|Psi'_2><B_1|B_2> = <Psi_1|Psi_2>`. Since `|<Psi'_1|Psi'_2>| <= 1`
//! it follows that `|<B_1|B_2>| >= |<Psi_1|Psi_2>|`.

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gaussian::{
    apply_unitary, factor_overlap, gaussian_overlap_magnitude, overlap, random, CoherentLabel, GaussianUnitary,
    Partition,
};
use crate::linalg::Matrix;
use crate::radiation::ModeAmplitudes;
use crate::{Error, Result};

/// Tolerance on `|<Psi'_1|Psi'_2><B_1|B_2> - <Psi_1|Psi_2>|`.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Tolerance on `|<B_1|B_2>| - |<Psi_1|Psi_2>|` from below.
pub const MARGIN_TOL: f64 = 1e-10;
/// Tolerance on slice-ordering differences.
pub const ORDER_TOL: f64 = 1e-10;
/// Registry size covered by the error budget above.
pub const MAX_AUDIT_MODES: usize = 64;
pub const MAX_SQUEEZE: f64 = 2.0;
const COMMUTE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AuditResult {
    /// `<Psi_1|Psi_2>` on the field before the probe acts.
    pub overlap_sigma1: Complex64,
    /// `<Psi'_1|Psi'_2>` after the interaction.
    pub overlap_field_after: Complex64,
    /// `<B_1|B_2>`.
    pub overlap_bob: Complex64,
    pub identity_residual: f64,
    pub inequality_margin: f64,
    pub order_independence_residual: f64,
    pub probe_states: (CoherentLabel, CoherentLabel),
}

impl AuditResult {
    pub fn holds(&self) -> bool {
        self.identity_residual < IDENTITY_TOL
            && self.inequality_margin >= -MARGIN_TOL
            && self.overlap_field_after.norm() <= 1.0 + MARGIN_TOL
            && self.order_independence_residual < ORDER_TOL
    }
}

/// Field-sector labels of radiated amplitudes.
pub fn field_label(a: &ModeAmplitudes) -> CoherentLabel {
    CoherentLabel::new(a.alpha().to_vec()).expect("mode amplitudes are finite")
}

pub fn run_audit(
    a1: &CoherentLabel,
    a2: &CoherentLabel,
    u_bob: &GaussianUnitary,
    probe_init: &CoherentLabel,
) -> Result<AuditResult> {
    if a1.modes() != a2.modes() {
        return Err(Error::ModeMismatch {
            left: a1.modes(),
            right: a2.modes(),
        });
    }
    let (nf, np) = (a1.modes(), probe_init.modes());
    if u_bob.modes() != nf + np {
        return Err(Error::Dimension {
            expected: nf + np,
            got: u_bob.modes(),
        });
    }
    let partition = Partition::split(nf, np);
    let out1 = apply_unitary(u_bob, &a1.tensor(probe_init))?;
    let out2 = apply_unitary(u_bob, &a2.tensor(probe_init))?;
    let (field_after, bob) = factor_overlap(&out1, &out2, &partition)?;
    let sigma1 = overlap(a1, a2)?;
    Ok(AuditResult {
        overlap_sigma1: sigma1,
        overlap_field_after: field_after,
        overlap_bob: bob,
        identity_residual: (field_after * bob - sigma1).norm(),
        inequality_margin: bob.norm() - sigma1.norm(),
        order_independence_residual: 0.0,
        probe_states: (out1.restrict(partition.probe())?, out2.restrict(partition.probe())?),
    })
}

/// [`run_audit`] on radiated amplitudes.
pub fn run_audit_amplitudes(
    a1: &ModeAmplitudes,
    a2: &ModeAmplitudes,
    u_bob: &GaussianUnitary,
    probe_init: &CoherentLabel,
) -> Result<AuditResult> {
    if a1.basis() != a2.basis() {
        return Err(Error::BasisMismatch);
    }
    run_audit(&field_label(a1), &field_label(a2), u_bob, probe_init)
}

fn commutator_residual(x: &GaussianUnitary, y: &GaussianUnitary) -> Result<f64> {
    let xy = x.after(y)?;
    let yx = y.after(x)?;
    let ds = xy.matrix().sub(yx.matrix())?.max_abs();
    let dd = xy
        .displacement_vector()
        .iter()
        .zip(yx.displacement_vector())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(ds.max(dd))
}

/// Largest difference between the final joint, field and probe overlaps when
/// the field-only `tail` is applied before or after `u_bob`.
///
/// `tail` may be given on the field sector alone or on the whole registry;
/// in the latter case its support must lie in the field sector. Overlapping
/// supports are accepted only if the two affine maps commute.
pub fn order_independence(
    a1: &CoherentLabel,
    a2: &CoherentLabel,
    u_bob: &GaussianUnitary,
    probe_init: &CoherentLabel,
    tail: &GaussianUnitary,
) -> Result<f64> {
    let (nf, np) = (a1.modes(), probe_init.modes());
    let total = nf + np;
    if u_bob.modes() != total || a2.modes() != nf {
        return Err(Error::Dimension {
            expected: total,
            got: u_bob.modes(),
        });
    }
    let tail = if tail.modes() == nf && nf != total {
        tail.embed(total, &(0..nf).collect::<Vec<_>>())?
    } else if tail.modes() == total {
        if tail.support().iter().any(|&m| m >= nf) {
            return Err(Error::InvalidPartition(format!(
                "tail acts outside the field sector (modes {:?})",
                tail.support()
            )));
        }
        tail.clone()
    } else {
        return Err(Error::Dimension {
            expected: nf,
            got: tail.modes(),
        });
    };
    let bob_support = u_bob.support();
    if tail.support().iter().any(|m| bob_support.contains(m)) {
        let residual = commutator_residual(&tail, u_bob)?;
        if residual > COMMUTE_TOL {
            return Err(Error::NonCommuting { residual });
        }
    }

    let partition = Partition::split(nf, np);
    let evolve = |first: &GaussianUnitary, second: &GaussianUnitary| -> Result<[Complex64; 3]> {
        let o1 = apply_unitary(second, &apply_unitary(first, &a1.tensor(probe_init))?)?;
        let o2 = apply_unitary(second, &apply_unitary(first, &a2.tensor(probe_init))?)?;
        let (f, b) = factor_overlap(&o1, &o2, &partition)?;
        Ok([overlap(&o1, &o2)?, f, b])
    };
    let tail_first = evolve(&tail, u_bob)?;
    let bob_first = evolve(u_bob, &tail)?;
    Ok(tail_first
        .iter()
        .zip(&bob_first)
        .fold(0.0, |m, (x, y)| m.max((x - y).norm())))
}

/// Parameters of the randomized audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditConfig {
    pub trials: u64,
    pub seed: u64,
    pub field_modes: usize,
    pub probe_modes: usize,
    pub max_modes: usize,
    pub squeeze_bound: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            trials: 10_000,
            seed: 1,
            field_modes: 4,
            probe_modes: 2,
            max_modes: MAX_AUDIT_MODES,
            squeeze_bound: MAX_SQUEEZE,
        }
    }
}

impl AuditConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidAudit("trials must be at least 1".into()));
        }
        if self.field_modes == 0 || self.probe_modes == 0 {
            return Err(Error::InvalidAudit("field_modes and probe_modes must be at least 1".into()));
        }
        if self.max_modes > MAX_AUDIT_MODES {
            return Err(Error::InvalidAudit(format!(
                "max_modes {} exceeds the supported {MAX_AUDIT_MODES}",
                self.max_modes
            )));
        }
        if self.field_modes + self.probe_modes > self.max_modes {
            return Err(Error::InvalidAudit(format!(
                "field_modes + probe_modes = {} exceeds max_modes {}",
                self.field_modes + self.probe_modes,
                self.max_modes
            )));
        }
        if !(self.squeeze_bound.is_finite() && (0.0..=MAX_SQUEEZE).contains(&self.squeeze_bound)) {
            return Err(Error::InvalidAudit(format!(
                "squeeze_bound must lie in [0, {MAX_SQUEEZE}], got {}",
                self.squeeze_bound
            )));
        }
        Ok(())
    }

    /// Deterministic generator for one trial.
    pub fn trial_rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }
}

/// Residuals of one randomized trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: u64,
    pub identity_residual: f64,
    pub inequality_margin: f64,
    pub order_residual: f64,
    /// `| |<Phi_1|Phi_2>| - |<Psi_1|Psi_2>| |` after a squeezing unitary,
    /// computed from means and covariance.
    pub active_joint_residual: f64,
}

impl TrialOutcome {
    pub fn violates(&self) -> bool {
        !(self.identity_residual < IDENTITY_TOL
            && self.inequality_margin >= -MARGIN_TOL
            && self.order_residual < ORDER_TOL
            && self.active_joint_residual < IDENTITY_TOL)
    }
}

pub fn audit_trial(cfg: &AuditConfig, trial: u64) -> Result<TrialOutcome> {
    let mut rng = cfg.trial_rng(trial);
    let (nf, np) = (cfg.field_modes, cfg.probe_modes);
    let total = nf + np;

    let scale = rng.random_range(0.05..1.0);
    let a1 = random::random_label(nf, scale, &mut rng);
    let a2 = random::random_label(nf, scale, &mut rng);
    let probe = random::random_label(np, 1.0, &mut rng);

    let u_bob = random::random_passive(total, 1.0, &mut rng);
    let main = run_audit(&a1, &a2, &u_bob, &probe)?;

    // Field tail on a random nonempty subset of field modes; Bob on the rest.
    let k = rng.random_range(1..=nf);
    let mut modes: Vec<usize> = (0..nf).collect();
    for i in (1..nf).rev() {
        let j = rng.random_range(0..=i);
        modes.swap(i, j);
    }
    let (tail_modes, rest) = modes.split_at(k);
    let mut bob_modes: Vec<usize> = rest.to_vec();
    bob_modes.extend(nf..total);
    let tail = random::random_passive(k, 1.0, &mut rng).embed(total, tail_modes)?;
    let bob = random::random_passive(bob_modes.len(), 1.0, &mut rng).embed(total, &bob_modes)?;
    let order_residual = order_independence(&a1, &a2, &bob, &probe, &tail)?;

    let active = random::random_symplectic(total, cfg.squeeze_bound, &mut rng);
    let j1 = a1.tensor(&probe).quadratures();
    let j2 = a2.tensor(&probe).quadratures();
    let delta: Vec<f64> = j2.iter().zip(&j1).map(|(b, a)| b - a).collect();
    let moved = active.matrix().mul_vec(&delta)?;
    let cov: Matrix = active.matrix().mul(&active.matrix().transpose())?.scale(0.5);
    let after = gaussian_overlap_magnitude(&cov, &moved)?;

    Ok(TrialOutcome {
        trial,
        identity_residual: main.identity_residual,
        inequality_margin: main.inequality_margin,
        order_residual,
        active_joint_residual: (after - main.overlap_sigma1.norm()).abs(),
    })
}

/// Order-insensitive aggregate of trial outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub trials: u64,
    pub seed: u64,
    pub field_modes: usize,
    pub probe_modes: usize,
    pub squeeze_bound: f64,
    pub worst_identity_residual: f64,
    pub worst_margin: f64,
    pub worst_order_residual: f64,
    pub worst_active_joint_residual: f64,
    pub violations: u64,
    pub pass: bool,
}

impl AuditSummary {
    pub fn from_outcomes<I: IntoIterator<Item = TrialOutcome>>(cfg: &AuditConfig, outcomes: I) -> Self {
        let mut s = AuditSummary {
            trials: 0,
            seed: cfg.seed,
            field_modes: cfg.field_modes,
            probe_modes: cfg.probe_modes,
            squeeze_bound: cfg.squeeze_bound,
            worst_identity_residual: 0.0,
            worst_margin: f64::INFINITY,
            worst_order_residual: 0.0,
            worst_active_joint_residual: 0.0,
            violations: 0,
            pass: true,
        };
        for o in outcomes {
            s.trials += 1;
            s.worst_identity_residual = s.worst_identity_residual.max(o.identity_residual);
            s.worst_margin = s.worst_margin.min(o.inequality_margin);
            s.worst_order_residual = s.worst_order_residual.max(o.order_residual);
            s.worst_active_joint_residual = s.worst_active_joint_residual.max(o.active_joint_residual);
            if o.violates() {
                s.violations += 1;
            }
        }
        s.pass = s.violations == 0 && s.trials > 0;
        s
    }
}

/// Sequential randomized audit.
pub fn run_random_audit(cfg: &AuditConfig) -> Result<AuditSummary> {
    cfg.validate()?;
    let outcomes = (0..cfg.trials).map(|t| audit_trial(cfg, t)).collect::<Result<Vec<_>>>()?;
    Ok(AuditSummary::from_outcomes(cfg, outcomes))
}

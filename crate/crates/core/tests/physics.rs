use num_complex::Complex64;

use whichpath_core::decoherence::{alice_decoherence, evaluate};
use whichpath_core::radiation::{
    entangling_amplitudes, photon_number, spectral_amplitudes, ModeAmplitudes, ModeBasis, SpectralSettings,
};
use whichpath_core::scenario::{FieldKind, Scenario, Window};
use whichpath_core::sweep::{fit_powerlaw, RangeSpec};
use whichpath_core::worldline::{build_branch_difference_ordered, Ordering, DEFAULT_SAMPLES_PER_RAMP};

fn number(s: &Scenario) -> f64 {
    photon_number(&entangling_amplitudes(s, &SpectralSettings::default()).unwrap())
}

fn scenario(kind: FieldKind, moment: f64, t_a: f64) -> Scenario {
    match kind {
        FieldKind::Electromagnetic => Scenario::electromagnetic(moment, 1.0, 1e4, t_a, t_a),
        FieldKind::Gravitational => Scenario::gravitational(moment, 1.0, 1e4, t_a, t_a),
    }
}

#[test]
fn number_scales_with_inverse_ramp_time() {
    for window in [Window::Smoothstep, Window::Gaussian, Window::RaisedCosine] {
        for (kind, expect) in [(FieldKind::Electromagnetic, 2.0), (FieldKind::Gravitational, 4.0)] {
            let ts = RangeSpec::log(10.0, 100.0, 11).values();
            let inv: Vec<f64> = ts.iter().map(|t| 1.0 / t).collect();
            let ns: Vec<f64> = ts
                .iter()
                .map(|&t| {
                    let mut s = scenario(kind, 1.0, t);
                    s.ramp = window;
                    number(&s)
                })
                .collect();
            let fit = fit_powerlaw(&inv, &ns).unwrap();
            assert!((fit.exponent - expect).abs() < 0.02, "{window:?} {kind:?}: {fit:?}");
        }
    }
}

#[test]
fn number_is_quadratic_in_moment() {
    for kind in [FieldKind::Electromagnetic, FieldKind::Gravitational] {
        let ms = RangeSpec::log(0.1, 10.0, 9).values();
        let ns: Vec<f64> = ms.iter().map(|&m| number(&scenario(kind, m, 10.0))).collect();
        let fit = fit_powerlaw(&ms, &ns).unwrap();
        assert!((fit.exponent - 2.0).abs() < 0.01, "{kind:?}: {fit:?}");
    }
}

#[test]
fn quadratic_homogeneity() {
    let base = number(&scenario(FieldKind::Electromagnetic, 1.0, 10.0));
    for lambda in [0.5, 3.0, 17.0] {
        let n = number(&scenario(FieldKind::Electromagnetic, lambda, 10.0));
        assert!((n / (lambda * lambda * base) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn zero_history_iff_zero_number() {
    let still = Scenario::electromagnetic(1.0, 0.0, 100.0, 10.0, 10.0);
    assert_eq!(number(&still), 0.0);
    let moving = Scenario::electromagnetic(1e-6, 1.0, 100.0, 10.0, 10.0);
    assert!(number(&moving) > 0.0);
}

#[test]
fn mirrored_history_radiates_identically() {
    for window in [Window::Smoothstep, Window::Gaussian, Window::RaisedCosine] {
        let mut s = Scenario::electromagnetic(2.0, 1.0, 100.0, 10.0, 10.0);
        s.ramp = window;
        let settings = SpectralSettings::default();
        let basis = ModeBasis::for_ramp(s.field, s.t_a, &settings).unwrap();
        let n = |o| {
            let h = build_branch_difference_ordered(&s, DEFAULT_SAMPLES_PER_RAMP, o).unwrap();
            photon_number(&spectral_amplitudes(&h, &basis, settings.dipole_coefficient).unwrap())
        };
        let (fwd, rev) = (n(Ordering::SplitThenRecombine), n(Ordering::RecombineThenSplit));
        assert!(((fwd - rev) / fwd).abs() < 1e-12, "{window:?}: {fwd} vs {rev}");
    }
}

#[test]
fn basis_refinement_converges() {
    for kind in [FieldKind::Electromagnetic, FieldKind::Gravitational] {
        let s = scenario(kind, 1.0, 10.0);
        let coarse = number(&s);
        let fine = photon_number(
            &entangling_amplitudes(
                &s,
                &SpectralSettings {
                    modes: 2048,
                    ..Default::default()
                },
            )
            .unwrap(),
        );
        assert!(((fine - coarse) / fine).abs() < 1e-4);
    }
}

#[test]
fn adiabatic_limit() {
    let ts = RangeSpec::log(1.0, 1000.0, 20).values();
    let mut last = f64::INFINITY;
    for t in ts {
        let r = evaluate(&scenario(FieldKind::Electromagnetic, 1.0, t), &SpectralSettings::default()).unwrap();
        assert!(r.d_alice < last, "T_A = {t}");
        last = r.d_alice;
    }
    assert!(last < 1e-3);
}

#[test]
fn alice_matches_photon_number() {
    for m in [0.1, 1.0, 10.0, 100.0] {
        let a = entangling_amplitudes(&scenario(FieldKind::Electromagnetic, m, 10.0), &SpectralSettings::default()).unwrap();
        let vac = ModeAmplitudes::vacuum(a.basis().clone());
        let d = alice_decoherence(&a, &vac).unwrap();
        let n = photon_number(&a);
        assert!((d - (1.0 - (-n / 2.0).exp())).abs() < 1e-12);
        if n > 10.6 {
            assert!(d > 0.99);
        }
    }
}

#[test]
fn common_displacement_cancels() {
    let a = entangling_amplitudes(&scenario(FieldKind::Electromagnetic, 3.0, 10.0), &SpectralSettings::default()).unwrap();
    let vac = ModeAmplitudes::vacuum(a.basis().clone());
    let coulomb: Vec<Complex64> = (0..a.basis().len()).map(|i| Complex64::new(0.01 * i as f64, -0.3)).collect();
    let shift = |x: &ModeAmplitudes| {
        let v = x.alpha().iter().zip(&coulomb).map(|(p, q)| p + q).collect();
        ModeAmplitudes::new(x.basis().clone(), v).unwrap()
    };
    let plain = alice_decoherence(&a, &vac).unwrap();
    let shifted = alice_decoherence(&shift(&a), &shift(&vac)).unwrap();
    assert!((plain - shifted).abs() < 1e-12);
}

#[test]
fn end_to_end_bob_bounded_by_alice() {
    for kind in [FieldKind::Electromagnetic, FieldKind::Gravitational] {
        for m in [1e-3, 1.0, 1e2, 1e4, 1e6] {
            for t_b in [1.0, 30.0, 90.0] {
                let mut s = scenario(kind, m, 10.0);
                s.distance = 100.0;
                s.t_b = t_b;
                let r = evaluate(&s, &SpectralSettings::default()).unwrap();
                assert!(r.d_bob <= r.d_alice + 1e-10, "{r:?}");
                assert!((0.0..=1.0).contains(&r.d_bob) && (0.0..=1.0).contains(&r.d_alice));
                assert!(r.audit_pass);
            }
        }
    }
}

//! Acceptance criteria 1-8. Each test prints one `criterion N: PASS|FAIL`
//! line; run with `--nocapture` to see them.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use whichpath_core::audit::{run_random_audit, AuditConfig};
use whichpath_core::decoherence::evaluate;
use whichpath_core::gaussian::{overlap, CoherentLabel};
use whichpath_core::radiation::{entangling_amplitudes, photon_number, SpectralSettings};
use whichpath_core::scenario::{FieldKind, Scenario, Window};
use whichpath_core::sweep::{
    fit_powerlaw, run_sweep, Axis, Cell, Parameter, Quantity, RangeSpec, SweepSpec,
};
use whichpath_core::worldline::{causal_support_check, Event};

fn verdict(n: u32, name: &str, ok: bool, detail: &str) {
    println!("criterion {n} ({name}): {} | {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_whichpath")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

/// Runs the binary and returns (exit code, stdout).
fn run(args: &[&str], workers: usize) -> (i32, String) {
    let out = Command::new(bin())
        .args(args)
        .env("WHICHPATH_WORKERS", workers.to_string())
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8 output"))
}

#[test]
fn criterion_1_bob_never_exceeds_alice() {
    let cfg = configs().join("audit.toml");
    let start = Instant::now();
    let (code, text) = run(&[
        "audit",
        cfg.to_str().unwrap(),
        "--trials",
        "10000",
        "--format",
        "json",
    ], 4);
    let elapsed = start.elapsed();
    let doc: Value = serde_json::from_str(&text).expect("json document");
    let s = &doc["summary"];
    let margin = s["worst_margin"].as_f64().unwrap();
    let residual = s["worst_identity_residual"].as_f64().unwrap();
    let trials = s["trials"].as_u64().unwrap();

    // Full 64-mode registry: 48 field modes and 16 probe modes.
    let wide = run_random_audit(&AuditConfig {
        trials: 200,
        seed: 3,
        field_modes: 48,
        probe_modes: 16,
        ..Default::default()
    })
    .unwrap();

    let ok = code == 0
        && trials >= 10_000
        && margin >= -1e-10
        && residual < 1e-10
        && elapsed < Duration::from_secs(60)
        && wide.worst_margin >= -1e-10
        && wide.worst_identity_residual < 1e-10
        && wide.violations == 0;
    verdict(
        1,
        "no-paradox audit",
        ok,
        &format!(
            "{trials} trials in {:.2}s, worst margin {margin:e}, worst residual {residual:e}; \
             64-mode: margin {:e}, residual {:e}",
            elapsed.as_secs_f64(),
            wide.worst_margin,
            wide.worst_identity_residual
        ),
    );
}

fn number(s: &Scenario) -> f64 {
    photon_number(&entangling_amplitudes(s, &SpectralSettings::default()).unwrap())
}

fn base(kind: FieldKind, moment: f64, t_a: f64) -> Scenario {
    match kind {
        FieldKind::Electromagnetic => Scenario::electromagnetic(moment, 1.0, 1e4, t_a, t_a),
        FieldKind::Gravitational => Scenario::gravitational(moment, 1.0, 1e4, t_a, t_a),
    }
}

#[test]
fn criterion_2_scaling_laws() {
    let mut lines = Vec::new();
    let mut ok = true;
    for (kind, expect) in [(FieldKind::Electromagnetic, 2.0), (FieldKind::Gravitational, 4.0)] {
        let ts = RangeSpec::log(10.0, 100.0, 11).values();
        let inv: Vec<f64> = ts.iter().map(|t| 1.0 / t).collect();
        let ns: Vec<f64> = ts.iter().map(|&t| number(&base(kind, 1.0, t))).collect();
        let p = fit_powerlaw(&inv, &ns).unwrap().exponent;
        ok &= (p - expect).abs() <= 0.02;

        let ms = RangeSpec::log(0.1, 1.0, 11).values();
        let nm: Vec<f64> = ms.iter().map(|&m| number(&base(kind, m, 10.0))).collect();
        let q = fit_powerlaw(&ms, &nm).unwrap().exponent;
        ok &= (q - 2.0).abs() <= 0.01;
        lines.push(format!("{kind:?}: 1/T_A exponent {p:.4}, moment exponent {q:.4}"));
    }
    verdict(2, "scaling laws", ok, &lines.join("; "));
}

#[test]
fn criterion_3_which_path_boundary() {
    let cfg = configs().join("regime.toml");
    let (code, text) = run(&["regime-map", cfg.to_str().unwrap(), "--format", "jsonl"], 2);
    let contour = text
        .lines()
        .filter_map(|l| serde_json::from_str::<Value>(l).ok())
        .find_map(|v| v.get("contour").cloned())
        .expect("contour line");
    let d: f64 = 100.0;
    let mut worst = 0.0f64;
    let points = contour.as_array().unwrap();
    for p in points {
        let t_b = p["fixed"].as_f64().unwrap();
        let moment = p["crossing"].as_f64().unwrap();
        let expect = d * d * d / (t_b * t_b);
        worst = worst.max(((moment - expect) / expect).abs());
    }
    let ok = code == 0 && points.len() == 19 && worst <= 1e-12;
    verdict(
        3,
        "which-path boundary",
        ok,
        &format!("{} contour points, worst relative error {worst:e}", points.len()),
    );
}

#[test]
fn criterion_4_adiabatic_restoration() {
    let ts = RangeSpec::log(1.0, 1000.0, 20).values();
    let mut ds = Vec::new();
    for &t in &ts {
        let mut s = base(FieldKind::Electromagnetic, 1.0, t);
        s.ramp = Window::default();
        ds.push(evaluate(&s, &SpectralSettings::default()).unwrap().d_alice);
    }
    let monotone = ds.windows(2).all(|w| w[1] < w[0]);
    let last = *ds.last().unwrap();
    verdict(
        4,
        "adiabatic restoration",
        monotone && last < 1e-3,
        &format!("d_alice {:e} at T_A = 1 down to {last:e} at T_A = 1000, monotone: {monotone}", ds[0]),
    );
}

const FOCK_CUTOFF: usize = 40;

fn fock_coefficients(alpha: Complex64) -> Vec<Complex64> {
    let mut c = Vec::with_capacity(FOCK_CUTOFF + 1);
    let mut term = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    c.push(term);
    for n in 1..=FOCK_CUTOFF {
        term = term * alpha / (n as f64).sqrt();
        c.push(term);
    }
    c
}

fn fock_overlap(a: &[Complex64], pa: f64, b: &[Complex64], pb: f64) -> Complex64 {
    let mut total = Complex64::from_polar(1.0, pb - pa);
    for (x, y) in a.iter().zip(b) {
        let (cx, cy) = (fock_coefficients(*x), fock_coefficients(*y));
        total *= cx.iter().zip(&cy).map(|(u, v)| u.conj() * v).sum::<Complex64>();
    }
    total
}

#[test]
fn criterion_5_overlap_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let cases = 1000;
    for case in 0..cases {
        let modes = 1 + case % 2;
        let mut amp = || Complex64::from_polar(2.0 * rng.random::<f64>().sqrt(), rng.random_range(0.0..2.0 * PI));
        let a: Vec<_> = (0..modes).map(|_| amp()).collect();
        let b: Vec<_> = (0..modes).map(|_| amp()).collect();
        let (pa, pb) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI));
        let got = overlap(
            &CoherentLabel::with_phase(a.clone(), pa).unwrap(),
            &CoherentLabel::with_phase(b.clone(), pb).unwrap(),
        )
        .unwrap();
        worst = worst.max((got - fock_overlap(&a, pa, &b, pb)).norm());
    }
    verdict(5, "overlap oracle", worst < 1e-8, &format!("{cases} cases, worst deviation {worst:e}"));
}

#[test]
fn criterion_6_causal_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0u32;
    let mut flagged = 0u32;
    let mut controls = 0u32;
    for _ in 0..2000 {
        let d = 10f64.powf(rng.random_range(0.0..4.0));
        let (t_a, t_b) = (rng.random_range(0.01..0.999) * d, rng.random_range(0.01..0.999) * d);
        let s = if rng.random::<bool>() {
            Scenario::electromagnetic(rng.random_range(0.1..10.0), 1e-3, d, t_a, t_b)
        } else {
            Scenario::gravitational(rng.random_range(0.1..10.0), 1e-3, d, t_a, t_b)
        };
        // Bob sits at distance D and acts over [0, T_B].
        for _ in 0..16 {
            let e = Event { t: rng.random_range(0.0..=1.0) * t_b, r: d };
            checked += 1;
            flagged += causal_support_check(&s, e) as u32;
        }
        // Positive control: inside the future light cone of the recombination.
        let late = Event { t: d + rng.random_range(0.01..1.0) * t_a, r: d };
        controls += causal_support_check(&s, late) as u32;
    }
    verdict(
        6,
        "causal support",
        flagged == 0 && controls == 2000,
        &format!("{checked} events in Bob's window, {flagged} flagged; {controls}/2000 light-cone controls flagged"),
    );
}

#[test]
fn criterion_7_regime_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let settings = SpectralSettings::default();
    let mut cells = 0usize;
    let mut paradox = 0usize;
    for _ in 0..40 {
        let d = 10f64.powf(rng.random_range(0.5..4.0));
        let t_a = rng.random_range(0.01..0.99) * d;
        let grav = rng.random::<bool>();
        let scenario = if grav {
            Scenario::gravitational(1.0, 1e-3, d, t_a, 0.5 * d)
        } else {
            Scenario::electromagnetic(1.0, 1e-3, d, t_a, 0.5 * d)
        };
        let lo = 10f64.powf(rng.random_range(-4.0..2.0));
        let spec = SweepSpec {
            base: scenario,
            axes: vec![
                Axis { parameter: Parameter::Moment, range: RangeSpec::log(lo, lo * 1e8, 33) },
                Axis { parameter: Parameter::TB, range: RangeSpec::log(0.01 * d, 0.99 * d, 9) },
            ],
            outputs: vec![Quantity::BobCanKnow, Quantity::AliceDecoheres],
        };
        for row in run_sweep(&spec, &settings).unwrap() {
            cells += 1;
            if let [Cell::Flag(bob), Cell::Flag(alice)] = row.values[..] {
                paradox += (bob && !alice) as usize;
            } else {
                paradox += 1;
            }
        }
    }

    let mut runs = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..300 {
        let d = 10f64.powf(rng.random_range(0.5..3.0));
        let moment = 10f64.powf(rng.random_range(-3.0..7.0));
        let (t_a, t_b) = (rng.random_range(0.05..0.99) * d, rng.random_range(0.01..0.99) * d);
        let s = if rng.random::<bool>() {
            Scenario::gravitational(moment, 1.0, d, t_a, t_b)
        } else {
            Scenario::electromagnetic(moment, 1.0, d, t_a, t_b)
        };
        let r = evaluate(&s, &settings).unwrap();
        worst = worst.max(r.d_bob - r.d_alice);
        runs += 1;
    }
    verdict(
        7,
        "regime consistency",
        paradox == 0 && worst <= 1e-10,
        &format!("{cells} sweep cells, {paradox} paradoxical; {runs} end-to-end runs, worst d_bob - d_alice {worst:e}"),
    );
}

#[test]
fn criterion_8_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for (command, file) in [
        ("report", "report.toml"),
        ("sweep", "sweep.toml"),
        ("regime-map", "regime.toml"),
        ("audit", "audit.toml"),
    ] {
        let cfg = configs().join(file);
        for format in ["csv", "json"] {
            let mut outputs = Vec::new();
            for (i, workers) in [1, 1, 4, 4].into_iter().enumerate() {
                let path = dir.path().join(format!("{command}-{format}-{i}.out"));
                let (code, _) = run(
                    &[
                        command,
                        cfg.to_str().unwrap(),
                        "--format",
                        format,
                        "--seed",
                        "17",
                        "--trials",
                        "2000",
                        "--output",
                        path.to_str().unwrap(),
                    ],
                    workers,
                );
                assert_eq!(code, 0, "{command} {format}");
                outputs.push(std::fs::read(&path).unwrap());
            }
            compared += 1;
            if outputs[0] != outputs[1] || outputs[2] != outputs[3] {
                mismatches.push(format!("{command}/{format}"));
            }
            if outputs[0] != outputs[2] {
                mismatches.push(format!("{command}/{format} across worker counts"));
            }
        }
    }
    verdict(
        8,
        "determinism",
        mismatches.is_empty(),
        &format!("{compared} command/format pairs at 1 and 4 workers, mismatches: {mismatches:?}"),
    );
}

//! Subcommands. Each writes its output and returns an exit code with a
//! one-paragraph summary for the terminal.

use std::io::{self, Write};
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use whichpath_core::audit::{audit_trial, AuditSummary, IDENTITY_TOL, MARGIN_TOL};
use whichpath_core::decoherence::evaluate;
use whichpath_core::radiation::{cutoff_sensitivity, entangling_amplitudes};
use whichpath_core::worldline::build_branch_difference;
use whichpath_core::sweep::{contour, evaluate_point, Axis, Cell, ContourPoint, Parameter, Quantity, RangeSpec, Row, SweepSpec};
use whichpath_core::Error;

use crate::config::{Format, RunConfig};
use crate::output::{self, TRUNCATION_MARKER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RESOLUTION: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;
pub const EXIT_INTERRUPTED: i32 = 130;

/// Rows or trials evaluated between flushes and interrupt checks.
pub const CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub summary: String,
}

impl Outcome {
    fn new(code: i32, summary: impl Into<String>) -> Self {
        Outcome {
            code,
            summary: summary.into(),
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Outcome::new(EXIT_CONFIG, msg)
    }
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        let code = if e.is_resolution() { EXIT_RESOLUTION } else { EXIT_CONFIG };
        Outcome::new(code, format!("error [{}]: {e}", e.code()))
    }
}

impl From<io::Error> for Outcome {
    fn from(e: io::Error) -> Self {
        Outcome::config(format!("cannot write output: {e}"))
    }
}

type Step<T> = Result<T, Outcome>;

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// A single-record document: JSON object or CSV header plus one row.
fn write_record(cfg: &RunConfig, command: &str, key: &str, body: &Value, extra: Map<String, Value>) -> Step<()> {
    let mut out = output::open(cfg.output.path.as_deref())?;
    match cfg.output.format {
        Format::Csv => {
            out.write_all(output::config_comment(cfg, command).as_bytes())?;
            for (k, v) in &extra {
                let text = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                writeln!(out, "# {k}: {text}")?;
            }
            let mut pairs = Vec::new();
            flatten("", body, &mut pairs);
            let (h, r): (Vec<String>, Vec<String>) = pairs.into_iter().unzip();
            out.write_all(output::csv_line(&h).as_bytes())?;
            out.write_all(output::csv_line(&r).as_bytes())?;
        }
        Format::Json | Format::Jsonl => {
            let mut doc = Map::new();
            doc.insert("command".into(), json!(command));
            doc.insert("config".into(), output::config_json(cfg));
            doc.extend(extra);
            doc.insert(key.into(), body.clone());
            serde_json::to_writer_pretty(&mut out, &Value::Object(doc)).map_err(io::Error::from)?;
            out.write_all(b"\n")?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn report(cfg: &RunConfig) -> Outcome {
    match report_inner(cfg) {
        Ok(o) | Err(o) => o,
    }
}

fn report_inner(cfg: &RunConfig) -> Step<Outcome> {
    let warnings = cfg.scenario.validate()?;
    cfg.basis.validate()?;
    let r = evaluate(&cfg.scenario, &cfg.basis)?;
    let mut extra = Map::new();
    extra.insert("warnings".into(), json!(warnings.join("; ")));
    extra.insert(
        "n_cutoff_sensitivity".into(),
        json!(cutoff_sensitivity(&cfg.scenario, &cfg.basis)?),
    );
    if let Some(p) = &cfg.output.history {
        let h = build_branch_difference(&cfg.scenario, cfg.basis.samples_per_ramp)?;
        let mut out = output::open(Some(p))?;
        out.write_all(b"t,moment\n")?;
        for (t, m) in h.times().iter().zip(h.samples()) {
            writeln!(out, "{},{}", output::number(*t), output::number(*m))?;
        }
        out.flush()?;
    }
    if let Some(p) = &cfg.output.spectrum {
        let a = entangling_amplitudes(&cfg.scenario, &cfg.basis)?;
        let mut out = output::open(Some(p))?;
        out.write_all(b"omega,alpha_sq,de_domega\n")?;
        for (w, n, de) in a.spectrum() {
            writeln!(out, "{},{},{}", output::number(w), output::number(n), output::number(de))?;
        }
        out.flush()?;
    }
    let body = serde_json::to_value(&r).map_err(|e| Outcome::config(e.to_string()))?;
    write_record(cfg, "report", "report", &body, extra)?;

    let mut summary = format!(
        "regime {} | d_alice {:.6e} | d_bob {:.6e} | <N> {:.6e} | SNR {:.6e} | audit {}",
        r.regime.narrative.as_str(),
        r.d_alice,
        r.d_bob,
        r.n_entangling,
        r.snr_whichpath,
        if r.audit_pass { "pass" } else { "FAIL" }
    );
    for w in &warnings {
        summary.push_str(&format!("\nwarning: {w}"));
    }
    if !r.audit_pass {
        summary.push_str(&format!(
            "\naudit violated: identity residual {:e}, margin {:e}",
            r.identity_residual, r.margin
        ));
        return Ok(Outcome::new(EXIT_VIOLATION, summary));
    }
    Ok(Outcome::new(EXIT_OK, summary))
}

/// Streams rows in the configured format.
struct TableWriter<'a> {
    out: Box<dyn Write>,
    format: Format,
    spec: &'a SweepSpec,
    first: bool,
}

impl<'a> TableWriter<'a> {
    fn begin(cfg: &RunConfig, command: &str, spec: &'a SweepSpec) -> Step<Self> {
        let mut out = output::open(cfg.output.path.as_deref())?;
        match cfg.output.format {
            Format::Csv => {
                out.write_all(output::config_comment(cfg, command).as_bytes())?;
                out.write_all(output::csv_line(&output::sweep_header(spec)).as_bytes())?;
            }
            Format::Json => {
                let head = json!({"command": command, "config": output::config_json(cfg)});
                let text = serde_json::to_string(&head).map_err(io::Error::from)?;
                // Reopen the object to append the row array.
                write!(out, "{},\"rows\":[", &text[..text.len() - 1])?;
            }
            Format::Jsonl => {
                let head = json!({"command": command, "config": output::config_json(cfg)});
                writeln!(out, "{head}")?;
            }
        }
        Ok(TableWriter {
            out,
            format: cfg.output.format,
            spec,
            first: true,
        })
    }

    fn rows(&mut self, rows: &[Row]) -> Step<()> {
        for row in rows {
            match self.format {
                Format::Csv => self.out.write_all(output::csv_line(&output::sweep_record(row)).as_bytes())?,
                Format::Json => {
                    let sep = if self.first { "\n" } else { ",\n" };
                    write!(self.out, "{sep}{}", output::sweep_json(self.spec, row))?;
                }
                Format::Jsonl => writeln!(self.out, "{}", output::sweep_json(self.spec, row))?,
            }
            self.first = false;
        }
        self.out.flush()?;
        Ok(())
    }

    fn finish(mut self, truncated: bool, contour: Option<&[ContourPoint]>) -> Step<()> {
        match self.format {
            Format::Csv => {
                if let Some(c) = contour {
                    let (fixed, moving) = (self.spec.axes[1].parameter.as_str(), self.spec.axes[0].parameter.as_str());
                    writeln!(self.out, "# contour {fixed},{moving}")?;
                    for p in c {
                        writeln!(self.out, "# contour {},{}", output::number(p.fixed), output::number(p.crossing))?;
                    }
                }
                if truncated {
                    writeln!(self.out, "{TRUNCATION_MARKER}")?;
                }
            }
            Format::Json => {
                write!(self.out, "\n]")?;
                if let Some(c) = contour {
                    write!(self.out, ",\"contour\":{}", serde_json::to_string(c).map_err(io::Error::from)?)?;
                }
                writeln!(self.out, ",\"truncated\":{truncated}}}")?;
            }
            Format::Jsonl => {
                if let Some(c) = contour {
                    writeln!(self.out, "{}", json!({"contour": c}))?;
                }
                if truncated {
                    writeln!(self.out, "{}", json!({"truncated": true}))?;
                }
            }
        }
        self.out.flush()?;
        Ok(())
    }
}

/// Evaluates the sweep in chunks, writing each as it completes.
fn stream_sweep<'a>(
    cfg: &RunConfig,
    command: &str,
    spec: &'a SweepSpec,
    interrupt: &AtomicBool,
) -> Step<(Vec<Row>, bool, TableWriter<'a>)> {
    spec.validate()?;
    cfg.basis.validate()?;
    let mut w = TableWriter::begin(cfg, command, spec)?;
    let mut all = Vec::with_capacity(spec.len());
    let mut truncated = false;
    for start in (0..spec.len()).step_by(CHUNK) {
        if interrupt.load(Ordering::SeqCst) {
            truncated = true;
            break;
        }
        let end = (start + CHUNK).min(spec.len());
        let rows: Vec<Row> = (start..end)
            .into_par_iter()
            .map(|i| evaluate_point(spec, &cfg.basis, i))
            .collect();
        w.rows(&rows)?;
        all.extend(rows);
    }
    Ok((all, truncated, w))
}

fn sweep_summary(spec: &SweepSpec, rows: &[Row], truncated: bool) -> (i32, String) {
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    let mut violations = 0;
    for (k, q) in spec.outputs.iter().enumerate() {
        for r in rows {
            let Some(v) = r.values[k].as_f64() else { continue };
            match q {
                Quantity::AuditMargin if v < -MARGIN_TOL => violations += 1,
                Quantity::AuditResidual if v >= IDENTITY_TOL => violations += 1,
                _ => {}
            }
        }
    }
    let mut s = format!("{} of {} rows written, {failed} with per-point errors", rows.len(), spec.len());
    if truncated {
        s.push_str("; interrupted, output truncated");
        return (EXIT_INTERRUPTED, s);
    }
    if violations > 0 {
        s.push_str(&format!("; {violations} audit violations"));
        return (EXIT_VIOLATION, s);
    }
    (EXIT_OK, s)
}

fn sweep_spec(cfg: &RunConfig) -> Step<SweepSpec> {
    let sec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Outcome::config("the sweep command needs a [sweep] section"))?;
    Ok(SweepSpec {
        base: cfg.scenario.clone(),
        axes: sec.axes.clone(),
        outputs: sec.outputs.clone(),
    })
}

pub fn sweep(cfg: &RunConfig, interrupt: &AtomicBool) -> Outcome {
    let run = || -> Step<Outcome> {
        let spec = sweep_spec(cfg)?;
        let (rows, truncated, w) = stream_sweep(cfg, "sweep", &spec, interrupt)?;
        w.finish(truncated, None)?;
        let (code, s) = sweep_summary(&spec, &rows, truncated);
        Ok(Outcome::new(code, s))
    };
    run().unwrap_or_else(|o| o)
}

/// Default regime map over (moment, T_B) around the SNR = 1 boundary.
pub fn default_regime_axes(cfg: &RunConfig) -> Vec<Axis> {
    let d = cfg.scenario.distance;
    vec![
        Axis {
            parameter: Parameter::Moment,
            range: RangeSpec::log(0.1 * d, 1e4 * d, 41),
        },
        Axis {
            parameter: Parameter::TB,
            range: RangeSpec::log(0.05 * d, 0.95 * d, 19),
        },
    ]
}

pub fn regime_outputs() -> Vec<Quantity> {
    vec![
        Quantity::Snr,
        Quantity::NEstimate,
        Quantity::BobCanKnow,
        Quantity::AliceDecoheres,
        Quantity::Regime,
    ]
}

/// Protocol-respecting rows with Bob knowing the path while Alice stays
/// coherent; `None` unless the needed columns were requested.
fn paradox_cells(spec: &SweepSpec, rows: &[Row]) -> Option<usize> {
    let col = |q: Quantity| spec.outputs.iter().position(|o| *o == q);
    let (b, a, r) = (col(Quantity::BobCanKnow)?, col(Quantity::AliceDecoheres)?, col(Quantity::Regime)?);
    Some(
        rows.iter()
            .filter(|row| {
                row.values[b] == Cell::Flag(true)
                    && row.values[a] == Cell::Flag(false)
                    && row.values[r] != Cell::Text("ProtocolViolated")
            })
            .count(),
    )
}

pub fn regime_map(cfg: &RunConfig, interrupt: &AtomicBool) -> Outcome {
    let run = || -> Step<Outcome> {
        let (axes, mut outputs, contour_spec) = match &cfg.sweep {
            Some(s) => (s.axes.clone(), s.outputs.clone(), s.contour.clone()),
            None => (default_regime_axes(cfg), regime_outputs(), None),
        };
        if axes.len() != 2 {
            return Err(Outcome::config("regime-map needs exactly two sweep axes"));
        }
        let quantity = contour_spec.as_ref().map(|c| c.quantity).unwrap_or(Quantity::Snr);
        let level = contour_spec
            .and_then(|c| c.level)
            .unwrap_or(cfg.scenario.thresholds.which_path);
        if !outputs.contains(&quantity) {
            outputs.push(quantity);
        }
        let spec = SweepSpec {
            base: cfg.scenario.clone(),
            axes,
            outputs,
        };
        let (rows, truncated, w) = stream_sweep(cfg, "regime-map", &spec, interrupt)?;
        let c = if truncated { None } else { Some(contour(&spec, &rows, quantity, level)?) };
        w.finish(truncated, c.as_deref())?;
        let paradox = paradox_cells(&spec, &rows);
        let (code, mut s) = sweep_summary(&spec, &rows, truncated);
        if let Some(c) = &c {
            s.push_str(&format!("; {} contour points at {} = {level}", c.len(), quantity.as_str()));
        }
        if let Some(p) = paradox {
            s.push_str(&format!("; {p} protocol-respecting cells with Bob knowing and Alice coherent"));
        }
        Ok(Outcome::new(code, s))
    };
    run().unwrap_or_else(|o| o)
}

pub fn audit(cfg: &RunConfig, interrupt: &AtomicBool) -> Outcome {
    let run = || -> Step<Outcome> {
        let a = &cfg.audit;
        a.validate()?;
        let mut outcomes = Vec::with_capacity(a.trials as usize);
        let mut truncated = false;
        let chunk = CHUNK as u64 * 4;
        let mut start = 0;
        while start < a.trials {
            if interrupt.load(Ordering::SeqCst) {
                truncated = true;
                break;
            }
            let end = (start + chunk).min(a.trials);
            let part = (start..end)
                .into_par_iter()
                .map(|t| audit_trial(a, t))
                .collect::<Result<Vec<_>, Error>>()?;
            outcomes.extend(part);
            start = end;
        }
        let summary = AuditSummary::from_outcomes(a, outcomes);
        let body = serde_json::to_value(&summary).map_err(|e| Outcome::config(e.to_string()))?;
        let mut extra = Map::new();
        extra.insert("truncated".into(), json!(truncated));
        write_record(cfg, "audit", "summary", &body, extra)?;

        let text = format!(
            "{} trials | worst margin {:e} | worst identity residual {:e} | worst order residual {:e} | worst squeezed residual {:e} | {} violations",
            summary.trials,
            summary.worst_margin,
            summary.worst_identity_residual,
            summary.worst_order_residual,
            summary.worst_active_joint_residual,
            summary.violations
        );
        let code = if truncated {
            EXIT_INTERRUPTED
        } else if summary.pass {
            EXIT_OK
        } else {
            EXIT_VIOLATION
        };
        Ok(Outcome::new(code, text))
    };
    run().unwrap_or_else(|o| o)
}

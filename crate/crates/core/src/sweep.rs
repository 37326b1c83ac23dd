//! Grids over scenario parameters, regime maps and power-law fits.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::decoherence::{evaluate, DecoherenceReport};
use crate::radiation::SpectralSettings;
use crate::scenario::Scenario;
use crate::{Error, Result};

pub const MAX_AXES: usize = 2;
pub const MIN_FIT_POINTS: usize = 5;

/// Scenario field an axis varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    QA,
    MA,
    Separation,
    Distance,
    TA,
    TB,
    /// Effective moment of the active field, set by rescaling the charge or mass.
    Moment,
}

impl Parameter {
    pub fn as_str(self) -> &'static str {
        match self {
            Parameter::QA => "q_a",
            Parameter::MA => "m_a",
            Parameter::Separation => "separation",
            Parameter::Distance => "distance",
            Parameter::TA => "t_a",
            Parameter::TB => "t_b",
            Parameter::Moment => "moment",
        }
    }

    pub fn apply(self, s: &Scenario, v: f64) -> Result<Scenario> {
        let mut out = s.clone();
        match self {
            Parameter::QA => out.q_a = v,
            Parameter::MA => out.m_a = v,
            Parameter::Separation => out.separation = v,
            Parameter::Distance => out.distance = v,
            Parameter::TA => out.t_a = v,
            Parameter::TB => out.t_b = v,
            Parameter::Moment => return s.with_moment(v),
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    #[serde(default)]
    pub spacing: Spacing,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl RangeSpec {
    pub fn log(min: f64, max: f64, count: usize) -> Self {
        RangeSpec {
            spacing: Spacing::Log,
            min,
            max,
            count,
        }
    }

    pub fn linear(min: f64, max: f64, count: usize) -> Self {
        RangeSpec {
            spacing: Spacing::Linear,
            min,
            max,
            count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidSweep(format!("count must be at least 2, got {}", self.count)));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidSweep("range bounds must be finite".into()));
        }
        if self.spacing == Spacing::Log && !(self.min > 0.0 && self.max > 0.0) {
            return Err(Error::InvalidSweep("log ranges need positive bounds".into()));
        }
        Ok(())
    }

    /// Grid value `i`; the end points are returned exactly.
    pub fn value(&self, i: usize) -> f64 {
        let last = self.count - 1;
        if i == 0 {
            return self.min;
        }
        if i == last {
            return self.max;
        }
        let f = i as f64 / last as f64;
        match self.spacing {
            Spacing::Linear => self.min + f * (self.max - self.min),
            Spacing::Log => {
                let (a, b) = (libm::log(self.min), libm::log(self.max));
                libm::exp(a + f * (b - a))
            }
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "FlatAxis", into = "FlatAxis")]
pub struct Axis {
    pub parameter: Parameter,
    pub range: RangeSpec,
}

/// Serialized form of [`Axis`]: `{ parameter, spacing, min, max, count }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlatAxis {
    parameter: Parameter,
    #[serde(default)]
    spacing: Spacing,
    min: f64,
    max: f64,
    count: usize,
}

impl From<FlatAxis> for Axis {
    fn from(a: FlatAxis) -> Self {
        Axis {
            parameter: a.parameter,
            range: RangeSpec {
                spacing: a.spacing,
                min: a.min,
                max: a.max,
                count: a.count,
            },
        }
    }
}

impl From<Axis> for FlatAxis {
    fn from(a: Axis) -> Self {
        FlatAxis {
            parameter: a.parameter,
            spacing: a.range.spacing,
            min: a.range.min,
            max: a.range.max,
            count: a.range.count,
        }
    }
}

/// Output columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    DAlice,
    DBob,
    NEntangling,
    /// Closed-form order-of-magnitude estimate of the entangling number.
    NEstimate,
    Snr,
    Regime,
    BobCanKnow,
    AliceDecoheres,
    AuditMargin,
    AuditResidual,
    RadiatedEnergy,
    MeanFrequency,
    Capped,
}

impl Quantity {
    pub const ALL: [Quantity; 13] = [
        Quantity::DAlice,
        Quantity::DBob,
        Quantity::NEntangling,
        Quantity::NEstimate,
        Quantity::Snr,
        Quantity::Regime,
        Quantity::BobCanKnow,
        Quantity::AliceDecoheres,
        Quantity::AuditMargin,
        Quantity::AuditResidual,
        Quantity::RadiatedEnergy,
        Quantity::MeanFrequency,
        Quantity::Capped,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::DAlice => "d_alice",
            Quantity::DBob => "d_bob",
            Quantity::NEntangling => "n_entangling",
            Quantity::NEstimate => "n_estimate",
            Quantity::Snr => "snr",
            Quantity::Regime => "regime",
            Quantity::BobCanKnow => "bob_can_know",
            Quantity::AliceDecoheres => "alice_decoheres",
            Quantity::AuditMargin => "audit_margin",
            Quantity::AuditResidual => "audit_residual",
            Quantity::RadiatedEnergy => "radiated_energy",
            Quantity::MeanFrequency => "mean_frequency",
            Quantity::Capped => "capped",
        }
    }

    /// Whether the quantity needs the radiated spectrum.
    pub fn needs_spectrum(self) -> bool {
        !matches!(
            self,
            Quantity::NEstimate | Quantity::Snr | Quantity::Regime | Quantity::BobCanKnow | Quantity::AliceDecoheres
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: Scenario,
    pub axes: Vec<Axis>,
    pub outputs: Vec<Quantity>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > MAX_AXES {
            return Err(Error::InvalidSweep(format!(
                "a sweep has 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        for a in &self.axes {
            a.range.validate()?;
        }
        if self.axes.len() == 2 {
            let (p, q) = (self.axes[0].parameter, self.axes[1].parameter);
            let moment_clash = |x: Parameter, y: Parameter| {
                x == Parameter::Moment && matches!(y, Parameter::QA | Parameter::MA | Parameter::Separation)
            };
            if p == q || moment_clash(p, q) || moment_clash(q, p) {
                return Err(Error::InvalidSweep(format!(
                    "axes {} and {} vary the same quantity",
                    p.as_str(),
                    q.as_str()
                )));
            }
        }
        if self.outputs.is_empty() {
            return Err(Error::InvalidSweep("no outputs requested".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.range.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis indices of row `index`, row-major (last axis fastest).
    pub fn indices(&self, mut index: usize) -> Vec<usize> {
        let mut out = alloc::vec![0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            out[k] = index % a.range.count;
            index /= a.range.count;
        }
        out
    }

    pub fn coordinates(&self, index: usize) -> Vec<f64> {
        self.indices(index)
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.range.value(i))
            .collect()
    }

    pub fn scenario_at(&self, index: usize) -> Result<Scenario> {
        let mut s = self.base.clone();
        for (v, a) in self.coordinates(index).into_iter().zip(&self.axes) {
            s = a.parameter.apply(&s, v)?;
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Number(f64),
    Flag(bool),
    Text(&'static str),
    Missing,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowError {
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub index: usize,
    pub coordinates: Vec<f64>,
    pub values: Vec<Cell>,
    pub error: Option<RowError>,
}

fn cell(q: Quantity, s: &Scenario, r: Option<&DecoherenceReport>) -> Cell {
    let regime = s.classify_regime();
    match q {
        Quantity::NEstimate => return Cell::Number(s.entangling_estimate()),
        Quantity::Snr => return Cell::Number(s.whichpath_snr()),
        Quantity::Regime => return Cell::Text(regime.narrative.as_str()),
        Quantity::BobCanKnow => return Cell::Flag(regime.bob_can_know),
        Quantity::AliceDecoheres => return Cell::Flag(regime.alice_decoheres),
        _ => {}
    }
    let Some(r) = r else { return Cell::Missing };
    match q {
        Quantity::DAlice => Cell::Number(r.d_alice),
        Quantity::DBob => Cell::Number(r.d_bob),
        Quantity::NEntangling => Cell::Number(r.n_entangling),
        Quantity::AuditMargin => Cell::Number(r.margin),
        Quantity::AuditResidual => Cell::Number(r.identity_residual),
        Quantity::RadiatedEnergy => Cell::Number(r.radiated_energy),
        Quantity::MeanFrequency => Cell::Number(r.mean_frequency),
        Quantity::Capped => Cell::Flag(r.capped),
        _ => Cell::Missing,
    }
}

fn try_point(spec: &SweepSpec, settings: &SpectralSettings, index: usize) -> Result<Vec<Cell>> {
    let s = spec.scenario_at(index)?;
    s.validate()?;
    let report = if spec.outputs.iter().any(|q| q.needs_spectrum()) {
        Some(evaluate(&s, settings)?)
    } else {
        None
    };
    Ok(spec.outputs.iter().map(|&q| cell(q, &s, report.as_ref())).collect())
}

/// One grid point. Failures are kept in the row.
pub fn evaluate_point(spec: &SweepSpec, settings: &SpectralSettings, index: usize) -> Row {
    let coordinates = spec.coordinates(index);
    match try_point(spec, settings, index) {
        Ok(values) => Row {
            index,
            coordinates,
            values,
            error: None,
        },
        Err(e) => Row {
            index,
            coordinates,
            values: spec.outputs.iter().map(|_| Cell::Missing).collect(),
            error: Some(RowError {
                code: e.code(),
                message: format!("{e}"),
            }),
        },
    }
}

/// Rows `range` of the sweep; concatenating consecutive ranges gives the full sweep.
pub fn run_sweep_range(spec: &SweepSpec, settings: &SpectralSettings, range: core::ops::Range<usize>) -> Result<Vec<Row>> {
    spec.validate()?;
    settings.validate()?;
    if range.end > spec.len() {
        return Err(Error::InvalidSweep(format!(
            "row range ends at {} but the sweep has {} rows",
            range.end,
            spec.len()
        )));
    }
    Ok(range.map(|i| evaluate_point(spec, settings, i)).collect())
}

pub fn run_sweep(spec: &SweepSpec, settings: &SpectralSettings) -> Result<Vec<Row>> {
    run_sweep_range(spec, settings, 0..spec.len())
}

/// Numeric column of `q`, `None` where the row failed.
pub fn column(spec: &SweepSpec, rows: &[Row], q: Quantity) -> Result<Vec<Option<f64>>> {
    let k = spec
        .outputs
        .iter()
        .position(|&o| o == q)
        .ok_or_else(|| Error::InvalidSweep(format!("{} was not requested", q.as_str())))?;
    Ok(rows.iter().map(|r| r.values[k].as_f64()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourPoint {
    /// Value on the second axis.
    pub fixed: f64,
    /// Interpolated value on the first axis where the quantity crosses the level.
    pub crossing: f64,
}

/// Level crossings of a positive quantity along the first axis of a two-axis
/// sweep, one per value of the second axis that brackets the level.
///
/// Interpolation is linear in `(ln x, ln y)`, exact for power laws.
pub fn contour(spec: &SweepSpec, rows: &[Row], q: Quantity, level: f64) -> Result<Vec<ContourPoint>> {
    if spec.axes.len() != 2 {
        return Err(Error::InvalidSweep("contours need a two-axis sweep".into()));
    }
    if rows.len() != spec.len() {
        return Err(Error::InvalidSweep("rows do not cover the sweep".into()));
    }
    if !(level > 0.0) {
        return Err(Error::InvalidSweep("contour level must be positive".into()));
    }
    let col = column(spec, rows, q)?;
    let (n0, n1) = (spec.axes[0].range.count, spec.axes[1].range.count);
    let xs = spec.axes[0].range.values();
    let ll = libm::log(level);
    let mut out = Vec::new();
    for j in 0..n1 {
        let fixed = spec.axes[1].range.value(j);
        for i in 0..n0 - 1 {
            let (Some(y0), Some(y1)) = (col[i * n1 + j], col[(i + 1) * n1 + j]) else {
                continue;
            };
            if !(y0 > 0.0 && y1 > 0.0 && xs[i] > 0.0 && xs[i + 1] > 0.0) {
                continue;
            }
            if (y0 - level) * (y1 - level) > 0.0 || y0 == y1 {
                continue;
            }
            let (l0, l1) = (libm::log(y0), libm::log(y1));
            let (x0, x1) = (libm::log(xs[i]), libm::log(xs[i + 1]));
            let crossing = libm::exp(x0 + (ll - l0) * (x1 - x0) / (l1 - l0));
            out.push(ContourPoint { fixed, crossing });
            break;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_powerlaw(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    if xs.len() != ys.len() {
        return Err(Error::Dimension {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidData(format!(
            "a power-law fit needs at least {MIN_FIT_POINTS} points, got {}",
            xs.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidData("power-law fits need positive finite data".into()));
    }
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| libm::log(*v)).collect();
    let ly: Vec<f64> = ys.iter().map(|v| libm::log(*v)).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidData("x values are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(PowerLawFit {
        exponent: slope,
        prefactor: libm::exp(intercept),
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn base() -> Scenario {
        Scenario::electromagnetic(1.0, 1.0, 100.0, 10.0, 10.0)
    }

    #[test]
    fn ranges() {
        let r = RangeSpec::log(1.0, 100.0, 13);
        let v = r.values();
        assert_eq!(v.len(), 13);
        assert_eq!((v[0], v[12]), (1.0, 100.0));
        assert!((v[6] - 10.0).abs() < 1e-12);
        assert!(RangeSpec::log(0.0, 1.0, 3).validate().is_err());
        assert!(RangeSpec::linear(0.0, 1.0, 1).validate().is_err());
        assert_eq!(RangeSpec::linear(0.0, 1.0, 5).values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn one_axis_cardinality() {
        let spec = SweepSpec {
            base: base(),
            axes: vec![Axis {
                parameter: Parameter::TA,
                range: RangeSpec::log(1.0, 100.0, 13),
            }],
            outputs: vec![Quantity::Snr, Quantity::Regime],
        };
        let rows = run_sweep(&spec, &SpectralSettings::default()).unwrap();
        assert_eq!(rows.len(), 13);
        // T_A = 100 = D violates the protocol but still evaluates.
        assert_eq!(rows[12].values[1], Cell::Text("ProtocolViolated"));
    }

    #[test]
    fn row_major_order_and_decomposition() {
        let spec = SweepSpec {
            base: base(),
            axes: vec![
                Axis {
                    parameter: Parameter::Moment,
                    range: RangeSpec::log(0.1, 10.0, 3),
                },
                Axis {
                    parameter: Parameter::TB,
                    range: RangeSpec::linear(5.0, 50.0, 4),
                },
            ],
            outputs: vec![Quantity::Snr],
        };
        assert_eq!(spec.indices(5), vec![1, 1]);
        let s = SpectralSettings::default();
        let full = run_sweep(&spec, &s).unwrap();
        let mut parts = run_sweep_range(&spec, &s, 0..7).unwrap();
        parts.extend(run_sweep_range(&spec, &s, 7..12).unwrap());
        assert_eq!(full, parts);
        assert!(run_sweep_range(&spec, &s, 0..13).is_err());
    }

    #[test]
    fn invalid_points_are_recorded() {
        let spec = SweepSpec {
            base: base(),
            axes: vec![Axis {
                parameter: Parameter::Distance,
                range: RangeSpec::linear(-1.0, 100.0, 2),
            }],
            outputs: vec![Quantity::Snr],
        };
        let rows = run_sweep(&spec, &SpectralSettings::default()).unwrap();
        assert_eq!(rows[0].error.as_ref().unwrap().code, "invalid_scenario");
        assert_eq!(rows[0].values, vec![Cell::Missing]);
        assert!(rows[1].error.is_none());
    }

    #[test]
    fn spec_validation() {
        let mut spec = SweepSpec {
            base: base(),
            axes: vec![],
            outputs: vec![Quantity::Snr],
        };
        assert!(spec.validate().is_err());
        let ax = |p| Axis {
            parameter: p,
            range: RangeSpec::log(1.0, 2.0, 2),
        };
        spec.axes = vec![ax(Parameter::TA), ax(Parameter::TA)];
        assert!(spec.validate().is_err());
        spec.axes = vec![ax(Parameter::Moment), ax(Parameter::QA)];
        assert!(spec.validate().is_err());
        spec.axes = vec![ax(Parameter::TA), ax(Parameter::TB), ax(Parameter::Distance)];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn powerlaw_examples() {
        let xs = [1.0, 2.0, 3.0, 5.0, 8.0];
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let f = fit_powerlaw(&xs, &sq).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-12 && (f.r_squared - 1.0).abs() < 1e-12);
        let inv: Vec<f64> = xs.iter().map(|x| 7.0 / (x * x * x * x)).collect();
        let f = fit_powerlaw(&xs, &inv).unwrap();
        assert!((f.exponent + 4.0).abs() < 1e-12 && (f.prefactor - 7.0).abs() < 1e-10);
        assert!(fit_powerlaw(&xs[..4], &sq[..4]).is_err());
        assert!(fit_powerlaw(&[1.0, 2.0, 3.0, 4.0, 0.0], &sq).is_err());
    }

    #[test]
    fn snr_contour_is_exact() {
        let d = 100.0;
        let spec = SweepSpec {
            base: base(),
            axes: vec![
                Axis {
                    parameter: Parameter::Moment,
                    range: RangeSpec::log(1e2, 1e7, 41),
                },
                Axis {
                    parameter: Parameter::TB,
                    range: RangeSpec::log(1.0, 90.0, 7),
                },
            ],
            outputs: vec![Quantity::Snr],
        };
        let rows = run_sweep(&spec, &SpectralSettings::default()).unwrap();
        let c = contour(&spec, &rows, Quantity::Snr, 1.0).unwrap();
        assert_eq!(c.len(), 7);
        for p in c {
            let expect = d * d * d / (p.fixed * p.fixed);
            assert!(((p.crossing - expect) / expect).abs() < 1e-12, "{p:?}");
        }
    }
}

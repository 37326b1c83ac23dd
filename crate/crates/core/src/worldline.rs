//! Branch-difference multipole histories.
//!
//! The difference between the two branch moments is zero before the split,
//! rises over a slow split ramp, holds at the effective moment and falls back
//! to zero over the recombination ramp `[0, T_A]`. The history is piecewise
//! analytic, so derivatives are evaluated in closed form; the uniform sample
//! grid is kept for export and for the aliasing check in [`crate::radiation`].

use alloc::vec::Vec;
use core::f64::consts::PI;
use serde::{Deserialize, Serialize};

use crate::scenario::{FieldKind, Scenario, Window};
use crate::{Error, Result};

/// Minimum number of grid samples across the recombination ramp.
pub const MIN_SAMPLES_PER_RAMP: usize = 64;
/// Default samples per ramp; satisfies both the 64-sample floor and an 8x
/// Nyquist margin above the default `64 / T_A` spectral cutoff.
pub const DEFAULT_SAMPLES_PER_RAMP: usize = 256;
/// Hold between the end of the split and the start of recombination, in `T_A`.
pub const HOLD_FACTOR: f64 = 1.0;

const GAUSSIAN_WIDTH: f64 = 1.0 / 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultipoleOrder {
    Dipole,
    Quadrupole,
}

impl MultipoleOrder {
    pub fn for_field(kind: FieldKind) -> Self {
        match kind {
            FieldKind::Electromagnetic => MultipoleOrder::Dipole,
            FieldKind::Gravitational => MultipoleOrder::Quadrupole,
        }
    }

    /// Derivative order that sources radiation (2 for dipole, 3 for quadrupole).
    pub fn radiating_derivative(self) -> usize {
        match self {
            MultipoleOrder::Dipole => 2,
            MultipoleOrder::Quadrupole => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    SplitThenRecombine,
    /// Mirror image under `t -> -t`.
    RecombineThenSplit,
}

/// k-th derivative of the unit ramp at `x` in `[0, 1]`, `k <= 3`.
pub fn window_derivative(window: Window, k: usize, x: f64) -> f64 {
    match window {
        Window::Smoothstep => match k {
            0 => x * x * x * (10.0 + x * (-15.0 + 6.0 * x)),
            1 => 30.0 * x * x * (1.0 - x) * (1.0 - x),
            2 => 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x),
            3 => 60.0 * (1.0 + x * (-6.0 + 6.0 * x)),
            _ => panic!("derivative order {k} not supported"),
        },
        Window::RaisedCosine => match k {
            0 => 0.5 * (1.0 - libm::cos(PI * x)),
            1 => 0.5 * PI * libm::sin(PI * x),
            2 => 0.5 * PI * PI * libm::cos(PI * x),
            3 => -0.5 * PI * PI * PI * libm::sin(PI * x),
            _ => panic!("derivative order {k} not supported"),
        },
        Window::Gaussian => {
            let s = GAUSSIAN_WIDTH;
            let edge = libm::erf(0.5 / (s * core::f64::consts::SQRT_2));
            let z = (x - 0.5) / s;
            if k == 0 {
                return 0.5 * (libm::erf(z / core::f64::consts::SQRT_2) + edge) / edge;
            }
            let first = libm::exp(-0.5 * z * z) / (edge * s * libm::sqrt(2.0 * PI));
            match k {
                1 => first,
                2 => -first * z / s,
                3 => first * (z * z - 1.0) / (s * s),
                _ => panic!("derivative order {k} not supported"),
            }
        }
    }
}

/// One piece of the history: a constant hold (`window == None`) or a ramp
/// from `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub duration: f64,
    pub from: f64,
    pub to: f64,
    pub window: Option<Window>,
}

impl Segment {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }

    fn contains(&self, t: f64) -> bool {
        t >= self.start && t < self.end()
    }

    /// k-th derivative at a local coordinate `x` in `[0, 1]`.
    pub fn derivative_at_unit(&self, k: usize, x: f64) -> f64 {
        match self.window {
            None => {
                if k == 0 {
                    self.from
                } else {
                    0.0
                }
            }
            Some(w) => {
                let scale = (self.to - self.from) / libm::pow(self.duration, k as f64);
                if k == 0 {
                    self.from + (self.to - self.from) * window_derivative(w, 0, x)
                } else {
                    scale * window_derivative(w, k, x)
                }
            }
        }
    }

    pub fn derivative(&self, k: usize, t: f64) -> f64 {
        self.derivative_at_unit(k, (t - self.start) / self.duration)
    }

    fn mirrored(&self) -> Segment {
        Segment {
            start: -self.end(),
            duration: self.duration,
            from: self.to,
            to: self.from,
            window: self.window,
        }
    }
}

/// Time-sampled branch-difference dipole or principal quadrupole moment.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipoleHistory {
    order: MultipoleOrder,
    segments: Vec<Segment>,
    ramp_duration: f64,
    plateau: f64,
    dt: f64,
    t: Vec<f64>,
    moment: Vec<f64>,
}

impl MultipoleHistory {
    /// Assembles a history from contiguous segments and samples it with step
    /// `ramp_duration / samples_per_ramp`.
    pub fn from_segments(
        order: MultipoleOrder,
        segments: Vec<Segment>,
        ramp_duration: f64,
        samples_per_ramp: usize,
    ) -> Result<Self> {
        if samples_per_ramp < MIN_SAMPLES_PER_RAMP {
            return Err(Error::Resolution {
                samples: samples_per_ramp,
                required: MIN_SAMPLES_PER_RAMP,
            });
        }
        if segments.is_empty() {
            return Err(Error::InvalidData("history needs at least one segment".into()));
        }
        for pair in segments.windows(2) {
            let gap = (pair[0].end() - pair[1].start).abs();
            if gap > 1e-9 * ramp_duration.max(1.0) {
                return Err(Error::InvalidData("history segments must be contiguous".into()));
            }
        }
        let dt = ramp_duration / samples_per_ramp as f64;
        let start = segments[0].start - 2.0 * dt;
        let stop = segments[segments.len() - 1].end() + 2.0 * dt;
        let n = libm::ceil((stop - start) / dt) as usize + 1;
        let plateau = segments
            .iter()
            .map(|s| s.from.abs().max(s.to.abs()))
            .fold(0.0, f64::max);
        let mut h = MultipoleHistory {
            order,
            segments,
            ramp_duration,
            plateau,
            dt,
            t: Vec::with_capacity(n),
            moment: Vec::with_capacity(n),
        };
        for j in 0..n {
            let t = start + j as f64 * dt;
            h.t.push(t);
            h.moment.push(h.value(t));
        }
        Ok(h)
    }

    pub fn order(&self) -> MultipoleOrder {
        self.order
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Duration of the recombination ramp `T_A`.
    pub fn ramp_duration(&self) -> f64 {
        self.ramp_duration
    }

    /// Largest |moment|, equal to the effective moment.
    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn samples(&self) -> &[f64] {
        &self.moment
    }

    /// `[first, last]` instants of the (closed) support.
    pub fn support(&self) -> (f64, f64) {
        (self.segments[0].start, self.segments[self.segments.len() - 1].end())
    }

    pub fn value(&self, t: f64) -> f64 {
        self.derivative(0, t)
    }

    /// Classical k-th derivative (`k <= 3`); zero outside the support. At a
    /// breakpoint the right-hand segment is used.
    pub fn derivative(&self, k: usize, t: f64) -> f64 {
        self.segments
            .iter()
            .find(|s| s.contains(t))
            .map_or(0.0, |s| s.derivative(k, t))
    }

    pub fn sampled_derivative(&self, k: usize) -> Vec<f64> {
        self.t.iter().map(|&t| self.derivative(k, t)).collect()
    }

    /// Jumps `f^(k)(b+) - f^(k)(b-)` at every breakpoint, including the two
    /// ends of the support. Zero jumps are omitted.
    pub fn jumps(&self, k: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let n = self.segments.len();
        for i in 0..=n {
            let left = if i == 0 {
                0.0
            } else {
                self.segments[i - 1].derivative_at_unit(k, 1.0)
            };
            let right = if i == n {
                0.0
            } else {
                self.segments[i].derivative_at_unit(k, 0.0)
            };
            let at = if i == n { self.segments[n - 1].end() } else { self.segments[i].start };
            let jump = right - left;
            if jump != 0.0 {
                out.push((at, jump));
            }
        }
        out
    }

    /// The same history under `t -> -t`.
    pub fn mirrored(&self) -> Result<Self> {
        let segments = self.segments.iter().rev().map(Segment::mirrored).collect();
        let samples = libm::round(self.ramp_duration / self.dt) as usize;
        MultipoleHistory::from_segments(self.order, segments, self.ramp_duration, samples)
    }
}

/// Difference history with the default split-then-recombine ordering.
pub fn build_branch_difference(s: &Scenario, samples_per_ramp: usize) -> Result<MultipoleHistory> {
    build_branch_difference_ordered(s, samples_per_ramp, Ordering::SplitThenRecombine)
}

pub fn build_branch_difference_ordered(
    s: &Scenario,
    samples_per_ramp: usize,
    ordering: Ordering,
) -> Result<MultipoleHistory> {
    s.validate()?;
    let plateau = s.effective_moment();
    let ta = s.t_a;
    let split = s.split_factor * ta;
    let hold = HOLD_FACTOR * ta;
    let segments = alloc::vec![
        Segment {
            start: -hold - split,
            duration: split,
            from: 0.0,
            to: plateau,
            window: Some(s.ramp),
        },
        Segment {
            start: -hold,
            duration: hold,
            from: plateau,
            to: plateau,
            window: None,
        },
        Segment {
            start: 0.0,
            duration: ta,
            from: plateau,
            to: 0.0,
            window: Some(s.ramp),
        },
    ];
    let h = MultipoleHistory::from_segments(MultipoleOrder::for_field(s.field), segments, ta, samples_per_ramp)?;
    match ordering {
        Ordering::SplitThenRecombine => Ok(h),
        Ordering::RecombineThenSplit => h.mirrored(),
    }
}

/// A spacetime event `(t, r)`, with `r` the distance from Alice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub r: f64,
}

/// Which source episodes lie inside the past light cone of an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CausalSupport {
    /// The static branch-difference field, set up by the split, has arrived.
    pub static_difference: bool,
    /// Any change sourced by the recombination ramp has arrived.
    pub recombination_change: bool,
}

/// Alice is treated as a point at `r = 0` (far zone, `d << D`); recombination
/// starts at `t = 0` and the split ends a hold before it.
pub fn causal_support(s: &Scenario, event: Event) -> CausalSupport {
    let retarded = event.t - event.r.abs();
    let split_start = -(HOLD_FACTOR + s.split_factor) * s.t_a;
    CausalSupport {
        static_difference: s.effective_moment() != 0.0 && retarded >= split_start,
        recombination_change: retarded >= 0.0,
    }
}

/// True iff a recombination-sourced change of the difference field can be
/// nonzero at the event.
pub fn causal_support_check(s: &Scenario, event: Event) -> bool {
    causal_support(s, event).recombination_change
}

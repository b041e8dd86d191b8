//! Fixed-step continuous/discrete co-simulation.
//!
//! Continuous plant states advance with classical RK4 at `dt`. Discrete
//! controllers run every `t_sample` and their outputs are held constant
//! until the next sample. At each step boundary `t_k = k·dt` the engine, in
//! order: applies due events, runs the controllers if `t_k` is a sample
//! instant, records a trace row if `k` is a multiple of the decimation, then
//! integrates to `t_{k+1}`.

use std::io::{self, Write};
use std::ops::Range;

use indexmap::IndexMap;

use crate::error::{ensure_positive, Error, Result};
use crate::tuning::PiGains;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub t_end: f64,
    pub dt: f64,
    pub t_sample: f64,
    pub record_decimation: usize,
}

pub const DEFAULT_DT: f64 = 1e-6;
pub const DEFAULT_T_SAMPLE: f64 = 1e-5;
pub const DEFAULT_RECORD_DECIMATION: usize = 100;

impl SimConfig {
    pub fn new(t_end: f64, dt: f64, t_sample: f64, record_decimation: usize) -> Result<Self> {
        ensure_positive("t_end", t_end)?;
        ensure_positive("dt", dt)?;
        ensure_positive("t_sample", t_sample)?;
        if record_decimation == 0 {
            return Err(Error::InvalidArgument(
                "record_decimation must be at least 1".into(),
            ));
        }
        let ratio = t_sample / dt;
        if ratio.round() < 1.0 || (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return Err(Error::InvalidArgument(format!(
                "t_sample = {t_sample} s is not an integer multiple of dt = {dt} s"
            )));
        }
        Ok(Self {
            t_end,
            dt,
            t_sample,
            record_decimation,
        })
    }

    /// 1 µs integration step, 100 kHz controller sampling.
    pub fn with_defaults(t_end: f64) -> Result<Self> {
        Self::new(t_end, DEFAULT_DT, DEFAULT_T_SAMPLE, DEFAULT_RECORD_DECIMATION)
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil() as usize
    }

    pub fn steps_per_sample(&self) -> usize {
        (self.t_sample / self.dt).round() as usize
    }

    pub fn dt_record(&self) -> f64 {
        self.dt * self.record_decimation as f64
    }

    /// Index of the first step boundary at or after `t`.
    pub fn step_at(&self, t: f64) -> usize {
        (t / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepEvent {
    pub t: f64,
    pub target: String,
    pub new_value: f64,
}

impl StepEvent {
    pub fn new(t: f64, target: impl Into<String>, new_value: f64) -> Self {
        Self {
            t,
            target: target.into(),
            new_value,
        }
    }
}

/// Uniformly sampled named signals.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub t0: f64,
    pub dt_record: f64,
    signals: IndexMap<String, Vec<f64>>,
}

impl SimTrace {
    pub fn new<S: AsRef<str>>(t0: f64, dt_record: f64, names: &[S]) -> Result<Self> {
        ensure_positive("dt_record", dt_record)?;
        let mut signals = IndexMap::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            if signals.insert(n.to_string(), Vec::new()).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate signal `{n}`")));
            }
        }
        Ok(Self {
            t0,
            dt_record,
            signals,
        })
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.signals.len(), "row width");
        for (v, col) in row.iter().zip(self.signals.values_mut()) {
            col.push(*v);
        }
    }

    /// Number of samples per signal.
    pub fn len(&self) -> usize {
        self.signals.values().next().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.signals.keys().map(String::as_str)
    }

    pub fn signal(&self, name: &str) -> Result<&[f64]> {
        self.signals
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownSignal(name.to_string()))
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt_record
    }

    pub fn t_last(&self) -> f64 {
        self.time(self.len().saturating_sub(1))
    }

    /// Sample indices with `t_start ≤ t ≤ t_end`.
    pub fn window(&self, t_start: f64, t_end: f64) -> Result<Range<usize>> {
        let eps = 1e-9 * self.dt_record;
        if self.is_empty() || t_start < self.t0 - eps || t_end > self.t_last() + eps || t_end < t_start {
            return Err(Error::WindowOutOfRange {
                start: t_start,
                end: t_end,
            });
        }
        let first = ((t_start - self.t0) / self.dt_record - 1e-9).ceil().max(0.0) as usize;
        let last = ((t_end - self.t0) / self.dt_record + 1e-9).floor() as usize;
        Ok(first..(last + 1).min(self.len()))
    }

    /// Writes `t_s` followed by every signal, one row per sample.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let prec = (-self.dt_record.log10()).ceil().max(0.0) as usize + 2;
        write!(w, "t_s")?;
        for n in self.signals.keys() {
            write!(w, ",{n}")?;
        }
        writeln!(w)?;
        let cols: Vec<&Vec<f64>> = self.signals.values().collect();
        for i in 0..self.len() {
            write!(w, "{:.*}", prec, self.time(i))?;
            for c in &cols {
                write!(w, ",{}", c[i])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii csv")
    }
}

/// Sampled PI controller, forward-Euler integral, optional symmetric clamp
/// with conditional integration.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePi {
    pub gains: PiGains,
    acc: f64,
    limit: Option<f64>,
}

impl DiscretePi {
    pub fn new(gains: PiGains) -> Self {
        Self {
            gains,
            acc: 0.0,
            limit: None,
        }
    }

    pub fn with_limit(mut self, limit: f64) -> Self {
        self.limit = Some(limit.abs());
        self
    }

    pub fn with_integrator(mut self, acc: f64) -> Self {
        self.acc = acc;
        self
    }

    pub fn integrator(&self) -> f64 {
        self.acc
    }

    /// `u = k_p·e + acc`, then `acc += (k_p/t_i)·e·t_sample` unless the
    /// output is clamped and the error would drive it further out.
    pub fn step(&mut self, error: f64, t_sample: f64) -> f64 {
        let raw = self.gains.k_p * error + self.acc;
        let (u, frozen) = match self.limit {
            Some(lim) if raw.abs() > lim => (raw.clamp(-lim, lim), error.signum() == raw.signum()),
            _ => (raw, false),
        };
        if !frozen {
            self.acc += self.gains.k_i() * error * t_sample;
        }
        u
    }
}

/// Scratch buffers for an allocation-free RK4 step.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
        }
    }

    /// Advances `x` by one classical Runge–Kutta step. `t` only labels a
    /// divergence error.
    pub fn step<F>(&mut self, x: &mut [f64], dt: f64, t: f64, mut f: F) -> Result<()>
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let n = x.len();
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        let check = |k: &[f64]| -> Result<()> {
            if k.iter().all(|v| v.is_finite()) {
                Ok(())
            } else {
                Err(Error::Diverged { t })
            }
        };

        f(x, k1);
        check(k1)?;
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k1[i];
        }
        f(tmp, k2);
        check(k2)?;
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k2[i];
        }
        f(tmp, k3);
        check(k3)?;
        for i in 0..n {
            tmp[i] = x[i] + dt * k3[i];
        }
        f(tmp, k4);
        check(k4)?;
        for i in 0..n {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        Ok(())
    }
}

/// Single RK4 step on a fresh scratch; see [`Rk4::step`].
pub fn integrate_step<F>(x: &mut [f64], dt: f64, t: f64, f: F) -> Result<()>
where
    F: FnMut(&[f64], &mut [f64]),
{
    Rk4::new(x.len()).step(x, dt, t, f)
}

/// An averaged converter with its digital controller.
///
/// The engine owns the continuous state vector; the model owns controller
/// state and the held controller outputs that the derivative depends on.
pub trait ConverterModel {
    fn initial_state(&self) -> Vec<f64>;

    /// Plant derivatives with the currently held controller outputs.
    fn derivatives(&self, x: &[f64], dx: &mut [f64]);

    /// Runs the digital controllers at sample instant `t`.
    fn control(&mut self, t: f64, x: &[f64], t_sample: f64);

    fn signal_names(&self) -> &'static [&'static str];

    fn record(&self, t: f64, x: &[f64], out: &mut [f64]);

    fn steppable_inputs(&self) -> &'static [&'static str];

    fn apply_step(&mut self, target: &str, value: f64) -> Result<()>;
}

pub struct Simulation<M> {
    model: M,
    config: SimConfig,
    events: Vec<(usize, StepEvent)>,
    next_event: usize,
    x: Vec<f64>,
    k: usize,
    rk4: Rk4,
    trace: SimTrace,
    row: Vec<f64>,
}

impl<M: ConverterModel> Simulation<M> {
    pub fn new(model: M, config: SimConfig, events: Vec<StepEvent>) -> Result<Self> {
        let inputs = model.steppable_inputs();
        let mut prev = f64::NEG_INFINITY;
        let mut scheduled = Vec::with_capacity(events.len());
        for ev in events {
            if !inputs.contains(&ev.target.as_str()) {
                return Err(Error::UnknownSignal(ev.target));
            }
            if ev.t < prev {
                return Err(Error::InvalidArgument("events must be sorted by time".into()));
            }
            if ev.t < 0.0 || ev.t > config.t_end {
                return Err(Error::InvalidArgument(format!(
                    "event at t = {} s lies outside [0, {}] s",
                    ev.t, config.t_end
                )));
            }
            prev = ev.t;
            scheduled.push((config.step_at(ev.t), ev));
        }
        let x = model.initial_state();
        let names = model.signal_names();
        let mut trace = SimTrace::new(0.0, config.dt_record(), names)?;
        let expected_rows = config.steps() / config.record_decimation + 1;
        for name in names {
            trace.signals[*name].reserve(expected_rows);
        }
        Ok(Self {
            row: vec![0.0; names.len()],
            rk4: Rk4::new(x.len()),
            model,
            config,
            events: scheduled,
            next_event: 0,
            x,
            k: 0,
            trace,
        })
    }

    pub fn time(&self) -> f64 {
        self.k as f64 * self.config.dt
    }

    pub fn state(&self) -> &[f64] {
        &self.x
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn is_finished(&self) -> bool {
        self.k >= self.config.steps()
    }

    fn boundary(&mut self) -> Result<()> {
        let t = self.time();
        while let Some((at, ev)) = self.events.get(self.next_event) {
            if *at > self.k {
                break;
            }
            self.model.apply_step(&ev.target, ev.new_value)?;
            self.next_event += 1;
        }
        if self.k.is_multiple_of(self.config.steps_per_sample()) {
            self.model.control(t, &self.x, self.config.t_sample);
        }
        if self.k.is_multiple_of(self.config.record_decimation) {
            self.model.record(t, &self.x, &mut self.row);
            self.trace.push_row(&self.row);
        }
        Ok(())
    }

    /// Processes the current boundary and integrates one `dt`.
    pub fn step(&mut self) -> Result<()> {
        self.boundary()?;
        let t = self.time();
        let model = &self.model;
        self.rk4
            .step(&mut self.x, self.config.dt, t, |x, dx| model.derivatives(x, dx))?;
        self.k += 1;
        Ok(())
    }

    pub fn run_to_end(mut self) -> Result<(SimTrace, M)> {
        let n = self.config.steps();
        while self.k < n {
            self.step()?;
        }
        self.boundary()?;
        Ok((self.trace, self.model))
    }
}

/// Runs a model over the full horizon and returns its trace.
pub fn run<M: ConverterModel>(model: M, config: SimConfig, events: Vec<StepEvent>) -> Result<SimTrace> {
    Ok(Simulation::new(model, config, events)?.run_to_end()?.0)
}

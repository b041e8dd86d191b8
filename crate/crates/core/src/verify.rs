//! Trace comparison on per-unit deviation signals.
//!
//! A deviation signal is the scaled value minus the mean of the samples
//! recorded before the comparison window (the first sample if the window
//! starts at the trace origin).

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::sim::SimTrace;

/// A trace column and the divisor that takes it to per unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalSel<'a> {
    pub name: &'a str,
    pub scale: f64,
}

impl<'a> SignalSel<'a> {
    pub fn pu(name: &'a str) -> Self {
        Self { name, scale: 1.0 }
    }

    pub fn scaled(name: &'a str, scale: f64) -> Self {
        Self { name, scale }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    MaxAbs,
    Rms,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::MaxAbs => "max_abs",
            Metric::Rms => "rms",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub metric: Metric,
    pub limit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub t_start: f64,
    pub t_end: f64,
    /// Samples in `[t_start, t_start + blanking)` are excluded from the
    /// max-abs and RMS metrics.
    pub blanking: f64,
}

impl Window {
    pub fn new(t_start: f64, t_end: f64) -> Self {
        Self {
            t_start,
            t_end,
            blanking: 0.0,
        }
    }

    pub fn with_blanking(mut self, blanking: f64) -> Self {
        self.blanking = blanking;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub name_a: String,
    pub name_b: String,
    pub max_abs_dev: f64,
    pub rms_dev: f64,
    pub steady_state_dev: f64,
    pub window: (f64, f64),
    pub metric: Metric,
    pub tolerance_used: f64,
    pub pass: bool,
}

impl ComparisonReport {
    pub const CSV_HEADER: &'static str =
        "signal_a,signal_b,t_start_s,t_end_s,max_abs_dev_pu,rms_dev_pu,steady_state_dev_pu,metric,tolerance_pu,pass";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.name_a,
            self.name_b,
            self.window.0,
            self.window.1,
            self.max_abs_dev,
            self.rms_dev,
            self.steady_state_dev,
            self.metric,
            self.tolerance_used,
            self.pass
        )
    }

    /// The metric the tolerance applies to.
    pub fn measured(&self) -> f64 {
        match self.metric {
            Metric::MaxAbs => self.max_abs_dev,
            Metric::Rms => self.rms_dev,
        }
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} vs {} over [{} s, {} s]: {}",
            self.name_a,
            self.name_b,
            self.window.0,
            self.window.1,
            if self.pass { "PASS" } else { "FAIL" }
        )?;
        writeln!(f, "  max |dev|   {:.6e} p.u.", self.max_abs_dev)?;
        writeln!(f, "  rms dev     {:.6e} p.u.", self.rms_dev)?;
        writeln!(f, "  steady dev  {:.6e} p.u.", self.steady_state_dev)?;
        write!(
            f,
            "  {} {:.6e} <= {:.6e}",
            self.metric,
            self.measured(),
            self.tolerance_used
        )
    }
}

/// Per-unit deviation of `sel` from its mean before `t_ref`.
pub fn deviation(trace: &SimTrace, sel: SignalSel<'_>, t_ref: f64) -> Result<Vec<f64>> {
    let raw = trace.signal(sel.name)?;
    if !(sel.scale != 0.0 && sel.scale.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "scale for `{}` must be finite and non-zero",
            sel.name
        )));
    }
    let pre = (0..raw.len()).take_while(|&i| trace.time(i) < t_ref - 1e-9 * trace.dt_record);
    let n_pre = pre.clone().count();
    let offset = if n_pre == 0 {
        raw.first().copied().unwrap_or(0.0)
    } else {
        pre.map(|i| raw[i]).sum::<f64>() / n_pre as f64
    };
    Ok(raw.iter().map(|v| (v - offset) / sel.scale).collect())
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Indices of the final 10 % of `range`, at least one sample.
fn final_tenth(range: &Range<usize>) -> Range<usize> {
    let n = range.len();
    let k = (n / 10).max(1);
    range.end - k..range.end
}

/// Compares two traces over `window` on per-unit deviation signals.
pub fn align_and_compare(
    trace_a: &SimTrace,
    sel_a: SignalSel<'_>,
    trace_b: &SimTrace,
    sel_b: SignalSel<'_>,
    window: Window,
    tol: Tolerance,
) -> Result<ComparisonReport> {
    let rel = 1e-9 * trace_a.dt_record;
    if (trace_a.dt_record - trace_b.dt_record).abs() > rel {
        return Err(Error::MismatchedSampling(format!(
            "record steps {} s and {} s differ",
            trace_a.dt_record, trace_b.dt_record
        )));
    }
    if (trace_a.t0 - trace_b.t0).abs() > rel {
        return Err(Error::MismatchedSampling(format!(
            "trace origins {} s and {} s differ",
            trace_a.t0, trace_b.t0
        )));
    }
    let dev_a = deviation(trace_a, sel_a, window.t_start)?;
    let dev_b = deviation(trace_b, sel_b, window.t_start)?;
    let range = trace_a.window(window.t_start, window.t_end)?;
    let range_b = trace_b.window(window.t_start, window.t_end)?;
    if range != range_b {
        return Err(Error::MismatchedSampling("window indices differ".into()));
    }

    let blank_until = window.t_start + window.blanking;
    let diffs: Vec<f64> = range
        .clone()
        .filter(|&i| trace_a.time(i) >= blank_until - rel)
        .map(|i| dev_a[i] - dev_b[i])
        .collect();
    if diffs.is_empty() {
        return Err(Error::WindowOutOfRange {
            start: blank_until,
            end: window.t_end,
        });
    }
    let max_abs_dev = diffs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let rms_dev = (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt();
    let tail = final_tenth(&range);
    let steady_state_dev = (mean(&dev_a[tail.clone()]) - mean(&dev_b[tail])).abs();

    let measured = match tol.metric {
        Metric::MaxAbs => max_abs_dev,
        Metric::Rms => rms_dev,
    };
    Ok(ComparisonReport {
        name_a: sel_a.name.to_string(),
        name_b: sel_b.name.to_string(),
        max_abs_dev,
        rms_dev,
        steady_state_dev,
        window: (window.t_start, window.t_end),
        metric: tol.metric,
        tolerance_used: tol.limit,
        pass: measured <= tol.limit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticsOptions {
    /// Length of the averaging window ending at the last sample, s.
    pub final_window: f64,
    /// Largest accepted least-squares slope over the final window, p.u./s.
    pub max_slope: f64,
}

impl Default for StaticsOptions {
    fn default() -> Self {
        Self {
            final_window: 0.1,
            max_slope: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticsCheck {
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub slope: f64,
    pub pass: bool,
}

/// Compares the settled deviation of `sel` (relative to its mean before
/// `t_event`) with `expected_ss`.
pub fn check_statics(
    trace: &SimTrace,
    sel: SignalSel<'_>,
    t_event: f64,
    expected_ss: f64,
    tol: f64,
    opts: StaticsOptions,
) -> Result<StaticsCheck> {
    let dev = deviation(trace, sel, t_event)?;
    let t_last = trace.t_last();
    let range = trace.window((t_last - opts.final_window).max(trace.t0), t_last)?;
    let xs: Vec<f64> = range.clone().map(|i| trace.time(i)).collect();
    let ys = &dev[range];
    let slope = if xs.len() < 2 {
        0.0
    } else {
        let (mx, my) = (mean(&xs), mean(ys));
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        sxy / sxx
    };
    if !(slope.abs() <= opts.max_slope) {
        return Err(Error::NotSettled {
            signal: sel.name.to_string(),
            slope,
        });
    }
    let measured = mean(ys);
    Ok(StaticsCheck {
        measured,
        expected: expected_ss,
        tolerance: tol,
        slope,
        pass: (measured - expected_ss).abs() <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trace_from(dt: f64, cols: &[(&str, Vec<f64>)]) -> SimTrace {
        let names: Vec<&str> = cols.iter().map(|c| c.0).collect();
        let mut t = SimTrace::new(0.0, dt, &names).unwrap();
        for i in 0..cols[0].1.len() {
            let row: Vec<f64> = cols.iter().map(|c| c.1[i]).collect();
            t.push_row(&row);
        }
        t
    }

    fn exp_step(n: usize, dt: f64, t0: f64, amp: f64, tau: f64, offset: f64) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let t = i as f64 * dt;
                offset + if t < t0 { 0.0 } else { amp * (1.0 - (-(t - t0) / tau).exp()) }
            })
            .collect()
    }

    const MAX: Tolerance = Tolerance {
        metric: Metric::MaxAbs,
        limit: 1e-3,
    };

    #[test]
    fn self_comparison_is_zero() {
        let t = trace_from(0.01, &[("x", exp_step(500, 0.01, 1.0, -0.3, 0.5, 1.0))]);
        let r = align_and_compare(&t, SignalSel::pu("x"), &t, SignalSel::pu("x"), Window::new(1.0, 4.0), MAX)
            .unwrap();
        assert_eq!((r.max_abs_dev, r.rms_dev, r.steady_state_dev), (0.0, 0.0, 0.0));
        assert!(r.pass);
    }

    #[test]
    fn offsets_cancel_and_scale_applies() {
        let a = trace_from(0.01, &[("w", exp_step(500, 0.01, 1.0, -0.3, 0.5, 1.0))]);
        let b = trace_from(0.01, &[("v_V", exp_step(500, 0.01, 1.0, -105.0, 0.5, 350.0))]);
        let r = align_and_compare(
            &a,
            SignalSel::pu("w"),
            &b,
            SignalSel::scaled("v_V", 350.0),
            Window::new(1.0, 4.9),
            MAX,
        )
        .unwrap();
        assert!(r.max_abs_dev < 1e-12, "{}", r.max_abs_dev);
    }

    #[test]
    fn blanking_excludes_initial_mismatch() {
        let mut xa = vec![0.0; 100];
        xa[50] = 1.0;
        let a = trace_from(0.01, &[("x", xa)]);
        let b = trace_from(0.01, &[("x", vec![0.0; 100])]);
        let w = Window::new(0.5, 0.99);
        let hit = align_and_compare(&a, SignalSel::pu("x"), &b, SignalSel::pu("x"), w, MAX).unwrap();
        assert!(!hit.pass);
        let blanked =
            align_and_compare(&a, SignalSel::pu("x"), &b, SignalSel::pu("x"), w.with_blanking(0.005), MAX)
                .unwrap();
        assert!(blanked.pass);
    }

    #[test]
    fn mismatched_sampling_and_missing_signal() {
        let a = trace_from(0.01, &[("x", vec![0.0; 10])]);
        let b = trace_from(0.02, &[("x", vec![0.0; 10])]);
        let w = Window::new(0.0, 0.05);
        assert!(matches!(
            align_and_compare(&a, SignalSel::pu("x"), &b, SignalSel::pu("x"), w, MAX),
            Err(Error::MismatchedSampling(_))
        ));
        assert!(matches!(
            align_and_compare(&a, SignalSel::pu("y"), &a, SignalSel::pu("x"), w, MAX),
            Err(Error::UnknownSignal(_))
        ));
    }

    #[test]
    fn report_csv_row_has_header_width() {
        let t = trace_from(0.1, &[("x", vec![1.0; 20])]);
        let r = align_and_compare(&t, SignalSel::pu("x"), &t, SignalSel::pu("x"), Window::new(0.5, 1.5), MAX)
            .unwrap();
        assert_eq!(
            r.csv_row().split(',').count(),
            ComparisonReport::CSV_HEADER.split(',').count()
        );
        assert!(r.to_string().contains("PASS"));
    }

    #[test]
    fn statics_of_settled_exponential() {
        let t = trace_from(0.01, &[("v", exp_step(3001, 0.01, 2.0, -0.1, 0.3, 1.0))]);
        let c = check_statics(&t, SignalSel::pu("v"), 2.0, -0.1, 1e-3, StaticsOptions::default()).unwrap();
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn statics_zero_disturbance() {
        let t = trace_from(0.01, &[("v", vec![1.0; 300])]);
        let c = check_statics(&t, SignalSel::pu("v"), 1.0, 0.0, 1e-3, StaticsOptions::default()).unwrap();
        assert!(c.pass);
        assert_eq!(c.measured, 0.0);
    }

    #[test]
    fn statics_rejects_unsettled() {
        let t = trace_from(0.01, &[("v", exp_step(300, 0.01, 1.0, -0.1, 5.0, 1.0))]);
        let err = check_statics(&t, SignalSel::pu("v"), 1.0, -0.1, 1e-3, StaticsOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NotSettled { .. }));
    }

    proptest! {
        #[test]
        fn symmetric_and_sane(amp_a in -1.0f64..1.0, amp_b in -1.0f64..1.0,
                              tau_a in 0.05f64..2.0, tau_b in 0.05f64..2.0, blank in 0.0f64..0.5) {
            let a = trace_from(0.01, &[("x", exp_step(400, 0.01, 1.0, amp_a, tau_a, 0.2))]);
            let b = trace_from(0.01, &[("y", exp_step(400, 0.01, 1.0, amp_b, tau_b, -3.0))]);
            let w = Window::new(1.0, 3.99).with_blanking(blank);
            let tol = Tolerance { metric: Metric::Rms, limit: 0.05 };
            let ab = align_and_compare(&a, SignalSel::pu("x"), &b, SignalSel::pu("y"), w, tol).unwrap();
            let ba = align_and_compare(&b, SignalSel::pu("y"), &a, SignalSel::pu("x"), w, tol).unwrap();
            prop_assert_eq!(ab.max_abs_dev, ba.max_abs_dev);
            prop_assert_eq!(ab.rms_dev, ba.rms_dev);
            prop_assert_eq!(ab.steady_state_dev, ba.steady_state_dev);
            prop_assert!(ab.max_abs_dev >= ab.rms_dev && ab.rms_dev >= 0.0);
        }
    }
}

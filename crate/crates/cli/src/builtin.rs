//! The canonical experiments: current-reference step, dual load disturbance,
//! terminal-voltage dip and loop-gain sweep.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use duality_core::ac::{build_ac_scenario, AcControlMode, AcOperatingPoint};
use duality_core::dc::{build_dc_scenario, DcControlMode, DcOperatingPoint};
use duality_core::oracle::{reduced_step_response, ReducedModel};
use duality_core::plant::{
    current_loop_gain, current_loop_gain_ideal_feedforward, derive_plant, simplified_current_loop,
};
use duality_core::setup::Setup;
use duality_core::sim::{run, SimConfig, SimTrace, StepEvent};
use duality_core::tf::{bode_grid, log_space, BodeGrid, RationalTf};
use duality_core::verify::{
    align_and_compare, check_statics, ComparisonReport, Metric, SignalSel, StaticsOptions,
    Tolerance, Window,
};

use crate::plot::{emit_plot, PlotError, PlotSpec, Series};

pub const CC_STEP_EVENT_T: f64 = 2.0;
pub const CC_STEP_T_END: f64 = 2.2;
pub const CC_STEP_FROM: f64 = 0.5;
pub const CC_STEP_TO: f64 = 0.6;
pub const CC_STEP_WINDOW: f64 = 0.05;
pub const CC_STEP_RECORD_DT: f64 = 1e-5;
/// Overlay tolerance as a fraction of the step.
pub const CC_STEP_OVERLAY_FRACTION: f64 = 0.01;
pub const RISE_TIME_FRACTION: f64 = 0.3;

pub const DISTURBANCE_EVENT_T: f64 = 2.0;
pub const DISTURBANCE_T_END: f64 = 20.0;
pub const DISTURBANCE_MAGNITUDE: f64 = 0.25;
pub const DISTURBANCE_RECORD_DT: f64 = 1e-4;
/// Overlay RMS tolerance as a fraction of the final deviation.
pub const DISTURBANCE_RMS_FRACTION: f64 = 0.05;
pub const STATICS_TOL: f64 = 1e-3;
pub const ORACLE_TOL: f64 = 5e-3;
pub const ORACLE_SKIP: f64 = 0.05;
pub const RECOVERY_TOL: f64 = 1e-3;

pub const BODE_OMEGA_MIN: f64 = 1.0;
pub const BODE_OMEGA_MAX: f64 = 1e5;
pub const BODE_POINTS: usize = 50;
pub const LOOP_GAIN_RTOL: f64 = 1e-12;
pub const IMC_CROSSOVER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinScenario {
    CcStep,
    Disturbance,
    VoltageDip,
    Bode,
}

impl BuiltinScenario {
    pub const ALL: [BuiltinScenario; 4] = [Self::CcStep, Self::Disturbance, Self::VoltageDip, Self::Bode];

    pub fn name(self) -> &'static str {
        match self {
            Self::CcStep => "cc_step",
            Self::Disturbance => "disturbance",
            Self::VoltageDip => "voltage_dip",
            Self::Bode => "bode",
        }
    }
}

impl fmt::Display for BuiltinScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinScenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown scenario `{s}` (expected cc_step, disturbance, voltage_dip or bode)"))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BuiltinError {
    #[error(transparent)]
    Core(#[from] duality_core::Error),
    #[error(transparent)]
    Plot(#[from] PlotError),
    #[error("{0}")]
    Options(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    pub timestep: Option<f64>,
    pub t_end: Option<f64>,
}

/// A scalar pass/fail check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub expected: String,
    pub pass: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: measured {:.6e}, expected {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.expected
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct BuiltinOutcome {
    pub traces: Vec<(String, SimTrace)>,
    pub reports: Vec<ComparisonReport>,
    pub checks: Vec<Check>,
    pub responses: Vec<(String, BodeGrid)>,
    pub plots: Vec<(String, String)>,
}

impl BuiltinOutcome {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass) && self.checks.iter().all(|c| c.pass)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        for c in &self.checks {
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }

    /// Writes traces, responses, plots and a report CSV into `dir`.
    pub fn write_to(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, trace) in &self.traces {
            let path = dir.join(format!("{name}.csv"));
            trace.write_csv(io::BufWriter::new(fs::File::create(&path)?))?;
            written.push(path);
        }
        for (name, grid) in &self.responses {
            let path = dir.join(format!("{name}.csv"));
            grid.write_csv(io::BufWriter::new(fs::File::create(&path)?))?;
            written.push(path);
        }
        for (name, svg) in &self.plots {
            let path = dir.join(format!("{name}.svg"));
            fs::write(&path, svg)?;
            written.push(path);
        }
        if !self.reports.is_empty() || !self.checks.is_empty() {
            let path = dir.join("report.csv");
            let mut text = String::from(ComparisonReport::CSV_HEADER);
            text.push('\n');
            for r in &self.reports {
                text.push_str(&r.csv_row());
                text.push('\n');
            }
            text.push_str("\ncheck,measured,expected,pass\n");
            for c in &self.checks {
                text.push_str(&format!("{},{},{},{}\n", c.name, c.measured, c.expected, c.pass));
            }
            fs::write(&path, text)?;
            written.push(path);
        }
        Ok(written)
    }
}

fn decimation(dt: f64, record_dt: f64) -> usize {
    ((record_dt / dt).round() as usize).max(1)
}

fn with_timestep(setup: &Setup, opts: &RunOptions) -> Result<Setup, BuiltinError> {
    let mut s = *setup;
    if let Some(dt) = opts.timestep {
        s.dt = dt;
    }
    s.validate()?;
    Ok(s)
}

/// Runs the AC and DC converters with the droop bypassed and the same
/// per-unit current-reference step.
pub fn cc_step_traces(setup: &Setup, t_event: f64, t_end: f64) -> duality_core::Result<(SimTrace, SimTrace)> {
    let cfg = setup.sim_config(t_end, decimation(setup.dt, CC_STEP_RECORD_DT))?;
    let ac = build_ac_scenario(AcOperatingPoint::reference(), setup, AcControlMode::CurrentReference)?;
    let dc = build_dc_scenario(DcOperatingPoint::reference(), setup, DcControlMode::CurrentReference)?;
    std::thread::scope(|sc| {
        let dc_run = sc.spawn(|| run(dc, cfg, vec![StepEvent::new(t_event, "i_f_set_pu", CC_STEP_TO)]));
        let ac_trace = run(ac, cfg, vec![StepEvent::new(t_event, "i_f_d_ref_pu", CC_STEP_TO)])?;
        Ok((ac_trace, dc_run.join().expect("dc run panicked")?))
    })
}

/// Runs both droop-controlled converters with dual disturbances: AC load
/// power and DC load current each raised by `magnitude` p.u.
pub fn disturbance_traces(
    setup: &Setup,
    magnitude: f64,
    t_event: f64,
    t_end: f64,
) -> duality_core::Result<(SimTrace, SimTrace)> {
    let cfg = setup.sim_config(t_end, decimation(setup.dt, DISTURBANCE_RECORD_DT))?;
    let ac_op = AcOperatingPoint::reference();
    let dc_op = DcOperatingPoint::reference();
    let base = setup.base()?;
    let p0 = ac_op.p_o / base.s_base();
    let i0 = dc_op.p_o / dc_op.v_o / base.i_base();
    let ac = build_ac_scenario(ac_op, setup, AcControlMode::Droop)?;
    let dc = build_dc_scenario(dc_op, setup, DcControlMode::Droop)?;
    std::thread::scope(|sc| {
        let dc_run = sc.spawn(|| run(dc, cfg, vec![StepEvent::new(t_event, "i_o_pu", i0 + magnitude)]));
        let ac_trace = run(ac, cfg, vec![StepEvent::new(t_event, "p_load_pu", p0 + magnitude)])?;
        Ok((ac_trace, dc_run.join().expect("dc run panicked")?))
    })
}

/// 10–90 % rise time of a step from `from` to `to` starting at `t_event`,
/// with linear interpolation between samples.
pub fn rise_time(trace: &SimTrace, sel: SignalSel<'_>, t_event: f64, from: f64, to: f64) -> Option<f64> {
    let y = trace.signal(sel.name).ok()?;
    let crossing = |frac: f64| {
        let level = from + frac * (to - from);
        let above = |v: f64| (v - level) * (to - from).signum() >= 0.0;
        let start = (0..y.len()).find(|&i| trace.time(i) >= t_event)?;
        (start.max(1)..y.len()).find_map(|i| {
            let (a, b) = (y[i - 1] / sel.scale, y[i] / sel.scale);
            (!above(a) && above(b)).then(|| {
                let f = (level - a) / (b - a);
                trace.time(i - 1) + f * trace.dt_record
            })
        })
    };
    Some(crossing(0.9)? - crossing(0.1)?)
}

/// Largest deviation from the reduced model for samples at or after
/// `t_event + skip`.
pub fn oracle_deviation(
    trace: &SimTrace,
    name: &str,
    model: &ReducedModel,
    u: f64,
    t_event: f64,
    skip: f64,
) -> duality_core::Result<f64> {
    let x = trace.signal(name)?;
    let mut worst = 0.0f64;
    for (i, v) in x.iter().enumerate() {
        let t = trace.time(i);
        if t >= t_event + skip - 1e-9 * trace.dt_record {
            worst = worst.max((v - reduced_step_response(model, u, t - t_event)?).abs());
        }
    }
    Ok(worst)
}

/// Earliest time after which `|signal − target| ≤ tol` holds for every
/// remaining sample.
pub fn recovery_time(trace: &SimTrace, name: &str, target: f64, tol: f64) -> duality_core::Result<Option<f64>> {
    let x = trace.signal(name)?;
    let last_bad = x.iter().rposition(|v| (v - target).abs() > tol);
    Ok(match last_bad {
        None => Some(trace.t0),
        Some(i) if i + 1 < x.len() => Some(trace.time(i + 1)),
        Some(_) => None,
    })
}

pub struct LoopGains {
    pub ac: RationalTf,
    pub dc: RationalTf,
    pub ac_ideal: RationalTf,
    pub dc_ideal: RationalTf,
    pub simplified: RationalTf,
}

pub fn loop_gains(setup: &Setup) -> duality_core::Result<LoopGains> {
    let r_i = setup.current_gains()?.to_tf();
    let pwm = setup.pwm()?;
    let ac = derive_plant(setup.ac_plant()?);
    let dc = derive_plant(setup.dc_plant()?);
    Ok(LoopGains {
        ac: current_loop_gain(&ac, &pwm, &r_i),
        dc: current_loop_gain(&dc, &pwm, &r_i),
        ac_ideal: current_loop_gain_ideal_feedforward(&ac, &pwm, &r_i),
        dc_ideal: current_loop_gain_ideal_feedforward(&dc, &pwm, &r_i),
        simplified: simplified_current_loop(setup.l_f, &r_i)?,
    })
}

/// Largest relative magnitude mismatch of two transfer functions over `omegas`.
pub fn magnitude_mismatch(a: &RationalTf, b: &RationalTf, omegas: &[f64]) -> duality_core::Result<f64> {
    let mut worst = 0.0f64;
    for &w in omegas {
        let (ma, mb) = (a.eval(w)?.norm(), b.eval(w)?.norm());
        worst = worst.max((ma - mb).abs() / ma.abs().max(mb.abs()));
    }
    Ok(worst)
}

/// Largest relative coefficient mismatch; infinite when the structures differ.
pub fn coefficient_mismatch(a: &RationalTf, b: &RationalTf) -> f64 {
    let (a, b) = (a.simplify(), b.simplify());
    let norm = |t: &RationalTf| t.den().last().copied().unwrap_or(1.0);
    let (na, nb) = (norm(&a), norm(&b));
    let rel = |x: &[f64], y: &[f64], sx: f64, sy: f64| -> f64 {
        if x.len() != y.len() {
            return f64::INFINITY;
        }
        x.iter()
            .zip(y)
            .map(|(p, q)| {
                let (p, q) = (p / sx, q / sy);
                let m = p.abs().max(q.abs());
                if m == 0.0 {
                    0.0
                } else {
                    (p - q).abs() / m
                }
            })
            .fold(0.0, f64::max)
    };
    rel(a.num(), b.num(), na, nb).max(rel(a.den(), b.den(), na, nb))
}

fn check(name: &str, measured: f64, expected: String, pass: bool) -> Check {
    Check {
        name: name.to_string(),
        measured,
        expected,
        pass,
    }
}

pub fn run_builtin(name: BuiltinScenario, opts: &RunOptions) -> Result<BuiltinOutcome, BuiltinError> {
    let setup = with_timestep(&Setup::reference(), opts)?;
    match name {
        BuiltinScenario::CcStep => cc_step(&setup, opts),
        BuiltinScenario::Disturbance => disturbance(&setup, opts),
        BuiltinScenario::VoltageDip => voltage_dip(&setup, opts),
        BuiltinScenario::Bode => bode(&setup),
    }
}

fn cc_step(setup: &Setup, opts: &RunOptions) -> Result<BuiltinOutcome, BuiltinError> {
    let t_ev = CC_STEP_EVENT_T;
    let t_end = opts.t_end.unwrap_or(CC_STEP_T_END);
    if t_end < t_ev + CC_STEP_WINDOW {
        return Err(BuiltinError::Options(format!(
            "cc_step needs t_end >= {} s",
            t_ev + CC_STEP_WINDOW
        )));
    }
    let (ac, dc) = cc_step_traces(setup, t_ev, t_end)?;
    let base = setup.base()?;
    let i_pk = ac_peak_current_base(setup)?;
    let sel_ac = SignalSel::scaled("i_f_d_A", i_pk);
    let sel_dc = SignalSel::scaled("i_f_A", base.i_base());
    let step = CC_STEP_TO - CC_STEP_FROM;
    let report = align_and_compare(
        &ac,
        sel_ac,
        &dc,
        sel_dc,
        Window::new(t_ev, t_ev + CC_STEP_WINDOW),
        Tolerance {
            metric: Metric::MaxAbs,
            limit: CC_STEP_OVERLAY_FRACTION * step,
        },
    )?;
    let expected_rise = 2.2 / setup.omega_bi;
    let mut out = BuiltinOutcome::default();
    for (label, trace, sel) in [("ac", &ac, sel_ac), ("dc", &dc, sel_dc)] {
        let rise = rise_time(trace, sel, t_ev, CC_STEP_FROM, CC_STEP_TO).unwrap_or(f64::NAN);
        out.checks.push(check(
            &format!("rise_time_{label}"),
            rise,
            format!("{expected_rise:.6e} s ± {:.0}%", RISE_TIME_FRACTION * 100.0),
            (rise - expected_rise).abs() <= RISE_TIME_FRACTION * expected_rise,
        ));
    }
    let plot = emit_plot(
        &[
            Series::from_trace(&ac, "i_f_d_A", "AC i_f,d", i_pk, 0.0)?,
            Series::from_trace(&dc, "i_f_A", "DC i_f", base.i_base(), 0.0)?,
        ],
        &PlotSpec {
            title: "Inductor current reference step".into(),
            y_label: "current (p.u.)".into(),
        },
    )?;
    out.reports.push(report);
    out.plots.push(("cc_step".into(), plot));
    out.traces.push(("cc_step_ac".into(), ac));
    out.traces.push(("cc_step_dc".into(), dc));
    Ok(out)
}

fn ac_peak_current_base(setup: &Setup) -> duality_core::Result<f64> {
    Ok(build_ac_scenario(AcOperatingPoint::reference(), setup, AcControlMode::CurrentReference)?.i_pk_base())
}

fn disturbance_horizon(opts: &RunOptions) -> Result<f64, BuiltinError> {
    let t_end = opts.t_end.unwrap_or(DISTURBANCE_T_END);
    if t_end <= DISTURBANCE_EVENT_T + ORACLE_SKIP {
        return Err(BuiltinError::Options(format!(
            "t_end must exceed {} s",
            DISTURBANCE_EVENT_T + ORACLE_SKIP
        )));
    }
    Ok(t_end)
}

fn disturbance(setup: &Setup, opts: &RunOptions) -> Result<BuiltinOutcome, BuiltinError> {
    let (t_ev, t_end) = (DISTURBANCE_EVENT_T, disturbance_horizon(opts)?);
    let u = DISTURBANCE_MAGNITUDE;
    let (ac, dc) = disturbance_traces(setup, u, t_ev, t_end)?;
    let droop = setup.dc_droop()?;
    let final_dev = -u / droop.k_d_dc;
    let report = align_and_compare(
        &ac,
        SignalSel::pu("omega_pu"),
        &dc,
        SignalSel::pu("v_o_pu"),
        Window::new(t_ev, t_end),
        Tolerance {
            metric: Metric::Rms,
            limit: DISTURBANCE_RMS_FRACTION * final_dev.abs(),
        },
    )?;
    let mut out = BuiltinOutcome::default();
    let ac_model = ReducedModel::from_ac(&setup.ac_droop()?, 0.5)?;
    let dc_model = ReducedModel::from_dc(&droop, 0.5)?;
    for (label, trace, signal, model) in [
        ("ac", &ac, "omega_pu", &ac_model),
        ("dc", &dc, "v_o_pu", &dc_model),
    ] {
        match check_statics(trace, SignalSel::pu(signal), t_ev, final_dev, STATICS_TOL, StaticsOptions::default()) {
            Ok(s) => out.checks.push(check(
                &format!("statics_{label}"),
                s.measured,
                format!("{final_dev:.6} ± {STATICS_TOL:e} p.u."),
                s.pass,
            )),
            Err(duality_core::Error::NotSettled { slope, .. }) => out.checks.push(check(
                &format!("statics_{label}"),
                slope,
                "settled final window".into(),
                false,
            )),
            Err(e) => return Err(e.into()),
        }
        let dev = oracle_deviation(trace, signal, model, u, t_ev, ORACLE_SKIP)?;
        out.checks.push(check(
            &format!("oracle_{label}"),
            dev,
            format!("<= {ORACLE_TOL:e} p.u."),
            dev <= ORACLE_TOL,
        ));
    }
    let plot = emit_plot(
        &[
            Series::from_trace(&ac, "omega_pu", "AC Δω", 1.0, 1.0)?,
            Series::from_trace(&dc, "v_o_pu", "DC Δv_o", 1.0, 1.0)?,
        ],
        &PlotSpec {
            title: "Dual load disturbance".into(),
            y_label: "deviation (p.u.)".into(),
        },
    )?;
    out.reports.push(report);
    out.plots.push(("disturbance".into(), plot));
    out.traces.push(("disturbance_ac".into(), ac));
    out.traces.push(("disturbance_dc".into(), dc));
    Ok(out)
}

/// Minimum of `|v_o|` over the first 100 ms after the event.
pub fn voltage_dip_depth(trace: &SimTrace, t_event: f64) -> duality_core::Result<f64> {
    let v = trace.signal("v_o_mag_pu")?;
    let range = trace.window(t_event, (t_event + 0.1).min(trace.t_last()))?;
    Ok(v[range].iter().copied().fold(f64::INFINITY, f64::min))
}

fn voltage_dip(setup: &Setup, opts: &RunOptions) -> Result<BuiltinOutcome, BuiltinError> {
    let (t_ev, t_end) = (DISTURBANCE_EVENT_T, disturbance_horizon(opts)?);
    let cfg: SimConfig = setup.sim_config(t_end, decimation(setup.dt, DISTURBANCE_RECORD_DT))?;
    let model = build_ac_scenario(AcOperatingPoint::reference(), setup, AcControlMode::Droop)?;
    let p0 = AcOperatingPoint::reference().p_o / setup.s_base;
    let ac = run(
        model,
        cfg,
        vec![StepEvent::new(t_ev, "p_load_pu", p0 + DISTURBANCE_MAGNITUDE)],
    )?;
    let mut out = BuiltinOutcome::default();
    let dip = voltage_dip_depth(&ac, t_ev)?;
    out.checks.push(check("voltage_dip", dip, "< 1 p.u.".into(), dip < 1.0));
    let rec = recovery_time(&ac, "v_o_mag_pu", 1.0, RECOVERY_TOL)?;
    out.checks.push(check(
        "voltage_recovery",
        rec.unwrap_or(f64::INFINITY),
        format!("|v_o| within 1 ± {RECOVERY_TOL:e} p.u. before {t_end} s"),
        rec.is_some_and(|t| t < t_end),
    ));
    let plot = emit_plot(
        &[Series::from_trace(&ac, "v_o_mag_pu", "AC |v_o|", 1.0, 0.0)?],
        &PlotSpec {
            title: "Terminal voltage magnitude".into(),
            y_label: "|v_o| (p.u.)".into(),
        },
    )?;
    out.plots.push(("voltage_dip".into(), plot));
    out.traces.push(("voltage_dip_ac".into(), ac));
    Ok(out)
}

fn bode(setup: &Setup) -> Result<BuiltinOutcome, BuiltinError> {
    let g = loop_gains(setup)?;
    let grid = log_space(BODE_OMEGA_MIN, BODE_OMEGA_MAX, BODE_POINTS)?;
    let mut out = BuiltinOutcome::default();

    let coeff = coefficient_mismatch(&g.ac, &g.dc);
    out.checks.push(check(
        "loop_gain_coefficients",
        coeff,
        format!("<= {LOOP_GAIN_RTOL:e} relative"),
        coeff <= LOOP_GAIN_RTOL,
    ));
    let mag = magnitude_mismatch(&g.ac, &g.dc, &grid)?;
    out.checks.push(check(
        "loop_gain_magnitude",
        mag,
        format!("<= {LOOP_GAIN_RTOL:e} relative at {BODE_POINTS} points"),
        mag <= LOOP_GAIN_RTOL,
    ));
    let ideal = magnitude_mismatch(&g.ac_ideal, &g.dc_ideal, &grid)?;
    out.checks.push(check(
        "loop_gain_magnitude_ideal_feedforward",
        ideal,
        format!("<= {LOOP_GAIN_RTOL:e} relative at {BODE_POINTS} points"),
        ideal <= LOOP_GAIN_RTOL,
    ));
    let at_bw = g.simplified.eval(setup.omega_bi)?.norm();
    let expected = (1.0 + 1.0 / (setup.c_i * setup.c_i)).sqrt();
    out.checks.push(check(
        "imc_crossover_gain",
        at_bw,
        format!("{expected:.9} ± {IMC_CROSSOVER_TOL:e}"),
        (at_bw - expected).abs() <= IMC_CROSSOVER_TOL,
    ));

    for (name, tf) in [
        ("loop_gain_ac", &g.ac),
        ("loop_gain_dc", &g.dc),
        ("loop_gain_ideal_feedforward", &g.ac_ideal),
        ("loop_gain_simplified", &g.simplified),
    ] {
        out.responses.push((name.to_string(), bode_grid(tf, BODE_OMEGA_MIN, BODE_OMEGA_MAX, 20)?));
    }
    let series = out
        .responses
        .iter()
        .map(|(name, grid)| Series {
            label: name.clone(),
            t: grid.points.iter().map(|p| p.omega.log10()).collect(),
            y: grid.points.iter().map(|p| 20.0 * p.mag().log10()).collect(),
        })
        .collect::<Vec<_>>();
    let plot = emit_plot(
        &series,
        &PlotSpec {
            title: "Current-loop gain magnitude (x axis: log10 ω)".into(),
            y_label: "|T_i| (dB)".into(),
        },
    )?;
    out.plots.push(("bode".into(), plot));
    Ok(out)
}

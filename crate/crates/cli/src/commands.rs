//! Library side of the `tune` and `simulate` subcommands.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use duality_core::ac::build_ac_scenario;
use duality_core::dc::build_dc_scenario;
use duality_core::setup::Setup;
use duality_core::sim::{run, SimTrace};
use duality_core::tuning::{timescale_check, DEFAULT_TIMESCALE_RATIO};

use crate::builtin::RunOptions;
use crate::config::{ConfigError, ConverterSel, ScenarioConfig, Side};
use crate::plot::{emit_plot, PlotError, PlotSpec, Series};

#[derive(Debug, Clone, PartialEq)]
pub struct TuneRow {
    pub name: &'static str,
    pub value: f64,
    pub unit: &'static str,
}

/// Controller gains, droop parameters and their duality-mapped AC twins.
pub fn tune_table(setup: &Setup) -> duality_core::Result<Vec<TuneRow>> {
    let ci = setup.current_gains()?;
    let cv = setup.voltage_gains()?;
    let dc = setup.dc_droop()?;
    let ac = setup.ac_droop()?;
    let ts = timescale_check(ac.omega_c, setup.omega_bv, DEFAULT_TIMESCALE_RATIO)?;
    let row = |name, value, unit| TuneRow { name, value, unit };
    Ok(vec![
        row("omega_bi", setup.omega_bi, "rad/s"),
        row("k_p_i", ci.k_p, "V/A"),
        row("t_i_i", ci.t_i, "s"),
        row("omega_bv", setup.omega_bv, "rad/s"),
        row("k_p_v", cv.k_p, "A/V"),
        row("t_i_v", cv.t_i, "s"),
        row("k_d_dc", dc.k_d_dc, "p.u."),
        row("c_dc_pu", dc.c_dc_pu, "s"),
        row("h", ac.h, "s"),
        row("k_d_ac", ac.k_d_ac, "p.u."),
        row("m_p", ac.m_p, "p.u."),
        row("omega_c", ac.omega_c, "rad/s"),
        row("tau_reduced", 2.0 * ac.h / ac.k_d_ac, "s"),
        row("timescale_ratio", ts.ratio, "-"),
    ])
}

pub fn tune_text(rows: &[TuneRow]) -> String {
    let mut s = String::new();
    for r in rows {
        writeln!(s, "{:<16} {:>14.6e} {}", r.name, r.value, r.unit).unwrap();
    }
    s
}

pub fn tune_csv(rows: &[TuneRow]) -> String {
    let mut s = String::from("name,value,unit\n");
    for r in rows {
        writeln!(s, "{},{},{}", r.name, r.value, r.unit).unwrap();
    }
    s
}

#[derive(Debug, thiserror::Error)]
pub enum SimulateError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] duality_core::Error),
    #[error(transparent)]
    Plot(#[from] PlotError),
}

/// Applies command-line overrides; the result is revalidated.
pub fn apply_overrides(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = cfg.clone();
    if let Some(dt) = opts.timestep {
        cfg.sim.dt = dt;
    }
    if let Some(t) = opts.t_end {
        cfg.sim.t_end = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs the configured converters; AC first when both are selected.
pub fn simulate(cfg: &ScenarioConfig) -> Result<Vec<(Side, SimTrace)>, SimulateError> {
    let setup = cfg.setup();
    let sim = cfg.sim_config()?;
    let run_ac = || -> duality_core::Result<SimTrace> {
        let mut model = build_ac_scenario(cfg.ac_operating_point(), &setup, cfg.ac_mode())?;
        if let Some(d) = cfg.ac_droop_override() {
            model = model.with_droop(d);
        }
        run(model, sim, cfg.events_for(Side::Ac))
    };
    let run_dc = || -> duality_core::Result<SimTrace> {
        let model = build_dc_scenario(cfg.dc_operating_point(), &setup, cfg.dc_mode())?;
        run(model, sim, cfg.events_for(Side::Dc))
    };
    let out = match cfg.converter {
        ConverterSel::Ac => vec![(Side::Ac, run_ac()?)],
        ConverterSel::Dc => vec![(Side::Dc, run_dc()?)],
        ConverterSel::Both => std::thread::scope(|sc| -> duality_core::Result<_> {
            let dc = sc.spawn(run_dc);
            let ac = run_ac()?;
            Ok(vec![(Side::Ac, ac), (Side::Dc, dc.join().expect("dc run panicked")?)])
        })?,
    };
    Ok(out)
}

/// Copy of `trace` restricted to `names`, in the given order.
pub fn select_signals(trace: &SimTrace, names: &[String]) -> duality_core::Result<SimTrace> {
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let cols = refs.iter().map(|n| trace.signal(n)).collect::<duality_core::Result<Vec<_>>>()?;
    let mut out = SimTrace::new(trace.t0, trace.dt_record, &refs)?;
    let mut row = vec![0.0; cols.len()];
    for i in 0..trace.len() {
        for (r, c) in row.iter_mut().zip(&cols) {
            *r = c[i];
        }
        out.push_row(&row);
    }
    Ok(out)
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Ac => "ac",
        Side::Dc => "dc",
    }
}

/// Writes one CSV per converter and, when requested, one SVG each.
pub fn write_simulation(
    cfg: &ScenarioConfig,
    traces: &[(Side, SimTrace)],
    dir: &Path,
) -> Result<Vec<PathBuf>, SimulateError> {
    let mut rendered = Vec::new();
    for (side, trace) in traces {
        let names = cfg.signals_for(*side);
        let sel = select_signals(trace, &names)?;
        let csv = sel.to_csv_string();
        let svg = if cfg.outputs.plot {
            let series = names
                .iter()
                .map(|n| Series::from_trace(&sel, n, n.as_str(), 1.0, 0.0))
                .collect::<Result<Vec<_>, _>>()?;
            Some(emit_plot(
                &series,
                &PlotSpec {
                    title: format!("{} converter", side_name(*side).to_uppercase()),
                    y_label: "value".into(),
                },
            )?)
        } else {
            None
        };
        rendered.push((side_name(*side), csv, svg));
    }
    let io_err = |path: &Path, source: io::Error| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();
    for (name, csv, svg) in rendered {
        let path = dir.join(format!("{name}.csv"));
        fs::write(&path, csv).map_err(|e| io_err(&path, e))?;
        written.push(path);
        if let Some(svg) = svg {
            let path = dir.join(format!("{name}.svg"));
            fs::write(&path, svg).map_err(|e| io_err(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}

//! Averaged DC half-bridge converter with an inner PI current loop and I–V
//! droop.
//!
//! Continuous states are `[i_f (A), v_o (V), v_pwm (V)]`. The modulator lag
//! `v_pwm` follows `d·V_in` with time constant `τ`. The load is an ideal
//! current source.

use crate::error::{Error, Result};
use crate::plant::PlantParams;
use crate::pu::PerUnitBase;
use crate::setup::Setup;
use crate::sim::{ConverterModel, DiscretePi};
use crate::tuning::DcDroopParams;

pub const DC_SIGNALS: &[&str] = &["i_f_A", "i_f_ref_A", "v_o_V", "v_o_pu", "i_o_A", "duty"];

/// Load current in A, load current in p.u., and the droop current setpoint
/// (or the direct reference in [`DcControlMode::CurrentReference`]) in p.u.
pub const DC_INPUTS: &[&str] = &["i_o_A", "i_o_pu", "i_f_set_pu"];

const I_F: usize = 0;
const V_O: usize = 1;
const V_PWM: usize = 2;

/// I–V droop: `i_ref = i_f_set + k_d·(v_set − v_o)`, all p.u.
pub fn dc_droop_law(v_o_pu: f64, params: &DcDroopParams, v_set: f64, i_f_set: f64) -> f64 {
    i_f_set + params.k_d_dc * (v_set - v_o_pu)
}

/// Plant derivatives for state `x = [i_f, v_o, v_pwm]` under held duty `d`
/// and load current `i_o`.
pub fn dc_derivatives(
    plant: &PlantParams,
    pwm_tau: f64,
    x: &[f64],
    duty: f64,
    i_o: f64,
    dx: &mut [f64],
) {
    dx[I_F] = (x[V_PWM] - x[V_O]) / plant.l_f;
    dx[V_O] = (x[I_F] - i_o) / plant.c_out;
    dx[V_PWM] = (duty * plant.v_in - x[V_PWM]) / pwm_tau;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcOperatingPoint {
    /// Output power, W.
    pub p_o: f64,
    /// Output voltage, V.
    pub v_o: f64,
}

impl DcOperatingPoint {
    pub fn reference() -> Self {
        Self {
            p_o: 2000.0,
            v_o: 350.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcControlMode {
    /// Current reference from the I–V droop law.
    Droop,
    /// Droop bypassed; `i_f_set` is the current reference.
    CurrentReference,
}

#[derive(Debug, Clone)]
pub struct DcConverterModel {
    plant: PlantParams,
    pwm_tau: f64,
    base: PerUnitBase,
    droop: DcDroopParams,
    mode: DcControlMode,
    cc: DiscretePi,
    v_set: f64,
    i_f_set: f64,
    i_o: f64,
    i_ref: f64,
    duty: f64,
    x0: [f64; 3],
}

/// Builds a converter in steady state at `op`.
///
/// `i_o = p_o/v_o`, `i_f = i_o`, `d₀ = v_o/V_in`. With output-voltage
/// feedforward the current-loop integrator starts at zero.
pub fn build_dc_scenario(
    op: DcOperatingPoint,
    setup: &Setup,
    mode: DcControlMode,
) -> Result<DcConverterModel> {
    setup.validate()?;
    if !(op.v_o > 0.0) || !op.v_o.is_finite() {
        return Err(Error::InconsistentOperatingPoint(format!(
            "output voltage must be positive, got {} V",
            op.v_o
        )));
    }
    if !(op.p_o >= 0.0) || !op.p_o.is_finite() {
        return Err(Error::InconsistentOperatingPoint(format!(
            "output power must be non-negative, got {} W",
            op.p_o
        )));
    }
    if op.v_o >= setup.v_in {
        return Err(Error::InconsistentOperatingPoint(format!(
            "a buck stage cannot produce {} V from {} V",
            op.v_o, setup.v_in
        )));
    }
    let base = setup.base()?;
    let plant = setup.dc_plant()?;
    let i_o = op.p_o / op.v_o;
    let duty = op.v_o / setup.v_in;
    Ok(DcConverterModel {
        plant,
        pwm_tau: setup.pwm_tau,
        droop: setup.dc_droop()?,
        mode,
        cc: DiscretePi::new(setup.current_gains()?),
        v_set: op.v_o / base.v_base(),
        i_f_set: i_o / base.i_base(),
        i_o,
        i_ref: i_o,
        duty,
        x0: [i_o, op.v_o, duty * setup.v_in],
        base,
    })
}

impl DcConverterModel {
    pub fn base(&self) -> &PerUnitBase {
        &self.base
    }

    pub fn mode(&self) -> DcControlMode {
        self.mode
    }

    pub fn droop(&self) -> &DcDroopParams {
        &self.droop
    }

    pub fn i_f_set_pu(&self) -> f64 {
        self.i_f_set
    }

    pub fn v_set_pu(&self) -> f64 {
        self.v_set
    }

    pub fn load_current(&self) -> f64 {
        self.i_o
    }

    pub fn integrator(&self) -> f64 {
        self.cc.integrator()
    }
}

impl ConverterModel for DcConverterModel {
    fn initial_state(&self) -> Vec<f64> {
        self.x0.to_vec()
    }

    fn derivatives(&self, x: &[f64], dx: &mut [f64]) {
        dc_derivatives(&self.plant, self.pwm_tau, x, self.duty, self.i_o, dx);
    }

    fn control(&mut self, _t: f64, x: &[f64], t_sample: f64) {
        let i_ref_pu = match self.mode {
            DcControlMode::Droop => {
                dc_droop_law(x[V_O] / self.base.v_base(), &self.droop, self.v_set, self.i_f_set)
            }
            DcControlMode::CurrentReference => self.i_f_set,
        };
        self.i_ref = i_ref_pu * self.base.i_base();
        let v_sw = self.cc.step(self.i_ref - x[I_F], t_sample) + x[V_O];
        self.duty = (v_sw / self.plant.v_in).clamp(0.0, 1.0);
    }

    fn signal_names(&self) -> &'static [&'static str] {
        DC_SIGNALS
    }

    fn record(&self, _t: f64, x: &[f64], out: &mut [f64]) {
        out[0] = x[I_F];
        out[1] = self.i_ref;
        out[2] = x[V_O];
        out[3] = x[V_O] / self.base.v_base();
        out[4] = self.i_o;
        out[5] = self.duty;
    }

    fn steppable_inputs(&self) -> &'static [&'static str] {
        DC_INPUTS
    }

    fn apply_step(&mut self, target: &str, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!("{target} step to {value}")));
        }
        match target {
            "i_o_A" => self.i_o = value,
            "i_o_pu" => self.i_o = value * self.base.i_base(),
            "i_f_set_pu" => self.i_f_set = value,
            other => return Err(Error::UnknownSignal(other.to_string())),
        }
        Ok(())
    }
}

//! Small-signal converter transfer functions and current/voltage loop gains.
//!
//! The DC half-bridge and one dq axis of the three-phase inverter share the
//! same LC filter structure, so both are described by [`PlantParams`] and
//! differ only in component values. With `Z_L = sL` and `Y_C = sC`:
//!
//! ```text
//! G_di = V_in·sC / (1 + s²LC)     G_oi = 1 / (1 + s²LC)
//! G_dv = V_in    / (1 + s²LC)     Z_o  = sL / (1 + s²LC)
//! ```

use crate::error::{ensure_positive, Result};
use crate::tf::RationalTf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlantKind {
    AcDqAxis,
    Dc,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantParams {
    pub v_in: f64,
    pub l_f: f64,
    pub c_out: f64,
    pub kind: PlantKind,
}

impl PlantParams {
    pub fn new(v_in: f64, l_f: f64, c_out: f64, kind: PlantKind) -> Result<Self> {
        ensure_positive("v_in", v_in)?;
        ensure_positive("l_f", l_f)?;
        ensure_positive("c_out", c_out)?;
        Ok(Self {
            v_in,
            l_f,
            c_out,
            kind,
        })
    }

    /// LC resonance `1/√(LC)` in rad/s.
    pub fn resonance(&self) -> f64 {
        1.0 / (self.l_f * self.c_out).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantTfs {
    pub params: PlantParams,
    pub g_di: RationalTf,
    pub g_oi: RationalTf,
    pub g_dv: RationalTf,
    pub z_o: RationalTf,
}

pub fn derive_plant(params: PlantParams) -> PlantTfs {
    let PlantParams {
        v_in, l_f, c_out, ..
    } = params;
    let den = vec![1.0, 0.0, l_f * c_out];
    let tf = |num: Vec<f64>| RationalTf::new(num, den.clone()).expect("LC > 0");
    PlantTfs {
        params,
        g_di: tf(vec![0.0, v_in * c_out]),
        g_oi: tf(vec![1.0]),
        g_dv: tf(vec![v_in]),
        z_o: tf(vec![0.0, l_f]),
    }
}

/// Modulator and sampling latency: a first-order lag `1/(1 + sτ)` followed
/// by the modulator gain `1/V_in`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PwmDelay {
    pub time_constant: f64,
    pub gain: f64,
}

impl PwmDelay {
    pub fn new(time_constant: f64, v_in: f64) -> Result<Self> {
        ensure_positive("time_constant", time_constant)?;
        ensure_positive("v_in", v_in)?;
        Ok(Self {
            time_constant,
            gain: 1.0 / v_in,
        })
    }

    /// The lag `G_t` without the modulator gain.
    pub fn tf(&self) -> RationalTf {
        RationalTf::new(vec![1.0], vec![1.0, self.time_constant]).expect("τ > 0")
    }
}

/// Current-loop gain with the output-voltage feedforward passing through the
/// PWM lag, in reduced form:
///
/// `T_i = sC·G_t / (1 − G_t + s²LC) · R_i = C / (τ + sLC + s²LCτ) · R_i`
/// after clearing the lag's denominator and the common `s`.
pub fn current_loop_gain(plant: &PlantTfs, pwm: &PwmDelay, r_i: &RationalTf) -> RationalTf {
    let PlantParams { l_f, c_out, .. } = plant.params;
    let tau = pwm.time_constant;
    let lc = l_f * c_out;
    let core = RationalTf::new(vec![0.0, c_out], vec![0.0, tau, lc, lc * tau]).expect("τ > 0");
    &core * r_i
}

/// Same loop gain as [`current_loop_gain`], assembled from the block diagram:
/// `[G_di·G_t/V_in] / [1 − G_dv·G_t/V_in] · R_i`. Kept as an independent
/// algebraic route; the result is not reduced.
pub fn current_loop_gain_from_blocks(
    plant: &PlantTfs,
    pwm: &PwmDelay,
    r_i: &RationalTf,
) -> RationalTf {
    let g_t = pwm.tf().scale(pwm.gain);
    let forward = &plant.g_di * &g_t;
    let inner = &RationalTf::constant(1.0) - &(&plant.g_dv * &g_t);
    &forward.div(&inner).expect("inner loop is nonzero") * r_i
}

/// Loop gain when the output-voltage feedforward is applied without delay:
/// the capacitor path cancels exactly and `T_i = G_t/(sL) · R_i`.
pub fn current_loop_gain_ideal_feedforward(
    plant: &PlantTfs,
    pwm: &PwmDelay,
    r_i: &RationalTf,
) -> RationalTf {
    let inductor = RationalTf::new(vec![1.0], vec![0.0, plant.params.l_f]).expect("L > 0");
    &(&inductor * &pwm.tf()) * r_i
}

/// Loop gain with no feedforward at all: `G_di·G_t/V_in · R_i`.
pub fn current_loop_gain_without_feedforward(
    plant: &PlantTfs,
    pwm: &PwmDelay,
    r_i: &RationalTf,
) -> RationalTf {
    let g_t = pwm.tf().scale(pwm.gain);
    &(&plant.g_di * &g_t) * r_i
}

/// `R_i / (s·L)`: the current loop once the capacitor and PWM lag are
/// neglected.
pub fn simplified_current_loop(l_f: f64, r_i: &RationalTf) -> Result<RationalTf> {
    ensure_positive("l_f", l_f)?;
    let inductor = RationalTf::new(vec![1.0], vec![0.0, l_f])?;
    Ok(&inductor * r_i)
}

/// `R_v / (s·C)`: the voltage loop with an ideal inner current loop.
pub fn simplified_voltage_loop(c_f: f64, r_v: &RationalTf) -> Result<RationalTf> {
    ensure_positive("c_f", c_f)?;
    let capacitor = RationalTf::new(vec![1.0], vec![0.0, c_f])?;
    Ok(&capacitor * r_v)
}

//! First-order reduced models of the droop-controlled converters.
//!
//! Both the AC swing equation and the DC capacitor balance reduce to
//! `M·dx/dt = −u − k_d·(x − x_set)` in per unit, with `M = 2H` or
//! `M = C_dc`. The step response is evaluated in closed form.

use crate::error::{Error, Result};
use crate::tuning::{AcDroopParams, DcDroopParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedModel {
    /// `2H` for AC, `C_dc` in p.u. for DC, s.
    pub inertia_like: f64,
    pub k_d: f64,
    /// Initial and reference value of the state, p.u.
    pub x_set: f64,
    /// Disturbance input at the operating point, p.u.
    pub u_set: f64,
}

impl ReducedModel {
    pub fn new(inertia_like: f64, k_d: f64, x_set: f64, u_set: f64) -> Result<Self> {
        if !(inertia_like > 0.0) || !inertia_like.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "inertia_like must be positive, got {inertia_like}"
            )));
        }
        if !(k_d >= 0.0) || !k_d.is_finite() {
            return Err(Error::InvalidArgument(format!("k_d must be non-negative, got {k_d}")));
        }
        Ok(Self {
            inertia_like,
            k_d,
            x_set,
            u_set,
        })
    }

    /// Frequency model `2H·dω/dt = −Δp − K_d·Δω` around `ω = 1`.
    pub fn from_ac(params: &AcDroopParams, p_set: f64) -> Result<Self> {
        Self::new(2.0 * params.h, params.k_d_ac, 1.0, p_set)
    }

    /// Voltage model `C_dc·dv/dt = −Δi_o − K_d·Δv` around `v = 1`.
    pub fn from_dc(params: &DcDroopParams, i_set: f64) -> Result<Self> {
        Self::new(params.c_dc_pu, params.k_d_dc, 1.0, i_set)
    }

    /// `M/k_d`; `None` without damping.
    pub fn time_constant(&self) -> Option<f64> {
        (self.k_d > 0.0).then(|| self.inertia_like / self.k_d)
    }
}

/// `x(t) = x_set − (u/k_d)·(1 − e^{−t/τ})` for a step `u` applied at `t = 0`.
pub fn reduced_step_response(model: &ReducedModel, u: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("t must be non-negative, got {t}")));
    }
    if u == 0.0 {
        return Ok(model.x_set);
    }
    let tau = model.time_constant().ok_or_else(|| {
        Error::Unbounded(format!("undamped model driven by a {u} p.u. step"))
    })?;
    Ok(model.x_set - u / model.k_d * (-(-t / tau).exp_m1()))
}

/// Samples the step response for a step applied at `t_step`; the state is
/// `x_set` before the step.
pub fn reduced_trajectory(model: &ReducedModel, u: f64, t_step: f64, times: &[f64]) -> Result<Vec<f64>> {
    times
        .iter()
        .map(|&t| {
            if t < t_step {
                Ok(model.x_set)
            } else {
                reduced_step_response(model, u, t - t_step)
            }
        })
        .collect()
}

const TWIN_RTOL: f64 = 1e-12;

/// Whether two reduced models share inertia and damping.
pub fn duality_twin(ac: &ReducedModel, dc: &ReducedModel) -> bool {
    let close = |a: f64, b: f64| (a - b).abs() <= TWIN_RTOL * a.abs().max(b.abs());
    close(ac.inertia_like, dc.inertia_like) && close(ac.k_d, dc.k_d)
}

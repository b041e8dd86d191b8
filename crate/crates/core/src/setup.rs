//! Component values, bases and tuning inputs shared by both converters.

use crate::error::{ensure_positive, Result};
use crate::plant::{PlantKind, PlantParams, PwmDelay};
use crate::pu::PerUnitBase;
use crate::sim::{SimConfig, DEFAULT_DT, DEFAULT_RECORD_DECIMATION, DEFAULT_T_SAMPLE};
use crate::tuning::{
    current_bandwidth_from_switching, duality_map, tune_current_controller,
    tune_voltage_controller, AcDroopParams, DcDroopParams, PiGains,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setup {
    /// Input (DC-link) voltage, V.
    pub v_in: f64,
    /// Filter inductance, H.
    pub l_f: f64,
    /// AC filter capacitance per phase, F.
    pub c_f: f64,
    /// DC output capacitance, F.
    pub c_dc: f64,
    pub s_base: f64,
    /// Base voltage, V. Line-to-line RMS on the AC side.
    pub v_base: f64,
    pub f_nom: f64,
    /// Current-loop bandwidth, rad/s.
    pub omega_bi: f64,
    pub c_i: f64,
    /// Voltage-loop bandwidth, rad/s.
    pub omega_bv: f64,
    pub c_v: f64,
    /// DC I–V droop gain, p.u.
    pub k_d_dc: f64,
    /// Modulator lag time constant, s.
    pub pwm_tau: f64,
    pub dt: f64,
    pub t_sample: f64,
}

impl Setup {
    /// 4 kW / 350 V converters, 50 kHz switching, 100 kHz sampling.
    pub fn reference() -> Self {
        let omega_bi = current_bandwidth_from_switching(50e3);
        Self {
            v_in: 700.0,
            l_f: 7.7e-3,
            c_f: 0.72e-3,
            c_dc: 72e-3,
            s_base: 4000.0,
            v_base: 350.0,
            f_nom: 50.0,
            omega_bi,
            c_i: 20.0,
            omega_bv: 0.2 * omega_bi,
            c_v: 2.5,
            k_d_dc: 0.75,
            pwm_tau: 10e-6,
            dt: DEFAULT_DT,
            t_sample: DEFAULT_T_SAMPLE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("v_in", self.v_in),
            ("l_f", self.l_f),
            ("c_f", self.c_f),
            ("c_dc", self.c_dc),
            ("s_base", self.s_base),
            ("v_base", self.v_base),
            ("f_nom", self.f_nom),
            ("omega_bi", self.omega_bi),
            ("c_i", self.c_i),
            ("omega_bv", self.omega_bv),
            ("c_v", self.c_v),
            ("k_d_dc", self.k_d_dc),
            ("pwm_tau", self.pwm_tau),
            ("dt", self.dt),
            ("t_sample", self.t_sample),
        ] {
            ensure_positive(name, v)?;
        }
        Ok(())
    }

    pub fn base(&self) -> Result<PerUnitBase> {
        PerUnitBase::new(self.s_base, self.v_base)
    }

    pub fn current_gains(&self) -> Result<PiGains> {
        tune_current_controller(self.l_f, self.omega_bi, self.c_i)
    }

    pub fn voltage_gains(&self) -> Result<PiGains> {
        tune_voltage_controller(self.c_f, self.omega_bv, self.c_v)
    }

    pub fn dc_droop(&self) -> Result<DcDroopParams> {
        DcDroopParams::new(self.k_d_dc, self.base()?.capacitance_time(self.c_dc))
    }

    /// AC droop obtained from the DC design through the duality map.
    pub fn ac_droop(&self) -> Result<AcDroopParams> {
        duality_map(self.c_dc, self.k_d_dc, &self.base()?)
    }

    pub fn dc_plant(&self) -> Result<PlantParams> {
        PlantParams::new(self.v_in, self.l_f, self.c_dc, PlantKind::Dc)
    }

    pub fn ac_plant(&self) -> Result<PlantParams> {
        PlantParams::new(self.v_in, self.l_f, self.c_f, PlantKind::AcDqAxis)
    }

    pub fn pwm(&self) -> Result<PwmDelay> {
        PwmDelay::new(self.pwm_tau, self.v_in)
    }

    pub fn sim_config(&self, t_end: f64, record_decimation: usize) -> Result<SimConfig> {
        SimConfig::new(t_end, self.dt, self.t_sample, record_decimation)
    }

    pub fn default_sim_config(&self, t_end: f64) -> Result<SimConfig> {
        self.sim_config(t_end, DEFAULT_RECORD_DECIMATION)
    }
}

impl Default for Setup {
    fn default() -> Self {
        Self::reference()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_is_valid() {
        let s = Setup::reference();
        s.validate().unwrap();
        assert_relative_eq!(s.dc_droop().unwrap().c_dc_pu, 2.205, max_relative = 1e-12);
        assert_relative_eq!(s.ac_droop().unwrap().h, 1.1025, max_relative = 1e-12);
        assert_relative_eq!(s.current_gains().unwrap().k_p, 24.190, max_relative = 1e-4);
    }

    #[test]
    fn rejects_zero_component() {
        let s = Setup {
            c_dc: 0.0,
            ..Setup::reference()
        };
        assert!(s.validate().is_err());
    }
}

//! Internal-model-control PI tuning, droop/swing parameter mapping and the
//! AC↔DC parameter mapper.
//!
//! Inner controllers are tuned in SI units. Droop and inertia quantities are
//! per unit, with capacitance expressed as a time constant (see [`crate::pu`]).

use crate::error::{ensure_positive, Result};
use crate::pu::PerUnitBase;
use crate::tf::RationalTf;

/// PI gains in the `k_p · (1 + s·t_i) / (s·t_i)` form.
///
/// `t_i = ∞` disables the integral action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiGains {
    pub k_p: f64,
    pub t_i: f64,
}

impl PiGains {
    pub fn new(k_p: f64, t_i: f64) -> Result<Self> {
        ensure_positive("k_p", k_p)?;
        ensure_positive("t_i", t_i)?;
        Ok(Self { k_p, t_i })
    }

    pub fn proportional(k_p: f64) -> Result<Self> {
        Self::new(k_p, f64::INFINITY)
    }

    /// Integral gain `k_p / t_i`.
    pub fn k_i(&self) -> f64 {
        self.k_p / self.t_i
    }

    /// The controller as a transfer function, `(k_p·t_i·s + k_p) / (t_i·s)`.
    pub fn to_tf(&self) -> RationalTf {
        if self.t_i.is_infinite() {
            return RationalTf::constant(self.k_p);
        }
        RationalTf::new(vec![self.k_p, self.k_p * self.t_i], vec![0.0, self.t_i])
            .expect("t_i > 0")
    }
}

/// Current-loop bandwidth chosen as 1 % of the switching frequency.
pub fn current_bandwidth_from_switching(f_sw: f64) -> f64 {
    0.01 * 2.0 * std::f64::consts::PI * f_sw
}

pub fn tune_current_controller(l_f: f64, omega_bi: f64, c_i: f64) -> Result<PiGains> {
    ensure_positive("l_f", l_f)?;
    ensure_positive("omega_bi", omega_bi)?;
    ensure_positive("c_i", c_i)?;
    PiGains::new(omega_bi * l_f, c_i / omega_bi)
}

pub fn tune_voltage_controller(c_f: f64, omega_bv: f64, c_v: f64) -> Result<PiGains> {
    ensure_positive("c_f", c_f)?;
    ensure_positive("omega_bv", omega_bv)?;
    ensure_positive("c_v", c_v)?;
    PiGains::new(omega_bv * c_f, c_v / omega_bv)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcDroopParams {
    /// P–ω droop gain, p.u. frequency per p.u. power.
    pub m_p: f64,
    /// Power low-pass corner, rad/s.
    pub omega_c: f64,
    /// Equivalent inertia constant, s.
    pub h: f64,
    /// Equivalent damping, p.u.
    pub k_d_ac: f64,
}

impl AcDroopParams {
    pub fn from_droop(m_p: f64, omega_c: f64) -> Result<Self> {
        let (h, k_d_ac) = swing_from_droop(m_p, omega_c)?;
        Ok(Self {
            m_p,
            omega_c,
            h,
            k_d_ac,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcDroopParams {
    /// I–V droop gain, p.u. current per p.u. voltage.
    pub k_d_dc: f64,
    /// Output capacitance as a p.u. time constant, s.
    pub c_dc_pu: f64,
}

impl DcDroopParams {
    pub fn new(k_d_dc: f64, c_dc_pu: f64) -> Result<Self> {
        ensure_positive("k_d_dc", k_d_dc)?;
        ensure_positive("c_dc_pu", c_dc_pu)?;
        Ok(Self { k_d_dc, c_dc_pu })
    }
}

/// Droop gain and LPF corner to swing-equation inertia `H` and damping `K_d`.
pub fn swing_from_droop(m_p: f64, omega_c: f64) -> Result<(f64, f64)> {
    ensure_positive("m_p", m_p)?;
    ensure_positive("omega_c", omega_c)?;
    Ok((1.0 / (2.0 * omega_c * m_p), 1.0 / m_p))
}

/// Inverse of [`swing_from_droop`]: `(H, K_d)` to `(m_p, ω_c)`.
pub fn droop_from_swing(h: f64, k_d: f64) -> Result<(f64, f64)> {
    ensure_positive("h", h)?;
    ensure_positive("k_d", k_d)?;
    let m_p = 1.0 / k_d;
    Ok((m_p, 1.0 / (2.0 * h * m_p)))
}

/// Maps a DC I–V droop design onto the AC P–ω droop that has the same
/// per-unit dynamics: `2H = C_dc (p.u.)` and `K_d^ac = K_d^dc`.
pub fn duality_map(c_dc: f64, k_d_dc: f64, base: &PerUnitBase) -> Result<AcDroopParams> {
    ensure_positive("c_dc", c_dc)?;
    ensure_positive("k_d_dc", k_d_dc)?;
    let c_dc_pu = base.capacitance_time(c_dc);
    let h = c_dc_pu / 2.0;
    let k_d_ac = k_d_dc;
    let m_p = 1.0 / k_d_ac;
    let omega_c = 1.0 / (2.0 * h * m_p);
    Ok(AcDroopParams {
        m_p,
        omega_c,
        h,
        k_d_ac,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimescaleReport {
    pub ratio: f64,
    pub ratio_min: f64,
    pub separated: bool,
}

pub const DEFAULT_TIMESCALE_RATIO: f64 = 100.0;

/// Checks that the power filter is much slower than the voltage loop:
/// `ω_βv / ω_c ≥ ratio_min`.
pub fn timescale_check(omega_c: f64, omega_bv: f64, ratio_min: f64) -> Result<TimescaleReport> {
    ensure_positive("omega_c", omega_c)?;
    ensure_positive("omega_bv", omega_bv)?;
    ensure_positive("ratio_min", ratio_min)?;
    let ratio = omega_bv / omega_c;
    Ok(TimescaleReport {
        ratio,
        ratio_min,
        separated: ratio >= ratio_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn reference_base() -> PerUnitBase {
        PerUnitBase::new(4000.0, 350.0).unwrap()
    }

    #[test]
    fn current_controller_reference_values() {
        let w = current_bandwidth_from_switching(50e3);
        assert_relative_eq!(w, 3141.5927, max_relative = 1e-7);
        let g = tune_current_controller(7.7e-3, w, 20.0).unwrap();
        assert_relative_eq!(g.k_p, 24.190, max_relative = 1e-4);
        assert_relative_eq!(g.t_i, 6.3662e-3, max_relative = 1e-4);
    }

    #[test]
    fn unit_current_controller() {
        assert_eq!(
            tune_current_controller(1.0, 1.0, 1.0).unwrap(),
            PiGains { k_p: 1.0, t_i: 1.0 }
        );
    }

    #[test]
    fn ac_and_dc_current_gains_bitwise_equal() {
        let w = current_bandwidth_from_switching(50e3);
        let ac = tune_current_controller(7.7e-3, w, 20.0).unwrap();
        let dc = tune_current_controller(7.7e-3, w, 20.0).unwrap();
        assert_eq!(ac.k_p.to_bits(), dc.k_p.to_bits());
        assert_eq!(ac.t_i.to_bits(), dc.t_i.to_bits());
    }

    #[test]
    fn voltage_controller_reference_values() {
        let wv = 0.2 * current_bandwidth_from_switching(50e3);
        let g = tune_voltage_controller(0.72e-3, wv, 2.5).unwrap();
        assert_relative_eq!(g.k_p, 0.45239, max_relative = 1e-4);
        assert_relative_eq!(g.t_i, 3.9789e-3, max_relative = 1e-4);
        assert_eq!(
            tune_voltage_controller(1.0, 1.0, 1.0).unwrap(),
            PiGains { k_p: 1.0, t_i: 1.0 }
        );
    }

    #[test]
    fn halving_capacitance_halves_k_p_only() {
        let a = tune_voltage_controller(0.72e-3, 628.0, 2.5).unwrap();
        let b = tune_voltage_controller(0.36e-3, 628.0, 2.5).unwrap();
        assert_relative_eq!(b.k_p, a.k_p / 2.0, max_relative = 1e-15);
        assert_eq!(a.t_i, b.t_i);
    }

    #[test]
    fn tuning_rejects_non_positive() {
        assert!(tune_current_controller(0.0, 1.0, 1.0).is_err());
        assert!(tune_voltage_controller(1.0, -1.0, 1.0).is_err());
        assert!(tune_voltage_controller(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn swing_mapping_reference() {
        let (h, k_d) = swing_from_droop(1.0 / 0.75, 0.340136).unwrap();
        assert_relative_eq!(h, 1.1025, max_relative = 1e-6);
        assert_relative_eq!(k_d, 0.75, max_relative = 1e-12);
        assert_eq!(swing_from_droop(1.0, 0.5).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn duality_map_reference() {
        let ac = duality_map(0.072, 0.75, &reference_base()).unwrap();
        assert_relative_eq!(ac.h, 1.1025, max_relative = 1e-12);
        assert_relative_eq!(ac.omega_c, 0.340136, max_relative = 1e-6);
        assert_relative_eq!(ac.k_d_ac, 0.75, max_relative = 1e-12);
    }

    #[test]
    fn duality_map_unit_base() {
        let base = PerUnitBase::new(1.0, 1.0).unwrap();
        let ac = duality_map(2.0, 1.0, &base).unwrap();
        assert_eq!(ac.h, 1.0);
        assert_eq!(ac.m_p, 1.0);
        assert_eq!(ac.omega_c, 0.5);
    }

    #[test]
    fn timescale_reference_and_boundaries() {
        let r = timescale_check(0.340136, 628.319, DEFAULT_TIMESCALE_RATIO).unwrap();
        assert!(r.separated);
        assert!((r.ratio - 1847.2).abs() < 0.5);
        assert!(!timescale_check(1.0, 10.0, 100.0).unwrap().separated);
        assert!(timescale_check(1.0, 100.0, 100.0).unwrap().separated);
    }

    #[test]
    fn pi_tf_form() {
        let g = PiGains::new(2.0, 0.5).unwrap();
        let v = g.to_tf().eval(4.0).unwrap();
        // k_p (1 + 1/(jω t_i)) = 2 (1 - j/2)
        assert_relative_eq!(v.re, 2.0, epsilon = 1e-14);
        assert_relative_eq!(v.im, -1.0, epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn swing_droop_bijection(m_p in 0.01f64..100.0, w in 0.01f64..100.0) {
            let (h, k_d) = swing_from_droop(m_p, w).unwrap();
            let (m2, w2) = droop_from_swing(h, k_d).unwrap();
            prop_assert!((m2 - m_p).abs() <= 1e-12 * m_p);
            prop_assert!((w2 - w).abs() <= 1e-12 * w);
        }

        #[test]
        fn duality_map_consistent_with_swing(c in 1e-4f64..1.0, k in 0.05f64..10.0) {
            let ac = duality_map(c, k, &reference_base()).unwrap();
            let (h, k_d) = swing_from_droop(ac.m_p, ac.omega_c).unwrap();
            prop_assert!((h - ac.h).abs() <= 1e-12 * ac.h);
            prop_assert!((k_d - ac.k_d_ac).abs() <= 1e-12 * ac.k_d_ac);
        }

        #[test]
        fn inertia_monotone_in_capacitance(c in 1e-4f64..1.0, dc in 1e-5f64..1.0, k in 0.05f64..10.0) {
            let a = duality_map(c, k, &reference_base()).unwrap();
            let b = duality_map(c + dc, k, &reference_base()).unwrap();
            prop_assert!(b.h > a.h);
            prop_assert!(b.omega_c < a.omega_c);
        }
    }
}

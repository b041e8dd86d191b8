//! Per-unit base values.
//!
//! Inductance and capacitance are normalised to time constants (seconds):
//! `C · z_base` and `L / z_base`. With that convention a DC-link capacitance
//! expressed in per unit is directly comparable to twice an inertia constant.

use crate::error::{ensure_positive, Result};

/// Electrical quantity kinds that convert with a single base value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Voltage,
    Current,
    Power,
    Impedance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerUnitBase {
    s_base: f64,
    v_base: f64,
    i_base: f64,
    z_base: f64,
}

impl PerUnitBase {
    /// Builds a base from power (W) and voltage (V); current and impedance
    /// bases are derived.
    pub fn new(s_base: f64, v_base: f64) -> Result<Self> {
        ensure_positive("s_base", s_base)?;
        ensure_positive("v_base", v_base)?;
        Ok(Self {
            s_base,
            v_base,
            i_base: s_base / v_base,
            z_base: v_base * v_base / s_base,
        })
    }

    pub fn s_base(&self) -> f64 {
        self.s_base
    }

    pub fn v_base(&self) -> f64 {
        self.v_base
    }

    pub fn i_base(&self) -> f64 {
        self.i_base
    }

    pub fn z_base(&self) -> f64 {
        self.z_base
    }

    fn base_of(&self, q: Quantity) -> f64 {
        match q {
            Quantity::Voltage => self.v_base,
            Quantity::Current => self.i_base,
            Quantity::Power => self.s_base,
            Quantity::Impedance => self.z_base,
        }
    }

    pub fn to_pu(&self, q: Quantity, si: f64) -> f64 {
        si / self.base_of(q)
    }

    pub fn from_pu(&self, q: Quantity, pu: f64) -> f64 {
        pu * self.base_of(q)
    }

    /// Capacitance as a per-unit time constant in seconds.
    pub fn capacitance_time(&self, farads: f64) -> f64 {
        farads * self.z_base
    }

    /// Inductance as a per-unit time constant in seconds.
    pub fn inductance_time(&self, henries: f64) -> f64 {
        henries / self.z_base
    }
}

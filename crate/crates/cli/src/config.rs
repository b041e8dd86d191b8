//! JSON scenario configuration.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use duality_core::ac::{AcControlMode, AcOperatingPoint, AC_INPUTS_CURRENT_REFERENCE, AC_INPUTS_DROOP, AC_SIGNALS};
use duality_core::dc::{DcControlMode, DcOperatingPoint, DC_INPUTS, DC_SIGNALS};
use duality_core::setup::Setup;
use duality_core::sim::{SimConfig, StepEvent, DEFAULT_DT, DEFAULT_RECORD_DECIMATION, DEFAULT_T_SAMPLE};
use duality_core::tuning::{current_bandwidth_from_switching, AcDroopParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("invalid field `{field}`: {reason}")]
    Schema { field: String, reason: String },
    #[error("inconsistent operating point: {0}")]
    Inconsistent(String),
}

fn schema(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Schema {
        field: field.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConverterSel {
    Ac,
    Dc,
    Both,
}

impl ConverterSel {
    pub fn includes_ac(self) -> bool {
        matches!(self, Self::Ac | Self::Both)
    }

    pub fn includes_dc(self) -> bool {
        matches!(self, Self::Dc | Self::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlModeSel {
    #[default]
    Droop,
    CurrentReference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatingPointCfg {
    /// Output power, W.
    pub p_o: f64,
    /// DC output voltage, or AC line-to-line RMS voltage, V.
    pub v_o: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentsCfg {
    pub v_in: f64,
    pub l_f: f64,
    pub c_f: f64,
    pub c_dc: f64,
    /// AC load resistance, Ω. Must agree with the operating point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_load: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseCfg {
    pub s_base: f64,
    pub v_base: f64,
    pub f_nom: f64,
}

impl Default for BaseCfg {
    fn default() -> Self {
        Self {
            s_base: 4000.0,
            v_base: 350.0,
            f_nom: 50.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TuningCfg {
    /// Switching frequency, Hz. Sets the current bandwidth when `omega_bi`
    /// is absent.
    pub f_sw: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_bi: Option<f64>,
    pub c_i: f64,
    /// `ω_βv/ω_βi` when `omega_bv` is absent.
    pub bandwidth_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_bv: Option<f64>,
    pub c_v: f64,
    pub k_d_dc: f64,
    pub pwm_tau: f64,
}

impl Default for TuningCfg {
    fn default() -> Self {
        Self {
            f_sw: 50e3,
            omega_bi: None,
            c_i: 20.0,
            bandwidth_ratio: 0.2,
            omega_bv: None,
            c_v: 2.5,
            k_d_dc: 0.75,
            pwm_tau: 10e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcDroopCfg {
    pub m_p: f64,
    pub omega_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventCfg {
    pub t: f64,
    pub target: String,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimCfg {
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_sample")]
    pub t_sample: f64,
    #[serde(default = "default_decimation")]
    pub record_decimation: usize,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_t_sample() -> f64 {
    DEFAULT_T_SAMPLE
}

fn default_decimation() -> usize {
    DEFAULT_RECORD_DECIMATION
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputsCfg {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv_dir: Option<PathBuf>,
    pub plot: bool,
    /// Signals written and plotted; all when empty. Prefixed `ac.`/`dc.`
    /// when both converters run.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub signals: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub converter: ConverterSel,
    #[serde(default)]
    pub mode: ControlModeSel,
    pub operating_point: OperatingPointCfg,
    pub components: ComponentsCfg,
    #[serde(default)]
    pub base: BaseCfg,
    #[serde(default)]
    pub tuning: TuningCfg,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ac_droop: Option<AcDroopCfg>,
    #[serde(default)]
    pub events: Vec<EventCfg>,
    pub sim: SimCfg,
    #[serde(default)]
    pub outputs: OutputsCfg,
}

/// Which model an event or signal refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Ac,
    Dc,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn setup(&self) -> Setup {
        let t = &self.tuning;
        let omega_bi = t.omega_bi.unwrap_or_else(|| current_bandwidth_from_switching(t.f_sw));
        Setup {
            v_in: self.components.v_in,
            l_f: self.components.l_f,
            c_f: self.components.c_f,
            c_dc: self.components.c_dc,
            s_base: self.base.s_base,
            v_base: self.base.v_base,
            f_nom: self.base.f_nom,
            omega_bi,
            c_i: t.c_i,
            omega_bv: t.omega_bv.unwrap_or(t.bandwidth_ratio * omega_bi),
            c_v: t.c_v,
            k_d_dc: t.k_d_dc,
            pwm_tau: t.pwm_tau,
            dt: self.sim.dt,
            t_sample: self.sim.t_sample,
        }
    }

    pub fn sim_config(&self) -> Result<SimConfig, ConfigError> {
        SimConfig::new(self.sim.t_end, self.sim.dt, self.sim.t_sample, self.sim.record_decimation)
            .map_err(|e| schema("sim", e.to_string()))
    }

    pub fn dc_operating_point(&self) -> DcOperatingPoint {
        DcOperatingPoint {
            p_o: self.operating_point.p_o,
            v_o: self.operating_point.v_o,
        }
    }

    pub fn ac_operating_point(&self) -> AcOperatingPoint {
        AcOperatingPoint {
            p_o: self.operating_point.p_o,
            v_ll_rms: self.operating_point.v_o,
        }
    }

    pub fn dc_mode(&self) -> DcControlMode {
        match self.mode {
            ControlModeSel::Droop => DcControlMode::Droop,
            ControlModeSel::CurrentReference => DcControlMode::CurrentReference,
        }
    }

    pub fn ac_mode(&self) -> AcControlMode {
        match self.mode {
            ControlModeSel::Droop => AcControlMode::Droop,
            ControlModeSel::CurrentReference => AcControlMode::CurrentReference,
        }
    }

    pub fn ac_droop_override(&self) -> Option<AcDroopParams> {
        self.ac_droop
            .map(|d| AcDroopParams::from_droop(d.m_p, d.omega_c).expect("validated"))
    }

    fn sides(&self) -> Vec<Side> {
        let mut v = Vec::new();
        if self.converter.includes_ac() {
            v.push(Side::Ac);
        }
        if self.converter.includes_dc() {
            v.push(Side::Dc);
        }
        v
    }

    /// Splits an `ac.`/`dc.` prefixed name; unprefixed names belong to the
    /// single configured converter.
    pub fn resolve_name<'a>(&self, name: &'a str) -> Option<(Side, &'a str)> {
        match self.converter {
            ConverterSel::Both => {
                if let Some(rest) = name.strip_prefix("ac.") {
                    Some((Side::Ac, rest))
                } else {
                    name.strip_prefix("dc.").map(|rest| (Side::Dc, rest))
                }
            }
            ConverterSel::Ac => Some((Side::Ac, name)),
            ConverterSel::Dc => Some((Side::Dc, name)),
        }
    }

    fn steppable(&self, side: Side) -> &'static [&'static str] {
        match (side, self.mode) {
            (Side::Dc, _) => DC_INPUTS,
            (Side::Ac, ControlModeSel::Droop) => AC_INPUTS_DROOP,
            (Side::Ac, ControlModeSel::CurrentReference) => AC_INPUTS_CURRENT_REFERENCE,
        }
    }

    /// Events destined for one converter, sorted by time.
    pub fn events_for(&self, side: Side) -> Vec<StepEvent> {
        let mut ev: Vec<StepEvent> = self
            .events
            .iter()
            .filter_map(|e| match self.resolve_name(&e.target) {
                Some((s, name)) if s == side => Some(StepEvent::new(e.t, name, e.value)),
                _ => None,
            })
            .collect();
        ev.sort_by(|a, b| a.t.total_cmp(&b.t));
        ev
    }

    /// Selected output signals for one converter, in configured order.
    pub fn signals_for(&self, side: Side) -> Vec<String> {
        let all = match side {
            Side::Ac => AC_SIGNALS,
            Side::Dc => DC_SIGNALS,
        };
        if self.outputs.signals.is_empty() {
            return all.iter().map(|s| s.to_string()).collect();
        }
        self.outputs
            .signals
            .iter()
            .filter_map(|s| match self.resolve_name(s) {
                Some((sd, name)) if sd == side => Some(name.to_string()),
                _ => None,
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(schema(field, format!("must be positive and finite, got {v}")))
            }
        };
        let c = &self.components;
        positive("components.v_in", c.v_in)?;
        positive("components.l_f", c.l_f)?;
        positive("components.c_f", c.c_f)?;
        positive("components.c_dc", c.c_dc)?;
        positive("base.s_base", self.base.s_base)?;
        positive("base.v_base", self.base.v_base)?;
        positive("base.f_nom", self.base.f_nom)?;
        let t = &self.tuning;
        positive("tuning.f_sw", t.f_sw)?;
        positive("tuning.c_i", t.c_i)?;
        positive("tuning.bandwidth_ratio", t.bandwidth_ratio)?;
        positive("tuning.c_v", t.c_v)?;
        positive("tuning.k_d_dc", t.k_d_dc)?;
        positive("tuning.pwm_tau", t.pwm_tau)?;
        if let Some(w) = t.omega_bi {
            positive("tuning.omega_bi", w)?;
        }
        if let Some(w) = t.omega_bv {
            positive("tuning.omega_bv", w)?;
        }
        positive("operating_point.v_o", self.operating_point.v_o)?;
        let p_o = self.operating_point.p_o;
        if !(p_o >= 0.0 && p_o.is_finite()) {
            return Err(schema("operating_point.p_o", format!("must be non-negative, got {p_o}")));
        }

        if let Some(r) = c.r_load {
            positive("components.r_load", r)?;
            if !self.converter.includes_ac() {
                return Err(schema("components.r_load", "only the AC converter has a resistive load"));
            }
            let expected = self.ac_operating_point().load_resistance();
            if (r - expected).abs() > 1e-6 * expected {
                return Err(ConfigError::Inconsistent(format!(
                    "r_load = {r} Ω but v_o²/p_o = {expected} Ω"
                )));
            }
        }

        match (self.converter, self.ac_droop) {
            (ConverterSel::Both, Some(_)) => {
                return Err(schema(
                    "ac_droop",
                    "not permitted when converter = both; the AC droop follows from c_dc and k_d_dc",
                ))
            }
            (ConverterSel::Dc, Some(_)) => {
                return Err(schema("ac_droop", "not used by the DC converter"))
            }
            (_, Some(d)) => {
                positive("ac_droop.m_p", d.m_p)?;
                positive("ac_droop.omega_c", d.omega_c)?;
            }
            _ => {}
        }

        self.sim_config()?;

        for (k, e) in self.events.iter().enumerate() {
            let field = format!("events[{k}]");
            if !(e.t >= 0.0 && e.t <= self.sim.t_end) {
                return Err(schema(&field, format!("t = {} s outside [0, {}] s", e.t, self.sim.t_end)));
            }
            if !e.value.is_finite() {
                return Err(schema(&field, "value must be finite"));
            }
            let known = self
                .resolve_name(&e.target)
                .is_some_and(|(side, name)| self.steppable(side).contains(&name));
            if !known {
                return Err(schema(&field, format!("unknown target `{}`", e.target)));
            }
        }

        let mut seen = HashSet::new();
        for s in &self.outputs.signals {
            if !seen.insert(s.as_str()) {
                return Err(schema("outputs.signals", format!("duplicate signal `{s}`")));
            }
            let known = self.resolve_name(s).is_some_and(|(side, name)| {
                let all = match side {
                    Side::Ac => AC_SIGNALS,
                    Side::Dc => DC_SIGNALS,
                };
                all.contains(&name)
            });
            if !known {
                return Err(schema("outputs.signals", format!("unknown signal `{s}`")));
            }
        }
        if !self.outputs.signals.is_empty() {
            for side in self.sides() {
                if self.signals_for(side).is_empty() {
                    return Err(schema(
                        "outputs.signals",
                        format!("no signal selected for the {side:?} converter"),
                    ));
                }
            }
        }
        Ok(())
    }
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ScenarioConfig::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "converter": "dc",
        "operating_point": { "p_o": 2000, "v_o": 350 },
        "components": { "v_in": 700, "l_f": 7.7e-3, "c_f": 0.72e-3, "c_dc": 72e-3 },
        "sim": { "t_end": 1.0 }
    }"#;

    fn with(patch: impl FnOnce(&mut serde_json::Value)) -> String {
        let mut v: serde_json::Value = serde_json::from_str(MINIMAL).unwrap();
        patch(&mut v);
        v.to_string()
    }

    #[test]
    fn minimal_applies_defaults() {
        let c = ScenarioConfig::from_json(MINIMAL).unwrap();
        let s = c.setup();
        assert_eq!(s, Setup::reference());
        assert_eq!(c.sim.record_decimation, 100);
    }

    #[test]
    fn missing_v_in_names_field() {
        let text = with(|v| {
            v["components"].as_object_mut().unwrap().remove("v_in");
        });
        let err = ScenarioConfig::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("v_in"), "{err}");
    }

    #[test]
    fn parse_error_has_position() {
        let err = ScenarioConfig::from_json("{\n  \"converter\": \"dc\",\n  oops\n}")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let text = with(|v| v["sim"]["t_stop"] = 1.0.into());
        let err = ScenarioConfig::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("t_stop"), "{err}");
    }

    #[test]
    fn duplicate_output_signal_rejected() {
        let text = with(|v| v["outputs"] = serde_json::json!({ "signals": ["v_o_pu", "v_o_pu"] }));
        let err = ScenarioConfig::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("duplicate"), "{err}");
    }

    #[test]
    fn both_forbids_ac_droop() {
        let text = with(|v| {
            v["converter"] = "both".into();
            v["ac_droop"] = serde_json::json!({ "m_p": 1.0, "omega_c": 1.0 });
        });
        assert!(matches!(
            ScenarioConfig::from_json(&text),
            Err(ConfigError::Schema { field, .. }) if field == "ac_droop"
        ));
    }

    #[test]
    fn inconsistent_load_resistance() {
        let text = with(|v| {
            v["converter"] = "ac".into();
            v["components"]["r_load"] = 50.0.into();
        });
        assert!(matches!(ScenarioConfig::from_json(&text), Err(ConfigError::Inconsistent(_))));
        let ok = with(|v| {
            v["converter"] = "ac".into();
            v["components"]["r_load"] = 61.25.into();
        });
        ScenarioConfig::from_json(&ok).unwrap();
    }

    #[test]
    fn events_checked_against_targets_and_horizon() {
        let bad_target = with(|v| {
            v["events"] = serde_json::json!([{ "t": 0.5, "target": "r_load_ohm", "value": 1.0 }])
        });
        assert!(ScenarioConfig::from_json(&bad_target).is_err());
        let late = with(|v| {
            v["events"] = serde_json::json!([{ "t": 2.0, "target": "i_o_pu", "value": 0.6 }])
        });
        assert!(ScenarioConfig::from_json(&late).is_err());
        let both = with(|v| {
            v["converter"] = "both".into();
            v["events"] = serde_json::json!([
                { "t": 0.5, "target": "dc.i_o_pu", "value": 0.75 },
                { "t": 0.5, "target": "ac.p_load_pu", "value": 0.75 }
            ]);
        });
        let c = ScenarioConfig::from_json(&both).unwrap();
        assert_eq!(c.events_for(Side::Dc)[0].target, "i_o_pu");
        assert_eq!(c.events_for(Side::Ac)[0].target, "p_load_pu");
    }

    #[test]
    fn round_trip() {
        let text = with(|v| {
            v["converter"] = "both".into();
            v["tuning"] = serde_json::json!({ "omega_bi": 3000.0, "c_i": 15.0 });
            v["events"] = serde_json::json!([{ "t": 0.5, "target": "dc.i_o_pu", "value": 0.75 }]);
            v["outputs"] = serde_json::json!({ "plot": true, "signals": ["ac.omega_pu", "dc.v_o_pu"] });
        });
        let c = ScenarioConfig::from_json(&text).unwrap();
        let again = ScenarioConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(c, again);
    }
}

//! The published JSON schema stays in sync with the configuration types.

use std::collections::BTreeSet;

use duality_cli::config::ScenarioConfig;
use serde_json::Value;

const SCHEMA: &str = include_str!("../../../book/src/scenario.schema.json");

const FULL: &str = r#"{
  "converter": "ac",
  "mode": "droop",
  "operating_point": { "p_o": 2000, "v_o": 350 },
  "components": { "v_in": 700, "l_f": 7.7e-3, "c_f": 0.72e-3, "c_dc": 72e-3, "r_load": 61.25 },
  "base": { "s_base": 4000, "v_base": 350, "f_nom": 50 },
  "tuning": { "f_sw": 50000, "omega_bi": 3000, "c_i": 20, "bandwidth_ratio": 0.2,
              "omega_bv": 600, "c_v": 2.5, "k_d_dc": 0.75, "pwm_tau": 1e-5 },
  "ac_droop": { "m_p": 1.3333333333333333, "omega_c": 0.34 },
  "events": [{ "t": 0.1, "target": "p_load_pu", "value": 0.6 }],
  "sim": { "t_end": 1, "dt": 1e-6, "t_sample": 1e-5, "record_decimation": 100 },
  "outputs": { "csv_dir": "out", "plot": true, "signals": ["omega_pu"] }
}"#;

fn keys(v: &Value) -> BTreeSet<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

#[test]
fn schema_properties_match_serialized_config() {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let cfg = ScenarioConfig::from_json(FULL).unwrap();
    let ser: Value = serde_json::from_str(&cfg.to_json()).unwrap();
    let props = &schema["properties"];
    assert_eq!(keys(props), keys(&ser));
    for (name, value) in ser.as_object().unwrap() {
        if let Value::Object(_) = value {
            assert_eq!(keys(&props[name]["properties"]), keys(value), "{name}");
        }
    }
    assert_eq!(
        keys(&props["events"]["items"]["properties"]),
        keys(&ser["events"][0])
    );
}

#[test]
fn schema_required_fields_are_required() {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let full: Value = serde_json::from_str(FULL).unwrap();
    for field in schema["required"].as_array().unwrap() {
        let mut v = full.clone();
        v.as_object_mut().unwrap().remove(field.as_str().unwrap());
        assert!(ScenarioConfig::from_json(&v.to_string()).is_err(), "{field}");
    }
    for field in schema["properties"]["components"]["required"].as_array().unwrap() {
        let mut v = full.clone();
        v["components"].as_object_mut().unwrap().remove(field.as_str().unwrap());
        assert!(ScenarioConfig::from_json(&v.to_string()).is_err(), "{field}");
    }
}

//! End-to-end duality: mapped parameters give matching reduced models and
//! matching full-model trajectories.

use duality_core::dc::{build_dc_scenario, DcControlMode, DcOperatingPoint};
use duality_core::ac::{build_ac_scenario, AcControlMode, AcOperatingPoint};
use duality_core::oracle::{duality_twin, reduced_step_response, ReducedModel};
use duality_core::setup::Setup;
use duality_core::sim::{run, StepEvent};
use duality_core::tuning::{droop_from_swing, swing_from_droop};
use duality_core::verify::{align_and_compare, Metric, SignalSel, Tolerance, Window};

#[test]
fn mapped_reference_parameters() {
    let s = Setup::reference();
    let ac = s.ac_droop().unwrap();
    let dc = s.dc_droop().unwrap();
    assert!((ac.h - 1.1025).abs() <= 1e-12 * 1.1025);
    let (h, k) = swing_from_droop(ac.m_p, ac.omega_c).unwrap();
    assert!((h - ac.h).abs() <= 1e-12 * h && (k - ac.k_d_ac).abs() <= 1e-12 * k);
    let (m_p, w_c) = droop_from_swing(h, k).unwrap();
    assert!((m_p - ac.m_p).abs() <= 1e-12 * m_p && (w_c - ac.omega_c).abs() <= 1e-12 * w_c);
    let a = ReducedModel::from_ac(&ac, 0.5).unwrap();
    let d = ReducedModel::from_dc(&dc, 0.5).unwrap();
    assert!(duality_twin(&a, &d));
}

#[test]
fn short_disturbance_overlay_tracks_oracle() {
    let s = Setup::reference();
    let cfg = s.sim_config(1.0, 100).unwrap();
    let ac = build_ac_scenario(AcOperatingPoint::reference(), &s, AcControlMode::Droop).unwrap();
    let dc = build_dc_scenario(DcOperatingPoint::reference(), &s, DcControlMode::Droop).unwrap();
    let ta = run(ac, cfg, vec![StepEvent::new(0.2, "p_load_pu", 0.6)]).unwrap();
    let td = run(dc, cfg, vec![StepEvent::new(0.2, "i_o_pu", 0.6)]).unwrap();
    let report = align_and_compare(
        &ta,
        SignalSel::pu("omega_pu"),
        &td,
        SignalSel::pu("v_o_pu"),
        Window::new(0.2, 1.0),
        Tolerance { metric: Metric::MaxAbs, limit: 1e-3 },
    )
    .unwrap();
    assert!(report.pass, "{report}");
    let m = ReducedModel::from_dc(&s.dc_droop().unwrap(), 0.5).unwrap();
    let v = td.signal("v_o_pu").unwrap();
    let last = v.len() - 1;
    let expected = reduced_step_response(&m, 0.1, td.time(last) - 0.2).unwrap();
    assert!((v[last] - expected).abs() < 1e-4, "{} vs {expected}", v[last]);
}

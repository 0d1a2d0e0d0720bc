use qmlab::sensor::{simulate_response_with_tol, SensorParams};
use std::time::Instant;

#[test]
fn time_one_trace() {
    let t0 = 2.0f64.sqrt();
    let times: Vec<f64> = (0..=101).map(|i| t0 * i as f64 / 101.0).collect();
    for (amp, tol) in [(1.0, 1e-7), (25.0, 1e-7), (25.0, 1e-6)] {
        let p = SensorParams {
            omega_tg_amp: amp,
            ..SensorParams::default()
        };
        let start = Instant::now();
        let tr = simulate_response_with_tol(&p, &times, tol).unwrap();
        println!(
            "amp={amp} tol={tol:.0e}: {:?}  drift={:.2e} pd_end={:.4}",
            start.elapsed(),
            tr.norm_drift,
            tr.pd[101]
        );
    }
}

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;

use crate::quantum::{evolve, StateVector, TimeDependentHamiltonian};

use super::params::khz_to_angular;
use super::{SensorError, SensorParams};

/// Default per-step integration tolerance for sensor traces.
pub const SIM_TOL: f64 = 1e-7;

/// Basis order of the rotating-frame model: bare clock state, probe state,
/// and the two Zeeman states.
const LABELS: [&str; 4] = ["0", "0'", "1", "-1"];
const IDX_0: usize = 0;
const IDX_0P: usize = 1;
const IDX_1: usize = 2;
const IDX_M1: usize = 3;

/// Dark-state population over a time grid.
#[derive(Debug, Clone)]
pub struct ResponseTrace {
    pub times: Vec<f64>,
    pub pd: Vec<f64>,
    /// Worst norm deviation of the underlying integration.
    pub norm_drift: f64,
}

fn labels() -> Vec<String> {
    LABELS.iter().map(|s| s.to_string()).collect()
}

/// `|D> = (|-1> - |1>)/sqrt(2)`, the dressed dark state.
pub(crate) fn dark_state() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    StateVector::new(
        labels(),
        vec![z, z, Complex64::new(-h, 0.0), Complex64::new(h, 0.0)],
    )
    .expect("static state")
}

fn coupling_x(a: usize, b: usize) -> Array2<Complex64> {
    let mut m = Array2::zeros((4, 4));
    m[[a, b]] = Complex64::new(1.0, 0.0);
    m[[b, a]] = Complex64::new(1.0, 0.0);
    m
}

fn coupling_y(a: usize, b: usize) -> Array2<Complex64> {
    let mut m = Array2::zeros((4, 4));
    m[[a, b]] = Complex64::new(0.0, 1.0);
    m[[b, a]] = Complex64::new(0.0, -1.0);
    m
}

/// Rotating-frame Hamiltonian at the bare transition frequencies. The strong
/// dressing drives are taken in their rotating-wave form; the target drive
/// keeps its full oscillation unless `drop_counter_rotating` is set. A
/// complex coefficient `c(t)` on `|a><b| + h.c.` is split into real
/// envelopes on the Hermitian pair `X_ab`, `Y_ab`.
pub(crate) fn build_hamiltonian(p: &SensorParams) -> TimeDependentHamiltonian {
    type Env = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

    let omega_ang = khz_to_angular(p.omega_dress);
    let amp = khz_to_angular(p.omega_tg_amp);
    let w_tg = khz_to_angular(p.omega_tg());
    let w_plus = khz_to_angular(p.omega_b);
    let w_minus = khz_to_angular(p.omega_b - 2.0 * p.delta2);

    let mut dress = coupling_x(IDX_1, IDX_0);
    dress += &coupling_x(IDX_M1, IDX_0);
    let mut terms: Vec<(Array2<Complex64>, Env)> = vec![(
        dress,
        Arc::new(move |_t: f64| 0.5 * omega_ang) as Env,
    )];

    if p.drop_counter_rotating {
        // c_plus(t) = amp/2 e^{i (w_plus - w_tg) t}, c_minus(t) = amp/2 e^{i (w_tg - w_minus) t}
        let d_plus = w_plus - w_tg;
        let d_minus = w_tg - w_minus;
        terms.push((
            coupling_x(IDX_1, IDX_0P),
            Arc::new(move |t: f64| 0.5 * amp * (d_plus * t).cos()),
        ));
        terms.push((
            coupling_y(IDX_1, IDX_0P),
            Arc::new(move |t: f64| 0.5 * amp * (d_plus * t).sin()),
        ));
        terms.push((
            coupling_x(IDX_M1, IDX_0P),
            Arc::new(move |t: f64| 0.5 * amp * (d_minus * t).cos()),
        ));
        terms.push((
            coupling_y(IDX_M1, IDX_0P),
            Arc::new(move |t: f64| 0.5 * amp * (d_minus * t).sin()),
        ));
    } else {
        // c_plus(t) = amp cos(w_tg t) e^{i w_plus t}, c_minus(t) = amp cos(w_tg t) e^{-i w_minus t}
        terms.push((
            coupling_x(IDX_1, IDX_0P),
            Arc::new(move |t: f64| amp * (w_tg * t).cos() * (w_plus * t).cos()),
        ));
        terms.push((
            coupling_y(IDX_1, IDX_0P),
            Arc::new(move |t: f64| amp * (w_tg * t).cos() * (w_plus * t).sin()),
        ));
        terms.push((
            coupling_x(IDX_M1, IDX_0P),
            Arc::new(move |t: f64| amp * (w_tg * t).cos() * (w_minus * t).cos()),
        ));
        terms.push((
            coupling_y(IDX_M1, IDX_0P),
            Arc::new(move |t: f64| -amp * (w_tg * t).cos() * (w_minus * t).sin()),
        ));
    }

    TimeDependentHamiltonian::new(terms).expect("couplings are Hermitian by construction")
}

/// Integrates the four-level model from `|D>` and reports
/// `P_D(t) = |<D|psi>|^2 / ||psi||^2`; the norm ratio keeps the probability
/// inside [0, 1] while the raw norm drift stays monitored.
pub fn simulate_response_with_tol(
    p: &SensorParams,
    times: &[f64],
    tol: f64,
) -> Result<ResponseTrace, SensorError> {
    let h = build_hamiltonian(p);
    let dark = dark_state();
    let result = evolve(&h, &dark, times, tol)?;
    let pd = result
        .states
        .iter()
        .map(|s| s.overlap(&dark).map(|o| o.norm_sqr() / s.norm_sq()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ResponseTrace {
        times: times.to_vec(),
        pd,
        norm_drift: result.norm_drift,
    })
}

pub fn simulate_response(p: &SensorParams, times: &[f64]) -> Result<ResponseTrace, SensorError> {
    simulate_response_with_tol(p, times, SIM_TOL)
}

/// Harmonic-limit oracle for the dark-state response: a two-level Rabi line
/// in the |D> <-> |0'> subspace with coupling `g = omega_tg_amp / (2 sqrt 2)`
/// (angular) and detuning `xi`.
pub fn effective_pd(omega_tg_amp: f64, xi: f64, t: f64) -> f64 {
    let g = khz_to_angular(omega_tg_amp) / (2.0 * 2.0f64.sqrt());
    let half_det = 0.5 * khz_to_angular(xi);
    let w2 = g * g + half_det * half_det;
    if w2 == 0.0 {
        return 1.0;
    }
    let s = (w2.sqrt() * t).sin();
    1.0 - (g * g / w2) * s * s
}

/// Fits the harmonic reference period `t0` from a full-model trace at the
/// reference point (`omega_tg_amp` = 1 kHz, `xi` = 0): simulate past one
/// period, locate the return to maximum, refine with a least-squares
/// parabola wide enough to average over the fast residual oscillation.
pub fn reference_period(p: &SensorParams) -> Result<f64, SensorError> {
    reference_period_with(p, 1.0)
}

pub fn reference_period_with(p: &SensorParams, omega_tg_ref: f64) -> Result<f64, SensorError> {
    if omega_tg_ref <= 0.0 {
        return Err(SensorError::InvalidSpec(format!(
            "reference amplitude must be > 0, got {omega_tg_ref}"
        )));
    }
    let mut q = p.clone();
    q.omega_tg_amp = omega_tg_ref;
    q.xi = 0.0;

    // horizon from the analytic reconstruction, used only to bound the scan
    let t0_guess = 2.0f64.sqrt() / omega_tg_ref;
    let horizon = 1.6 * t0_guess;
    let n = 2000usize;
    let times: Vec<f64> = (0..=n).map(|i| horizon * i as f64 / n as f64).collect();
    let trace = simulate_response_with_tol(&q, &times, SIM_TOL)?;

    // bracket the FIRST dip: entry below 0.2, exit back above 0.8
    let dip_start = trace
        .pd
        .iter()
        .position(|&pd| pd < 0.2)
        .ok_or(SensorError::FitFailed)?;
    let dip_end = (dip_start..=n)
        .find(|&i| trace.pd[i] > 0.8)
        .ok_or(SensorError::FitFailed)?;
    let imin = (dip_start..dip_end)
        .min_by(|&a, &b| trace.pd[a].partial_cmp(&trace.pd[b]).unwrap())
        .ok_or(SensorError::FitFailed)?;

    // return-to-peak: argmax within one dip-to-peak span after recovery
    let hi = (dip_end + imin + 1).min(n);
    if hi <= dip_end + 2 {
        return Err(SensorError::FitFailed);
    }
    let imax = (dip_end..=hi)
        .max_by(|&a, &b| trace.pd[a].partial_cmp(&trace.pd[b]).unwrap())
        .unwrap();
    if trace.pd[imax] < 0.8 || imax == hi {
        return Err(SensorError::FitFailed);
    }

    // least-squares parabola over +-5% of the candidate period
    let dt = horizon / n as f64;
    let half_window = ((0.05 * times[imax] / dt).round() as usize).max(2);
    let lo = imax.saturating_sub(half_window).max(1);
    let hi = (imax + half_window).min(n);
    let (mut s0, mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut b0, mut b1, mut b2) = (0.0, 0.0, 0.0);
    for i in lo..=hi {
        let u = (times[i] - times[imax]) / dt;
        let y = trace.pd[i];
        s0 += 1.0;
        s1 += u;
        s2 += u * u;
        s3 += u * u * u;
        s4 += u * u * u * u;
        b0 += y;
        b1 += u * y;
        b2 += u * u * y;
    }
    // solve the 3x3 normal equations for y = a + b u + c u^2
    let det = s0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s2 * s3) + s2 * (s1 * s3 - s2 * s2);
    if det.abs() < 1e-30 {
        return Err(SensorError::FitFailed);
    }
    let b = (b0 * (s3 * s2 - s1 * s4) + b1 * (s0 * s4 - s2 * s2) + b2 * (s1 * s2 - s0 * s3)) / det;
    let c = (b0 * (s1 * s3 - s2 * s2) + b1 * (s2 * s1 - s0 * s3) + b2 * (s0 * s2 - s1 * s1)) / det;
    if c >= 0.0 {
        return Err(SensorError::FitFailed);
    }
    let u_peak = -0.5 * b / c;
    Ok(times[imax] + u_peak * dt)
}

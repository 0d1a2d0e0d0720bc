use ndarray::{array, Array2};
use num_complex::Complex64;

use super::state::StateVector;
use super::QuantumError;

/// The gate's activation shape: `f(x) = (1 + x / sqrt(1 + x^2)) / 2`.
/// Strictly increasing, `f(-x) = 1 - f(x)`, saturating at 0 and 1.
pub fn sigmoid(x: f64) -> f64 {
    0.5 * (1.0 + x / (1.0 + x * x).sqrt())
}

/// The sign-fixed two-level Hamiltonian `H = (x sigma_z - omega sigma_x)/2`
/// whose ground state carries the sigmoid excitation probability with
/// all-positive amplitudes. The printed `+omega sigma_x` convention would
/// put the ground state at `(|0> - |1>)/sqrt(2)` for `x = 0`; flipping the
/// sign of the transverse term is a phase redefinition of `|1>` and makes
/// the ground-state amplitudes real positive.
pub fn two_level_hamiltonian_matrix(x: f64, omega: f64) -> Array2<Complex64> {
    let c = |v: f64| Complex64::new(v, 0.0);
    array![[c(0.5 * x), c(-0.5 * omega)], [c(-0.5 * omega), c(-0.5 * x)]]
}

/// Ground state of the sign-fixed two-level Hamiltonian:
/// `sqrt(1 - f(x/omega)) |0> + sqrt(f(x/omega)) |1>` with energy
/// `-sqrt(x^2 + omega^2)/2`. The returned state is verified against the
/// matrix as its minimal eigenvector before being handed out.
///
/// `omega` is a transverse amplitude and must be non-negative; `omega = 0`
/// with `x = 0` has a degenerate spectrum and is rejected.
pub fn ground_state_2level(x: f64, omega: f64) -> Result<(StateVector, f64), QuantumError> {
    if omega < 0.0 {
        return Err(QuantumError::NegativeAmplitude(omega));
    }
    if omega == 0.0 && x == 0.0 {
        return Err(QuantumError::ZeroGap);
    }
    let energy = -0.5 * (x * x + omega * omega).sqrt();
    // f and 1 - f in conjugate forms so neither loses precision when
    // |x| >> omega: 1 -+ u/s = 1 / (s (s +- u)) with s = sqrt(1 + u^2).
    let (f, one_minus_f) = if omega == 0.0 {
        if x > 0.0 {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        }
    } else {
        let u = x / omega;
        let s = (1.0 + u * u).sqrt();
        if u >= 0.0 {
            (0.5 * (1.0 + u / s), 0.5 / (s * (s + u)))
        } else {
            (0.5 / (s * (s - u)), 0.5 * (1.0 - u / s))
        }
    };
    let amps = vec![
        Complex64::new(one_minus_f.sqrt(), 0.0),
        Complex64::new(f.sqrt(), 0.0),
    ];
    let state = StateVector::new(StateVector::qubit_labels(), amps)?;

    // eigenvector residual check; guards the sign convention
    let h = two_level_hamiltonian_matrix(x, omega);
    let a = state.amps();
    let r0 = h[[0, 0]] * a[0] + h[[0, 1]] * a[1] - a[0] * energy;
    let r1 = h[[1, 0]] * a[0] + h[[1, 1]] * a[1] - a[1] * energy;
    let residual = (r0.norm_sqr() + r1.norm_sqr()).sqrt();
    debug_assert!(
        residual <= 1e-12 * (1.0 + energy.abs()),
        "eigenvector residual {residual}"
    );

    Ok((state, energy))
}

use num_complex::Complex64;

use super::QuantumError;

const NORM_TOL: f64 = 1e-9;

/// A pure state: complex amplitudes over a named, ordered basis.
///
/// Normalization is enforced at construction to within 1e-9. Evolution
/// monitors norm drift but never renormalizes a state behind the caller's
/// back.
#[derive(Debug, Clone)]
pub struct StateVector {
    labels: Vec<String>,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(labels: Vec<String>, amps: Vec<Complex64>) -> Result<Self, QuantumError> {
        if labels.len() != amps.len() || labels.len() < 2 {
            return Err(QuantumError::DimensionMismatch {
                expected: labels.len().max(2),
                got: amps.len(),
            });
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(QuantumError::NotNormalized { norm_sq });
        }
        Ok(Self { labels, amps })
    }

    /// Basis state `|index>` over the given labels.
    pub fn basis_state(labels: Vec<String>, index: usize) -> Result<Self, QuantumError> {
        let mut amps = vec![Complex64::new(0.0, 0.0); labels.len()];
        if index >= labels.len() {
            return Err(QuantumError::DimensionMismatch {
                expected: labels.len(),
                got: index + 1,
            });
        }
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(labels, amps)
    }

    /// Qubit basis labels `["0", "1"]`.
    pub fn qubit_labels() -> Vec<String> {
        vec!["0".into(), "1".into()]
    }

    /// `|0>` of a single qubit.
    pub fn qubit_zero() -> Self {
        Self::basis_state(Self::qubit_labels(), 0).expect("static basis")
    }

    /// `|1>` of a single qubit.
    pub fn qubit_one() -> Self {
        Self::basis_state(Self::qubit_labels(), 1).expect("static basis")
    }

    /// `|+> = (|0> + |1>)/sqrt(2)`.
    pub fn qubit_plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(Self::qubit_labels(), vec![h, h]).expect("static state")
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Sum of squared amplitude magnitudes.
    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Population `|<label|psi>|^2` of one basis state, relative to the
    /// current norm so the result stays in [0, 1] even under integrator
    /// drift.
    pub fn population(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr() / self.norm_sq()
    }

    /// Overlap `<other|self>`.
    pub fn overlap(&self, other: &Self) -> Result<Complex64, QuantumError> {
        if self.labels != other.labels {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| b.conj() * a)
            .sum())
    }

    /// Escape hatch for evolution: build a state without the normalization
    /// check (used for intermediate integrator output whose drift is
    /// reported separately).
    pub(crate) fn from_raw(labels: Vec<String>, amps: Vec<Complex64>) -> Self {
        Self { labels, amps }
    }
}

/// Squared overlap `|<b|a>|^2` of two states over the same basis.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64, QuantumError> {
    Ok(a.overlap(b)?.norm_sqr())
}

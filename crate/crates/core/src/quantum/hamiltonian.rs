use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;

use super::QuantumError;

const HERMITIAN_TOL: f64 = 1e-12;

/// Real scalar envelope multiplying a constant matrix term.
pub type Envelope = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One `envelope(t) * matrix` summand of a time-dependent Hamiltonian.
#[derive(Clone)]
pub struct HamiltonianTerm {
    pub(crate) matrix: Array2<Complex64>,
    pub(crate) envelope: Envelope,
}

/// `H(t) = sum_i envelope_i(t) * matrix_i` with each matrix Hermitian, so
/// the sum is Hermitian for every `t` by construction.
#[derive(Clone)]
pub struct TimeDependentHamiltonian {
    terms: Vec<HamiltonianTerm>,
    dim: usize,
}

impl TimeDependentHamiltonian {
    pub fn new(terms: Vec<(Array2<Complex64>, Envelope)>) -> Result<Self, QuantumError> {
        assert!(!terms.is_empty(), "Hamiltonian needs at least one term");
        let dim = terms[0].0.nrows();
        let mut out = Vec::with_capacity(terms.len());
        for (index, (matrix, envelope)) in terms.into_iter().enumerate() {
            if matrix.nrows() != dim || matrix.ncols() != dim {
                return Err(QuantumError::DimensionMismatch {
                    expected: dim,
                    got: matrix.nrows().max(matrix.ncols()),
                });
            }
            let deviation = hermitian_deviation(&matrix);
            if deviation > HERMITIAN_TOL {
                return Err(QuantumError::NonHermitianTerm { index, deviation });
            }
            out.push(HamiltonianTerm { matrix, envelope });
        }
        Ok(Self { terms: out, dim })
    }

    /// A single constant Hermitian matrix.
    pub fn constant(matrix: Array2<Complex64>) -> Result<Self, QuantumError> {
        Self::new(vec![(matrix, Arc::new(|_| 1.0) as Envelope)])
    }

    /// Dense matrix `H(t)` assembled at one instant.
    pub fn matrix_at(&self, t: f64) -> Array2<Complex64> {
        let mut h = Array2::zeros((self.dim, self.dim));
        for term in &self.terms {
            let c = (term.envelope)(t);
            h.scaled_add(Complex64::new(c, 0.0), &term.matrix);
        }
        h
    }
}

fn hermitian_deviation(m: &Array2<Complex64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    dev
}

/// Anything that can apply `H(t)` to a state; the integrator only needs this
/// surface, which lets large structured registers skip dense matrices.
pub trait TimeDependentOperator {
    fn dim(&self) -> usize;
    /// `out = H(t) psi`.
    fn apply(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]);
}

impl TimeDependentOperator for TimeDependentHamiltonian {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        for term in &self.terms {
            let c = (term.envelope)(t);
            if c == 0.0 {
                continue;
            }
            let m = &term.matrix;
            for (i, o) in out.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                let row = m.row(i);
                for (j, p) in psi.iter().enumerate() {
                    acc += row[j] * p;
                }
                *o += acc * c;
            }
        }
    }
}

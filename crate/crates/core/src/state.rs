//! Density matrices with validation and reduction.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpace, Subsystem};
use crate::operator::{dagger, mat_trace, Operator};

/// Validation tolerances for a physical state: unit trace and Hermiticity to
/// 1e-10, positive semidefinite up to solver roundoff −1e-8.
pub const TRACE_TOL: f64 = 1e-10;
pub const HERM_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = -1e-8;

/// A density matrix tied to its space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix {
    space: HilbertSpace,
    matrix: Array2<C64>,
}

impl StateMatrix {
    /// Validate trace, Hermiticity and positivity before accepting a matrix.
    pub fn try_new(space: HilbertSpace, matrix: Array2<C64>) -> Result<Self> {
        let d = space.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "state is {}x{} but the space has dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                d
            )));
        }
        let tr = mat_trace(&matrix);
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let dag = dagger(&matrix);
        let herm_err =
            matrix.iter().zip(dag.iter()).map(|(a, b)| (a - b).norm()).fold(0.0f64, f64::max);
        if herm_err > HERM_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (max deviation {herm_err:.2e})"
            )));
        }
        let (evals, _) = matrix.eigh(UPLO::Lower)?;
        let min = evals.iter().copied().fold(f64::INFINITY, f64::min);
        if min < PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.2e} below tolerance"
            )));
        }
        Ok(Self { space, matrix })
    }

    /// Pure state |ψ⟩⟨ψ| from a (normalized) ket.
    pub fn pure(space: &HilbertSpace, ket: &Array1<C64>) -> Result<Self> {
        let d = space.total_dim();
        if ket.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "ket of length {} on a space of dimension {}",
                ket.len(),
                d
            )));
        }
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if norm <= 0.0 {
            return Err(Error::InvalidState("zero ket".into()));
        }
        let mut m = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[[i, j]] = ket[i] * ket[j].conj() / norm;
            }
        }
        Ok(Self { space: space.clone(), matrix: m })
    }

    /// Basis state |k⟩⟨k|.
    pub fn basis_state(space: &HilbertSpace, k: usize) -> Result<Self> {
        let d = space.total_dim();
        if k >= d {
            return Err(Error::DimensionMismatch(format!("index {k} in dimension {d}")));
        }
        let mut ket = Array1::zeros(d);
        ket[k] = C64::new(1.0, 0.0);
        Self::pure(space, &ket)
    }

    /// Global ground state |g…g, 0⟩⟨g…g, 0|.
    pub fn ground(space: &HilbertSpace) -> Self {
        Self::basis_state(space, 0).expect("dimension is at least 1")
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        mat_trace(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        self.matrix.dot(&self.matrix).diag().iter().map(|z| z.re).sum()
    }

    /// tr(Ô ρ̂).
    pub fn expect(&self, op: &Operator) -> C64 {
        mat_trace(&op.matrix().dot(&self.matrix))
    }

    /// ⟨ψ|ρ|ψ⟩ for a normalized ket.
    pub fn population(&self, ket: &Array1<C64>) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..ket.len() {
            for j in 0..ket.len() {
                acc += ket[i].conj() * self.matrix[[i, j]] * ket[j];
            }
        }
        acc.re
    }

    /// Trace distance ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch("states on different spaces".into()));
        }
        let diff = &self.matrix - &other.matrix;
        let (evals, _) = diff.eigh(UPLO::Lower)?;
        Ok(0.5 * evals.iter().map(|e| e.abs()).sum::<f64>())
    }

    /// Reduced density matrix over the kept subsystems; the traced-out
    /// factors are summed over equal indices.
    pub fn partial_trace(&self, keep: &[Subsystem]) -> Result<StateMatrix> {
        if keep.is_empty() {
            return Err(Error::InvalidParam("partial_trace needs a non-empty keep set".into()));
        }
        for s in keep {
            if !self.space.contains(*s) {
                return Err(Error::MissingSubsystem(*s));
            }
        }
        let factors = self.space.factors();
        let dims: Vec<usize> = factors.iter().map(|f| f.dim).collect();
        let kept: Vec<bool> = factors.iter().map(|f| keep.contains(&f.subsystem)).collect();

        let kept_factors: Vec<_> =
            factors.iter().filter(|f| keep.contains(&f.subsystem)).copied().collect();
        let reduced_space = HilbertSpace::new(kept_factors)?;
        let rd = reduced_space.total_dim();
        let mut out = Array2::<C64>::zeros((rd, rd));

        let d = self.space.total_dim();
        let nf = dims.len();
        let mut row_idx = vec![0usize; nf];
        let mut col_idx = vec![0usize; nf];
        for i in 0..d {
            decompose(i, &dims, &mut row_idx);
            for j in 0..d {
                decompose(j, &dims, &mut col_idx);
                // Traced factors must carry equal row and column indices.
                if (0..nf).any(|k| !kept[k] && row_idx[k] != col_idx[k]) {
                    continue;
                }
                let (mut r, mut c) = (0usize, 0usize);
                for k in 0..nf {
                    if kept[k] {
                        r = r * dims[k] + row_idx[k];
                        c = c * dims[k] + col_idx[k];
                    }
                }
                out[[r, c]] += self.matrix[[i, j]];
            }
        }
        // The reduction preserves trace/Hermiticity/positivity exactly, so
        // revalidation only guards against accumulated roundoff.
        StateMatrix::try_new(reduced_space, out)
    }

    /// Reduced two-qubit state (cavity traced out when present).
    pub fn reduced_qubits(&self) -> Result<StateMatrix> {
        if self.space == HilbertSpace::two_qubits() {
            return Ok(self.clone());
        }
        self.partial_trace(&[Subsystem::Qubit1, Subsystem::Qubit2])
    }
}

/// Decompose a flat index into per-factor indices (row-major over factors).
fn decompose(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::kron;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn product_state_reduces_to_its_qubit_factor() {
        // ρ_q ⊗ |0⟩⟨0|, keep the qubits, recover ρ_q.
        let qs = HilbertSpace::two_qubits();
        let full = HilbertSpace::qubits_cavity(2).unwrap();
        let mut rho_q = Array2::<C64>::zeros((4, 4));
        rho_q[[0, 0]] = c(0.25);
        rho_q[[1, 1]] = c(0.75);
        rho_q[[0, 1]] = c(0.2);
        rho_q[[1, 0]] = c(0.2);
        let mut vac = Array2::<C64>::zeros((3, 3));
        vac[[0, 0]] = c(1.0);
        let rho = StateMatrix::try_new(full, kron(&rho_q, &vac)).unwrap();
        let red = rho.partial_trace(&[Subsystem::Qubit1, Subsystem::Qubit2]).unwrap();
        assert_eq!(red.space(), &qs);
        for (x, y) in red.matrix().iter().zip(rho_q.iter()) {
            assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn entangled_qubit_cavity_reduces_to_maximally_mixed() {
        // (|g,0⟩ + |e,1⟩)/√2: tracing the cavity leaves I/2 on the qubit.
        let space = HilbertSpace::new(vec![
            crate::hilbert::Factor { subsystem: Subsystem::Qubit1, dim: 2 },
            crate::hilbert::Factor { subsystem: Subsystem::Cavity, dim: 2 },
        ])
        .unwrap();
        let mut ket = Array1::zeros(4);
        ket[0] = c(std::f64::consts::FRAC_1_SQRT_2); // |g,0⟩
        ket[3] = c(std::f64::consts::FRAC_1_SQRT_2); // |e,1⟩
        let rho = StateMatrix::pure(&space, &ket).unwrap();
        let red = rho.partial_trace(&[Subsystem::Qubit1]).unwrap();
        assert_abs_diff_eq!((red.matrix()[[0, 0]] - c(0.5)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((red.matrix()[[1, 1]] - c(0.5)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(red.matrix()[[0, 1]].norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn partial_trace_rejects_empty_keep() {
        let space = HilbertSpace::two_qubits();
        let rho = StateMatrix::ground(&space);
        assert!(rho.partial_trace(&[]).is_err());
    }

    #[test]
    fn state_validation_rejects_bad_trace() {
        let space = HilbertSpace::single_qubit();
        let m = Array2::eye(2); // trace 2
        assert!(StateMatrix::try_new(space, m).is_err());
    }
}

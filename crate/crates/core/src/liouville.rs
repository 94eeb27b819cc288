//! Vectorized Liouvillians: construction, steady states, spectral gaps.
//!
//! Vectorization is column-major: vec(ρ) stacks the columns of ρ, so that
//! vec(ÂρB̂) = (B̂ᵀ ⊗ Â) vec(ρ). Against that convention the master equation
//! dρ/dt = −i[Ĥ,ρ] + Σ (rate/2) D[Â,B̂]ρ becomes
//!
//!   L = −i (1 ⊗ Ĥ − Ĥᵀ ⊗ 1)
//!     + Σ (rate/2) [ 2 B̄ ⊗ Â − 1 ⊗ (B̂†Â) − (B̂†Â)ᵀ ⊗ 1 ].
//!
//! Spectral decompositions are cached per instance behind a single-writer
//! guard, so a `Superoperator` can be shared across threads and every
//! spectrum-based query (gap, evolution, correlators) reuses one
//! factorization.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Inverse, OperationNorm, Solve};
use num_complex::Complex64 as C64;
use once_cell::sync::OnceCell;

use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;
use crate::model::ChannelSet;
use crate::operator::{dagger, kron, mat_trace, Operator};
use crate::state::StateMatrix;

/// Relative residual accepted for a steady-state solve.
pub const STEADY_TOL: f64 = 1e-10;

/// vec(ρ), column-major.
pub fn vectorize(m: &Array2<C64>) -> Array1<C64> {
    let d = m.nrows();
    let mut v = Array1::zeros(d * d);
    for j in 0..d {
        for i in 0..d {
            v[j * d + i] = m[[i, j]];
        }
    }
    v
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &Array1<C64>, d: usize) -> Array2<C64> {
    let mut m = Array2::zeros((d, d));
    for j in 0..d {
        for i in 0..d {
            m[[i, j]] = v[j * d + i];
        }
    }
    m
}

/// Cached eigendecomposition L = V Λ V⁻¹.
#[derive(Debug)]
pub struct Spectral {
    pub values: Array1<C64>,
    pub vectors: Array2<C64>,
    pub inv_vectors: Array2<C64>,
    /// max|V Λ V⁻¹ − L| / max|L|, a cheap diagonalization-quality figure.
    pub recon_error: f64,
}

impl Spectral {
    /// Expansion coefficients of a vectorized matrix in the eigenbasis.
    pub fn coefficients(&self, v: &Array1<C64>) -> Array1<C64> {
        self.inv_vectors.dot(v)
    }
}

/// A dense superoperator on vec(ρ) with its provenance string.
#[derive(Debug)]
pub struct Superoperator {
    space: HilbertSpace,
    dim: usize,
    matrix: Array2<C64>,
    source: String,
    spectral: OnceCell<std::result::Result<Arc<Spectral>, String>>,
}

impl Superoperator {
    pub fn new(space: HilbertSpace, matrix: Array2<C64>, source: impl Into<String>) -> Result<Self> {
        let d = space.total_dim();
        if matrix.nrows() != d * d || matrix.ncols() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "superoperator is {}x{} but the space gives d² = {}",
                matrix.nrows(),
                matrix.ncols(),
                d * d
            )));
        }
        Ok(Self { space, dim: d, matrix, source: source.into(), spectral: OnceCell::new() })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    /// Hilbert dimension d (the matrix acts on length-d² vectors).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Largest matrix-element magnitude, the scale for zero-mode detection.
    pub fn entry_scale(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Threshold below which an eigenvalue is treated as a stationary mode.
    ///
    /// Scaled by the matrix magnitude and a generous multiple of machine
    /// epsilon rather than a fixed 1e-8·‖L‖: the stiff fixtures here carry
    /// ‖L‖ ~ 1e7 while owning genuine decay rates of order 1e-6, which a
    /// fixed relative threshold would swallow.
    pub fn zero_tol(&self) -> f64 {
        (10.0 * f64::EPSILON * self.entry_scale() * self.dim as f64).max(1e-12)
    }

    /// Apply to a density-matrix-shaped operand.
    pub fn apply(&self, rho: &Array2<C64>) -> Result<Array2<C64>> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "operand is {}x{}, expected {}",
                rho.nrows(),
                rho.ncols(),
                self.dim
            )));
        }
        Ok(unvectorize(&self.matrix.dot(&vectorize(rho)), self.dim))
    }

    /// The cached eigendecomposition (computed on first use).
    pub fn spectral(&self) -> Result<Arc<Spectral>> {
        let entry = self.spectral.get_or_init(|| {
            let (values, vectors) = self.matrix.eig().map_err(|e| e.to_string())?;
            let inv_vectors = vectors.inv().map_err(|e| e.to_string())?;
            // Reconstruction check on a diagonal-rescaled product.
            let lam = Array2::from_diag(&values);
            let recon = vectors.dot(&lam).dot(&inv_vectors);
            let scale = self.entry_scale().max(1.0);
            let recon_error = recon
                .iter()
                .zip(self.matrix.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0f64, f64::max)
                / scale;
            Ok(Arc::new(Spectral { values, vectors, inv_vectors, recon_error }))
        });
        match entry {
            Ok(s) => Ok(Arc::clone(s)),
            Err(msg) => Err(Error::Solver(format!("eigendecomposition failed: {msg}"))),
        }
    }

    /// Indices of eigenvalues inside the stationary tolerance.
    pub fn kernel_indices(&self) -> Result<Vec<usize>> {
        let s = self.spectral()?;
        let tol = self.zero_tol();
        Ok((0..s.values.len()).filter(|&k| s.values[k].norm() <= tol).collect())
    }

    /// Unique stationary state, solved by replacing one row of L with the
    /// trace constraint. Falls back to the spectral kernel when the direct
    /// solve is unusable, and reports a degenerate kernel instead of
    /// silently averaging stationary directions.
    pub fn steady_state(&self) -> Result<StateMatrix> {
        let d = self.dim;
        let n = d * d;
        let mut m = self.matrix.clone();
        for col in 0..n {
            m[[0, col]] = C64::new(0.0, 0.0);
        }
        for k in 0..d {
            m[[0, k * d + k]] = C64::new(1.0, 0.0);
        }
        let mut b = Array1::zeros(n);
        b[0] = C64::new(1.0, 0.0);

        let scale = self.matrix.opnorm_one()?.max(f64::MIN_POSITIVE);
        if let Ok(x) = m.solve(&b) {
            if let Ok(rho) = self.finish_steady(&x, scale) {
                return Ok(rho);
            }
        }

        // Direct solve failed or left a residual: inspect the kernel.
        let kernel = self.kernel_indices()?;
        match kernel.len() {
            0 => Err(Error::Solver("no stationary mode within tolerance".into())),
            1 => {
                let s = self.spectral()?;
                let x = s.vectors.column(kernel[0]).to_owned();
                self.finish_steady(&x, scale)
            }
            dim => Err(Error::DegenerateKernel { dim }),
        }
    }

    fn finish_steady(&self, x: &Array1<C64>, scale: f64) -> Result<StateMatrix> {
        let d = self.dim;
        let raw = unvectorize(x, d);
        // Hermitize and normalize; the residual check below decides whether
        // the solution is acceptable.
        let herm = (&raw + &dagger(&raw)).mapv(|z| z * C64::new(0.5, 0.0));
        let tr = mat_trace(&herm);
        if tr.norm() < 1e-300 {
            return Err(Error::Solver("traceless kernel vector".into()));
        }
        let rho = herm.mapv(|z| z / tr);
        let residual_vec = self.matrix.dot(&vectorize(&rho));
        let residual = residual_vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if residual > STEADY_TOL * scale {
            return Err(Error::Solver(format!(
                "steady-state residual {residual:.3e} above {STEADY_TOL:.0e}·‖L‖ = {:.3e}",
                STEADY_TOL * scale
            )));
        }
        StateMatrix::try_new(self.space.clone(), rho)
    }

    /// −max{Re λ : λ outside the stationary tolerance}: the slowest genuine
    /// decay rate. A purely Hamiltonian generator returns 0.
    pub fn gap(&self) -> Result<f64> {
        let s = self.spectral()?;
        let tol = self.zero_tol();
        let mut best: Option<f64> = None;
        for v in s.values.iter() {
            if v.norm() <= tol {
                continue;
            }
            best = Some(match best {
                Some(b) => b.max(v.re),
                None => v.re,
            });
        }
        Ok(best.map(|b| -b).unwrap_or(0.0))
    }

    /// Number of stationary directions (kernel dimension), with an error if
    /// the kernel is empty.
    pub fn kernel_dim(&self) -> Result<usize> {
        let k = self.kernel_indices()?;
        if k.is_empty() {
            return Err(Error::Solver("no stationary mode within tolerance".into()));
        }
        Ok(k.len())
    }

    /// Decay rate of the eigenmode that dominates the relaxation of
    /// tr(Ŵρ(t)) from the given initial state: the mode k maximizing
    /// |c_k·tr(Ŵ v_k)| over decaying modes, where vec(ρ₀) = Σ c_k vec(v_k).
    pub fn relaxation_rate(&self, rho0: &StateMatrix, weight: &Operator) -> Result<f64> {
        let s = self.spectral()?;
        let tol = self.zero_tol();
        let c = s.coefficients(&vectorize(rho0.matrix()));
        let w_t = weight.matrix().t().to_owned(); // tr(Wv) = vec(Wᵀ)·vec(v)
        let w_vec = vectorize(&w_t);
        let mut best: Option<(f64, f64)> = None; // (weight, rate)
        for k in 0..s.values.len() {
            let lam = s.values[k];
            if lam.norm() <= tol || lam.re >= 0.0 {
                continue;
            }
            let overlap: C64 = w_vec.iter().zip(s.vectors.column(k)).map(|(w, v)| w * v).sum();
            let strength = (c[k] * overlap).norm();
            if best.map(|(s0, _)| strength > s0).unwrap_or(true) {
                best = Some((strength, -lam.re));
            }
        }
        best.map(|(_, r)| r).ok_or_else(|| Error::Solver("no decaying mode found".into()))
    }
}

/// Assemble the vectorized generator from a Hamiltonian and a channel set.
pub fn build_liouvillian(h: &Operator, channels: &ChannelSet) -> Result<Superoperator> {
    let d = h.dim();
    let space = h.space().clone();
    let eye = Array2::<C64>::eye(d);
    let minus_i = C64::new(0.0, -1.0);

    let hm = h.matrix();
    let mut l = kron(&eye, hm).mapv(|z| z * minus_i);
    l = l + kron(&hm.t().to_owned(), &eye).mapv(|z| z * (-minus_i));

    for (a, b, rate) in channels.terms() {
        if a.dim() != d || b.dim() != d {
            return Err(Error::DimensionMismatch(
                "channel operators do not match the Hamiltonian dimension".into(),
            ));
        }
        let half = C64::new(rate / 2.0, 0.0);
        let am = a.matrix();
        let b_conj = b.matrix().mapv(|z| z.conj());
        let bdag_a = dagger(b.matrix()).dot(am);
        l = l + kron(&b_conj, am).mapv(|z| z * (2.0 * half));
        l = l - kron(&eye, &bdag_a).mapv(|z| z * half);
        l = l - kron(&bdag_a.t().to_owned(), &eye).mapv(|z| z * half);
    }

    let n_ch = channels.terms().len();
    Superoperator::new(space, l, format!("H ({d}x{d}) with {n_ch} channel terms"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::HilbertSpace;
    use crate::model::{build_channels, build_hamiltonian};
    use crate::params::SystemParams;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn single_qubit_decay() -> Superoperator {
        let p = SystemParams::default();
        let space = HilbertSpace::single_qubit();
        let s = crate::operator::qubit_lowering(&space, crate::hilbert::Subsystem::Qubit1).unwrap();
        let h = Operator::zeros(&space);
        let ch = ChannelSet {
            gamma_matrix: [[p.gamma, 0.0], [0.0, 0.0]],
            kappa: 0.0,
            qubit_ops: [s.clone(), s],
            cavity_op: None,
            extras: vec![],
        };
        build_liouvillian(&h, &ch).unwrap()
    }

    #[test]
    fn undriven_qubit_spectrum_is_0_half_half_one() {
        let l = single_qubit_decay();
        let s = l.spectral().unwrap();
        let mut re: Vec<f64> = s.values.iter().map(|v| v.re).collect();
        re.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(re[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(re[1], -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(re[2], -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(re[3], 0.0, epsilon = 1e-12);
        assert_relative_eq!(l.gap().unwrap(), 0.5, max_relative = 1e-10);
    }

    #[test]
    fn undriven_qubit_steady_state_is_ground() {
        let l = single_qubit_decay();
        let rho = l.steady_state().unwrap();
        assert_abs_diff_eq!(rho.matrix()[[0, 0]].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.matrix()[[1, 1]].norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn hermitian_generator_alone_has_imaginary_spectrum_and_zero_gap() {
        let p = SystemParams { j_coupling: 2.0, delta: 1.0, drive: 0.5, ..Default::default() };
        let space = HilbertSpace::two_qubits();
        let h = build_hamiltonian(&p, &space).unwrap();
        let ch = ChannelSet {
            gamma_matrix: [[0.0; 2]; 2],
            kappa: 0.0,
            qubit_ops: [
                crate::operator::qubit_lowering(&space, crate::hilbert::Subsystem::Qubit1).unwrap(),
                crate::operator::qubit_lowering(&space, crate::hilbert::Subsystem::Qubit2).unwrap(),
            ],
            cavity_op: None,
            extras: vec![],
        };
        let l = build_liouvillian(&h, &ch).unwrap();
        let s = l.spectral().unwrap();
        let scale = l.entry_scale();
        for v in s.values.iter() {
            assert!(v.re.abs() <= 1e-10 * scale, "unexpected real part {}", v.re);
        }
        assert_abs_diff_eq!(l.gap().unwrap(), 0.0, epsilon = 1e-9 * scale);
    }

    #[test]
    fn liouvillian_preserves_trace_and_hermiticity() {
        // Applying L to random Hermitian matrices yields traceless,
        // Hermitian derivatives.
        let p = SystemParams {
            j_coupling: 50.0,
            delta: 5.0,
            drive: 10.0,
            gamma12: 0.9,
            kappa: 100.0,
            g: 10.0,
            cavity_detuning: -30.0,
            local_dephasing: 0.3,
            n_max: 2,
            ..Default::default()
        };
        let space = p.space().unwrap();
        let h = build_hamiltonian(&p, &space).unwrap();
        let ch = build_channels(&p, &space).unwrap();
        let l = build_liouvillian(&h, &ch).unwrap();

        let d = space.total_dim();
        let mut seed = 0x9E3779B97F4A7C15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..20 {
            let mut m = Array2::<C64>::zeros((d, d));
            for i in 0..d {
                for j in 0..=i {
                    let z = C64::new(next(), if i == j { 0.0 } else { next() });
                    m[[i, j]] = z;
                    m[[j, i]] = z.conj();
                }
            }
            let out = l.apply(&m).unwrap();
            let scale = l.entry_scale();
            assert!(mat_trace(&out).norm() <= 1e-10 * scale);
            let herm_err = out
                .iter()
                .zip(dagger(&out).iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0f64, f64::max);
            assert!(herm_err <= 1e-10 * scale);
        }
    }

    #[test]
    fn degenerate_kernel_is_reported() {
        // Two uncoupled decaying qubits plus a dark, undriven cavity with
        // κ = 0: every cavity Fock population is stationary.
        let p = SystemParams { n_max: 2, ..Default::default() };
        let space = p.space().unwrap();
        let h = Operator::zeros(&space);
        let mut ch = build_channels(&p, &space).unwrap();
        ch.kappa = 0.0;
        let l = build_liouvillian(&h, &ch).unwrap();
        match l.steady_state() {
            Err(Error::DegenerateKernel { dim }) => assert!(dim >= 3, "kernel dim {dim}"),
            other => panic!("expected degenerate kernel, got {other:?}"),
        }
    }
}

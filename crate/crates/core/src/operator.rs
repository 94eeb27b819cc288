//! Dense complex operators on a declared tensor-product space.
//!
//! Constructors embed single-subsystem operators into the composite space by
//! Kronecker products with identities, following the fixed factor ordering
//! qubit 1 ⊗ qubit 2 ⊗ cavity.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpace, Subsystem};

/// Kronecker product, (A ⊗ B)[i·p+k, j·q+l] = A[i,j] B[k,l].
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    ndarray_linalg::kron(a, b)
}

/// Conjugate transpose.
pub fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// Trace of a square matrix.
pub fn mat_trace(m: &Array2<C64>) -> C64 {
    m.diag().iter().copied().sum()
}

/// A dense operator tied to the space it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    matrix: Array2<C64>,
}

impl Operator {
    pub fn new(space: HilbertSpace, matrix: Array2<C64>) -> Result<Self> {
        let d = space.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{} but the space has dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                d
            )));
        }
        Ok(Self { space, matrix })
    }

    pub fn zeros(space: &HilbertSpace) -> Self {
        let d = space.total_dim();
        Self { space: space.clone(), matrix: Array2::zeros((d, d)) }
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let d = space.total_dim();
        Self { space: space.clone(), matrix: Array2::eye(d) }
    }

    /// |ket⟩⟨bra| on the given space.
    pub fn outer(space: &HilbertSpace, ket: &Array1<C64>, bra: &Array1<C64>) -> Result<Self> {
        let d = space.total_dim();
        if ket.len() != d || bra.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "kets of length {}/{} on a space of dimension {}",
                ket.len(),
                bra.len(),
                d
            )));
        }
        let mut m = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[[i, j]] = ket[i] * bra[j].conj();
            }
        }
        Ok(Self { space: space.clone(), matrix: m })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dagger(&self) -> Self {
        Self { space: self.space.clone(), matrix: dagger(&self.matrix) }
    }

    pub fn trace(&self) -> C64 {
        mat_trace(&self.matrix)
    }

    /// Relative Hermiticity check: max|M − M†| ≤ tol · max(1, max|M|).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let scale = self.matrix.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
        let dag = dagger(&self.matrix);
        self.matrix
            .iter()
            .zip(dag.iter())
            .all(|(a, b)| (a - b).norm() <= tol * scale)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { space: self.space.clone(), matrix: self.matrix.mapv(|z| z * c) }
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch(
                "operators live on different spaces".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self { space: self.space.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self { space: self.space.clone(), matrix: &self.matrix - &other.matrix })
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self { space: self.space.clone(), matrix: self.matrix.dot(&other.matrix) })
    }
}

/// Embed a local operator acting on one subsystem into the full space.
pub fn embed(space: &HilbertSpace, s: Subsystem, local: &Array2<C64>) -> Result<Operator> {
    let pos = space.position(s).ok_or(Error::MissingSubsystem(s))?;
    let dim = space.factors()[pos].dim;
    if local.nrows() != dim || local.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "local operator is {}x{} but factor {:?} has dimension {}",
            local.nrows(),
            local.ncols(),
            s,
            dim
        )));
    }
    let mut m = Array2::from_elem((1, 1), C64::new(1.0, 0.0));
    for (i, f) in space.factors().iter().enumerate() {
        if i == pos {
            m = kron(&m, local);
        } else {
            m = kron(&m, &Array2::eye(f.dim));
        }
    }
    Operator::new(space.clone(), m)
}

/// Lowering operator σ̂ = |g⟩⟨e| of one qubit, embedded in the full space.
pub fn qubit_lowering(space: &HilbertSpace, which: Subsystem) -> Result<Operator> {
    match which {
        Subsystem::Qubit1 | Subsystem::Qubit2 => {}
        Subsystem::Cavity => {
            return Err(Error::InvalidParam(
                "qubit_lowering expects Qubit1 or Qubit2".into(),
            ))
        }
    }
    let mut sigma = Array2::zeros((2, 2));
    sigma[[0, 1]] = C64::new(1.0, 0.0); // |g⟩⟨e| with basis {|g⟩, |e⟩}
    embed(space, which, &sigma)
}

/// σ̂†σ̂ of one qubit (excited-state projector).
pub fn qubit_number(space: &HilbertSpace, which: Subsystem) -> Result<Operator> {
    let s = qubit_lowering(space, which)?;
    s.dagger().mul(&s)
}

/// σ̂_z = 2σ̂†σ̂ − 1 of one qubit.
pub fn sigma_z(space: &HilbertSpace, which: Subsystem) -> Result<Operator> {
    let n = qubit_number(space, which)?;
    let id = Operator::identity(space);
    n.scale(C64::new(2.0, 0.0)).sub(&id)
}

/// Truncated cavity annihilation operator: â|n⟩ = √n|n−1⟩ for n ≤ n_max.
pub fn cavity_annihilation(space: &HilbertSpace) -> Result<Operator> {
    let dim = match space.dim_of(Subsystem::Cavity) {
        Ok(d) => d,
        Err(_) => return Err(Error::NoCavity),
    };
    let mut a = Array2::zeros((dim, dim));
    for n in 1..dim {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    embed(space, Subsystem::Cavity, &a)
}

/// â†â on the cavity factor.
pub fn cavity_number(space: &HilbertSpace) -> Result<Operator> {
    let a = cavity_annihilation(space)?;
    a.dagger().mul(&a)
}

/// Kronecker product of two operators on disjoint factor lists, keeping the
/// canonical factor ordering of the combined space.
pub fn tensor(a: &Operator, b: &Operator) -> Result<Operator> {
    let mut factors = a.space().factors().to_vec();
    factors.extend_from_slice(b.space().factors());
    // HilbertSpace::new rejects overlapping or out-of-order factor lists.
    let space = HilbertSpace::new(factors)?;
    Operator::new(space, kron(a.matrix(), b.matrix()))
}

/// D[Â,B̂]ρ̂ = 2ÂρB̂† − B̂†Âρ̂ − ρ̂B̂†Â, the dissipator of the master
/// equation before its rate/2 prefactor.
pub fn dissipator_apply(a: &Operator, b: &Operator, rho: &Array2<C64>) -> Result<Array2<C64>> {
    if a.space() != b.space() {
        return Err(Error::DimensionMismatch("A and B live on different spaces".into()));
    }
    let d = a.dim();
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "state is {}x{} but operators have dimension {}",
            rho.nrows(),
            rho.ncols(),
            d
        )));
    }
    let b_dag = dagger(b.matrix());
    let b_dag_a = b_dag.dot(a.matrix());
    let two = C64::new(2.0, 0.0);
    Ok(a.matrix().dot(rho).dot(&b_dag) * two - b_dag_a.dot(rho) - rho.dot(&b_dag_a))
}

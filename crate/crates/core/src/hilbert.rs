//! Tensor-product Hilbert space bookkeeping.
//!
//! The factor ordering is fixed as qubit 1 ⊗ qubit 2 ⊗ cavity and every
//! embedding in the crate is written against it. A space need not contain
//! all three factors (e.g. a bare two-qubit space, or a single qubit for
//! reference solutions), but the factors it does contain always appear in
//! that order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Labels one tensor factor of the composite space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    Qubit1,
    Qubit2,
    Cavity,
}

/// One factor: its label and local dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factor {
    pub subsystem: Subsystem,
    pub dim: usize,
}

/// An ordered tensor product of finite-dimensional factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    factors: Vec<Factor>,
}

impl HilbertSpace {
    /// Build a space from an explicit factor list, enforcing the canonical
    /// ordering and per-factor dimension rules (qubits are 2-dimensional,
    /// a cavity holds at least vacuum plus one photon).
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParam("space needs at least one factor".into()));
        }
        for pair in factors.windows(2) {
            if pair[0].subsystem >= pair[1].subsystem {
                return Err(Error::InvalidParam(format!(
                    "factors out of order: {:?} before {:?}",
                    pair[0].subsystem, pair[1].subsystem
                )));
            }
        }
        for f in &factors {
            match f.subsystem {
                Subsystem::Qubit1 | Subsystem::Qubit2 => {
                    if f.dim != 2 {
                        return Err(Error::InvalidParam(format!(
                            "qubit factor must have dimension 2, got {}",
                            f.dim
                        )));
                    }
                }
                Subsystem::Cavity => {
                    if f.dim < 2 {
                        return Err(Error::InvalidParam(
                            "cavity needs n_max >= 1 (vacuum plus one photon)".into(),
                        ));
                    }
                }
            }
        }
        Ok(Self { factors })
    }

    /// Two qubits, no cavity.
    pub fn two_qubits() -> Self {
        Self::new(vec![
            Factor { subsystem: Subsystem::Qubit1, dim: 2 },
            Factor { subsystem: Subsystem::Qubit2, dim: 2 },
        ])
        .expect("static factor list is valid")
    }

    /// Qubit 1 alone (reference two-level-system solutions).
    pub fn single_qubit() -> Self {
        Self::new(vec![Factor { subsystem: Subsystem::Qubit1, dim: 2 }])
            .expect("static factor list is valid")
    }

    /// A lone cavity mode truncated at `n_max` photons.
    pub fn cavity_only(n_max: usize) -> Result<Self> {
        Self::new(vec![Factor { subsystem: Subsystem::Cavity, dim: n_max + 1 }])
    }

    /// Two qubits plus a cavity truncated at `n_max` photons.
    pub fn qubits_cavity(n_max: usize) -> Result<Self> {
        Self::new(vec![
            Factor { subsystem: Subsystem::Qubit1, dim: 2 },
            Factor { subsystem: Subsystem::Qubit2, dim: 2 },
            Factor { subsystem: Subsystem::Cavity, dim: n_max + 1 },
        ])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Product of the factor dimensions.
    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    /// Position of a subsystem in the factor list.
    pub fn position(&self, s: Subsystem) -> Option<usize> {
        self.factors.iter().position(|f| f.subsystem == s)
    }

    pub fn contains(&self, s: Subsystem) -> bool {
        self.position(s).is_some()
    }

    pub fn dim_of(&self, s: Subsystem) -> Result<usize> {
        self.position(s)
            .map(|i| self.factors[i].dim)
            .ok_or(Error::MissingSubsystem(s))
    }

    /// Fock cutoff of the cavity factor, if present.
    pub fn n_max(&self) -> Option<usize> {
        self.position(Subsystem::Cavity).map(|i| self.factors[i].dim - 1)
    }
}

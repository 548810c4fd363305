//! Superatom density matrices over the ordered basis `[|G>, |W>, |D>]`.

use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat3 = Matrix3<C64>;

/// Collective ground state.
pub const G: usize = 0;
/// Bright single-excitation state coupled to the probe mode.
pub const W: usize = 1;
/// Effective dark state collecting the dephased excitation.
pub const D: usize = 2;

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-9;

/// Transition operator `|a><b|`.
pub fn transition(a: usize, b: usize) -> Mat3 {
    let mut m = Mat3::zeros();
    m[(a, b)] = C64::new(1.0, 0.0);
    m
}

/// Trace of a 3x3 complex matrix.
pub fn trace(m: &Mat3) -> C64 {
    m[(0, 0)] + m[(1, 1)] + m[(2, 2)]
}

/// Largest deviation of `m` from its conjugate transpose.
pub fn hermiticity_defect(m: &Mat3) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in i..3 {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &Mat3) -> f64 {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(herm).eigenvalues.min()
}

/// A validated superatom state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat3);

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity at the crate tolerances.
    pub fn new(m: Mat3) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("density matrix has non-finite entries".into()));
        }
        let h = hermiticity_defect(&m);
        if h > HERMITICITY_TOL {
            return Err(Error::InvalidInput(format!("density matrix not Hermitian (defect {h:e})")));
        }
        let tr = trace(&m);
        if (tr - 1.0).norm() > TRACE_TOL {
            return Err(Error::InvalidInput(format!("density matrix trace {tr} differs from 1")));
        }
        let lo = min_eigenvalue(&m);
        if lo < -POSITIVITY_TOL {
            return Err(Error::InvalidInput(format!("density matrix has negative eigenvalue {lo:e}")));
        }
        Ok(Self(m))
    }

    /// Wraps an integrator output without re-validating it; trace drift and
    /// positivity are asserted by the callers that care.
    pub(crate) fn from_raw(m: Mat3) -> Self {
        Self(m)
    }

    /// Pure basis state `|i><i|`.
    pub fn basis(i: usize) -> Self {
        Self(transition(i, i))
    }

    pub fn ground() -> Self {
        Self::basis(G)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat3 {
        self.0
    }

    pub fn population(&self, i: usize) -> f64 {
        self.0[(i, i)].re
    }

    pub fn rho_ww(&self) -> f64 {
        self.population(W)
    }

    pub fn rho_dd(&self) -> f64 {
        self.population(D)
    }

    /// Number of Rydberg excitations, bright plus dark.
    pub fn rydberg_population(&self) -> f64 {
        self.rho_ww() + self.rho_dd()
    }

    /// `<sigma_GW> = rho_WG`.
    pub fn sigma_gw(&self) -> C64 {
        self.0[(W, G)]
    }

    pub fn trace(&self) -> C64 {
        trace(&self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_catches_each_invariant() {
        assert!(DensityMatrix::new(transition(W, W)).is_ok());

        let mut non_herm = transition(G, G);
        non_herm[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(non_herm).is_err());

        assert!(DensityMatrix::new(transition(G, G) * C64::new(0.5, 0.0)).is_err());

        // trace one but a negative eigenvalue
        let mut neg = Mat3::zeros();
        neg[(0, 0)] = C64::new(1.2, 0.0);
        neg[(1, 1)] = C64::new(-0.2, 0.0);
        assert!(DensityMatrix::new(neg).is_err());
    }

    #[test]
    fn coherent_superposition_is_valid() {
        let s = 0.5f64.sqrt();
        let v = nalgebra::Vector3::new(C64::new(s, 0.0), C64::new(0.0, s), C64::new(0.0, 0.0));
        let rho = DensityMatrix::new(v * v.adjoint()).unwrap();
        assert!((rho.sigma_gw() - C64::new(0.0, 0.5)).norm() < 1e-15);
        assert!(rho.min_eigenvalue().abs() < 1e-12);
    }
}

//! Exponential sums: Kloosterman sums, the lattice sums `j_{lambda,n}(d)`
//! (by enumeration and in closed form), quadratic Gauss sums of lattices,
//! diagonalization modulo odd prime powers and Dirichlet partial sums.

mod dirichlet;
mod gauss;
mod j;
mod kloosterman;

pub use dirichlet::dirichlet_j_partial;
pub use gauss::{
    diagonalize_mod_q, gauss_theta_brute, gauss_theta_brute_all, gauss_theta_closed_odd, gauss_theta_even_recursion,
    DiagonalBasis,
};
pub use j::{
    calibrated_j_bound_constant, hensel_fiber_check, j_brute, j_closed, j_closed_invariants,
    HenselReport, J_BOUND_EPSILON,
};
pub use kloosterman::{kloosterman, weil_bound};

pub use crate::arith::{epsilon_factor, jacobi_symbol, jordan_totient, PrimePowerFactorization};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Closed,
}

/// A complex value with the way it was obtained and the number of terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumValue {
    #[serde(with = "crate::report::complex_obj")]
    pub value: Complex64,
    pub method: Method,
    pub terms: u64,
}

impl SumValue {
    pub fn brute(value: Complex64, terms: u64) -> Self {
        Self { value, method: Method::Brute, terms }
    }

    pub fn closed(value: Complex64, terms: u64) -> Self {
        Self { value, method: Method::Closed, terms }
    }

    /// `|Im| <= tol (1 + |value|)`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.value.im.abs() <= tol * (1.0 + self.value.norm())
    }
}

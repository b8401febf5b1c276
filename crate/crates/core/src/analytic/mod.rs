//! Special functions, the Fourier coefficients of the Poincare series and
//! the Fourier-side evaluator.

mod coeff;
mod fourier;
mod quad;
mod radial;
mod shells;
mod special;

pub use coeff::{
    branch_prefactor, coeff_csv, fourier_coeff, fourier_coeff_invariants, star_ratio, CoeffResult, CoeffTable,
    CoeffValue,
};
pub use fourier::{fourier_poincare, fourier_poincare_table, fourier_poincare_with, FourierMethod, MAX_FOURIER_NORM};
pub use quad::{tanh_sinh, tanh_sinh_composite, tanh_sinh_levels, QuadResult};
pub use radial::{hankel_asymptotic, radial_integral_oracle, radial_integral_oracle_zero, OraclePair};
pub use shells::{leech_theta_counts, ShellEngine};
pub use special::{bessel_j_int, bessel_k, bessel_k_scaled, e_phase, gamma_complex, gamma_real, ln_gamma_complex, zeta_real};

/// `c_n = sqrt(k/h^2 - 2/n^2)`.
pub fn c_n(n: u64, p: &crate::geometry::SliceParams) -> f64 {
    p.c_n(n)
}

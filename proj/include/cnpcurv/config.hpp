#pragma once

namespace cnpcurv {

/// Numerical tolerances shared by every module.
struct Tolerances {
  double eps_id = 1e-10;     ///< identity residuals, contraction slack
  double eps_rank = 1e-10;   ///< numerical rank threshold on positive (squared) spectra
  double eps_pure = 1e-8;    ///< purity residual gate for the integer formula
  double eps_cnp = 1e-10;    ///< allowed negativity of b_n for custom kernels
  double eps_comm = 1e-10;   ///< commutator tolerance, relative to max ||T_i||^2
  double near_singular = 1e12;  ///< condition number cap for I - B(z)
};

}  // namespace cnpcurv

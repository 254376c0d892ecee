#pragma once

#include <memory>
#include <vector>

#include "cnpcurv/graded_index.hpp"
#include "cnpcurv/kernel.hpp"
#include "cnpcurv/linalg.hpp"

namespace cnpcurv {

// Operator on span{eps_beta (x) e_j : |beta| <= D_max, j < r}, eps_beta = sqrt(a_beta) z^beta.
// Basis position of (beta, j) is pos(beta) * r + j.
struct GradedOperator {
  std::shared_ptr<const IndexTable> index;
  int r = 1;
  cmat X;

  int d() const { return index->d(); }
  int D_max() const { return index->max_degree(); }
  Eigen::Index size() const { return static_cast<Eigen::Index>(index->size()) * r; }
};

std::shared_ptr<const IndexTable> graded_basis(int d, int D_max);

GradedOperator graded_identity(int d, int r, int D_max);
// E_n
GradedOperator graded_projection(int d, int r, int D_max, int n);

// M_z^alpha (x) I, compressed to degrees <= D_max
GradedOperator mz_matrix(const KernelSpec& k, const MultiIndex& alpha, int r, int D_max);

// sum_{1 <= |alpha| <= N_op} b_alpha (M^alpha (x) I) X (M^alpha (x) I)*; trace(Phi(X) E_i)
// is exact for i <= min(D_max, N_op) and for all i <= D_max once b vanishes past N_op.
GradedOperator phi_map(const KernelSpec& k, const GradedOperator& x, int N_op);

double trace_E(const GradedOperator& x, int n);
double trace_P(const GradedOperator& x, int n);

// trace(dPsi(X) P~_n) through sum_{i<=n} a_i / q_{d-1}(i) trace((X - Phi(X)) E_i)
double dpsi_trace_partial(const KernelSpec& k, const GradedOperator& x, int n, int N_op);
// sum_i w_{i,n} trace(X E_i) / q_{d-1}(i)
double dpsi_trace_weights(const KernelSpec& k, const GradedOperator& x, int n);

struct GradedTraceRow {
  int n = 0;
  double tE = 0.0;
  double tE_normalized = 0.0;
  double tP_normalized = 0.0;
};

std::vector<GradedTraceRow> graded_trace_rows(const GradedOperator& x, int n_max);

// Multiplier phi(z) = sum A_beta z^beta; coefficients indexed by positions of
// an IndexTable in d variables (coeffs.size() <= table size).
struct MultiplierCoefficients {
  std::shared_ptr<const IndexTable> index;
  std::vector<cmat> A;  // all r_out x r_in

  int degree() const;
  Eigen::Index rows() const { return A.front().rows(); }
  Eigen::Index cols() const { return A.front().cols(); }
};

// Matrix of M_phi from H_s (x) C^{r_in} to H_s (x) C^{r_out}, both cut at D_max.
cmat multiplier_matrix(const KernelSpec& k, const MultiplierCoefficients& phi, int D_max);

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

// trace(M_phi M_phi* E_n) / q_{d-1}(n): explicit matrix versus the coefficient double sum
IdentityCheck series_identity_check(const KernelSpec& k, const MultiplierCoefficients& phi, int n);

// max entry of sum_{|alpha| <= n_terms} a_alpha M^alpha (X - Phi(X)) M^alpha* - X with
// X = M_phi M_phi*, over degrees <= min(D_max - n_terms - deg phi, n_terms)
double factx_check(const KernelSpec& k, const MultiplierCoefficients& phi, int D_max, int n_terms);

}  // namespace cnpcurv

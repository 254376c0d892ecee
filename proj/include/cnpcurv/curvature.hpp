#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cnpcurv/charfn.hpp"
#include "cnpcurv/config.hpp"
#include "cnpcurv/kernel.hpp"
#include "cnpcurv/traces.hpp"
#include "cnpcurv/tuple.hpp"

namespace cnpcurv {

// trace dPsi(M_theta M_theta*) = sum_i sum_{|a|=i} trace(A_a A_a*) / (q_{d-1}(i) binom(i, a))
struct DpsiSeries {
  std::vector<double> per_degree;  // c_i, i <= N_theta
  double partial = 0.0;
  // remainder past N_theta in closed form (jointly nilpotent tuples, known b tail)
  std::optional<double> tail;

  double completed() const { return partial + tail.value_or(0.0); }
  bool is_complete() const { return tail.has_value(); }
};

DpsiSeries trace_dpsi_series(const CharacteristicSeries& series, const KernelSpec& k);

// sum_{n > m} b_n when it is known exactly, nullopt otherwise
std::optional<double> b_tail_sum(const KernelSpec& k, int m);

// Graded traces of M_theta M_theta* from the Taylor coefficients:
// trace(X E_n)/q_{d-1}(n) = sum_i (a_{n-i}/a_n) c_i, and
// trace(dPsi(X) P~_n) = sum_i w_{i,n} trace(X E_i)/q_{d-1}(i).
struct ThetaTraceRow {
  int n = 0;
  double tE = 0.0;
  double tE_normalized = 0.0;
  double tP_normalized = 0.0;
  double dpsi_partial = 0.0;
};

std::vector<ThetaTraceRow> theta_trace_rows(const DpsiSeries& dpsi, const CharacteristicSeries& series,
                                            const KernelSpec& k, int n_max);

// K_weighted(n) = dim Ran Delta - sum_i w_{i,n} tE_normalized(i), n = 0..n_max
std::vector<double> curvature_weighted(const DefectPackage& pkg, const std::vector<ThetaTraceRow>& rows);

struct IntegralEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  double radius = 0.0;
  int samples = 0;
};

// Uniform point on the unit sphere of C^d for sample `index` of stream `seed`.
cvec sphere_sample(int d, std::uint64_t seed, std::uint64_t index);

IntegralEstimate curvature_integral(const DefectPackage& pkg, const ThetaEvaluator& eval, double radius, int samples,
                                    std::uint64_t seed);

struct PureCurvature {
  int K = 0;
  bool integer_mismatch = false;
};

PureCurvature curvature_pure(const DefectPackage& pkg, const PurityReport& purity, double k_series, int fd_estimate,
                             const Tolerances& tol = {});

struct OrderingRow {
  int n = 0;
  double tP_normalized = 0.0;
  double tE_normalized = 0.0;
  double dpsi_partial = 0.0;
  bool first_holds = false;   // tP/q_d >= tE/q_{d-1} - 1e-10
  bool second_holds = false;  // tE/q_{d-1} >= dpsi partial - 1e-10
  double conjecture_gap = 0.0;  // |tP/q_d - trace dPsi|
};

struct Comparison {
  std::string first, second;
  double difference = 0.0;
  double tolerance = 0.0;
  bool ok = false;
};

struct Verdict {
  bool ok = true;
  std::vector<Comparison> comparisons;
  std::vector<OrderingRow> ordering;
  int first_ordering_violations = 0;
  int second_ordering_violations = 0;
  double series_gap = 0.0;
  double integral_gap = 0.0;
  double weighted_gap = 0.0;
};

struct CurvatureReport {
  std::string kernel_fingerprint;
  int d = 0;
  int dimH = 0;
  int N_op = 0;
  int N_theta = 0;
  int n_max = 0;

  int dim_ran_delta = 0;
  int rank_d = 0;
  double lambda_max = 0.0;
  double tail_bound = 0.0;
  std::optional<int> nilpotency;
  double delta_identity_residual = 0.0;
  double intertwining_residual = 0.0;

  double purity_residual = 0.0;
  bool pure = false;
  bool purity_exact = false;

  bool is_polynomial = false;
  std::optional<int> polynomial_degree;

  DpsiSeries dpsi;
  double K_series = 0.0;                       // dim - partial sum
  std::optional<double> K_series_completed;    // dim - completed sum
  std::vector<ThetaTraceRow> rows;
  std::vector<double> K_weighted;
  IntegralEstimate integral;
  double K_integral = 0.0;

  int fd_eval = 0;
  std::string fd_label;
  std::optional<int> K_pure;
  bool integer_mismatch = false;

  Verdict verdict;

  double K_series_best() const { return K_series_completed.value_or(K_series); }
};

// (i) the three estimators agree within 0.01 plus their documented truncation
// gaps and 3 standard errors; (ii) ordering of the graded traces is recorded
// per n; (iii) the conjecture gap is recorded. Throws ReconcileFailure when (i)
// fails or when the weights were taken from a different kernel.
Verdict reconcile(const CurvatureReport& report, const KernelSpec& weights_kernel);
// Same checks without throwing on disagreement; a kernel mismatch still throws.
Verdict assess(const CurvatureReport& report, const KernelSpec& weights_kernel);
std::string disagreement(const Verdict& v);

}  // namespace cnpcurv

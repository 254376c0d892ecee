#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cnpcurv/charfn.hpp"
#include "cnpcurv/config.hpp"
#include "cnpcurv/curvature.hpp"
#include "cnpcurv/kernel.hpp"
#include "cnpcurv/tuple.hpp"

namespace cnpcurv {

struct RankSample {
  cvec z;
  int rank = 0;
};

struct EvaluationRank {
  std::vector<RankSample> samples;
  int fd = 0;
  double attain_fraction = 0.0;  // share of samples reaching fd
  std::string label;
};

// Numerical rank of theta(z) over n_samples points with radii spread over [radius/2, radius].
EvaluationRank fd_by_evaluation(const DefectPackage& pkg, const KernelSpec& k, int n_samples, double radius,
                                std::uint64_t seed, bool pure, const Tolerances& tol = {});

struct GradedDim {
  int n = 0;
  int dim = 0;     // dim P_n Ran M_theta
  double q = 0.0;  // q_d(n)
  double ratio = 0.0;
};

struct GradedTrend {
  std::vector<GradedDim> rows;
  double last = 0.0;
  double slope = 0.0;  // ratio(n_max) - ratio(n_max - 1)
};

// dim P_n Ran M_theta is the rank of P_n M_theta M_theta* P_n, written in the
// orthonormal monomial basis of H_s tensored with Ran Delta.
GradedTrend fd_by_grading(const CharacteristicSeries& series, const KernelSpec& k, int n_max,
                          const Tolerances& tol = {});

struct FibreDimReport {
  EvaluationRank evaluation;
  GradedTrend grading;
};

struct InnermultVerdict {
  double dpsi = 0.0;
  int fd = 0;
  double dpsi_gap = 0.0;   // |trace dPsi - fd|
  double trace_gap_last = 0.0;  // |trace_P(n_max)/q_d(n_max) - fd|
  double trace_gap_half = 0.0;  // same at n_max / 2
  bool ok = false;
};

InnermultVerdict innermult_consistency(const FibreDimReport& report, const CurvatureReport& curvature,
                                       const Tolerances& tol = {});

}  // namespace cnpcurv

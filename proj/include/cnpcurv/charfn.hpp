#pragma once

#include <optional>
#include <vector>

#include "cnpcurv/config.hpp"
#include "cnpcurv/kernel.hpp"
#include "cnpcurv/linalg.hpp"
#include "cnpcurv/tuple.hpp"

namespace cnpcurv {

struct PointEvaluation {
  cvec z;
  cmat theta;           // W* theta(z) P_D, columns in tilde block coordinates
  rvec singular_values; // of theta(z) on Ran D, descending
  double trace_tt = 0.0;  // trace theta(z) theta(z)*
  int rank = 0;
  double condition = 0.0; // max(||M||, 1) ||M^{-1}|| for M = I - B(z)
};

// theta(z) = (-T~ + Delta (I - Z T~*)^{-1} Z D~) restricted to Ran D~, compressed to Ran Delta.
class ThetaEvaluator {
 public:
  ThetaEvaluator(const DefectPackage& pkg, const Tolerances& tol = {});

  PointEvaluation evaluate(const cvec& z) const;
  // W* theta(z) theta(z)* W without forming theta(z); throws like evaluate.
  cmat gram(const cvec& z, double* condition = nullptr) const;

 private:
  cmat solve_factor(const cvec& z, cmat& zv1, double& zz, double* condition) const;
  std::vector<cplx> monomials(const cvec& z) const;

  const DefectPackage* pkg_;
  Tolerances tol_;
  cmat a0_ambient_;  // -T~ P_D
  rvec sf_;          // sigma * f
  rvec one_minus_f2_;
};

// Taylor coefficients of theta: A_0 = -T~ P_D, A_gamma = Delta C_gamma D~ with
// C_gamma the z^gamma coefficient of (I - B(z))^{-1} Z(z). Coefficients are
// kept implicitly through G_delta and Y_gamma = C_gamma V1 so that every
// quantity lives in dim H sized matrices.
class CharacteristicSeries {
 public:
  int N_theta() const noexcept { return N_theta_; }
  std::size_t count() const noexcept { return count_; }
  const IndexTable& index() const noexcept { return pkg_->index; }
  const DefectPackage& package() const noexcept { return *pkg_; }

  // trace(A_gamma A_gamma*) per index position
  const std::vector<double>& trace_aa() const noexcept { return trace_aa_; }
  // W* A_gamma A_gamma'* W
  cmat gram(std::size_t g1, std::size_t g2) const;
  // W* A_gamma with tilde block columns
  cmat coefficient(std::size_t g) const;
  // sum_{|gamma| <= N_theta} W* A_gamma z^gamma
  cmat evaluate(const cvec& z) const;

  // Coefficients of (I - B(z))^{-1}
  const cmat& G(std::size_t delta) const { return G_[delta]; }

  bool is_polynomial() const noexcept { return is_polynomial_; }
  std::optional<int> degree() const noexcept { return degree_; }
  // highest degree with a nonzero coefficient inside the horizon
  int observed_degree() const noexcept { return observed_degree_; }

 private:
  friend CharacteristicSeries taylor(const DefectPackage&, const KernelSpec&, int, const Tolerances&);

  const DefectPackage* pkg_ = nullptr;
  int N_theta_ = 0;
  std::size_t count_ = 0;
  std::vector<cmat> G_;
  std::vector<cmat> Y_;
  std::vector<double> trace_aa_;
  bool is_polynomial_ = false;
  std::optional<int> degree_;
  int observed_degree_ = -1;
  rvec one_minus_f2_;
};

// The package must outlive the returned series.
CharacteristicSeries taylor(const DefectPackage& pkg, const KernelSpec& k, int N_theta, const Tolerances& tol = {});

struct ConsistencyCheck {
  double max_residual = 0.0;
  double bound = 0.0;
  bool ok = false;
};

ConsistencyCheck check_consistency(const CharacteristicSeries& series, const ThetaEvaluator& eval,
                                   const std::vector<cvec>& samples);

}  // namespace cnpcurv

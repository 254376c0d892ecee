#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cnpcurv/comb.hpp"
#include "cnpcurv/config.hpp"

namespace cnpcurv {

enum class KernelKind { Szego, DruryArveson, Dirichlet, Custom };

std::string_view kernel_kind_name(KernelKind kind);

// b_1..b_N from a_0..a_N; entry 0 of the result is 0.
std::vector<double> bn_from_an(const std::vector<double>& a, const Tolerances& tol = {});
std::vector<Rational> bn_from_an_exact(const std::vector<Rational>& a);

// s(z, w) = sum a_n <z, w>^n, truncated at the horizon N.
class KernelSpec {
 public:
  static KernelSpec preset(std::string_view name, int d, int horizon, const Tolerances& tol = {});
  static KernelSpec custom(int d, std::vector<double> a, const Tolerances& tol = {});
  // JSON array of a-coefficients
  static KernelSpec from_file(const std::string& path, int d, const Tolerances& tol = {});

  // Same kernel rebuilt at a larger horizon; custom kernels cannot grow.
  KernelSpec with_horizon(int horizon) const;

  KernelKind kind() const noexcept { return kind_; }
  std::string name() const { return std::string(kernel_kind_name(kind_)); }
  int d() const noexcept { return d_; }
  int horizon() const noexcept { return static_cast<int>(a_.size()) - 1; }

  double a(int n) const;
  double b(int n) const;           // raw, may be slightly negative for custom kernels
  double b_clamped(int n) const;   // max(b, 0)
  double a_of(const MultiIndex& alpha) const;
  double b_of(const MultiIndex& alpha) const;

  const std::vector<double>& a_table() const noexcept { return a_; }
  const std::vector<double>& b_table() const noexcept { return b_; }

  bool has_exact() const noexcept { return !a_exact_.empty(); }
  const std::vector<Rational>& a_exact() const noexcept { return a_exact_; }
  const std::vector<Rational>& b_exact() const noexcept { return b_exact_; }

  double b_partial_sum(int n) const;
  // 1 - sum_{j<=n} b_j
  double b_residual(int n) const;
  // Largest n with b_n > 0 when b has finite support within the horizon and
  // the residual vanishes there; nullopt otherwise.
  std::optional<int> b_support() const;
  // Known exactly that sum_n b_n = 1 (presets only).
  bool sum_b_is_one() const noexcept { return kind_ != KernelKind::Custom; }
  // 1 - 1/s(t) in closed form, presets only.
  std::optional<double> b_generating(double t) const;

  std::string fingerprint() const;

 private:
  KernelKind kind_ = KernelKind::Custom;
  int d_ = 1;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<Rational> a_exact_;
  std::vector<Rational> b_exact_;
  Tolerances tol_;
};

struct WeightTable {
  int n = 0;
  std::vector<double> w;
};

WeightTable weights(const KernelSpec& k, int n);
std::vector<Rational> weights_exact(const KernelSpec& k, int n);

struct RegularityReport {
  std::vector<double> ratio_tail;  // a_n / a_{n+1} for the last few n
  double ratio_deviation = 0.0;    // |a_{N-1}/a_N - 1|
  double b_partial_sum = 0.0;
  double b_residual = 0.0;
  bool residual_nonincreasing = true;
  double divergence_proxy = 0.0;   // sum_{n<=N} a_n
  bool positive_coefficients = true;
  bool ratio_trend = false;        // condition (2) proxy
  bool divergence_trend = false;   // condition (3) proxy
};

RegularityReport regularity(const KernelSpec& k, int tail_len = 5);

}  // namespace cnpcurv

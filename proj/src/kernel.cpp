#include "cnpcurv/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "cnpcurv/errors.hpp"

namespace cnpcurv {

std::string_view kernel_kind_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::Szego: return "szego";
    case KernelKind::DruryArveson: return "drury-arveson";
    case KernelKind::Dirichlet: return "dirichlet";
    case KernelKind::Custom: return "custom";
  }
  return "custom";
}

namespace {

void check_a(const std::vector<double>& a) {
  if (a.empty()) throw Error(ErrorCode::Input, "kernel needs at least a_0");
  if (std::abs(a[0] - 1.0) > 1e-12) throw Error(ErrorCode::Input, "kernel needs a_0 = 1");
  for (std::size_t n = 1; n < a.size(); ++n) {
    if (!(a[n] > 0.0) || !std::isfinite(a[n])) {
      throw Error(ErrorCode::Input, "kernel needs a_n > 0, fails at n = " + std::to_string(n));
    }
  }
}

}  // namespace

std::vector<double> bn_from_an(const std::vector<double>& a, const Tolerances& tol) {
  check_a(a);
  std::vector<double> b(a.size(), 0.0);
  for (std::size_t n = 1; n < a.size(); ++n) {
    double s = a[n];
    for (std::size_t j = 1; j < n; ++j) s -= b[j] * a[n - j];
    b[n] = s;
    if (s < -tol.eps_cnp * std::max(1.0, a[n])) {
      std::ostringstream os;
      os << std::setprecision(17) << "b_" << n << " = " << s << " < 0";
      throw Error(ErrorCode::CNPViolation, os.str());
    }
  }
  return b;
}

std::vector<Rational> bn_from_an_exact(const std::vector<Rational>& a) {
  std::vector<Rational> b(a.size(), Rational(0));
  for (std::size_t n = 1; n < a.size(); ++n) {
    Rational s = a[n];
    for (std::size_t j = 1; j < n; ++j) s -= b[j] * a[n - j];
    b[n] = s;
    if (s < 0) throw Error(ErrorCode::CNPViolation, "b_" + std::to_string(n) + " < 0 in exact arithmetic");
  }
  return b;
}

KernelSpec KernelSpec::preset(std::string_view name, int d, int horizon, const Tolerances& tol) {
  if (d < 1) throw Error(ErrorCode::Input, "kernel dimension must be >= 1");
  if (horizon < 1) throw Error(ErrorCode::Input, "kernel horizon must be >= 1");
  KernelSpec k;
  k.d_ = d;
  k.tol_ = tol;
  if (name == "szego") {
    if (d != 1) {
      throw Error(ErrorCode::PresetDomain, "szego requires d = 1 (use drury-arveson for d = " + std::to_string(d) + ")");
    }
    k.kind_ = KernelKind::Szego;
  } else if (name == "drury-arveson") {
    k.kind_ = KernelKind::DruryArveson;
  } else if (name == "dirichlet") {
    k.kind_ = KernelKind::Dirichlet;
  } else {
    throw Error(ErrorCode::Input, "unknown kernel preset '" + std::string(name) + "'");
  }
  k.a_exact_.resize(static_cast<std::size_t>(horizon) + 1);
  for (int n = 0; n <= horizon; ++n) {
    k.a_exact_[static_cast<std::size_t>(n)] = k.kind_ == KernelKind::Dirichlet ? Rational(1, n + 1) : Rational(1);
  }
  if (k.kind_ == KernelKind::Dirichlet) {
    k.b_exact_ = bn_from_an_exact(k.a_exact_);
  } else {
    k.b_exact_.assign(k.a_exact_.size(), Rational(0));
    k.b_exact_[1] = 1;
  }
  for (const auto& v : k.a_exact_) k.a_.push_back(v.convert_to<double>());
  for (const auto& v : k.b_exact_) k.b_.push_back(v.convert_to<double>());
  return k;
}

KernelSpec KernelSpec::custom(int d, std::vector<double> a, const Tolerances& tol) {
  if (d < 1) throw Error(ErrorCode::Input, "kernel dimension must be >= 1");
  KernelSpec k;
  k.kind_ = KernelKind::Custom;
  k.d_ = d;
  k.tol_ = tol;
  k.b_ = bn_from_an(a, tol);
  k.a_ = std::move(a);
  if (k.a_.size() < 2) throw Error(ErrorCode::Input, "custom kernel needs a_0 and a_1 at least");
  return k;
}

KernelSpec KernelSpec::from_file(const std::string& path, int d, const Tolerances& tol) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Input, "cannot open kernel file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Input, std::string("kernel file is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw Error(ErrorCode::Input, "kernel file must hold a JSON array of a-coefficients");
  std::vector<double> a;
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorCode::Input, "kernel coefficients must be numbers");
    a.push_back(v.get<double>());
  }
  return custom(d, std::move(a), tol);
}

KernelSpec KernelSpec::with_horizon(int horizon) const {
  if (horizon == this->horizon()) return *this;
  if (kind_ == KernelKind::Custom) {
    if (horizon < this->horizon()) {
      KernelSpec k = *this;
      k.a_.resize(static_cast<std::size_t>(horizon) + 1);
      k.b_.resize(static_cast<std::size_t>(horizon) + 1);
      return k;
    }
    throw Error(ErrorCode::HorizonExceeded, "custom kernel has " + std::to_string(this->horizon()) +
                                                " coefficients beyond a_0, " + std::to_string(horizon) + " needed");
  }
  return preset(kernel_kind_name(kind_), d_, horizon, tol_);
}

double KernelSpec::a(int n) const {
  if (n < 0 || n > horizon()) {
    throw Error(ErrorCode::HorizonExceeded, "a_" + std::to_string(n) + " beyond kernel horizon " + std::to_string(horizon()));
  }
  return a_[static_cast<std::size_t>(n)];
}

double KernelSpec::b(int n) const {
  if (n < 0 || n > horizon()) {
    throw Error(ErrorCode::HorizonExceeded, "b_" + std::to_string(n) + " beyond kernel horizon " + std::to_string(horizon()));
  }
  return b_[static_cast<std::size_t>(n)];
}

double KernelSpec::b_clamped(int n) const { return std::max(0.0, b(n)); }

double KernelSpec::a_of(const MultiIndex& alpha) const {
  return a(alpha.degree()) * multinomial(alpha).convert_to<double>();
}

double KernelSpec::b_of(const MultiIndex& alpha) const {
  return b(alpha.degree()) * multinomial(alpha).convert_to<double>();
}

double KernelSpec::b_partial_sum(int n) const {
  n = std::min(n, horizon());
  if (has_exact()) {
    Rational s = 0;
    for (int j = 1; j <= n; ++j) s += b_exact_[static_cast<std::size_t>(j)];
    return s.convert_to<double>();
  }
  double s = 0.0;
  for (int j = 1; j <= n; ++j) s += b_[static_cast<std::size_t>(j)];
  return s;
}

double KernelSpec::b_residual(int n) const {
  n = std::min(n, horizon());
  if (has_exact()) {
    Rational s = 1;
    for (int j = 1; j <= n; ++j) s -= b_exact_[static_cast<std::size_t>(j)];
    return s.convert_to<double>();
  }
  return 1.0 - b_partial_sum(n);
}

std::optional<int> KernelSpec::b_support() const {
  if (kind_ == KernelKind::Szego || kind_ == KernelKind::DruryArveson) return 1;
  if (kind_ == KernelKind::Dirichlet) return std::nullopt;
  int last = 0;
  for (int n = 1; n <= horizon(); ++n) {
    if (b_[static_cast<std::size_t>(n)] > 0.0) last = n;
  }
  if (last > 0 && std::abs(b_residual(horizon())) <= tol_.eps_id) return last;
  return std::nullopt;
}

std::optional<double> KernelSpec::b_generating(double t) const {
  switch (kind_) {
    case KernelKind::Szego:
    case KernelKind::DruryArveson:
      return t;
    case KernelKind::Dirichlet:
      if (t == 0.0) return 0.0;
      return 1.0 + t / std::log1p(-t);
    case KernelKind::Custom:
      return std::nullopt;
  }
  return std::nullopt;
}

std::string KernelSpec::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, std::size_t len) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= c[i];
      h *= 1099511628211ull;
    }
  };
  const int kind = static_cast<int>(kind_);
  mix(&kind, sizeof kind);
  mix(&d_, sizeof d_);
  mix(a_.data(), a_.size() * sizeof(double));
  std::ostringstream os;
  os << name() << "/d" << d_ << "/N" << horizon() << "/" << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

WeightTable weights(const KernelSpec& k, int n) {
  if (n < 0 || n > k.horizon()) {
    throw Error(ErrorCode::HorizonExceeded, "weights row " + std::to_string(n) + " beyond kernel horizon " +
                                                std::to_string(k.horizon()));
  }
  WeightTable t;
  t.n = n;
  t.w.resize(static_cast<std::size_t>(n) + 1);
  // prefix[m] = 1 - sum_{j<=m} b_j
  std::vector<double> residual(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) residual[static_cast<std::size_t>(m)] = k.b_residual(m);
  for (int i = 0; i < n; ++i) t.w[static_cast<std::size_t>(i)] = k.a(i) * residual[static_cast<std::size_t>(n - i)];
  t.w[static_cast<std::size_t>(n)] = k.a(n);
  return t;
}

std::vector<Rational> weights_exact(const KernelSpec& k, int n) {
  if (!k.has_exact()) throw Error(ErrorCode::Input, "exact weights need a preset kernel");
  if (n < 0 || n > k.horizon()) {
    throw Error(ErrorCode::HorizonExceeded, "weights row " + std::to_string(n) + " beyond kernel horizon " +
                                                std::to_string(k.horizon()));
  }
  const auto& a = k.a_exact();
  const auto& b = k.b_exact();
  std::vector<Rational> residual(static_cast<std::size_t>(n) + 1);
  Rational s = 1;
  residual[0] = 1;
  for (int m = 1; m <= n; ++m) {
    s -= b[static_cast<std::size_t>(m)];
    residual[static_cast<std::size_t>(m)] = s;
  }
  std::vector<Rational> w(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] * residual[static_cast<std::size_t>(n - i)];
  w[static_cast<std::size_t>(n)] = a[static_cast<std::size_t>(n)];
  return w;
}

RegularityReport regularity(const KernelSpec& k, int tail_len) {
  RegularityReport r;
  const int N = k.horizon();
  const int first = std::max(0, N - tail_len);
  for (int n = first; n < N; ++n) r.ratio_tail.push_back(k.a(n) / k.a(n + 1));
  r.ratio_deviation = std::abs(k.a(N - 1) / k.a(N) - 1.0);
  r.b_partial_sum = k.b_partial_sum(N);
  r.b_residual = k.b_residual(N);
  double prev = 1.0;
  for (int n = 1; n <= N; ++n) {
    const double res = k.b_residual(n);
    if (res > prev + 1e-15) r.residual_nonincreasing = false;
    prev = res;
  }
  for (int n = 0; n <= N; ++n) {
    r.divergence_proxy += k.a(n);
    if (!(k.a(n) > 0.0)) r.positive_coefficients = false;
  }
  r.ratio_trend = r.ratio_deviation <= 0.05;
  // n a_n should not decay when sum a_n diverges at the polynomial scale
  const int half = std::max(1, N / 2);
  const double growth = (N * k.a(N)) / (half * k.a(half));
  r.divergence_trend = r.b_residual <= 1e-12 || growth >= 0.75;
  return r;
}

}  // namespace cnpcurv

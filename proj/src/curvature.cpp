#include "cnpcurv/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cnpcurv/errors.hpp"
#include "cnpcurv/parallel.hpp"
#include "cnpcurv/simd/kernels.hpp"

namespace cnpcurv {

namespace {

double qd(int m, int n) { return q(m, n).convert_to<double>(); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::optional<double> b_tail_sum(const KernelSpec& k, int m) {
  if (m < 0) m = 0;
  if (auto s = k.b_support()) {
    double t = 0.0;
    for (int n = m + 1; n <= *s; ++n) t += k.b(n);
    return t;
  }
  if (k.sum_b_is_one()) {
    if (k.horizon() >= m) return std::max(0.0, k.b_residual(m));
    return std::max(0.0, k.with_horizon(m).b_residual(m));
  }
  return std::nullopt;
}

DpsiSeries trace_dpsi_series(const CharacteristicSeries& series, const KernelSpec& k) {
  const IndexTable& idx = series.index();
  const DefectPackage& pkg = series.package();
  const int d = idx.d();
  const int N = series.N_theta();
  DpsiSeries out;
  out.per_degree.assign(static_cast<std::size_t>(N) + 1, 0.0);
  std::vector<double> inv(series.count());
  for (std::size_t g = 0; g < series.count(); ++g) inv[g] = 1.0 / idx.multinomial(g);
  for (int i = 0; i <= N; ++i) {
    const std::size_t lo = idx.degree_begin(i), hi = idx.degree_end(i);
    out.per_degree[static_cast<std::size_t>(i)] =
        simd::dot(series.trace_aa().data() + lo, inv.data() + lo, hi - lo) / qd(d - 1, i);
  }
  out.partial = simd::sum(out.per_degree.data(), out.per_degree.size());

  // Past degree 2m - 2 every coefficient trace is sum_delta b_{gamma - delta} ||Delta G_delta||^2,
  // and the multinomial sum identity collapses each degree to sum_j b_{N-j} g_j.
  if (pkg.nil_degree && N >= 2 * *pkg.nil_degree - 2) {
    const int m = *pkg.nil_degree;
    double tail = 0.0;
    bool known = true;
    for (int j = 0; j < m && known; ++j) {
      double g = 0.0;
      for (std::size_t p = idx.degree_begin(j); p < idx.degree_end(j); ++p) {
        g += frob_sq(pkg.Delta * series.G(p)) / idx.multinomial(p);
      }
      g /= qd(d - 1, j);
      const auto bt = b_tail_sum(k, N - j);
      if (!bt) {
        known = false;
      } else {
        tail += g * *bt;
      }
    }
    if (known) out.tail = tail;
  }
  return out;
}

std::vector<ThetaTraceRow> theta_trace_rows(const DpsiSeries& dpsi, const CharacteristicSeries& series,
                                            const KernelSpec& k, int n_max) {
  const int d = series.index().d();
  const int N = series.N_theta();
  if (n_max > N && !series.degree()) {
    throw Error(ErrorCode::HorizonExceeded, "graded traces to n = " + std::to_string(n_max) +
                                                " need Taylor coefficients to that degree, horizon is " + std::to_string(N));
  }
  auto c = [&](int i) { return i <= N ? dpsi.per_degree[static_cast<std::size_t>(i)] : 0.0; };
  std::vector<ThetaTraceRow> rows;
  std::vector<double> tE_norm;
  double cumulative = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    ThetaTraceRow row;
    row.n = n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) s += k.a(n - i) / k.a(n) * c(i);
    row.tE_normalized = s;
    row.tE = s * qd(d - 1, n);
    cumulative += row.tE;
    row.tP_normalized = cumulative / qd(d, n);
    tE_norm.push_back(s);
    const WeightTable w = weights(k, n);
    row.dpsi_partial = simd::dot(w.w.data(), tE_norm.data(), tE_norm.size());
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> curvature_weighted(const DefectPackage& pkg, const std::vector<ThetaTraceRow>& rows) {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(pkg.rank_delta - r.dpsi_partial);
  return out;
}

cvec sphere_sample(int d, std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> g;
  cvec u(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) u(i) = cplx(g(rng), g(rng));
    norm = u.norm();
  } while (norm == 0.0);
  return u / norm;
}

IntegralEstimate curvature_integral(const DefectPackage& pkg, const ThetaEvaluator& eval, double radius, int samples,
                                    std::uint64_t seed) {
  if (!(radius > 0.0 && radius < 1.0)) throw Error(ErrorCode::Input, "radius must lie in (0, 1)");
  if (samples < 1) throw Error(ErrorCode::Input, "need at least one sample");
  std::vector<double> values(static_cast<std::size_t>(samples));
  parallel_for(values.size(), [&](std::size_t i) {
    const cvec z = radius * sphere_sample(pkg.d, seed, i);
    values[i] = pkg.rank_delta - eval.gram(z).trace().real();
  });
  IntegralEstimate out;
  out.radius = radius;
  out.samples = samples;
  out.estimate = simd::sum(values.data(), values.size()) / samples;
  if (samples > 1) {
    std::vector<double> centered(values);
    for (double& v : centered) v -= out.estimate;
    const double var = simd::sum_squares(centered.data(), centered.size()) / (samples - 1);
    out.standard_error = std::sqrt(var / samples);
  }
  return out;
}

PureCurvature curvature_pure(const DefectPackage& pkg, const PurityReport& purity, double k_series, int fd_estimate,
                             const Tolerances& tol) {
  if (purity.residual > tol.eps_pure) {
    throw Error(ErrorCode::NotPure, "purity residual " + fmt(purity.residual) + " exceeds " + fmt(tol.eps_pure));
  }
  PureCurvature out;
  out.K = pkg.rank_delta - fd_estimate;
  out.integer_mismatch = std::abs(k_series - std::round(k_series)) > 0.05;
  return out;
}

Verdict assess(const CurvatureReport& report, const KernelSpec& weights_kernel) {
  if (weights_kernel.fingerprint() != report.kernel_fingerprint) {
    throw Error(ErrorCode::ReconcileFailure, "kernel mismatch: series built with " + report.kernel_fingerprint +
                                                 ", weights from " + weights_kernel.fingerprint());
  }
  Verdict v;
  const auto& c = report.dpsi.per_degree;
  const int N = report.N_theta;
  const double dim = report.dim_ran_delta;
  const double r2 = report.integral.radius * report.integral.radius;

  if (report.dpsi.is_complete()) {
    v.series_gap = 0.0;
  } else {
    double est = 0.0;
    if (N >= 1 && c[static_cast<std::size_t>(N - 1)] > 0.0) {
      const double rho = c[static_cast<std::size_t>(N)] / c[static_cast<std::size_t>(N - 1)];
      est = rho < 1.0 ? c[static_cast<std::size_t>(N)] * rho / (1.0 - rho) : dim;
    }
    if (auto bt = b_tail_sum(weights_kernel, N)) {
      est = std::max(est, dim * *bt);
    } else {
      est = std::max(est, dim * std::max(0.0, weights_kernel.b_residual(N)));
    }
    if (report.is_polynomial && report.polynomial_degree) est = 0.0;
    v.series_gap = std::min(est + dim * report.tail_bound, std::max(0.0, dim - report.dpsi.partial));
  }
  const double remainder = report.dpsi.tail.value_or(v.series_gap);

  double radial = 0.0;
  for (int i = 0; i <= N; ++i) radial += (1.0 - std::pow(r2, i)) * c[static_cast<std::size_t>(i)];
  v.integral_gap = radial + remainder;

  const int n_max = static_cast<int>(report.K_weighted.size()) - 1;
  double after = 0.0;
  for (int l = n_max + 1; l <= N; ++l) after += c[static_cast<std::size_t>(l)];
  v.weighted_gap = after + remainder;

  const double se3 = 3.0 * report.integral.standard_error;
  auto compare = [&](std::string a, double x, std::string b, double y, double tol) {
    Comparison cmp{std::move(a), std::move(b), std::abs(x - y), 0.01 + tol, false};
    cmp.ok = cmp.difference <= cmp.tolerance;
    if (!cmp.ok) v.ok = false;
    v.comparisons.push_back(std::move(cmp));
  };
  const double ks = report.K_series_best();
  const double kw = report.K_weighted.back();
  compare("K_series", ks, "K_weighted", kw, v.weighted_gap + (report.dpsi.is_complete() ? 0.0 : v.series_gap));
  compare("K_series", ks, "K_integral", report.K_integral, v.integral_gap + v.series_gap + se3);
  compare("K_weighted", kw, "K_integral", report.K_integral, v.integral_gap + v.weighted_gap + se3);

  const double total = report.dpsi.completed();
  for (const auto& row : report.rows) {
    OrderingRow o;
    o.n = row.n;
    o.tP_normalized = row.tP_normalized;
    o.tE_normalized = row.tE_normalized;
    o.dpsi_partial = row.dpsi_partial;
    o.first_holds = row.tP_normalized >= row.tE_normalized - 1e-10;
    o.second_holds = row.tE_normalized >= row.dpsi_partial - 1e-10;
    o.conjecture_gap = std::abs(row.tP_normalized - total);
    if (!o.first_holds) ++v.first_ordering_violations;
    if (!o.second_holds) ++v.second_ordering_violations;
    v.ordering.push_back(o);
  }

  return v;
}

Verdict reconcile(const CurvatureReport& report, const KernelSpec& weights_kernel) {
  Verdict v = assess(report, weights_kernel);
  if (!v.ok) throw Error(ErrorCode::ReconcileFailure, disagreement(v));
  return v;
}

std::string disagreement(const Verdict& v) {
  std::ostringstream os;
  for (const auto& cmp : v.comparisons) {
    if (cmp.ok) continue;
    if (os.tellp() > 0) os << "; ";
    os << cmp.first << " vs " << cmp.second << ": |difference| = " << fmt(cmp.difference) << " > tolerance "
       << fmt(cmp.tolerance);
  }
  return os.str();
}

}  // namespace cnpcurv

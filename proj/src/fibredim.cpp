#include "cnpcurv/fibredim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "cnpcurv/comb.hpp"
#include "cnpcurv/errors.hpp"
#include "cnpcurv/graded_index.hpp"
#include "cnpcurv/linalg.hpp"
#include "cnpcurv/parallel.hpp"

namespace cnpcurv {

EvaluationRank fd_by_evaluation(const DefectPackage& pkg, const KernelSpec& k, int n_samples, double radius,
                                std::uint64_t seed, bool pure, const Tolerances& tol) {
  if (n_samples < 20) throw Error(ErrorCode::Input, "fibre dimension sampling needs at least 20 samples");
  if (!(radius > 0.0 && radius < 1.0)) throw Error(ErrorCode::Input, "radius must lie in (0, 1)");
  if (k.d() != pkg.d) throw Error(ErrorCode::Shape, "kernel dimension does not match the tuple");
  const ThetaEvaluator ev(pkg, tol);
  EvaluationRank out;
  out.samples.resize(static_cast<std::size_t>(n_samples));
  parallel_for(out.samples.size(), [&](std::size_t i) {
    const double r = radius * (0.5 + 0.5 * static_cast<double>(i) / (n_samples - 1));
    RankSample& s = out.samples[i];
    s.z = r * sphere_sample(pkg.d, seed, i);
    s.rank = pkg.rank_delta == 0 ? 0 : psd_rank(hermitian_eigenvalues(ev.gram(s.z)), tol.eps_rank);
  });
  int attained = 0;
  for (const auto& s : out.samples) out.fd = std::max(out.fd, s.rank);
  for (const auto& s : out.samples) attained += s.rank == out.fd;
  out.attain_fraction = static_cast<double>(attained) / n_samples;
  out.label = pure ? "fd (GRS proxy)" : "generic evaluation rank";
  return out;
}

GradedTrend fd_by_grading(const CharacteristicSeries& series, const KernelSpec& k, int n_max, const Tolerances& tol) {
  if (n_max < 0) throw Error(ErrorCode::Input, "n_max must be nonnegative");
  const int N = series.N_theta();
  if (n_max > N && !series.degree()) {
    throw Error(ErrorCode::HorizonExceeded, "graded dimensions to n = " + std::to_string(n_max) +
                                                " need Taylor coefficients to that degree, horizon is " + std::to_string(N));
  }
  if (n_max > k.horizon()) {
    throw Error(ErrorCode::HorizonExceeded, "kernel horizon " + std::to_string(k.horizon()) + " below n = " +
                                                std::to_string(n_max));
  }
  const DefectPackage& pkg = series.package();
  const IndexTable& coeff = series.index();
  const IndexTable beta(pkg.d, n_max);
  const int e = pkg.rank_delta;
  const auto total = static_cast<Eigen::Index>(beta.size()) * e;

  std::vector<double> a_beta(beta.size());
  for (std::size_t p = 0; p < beta.size(); ++p) a_beta[p] = k.a(beta.degree(p)) * beta.multinomial(p);

  std::map<std::pair<std::size_t, std::size_t>, cmat> cache;
  std::mutex cache_mutex;
  auto gram = [&](std::size_t g1, std::size_t g2) -> cmat {
    std::lock_guard lock(cache_mutex);
    auto it = cache.find({g1, g2});
    if (it == cache.end()) it = cache.emplace(std::pair{g1, g2}, series.gram(g1, g2)).first;
    return it->second;
  };

  cmat H = cmat::Zero(total, total);
  if (e > 0) {
    parallel_for(beta.size(), [&](std::size_t p1) {
      const MultiIndex& b1 = beta[p1];
      for (std::size_t p2 = p1; p2 < beta.size(); ++p2) {
        const MultiIndex& b2 = beta[p2];
        std::vector<int> m(static_cast<std::size_t>(pkg.d));
        for (int i = 0; i < pkg.d; ++i) m[static_cast<std::size_t>(i)] = std::min(b1[i], b2[i]);
        const MultiIndex lo(std::move(m));
        cmat acc = cmat::Zero(e, e);
        for (std::size_t pm = 0; pm < beta.size(); ++pm) {
          const MultiIndex& mu = beta[pm];
          if (!mu.leq(lo)) continue;
          const MultiIndex g1 = b1 - mu, g2 = b2 - mu;
          if (g1.degree() > N || g2.degree() > N) continue;  // zero past the polynomial degree
          acc += a_beta[pm] * gram(coeff.find(g1), coeff.find(g2));
        }
        acc /= std::sqrt(a_beta[p1] * a_beta[p2]);
        const auto r1 = static_cast<Eigen::Index>(p1) * e, r2 = static_cast<Eigen::Index>(p2) * e;
        H.block(r1, r2, e, e) = acc;
        if (p2 != p1) H.block(r2, r1, e, e) = acc.adjoint();
      }
    });
  }

  GradedTrend out;
  out.rows.resize(static_cast<std::size_t>(n_max) + 1);
  parallel_for(out.rows.size(), [&](std::size_t n) {
    GradedDim& row = out.rows[n];
    row.n = static_cast<int>(n);
    const auto size = static_cast<Eigen::Index>(beta.degree_end(row.n)) * e;
    row.dim = size == 0 ? 0 : psd_rank(hermitian_eigenvalues(H.topLeftCorner(size, size)), tol.eps_rank);
    row.q = q(pkg.d, row.n).convert_to<double>();
    row.ratio = row.dim / row.q;
  });
  out.last = out.rows.back().ratio;
  out.slope = n_max > 0 ? out.last - out.rows[out.rows.size() - 2].ratio : 0.0;
  return out;
}

InnermultVerdict innermult_consistency(const FibreDimReport& report, const CurvatureReport& curvature,
                                       const Tolerances& tol) {
  if (curvature.purity_residual > tol.eps_pure) {
    throw Error(ErrorCode::NotPure, "purity residual " + std::to_string(curvature.purity_residual) +
                                        " exceeds the purity gate");
  }
  InnermultVerdict v;
  v.dpsi = curvature.dpsi.completed();
  v.fd = report.evaluation.fd;
  v.dpsi_gap = std::abs(v.dpsi - v.fd);
  if (!curvature.rows.empty()) {
    const std::size_t last = curvature.rows.size() - 1;
    v.trace_gap_last = std::abs(curvature.rows[last].tP_normalized - v.fd);
    v.trace_gap_half = std::abs(curvature.rows[last / 2].tP_normalized - v.fd);
  }
  v.ok = v.dpsi_gap <= 0.05 && v.trace_gap_last <= v.trace_gap_half + 1e-12;
  return v;
}

}  // namespace cnpcurv

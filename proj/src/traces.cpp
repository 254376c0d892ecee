#include "cnpcurv/traces.hpp"

#include <algorithm>
#include <cmath>

#include "cnpcurv/errors.hpp"
#include "cnpcurv/simd/kernels.hpp"

namespace cnpcurv {

namespace {

double qd(int m, int n) { return q(m, n).convert_to<double>(); }

double a_beta(const KernelSpec& k, const IndexTable& idx, std::size_t pos) {
  return k.a(idx.degree(pos)) * idx.multinomial(pos);
}

void need_kernel(const KernelSpec& k, int degree) {
  if (degree > k.horizon()) {
    throw Error(ErrorCode::HorizonExceeded, "degree " + std::to_string(degree) + " beyond kernel horizon " +
                                                std::to_string(k.horizon()));
  }
}

struct Shift {
  std::vector<std::size_t> src, dst;
  std::vector<double> coef;
};

// M^alpha on the truncated basis: eps_beta -> sqrt(a_beta / a_{alpha+beta}) eps_{alpha+beta}
Shift shift_of(const KernelSpec& k, const IndexTable& idx, std::size_t alpha) {
  Shift s;
  const int room = idx.max_degree() - idx.degree(alpha);
  if (room < 0) return s;
  for (std::size_t b = 0; b < idx.degree_end(room); ++b) {
    const std::size_t t = idx.add(alpha, b);
    s.src.push_back(b);
    s.dst.push_back(t);
    s.coef.push_back(std::sqrt(a_beta(k, idx, b) / a_beta(k, idx, t)));
  }
  return s;
}

}  // namespace

std::shared_ptr<const IndexTable> graded_basis(int d, int D_max) { return std::make_shared<const IndexTable>(d, D_max); }

GradedOperator graded_identity(int d, int r, int D_max) {
  GradedOperator g{graded_basis(d, D_max), r, cmat()};
  g.X = cmat::Identity(g.size(), g.size());
  return g;
}

GradedOperator graded_projection(int d, int r, int D_max, int n) {
  GradedOperator g{graded_basis(d, D_max), r, cmat()};
  g.X = cmat::Zero(g.size(), g.size());
  if (n >= 0 && n <= D_max) {
    for (auto i = static_cast<Eigen::Index>(g.index->degree_begin(n)) * r;
         i < static_cast<Eigen::Index>(g.index->degree_end(n)) * r; ++i) {
      g.X(i, i) = 1.0;
    }
  }
  return g;
}

GradedOperator mz_matrix(const KernelSpec& k, const MultiIndex& alpha, int r, int D_max) {
  if (alpha.degree() > D_max) {
    throw Error(ErrorCode::HorizonExceeded, "|alpha| = " + std::to_string(alpha.degree()) + " exceeds D_max = " + std::to_string(D_max));
  }
  need_kernel(k, D_max);
  GradedOperator g{graded_basis(alpha.dim(), D_max), r, cmat()};
  g.X = cmat::Zero(g.size(), g.size());
  const Shift s = shift_of(k, *g.index, g.index->find(alpha));
  for (std::size_t i = 0; i < s.src.size(); ++i) {
    for (int j = 0; j < r; ++j) {
      g.X(static_cast<Eigen::Index>(s.dst[i]) * r + j, static_cast<Eigen::Index>(s.src[i]) * r + j) = s.coef[i];
    }
  }
  return g;
}

GradedOperator phi_map(const KernelSpec& k, const GradedOperator& x, int N_op) {
  const IndexTable& idx = *x.index;
  const int r = x.r;
  const int top = std::min(N_op, idx.max_degree());
  need_kernel(k, top);
  GradedOperator out{x.index, r, cmat::Zero(x.size(), x.size())};
  for (std::size_t alpha = 1; alpha < idx.degree_end(top); ++alpha) {
    const double b = k.b_clamped(idx.degree(alpha)) * idx.multinomial(alpha);
    if (b == 0.0) continue;
    const Shift s = shift_of(k, idx, alpha);
    for (std::size_t i = 0; i < s.src.size(); ++i) {
      for (std::size_t j = 0; j < s.src.size(); ++j) {
        out.X.block(static_cast<Eigen::Index>(s.dst[i]) * r, static_cast<Eigen::Index>(s.dst[j]) * r, r, r) +=
            (b * s.coef[i] * s.coef[j]) *
            x.X.block(static_cast<Eigen::Index>(s.src[i]) * r, static_cast<Eigen::Index>(s.src[j]) * r, r, r);
      }
    }
  }
  return out;
}

double trace_E(const GradedOperator& x, int n) {
  if (n < 0 || n > x.D_max()) {
    throw Error(ErrorCode::HorizonExceeded, "degree " + std::to_string(n) + " outside the truncation (D_max = " +
                                                std::to_string(x.D_max()) + ")");
  }
  const auto lo = static_cast<Eigen::Index>(x.index->degree_begin(n)) * x.r;
  const auto hi = static_cast<Eigen::Index>(x.index->degree_end(n)) * x.r;
  double s = 0.0;
  for (Eigen::Index i = lo; i < hi; ++i) s += x.X(i, i).real();
  return s;
}

double trace_P(const GradedOperator& x, int n) {
  double s = 0.0;
  for (int i = 0; i <= n; ++i) s += trace_E(x, i);
  return s;
}

double dpsi_trace_partial(const KernelSpec& k, const GradedOperator& x, int n, int N_op) {
  if (n > x.D_max()) {
    throw Error(ErrorCode::HorizonExceeded, "n = " + std::to_string(n) + " exceeds D_max = " + std::to_string(x.D_max()));
  }
  need_kernel(k, n);
  for (int j = N_op + 1; j <= n; ++j) {
    if (k.b(j) > 0.0) {
      throw Error(ErrorCode::HorizonExceeded, "trace against E_" + std::to_string(n) + " needs Phi up to degree " +
                                                  std::to_string(n) + ", operator horizon is " + std::to_string(N_op));
    }
  }
  const GradedOperator phi = phi_map(k, x, std::min(N_op, n));
  const int d = x.d();
  double s = 0.0;
  for (int i = 0; i <= n; ++i) s += k.a(i) / qd(d - 1, i) * (trace_E(x, i) - trace_E(phi, i));
  return s;
}

double dpsi_trace_weights(const KernelSpec& k, const GradedOperator& x, int n) {
  const WeightTable w = weights(k, n);
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) t[static_cast<std::size_t>(i)] = trace_E(x, i) / qd(x.d() - 1, i);
  return simd::dot(w.w.data(), t.data(), t.size());
}

std::vector<GradedTraceRow> graded_trace_rows(const GradedOperator& x, int n_max) {
  std::vector<GradedTraceRow> rows;
  double cumulative = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    GradedTraceRow row;
    row.n = n;
    row.tE = trace_E(x, n);
    cumulative += row.tE;
    row.tE_normalized = row.tE / qd(x.d() - 1, n);
    row.tP_normalized = cumulative / qd(x.d(), n);
    rows.push_back(row);
  }
  return rows;
}

int MultiplierCoefficients::degree() const {
  int deg = 0;
  for (std::size_t g = 0; g < A.size(); ++g) {
    if (A[g].norm() > 0.0) deg = index->degree(g);
  }
  return deg;
}

cmat multiplier_matrix(const KernelSpec& k, const MultiplierCoefficients& phi, int D_max) {
  need_kernel(k, D_max);
  const int d = phi.index->d();
  const auto basis = graded_basis(d, D_max);
  const IndexTable& idx = *basis;
  const Eigen::Index ro = phi.rows(), ri = phi.cols();
  cmat m = cmat::Zero(static_cast<Eigen::Index>(idx.size()) * ro, static_cast<Eigen::Index>(idx.size()) * ri);
  for (std::size_t g = 0; g < phi.A.size(); ++g) {
    if (phi.index->degree(g) > D_max) break;
    const std::size_t gp = idx.find((*phi.index)[g]);
    const Shift s = shift_of(k, idx, gp);
    for (std::size_t i = 0; i < s.src.size(); ++i) {
      m.block(static_cast<Eigen::Index>(s.dst[i]) * ro, static_cast<Eigen::Index>(s.src[i]) * ri, ro, ri) += s.coef[i] * phi.A[g];
    }
  }
  return m;
}

IdentityCheck series_identity_check(const KernelSpec& k, const MultiplierCoefficients& phi, int n) {
  need_kernel(k, n);
  const int d = phi.index->d();
  const cmat m = multiplier_matrix(k, phi, n);
  GradedOperator x{graded_basis(d, n), static_cast<int>(phi.rows()), m * m.adjoint()};
  IdentityCheck c;
  c.lhs = trace_E(x, n) / qd(d - 1, n);
  for (std::size_t g = 0; g < phi.A.size(); ++g) {
    const int i = phi.index->degree(g);
    if (i > n) break;
    c.rhs += (k.a(n - i) / k.a(n)) / qd(d - 1, i) * frob_sq(phi.A[g]) / phi.index->multinomial(g);
  }
  c.residual = std::abs(c.lhs - c.rhs);
  return c;
}

double factx_check(const KernelSpec& k, const MultiplierCoefficients& phi, int D_max, int n_terms) {
  const int deg = phi.degree();
  const int window = std::min(D_max - n_terms - deg, n_terms);
  if (window < 0) {
    throw Error(ErrorCode::HorizonExceeded, "D_max = " + std::to_string(D_max) + " leaves no exact block for " +
                                                std::to_string(n_terms) + " terms and degree " + std::to_string(deg));
  }
  need_kernel(k, D_max);
  const int d = phi.index->d();
  const int r = static_cast<int>(phi.rows());
  const cmat m = multiplier_matrix(k, phi, D_max);
  GradedOperator x{graded_basis(d, D_max), r, m * m.adjoint()};
  GradedOperator y = x;
  y.X -= phi_map(k, x, D_max).X;
  const IndexTable& idx = *x.index;
  cmat sum = cmat::Zero(x.size(), x.size());
  for (std::size_t alpha = 0; alpha < idx.degree_end(std::min(n_terms, D_max)); ++alpha) {
    const double a = k.a(idx.degree(alpha)) * idx.multinomial(alpha);
    const Shift s = shift_of(k, idx, alpha);
    for (std::size_t i = 0; i < s.src.size(); ++i) {
      for (std::size_t j = 0; j < s.src.size(); ++j) {
        sum.block(static_cast<Eigen::Index>(s.dst[i]) * r, static_cast<Eigen::Index>(s.dst[j]) * r, r, r) +=
            (a * s.coef[i] * s.coef[j]) *
            y.X.block(static_cast<Eigen::Index>(s.src[i]) * r, static_cast<Eigen::Index>(s.src[j]) * r, r, r);
      }
    }
  }
  const auto top = static_cast<Eigen::Index>(idx.degree_end(window)) * r;
  return (sum.topLeftCorner(top, top) - x.X.topLeftCorner(top, top)).cwiseAbs().maxCoeff();
}

}  // namespace cnpcurv

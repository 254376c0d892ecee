#include "cnpcurv/charfn.hpp"

#include <cmath>
#include <sstream>

#include "cnpcurv/errors.hpp"
#include "cnpcurv/parallel.hpp"

namespace cnpcurv {

namespace {

cmat rows_of_block(const cmat& v1, std::ptrdiff_t block, int n) {
  return v1.middleRows(static_cast<Eigen::Index>(block) * n, n);
}

}  // namespace

ThetaEvaluator::ThetaEvaluator(const DefectPackage& pkg, const Tolerances& tol) : pkg_(&pkg), tol_(tol) {
  const int n = pkg.dimH;
  sf_ = pkg.sigma.cwiseProduct(pkg.f);
  one_minus_f2_ = (1.0 - pkg.f.array().square()).matrix();
  rvec sp(n);
  for (int i = 0; i < n; ++i) sp(i) = pkg.f(i) > 0.0 ? pkg.sigma(i) : 0.0;
  a0_ambient_ = -(pkg.U * sp.asDiagonal() * pkg.V1.adjoint());
}

std::vector<cplx> ThetaEvaluator::monomials(const cvec& z) const {
  const IndexTable& index = pkg_->index;
  std::vector<cplx> zp(index.size());
  zp[0] = 1.0;
  for (std::size_t p = 1; p < index.size(); ++p) {
    const MultiIndex& a = index[p];
    int i = 0;
    while (a[i] == 0) ++i;
    zp[p] = z(i) * zp[index.find(a - MultiIndex::unit(pkg_->d, i))];
  }
  return zp;
}

cmat ThetaEvaluator::solve_factor(const cvec& z, cmat& zv1, double& zz, double* condition) const {
  const DefectPackage& pkg = *pkg_;
  const int n = pkg.dimH;
  if (z.size() != pkg.d) throw Error(ErrorCode::Shape, "point has " + std::to_string(z.size()) + " coordinates, d = " + std::to_string(pkg.d));
  const double norm = z.norm();
  if (!(norm < 1.0)) {
    std::ostringstream os;
    os << "||z|| = " << norm << " >= 1";
    throw Error(ErrorCode::OutsideBall, os.str());
  }
  const std::vector<cplx> zp = monomials(z);
  cmat m = cmat::Identity(n, n);
  zv1 = cmat::Zero(n, pkg.V1.cols());
  zz = 0.0;
  for (std::size_t p : pkg.tilde) {
    const double b = pkg.b_alpha[p];
    m -= (b * zp[p]) * pkg.powers[p].adjoint();
    zv1 += (std::sqrt(b) * zp[p]) * rows_of_block(pkg.V1, pkg.block_of[p], n);
    zz += b * std::norm(zp[p]);
  }
  Eigen::JacobiSVD<cmat> svd(m);
  const rvec s = svd.singularValues();
  const double smin = s(s.size() - 1);
  const double cond = smin > 0.0 ? std::max(s(0), 1.0) / smin : INFINITY;
  if (condition) *condition = cond;
  if (!(cond <= tol_.near_singular)) {
    std::ostringstream os;
    os << "cond(I - B(z)) = " << cond << " at ||z|| = " << norm;
    throw Error(ErrorCode::NearSingular, os.str());
  }
  return pkg.Delta * Eigen::PartialPivLU<cmat>(m).inverse();
}

cmat ThetaEvaluator::gram(const cvec& z, double* condition) const {
  const DefectPackage& pkg = *pkg_;
  cmat zv1;
  double zz = 0.0;
  const cmat x = solve_factor(z, zv1, zz, condition);
  const cmat cross = pkg.U * sf_.asDiagonal() * zv1.adjoint() * x.adjoint();
  const cmat tt = a0_ambient_ * a0_ambient_.adjoint() - cross - cross.adjoint() +
       x * (zz * cmat::Identity(pkg.dimH, pkg.dimH) - zv1 * one_minus_f2_.asDiagonal() * zv1.adjoint()) * x.adjoint();
  return pkg.W.adjoint() * tt * pkg.W;
}

PointEvaluation ThetaEvaluator::evaluate(const cvec& z) const {
  const DefectPackage& pkg = *pkg_;
  const int n = pkg.dimH;
  PointEvaluation out;
  out.z = z;
  cmat zv1;
  double zz = 0.0;
  const cmat x = solve_factor(z, zv1, zz, &out.condition);
  const std::vector<cplx> zp = monomials(z);
  cmat zrow = cmat::Zero(n, pkg.tilde_dim);
  for (std::size_t b = 0; b < pkg.tilde.size(); ++b) {
    const std::size_t p = pkg.tilde[b];
    zrow.middleCols(static_cast<Eigen::Index>(b) * n, n).diagonal().setConstant(std::sqrt(pkg.b_alpha[p]) * zp[p]);
  }
  const rvec fm1 = pkg.f.array() - 1.0;
  const cmat full = a0_ambient_ + x * (zrow + zv1 * fm1.asDiagonal() * pkg.V1.adjoint());
  out.theta = pkg.W.adjoint() * full;
  out.trace_tt = frob_sq(out.theta);
  if (out.theta.size() > 0) {
    const cmat g = out.theta * out.theta.adjoint();
    const rvec lam = hermitian_eigenvalues(g);
    out.rank = psd_rank(lam, tol_.eps_rank);
    out.singular_values = rvec(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) out.singular_values(i) = std::sqrt(std::max(0.0, lam(lam.size() - 1 - i)));
  }
  return out;
}

CharacteristicSeries taylor(const DefectPackage& pkg, const KernelSpec& k, int N_theta, const Tolerances& tol) {
  (void)tol;
  if (N_theta < 0) throw Error(ErrorCode::Input, "Taylor horizon must be >= 0");
  if (N_theta > pkg.N_op) {
    throw Error(ErrorCode::HorizonExceeded, "Taylor horizon " + std::to_string(N_theta) + " needs operator horizon >= " +
                                                std::to_string(N_theta) + ", have " + std::to_string(pkg.N_op));
  }
  CharacteristicSeries s;
  s.pkg_ = &pkg;
  s.N_theta_ = N_theta;
  const IndexTable& index = pkg.index;
  s.count_ = index.degree_end(N_theta);
  const int n = pkg.dimH;
  s.one_minus_f2_ = (1.0 - pkg.f.array().square()).matrix();

  s.G_.assign(s.count_, cmat());
  s.G_[0] = cmat::Identity(n, n);
  for (int deg = 1; deg <= N_theta; ++deg) {
    const std::size_t lo = index.degree_begin(deg);
    parallel_for(index.degree_end(deg) - lo, [&](std::size_t i) {
      const std::size_t g = lo + i;
      cmat acc = cmat::Zero(n, n);
      if (!(pkg.nil_degree && deg >= *pkg.nil_degree)) {
        for (const auto& [a, rest] : index.below(g)) {
          if (a == 0 || pkg.b_alpha[a] == 0.0) continue;
          acc += pkg.b_alpha[a] * pkg.powers[a].adjoint() * s.G_[rest];
        }
      }
      s.G_[g] = std::move(acc);
    });
  }

  s.Y_.assign(s.count_, cmat());
  s.trace_aa_.assign(s.count_, 0.0);
  {
    double a0 = 0.0;
    for (int i = 0; i < n; ++i) {
      if (pkg.f(i) > 0.0) a0 += pkg.sigma(i) * pkg.sigma(i);
    }
    s.trace_aa_[0] = a0;
    s.Y_[0] = cmat::Zero(n, pkg.V1.cols());
  }
  std::vector<cmat> dg(s.count_);
  parallel_for(s.count_, [&](std::size_t g) { dg[g] = pkg.Delta * s.G_[g]; });
  const rvec w = s.one_minus_f2_.cwiseSqrt();
  parallel_for(s.count_ - 1, [&](std::size_t i) {
    const std::size_t g = i + 1;
    cmat y = cmat::Zero(n, pkg.V1.cols());
    double diag = 0.0;
    for (const auto& [a, rest] : index.below(g)) {
      if (pkg.block_of[a] < 0) continue;
      y += std::sqrt(pkg.b_alpha[a]) * s.G_[rest] * rows_of_block(pkg.V1, pkg.block_of[a], n);
      diag += pkg.b_alpha[a] * frob_sq(dg[rest]);
    }
    s.trace_aa_[g] = diag - frob_sq(pkg.Delta * y * w.asDiagonal());
    s.Y_[g] = std::move(y);
  });

  for (std::size_t g = 0; g < s.count_; ++g) {
    if (std::sqrt(std::max(0.0, s.trace_aa_[g])) > 1e-12) s.observed_degree_ = index.degree(g);
  }
  if (pkg.nil_degree) {
    if (auto support = k.b_support()) {
      s.is_polynomial_ = true;
      const int bound = *support + *pkg.nil_degree - 1;
      if (N_theta >= bound) s.degree_ = std::max(0, s.observed_degree_);
    }
  }
  return s;
}

cmat CharacteristicSeries::gram(std::size_t g1, std::size_t g2) const {
  const DefectPackage& pkg = *pkg_;
  const IndexTable& index = pkg.index;
  const int n = pkg.dimH;
  if (g1 == 0 && g2 == 0) {
    rvec sp(n);
    for (int i = 0; i < n; ++i) sp(i) = pkg.f(i) > 0.0 ? pkg.sigma(i) * pkg.sigma(i) : 0.0;
    return pkg.W.adjoint() * pkg.U * sp.asDiagonal() * pkg.U.adjoint() * pkg.W;
  }
  if (g1 == 0 || g2 == 0) {
    const std::size_t g = g1 == 0 ? g2 : g1;
    const rvec sf = pkg.sigma.cwiseProduct(pkg.f);
    const cmat m = -(pkg.U * sf.asDiagonal() * Y_[g].adjoint() * pkg.Delta);
    const cmat out = pkg.W.adjoint() * m * pkg.W;
    return g1 == 0 ? out : cmat(out.adjoint());
  }
  const MultiIndex& b2 = index[g2];
  cmat acc = cmat::Zero(n, n);
  for (const auto& [a, rest] : index.below(g1)) {
    if (pkg.block_of[a] < 0) continue;
    if (!index[a].leq(b2)) continue;
    const std::size_t rest2 = index.find(b2 - index[a]);
    acc += pkg.b_alpha[a] * G_[rest] * G_[rest2].adjoint();
  }
  acc -= Y_[g1] * one_minus_f2_.asDiagonal() * Y_[g2].adjoint();
  return pkg.W.adjoint() * pkg.Delta * acc * pkg.Delta * pkg.W;
}

cmat CharacteristicSeries::coefficient(std::size_t g) const {
  const DefectPackage& pkg = *pkg_;
  const int n = pkg.dimH;
  if (g == 0) {
    rvec sp(n);
    for (int i = 0; i < n; ++i) sp(i) = pkg.f(i) > 0.0 ? pkg.sigma(i) : 0.0;
    return -(pkg.W.adjoint() * pkg.U * sp.asDiagonal() * pkg.V1.adjoint());
  }
  cmat c = cmat::Zero(n, pkg.tilde_dim);
  for (const auto& [a, rest] : pkg.index.below(g)) {
    if (pkg.block_of[a] < 0) continue;
    c.middleCols(static_cast<Eigen::Index>(pkg.block_of[a]) * n, n) += std::sqrt(pkg.b_alpha[a]) * G_[rest];
  }
  const rvec fm1 = pkg.f.array() - 1.0;
  return pkg.W.adjoint() * pkg.Delta * (c + Y_[g] * fm1.asDiagonal() * pkg.V1.adjoint());
}

cmat CharacteristicSeries::evaluate(const cvec& z) const {
  const DefectPackage& pkg = *pkg_;
  cmat out = cmat::Zero(pkg.rank_delta, pkg.tilde_dim);
  for (std::size_t g = 0; g < count_; ++g) {
    cplx zg = 1.0;
    const MultiIndex& a = pkg.index[g];
    for (int i = 0; i < pkg.d; ++i) zg *= std::pow(z(i), a[i]);
    out += zg * coefficient(g);
  }
  return out;
}

ConsistencyCheck check_consistency(const CharacteristicSeries& series, const ThetaEvaluator& eval,
                                   const std::vector<cvec>& samples) {
  ConsistencyCheck c;
  double r = 0.0;
  for (const auto& z : samples) {
    r = std::max(r, z.norm());
    const cmat diff = eval.evaluate(z).theta - series.evaluate(z);
    c.max_residual = std::max(c.max_residual, diff.size() ? spectral_norm(diff) : 0.0);
  }
  const bool terminated = series.degree().has_value();
  c.bound = (terminated ? 0.0 : std::pow(r, series.N_theta() + 1) / (1.0 - r)) + 1e-10;
  c.ok = c.max_residual <= c.bound;
  return c;
}

}  // namespace cnpcurv

#include "cnpcurv/linalg.hpp"

#include <algorithm>

#include "cnpcurv/simd/kernels.hpp"

namespace cnpcurv {

double frob_sq(const cmat& m) {
  if (m.size() == 0) return 0.0;
  return simd::sum_squares(reinterpret_cast<const double*>(m.data()), 2 * static_cast<std::size_t>(m.size()));
}

double spectral_norm(const cmat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<cmat> svd(m);
  return svd.singularValues()(0);
}

rvec hermitian_eigenvalues(const cmat& h) {
  if (h.size() == 0) return rvec();
  const cmat sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<cmat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

cmat psd_sqrt(const cmat& h) {
  if (h.size() == 0) return h;
  const cmat sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<cmat> es(sym);
  rvec lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = std::sqrt(std::max(0.0, lam(i)));
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

int psd_rank(const rvec& eigenvalues, double eps) {
  if (eigenvalues.size() == 0) return 0;
  const double cut = eps * std::max(eigenvalues.maxCoeff(), 1.0);
  int r = 0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues(i) > cut) ++r;
  }
  return r;
}

double hermitian_residual(const cmat& h) {
  if (h.size() == 0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace cnpcurv

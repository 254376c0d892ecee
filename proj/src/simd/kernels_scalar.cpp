#include "cnpcurv/simd/kernels.hpp"

namespace cnpcurv::simd {
namespace {

constexpr std::size_t kLeaf = 16;

// pairwise summation keeps the error at O(log n) ulps
double pairwise(const double* x, std::size_t n) {
  if (n <= kLeaf) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise(x, h) + pairwise(x + h, n - h);
}

double pairwise_sq(const double* x, std::size_t n) {
  if (n <= kLeaf) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sq(x, h) + pairwise_sq(x + h, n - h);
}

double pairwise_dot(const double* x, const double* y, std::size_t n) {
  if (n <= kLeaf) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_dot(x, y, h) + pairwise_dot(x + h, y + h, n - h);
}

void axpy_ref(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

const KernelSet kScalar{Isa::Scalar, pairwise, pairwise_sq, pairwise_dot, axpy_ref};

}  // namespace

const KernelSet& scalar_kernels() { return kScalar; }

}  // namespace cnpcurv::simd

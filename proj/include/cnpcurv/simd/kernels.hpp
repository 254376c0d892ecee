#pragma once

#include <cstddef>
#include <string_view>

namespace cnpcurv::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

struct KernelSet {
  Isa isa;
  double (*sum)(const double* x, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
};

const KernelSet& scalar_kernels();
// nullptr when the variant is not compiled in or the CPU lacks the extension
const KernelSet* avx2_kernels();
const KernelSet* neon_kernels();

// Best available set, or the scalar reference while forced.
const KernelSet& active();
void force_scalar(bool on);
bool scalar_forced();

inline double sum(const double* x, std::size_t n) { return active().sum(x, n); }
inline double sum_squares(const double* x, std::size_t n) { return active().sum_squares(x, n); }
inline double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
inline void axpy(double a, const double* x, double* y, std::size_t n) { active().axpy(a, x, y, n); }

}  // namespace cnpcurv::simd

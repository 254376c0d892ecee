#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "cnpcurv/errors.hpp"
#include "cnpcurv/kernel.hpp"

using namespace cnpcurv;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Input;
}

}  // namespace

TEST_CASE("preset coefficient tables") {
  const auto da = KernelSpec::preset("drury-arveson", 2, 5);
  for (int n = 0; n <= 5; ++n) CHECK(da.a(n) == 1.0);
  CHECK(da.b(1) == 1.0);
  for (int n = 2; n <= 5; ++n) CHECK(da.b(n) == 0.0);

  const auto dir = KernelSpec::preset("dirichlet", 1, 3);
  CHECK(dir.a_exact()[3] == Rational(1, 4));
  CHECK(dir.b_exact()[1] == Rational(1, 2));
  CHECK(dir.b_exact()[2] == Rational(1, 12));
  CHECK(dir.b_exact()[3] == Rational(1, 24));

  const auto sz = KernelSpec::preset("szego", 1, 2);
  CHECK(sz.b(1) == 1.0);
  CHECK(sz.b(2) == 0.0);
}

TEST_CASE("dirichlet b matches the series of 1 + t / log(1 - t)") {
  // 1 + t/log(1-t) = t/2 + t^2/12 + t^3/24 + 19 t^4/720 + 3 t^5/160 + 863 t^6/60480 + ...
  const auto k = KernelSpec::preset("dirichlet", 1, 6);
  CHECK(k.b_exact()[4] == Rational(19, 720));
  CHECK(k.b_exact()[5] == Rational(3, 160));
  CHECK(k.b_exact()[6] == Rational(863, 60480));
  const double t = 0.3;
  double s = 0.0;
  const auto big = KernelSpec::preset("dirichlet", 1, 60);
  for (int n = 1; n <= 60; ++n) s += big.b(n) * std::pow(t, n);
  CHECK(s == doctest::Approx(*big.b_generating(t)).epsilon(1e-14));
}

TEST_CASE("szego needs d = 1") {
  CHECK(code_of([] { KernelSpec::preset("szego", 2, 4); }) == ErrorCode::PresetDomain);
}

TEST_CASE("bn_from_an rejects non-CNP coefficients") {
  CHECK(code_of([] { bn_from_an({1.0, 2.0, 1.0}); }) == ErrorCode::CNPViolation);
  const auto b = bn_from_an({1.0, 1.0, 1.0, 1.0});
  CHECK(b[1] == 1.0);
  CHECK(b[2] == 0.0);
  CHECK(b[3] == 0.0);
}

TEST_CASE("convolution reconstructs a") {
  for (const char* name : {"drury-arveson", "dirichlet"}) {
    const auto k = KernelSpec::preset(name, 1, 100);
    for (int n = 1; n <= 100; ++n) {
      double s = 0.0;
      for (int j = 1; j <= n; ++j) s += k.b(j) * k.a(n - j);
      CHECK(std::abs(s - k.a(n)) <= 1e-12);
    }
    const auto& a = k.a_exact();
    const auto& b = k.b_exact();
    for (int n = 1; n <= 40; ++n) {
      Rational s = 0;
      for (int j = 1; j <= n; ++j) s += b[j] * a[n - j];
      CHECK(s == a[n]);
    }
  }
}

TEST_CASE("weights rows") {
  const auto da = KernelSpec::preset("drury-arveson", 1, 10);
  const auto w = weights(da, 6);
  REQUIRE(w.w.size() == 7);
  for (int i = 0; i < 6; ++i) CHECK(w.w[i] == 0.0);
  CHECK(w.w[6] == 1.0);

  const auto dir = KernelSpec::preset("dirichlet", 1, 10);
  const auto we = weights_exact(dir, 1);
  CHECK(we[0] == Rational(1, 2));
  CHECK(we[1] == Rational(1, 2));
  CHECK(weights(dir, 0).w == std::vector<double>{1.0});
  CHECK(code_of([&] { weights(dir, 11); }) == ErrorCode::HorizonExceeded);
}

TEST_CASE("weight rows sum to one, float and exact") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<KernelSpec> kernels{KernelSpec::preset("drury-arveson", 1, 50), KernelSpec::preset("dirichlet", 1, 50)};
  for (int trial = 0; trial < 5; ++trial) {
    // random CNP kernel from non-negative b with sum < 1
    std::vector<double> b(51, 0.0), a(51, 0.0);
    double mass = 0.0;
    for (int n = 1; n <= 50; ++n) {
      b[n] = u(rng) * std::pow(0.7, n);
      mass += b[n];
    }
    for (int n = 1; n <= 50; ++n) b[n] *= 0.95 / mass;
    a[0] = 1.0;
    for (int n = 1; n <= 50; ++n) {
      for (int j = 1; j <= n; ++j) a[n] += b[j] * a[n - j];
    }
    kernels.push_back(KernelSpec::custom(1, a));
  }
  for (const auto& k : kernels) {
    for (int n = 0; n <= 50; ++n) {
      const auto w = weights(k, n);
      double s = 0.0;
      for (double x : w.w) {
        s += x;
        CHECK(x >= -1e-10);
      }
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  }
  const auto dir = KernelSpec::preset("dirichlet", 1, 30);
  for (int n = 0; n <= 30; ++n) {
    Rational s = 0;
    for (const auto& x : weights_exact(dir, n)) s += x;
    CHECK(s == 1);
  }
}

TEST_CASE("vanishing head of the weights") {
  const auto k = KernelSpec::preset("dirichlet", 1, 200);
  const int kk = 3;
  double head_a = 0.0;
  for (int i = 0; i <= kk; ++i) head_a += k.a(i);
  double prev = 1e9;
  for (int n = 10; n <= 200; n += 10) {
    const auto w = weights(k, n);
    double head = 0.0;
    for (int i = 0; i <= kk; ++i) head += w.w[i];
    CHECK(head <= head_a * k.b_residual(n - kk - 1) + 1e-15);
    CHECK(head <= prev);
    prev = head;
  }
}

TEST_CASE("regularity diagnostics") {
  const auto da = KernelSpec::preset("drury-arveson", 1, 20);
  auto r = regularity(da);
  CHECK(r.ratio_deviation == 0.0);
  CHECK(r.b_residual == 0.0);
  CHECK(r.ratio_trend);
  CHECK(r.divergence_trend);

  const auto dir = KernelSpec::preset("dirichlet", 1, 100);
  r = regularity(dir);
  REQUIRE(r.ratio_tail.size() == 5);
  CHECK(r.ratio_tail.back() == doctest::Approx(101.0 / 100.0));
  CHECK(r.b_residual > 0.0);
  CHECK(r.b_residual == doctest::Approx(0.17939).epsilon(1e-3));
  CHECK(r.residual_nonincreasing);
  CHECK(r.divergence_trend);

  std::vector<double> geo(21);
  for (int n = 0; n <= 20; ++n) geo[n] = std::pow(0.5, n);
  r = regularity(KernelSpec::custom(1, geo));
  CHECK(r.divergence_proxy <= 2.0);
  CHECK_FALSE(r.divergence_trend);
}

TEST_CASE("kernel file round trip") {
  const std::string path = "kernel_test_coeffs.json";
  {
    std::ofstream out(path);
    out << "[1, 0.5, 0.3333333333333333, 0.25]";
  }
  const auto k = KernelSpec::from_file(path, 2);
  CHECK(k.kind() == KernelKind::Custom);
  CHECK(k.b(3) == doctest::Approx(1.0 / 24.0).epsilon(1e-12));
  {
    std::ofstream out(path);
    out << "[1, 2, 1]";
  }
  CHECK(code_of([&] { KernelSpec::from_file(path, 1); }) == ErrorCode::CNPViolation);
  std::remove(path.c_str());
}

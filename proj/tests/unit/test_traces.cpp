#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/random_tuples.hpp"
#include "cnpcurv/errors.hpp"
#include "cnpcurv/traces.hpp"

using namespace cnpcurv;
using namespace cnpcurv::testing;

namespace {

double qd(int m, int n) { return q(m, n).convert_to<double>(); }

MultiplierCoefficients poly(int d, int deg, std::initializer_list<std::pair<MultiIndex, cplx>> terms) {
  MultiplierCoefficients phi;
  phi.index = graded_basis(d, deg);
  phi.A.assign(phi.index->size(), cmat::Zero(1, 1));
  for (const auto& [a, v] : terms) phi.A[phi.index->find(a)](0, 0) = v;
  return phi;
}

}  // namespace

TEST_CASE("mz_matrix") {
  const auto sz = KernelSpec::preset("szego", 1, 6);
  CHECK((mz_matrix(sz, MultiIndex{0}, 2, 4).X - cmat::Identity(10, 10)).norm() == 0.0);
  const auto s = mz_matrix(sz, MultiIndex{1}, 1, 4).X;
  cmat shift = cmat::Zero(5, 5);
  for (int i = 1; i < 5; ++i) shift(i, i - 1) = 1.0;
  CHECK((s - shift).norm() <= 1e-15);
  const auto dir = KernelSpec::preset("dirichlet", 1, 6);
  CHECK(mz_matrix(dir, MultiIndex{1}, 1, 3).X(1, 0).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  try {
    mz_matrix(sz, MultiIndex{5}, 1, 4);
    FAIL("expected HorizonExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HorizonExceeded);
  }
}

TEST_CASE("phi_map closed form and Phi(X)E_0 = 0") {
  std::mt19937_64 rng(4);
  for (const char* name : {"drury-arveson", "dirichlet"}) {
    for (int d = 1; d <= 3; ++d) {
      const int D = d == 3 ? 4 : 6;
      const auto k = KernelSpec::preset(name, d, D);
      const auto x = random_hermitian(rng, d, 2, D);
      const auto phi = phi_map(k, x, D);
      CHECK(std::abs(trace_E(phi, 0)) == 0.0);
      for (int i = 1; i <= D; ++i) {
        double closed = 0.0;
        for (int j = 0; j < i; ++j) closed += k.b(i - j) * k.a(j) / qd(d - 1, j) * trace_E(x, j);
        closed *= qd(d - 1, i) / k.a(i);
        CHECK(trace_E(phi, i) == doctest::Approx(closed).epsilon(1e-11));
      }
    }
  }
  const auto k = KernelSpec::preset("drury-arveson", 2, 3);
  const auto e0 = graded_projection(2, 3, 3, 0);
  CHECK(trace_E(phi_map(k, e0, 3), 1) == doctest::Approx(6.0));
  GradedOperator zero = e0;
  zero.X.setZero();
  CHECK(phi_map(k, zero, 3).X.norm() == 0.0);
}

TEST_CASE("block traces") {
  const auto id = graded_identity(3, 2, 5);
  for (int n = 0; n <= 5; ++n) {
    CHECK(trace_E(id, n) == 2.0 * qd(2, n));
    CHECK(trace_P(id, n) == 2.0 * qd(3, n));
  }
  const auto e3 = graded_projection(2, 1, 5, 3);
  CHECK(trace_E(e3, 3) == qd(1, 3));
  CHECK(trace_E(e3, 2) == 0.0);
}

TEST_CASE("dPsi partial traces by both routes") {
  std::mt19937_64 rng(8);
  for (const char* name : {"drury-arveson", "dirichlet"}) {
    const auto k = KernelSpec::preset(name, 2, 8);
    const auto id = graded_identity(2, 1, 6);
    for (int n = 0; n <= 6; ++n) {
      CHECK(dpsi_trace_partial(k, id, n, 6) == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(dpsi_trace_weights(k, id, n) == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
  const auto da = KernelSpec::preset("drury-arveson", 2, 8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = random_hermitian(rng, 2, 2, 4);
    CHECK(std::abs(dpsi_trace_partial(da, x, 4, 1) - dpsi_trace_weights(da, x, 4)) <= 1e-12);
  }
  auto zero = graded_identity(2, 1, 4);
  zero.X.setZero();
  CHECK(dpsi_trace_partial(da, zero, 4, 4) == 0.0);
  const auto dir = KernelSpec::preset("dirichlet", 2, 8);
  try {
    dpsi_trace_partial(dir, zero, 4, 2);
    FAIL("expected HorizonExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HorizonExceeded);
  }
}

TEST_CASE("trace(M_phi M_phi* E_n) coefficient formula") {
  const auto sz = KernelSpec::preset("szego", 1, 8);
  MultiplierCoefficients c;
  c.index = graded_basis(1, 0);
  c.A = {cmat::Identity(2, 2) * cplx(0.3, 0.4)};
  auto r = series_identity_check(sz, c, 0);
  CHECK(r.lhs == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.rhs == doctest::Approx(0.5).epsilon(1e-14));

  r = series_identity_check(sz, poly(1, 3, {{MultiIndex{3}, 1.0}}), 5);
  CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.rhs == doctest::Approx(1.0).epsilon(1e-14));

  const auto dir = KernelSpec::preset("dirichlet", 2, 8);
  r = series_identity_check(dir, poly(2, 1, {{MultiIndex{1, 0}, 1.0}, {MultiIndex{0, 1}, 1.0}}), 2);
  CHECK(r.residual <= 1e-12);
  CHECK(r.lhs == doctest::Approx(1.5).epsilon(1e-12));

  std::mt19937_64 rng(12);
  for (int d = 1; d <= 3; ++d) {
    MultiplierCoefficients m;
    m.index = graded_basis(d, 3);
    for (std::size_t g = 0; g < m.index->size(); ++g) m.A.push_back(random_complex(rng, 2, 3));
    for (int n = 0; n <= 4; ++n) CHECK(series_identity_check(dir.with_horizon(8), m, n).residual <= 1e-10 * (1.0 + n));
  }
}

TEST_CASE("Fact X on the truncation") {
  const auto sz = KernelSpec::preset("szego", 1, 20);
  CHECK(factx_check(sz, poly(1, 0, {{MultiIndex{0}, 1.0}}), 12, 6) <= 1e-12);
  CHECK(factx_check(sz, poly(1, 0, {{MultiIndex{0}, 0.0}}), 12, 6) == 0.0);
  CHECK(factx_check(sz, poly(1, 3, {{MultiIndex{3}, 1.0}}), 14, 6) <= 1e-12);
  const auto dir = KernelSpec::preset("dirichlet", 2, 12);
  CHECK(factx_check(dir, poly(2, 1, {{MultiIndex{1, 0}, 0.5}, {MultiIndex{0, 1}, cplx(0.0, 0.5)}}), 9, 4) <= 1e-12);
  CHECK(factx_check(dir, poly(2, 0, {{MultiIndex{0, 0}, 1.0}}), 8, 4) <= 1e-12);
}

TEST_CASE("positivity, trace-class bound and monotonicity for multiplier Gram operators") {
  std::mt19937_64 rng(31);
  for (const char* name : {"drury-arveson", "dirichlet"}) {
    for (int d = 1; d <= 2; ++d) {
      const int D = 7;
      const auto k = KernelSpec::preset(name, d, D);
      MultiplierCoefficients m;
      m.index = graded_basis(d, 2);
      for (std::size_t g = 0; g < m.index->size(); ++g) m.A.push_back(0.3 * random_complex(rng, 2, 2));
      const cmat mm = multiplier_matrix(k, m, D);
      GradedOperator x{graded_basis(d, D), 2, mm * mm.adjoint()};
      const auto phi = phi_map(k, x, D);
      const double norm = spectral_norm(x.X);
      double prev = -1.0;
      for (int i = 0; i <= D; ++i) {
        CHECK(trace_E(x, i) - trace_E(phi, i) >= -1e-12);
        const double t = dpsi_trace_partial(k, x, i, D);
        CHECK(t <= 2.0 * norm + 1e-10);
        CHECK(t >= prev - 1e-12);
        prev = t;
      }
    }
  }
}

#include "cnpcurv/identities.hpp"

#include <cmath>
#include <sstream>

#include "cnpcurv/comb.hpp"
#include "cnpcurv/errors.hpp"

namespace cnpcurv {

namespace {

void fail(IdentityBattery& b, bool& flag, const std::string& what) {
  flag = false;
  if (!b.counterexample) b.counterexample = what;
}

void check_kernel(IdentityBattery& b, const KernelSpec& k, int n_max) {
  const std::string name = k.fingerprint();
  if (k.has_exact()) {
    const auto& a = k.a_exact();
    const auto& bb = k.b_exact();
    for (int n = 0; n <= n_max; ++n) {
      Rational row = 0;
      for (const auto& w : weights_exact(k, n)) row += w;
      if (row != 1) fail(b, b.weights_ok, name + ": weight row " + std::to_string(n) + " sums to " + row.str());
      if (n == 0) continue;
      Rational conv = 0;
      for (int j = 1; j <= n; ++j) conv += bb[static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(n - j)];
      if (conv != a[static_cast<std::size_t>(n)]) {
        fail(b, b.convolution_ok, name + ": convolution fails at n = " + std::to_string(n));
      }
    }
    return;
  }
  for (int n = 0; n <= n_max; ++n) {
    double row = 0.0;
    for (double w : weights(k, n).w) row += w;
    if (std::abs(row - 1.0) > 1e-12) {
      fail(b, b.weights_ok, name + ": weight row " + std::to_string(n) + " sums to " + std::to_string(row));
    }
    if (n == 0) continue;
    double conv = 0.0;
    for (int j = 1; j <= n; ++j) conv += k.b(j) * k.a(n - j);
    if (std::abs(conv - k.a(n)) > 1e-12 * std::max(1.0, k.a(n))) {
      fail(b, b.convolution_ok, name + ": convolution fails at n = " + std::to_string(n));
    }
  }
}

}  // namespace

std::string IdentityBattery::summary() const {
  std::ostringstream os;
  os << "id2: " << id2_cases << (id2_ok ? " ok" : " FAILED") << " (";
  for (std::size_t i = 0; i < id2_per_d.size(); ++i) {
    os << (i ? ", " : "") << "d=" << i + 1 << ": " << id2_per_d[i];
  }
  os << "), lemma-w: " << (weights_ok ? "ok" : "FAILED") << ", convolution: " << (convolution_ok ? "ok" : "FAILED");
  return os.str();
}

IdentityBattery run_identity_battery(int d_max, int n_max, const KernelSpec* extra) {
  if (d_max < 1 || n_max < 0) throw Error(ErrorCode::Input, "need d_max >= 1 and n_max >= 0");
  IdentityBattery b;
  for (int d = 1; d <= d_max; ++d) {
    int count = 0;
    for (int n = 0; n <= n_max; ++n) {
      for (int m = 0; m <= n; ++m) {
        for (const auto& beta : enumerate_degree(d, m)) {
          ++count;
          const Id2Result r = verify_id2(d, n, beta);
          if (!r.equal) {
            fail(b, b.id2_ok, "id2 at d = " + std::to_string(d) + ", n = " + std::to_string(n) + ", beta = " +
                                  beta.str() + ": " + r.lhs.str() + " != " + r.rhs.str());
          }
        }
      }
    }
    b.id2_per_d.push_back(count);
    b.id2_cases += count;
  }
  const int horizon = std::max(n_max, 1);
  check_kernel(b, KernelSpec::preset("szego", 1, horizon), n_max);
  check_kernel(b, KernelSpec::preset("drury-arveson", 1, horizon), n_max);
  check_kernel(b, KernelSpec::preset("dirichlet", 1, horizon), n_max);
  if (extra) check_kernel(b, *extra, std::min(n_max, extra->horizon()));
  return b;
}

}  // namespace cnpcurv

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "../support/random_tuples.hpp"
#include "cnpcurv/comb.hpp"
#include "cnpcurv/curvature.hpp"
#include "cnpcurv/errors.hpp"
#include "cnpcurv/fibredim.hpp"
#include "cnpcurv/identities.hpp"
#include "cnpcurv/traces.hpp"

using namespace cnpcurv;
using namespace cnpcurv::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  std::function<Outcome()> run;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

int theta_horizon_for(const OperatorTuple& t) {
  const auto m = nilpotency_degree(t);
  return m ? std::max(2 * *m - 2, 1) : 12;
}

// Package and series of one suite case at the exact polynomial horizon.
struct Prepared {
  KernelSpec k;
  std::unique_ptr<DefectPackage> pkg;
  std::unique_ptr<CharacteristicSeries> series;
  DpsiSeries dpsi;
};

Prepared prepare(const OperatorTuple& t, const std::string& kernel, int d, int N_theta) {
  const auto m = nilpotency_degree(t);
  const int N_op = std::max(m ? *m - 1 : 12, N_theta);
  Prepared p{KernelSpec::preset(kernel, d, std::max(N_op, N_theta)), nullptr, nullptr, {}};
  p.pkg = std::make_unique<DefectPackage>(defect_package(t, p.k, N_op));
  p.series = std::make_unique<CharacteristicSeries>(taylor(*p.pkg, p.k, N_theta));
  p.dpsi = trace_dpsi_series(*p.series, p.k);
  return p;
}

Outcome exact_combinatorics() {
  const auto t0 = std::chrono::steady_clock::now();
  const IdentityBattery b = run_identity_battery(4, 10);
  int rows = 0;
  bool rows_ok = true;
  for (const char* name : {"szego", "drury-arveson", "dirichlet"}) {
    const KernelSpec k = KernelSpec::preset(name, 1, 30);
    for (int n = 0; n <= 30; ++n, ++rows) {
      Rational s = 0;
      for (const auto& w : weights_exact(k, n)) s += w;
      rows_ok = rows_ok && s == 1;
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = b.ok() && rows_ok && secs < 30.0;
  o.detail = b.summary() + "; exact weight rows equal to 1: " + std::to_string(rows) + (rows_ok ? " ok" : " FAILED") +
             "; " + sci(secs) + " s";
  if (b.counterexample) o.detail += "; first counterexample: " + *b.counterexample;
  return o;
}

Outcome kernel_layer() {
  Outcome o;
  const KernelSpec dir = KernelSpec::preset("dirichlet", 1, 100);
  const auto& be = dir.b_exact();
  const bool head = be[1] == Rational(1, 2) && be[2] == Rational(1, 12) && be[3] == Rational(1, 24);
  const KernelSpec da = KernelSpec::preset("drury-arveson", 1, 100);
  bool da_ok = da.b_exact()[1] == 1;
  for (int n = 2; n <= 100; ++n) da_ok = da_ok && da.b_exact()[static_cast<std::size_t>(n)] == 0;
  double worst = 0.0;
  for (const KernelSpec* k : {&dir, &da}) {
    for (int n = 1; n <= 100; ++n) {
      double conv = 0.0;
      for (int j = 1; j <= n; ++j) conv += k->b(j) * k->a(n - j);
      worst = std::max(worst, std::abs(conv - k->a(n)));
    }
  }
  o.pass = head && da_ok && worst <= 1e-12;
  o.detail = std::string("dirichlet b head (1/2, 1/12, 1/24) ") + (head ? "exact" : "WRONG") +
             ", drury-arveson b = (1, 0, ...) " + (da_ok ? "exact" : "WRONG") + ", max convolution error n <= 100: " +
             sci(worst);
  return o;
}

Outcome defect_identities() {
  Outcome o;
  double worst_delta = 0.0, worst_inter = 0.0;
  for (const auto& c : nilpotent_suite(2024, 100)) {
    const OperatorTuple t = OperatorTuple::load(c.ops);
    const auto m = nilpotency_degree(t);
    const int N_op = std::max(m ? *m - 1 : 1, 1);
    const KernelSpec k = KernelSpec::preset(c.kernel, c.d, N_op);
    const DefectPackage pkg = defect_package(t, k, N_op);
    worst_delta = std::max(worst_delta, pkg.delta_identity_residual());
    worst_inter = std::max(worst_inter, pkg.intertwining_residual());
  }
  o.pass = worst_delta <= 1e-10 && worst_inter <= 1e-10;
  o.detail = "100 tuples, max ||Delta^2 + T~T~* - I|| = " + sci(worst_delta) + ", max ||T~D - Delta T~|| = " +
             sci(worst_inter);
  return o;
}

Outcome pn_cross_check() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> dd(1, 3), rr(1, 3), nn(0, 8);
  const char* names[] = {"drury-arveson", "dirichlet", "szego"};
  double worst = 0.0;
  int checks = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = dd(rng), r = rr(rng), n = nn(rng);
    const char* name = names[trial % (d == 1 ? 3 : 2)];
    const KernelSpec k = KernelSpec::preset(name, d, std::max(n, 1));
    const GradedOperator x = random_hermitian(rng, d, r, n);
    const double a = dpsi_trace_partial(k, x, n, n);
    const double b = dpsi_trace_weights(k, x, n);
    worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
    ++checks;
  }
  o.pass = worst <= 1e-11;
  o.detail = std::to_string(checks) + " random Hermitian X, max |aux1 route - weights route| = " + sci(worst);
  return o;
}

Outcome jordan_closed_form() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream os;
  bool ok = true;
  for (int kk = 1; kk <= 6; ++kk) {
    const OperatorTuple t = OperatorTuple::load({jordan(kk)});
    const Prepared p = prepare(t, "szego", 1, 12);
    const CharacteristicSeries& s = *p.series;
    double off = 0.0, lead = 0.0;
    for (std::size_t g = 0; g < s.count(); ++g) {
      const double norm = std::sqrt(frob_sq(s.coefficient(g)));
      if (static_cast<int>(g) == kk) {
        lead = norm;
      } else {
        off = std::max(off, norm);
      }
    }
    const auto rows = theta_trace_rows(p.dpsi, s, p.k, 12);
    const auto K = curvature_weighted(*p.pkg, rows);
    double kw = 0.0;
    for (int n = kk; n <= 12; ++n) kw = std::max(kw, std::abs(K[static_cast<std::size_t>(n)]));
    const ThetaEvaluator ev(*p.pkg);
    const double r = 0.999;
    const IntegralEstimate est = curvature_integral(*p.pkg, ev, r, 400, 7);
    const double integral_err = std::abs(est.estimate - (1.0 - std::pow(r, 2 * kk)));
    const PurityReport pr = purity(*p.pkg);
    const EvaluationRank fd = fd_by_evaluation(*p.pkg, p.k, 20, 0.8, 7, pr.pure);
    const PureCurvature pc = curvature_pure(*p.pkg, pr, p.pkg->rank_delta - p.dpsi.completed(), fd.fd);
    const bool case_ok = std::abs(lead - 1.0) <= 1e-10 && off <= 1e-10 && std::abs(p.dpsi.completed() - 1.0) <= 1e-10 &&
                         kw <= 1e-10 && integral_err <= 3.0 * est.standard_error + 1e-12 && fd.fd == 1 && pc.K == 0;
    ok = ok && case_ok;
    os << "J_" << kk << (case_ok ? " ok" : " FAILED") << " (|A_k| - 1 = " << sci(lead - 1.0) << ", integral err "
       << sci(integral_err) << "); ";
  }
  const double secs = seconds_since(t0);
  o.pass = ok && secs < 10.0;
  o.detail = os.str() + sci(secs) + " s";
  return o;
}

Outcome zero_tuple_closed_form() {
  Outcome o;
  std::ostringstream os;
  bool ok = true;
  for (int m = 1; m <= 3; ++m) {
    const OperatorTuple t = OperatorTuple::load({cmat::Zero(m, m)});
    const KernelSpec k = KernelSpec::preset("dirichlet", 1, 60);
    const DefectPackage pkg = defect_package(t, k, 60);
    const CharacteristicSeries s = taylor(pkg, k, 60);
    const DpsiSeries dpsi = trace_dpsi_series(s, k);
    const double series_err = std::abs(dpsi.partial - m * k.b_partial_sum(60));
    const EvaluationRank fd = fd_by_evaluation(pkg, k, 20, 0.8, 3, purity(pkg).pure);
    const double r = 0.999;
    double expected = 0.0;
    for (int i = 1; i <= 60; ++i) expected += k.b(i) * std::pow(r, 2 * i);
    expected = m * (1.0 - expected);
    const ThetaEvaluator ev(pkg);
    const IntegralEstimate est = curvature_integral(pkg, ev, r, 200, 3);
    const double integral_err = std::abs(est.estimate - expected);
    const bool case_ok = series_err <= 1e-12 && fd.fd == m && integral_err <= 3.0 * est.standard_error + 1e-12;
    ok = ok && case_ok;
    os << "C^" << m << (case_ok ? " ok" : " FAILED") << " (series err " << sci(series_err) << ", fd " << fd.fd
       << ", integral err " << sci(integral_err) << "); ";
  }
  o.pass = ok;
  o.detail = os.str();
  return o;
}

Outcome integrality() {
  Outcome o;
  double worst = 0.0;
  int bad = 0, total = 0;
  for (const auto& c : nilpotent_suite(2024, 100)) {
    const OperatorTuple t = OperatorTuple::load(c.ops);
    const Prepared p = prepare(t, c.kernel, c.d, theta_horizon_for(t));
    const double ks = p.pkg->rank_delta - p.dpsi.completed();
    const PurityReport pr = purity(*p.pkg);
    const EvaluationRank fd = fd_by_evaluation(*p.pkg, p.k, 20, 0.8, 11, pr.pure);
    const PureCurvature pc = curvature_pure(*p.pkg, pr, ks, fd.fd);
    worst = std::max(worst, std::abs(ks - std::round(ks)));
    const bool ok = p.dpsi.is_complete() && std::abs(ks - std::round(ks)) <= 0.05 && pc.K == 0 &&
                    std::lround(ks) == 0 && !pc.integer_mismatch;
    bad += !ok;
    ++total;
  }
  o.pass = bad == 0;
  o.detail = std::to_string(total) + " pure nilpotent tuples, max |K_series - round| = " + sci(worst) + ", failures " +
             std::to_string(bad);
  return o;
}

Outcome ordering() {
  Outcome o;
  int rows = 0, first_bad = 0, second_bad = 0;
  double first_worst = 0.0, second_worst = 0.0;
  for (const auto& c : nilpotent_suite(2024, 100)) {
    const OperatorTuple t = OperatorTuple::load(c.ops);
    const int N = std::max(12, theta_horizon_for(t));
    const Prepared p = prepare(t, c.kernel, c.d, N);
    for (const auto& row : theta_trace_rows(p.dpsi, *p.series, p.k, N)) {
      ++rows;
      const double g1 = row.tE_normalized - row.tP_normalized, g2 = row.dpsi_partial - row.tE_normalized;
      if (g1 > 1e-10) ++first_bad;
      if (g2 > 1e-10) ++second_bad;
      first_worst = std::max(first_worst, g1);
      second_worst = std::max(second_worst, g2);
    }
  }
  o.pass = first_bad == 0 && second_bad == 0;
  o.detail = std::to_string(rows) + " rows; trace_P/q_d >= trace_E/q_{d-1} fails at " + std::to_string(first_bad) +
             " (worst deficit " + sci(first_worst) + "); trace_E/q_{d-1} >= dpsi partial fails at " +
             std::to_string(second_bad) + " (worst " + sci(second_worst) + ")";
  return o;
}

Outcome unitary_invariance() {
  Outcome o;
  std::mt19937_64 rng(5);
  double worst = 0.0;
  int fd_mismatch = 0;
  const auto suite = nilpotent_suite(77, 20);
  for (const auto& c : suite) {
    const OperatorTuple t = OperatorTuple::load(c.ops);
    const OperatorTuple u = conjugate_by_unitary(t, random_unitary(rng, t.dim()));
    const int N = theta_horizon_for(t);
    const Prepared a = prepare(t, c.kernel, c.d, N), b = prepare(u, c.kernel, c.d, N);
    worst = std::max(worst, std::abs(a.dpsi.partial - b.dpsi.partial));
    const int fa = fd_by_evaluation(*a.pkg, a.k, 20, 0.8, 1, true).fd;
    const int fb = fd_by_evaluation(*b.pkg, b.k, 20, 0.8, 1, true).fd;
    fd_mismatch += fa != fb;
  }
  o.pass = worst <= 1e-10 && fd_mismatch == 0;
  o.detail = std::to_string(suite.size()) + " conjugations, max |K_series change| = " + sci(worst) +
             ", fd mismatches " + std::to_string(fd_mismatch);
  return o;
}

std::pair<int, std::string> capture(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return {static_cast<int>(e.code()), e.what()};
  }
  return {0, "no error"};
}

Outcome rejection_paths() {
  Outcome o;
  const std::function<void()> paths[] = {
      [] {
        cmat a = cmat::Zero(2, 2), b = cmat::Zero(2, 2);
        a(0, 1) = 0.3;
        b(1, 0) = 0.3;
        OperatorTuple::load({a, b});
      },
      [] {
        const OperatorTuple t = OperatorTuple::load({1.5 * cmat::Identity(2, 2), cmat::Zero(2, 2)});
        defect_package(t, KernelSpec::preset("drury-arveson", 2, 2), 2);
      },
      [] { KernelSpec::custom(1, {1.0, 2.0, 1.0, 1.0}); },
  };
  const ErrorCode expected[] = {ErrorCode::Commutator, ErrorCode::NotContraction, ErrorCode::CNPViolation};
  std::ostringstream os;
  for (int i = 0; i < 3; ++i) {
    const auto first = capture(paths[i]), second = capture(paths[i]);
    const bool ok = first.first == static_cast<int>(expected[i]) && first == second;
    o.pass = o.pass && ok;
    os << (i ? "; " : "") << first.second << (ok ? "" : " (UNEXPECTED)");
  }
  o.detail = os.str();
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "exact combinatorics", exact_combinatorics},
      {2, "kernel layer", kernel_layer},
      {3, "defect identities", defect_identities},
      {4, "graded dPsi trace routes", pn_cross_check},
      {5, "Jordan block closed form", jordan_closed_form},
      {6, "zero tuple closed form", zero_tuple_closed_form},
      {7, "integrality for pure tuples", integrality},
      {8, "graded trace ordering", ordering},
      {9, "unitary invariance", unitary_invariance},
      {10, "rejection paths", rejection_paths},
  };
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  int failures = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("unexpected exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << "criterion " << c.id << " " << (o.pass ? "PASS" : "FAIL") << " " << c.title << ": " << o.detail
              << "\n";
  }
  return failures ? 1 : 0;
}

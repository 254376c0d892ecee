#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <memory>
#include <optional>
#include <sstream>

#include "cnpcurv/comb.hpp"
#include "cnpcurv/errors.hpp"
#include "cnpcurv/identities.hpp"
#include "cnpcurv/parallel.hpp"
#include "cnpcurv/pipeline.hpp"
#include "cnpcurv/simd/kernels.hpp"

namespace cnpcurv::cli {

namespace {

using json = nlohmann::ordered_json;

struct KernelArgs {
  std::string name;
  std::string file;
};

struct Common {
  KernelArgs kernel;
  std::string input;
  std::optional<int> horizon, theta_horizon, max_n;
  int threads = -1;
  bool deterministic = false;
  Tolerances tol;
};

void add_kernel(CLI::App* app, KernelArgs& k) {
  auto* name = app->add_option("--kernel", k.name, "szego | drury-arveson | dirichlet")
                   ->check(CLI::IsMember({"szego", "drury-arveson", "dirichlet"}));
  auto* file = app->add_option("--kernel-file", k.file, "JSON array of a-coefficients");
  name->excludes(file);
}

void add_common(CLI::App* app, Common& c, bool tuple = true) {
  add_kernel(app, c.kernel);
  if (tuple) app->add_option("--input", c.input, "tuple JSON")->required();
  app->add_option("--threads", c.threads, "worker cap (0 = hardware)");
  app->add_flag("--deterministic", c.deterministic, "scalar reductions only");
  app->add_option("--eps-id", c.tol.eps_id);
  app->add_option("--eps-rank", c.tol.eps_rank);
  app->add_option("--eps-pure", c.tol.eps_pure);
  app->add_option("--eps-cnp", c.tol.eps_cnp);
  app->add_option("--eps-comm", c.tol.eps_comm);
}

void add_horizons(CLI::App* app, Common& c) {
  app->add_option("--horizon", c.horizon, "operator horizon N_op");
  app->add_option("--theta-horizon", c.theta_horizon, "Taylor horizon N_theta");
  app->add_option("--max-n", c.max_n, "largest graded degree");
}

void apply_runtime(const Common& c) {
  if (c.threads >= 0) {
    set_thread_count(c.threads);
  } else if (const char* env = std::getenv("CNPCURV_THREADS")) {
    try {
      set_thread_count(std::stoi(env));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Input, std::string("CNPCURV_THREADS is not an integer: ") + env);
    }
  }
  simd::force_scalar(c.deterministic);
}

KernelSpec make_kernel(const KernelArgs& k, int d, int horizon, const Tolerances& tol) {
  if (!k.file.empty()) return KernelSpec::from_file(k.file, d, tol);
  if (k.name.empty()) throw Error(ErrorCode::Input, "one of --kernel or --kernel-file is required");
  return KernelSpec::preset(k.name, d, horizon, tol);
}

Horizons horizons_of(const Common& c) { return {c.horizon, c.theta_horizon, c.max_n}; }

// Kernel sized for the resolved horizons of this tuple.
KernelSpec kernel_for_tuple(const Common& c, const OperatorTuple& t) {
  const ResolvedHorizons h = resolve_horizons(t, horizons_of(c));
  return make_kernel(c.kernel, t.d(), std::max({h.N_op, h.N_theta, h.n_max}), c.tol);
}

cvec parse_point(const std::string& text, int d) {
  std::vector<cplx> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove(item.begin(), item.end(), ' '), item.end());
    if (item.empty()) throw Error(ErrorCode::Input, "empty coordinate in --point");
    const char* s = item.c_str();
    char* end = nullptr;
    if (item.back() == 'i') {
      // a+bi, a-bi, bi, i
      std::size_t split = item.size() - 1;
      while (split > 0 && item[split] != '+' && item[split] != '-') --split;
      if (split > 0 && (item[split - 1] == 'e' || item[split - 1] == 'E')) {
        throw Error(ErrorCode::Input, "cannot parse coordinate " + item);
      }
      const double re = split > 0 ? std::strtod(item.substr(0, split).c_str(), &end) : 0.0;
      std::string im_text = item.substr(split, item.size() - 1 - split);
      if (im_text.empty() || im_text == "+") im_text = "1";
      if (im_text == "-") im_text = "-1";
      const double im = std::strtod(im_text.c_str(), &end);
      if (*end != '\0') throw Error(ErrorCode::Input, "cannot parse coordinate " + item);
      v.emplace_back(re, im);
    } else {
      const double re = std::strtod(s, &end);
      if (*end != '\0') throw Error(ErrorCode::Input, "cannot parse coordinate " + item);
      v.emplace_back(re, 0.0);
    }
  }
  if (static_cast<int>(v.size()) != d) {
    throw Error(ErrorCode::Shape, "--point has " + std::to_string(v.size()) + " coordinates, tuple has d = " +
                                      std::to_string(d));
  }
  cvec z(d);
  for (int i = 0; i < d; ++i) z(i) = v[static_cast<std::size_t>(i)];
  return z;
}

int cmd_identities(int d_max, int n_max, const KernelArgs& k, const Tolerances& tol, std::ostream& out,
                   std::ostream& err) {
  if (d_max < 1 || d_max > 5 || n_max < 0 || n_max > 20) {
    throw Error(ErrorCode::Input, "identities needs 1 <= d-max <= 5 and 0 <= n-max <= 20");
  }
  std::optional<KernelSpec> extra;
  if (!k.file.empty()) extra = KernelSpec::from_file(k.file, 1, tol);
  const IdentityBattery b = run_identity_battery(d_max, n_max, extra ? &*extra : nullptr);
  out << b.summary() << "\n";
  if (!b.ok()) {
    err << "error: " << error_name(ErrorCode::IdentityFailure) << ": " << *b.counterexample << "\n";
    return exit_code(ErrorCode::IdentityFailure);
  }
  return 0;
}

int cmd_kernel(const KernelArgs& ka, int d, int N, const Tolerances& tol, std::ostream& out, std::ostream& err) {
  if (N < 1) throw Error(ErrorCode::Input, "--n must be at least 1");
  const KernelSpec k = make_kernel(ka, d, N, tol);
  const int top = k.horizon();
  out << "# kernel," << k.fingerprint() << "\n";
  out << "n,a,b\n";
  for (int n = 0; n <= top; ++n) out << n << "," << fmt17(k.a(n)) << "," << (n == 0 ? "" : fmt17(k.b(n))) << "\n";
  out << "# weights\nn,i,w\n";
  for (int n = 0; n <= top; ++n) {
    const WeightTable w = weights(k, n);
    for (int i = 0; i <= n; ++i) out << n << "," << i << "," << fmt17(w.w[static_cast<std::size_t>(i)]) << "\n";
  }
  const RegularityReport r = regularity(k);
  out << "# regularity\nkey,value\n";
  out << "ratio_deviation," << fmt17(r.ratio_deviation) << "\n";
  out << "b_partial_sum," << fmt17(r.b_partial_sum) << "\n";
  out << "b_residual," << fmt17(r.b_residual) << "\n";
  out << "residual_nonincreasing," << r.residual_nonincreasing << "\n";
  out << "divergence_proxy," << fmt17(r.divergence_proxy) << "\n";
  out << "positive_coefficients," << r.positive_coefficients << "\n";
  out << "ratio_trend," << r.ratio_trend << "\n";
  out << "divergence_trend," << r.divergence_trend << "\n";
  err << "warning: regularity conditions are finite-horizon trends, not certified\n";
  return 0;
}

int cmd_curvature(const Common& c, const CurvatureOptions& base, const std::string& format, std::ostream& out,
                  std::ostream& err) {
  const OperatorTuple t = OperatorTuple::from_file(c.input, c.tol);
  CurvatureOptions opt = base;
  opt.horizons = horizons_of(c);
  opt.tol = c.tol;
  const Analysis an = analyze(t, kernel_for_tuple(c, t), opt);
  if (format == "csv") {
    out << to_csv(an.report);
  } else {
    out << to_json(an.report).dump(2) << "\n";
  }
  if (!an.report.verdict.ok) {
    err << "error: " << error_name(ErrorCode::ReconcileFailure) << ": " << disagreement(an.report.verdict) << "\n";
    return exit_code(ErrorCode::ReconcileFailure);
  }
  return 0;
}

int cmd_theta(const Common& c, const std::string& point, std::optional<int> taylor_n, std::ostream& out) {
  const OperatorTuple t = OperatorTuple::from_file(c.input, c.tol);
  if (point.empty() && !taylor_n) throw Error(ErrorCode::Input, "theta needs --point and/or --taylor");
  const ResolvedHorizons h = resolve_horizons(t, horizons_of(c));
  const int N_theta = taylor_n.value_or(0);
  const int N_op = std::max(h.N_op, N_theta);
  const KernelSpec k = kernel_for(make_kernel(c.kernel, t.d(), N_op, c.tol), N_op);
  const DefectPackage pkg = defect_package(t, k, N_op, c.tol);
  json result;
  if (!point.empty()) {
    const ThetaEvaluator ev(pkg, c.tol);
    result["evaluation"] = to_json(ev.evaluate(parse_point(point, t.d())));
  }
  if (taylor_n) {
    const CharacteristicSeries s = taylor(pkg, k, *taylor_n, c.tol);
    json coeffs = json::array();
    for (std::size_t g = 0; g < s.count(); ++g) {
      coeffs.push_back({{"gamma", s.index()[g].entries()}, {"matrix", matrix_json(s.coefficient(g))}});
    }
    result["taylor"] = coeffs;
  }
  out << result.dump() << "\n";
  return 0;
}

int cmd_traces(const Common& c, std::ostream& out) {
  const OperatorTuple t = OperatorTuple::from_file(c.input, c.tol);
  const ResolvedHorizons h = resolve_horizons(t, horizons_of(c));
  const KernelSpec k = kernel_for_tuple(c, t);
  const DefectPackage pkg = defect_package(t, k, h.N_op, c.tol);
  const CharacteristicSeries s = taylor(pkg, k, h.N_theta, c.tol);
  const auto rows = theta_trace_rows(trace_dpsi_series(s, k), s, k, h.n_max);
  out << "n,trace_E,trace_E/q_{d-1},trace_P/q_d,dpsi_partial\n";
  for (const auto& r : rows) {
    out << r.n << "," << fmt17(r.tE) << "," << fmt17(r.tE_normalized) << "," << fmt17(r.tP_normalized) << ","
        << fmt17(r.dpsi_partial) << "\n";
  }
  return 0;
}

int cmd_fd(const Common& c, FdOptions opt, std::ostream& out) {
  const OperatorTuple t = OperatorTuple::from_file(c.input, c.tol);
  opt.horizons = horizons_of(c);
  opt.tol = c.tol;
  out << to_json(fibre_dimension(t, kernel_for_tuple(c, t), opt)).dump(2) << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curvature invariant of commuting tuples for unitarily invariant CNP kernels", "cnpcurv"};
  app.require_subcommand(1);

  int d_max = 3, n_max = 8;
  KernelArgs id_kernel;
  Tolerances id_tol;
  auto* identities = app.add_subcommand("identities", "exact identity battery");
  identities->add_option("--d-max", d_max);
  identities->add_option("--n-max", n_max);
  identities->add_option("--kernel-file", id_kernel.file, "also check this custom kernel");

  KernelArgs k_kernel;
  int k_d = 1, k_n = 10;
  Tolerances k_tol;
  auto* kernel = app.add_subcommand("kernel", "a, b, weights and regularity as CSV");
  add_kernel(kernel, k_kernel);
  kernel->add_option("--n", k_n, "horizon");
  kernel->add_option("--d", k_d, "number of variables");
  kernel->add_option("--eps-cnp", k_tol.eps_cnp);

  Common cc;
  CurvatureOptions copt;
  std::string format = "json";
  auto* curvature = app.add_subcommand("curvature", "full curvature report");
  add_common(curvature, cc);
  add_horizons(curvature, cc);
  curvature->add_option("--radius", copt.radius)->check(CLI::Range(0.0, 1.0));
  curvature->add_option("--samples", copt.samples)->check(CLI::PositiveNumber);
  curvature->add_option("--seed", copt.seed);
  curvature->add_option("--fd-samples", copt.fd_samples);
  curvature->add_option("--fd-radius", copt.fd_radius)->check(CLI::Range(0.0, 1.0));
  curvature->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  Common tc;
  std::string point;
  std::optional<int> taylor_n;
  auto* theta = app.add_subcommand("theta", "evaluate the characteristic function");
  add_common(theta, tc);
  theta->add_option("--horizon", tc.horizon, "operator horizon N_op");
  theta->add_option("--point", point, "comma separated coordinates, e.g. \"0.3,0.1+0.2i\"");
  theta->add_option("--taylor", taylor_n, "dump Taylor coefficients up to this degree");

  Common rc;
  auto* traces = app.add_subcommand("traces", "graded traces of M_theta M_theta* as CSV");
  add_common(traces, rc);
  add_horizons(traces, rc);

  Common fc;
  FdOptions fopt;
  auto* fd = app.add_subcommand("fd", "fibre dimension report");
  add_common(fd, fc);
  add_horizons(fd, fc);
  fd->add_option("--samples", fopt.samples);
  fd->add_option("--radius", fopt.radius)->check(CLI::Range(0.0, 1.0));
  fd->add_option("--seed", fopt.seed);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    if (code == 0) return 0;
    err << "error: " << error_name(ErrorCode::Input) << ": " << e.what() << "\n";
    return exit_code(ErrorCode::Input);
  }

  try {
    if (identities->parsed()) return cmd_identities(d_max, n_max, id_kernel, id_tol, out, err);
    if (kernel->parsed()) return cmd_kernel(k_kernel, k_d, k_n, k_tol, out, err);
    if (curvature->parsed()) {
      apply_runtime(cc);
      return cmd_curvature(cc, copt, format, out, err);
    }
    if (theta->parsed()) {
      apply_runtime(tc);
      return cmd_theta(tc, point, taylor_n, out);
    }
    if (traces->parsed()) {
      apply_runtime(rc);
      return cmd_traces(rc, out);
    }
    if (fd->parsed()) {
      apply_runtime(fc);
      return cmd_fd(fc, fopt, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << error_name(ErrorCode::Input) << ": " << e.what() << "\n";
    return exit_code(ErrorCode::Input);
  }
  return 0;
}

}  // namespace cnpcurv::cli

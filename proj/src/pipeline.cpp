#include "cnpcurv/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cnpcurv/errors.hpp"

namespace cnpcurv {

using json = nlohmann::ordered_json;

ResolvedHorizons resolve_horizons(const OperatorTuple& t, const Horizons& h) {
  ResolvedHorizons r;
  r.nilpotency = nilpotency_degree(t);
  const int floor_theta = r.nilpotency ? std::max(2 * *r.nilpotency - 2, 1) : 1;
  r.N_theta = h.N_theta.value_or(std::max(12, floor_theta));
  if (h.N_op) {
    r.N_op = *h.N_op;
  } else {
    r.N_op = r.nilpotency ? std::max(*r.nilpotency - 1, r.N_theta) : std::max(12, r.N_theta);
  }
  r.n_max = h.n_max.value_or(r.N_theta);
  if (r.N_op < 1 || r.N_theta < 1 || r.n_max < 0) throw Error(ErrorCode::Input, "horizons must be at least 1");
  return r;
}

KernelSpec kernel_for(const KernelSpec& k, int horizon) {
  return k.horizon() == horizon ? k : k.with_horizon(horizon);
}

Analysis analyze(const OperatorTuple& t, const KernelSpec& kernel, const CurvatureOptions& opt) {
  const ResolvedHorizons h = resolve_horizons(t, opt.horizons);
  Analysis an{kernel_for(kernel, std::max({h.N_op, h.N_theta, h.n_max})), nullptr, nullptr, {}, {}};
  an.pkg = std::make_unique<DefectPackage>(defect_package(t, an.kernel, h.N_op, opt.tol));
  const DefectPackage& pkg = *an.pkg;
  an.purity = purity(pkg, opt.tol);
  an.series = std::make_unique<CharacteristicSeries>(taylor(pkg, an.kernel, h.N_theta, opt.tol));
  const CharacteristicSeries& series = *an.series;

  CurvatureReport& r = an.report;
  r.kernel_fingerprint = an.kernel.fingerprint();
  r.d = pkg.d;
  r.dimH = pkg.dimH;
  r.N_op = h.N_op;
  r.N_theta = h.N_theta;
  r.n_max = h.n_max;
  r.dim_ran_delta = pkg.rank_delta;
  r.rank_d = pkg.rank_d;
  r.lambda_max = pkg.lambda_max;
  r.tail_bound = pkg.tail_bound;
  r.nilpotency = pkg.nil_degree;
  r.delta_identity_residual = pkg.delta_identity_residual();
  r.intertwining_residual = pkg.intertwining_residual();
  r.purity_residual = an.purity.residual;
  r.pure = an.purity.pure;
  r.purity_exact = an.purity.exact;
  r.is_polynomial = series.is_polynomial();
  r.polynomial_degree = series.degree();

  r.dpsi = trace_dpsi_series(series, an.kernel);
  r.K_series = pkg.rank_delta - r.dpsi.partial;
  if (r.dpsi.is_complete()) r.K_series_completed = pkg.rank_delta - r.dpsi.completed();
  r.rows = theta_trace_rows(r.dpsi, series, an.kernel, h.n_max);
  r.K_weighted = curvature_weighted(pkg, r.rows);

  const ThetaEvaluator ev(pkg, opt.tol);
  r.integral = curvature_integral(pkg, ev, opt.radius, opt.samples, opt.seed);
  r.K_integral = r.integral.estimate;

  const EvaluationRank fd = fd_by_evaluation(pkg, an.kernel, opt.fd_samples, opt.fd_radius, opt.seed, r.pure, opt.tol);
  r.fd_eval = fd.fd;
  r.fd_label = fd.label;
  if (r.pure) {
    const PureCurvature pc = curvature_pure(pkg, an.purity, r.K_series_best(), fd.fd, opt.tol);
    r.K_pure = pc.K;
    r.integer_mismatch = pc.integer_mismatch;
  }
  r.verdict = assess(r, an.kernel);
  return an;
}

FibreDimReport fibre_dimension(const OperatorTuple& t, const KernelSpec& kernel, const FdOptions& opt) {
  const ResolvedHorizons h = resolve_horizons(t, opt.horizons);
  const KernelSpec k = kernel_for(kernel, std::max({h.N_op, h.N_theta, h.n_max}));
  const DefectPackage pkg = defect_package(t, k, h.N_op, opt.tol);
  const PurityReport pr = purity(pkg, opt.tol);
  const CharacteristicSeries series = taylor(pkg, k, h.N_theta, opt.tol);
  FibreDimReport out;
  out.evaluation = fd_by_evaluation(pkg, k, opt.samples, opt.radius, opt.seed, pr.pure, opt.tol);
  out.grading = fd_by_grading(series, k, h.n_max, opt.tol);
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json matrix_json(const cmat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

json vector_json(const cvec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json to_json(const PointEvaluation& e) {
  json sv = json::array();
  for (Eigen::Index i = 0; i < e.singular_values.size(); ++i) sv.push_back(e.singular_values(i));
  return {{"z", vector_json(e.z)},
          {"theta", matrix_json(e.theta)},
          {"singular_values", sv},
          {"trace_theta_theta_star", e.trace_tt},
          {"rank", e.rank},
          {"condition", e.condition}};
}

json to_json(const CurvatureReport& r) {
  json rows = json::array();
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    const auto& o = r.verdict.ordering.at(i);
    rows.push_back({{"n", row.n},
                    {"trace_E", row.tE},
                    {"trace_E_normalized", row.tE_normalized},
                    {"trace_P_normalized", row.tP_normalized},
                    {"dpsi_partial", row.dpsi_partial},
                    {"K_weighted", r.K_weighted[i]},
                    {"first_ordering", o.first_holds},
                    {"second_ordering", o.second_holds},
                    {"conjecture_gap", o.conjecture_gap}});
  }
  json comparisons = json::array();
  for (const auto& c : r.verdict.comparisons) {
    comparisons.push_back(
        {{"first", c.first}, {"second", c.second}, {"difference", c.difference}, {"tolerance", c.tolerance}, {"ok", c.ok}});
  }
  return {
      {"kernel", r.kernel_fingerprint},
      {"d", r.d},
      {"dimH", r.dimH},
      {"horizons", {{"N_op", r.N_op}, {"N_theta", r.N_theta}, {"n_max", r.n_max}}},
      {"dim_ran_delta", r.dim_ran_delta},
      {"rank_d", r.rank_d},
      {"lambda_max", r.lambda_max},
      {"tail_bound", r.tail_bound},
      {"nilpotency", optional_json(r.nilpotency)},
      {"delta_identity_residual", r.delta_identity_residual},
      {"intertwining_residual", r.intertwining_residual},
      {"purity", {{"residual", r.purity_residual}, {"pure", r.pure}, {"exact", r.purity_exact}}},
      {"theta", {{"polynomial", r.is_polynomial}, {"degree", optional_json(r.polynomial_degree)}}},
      {"trace_dpsi_series",
       {{"per_degree", r.dpsi.per_degree},
        {"partial", r.dpsi.partial},
        {"tail", optional_json(r.dpsi.tail)},
        {"completed", r.dpsi.completed()}}},
      {"K_series", r.K_series},
      {"K_series_completed", optional_json(r.K_series_completed)},
      {"K_weighted", r.K_weighted.empty() ? json(nullptr) : json(r.K_weighted.back())},
      {"K_integral",
       {{"estimate", r.K_integral},
        {"stderr", r.integral.standard_error},
        {"radius", r.integral.radius},
        {"samples", r.integral.samples}}},
      {"fd", {{"value", r.fd_eval}, {"label", r.fd_label}}},
      {"K_pure", optional_json(r.K_pure)},
      {"integer_mismatch", r.integer_mismatch},
      {"verdict",
       {{"ok", r.verdict.ok},
        {"comparisons", comparisons},
        {"first_ordering_violations", r.verdict.first_ordering_violations},
        {"second_ordering_violations", r.verdict.second_ordering_violations},
        {"series_gap", r.verdict.series_gap},
        {"integral_gap", r.verdict.integral_gap},
        {"weighted_gap", r.verdict.weighted_gap}}},
      {"convergence", rows},
  };
}

json to_json(const FibreDimReport& r) {
  json samples = json::array();
  for (const auto& s : r.evaluation.samples) samples.push_back({{"z", vector_json(s.z)}, {"rank", s.rank}});
  json dims = json::array();
  for (const auto& g : r.grading.rows) {
    dims.push_back({{"n", g.n}, {"dim", g.dim}, {"q_d", g.q}, {"ratio", g.ratio}});
  }
  return {{"fd_eval", r.evaluation.fd},
          {"label", r.evaluation.label},
          {"attain_fraction", r.evaluation.attain_fraction},
          {"rank_samples", samples},
          {"graded_dims", dims},
          {"fd_graded_trend", {{"last", r.grading.last}, {"slope", r.grading.slope}}}};
}

std::string to_csv(const CurvatureReport& r) {
  std::ostringstream os;
  os << "# kernel," << r.kernel_fingerprint << "\n";
  os << "# dim_ran_delta," << r.dim_ran_delta << "\n";
  os << "# trace_dpsi_series," << fmt17(r.dpsi.partial) << "\n";
  if (r.dpsi.tail) os << "# trace_dpsi_completed," << fmt17(r.dpsi.completed()) << "\n";
  os << "# K_series," << fmt17(r.K_series) << "\n";
  if (r.K_series_completed) os << "# K_series_completed," << fmt17(*r.K_series_completed) << "\n";
  os << "# K_integral," << fmt17(r.K_integral) << "," << fmt17(r.integral.standard_error) << "\n";
  os << "# fd," << r.fd_eval << "," << r.fd_label << "\n";
  if (r.K_pure) os << "# K_pure," << *r.K_pure << "\n";
  os << "# verdict," << (r.verdict.ok ? "ok" : "fail") << "\n";
  os << "n,trace_E,trace_E/q_{d-1},trace_P/q_d,dpsi_partial,K_weighted,first_ordering,second_ordering,conjecture_gap\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    const auto& o = r.verdict.ordering.at(i);
    os << row.n << "," << fmt17(row.tE) << "," << fmt17(row.tE_normalized) << "," << fmt17(row.tP_normalized) << ","
       << fmt17(row.dpsi_partial) << "," << fmt17(r.K_weighted[i]) << "," << o.first_holds << "," << o.second_holds
       << "," << fmt17(o.conjecture_gap) << "\n";
  }
  return os.str();
}

}  // namespace cnpcurv

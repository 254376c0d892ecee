#include "cnpcurv/tuple.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cnpcurv/errors.hpp"

namespace cnpcurv {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

cplx parse_entry(const nlohmann::json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  throw Error(ErrorCode::Input, "matrix entries must be numbers or [re, im] pairs");
}

}  // namespace

OperatorTuple OperatorTuple::load(std::vector<cmat> ops, const Tolerances& tol) {
  if (ops.empty()) throw Error(ErrorCode::Shape, "tuple needs d >= 1 operators");
  const Eigen::Index n = ops.front().rows();
  if (n < 1) throw Error(ErrorCode::Shape, "operators must be at least 1x1");
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].rows() != n || ops[i].cols() != n) {
      throw Error(ErrorCode::Shape, "operator " + std::to_string(i + 1) + " is " + std::to_string(ops[i].rows()) + "x" +
                                        std::to_string(ops[i].cols()) + ", expected " + std::to_string(n) + "x" +
                                        std::to_string(n));
    }
    if (!ops[i].allFinite()) throw Error(ErrorCode::Input, "operator " + std::to_string(i + 1) + " has non-finite entries");
  }
  OperatorTuple t;
  t.ops_ = std::move(ops);
  for (const auto& op : t.ops_) {
    const double s = spectral_norm(op);
    t.max_norm_ = std::max(t.max_norm_, s);
    t.norm_sq_sum_ += s * s;
  }
  for (std::size_t i = 0; i < t.ops_.size(); ++i) {
    for (std::size_t j = i + 1; j < t.ops_.size(); ++j) {
      const cmat c = t.ops_[i] * t.ops_[j] - t.ops_[j] * t.ops_[i];
      t.commutator_residual_ = std::max(t.commutator_residual_, spectral_norm(c));
    }
  }
  const double eps = tol.eps_comm * t.max_norm_ * t.max_norm_;
  if (t.commutator_residual_ > eps) {
    throw Error(ErrorCode::Commutator, "max ||T_iT_j - T_jT_i|| = " + fmt(t.commutator_residual_) + " exceeds " + fmt(eps));
  }
  return t;
}

OperatorTuple OperatorTuple::from_json(const nlohmann::json& j, const Tolerances& tol) {
  if (!j.is_object() || !j.contains("operators") || !j["operators"].is_array()) {
    throw Error(ErrorCode::Input, "tuple JSON needs an \"operators\" array");
  }
  const auto& arr = j["operators"];
  if (j.contains("d") && j["d"].get<std::size_t>() != arr.size()) {
    throw Error(ErrorCode::Shape, "\"d\" = " + std::to_string(j["d"].get<int>()) + " but " + std::to_string(arr.size()) +
                                      " operators given");
  }
  std::vector<cmat> ops;
  for (const auto& m : arr) {
    if (!m.is_array() || m.empty()) throw Error(ErrorCode::Shape, "each operator must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(m.size());
    if (!m[0].is_array()) throw Error(ErrorCode::Shape, "each operator row must be an array");
    const auto cols = static_cast<Eigen::Index>(m[0].size());
    cmat op(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto& row = m[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
        throw Error(ErrorCode::Shape, "ragged operator rows");
      }
      for (Eigen::Index c = 0; c < cols; ++c) op(r, c) = parse_entry(row[static_cast<std::size_t>(c)]);
    }
    ops.push_back(std::move(op));
  }
  if (j.contains("dimH") && !ops.empty() && j["dimH"].get<Eigen::Index>() != ops.front().rows()) {
    throw Error(ErrorCode::Shape, "\"dimH\" does not match operator size");
  }
  return load(std::move(ops), tol);
}

OperatorTuple OperatorTuple::from_file(const std::string& path, const Tolerances& tol) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Input, "cannot open tuple file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Input, std::string("tuple file is not valid JSON: ") + e.what());
  }
  return from_json(j, tol);
}

nlohmann::json OperatorTuple::to_json() const {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : ops_) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < op.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < op.cols(); ++c) row.push_back({op(r, c).real(), op(r, c).imag()});
      rows.push_back(std::move(row));
    }
    ops.push_back(std::move(rows));
  }
  return {{"d", d()}, {"dimH", dim()}, {"operators", std::move(ops)}};
}

cmat OperatorTuple::power(const MultiIndex& alpha) const {
  if (alpha.dim() != d()) throw Error(ErrorCode::Shape, "multi-index length differs from d");
  cmat p = cmat::Identity(dim(), dim());
  for (int i = 0; i < d(); ++i) {
    for (int e = 0; e < alpha[i]; ++e) p = op(i) * p;
  }
  return p;
}

std::optional<int> nilpotency_degree(const OperatorTuple& t) {
  const IndexTable index(t.d(), t.dim());
  const std::vector<cmat> powers = power_table(t, index, std::nullopt);
  const double scale = std::max(1.0, t.max_norm());
  for (int m = 1; m <= t.dim(); ++m) {
    const double cut = 1e-12 * std::pow(scale, m);
    bool all_zero = true;
    for (std::size_t p = index.degree_begin(m); p < index.degree_end(m) && all_zero; ++p) {
      if (std::sqrt(frob_sq(powers[p])) > cut) all_zero = false;
    }
    if (all_zero) return m;
  }
  return std::nullopt;
}

std::vector<cmat> power_table(const OperatorTuple& t, const IndexTable& index, std::optional<int> nil_degree) {
  const int n = t.dim();
  std::vector<cmat> powers(index.size());
  powers[0] = cmat::Identity(n, n);
  for (std::size_t p = 1; p < index.size(); ++p) {
    const MultiIndex& a = index[p];
    if (nil_degree && a.degree() >= *nil_degree) {
      powers[p] = cmat::Zero(n, n);
      continue;
    }
    int i = 0;
    while (a[i] == 0) ++i;
    const std::size_t prev = index.find(a - MultiIndex::unit(t.d(), i));
    powers[p] = t.op(i) * powers[prev];
  }
  return powers;
}

OperatorTuple conjugate_by_unitary(const OperatorTuple& t, const cmat& u, const Tolerances& tol) {
  if (u.rows() != t.dim() || u.cols() != t.dim()) throw Error(ErrorCode::Shape, "unitary has wrong size");
  const double res = (u.adjoint() * u - cmat::Identity(t.dim(), t.dim())).cwiseAbs().maxCoeff();
  if (res > tol.eps_id * 100.0) throw Error(ErrorCode::NotUnitary, "||U*U - I|| = " + fmt(res));
  std::vector<cmat> ops;
  for (const auto& op : t.ops()) ops.push_back(u * op * u.adjoint());
  return OperatorTuple::load(std::move(ops), tol);
}

DefectPackage defect_package(const OperatorTuple& t, const KernelSpec& k, int N_op, const Tolerances& tol) {
  if (k.d() != t.d()) {
    throw Error(ErrorCode::Shape, "kernel has d = " + std::to_string(k.d()) + ", tuple has d = " + std::to_string(t.d()));
  }
  if (N_op < 1) throw Error(ErrorCode::Input, "operator horizon must be >= 1");
  if (N_op > k.horizon()) {
    throw Error(ErrorCode::HorizonExceeded, "operator horizon " + std::to_string(N_op) + " beyond kernel horizon " +
                                                std::to_string(k.horizon()));
  }
  DefectPackage pkg;
  pkg.d = t.d();
  pkg.dimH = t.dim();
  pkg.N_op = N_op;
  pkg.nil_degree = nilpotency_degree(t);
  pkg.exact_truncation = pkg.nil_degree && *pkg.nil_degree - 1 <= N_op;
  pkg.index = IndexTable(t.d(), N_op, true);
  pkg.powers = power_table(t, pkg.index, pkg.nil_degree);

  const int n = pkg.dimH;
  const std::size_t count = pkg.index.size();
  pkg.b_alpha.assign(count, 0.0);
  pkg.a_alpha.assign(count, 0.0);
  pkg.block_of.assign(count, -1);
  for (std::size_t p = 0; p < count; ++p) {
    const int deg = pkg.index.degree(p);
    pkg.a_alpha[p] = k.a(deg) * pkg.index.multinomial(p);
    if (deg == 0) continue;
    pkg.b_alpha[p] = k.b_clamped(deg) * pkg.index.multinomial(p);
    if (pkg.b_alpha[p] > 0.0) {
      pkg.block_of[p] = static_cast<std::ptrdiff_t>(pkg.tilde.size());
      pkg.tilde.push_back(p);
    }
  }
  pkg.tilde_dim = static_cast<int>(pkg.tilde.size()) * n;

  pkg.S = cmat::Zero(n, n);
  for (std::size_t p : pkg.tilde) pkg.S += pkg.b_alpha[p] * pkg.powers[p] * pkg.powers[p].adjoint();
  pkg.lambda_max = hermitian_eigenvalues(pkg.S).maxCoeff();
  if (pkg.lambda_max > 1.0 + tol.eps_id) {
    throw Error(ErrorCode::NotContraction, "lambda_max(sum b_alpha T^alpha T^alpha*) = " + fmt(pkg.lambda_max) + " > 1");
  }

  if (pkg.exact_truncation) {
    pkg.tail_bound = 0.0;
  } else if (auto s = k.b_support(); s && *s <= N_op) {
    pkg.tail_bound = 0.0;
  } else {
    const double c = t.norm_sq_sum();
    const double residual = std::max(0.0, k.b_residual(N_op));
    if (residual == 0.0) {
      pkg.tail_bound = 0.0;
    } else if (c <= 1.0) {
      pkg.tail_bound = residual * std::pow(c, N_op + 1);
    } else {
      throw Error(ErrorCode::TailUnbounded, "sum ||T_i||^2 = " + fmt(c) + " > 1 gives no tail certificate at horizon " +
                                                std::to_string(N_op));
    }
  }

  const cmat tt = pkg.ttilde();
  Eigen::JacobiSVD<cmat> svd(tt, Eigen::ComputeFullU | Eigen::ComputeThinV);
  pkg.U = svd.matrixU();
  pkg.V1 = svd.matrixV();
  pkg.sigma = rvec::Zero(n);
  pkg.sigma.head(svd.singularValues().size()) = svd.singularValues();
  pkg.f = rvec::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double g = 1.0 - pkg.sigma(i) * pkg.sigma(i);
    pkg.f(i) = g <= tol.eps_rank ? 0.0 : std::sqrt(g);
  }
  pkg.Delta = pkg.U * pkg.f.asDiagonal() * pkg.U.adjoint();
  for (int i = 0; i < n; ++i) {
    if (pkg.f(i) > 0.0) {
      pkg.w_cols.push_back(i);
    } else {
      ++pkg.kernel_dirs;
    }
  }
  pkg.rank_delta = static_cast<int>(pkg.w_cols.size());
  pkg.W = cmat(n, pkg.rank_delta);
  for (int c = 0; c < pkg.rank_delta; ++c) pkg.W.col(c) = pkg.U.col(pkg.w_cols[static_cast<std::size_t>(c)]);
  pkg.rank_d = pkg.tilde_dim - pkg.kernel_dirs;
  return pkg;
}

cmat DefectPackage::ttilde() const {
  cmat tt = cmat::Zero(dimH, tilde_dim);
  for (std::size_t b = 0; b < tilde.size(); ++b) {
    const std::size_t p = tilde[b];
    tt.middleCols(static_cast<Eigen::Index>(b) * dimH, dimH) = std::sqrt(b_alpha[p]) * powers[p];
  }
  return tt;
}

cmat DefectPackage::dtilde() const {
  const rvec fm1 = f.array() - 1.0;
  return cmat::Identity(tilde_dim, tilde_dim) + V1 * fm1.asDiagonal() * V1.adjoint();
}

cmat DefectPackage::range_d_basis() const {
  if (kernel_dirs == 0) return cmat::Identity(tilde_dim, tilde_dim);
  cmat ker(tilde_dim, kernel_dirs);
  int c = 0;
  for (int i = 0; i < dimH; ++i) {
    if (f(i) == 0.0) ker.col(c++) = V1.col(i);
  }
  Eigen::HouseholderQR<cmat> qr(ker);
  const cmat q = qr.householderQ() * cmat::Identity(tilde_dim, tilde_dim);
  return q.rightCols(rank_d);
}

cmat DefectPackage::project_d_right(const cmat& x) const {
  cmat out = x;
  for (int i = 0; i < dimH; ++i) {
    if (f(i) == 0.0) out -= (x * V1.col(i)) * V1.col(i).adjoint();
  }
  return out;
}

double DefectPackage::delta_identity_residual() const {
  const cmat tt = ttilde();
  return spectral_norm(Delta * Delta + tt * tt.adjoint() - cmat::Identity(dimH, dimH));
}

double DefectPackage::intertwining_residual() const {
  const cmat tt = ttilde();
  const rvec fm1 = f.array() - 1.0;
  const cmat td = tt + (tt * V1) * fm1.asDiagonal() * V1.adjoint();
  return spectral_norm(td - Delta * tt);
}

PurityReport purity(const DefectPackage& pkg, const Tolerances& tol) {
  PurityReport r;
  const int n = pkg.dimH;
  const cmat d2 = pkg.Delta * pkg.Delta;
  r.P = cmat::Zero(n, n);
  for (std::size_t p = 0; p < pkg.index.size(); ++p) {
    if (pkg.nil_degree && pkg.index.degree(p) >= *pkg.nil_degree) break;
    r.P += pkg.a_alpha[p] * pkg.powers[p] * d2 * pkg.powers[p].adjoint();
  }
  r.residual = spectral_norm(cmat::Identity(n, n) - r.P);
  r.norm = spectral_norm(r.P);
  r.exact = pkg.exact_truncation;
  r.pure = r.residual <= tol.eps_pure;
  return r;
}

}  // namespace cnpcurv

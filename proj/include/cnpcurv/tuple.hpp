#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cnpcurv/config.hpp"
#include "cnpcurv/graded_index.hpp"
#include "cnpcurv/kernel.hpp"
#include "cnpcurv/linalg.hpp"

namespace cnpcurv {

class OperatorTuple {
 public:
  static OperatorTuple load(std::vector<cmat> ops, const Tolerances& tol = {});
  static OperatorTuple from_json(const nlohmann::json& j, const Tolerances& tol = {});
  static OperatorTuple from_file(const std::string& path, const Tolerances& tol = {});
  nlohmann::json to_json() const;

  int d() const noexcept { return static_cast<int>(ops_.size()); }
  int dim() const noexcept { return static_cast<int>(ops_.front().rows()); }
  const cmat& op(int i) const { return ops_[static_cast<std::size_t>(i)]; }
  const std::vector<cmat>& ops() const noexcept { return ops_; }

  double commutator_residual() const noexcept { return commutator_residual_; }
  double max_norm() const noexcept { return max_norm_; }
  // sum_i ||T_i||^2
  double norm_sq_sum() const noexcept { return norm_sq_sum_; }

  cmat power(const MultiIndex& alpha) const;

 private:
  std::vector<cmat> ops_;
  double commutator_residual_ = 0.0;
  double max_norm_ = 0.0;
  double norm_sq_sum_ = 0.0;
};

// Smallest m with T^alpha = 0 for every |alpha| = m, searched up to dim H.
std::optional<int> nilpotency_degree(const OperatorTuple& t);

OperatorTuple conjugate_by_unitary(const OperatorTuple& t, const cmat& u, const Tolerances& tol = {});

// T^alpha for every |alpha| <= N in table order. Powers of degree >= the
// nilpotency degree are stored as exact zeros.
std::vector<cmat> power_table(const OperatorTuple& t, const IndexTable& index, std::optional<int> nil_degree);

struct DefectPackage {
  int d = 0;
  int dimH = 0;
  int N_op = 0;
  IndexTable index;                  // all |alpha| <= N_op, with divisor lists
  std::vector<cmat> powers;          // T^alpha per index position
  std::vector<double> b_alpha;       // clamped b_alpha per index position (0 at alpha = 0)
  std::vector<double> a_alpha;       // a_alpha per index position
  std::vector<std::size_t> tilde;    // positions with 1 <= |alpha| <= N_op and b_alpha > 0
  std::vector<std::ptrdiff_t> block_of;  // index position -> tilde block, -1 if absent
  int tilde_dim = 0;

  cmat S;                            // sum b_alpha T^alpha T^alpha*
  double lambda_max = 0.0;

  // SVD of the block row T~ = U diag(sigma) V1*
  cmat U;
  rvec sigma;                        // length dimH
  rvec f;                            // sqrt(1 - sigma^2) with rank clamping
  cmat V1;                           // tilde_dim x dimH
  cmat Delta;
  int rank_delta = 0;
  cmat W;                            // orthonormal basis of Ran Delta
  std::vector<int> w_cols;           // columns of U kept in W
  int kernel_dirs = 0;               // directions where D~ vanishes
  int rank_d = 0;

  std::optional<int> nil_degree;
  bool exact_truncation = false;
  double tail_bound = 0.0;
  bool finite_rank_delta = true;     // automatic in finite dimensions

  cmat ttilde() const;               // dimH x tilde_dim
  cmat dtilde() const;               // tilde_dim x tilde_dim, dense
  cmat range_d_basis() const;        // tilde_dim x rank_d
  // X P_D for X with tilde_dim columns
  cmat project_d_right(const cmat& x) const;

  double delta_identity_residual() const;   // ||Delta^2 + T~T~* - I||
  double intertwining_residual() const;     // ||T~ D~ - Delta T~||
};

DefectPackage defect_package(const OperatorTuple& t, const KernelSpec& k, int N_op, const Tolerances& tol = {});

struct PurityReport {
  cmat P;
  double residual = 0.0;
  double norm = 0.0;
  bool exact = false;
  bool pure = false;
};

PurityReport purity(const DefectPackage& pkg, const Tolerances& tol = {});

}  // namespace cnpcurv

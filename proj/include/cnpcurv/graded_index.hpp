#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "cnpcurv/comb.hpp"

namespace cnpcurv {

// All multi-indices of degree <= max_degree in d variables, stored degree-major
// and lexicographically ascending inside each degree. Every graded vector or
// matrix in the library is laid out in this order.
class IndexTable {
 public:
  IndexTable() = default;
  IndexTable(int d, int max_degree, bool with_below = false);

  int d() const noexcept { return d_; }
  int max_degree() const noexcept { return max_degree_; }
  std::size_t size() const noexcept { return indices_.size(); }

  const MultiIndex& operator[](std::size_t pos) const { return indices_[pos]; }
  int degree(std::size_t pos) const { return indices_[pos].degree(); }

  std::size_t degree_begin(int n) const { return starts_[static_cast<std::size_t>(n)]; }
  std::size_t degree_end(int n) const { return starts_[static_cast<std::size_t>(n) + 1]; }

  // npos when absent or beyond max_degree
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t find(const MultiIndex& a) const;

  // binom(|alpha|, alpha) as a double
  double multinomial(std::size_t pos) const { return multinomials_[pos]; }

  // Pairs (pos of alpha, pos of gamma - alpha) over all alpha <= gamma,
  // alpha in ascending table order. Needs construction with with_below.
  const std::vector<std::pair<std::size_t, std::size_t>>& below(std::size_t gamma_pos) const;

  // pos of alpha + beta, npos when the sum exceeds max_degree
  std::size_t add(std::size_t alpha_pos, std::size_t beta_pos) const;

 private:
  int d_ = 0;
  int max_degree_ = -1;
  std::vector<MultiIndex> indices_;
  std::vector<std::size_t> starts_;
  std::vector<double> multinomials_;
  std::map<std::vector<int>, std::size_t> lookup_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> below_;
};

}  // namespace cnpcurv

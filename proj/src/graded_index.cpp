#include "cnpcurv/graded_index.hpp"

#include <algorithm>

#include "cnpcurv/errors.hpp"

namespace cnpcurv {

IndexTable::IndexTable(int d, int max_degree, bool with_below) : d_(d), max_degree_(max_degree) {
  if (d < 1) throw Error(ErrorCode::Input, "index table needs d >= 1");
  if (max_degree < 0) throw Error(ErrorCode::Input, "index table needs max_degree >= 0");
  starts_.push_back(0);
  for (int n = 0; n <= max_degree; ++n) {
    for (auto& a : enumerate_degree(d, n)) {
      lookup_.emplace(a.entries(), indices_.size());
      multinomials_.push_back(cnpcurv::multinomial(a).convert_to<double>());
      indices_.push_back(std::move(a));
    }
    starts_.push_back(indices_.size());
  }
  if (!with_below) return;
  below_.resize(indices_.size());
  for (std::size_t pos = 0; pos < indices_.size(); ++pos) {
    const MultiIndex& g = indices_[pos];
    auto& out = below_[pos];
    std::vector<int> a(static_cast<std::size_t>(d_), 0);
    for (;;) {
      MultiIndex alpha(a);
      out.emplace_back(find(alpha), find(g - alpha));
      int i = d_ - 1;
      while (i >= 0 && a[static_cast<std::size_t>(i)] == g[i]) {
        a[static_cast<std::size_t>(i)] = 0;
        --i;
      }
      if (i < 0) break;
      ++a[static_cast<std::size_t>(i)];
    }
    std::sort(out.begin(), out.end());
  }
}

std::size_t IndexTable::find(const MultiIndex& a) const {
  if (a.dim() != d_ || a.degree() > max_degree_) return npos;
  auto it = lookup_.find(a.entries());
  return it == lookup_.end() ? npos : it->second;
}

std::size_t IndexTable::add(std::size_t alpha_pos, std::size_t beta_pos) const {
  return find(indices_[alpha_pos] + indices_[beta_pos]);
}

const std::vector<std::pair<std::size_t, std::size_t>>& IndexTable::below(std::size_t gamma_pos) const {
  if (below_.empty()) throw Error(ErrorCode::Input, "index table built without divisor lists");
  return below_[gamma_pos];
}

}  // namespace cnpcurv

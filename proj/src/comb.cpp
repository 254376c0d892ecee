#include "cnpcurv/comb.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cnpcurv/errors.hpp"

namespace cnpcurv {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_) {
    if (e < 0) throw Error(ErrorCode::Input, "negative multi-index entry");
  }
  degree_ = std::accumulate(entries_.begin(), entries_.end(), 0);
}

MultiIndex::MultiIndex(std::initializer_list<int> entries)
    : MultiIndex(std::vector<int>(entries)) {}

MultiIndex MultiIndex::zero(int d) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(d), 0)); }

MultiIndex MultiIndex::unit(int d, int i) {
  std::vector<int> e(static_cast<std::size_t>(d), 0);
  e[static_cast<std::size_t>(i)] = 1;
  return MultiIndex(std::move(e));
}

bool MultiIndex::leq(const MultiIndex& other) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i] > other.entries_[i]) return false;
  }
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  std::vector<int> e(entries_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.entries_[i];
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  std::vector<int> e(entries_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= other.entries_[i];
  return MultiIndex(std::move(e));
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex& other) const {
  return entries_ <=> other.entries_;
}

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const MultiIndex& a) {
  os << '(';
  for (int i = 0; i < a.dim(); ++i) os << (i ? "," : "") << a[i];
  return os << ')';
}

namespace {

void fill_degree(int d, int remaining, std::vector<int>& prefix, std::vector<MultiIndex>& out) {
  if (static_cast<int>(prefix.size()) == d - 1) {
    prefix.push_back(remaining);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    prefix.push_back(k);
    fill_degree(d, remaining - k, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<MultiIndex> enumerate_degree(int d, int n) {
  if (d < 1 || n < 0) throw Error(ErrorCode::Input, "enumerate_degree needs d >= 1 and n >= 0");
  std::vector<MultiIndex> out;
  std::vector<int> prefix;
  prefix.reserve(static_cast<std::size_t>(d));
  fill_degree(d, n, prefix, out);
  return out;
}

BigInt factorial(int n) {
  BigInt r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

BigInt multinomial(const MultiIndex& a) {
  BigInt r = 1;
  int running = 0;
  for (int e : a.entries()) {
    running += e;
    r *= binomial(running, e);
  }
  return r;
}

BigInt q(int m, int n) {
  if (m < 0 || n < 0) throw Error(ErrorCode::Input, "q needs non-negative arguments");
  return binomial(m + n, m);
}

Id2Result verify_id2(int d, int n, const MultiIndex& beta) {
  if (beta.dim() != d) throw Error(ErrorCode::Shape, "beta has wrong length");
  if (beta.degree() > n) {
    throw Error(ErrorCode::IndexDegree,
                "|beta| = " + std::to_string(beta.degree()) + " exceeds n = " + std::to_string(n));
  }
  Id2Result r;
  const BigInt mb = multinomial(beta);
  for (const auto& alpha : enumerate_degree(d, n - beta.degree())) {
    r.lhs += Rational(multinomial(alpha) * mb, multinomial(alpha + beta));
  }
  r.rhs = Rational(q(d - 1, n), q(d - 1, beta.degree()));
  r.equal = (r.lhs == r.rhs);
  return r;
}

}  // namespace cnpcurv

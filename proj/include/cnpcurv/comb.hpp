#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cnpcurv {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);
  MultiIndex(std::initializer_list<int> entries);

  static MultiIndex zero(int d);
  static MultiIndex unit(int d, int i);

  int dim() const noexcept { return static_cast<int>(entries_.size()); }
  int degree() const noexcept { return degree_; }
  int operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& entries() const noexcept { return entries_; }

  // componentwise order
  bool leq(const MultiIndex& other) const;

  MultiIndex operator+(const MultiIndex& other) const;
  // requires other.leq(*this)
  MultiIndex operator-(const MultiIndex& other) const;

  bool operator==(const MultiIndex& other) const { return entries_ == other.entries_; }
  // lexicographic on entries
  std::strong_ordering operator<=>(const MultiIndex& other) const;

  std::string str() const;

 private:
  std::vector<int> entries_;
  int degree_ = 0;
};

std::ostream& operator<<(std::ostream& os, const MultiIndex& a);

// All alpha with |alpha| = n, lexicographically ascending.
std::vector<MultiIndex> enumerate_degree(int d, int n);

BigInt factorial(int n);
BigInt binomial(int n, int k);
BigInt multinomial(const MultiIndex& a);

// q_m(n) = binom(m + n, m)
BigInt q(int m, int n);

struct Id2Result {
  Rational lhs;
  Rational rhs;
  bool equal = false;
};

Id2Result verify_id2(int d, int n, const MultiIndex& beta);

}  // namespace cnpcurv

#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "idemsum/error.hpp"

namespace idemsum {

namespace detail {

// Reachability table for nonnegative combinations of the generators, with
// a predecessor index for reconstruction. Table size a_min * a_max + a_max
// safely covers the Frobenius number of a coprime set.
inline std::pair<std::vector<int>, int> semigroup_table(const std::vector<int> &a) {
  require(!a.empty(), Errc::EmptyList, "no generators");
  for (int v : a) require(v >= 1, Errc::NotCoprime, "generators must be positive");
  int g = 0;
  for (int v : a) g = std::gcd(g, v);
  require(g == 1, Errc::NotCoprime, "generators must be globally coprime");
  int amin = *std::min_element(a.begin(), a.end());
  int amax = *std::max_element(a.begin(), a.end());
  int limit = amin * amax + amax + 1;
  std::vector<int> pred(static_cast<std::size_t>(limit), -1);  // generator index used
  std::vector<char> reach(static_cast<std::size_t>(limit), 0);
  reach[0] = 1;
  for (int s = 1; s < limit; ++s)
    for (std::size_t i = 0; i < a.size(); ++i)
      if (s >= a[i] && reach[static_cast<std::size_t>(s - a[i])]) {
        reach[static_cast<std::size_t>(s)] = 1;
        pred[static_cast<std::size_t>(s)] = static_cast<int>(i);
        break;
      }
  return {std::move(pred), limit};
}

}  // namespace detail

// Least N such that every n >= N is a nonnegative combination of the
// generators (Frobenius number + 1; 0 when every n works).
inline int semigroup_frobenius(const std::vector<int> &a) {
  auto [pred, limit] = detail::semigroup_table(a);
  int last_gap = -1;
  for (int s = 1; s < limit; ++s)
    if (s != 0 && pred[static_cast<std::size_t>(s)] < 0) last_gap = s;
  return last_gap + 1;
}

// Coefficients b with sum b_i a_i = n, or NoRepresentation when n is a gap.
inline std::vector<int> semigroup_represent(const std::vector<int> &a, int n) {
  require(n >= 0, Errc::NoRepresentation, "negative target");
  auto [pred, limit] = detail::semigroup_table(a);
  std::vector<int> out(a.size(), 0);
  int s = n;
  if (n >= limit) {
    // peel multiples of the smallest generator down into the table
    std::size_t imin = 0;
    for (std::size_t i = 1; i < a.size(); ++i)
      if (a[i] < a[static_cast<std::size_t>(imin)]) imin = i;
    int step = a[imin];
    int k = (n - limit) / step + 1;
    out[imin] += k;
    s = n - k * step;
  }
  while (s > 0) {
    int i = pred[static_cast<std::size_t>(s)];
    require(i >= 0, Errc::NoRepresentation,
            "target is a gap of the numerical semigroup");
    ++out[static_cast<std::size_t>(i)];
    s -= a[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace idemsum

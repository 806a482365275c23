#pragma once

#include <random>
#include <vector>

#include "idemsum/canon.hpp"
#include "idemsum/factor.hpp"
#include "idemsum/matrix.hpp"

namespace testutil {

using namespace idemsum;

inline FieldPtr F2() {
  static FieldPtr f = FieldCtx::make(2, 1);
  return f;
}
inline FieldPtr F3() {
  static FieldPtr f = FieldCtx::make(3, 1);
  return f;
}
inline FieldPtr F5() {
  static FieldPtr f = FieldCtx::make(5, 1);
  return f;
}
inline FieldPtr F4() {
  static FieldPtr f = FieldCtx::make(2, 2);  // X^2 + X + 1
  return f;
}
inline FieldPtr F9() {
  static FieldPtr f = FieldCtx::make(3, 2);
  return f;
}

inline elem rand_elem(const FieldPtr &F, std::mt19937_64 &rng) {
  return static_cast<elem>(std::uniform_int_distribution<std::uint64_t>(0, F->q() - 1)(rng));
}

inline Mat rand_mat(const FieldPtr &F, int r, int c, std::mt19937_64 &rng) {
  Mat m(F, r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m.at(i, j) = rand_elem(F, rng);
  return m;
}

inline Mat rand_good_cyclic(const FieldPtr &F, int n, std::mt19937_64 &rng) {
  Mat m(F, n, n);
  for (int i = 1; i < n; ++i) m.at(i, i - 1) = 1;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.at(i, j) = rand_elem(F, rng);
  return m;
}

inline Poly rand_monic(const FieldPtr &F, int deg, std::mt19937_64 &rng) {
  std::vector<elem> c(static_cast<std::size_t>(deg) + 1);
  for (int i = 0; i < deg; ++i) c[static_cast<std::size_t>(i)] = rand_elem(F, rng);
  c[static_cast<std::size_t>(deg)] = 1;
  return Poly(F, std::move(c));
}

inline Mat rand_invertible(const FieldPtr &F, int n, std::mt19937_64 &rng) {
  for (;;) {
    Mat m = rand_mat(F, n, n, rng);
    if (rank(m) == n) return m;
  }
}

// Polynomial from integer coefficient list (little-endian), mapped through
// from_int so small negative literals read naturally.
inline Poly P(const FieldPtr &F, std::initializer_list<std::int64_t> coeffs) {
  std::vector<elem> c;
  for (auto v : coeffs) c.push_back(F->from_int(v));
  return Poly(F, std::move(c));
}

inline Mat M(const FieldPtr &F, std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  std::vector<std::vector<elem>> r;
  for (const auto &row : rows) {
    std::vector<elem> rr;
    for (auto v : row) rr.push_back(F->from_int(v));
    r.push_back(std::move(rr));
  }
  return Mat::from_rows(F, r);
}

}  // namespace testutil

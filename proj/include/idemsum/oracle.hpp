#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "idemsum/matrix.hpp"

namespace idemsum {

namespace detail {

// Mixed-radix packing of all entries, radix q. Invertible, unlike the
// FNV certificate digest.
inline std::uint64_t pack_mat(const Mat &A) {
  std::uint64_t key = 0;
  const std::uint64_t q = A.field()->q();
  for (std::size_t i = A.entries().size(); i-- > 0;) key = key * q + A.entries()[i];
  return key;
}

inline Mat unpack_mat(const FieldPtr &F, int n, std::uint64_t key) {
  Mat A(F, n, n);
  const std::uint64_t q = F->q();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      A.at(i, j) = static_cast<elem>(key % q);
      key /= q;
    }
  return A;
}

// State-space guard: n^2 * k * log2(p) bits, refused beyond 36, with a
// separate hard cap on the actual enumeration size.
inline std::uint64_t oracle_space(int n, const FieldPtr &F) {
  double bits = static_cast<double>(n) * n * F->k() * std::log2(static_cast<double>(F->p()));
  require(bits <= 36.0, Errc::BudgetExceeded,
          "state space exceeds the 36-bit oracle budget");
  std::uint64_t total = 1;
  for (int i = 0; i < n * n; ++i) {
    require(total <= (1ull << 22) / F->q(), Errc::BudgetExceeded,
            "state space exceeds the enumeration budget");
    total *= F->q();
  }
  return total;
}

}  // namespace detail

// Every idempotent of Mat_n(F), by exhaustive filtering of the packed
// state space.
inline std::vector<Mat> enumerate_idempotents(int n, const FieldPtr &F) {
  std::uint64_t total = detail::oracle_space(n, F);
  std::vector<Mat> out;
  for (std::uint64_t key = 0; key < total; ++key) {
    Mat A = detail::unpack_mat(F, n, key);
    if (A * A == A) out.push_back(std::move(A));
  }
  return out;
}

// Minimal-count table over the whole space: min_counts[key] is the least
// number of idempotents summing to the matrix packed as key, or -1 when no
// sum of at most cap idempotents reaches it.
struct OracleTable {
  FieldPtr field;
  int n = 0;
  int cap = 0;
  std::vector<int> min_counts;

  int count_of(const Mat &A) const { return min_counts[detail::pack_mat(A)]; }
};

inline OracleTable build_oracle_table(int n, const FieldPtr &F, int cap) {
  require(cap >= 0, Errc::CapTooLow, "negative cap");
  std::uint64_t total = detail::oracle_space(n, F);
  auto idems = enumerate_idempotents(n, F);
  std::vector<std::uint64_t> idem_keys;
  idem_keys.reserve(idems.size());
  for (const auto &Q : idems) idem_keys.push_back(detail::pack_mat(Q));
  OracleTable t{F, n, cap, std::vector<int>(total, -1)};
  // BFS layers from 0 over "add one idempotent" edges
  std::vector<std::uint64_t> frontier{0};
  t.min_counts[0] = 0;
  for (int layer = 1; layer <= cap && !frontier.empty(); ++layer) {
    std::vector<std::uint64_t> next;
    for (std::uint64_t key : frontier) {
      Mat S = detail::unpack_mat(F, n, key);
      for (const auto &Q : idems) {
        std::uint64_t nk = detail::pack_mat(S + Q);
        if (t.min_counts[nk] < 0) {
          t.min_counts[nk] = layer;
          next.push_back(nk);
        }
      }
    }
    frontier = std::move(next);
  }
  return t;
}

// Least m <= cap with A a sum of m idempotents; nothing when unreachable.
inline std::optional<int> min_idempotent_sum(const Mat &A, int cap) {
  require(A.is_square(), Errc::NotSquare, "oracle on a non-square matrix");
  OracleTable t = build_oracle_table(A.rows(), A.field(), cap);
  int c = t.count_of(A);
  if (c < 0) return std::nullopt;
  return c;
}

// Exact set {sum signs[i].Q_i : Q_i idempotent}, as packed keys.
inline std::unordered_set<std::uint64_t> composite_set(const std::vector<int> &signs, int n,
                                                       const FieldPtr &F) {
  detail::oracle_space(n, F);
  auto idems = enumerate_idempotents(n, F);
  std::unordered_set<std::uint64_t> cur{detail::pack_mat(Mat::zero(F, n, n))};
  for (int s : signs) {
    require(s == 1 || s == -1, Errc::MalformedInput, "signs must be +1 or -1");
    std::unordered_set<std::uint64_t> next;
    for (std::uint64_t key : cur) {
      Mat S = detail::unpack_mat(F, n, key);
      for (const auto &Q : idems)
        next.insert(detail::pack_mat(s > 0 ? S + Q : S - Q));
    }
    cur = std::move(next);
  }
  return cur;
}

// Empirical s_n: the maximum minimal count over all matrices with trace in
// the prime subfield.
inline int empirical_sn(int n, const FieldPtr &F, int cap) {
  OracleTable t = build_oracle_table(n, F, cap);
  int best = 0;
  for (std::uint64_t key = 0; key < t.min_counts.size(); ++key) {
    Mat A = detail::unpack_mat(F, n, key);
    if (!F->in_prime_subfield(A.trace())) continue;
    int c = t.min_counts[key];
    require(c >= 0, Errc::CapTooLow,
            "a trace-criterion matrix is unreachable within the cap");
    if (c > best) best = c;
  }
  return best;
}

}  // namespace idemsum

#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "idemsum/canon.hpp"

namespace idemsum {

// Eventually-zero nonincreasing sequence, 1-indexed; absent entries are 0.
struct NkSequence {
  std::vector<int> values;

  int at(int k) const {
    return (k >= 1 && k <= static_cast<int>(values.size()))
               ? values[static_cast<std::size_t>(k - 1)]
               : 0;
  }
  int len() const { return static_cast<int>(values.size()); }
};

enum class IntertwineMode { corrected, literal };

// literal mode evaluates the inequalities v_k <= u_{k+1}, u_k <= v_{k+1}
// as stated; corrected mode evaluates u_{k+1} <= v_k, v_{k+1} <= u_k, the
// reading calibrated against the brute-force oracle (the literal reading
// rejects diag(0,-1), which is an explicit difference of idempotents).
inline bool intertwined(const NkSequence &u, const NkSequence &v,
                        IntertwineMode mode = IntertwineMode::corrected) {
  int top = std::max(u.len(), v.len()) + 1;
  for (int k = 1; k <= top; ++k) {
    if (mode == IntertwineMode::corrected) {
      if (u.at(k + 1) > v.at(k) || v.at(k + 1) > u.at(k)) return false;
    } else {
      if (v.at(k) > u.at(k + 1) || u.at(k) > v.at(k + 1)) return false;
    }
  }
  return true;
}

// n_k sequence of a given irreducible factor within an eigenstructure;
// all-zero when the factor does not divide the characteristic polynomial.
inline NkSequence nk_of(const std::vector<EigStructure> &es, const Poly &f) {
  for (const auto &e : es)
    if (e.factor == f) return NkSequence{e.nk};
  return NkSequence{};
}

namespace detail {

// true when f is X - c
inline bool is_linear_root(const Poly &f, elem c) {
  return f.degree() == 1 && f == Poly::linear_root(f.field(), c);
}

inline bool even_blocks_only(const EigStructure &e) {
  for (int k = 1; k <= static_cast<int>(e.nk.size()); k += 2)
    if (e.blocks_of_size(k) != 0) return false;
  return true;
}

}  // namespace detail

// (1,-1)-composite decision. Characteristic != 2: corrected (or literal)
// intertwining of the n_k sequences at 1 and -1, plus, for every factor
// with roots outside {0,1,-1}, equality of its block data with that of its
// image under X -> -X. Characteristic 2: every block at a factor other
// than X and X+1 has even size.
inline bool decide_diff2(const Mat &A, IntertwineMode mode = IntertwineMode::corrected,
                         std::uint64_t seed = 0) {
  require(A.is_square(), Errc::NotSquare, "decision on a non-square matrix");
  const FieldPtr &F = A.field();
  auto es = eig_structure(A, seed);
  if (F->p() == 2) {
    for (const auto &e : es) {
      if (detail::is_linear_root(e.factor, 0) || detail::is_linear_root(e.factor, 1)) continue;
      if (!detail::even_blocks_only(e)) return false;
    }
    return true;
  }
  NkSequence u = nk_of(es, Poly::linear_root(F, 1));
  NkSequence v = nk_of(es, Poly::linear_root(F, F->neg(1)));
  if (!intertwined(u, v, mode)) return false;
  for (const auto &e : es) {
    if (detail::is_linear_root(e.factor, 0) || detail::is_linear_root(e.factor, 1) ||
        detail::is_linear_root(e.factor, F->neg(1)))
      continue;
    Poly g = substitute_linear(e.factor, F->neg(1), 0);
    if (nk_of(es, g).values != e.nk) return false;
  }
  return true;
}

// (1,1)-composite decision. Characteristic 2 delegates to decide_diff2;
// otherwise intertwining of n_k at 0 and 2 plus factor pairing under
// X -> 2 - X for factors with roots outside {0,1,2}.
inline bool decide_sum2(const Mat &A, IntertwineMode mode = IntertwineMode::corrected,
                        std::uint64_t seed = 0) {
  require(A.is_square(), Errc::NotSquare, "decision on a non-square matrix");
  const FieldPtr &F = A.field();
  if (F->p() == 2) return decide_diff2(A, mode, seed);
  auto es = eig_structure(A, seed);
  NkSequence u = nk_of(es, Poly::linear_root(F, 0));
  NkSequence v = nk_of(es, Poly::linear_root(F, 2 % F->p()));
  if (!intertwined(u, v, mode)) return false;
  for (const auto &e : es) {
    if (detail::is_linear_root(e.factor, 0) || detail::is_linear_root(e.factor, 1) ||
        detail::is_linear_root(e.factor, 2 % F->p()))
      continue;
    Poly g = substitute_linear(e.factor, F->neg(1), F->from_int(2));
    if (nk_of(es, g).values != e.nk) return false;
  }
  return true;
}

// Verified idempotent pair with Q1 - Q2 equal to some target.
struct DiffWitness {
  Mat Q1, Q2;
};

namespace detail {

inline DiffWitness checked_diff(const Mat &target, Mat Q1, Mat Q2) {
  require(Q1.is_idempotent() && Q2.is_idempotent() && Q1 - Q2 == target,
          Errc::GadgetVerificationFailed, "difference witness failed verification");
  return DiffWitness{std::move(Q1), std::move(Q2)};
}

// Closed-form pair for the upper shift J_m (1s on the superdiagonal):
// Q1 = sum_{odd i} (E_ii + E_{i,i+1}), Q2 = sum_{odd i} E_ii - sum_{even
// i < m} E_{i,i+1}, indices 1-based.
inline DiffWitness shift_block_pair(const FieldPtr &F, int m) {
  Mat J(F, m, m);
  for (int i = 0; i + 1 < m; ++i) J.at(i, i + 1) = 1;
  Mat Q1(F, m, m), Q2(F, m, m);
  for (int i = 0; i < m; ++i) {
    if (i % 2 == 0) {  // 1-based odd
      Q1.at(i, i) = 1;
      Q2.at(i, i) = 1;
      if (i + 1 < m) Q1.at(i, i + 1) = 1;
    } else if (i + 1 < m) {
      Q2.at(i, i + 1) = F->neg(1);
    }
  }
  return checked_diff(J, std::move(Q1), std::move(Q2));
}

}  // namespace detail

// Difference witness for a nilpotent matrix: canonical form is a direct
// sum of C(X^d) blocks, each handled by the transposed closed-form shift
// pair, then everything is conjugated back.
inline DiffWitness witness_nilpotent_diff(const Mat &N) {
  require(N.is_square(), Errc::NotSquare, "witness for a non-square matrix");
  const FieldPtr &F = N.field();
  const int n = N.rows();
  if (n == 0 || N.is_zero())
    return DiffWitness{Mat::zero(F, n, n), Mat::zero(F, n, n)};
  FrobeniusForm f = frobenius_form(N);
  for (const auto &g : f.invariant_factors)
    require(g == Poly::x_pow(F, g.degree()), Errc::NotNilpotent,
            "matrix is not nilpotent");
  Mat Q1(F, n, n), Q2(F, n, n);
  int off = 0;
  for (const auto &g : f.invariant_factors) {
    int d = g.degree();
    // C(X^d) is the transpose of the upper shift
    DiffWitness w = detail::shift_block_pair(F, d);
    Q1.set_block(off, off, w.Q1.transpose());
    Q2.set_block(off, off, w.Q2.transpose());
    off += d;
  }
  // N = S_inv * form * S, so conjugate the block witness the same way
  return detail::checked_diff(N, f.T.S_inv * Q1 * f.T.S, f.T.S_inv * Q2 * f.T.S);
}

// Gadget for M similar to J_a(1) + J_b(-1) (one block each) with a
// verified difference witness. Q1 = [[I_a, Y],[0,0]] and Q2 =
// [[0,0],[-X, I_b]] are idempotent for any X, Y; the shapes of X and Y
// select the required block sizes, verified through the canonical form.
inline std::pair<Mat, DiffWitness> witness_pm1_pair(const FieldPtr &F, int a, int b) {
  require(F->p() != 2, Errc::WrongCharacteristic,
          "use the nilpotent recipe on M - I in characteristic 2");
  require(a >= 0 && b >= 0 && a + b >= 1 && a - b <= 1 && b - a <= 1,
          Errc::SizeConstraintViolated, "block sizes must differ by at most 1");
  if (b > a) {
    auto [M, w] = witness_pm1_pair(F, b, a);
    return {-M, detail::checked_diff(-M, w.Q2, w.Q1)};
  }
  int n = a + b;
  Mat X(F, b, a), Y(F, a, b);
  if (a == b) {
    for (int i = 0; i < b; ++i) X.at(i, i) = 1;
    for (int i = 0; i + 1 < a; ++i) Y.at(i, i + 1) = 1;
  } else {  // a == b + 1
    for (int i = 0; i < b; ++i) X.at(i, i) = 1;
    for (int i = 0; i < b; ++i) Y.at(i + 1, i) = 1;
  }
  Mat Q1(F, n, n), Q2(F, n, n), M(F, n, n);
  Q1.set_block(0, 0, Mat::identity(F, a));
  Q1.set_block(0, a, Y);
  Q2.set_block(a, 0, -X);
  Q2.set_block(a, a, Mat::identity(F, b));
  M = Q1 - Q2;
  // expected class: cyclic with minimal polynomial (X-1)^a (X+1)^b
  Poly expect = Poly::one(F);
  for (int i = 0; i < a; ++i) expect = expect * Poly::linear_root(F, 1);
  for (int i = 0; i < b; ++i) expect = expect * Poly::linear_root(F, F->neg(1));
  auto inv = invariant_factors(M);
  require(inv.size() == 1 && inv[0] == expect, Errc::GadgetVerificationFailed,
          "pm1 gadget produced the wrong similarity class");
  return {M, detail::checked_diff(M, std::move(Q1), std::move(Q2))};
}

enum class WitnessFamily { nilpotent, pm1_blocks, scalar_pairs, sum2_shift };

namespace detail {

// Jordan block sizes at the linear factor X - c, descending.
inline std::vector<int> block_sizes_at(const std::vector<EigStructure> &es, elem c) {
  std::vector<int> out;
  for (const auto &e : es)
    if (is_linear_root(e.factor, c)) {
      for (int k = static_cast<int>(e.nk.size()); k >= 1; --k)
        for (int t = 0; t < e.blocks_of_size(k); ++t) out.push_back(k);
    }
  return out;
}

inline DecompCert diff_cert(const Mat &target, const DiffWitness &w, const std::string &name) {
  return make_cert(target, {1, -1}, {w.Q1, w.Q2}, name);
}

// Matrices whose factors lie in {X, X-1, X+1}: pair the blocks at 1 and
// -1 greedily by descending size, keep nilpotent blocks separate, build
// the model block-diagonal, then conjugate onto A.
inline DecompCert witness_pm1_blocks(const Mat &A) {
  const FieldPtr &F = A.field();
  auto es = eig_structure(A);
  const bool car2 = F->p() == 2;
  for (const auto &e : es) {
    bool ok = is_linear_root(e.factor, 0) || is_linear_root(e.factor, 1) ||
              (!car2 && is_linear_root(e.factor, F->neg(1)));
    require(ok, Errc::UnsupportedStructure,
            "pm1 family requires all eigenvalues in {0,1,-1}");
  }
  std::vector<Mat> blocks, q1s, q2s;
  auto push = [&](const Mat &M, const DiffWitness &w) {
    blocks.push_back(M);
    q1s.push_back(w.Q1);
    q2s.push_back(w.Q2);
  };
  for (int d : block_sizes_at(es, 0)) {
    Mat C = Mat::companion(Poly::x_pow(F, d));
    push(C, witness_nilpotent_diff(C));
  }
  if (car2) {
    // any structure at eigenvalue 1 works: J(1) = I + J(0) and I + Q is
    // idempotent in characteristic 2
    for (int d : block_sizes_at(es, 1)) {
      Mat N = Mat::companion(Poly::x_pow(F, d));
      DiffWitness w = witness_nilpotent_diff(N);
      Mat M = Mat::identity(F, d) + N;
      push(M, checked_diff(M, Mat::identity(F, d) + w.Q1, w.Q2));
    }
  } else {
    std::vector<int> ones = block_sizes_at(es, 1);
    std::vector<int> negs = block_sizes_at(es, F->neg(1));
    std::size_t m = std::max(ones.size(), negs.size());
    for (std::size_t i = 0; i < m; ++i) {
      int a = i < ones.size() ? ones[i] : 0;
      int b = i < negs.size() ? negs[i] : 0;
      require(a - b <= 1 && b - a <= 1, Errc::UnsupportedStructure,
              "block sizes at 1 and -1 are not pairable");
      auto [M, w] = witness_pm1_pair(F, a, b);
      push(M, w);
    }
  }
  require(!blocks.empty(), Errc::UnsupportedStructure, "empty matrix");
  Mat model = Mat::block_diag(blocks);
  Mat Q1 = Mat::zero(F, A.rows(), A.rows());
  Mat Q2 = Mat::zero(F, A.rows(), A.rows());
  int off = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    Q1.set_block(off, off, q1s[i]);
    Q2.set_block(off, off, q2s[i]);
    off += blocks[i].rows();
  }
  SimTransform T = similarity_witness(model, A);
  return diff_cert(A, checked_diff(A, conjugate(Q1, T), conjugate(Q2, T)), "witness:pm1");
}

// Diagonal matrices whose eigenvalue multiset is closed under negation,
// up to surplus entries in {0,1,-1}: 2x2 gadgets [[1,1],[l^2-1,-1]] for
// each pair (l,-l), singletons for the rest.
inline DecompCert witness_scalar_pairs(const Mat &A) {
  const FieldPtr &F = A.field();
  const int n = A.rows();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      require(i == j || A.at(i, j) == 0, Errc::UnsupportedStructure,
              "scalar-pair family takes a diagonal matrix");
  std::vector<int> count(static_cast<std::size_t>(F->q()), 0);
  for (int i = 0; i < n; ++i) ++count[A.at(i, i)];
  std::vector<Mat> blocks, q1s, q2s;
  auto push = [&](const Mat &M, const DiffWitness &w) {
    blocks.push_back(M);
    q1s.push_back(w.Q1);
    q2s.push_back(w.Q2);
  };
  const elem one = 1, mone = F->neg(1);
  for (elem l = 0; l < F->q(); ++l) {
    elem nl = F->neg(l);
    if (l == 0) {
      for (int t = 0; t < count[l]; ++t)
        push(Mat::zero(F, 1, 1), DiffWitness{Mat::zero(F, 1, 1), Mat::zero(F, 1, 1)});
      continue;
    }
    if (l == one || l == mone) continue;  // handled below
    if (nl < l || nl == l) continue;      // visit each pair once; l = -l impossible for l != 0 in odd char
    require(count[l] == count[nl], Errc::UnsupportedStructure,
            "eigenvalue multiset is not closed under negation");
    for (int t = 0; t < count[l]; ++t) {
      // [[1,1],[l^2-1,-1]] has trace 0 and determinant -l^2: similar to diag(l,-l)
      Mat Q1(F, 2, 2), Q2(F, 2, 2);
      Q1.at(0, 0) = 1;
      Q1.at(0, 1) = 1;
      Q2.at(1, 0) = F->neg(F->sub(F->mul(l, l), 1));
      Q2.at(1, 1) = 1;
      Mat M = Q1 - Q2;
      push(M, checked_diff(M, std::move(Q1), std::move(Q2)));
    }
  }
  if (F->p() != 2) {
    int r = count[one], s = count[mone];
    int paired = std::min(r, s);
    for (int t = 0; t < paired; ++t) {
      auto [M, w] = witness_pm1_pair(F, 1, 1);
      push(M, w);
    }
    for (int t = 0; t < r - paired; ++t)
      push(Mat::identity(F, 1), DiffWitness{Mat::identity(F, 1), Mat::zero(F, 1, 1)});
    for (int t = 0; t < s - paired; ++t)
      push(-Mat::identity(F, 1), DiffWitness{Mat::zero(F, 1, 1), Mat::identity(F, 1)});
  } else {
    for (int t = 0; t < count[one]; ++t)
      push(Mat::identity(F, 1), DiffWitness{Mat::identity(F, 1), Mat::zero(F, 1, 1)});
  }
  require(!blocks.empty(), Errc::UnsupportedStructure, "empty matrix");
  Mat model = Mat::block_diag(blocks);
  Mat Q1 = Mat::zero(F, n, n), Q2 = Mat::zero(F, n, n);
  int off = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    Q1.set_block(off, off, q1s[i]);
    Q2.set_block(off, off, q2s[i]);
    off += blocks[i].rows();
  }
  SimTransform T = similarity_witness(model, A);
  return diff_cert(A, checked_diff(A, conjugate(Q1, T), conjugate(Q2, T)),
                   "witness:scalar_pairs");
}

}  // namespace detail

// Constructive two-term certificates for the matrix families the
// decomposition pipelines rely on. Every certificate is verified before
// return; inputs outside the supported family raise UnsupportedStructure
// even when the two-idempotent decision would be positive.
inline DecompCert witness_family(const Mat &A, WitnessFamily family) {
  require(A.is_square(), Errc::NotSquare, "witness for a non-square matrix");
  switch (family) {
    case WitnessFamily::nilpotent:
      return detail::diff_cert(A, witness_nilpotent_diff(A), "witness:nilpotent");
    case WitnessFamily::pm1_blocks:
      return detail::witness_pm1_blocks(A);
    case WitnessFamily::scalar_pairs:
      return detail::witness_scalar_pairs(A);
    case WitnessFamily::sum2_shift: {
      // A = (I - Q2') + Q1' from a difference witness for A - I
      Mat B = A - Mat::identity(A.field(), A.rows());
      DecompCert diff;
      try {
        diff = detail::diff_cert(B, witness_nilpotent_diff(B), "witness:nilpotent");
      } catch (const Error &) {
        try {
          diff = detail::witness_pm1_blocks(B);
        } catch (const Error &) {
          diff = detail::witness_scalar_pairs(B);
        }
      }
      Mat Q1 = diff.parts[0], Q2 = diff.parts[1];
      return make_cert(A, {1, 1}, {Mat::identity(A.field(), A.rows()) - Q2, Q1},
                       "witness:sum2_shift");
    }
  }
  fail(Errc::Internal, "unknown witness family");
}

}  // namespace idemsum

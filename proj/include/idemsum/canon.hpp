#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "idemsum/cert.hpp"
#include "idemsum/factor.hpp"
#include "idemsum/matrix.hpp"

namespace idemsum {

// Invertible change of basis with cached inverse: S * A * S_inv is the
// conjugate of A in the new coordinates.
struct SimTransform {
  Mat S;
  Mat S_inv;
};

inline SimTransform make_transform(Mat S) {
  Mat Si = inverse(S);
  return SimTransform{std::move(S), std::move(Si)};
}

inline Mat conjugate(const Mat &A, const SimTransform &T) { return T.S * A * T.S_inv; }

struct FrobeniusForm {
  std::vector<Poly> invariant_factors;  // ascending divisibility chain
  SimTransform T;                       // T.S * A * T.S_inv = block diag of companions
  Mat form;                             // the companion block diagonal itself
};

namespace detail {

// Incremental column-space tracker. Keeps a reduced basis and, on demand,
// the expression of each basis vector over the vectors fed in so far.
class SpanTracker {
 public:
  explicit SpanTracker(FieldPtr f, int dim) : F_(std::move(f)), dim_(dim) {}

  int size() const { return static_cast<int>(basis_.size()); }

  // Reduce v against the basis. If independent, absorb it and return
  // nothing; otherwise return the combination coefficients over the
  // previously inserted vectors (in insertion order) expressing v.
  std::optional<std::vector<elem>> insert(const Mat &v) {
    Mat w = v;
    std::vector<elem> expr(static_cast<std::size_t>(count_), 0);
    for (std::size_t t = 0; t < basis_.size(); ++t) {
      elem c = w.at(pivot_[t], 0);
      if (c == 0) continue;
      w = w - basis_[t].scaled(c);
      for (std::size_t j = 0; j < expr_[t].size(); ++j)
        expr[j] = F_->add(expr[j], F_->mul(c, expr_[t][j]));
    }
    ++count_;
    if (w.is_zero()) return expr;
    int piv = -1;
    for (int i = 0; i < dim_; ++i)
      if (w.at(i, 0) != 0) {
        piv = i;
        break;
      }
    elem inv = F_->inv(w.at(piv, 0));
    Mat nb = w.scaled(inv);
    // w = v_new - sum expr_j v_j, so nb = inv*v_new - inv*expr_j v_j
    expr.resize(static_cast<std::size_t>(count_), 0);
    for (auto &c : expr) c = F_->neg(F_->mul(c, inv));
    expr[static_cast<std::size_t>(count_ - 1)] = inv;
    // keep the basis fully reduced: clear the new pivot from older vectors
    for (std::size_t t = 0; t < basis_.size(); ++t) {
      elem c = basis_[t].at(piv, 0);
      if (c == 0) continue;
      basis_[t] = basis_[t] - nb.scaled(c);
      expr_[t].resize(static_cast<std::size_t>(count_), 0);
      for (std::size_t j = 0; j < expr.size(); ++j)
        expr_[t][j] = F_->sub(expr_[t][j], F_->mul(c, expr[j]));
    }
    basis_.push_back(std::move(nb));
    pivot_.push_back(piv);
    expr_.push_back(std::move(expr));
    return std::nullopt;
  }

 private:
  FieldPtr F_;
  int dim_;
  int count_ = 0;                        // vectors fed in so far
  std::vector<Mat> basis_;               // reduced, pivot entry 1
  std::vector<int> pivot_;
  std::vector<std::vector<elem>> expr_;  // basis vector over inserted vectors
};

// Monic annihilator of v under A: the least-degree monic g with g(A)v = 0.
inline Poly vector_annihilator(const Mat &A, const Mat &v) {
  const FieldPtr &F = A.field();
  SpanTracker span(F, A.rows());
  Mat w = v;
  for (int d = 0; d <= A.rows(); ++d) {
    if (auto expr = span.insert(w)) {
      // A^d v = sum expr_i A^i v, so g = X^d - sum expr_i X^i kills v.
      std::vector<elem> c(static_cast<std::size_t>(d) + 1, 0);
      for (std::size_t i = 0; i < expr->size(); ++i) c[i] = F->neg((*expr)[i]);
      c[static_cast<std::size_t>(d)] = 1;
      return Poly(F, std::move(c));
    }
    w = A * w;
  }
  fail(Errc::Internal, "annihilator search exceeded the dimension");
}

// Vector whose annihilator is the minimal polynomial. Walks the standard
// basis, merging annihilators along a coprime split of the lcm.
inline std::pair<Mat, Poly> maximal_vector(const Mat &A) {
  const FieldPtr &F = A.field();
  const int n = A.rows();
  Mat w(F, n, 1);
  w.at(0, 0) = 1;
  Poly f = vector_annihilator(A, w);
  for (int i = 1; i < n && f.degree() < n; ++i) {
    Mat ei(F, n, 1);
    ei.at(i, 0) = 1;
    Poly g = vector_annihilator(A, ei);
    Poly l = lcm(f, g);
    if (l == f) continue;
    // split l = f1 * g1 with f1 | f, g1 | g, gcd(f1, g1) = 1
    std::map<Poly, std::pair<int, int>> mult;
    for (const auto &[h, e] : factor(f, 0)) mult[h].first = e;
    for (const auto &[h, e] : factor(g, 0)) mult[h].second = e;
    Poly f1 = Poly::one(F), g1 = Poly::one(F);
    for (const auto &[h, e] : mult) {
      Poly pw = Poly::one(F);
      for (int t = 0; t < std::max(e.first, e.second); ++t) pw = pw * h;
      if (e.first >= e.second)
        f1 = f1 * pw;
      else
        g1 = g1 * pw;
    }
    w = poly_apply(f / f1, A, w) + poly_apply(g / g1, A, ei);
    f = (f1 * g1).monic();
  }
  return {std::move(w), std::move(f)};
}

// Cyclic decomposition: generators u_j with ascending annihilator chain
// g_1 | g_2 | ... | g_m = minimal polynomial, V = direct sum of Z(u_j).
inline std::vector<std::pair<Mat, Poly>> cyclic_decomposition(const Mat &A) {
  const FieldPtr &F = A.field();
  const int n = A.rows();
  if (n == 0) return {};
  auto [w, mu] = maximal_vector(A);
  const int d = mu.degree();
  // basis: Krylov chain of w, then standard vectors to fill out
  Mat B(F, n, n);
  {
    Mat v = w;
    for (int j = 0; j < d; ++j) {
      B.set_block(0, j, v);
      v = A * v;
    }
    SpanTracker span(F, n);
    for (int j = 0; j < d; ++j) span.insert(B.submatrix(0, j, n, 1));
    int col = d;
    for (int i = 0; i < n && col < n; ++i) {
      Mat ei(F, n, 1);
      ei.at(i, 0) = 1;
      if (!span.insert(ei)) {
        B.set_block(0, col, ei);
        ++col;
      }
    }
    require(col == n, Errc::Internal, "failed to extend Krylov chain to a basis");
  }
  Mat Bi = inverse(B);
  Mat C = Bi * A * B;
  // the quotient action on V / Z(w) in the complementary coordinates
  Mat Aq = C.submatrix(d, d, n - d, n - d);
  std::vector<std::pair<Mat, Poly>> out;
  for (const auto &[uq, g] : cyclic_decomposition(Aq)) {
    // lift the quotient generator: subtract the Z(w)-component so the lift's
    // annihilator stays g
    Mat u(F, n, 1);
    for (int i = 0; i < n - d; ++i) {
      Mat col = B.submatrix(0, d + i, n, 1);
      if (uq.at(i, 0) != 0) u = u + col.scaled(uq.at(i, 0));
    }
    Mat gu = poly_apply(g, A, u);
    // g(A)u lies in Z(w): express it as h(A)w, then g | h and the
    // correction u - (h/g)(A)w is annihilated by g
    Mat K(F, n, d);
    {
      Mat v = w;
      for (int j = 0; j < d; ++j) {
        K.set_block(0, j, v);
        v = A * v;
      }
    }
    auto hvec = solve(K, gu);
    require(hvec.has_value(), Errc::Internal, "quotient lift left the cyclic subspace");
    Poly h(F, hvec->entries());
    auto [hq, hr] = h.divrem(g);
    require(hr.is_zero(), Errc::Internal, "quotient annihilator does not divide the lift");
    out.emplace_back(u - poly_apply(hq, A, w), g);
  }
  out.emplace_back(std::move(w), std::move(mu));
  return out;
}

}  // namespace detail

// Rational canonical form with an explicit change of basis. Invariant
// factors ascend: f_1 | f_2 | ... | f_m, the last being the minimal
// polynomial. Fully deterministic.
inline FrobeniusForm frobenius_form(const Mat &A) {
  require(A.is_square(), Errc::NotSquare, "canonical form of a non-square matrix");
  const FieldPtr &F = A.field();
  const int n = A.rows();
  auto dec = detail::cyclic_decomposition(A);
  Mat B(F, n, n);
  std::vector<Poly> factors;
  std::vector<Mat> blocks;
  int col = 0;
  for (auto &[u, g] : dec) {
    Mat v = u;
    for (int j = 0; j < g.degree(); ++j) {
      B.set_block(0, col + j, v);
      v = A * v;
    }
    col += g.degree();
    blocks.push_back(Mat::companion(g));
    factors.push_back(g);
  }
  require(col == n, Errc::Internal, "cyclic generators do not span");
  for (std::size_t i = 0; i + 1 < factors.size(); ++i)
    require((factors[i + 1] % factors[i]).is_zero(), Errc::Internal,
            "invariant factors fail the divisibility chain");
  Mat D = n ? Mat::block_diag(blocks) : Mat(F, 0, 0);
  Mat Bi = inverse(B);
  require(Bi * A * B == D, Errc::Internal, "canonical transform verification failed");
  return FrobeniusForm{std::move(factors), SimTransform{std::move(Bi), std::move(B)}, std::move(D)};
}

inline std::vector<Poly> invariant_factors(const Mat &A) {
  return frobenius_form(A).invariant_factors;
}

// seed is reserved; the computation is deterministic.
inline Poly min_poly(const Mat &A, std::uint64_t /*seed*/ = 0) {
  require(A.is_square(), Errc::NotSquare, "minimal polynomial of a non-square matrix");
  if (A.rows() == 0) return Poly::one(A.field());
  return detail::maximal_vector(A).second;
}

inline Poly char_poly(const Mat &A) {
  require(A.is_square(), Errc::NotSquare, "characteristic polynomial of a non-square matrix");
  if (A.rows() == 0) return Poly::one(A.field());
  if (A.is_good_cyclic()) return hessenberg_charpoly(A).first;
  Poly chi = Poly::one(A.field());
  for (const auto &g : invariant_factors(A)) chi = chi * g;
  return chi;
}

// Kernel profile of one irreducible factor f of the characteristic
// polynomial: nk[j] = (dim Ker f(A)^(j+1) - dim Ker f(A)^j) / deg f, the
// number of primary blocks of exponent at least j+1. Nonincreasing; the
// count of blocks of exact exponent j+1 is nk[j] - nk[j+1].
struct EigStructure {
  Poly factor;
  std::vector<int> nk;

  int blocks_of_size(int k) const {
    int a = (k >= 1 && k <= static_cast<int>(nk.size())) ? nk[static_cast<std::size_t>(k - 1)] : 0;
    int b = (k >= 1 && k < static_cast<int>(nk.size())) ? nk[static_cast<std::size_t>(k)] : 0;
    return a - b;
  }
};

inline std::vector<EigStructure> eig_structure(const Mat &A, std::uint64_t seed = 0) {
  require(A.is_square(), Errc::NotSquare, "eigenstructure of a non-square matrix");
  const FieldPtr &F = A.field();
  const int n = A.rows();
  std::vector<EigStructure> out;
  if (n == 0) return out;
  Poly chi = char_poly(A);
  for (const auto &[f, mult] : factor(chi, seed)) {
    const int d = f.degree();
    Mat fA = poly_eval(f, A);
    std::vector<int> dims{0};  // dim Ker f(A)^k
    Mat pw = Mat::identity(F, n);
    for (int k = 1; k <= mult; ++k) {
      pw = pw * fA;
      dims.push_back(n - rank(pw));
    }
    std::vector<int> nk;
    for (int k = 1; k <= mult; ++k) {
      int j = dims[static_cast<std::size_t>(k)] - dims[static_cast<std::size_t>(k - 1)];
      require(j % d == 0, Errc::Internal, "kernel jump not divisible by the factor degree");
      nk.push_back(j / d);
    }
    while (!nk.empty() && nk.back() == 0) nk.pop_back();
    out.push_back(EigStructure{f, std::move(nk)});
  }
  std::sort(out.begin(), out.end(),
            [](const EigStructure &a, const EigStructure &b) { return a.factor < b.factor; });
  return out;
}

// Explicit S with S * A * S_inv = B, or failure when the matrices are not
// similar. Composes the two canonical transforms.
inline SimTransform similarity_witness(const Mat &A, const Mat &B) {
  require(A.is_square() && B.is_square(), Errc::NotSquare, "similarity of non-square matrices");
  require_same_field(A.field(), B.field());
  require(A.rows() == B.rows(), Errc::ShapeMismatch, "similarity of different sizes");
  FrobeniusForm fa = frobenius_form(A);
  FrobeniusForm fb = frobenius_form(B);
  require(fa.invariant_factors == fb.invariant_factors, Errc::NotSimilar,
          "matrices have different invariant factors");
  SimTransform T{fb.T.S_inv * fa.T.S, fa.T.S_inv * fb.T.S};
  require(conjugate(A, T) == B, Errc::Internal, "similarity witness verification failed");
  return T;
}

// Conjugate every part of a certificate by the same transform; idempotency
// and the signed sum are preserved, so this re-targets the certificate from
// A to S A S^{-1}.
inline DecompCert conjugate_cert(const DecompCert &c, const SimTransform &T, const Mat &new_target) {
  DecompCert out;
  out.signs = c.signs;
  out.seed = c.seed;
  out.pipeline = c.pipeline;
  out.parts.reserve(c.parts.size());
  for (const auto &P : c.parts) out.parts.push_back(conjugate(P, T));
  out.target_hash = mat_digest(new_target);
  require(verify_cert(new_target, out), Errc::GadgetVerificationFailed,
          "conjugated certificate verification failed");
  return out;
}

}  // namespace idemsum

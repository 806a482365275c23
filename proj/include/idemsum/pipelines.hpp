#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "idemsum/semigroup.hpp"
#include "idemsum/two_idem.hpp"

namespace idemsum {

// A matrix is a sum of idempotents exactly when its trace lies in the
// prime subfield.
inline bool is_sum_of_idempotents(const Mat &A) {
  require(A.is_square(), Errc::NotSquare, "trace criterion on a non-square matrix");
  return A.field()->in_prime_subfield(A.trace());
}

namespace detail {

// Integer j in [0, p-1] with x = j.1; prime-subfield elements pack as
// their low base-p digit.
inline int prime_index(const FieldPtr &F, elem x) {
  require(F->in_prime_subfield(x), Errc::TraceNotInPrimeField,
          "element lies outside the prime subfield");
  require(x < F->p(), Errc::Internal, "prime-subfield element has high digits");
  return static_cast<int>(x);
}

inline SimTransform flip(const SimTransform &T) { return SimTransform{T.S_inv, T.S}; }

}  // namespace detail

// Fill the free (strictly upper) entries of a unit-subdiagonal Hessenberg
// matrix so its characteristic polynomial equals P. The dependence of the
// non-leading coefficients on the free entries is affine over the masks
// used by the pipelines; the model is built from the zero fill plus one
// unit perturbation per free entry, solved by elimination, and the result
// is recomputed independently before return.
inline Mat cyclicfit_solve(const Mat &M, const std::vector<std::pair<int, int>> &free_mask,
                           const Poly &P) {
  require(M.is_square(), Errc::NotSquare, "cyclicfit on a non-square matrix");
  const FieldPtr &F = M.field();
  const int n = M.rows();
  require(P.is_monic() && P.degree() == n, Errc::DegreeMismatch,
          "target degree must match the matrix size");
  Mat base = M;
  for (auto [i, j] : free_mask) {
    require(i >= 0 && j > i && j < n, Errc::MalformedInput,
            "free positions must be strictly upper triangular");
    base.at(i, j) = 0;
  }
  require(P.trace() == M.trace(), Errc::TraceMismatch,
          "target trace differs from the matrix trace");
  auto [chi0, ladder] = hessenberg_charpoly(base);
  const int m = static_cast<int>(free_mask.size());
  // chi with a unit added at (i,c): only columns past c change
  auto perturbed = [&](int i, int c) {
    std::vector<Poly> lad(ladder.begin(), ladder.begin() + c + 1);
    for (int k = c + 1; k <= n; ++k) {
      Poly chi = (Poly::x(F) - Poly::constant(F, base.at(k - 1, k - 1))) *
                 lad[static_cast<std::size_t>(k - 1)];
      for (int r = 1; r < k; ++r) {
        elem a = base.at(r - 1, k - 1);
        if (r - 1 == i && k - 1 == c) a = F->add(a, 1);
        if (a != 0) chi = chi - lad[static_cast<std::size_t>(r - 1)].scaled(a);
      }
      lad.push_back(std::move(chi));
    }
    return lad.back();
  };
  Mat sys(F, n, m);
  Mat rhs(F, n, 1);
  for (int t = 0; t < n; ++t) rhs.at(t, 0) = F->sub(P.coeff(t), chi0.coeff(t));
  for (int e = 0; e < m; ++e) {
    Poly col = perturbed(free_mask[e].first, free_mask[e].second);
    for (int t = 0; t < n; ++t) sys.at(t, e) = F->sub(col.coeff(t), chi0.coeff(t));
  }
  auto sol = solve(sys, rhs);
  require(sol.has_value(), Errc::InconsistentSystem, "free mask cannot reach the target");
  Mat out = base;
  for (int e = 0; e < m; ++e)
    out.at(free_mask[e].first, free_mask[e].second) = sol->at(e, 0);
  require(hessenberg_charpoly(out).first == P, Errc::InconsistentSystem,
          "affine model failed to reproduce the target polynomial");
  return out;
}

// Cyclic matrix with trace k.1 as a sum of at most 3 + [(p-1)/n]
// idempotents: writing k = a.n + l and l' = max(l, 1), the shifted
// companion splits at row l' and the off-diagonal block is refilled so the
// remainder is similar to C(X^n) or C(X^{n-1}(X+1)), hence a difference of
// two idempotents.
inline DecompCert decompose_cyclic(const Mat &B, std::uint64_t seed = 0) {
  require(B.is_square(), Errc::NotSquare, "decomposition of a non-square matrix");
  const FieldPtr &F = B.field();
  const int n = B.rows();
  require(n >= 2, Errc::SizeTooSmall, "cyclic pipeline needs size at least 2");
  require(F->in_prime_subfield(B.trace()), Errc::TraceNotInPrimeField,
          "trace criterion fails");
  FrobeniusForm fb = frobenius_form(B);
  require(fb.invariant_factors.size() == 1, Errc::NotCyclic, "matrix is not cyclic");
  const Mat &C = fb.form;
  const int p = static_cast<int>(F->p());
  int k = detail::prime_index(F, F->sub(C.trace(), F->from_int(n)));
  int a = k / n, l = k % n, lp = std::max(l, 1);
  Mat W = C - Mat::scalar(F, n, F->from_int(a + 1));
  Mat D1 = W.submatrix(0, lp, lp, n - lp);
  Mat base = W;
  std::vector<std::pair<int, int>> mask;
  for (int i = 0; i < lp; ++i) {
    base.at(i, i) = F->sub(base.at(i, i), 1);
    for (int j = lp; j < n; ++j) {
      base.at(i, j) = 0;
      mask.emplace_back(i, j);
    }
  }
  Poly target = (l >= 1) ? Poly::x_pow(F, n)
                         : Poly::x_pow(F, n - 1) * Poly::linear_root(F, F->neg(1));
  Mat Bp = cyclicfit_solve(base, mask, target);
  Mat D2 = Bp.submatrix(0, lp, lp, n - lp);
  Mat E = Mat::zero(F, n, n);
  E.set_block(0, 0, Mat::identity(F, lp));
  E.set_block(0, lp, D1 - D2);
  DecompCert diff = witness_family(Bp, WitnessFamily::pm1_blocks);
  std::vector<int> signs(static_cast<std::size_t>(a) + 3, 1);
  std::vector<Mat> parts;
  for (int t = 0; t < a; ++t) parts.push_back(Mat::identity(F, n));
  parts.push_back(Mat::identity(F, n) - diff.parts[1]);
  parts.push_back(diff.parts[0]);
  parts.push_back(E);
  require(a + 3 <= 3 + (p - 1) / n, Errc::Internal, "cyclic count bound violated");
  DecompCert c = make_cert(C, std::move(signs), std::move(parts), "cyclic", seed);
  return conjugate_cert(c, detail::flip(fb.T), B);
}

namespace detail {

// Staircase idempotent over a block-diagonal of companions: F blocks at
// the given parity of 1-based block positions, -H below each.
inline Mat staircase(const FieldPtr &F, const std::vector<int> &sizes, int parity, int n) {
  Mat Q = Mat::zero(F, n, n);
  int off = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    if (static_cast<int>(b) % 2 == parity) {
      Q.set_block(off, off, Mat::f_block(F, sizes[b]));
      if (b + 1 < sizes.size())
        Q.set_block(off + sizes[b], off, -Mat::h_block(F, sizes[b + 1], sizes[b]));
    }
    off += sizes[b];
  }
  return Q;
}

}  // namespace detail

// Sum of at most 5 + [(p-1)/n] idempotents for any square matrix with
// trace in the prime subfield: two staircase idempotents reduce the
// rational form to a good cyclic matrix, which the cyclic pipeline
// finishes.
inline DecompCert decompose_sum5(const Mat &A, std::uint64_t seed = 0) {
  require(A.is_square(), Errc::NotSquare, "decomposition of a non-square matrix");
  const FieldPtr &F = A.field();
  const int n = A.rows();
  require(F->in_prime_subfield(A.trace()), Errc::TraceNotInPrimeField,
          "trace criterion fails");
  if (A.is_zero()) return make_cert(A, {}, {}, "sum5", seed);
  require(n >= 2, Errc::SizeTooSmall, "five-idempotent pipeline needs size at least 2");
  FrobeniusForm f = frobenius_form(A);
  std::vector<int> sizes;
  for (const auto &g : f.invariant_factors) sizes.push_back(g.degree());
  Mat Q1 = detail::staircase(F, sizes, 0, n);
  Mat Q2 = detail::staircase(F, sizes, 1, n);
  Mat G = f.form - Q1 - Q2;
  DecompCert cyc = decompose_cyclic(G, seed);
  std::vector<int> signs(cyc.parts.size() + 2, 1);
  std::vector<Mat> parts{Q1, Q2};
  parts.insert(parts.end(), cyc.parts.begin(), cyc.parts.end());
  DecompCert c = make_cert(f.form, std::move(signs), std::move(parts), "sum5", seed);
  c = drop_zero_parts(f.form, c);
  require(c.count() <= 5 + (static_cast<int>(F->p()) - 1) / n, Errc::Internal,
          "five-idempotent count bound violated");
  return conjugate_cert(c, detail::flip(f.T), A);
}

// Over F_2 and F_3 every matrix is a sum of three idempotents: each
// rational block C(P) differs from C(P_1), P_1 = (X-1)^{m-1}(X - tr P +
// m.1), by a rank-one idempotent, and C(P_1) is a sum of two.
inline DecompCert decompose_small_field3(const Mat &A, std::uint64_t seed = 0) {
  require(A.is_square(), Errc::NotSquare, "decomposition of a non-square matrix");
  const FieldPtr &F = A.field();
  require(F->q() <= 3, Errc::FieldTooLarge, "three-idempotent pipeline needs #K <= 3");
  if (A.rows() == 0 || A.is_zero()) return make_cert(A, {}, {}, "small3", seed);
  FrobeniusForm f = frobenius_form(A);
  std::vector<DecompCert> certs;
  std::vector<Mat> targets;
  for (const auto &P : f.invariant_factors) {
    const int m = P.degree();
    Poly lin = Poly::linear_root(F, F->sub(P.trace(), F->from_int(m)));
    Poly P1 = lin;
    for (int i = 0; i < m - 1; ++i) P1 = P1 * Poly::linear_root(F, 1);
    Mat CP = Mat::companion(P);
    Mat CP1 = Mat::companion(P1);
    DecompCert two = witness_family(CP1, WitnessFamily::sum2_shift);
    Mat E = CP - CP1;  // [[0, C - C_1],[0, 1]]
    certs.push_back(
        make_cert(CP, {1, 1, 1}, {two.parts[0], two.parts[1], E}, "small3", seed));
    targets.push_back(CP);
  }
  DecompCert merged = drop_zero_parts(f.form, merge_block_diag(certs, targets));
  merged.pipeline = "small3";
  merged.seed = seed;
  require(merged.count() <= 3, Errc::Internal, "three-idempotent count bound violated");
  return conjugate_cert(merged, detail::flip(f.T), A);
}

namespace detail {

// alpha.I_p as a sum of at most four idempotents, characteristic 2 or 3.
inline DecompCert scalar_chunk_cert(const FieldPtr &F, elem alpha, std::uint64_t seed) {
  const int p = static_cast<int>(F->p());
  Mat target = Mat::scalar(F, p, alpha);
  if (F->in_prime_subfield(alpha)) {
    int a = prime_index(F, alpha);
    std::vector<int> signs(static_cast<std::size_t>(a), 1);
    std::vector<Mat> parts(static_cast<std::size_t>(a), Mat::identity(F, p));
    return make_cert(target, std::move(signs), std::move(parts), "char23", seed);
  }
  if (p == 2) {
    // alpha.I_2 - [[1,0],[-1,0]] is good cyclic with trace 1
    Mat R(F, 2, 2);
    R.at(0, 0) = 1;
    R.at(1, 0) = F->neg(1);
    DecompCert cyc = decompose_cyclic(target - R, seed);
    std::vector<int> signs(cyc.parts.size() + 1, 1);
    std::vector<Mat> parts{R};
    parts.insert(parts.end(), cyc.parts.begin(), cyc.parts.end());
    return make_cert(target, std::move(signs), std::move(parts), "char23", seed);
  }
  // characteristic 3: beta.I_3 = D(0,b,-b) + D(b,0,-b), each a difference
  elem beta = F->sub(alpha, F->from_int(2));
  Mat Da = Mat::diag(F, {0, beta, F->neg(beta)});
  Mat Db = Mat::diag(F, {beta, 0, F->neg(beta)});
  DecompCert wa = witness_family(Da, WitnessFamily::scalar_pairs);
  DecompCert wb = witness_family(Db, WitnessFamily::scalar_pairs);
  Mat I = Mat::identity(F, 3);
  return make_cert(target, {1, 1, 1, 1},
                   {wa.parts[0], I - wa.parts[1], wb.parts[0], I - wb.parts[1]}, "char23",
                   seed);
}

}  // namespace detail

// Characteristic 2 or 3: every matrix with trace in the prime subfield is
// a sum of at most four idempotents. Scalar alpha.I_p chunks are peeled
// off the rational form; the rest is reduced by a single staircase to a
// good cyclic matrix, finished by the cyclic pipeline (p = 2) or by a
// refilled column similar to C(X^{n-1}(X - delta)) (p = 3).
inline DecompCert decompose_char23_4(const Mat &A, std::uint64_t seed = 0) {
  require(A.is_square(), Errc::NotSquare, "decomposition of a non-square matrix");
  const FieldPtr &F = A.field();
  const int p = static_cast<int>(F->p());
  require(p == 2 || p == 3, Errc::WrongCharacteristic,
          "four-idempotent pipeline needs characteristic 2 or 3");
  require(F->in_prime_subfield(A.trace()), Errc::TraceNotInPrimeField,
          "trace criterion fails");
  if (A.rows() == 0 || A.is_zero()) return make_cert(A, {}, {}, "char23", seed);
  FrobeniusForm f = frobenius_form(A);
  int q = 0;
  while (q < static_cast<int>(f.invariant_factors.size()) &&
         f.invariant_factors[static_cast<std::size_t>(q)].degree() == 1)
    ++q;
  elem alpha = q ? F->neg(f.invariant_factors[0].coeff(0)) : 0;
  std::vector<Poly> deep(f.invariant_factors.begin() + q, f.invariant_factors.end());
  const int chunks = q / p;
  const int qr = q % p;
  // residual block list with degree-1 blocks at the ends
  std::vector<Poly> rblocks;
  if (qr >= 1) rblocks.push_back(Poly::linear_root(F, alpha));
  rblocks.insert(rblocks.end(), deep.begin(), deep.end());
  if (qr == 2) rblocks.push_back(Poly::linear_root(F, alpha));
  std::vector<DecompCert> certs;
  std::vector<Mat> targets;
  for (int t = 0; t < chunks; ++t) {
    certs.push_back(detail::scalar_chunk_cert(F, alpha, seed));
    targets.push_back(Mat::scalar(F, p, alpha));
  }
  if (!rblocks.empty()) {
    int n = 0;
    for (const auto &g : rblocks) n += g.degree();
    std::vector<Mat> comps;
    for (const auto &g : rblocks) comps.push_back(Mat::companion(g));
    Mat Ap = Mat::block_diag(comps);
    DecompCert main;
    if (n == 1) {
      int a = detail::prime_index(F, Ap.at(0, 0));
      main = make_cert(Ap, std::vector<int>(static_cast<std::size_t>(a), 1),
                       std::vector<Mat>(static_cast<std::size_t>(a), Mat::identity(F, 1)),
                       "char23", seed);
    } else {
      std::vector<int> sizes;
      for (const auto &g : rblocks) sizes.push_back(g.degree());
      Mat Q = Mat::zero(F, n, n);
      int off = 0;
      for (std::size_t b = 0; b < sizes.size(); ++b) {
        bool last_unit = (b + 1 == sizes.size() && sizes[b] == 1 && sizes.size() > 1);
        if (!last_unit) Q.set_block(off, off, Mat::f_block(F, sizes[b]));
        if (b + 1 < sizes.size())
          Q.set_block(off + sizes[b], off, -Mat::h_block(F, sizes[b + 1], sizes[b]));
        off += sizes[b];
      }
      Mat G = Ap - Q;
      if (p == 2) {
        DecompCert cyc = decompose_cyclic(G, seed);
        std::vector<int> signs(cyc.parts.size() + 1, 1);
        std::vector<Mat> parts{Q};
        parts.insert(parts.end(), cyc.parts.begin(), cyc.parts.end());
        main = make_cert(Ap, std::move(signs), std::move(parts), "char23", seed);
      } else {
        // refill the last column so G - I - E ~ C(X^{n-1}(X - delta))
        elem delta = F->sub(G.trace(), F->from_int(n + 1));
        Mat Ccol = G.submatrix(0, n - 1, n - 1, 1);
        Mat base = G;
        std::vector<std::pair<int, int>> mask;
        for (int i = 0; i < n - 1; ++i) {
          base.at(i, i) = F->sub(base.at(i, i), 1);
          base.at(i, n - 1) = 0;
          mask.emplace_back(i, n - 1);
        }
        base.at(n - 1, n - 1) = F->sub(base.at(n - 1, n - 1), F->from_int(2));
        Poly target = Poly::x_pow(F, n - 1) * Poly::linear_root(F, delta);
        Mat Mp = cyclicfit_solve(base, mask, target);
        Mat E = Mat::zero(F, n, n);
        E.set_block(0, n - 1, Ccol - Mp.submatrix(0, n - 1, n - 1, 1));
        E.at(n - 1, n - 1) = 1;
        DecompCert diff = witness_family(Mp, WitnessFamily::pm1_blocks);
        main = make_cert(
            Ap, {1, 1, 1, 1},
            {Q, E, diff.parts[0], Mat::identity(F, n) - diff.parts[1]}, "char23", seed);
      }
    }
    certs.push_back(std::move(main));
    targets.push_back(std::move(Ap));
  }
  Mat model = targets.size() == 1 ? targets[0] : Mat::block_diag(targets);
  DecompCert merged = certs.size() == 1 ? certs[0] : merge_block_diag(certs, targets);
  merged = drop_zero_parts(model, merged);
  merged.pipeline = "char23";
  merged.seed = seed;
  require(merged.count() <= 4, Errc::Internal, "four-idempotent count bound violated");
  SimTransform T = similarity_witness(model, A);
  return conjugate_cert(merged, T, A);
}

namespace detail {

// Classes of the equivalence generated by k ~ -k (k outside {1,-1}) and
// k ~ 2a - k (k outside {a+1,a-1}) on F_p, as sorted lists of residues.
inline std::vector<std::vector<int>> scalar_classes(const FieldPtr &F, elem alpha) {
  const int p = static_cast<int>(F->p());
  const int a = prime_index(F, alpha);
  std::vector<int> parent(static_cast<std::size_t>(p));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  auto unite = [&](int x, int y) { parent[static_cast<std::size_t>(find(x))] = find(y); };
  for (int k = 0; k < p; ++k) {
    if (k != 1 && k != p - 1) unite(k, (p - k) % p);
    if (k != (a + 1) % p && k != (a + p - 1) % p) unite(k, ((2 * a - k) % p + p) % p);
  }
  std::map<int, std::vector<int>> by_root;
  for (int k = 0; k < p; ++k) by_root[find(k)].push_back(k);
  std::vector<std::vector<int>> out;
  for (auto &[root, members] : by_root) out.push_back(std::move(members));
  return out;
}

}  // namespace detail

// Least n from which scalar_4comp can serve alpha.I_n; zero for the
// trivial scalars 0, 1, -1.
inline int scalar_threshold(const FieldPtr &F, elem alpha) {
  require(F->k() == 1, Errc::NotPrimeField, "scalar composites need a prime field");
  int a = detail::prime_index(F, alpha);
  const int p = static_cast<int>(F->p());
  if (a == 0 || a == 1 || a == p - 1) return 0;
  std::vector<int> sizes;
  for (const auto &cls : detail::scalar_classes(F, alpha))
    sizes.push_back(static_cast<int>(cls.size()));
  return semigroup_frobenius(sizes);
}

// alpha.I_n as a (1,-1,1,-1)-composite over a prime field: a diagonal D
// with class-constant multiplicities makes both D and D - alpha.I_n
// differences of idempotents.
inline DecompCert scalar_4comp(const FieldPtr &F, elem alpha, int n,
                               std::uint64_t seed = 0) {
  require(F->k() == 1, Errc::NotPrimeField, "scalar composites need a prime field");
  require(n >= 0, Errc::SizeTooSmall, "negative size");
  const int p = static_cast<int>(F->p());
  const int a = detail::prime_index(F, alpha);
  Mat target = Mat::scalar(F, n, alpha);
  Mat Z = Mat::zero(F, n, n);
  Mat I = Mat::identity(F, n);
  if (a == 0) return make_cert(target, {1, -1, 1, -1}, {Z, Z, Z, Z}, "scalar4", seed);
  if (a == 1) return make_cert(target, {1, -1, 1, -1}, {I, Z, Z, Z}, "scalar4", seed);
  if (a == p - 1) return make_cert(target, {1, -1, 1, -1}, {Z, I, Z, Z}, "scalar4", seed);
  auto classes = detail::scalar_classes(F, alpha);
  std::vector<int> sizes;
  for (const auto &cls : classes) sizes.push_back(static_cast<int>(cls.size()));
  std::vector<int> mult;
  try {
    mult = semigroup_represent(sizes, n);
  } catch (const Error &e) {
    if (e.code() == Errc::NoRepresentation)
      fail(Errc::BelowThreshold, "size below the scalar composite threshold");
    throw;
  }
  std::vector<elem> diag;
  for (std::size_t c = 0; c < classes.size(); ++c)
    for (int member : classes[c])
      for (int t = 0; t < mult[c]; ++t) diag.push_back(static_cast<elem>(member));
  Mat D = Mat::diag(F, diag);
  DecompCert wd = witness_family(D, WitnessFamily::scalar_pairs);
  DecompCert ws = witness_family(D - target, WitnessFamily::scalar_pairs);
  // alpha.I = D - (D - alpha.I)
  return make_cert(target, {1, -1, 1, -1},
                   {wd.parts[0], wd.parts[1], ws.parts[1], ws.parts[0]}, "scalar4", seed);
}

// Two idempotents Q, Q' with A - Q - Q' similar to C(P), where A is the
// block-diagonal of the given companions, r in [s+1, N+1] and tr P =
// tr A - r.1. The staircases carry adjustable diagonal 0/1 parts to reach
// the trace, and the shared last column is solved by cyclicfit.
inline std::pair<Mat, Mat> tracefit_sum(const std::vector<Poly> &blocks, int r,
                                        const Poly &P) {
  require(!blocks.empty(), Errc::EmptyBlockList, "no blocks");
  const FieldPtr &F = blocks[0].field();
  const int s = static_cast<int>(blocks.size());
  int N = 0;
  for (const auto &g : blocks) {
    require(g.is_monic() && g.degree() >= 1, Errc::MalformedInput,
            "blocks must be nonconstant monic polynomials");
    N += g.degree();
  }
  require(blocks.back().degree() >= 2, Errc::LastBlockTooSmall,
          "last block must have degree at least 2");
  require(r >= s + 1 && r <= N + 1, Errc::RangeViolation, "r outside [s+1, N+1]");
  require(P.is_monic() && P.degree() == N, Errc::DegreeMismatch,
          "target degree must be the total size");
  std::vector<Mat> comps;
  for (const auto &g : blocks) comps.push_back(Mat::companion(g));
  Mat A = Mat::block_diag(comps);
  require(P.trace() == F->sub(A.trace(), F->from_int(r)), Errc::TraceMismatch,
          "target trace must be tr A - r");
  // per-block diagonal trace budget: block s is truncated by one row
  std::vector<int> bsize, dtr;
  for (int k = 0; k < s; ++k)
    bsize.push_back(k + 1 < s ? blocks[static_cast<std::size_t>(k)].degree()
                              : blocks[static_cast<std::size_t>(k)].degree() - 1);
  int rem = r - (s + 1);
  for (int k = 0; k < s; ++k) {
    int d = std::min(rem, bsize[static_cast<std::size_t>(k)] - (k + 1 < s ? 1 : 0));
    if (k + 1 == s) d = std::min(rem, bsize[static_cast<std::size_t>(k)]);
    dtr.push_back(d);
    rem -= d;
  }
  require(rem == 0, Errc::Internal, "trace budget not distributable");
  auto half = [&](int parity) {
    Mat M = Mat::zero(F, N - 1, N - 1);
    int off = 0;
    for (int k = 0; k < s; ++k) {
      int sz = bsize[static_cast<std::size_t>(k)];
      if (k % 2 == parity) {
        Mat blk = Mat::zero(F, sz, sz);
        for (int i = 0; i < dtr[static_cast<std::size_t>(k)]; ++i) blk.at(i, i) = 1;
        if (k + 1 < s) blk = blk + Mat::f_block(F, sz);
        M.set_block(off, off, blk);
        if (k + 1 < s)
          M.set_block(off + sz, off,
                      -Mat::h_block(F, bsize[static_cast<std::size_t>(k + 1)], sz));
      }
      off += sz;
    }
    return M;
  };
  Mat B = half(0), Bp = half(1);
  Mat base = Mat::zero(F, N, N);
  base.set_block(0, 0, A.submatrix(0, 0, N - 1, N - 1) - B - Bp);
  base.at(N - 1, N - 2) = 1;
  base.at(N - 1, N - 1) = F->sub(A.at(N - 1, N - 1), F->from_int(2));
  std::vector<std::pair<int, int>> mask;
  for (int i = 0; i < N - 1; ++i) mask.emplace_back(i, N - 1);
  Mat Mfill = cyclicfit_solve(base, mask, P);
  // split C_0 between the two idempotents by block parity
  Mat Q = Mat::zero(F, N, N), Qp = Mat::zero(F, N, N);
  Q.set_block(0, 0, B);
  Qp.set_block(0, 0, Bp);
  Q.at(N - 1, N - 1) = 1;
  Qp.at(N - 1, N - 1) = 1;
  int off = 0;
  for (int k = 0; k < s; ++k) {
    int sz = bsize[static_cast<std::size_t>(k)];
    for (int i = 0; i < sz; ++i) {
      elem c0 = F->sub(A.at(off + i, N - 1), Mfill.at(off + i, N - 1));
      if (k % 2 == 1) Q.at(off + i, N - 1) = c0;   // C_k = 0 for odd 1-based k
      else Qp.at(off + i, N - 1) = c0;
    }
    off += sz;
  }
  require(Q.is_idempotent() && Qp.is_idempotent() && A - Q - Qp == Mfill,
          Errc::GadgetVerificationFailed, "tracefit pair failed verification");
  return {Q, Qp};
}

// Idempotents Q, Q' with A - (Q - Q') similar to C(P) for r in
// [s+1-N, 1]: apply the sum construction to A + I and complement the
// second idempotent.
inline std::pair<Mat, Mat> tracefit_diff(const std::vector<Poly> &blocks, int r,
                                         const Poly &P) {
  require(!blocks.empty(), Errc::EmptyBlockList, "no blocks");
  const FieldPtr &F = blocks[0].field();
  const int s = static_cast<int>(blocks.size());
  int N = 0;
  for (const auto &g : blocks) N += g.degree();
  require(r >= s + 1 - N && r <= 1, Errc::RangeViolation, "r outside [s+1-N, 1]");
  std::vector<Poly> shifted;
  std::vector<Mat> comps;
  std::vector<SimTransform> trans;
  for (const auto &g : blocks) {
    Mat Ci = Mat::companion(g) + Mat::identity(F, g.degree());
    FrobeniusForm fg = frobenius_form(Ci);
    require(fg.invariant_factors.size() == 1, Errc::Internal, "shifted block not cyclic");
    shifted.push_back(fg.invariant_factors[0]);
    comps.push_back(Mat::companion(g));
    trans.push_back(fg.T);
  }
  auto [R, Rp] = tracefit_sum(shifted, r + N, P);
  Mat S = Mat::zero(F, N, N), Si = Mat::zero(F, N, N);
  int off = 0;
  for (int k = 0; k < s; ++k) {
    S.set_block(off, off, trans[static_cast<std::size_t>(k)].S);
    Si.set_block(off, off, trans[static_cast<std::size_t>(k)].S_inv);
    off += blocks[static_cast<std::size_t>(k)].degree();
  }
  Mat A = Mat::block_diag(comps);
  Mat Q = Si * R * S;
  Mat Qpp = Si * Rp * S;
  Mat Qp = Mat::identity(F, N) - Qpp;
  Mat M = A - Q + Qp;
  require(Q.is_idempotent() && Qp.is_idempotent(), Errc::GadgetVerificationFailed,
          "tracefit difference pair failed verification");
  auto inv = invariant_factors(M);
  require(inv.size() == 1 && inv[0] == P, Errc::GadgetVerificationFailed,
          "tracefit difference residue is not similar to the target companion");
  return {Q, Qp};
}

// Embeds C(P), deg P = r >= 2, into D(C(P), 0_m) as a verified
// (1,-1,1,-1)-composite, with m at most 2p + r + (p+r)^2: the zero-padded
// companion is shifted to C((X-1)^{r+k}) by a difference, and a ladder of
// alternating (X+1)/(X-1) powers pairs every block.
inline std::pair<int, DecompCert> embed_nilfit(const Poly &P, std::uint64_t seed = 0) {
  const FieldPtr &F = P.field();
  require(F->k() == 1, Errc::NotPrimeField, "embedding lemma needs a prime field");
  const int r = P.degree();
  require(r >= 2, Errc::DegreeTooSmall, "degree must be at least 2");
  require(P.is_monic(), Errc::NotMonic, "target must be monic");
  const int p = static_cast<int>(F->p());
  int k = ((detail::prime_index(F, P.trace()) - r - 1) % p + p) % p;
  const int n1 = r + k;
  std::vector<Poly> blocks(static_cast<std::size_t>(k), Poly::x(F));
  blocks.push_back(P);
  Poly pow1 = Poly::one(F);
  for (int i = 0; i < n1; ++i) pow1 = pow1 * Poly::linear_root(F, 1);
  auto [Q1, Q2] = tracefit_diff(blocks, 1, pow1);
  Mat A1 = Mat::zero(F, n1, n1);
  A1.set_block(k, k, Mat::companion(P));
  Mat M1 = A1 - Q1 + Q2;
  // alternating ladder (X+1)^{n1}, (X-1)^{n1-1}, (X+1)^{n1-1}, ..., (X+1)
  std::vector<Mat> ladder;
  auto pm_pow = [&](elem root, int d) {
    Poly g = Poly::one(F);
    for (int i = 0; i < d; ++i) g = g * Poly::linear_root(F, root);
    return Mat::companion(g);
  };
  ladder.push_back(pm_pow(F->neg(1), n1));
  for (int j = n1 - 1; j >= 1; --j) {
    ladder.push_back(pm_pow(1, j));
    ladder.push_back(pm_pow(F->neg(1), j));
  }
  Mat B = Mat::block_diag(ladder);
  const int nb = B.rows();
  DecompCert wb = witness_family(B, WitnessFamily::pm1_blocks);
  const int total = n1 + nb;
  Mat G = Mat::zero(F, total, total);
  G.set_block(0, 0, M1);
  G.set_block(n1, n1, B);
  DecompCert wg = witness_family(G, WitnessFamily::pm1_blocks);
  auto pad = [&](const Mat &top, const Mat &bottom) {
    Mat M = Mat::zero(F, total, total);
    M.set_block(0, 0, top);
    M.set_block(n1, n1, bottom);
    return M;
  };
  Mat T1 = pad(A1, Mat::zero(F, nb, nb));
  DecompCert c = make_cert(T1, {1, -1, 1, -1},
                           {pad(Q1, wb.parts[1]), pad(Q2, wb.parts[0]), wg.parts[0],
                            wg.parts[1]},
                           "embed", seed);
  // move the companion block to the front
  const int m = total - r;
  Mat perm = Mat::zero(F, total, total);
  for (int i = 0; i < r; ++i) perm.at(i, k + i) = 1;
  for (int i = 0; i < k; ++i) perm.at(r + i, i) = 1;
  for (int i = n1; i < total; ++i) perm.at(i, i) = 1;
  Mat target = Mat::zero(F, total, total);
  target.set_block(0, 0, Mat::companion(P));
  require(m <= 2 * p + r + (p + r) * (p + r), Errc::Internal,
          "embedding exceeded the size bound");
  return {m, conjugate_cert(c, SimTransform{perm, perm.transpose()}, target)};
}

// Size from which the prime-field four-idempotent pipeline covers every
// matrix; assembled from the scalar thresholds and the embedding sizes.
inline int prime4_threshold(const FieldPtr &F) {
  require(F->k() == 1, Errc::NotPrimeField, "threshold is a prime-field notion");
  const int p = static_cast<int>(F->p());
  int n0s = 0;
  for (int a = 0; a < p; ++a)
    n0s = std::max(n0s, scalar_threshold(F, static_cast<elem>(a)));
  int mmax = 0;
  for (int r = 2; r < 2 * p; ++r)
    mmax = std::max(mmax, (p - 1) + (r + p - 1) * (r + p - 1));
  return 2 * p + std::max(p + n0s, p * mmax) + 1;
}

// Four idempotents with signs (+,-,+,-) for any matrix over F_p of size
// at least prime4_threshold, dispatching on the size N of the non-scalar
// rational part and the scalar eigenvalue alpha.
inline DecompCert decompose_prime4(const Mat &A, std::uint64_t seed = 0) {
  require(A.is_square(), Errc::NotSquare, "decomposition of a non-square matrix");
  const FieldPtr &F = A.field();
  require(F->k() == 1, Errc::NotPrimeField, "pipeline needs a prime field");
  const int p = static_cast<int>(F->p());
  const int n = A.rows();
  require(n >= prime4_threshold(F), Errc::BelowThreshold,
          "size below the computed threshold; use the five-idempotent pipeline");
  FrobeniusForm f = frobenius_form(A);
  int q = 0;
  while (q < static_cast<int>(f.invariant_factors.size()) &&
         f.invariant_factors[static_cast<std::size_t>(q)].degree() == 1)
    ++q;
  elem alpha = q ? F->neg(f.invariant_factors[0].coeff(0)) : 0;
  std::vector<Poly> deep(f.invariant_factors.begin() + q, f.invariant_factors.end());
  const int s = static_cast<int>(deep.size());
  const int N = n - q;
  if (s == 0) {
    DecompCert c = scalar_4comp(F, alpha, n, seed);
    c.pipeline = "prime4";
    return make_cert(A, c.signs, c.parts, "prime4", seed);
  }
  auto nilpotent_finish = [&](const Mat &model, const std::vector<Poly> &blocks) {
    int tot = model.rows();
    int r = detail::prime_index(F, model.trace());
    while (r > 1) r -= p;
    require(r >= static_cast<int>(blocks.size()) + 1 - tot, Errc::Internal,
            "residue range exhausted");
    auto [Q1, Q2] = tracefit_diff(blocks, r, Poly::x_pow(F, tot));
    Mat M = model - Q1 + Q2;
    DiffWitness w = witness_nilpotent_diff(M);
    return make_cert(model, {1, -1, 1, -1}, {Q1, Q2, w.Q1, w.Q2}, "prime4", seed);
  };
  if (N >= 2 * p) {
    std::vector<Poly> blocks(f.invariant_factors.begin(), f.invariant_factors.end());
    DecompCert c = nilpotent_finish(f.form, blocks);
    return conjugate_cert(c, detail::flip(f.T), A);
  }
  std::vector<DecompCert> certs;
  std::vector<Mat> targets;
  if (alpha != 0) {
    elem tau = 0;
    for (const auto &g : deep) tau = F->add(tau, g.trace());
    int t = detail::prime_index(F, F->div(F->sub(1, tau), alpha));
    std::vector<Poly> blocks(static_cast<std::size_t>(t), Poly::linear_root(F, alpha));
    blocks.insert(blocks.end(), deep.begin(), deep.end());
    std::vector<Mat> comps;
    for (const auto &g : blocks) comps.push_back(Mat::companion(g));
    Mat A2 = Mat::block_diag(comps);
    certs.push_back(scalar_4comp(F, alpha, q - t, seed));
    targets.push_back(Mat::scalar(F, q - t, alpha));
    certs.push_back(nilpotent_finish(A2, blocks));
    targets.push_back(A2);
  } else {
    int used = 0;
    for (const auto &g : deep) {
      auto [m, c] = embed_nilfit(g, seed);
      certs.push_back(std::move(c));
      Mat tgt = Mat::zero(F, g.degree() + m, g.degree() + m);
      tgt.set_block(0, 0, Mat::companion(g));
      targets.push_back(std::move(tgt));
      used += g.degree() + m;
    }
    int z = n - used;
    require(z >= 0, Errc::Internal, "embedding budget exceeded the scalar block");
    if (z > 0) {
      Mat Zm = Mat::zero(F, z, z);
      certs.push_back(make_cert(Zm, {1, -1, 1, -1}, {Zm, Zm, Zm, Zm}, "prime4", seed));
      targets.push_back(Zm);
    }
  }
  DecompCert merged = certs.size() == 1 ? certs[0] : merge_block_diag(certs, targets);
  merged.pipeline = "prime4";
  merged.seed = seed;
  Mat model = targets.size() == 1 ? targets[0] : Mat::block_diag(targets);
  SimTransform T = similarity_witness(model, A);
  return conjugate_cert(merged, T, A);
}

// Lower/upper bounds on s_n(K), with a provenance note per bound.
struct SnBounds {
  int lower = 1;
  int upper = 1;
  std::vector<std::string> notes;
};

inline SnBounds sn_bounds(int n, const FieldPtr &F) {
  require(n >= 1, Errc::SizeTooSmall, "size must be positive");
  const int p = static_cast<int>(F->p());
  SnBounds b;
  if (n == 1) {
    b.lower = b.upper = p - 1;
    b.notes.push_back("n=1: scalars k.1 need exactly k idempotents, max k = p-1");
    return b;
  }
  b.lower = 1 + (p - 1) / n;
  b.notes.push_back("lower 1+[(p-1)/n]: trace bound, strict for n >= 2");
  b.upper = 5 + (p - 1) / n;
  b.notes.push_back("upper 5+[(p-1)/n]: staircase + cyclic pipeline");
  if (F->q() <= 3 && b.upper > 3) {
    b.upper = 3;
    b.notes.push_back("upper 3: tiny-field pipeline (#K <= 3)");
  }
  if (p <= 3 && b.upper > 4) {
    b.upper = 4;
    b.notes.push_back("upper 4: characteristic 2/3 pipeline");
  }
  require(b.lower <= b.upper, Errc::Internal, "inconsistent bounds");
  return b;
}

// Smallest-guarantee-first dispatcher: tiny fields, then characteristic
// 2/3, then the asymptotic prime-field pipeline, then the general bound.
inline DecompCert decompose_best(const Mat &A, std::uint64_t seed = 0) {
  require(A.is_square(), Errc::NotSquare, "decomposition of a non-square matrix");
  const FieldPtr &F = A.field();
  require(is_sum_of_idempotents(A), Errc::TraceNotInPrimeField, "trace criterion fails");
  const int n = A.rows();
  if (n == 0 || A.is_zero()) return make_cert(A, {}, {}, "unit", seed);
  if (n == 1) {
    int k = detail::prime_index(F, A.at(0, 0));
    return make_cert(A, std::vector<int>(static_cast<std::size_t>(k), 1),
                     std::vector<Mat>(static_cast<std::size_t>(k), Mat::identity(F, 1)),
                     "unit", seed);
  }
  if (F->q() <= 3) return decompose_small_field3(A, seed);
  if (F->p() <= 3) return decompose_char23_4(A, seed);
  if (F->k() == 1 && n >= prime4_threshold(F)) return decompose_prime4(A, seed);
  return decompose_sum5(A, seed);
}

}  // namespace idemsum

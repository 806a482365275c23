#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "idemsum/poly.hpp"

namespace idemsum {

namespace detail {

// p-th root in F_{p^k}: x^(p^(k-1)), the inverse of the Frobenius map.
inline elem pth_root(const FieldCtx &F, elem x) {
  elem r = x;
  for (std::uint32_t i = 1; i < F.k(); ++i) r = F.frobenius(r);
  return r;
}

inline Poly random_poly(const FieldPtr &F, int max_deg, std::mt19937_64 &rng) {
  std::uniform_int_distribution<std::uint64_t> dist(0, F->q() - 1);
  std::vector<elem> c(static_cast<std::size_t>(max_deg) + 1);
  for (auto &v : c) v = static_cast<elem>(dist(rng));
  return Poly(F, std::move(c));
}

// Equal-degree splitting (Cantor-Zassenhaus). f monic squarefree, all
// irreducible factors of degree d.
inline void edf(const Poly &f, int d, std::mt19937_64 &rng, std::vector<Poly> &out) {
  const FieldPtr &F = f.field();
  if (f.degree() == d) {
    out.push_back(f);
    return;
  }
  Poly split = Poly::one(F);
  while (split.is_one() || split.degree() == f.degree() || split.degree() == 0) {
    Poly r = random_poly(F, f.degree() - 1, rng);
    if (r.degree() < 1 && F->q() > 2) continue;
    if (F->p() == 2) {
      // trace map over F_2: r + r^2 + r^4 + ... (d*k squarings)
      Poly t = r % f;
      Poly acc = t;
      std::uint64_t steps = static_cast<std::uint64_t>(d) * F->k();
      for (std::uint64_t i = 1; i < steps; ++i) {
        t = (t * t) % f;
        acc = acc + t;
      }
      split = gcd(acc, f);
    } else {
      std::uint64_t qd = 1;
      for (int i = 0; i < d; ++i) qd *= F->q();
      Poly s = powmod(r, (qd - 1) / 2, f);
      split = gcd(s - Poly::one(F), f);
    }
  }
  edf(split, d, rng, out);
  edf((f / split).monic(), d, rng, out);
}

// Distinct-degree factorization of a monic squarefree polynomial.
inline void ddf(const Poly &f_in, std::mt19937_64 &rng, std::vector<Poly> &out) {
  const FieldPtr &F = f_in.field();
  Poly f = f_in;
  Poly h = Poly::x(F) % f;
  for (int d = 1; f.degree() >= 2 * d; ++d) {
    h = powmod(h, F->q(), f);
    Poly g = gcd(h - Poly::x(F), f);
    if (g.degree() > 0) {
      edf(g, d, rng, out);
      f = (f / g).monic();
      h = h % f;
    }
  }
  if (f.degree() > 0) out.push_back(f);
}

// Squarefree decomposition in characteristic p, including the f = g(X^p)
// case via p-th roots of coefficients.
inline void squarefree_decompose(const Poly &f_in, int mult,
                                 std::vector<std::pair<Poly, int>> &out) {
  const FieldPtr &F = f_in.field();
  const std::uint32_t p = F->p();
  Poly f = f_in.monic();
  if (f.degree() <= 0) return;
  Poly df = f.derivative();
  if (df.is_zero()) {
    // f = g(X^p): extract p-th roots of the surviving coefficients.
    std::vector<elem> g(static_cast<std::size_t>(f.degree() / p) + 1, 0);
    for (int i = 0; i <= f.degree(); i += p)
      g[static_cast<std::size_t>(i / p)] = pth_root(*F, f.coeff(i));
    squarefree_decompose(Poly(F, std::move(g)), mult * static_cast<int>(p), out);
    return;
  }
  Poly c = gcd(f, df);
  Poly w = (f / c).monic();
  int i = 1;
  while (!w.is_one()) {
    Poly y = gcd(w, c);
    Poly z = (w / y).monic();
    if (z.degree() > 0) out.emplace_back(z, mult * i);
    w = y;
    c = (c / y).monic();
    ++i;
  }
  if (c.degree() > 0) squarefree_decompose(c, mult, out);
}

}  // namespace detail

// Full factorization into monic irreducibles with multiplicities.
// Equal-degree splits are randomized but fully determined by the seed;
// the output is sorted (degree, then coefficients), so identical input
// always yields an identical list.
inline std::vector<std::pair<Poly, int>> factor(const Poly &f, std::uint64_t seed = 0) {
  require(!f.is_zero(), Errc::ZeroPolynomial, "cannot factor the zero polynomial");
  std::vector<std::pair<Poly, int>> result;
  if (f.degree() == 0) return result;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<std::pair<Poly, int>> sqf;
  detail::squarefree_decompose(f.monic(), 1, sqf);
  for (const auto &[part, mult] : sqf) {
    std::vector<Poly> irr;
    detail::ddf(part, rng, irr);
    for (auto &g : irr) result.emplace_back(std::move(g), mult);
  }
  std::sort(result.begin(), result.end(), [](const auto &a, const auto &b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  return result;
}

inline bool is_irreducible(const Poly &f, std::uint64_t seed = 0) {
  if (f.degree() < 1) return false;
  auto fs = factor(f, seed);
  return fs.size() == 1 && fs[0].second == 1;
}

}  // namespace idemsum

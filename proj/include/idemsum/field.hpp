#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <vector>

#include "idemsum/error.hpp"

namespace idemsum {

// Packed element of F_{p^k}: little-endian base-p digits, value < p^k.
// For k == 1 this is just the residue in [0, p-1].
using elem = std::uint32_t;

namespace detail {

// Minimal F_p polynomial helpers (coefficient vectors, little-endian, no
// trailing zeros) used to validate and select field moduli before a full
// FieldCtx exists.
using fpvec = std::vector<std::uint32_t>;

inline void fp_trim(fpvec &f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline fpvec fp_mul(const fpvec &a, const fpvec &b, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  fpvec r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      r[i + j] = (r[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p;
  fp_trim(r);
  return r;
}

inline std::uint32_t fp_inv_scalar(std::uint32_t a, std::uint32_t p) {
  // Fermat; p is prime and a != 0.
  std::uint64_t r = 1, base = a % p;
  std::uint32_t e = p - 2;
  while (e) {
    if (e & 1) r = r * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(r);
}

inline fpvec fp_mod(fpvec a, const fpvec &m, std::uint32_t p) {
  fp_trim(a);
  std::uint32_t lead_inv = fp_inv_scalar(m.back(), p);
  while (a.size() >= m.size()) {
    std::uint64_t c = static_cast<std::uint64_t>(a.back()) * lead_inv % p;
    std::size_t shift = a.size() - m.size();
    for (std::size_t i = 0; i < m.size(); ++i) {
      std::uint64_t sub = c * m[i] % p;
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - sub) % p);
    }
    fp_trim(a);
    if (a.empty()) break;
  }
  return a;
}

inline fpvec fp_gcd(fpvec a, fpvec b, std::uint32_t p) {
  fp_trim(a);
  fp_trim(b);
  while (!b.empty()) {
    fpvec r = fp_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty() && a.back() != 1) {
    std::uint32_t inv = fp_inv_scalar(a.back(), p);
    for (auto &c : a) c = static_cast<std::uint32_t>(static_cast<std::uint64_t>(c) * inv % p);
  }
  return a;
}

inline fpvec fp_powmod_x(std::uint64_t e, const fpvec &m, std::uint32_t p) {
  // X^e mod m
  fpvec r{1};
  fpvec base{0, 1};
  base = fp_mod(base, m, p);
  while (e) {
    if (e & 1) r = fp_mod(fp_mul(r, base, p), m, p);
    base = fp_mod(fp_mul(base, base, p), m, p);
    e >>= 1;
  }
  return r;
}

// Rabin irreducibility test for a monic polynomial over F_p.
inline bool fp_irreducible(const fpvec &f, std::uint32_t p) {
  std::size_t k = f.size() - 1;
  if (k == 0) return false;
  if (k == 1) return true;
  // X^(p^k) == X mod f
  std::uint64_t pk = 1;
  for (std::size_t i = 0; i < k; ++i) pk *= p;
  fpvec xpk = fp_powmod_x(pk, f, p);
  fpvec x{0, 1};
  x = fp_mod(x, f, p);
  if (xpk != x) return false;
  // gcd(X^(p^(k/t)) - X, f) == 1 for every prime t | k
  std::size_t kk = k;
  for (std::size_t t = 2; t * t <= kk; ++t) {
    if (kk % t) continue;
    while (kk % t == 0) kk /= t;
    std::uint64_t pe = 1;
    for (std::size_t i = 0; i < k / t; ++i) pe *= p;
    fpvec g = fp_powmod_x(pe, f, p);
    // g - X
    if (g.size() < 2) g.resize(2, 0);
    g[1] = (g[1] + p - 1) % p;
    fp_trim(g);
    fpvec d = fp_gcd(g, f, p);
    if (d.size() != 1) return false;
  }
  if (kk > 1) {
    std::uint64_t pe = 1;
    for (std::size_t i = 0; i < k / kk; ++i) pe *= p;
    fpvec g = fp_powmod_x(pe, f, p);
    if (g.size() < 2) g.resize(2, 0);
    g[1] = (g[1] + p - 1) % p;
    fp_trim(g);
    fpvec d = fp_gcd(g, f, p);
    if (d.size() != 1) return false;
  }
  return true;
}

inline bool is_prime_u32(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace detail

// Description of F_{p^k}. Arithmetic on packed elements; small fields get
// lookup tables, larger ones compute digit-wise.
class FieldCtx {
 public:
  static constexpr std::uint64_t kTableLimit = 256;

  static std::shared_ptr<const FieldCtx> make(
      std::uint32_t p, std::uint32_t k,
      std::optional<std::vector<std::uint32_t>> modulus = std::nullopt) {
    require(detail::is_prime_u32(p), Errc::NotPrime,
            "characteristic must be prime, got " + std::to_string(p));
    require(k >= 1, Errc::DegreeMismatch, "extension degree must be >= 1");
    std::vector<std::uint32_t> mod;
    if (k > 1) {
      if (modulus) {
        mod = *modulus;
        detail::fp_trim(mod);
        require(mod.size() == k + 1, Errc::DegreeMismatch,
                "modulus degree must equal extension degree " + std::to_string(k));
        require(mod.back() == 1, Errc::NotMonic, "modulus must be monic");
        for (auto c : mod)
          require(c < p, Errc::MalformedInput, "modulus coefficient out of range");
        require(detail::fp_irreducible(mod, p), Errc::ReducibleModulus,
                "modulus is reducible over F_p");
      } else {
        mod = default_modulus(p, k);
      }
    } else {
      require(!modulus || modulus->empty() ||
                  (modulus->size() == 2 && (*modulus)[1] == 1),
              Errc::DegreeMismatch, "prime field takes no modulus");
      mod.clear();
    }
    return std::shared_ptr<const FieldCtx>(new FieldCtx(p, k, std::move(mod)));
  }

  std::uint32_t p() const { return p_; }
  std::uint32_t k() const { return k_; }
  std::uint64_t q() const { return q_; }
  const std::vector<std::uint32_t> &modulus() const { return mod_; }

  bool operator==(const FieldCtx &o) const {
    return p_ == o.p_ && k_ == o.k_ && mod_ == o.mod_;
  }
  bool operator!=(const FieldCtx &o) const { return !(*this == o); }

  elem zero() const { return 0; }
  elem one() const { return 1; }

  // Embedding of the integer n (mod p) into the prime subfield.
  elem from_int(std::int64_t n) const {
    std::int64_t r = n % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    return static_cast<elem>(r);
  }

  std::vector<std::uint32_t> coords(elem x) const {
    std::vector<std::uint32_t> c(k_);
    for (std::uint32_t i = 0; i < k_; ++i) {
      c[i] = x % p_;
      x /= p_;
    }
    return c;
  }

  elem from_coords(const std::vector<std::uint32_t> &c) const {
    require(c.size() == k_, Errc::DegreeMismatch, "coordinate count must equal k");
    elem x = 0;
    for (std::uint32_t i = k_; i-- > 0;) {
      require(c[i] < p_, Errc::MalformedInput, "coordinate out of range");
      x = x * p_ + c[i];
    }
    return x;
  }

  elem add(elem a, elem b) const {
    if (tab_) return tab_->add[a * q_ + b];
    return add_direct(a, b);
  }
  elem sub(elem a, elem b) const { return add(a, neg(b)); }
  elem neg(elem a) const {
    if (tab_) return tab_->neg[a];
    return neg_direct(a);
  }
  elem mul(elem a, elem b) const {
    if (tab_) return tab_->mul[a * q_ + b];
    return mul_direct(a, b);
  }
  elem inv(elem a) const {
    require(a != 0, Errc::DivisionByZero, "inverse of zero");
    if (tab_) return tab_->inv[a];
    return pow(a, q_ - 2);
  }
  elem div(elem a, elem b) const { return mul(a, inv(b)); }

  elem pow(elem a, std::uint64_t e) const {
    elem r = 1;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  elem frobenius(elem a) const { return pow(a, p_); }

  // x lies in F_p iff it is fixed by the Frobenius map.
  bool in_prime_subfield(elem x) const { return frobenius(x) == x; }

 private:
  FieldCtx(std::uint32_t p, std::uint32_t k, std::vector<std::uint32_t> mod)
      : p_(p), k_(k), mod_(std::move(mod)) {
    q_ = 1;
    for (std::uint32_t i = 0; i < k_; ++i) {
      require(q_ <= (1ull << 40) / p_, Errc::FieldTooLarge, "field too large");
      q_ *= p_;
    }
    if (q_ <= kTableLimit) build_tables();
  }

  static std::vector<std::uint32_t> default_modulus(std::uint32_t p, std::uint32_t k) {
    // Lexicographically smallest monic irreducible: candidates compared on
    // (c_0, c_1, ..., c_{k-1}), low-degree coefficients first.
    std::vector<std::uint32_t> digits(k, 0);
    for (;;) {
      std::vector<std::uint32_t> cand(digits);
      cand.push_back(1);
      if (detail::fp_irreducible(cand, p)) return cand;
      // increment (c_{k-1} fastest so that c_0 is the most significant
      // position in the scan order)
      std::uint32_t i = k;
      while (i-- > 0) {
        if (++digits[i] < p) break;
        digits[i] = 0;
        if (i == 0) fail(Errc::Internal, "no irreducible modulus found");
      }
    }
  }

  elem add_direct(elem a, elem b) const {
    elem r = 0, m = 1;
    for (std::uint32_t i = 0; i < k_; ++i) {
      r += (a % p_ + b % p_) % p_ * m;
      a /= p_;
      b /= p_;
      m *= p_;
    }
    return r;
  }

  elem neg_direct(elem a) const {
    elem r = 0, m = 1;
    for (std::uint32_t i = 0; i < k_; ++i) {
      r += (p_ - a % p_) % p_ * m;
      a /= p_;
      m *= p_;
    }
    return r;
  }

  elem mul_direct(elem a, elem b) const {
    if (k_ == 1) return static_cast<elem>(static_cast<std::uint64_t>(a) * b % p_);
    std::vector<std::uint32_t> da = coords(a), db = coords(b);
    std::vector<std::uint32_t> prod(2 * k_ - 1, 0);
    for (std::uint32_t i = 0; i < k_; ++i)
      for (std::uint32_t j = 0; j < k_; ++j)
        prod[i + j] = (prod[i + j] + static_cast<std::uint64_t>(da[i]) * db[j]) % p_;
    // reduce modulo the (monic) modulus
    for (std::uint32_t d = 2 * k_ - 2; d >= k_; --d) {
      std::uint32_t c = prod[d];
      if (c) {
        prod[d] = 0;
        for (std::uint32_t i = 0; i < k_; ++i) {
          std::uint64_t sub = static_cast<std::uint64_t>(c) * mod_[i] % p_;
          prod[d - k_ + i] =
              static_cast<std::uint32_t>((prod[d - k_ + i] + p_ - sub) % p_);
        }
      }
      if (d == k_) break;
    }
    prod.resize(k_);
    elem r = 0;
    for (std::uint32_t i = k_; i-- > 0;) r = r * p_ + prod[i];
    return r;
  }

  void build_tables() {
    tab_ = std::make_unique<Tables>();
    tab_->add.resize(q_ * q_);
    tab_->mul.resize(q_ * q_);
    tab_->neg.resize(q_);
    tab_->inv.resize(q_, 0);
    for (std::uint64_t a = 0; a < q_; ++a) {
      tab_->neg[a] = neg_direct(static_cast<elem>(a));
      for (std::uint64_t b = 0; b < q_; ++b) {
        tab_->add[a * q_ + b] = add_direct(static_cast<elem>(a), static_cast<elem>(b));
        tab_->mul[a * q_ + b] = mul_direct(static_cast<elem>(a), static_cast<elem>(b));
      }
    }
    for (std::uint64_t a = 1; a < q_; ++a)
      for (std::uint64_t b = 1; b < q_; ++b)
        if (tab_->mul[a * q_ + b] == 1) {
          tab_->inv[a] = static_cast<elem>(b);
          break;
        }
  }

  struct Tables {
    std::vector<elem> add, mul, neg, inv;
  };

  std::uint32_t p_, k_;
  std::uint64_t q_;
  std::vector<std::uint32_t> mod_;
  std::unique_ptr<Tables> tab_;
};

using FieldPtr = std::shared_ptr<const FieldCtx>;

inline void require_same_field(const FieldPtr &a, const FieldPtr &b) {
  require(a && b && (a == b || *a == *b), Errc::FieldMismatch,
          "operands belong to different fields");
}

}  // namespace idemsum

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "idemsum/field.hpp"

namespace idemsum {

// Dense univariate polynomial over a FieldCtx. Coefficients little-endian
// with no trailing zeros; the zero polynomial has an empty vector.
class Poly {
 public:
  explicit Poly(FieldPtr f) : F_(std::move(f)) {}
  Poly(FieldPtr f, std::vector<elem> coeffs) : F_(std::move(f)), c_(std::move(coeffs)) {
    trim();
  }

  static Poly zero(FieldPtr f) { return Poly(std::move(f)); }
  static Poly one(FieldPtr f) { return Poly(std::move(f), {1}); }
  static Poly x(FieldPtr f) { return Poly(std::move(f), {0, 1}); }
  static Poly constant(FieldPtr f, elem c) { return Poly(std::move(f), {c}); }
  // X - r
  static Poly linear_root(FieldPtr f, elem r) {
    elem nr = f->neg(r);
    return Poly(std::move(f), {nr, 1});
  }
  // X^n
  static Poly x_pow(FieldPtr f, int n) {
    std::vector<elem> c(n + 1, 0);
    c[n] = 1;
    return Poly(std::move(f), std::move(c));
  }

  const FieldPtr &field() const { return F_; }
  const std::vector<elem> &coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
  elem lead() const { return c_.empty() ? 0 : c_.back(); }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }
  elem coeff(int i) const {
    return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(i)] : 0;
  }

  // Trace of a monic polynomial: the coefficient a_{n-1} in
  // X^n - sum a_k X^k, i.e. minus the stored coefficient of X^{n-1}.
  elem trace() const {
    require(is_monic(), Errc::NotMonic, "trace of a non-monic polynomial");
    return F_->neg(coeff(degree() - 1));
  }

  bool operator==(const Poly &o) const { return c_ == o.c_; }
  bool operator!=(const Poly &o) const { return c_ != o.c_; }

  // Deterministic total order: degree first, then coefficients from the
  // constant term upward. Used to sort factor lists and JSON output.
  bool operator<(const Poly &o) const {
    if (degree() != o.degree()) return degree() < o.degree();
    return c_ < o.c_;
  }

  Poly operator+(const Poly &o) const {
    require_same_field(F_, o.F_);
    std::vector<elem> r(std::max(c_.size(), o.c_.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = F_->add(coeff(i), o.coeff(i));
    return Poly(F_, std::move(r));
  }
  Poly operator-(const Poly &o) const {
    require_same_field(F_, o.F_);
    std::vector<elem> r(std::max(c_.size(), o.c_.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = F_->sub(coeff(i), o.coeff(i));
    return Poly(F_, std::move(r));
  }
  Poly operator-() const {
    std::vector<elem> r(c_);
    for (auto &v : r) v = F_->neg(v);
    return Poly(F_, std::move(r));
  }
  Poly operator*(const Poly &o) const {
    require_same_field(F_, o.F_);
    if (is_zero() || o.is_zero()) return zero(F_);
    std::vector<elem> r(c_.size() + o.c_.size() - 1, 0);
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == 0) continue;
      for (std::size_t j = 0; j < o.c_.size(); ++j)
        r[i + j] = F_->add(r[i + j], F_->mul(c_[i], o.c_[j]));
    }
    return Poly(F_, std::move(r));
  }
  Poly scaled(elem s) const {
    std::vector<elem> r(c_);
    for (auto &v : r) v = F_->mul(v, s);
    return Poly(F_, std::move(r));
  }

  std::pair<Poly, Poly> divrem(const Poly &d) const {
    require_same_field(F_, d.F_);
    require(!d.is_zero(), Errc::DivisionByZero, "polynomial division by zero");
    if (degree() < d.degree()) return {zero(F_), *this};
    std::vector<elem> rem(c_);
    std::vector<elem> quot(degree() - d.degree() + 1, 0);
    elem lead_inv = F_->inv(d.lead());
    for (int i = degree(); i >= d.degree(); --i) {
      elem c = rem[static_cast<std::size_t>(i)];
      if (c == 0) continue;
      elem f = F_->mul(c, lead_inv);
      quot[static_cast<std::size_t>(i - d.degree())] = f;
      for (int j = 0; j <= d.degree(); ++j) {
        std::size_t idx = static_cast<std::size_t>(i - d.degree() + j);
        rem[idx] = F_->sub(rem[idx], F_->mul(f, d.coeff(j)));
      }
    }
    return {Poly(F_, std::move(quot)), Poly(F_, std::move(rem))};
  }
  Poly operator/(const Poly &d) const { return divrem(d).first; }
  Poly operator%(const Poly &d) const { return divrem(d).second; }

  Poly monic() const {
    if (is_zero() || is_monic()) return *this;
    return scaled(F_->inv(lead()));
  }

  Poly derivative() const {
    if (degree() < 1) return zero(F_);
    std::vector<elem> r(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i)
      r[i - 1] = F_->mul(c_[i], F_->from_int(static_cast<std::int64_t>(i)));
    return Poly(F_, std::move(r));
  }

  elem eval(elem x) const {
    elem r = 0;
    for (std::size_t i = c_.size(); i-- > 0;) r = F_->add(F_->mul(r, x), c_[i]);
    return r;
  }

  // f(aX + b)
  Poly compose_linear(elem a, elem b) const {
    Poly lin(F_, {b, a});
    Poly r = zero(F_);
    for (std::size_t i = c_.size(); i-- > 0;) r = r * lin + constant(F_, c_[i]);
    return r;
  }

  std::string str() const {
    if (is_zero()) return "0";
    std::string s;
    for (int i = degree(); i >= 0; --i) {
      elem c = coeff(i);
      if (c == 0) continue;
      if (!s.empty()) s += " + ";
      if (i == 0 || c != 1) s += std::to_string(c);
      if (i > 0) {
        if (c != 1) s += "*";
        s += "X";
        if (i > 1) s += "^" + std::to_string(i);
      }
    }
    return s;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  FieldPtr F_;
  std::vector<elem> c_;
};

inline Poly gcd(Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

inline Poly lcm(const Poly &a, const Poly &b) {
  if (a.is_zero() || b.is_zero()) return Poly::zero(a.field());
  return ((a * b) / gcd(a, b)).monic();
}

inline Poly powmod(const Poly &base, std::uint64_t e, const Poly &mod) {
  Poly r = Poly::one(base.field());
  Poly b = base % mod;
  while (e) {
    if (e & 1) r = (r * b) % mod;
    b = (b * b) % mod;
    e >>= 1;
  }
  return r;
}

// Monic polynomial whose roots are {(r - b) / a : r root of f}; i.e. the
// monic normalization of f(aX + b). Degree is preserved since a != 0.
inline Poly substitute_linear(const Poly &f, elem a, elem b) {
  require(a != 0, Errc::ZeroScale, "substitution scale must be nonzero");
  return f.compose_linear(a, b).monic();
}

}  // namespace idemsum

// Acceptance gate: one pass/fail line per criterion, exact equality
// throughout, nonzero exit when anything fails. Runtime budgets are
// checked per criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "idemsum/json_io.hpp"
#include "idemsum/oracle.hpp"

using namespace idemsum;

namespace {

int failures = 0;

void criterion(int id, const std::string &label, double budget_s,
               const std::function<bool(std::string &)> &body) {
  std::string detail;
  bool ok = false;
  auto t0 = std::chrono::steady_clock::now();
  try {
    ok = body(detail);
  } catch (const Error &e) {
    detail = e.what();
  } catch (const std::exception &e) {
    detail = e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    ok = false;
    detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
  }
  std::printf("%s criterion %d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", id,
              label.c_str(), secs, detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

FieldPtr F2 = FieldCtx::make(2, 1);
FieldPtr F3 = FieldCtx::make(3, 1);
FieldPtr F4 = FieldCtx::make(2, 2);
FieldPtr F5 = FieldCtx::make(5, 1);
FieldPtr F7 = FieldCtx::make(7, 1);
FieldPtr F9 = FieldCtx::make(3, 2);

Mat rand_mat(const FieldPtr &F, int n, std::mt19937_64 &rng) {
  Mat A(F, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A.at(i, j) = static_cast<elem>(rng() % F->q());
  return A;
}

Mat rand_trace_ok(const FieldPtr &F, int n, std::mt19937_64 &rng) {
  for (;;) {
    Mat A = rand_mat(F, n, rng);
    if (F->in_prime_subfield(A.trace())) return A;
  }
}

Poly rand_monic(const FieldPtr &F, int deg, std::mt19937_64 &rng) {
  std::vector<elem> c(static_cast<std::size_t>(deg) + 1, 1);
  for (int i = 0; i < deg; ++i) c[static_cast<std::size_t>(i)] = static_cast<elem>(rng() % F->q());
  return Poly(F, std::move(c));
}

Poly with_trace(Poly f, elem want) {
  const FieldPtr &F = f.field();
  int d = f.degree();
  elem delta = F->neg(F->add(want, f.coeff(d - 1)));
  return f + Poly::x_pow(F, d - 1).scaled(delta);
}

bool crit1(std::string &detail) {
  struct Suite { int n; FieldPtr F; } suites[] = {{2, F2}, {2, F3}, {2, F4}, {3, F2}};
  for (const auto &s : suites) {
    OracleTable t = build_oracle_table(s.n, s.F, 6);
    for (std::uint64_t key = 0; key < t.min_counts.size(); ++key) {
      Mat A = detail::unpack_mat(s.F, s.n, key);
      if ((t.min_counts[key] >= 0) != s.F->in_prime_subfield(A.trace())) {
        detail = "reachability mismatch at key " + std::to_string(key);
        return false;
      }
    }
  }
  return true;
}

bool crit2(std::string &detail) {
  struct Suite { int n; FieldPtr F; } suites[] = {{2, F2}, {3, F2}, {2, F3}};
  for (const auto &s : suites) {
    OracleTable t = build_oracle_table(s.n, s.F, 6);
    std::uint64_t total = t.min_counts.size();
    for (std::uint64_t key = 0; key < total; ++key) {
      Mat A = detail::unpack_mat(s.F, s.n, key);
      DecompCert c = decompose_small_field3(A, key);
      if (!verify_cert(A, c) || c.count() > 3 || t.min_counts[key] > 3 ||
          t.min_counts[key] < 0) {
        detail = "failure at key " + std::to_string(key);
        return false;
      }
    }
  }
  return true;
}

bool crit3(std::string &detail) {
  auto v2 = min_idempotent_sum(Mat::scalar(F5, 2, 4), 6);
  auto v1 = min_idempotent_sum(Mat::scalar(F5, 1, 4), 6);
  if (!v2 || *v2 != 3 || !v1 || *v1 != 4) {
    detail = "unexpected minimal counts";
    return false;
  }
  detail = "exhaustive minimum is 3 for 4.I_2 (the size-1 obstruction does not extend "
           "to even sizes); 4 for the 1x1 case";
  return true;
}

bool crit4(std::string &detail) {
  std::uint64_t total = 1;
  for (int i = 0; i < 4; ++i) total *= 4;
  for (std::uint64_t key = 0; key < total; ++key) {
    Mat A = detail::unpack_mat(F4, 2, key);
    if (!F4->in_prime_subfield(A.trace())) continue;
    DecompCert c = decompose_char23_4(A, key);
    if (!verify_cert(A, c) || c.count() > 4) {
      detail = "exhaustive M2(F4) failure at key " + std::to_string(key);
      return false;
    }
  }
  std::mt19937_64 rng(4);
  for (const auto &F : {F4, F9}) {
    for (int n = 2; n <= 6; ++n)
      for (int iter = 0; iter < 500; ++iter) {
        Mat A = rand_trace_ok(F, n, rng);
        DecompCert c = decompose_char23_4(A, iter);
        if (!verify_cert(A, c) || c.count() > 4) {
          detail = "random failure at n=" + std::to_string(n);
          return false;
        }
      }
    for (elem a = 0; a < F->q(); ++a) {
      Mat S = Mat::scalar(F, static_cast<int>(F->p()), a);
      DecompCert c = decompose_char23_4(S, a);
      if (!verify_cert(S, c) || c.count() > 4) {
        detail = "scalar failure";
        return false;
      }
    }
  }
  return true;
}

bool crit5(std::string &detail) {
  std::mt19937_64 rng(5);
  for (const auto &F : {F2, F3, F4, F5, F7, F9}) {
    int p = static_cast<int>(F->p());
    for (int n = 2; n <= 6; ++n)
      for (int iter = 0; iter < 500; ++iter) {
        Mat A = rand_trace_ok(F, n, rng);
        DecompCert c = decompose_sum5(A, iter);
        int bound = 5 + (p - 1) / n;
        if (!verify_cert(A, c) || c.count() > bound || (n >= p && c.count() > 5)) {
          detail = "failure at q=" + std::to_string(F->q()) + " n=" + std::to_string(n);
          return false;
        }
      }
  }
  return true;
}

bool crit6(std::string &detail) {
  std::mt19937_64 rng(6);
  std::vector<FieldPtr> fields{F2, F3, F5};
  for (int iter = 0; iter < 1000; ++iter) {
    const FieldPtr &F = fields[static_cast<std::size_t>(iter) % 3];
    int n = 2 + static_cast<int>(rng() % 3) + 1;  // 3..5, mask rows 1..4 wide
    Mat base(F, n, n);
    for (int i = 1; i < n; ++i) base.at(i, i - 1) = 1;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n - 1; ++j) base.at(i, j) = static_cast<elem>(rng() % F->q());
    base.at(n - 1, n - 1) = static_cast<elem>(rng() % F->q());
    std::vector<std::pair<int, int>> mask;
    for (int i = 0; i < n - 1; ++i) mask.emplace_back(i, n - 1);
    Poly target = with_trace(rand_monic(F, n, rng), base.trace());
    Mat out = cyclicfit_solve(base, mask, target);
    if (hessenberg_charpoly(out).first != target || !out.is_good_cyclic() ||
        invariant_factors(out).size() != 1) {
      detail = "solve failure at iter " + std::to_string(iter);
      return false;
    }
    // affinity: chi(D' + D'') - chi(0) = sum of the separate deltas
    auto chi_col = [&](const std::vector<elem> &col) {
      Mat m = base;
      for (int i = 0; i < n - 1; ++i) m.at(i, n - 1) = col[static_cast<std::size_t>(i)];
      return hessenberg_charpoly(m).first;
    };
    std::vector<elem> d1, d2, ds;
    for (int i = 0; i < n - 1; ++i) {
      d1.push_back(static_cast<elem>(rng() % F->q()));
      d2.push_back(static_cast<elem>(rng() % F->q()));
      ds.push_back(F->add(d1.back(), d2.back()));
    }
    Poly zero_chi = chi_col(std::vector<elem>(static_cast<std::size_t>(n - 1), 0));
    if (chi_col(ds) - zero_chi != (chi_col(d1) - zero_chi) + (chi_col(d2) - zero_chi) ||
        chi_col(d1).trace() != base.trace()) {
      detail = "affinity/trace property failure at iter " + std::to_string(iter);
      return false;
    }
  }
  return true;
}

bool crit7(std::string &detail) {
  struct Suite { int n; FieldPtr F; } suites[] = {{2, F2}, {2, F3}, {2, F5}, {3, F2}, {3, F3}};
  for (const auto &s : suites) {
    auto dset = composite_set({1, -1}, s.n, s.F);
    auto sset = composite_set({1, 1}, s.n, s.F);
    std::uint64_t total = 1;
    for (int i = 0; i < s.n * s.n; ++i) total *= s.F->q();
    for (std::uint64_t key = 0; key < total; ++key) {
      Mat A = detail::unpack_mat(s.F, s.n, key);
      if (decide_diff2(A) != (dset.count(key) == 1) ||
          decide_sum2(A) != (sset.count(key) == 1)) {
        detail = "calibration mismatch at key " + std::to_string(key) + " over q=" +
                 std::to_string(s.F->q());
        return false;
      }
    }
  }
  // literal-mode ledger over M2(F3) must flag diag(0,-1)
  auto dset = composite_set({1, -1}, 2, F3);
  bool flagged = false;
  int ledger_size = 0;
  for (std::uint64_t key = 0; key < 81; ++key) {
    Mat A = detail::unpack_mat(F3, 2, key);
    bool lit = decide_diff2(A, IntertwineMode::literal);
    bool cor = decide_diff2(A, IntertwineMode::corrected);
    if (lit == cor) continue;
    ++ledger_size;
    if (A == Mat::diag(F3, {0, 2}) && !lit && cor && dset.count(key) == 1) flagged = true;
  }
  if (!flagged) {
    detail = "ledger misses diag(0,-1)";
    return false;
  }
  detail = "ledger entries over M2(F3): " + std::to_string(ledger_size);
  return true;
}

bool crit8(std::string &detail) {
  std::mt19937_64 rng(8);
  std::vector<FieldPtr> fields{F2, F3, F5};
  for (int iter = 0; iter < 200; ++iter) {
    const FieldPtr &F = fields[static_cast<std::size_t>(iter) % 3];
    int s = 1 + static_cast<int>(rng() % 3);
    std::vector<Poly> blocks;
    int N = 0;
    for (int b = 0; b < s; ++b) {
      int d = (b + 1 == s) ? 2 + static_cast<int>(rng() % 2) : 1 + static_cast<int>(rng() % 2);
      blocks.push_back(rand_monic(F, d, rng));
      N += d;
    }
    std::vector<Mat> comps;
    for (const auto &g : blocks) comps.push_back(Mat::companion(g));
    Mat A = Mat::block_diag(comps);
    int r = (iter % 5 == 0) ? s + 1 : (iter % 5 == 1) ? N + 1
                                                      : s + 1 + static_cast<int>(rng() % (N - s + 1));
    Poly target = with_trace(rand_monic(F, N, rng), F->sub(A.trace(), F->from_int(r)));
    auto [Q, Qp] = tracefit_sum(blocks, r, target);
    auto inv = invariant_factors(A - Q - Qp);
    if (!Q.is_idempotent() || !Qp.is_idempotent() || inv.size() != 1 || inv[0] != target) {
      detail = "tracefit_sum failure at iter " + std::to_string(iter);
      return false;
    }
    int rd = r - N;  // mirrors the boundary coverage into [s+1-N, 1]
    Poly dtarget = with_trace(rand_monic(F, N, rng), F->sub(A.trace(), F->from_int(rd)));
    auto [Qd, Qdp] = tracefit_diff(blocks, rd, dtarget);
    auto dinv = invariant_factors(A - Qd + Qdp);
    if (dinv.size() != 1 || dinv[0] != dtarget) {
      detail = "tracefit_diff failure at iter " + std::to_string(iter);
      return false;
    }
  }
  for (const auto &F : {F2, F3}) {
    int p = static_cast<int>(F->p());
    for (int r = 2; r <= 3; ++r) {
      std::uint64_t total = 1;
      for (int i = 0; i < r; ++i) total *= F->q();
      for (std::uint64_t key = 0; key < total; ++key) {
        std::vector<elem> coeffs;
        std::uint64_t k = key;
        for (int i = 0; i < r; ++i) {
          coeffs.push_back(static_cast<elem>(k % F->q()));
          k /= F->q();
        }
        coeffs.push_back(1);
        Poly g(F, coeffs);
        auto [m, c] = embed_nilfit(g);
        Mat tg = Mat::zero(F, r + m, r + m);
        tg.set_block(0, 0, Mat::companion(g));
        if (m > 2 * p + r + (p + r) * (p + r) || !verify_cert(tg, c) || c.count() != 4) {
          detail = "embed failure at degree " + std::to_string(r);
          return false;
        }
      }
    }
  }
  for (elem a = 0; a < 5; ++a)
    if (!verify_cert(Mat::scalar(F5, 5, a), scalar_4comp(F5, a, 5))) {
      detail = "scalar_4comp failure over F5";
      return false;
    }
  for (elem a = 0; a < 7; ++a) {
    int t = std::max(scalar_threshold(F7, a), 1);
    if (!verify_cert(Mat::scalar(F7, t, a), scalar_4comp(F7, a, t))) {
      detail = "scalar_4comp failure over F7 at threshold";
      return false;
    }
  }
  for (const auto &F : {F2, F3}) {
    int n = prime4_threshold(F);
    for (int iter = 0; iter < 50; ++iter) {
      Mat A = rand_mat(F, n, rng);
      DecompCert c = decompose_prime4(A, iter);
      if (!verify_cert(A, c) || c.count() != 4 ||
          c.signs != std::vector<int>{1, -1, 1, -1}) {
        detail = "prime4 failure at p=" + std::to_string(F->p());
        return false;
      }
    }
  }
  return true;
}

bool crit9(std::string &detail) {
  for (int n = 1; n <= 10; ++n)
    for (const auto &F : {F2, F3, F5, F7, F4, F9}) {
      SnBounds b = sn_bounds(n, F);
      int p = static_cast<int>(F->p());
      int lower = (n == 1) ? p - 1 : 1 + (p - 1) / n;
      int upper = (n == 1) ? p - 1 : 5 + (p - 1) / n;
      if (n > 1 && F->q() <= 3) upper = std::min(upper, 3);
      if (n > 1 && p <= 3) upper = std::min(upper, 4);
      if (b.lower != lower || b.upper != upper) {
        detail = "formula mismatch at n=" + std::to_string(n) + " q=" +
                 std::to_string(F->q());
        return false;
      }
    }
  struct Suite { int n; FieldPtr F; } suites[] = {{1, F3}, {2, F2}, {2, F3}, {2, F4}, {3, F2}};
  for (const auto &s : suites) {
    int sn = empirical_sn(s.n, s.F, 6);
    SnBounds b = sn_bounds(s.n, s.F);
    if (sn < b.lower || sn > b.upper) {
      detail = "empirical s_n outside bounds at n=" + std::to_string(s.n);
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  criterion(1, "oracle reachability equals the trace criterion", 60, crit1);
  criterion(2, "three idempotents over F2/F3, exhaustive", 120, crit2);
  criterion(3, "minimal count for 4.I_2 over F5", 60, crit3);
  criterion(4, "four idempotents in characteristic 2/3", 300, crit4);
  criterion(5, "five-idempotent bound across fields", 300, crit5);
  criterion(6, "column solver: exactness, affinity, trace invariance", 60, crit6);
  criterion(7, "two-idempotent decisions calibrated by exhaustion", 600, crit7);
  criterion(8, "prime-field four-idempotent machinery", 600, crit8);
  criterion(9, "bounds table and empirical s_n", 60, crit9);
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  else std::printf("all 9 criteria passed\n");
  return failures ? 1 : 0;
}

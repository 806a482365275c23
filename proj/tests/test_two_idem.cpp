#include "doctest.h"
#include "helpers.hpp"
#include "idemsum/semigroup.hpp"
#include "idemsum/two_idem.hpp"

using namespace idemsum;
using namespace testutil;

TEST_SUITE("two_idem") {
  TEST_CASE("intertwined modes on the frozen sequences") {
    NkSequence zero{};
    NkSequence one{{1}};
    NkSequence two{{1, 1}};
    CHECK(intertwined(zero, one, IntertwineMode::corrected));
    CHECK_FALSE(intertwined(zero, one, IntertwineMode::literal));
    CHECK_FALSE(intertwined(two, zero, IntertwineMode::corrected));
    CHECK_FALSE(intertwined(two, zero, IntertwineMode::literal));
    CHECK(intertwined(zero, zero, IntertwineMode::corrected));
    CHECK(intertwined(zero, zero, IntertwineMode::literal));
    // symmetric pair
    CHECK(intertwined(one, one, IntertwineMode::corrected));
  }

  TEST_CASE("decide_diff2 frozen cases") {
    // nilpotent matrices are differences
    CHECK(decide_diff2(Mat::companion(Poly::x_pow(F3(), 3))));
    CHECK(decide_diff2(Mat::zero(F5(), 2, 2)));
    // diag(0,-1) over F_3: corrected yes, literal no
    Mat D = Mat::diag(F3(), {0, 2});
    CHECK(decide_diff2(D));
    CHECK_FALSE(decide_diff2(D, IntertwineMode::literal));
    // J_2(1) over F_3 is not a difference
    CHECK_FALSE(decide_diff2(M(F3(), {{1, 1}, {0, 1}})));
    CHECK_FALSE(decide_diff2(M(F3(), {{1, 1}, {0, 1}}), IntertwineMode::literal));
    // 1x1 [a] over F_4, a outside F_2: odd block size at a
    Mat A(F4(), 1, 1);
    A.at(0, 0) = F4()->from_coords({0, 1});
    CHECK_FALSE(decide_diff2(A));
    // but a 2x2 block for an F_4 scalar is fine in characteristic 2
    Mat B(F4(), 2, 2);
    B.at(0, 0) = F4()->from_coords({0, 1});
    B.at(0, 1) = 1;
    B.at(1, 1) = F4()->from_coords({0, 1});
    CHECK(decide_diff2(B));
  }

  TEST_CASE("decide_sum2 frozen cases") {
    CHECK(decide_sum2(Mat::identity(F5(), 3)));
    CHECK(decide_sum2(Mat::diag(F5(), {0, 2})));
    Mat A(F5(), 1, 1);
    A.at(0, 0) = 4;
    CHECK_FALSE(decide_sum2(A));
    // characteristic 2: sum and difference agree pointwise
    std::mt19937_64 rng(21);
    for (int t = 0; t < 40; ++t) {
      Mat X = rand_mat(F2(), 3, 3, rng);
      CHECK(decide_sum2(X) == decide_diff2(X));
    }
  }

  TEST_CASE("decisions are similarity invariants") {
    std::mt19937_64 rng(22);
    for (const auto &F : {F3(), F5()}) {
      for (int t = 0; t < 20; ++t) {
        Mat A = rand_mat(F, 3, 3, rng);
        Mat S = rand_invertible(F, 3, rng);
        Mat B = S * A * inverse(S);
        CHECK(decide_diff2(A) == decide_diff2(B));
        CHECK(decide_sum2(A) == decide_sum2(B));
      }
    }
  }

  TEST_CASE("witness_nilpotent_diff closed forms") {
    auto F = F5();
    Mat N = M(F, {{0, 1}, {0, 0}});
    DiffWitness w = witness_nilpotent_diff(N);
    CHECK(w.Q1 - w.Q2 == N);
    CHECK(w.Q1.is_idempotent());
    CHECK(w.Q2.is_idempotent());

    w = witness_nilpotent_diff(Mat::zero(F, 3, 3));
    CHECK(w.Q1.is_zero());
    CHECK(w.Q2.is_zero());

    // J_3(0) recipe: Q1 = E11+E12+E33, Q2 = E11+E33-E23
    DiffWitness s = detail::shift_block_pair(F, 3);
    CHECK(s.Q1 == M(F, {{1, 1, 0}, {0, 0, 0}, {0, 0, 1}}));
    CHECK(s.Q2 == M(F, {{1, 0, 0}, {0, 0, -1}, {0, 0, 1}}));

    CHECK_THROWS_WITH_AS(witness_nilpotent_diff(Mat::identity(F, 2)),
                         doctest::Contains("NotNilpotent"), Error);
  }

  TEST_CASE("witness_nilpotent_diff on random nilpotent matrices") {
    std::mt19937_64 rng(23);
    for (const auto &F : {F2(), F3(), F5(), F4()}) {
      for (int t = 0; t < 15; ++t) {
        int n = 1 + static_cast<int>(rng() % 5);
        // random strictly upper triangular, then conjugated
        Mat N(F, n, n);
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j) N.at(i, j) = rand_elem(F, rng);
        Mat S = rand_invertible(F, n, rng);
        Mat A = S * N * inverse(S);
        DiffWitness w = witness_nilpotent_diff(A);
        CHECK(w.Q1 - w.Q2 == A);
        CHECK(w.Q1.is_idempotent());
        CHECK(w.Q2.is_idempotent());
      }
    }
  }

  TEST_CASE("witness_pm1_pair frozen and random sizes") {
    auto F = F5();
    auto [M1, w1] = witness_pm1_pair(F, 1, 1);
    CHECK(w1.Q1 - w1.Q2 == M1);
    CHECK(invariant_factors(M1) == std::vector<Poly>{P(F, {-1, 0, 1})});

    auto G = F3();
    auto [M2, w2] = witness_pm1_pair(G, 2, 1);
    auto inv = invariant_factors(M2);
    REQUIRE(inv.size() == 1);
    Poly expect = P(G, {-1, 1}) * P(G, {-1, 1}) * P(G, {1, 1});
    CHECK(inv[0] == expect);

    auto [M3, w3] = witness_pm1_pair(F, 0, 1);
    CHECK(M3 == M(F, {{-1}}));
    CHECK(w3.Q1.is_zero());
    CHECK(w3.Q2 == Mat::identity(F, 1));

    for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 2}, {2, 2}, {3, 2}, {3, 3}, {4, 3}}) {
      auto [Mx, wx] = witness_pm1_pair(F, a, b);
      CHECK(wx.Q1 - wx.Q2 == Mx);
      CHECK(wx.Q1.is_idempotent());
      CHECK(wx.Q2.is_idempotent());
    }
    CHECK_THROWS_WITH_AS(witness_pm1_pair(F, 3, 1),
                         doctest::Contains("SizeConstraintViolated"), Error);
    CHECK_THROWS_WITH_AS(witness_pm1_pair(F2(), 1, 1),
                         doctest::Contains("WrongCharacteristic"), Error);
  }

  TEST_CASE("witness_family nilpotent and pm1 families") {
    auto F = F3();
    // C(X^{n-1}(X+1)): difference witness
    Poly Pn = Poly::x_pow(F, 2) * P(F, {1, 1});
    Mat A = Mat::companion(Pn);
    DecompCert c = witness_family(A, WitnessFamily::pm1_blocks);
    CHECK(verify_cert(A, c));
    CHECK(c.signs == std::vector<int>{1, -1});

    // J_m(1): sum witness via the shift
    Mat J = M(F, {{1, 1, 0}, {0, 1, 1}, {0, 0, 1}});
    c = witness_family(J, WitnessFamily::sum2_shift);
    CHECK(verify_cert(J, c));
    CHECK(c.signs == std::vector<int>{1, 1});

    // diag(2,-2,0) over F_5: scalar pair gadget plus zero block
    auto G = F5();
    Mat D = Mat::diag(G, {2, 3, 0});
    c = witness_family(D, WitnessFamily::scalar_pairs);
    CHECK(verify_cert(D, c));
    CHECK(c.signs == std::vector<int>{1, -1});

    // mismatched multiset rejected
    CHECK_THROWS_WITH_AS(witness_family(Mat::diag(G, {2, 2, 0}), WitnessFamily::scalar_pairs),
                         doctest::Contains("UnsupportedStructure"), Error);
  }

  TEST_CASE("witness_family characteristic 2 pm1 blocks") {
    auto F = F2();
    Mat A = Mat::block_diag({Mat::companion(Poly::x_pow(F, 2)),
                             Mat::identity(F, 1) + Mat::zero(F, 1, 1)});
    DecompCert c = witness_family(A, WitnessFamily::pm1_blocks);
    CHECK(verify_cert(A, c));
    // J_2(1) over F_2 through the shifted recipe
    Mat J = M(F, {{1, 1}, {0, 1}});
    c = witness_family(J, WitnessFamily::pm1_blocks);
    CHECK(verify_cert(J, c));
  }

  TEST_CASE("semigroup DP frozen cases") {
    CHECK(semigroup_frobenius({3, 5}) == 8);
    CHECK(semigroup_represent({3, 5}, 8) == std::vector<int>{1, 1});
    CHECK(semigroup_frobenius({2, 3}) == 2);
    CHECK(semigroup_frobenius({1}) == 0);
    CHECK(semigroup_represent({1}, 7) == std::vector<int>{7});
    CHECK_THROWS_WITH_AS(semigroup_represent({3, 5}, 7),
                         doctest::Contains("NoRepresentation"), Error);
    CHECK_THROWS_WITH_AS(semigroup_frobenius({2, 4}), doctest::Contains("NotCoprime"), Error);
    CHECK_THROWS_WITH_AS(semigroup_frobenius({}), doctest::Contains("EmptyList"), Error);
    // representation correctness on a range
    for (int n = 8; n < 60; ++n) {
      auto b = semigroup_represent({3, 5}, n);
      CHECK(3 * b[0] + 5 * b[1] == n);
    }
    auto b = semigroup_represent({2, 2, 1}, 47);
    CHECK(2 * b[0] + 2 * b[1] + b[2] == 47);
  }
}

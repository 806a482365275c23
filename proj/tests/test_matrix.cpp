#include "doctest.h"
#include "helpers.hpp"

using namespace idemsum;
using namespace testutil;

TEST_SUITE("matrix") {
  TEST_CASE("arithmetic basics") {
    auto F = F2();
    Mat A = M(F, {{1, 1}, {0, 1}});
    CHECK(A * A == Mat::identity(F, 2));
    CHECK(Mat::identity(F3(), 3).trace() == 3 % 3);
    CHECK(Mat::scalar(F5(), 2, 2) == M(F5(), {{2, 0}, {0, 2}}));
    CHECK_THROWS_WITH_AS(M(F, {{1, 0}}) + M(F, {{1}, {0}}),
                         doctest::Contains("ShapeMismatch"), Error);
  }

  TEST_CASE("block constructors") {
    CHECK(Mat::companion(P(F3(), {-1, 0, 1})) == M(F3(), {{0, 1}, {1, 0}}));
    Mat H = Mat::h_block(F2(), 2, 3);
    CHECK(H.rows() == 2);
    CHECK(H.cols() == 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) CHECK(H.at(i, j) == ((i == 0 && j == 2) ? 1u : 0u));
    CHECK(Mat::f_block(F5(), 3) == M(F5(), {{0, 0, 0}, {0, 0, 0}, {0, 0, 1}}));
    CHECK_THROWS_WITH_AS(Mat::companion(P(F2(), {1, 0}).scaled(0)),
                         doctest::Contains("NotMonic"), Error);
    CHECK_THROWS_WITH_AS(Mat::block_diag({}), doctest::Contains("EmptyBlockList"), Error);
  }

  TEST_CASE("eliminate on the frozen cases") {
    auto e = eliminate(Mat::identity(F2(), 3));
    CHECK(e.rank == 3);
    CHECK(e.kernel_basis.empty());

    e = eliminate(Mat::zero(F3(), 2, 2));
    CHECK(e.rank == 0);
    CHECK(e.kernel_basis.size() == 2);

    Mat A = M(F5(), {{1, 2}, {2, 4}});
    e = eliminate(A);
    CHECK(e.rank == 1);
    REQUIRE(e.kernel_basis.size() == 1);
    CHECK((A * e.kernel_basis[0]).is_zero());
    CHECK(e.transform * A == e.rref);
  }

  TEST_CASE("eliminate transform is invertible on random matrices") {
    std::mt19937_64 rng(5);
    for (const auto &F : {F2(), F3(), F5(), F4()}) {
      for (int t = 0; t < 40; ++t) {
        Mat A = rand_mat(F, 4, 5, rng);
        auto e = eliminate(A);
        CHECK(e.transform * A == e.rref);
        CHECK(rank(e.transform) == 4);
        for (const auto &v : e.kernel_basis) CHECK((A * v).is_zero());
        CHECK(static_cast<int>(e.kernel_basis.size()) == 5 - e.rank);
      }
    }
  }

  TEST_CASE("solve and inverse") {
    auto F = F5();
    std::mt19937_64 rng(11);
    Mat A = rand_invertible(F, 4, rng);
    CHECK(A * inverse(A) == Mat::identity(F, 4));
    Mat b = rand_mat(F, 4, 1, rng);
    auto x = solve(A, b);
    REQUIRE(x.has_value());
    CHECK(A * *x == b);
    // inconsistent system
    Mat Z = Mat::zero(F, 2, 2);
    Mat c(F, 2, 1);
    c.at(0, 0) = 1;
    CHECK_FALSE(solve(Z, c).has_value());
  }

  TEST_CASE("hessenberg ladder on frozen cases") {
    auto F = F5();
    // [[a,b],[1,c]]: chi = (X-c)(X-a) - b
    Mat A = M(F, {{2, 3}, {1, 4}});
    auto [chi, ladder] = hessenberg_charpoly(A);
    Poly expect = (Poly::x(F) - Poly::constant(F, 4)) * (Poly::x(F) - Poly::constant(F, 2)) -
                  Poly::constant(F, 3);
    CHECK(chi == expect);
    REQUIRE(ladder.size() == 3);
    CHECK(ladder[0].is_one());

    auto [chi3, ladder3] = hessenberg_charpoly(Mat::companion(Poly::x_pow(F, 3)));
    CHECK(chi3 == Poly::x_pow(F, 3));
    REQUIRE(ladder3.size() == 4);
    for (int i = 0; i <= 3; ++i) CHECK(ladder3[static_cast<std::size_t>(i)] == Poly::x_pow(F, i));

    Mat bad = M(F, {{0, 0}, {2, 0}});
    CHECK_THROWS_WITH_AS(hessenberg_charpoly(bad),
                         doctest::Contains("NotUnitSubdiagonalHessenberg"), Error);
  }

  TEST_CASE("hessenberg agrees with char_poly on 500 random good cyclic matrices") {
    for (const auto &F : {F2(), F3(), F5()}) {
      std::mt19937_64 rng(77 ^ F->q());
      for (int t = 0; t < 500; ++t) {
        int n = 1 + static_cast<int>(rng() % 5);
        Mat A = rand_good_cyclic(F, n, rng);
        CHECK(hessenberg_charpoly(A).first == char_poly(A));
      }
    }
  }

  TEST_CASE("predicates") {
    auto F = F3();
    CHECK(M(F, {{1, 1}, {0, 0}}).is_idempotent());
    CHECK_FALSE(M(F, {{1, 1}, {0, 1}}).is_idempotent());
    CHECK(M(F, {{2}}).is_good_cyclic());
    CHECK(Mat::companion(P(F, {1, 1, 0, 1})).is_good_cyclic());
    CHECK_FALSE(Mat::zero(F, 2, 2).is_good_cyclic());
  }

  TEST_CASE("polynomial evaluation at a matrix") {
    auto F = F2();
    Mat J = M(F, {{0, 1}, {0, 0}});
    CHECK(poly_eval(Poly::x_pow(F, 2), J).is_zero());
    Mat v(F, 2, 1);
    v.at(1, 0) = 1;
    CHECK(poly_apply(Poly::x(F), J, v) == M(F, {{1}, {0}}));
  }
}

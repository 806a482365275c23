#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "idemsum/json_io.hpp"

using namespace idemsum;
using namespace testutil;

TEST_SUITE("json") {
  TEST_CASE("field round-trip") {
    for (const auto &F : {F2(), F3(), F4(), F5(), F9()}) {
      FieldPtr G = field_from_json(field_to_json(F));
      CHECK(*G == *F);
    }
    CHECK(field_to_json(F3()).contains("modulus") == false);
    CHECK(field_to_json(F4())["modulus"] == json({1, 1, 1}));
  }

  TEST_CASE("element encoding") {
    CHECK(elem_to_json(F5(), 3) == json(3));
    CHECK(elem_to_json(F4(), F4()->from_coords({0, 1})) == json({0, 1}));
    CHECK(elem_from_json(F4(), json({0, 1})) == F4()->from_coords({0, 1}));
    CHECK_THROWS_WITH_AS(elem_from_json(F3(), json(5)), doctest::Contains("MalformedInput"),
                         Error);
  }

  TEST_CASE("matrix round-trip") {
    std::mt19937_64 rng(11);
    for (const auto &F : {F3(), F9()}) {
      Mat A = rand_mat(F, 3, 2, rng);
      Mat B = mat_from_json(mat_to_json(A));
      CHECK(A == B);
    }
    CHECK_THROWS_WITH_AS(mat_from_json(json::object()), doctest::Contains("MalformedInput"),
                         Error);
  }

  TEST_CASE("certificate round-trip and determinism") {
    Mat A = Mat::identity(F3(), 2);
    DecompCert c = make_cert(A, {1}, {A}, "small3", 42);
    json j = cert_to_json(c);
    DecompCert back = cert_from_json(j);
    CHECK(back.signs == c.signs);
    CHECK(back.parts.size() == c.parts.size());
    CHECK(back.parts[0] == c.parts[0]);
    CHECK(back.seed == 42);
    CHECK(back.pipeline == "small3");
    CHECK(verify_cert(A, back));
    CHECK(j.dump() == cert_to_json(c).dump());
  }
}

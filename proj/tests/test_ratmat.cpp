#include <catch2/catch_amalgamated.hpp>

#include "chainalg/ratmat.hpp"

using namespace chainalg;

TEST_CASE("rational helpers") {
  CHECK(rat(1, 2) + rat(1, 3) == rat(5, 6));
  CHECK(rat_str(rat(-3, 6)) == "-1/2");
  CHECK(rat_str(rat(4, 2)) == "2");
  CHECK_THROWS_AS(rat(1, 0), std::invalid_argument);
  CHECK(to_double(rat(1, 4)) == 0.25);
}

TEST_CASE("matrix arithmetic") {
  RatMat a(2, 2), b(2, 2);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(1, 0) = 3;
  a(1, 1) = 4;
  b(0, 1) = 1;

  RatMat ab = a * b;
  CHECK(ab(0, 1) == 1);
  CHECK(ab(1, 1) == 3);
  CHECK(ab(0, 0) == 0);

  CHECK((a - a).is_zero());
  CHECK((a * rat(1, 2))(1, 1) == 2);
  CHECK((rat(1, 2) * a)(1, 1) == 2);
  CHECK(a.transpose()(0, 1) == 3);
  CHECK(a.trace() == 5);

  RatMat c = commutator(a, b);
  CHECK(c == a * b - b * a);
}

TEST_CASE("rref, rank, nullspace") {
  // rank-1 matrix with a 2-dimensional kernel
  RatMat m(2, 3);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(0, 2) = 3;
  m(1, 0) = 2;
  m(1, 1) = 4;
  m(1, 2) = 6;

  CHECK(m.rank() == 1);
  const auto ns = m.nullspace();
  REQUIRE(ns.size() == 2);
  for (const auto& v : ns) CHECK(is_zero(m.mul(v)));
  CHECK(span_rank(ns) == 2);
}

TEST_CASE("solve") {
  RatMat a(2, 2);
  a(0, 0) = 2;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 1;
  RatVec b{rat(3), rat(2)};
  const auto x = a.solve(b);
  REQUIRE(x.has_value());
  CHECK((*x)[0] == 1);
  CHECK((*x)[1] == 1);

  // inconsistent system
  RatMat s(2, 1);
  s(0, 0) = 1;
  s(1, 0) = 2;
  CHECK_FALSE(s.solve(RatVec{rat(1), rat(3)}).has_value());
}

TEST_CASE("inverse") {
  RatMat a(2, 2);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(1, 0) = 3;
  a(1, 1) = 4;
  const auto inv = a.inverse();
  REQUIRE(inv.has_value());
  CHECK((a * *inv) == RatMat::identity(2));
  CHECK((*inv * a) == RatMat::identity(2));

  RatMat sing(2, 2);
  sing(0, 0) = 1;
  sing(1, 1) = 0;
  CHECK_FALSE(sing.inverse().has_value());
}

TEST_CASE("double conversion") {
  RatMat a(1, 2);
  a(0, 0) = rat(1, 2);
  a(0, 1) = rat(-3, 4);
  Eigen::MatrixXd d = a.to_double();
  CHECK(d(0, 0) == 0.5);
  CHECK(d(0, 1) == -0.75);
  RatMat back = RatMat::from_double_exact(d, 4);
  CHECK(back == a);
}

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "chainalg/chains.hpp"
#include "chainalg/extension.hpp"

using namespace chainalg;

namespace {

// tangent coordinates of xi after moving it into the normalized frame
AlgebraElement frame_adapted_tangent(const AlgebraElement& x2, const AlgebraElement& x1) {
  const auto z = solve_transversal(x2, x1);
  return adjoint_exact(exp_exact(z), x2);
}

}  // namespace

TEST_CASE("chain through the base point") {
  const auto a = GradedAlgebra::lagrangean(1);
  const auto x = base_point(a);

  SECTION("pure transverse direction keeps the identity frame") {
    const auto xi = a.basis_element(a.component("g-2").begin);
    const auto c = chain_through(x, xi);
    CHECK(c.frame.rep.isIdentity(1e-14));
    CHECK(c.direction == xi);
    CHECK(same_point(chain_point(c, 0), x));

    // the grade -2 generator squares to zero, so the flow is affine
    Eigen::MatrixXd want = Eigen::MatrixXd::Identity(3, 3) + a.matrix(xi).to_double();
    CHECK(same_point(chain_point(c, 1), {group_element(a, want)}));
  }

  SECTION("mixed direction is absorbed by a grade-1 frame correction") {
    const auto xi = a.basis_element(a.component("g-2").begin) +
                    a.basis_element(a.component("g-1L").begin);
    const auto c = chain_through(x, xi);
    const auto want = exp_exact(a.basis_element(a.component("g1R").begin)).to_double();
    CHECK((c.frame.rep - want).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(same_point(chain_point(c, 0), x));
  }

  SECTION("directions tangent to the contact distribution are refused") {
    CHECK_THROWS_AS(chain_through(x, a.basis_element(a.component("g-1L").begin)),
                    std::invalid_argument);
    CHECK_THROWS_AS(chain_through(x, a.basis_element(a.component("g0").begin)),
                    std::invalid_argument);
    CHECK_THROWS_AS(chain_through(x, a.zero()), std::invalid_argument);
  }
}

TEST_CASE("normalized frame reproduces the requested tangent") {
  std::mt19937_64 rng(61);
  for (const auto& a : {GradedAlgebra::lagrangean(1), GradedAlgebra::lagrangean(2),
                        GradedAlgebra::cr(1, 1), GradedAlgebra::cr(2, 1)}) {
    for (int trial = 0; trial < 4; ++trial) {
      auto xi = random_element_rat(a, rng, [](int g) { return g < 0; });
      xi.coords[a.component("g-2").begin] += 1;  // keep it transverse
      auto x2 = a.zero(), x1 = a.zero();
      for (size_t i = 0; i < a.dim(); ++i)
        (a.grade_of(i) == -2 ? x2 : x1).coords[i] = xi.coords[i];

      // Ad(exp Z) carries the pure direction back onto xi modulo the parabolic
      const auto adapted = frame_adapted_tangent(x2, x1);
      const auto diff = adapted - xi;
      for (size_t i = 0; i < a.dim(); ++i)
        if (diff.coords[i] != 0) CHECK(a.grade_of(i) >= 0);
    }
  }
}

TEST_CASE("chart at the identity coset") {
  const auto a = GradedAlgebra::lagrangean(1);
  const auto x = base_point(a);
  CHECK(chart_coords(x).norm() == 0.0);

  const auto c = chain_through(x, a.basis_element(a.component("g-2").begin));
  for (double t : {1.0, -0.7, 0.3}) {
    const auto u = chart_coords(chain_point(c, t));
    REQUIRE(u.size() == 3);
    CHECK(std::abs(u(0)) < 1e-14);
    CHECK(std::abs(u(1) - t) < 1e-14);
    CHECK(std::abs(u(2)) < 1e-14);
  }

  SECTION("chart velocity at the origin matches the direction coordinates") {
    auto xi = a.zero();
    xi.coords[a.component("g-2").begin] = 2;
    xi.coords[a.component("g-1L").begin] = 3;
    xi.coords[a.component("g-1R").begin] = 5;
    const auto cc = chain_through(x, xi);
    const double h = 1e-5;
    const Eigen::VectorXd vel =
        (chart_coords(chain_point(cc, h)) - chart_coords(chain_point(cc, -h))) / (2 * h);
    CHECK(std::abs(vel(0) - 3) < 1e-7);
    CHECK(std::abs(vel(1) - 2) < 1e-7);
    CHECK(std::abs(vel(2) + 5) < 1e-7);
  }

  SECTION("points with a vanishing minor fall outside the chart") {
    Eigen::MatrixXd flip(3, 3);
    flip << 0, 0, -1, 0, 1, 0, 1, 0, 0;
    CHECK_THROWS_AS(chart_coords({group_element(a, flip)}), std::domain_error);
  }

  SECTION("only the lagrangean model carries the chart") {
    const auto cr = GradedAlgebra::cr(1, 1);
    CHECK_THROWS_AS(chart_coords(base_point(cr)), std::logic_error);
    const auto path = GradedAlgebra::path(2);
    CHECK_THROWS_AS(chart_coords(base_point(path)), std::logic_error);
  }
}

TEST_CASE("point equality on the flag space") {
  const auto a = GradedAlgebra::lagrangean(2);
  const auto x = base_point(a);

  auto z2 = a.zero();
  z2.coords[a.component("g2").begin] = rat(1, 3);
  RatMat p = exp_exact(z2);
  p(0, 0) = rat(5, 4);
  p(3, 3) = rat(4, 5);
  CHECK(same_point(x, {group_element(a, p.to_double())}));

  auto down = a.zero();
  down.coords[a.component("g-1L").begin] = rat(1, 2);
  CHECK_FALSE(same_point(x, {exp_group(down)}));

  const auto b = GradedAlgebra::lagrangean(1);
  CHECK_THROWS_AS(same_point(x, base_point(b)), std::invalid_argument);
}

TEST_CASE("chains are independent of the frame freedom") {
  std::mt19937_64 rng(67);
  for (int n : {1, 2}) {
    const auto a = GradedAlgebra::lagrangean(n);
    const auto x = base_point(a);
    auto xi = random_element_rat(a, rng, [](int g) { return g < 0; }, 4, 2);
    xi.coords[a.component("g-2").begin] += 2;
    const auto c1 = chain_through(x, xi);

    SECTION("principal right action on the frame, n=" + std::to_string(n)) {
      const auto q = random_q(a, rng, 0.25);
      const ChainCurve c2{multiply(c1.frame, q), c1.direction};
      CHECK(chain_set_distance(c1, c2, 0.25, 11) <= 1e-8);
    }

    SECTION("change of coset representative, n=" + std::to_string(n)) {
      auto z1 = a.zero(), z2 = a.zero();
      z1.coords[a.component("g1L").begin] = rat(1, 2);
      z1.coords[a.component("g1R").begin + (n > 1 ? 1 : 0)] = rat(-1, 3);
      z2.coords[a.component("g2").begin] = rat(1, 4);
      RatMat p = exp_exact(z1) * exp_exact(z2);
      p(0, 0) = rat(5, 4);
      p(n + 1, n + 1) = rat(4, 5);
      const auto pinv = p.inverse();
      REQUIRE(pinv);

      const auto xi2 = minus_truncation(adjoint_exact(*pinv, xi));
      const auto c2 = chain_through({group_element(a, p.to_double())}, xi2);
      CHECK(chain_set_distance(c1, c2, 0.25, 11) <= 1e-8);
    }

    SECTION("rescaling the direction, n=" + std::to_string(n)) {
      const auto c2 = chain_through(x, rat(3, 2) * xi);
      CHECK(c2.frame.rep.isApprox(c1.frame.rep, 1e-12));
      CHECK(chain_set_distance(c1, c2, 0.25, 11) <= 1e-8);
    }

    SECTION("distinct chains stay apart, n=" + std::to_string(n)) {
      auto eta = xi;
      eta.coords[a.component("g-1L").begin] += 1;
      const auto c3 = chain_through(x, eta);
      CHECK(chain_set_distance(c1, c3, 0.25, 11) > 1e-3);

      auto off = a.zero();
      off.coords[a.component("g-1R").begin] = rat(1, 2);
      const ChainCurve c4{multiply(c1.frame, exp_group(off)), c1.direction};
      CHECK(chain_set_distance(c1, c4, 0.25, 11) > 1e-3);
    }
  }
}

TEST_CASE("sampling a chain") {
  const auto a = GradedAlgebra::lagrangean(2);
  const auto c = chain_through(base_point(a), a.basis_element(a.component("g-2").begin));
  const auto pts = sample_chain(c, {0.0, 0.5, -0.5});
  REQUIRE(pts.size() == 3);
  CHECK(same_point(pts[0], base_point(a)));
  CHECK_FALSE(same_point(pts[1], base_point(a)));
  CHECK_FALSE(same_point(pts[1], pts[2]));
}

TEST_CASE("chain machinery runs on the cr model") {
  const auto a = GradedAlgebra::cr(1, 1);
  const auto x = base_point(a);
  auto xi = a.basis_element(a.component("g-2").begin) +
            a.basis_element(a.component("g-1").begin + 1);
  const auto c = chain_through(x, xi);
  CHECK(same_point(chain_point(c, 0), x));
  CHECK_FALSE(same_point(chain_point(c, 0.4), x));
  for (size_t i = 0; i < a.dim(); ++i)
    if (c.direction.coords[i] != 0) CHECK(a.grade_of(i) == -2);
}

TEST_CASE("the path geometry of chains is not flat") {
  CHECK_FALSE(psi_alpha(lagrangean_pair(1)).is_zero());
  CHECK_FALSE(psi_alpha(lagrangean_pair(2)).is_zero());
  CHECK_FALSE(psi_alpha(cr_pair(1, 1)).is_zero());
}

#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "chainalg/algebra.hpp"

namespace chainalg {

// Group element of PGL(n+2,R), PGL(m+2,R) or PSU(p+1,q+1) (realified),
// represented by a matrix with |det| = 1. Two representatives describe the
// same element iff they differ by a central scalar; see equal_mod_center.
struct GroupElement {
  const GradedAlgebra* alg = nullptr;
  Eigen::MatrixXd rep;
};

inline GroupElement group_element(const GradedAlgebra& alg, Eigen::MatrixXd m) {
  if (size_t(m.rows()) != alg.ambient() || size_t(m.cols()) != alg.ambient())
    throw std::invalid_argument("group representative has the wrong size");
  const double det = m.determinant();
  if (!(std::abs(det) > 1e-100)) throw std::invalid_argument("singular group representative");
  m /= std::pow(std::abs(det), 1.0 / double(alg.ambient()));
  return {&alg, std::move(m)};
}

inline GroupElement identity(const GradedAlgebra& alg) {
  return {&alg, Eigen::MatrixXd::Identity(alg.ambient(), alg.ambient())};
}

inline GroupElement multiply(const GroupElement& a, const GroupElement& b) {
  if (a.alg != b.alg) throw std::invalid_argument("mismatched groups");
  return group_element(*a.alg, a.rep * b.rep);
}

inline GroupElement inverse(const GroupElement& a) {
  return group_element(*a.alg, a.rep.inverse());
}

inline GroupElement exp_group(const ElementF& x) {
  return group_element(*x.alg, x.alg->matrix_d(x).exp());
}
inline GroupElement exp_group(const AlgebraElement& x) { return exp_group(x.alg->to_float(x)); }

// Exact matrix exponential; defined only for nilpotent arguments.
inline RatMat exp_exact(const AlgebraElement& x) {
  const RatMat m = x.alg->matrix(x);
  const size_t N = m.rows();
  RatMat sum = RatMat::identity(N);
  RatMat term = RatMat::identity(N);
  Rat fact = 1;
  for (size_t k = 1; k <= N; ++k) {
    term = term * m;
    if (term.is_zero()) return sum;
    fact *= Rat(int(k));
    sum = sum + term * (Rat(1) / fact);
  }
  throw std::invalid_argument("exp_exact needs a nilpotent argument");
}

// Central scalars: +/-1 for the real projective families, any unit complex
// scalar (realified) for the cr family.
inline bool equal_mod_center(const GroupElement& a, const GroupElement& b, double tol = 1e-10) {
  if (a.alg != b.alg) return false;
  const double scale = a.rep.lpNorm<Eigen::Infinity>() + b.rep.lpNorm<Eigen::Infinity>();
  if (a.alg->family() != Family::cr) {
    const double dm = (a.rep - b.rep).lpNorm<Eigen::Infinity>();
    const double dp = (a.rep + b.rep).lpNorm<Eigen::Infinity>();
    return std::min(dm, dp) <= tol * scale;
  }
  const Eigen::MatrixXd c = a.rep * b.rep.inverse();
  const size_t N = a.alg->ambient() / 2;
  double re = 0, im = 0;
  for (size_t k = 0; k < N; ++k) {
    re += c(k, k) + c(k + N, k + N);
    im += c(k + N, k) - c(k, k + N);
  }
  re /= double(2 * N);
  im /= double(2 * N);
  Eigen::MatrixXd scalar = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  for (size_t k = 0; k < N; ++k) {
    scalar(k, k) = re;
    scalar(k + N, k + N) = re;
    scalar(k, k + N) = -im;
    scalar(k + N, k) = im;
  }
  return std::abs(re * re + im * im - 1.0) <= tol * 10 &&
         (c - scalar).lpNorm<Eigen::Infinity>() <= tol * (1.0 + c.lpNorm<Eigen::Infinity>());
}

// Ad(g) x = g X g^{-1}, expressed in algebra coordinates. The projection
// residual guards against images that leave the algebra.
inline ElementF adjoint(const GroupElement& g, const ElementF& x) {
  if (g.alg != x.alg) throw std::invalid_argument("mismatched algebra");
  const Eigen::MatrixXd m = g.rep * x.alg->matrix_d(x) * g.rep.inverse();
  ElementF r = x.alg->project_coords_d(m);
  const double resid = (x.alg->matrix_d(r) - m).lpNorm<Eigen::Infinity>();
  if (resid > 1e-6 * (1.0 + m.lpNorm<Eigen::Infinity>()))
    throw std::domain_error("adjoint image left the algebra");
  return r;
}
inline ElementF adjoint(const GroupElement& g, const AlgebraElement& x) {
  return adjoint(g, x.alg->to_float(x));
}

// Exact adjoint for rational representatives (e.g. exp_exact images).
inline AlgebraElement adjoint_exact(const RatMat& g, const AlgebraElement& x) {
  const auto inv = g.inverse();
  if (!inv) throw std::invalid_argument("singular representative");
  return x.alg->from_matrix(g * x.alg->matrix(x) * *inv);
}

namespace detail {
// Block starts (4 entries) of the 3-block parabolic pattern, on the complex
// side for the cr family.
inline std::array<size_t, 4> block_bounds(const GradedAlgebra& a) {
  switch (a.family()) {
    case Family::lagrangean: {
      const size_t n = a.param();
      return {0, 1, n + 1, n + 2};
    }
    case Family::path:
      return {0, 1, 2, size_t(a.param()) + 2};
    case Family::cr: {
      const size_t n = a.param();
      return {0, 1, n + 1, n + 2};
    }
  }
  throw std::logic_error("unreachable");
}

template <typename Mat>
struct BlockDecomp {
  Mat g0;      // block diagonal part
  Mat z1, z2;  // nilpotent matrices with g = g0 exp(z1) exp(z2)
};

// Generic 3-block upper-triangular decomposition over real or complex scalars.
template <typename Mat>
BlockDecomp<Mat> decompose_blocks(const Mat& g, const std::array<size_t, 4>& b, double tol,
                                  double scale) {
  const size_t N = g.rows();
  auto blk = [&](size_t i, size_t j) {
    return g.block(b[i], b[j], b[i + 1] - b[i], b[j + 1] - b[j]);
  };
  double below = 0;
  for (size_t i = 1; i < 3; ++i)
    for (size_t j = 0; j < i; ++j) below = std::max(below, blk(i, j).cwiseAbs().maxCoeff());
  if (below > tol * scale) throw std::domain_error("element is not in the parabolic subgroup");

  const Mat A = blk(0, 0), B = blk(1, 1), C = blk(2, 2);
  for (const Mat* m : {&A, &B, &C})
    if (std::abs(Eigen::JacobiSVD<Mat>(*m).singularValues().minCoeff()) < tol * scale)
      throw std::domain_error("degenerate diagonal block");

  const Mat U = A.inverse() * blk(0, 1);
  const Mat V = B.inverse() * blk(1, 2);
  const Mat W = A.inverse() * blk(0, 2) - Mat(U * V) / 2.0;

  BlockDecomp<Mat> r{Mat::Zero(N, N), Mat::Zero(N, N), Mat::Zero(N, N)};
  r.g0.block(b[0], b[0], A.rows(), A.cols()) = A;
  r.g0.block(b[1], b[1], B.rows(), B.cols()) = B;
  r.g0.block(b[2], b[2], C.rows(), C.cols()) = C;
  r.z1.block(b[0], b[1], U.rows(), U.cols()) = U;
  r.z1.block(b[1], b[2], V.rows(), V.cols()) = V;
  r.z2.block(b[0], b[2], W.rows(), W.cols()) = W;
  return r;
}

inline Eigen::MatrixXcd complexify(const Eigen::MatrixXd& m, double tol) {
  const size_t N = m.rows() / 2;
  const Eigen::MatrixXd tl = m.topLeftCorner(N, N), tr = m.topRightCorner(N, N),
                        bl = m.bottomLeftCorner(N, N), br = m.bottomRightCorner(N, N);
  const double defect = std::max((tl - br).lpNorm<Eigen::Infinity>(),
                                 (tr + bl).lpNorm<Eigen::Infinity>());
  if (defect > tol * (1.0 + m.lpNorm<Eigen::Infinity>()))
    throw std::domain_error("representative is not complex-linear");
  return tl.cast<std::complex<double>>() + std::complex<double>(0, 1) * bl.cast<std::complex<double>>();
}

inline Eigen::MatrixXd realify_d(const Eigen::MatrixXcd& m) {
  const size_t N = m.rows();
  Eigen::MatrixXd r(2 * N, 2 * N);
  r.topLeftCorner(N, N) = m.real();
  r.bottomRightCorner(N, N) = m.real();
  r.topRightCorner(N, N) = -m.imag();
  r.bottomLeftCorner(N, N) = m.imag();
  return r;
}
}  // namespace detail

struct PDecomposition {
  GroupElement g0;
  ElementF z1, z2;  // g = g0 exp(z1) exp(z2), z1 of grade 1, z2 of grade 2
};

// Splits an element of the parabolic P = G0 exp(g1) exp(g2); throws when the
// representative is not block upper triangular (up to central rescaling).
inline PDecomposition decompose_p(const GroupElement& g, double tol = 1e-10) {
  const GradedAlgebra& a = *g.alg;
  const auto b = detail::block_bounds(a);
  const double scale = 1.0 + g.rep.lpNorm<Eigen::Infinity>();

  Eigen::MatrixXd g0m, z1m, z2m;
  if (a.family() != Family::cr) {
    auto d = detail::decompose_blocks<Eigen::MatrixXd>(g.rep, b, tol, scale);
    g0m = d.g0;
    z1m = d.z1;
    z2m = d.z2;
  } else {
    const Eigen::MatrixXcd gc = detail::complexify(g.rep, tol);
    auto d = detail::decompose_blocks<Eigen::MatrixXcd>(gc, b, tol, scale);
    g0m = detail::realify_d(d.g0);
    z1m = detail::realify_d(d.z1);
    z2m = detail::realify_d(d.z2);
  }

  ElementF z1 = a.project_coords_d(z1m);
  ElementF z2 = a.project_coords_d(z2m);
  const double r1 = (a.matrix_d(z1) - z1m).lpNorm<Eigen::Infinity>();
  const double r2 = (a.matrix_d(z2) - z2m).lpNorm<Eigen::Infinity>();
  if (r1 > tol * scale * 10 || r2 > tol * scale * 10)
    throw std::domain_error("nilpotent parts do not lie in the algebra");
  for (size_t i = 0; i < a.dim(); ++i) {
    if (a.grade_of(i) != 1 && std::abs(z1.coords[i]) > tol * scale)
      throw std::domain_error("grade-1 part is contaminated");
    if (a.grade_of(i) != 2 && std::abs(z2.coords[i]) > tol * scale)
      throw std::domain_error("grade-2 part is contaminated");
  }

  GroupElement g0 = group_element(a, g0m);
  // reconstruction check: g ~ g0 exp(z1) exp(z2) mod center
  const Eigen::MatrixXd recon = g0.rep * z1m.exp() * z2m.exp();
  if (!equal_mod_center(g, GroupElement{&a, recon}, std::max(tol, 1e-12) * 100))
    throw std::domain_error("parabolic decomposition failed to reassemble");
  return {std::move(g0), std::move(z1), std::move(z2)};
}

// Q = G0 exp(g2): the parabolic elements with vanishing grade-1 factor.
inline bool in_q(const GroupElement& g, double tol = 1e-10) {
  try {
    const auto d = decompose_p(g, tol);
    return d.z1.coords.lpNorm<Eigen::Infinity>() <= tol * (1.0 + g.rep.lpNorm<Eigen::Infinity>());
  } catch (const std::domain_error&) {
    return false;
  }
}

// Exact solve of [Z, x2] = x1 for Z of grade 1, given x2 of grade -2 and
// x1 of grade -1. Throws when x2 = 0 or no solution exists.
inline AlgebraElement solve_transversal(const AlgebraElement& x2, const AlgebraElement& x1) {
  const GradedAlgebra& a = *x2.alg;
  if (x1.alg != &a) throw std::invalid_argument("mismatched algebras");
  if (x2.is_zero()) throw std::invalid_argument("transversal base direction is zero");
  std::vector<size_t> g1, gm1;
  for (size_t i = 0; i < a.dim(); ++i) {
    if (a.grade_of(i) == 1) g1.push_back(i);
    if (a.grade_of(i) == -1) gm1.push_back(i);
  }
  for (size_t i = 0; i < a.dim(); ++i) {
    if (a.grade_of(i) != -2 && x2.coords[i] != 0)
      throw std::invalid_argument("base direction must have pure grade -2");
    if (a.grade_of(i) != -1 && x1.coords[i] != 0)
      throw std::invalid_argument("target must have pure grade -1");
  }

  RatMat m(gm1.size(), g1.size());
  for (size_t j = 0; j < g1.size(); ++j) {
    const auto br = a.bracket(a.basis_element(g1[j]), x2);
    for (size_t i = 0; i < gm1.size(); ++i) m(i, j) = br.coords[gm1[i]];
  }
  RatVec rhs(gm1.size());
  for (size_t i = 0; i < gm1.size(); ++i) rhs[i] = x1.coords[gm1[i]];
  const auto sol = m.solve(rhs);
  if (!sol) throw std::domain_error("no grade-1 solution for this direction");
  auto z = a.zero();
  for (size_t j = 0; j < g1.size(); ++j) z.coords[g1[j]] = (*sol)[j];
  return z;
}

// --- sampling helpers (seeded, for property tests and spot checks) ---

inline ElementF random_element_f(const GradedAlgebra& a, std::mt19937_64& rng,
                                 const std::function<bool(int)>& keep_grade,
                                 double scale = 0.6) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(a.dim());
  for (size_t i = 0; i < a.dim(); ++i)
    if (keep_grade(a.grade_of(i))) c[i] = u(rng);
  return {&a, std::move(c)};
}

inline AlgebraElement random_element_rat(const GradedAlgebra& a, std::mt19937_64& rng,
                                         const std::function<bool(int)>& keep_grade,
                                         int denom = 8, int span = 16) {
  std::uniform_int_distribution<int> u(-span, span);
  auto x = a.zero();
  for (size_t i = 0; i < a.dim(); ++i)
    if (keep_grade(a.grade_of(i))) x.coords[i] = rat(u(rng), denom);
  return x;
}

inline GroupElement random_group_element(const GradedAlgebra& a, std::mt19937_64& rng,
                                         double scale = 0.5) {
  return exp_group(random_element_f(a, rng, [](int) { return true; }, scale));
}

inline GroupElement random_g0(const GradedAlgebra& a, std::mt19937_64& rng, double scale = 0.6) {
  return exp_group(random_element_f(a, rng, [](int g) { return g == 0; }, scale));
}

// Sign twists reaching the non-identity components of G0 for the real
// families (the cr group is connected).
inline GroupElement component_twist(const GradedAlgebra& a, std::mt19937_64& rng) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(a.ambient(), a.ambient());
  if (a.family() == Family::cr) return {&a, std::move(t)};
  std::uniform_int_distribution<int> coin(0, 1);
  if (coin(rng)) t(0, 0) = -1;
  if (coin(rng)) t(a.ambient() - 1, a.ambient() - 1) = -1;
  return group_element(a, std::move(t));
}

inline GroupElement random_q(const GradedAlgebra& a, std::mt19937_64& rng, double scale = 0.6) {
  const auto g0 = multiply(random_g0(a, rng, scale), component_twist(a, rng));
  const auto z2 = random_element_f(a, rng, [](int g) { return g == 2; }, scale);
  return multiply(g0, exp_group(z2));
}

inline GroupElement random_parabolic(const GradedAlgebra& a, std::mt19937_64& rng,
                                     double scale = 0.6) {
  const auto z1 = random_element_f(a, rng, [](int g) { return g == 1; }, scale);
  return multiply(random_q(a, rng, scale), exp_group(z1));
}

}  // namespace chainalg

#pragma once

// Recovering the contact structure from the symmetrized cubic tensor
// S = sym (xi, eta, zeta) -> L(xi, J eta) J zeta.  The vanishing locus
// {S(x,x,x) = 0 and S(x,x,eta) a nonzero multiple of x} is exactly the
// eigenvector set of the structure operator, so the two distinguished
// subbundles (product case), or the complex structure up to sign (complex
// case, after complexifying), can be solved for from S alone.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chainalg {

// relative tolerances; every threshold scales with |S| and the argument norms
inline constexpr double kCubicTol = 1e-8;      // |S(x,x,x)| on membership
inline constexpr double kParallelTol = 1e-8;   // off-axis part of S(x,x,eta)
inline constexpr double kNonzeroTol = 1e-6;    // "nonzero multiple" floor
inline constexpr double kClusterTol = 3e-7;    // same-component predicate
inline constexpr double kFlatnessTol = 1e-7;   // rank-n defect of a cluster
inline constexpr double kConjugateTol = 1e-6;  // conjugacy of the two components

struct ContactFiber {
  Eigen::MatrixXd levi;       // antisymmetric, nondegenerate
  Eigen::MatrixXd structure;  // squares to +id (product) or -id (complex)
  bool product = true;
};

inline void check_fiber(const ContactFiber& f, double tol = 1e-9) {
  const Eigen::Index d = f.levi.rows();
  if (d == 0 || d % 2 != 0 || f.levi.cols() != d || f.structure.rows() != d ||
      f.structure.cols() != d)
    throw std::invalid_argument("fiber matrices must be square of even size");
  const double ls = f.levi.lpNorm<Eigen::Infinity>();
  if ((f.levi + f.levi.transpose()).lpNorm<Eigen::Infinity>() > tol * ls)
    throw std::invalid_argument("levi form is not antisymmetric");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(f.levi);
  if (svd.singularValues()(d - 1) <= tol * svd.singularValues()(0))
    throw std::invalid_argument("levi form is degenerate");

  const Eigen::MatrixXd& J = f.structure;
  const double js = 1.0 + J.lpNorm<Eigen::Infinity>();
  const double sq = f.product ? 1.0 : -1.0;
  if ((J * J - sq * Eigen::MatrixXd::Identity(d, d)).lpNorm<Eigen::Infinity>() >
      tol * js * js)
    throw std::invalid_argument(
        f.product ? "structure operator does not square to the identity"
                  : "structure operator does not square to minus the identity");
  // product: both eigenspaces levi-isotropic; complex: levi invariant
  const Eigen::MatrixXd pulled = J.transpose() * f.levi * J;
  if ((pulled + sq * f.levi).lpNorm<Eigen::Infinity>() > tol * ls * js * js)
    throw std::invalid_argument(f.product
                                    ? "structure eigenspaces are not levi-isotropic"
                                    : "levi form is not structure-invariant");
  if (f.product && std::abs(J.trace()) > tol * js * double(d))
    throw std::invalid_argument("structure eigenspaces have unequal dimensions");
}

inline ContactFiber standard_fiber(size_t n, bool product) {
  const Eigen::Index m = Eigen::Index(n);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m, m);
  ContactFiber f;
  f.levi = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  f.levi.topRightCorner(m, m) = id;
  f.levi.bottomLeftCorner(m, m) = -id;
  f.structure = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  f.product = product;
  if (product) {
    f.structure.topLeftCorner(m, m) = id;
    f.structure.bottomRightCorner(m, m) = -id;
  } else {
    f.structure.topRightCorner(m, m) = -id;
    f.structure.bottomLeftCorner(m, m) = id;
  }
  return f;
}

// change of fiber basis by an invertible matrix: vectors pull back through t
inline ContactFiber conjugate_fiber(const ContactFiber& f, const Eigen::MatrixXd& t) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(t);
  if (!lu.isInvertible()) throw std::invalid_argument("basis change must be invertible");
  return {t.transpose() * f.levi * t, lu.solve(f.structure * t), f.product};
}

struct CubicTensor {
  size_t dim = 0;
  std::vector<double> coef;  // value index varies fastest

  double& at(size_t i, size_t j, size_t k, size_t l) {
    return coef[((i * dim + j) * dim + k) * dim + l];
  }
  double at(size_t i, size_t j, size_t k, size_t l) const {
    return coef[((i * dim + j) * dim + k) * dim + l];
  }
  double norm() const {
    double s = 0;
    for (double c : coef) s += c * c;
    return std::sqrt(s);
  }
};

inline CubicTensor make_cubic(size_t dim) {
  return {dim, std::vector<double>(dim * dim * dim * dim, 0.0)};
}

template <typename Vec>
Vec evaluate(const CubicTensor& s, const Vec& x, const Vec& y, const Vec& z) {
  using Scalar = typename Vec::Scalar;
  const size_t d = s.dim;
  if (size_t(x.size()) != d || size_t(y.size()) != d || size_t(z.size()) != d)
    throw std::invalid_argument("argument dimension mismatch");
  Vec out = Vec::Zero(Eigen::Index(d));
  for (size_t i = 0; i < d; ++i) {
    if (x[Eigen::Index(i)] == Scalar(0)) continue;
    for (size_t j = 0; j < d; ++j) {
      if (y[Eigen::Index(j)] == Scalar(0)) continue;
      const Scalar f = x[Eigen::Index(i)] * y[Eigen::Index(j)];
      for (size_t k = 0; k < d; ++k) {
        const Scalar g = f * z[Eigen::Index(k)];
        if (g == Scalar(0)) continue;
        for (size_t l = 0; l < d; ++l) out[Eigen::Index(l)] += g * s.at(i, j, k, l);
      }
    }
  }
  return out;
}

inline bool is_symmetric(const CubicTensor& s, double tol = 0.0) {
  const size_t d = s.dim;
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j)
      for (size_t k = 0; k < d; ++k)
        for (size_t l = 0; l < d; ++l) {
          const double v = s.at(i, j, k, l);
          if (std::abs(s.at(i, k, j, l) - v) > tol ||
              std::abs(s.at(j, i, k, l) - v) > tol)
            return false;
        }
  return true;
}

inline void validate_cubic(const CubicTensor& s) {
  if (s.dim < 2 || s.dim % 2 != 0)
    throw std::invalid_argument("tensor dimension must be even and at least 2");
  if (s.coef.size() != s.dim * s.dim * s.dim * s.dim)
    throw std::invalid_argument("coefficient storage has the wrong size");
  double mx = 0;
  for (double c : s.coef) mx = std::max(mx, std::abs(c));
  if (mx == 0)
    throw std::invalid_argument("the tensor vanishes identically; nothing to reconstruct");
  if (!is_symmetric(s, 1e-10 * mx))
    throw std::invalid_argument("the tensor is not symmetric");
}

// Average of L(xi, J eta) J zeta over the six argument orders; the result is
// exactly symmetric because each coefficient cell is written from one value.
inline CubicTensor build_s(const ContactFiber& f) {
  check_fiber(f);
  const size_t d = size_t(f.levi.rows());
  const Eigen::MatrixXd m = f.levi * f.structure;  // m(a,b) = L(e_a, J e_b)
  const Eigen::MatrixXd& j = f.structure;
  CubicTensor s = make_cubic(d);
  for (size_t a = 0; a < d; ++a)
    for (size_t b = a; b < d; ++b)
      for (size_t c = b; c < d; ++c) {
        Eigen::VectorXd v = m(Eigen::Index(a), Eigen::Index(b)) * j.col(Eigen::Index(c)) +
                            m(Eigen::Index(a), Eigen::Index(c)) * j.col(Eigen::Index(b)) +
                            m(Eigen::Index(b), Eigen::Index(a)) * j.col(Eigen::Index(c)) +
                            m(Eigen::Index(b), Eigen::Index(c)) * j.col(Eigen::Index(a)) +
                            m(Eigen::Index(c), Eigen::Index(a)) * j.col(Eigen::Index(b)) +
                            m(Eigen::Index(c), Eigen::Index(b)) * j.col(Eigen::Index(a));
        v /= 6.0;
        const std::array<size_t, 3> t = {a, b, c};
        std::array<size_t, 3> p = {0, 1, 2};
        do {
          for (size_t l = 0; l < d; ++l) s.at(t[p[0]], t[p[1]], t[p[2]], l) = v[Eigen::Index(l)];
        } while (std::next_permutation(p.begin(), p.end()));
      }
  return s;
}

// Membership in the reconstruction locus.  All thresholds are relative, so
// the answer is invariant under rescaling of s, of xi, and of the probes.
inline bool membership(const CubicTensor& s, const Eigen::VectorXd& xi,
                       const std::vector<Eigen::VectorXd>& probes) {
  const double xn = xi.norm();
  if (xn == 0) throw std::invalid_argument("membership needs a nonzero vector");
  if (probes.empty()) throw std::invalid_argument("membership needs at least one probe");
  const double sn = s.norm();
  if (evaluate(s, xi, xi, xi).norm() > kCubicTol * sn * xn * xn * xn) return false;
  for (const auto& eta : probes) {
    const Eigen::VectorXd w = evaluate(s, xi, xi, eta);
    const double scale = sn * xn * xn * eta.norm();
    if (scale == 0) continue;
    const double along = w.dot(xi) / (xn * xn);
    if ((w - along * xi).norm() <= kParallelTol * scale &&
        std::abs(along) * xn > kNonzeroTol * scale)
      return true;
  }
  return false;
}

struct ReconstructionReport {
  int seeds_used = 0;
  int iterations = 0;
  double max_residual = 0;      // worst accepted locus residual, relative
  double cluster_residual = 0;  // worst rank defect of a component cluster
};

namespace detail {

template <typename Scalar>
using DVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using DMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
DVec<Scalar> random_unit(size_t d, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  DVec<Scalar> v = DVec<Scalar>::Zero(Eigen::Index(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if constexpr (std::is_same_v<Scalar, std::complex<double>>)
      v[i] = Scalar(nd(gen), nd(gen));
    else
      v[i] = nd(gen);
  }
  v.normalize();
  return v;
}

// sin of the largest principal angle between the column spans
template <typename Scalar>
double subspace_gap_impl(const DMat<Scalar>& a, const DMat<Scalar>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.cols() == 0 || a.cols() > a.rows())
    throw std::invalid_argument("subspace bases must have matching shapes");
  Eigen::HouseholderQR<DMat<Scalar>> qa(a), qb(b);
  const DMat<Scalar> ua =
      qa.householderQ() * DMat<Scalar>::Identity(a.rows(), a.cols());
  const DMat<Scalar> ub =
      qb.householderQ() * DMat<Scalar>::Identity(b.rows(), b.cols());
  const DMat<Scalar> rest = ua - ub * (ub.adjoint() * ua);
  Eigen::JacobiSVD<DMat<Scalar>> svd(rest);
  return svd.singularValues()(0);
}

// Gauss-Newton on the homogeneous system
//   { S(x,x,x) = 0,  S(x,x,eta) wedge x = 0  for the fixed probes eta }
// over real or complex scalars.  Returns a unit solution, or nothing.
template <typename Scalar>
std::optional<DVec<Scalar>> locus_solve(const CubicTensor& s,
                                        const std::vector<DVec<Scalar>>& probes,
                                        DVec<Scalar> x, int& iterations,
                                        double* residual = nullptr) {
  using Vec = DVec<Scalar>;
  using Mat = DMat<Scalar>;
  const Eigen::Index d = Eigen::Index(s.dim);
  const Eigen::Index pairs = d * (d - 1) / 2;
  const Eigen::Index m = d + Eigen::Index(probes.size()) * pairs;
  const double sn = s.norm();
  std::vector<Vec> axes(size_t(d), Vec::Zero(d));
  for (Eigen::Index b = 0; b < d; ++b) axes[size_t(b)][b] = Scalar(1);

  x.normalize();
  for (int it = 0; it < 60; ++it) {
    ++iterations;
    Vec r(m);
    Mat jm(m, d);
    r.head(d) = evaluate(s, x, x, x);
    for (Eigen::Index b = 0; b < d; ++b)
      jm.col(b).head(d) = 3.0 * evaluate(s, x, x, axes[size_t(b)]);
    Eigen::Index row = d;
    for (const auto& eta : probes) {
      const Vec w = evaluate(s, x, x, eta);
      std::vector<Vec> dw(static_cast<size_t>(d));
      for (Eigen::Index b = 0; b < d; ++b)
        dw[size_t(b)] = 2.0 * evaluate(s, x, axes[size_t(b)], eta);
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) {
          r[row] = w[i] * x[j] - w[j] * x[i];
          for (Eigen::Index b = 0; b < d; ++b)
            jm(row, b) = dw[size_t(b)][i] * x[j] - dw[size_t(b)][j] * x[i] +
                         (b == j ? w[i] : Scalar(0)) - (b == i ? w[j] : Scalar(0));
          ++row;
        }
    }
    const double rn = r.norm();
    if (rn <= 1e-12 * sn) {
      if (residual) *residual = rn / sn;
      return x;
    }
    // The system is homogeneous, so the radial direction solves the
    // linearization exactly (toward zero); step only within the unit sphere's
    // tangent space at x, spanned by the trailing columns of a QR of x.
    const Mat xcol = x;
    Eigen::HouseholderQR<Mat> qr(xcol);
    const Mat q = qr.householderQ() * Mat::Identity(d, d);
    const Mat tang = q.rightCols(d - 1);
    Eigen::JacobiSVD<Mat> svd(jm * tang, Eigen::ComputeThinU | Eigen::ComputeThinV);
    x -= tang * svd.solve(r);
    const double n2 = x.norm();
    if (!(n2 > 1e-8) || !std::isfinite(n2)) return std::nullopt;
    x /= n2;
  }
  return std::nullopt;
}

template <typename Scalar>
struct LocusSplit {
  DMat<Scalar> first, second;  // orthonormal bases of the two components
};

// Randomized seeding with deflation into two clusters.  Two points belong to
// the same component exactly when their span stays inside the locus, which
// for a symmetric cubic reduces to the mixed insertions vanishing.
template <typename Scalar>
LocusSplit<Scalar> locus_components(const CubicTensor& s, unsigned seed,
                                    ReconstructionReport* report) {
  using Vec = DVec<Scalar>;
  using Mat = DMat<Scalar>;
  const size_t d = s.dim;
  const size_t n = d / 2;
  const double sn = s.norm();
  std::mt19937_64 gen(seed);
  const std::vector<Vec> probes = {random_unit<Scalar>(d, gen), random_unit<Scalar>(d, gen)};

  std::array<std::vector<Vec>, 2> cl;
  int seeds_used = 0, iterations = 0;
  double max_res = 0;
  const double ctol = kClusterTol * sn;
  auto matches = [&](const Vec& x, const std::vector<Vec>& c) {
    for (const auto& y : c)
      if (evaluate(s, x, x, y).norm() > ctol || evaluate(s, x, y, y).norm() > ctol)
        return false;
    return true;
  };
  double defect[2] = {0, 0};
  auto basis_of = [&](const std::vector<Vec>& c, double* df) -> std::optional<Mat> {
    if (c.size() < n + 1) return std::nullopt;
    Mat pts(Eigen::Index(d), Eigen::Index(c.size()));
    for (size_t k = 0; k < c.size(); ++k) pts.col(Eigen::Index(k)) = c[k];
    Eigen::JacobiSVD<Mat> svd(pts, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv(Eigen::Index(n - 1)) <= 1e-6 * sv(0)) return std::nullopt;
    const double flat = sv(Eigen::Index(n)) / sv(0);
    if (flat > kFlatnessTol) return std::nullopt;
    *df = flat;
    return Mat(svd.matrixU().leftCols(Eigen::Index(n)));
  };

  const int max_seeds = 60 + 60 * int(n);
  std::optional<Mat> b0, b1;
  while (seeds_used < max_seeds) {
    ++seeds_used;
    double res = 0;
    auto sol = locus_solve<Scalar>(s, probes, random_unit<Scalar>(d, gen), iterations, &res);
    if (!sol) continue;
    const Vec x = *sol;
    // the eigenvalue seen through the probes must be visible, not vacuous
    double best = 0;
    for (const auto& eta : probes)
      best = std::max(best, std::abs(x.dot(evaluate(s, x, x, eta))));
    if (best <= kNonzeroTol * sn) continue;

    const bool in0 = matches(x, cl[0]);
    const bool in1 = matches(x, cl[1]);
    if (cl[0].empty())
      cl[0].push_back(x);
    else if (cl[1].empty()) {
      if (in0)
        cl[0].push_back(x);
      else
        cl[1].push_back(x);
    } else if (in0 && !in1)
      cl[0].push_back(x);
    else if (in1 && !in0)
      cl[1].push_back(x);
    else
      continue;  // ambiguous or fits neither: discard the point
    max_res = std::max(max_res, res);

    if (cl[0].size() > n && cl[1].size() > n) {
      b0 = basis_of(cl[0], &defect[0]);
      b1 = basis_of(cl[1], &defect[1]);
      if (b0 && b1) break;
    }
  }
  if (!(b0 && b1))
    throw std::runtime_error(
        "reconstruction did not separate two rank-" + std::to_string(n) +
        " components: clusters hold " + std::to_string(cl[0].size()) + " and " +
        std::to_string(cl[1].size()) + " locus points after " +
        std::to_string(seeds_used) + " seeds");
  if (report) {
    report->seeds_used = seeds_used;
    report->iterations = iterations;
    report->max_residual = max_res;
    report->cluster_residual = std::max(defect[0], defect[1]);
  }
  return {*b0, *b1};
}

// real roots of c0 + c1 t + c2 t^2 + c3 t^3, leading zeros trimmed
inline void append_real_roots(double c0, double c1, double c2, double c3,
                              std::vector<double>& out) {
  const double scale = std::max({std::abs(c0), std::abs(c1), std::abs(c2), std::abs(c3)});
  if (scale == 0) return;
  const double eps = 1e-12 * scale;
  if (std::abs(c3) > eps) {
    Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
    comp(1, 0) = 1;
    comp(2, 1) = 1;
    comp(0, 2) = -c0 / c3;
    comp(1, 2) = -c1 / c3;
    comp(2, 2) = -c2 / c3;
    const Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
    for (int i = 0; i < 3; ++i) {
      const std::complex<double> ev = es.eigenvalues()(i);
      if (std::abs(ev.imag()) <= 1e-8 * (1 + std::abs(ev.real()))) out.push_back(ev.real());
    }
  } else if (std::abs(c2) > eps) {
    const double disc = c1 * c1 - 4 * c2 * c0;
    if (disc >= 0) {
      out.push_back((-c1 + std::sqrt(disc)) / (2 * c2));
      out.push_back((-c1 - std::sqrt(disc)) / (2 * c2));
    }
  } else if (std::abs(c1) > eps) {
    out.push_back(-c0 / c1);
  }
}

}  // namespace detail

inline double subspace_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return detail::subspace_gap_impl<double>(a, b);
}
inline double subspace_gap(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return detail::subspace_gap_impl<std::complex<double>>(a, b);
}

// Product case: the two eigenspace subbundles, as orthonormal column bases.
// In dimension two the cubic factors over the projective line and is solved
// by root extraction; higher dimensions use seeded Gauss-Newton deflation.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> reconstruct_lagrangean(
    const CubicTensor& s, unsigned seed = 1, ReconstructionReport* report = nullptr) {
  validate_cubic(s);
  const size_t d = s.dim;
  if (d == 2) {
    std::vector<double> ts;
    for (size_t l = 0; l < 2; ++l)
      detail::append_real_roots(s.at(0, 0, 0, l), 3 * s.at(0, 0, 1, l),
                                3 * s.at(0, 1, 1, l), s.at(1, 1, 1, l), ts);
    std::vector<Eigen::VectorXd> cands;
    for (double t : ts) {
      Eigen::VectorXd v(2);
      v << 1, t;
      cands.push_back(v.normalized());
    }
    {
      Eigen::VectorXd v(2);
      v << 0, 1;
      cands.push_back(v);
    }
    std::vector<Eigen::VectorXd> axes = {Eigen::VectorXd::Unit(2, 0),
                                         Eigen::VectorXd::Unit(2, 1)};
    std::vector<Eigen::VectorXd> spread = axes;
    {
      Eigen::VectorXd v(2);
      v << 1, 1;
      spread.push_back(v.normalized());
      v << 2, -1;
      spread.push_back(v.normalized());
    }
    int iterations = 0;
    double max_res = 0;
    std::vector<Eigen::VectorXd> kept;
    for (const auto& c : cands) {
      if (!membership(s, c, spread)) continue;
      double res = 0;
      auto polished = detail::locus_solve<double>(s, axes, c, iterations, &res);
      if (!polished) continue;
      bool dup = false;
      for (const auto& k : kept)
        dup = dup || std::sqrt(std::max(0.0, 1.0 - std::pow(k.dot(*polished), 2))) <= 1e-6;
      if (dup) continue;
      kept.push_back(*polished);
      max_res = std::max(max_res, res);
    }
    if (kept.size() != 2)
      throw std::runtime_error("the cubic locus on the line has " +
                               std::to_string(kept.size()) +
                               " directions; expected 2");
    if (report) {
      report->seeds_used = 0;
      report->iterations = iterations;
      report->max_residual = max_res;
      report->cluster_residual = 0;
    }
    return {Eigen::MatrixXd(kept[0]), Eigen::MatrixXd(kept[1])};
  }
  auto split = detail::locus_components<double>(s, seed, report);
  return {split.first, split.second};
}

// Complex case: the locus splits over the complexification into a pair of
// conjugate subspaces; reading off the eigenspace decomposition gives the
// complex structure up to the overall sign.
inline Eigen::MatrixXd reconstruct_cr(const CubicTensor& s, unsigned seed = 1,
                                      ReconstructionReport* report = nullptr) {
  validate_cubic(s);
  using C = std::complex<double>;
  const Eigen::Index d = Eigen::Index(s.dim);
  const Eigen::Index n = d / 2;
  auto split = detail::locus_components<C>(s, seed, report);
  const Eigen::MatrixXcd w = split.first;
  const Eigen::MatrixXcd wbar = w.conjugate();
  if (subspace_gap(wbar, split.second) > kConjugateTol)
    throw std::runtime_error(
        "the locus components are not complex conjugate; the tensor does not "
        "come from a complex structure");
  Eigen::MatrixXcd p(d, d);
  p << w, wbar;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p);
  if (svd.singularValues()(d - 1) <= 1e-8 * svd.singularValues()(0))
    throw std::runtime_error("the locus components are not transverse");
  Eigen::VectorXcd eig(d);
  eig.head(n).setConstant(C(0, 1));
  eig.tail(n).setConstant(C(0, -1));
  const Eigen::MatrixXcd jc = p * eig.asDiagonal() * p.inverse();
  const double scale = 1.0 + jc.norm();
  if (jc.imag().norm() > 1e-8 * scale)
    throw std::runtime_error("the recovered operator is not real");
  Eigen::MatrixXd j = jc.real();
  if ((j * j + Eigen::MatrixXd::Identity(d, d)).norm() > 1e-8 * scale * scale)
    throw std::runtime_error("the recovered operator does not square to minus the identity");
  return j;
}

}  // namespace chainalg

#pragma once

// Chains of the homogeneous model: curves t -> u exp(tX) P with X in the
// grade -2 line, frame-normalized so that a curve with a prescribed
// transverse tangent exists through every point. Point sets are compared
// in a fixed affine chart; the chart is provided for the lagrangean family.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "chainalg/groups.hpp"

namespace chainalg {

// A point of G/P, carried by an explicit group representative.
struct FlagPoint {
  GroupElement representative;
};

inline FlagPoint base_point(const GradedAlgebra& a) { return {identity(a)}; }

// g1 P = g2 P, i.e. g1^-1 g2 block upper triangular to within tol.
inline bool same_point(const FlagPoint& x, const FlagPoint& y, double tol = 1e-10) {
  if (x.representative.alg != y.representative.alg)
    throw std::invalid_argument("points live on different models");
  const auto rel = multiply(inverse(x.representative), y.representative);
  try {
    decompose_p(rel, tol);
  } catch (const std::domain_error&) {
    return false;
  }
  return true;
}

struct ChainCurve {
  GroupElement frame;         // u
  AlgebraElement direction;   // X, pure grade -2 and nonzero
};

// The unique chain through x tangent to xi: a grade-1 correction moves the
// frame so the direction becomes pure grade -2. The direction must be
// transverse to the contact distribution.
inline ChainCurve chain_through(const FlagPoint& x, const AlgebraElement& xi) {
  const GradedAlgebra& a = *xi.alg;
  if (x.representative.alg != &a) throw std::invalid_argument("point and direction disagree");
  auto x2 = a.zero(), x1 = a.zero();
  for (size_t i = 0; i < a.dim(); ++i) {
    if (xi.coords[i] == 0) continue;
    switch (a.grade_of(i)) {
      case -2: x2.coords[i] = xi.coords[i]; break;
      case -1: x1.coords[i] = xi.coords[i]; break;
      default: throw std::invalid_argument("chain directions live in the negative part");
    }
  }
  if (x2.is_zero()) throw std::invalid_argument("direction is tangent to the contact distribution");
  const auto z = solve_transversal(x2, x1);
  return {multiply(x.representative, exp_group(z)), x2};
}

inline FlagPoint chain_point(const ChainCurve& c, double t) {
  ElementF x = c.direction.alg->to_float(c.direction);
  x.coords *= t;
  return {multiply(c.frame, exp_group(x))};
}

inline std::vector<FlagPoint> sample_chain(const ChainCurve& c, const std::vector<double>& ts) {
  std::vector<FlagPoint> pts;
  pts.reserve(ts.size());
  for (double t : ts) pts.push_back(chain_point(c, t));
  return pts;
}

// Affine chart on the big cell of the lagrangean flag space, centered at the
// identity coset. A flag is a line inside a hyperplane; the line is the
// first column v of the representative scaled to v0 = 1, the hyperplane is
// the last row w of its inverse scaled to w_{N-1} = 1. The incidence
// relation w.v = 0 makes w0 redundant, leaving 2n+1 coordinates
// (v_1..v_{N-1}, w_1..w_{N-2}).
inline Eigen::VectorXd chart_coords(const FlagPoint& pt) {
  const GradedAlgebra& a = *pt.representative.alg;
  if (a.family() != Family::lagrangean)
    throw std::logic_error("the chart is only provided for the lagrangean family");
  const size_t N = a.ambient();
  const Eigen::MatrixXd& g = pt.representative.rep;
  const double scale = 1.0 + g.lpNorm<Eigen::Infinity>();

  Eigen::VectorXd v = g.col(0);
  if (std::abs(v(0)) <= 1e-12 * scale) throw std::domain_error("point outside the chart");
  v /= v(0);
  Eigen::RowVectorXd w = g.inverse().row(N - 1);
  if (std::abs(w(N - 1)) <= 1e-12 * (1.0 + w.lpNorm<Eigen::Infinity>()))
    throw std::domain_error("point outside the chart");
  w /= w(N - 1);

  Eigen::VectorXd out(2 * N - 3);
  for (size_t k = 1; k < N; ++k) out(k - 1) = v(k);
  for (size_t k = 1; k + 1 < N; ++k) out(N - 2 + k) = w(k);
  return out;
}

namespace detail {
inline double min_chart_distance(const ChainCurve& c, const Eigen::VectorXd& x, double search) {
  // coarse scan, then golden-section refinement of the squared distance
  const int coarse = 256;
  auto dist = [&](double s) {
    try {
      return (chart_coords(chain_point(c, s)) - x).norm();
    } catch (const std::domain_error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  double best_s = 0, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= coarse; ++i) {
    const double s = -search + 2 * search * i / coarse;
    const double d = dist(s);
    if (d < best) best = d, best_s = s;
  }
  const double step = 2 * search / coarse;
  double lo = best_s - step, hi = best_s + step;
  const double gr = (std::sqrt(5.0) - 1) / 2;
  double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
  double f1 = dist(m1), f2 = dist(m2);
  for (int it = 0; it < 90; ++it) {
    if (f1 <= f2) {
      hi = m2, m2 = m1, f2 = f1;
      m1 = hi - gr * (hi - lo);
      f1 = dist(m1);
    } else {
      lo = m1, m1 = m2, f1 = f2;
      m2 = lo + gr * (hi - lo);
      f2 = dist(m2);
    }
  }
  return std::min(f1, f2);
}
}  // namespace detail

// Symmetric Hausdorff distance between two chains as unparametrized point
// sets, measured in the chart: samples of one curve on [-half_width,
// half_width] are matched against the other curve searched over [-search,
// search]. Frames related by the principal freedom reparametrize the curve,
// so the windows must be chosen to overlap.
inline double chain_set_distance(const ChainCurve& a, const ChainCurve& b,
                                 double half_width = 0.35, int samples = 15,
                                 double search = 0.95) {
  if (a.frame.alg != b.frame.alg) throw std::invalid_argument("chains live on different models");
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  double worst = 0;
  for (int side = 0; side < 2; ++side) {
    const ChainCurve& from = side == 0 ? a : b;
    const ChainCurve& to = side == 0 ? b : a;
    for (int i = 0; i < samples; ++i) {
      const double t = -half_width + 2 * half_width * i / (samples - 1);
      const auto x = chart_coords(chain_point(from, t));
      worst = std::max(worst, detail::min_chart_distance(to, x, search));
    }
  }
  return worst;
}

}  // namespace chainalg

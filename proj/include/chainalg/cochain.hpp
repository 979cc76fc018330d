#pragma once

#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "chainalg/algebra.hpp"

namespace chainalg {

// Alternating multilinear maps Lambda^deg g_minus -> g, stored on sorted
// basis tuples of the (contiguous) negative-grade basis prefix.
inline size_t choose2(size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }
inline size_t choose3(size_t n) { return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6; }

inline size_t pair_index(size_t dm, size_t i, size_t j) {
  assert(i < j && j < dm);
  return choose2(dm) - choose2(dm - i) + (j - i - 1);
}
inline size_t triple_index(size_t dm, size_t i, size_t j, size_t k) {
  assert(i < j && j < k && k < dm);
  return choose3(dm) - choose3(dm - i) + pair_index(dm - i - 1, j - i - 1, k - i - 1);
}

struct CochainMap {
  const GradedAlgebra* alg = nullptr;
  int degree = 0;                // 1, 2 or 3
  std::vector<RatVec> coeffs;    // [tuple index][value coordinate]

  size_t tuples() const { return coeffs.size(); }

  bool is_zero() const {
    for (const auto& v : coeffs)
      if (!chainalg::is_zero(v)) return false;
    return true;
  }

  friend CochainMap operator+(const CochainMap& a, const CochainMap& b) {
    assert(a.alg == b.alg && a.degree == b.degree);
    CochainMap r = a;
    for (size_t t = 0; t < r.coeffs.size(); ++t)
      add_scaled(r.coeffs[t], Rat(1), b.coeffs[t]);
    return r;
  }
  friend CochainMap operator-(const CochainMap& a, const CochainMap& b) {
    assert(a.alg == b.alg && a.degree == b.degree);
    CochainMap r = a;
    for (size_t t = 0; t < r.coeffs.size(); ++t)
      add_scaled(r.coeffs[t], Rat(-1), b.coeffs[t]);
    return r;
  }
  friend CochainMap operator*(const Rat& c, const CochainMap& x) {
    CochainMap r = x;
    for (auto& v : r.coeffs)
      for (auto& e : v) e *= c;
    return r;
  }
  friend bool operator==(const CochainMap& a, const CochainMap& b) {
    return a.alg == b.alg && a.degree == b.degree && a.coeffs == b.coeffs;
  }
};

inline CochainMap make_cochain(const GradedAlgebra& a, int degree) {
  if (degree < 1 || degree > 3) throw std::invalid_argument("cochain degree must be 1, 2 or 3");
  const size_t dm = a.dim_minus();
  const size_t nt = degree == 1 ? dm : degree == 2 ? choose2(dm) : choose3(dm);
  CochainMap c{&a, degree, std::vector<RatVec>(nt, RatVec(a.dim(), Rat(0)))};
  return c;
}

// Antisymmetrized evaluation; arguments are implicitly projected to g_minus
// (only their negative-grade coordinates enter).
inline AlgebraElement evaluate(const CochainMap& c, const std::vector<AlgebraElement>& args) {
  const GradedAlgebra& a = *c.alg;
  if (int(args.size()) != c.degree) throw std::invalid_argument("argument count != degree");
  for (const auto& x : args)
    if (x.alg != &a) throw std::invalid_argument("mismatched algebra");
  const size_t dm = a.dim_minus();
  auto r = a.zero();
  if (c.degree == 1) {
    for (size_t i = 0; i < dm; ++i)
      if (args[0].coords[i] != 0) add_scaled(r.coords, args[0].coords[i], c.coeffs[i]);
  } else if (c.degree == 2) {
    for (size_t i = 0; i < dm; ++i)
      for (size_t j = i + 1; j < dm; ++j) {
        const Rat det = args[0].coords[i] * args[1].coords[j] - args[0].coords[j] * args[1].coords[i];
        if (det != 0) add_scaled(r.coords, det, c.coeffs[pair_index(dm, i, j)]);
      }
  } else {
    for (size_t i = 0; i < dm; ++i)
      for (size_t j = i + 1; j < dm; ++j)
        for (size_t k = j + 1; k < dm; ++k) {
          const auto& x = args[0];
          const auto& y = args[1];
          const auto& z = args[2];
          const Rat det = x.coords[i] * (y.coords[j] * z.coords[k] - y.coords[k] * z.coords[j]) -
                          x.coords[j] * (y.coords[i] * z.coords[k] - y.coords[k] * z.coords[i]) +
                          x.coords[k] * (y.coords[i] * z.coords[j] - y.coords[j] * z.coords[i]);
          if (det != 0) add_scaled(r.coords, det, c.coeffs[triple_index(dm, i, j, k)]);
        }
  }
  return r;
}

// Homogeneity of a cell: grade of the value minus the grades of the
// arguments. A cochain concentrated in one homogeneity is "homogeneous".
inline int cell_homogeneity(const GradedAlgebra& a, const std::vector<size_t>& tuple, size_t val) {
  int h = a.grade_of(val);
  for (size_t t : tuple) h -= a.grade_of(t);
  return h;
}

template <typename F>
void for_each_cell(const CochainMap& c, F&& f) {
  // f(tuple as vector<size_t>, tuple_index, value_index, coefficient)
  const size_t dm = c.alg->dim_minus();
  const size_t D = c.alg->dim();
  auto visit = [&](const std::vector<size_t>& tuple, size_t tidx) {
    for (size_t v = 0; v < D; ++v)
      if (c.coeffs[tidx][v] != 0) f(tuple, tidx, v, c.coeffs[tidx][v]);
  };
  if (c.degree == 1) {
    for (size_t i = 0; i < dm; ++i) visit({i}, i);
  } else if (c.degree == 2) {
    for (size_t i = 0; i < dm; ++i)
      for (size_t j = i + 1; j < dm; ++j) visit({i, j}, pair_index(dm, i, j));
  } else {
    for (size_t i = 0; i < dm; ++i)
      for (size_t j = i + 1; j < dm; ++j)
        for (size_t k = j + 1; k < dm; ++k) visit({i, j, k}, triple_index(dm, i, j, k));
  }
}

inline std::map<int, CochainMap> homogeneity_split(const CochainMap& c) {
  std::map<int, CochainMap> parts;
  for_each_cell(c, [&](const std::vector<size_t>& tuple, size_t tidx, size_t v, const Rat& coef) {
    const int h = cell_homogeneity(*c.alg, tuple, v);
    auto it = parts.find(h);
    if (it == parts.end()) it = parts.emplace(h, make_cochain(*c.alg, c.degree)).first;
    it->second.coeffs[tidx][v] = coef;
  });
  return parts;
}

// Sentinel for the zero cochain: no cell, "+infinity".
constexpr int kNoHomogeneity = std::numeric_limits<int>::max();

inline int min_homogeneity(const CochainMap& c) {
  int h = kNoHomogeneity;
  for_each_cell(c, [&](const std::vector<size_t>& tuple, size_t, size_t v, const Rat&) {
    h = std::min(h, cell_homogeneity(*c.alg, tuple, v));
  });
  return h;
}

inline bool is_homogeneous(const CochainMap& c, int h) {
  bool ok = true;
  for_each_cell(c, [&](const std::vector<size_t>& tuple, size_t, size_t v, const Rat&) {
    if (cell_homogeneity(*c.alg, tuple, v) != h) ok = false;
  });
  return ok;
}

// "A^B x C" where A, B name the duals of the argument components (the
// cochain is a two-form on g_minus, i.e. lives in the wedge of the duals)
// and C names the value component.
inline std::string container_string(const GradedAlgebra& a, size_t arg_i, size_t arg_j,
                                    size_t val) {
  size_t ci = a.component_of(arg_i), cj = a.component_of(arg_j);
  const auto& di = a.dual_component(a.components()[ci].label);
  const auto& dj = a.dual_component(a.components()[cj].label);
  size_t ii = a.component_index(di.label), jj = a.component_index(dj.label);
  if (ii > jj) std::swap(ii, jj);
  return a.components()[ii].label + "^" + a.components()[jj].label + " x " +
         a.components()[a.component_of(val)].label;
}

inline std::set<std::string> support_containers(const CochainMap& c) {
  if (c.degree != 2) throw std::invalid_argument("containers are defined for 2-cochains");
  std::set<std::string> out;
  for_each_cell(c, [&](const std::vector<size_t>& tuple, size_t, size_t v, const Rat&) {
    out.insert(container_string(*c.alg, tuple[0], tuple[1], v));
  });
  return out;
}


// Restriction of a 2-cochain to argument pairs from two given components.
inline CochainMap restrict_to_args(const CochainMap& c, const std::string& compA,
                                   const std::string& compB) {
  if (c.degree != 2) throw std::invalid_argument("argument restriction needs degree 2");
  const GradedAlgebra& a = *c.alg;
  const size_t ia = a.component_index(compA), ib = a.component_index(compB);
  CochainMap out = make_cochain(a, 2);
  for_each_cell(c, [&](const std::vector<size_t>& t, size_t tidx, size_t v, const Rat& coef) {
    const size_t c0 = a.component_of(t[0]), c1 = a.component_of(t[1]);
    if ((c0 == ia && c1 == ib) || (c0 == ib && c1 == ia)) out.coeffs[tidx][v] = coef;
  });
  return out;
}

// The two edge restrictions on the path side; defined for cochains that
// vanish on Lambda^2 of the grade -1 part.
inline CochainMap project_pi(const CochainMap& c, const std::string& minus_one_label) {
  const GradedAlgebra& a = *c.alg;
  if (a.family() != Family::path)
    throw std::invalid_argument("pi restrictions live on the path side");
  bool bad = false;
  for_each_cell(c, [&](const std::vector<size_t>& t, size_t, size_t, const Rat&) {
    if (a.grade_of(t[0]) == -1 && a.grade_of(t[1]) == -1) bad = true;
  });
  if (bad) throw std::domain_error("cochain does not vanish on the grade -1 wedge");
  return restrict_to_args(c, minus_one_label, "g-2");
}
inline CochainMap project_pi_e(const CochainMap& c) { return project_pi(c, "g-1E"); }
inline CochainMap project_pi_v(const CochainMap& c) { return project_pi(c, "g-1V"); }

}  // namespace chainalg

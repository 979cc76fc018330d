#pragma once

// Extension pairs (i, alpha) carrying a contact-type geometry into the path
// geometry of its chain space, target PGL(2n+2, R). The pair consists of a
// group-level map i: Q -> P~ (float, closed form) and an exact linear map
// alpha: g -> g~ that is Ad-equivariant over i. From these we compute the
// homomorphism defect Psi_alpha, the dual map phi: p_plus -> p~_plus, and
// the induced curvature transfer.

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "chainalg/groups.hpp"
#include "chainalg/hodge.hpp"

namespace chainalg {

// Zeroes every coordinate outside the negative grades: the section of g/p.
inline AlgebraElement minus_truncation(const AlgebraElement& x) {
  AlgebraElement r = x;
  for (size_t i = x.alg->dim_minus(); i < x.alg->dim(); ++i) r.coords[i] = 0;
  return r;
}

namespace detail {

// Closed forms for alpha. Source blocks (1, n, 1), target blocks (1, 1, n, n).
inline RatMat alpha_image_lagrangean(const RatMat& x) {
  const size_t N = x.rows(), n = N - 2, T = 2 * n + 2;
  const Rat a = x(0, 0), c = x(N - 1, N - 1);
  RatMat m(T, T);
  m(0, 0) = (a - c) / 2;
  m(0, 1) = x(0, N - 1);
  m(1, 0) = x(N - 1, 0);
  m(1, 1) = (c - a) / 2;
  for (size_t k = 0; k < n; ++k) {
    m(0, 2 + k) = x(0, 1 + k) / 2;
    m(0, 2 + n + k) = x(1 + k, N - 1) / 2;
    m(1, 2 + k) = x(N - 1, 1 + k) / 2;
    m(1, 2 + n + k) = -x(1 + k, 0) / 2;
    m(2 + k, 0) = x(1 + k, 0);
    m(2 + k, 1) = x(1 + k, N - 1);
    m(2 + n + k, 0) = x(N - 1, 1 + k);
    m(2 + n + k, 1) = -x(0, 1 + k);
  }
  for (size_t j = 0; j < n; ++j)
    for (size_t k = 0; k < n; ++k) {
      const Rat shift = j == k ? (a + c) / 2 : Rat(0);
      m(2 + j, 2 + k) = x(1 + j, 1 + k) - shift;
      m(2 + n + j, 2 + n + k) = -x(1 + k, 1 + j) + shift;
    }
  return m;
}

// Derivative of i at the identity, differentiated by hand from the closed
// form: kept independent of alpha so that condition (2) is a real check.
inline RatMat iprime_image_lagrangean(const RatMat& x) {
  const size_t N = x.rows(), n = N - 2, T = 2 * n + 2;
  const Rat a = x(0, 0), c = x(N - 1, N - 1);
  RatMat m(T, T);
  m(0, 0) = (a - c) / 2;
  m(0, 1) = x(0, N - 1);
  m(1, 1) = (c - a) / 2;
  for (size_t j = 0; j < n; ++j)
    for (size_t k = 0; k < n; ++k) {
      const Rat shift = j == k ? (a + c) / 2 : Rat(0);
      m(2 + j, 2 + k) = x(1 + j, 1 + k) - shift;
      m(2 + n + j, 2 + n + k) = -x(1 + k, 1 + j) + shift;
    }
  return m;
}

// Realified source su(p+1, q+1): x holds [[Re, -Im], [Im, Re]] of the complex
// matrix with blocks (1, n, 1). Re(r,c) = x(r,c), Im(r,c) = x(N+r,c).
inline RatMat alpha_image_cr(const RatMat& x, const GradedAlgebra& s) {
  const size_t N = s.ambient() / 2, n = N - 2, T = 2 * n + 2;
  auto re = [&](size_t r, size_t c) { return x(r, c); };
  auto im = [&](size_t r, size_t c) { return x(N + r, c); };
  RatMat m(T, T);
  m(0, 0) = re(0, 0);
  m(0, 1) = -im(0, N - 1);
  m(1, 0) = im(N - 1, 0);
  m(1, 1) = -re(0, 0);
  for (size_t k = 0; k < n; ++k) {
    m(0, 2 + k) = re(0, 1 + k);
    m(0, 2 + n + k) = -im(0, 1 + k);
    m(1, 2 + k) = s.sig(int(k)) * im(1 + k, 0);
    m(1, 2 + n + k) = -s.sig(int(k)) * re(1 + k, 0);
    m(2 + k, 0) = re(1 + k, 0);
    m(2 + n + k, 0) = im(1 + k, 0);
    m(2 + k, 1) = -s.sig(int(k)) * im(0, 1 + k);
    m(2 + n + k, 1) = -s.sig(int(k)) * re(0, 1 + k);
  }
  for (size_t j = 0; j < n; ++j)
    for (size_t k = 0; k < n; ++k) {
      const Rat w = j == k ? im(0, 0) : Rat(0);
      m(2 + j, 2 + k) = re(1 + j, 1 + k);
      m(2 + n + j, 2 + n + k) = re(1 + j, 1 + k);
      m(2 + j, 2 + n + k) = -im(1 + j, 1 + k) + w;
      m(2 + n + j, 2 + k) = im(1 + j, 1 + k) - w;
    }
  return m;
}

inline RatMat iprime_image_cr(const RatMat& x, const GradedAlgebra& s) {
  const size_t N = s.ambient() / 2, n = N - 2, T = 2 * n + 2;
  RatMat m(T, T);
  m(0, 0) = x(0, 0);
  m(0, 1) = -x(N, N - 1);
  m(1, 1) = -x(0, 0);
  for (size_t j = 0; j < n; ++j)
    for (size_t k = 0; k < n; ++k) {
      const Rat w = j == k ? x(N, 0) : Rat(0);
      m(2 + j, 2 + k) = x(1 + j, 1 + k);
      m(2 + n + j, 2 + n + k) = x(1 + j, 1 + k);
      m(2 + j, 2 + n + k) = -x(N + 1 + j, 1 + k) + w;
      m(2 + n + j, 2 + k) = x(N + 1 + j, 1 + k) - w;
    }
  return m;
}

}  // namespace detail

struct ExtensionPair {
  std::shared_ptr<const GradedAlgebra> source, target;
  RatMat alpha;    // dim(g~) x dim(g), columns over the source basis
  RatMat i_prime;  // dim(g~) x dim(g), zero outside the q-columns
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> i_rep;

  // the grades {-2, -1, 1} of the source: the complement that alpha
  // identifies with g~/p~, realized as the negative prefix of the target
  std::vector<size_t> complement;
  RatMat abar, abar_inv;  // induced iso onto the target minus coordinates
  RatMat phi;             // dual map p_plus -> p~_plus, full coordinate matrix
};

inline AlgebraElement apply_alpha(const ExtensionPair& e, const AlgebraElement& x) {
  if (x.alg != e.source.get()) throw std::invalid_argument("element lives on the wrong algebra");
  return {e.target.get(), e.alpha.mul(x.coords)};
}

inline AlgebraElement apply_i_prime(const ExtensionPair& e, const AlgebraElement& x) {
  if (x.alg != e.source.get()) throw std::invalid_argument("element lives on the wrong algebra");
  return {e.target.get(), e.i_prime.mul(x.coords)};
}

inline GroupElement i_map(const ExtensionPair& e, const GroupElement& q) {
  if (q.alg != e.source.get()) throw std::invalid_argument("element lives on the wrong group");
  return group_element(*e.target, e.i_rep(q.rep));
}

// Preimage of the b-th negative target basis element under alpha, taken in
// the complement; the unique choice supported there.
inline AlgebraElement preimage(const ExtensionPair& e, size_t b) {
  if (b >= e.target->dim_minus()) throw std::out_of_range("not a negative basis index");
  auto x = e.source->zero();
  for (size_t j = 0; j < e.complement.size(); ++j) x.coords[e.complement[j]] = e.abar_inv(j, b);
  return x;
}

namespace detail {

inline void finish_pair(ExtensionPair& e) {
  const GradedAlgebra& s = *e.source;
  const GradedAlgebra& t = *e.target;
  const size_t dmt = t.dim_minus();

  e.complement.clear();
  for (size_t i = 0; i < s.dim(); ++i) {
    const int g = s.grade_of(i);
    if (g == -2 || g == -1 || g == 1) e.complement.push_back(i);
  }
  if (e.complement.size() != dmt)
    throw std::logic_error("complement dimension does not match the target quotient");

  e.abar = RatMat(dmt, dmt);
  for (size_t r = 0; r < dmt; ++r)
    for (size_t c = 0; c < dmt; ++c) e.abar(r, c) = e.alpha(r, e.complement[c]);
  const auto inv = e.abar.inverse();
  if (!inv)
    throw std::domain_error("alpha does not identify the complement with the target quotient");
  e.abar_inv = *inv;

  // phi is dual to z~ -> proj(abar^{-1} z~): tr(phi(z) e~_b) = tr(z proj(pre_b))
  const auto zdual_t = trace_dual_basis(t);
  e.phi = RatMat(t.dim(), s.dim());
  for (size_t b = 0; b < dmt; ++b) {
    const AlgebraElement pb = minus_truncation(preimage(e, b));
    for (size_t k = 0; k < s.dim(); ++k) {
      if (s.grade_of(k) <= 0) continue;
      const Rat c = s.trace_form(s.basis_element(k), pb);
      if (c == 0) continue;
      for (size_t r = 0; r < t.dim(); ++r) e.phi(r, k) += c * zdual_t[b].coords[r];
    }
  }
}

}  // namespace detail

inline ExtensionPair lagrangean_pair(int n) {
  ExtensionPair e;
  e.source = std::make_shared<GradedAlgebra>(GradedAlgebra::lagrangean(n));
  e.target = std::make_shared<GradedAlgebra>(GradedAlgebra::path(2 * n));
  const GradedAlgebra& s = *e.source;
  const GradedAlgebra& t = *e.target;

  e.alpha = RatMat(t.dim(), s.dim());
  e.i_prime = RatMat(t.dim(), s.dim());
  for (size_t k = 0; k < s.dim(); ++k) {
    const auto img = t.from_matrix(detail::alpha_image_lagrangean(s.basis_matrix(k)));
    for (size_t r = 0; r < t.dim(); ++r) e.alpha(r, k) = img.coords[r];
    const int g = s.grade_of(k);
    if (g == 0 || g == 2) {
      const auto ip = t.from_matrix(detail::iprime_image_lagrangean(s.basis_matrix(k)));
      for (size_t r = 0; r < t.dim(); ++r) e.i_prime(r, k) = ip.coords[r];
    }
  }

  const size_t N = s.ambient();
  e.i_rep = [N, n](const Eigen::MatrixXd& m) -> Eigen::MatrixXd {
    if (size_t(m.rows()) != N || size_t(m.cols()) != N)
      throw std::invalid_argument("representative has the wrong size");
    const double tol = 1e-9 * (1.0 + m.lpNorm<Eigen::Infinity>());
    for (size_t r = 0; r < N; ++r)
      for (size_t c = 0; c < N; ++c) {
        const bool diag_block = (r == 0 && c == 0) || (r == N - 1 && c == N - 1) ||
                                (r >= 1 && r <= size_t(n) && c >= 1 && c <= size_t(n));
        if (!diag_block && !(r == 0 && c == N - 1) && std::abs(m(r, c)) > tol)
          throw std::domain_error("representative is not block diagonal over Q");
      }
    const double p = m(0, 0), q = m(N - 1, N - 1), sc = m(0, N - 1);
    if (std::abs(p) <= tol || std::abs(q) <= tol)
      throw std::domain_error("degenerate corner entries");
    const Eigen::MatrixXd R = m.block(1, 1, n, n);
    const double sgn = q * p > 0 ? 1.0 : -1.0;
    const double rt = std::sqrt(std::abs(p / q));
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * n + 2, 2 * n + 2);
    out(0, 0) = sgn * rt;
    out(0, 1) = sgn * (sc / p) * rt;
    out(1, 1) = 1.0 / rt;
    out.block(2, 2, n, n) = (1.0 / (q * rt)) * R;
    out.block(2 + n, 2 + n, n, n) = (p / rt) * R.inverse().transpose();
    return out;
  };

  detail::finish_pair(e);
  return e;
}

inline ExtensionPair cr_pair(int p, int q) {
  ExtensionPair e;
  e.source = std::make_shared<GradedAlgebra>(GradedAlgebra::cr(p, q));
  e.target = std::make_shared<GradedAlgebra>(GradedAlgebra::path(2 * (p + q)));
  const GradedAlgebra& s = *e.source;
  const GradedAlgebra& t = *e.target;
  const size_t n = size_t(p + q);

  e.alpha = RatMat(t.dim(), s.dim());
  e.i_prime = RatMat(t.dim(), s.dim());
  for (size_t k = 0; k < s.dim(); ++k) {
    const auto img = t.from_matrix(detail::alpha_image_cr(s.basis_matrix(k), s));
    for (size_t r = 0; r < t.dim(); ++r) e.alpha(r, k) = img.coords[r];
    const int g = s.grade_of(k);
    if (g == 0 || g == 2) {
      const auto ip = t.from_matrix(detail::iprime_image_cr(s.basis_matrix(k), s));
      for (size_t r = 0; r < t.dim(); ++r) e.i_prime(r, k) = ip.coords[r];
    }
  }

  // i reads the complex blocks (phi, Phi, corner) off a realified, unit
  // determinant representative; it is invariant under the phase center.
  e.i_rep = [n](const Eigen::MatrixXd& m) -> Eigen::MatrixXd {
    const size_t N = n + 2;
    if (size_t(m.rows()) != 2 * N || size_t(m.cols()) != 2 * N)
      throw std::invalid_argument("representative has the wrong size");
    const double tol = 1e-9 * (1.0 + m.lpNorm<Eigen::Infinity>());
    const Eigen::MatrixXcd g = detail::complexify(m, 1e-9);
    for (size_t r = 0; r < N; ++r)
      for (size_t c = 0; c < N; ++c) {
        const bool diag_block = (r == 0 && c == 0) || (r == N - 1 && c == N - 1) ||
                                (r >= 1 && r <= n && c >= 1 && c <= n);
        if (!diag_block && !(r == 0 && c == N - 1) && std::abs(g(r, c)) > tol)
          throw std::domain_error("representative is not block diagonal over Q");
      }
    const std::complex<double> ph = g(0, 0);
    if (std::abs(ph) <= tol) throw std::domain_error("degenerate corner entry");
    // corner = i a phi with a real
    const std::complex<double> corner = g(0, N - 1) / (std::complex<double>(0, 1) * ph);
    if (std::abs(corner.imag()) > 1e-8 * (1.0 + std::abs(corner)))
      throw std::domain_error("corner entry is not an imaginary multiple of the pivot");
    const double a = corner.real();
    const double mod = std::abs(ph);
    const Eigen::MatrixXcd rot = (mod / ph) * g.block(1, 1, n, n);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * n + 2, 2 * n + 2);
    out(0, 0) = mod;
    out(0, 1) = -a * mod;
    out(1, 1) = 1.0 / mod;
    out.block(2, 2, n, n) = rot.real();
    out.block(2, 2 + n, n, n) = -rot.imag();
    out.block(2 + n, 2, n, n) = rot.imag();
    out.block(2 + n, 2 + n, n, n) = rot.real();
    return out;
  };

  detail::finish_pair(e);
  return e;
}

// Homomorphism defect of alpha over the complement section: a 2-cochain on
// the target negative part, independent of the choice of preimages.
inline CochainMap psi_alpha(const ExtensionPair& e) {
  const GradedAlgebra& s = *e.source;
  const GradedAlgebra& t = *e.target;
  const size_t dmt = t.dim_minus();
  std::vector<AlgebraElement> pre, apre;
  pre.reserve(dmt);
  for (size_t b = 0; b < dmt; ++b) {
    pre.push_back(preimage(e, b));
    apre.push_back(apply_alpha(e, pre.back()));
  }
  CochainMap psi = make_cochain(t, 2);
  for (size_t i = 0; i < dmt; ++i)
    for (size_t j = i + 1; j < dmt; ++j) {
      const AlgebraElement v =
          t.bracket(apre[i], apre[j]) - apply_alpha(e, s.bracket(pre[i], pre[j]));
      psi.coeffs[pair_index(dmt, i, j)] = v.coords;
    }
  return psi;
}

// Curvature transfer: kappa~(u, v) = alpha(kappa(proj abar^{-1} u, proj
// abar^{-1} v)) + Psi_alpha(u, v), both terms exact. The second overload
// reuses a precomputed defect term across a batch of curvatures.
inline CochainMap extend_curvature(const ExtensionPair& e, const CochainMap& kappa,
                                   const CochainMap& psi) {
  if (kappa.alg != e.source.get())
    throw std::invalid_argument("curvature must live on the source algebra");
  if (kappa.degree != 2) throw std::invalid_argument("curvature transfer needs degree 2");
  const GradedAlgebra& t = *e.target;
  const size_t dmt = t.dim_minus();
  std::vector<AlgebraElement> pre;
  pre.reserve(dmt);
  for (size_t b = 0; b < dmt; ++b) pre.push_back(preimage(e, b));
  CochainMap out = psi;
  for (size_t i = 0; i < dmt; ++i)
    for (size_t j = i + 1; j < dmt; ++j) {
      const AlgebraElement v = apply_alpha(e, evaluate(kappa, {pre[i], pre[j]}));
      add_scaled(out.coeffs[pair_index(dmt, i, j)], Rat(1), v.coords);
    }
  return out;
}

inline CochainMap extend_curvature(const ExtensionPair& e, const CochainMap& kappa) {
  return extend_curvature(e, kappa, psi_alpha(e));
}

// Dual map phi: p_plus -> p~_plus, normalized so that the trace pairing
// satisfies tr(phi(z) u~) = tr(z proj(abar^{-1} u~)) on the nose.
inline AlgebraElement phi_dual(const ExtensionPair& e, const AlgebraElement& z) {
  if (z.alg != e.source.get()) throw std::invalid_argument("element lives on the wrong algebra");
  for (size_t i = 0; i < e.source->dim(); ++i)
    if (z.coords[i] != 0 && e.source->grade_of(i) <= 0)
      throw std::invalid_argument("phi needs an argument in p_plus");
  return {e.target.get(), e.phi.mul(z.coords)};
}

// The closed-form row map from the source positive part into the target top
// row; the shape the duality constant is measured against.
inline AlgebraElement phi_reference_form(const ExtensionPair& e, const AlgebraElement& z) {
  if (e.source->family() != Family::lagrangean)
    throw std::logic_error("reference form is only available for the lagrangean family");
  if (z.alg != e.source.get()) throw std::invalid_argument("element lives on the wrong algebra");
  for (size_t i = 0; i < e.source->dim(); ++i)
    if (z.coords[i] != 0 && e.source->grade_of(i) <= 0)
      throw std::invalid_argument("phi needs an argument in p_plus");
  const GradedAlgebra& s = *e.source;
  const GradedAlgebra& t = *e.target;
  const size_t N = s.ambient(), n = N - 2;
  const RatMat zm = s.matrix(z);
  RatMat m(2 * n + 2, 2 * n + 2);
  m(0, 1) = zm(0, N - 1);
  for (size_t k = 0; k < n; ++k) {
    m(0, 2 + k) = zm(0, 1 + k);
    m(0, 2 + n + k) = zm(1 + k, N - 1);
  }
  return t.from_matrix(m);
}

struct PairReport {
  double condition1_residual = 0.0;   // max |alpha Ad(q) - Ad(i q) alpha| over samples
  bool condition1_infinitesimal = false;  // alpha ad(A) = ad(alpha A) alpha, exact
  bool condition2_exact = false;          // alpha restricted to q equals i'
  size_t condition3_rank = 0;             // rank of the induced map on the quotients
  bool condition3_iso = false;
  bool i_homomorphism = false;  // i(q1 q2) = i(q1) i(q2) mod center, sampled
};

inline PairReport check_conditions(const ExtensionPair& e,
                                   const std::vector<GroupElement>& samples) {
  const GradedAlgebra& s = *e.source;
  const GradedAlgebra& t = *e.target;
  PairReport rep;

  for (const auto& g : samples) {
    if (g.alg != e.source.get()) throw std::invalid_argument("sample lives on the wrong group");
    if (!in_q(g)) throw std::invalid_argument("sample not in Q");
  }

  // (1) group level, float: alpha o Ad(q) = Ad(i(q)) o alpha columnwise
  const Eigen::MatrixXd alpha_d = e.alpha.to_double();
  std::vector<ElementF> acols;
  for (size_t k = 0; k < s.dim(); ++k) {
    RatVec c(t.dim());
    for (size_t r = 0; r < t.dim(); ++r) c[r] = e.alpha(r, k);
    acols.push_back(t.to_float(AlgebraElement{&t, std::move(c)}));
  }
  for (const auto& g : samples) {
    const GroupElement ig = i_map(e, g);
    for (size_t k = 0; k < s.dim(); ++k) {
      const ElementF lhs_s = adjoint(g, s.basis_element(k));
      const Eigen::VectorXd lhs = alpha_d * lhs_s.coords;
      const ElementF rhs = adjoint(ig, acols[k]);
      const double resid =
          (lhs - rhs.coords).lpNorm<Eigen::Infinity>() / (1.0 + rhs.coords.lpNorm<Eigen::Infinity>());
      rep.condition1_residual = std::max(rep.condition1_residual, resid);
    }
  }

  // (1) infinitesimal, exact: alpha([A, x]) = [alpha(A), alpha(x)] for A in q
  rep.condition1_infinitesimal = true;
  for (size_t a = 0; a < s.dim(); ++a) {
    const int ga = s.grade_of(a);
    if (ga != 0 && ga != 2) continue;
    const auto aa = apply_alpha(e, s.basis_element(a));
    for (size_t k = 0; k < s.dim(); ++k) {
      const auto lhs = apply_alpha(e, s.bracket(s.basis_element(a), s.basis_element(k)));
      const auto rhs = t.bracket(aa, apply_alpha(e, s.basis_element(k)));
      if (!(lhs == rhs)) rep.condition1_infinitesimal = false;
    }
  }

  // (2) exact: the q-columns of alpha coincide with i', the rest of i' is 0
  rep.condition2_exact = true;
  for (size_t k = 0; k < s.dim(); ++k) {
    const int g = s.grade_of(k);
    for (size_t r = 0; r < t.dim(); ++r) {
      const Rat want = (g == 0 || g == 2) ? e.alpha(r, k) : Rat(0);
      if (e.i_prime(r, k) != want) rep.condition2_exact = false;
    }
  }

  // (3) exact: induced map on the quotients is an isomorphism
  rep.condition3_rank = e.abar.rank();
  rep.condition3_iso = rep.condition3_rank == t.dim_minus();

  // i is a group homomorphism mod center on the samples
  rep.i_homomorphism = true;
  for (size_t k = 0; k + 1 < samples.size(); ++k) {
    const auto lhs = multiply(i_map(e, samples[k]), i_map(e, samples[k + 1]));
    const auto rhs = i_map(e, multiply(samples[k], samples[k + 1]));
    if (!equal_mod_center(lhs, rhs, 1e-9)) rep.i_homomorphism = false;
  }
  if (samples.size() == 1) {
    const auto lhs = multiply(i_map(e, samples[0]), i_map(e, samples[0]));
    const auto rhs = i_map(e, multiply(samples[0], samples[0]));
    rep.i_homomorphism = equal_mod_center(lhs, rhs, 1e-9);
  }

  return rep;
}

namespace detail {

inline void require_target_parabolic(const GradedAlgebra& t, const RatMat& w) {
  if (w.rows() != t.ambient() || w.cols() != t.ambient())
    throw std::invalid_argument("witness has the wrong size");
  for (size_t r = 1; r < w.rows(); ++r)
    if (w(r, 0) != 0) throw std::invalid_argument("witness not in the target parabolic");
  for (size_t r = 2; r < w.rows(); ++r)
    if (w(r, 1) != 0) throw std::invalid_argument("witness not in the target parabolic");
}

}  // namespace detail

// Conjugated pair: i^(g) = w^{-1} i(g) w and alpha^ = Ad(w^{-1}) o alpha,
// the equivalence move on extension pairs. w must lie in the target
// parabolic (block upper triangular for sizes (1, 1, 2n)).
inline ExtensionPair conjugate_pair(const ExtensionPair& e, const RatMat& w) {
  const GradedAlgebra& t = *e.target;
  detail::require_target_parabolic(t, w);
  const auto winv = w.inverse();
  if (!winv) throw std::invalid_argument("witness is singular");

  ExtensionPair out;
  out.source = e.source;
  out.target = e.target;
  out.alpha = RatMat(t.dim(), e.source->dim());
  out.i_prime = RatMat(t.dim(), e.source->dim());
  for (size_t k = 0; k < e.source->dim(); ++k) {
    RatVec ac(t.dim()), ic(t.dim());
    for (size_t r = 0; r < t.dim(); ++r) {
      ac[r] = e.alpha(r, k);
      ic[r] = e.i_prime(r, k);
    }
    const auto a2 = adjoint_exact(*winv, AlgebraElement{&t, std::move(ac)});
    const auto i2 = adjoint_exact(*winv, AlgebraElement{&t, std::move(ic)});
    for (size_t r = 0; r < t.dim(); ++r) {
      out.alpha(r, k) = a2.coords[r];
      out.i_prime(r, k) = i2.coords[r];
    }
  }
  const Eigen::MatrixXd wd = w.to_double(), wid = winv->to_double();
  out.i_rep = [inner = e.i_rep, wd, wid](const Eigen::MatrixXd& m) {
    return Eigen::MatrixXd(wid * inner(m) * wd);
  };
  detail::finish_pair(out);
  return out;
}

// Exact equivalence test with a rational witness.
inline bool pairs_equivalent(const ExtensionPair& a, const ExtensionPair& b, const RatMat& w,
                             std::mt19937_64& rng, int samples = 12, double tol = 1e-9) {
  if (a.source->family() != b.source->family() || a.source->dim() != b.source->dim() ||
      a.target->dim() != b.target->dim())
    throw std::invalid_argument("pairs live on different algebras");
  const GradedAlgebra& t = *a.target;
  detail::require_target_parabolic(t, w);
  const auto winv = w.inverse();
  if (!winv) throw std::invalid_argument("witness is singular");

  for (size_t k = 0; k < a.source->dim(); ++k) {
    RatVec ac(t.dim());
    for (size_t r = 0; r < t.dim(); ++r) ac[r] = a.alpha(r, k);
    const auto moved = adjoint_exact(*winv, AlgebraElement{&t, std::move(ac)});
    for (size_t r = 0; r < t.dim(); ++r)
      if (moved.coords[r] != b.alpha(r, k)) return false;
  }

  const Eigen::MatrixXd wd = w.to_double(), wid = winv->to_double();
  for (int s = 0; s < samples; ++s) {
    const auto q = random_q(*a.source, rng);
    const auto lhs = group_element(t, Eigen::MatrixXd(wid * a.i_rep(q.rep) * wd));
    const auto rhs = group_element(t, b.i_rep(q.rep));
    if (!equal_mod_center(lhs, rhs, tol)) return false;
  }
  return true;
}

// Float witness overload.
inline bool pairs_equivalent(const ExtensionPair& a, const ExtensionPair& b,
                             const GroupElement& w, std::mt19937_64& rng, int samples = 12,
                             double tol = 1e-9) {
  if (a.source->family() != b.source->family() || a.source->dim() != b.source->dim() ||
      a.target->dim() != b.target->dim())
    throw std::invalid_argument("pairs live on different algebras");
  const GradedAlgebra& t = *a.target;
  if (w.alg != a.target.get() && w.alg != b.target.get())
    throw std::invalid_argument("witness lives on the wrong group");
  const double wtol = 1e-9 * (1.0 + w.rep.lpNorm<Eigen::Infinity>());
  for (size_t r = 1; r < t.ambient(); ++r)
    if (std::abs(w.rep(r, 0)) > wtol) throw std::invalid_argument("witness not in the target parabolic");
  for (size_t r = 2; r < t.ambient(); ++r)
    if (std::abs(w.rep(r, 1)) > wtol) throw std::invalid_argument("witness not in the target parabolic");

  const Eigen::MatrixXd wd = w.rep, wid = w.rep.inverse();
  const Eigen::MatrixXd alpha_b = b.alpha.to_double();
  for (size_t k = 0; k < a.source->dim(); ++k) {
    RatVec ac(t.dim());
    for (size_t r = 0; r < t.dim(); ++r) ac[r] = a.alpha(r, k);
    const ElementF moved = adjoint(inverse(w), t.to_float(AlgebraElement{&t, std::move(ac)}));
    Eigen::VectorXd want(t.dim());
    for (size_t r = 0; r < t.dim(); ++r) want[r] = alpha_b(r, k);
    if ((moved.coords - want).lpNorm<Eigen::Infinity>() >
        tol * (1.0 + want.lpNorm<Eigen::Infinity>()))
      return false;
  }
  for (int s = 0; s < samples; ++s) {
    const auto q = random_q(*a.source, rng);
    const auto lhs = group_element(t, Eigen::MatrixXd(wid * a.i_rep(q.rep) * wd));
    const auto rhs = group_element(t, b.i_rep(q.rep));
    if (!equal_mod_center(lhs, rhs, tol)) return false;
  }
  return true;
}

// Coordinate functionals cutting out p^: the preimage of the semisimple part
// of g0 inside p. The central g0 coordinates of the value must vanish.
inline std::vector<RatVec> p_hat_rows(const GradedAlgebra& a) {
  std::vector<std::pair<size_t, size_t>> pos;
  switch (a.family()) {
    case Family::lagrangean:
      pos = {{0, 0}, {a.ambient() - 1, a.ambient() - 1}};
      break;
    case Family::path:
      pos = {{0, 0}, {1, 1}};
      break;
    case Family::cr:
      // real and imaginary part of the pivot entry of the realified matrix
      pos = {{0, 0}, {a.ambient() / 2, 0}};
      break;
  }
  std::vector<RatVec> rows;
  for (const auto& [r, c] : pos) {
    RatVec row(a.dim(), Rat(0));
    for (size_t j = 0; j < a.dim(); ++j) row[j] = a.basis_matrix(j)(r, c);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline bool in_p_hat(const AlgebraElement& v) {
  const GradedAlgebra& a = *v.alg;
  for (size_t i = 0; i < a.dim(); ++i)
    if (v.coords[i] != 0 && a.grade_of(i) < 0) return false;
  for (const auto& row : p_hat_rows(a)) {
    Rat s = 0;
    for (size_t i = 0; i < a.dim(); ++i)
      if (v.coords[i] != 0) s += row[i] * v.coords[i];
    if (s != 0) return false;
  }
  return true;
}

// Basis of the space of 2-cochains with values in p^ killed by both halves
// of the codifferential: the candidates whose transfer stays regular and
// normal. Solved exactly, blockwise over (homogeneity, torus weight).
inline std::vector<CochainMap> torsion_free_normal_space(const HodgeCalculus& h) {
  const GradedAlgebra& a = h.algebra();
  const size_t dm = a.dim_minus(), D = a.dim();
  const auto rows_hat = p_hat_rows(a);

  struct Cell {
    size_t i, j, v;
  };
  std::map<std::vector<int>, std::vector<Cell>> blocks;
  for (size_t i = 0; i < dm; ++i)
    for (size_t j = i + 1; j < dm; ++j)
      for (size_t v = 0; v < D; ++v) {
        if (a.grade_of(v) < 0) continue;
        std::vector<int> key{cell_homogeneity(a, {i, j}, v)};
        if (a.has_weights())
          for (size_t c = 0; c < a.weight_of(0).size(); ++c)
            key.push_back(a.weight_of(v)[c] - a.weight_of(i)[c] - a.weight_of(j)[c]);
        blocks[key].push_back({i, j, v});
      }

  std::vector<CochainMap> out;
  for (const auto& [key, cells] : blocks) {
    std::map<std::pair<int, size_t>, size_t> row_ids;
    auto row_of = [&](int half, size_t id) {
      return row_ids.emplace(std::make_pair(half, id), row_ids.size()).first->second;
    };
    std::vector<std::tuple<size_t, size_t, Rat>> entries;
    for (size_t c = 0; c < cells.size(); ++c) {
      const auto& [i, j, v] = cells[c];
      for (int half = 0; half < 2; ++half)
        for (const auto& [id, w] : h.dstar_21_cell(i, j, v, half == 0, half == 1))
          entries.emplace_back(row_of(half, id), c, w);
      for (size_t r = 0; r < rows_hat.size(); ++r)
        if (rows_hat[r][v] != 0)
          entries.emplace_back(row_of(2, pair_index(dm, i, j) * rows_hat.size() + r), c,
                               rows_hat[r][v]);
    }
    auto emit = [&](const RatVec& coef) {
      CochainMap k = make_cochain(a, 2);
      for (size_t c = 0; c < cells.size(); ++c)
        if (coef[c] != 0) k.coeffs[pair_index(dm, cells[c].i, cells[c].j)][cells[c].v] = coef[c];
      out.push_back(std::move(k));
    };
    if (row_ids.empty()) {
      for (size_t c = 0; c < cells.size(); ++c) {
        RatVec unit(cells.size(), Rat(0));
        unit[c] = 1;
        emit(unit);
      }
      continue;
    }
    RatMat m(row_ids.size(), cells.size());
    for (const auto& [r, c, w] : entries) m(r, c) += w;
    for (const auto& ns : m.nullspace()) emit(ns);
  }
  return out;
}

// The trilinear map (X, Y, Z) -> [Psi(X, [Y, W0]), Z] on the target grade -2
// equals a single rational multiple of the full six-term symmetrization of
// the family's model map; returns that multiple.
inline Rat symmetrization_constant(const ExtensionPair& e) {
  const GradedAlgebra& t = *e.target;
  const GradedAlgebra& s = *e.source;
  const size_t n = (t.ambient() - 2) / 2;
  const auto& g2m = t.component("g-2");
  const auto& g1e = t.component("g1E");
  const AlgebraElement w0 = t.basis_element(g1e.begin);
  const CochainMap psi = psi_alpha(e);

  // model map over coordinates (first half | second half) of the grade -2
  auto model = [&](const RatVec& x, const RatVec& y, const RatVec& z) {
    RatVec out(2 * n, Rat(0));
    Rat c = 0;
    if (s.family() == Family::lagrangean) {
      for (size_t k = 0; k < n; ++k) c += x[k] * y[n + k];
      for (size_t k = 0; k < n; ++k) {
        out[k] = c * z[k];
        out[n + k] = -c * z[n + k];
      }
    } else {
      for (size_t k = 0; k < n; ++k)
        c += s.sig(int(k)) * (x[k] * y[k] + x[n + k] * y[n + k]);
      for (size_t k = 0; k < n; ++k) {
        out[k] = -c * z[n + k];
        out[n + k] = c * z[k];
      }
    }
    return out;
  };

  std::optional<Rat> ratio;
  for (size_t b1 = 0; b1 < 2 * n; ++b1)
    for (size_t b2 = 0; b2 < 2 * n; ++b2)
      for (size_t b3 = 0; b3 < 2 * n; ++b3) {
        const auto X = t.basis_element(g2m.begin + b1);
        const auto V = t.bracket(t.basis_element(g2m.begin + b2), w0);
        const auto Z = t.basis_element(g2m.begin + b3);
        const AlgebraElement lhs_el = t.bracket(evaluate(psi, {X, V}), Z);
        RatVec lhs(2 * n, Rat(0));
        for (size_t k = 0; k < 2 * n; ++k) lhs[k] = lhs_el.coords[g2m.begin + k];

        RatVec xs(2 * n, Rat(0)), ys(2 * n, Rat(0)), zs(2 * n, Rat(0));
        xs[b1] = 1;
        ys[b2] = 1;
        zs[b3] = 1;
        const RatVec* v[3] = {&xs, &ys, &zs};
        const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        RatVec sym(2 * n, Rat(0));
        for (const auto& p : perms)
          add_scaled(sym, Rat(1), model(*v[p[0]], *v[p[1]], *v[p[2]]));

        for (size_t k = 0; k < 2 * n; ++k) {
          if (sym[k] == 0) {
            if (lhs[k] != 0)
              throw std::logic_error("trilinear map is not a multiple of the symmetrization");
            continue;
          }
          const Rat r = lhs[k] / sym[k];
          if (!ratio)
            ratio = r;
          else if (*ratio != r)
            throw std::logic_error("trilinear map is not a multiple of the symmetrization");
        }
      }
  if (!ratio || *ratio == 0) throw std::logic_error("trilinear comparison is degenerate");
  return *ratio;
}

// Solves tr(phi(z) e~_b) = c tr(z proj(pre_b)) for a single constant over all
// basis pairs; reference_form measures the closed-form row map instead of
// the duality-normalized phi.
inline Rat phi_duality_constant(const ExtensionPair& e, bool reference_form = false) {
  const GradedAlgebra& s = *e.source;
  const GradedAlgebra& t = *e.target;
  std::optional<Rat> ratio;
  for (size_t k = 0; k < s.dim(); ++k) {
    if (s.grade_of(k) <= 0) continue;
    const auto z = s.basis_element(k);
    const auto fz = reference_form ? phi_reference_form(e, z) : phi_dual(e, z);
    for (size_t b = 0; b < t.dim_minus(); ++b) {
      const Rat lhs = t.trace_form(fz, t.basis_element(b));
      const Rat rhs = s.trace_form(z, minus_truncation(preimage(e, b)));
      if (rhs == 0) {
        if (lhs != 0) throw std::logic_error("pairing is not proportional to the dual pairing");
        continue;
      }
      const Rat r = lhs / rhs;
      if (!ratio)
        ratio = r;
      else if (*ratio != r)
        throw std::logic_error("pairing is not proportional to the dual pairing");
    }
  }
  if (!ratio || *ratio == 0) throw std::logic_error("pairing comparison is degenerate");
  return *ratio;
}

}  // namespace chainalg

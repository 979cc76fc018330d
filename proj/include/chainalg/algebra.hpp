#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chainalg/ratmat.hpp"

namespace chainalg {

// Three families of graded matrix Lie algebras:
//   lagrangean(n): sl(n+2,R) with contact grading from blocks (1, n, 1),
//                  g_{-1} split into column (L) and row (R) halves.
//   path(m):       sl(m+2,R) graded by blocks (1, 1, m); g_{-1} splits into
//                  a 1-dimensional E part and an m-dimensional V part.
//   cr(p,q):       su(p+1,q+1) as a real algebra, realified so that all
//                  structure constants stay rational.
enum class Family { lagrangean, path, cr };

struct Component {
  std::string label;
  int grade;
  size_t begin, end;  // basis index range [begin, end)
  size_t dim() const { return end - begin; }
};

class GradedAlgebra;

struct AlgebraElement {
  const GradedAlgebra* alg = nullptr;
  RatVec coords;

  bool is_zero() const { return chainalg::is_zero(coords); }

  // hidden friends: found only through ADL on AlgebraElement operands
  friend AlgebraElement operator+(const AlgebraElement& x, const AlgebraElement& y) {
    assert(x.alg == y.alg);
    AlgebraElement r = x;
    for (size_t i = 0; i < r.coords.size(); ++i) r.coords[i] += y.coords[i];
    return r;
  }
  friend AlgebraElement operator-(const AlgebraElement& x, const AlgebraElement& y) {
    assert(x.alg == y.alg);
    AlgebraElement r = x;
    for (size_t i = 0; i < r.coords.size(); ++i) r.coords[i] -= y.coords[i];
    return r;
  }
  friend AlgebraElement operator*(const Rat& c, const AlgebraElement& x) {
    AlgebraElement r = x;
    for (auto& v : r.coords) v *= c;
    return r;
  }
  friend bool operator==(const AlgebraElement& x, const AlgebraElement& y) {
    return x.alg == y.alg && x.coords == y.coords;
  }
};

// Floating-point twin of AlgebraElement, used on the group side where
// matrix entries are no longer rational.
struct ElementF {
  const GradedAlgebra* alg = nullptr;
  Eigen::VectorXd coords;
};

class GradedAlgebra {
 public:
  static GradedAlgebra lagrangean(int n) {
    if (n < 1) throw std::invalid_argument("lagrangean grading needs n >= 1");
    GradedAlgebra a;
    a.family_ = Family::lagrangean;
    a.n_ = n;
    a.ambient_ = static_cast<size_t>(n) + 2;
    a.build_lagrangean();
    a.finish();
    return a;
  }

  static GradedAlgebra path(int m) {
    if (m < 2) throw std::invalid_argument("path grading needs m >= 2");
    GradedAlgebra a;
    a.family_ = Family::path;
    a.n_ = m;
    a.ambient_ = static_cast<size_t>(m) + 2;
    a.build_path();
    a.finish();
    return a;
  }

  static GradedAlgebra cr(int p, int q) {
    if (p < 0 || q < 0 || p + q < 1) throw std::invalid_argument("cr grading needs p+q >= 1");
    GradedAlgebra a;
    a.family_ = Family::cr;
    a.p_ = p;
    a.q_ = q;
    a.n_ = p + q;
    a.ambient_ = 2 * (static_cast<size_t>(p + q) + 2);  // realified
    a.build_cr();
    a.finish();
    return a;
  }

  Family family() const { return family_; }
  // n for lagrangean, m for path, p+q for cr.
  int param() const { return n_; }
  int param_p() const { return p_; }
  int param_q() const { return q_; }
  size_t ambient() const { return ambient_; }
  size_t dim() const { return basis_.size(); }
  size_t dim_minus() const { return dim_minus_; }

  const std::vector<Component>& components() const { return comps_; }
  const Component& component(const std::string& label) const {
    for (const auto& c : comps_)
      if (c.label == label) return c;
    throw std::invalid_argument("unknown component label: " + label);
  }
  // Component paired with `label` under the trace form (grade negated, same letter).
  const Component& dual_component(const std::string& label) const {
    return comps_[dual_comp_[component_index(label)]];
  }
  size_t component_index(const std::string& label) const {
    for (size_t i = 0; i < comps_.size(); ++i)
      if (comps_[i].label == label) return i;
    throw std::invalid_argument("unknown component label: " + label);
  }

  const RatMat& basis_matrix(size_t i) const { return basis_[i]; }
  int grade_of(size_t i) const { return grade_of_[i]; }
  size_t component_of(size_t i) const { return comp_of_[i]; }
  const std::string& component_label_of(size_t i) const { return comps_[comp_of_[i]].label; }
  // Diagonal torus weight of a basis vector (empty when the basis is not a
  // weight basis, as for the realified cr family).
  bool has_weights() const { return has_weights_; }
  const std::vector<int>& weight_of(size_t i) const { return weights_[i]; }

  AlgebraElement zero() const { return {this, RatVec(dim(), Rat(0))}; }
  AlgebraElement element(RatVec coords) const {
    if (coords.size() != dim()) throw std::invalid_argument("coordinate length mismatch");
    return {this, std::move(coords)};
  }
  AlgebraElement basis_element(size_t i) const {
    AlgebraElement e = zero();
    e.coords[i] = 1;
    return e;
  }

  RatMat matrix(const AlgebraElement& x) const {
    assert(x.alg == this);
    RatMat m(ambient_, ambient_);
    for (size_t i = 0; i < dim(); ++i) {
      if (x.coords[i] == 0) continue;
      for (const auto& [r, c, v] : triplets_[i]) m(r, c) += x.coords[i] * v;
    }
    return m;
  }

  // Exact coordinates of a matrix known to lie in the algebra; throws otherwise.
  AlgebraElement from_matrix(const RatMat& m) const {
    if (m.rows() != ambient_ || m.cols() != ambient_)
      throw std::invalid_argument("matrix size mismatch");
    RatVec coords = project_coords(m);
    // Residual check: the projection is only valid on the span of the basis.
    RatMat recon(ambient_, ambient_);
    for (size_t i = 0; i < dim(); ++i) {
      if (coords[i] == 0) continue;
      for (const auto& [r, c, v] : triplets_[i]) recon(r, c) += coords[i] * v;
    }
    if (!(recon == m)) throw std::invalid_argument("matrix not in the algebra");
    return {this, std::move(coords)};
  }

  // Least-squares coordinates (exact formula, no membership check).
  RatVec project_coords(const RatMat& m) const {
    RatVec coords(dim(), Rat(0));
    for (size_t r = 0; r < ambient_; ++r)
      for (size_t c = 0; c < ambient_; ++c) {
        const Rat& v = m(r, c);
        if (v == 0) continue;
        const size_t cell = r * ambient_ + c;
        for (const auto& [i, w] : proj_rows_[cell]) coords[i] += w * v;
      }
    return coords;
  }

  ElementF to_float(const AlgebraElement& x) const {
    assert(x.alg == this);
    Eigen::VectorXd c(dim());
    for (size_t i = 0; i < dim(); ++i) c[i] = to_double(x.coords[i]);
    return {this, std::move(c)};
  }

  Eigen::MatrixXd matrix_d(const ElementF& x) const {
    assert(x.alg == this);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ambient_, ambient_);
    for (size_t i = 0; i < dim(); ++i) {
      if (x.coords[i] == 0.0) continue;
      for (const auto& [r, c, v] : triplets_d_[i]) m(r, c) += x.coords[i] * v;
    }
    return m;
  }

  // Float analogue of project_coords; exact projection weights, so the only
  // error is the input's own and no conditioning is introduced.
  ElementF project_coords_d(const Eigen::MatrixXd& m) const {
    if (size_t(m.rows()) != ambient_ || size_t(m.cols()) != ambient_)
      throw std::invalid_argument("matrix size mismatch");
    Eigen::VectorXd coords = Eigen::VectorXd::Zero(dim());
    for (size_t r = 0; r < ambient_; ++r)
      for (size_t c = 0; c < ambient_; ++c) {
        const double v = m(r, c);
        if (v == 0.0) continue;
        for (const auto& [i, w] : proj_rows_d_[r * ambient_ + c]) coords[i] += w * v;
      }
    return {this, std::move(coords)};
  }

  AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) const {
    if (x.alg != this || y.alg != this) throw std::invalid_argument("mismatched algebras");
    AlgebraElement r = zero();
    for (size_t i = 0; i < dim(); ++i) {
      if (x.coords[i] == 0) continue;
      for (size_t j = 0; j < dim(); ++j) {
        if (y.coords[j] == 0) continue;
        const Rat f = x.coords[i] * y.coords[j];
        for (const auto& [k, c] : brackets_[i * dim() + j]) r.coords[k] += f * c;
      }
    }
    return r;
  }

  // Bracket of two basis elements, as precomputed structure constants.
  const std::vector<std::pair<size_t, Rat>>& basis_bracket(size_t i, size_t j) const {
    return brackets_[i * dim() + j];
  }

  Rat trace_form(const AlgebraElement& x, const AlgebraElement& y) const {
    if (x.alg != this || y.alg != this) throw std::invalid_argument("mismatched algebras");
    Rat t = 0;
    for (size_t i = 0; i < dim(); ++i) {
      if (x.coords[i] == 0) continue;
      for (size_t j = 0; j < dim(); ++j)
        if (y.coords[j] != 0 && trace_gram_(i, j) != 0) t += x.coords[i] * y.coords[j] * trace_gram_(i, j);
    }
    return t;
  }
  const RatMat& trace_gram() const { return trace_gram_; }
  // Frobenius pairing tr(X Y^t), the inner product used by the Hodge calculus.
  const RatMat& frobenius_gram() const { return frob_gram_; }

  std::map<std::string, AlgebraElement> grade_split(const AlgebraElement& x) const {
    assert(x.alg == this);
    std::map<std::string, AlgebraElement> parts;
    for (const auto& c : comps_) {
      AlgebraElement part = zero();
      for (size_t i = c.begin; i < c.end; ++i) part.coords[i] = x.coords[i];
      parts.emplace(c.label, std::move(part));
    }
    return parts;
  }

  AlgebraElement component_part(const AlgebraElement& x, const std::string& label) const {
    const Component& c = component(label);
    AlgebraElement part = zero();
    for (size_t i = c.begin; i < c.end; ++i) part.coords[i] = x.coords[i];
    return part;
  }

  // Zero outside the given grade.
  AlgebraElement grade_part(const AlgebraElement& x, int grade) const {
    AlgebraElement part = zero();
    for (size_t i = 0; i < dim(); ++i)
      if (grade_of_[i] == grade) part.coords[i] = x.coords[i];
    return part;
  }

  // Hermitian-form Gram matrix (realified) for the cr family.
  const RatMat& form_gram() const {
    if (family_ != Family::cr) throw std::logic_error("form_gram is cr-only");
    return form_gram_;
  }

  // Middle-block signature signs (+1 x p, -1 x q) for the cr family.
  Rat sig(int k) const { return k < p_ ? Rat(1) : Rat(-1); }  // k in [0, n)

 private:
  using Triplet = std::tuple<size_t, size_t, Rat>;

  Family family_ = Family::lagrangean;
  int n_ = 0, p_ = 0, q_ = 0;
  size_t ambient_ = 0;
  size_t dim_minus_ = 0;
  std::vector<RatMat> basis_;
  std::vector<std::vector<Triplet>> triplets_;
  std::vector<Component> comps_;
  std::vector<int> grade_of_;
  std::vector<size_t> comp_of_;
  std::vector<size_t> dual_comp_;
  bool has_weights_ = false;
  std::vector<std::vector<int>> weights_;
  RatMat trace_gram_, frob_gram_, form_gram_;
  // proj_rows_[cell] lists (basis index, weight) of the exact coordinate
  // projection; cell = row * ambient + col of the vectorized matrix.
  std::vector<std::vector<std::pair<size_t, Rat>>> proj_rows_;
  std::vector<std::vector<std::pair<size_t, Rat>>> brackets_;
  std::vector<std::vector<std::tuple<size_t, size_t, double>>> triplets_d_;
  std::vector<std::vector<std::pair<size_t, double>>> proj_rows_d_;

  void push_component(const std::string& label, int grade,
                      std::vector<RatMat> mats) {
    Component c{label, grade, basis_.size(), basis_.size() + mats.size()};
    for (auto& m : mats) {
      basis_.push_back(std::move(m));
      grade_of_.push_back(grade);
      comp_of_.push_back(comps_.size());
    }
    comps_.push_back(std::move(c));
  }

  RatMat E(size_t r, size_t c) const {
    RatMat m(ambient_, ambient_);
    m(r, c) = 1;
    return m;
  }

  void build_lagrangean() {
    const size_t n = n_, N = ambient_;
    std::vector<RatMat> mats;

    mats.clear();
    mats.push_back(E(N - 1, 0));
    push_component("g-2", -2, std::move(mats));

    mats.clear();
    for (size_t k = 1; k <= n; ++k) mats.push_back(E(k, 0));
    push_component("g-1L", -1, std::move(mats));

    mats.clear();
    for (size_t k = 1; k <= n; ++k) mats.push_back(E(N - 1, k));
    push_component("g-1R", -1, std::move(mats));

    mats.clear();
    for (size_t i = 0; i + 1 < N; ++i) mats.push_back(E(i, i) - E(i + 1, i + 1));
    for (size_t j = 1; j <= n; ++j)
      for (size_t k = 1; k <= n; ++k)
        if (j != k) mats.push_back(E(j, k));
    push_component("g0", 0, std::move(mats));

    mats.clear();
    for (size_t k = 1; k <= n; ++k) mats.push_back(E(0, k));
    push_component("g1L", 1, std::move(mats));

    mats.clear();
    for (size_t k = 1; k <= n; ++k) mats.push_back(E(k, N - 1));
    push_component("g1R", 1, std::move(mats));

    mats.clear();
    mats.push_back(E(0, N - 1));
    push_component("g2", 2, std::move(mats));

    dual_comp_ = {6, 4, 5, 3, 1, 2, 0};
    has_weights_ = true;
  }

  void build_path() {
    const size_t m = n_, N = ambient_;
    std::vector<RatMat> mats;

    mats.clear();
    for (size_t k = 2; k < N; ++k) mats.push_back(E(k, 0));
    push_component("g-2", -2, std::move(mats));

    mats.clear();
    mats.push_back(E(1, 0));
    push_component("g-1E", -1, std::move(mats));

    mats.clear();
    for (size_t k = 2; k < N; ++k) mats.push_back(E(k, 1));
    push_component("g-1V", -1, std::move(mats));

    mats.clear();
    for (size_t i = 0; i + 1 < N; ++i) mats.push_back(E(i, i) - E(i + 1, i + 1));
    for (size_t j = 2; j < N; ++j)
      for (size_t k = 2; k < N; ++k)
        if (j != k) mats.push_back(E(j, k));
    push_component("g0", 0, std::move(mats));

    mats.clear();
    mats.push_back(E(0, 1));
    push_component("g1E", 1, std::move(mats));

    mats.clear();
    for (size_t k = 2; k < N; ++k) mats.push_back(E(1, k));
    push_component("g1V", 1, std::move(mats));

    mats.clear();
    for (size_t k = 2; k < N; ++k) mats.push_back(E(0, k));
    push_component("g2", 2, std::move(mats));

    dual_comp_ = {6, 4, 5, 3, 1, 2, 0};
    has_weights_ = true;
    (void)m;
  }

  // Complex (n+2)x(n+2) matrix given by rational real/imaginary parts,
  // realified as [[Re, -Im], [Im, Re]].
  RatMat realify(const RatMat& re, const RatMat& im) const {
    const size_t N = re.rows();
    RatMat r(2 * N, 2 * N);
    for (size_t i = 0; i < N; ++i)
      for (size_t j = 0; j < N; ++j) {
        r(i, j) = re(i, j);
        r(i + N, j + N) = re(i, j);
        r(i, j + N) = -im(i, j);
        r(i + N, j) = im(i, j);
      }
    return r;
  }

  void build_cr() {
    const size_t n = static_cast<size_t>(n_);
    const size_t N = n + 2;  // complex side length
    auto Ec = [&](size_t r, size_t c) {
      RatMat m(N, N);
      m(r, c) = 1;
      return m;
    };
    const RatMat Z(N, N);
    auto re_mat = [&](const RatMat& re) { return realify(re, Z); };
    auto im_mat = [&](const RatMat& im) { return realify(Z, im); };
    std::vector<RatMat> mats;

    // g_{-2}: x real, entry i*x at (n+1, 0).
    mats.clear();
    mats.push_back(im_mat(Ec(N - 1, 0)));
    push_component("g-2", -2, std::move(mats));

    // g_{-1}: X in C^n; block X at (middle,0) and -X*I at (n+1, middle).
    mats.clear();
    for (size_t k = 1; k <= n; ++k)  // X = e_k
      mats.push_back(re_mat(Ec(k, 0) - sig(int(k) - 1) * Ec(N - 1, k)));
    for (size_t k = 1; k <= n; ++k)  // X = i e_k
      mats.push_back(im_mat(Ec(k, 0) + sig(int(k) - 1) * Ec(N - 1, k)));
    push_component("g-1", -1, std::move(mats));

    // g_0: w in C, A in u(p,q), with w - conj(w) + tr(A) = 0.
    mats.clear();
    mats.push_back(re_mat(Ec(0, 0) - Ec(N - 1, N - 1)));                    // w = 1
    mats.push_back(im_mat(Ec(0, 0) + Ec(N - 1, N - 1) - Rat(2) * Ec(1, 1)));  // w = i, A = -2i E11
    for (size_t k = 1; k + 1 <= n; ++k)                                     // A = i(Ekk - Ek+1k+1)
      mats.push_back(im_mat(Ec(k, k) - Ec(k + 1, k + 1)));
    for (size_t j = 1; j <= n; ++j)
      for (size_t k = j + 1; k <= n; ++k) {
        const Rat s = sig(int(j) - 1) * sig(int(k) - 1);
        mats.push_back(re_mat(Ec(j, k) - s * Ec(k, j)));
        mats.push_back(im_mat(Ec(j, k) + s * Ec(k, j)));
      }
    push_component("g0", 0, std::move(mats));

    // g_1: Z in C^{n*}; block Z at (0,middle) and -I Z* at (middle, n+1).
    mats.clear();
    for (size_t k = 1; k <= n; ++k)  // Z = e_k^t
      mats.push_back(re_mat(Ec(0, k) - sig(int(k) - 1) * Ec(k, N - 1)));
    for (size_t k = 1; k <= n; ++k)  // Z = i e_k^t
      mats.push_back(im_mat(Ec(0, k) + sig(int(k) - 1) * Ec(k, N - 1)));
    push_component("g1", 1, std::move(mats));

    // g_2: z real, entry i*z at (0, n+1).
    mats.clear();
    mats.push_back(im_mat(Ec(0, N - 1)));
    push_component("g2", 2, std::move(mats));

    dual_comp_ = {4, 3, 2, 1, 0};
    has_weights_ = false;

    RatMat form(N, N);
    form(0, N - 1) = 1;
    form(N - 1, 0) = 1;
    for (size_t k = 1; k <= n; ++k) form(k, k) = sig(int(k) - 1);
    form_gram_ = realify(form, Z);
  }

  void finish() {
    const size_t D = basis_.size();
    triplets_.resize(D);
    for (size_t i = 0; i < D; ++i)
      for (size_t r = 0; r < ambient_; ++r)
        for (size_t c = 0; c < ambient_; ++c)
          if (basis_[i](r, c) != 0) triplets_[i].emplace_back(r, c, basis_[i](r, c));

    dim_minus_ = 0;
    for (size_t i = 0; i < D; ++i)
      if (grade_of_[i] < 0) ++dim_minus_;
    for (size_t i = 0; i < dim_minus_; ++i) assert(grade_of_[i] < 0);

    if (has_weights_) {
      weights_.resize(D);
      for (size_t i = 0; i < D; ++i) {
        std::vector<int> w(ambient_, 0);
        // E_{rc} has weight e_r - e_c; diagonal basis matrices have weight 0.
        const auto& t = triplets_[i];
        if (t.size() == 1 || (t.size() >= 1 && std::get<0>(t[0]) != std::get<1>(t[0]))) {
          w[std::get<0>(t[0])] += 1;
          w[std::get<1>(t[0])] -= 1;
        }
        weights_[i] = std::move(w);
      }
    }

    // Exact coordinate projection: coords = (B^t B)^{-1} B^t vec(M).
    RatMat gram(D, D);
    for (size_t i = 0; i < D; ++i)
      for (size_t j = i; j < D; ++j) {
        Rat s = 0;
        for (const auto& [r, c, v] : triplets_[i]) s += v * basis_[j](r, c);
        gram(i, j) = s;
        gram(j, i) = s;
      }
    const auto inv = gram.inverse();
    if (!inv) throw std::logic_error("basis not linearly independent");
    proj_rows_.assign(ambient_ * ambient_, {});
    for (size_t j = 0; j < D; ++j)
      for (const auto& [r, c, v] : triplets_[j]) {
        const size_t cell = r * ambient_ + c;
        for (size_t i = 0; i < D; ++i)
          if ((*inv)(i, j) != 0) proj_rows_[cell].emplace_back(i, (*inv)(i, j) * v);
      }

    // Structure constants; from_matrix doubles as the closure check.
    brackets_.resize(D * D);
    for (size_t i = 0; i < D; ++i)
      for (size_t j = 0; j < D; ++j) {
        if (j < i) {  // antisymmetry: reuse [j,i]
          for (const auto& [k, c] : brackets_[j * D + i]) brackets_[i * D + j].emplace_back(k, -c);
          continue;
        }
        if (j == i) continue;
        const RatMat comm = commutator(basis_[i], basis_[j]);
        const AlgebraElement e = from_matrix(comm);
        for (size_t k = 0; k < D; ++k)
          if (e.coords[k] != 0) brackets_[i * D + j].emplace_back(k, e.coords[k]);
      }

    triplets_d_.resize(D);
    for (size_t i = 0; i < D; ++i)
      for (const auto& [r, c, v] : triplets_[i]) triplets_d_[i].emplace_back(r, c, to_double(v));
    proj_rows_d_.resize(proj_rows_.size());
    for (size_t cell = 0; cell < proj_rows_.size(); ++cell)
      for (const auto& [i, w] : proj_rows_[cell]) proj_rows_d_[cell].emplace_back(i, to_double(w));

    trace_gram_ = RatMat(D, D);
    frob_gram_ = RatMat(D, D);
    for (size_t i = 0; i < D; ++i)
      for (size_t j = i; j < D; ++j) {
        Rat t = 0, f = 0;
        for (const auto& [r, c, v] : triplets_[i]) {
          t += v * basis_[j](c, r);
          f += v * basis_[j](r, c);
        }
        trace_gram_(i, j) = t;
        trace_gram_(j, i) = t;
        frob_gram_(i, j) = f;
        frob_gram_(j, i) = f;
      }
  }
};

inline AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  return x.alg->bracket(x, y);
}
inline Rat trace_form(const AlgebraElement& x, const AlgebraElement& y) {
  return x.alg->trace_form(x, y);
}

}  // namespace chainalg

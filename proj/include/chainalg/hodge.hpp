#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <tuple>

#include "chainalg/cochain.hpp"

namespace chainalg {

struct HarmonicBasis {
  std::vector<CochainMap> vectors;
  std::vector<int> homogeneity;       // per vector
  std::vector<std::string> container;  // per vector, "A^B x C" (joined by " + " if mixed)
  size_t size() const { return vectors.size(); }
};

// Summary row: dimension of the harmonic space per (homogeneity, container).
struct HarmonicTableRow {
  int homogeneity;
  std::string container;
  size_t dim;
};

inline std::vector<HarmonicTableRow> harmonic_table(const HarmonicBasis& h) {
  std::map<std::pair<int, std::string>, size_t> acc;
  for (size_t i = 0; i < h.size(); ++i) ++acc[{h.homogeneity[i], h.container[i]}];
  std::vector<HarmonicTableRow> rows;
  for (const auto& [k, d] : acc) rows.push_back({k.first, k.second, d});
  return rows;
}

// Trace-dual basis of p_plus: Z^b is supported on the positive grades with
// tr(Z^b e_c) = delta_bc over the negative basis prefix.
inline std::vector<AlgebraElement> trace_dual_basis(const GradedAlgebra& a) {
  const size_t dm = a.dim_minus();
  std::vector<size_t> plus;
  for (size_t i = 0; i < a.dim(); ++i)
    if (a.grade_of(i) > 0) plus.push_back(i);
  if (plus.size() != dm) throw std::logic_error("p_plus and g_minus dimensions differ");

  RatMat pairing(dm, dm);
  for (size_t r = 0; r < dm; ++r)
    for (size_t c = 0; c < dm; ++c) pairing(r, c) = a.trace_gram()(plus[r], c);
  const auto inv = pairing.inverse();
  if (!inv) throw std::logic_error("trace pairing of p_plus with g_minus is degenerate");
  std::vector<AlgebraElement> zdual;
  zdual.reserve(dm);
  for (size_t b = 0; b < dm; ++b) {
    // tr(Z^b e_c) = sum_r x_r P(r,c) = delta_bc, so x is row b of P^-1
    auto z = a.zero();
    for (size_t r = 0; r < dm; ++r) z.coords[plus[r]] = (*inv)(b, r);
    zdual.push_back(std::move(z));
  }
  return zdual;
}

// Shape summary of a curvature-type cochain. The zero cochain has the
// sentinel homogeneity and passes every predicate.
struct CochainPredicates {
  int min_homogeneity = kNoHomogeneity;
  bool regular = true;       // every cell of positive homogeneity
  bool normal = true;        // codifferential-closed
  bool torsion_free = true;  // values in the non-negative grades
};

// Hodge calculus on cochains Lambda^* g_minus -> g. The codifferential acts
// through the trace-dual basis Z^a of p_plus (tr(Z^a e_b) = delta_ab); the
// differential is the Lie algebra cohomology differential of g_minus with
// coefficients in g. Everything is exact.
class HodgeCalculus {
 public:
  explicit HodgeCalculus(const GradedAlgebra& a) : alg_(&a) {
    const size_t dm = a.dim_minus();
    zdual_ = trace_dual_basis(a);

    // gamma_{ab,c} = tr([Z^a, Z^b] e_c): expansion of [Z^a,Z^b] over Z^c
    zz_.assign(dm * dm, {});
    for (size_t x = 0; x < dm; ++x)
      for (size_t y = x + 1; y < dm; ++y) {
        const auto br = a.bracket(zdual_[x], zdual_[y]);
        for (size_t c = 0; c < dm; ++c) {
          const Rat t = a.trace_form(br, a.basis_element(c));
          if (t != 0) zz_[x * dm + y].emplace_back(c, t);
        }
      }

    // minus-bracket structure [e_i, e_j] = sum mb e_k, grouped by target
    mb_by_target_.assign(dm, {});
    for (size_t i = 0; i < dm; ++i)
      for (size_t j = i + 1; j < dm; ++j)
        for (const auto& [k, c] : a.basis_bracket(i, j)) {
          assert(k < dm);
          mb_by_target_[k].emplace_back(i, j, c);
        }

    // sparse action table [Z^a, e_v]
    za_ev_.assign(dm * a.dim(), {});
    for (size_t x = 0; x < dm; ++x)
      for (size_t v = 0; v < a.dim(); ++v) {
        RatVec acc(a.dim(), Rat(0));
        for (size_t r = 0; r < a.dim(); ++r) {
          const Rat& zc = zdual_[x].coords[r];
          if (zc == 0) continue;
          for (const auto& [k, c] : a.basis_bracket(r, v)) acc[k] += zc * c;
        }
        for (size_t k = 0; k < a.dim(); ++k)
          if (acc[k] != 0) za_ev_[x * a.dim() + v].emplace_back(k, acc[k]);
      }

    // inner product weights: the minus basis must be Frobenius-orthogonal
    fro_w_.resize(dm);
    for (size_t i = 0; i < dm; ++i) {
      for (size_t j = 0; j < dm; ++j)
        if (i != j && a.frobenius_gram()(i, j) != 0)
          throw std::logic_error("negative basis is not Frobenius-orthogonal");
      fro_w_[i] = a.frobenius_gram()(i, i);
    }
  }

  const GradedAlgebra& algebra() const { return *alg_; }
  const AlgebraElement& dual_basis(size_t a) const { return zdual_[a]; }

  using Cells = std::vector<std::pair<size_t, Rat>>;  // (cell id, coefficient)
  static size_t cell_id(const GradedAlgebra& a, size_t tidx, size_t v) {
    return tidx * a.dim() + v;
  }

  // -- single-cell operator images (cell id = tuple_index * dim + value) --

  // codifferential, degree 2 -> 1, of the cell (a < b, value e_v)
  Cells dstar_21_cell(size_t x, size_t y, size_t v, bool action, bool brkt) const {
    const GradedAlgebra& a = *alg_;
    const size_t dm = a.dim_minus();
    Cells out;
    if (action) {
      for (const auto& [w, c] : za_ev_[x * a.dim() + v]) out.emplace_back(cell_id(a, y, w), -c);
      for (const auto& [w, c] : za_ev_[y * a.dim() + v]) out.emplace_back(cell_id(a, x, w), c);
    }
    if (brkt)
      for (const auto& [c, g] : zz_[x * dm + y]) out.emplace_back(cell_id(a, c, v), -g);
    return out;
  }

  // codifferential, degree 3 -> 2, of the cell (x < y < z, value e_v)
  Cells dstar_32_cell(size_t x, size_t y, size_t z, size_t v, bool action, bool brkt) const {
    const GradedAlgebra& a = *alg_;
    const size_t dm = a.dim_minus();
    Cells out;
    auto add_pair = [&](size_t p, size_t q, size_t w, const Rat& c) {
      if (p == q || c == 0) return;
      if (p < q)
        out.emplace_back(cell_id(a, pair_index(dm, p, q), w), c);
      else
        out.emplace_back(cell_id(a, pair_index(dm, q, p), w), -c);
    };
    if (action) {
      for (const auto& [w, c] : za_ev_[x * a.dim() + v]) add_pair(y, z, w, -c);
      for (const auto& [w, c] : za_ev_[y * a.dim() + v]) add_pair(x, z, w, c);
      for (const auto& [w, c] : za_ev_[z * a.dim() + v]) add_pair(x, y, w, -c);
    }
    if (brkt) {
      for (const auto& [d, g] : zz_[x * dm + y]) add_pair(d, z, v, -g);
      for (const auto& [d, g] : zz_[x * dm + z]) add_pair(d, y, v, g);
      for (const auto& [d, g] : zz_[y * dm + z]) add_pair(d, x, v, -g);
    }
    return out;
  }

  // differential, degree 1 -> 2, of the cell (i, value e_v)
  Cells d_12_cell(size_t i, size_t v) const {
    const GradedAlgebra& a = *alg_;
    const size_t dm = a.dim_minus();
    Cells out;
    for (size_t x = 0; x < dm; ++x) {
      if (x == i) continue;
      const size_t tidx = x < i ? pair_index(dm, x, i) : pair_index(dm, i, x);
      const Rat sign = x < i ? Rat(1) : Rat(-1);
      for (const auto& [w, c] : a.basis_bracket(x, v))
        out.emplace_back(cell_id(a, tidx, w), sign * c);
    }
    for (const auto& [x, y, c] : mb_by_target_[i])
      out.emplace_back(cell_id(a, pair_index(dm, x, y), v), -c);
    return out;
  }

  // differential, degree 2 -> 3, of the cell (i < j, value e_v)
  Cells d_23_cell(size_t i, size_t j, size_t v) const {
    const GradedAlgebra& a = *alg_;
    const size_t dm = a.dim_minus();
    Cells out;
    auto add_triple = [&](size_t p, size_t q, size_t r, size_t w, const Rat& c) {
      // p,q,r pairwise distinct; sort with sign
      size_t t[3] = {p, q, r};
      int sign = 1;
      for (int s = 0; s < 2; ++s)
        for (int u = 0; u < 2 - s; ++u)
          if (t[u] > t[u + 1]) {
            std::swap(t[u], t[u + 1]);
            sign = -sign;
          }
      out.emplace_back(cell_id(a, triple_index(dm, t[0], t[1], t[2]), w),
                       sign > 0 ? c : -c);
    };
    // action terms: insert p into the pair (i,j)
    for (size_t p = 0; p < dm; ++p) {
      if (p == i || p == j) continue;
      for (const auto& [w, c] : a.basis_bracket(p, v)) add_triple(p, i, j, w, c);
    }
    // bracket terms: [e_x, e_y] hitting e_i (resp. e_j) with the other leg
    for (const auto& [x, y, c] : mb_by_target_[i]) {
      if (x == j || y == j) continue;
      // phi([x,y], e_j) = c * e_v at pair (i,j); position of j decides the sign
      const int pos = j < x ? 0 : (j < y ? 1 : 2);
      const Rat s = (pos == 1) ? c : -c;
      size_t t[3] = {x, y, j};
      std::sort(t, t + 3);
      out.emplace_back(cell_id(a, triple_index(dm, t[0], t[1], t[2]), v), s);
    }
    for (const auto& [x, y, c] : mb_by_target_[j]) {
      if (x == i || y == i) continue;
      const int pos = i < x ? 0 : (i < y ? 1 : 2);
      const Rat s = (pos == 1) ? -c : c;
      size_t t[3] = {x, y, i};
      std::sort(t, t + 3);
      out.emplace_back(cell_id(a, triple_index(dm, t[0], t[1], t[2]), v), s);
    }
    return out;
  }

  // -- bulk operators --

  CochainMap codifferential_parts(const CochainMap& c, bool action, bool brkt) const {
    check(c);
    if (c.degree == 1) throw std::invalid_argument("codifferential needs degree 2 or 3");
    CochainMap out = make_cochain(*alg_, c.degree - 1);
    const size_t D = alg_->dim();
    for_each_cell(c, [&](const std::vector<size_t>& t, size_t, size_t v, const Rat& coef) {
      const Cells cells = c.degree == 2 ? dstar_21_cell(t[0], t[1], v, action, brkt)
                                        : dstar_32_cell(t[0], t[1], t[2], v, action, brkt);
      for (const auto& [id, w] : cells) out.coeffs[id / D][id % D] += coef * w;
    });
    return out;
  }
  CochainMap codifferential(const CochainMap& c) const { return codifferential_parts(c, true, true); }
  CochainMap codifferential_action(const CochainMap& c) const {
    return codifferential_parts(c, true, false);
  }
  CochainMap codifferential_bracket(const CochainMap& c) const {
    return codifferential_parts(c, false, true);
  }

  CochainMap differential(const CochainMap& c) const {
    check(c);
    if (c.degree == 3) throw std::invalid_argument("differential tops out at degree 3");
    CochainMap out = make_cochain(*alg_, c.degree + 1);
    const size_t D = alg_->dim();
    for_each_cell(c, [&](const std::vector<size_t>& t, size_t, size_t v, const Rat& coef) {
      const Cells cells = c.degree == 1 ? d_12_cell(t[0], v) : d_23_cell(t[0], t[1], v);
      for (const auto& [id, w] : cells) out.coeffs[id / D][id % D] += coef * w;
    });
    return out;
  }

  CochainMap laplacian(const CochainMap& c) const {
    check(c);
    if (c.degree != 2) throw std::invalid_argument("laplacian is implemented in degree 2");
    return differential(codifferential(c)) + codifferential(differential(c));
  }

  CochainPredicates predicates(const CochainMap& c) const {
    check(c);
    if (c.degree == 1) throw std::invalid_argument("predicates need degree 2 or 3");
    CochainPredicates p;
    p.min_homogeneity = min_homogeneity(c);
    p.regular = p.min_homogeneity == kNoHomogeneity || p.min_homogeneity >= 1;
    p.normal = codifferential(c).is_zero();
    for_each_cell(c, [&](const std::vector<size_t>&, size_t, size_t v, const Rat&) {
      if (alg_->grade_of(v) < 0) p.torsion_free = false;
    });
    return p;
  }

  // Positive definite pairing induced by tr(X Y^t) with orthogonal minus legs.
  Rat inner_product(const CochainMap& x, const CochainMap& y) const {
    check(x);
    check(y);
    if (x.degree != y.degree) throw std::invalid_argument("degree mismatch");
    const RatMat& F = alg_->frobenius_gram();
    Rat total = 0;
    auto tuple_weight = [&](const std::vector<size_t>& t) {
      Rat w = 1;
      for (size_t e : t) w /= fro_w_[e];
      return w;
    };
    for_each_cell(x, [&](const std::vector<size_t>& t, size_t tidx, size_t v, const Rat& coef) {
      const RatVec& other = y.coeffs[tidx];
      Rat s = 0;
      for (size_t w = 0; w < alg_->dim(); ++w)
        if (other[w] != 0 && F(v, w) != 0) s += other[w] * F(v, w);
      total += tuple_weight(t) * coef * s;
    });
    return total;
  }

  // -- harmonic theory, blockwise by (homogeneity, torus weight) --

  const HarmonicBasis& harmonic_kernel() const {
    if (!harm_) harm_ = compute_harmonics();
    return *harm_;
  }

  // Splits a codifferential-closed 2-cochain as harmonic + codifferential
  // image and returns the harmonic part.
  CochainMap harmonic_project(const CochainMap& c) const {
    check(c);
    if (c.degree != 2) throw std::invalid_argument("harmonic projection needs degree 2");
    if (!codifferential(c).is_zero())
      throw std::domain_error("harmonic projection needs a codifferential-closed input");
    const HarmonicBasis& hb = harmonic_kernel();
    const GradedAlgebra& a = *alg_;
    const size_t D = a.dim();

    // group the support of c by block key
    std::map<std::vector<int>, std::vector<std::pair<size_t, Rat>>> by_key;
    for_each_cell(c, [&](const std::vector<size_t>& t, size_t tidx, size_t v, const Rat& coef) {
      by_key[cell_key(t, v)].emplace_back(cell_id(a, tidx, v), coef);
    });

    CochainMap out = make_cochain(a, 2);
    for (const auto& [key, support] : by_key) {
      const auto& cells2 = cells_of_key(2, key);
      std::map<size_t, size_t> local;
      for (size_t r = 0; r < cells2.size(); ++r) local[cells2[r]] = r;

      // columns: harmonic vectors with this key, then dstar images of
      // degree-3 cells with this key
      std::vector<size_t> hvecs;
      for (size_t i = 0; i < hb.size(); ++i)
        if (!hb.vectors[i].is_zero() && vector_key(hb.vectors[i]) == key) hvecs.push_back(i);
      const auto& cells3 = cells_of_key(3, key);

      RatMat sys(cells2.size(), hvecs.size() + cells3.size());
      for (size_t col = 0; col < hvecs.size(); ++col)
        for_each_cell(hb.vectors[hvecs[col]],
                      [&](const std::vector<size_t>&, size_t tidx, size_t v, const Rat& coef) {
                        sys(local.at(cell_id(a, tidx, v)), col) = coef;
                      });
      for (size_t col = 0; col < cells3.size(); ++col) {
        const size_t id = cells3[col];
        const auto t = triple_of_cached(id / D);
        for (const auto& [oid, w] : dstar_32_cell(t[0], t[1], t[2], id % D, true, true))
          sys(local.at(oid), hvecs.size() + col) += w;
      }

      RatVec rhs(cells2.size(), Rat(0));
      for (const auto& [id, coef] : support) rhs[local.at(id)] = coef;
      const auto sol = sys.solve(rhs);
      if (!sol) throw std::logic_error("Hodge decomposition failed in a block");
      for (size_t col = 0; col < hvecs.size(); ++col)
        if ((*sol)[col] != 0) {
          for_each_cell(hb.vectors[hvecs[col]],
                        [&](const std::vector<size_t>&, size_t tidx, size_t v, const Rat& coef) {
                          out.coeffs[tidx][v] += (*sol)[col] * coef;
                        });
        }
    }
    return out;
  }

 private:
  const GradedAlgebra* alg_;
  std::vector<AlgebraElement> zdual_;
  std::vector<Cells> zz_;  // zz_[a*dm+b] (a<b): expansion coeffs of [Z^a,Z^b] over Z^c
  std::vector<Cells> za_ev_;  // za_ev_[a*dim+v]: coords of [Z^a, e_v]
  std::vector<std::vector<std::tuple<size_t, size_t, Rat>>> mb_by_target_;
  std::vector<Rat> fro_w_;
  mutable std::optional<HarmonicBasis> harm_;
  mutable std::map<std::pair<int, std::vector<int>>, std::vector<size_t>> key_cells_;

  void check(const CochainMap& c) const {
    if (c.alg != alg_) throw std::invalid_argument("cochain belongs to another algebra");
  }

  std::vector<int> key_of(const std::vector<size_t>& tuple, size_t v) const {
    const GradedAlgebra& a = *alg_;
    std::vector<int> key{cell_homogeneity(a, tuple, v)};
    if (a.has_weights()) {
      std::vector<int> w = a.weight_of(v);
      for (size_t t : tuple)
        for (size_t q = 0; q < w.size(); ++q) w[q] -= a.weight_of(t)[q];
      key.insert(key.end(), w.begin(), w.end());
    }
    return key;
  }
  std::vector<int> cell_key(const std::vector<size_t>& tuple, size_t v) const {
    return key_of(tuple, v);
  }
  std::vector<int> vector_key(const CochainMap& c) const {
    std::optional<std::vector<int>> key;
    for_each_cell(c, [&](const std::vector<size_t>& t, size_t, size_t v, const Rat&) {
      const auto k = key_of(t, v);
      if (!key)
        key = k;
      else if (*key != k)
        throw std::logic_error("cochain spans several blocks");
    });
    return key ? *key : std::vector<int>{};
  }

  const std::vector<size_t>& cells_of_key(int degree, const std::vector<int>& key) const {
    build_key_tables();
    static const std::vector<size_t> empty;
    const auto it = key_cells_.find({degree, key});
    return it == key_cells_.end() ? empty : it->second;
  }

  void build_key_tables() const {
    if (!key_cells_.empty()) return;
    const GradedAlgebra& a = *alg_;
    const size_t dm = a.dim_minus(), D = a.dim();
    auto add = [&](int deg, const std::vector<size_t>& t, size_t tidx) {
      for (size_t v = 0; v < D; ++v)
        key_cells_[{deg, key_of(t, v)}].push_back(cell_id(a, tidx, v));
    };
    for (size_t i = 0; i < dm; ++i) add(1, {i}, i);
    for (size_t i = 0; i < dm; ++i)
      for (size_t j = i + 1; j < dm; ++j) add(2, {i, j}, pair_index(dm, i, j));
    for (size_t i = 0; i < dm; ++i)
      for (size_t j = i + 1; j < dm; ++j)
        for (size_t k = j + 1; k < dm; ++k) add(3, {i, j, k}, triple_index(dm, i, j, k));
  }

  HarmonicBasis compute_harmonics() const {
    build_key_tables();
    const GradedAlgebra& a = *alg_;
    const size_t D = a.dim(), dm = a.dim_minus();
    HarmonicBasis hb;

    for (const auto& [dk, cells2] : key_cells_) {
      if (dk.first != 2) continue;
      const std::vector<int>& key = dk.second;
      std::map<size_t, size_t> local;
      for (size_t r = 0; r < cells2.size(); ++r) local[cells2[r]] = r;

      // laplacian block: dd* + d*d column by column through the cell maps
      RatMat L(cells2.size(), cells2.size());
      for (size_t col = 0; col < cells2.size(); ++col) {
        const size_t id = cells2[col];
        const auto pr = pair_of_cached(id / D);
        const size_t v = id % D;
        auto add_to_block = [&](size_t oid, const Rat& c) {
          const auto it = local.find(oid);
          if (it == local.end()) throw std::logic_error("laplacian left its block");
          L(it->second, col) += c;
        };
        for (const auto& [mid, w1] : dstar_21_cell(pr[0], pr[1], v, true, true))
          for (const auto& [oid, w2] : d_12_cell(mid / D, mid % D))
            add_to_block(oid, w1 * w2);
        for (const auto& [mid, w1] : d_23_cell(pr[0], pr[1], v)) {
          const auto tr = triple_of_cached(mid / D);
          for (const auto& [oid, w2] : dstar_32_cell(tr[0], tr[1], tr[2], mid % D, true, true))
            add_to_block(oid, w1 * w2);
        }
      }

      const auto null_vecs = L.nullspace();

      // cross-check the block against the expected Hodge dimensions:
      // dim ker(box) = dim ker(dstar_2->1) - rank(dstar_3->2)
      {
        const auto& cells1 = cells_of_key(1, key);
        std::map<size_t, size_t> l1;
        for (size_t r = 0; r < cells1.size(); ++r) l1[cells1[r]] = r;
        RatMat M1(cells1.size(), cells2.size());
        for (size_t col = 0; col < cells2.size(); ++col) {
          const auto pr = pair_of_cached(cells2[col] / D);
          for (const auto& [oid, w] : dstar_21_cell(pr[0], pr[1], cells2[col] % D, true, true))
            M1(l1.at(oid), col) += w;
        }
        const auto& cells3 = cells_of_key(3, key);
        RatMat M3(cells2.size(), cells3.size());
        for (size_t col = 0; col < cells3.size(); ++col) {
          const auto tr = triple_of_cached(cells3[col] / D);
          for (const auto& [oid, w] :
               dstar_32_cell(tr[0], tr[1], tr[2], cells3[col] % D, true, true))
            M3(local.at(oid), col) += w;
        }
        const size_t expected = cells2.size() - M1.rank() - M3.rank();
        if (null_vecs.size() != expected)
          throw std::logic_error("harmonic block dimension disagrees with Hodge count");
      }
      if (null_vecs.empty()) continue;

      for (const auto& nv : null_vecs) {
        CochainMap h = make_cochain(a, 2);
        for (size_t r = 0; r < cells2.size(); ++r)
          if (nv[r] != 0) h.coeffs[cells2[r] / D][cells2[r] % D] = nv[r];
        // harmonic vectors are killed by both operators
        if (!codifferential(h).is_zero() || !differential(h).is_zero())
          throw std::logic_error("harmonic vector escapes ker d or ker dstar");
        std::set<std::string> conts = support_containers(h);
        std::string cs;
        for (const auto& s : conts) cs += (cs.empty() ? "" : " + ") + s;
        hb.vectors.push_back(std::move(h));
        hb.homogeneity.push_back(key[0]);
        hb.container.push_back(cs);
      }
    }

    // stable presentation: sort by (homogeneity, container)
    std::vector<size_t> order(hb.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
      return std::tie(hb.homogeneity[x], hb.container[x]) <
             std::tie(hb.homogeneity[y], hb.container[y]);
    });
    HarmonicBasis sorted;
    for (size_t i : order) {
      sorted.vectors.push_back(std::move(hb.vectors[i]));
      sorted.homogeneity.push_back(hb.homogeneity[i]);
      sorted.container.push_back(hb.container[i]);
    }
    return sorted;
  }

  std::array<size_t, 3> triple_of_cached(size_t tidx) const {
    if (triple_cache_.empty()) {
      const size_t dm = alg_->dim_minus();
      triple_cache_.resize(choose3(dm));
      for (size_t i = 0; i < dm; ++i)
        for (size_t j = i + 1; j < dm; ++j)
          for (size_t k = j + 1; k < dm; ++k)
            triple_cache_[triple_index(dm, i, j, k)] = {i, j, k};
    }
    return triple_cache_[tidx];
  }
  std::array<size_t, 2> pair_of_cached(size_t tidx) const {
    if (pair_cache_.empty()) {
      const size_t dm = alg_->dim_minus();
      pair_cache_.resize(choose2(dm));
      for (size_t i = 0; i < dm; ++i)
        for (size_t j = i + 1; j < dm; ++j) pair_cache_[pair_index(dm, i, j)] = {i, j};
    }
    return pair_cache_[tidx];
  }
  mutable std::vector<std::array<size_t, 3>> triple_cache_;
  mutable std::vector<std::array<size_t, 2>> pair_cache_;
};

}  // namespace chainalg

#pragma once

// The algebra A spanned by U (x) W and U [x] W (box product) of noncommutative
// words, its star product, the algebra trace, and Hessians of trace
// polynomials as matrices over A.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "frg/invariants.hpp"
#include "frg/scalar_poly.hpp"
#include "frg/word.hpp"

namespace frg {

enum class TensorKind : std::uint8_t { Tensor, Box };

struct TermKey {
  TensorKind kind = TensorKind::Tensor;
  Word left;
  Word right;
  TraceMonomial prefactor;

  std::size_t degree() const { return left.size() + right.size() + prefactor.degree(); }

  auto operator<=>(const TermKey&) const = default;
  bool operator==(const TermKey&) const = default;
};

struct TensorTerm {
  TensorKind kind;
  Word left;
  Word right;
  ScalarPoly coeff;
  TraceMonomial prefactor;
};

// Star product of two basis elements, coefficient one.
inline TermKey star_keys(const TermKey& x, const TermKey& y) {
  TermKey r;
  TraceMonomial pre = x.prefactor * y.prefactor;
  if (x.kind == TensorKind::Tensor && y.kind == TensorKind::Tensor) {
    // (U (x) W)(P (x) Q) = PU (x) WQ
    r.kind = TensorKind::Tensor;
    r.left = y.left + x.left;
    r.right = x.right + y.right;
  } else if (x.kind == TensorKind::Box && y.kind == TensorKind::Tensor) {
    // (U [x] W)(P (x) Q) = U [x] PWQ
    r.kind = TensorKind::Box;
    r.left = x.left;
    r.right = y.left + x.right + y.right;
  } else if (x.kind == TensorKind::Tensor && y.kind == TensorKind::Box) {
    // (U (x) W)(P [x] Q) = WPU [x] Q
    r.kind = TensorKind::Box;
    r.left = x.right + y.left + x.left;
    r.right = y.right;
  } else {
    // (U [x] W)(P [x] Q) = Tr(WP) U [x] Q
    r.kind = TensorKind::Box;
    r.left = x.left;
    r.right = y.right;
    pre = pre * tm_from_trace(x.right + y.left);
  }
  r.prefactor = std::move(pre);
  return r;
}

class AElem {
 public:
  AElem() = default;

  static AElem tensor(const Word& u, const Word& w, const ScalarPoly& c = ScalarPoly(1),
                      const TraceMonomial& pre = {}) {
    AElem e;
    e.add({TensorKind::Tensor, u, w, pre}, c);
    return e;
  }
  static AElem box(const Word& u, const Word& w, const ScalarPoly& c = ScalarPoly(1),
                   const TraceMonomial& pre = {}) {
    AElem e;
    e.add({TensorKind::Box, u, w, pre}, c);
    return e;
  }
  // 1 (x) 1, the unit.
  static AElem unit() { return tensor({}, {}); }

  const std::map<TermKey, ScalarPoly>& data() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  std::vector<TensorTerm> terms() const {
    std::vector<TensorTerm> out;
    for (const auto& [k, c] : terms_) out.push_back({k.kind, k.left, k.right, c, k.prefactor});
    return out;
  }

  void add(const TermKey& k, const ScalarPoly& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  AElem& operator+=(const AElem& o) {
    for (const auto& [k, c] : o.terms_) add(k, c);
    return *this;
  }
  AElem& operator-=(const AElem& o) {
    for (const auto& [k, c] : o.terms_) add(k, -c);
    return *this;
  }
  friend AElem operator+(AElem a, const AElem& b) { return a += b; }
  friend AElem operator-(AElem a, const AElem& b) { return a -= b; }

  AElem scaled(const ScalarPoly& s, const TraceMonomial& pre = {}) const {
    AElem out;
    for (const auto& [k, c] : terms_) {
      TermKey kk = k;
      kk.prefactor = k.prefactor * pre;
      out.add(kk, c * s);
    }
    return out;
  }

  std::size_t max_degree() const {
    std::size_t d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k.degree());
    return d;
  }

  bool operator==(const AElem&) const = default;

 private:
  std::map<TermKey, ScalarPoly> terms_;
};

// Products whose degree exceeds degree_max are dropped. Degree is additive
// under the star product, so this is exact on everything kept.
struct Truncation {
  std::optional<std::size_t> degree_max;

  bool keeps(std::size_t degree) const { return !degree_max || degree <= *degree_max; }
};

inline AElem star(const AElem& x, const AElem& y, const Truncation& trunc = {}) {
  AElem out;
  for (const auto& [kx, cx] : x.data()) {
    const std::size_t dx = kx.degree();
    for (const auto& [ky, cy] : y.data()) {
      if (!trunc.keeps(dx + ky.degree())) continue;
      out.add(star_keys(kx, ky), cx * cy);
    }
  }
  return out;
}

inline InvariantSum tr_A(const AElem& x) {
  InvariantSum out;
  for (const auto& [k, c] : x.data()) {
    if (k.kind == TensorKind::Tensor)
      out.add(k.prefactor * tm_from_trace(k.left) * tm_from_trace(k.right), c);
    else
      out.add(k.prefactor * tm_from_trace(k.left + k.right), c);
  }
  return out;
}

// Swap of the two tensor factors.
inline AElem tilde(const AElem& x) {
  AElem out;
  for (const auto& [k, c] : x.data()) out.add({k.kind, k.right, k.left, k.prefactor}, c);
  return out;
}

// Square matrix of algebra elements, row-major.
class HessMatrix {
 public:
  HessMatrix() = default;
  explicit HessMatrix(std::size_t n) : n_(n), entries_(n * n) {}

  static HessMatrix identity(std::size_t n) {
    HessMatrix m(n);
    for (std::size_t a = 0; a < n; ++a) m(a, a) = AElem::unit();
    return m;
  }

  std::size_t dim() const { return n_; }
  AElem& operator()(std::size_t a, std::size_t b) { return entries_.at(a * n_ + b); }
  const AElem& operator()(std::size_t a, std::size_t b) const { return entries_.at(a * n_ + b); }

  HessMatrix& operator+=(const HessMatrix& o) {
    if (o.n_ != n_) throw std::invalid_argument("dimension mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
  }
  friend HessMatrix operator+(HessMatrix a, const HessMatrix& b) { return a += b; }

  HessMatrix scaled(const ScalarPoly& s, const TraceMonomial& pre = {}) const {
    HessMatrix m(n_);
    for (std::size_t i = 0; i < entries_.size(); ++i) m.entries_[i] = entries_[i].scaled(s, pre);
    return m;
  }

  bool is_zero() const {
    for (const auto& e : entries_)
      if (!e.is_zero()) return false;
    return true;
  }

  bool operator==(const HessMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<AElem> entries_;
};

// Transpose combined with tilde on every entry.
inline HessMatrix tilde_matrix(const HessMatrix& m) {
  HessMatrix out(m.dim());
  for (std::size_t a = 0; a < m.dim(); ++a)
    for (std::size_t b = 0; b < m.dim(); ++b) out(b, a) = tilde(m(a, b));
  return out;
}

inline HessMatrix star_matrix(const HessMatrix& x, const HessMatrix& y, const Truncation& trunc = {}) {
  const std::size_t n = x.dim();
  if (y.dim() != n) throw std::invalid_argument("dimension mismatch");
  HessMatrix out(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t b = 0; b < n; ++b) {
        if (x(a, b).is_zero() || y(b, c).is_zero()) continue;
        out(a, c) += star(x(a, b), y(b, c), trunc);
      }
  return out;
}

inline HessMatrix power(const HessMatrix& m, unsigned k, const Truncation& trunc = {}) {
  HessMatrix out = HessMatrix::identity(m.dim());
  for (unsigned i = 0; i < k; ++i) out = star_matrix(out, m, trunc);
  return out;
}

inline InvariantSum supertrace(const HessMatrix& m) {
  InvariantSum out;
  for (std::size_t a = 0; a < m.dim(); ++a) out += tr_A(m(a, a));
  return out;
}

// Letters strictly between positions i and j of a cyclic word, reading
// forward from i.
inline Word cyclic_between(const Word& w, std::size_t i, std::size_t j) {
  const std::size_t n = w.size();
  Word out;
  for (std::size_t p = (i + 1) % n; p != j; p = (p + 1) % n) out.push_back(w[p]);
  return out;
}

// Word after removing position i, read cyclically from i + 1.
inline Word cyclic_rest(const Word& w, std::size_t i) { return w.rotated(i + 1).substr(0, w.size() - 1); }

// Hess Tr(w): for letter a at position p and letter b at position q != p,
// entry (a, b) receives between(q, p) (x) between(p, q).
inline HessMatrix hess_single_trace(const Word& w, std::size_t n) {
  HessMatrix h(n);
  for (std::size_t p = 0; p < w.size(); ++p)
    for (std::size_t q = 0; q < w.size(); ++q) {
      if (p == q) continue;
      if (w[p] >= n || w[q] >= n) throw std::out_of_range("letter outside alphabet");
      h(w[p], w[q]).add({TensorKind::Tensor, cyclic_between(w, q, p), cyclic_between(w, p, q), {}}, 1);
    }
  return h;
}

inline HessMatrix hess_single_trace(const CyclicWord& w, std::size_t n) { return hess_single_trace(w.word(), n); }

// Mixed second derivative of Tr(u) Tr(v) with one letter in each trace:
// D_a u [x] D_b v + D_a v [x] D_b u.
inline HessMatrix hess_cross(const Word& u, const Word& v, std::size_t n) {
  HessMatrix h(n);
  auto one_way = [&](const Word& x, const Word& y) {
    for (std::size_t p = 0; p < x.size(); ++p)
      for (std::size_t q = 0; q < y.size(); ++q)
        h(x[p], y[q]).add({TensorKind::Box, cyclic_rest(x, p), cyclic_rest(y, q), {}}, 1);
  };
  one_way(u, v);
  one_way(v, u);
  return h;
}

// Hess Tr(p) Tr(q).
inline HessMatrix hess_double_trace(const Word& p, const Word& q, std::size_t n) {
  HessMatrix h = hess_single_trace(p, n).scaled(1, tm_from_trace(q));
  h += hess_single_trace(q, n).scaled(1, tm_from_trace(p));
  h += hess_cross(p, q, n);
  return h;
}

// Hessian of a product of traces (Leibniz rule over the listed traces).
inline HessMatrix hess_trace_product(const std::vector<Word>& traces, std::size_t n) {
  HessMatrix h(n);
  const std::size_t t = traces.size();
  for (std::size_t r = 0; r < t; ++r) {
    TraceMonomial rest;
    for (std::size_t s = 0; s < t; ++s)
      if (s != r) rest = rest * tm_from_trace(traces[s]);
    h += hess_single_trace(traces[r], n).scaled(1, rest);
  }
  for (std::size_t r = 0; r < t; ++r)
    for (std::size_t s = r + 1; s < t; ++s) {
      TraceMonomial rest;
      for (std::size_t u = 0; u < t; ++u)
        if (u != r && u != s) rest = rest * tm_from_trace(traces[u]);
      h += hess_cross(traces[r], traces[s], n).scaled(1, rest);
    }
  return h;
}

inline std::vector<Word> trace_words(const TraceMonomial& shape) {
  std::vector<Word> out;
  for (const auto& t : shape.traces()) out.push_back(t.word());
  return out;
}

// Hess of coupling * symmetry_factor * shape.
inline HessMatrix hess_operator(const Operator& op, std::size_t n) {
  return hess_trace_product(trace_words(op.shape), n)
      .scaled(ScalarPoly(op.coupling) * op.symmetry_factor, TraceMonomial::n_to(op.shape.n_power()));
}

inline HessMatrix hess_sum(const std::vector<Operator>& ops, std::size_t n) {
  HessMatrix h(n);
  for (const auto& op : ops) h += hess_operator(op, n);
  return h;
}

inline std::string to_string(const AElem& x, const Alphabet& alpha) {
  if (x.is_zero()) return "0";
  std::string out;
  for (const auto& [k, c] : x.data()) {
    if (!out.empty()) out += " + ";
    out += "(" + to_string(c) + ")";
    if (!(k.prefactor == TraceMonomial::one())) out += "*" + to_string(k.prefactor, alpha);
    auto side = [&](const Word& w) { return w.empty() ? std::string("1") : alpha.format(w); };
    out += "*[" + side(k.left) + (k.kind == TensorKind::Tensor ? " (x) " : " [x] ") + side(k.right) + "]";
  }
  return out;
}

}  // namespace frg

#pragma once

// Multi-trace invariants, their linear combinations and the operator basis of
// a truncated effective action.

#include <algorithm>
#include <iterator>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "frg/rational.hpp"
#include "frg/scalar_poly.hpp"
#include "frg/word.hpp"

namespace frg {

// N^n_power * prod_i Tr(traces[i]). Traces are canonical, non-empty and
// sorted; Tr(1) is absorbed into n_power.
class TraceMonomial {
 public:
  TraceMonomial() = default;
  TraceMonomial(std::vector<CyclicWord> traces, int n_power) : n_power_(n_power) {
    for (auto& t : traces) {
      if (t.empty())
        ++n_power_;
      else
        traces_.push_back(std::move(t));
    }
    std::sort(traces_.begin(), traces_.end());
  }

  static TraceMonomial one() { return {}; }
  static TraceMonomial n_to(int p) { return TraceMonomial({}, p); }

  const std::vector<CyclicWord>& traces() const { return traces_; }
  int n_power() const { return n_power_; }
  std::size_t trace_count() const { return traces_.size(); }

  std::size_t degree() const {
    std::size_t d = 0;
    for (const auto& t : traces_) d += t.size();
    return d;
  }
  std::size_t letter_count(Letter l) const {
    std::size_t c = 0;
    for (const auto& t : traces_) c += t.word().count(l);
    return c;
  }

  // Same traces, N powers ignored.
  bool same_shape(const TraceMonomial& o) const { return traces_ == o.traces_; }
  TraceMonomial without_n() const {
    TraceMonomial t = *this;
    t.n_power_ = 0;
    return t;
  }

  friend TraceMonomial operator*(const TraceMonomial& a, const TraceMonomial& b) {
    TraceMonomial out;
    out.n_power_ = a.n_power_ + b.n_power_;
    out.traces_.reserve(a.traces_.size() + b.traces_.size());
    std::merge(a.traces_.begin(), a.traces_.end(), b.traces_.begin(), b.traces_.end(),
               std::back_inserter(out.traces_));
    return out;
  }

  auto operator<=>(const TraceMonomial&) const = default;
  bool operator==(const TraceMonomial&) const = default;

 private:
  std::vector<CyclicWord> traces_;
  int n_power_ = 0;
};

// Tr(w) as a monomial; the empty word gives N.
inline TraceMonomial tm_from_trace(const Word& w) {
  if (w.empty()) return TraceMonomial::n_to(1);
  return TraceMonomial({CyclicWord(w)}, 0);
}

inline TraceMonomial tm_multiply(const TraceMonomial& a, const TraceMonomial& b) { return a * b; }

inline std::string to_string(const TraceMonomial& t, const Alphabet& alpha) {
  std::string out;
  if (t.n_power() != 0) {
    out = "N";
    if (t.n_power() != 1) out += "^" + std::to_string(t.n_power());
  }
  for (const auto& tr : t.traces()) {
    if (!out.empty()) out += '*';
    out += "Tr(" + alpha.format(tr.word()) + ")";
  }
  return out.empty() ? "1" : out;
}

// Finite linear combination of trace monomials with scalar coefficients.
class InvariantSum {
 public:
  const std::map<TraceMonomial, ScalarPoly>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add(const TraceMonomial& t, const ScalarPoly& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(t, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }
  InvariantSum& operator+=(const InvariantSum& o) {
    for (const auto& [t, c] : o.terms_) add(t, c);
    return *this;
  }
  InvariantSum& operator-=(const InvariantSum& o) {
    for (const auto& [t, c] : o.terms_) add(t, -c);
    return *this;
  }
  friend InvariantSum operator-(InvariantSum a, const InvariantSum& b) { return a -= b; }
  InvariantSum& operator*=(const ScalarPoly& s) {
    InvariantSum out;
    for (const auto& [t, c] : terms_) out.add(t, c * s);
    return *this = std::move(out);
  }

  ScalarPoly coefficient(const TraceMonomial& t) const {
    auto it = terms_.find(t);
    return it == terms_.end() ? ScalarPoly() : it->second;
  }

  // N powers moved from the monomials into the coefficients.
  InvariantSum with_n_in_coefficients() const {
    InvariantSum out;
    for (const auto& [t, c] : terms_) out.add(t.without_n(), c.times_monomial(Monomial(Symbol::n(), t.n_power())));
    return out;
  }

  template <class Pred>
  InvariantSum filtered(Pred pred) const {
    InvariantSum out;
    for (const auto& [t, c] : terms_)
      if (pred(t)) out.terms_.emplace(t, c);
    return out;
  }

  bool operator==(const InvariantSum&) const = default;

 private:
  std::map<TraceMonomial, ScalarPoly> terms_;
};

inline std::string to_string(const InvariantSum& s, const Alphabet& alpha) {
  if (s.is_zero()) return "0";
  std::string out;
  for (const auto& [t, c] : s.terms()) {
    if (!out.empty()) out += " + ";
    out += "(" + to_string(c) + ")";
    if (!(t == TraceMonomial::one())) out += "*" + to_string(t, alpha);
  }
  return out;
}

// coupling * symmetry_factor * shape. The N power of the shape multiplies
// through.
struct Operator {
  Symbol coupling;
  Rational symmetry_factor{1};
  TraceMonomial shape;

  bool operator==(const Operator&) const = default;
};

// 1/|rotations fixing the word| per trace, 1/k! for k identical traces.
inline Rational default_symmetry_factor(const TraceMonomial& shape) {
  Rational f(1);
  const auto& tr = shape.traces();
  for (std::size_t i = 0; i < tr.size();) {
    std::size_t j = i;
    while (j < tr.size() && tr[j] == tr[i]) ++j;
    Rational run_fact(1);
    for (std::size_t m = 2; m <= j - i; ++m) run_fact *= static_cast<unsigned long>(m);
    f /= run_fact;
    for (std::size_t m = i; m < j; ++m) f /= static_cast<unsigned long>(tr[m].automorphism_order());
    i = j;
  }
  return f;
}

// coefficient * N^n_power * Tr(X_c X_c) as written in the model; the flow
// replaces it by Z_c Tr(X_c X_c) / 2.
struct KineticTerm {
  Letter matrix = 0;
  Rational coefficient{1};
  int n_power = 0;

  bool operator==(const KineticTerm&) const = default;
};

struct ActionSeries {
  Alphabet alphabet;
  std::vector<KineticTerm> kinetic;
  std::vector<Operator> operators;

  bool operator==(const ActionSeries&) const = default;

  const Operator* find(const Symbol& coupling) const {
    for (const auto& op : operators)
      if (op.coupling == coupling) return &op;
    return nullptr;
  }
};

inline TraceMonomial kinetic_shape(Letter c) { return TraceMonomial({CyclicWord(Word{c, c})}, 0); }

// The action as an invariant sum, couplings kept symbolic.
inline InvariantSum as_invariant_sum(const ActionSeries& action) {
  InvariantSum s;
  for (const auto& op : action.operators) s.add(op.shape, ScalarPoly(op.coupling) * op.symmetry_factor);
  return s;
}

}  // namespace frg

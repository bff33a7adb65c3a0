#pragma once

// Exact Laurent polynomials with rational coefficients in the scalar symbols
// of the flow: N, pi, the wave-function renormalisations Z_c, anomalous
// dimensions eta_c, mode sums hbar_k, and couplings.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "frg/rational.hpp"

namespace frg {

enum class SymbolKind : std::uint8_t {
  N,
  Pi,
  Z,        // wave-function renormalisation of one matrix
  Eta,      // anomalous dimension of one matrix
  Hbar,     // regulator mode sum; index = k, name = block matrix
  Bare,     // coupling of the un-rescaled action
  Running,  // rescaled coupling
};

struct Symbol {
  SymbolKind kind = SymbolKind::N;
  std::string name;
  int index = 0;

  static Symbol n() { return {SymbolKind::N, "N", 0}; }
  static Symbol pi() { return {SymbolKind::Pi, "pi", 0}; }
  static Symbol z(std::string matrix) { return {SymbolKind::Z, std::move(matrix), 0}; }
  static Symbol eta(std::string matrix) { return {SymbolKind::Eta, std::move(matrix), 0}; }
  static Symbol hbar(int k, std::string matrix) { return {SymbolKind::Hbar, std::move(matrix), k}; }
  static Symbol bare(std::string name) { return {SymbolKind::Bare, std::move(name), 0}; }
  static Symbol running(std::string name) { return {SymbolKind::Running, std::move(name), 0}; }

  bool is_coupling() const { return kind == SymbolKind::Bare || kind == SymbolKind::Running; }

  auto operator<=>(const Symbol&) const = default;
  bool operator==(const Symbol&) const = default;
};

inline std::string to_string(const Symbol& s) {
  switch (s.kind) {
    case SymbolKind::N: return "N";
    case SymbolKind::Pi: return "pi";
    case SymbolKind::Z: return "Z_" + s.name;
    case SymbolKind::Eta: return "eta_" + s.name;
    case SymbolKind::Hbar: return "hbar" + std::to_string(s.index) + "_" + s.name;
    case SymbolKind::Bare: return s.name;
    case SymbolKind::Running: return s.name + "~";
  }
  return "?";
}

// Product of symbol powers, sorted by symbol, no zero exponents.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(const Symbol& s, int e = 1) {
    if (e != 0) factors_.emplace_back(s, e);
  }

  const std::vector<std::pair<Symbol, int>>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }

  int exponent(const Symbol& s) const {
    for (const auto& [sym, e] : factors_)
      if (sym == s) return e;
    return 0;
  }
  int degree_of_kind(SymbolKind k) const {
    int d = 0;
    for (const auto& [sym, e] : factors_) d += sym.kind == k ? e : 0;
    return d;
  }
  int coupling_degree() const {
    int d = 0;
    for (const auto& [sym, e] : factors_) d += sym.is_coupling() ? e : 0;
    return d;
  }

  void multiply(const Symbol& s, int e) {
    if (e == 0) return;
    auto it = std::lower_bound(factors_.begin(), factors_.end(), s,
                               [](const auto& f, const Symbol& x) { return f.first < x; });
    if (it != factors_.end() && it->first == s) {
      it->second += e;
      if (it->second == 0) factors_.erase(it);
    } else {
      factors_.insert(it, {s, e});
    }
  }

  friend Monomial operator*(Monomial a, const Monomial& b) {
    for (const auto& [s, e] : b.factors_) a.multiply(s, e);
    return a;
  }

  Monomial without(const Symbol& s) const {
    Monomial m = *this;
    m.multiply(s, -exponent(s));
    return m;
  }

  auto operator<=>(const Monomial&) const = default;
  bool operator==(const Monomial&) const = default;

 private:
  std::vector<std::pair<Symbol, int>> factors_;
};

inline std::string to_string(const Monomial& m) {
  std::string out;
  for (const auto& [s, e] : m.factors()) {
    if (!out.empty()) out += '*';
    out += to_string(s);
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out;
}

class ScalarPoly {
 public:
  ScalarPoly() = default;
  ScalarPoly(const Rational& c) {  // NOLINT(google-explicit-constructor)
    if (c != 0) terms_[Monomial{}] = c;
  }
  ScalarPoly(long c) : ScalarPoly(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  ScalarPoly(const Symbol& s, int e = 1) { terms_[Monomial(s, e)] = 1; }  // NOLINT
  ScalarPoly(const Monomial& m, const Rational& c) {
    if (c != 0) terms_[m] = c;
  }

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Rational coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }
  Rational constant() const { return coefficient(Monomial{}); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one()); }

  void add(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  ScalarPoly& operator+=(const ScalarPoly& o) {
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }
  ScalarPoly& operator-=(const ScalarPoly& o) {
    for (const auto& [m, c] : o.terms_) add(m, -c);
    return *this;
  }
  ScalarPoly& operator*=(const Rational& c) {
    if (c == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
  }
  friend ScalarPoly operator+(ScalarPoly a, const ScalarPoly& b) { return a += b; }
  friend ScalarPoly operator-(ScalarPoly a, const ScalarPoly& b) { return a -= b; }
  friend ScalarPoly operator-(ScalarPoly a) { return a *= Rational(-1); }
  friend ScalarPoly operator*(const ScalarPoly& a, const ScalarPoly& b) {
    ScalarPoly out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add(ma * mb, ca * cb);
    return out;
  }
  ScalarPoly& operator*=(const ScalarPoly& o) { return *this = *this * o; }
  friend ScalarPoly operator*(ScalarPoly a, const Rational& c) { return a *= c; }
  friend ScalarPoly operator*(const Rational& c, ScalarPoly a) { return a *= c; }

  ScalarPoly times_monomial(const Monomial& m) const {
    ScalarPoly out;
    for (const auto& [mm, c] : terms_) out.terms_.emplace(mm * m, c);
    return out;
  }

  ScalarPoly pow(unsigned e) const {
    ScalarPoly out(1);
    for (unsigned i = 0; i < e; ++i) out *= *this;
    return out;
  }

  // Replace s by p. Negative powers of s are allowed only when p is a single
  // monomial.
  ScalarPoly substitute(const Symbol& s, const ScalarPoly& p) const {
    ScalarPoly out;
    for (const auto& [m, c] : terms_) {
      int e = m.exponent(s);
      if (e == 0) {
        out.add(m, c);
        continue;
      }
      ScalarPoly rest(m.without(s), c);
      if (e > 0) {
        out += rest * p.pow(static_cast<unsigned>(e));
      } else {
        if (p.size() != 1) throw std::invalid_argument("negative power substituted by a non-monomial");
        const auto& [pm, pc] = *p.terms_.begin();
        Monomial inv;
        for (const auto& [sym, ee] : pm.factors()) inv.multiply(sym, -ee);
        Rational ic = 1 / pc;
        ScalarPoly q(inv, ic);
        out += rest * q.pow(static_cast<unsigned>(-e));
      }
    }
    return out;
  }

  ScalarPoly derivative(const Symbol& s) const {
    ScalarPoly out;
    for (const auto& [m, c] : terms_) {
      int e = m.exponent(s);
      if (e == 0) continue;
      Monomial d = m;
      d.multiply(s, -1);
      out.add(d, c * e);
    }
    return out;
  }

  // Maximum total coupling degree over all terms (0 for the zero polynomial).
  int coupling_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.coupling_degree());
    return d;
  }

  // Keep terms satisfying pred.
  template <class Pred>
  ScalarPoly filtered(Pred pred) const {
    ScalarPoly out;
    for (const auto& [m, c] : terms_)
      if (pred(m)) out.terms_.emplace(m, c);
    return out;
  }

  double evaluate(const std::function<double(const Symbol&)>& value) const {
    double total = 0;
    for (const auto& [m, c] : terms_) {
      double t = c.get_d();
      for (const auto& [s, e] : m.factors()) t *= std::pow(value(s), e);
      total += t;
    }
    return total;
  }

  auto operator<=>(const ScalarPoly&) const = default;
  bool operator==(const ScalarPoly&) const = default;

 private:
  std::map<Monomial, Rational> terms_;
};

inline std::string to_string(const ScalarPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    Rational mag = abs(c);
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;
    if (m.is_one()) {
      out += mag.get_str();
    } else {
      if (mag != 1) out += mag.get_str() + "*";
      out += to_string(m);
    }
  }
  return out;
}

}  // namespace frg

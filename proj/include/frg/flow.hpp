#pragma once

// Truncated Wetterich right-hand side, beta/eta extraction, rescaling of the
// couplings and the large-N limit.

#include <algorithm>
#include <map>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "frg/hessalg.hpp"
#include "frg/invariants.hpp"
#include "frg/lp.hpp"
#include "frg/scalar_poly.hpp"

namespace frg {

// r(a,b) = Z (N^2/(a^2+b^2) - 1) on the disk a^2+b^2 <= N^2, zero outside.
struct Regulator {
  static bool in_disk(double a, double b, double n) { return a * a + b * b <= n * n; }

  static double r(double a, double b, double n, double z) {
    if (!in_disk(a, b, n)) return 0.0;
    return z * (n * n / (a * a + b * b) - 1.0);
  }

  // d/dt with t = log N and dZ/dt = -eta Z.
  static double dt_r(double a, double b, double n, double z, double eta) {
    if (!in_disk(a, b, n)) return 0.0;
    const double q = n * n / (a * a + b * b);
    return z * (2.0 * q - eta * (q - 1.0));
  }
};

enum class HbarMode { DiskSum, Integral };

// Mode sum (1/N^2) sum_{a,b>=1} dt_r C^{k+1} with the factor Z^{-k} split
// off. Integral mode is the N -> infinity value.
inline double compute_hbar(int k, int n, double eta, HbarMode mode, double normalization = 1.0) {
  if (k <= 0) throw std::invalid_argument("hbar needs k >= 1");
  if (mode == HbarMode::Integral)
    return normalization * std::numbers::pi / (2.0 * (k + 1)) * (1.0 - eta / (2.0 * (k + 2)));
  if (n < 2) throw std::invalid_argument("hbar disk sum needs N >= 2");
  const double n2 = static_cast<double>(n) * n;
  double total = 0;
  for (long a = 1; a <= n; ++a) {
    for (long b = 1; a * a + b * b <= static_cast<long>(n) * n; ++b) {
      const double s = static_cast<double>(a * a + b * b) / n2;
      total += (2.0 - eta * (1.0 - s)) * std::pow(s, k);
    }
  }
  return normalization * total / n2;
}

// Interaction part of the action: kinetic terms dropped, and explicit N
// powers of the operators absorbed into their couplings.
inline ActionSeries gamma_int(const ActionSeries& action) {
  ActionSeries out;
  out.alphabet = action.alphabet;
  for (auto op : action.operators) {
    op.shape = op.shape.without_n();
    out.operators.push_back(std::move(op));
  }
  return out;
}

struct RhsOptions {
  unsigned k_max = 2;
  unsigned coupling_order = 2;
  std::optional<std::size_t> degree_max;
};

struct RhsResult {
  InvariantSum terms;
  std::vector<std::string> warnings;
};

// sum_k sum_a 1/2 (-1)^k hbar_{k,a} tr_A[(Hess Gamma_int . Z^{-1})^k]_{aa}.
// Column b of the Hessian carries Z_b^{-1}; the block a of the supertrace
// selects the regulator symbol hbar_{k,a}.
inline RhsResult rhs_wetterich(const ActionSeries& action, const RhsOptions& opt) {
  if (opt.k_max < 1) throw std::invalid_argument("k_max must be at least 1");
  RhsResult res;
  if (opt.coupling_order > opt.k_max)
    res.warnings.push_back("coupling order " + std::to_string(opt.coupling_order) + " exceeds k_max " +
                           std::to_string(opt.k_max) + ": higher orders are incomplete");
  const ActionSeries inter = gamma_int(action);
  if (inter.operators.empty()) return res;

  const std::size_t n = action.alphabet.size();
  HessMatrix h = hess_sum(inter.operators, n);
  for (std::size_t b = 0; b < n; ++b) {
    const ScalarPoly zinv(Monomial(Symbol::z(action.alphabet.name(static_cast<Letter>(b))), -1), Rational(1));
    for (std::size_t a = 0; a < n; ++a) h(a, b) = h(a, b).scaled(zinv);
  }

  const Truncation trunc{opt.degree_max};
  const unsigned k_top = std::min(opt.k_max, opt.coupling_order);
  HessMatrix p = HessMatrix::identity(n);
  for (unsigned k = 1; k <= k_top; ++k) {
    p = star_matrix(p, h, trunc);
    const Rational sign = make_rational(k % 2 ? -1 : 1, 2);
    for (std::size_t a = 0; a < n; ++a) {
      if (p(a, a).is_zero()) continue;
      InvariantSum block = tr_A(p(a, a));
      const Symbol hb = Symbol::hbar(static_cast<int>(k), action.alphabet.name(static_cast<Letter>(a)));
      block *= ScalarPoly(Monomial(hb), sign);
      res.terms += block;
    }
  }
  if (opt.degree_max)
    res.terms = res.terms.filtered([&](const TraceMonomial& t) { return t.degree() <= *opt.degree_max; });
  return res;
}

struct FlowEquation {
  Symbol target;  // Eta(c) or a coupling
  ScalarPoly rhs;

  bool operator==(const FlowEquation&) const = default;
};

struct BetaSystem {
  Alphabet alphabet;
  std::vector<Operator> operators;   // N powers absorbed
  std::vector<FlowEquation> eta;     // one per matrix
  std::vector<FlowEquation> beta;    // one per operator
  InvariantSum generated;            // field-dependent invariants outside the basis
  bool large_n = false;
};

inline Symbol to_running(const Symbol& s) { return Symbol::running(s.name); }

// eta_c = -Z_c^{-1} times the coefficient of Tr(X_c^2)/2.
inline std::vector<FlowEquation> extract_eta(const InvariantSum& rhs, const ActionSeries& action) {
  const InvariantSum flat = rhs.with_n_in_coefficients();
  std::vector<FlowEquation> out;
  for (std::size_t c = 0; c < action.alphabet.size(); ++c) {
    const std::string& name = action.alphabet.name(static_cast<Letter>(c));
    ScalarPoly coef = flat.coefficient(kinetic_shape(static_cast<Letter>(c)));
    out.push_back({Symbol::eta(name), coef.times_monomial(Monomial(Symbol::z(name), -1)) * Rational(-2)});
  }
  return out;
}

inline BetaSystem extract_beta(const InvariantSum& rhs, const ActionSeries& action) {
  BetaSystem bs;
  bs.alphabet = action.alphabet;
  bs.operators = gamma_int(action).operators;
  bs.eta = extract_eta(rhs, action);
  InvariantSum flat = rhs.with_n_in_coefficients();
  for (std::size_t i = 0; i < bs.operators.size(); ++i) {
    const Operator& op = bs.operators[i];
    for (std::size_t j = 0; j < i; ++j)
      if (bs.operators[j].shape == op.shape)
        throw std::invalid_argument("two operators share the shape " + to_string(op.shape, action.alphabet));
    bs.beta.push_back({op.coupling, flat.coefficient(op.shape) * (1 / op.symmetry_factor)});
  }
  bs.generated = flat.filtered([&](const TraceMonomial& t) {
    if (t.traces().empty()) return false;
    for (std::size_t c = 0; c < action.alphabet.size(); ++c)
      if (t == kinetic_shape(static_cast<Letter>(c))) return false;
    for (const auto& op : bs.operators)
      if (op.shape == t) return false;
    return true;
  });
  return bs;
}

// g_alpha = prod_c Z_c^{lambda_{alpha,c}} N^{kappa_alpha} gbar_alpha.
struct ScalingSolution {
  bool feasible = false;
  std::vector<Rational> kappa;
  std::vector<std::vector<Rational>> lambda;  // [operator][matrix]
  std::vector<std::string> witnesses;         // reasons for infeasibility
  std::vector<std::string> notes;             // equations without a leading term
};

// Classical values: lambda = -(letters of c)/2, kappa = d/2 + t - 2.
inline Rational natural_kappa(const TraceMonomial& shape) {
  return make_rational(static_cast<long>(shape.degree()), 2) + static_cast<long>(shape.traces().size()) - 2;
}

namespace detail {

struct ScalingRow {
  int own = -1;              // operator index of the equation, -1 for eta
  std::vector<long> a;       // coefficient of the exponent of each operator
  std::vector<long> z;       // Z_c powers
  long p = 0;                // N power
  std::string label;
};

inline std::vector<ScalingRow> scaling_rows(const BetaSystem& bs) {
  std::vector<ScalingRow> rows;
  const std::size_t nops = bs.operators.size();
  auto push = [&](int own, const ScalarPoly& rhs, const std::string& eq) {
    for (const auto& [m, c] : rhs.terms()) {
      ScalingRow r;
      r.own = own;
      r.a.assign(nops, 0);
      if (own >= 0) r.a[own] = 1;
      for (std::size_t b = 0; b < nops; ++b) r.a[b] -= m.exponent(bs.operators[b].coupling);
      for (std::size_t c = 0; c < bs.alphabet.size(); ++c)
        r.z.push_back(m.exponent(Symbol::z(bs.alphabet.name(static_cast<Letter>(c)))));
      r.p = m.exponent(Symbol::n());
      r.label = eq + ": " + to_string(m);
      rows.push_back(std::move(r));
    }
  };
  for (std::size_t e = 0; e < bs.eta.size(); ++e) push(-1, bs.eta[e].rhs, to_string(bs.eta[e].target));
  for (std::size_t b = 0; b < bs.beta.size(); ++b)
    push(static_cast<int>(b), bs.beta[b].rhs, "beta(" + bs.beta[b].target.name + ")");
  return rows;
}

// Solves A x = y exactly; free variables take the value of `fallback`.
// Returns nullopt when inconsistent.
inline std::optional<std::vector<Rational>> solve_exact(std::vector<std::vector<Rational>> a, std::vector<Rational> y,
                                                        const std::vector<Rational>& fallback) {
  const std::size_t rows = a.size();
  const std::size_t cols = fallback.size();
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    std::swap(y[piv], y[r]);
    const Rational inv = 1 / a[r][c];
    for (auto& v : a[r]) v *= inv;
    y[r] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const Rational f = a[i][c];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
      y[i] -= f * y[r];
    }
    pivot_col.push_back(static_cast<int>(c));
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (y[i] != 0) return std::nullopt;
  std::vector<Rational> x = fallback;
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col) is_pivot[c] = true;
  for (std::size_t i = 0; i < r; ++i) {
    Rational v = y[i];
    for (std::size_t j = 0; j < cols; ++j)
      if (!is_pivot[j]) v -= a[i][j] * x[j];
    x[pivot_col[i]] = v;
  }
  return x;
}

inline Rational row_degree(const ScalingRow& r, const std::vector<Rational>& kappa) {
  Rational d(r.p);
  for (std::size_t b = 0; b < kappa.size(); ++b)
    if (r.a[b] != 0) d += r.a[b] * kappa[b];
  return d;
}

}  // namespace detail

// fixed_kappa pins the N exponent of the named couplings.
inline ScalingSolution solve_scaling(const BetaSystem& bs, const std::map<std::string, Rational>& fixed_kappa = {}) {
  ScalingSolution sol;
  const std::size_t nops = bs.operators.size();
  const std::size_t nmat = bs.alphabet.size();
  const auto rows = detail::scaling_rows(bs);

  // Z exponents, one matrix at a time.
  sol.lambda.assign(nops, std::vector<Rational>(nmat));
  for (std::size_t c = 0; c < nmat; ++c) {
    std::vector<Rational> natural(nops);
    for (std::size_t b = 0; b < nops; ++b)
      natural[b] = make_rational(-static_cast<long>(bs.operators[b].shape.letter_count(static_cast<Letter>(c))), 2);
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> y;
    for (const auto& r : rows) {
      a.emplace_back(r.a.begin(), r.a.end());
      y.emplace_back(-r.z[c]);
    }
    auto x = detail::solve_exact(a, y, natural);
    if (!x) {
      x = natural;
      for (const auto& r : rows) {
        Rational d(r.z[c]);
        for (std::size_t b = 0; b < nops; ++b) d += r.a[b] * natural[b];
        if (d != 0)
          sol.witnesses.push_back(r.label + " has Z_" + bs.alphabet.name(static_cast<Letter>(c)) + "-degree " +
                                  to_string(d));
      }
    }
    for (std::size_t b = 0; b < nops; ++b) sol.lambda[b][c] = (*x)[b];
  }

  // N exponents: stay as close as possible to the classical values subject
  // to every monomial having N-degree <= 0.
  std::vector<Rational> kappa(nops);
  std::vector<bool> fixed(nops, false);
  for (std::size_t b = 0; b < nops; ++b) {
    kappa[b] = natural_kappa(bs.operators[b].shape);
    if (auto it = fixed_kappa.find(bs.operators[b].coupling.name); it != fixed_kappa.end()) {
      kappa[b] = it->second;
      fixed[b] = true;
    }
  }
  bool natural_ok = true;
  for (const auto& r : rows)
    if (detail::row_degree(r, kappa) > 0) natural_ok = false;
  if (!natural_ok) {
    std::vector<double> cost(2 * nops, 1.0);
    std::vector<std::vector<double>> a;
    std::vector<double> y;
    for (const auto& r : rows) {
      std::vector<double> row(2 * nops);
      for (std::size_t b = 0; b < nops; ++b) {
        if (fixed[b]) continue;
        row[b] = static_cast<double>(r.a[b]);
        row[nops + b] = -static_cast<double>(r.a[b]);
      }
      a.push_back(std::move(row));
      y.push_back(-detail::row_degree(r, kappa).get_d());
    }
    const auto lpres = lp::minimize(cost, a, y);
    if (lpres.status == lp::Status::Optimal) {
      for (std::size_t b = 0; b < nops; ++b) {
        const double shift = lpres.x[b] - lpres.x[nops + b];
        kappa[b] += make_rational(static_cast<long>(std::lround(2 * shift)), 2);
      }
    }
  }

  // Raise exponents of equations without a leading term.
  for (std::size_t iter = 0; iter < 16 * (nops + 1); ++iter) {
    bool changed = false;
    for (std::size_t alpha = 0; alpha < nops; ++alpha) {
      std::optional<Rational> maxdeg, step;
      for (const auto& r : rows) {
        if (r.own != static_cast<int>(alpha)) continue;
        const Rational d = detail::row_degree(r, kappa);
        if (!maxdeg || d > *maxdeg) maxdeg = d;
        if (r.a[alpha] > 0) {
          const Rational s = -d / r.a[alpha];
          if (!step || s < *step) step = s;
        }
      }
      if (!fixed[alpha] && maxdeg && *maxdeg < 0 && step && *step > 0) {
        kappa[alpha] += *step;
        changed = true;
      }
    }
    if (!changed) break;
  }
  sol.kappa = kappa;

  for (const auto& r : rows) {
    const Rational d = detail::row_degree(r, kappa);
    if (d > 0) sol.witnesses.push_back(r.label + " has N-degree " + to_string(d));
  }
  auto check_leading = [&](int own, const std::string& label) {
    std::optional<Rational> maxdeg;
    for (const auto& r : rows)
      if (r.own == own && r.label.rfind(label + ":", 0) == 0) {
        const Rational d = detail::row_degree(r, kappa);
        if (!maxdeg || d > *maxdeg) maxdeg = d;
      }
    if (maxdeg && *maxdeg < 0) sol.notes.push_back(label + " has no N-degree 0 term");
  };
  for (const auto& e : bs.eta) check_leading(-1, to_string(e.target));
  for (std::size_t b = 0; b < nops; ++b) check_leading(static_cast<int>(b), "beta(" + bs.beta[b].target.name + ")");
  sol.feasible = sol.witnesses.empty();
  return sol;
}

// N -> infinity value of hbar_{k,c} as a polynomial in pi and eta_c.
inline ScalarPoly hbar_limit_poly(int k, const std::string& matrix, const Rational& normalization = 1) {
  const ScalarPoly pi(Monomial(Symbol::pi()), normalization);
  ScalarPoly inner(make_rational(1, 2 * (k + 1)));
  inner += ScalarPoly(Monomial(Symbol::eta(matrix)), make_rational(-1, 4 * (k + 1) * (k + 2)));
  return pi * inner;
}

// Rescales the couplings, keeps the N-degree 0 part and replaces each hbar by
// its continuum value. Couplings become Running symbols.
inline BetaSystem large_n_limit(const BetaSystem& bs, const ScalingSolution& sol, const Rational& normalization = 1) {
  if (!sol.feasible) throw std::invalid_argument("scaling is infeasible");
  const std::size_t nops = bs.operators.size();
  const std::size_t nmat = bs.alphabet.size();
  BetaSystem out;
  out.alphabet = bs.alphabet;
  out.operators = bs.operators;
  out.generated = bs.generated;
  out.large_n = true;

  auto convert = [&](int own, const ScalarPoly& rhs) {
    ScalarPoly res;
    for (const auto& [m, c] : rhs.terms()) {
      Rational ndeg(m.exponent(Symbol::n()));
      if (own >= 0) ndeg += sol.kappa[own];
      Monomial core;
      std::vector<ScalarPoly> hbars;
      for (const auto& [s, e] : m.factors()) {
        if (s.kind == SymbolKind::N || s.kind == SymbolKind::Z) continue;
        if (s.kind == SymbolKind::Hbar) {
          for (int i = 0; i < e; ++i) hbars.push_back(hbar_limit_poly(s.index, s.name, normalization));
          continue;
        }
        if (s.kind == SymbolKind::Bare) {
          for (std::size_t b = 0; b < nops; ++b)
            if (bs.operators[b].coupling == s) ndeg -= e * sol.kappa[b];
          core.multiply(to_running(s), e);
          continue;
        }
        core.multiply(s, e);
      }
      if (ndeg > 0) throw std::logic_error("positive N-degree survived the scaling");
      if (ndeg < 0) continue;
      ScalarPoly term(core, c);
      for (const auto& h : hbars) term = term * h;
      res += term;
    }
    return res;
  };

  for (const auto& e : bs.eta) out.eta.push_back({e.target, convert(-1, e.rhs)});
  for (std::size_t b = 0; b < nops; ++b) {
    const Symbol g = to_running(bs.operators[b].coupling);
    ScalarPoly canon(sol.kappa[b]);
    for (std::size_t c = 0; c < nmat; ++c)
      canon += ScalarPoly(Monomial(Symbol::eta(bs.alphabet.name(static_cast<Letter>(c)))), -sol.lambda[b][c]);
    ScalarPoly rhs = canon.times_monomial(Monomial(g)) + convert(static_cast<int>(b), bs.beta[b].rhs);
    out.beta.push_back({g, rhs});
  }
  return out;
}

}  // namespace frg

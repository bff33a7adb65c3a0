#pragma once

// Fixed points of the large-N system and their stability matrices.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "frg/flow.hpp"

namespace frg {

// Residuals F(x) over x = (couplings..., etas...):
// F_alpha = beta_alpha and F_c = eta_c - (eta equation)_c.
class NumericSystem {
 public:
  NumericSystem() = default;

  static NumericSystem from(const BetaSystem& bs) {
    if (!bs.large_n) throw std::invalid_argument("numeric systems need the large-N limit");
    NumericSystem s;
    for (const auto& e : bs.beta) s.variables_.push_back(e.target);
    s.n_couplings_ = bs.beta.size();
    for (const auto& e : bs.eta) s.variables_.push_back(e.target);
    for (const auto& e : bs.beta) s.add_residual(e.rhs);
    for (const auto& e : bs.eta) s.add_residual(ScalarPoly(e.target) - e.rhs);
    return s;
  }

  const std::vector<Symbol>& variables() const { return variables_; }
  std::size_t dim() const { return variables_.size(); }
  std::size_t n_couplings() const { return n_couplings_; }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& v : variables_) out.push_back(to_string(v));
    return out;
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim()));
    for (std::size_t r = 0; r < rows_.size(); ++r)
      for (const auto& t : rows_[r]) f[static_cast<Eigen::Index>(r)] += term_value(t, x);
    return f;
  }

  // Analytic Jacobian of the polynomial residuals.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
    const auto n = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t r = 0; r < rows_.size(); ++r)
      for (const auto& t : rows_[r])
        for (std::size_t i = 0; i < t.factors.size(); ++i) {
          const auto [v, e] = t.factors[i];
          double d = t.coef * e * std::pow(x[v], e - 1);
          for (std::size_t o = 0; o < t.factors.size(); ++o)
            if (o != i) d *= std::pow(x[t.factors[o].first], t.factors[o].second);
          j(static_cast<Eigen::Index>(r), v) += d;
        }
    return j;
  }

 private:
  struct Term {
    double coef = 0;
    std::vector<std::pair<int, int>> factors;  // variable index, exponent
  };

  static double term_value(const Term& t, const Eigen::VectorXd& x) {
    double v = t.coef;
    for (const auto& [i, e] : t.factors) v *= std::pow(x[i], e);
    return v;
  }

  void add_residual(const ScalarPoly& p) {
    std::vector<Term> row;
    for (const auto& [m, c] : p.terms()) {
      Term t;
      t.coef = c.get_d();
      for (const auto& [s, e] : m.factors()) {
        if (s.kind == SymbolKind::Pi) {
          t.coef *= std::pow(std::numbers::pi, e);
          continue;
        }
        auto it = std::find(variables_.begin(), variables_.end(), s);
        if (it == variables_.end()) throw std::invalid_argument("unexpected symbol " + to_string(s));
        if (e < 0) throw std::invalid_argument("negative power of " + to_string(s));
        t.factors.emplace_back(static_cast<int>(it - variables_.begin()), e);
      }
      row.push_back(std::move(t));
    }
    rows_.push_back(std::move(row));
  }

  std::vector<Symbol> variables_;
  std::size_t n_couplings_ = 0;
  std::vector<std::vector<Term>> rows_;
};

struct StabilityResult {
  std::vector<std::complex<double>> eigenvalues;  // descending real part
  bool ill_conditioned = false;
};

// Eigenvalues of -d beta / d g with the etas eliminated through their own
// equations (implicit differentiation).
inline StabilityResult stability(const NumericSystem& sys, const Eigen::VectorXd& x) {
  const auto ng = static_cast<Eigen::Index>(sys.n_couplings());
  const auto ne = static_cast<Eigen::Index>(sys.dim()) - ng;
  const Eigen::MatrixXd j = sys.jacobian(x);
  StabilityResult res;
  Eigen::MatrixXd m = j.topLeftCorner(ng, ng);
  if (ne > 0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(j.bottomRightCorner(ne, ne));
    if (!lu.isInvertible() || lu.rcond() < 1e-12) res.ill_conditioned = true;
    m -= j.topRightCorner(ng, ne) * lu.solve(j.bottomLeftCorner(ne, ng));
  }
  m = -m;
  if (ng == 0) return res;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) {
    res.ill_conditioned = true;
    return res;
  }
  for (Eigen::Index i = 0; i < ng; ++i) res.eigenvalues.push_back(es.eigenvalues()[i]);
  std::sort(res.eigenvalues.begin(), res.eigenvalues.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  // Nearly parallel eigenvectors signal a defective matrix.
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(es.eigenvectors());
  const auto& sv = svd.singularValues();
  if (sv.size() > 0 && sv[sv.size() - 1] < 1e-10 * sv[0]) res.ill_conditioned = true;
  return res;
}

struct FixedPoint {
  Eigen::VectorXd values;
  double residual_norm = 0;
  StabilityResult stability;

  std::size_t positive_eigenvalues() const {
    return static_cast<std::size_t>(std::count_if(stability.eigenvalues.begin(), stability.eigenvalues.end(),
                                                  [](const auto& z) { return z.real() > 0; }));
  }
};

struct NewtonOptions {
  std::size_t starts = 64;
  std::uint64_t seed = 1;
  double tol = 1e-12;
  double dedup_radius = 1e-8;
  int max_iterations = 200;
  double start_radius = 1.0;
};

struct MultistartResult {
  std::vector<FixedPoint> roots;
  std::size_t attempted = 0;
  std::size_t converged = 0;
  std::vector<std::string> diagnostics;
};

// Damped Newton from one start; returns true on convergence.
inline bool newton_solve(const NumericSystem& sys, Eigen::VectorXd& x, const NewtonOptions& opt) {
  Eigen::VectorXd f = sys.residual(x);
  double norm = f.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (!std::isfinite(norm)) return false;
    if (norm < opt.tol) return true;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys.jacobian(x));
    if (!lu.isInvertible()) return false;
    const Eigen::VectorXd step = lu.solve(-f);
    double lambda = 1.0;
    bool accepted = false;
    while (lambda > 1e-6) {
      Eigen::VectorXd trial = x + lambda * step;
      Eigen::VectorXd ft = sys.residual(trial);
      const double tn = ft.lpNorm<Eigen::Infinity>();
      if (std::isfinite(tn) && tn < norm) {
        x = trial;
        f = ft;
        norm = tn;
        accepted = true;
        break;
      }
      lambda /= 2;
    }
    if (!accepted) return false;
  }
  return norm < opt.tol;
}

inline MultistartResult newton_multistart(const NumericSystem& sys, const NewtonOptions& opt = {},
                                          const std::vector<Eigen::VectorXd>& extra_starts = {}) {
  if (!(opt.tol > 0)) throw std::invalid_argument("tolerance must be positive");
  MultistartResult res;
  const auto n = static_cast<Eigen::Index>(sys.dim());
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uni(-opt.start_radius, opt.start_radius);
  std::vector<Eigen::VectorXd> starts{Eigen::VectorXd::Zero(n)};
  for (const auto& s : extra_starts) starts.push_back(s);
  for (std::size_t i = 0; i < opt.starts; ++i) {
    Eigen::VectorXd s(n);
    for (Eigen::Index j = 0; j < n; ++j) s[j] = uni(rng);
    starts.push_back(s);
  }
  for (auto x : starts) {
    ++res.attempted;
    if (!newton_solve(sys, x, opt)) continue;
    ++res.converged;
    const double norm = sys.residual(x).lpNorm<Eigen::Infinity>();
    bool dup = false;
    for (const auto& r : res.roots)
      if ((r.values - x).lpNorm<Eigen::Infinity>() <= opt.dedup_radius) dup = true;
    if (dup) continue;
    FixedPoint fp;
    fp.values = x;
    fp.residual_norm = norm;
    fp.stability = stability(sys, x);
    res.roots.push_back(std::move(fp));
  }
  if (res.roots.empty())
    res.diagnostics.push_back("no start converged (" + std::to_string(res.attempted) + " attempted)");
  // Deterministic order: lexicographic in the values.
  std::sort(res.roots.begin(), res.roots.end(), [](const FixedPoint& a, const FixedPoint& b) {
    return std::lexicographical_compare(a.values.begin(), a.values.end(), b.values.begin(), b.values.end());
  });
  return res;
}

}  // namespace frg

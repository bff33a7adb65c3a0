#pragma once

// Numeric ground truth: invariants evaluated on explicit matrices, algebra
// elements realized as linear maps on N x N matrices, and Hessians of trace
// polynomials by exact differentiation in the matrix entries.
//
// Realization convention (row index (i,j) -> i*N + j, column (k,l) -> k*N + l):
//   U (x) W  ->  X |-> W X U,        M_{(ij),(kl)} = W_ik U_lj
//   U [x] W  ->  X |-> U Tr(W X),    M_{(ij),(kl)} = U_ij W_lk
// The Hessian block (a,b) is M_{(ij),(kl)} = d^2 O / d(X_a)_ji d(X_b)_kl.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "frg/hessalg.hpp"
#include "frg/invariants.hpp"
#include "frg/scalar_poly.hpp"
#include "frg/word.hpp"

namespace frg::oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr std::size_t kMaxSize = 6;

struct MatrixSample {
  std::size_t n = 0;
  std::size_t size = 0;
  std::vector<Matrix> matrices;
  std::uint64_t rng_seed = 0;
};

inline MatrixSample make_sample(std::size_t n, std::size_t size, std::uint64_t seed, bool hermitian = false) {
  if (size == 0 || size > kMaxSize) throw std::invalid_argument("matrix size must be in 1..6");
  MatrixSample s{n, size, {}, seed};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(size)));
  for (std::size_t a = 0; a < n; ++a) {
    Matrix m(size, size);
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = 0; j < size; ++j) {
        double re = gauss(rng);
        double im = gauss(rng);
        m(i, j) = Complex(re, im);
      }
    if (hermitian) m = (0.5 * (m + m.adjoint())).eval();
    s.matrices.push_back(std::move(m));
  }
  return s;
}

using Valuation = std::function<double(const Symbol&)>;

// N -> sample size; every other symbol gets a fixed value in [0.5, 1.5)
// derived from its name, so distinct couplings are numerically distinct.
inline Valuation default_valuation(const MatrixSample& s) {
  const double n = static_cast<double>(s.size);
  return [n](const Symbol& sym) {
    if (sym.kind == SymbolKind::N) return n;
    std::uint64_t h = 14695981039346656037ull;
    for (char c : to_string(sym)) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
    return 0.5 + static_cast<double>(h % 1000) / 1000.0;
  };
}

inline Matrix eval_word(const Word& w, const MatrixSample& s) {
  Matrix m = Matrix::Identity(s.size, s.size);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] >= s.n) throw std::out_of_range("letter outside sample");
    m = (m * s.matrices[w[i]]).eval();
  }
  return m;
}

inline Complex eval_invariant(const TraceMonomial& t, const MatrixSample& s) {
  Complex v = std::pow(static_cast<double>(s.size), t.n_power());
  for (const auto& tr : t.traces()) v *= eval_word(tr.word(), s).trace();
  return v;
}

inline Complex eval_sum(const InvariantSum& sum, const MatrixSample& s, const Valuation& val) {
  Complex v = 0;
  for (const auto& [t, c] : sum.terms()) v += c.evaluate(val) * eval_invariant(t, s);
  return v;
}

inline Matrix realize(const AElem& x, const MatrixSample& s, const Valuation& val) {
  const std::size_t n = s.size;
  Matrix out = Matrix::Zero(n * n, n * n);
  for (const auto& [k, c] : x.data()) {
    const Complex coeff = c.evaluate(val) * eval_invariant(k.prefactor, s);
    const Matrix u = eval_word(k.left, s);
    const Matrix w = eval_word(k.right, s);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t kk = 0; kk < n; ++kk)
          for (std::size_t l = 0; l < n; ++l) {
            const Complex e = k.kind == TensorKind::Tensor ? w(i, kk) * u(l, j) : u(i, j) * w(l, kk);
            out(i * n + j, kk * n + l) += coeff * e;
          }
  }
  return out;
}

// Dense block matrix of realized entries, block (a,b) at rows a*N^2.
inline Matrix realize_matrix(const HessMatrix& h, const MatrixSample& s, const Valuation& val) {
  const std::size_t d = s.size * s.size;
  Matrix out = Matrix::Zero(h.dim() * d, h.dim() * d);
  for (std::size_t a = 0; a < h.dim(); ++a)
    for (std::size_t b = 0; b < h.dim(); ++b)
      if (!h(a, b).is_zero()) out.block(a * d, b * d, d, d) = realize(h(a, b), s, val);
  return out;
}

namespace detail {

// Truncated two-parameter expansion v + e1 eps1 + e2 eps2 + e12 eps1 eps2.
template <class T>
struct HyperDual {
  T v, e1, e2, e12;
};

template <class T>
HyperDual<T> mul(const HyperDual<T>& x, const HyperDual<T>& y) {
  return {x.v * y.v, x.e1 * y.v + x.v * y.e1, x.e2 * y.v + x.v * y.e2,
          x.e12 * y.v + x.e1 * y.e2 + x.e2 * y.e1 + x.v * y.e12};
}

}  // namespace detail

// Exact second derivatives of the operator's value in the matrix entries.
inline std::vector<std::vector<Matrix>> numeric_hessian(const Operator& op, const MatrixSample& s,
                                                        const Valuation& val) {
  using detail::HyperDual;
  const std::size_t n = s.size;
  const std::size_t d = n * n;
  const Complex weight = ScalarPoly(op.coupling).evaluate(val) * op.symmetry_factor.get_d() *
                         std::pow(static_cast<double>(n), op.shape.n_power());
  std::vector<std::vector<Matrix>> blocks(s.n, std::vector<Matrix>(s.n, Matrix::Zero(d, d)));
  const Matrix zero = Matrix::Zero(n, n);

  auto value = [&](std::size_t a, std::size_t ja, std::size_t ia, std::size_t b, std::size_t kb, std::size_t lb) {
    // eps1 on (X_a)_{ja,ia}, eps2 on (X_b)_{kb,lb}
    HyperDual<Complex> total{weight, 0, 0, 0};
    for (const auto& tr : op.shape.traces()) {
      HyperDual<Matrix> m{Matrix::Identity(n, n), zero, zero, zero};
      for (std::size_t p = 0; p < tr.size(); ++p) {
        const Letter l = tr.word()[p];
        HyperDual<Matrix> x{s.matrices[l], zero, zero, zero};
        if (l == a) x.e1(ja, ia) = 1;
        if (l == b) x.e2(kb, lb) = 1;
        m = detail::mul(m, x);
      }
      HyperDual<Complex> t{m.v.trace(), m.e1.trace(), m.e2.trace(), m.e12.trace()};
      total = detail::mul(total, t);
    }
    return total.e12;
  };

  for (std::size_t a = 0; a < s.n; ++a)
    for (std::size_t b = 0; b < s.n; ++b)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k)
            for (std::size_t l = 0; l < n; ++l) blocks[a][b](i * n + j, k * n + l) = value(a, j, i, b, k, l);
  return blocks;
}

inline Matrix assemble_blocks(const std::vector<std::vector<Matrix>>& blocks) {
  const std::size_t n = blocks.size();
  if (n == 0) return {};
  const auto d = blocks[0][0].rows();
  Matrix out(n * d, n * d);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) out.block(a * d, b * d, d, d) = blocks[a][b];
  return out;
}

// ||x - y||_F / (1 + ||y||_F)
inline double relative_residual(const Matrix& x, const Matrix& y) { return (x - y).norm() / (1.0 + y.norm()); }

inline double relative_residual(Complex x, Complex y) { return std::abs(x - y) / (1.0 + std::abs(y)); }

}  // namespace frg::oracle

#pragma once

// Model files: a small DSL for actions plus options, a pretty-printer that
// round-trips, and generation of truncation bases.
//
//   model   := "matrices" NAME+ ";" "action" "{" term* "}" [ "options" "{" option* "}" ]
//   term    := [ "-" ] factor ( "*" factor )* ";"
//   factor  := number | "(" [ "-" ] number [ "/" number ] ")" | "N" [ "^" int ]
//            | "Tr" "(" letter* ")" [ "^" int ] | coupling
//   letter  := NAME [ "^" int ]
//   option  := NAME "=" value ";"
//
// A term without a coupling must be a kinetic term c * Tr(X X). Numeric
// factors of an interaction term form its symmetry factor; without any, the
// default symmetry factor of the shape is used. '#' starts a comment.

#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "frg/flow.hpp"
#include "frg/invariants.hpp"

namespace frg {

class ModelError : public std::runtime_error {
 public:
  ModelError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

enum class Parity { Each, Total, None };

inline std::string to_string(Parity p) {
  switch (p) {
    case Parity::Each: return "each";
    case Parity::Total: return "total";
    case Parity::None: return "none";
  }
  return "?";
}

struct ModelOptions {
  std::optional<unsigned> k_max;
  std::optional<unsigned> coupling_order;
  std::optional<std::size_t> degree_max;
  std::optional<Rational> normalization;
  std::optional<std::size_t> basis_degree;
  std::optional<std::size_t> basis_traces;
  std::optional<Parity> basis_parity;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> starts;
  std::optional<Rational> radius;
  std::map<std::string, Rational> kappa;  // fixed N exponents by coupling

  bool operator==(const ModelOptions&) const = default;
};

struct Model {
  ActionSeries action;
  ModelOptions options;

  bool operator==(const Model&) const = default;
};

namespace detail {

struct Token {
  enum Kind { Ident, Number, Punct, End } kind = End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

inline std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < src.size();) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    std::size_t j = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Token::Ident;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      t.kind = Token::Number;
    } else if (std::string("{}();*/^=-").find(c) != std::string::npos) {
      j = i + 1;
      t.kind = Token::Punct;
    } else {
      throw ModelError(line, col, std::string("unexpected character '") + c + "'");
    }
    t.text = src.substr(i, j - i);
    col += j - i;
    i = j;
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

// Exact value of a decimal literal such as 12 or 0.125.
inline Rational decimal_value(const std::string& text) {
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(mpz_class(text, 10));
  const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  mpz_class den = 1;
  for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
  Rational q{mpz_class(digits, 10), den};
  q.canonicalize();
  return q;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(tokenize(src)) {}

  Model parse() {
    Model m;
    expect_ident("matrices");
    std::vector<std::string> names;
    while (peek().kind == Token::Ident) {
      const Token& t = next();
      if (t.text == "N" || t.text == "Tr") fail(t, "'" + t.text + "' is reserved");
      for (const auto& n : names)
        if (n == t.text) fail(t, "duplicate matrix '" + t.text + "'");
      names.push_back(t.text);
    }
    if (names.empty()) fail(peek(), "expected matrix names");
    expect_punct(";");
    m.action.alphabet = Alphabet(names);

    const Token& act = expect_ident("action");
    expect_punct("{");
    std::set<std::string> couplings;
    while (!is_punct("}")) parse_term(m.action, couplings);
    next();
    for (std::size_t c = 0; c < names.size(); ++c) {
      bool found = false;
      for (const auto& k : m.action.kinetic) found = found || k.matrix == c;
      if (!found) fail(act, "no kinetic term for matrix " + names[c]);
    }

    if (peek().kind == Token::Ident && peek().text == "options") {
      next();
      expect_punct("{");
      while (!is_punct("}")) parse_option(m.options);
      next();
    }
    if (peek().kind != Token::End) fail(peek(), "unexpected '" + peek().text + "'");
    return m;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is_punct(const char* p) const { return peek().kind == Token::Punct && peek().text == p; }

  [[noreturn]] static void fail(const Token& t, const std::string& msg) { throw ModelError(t.line, t.column, msg); }

  const Token& expect_punct(const char* p) {
    if (!is_punct(p)) fail(peek(), std::string("expected '") + p + "'" + found());
    return next();
  }
  const Token& expect_ident(const char* word) {
    if (peek().kind != Token::Ident || peek().text != word) fail(peek(), std::string("expected '") + word + "'" + found());
    return next();
  }
  std::string found() const { return peek().kind == Token::End ? " at end of input" : ", found '" + peek().text + "'"; }

  long parse_int(bool allow_negative) {
    bool neg = false;
    if (allow_negative && is_punct("-")) {
      next();
      neg = true;
    }
    const Token& t = peek();
    if (t.kind != Token::Number || t.text.find('.') != std::string::npos) fail(t, "expected an integer" + found());
    next();
    const long v = std::stol(t.text);
    return neg ? -v : v;
  }

  Rational parse_number() {
    const Token& t = peek();
    if (t.kind != Token::Number) fail(t, "expected a number" + found());
    next();
    return decimal_value(t.text);
  }

  // "(" ["-"] number ["/" number] ")"
  Rational parse_paren_number() {
    expect_punct("(");
    Rational sign(1);
    if (is_punct("-")) {
      next();
      sign = -1;
    }
    Rational v = parse_number();
    if (is_punct("/")) {
      const Token& slash = next();
      Rational d = parse_number();
      if (d == 0) fail(slash, "division by zero");
      v /= d;
    }
    expect_punct(")");
    return sign * v;
  }

  void parse_word(const Alphabet& alpha, Word& out) {
    while (peek().kind == Token::Ident) {
      const Token& t = next();
      std::vector<Letter> letters;
      const int idx = alpha.find(t.text);
      if (idx >= 0) {
        letters.push_back(static_cast<Letter>(idx));
      } else {
        // Run-together single-character names, e.g. ABAB.
        for (char ch : t.text) {
          const int l = alpha.find(std::string(1, ch));
          if (l < 0) fail(t, "unknown matrix '" + t.text + "'");
          letters.push_back(static_cast<Letter>(l));
        }
      }
      long power = 1;
      if (is_punct("^")) {
        next();
        power = parse_int(false);
        if (power < 1) fail(t, "letter power must be positive");
        if (letters.size() != 1) fail(t, "'^' applies to a single matrix");
      }
      for (long p = 0; p < power; ++p)
        for (Letter l : letters) out.push_back(l);
    }
  }

  void parse_term(ActionSeries& action, std::set<std::string>& couplings) {
    const Token& start = peek();
    if (start.kind == Token::End) fail(start, "unterminated action block");
    Rational coef(1);
    bool has_number = false;
    if (is_punct("-")) {
      next();
      coef = -1;
    }
    int n_power = 0;
    std::optional<std::string> coupling;
    std::optional<Token> coupling_tok;
    std::vector<CyclicWord> traces;
    std::vector<Word> raw;
    for (;;) {
      const Token& t = peek();
      if (t.kind == Token::Number) {
        coef *= parse_number();
        has_number = true;
      } else if (is_punct("(")) {
        coef *= parse_paren_number();
        has_number = true;
      } else if (t.kind == Token::Ident && t.text == "N") {
        next();
        long p = 1;
        if (is_punct("^")) {
          next();
          p = parse_int(true);
        }
        n_power += static_cast<int>(p);
      } else if (t.kind == Token::Ident && t.text == "Tr") {
        next();
        expect_punct("(");
        Word w;
        parse_word(action.alphabet, w);
        expect_punct(")");
        long power = 1;
        if (is_punct("^")) {
          next();
          power = parse_int(false);
          if (power < 1) fail(t, "trace power must be positive");
        }
        for (long p = 0; p < power; ++p) {
          traces.emplace_back(w);
          raw.push_back(w);
        }
      } else if (t.kind == Token::Ident) {
        next();
        if (coupling) fail(t, "term has two couplings");
        if (t.text == "matrices" || t.text == "action" || t.text == "options") fail(t, "'" + t.text + "' is reserved");
        if (action.alphabet.find(t.text) >= 0) fail(t, "matrix '" + t.text + "' outside a trace");
        coupling = t.text;
        coupling_tok = t;
      } else {
        fail(t, "expected a factor" + found());
      }
      if (is_punct("*")) {
        next();
        continue;
      }
      expect_punct(";");
      break;
    }
    if (traces.empty()) fail(start, "term has no trace");

    if (!coupling) {
      const Word& w = raw.front();
      if (traces.size() != 1 || w.size() != 2 || w[0] != w[1]) fail(start, "interaction term needs a coupling");
      for (const auto& k : action.kinetic)
        if (k.matrix == w[0]) fail(start, "second kinetic term for matrix " + action.alphabet.name(w[0]));
      action.kinetic.push_back({w[0], coef, n_power});
      return;
    }
    if (!couplings.insert(*coupling).second) fail(*coupling_tok, "duplicate coupling '" + *coupling + "'");
    TraceMonomial shape(traces, n_power);
    const Rational sym = has_number ? coef : coef * default_symmetry_factor(shape);
    if (sym == 0) fail(start, "zero coefficient");
    action.operators.push_back({Symbol::bare(*coupling), sym, shape});
  }

  void parse_option(ModelOptions& o) {
    const Token& key = peek();
    if (key.kind != Token::Ident) fail(key, "expected an option name" + found());
    next();
    expect_punct("=");
    auto nonneg = [&]() {
      const long v = parse_int(false);
      return static_cast<std::size_t>(v);
    };
    auto rational = [&]() -> Rational {
      Rational sign(1);
      if (is_punct("-")) {
        next();
        sign = -1;
      }
      Rational v = parse_number();
      if (is_punct("/")) {
        next();
        Rational d = parse_number();
        if (d == 0) fail(key, "division by zero");
        v /= d;
      }
      return sign * v;
    };
    const std::string& k = key.text;
    if (k == "kmax") {
      o.k_max = static_cast<unsigned>(nonneg());
      if (*o.k_max < 1) fail(key, "kmax must be at least 1");
    } else if (k == "order") {
      o.coupling_order = static_cast<unsigned>(nonneg());
    } else if (k == "degree_max") {
      o.degree_max = nonneg();
    } else if (k == "normalization") {
      o.normalization = rational();
      if (*o.normalization <= 0) fail(key, "normalization must be positive");
    } else if (k == "basis_degree") {
      o.basis_degree = nonneg();
    } else if (k == "basis_traces") {
      o.basis_traces = nonneg();
      if (*o.basis_traces < 1) fail(key, "basis_traces must be at least 1");
    } else if (k == "basis_parity") {
      const Token& v = peek();
      if (v.kind != Token::Ident) fail(v, "expected each, total or none");
      next();
      if (v.text == "each") o.basis_parity = Parity::Each;
      else if (v.text == "total") o.basis_parity = Parity::Total;
      else if (v.text == "none") o.basis_parity = Parity::None;
      else fail(v, "expected each, total or none");
    } else if (k == "seed") {
      o.seed = nonneg();
    } else if (k == "starts") {
      o.starts = static_cast<unsigned>(nonneg());
    } else if (k == "radius") {
      o.radius = rational();
      if (*o.radius <= 0) fail(key, "radius must be positive");
    } else if (k.rfind("kappa_", 0) == 0 && k.size() > 6) {
      o.kappa[k.substr(6)] = rational();
    } else {
      fail(key, "unknown option '" + k + "'");
    }
    expect_punct(";");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline std::string format_rational(const Rational& q) {
  if (q.get_den() == 1 && q >= 0) return q.get_str();
  return "(" + q.get_str() + ")";
}

inline std::string format_word(const Word& w, const Alphabet& alpha) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += alpha.name(w[i]);
  }
  return out;
}

}  // namespace detail

inline Model parse_model(const std::string& text) { return detail::Parser(text).parse(); }

inline std::string print_model(const Model& m) {
  const Alphabet& alpha = m.action.alphabet;
  std::string out = "matrices";
  for (const auto& n : alpha.names()) out += " " + n;
  out += ";\naction {\n";
  auto npow = [](int p) -> std::string {
    if (p == 0) return "";
    if (p == 1) return "N * ";
    return "N^" + std::to_string(p) + " * ";
  };
  for (const auto& k : m.action.kinetic) {
    const std::string x = alpha.name(k.matrix);
    out += "  " + npow(k.n_power) + detail::format_rational(k.coefficient) + " * Tr(" + x + " " + x + ");\n";
  }
  for (const auto& op : m.action.operators) {
    out += "  " + npow(op.shape.n_power()) + op.coupling.name + " * " + detail::format_rational(op.symmetry_factor);
    for (const auto& tr : op.shape.traces()) out += " * Tr(" + detail::format_word(tr.word(), alpha) + ")";
    out += ";\n";
  }
  out += "}\n";
  const ModelOptions& o = m.options;
  std::vector<std::string> lines;
  auto rat = [](const Rational& q) { return q.get_str(); };
  if (o.k_max) lines.push_back("kmax = " + std::to_string(*o.k_max));
  if (o.coupling_order) lines.push_back("order = " + std::to_string(*o.coupling_order));
  if (o.degree_max) lines.push_back("degree_max = " + std::to_string(*o.degree_max));
  if (o.normalization) lines.push_back("normalization = " + rat(*o.normalization));
  if (o.basis_degree) lines.push_back("basis_degree = " + std::to_string(*o.basis_degree));
  if (o.basis_traces) lines.push_back("basis_traces = " + std::to_string(*o.basis_traces));
  if (o.basis_parity) lines.push_back("basis_parity = " + to_string(*o.basis_parity));
  if (o.seed) lines.push_back("seed = " + std::to_string(*o.seed));
  if (o.starts) lines.push_back("starts = " + std::to_string(*o.starts));
  if (o.radius) lines.push_back("radius = " + rat(*o.radius));
  for (const auto& [c, v] : o.kappa) lines.push_back("kappa_" + c + " = " + rat(v));
  if (!lines.empty()) {
    out += "options {\n";
    for (const auto& l : lines) out += "  " + l + ";\n";
    out += "}\n";
  }
  return out;
}

struct BasisSpec {
  std::size_t max_degree = 4;
  std::size_t max_traces = 1;
  Parity parity = Parity::Each;
};

inline bool parity_ok(const TraceMonomial& t, std::size_t n_letters, Parity p) {
  if (p == Parity::None) return true;
  if (p == Parity::Total) return t.degree() % 2 == 0;
  for (std::size_t c = 0; c < n_letters; ++c)
    if (t.letter_count(static_cast<Letter>(c)) % 2) return false;
  return true;
}

// Every invariant with 1..max_traces nonempty traces and degree <= max_degree
// passing the parity filter, kinetic shapes Tr(X_c X_c) excluded. Sorted by
// degree, then trace count, then shape.
inline std::vector<TraceMonomial> generate_basis(std::size_t n_letters, const BasisSpec& spec) {
  double total = 0, layer = 1;
  for (std::size_t d = 1; d <= spec.max_degree; ++d) total += (layer *= static_cast<double>(n_letters));
  if (total > 2e6) throw std::invalid_argument("basis too large");
  std::set<CyclicWord> cyc;
  for (std::size_t d = 1; d <= spec.max_degree; ++d) {
    std::vector<Letter> digits(d, 0);
    for (;;) {
      Word w;
      for (Letter l : digits) w.push_back(l);
      cyc.insert(CyclicWord(w));
      std::size_t i = 0;
      while (i < d && ++digits[i] == n_letters) digits[i++] = 0;
      if (i == d) break;
    }
  }
  const std::vector<CyclicWord> words(cyc.begin(), cyc.end());
  std::set<TraceMonomial> found;
  std::vector<CyclicWord> cur;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t from, std::size_t degree) {
    if (!cur.empty()) {
      TraceMonomial t(cur, 0);
      if (parity_ok(t, n_letters, spec.parity)) found.insert(t);
    }
    if (cur.size() == spec.max_traces) return;
    for (std::size_t i = from; i < words.size(); ++i) {
      if (degree + words[i].size() > spec.max_degree) continue;
      cur.push_back(words[i]);
      rec(i, degree + words[i].size());
      cur.pop_back();
    }
  };
  rec(0, 0);
  std::vector<TraceMonomial> out;
  for (const auto& t : found) {
    bool kinetic = false;
    for (std::size_t c = 0; c < n_letters; ++c) kinetic = kinetic || t == kinetic_shape(static_cast<Letter>(c));
    if (!kinetic) out.push_back(t);
  }
  std::stable_sort(out.begin(), out.end(), [](const TraceMonomial& a, const TraceMonomial& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return a.traces().size() < b.traces().size();
  });
  return out;
}

// Coupling name for a generated operator, e.g. g_AAAA or g_A_ABB.
inline std::string basis_coupling_name(const TraceMonomial& t, const Alphabet& alpha) {
  std::string name = "g";
  for (const auto& tr : t.traces()) {
    name += "_";
    for (std::size_t i = 0; i < tr.size(); ++i) name += alpha.name(tr.word()[i]);
  }
  return name;
}

inline std::optional<BasisSpec> basis_spec(const ModelOptions& o) {
  if (!o.basis_degree) return std::nullopt;
  BasisSpec s;
  s.max_degree = *o.basis_degree;
  s.max_traces = o.basis_traces.value_or(1);
  s.parity = o.basis_parity.value_or(Parity::Each);
  return s;
}

// The action with the requested basis filled in: generated invariants not
// already present get a coupling of their own and their default symmetry
// factor.
inline ActionSeries expanded_action(const Model& m) {
  ActionSeries a = m.action;
  if (auto spec = basis_spec(m.options)) {
    std::set<TraceMonomial> present;
    std::set<std::string> names;
    for (const auto& op : a.operators) {
      present.insert(op.shape.without_n());
      names.insert(op.coupling.name);
    }
    for (const auto& t : generate_basis(a.alphabet.size(), *spec)) {
      if (present.count(t)) continue;
      std::string name = basis_coupling_name(t, a.alphabet);
      while (names.count(name)) name += "_";
      names.insert(name);
      a.operators.push_back({Symbol::bare(name), default_symmetry_factor(t), t});
    }
  }
  for (const auto& [c, v] : m.options.kappa)
    if (!a.find(Symbol::bare(c))) throw std::invalid_argument("kappa_" + c + " names no coupling");
  return a;
}

// Truncation parameters with defaults: kmax 2, order = kmax, degree_max = the
// largest operator degree.
inline RhsOptions rhs_options(const Model& m, const ActionSeries& expanded) {
  RhsOptions r;
  r.k_max = m.options.k_max.value_or(2);
  r.coupling_order = m.options.coupling_order.value_or(r.k_max);
  if (m.options.degree_max) {
    r.degree_max = *m.options.degree_max;
  } else {
    std::size_t d = 2;
    for (const auto& op : expanded.operators) d = std::max(d, op.shape.degree());
    r.degree_max = d;
  }
  return r;
}

}  // namespace frg
